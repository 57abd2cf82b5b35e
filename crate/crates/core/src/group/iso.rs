use std::collections::VecDeque;
use std::ops::ControlFlow;

use super::{ElemId, GroupHom, GroupTable, Subgroup};

/// Side conditions an isomorphism `ψ: src → dst` must satisfy.
///
/// * `subgroups`: `ψ(S) = S'` for each pair `(S, S')`.
/// * `elements`: `ψ(x) = y` for each pair.
/// * `intertwinings`: `ψ ∘ f = f' ∘ ψ` on the domain of `f`, for each pair
///   `(f, f')` of maps `src ⊇ dom f → src` and `dst ⊇ dom f' → dst`.
#[derive(Clone, Debug, Default)]
pub struct IsoConstraints<'a> {
    pub subgroups: Vec<(&'a Subgroup, &'a Subgroup)>,
    pub elements: Vec<(ElemId, ElemId)>,
    pub intertwinings: Vec<(&'a GroupHom, &'a GroupHom)>,
}

impl<'a> IsoConstraints<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subgroup(mut self, from: &'a Subgroup, to: &'a Subgroup) -> Self {
        self.subgroups.push((from, to));
        self
    }

    pub fn element(mut self, from: ElemId, to: ElemId) -> Self {
        self.elements.push((from, to));
        self
    }

    pub fn intertwine(mut self, f: &'a GroupHom, f_prime: &'a GroupHom) -> Self {
        self.intertwinings.push((f, f_prime));
        self
    }

    /// Re-checks every constraint against a complete map.
    pub fn holds_for(&self, psi: &GroupHom) -> bool {
        let img = |x| psi.apply(x);
        self.elements.iter().all(|&(x, y)| img(x) == Some(y))
            && self.subgroups.iter().all(|(s, t)| {
                s.order() == t.order()
                    && s.elements()
                        .iter()
                        .all(|&x| img(x).is_some_and(|y| t.contains(y)))
            })
            && self.intertwinings.iter().all(|(f, g)| {
                f.pairs().all(|(x, fx)| {
                    let lhs = img(fx);
                    let rhs = img(x).and_then(|y| g.apply(y));
                    lhs.is_some() && lhs == rhs
                })
            })
    }
}

/// Backtracking search for isomorphisms satisfying [`IsoConstraints`].
///
/// Images are chosen for a greedy generating set of `src` in ascending
/// candidate order, so results come out in a fixed order. Constraint
/// consequences (forced images through intertwinings, powers, inverses) are
/// propagated eagerly; each leaf is closed over the Cayley graph and
/// re-verified in full.
pub struct IsoSearch<'a> {
    src: &'a GroupTable,
    dst: &'a GroupTable,
    constraints: IsoConstraints<'a>,
    gens: Vec<ElemId>,
    src_orders: Vec<usize>,
    dst_orders: Vec<usize>,
    inverse_maps: Vec<(GroupHom, GroupHom)>,
}

struct State {
    fwd: Vec<Option<ElemId>>,
    used: Vec<bool>,
    trail: Vec<ElemId>,
    queue: VecDeque<(ElemId, ElemId)>,
}

impl<'a> IsoSearch<'a> {
    pub fn new(src: &'a GroupTable, dst: &'a GroupTable, constraints: IsoConstraints<'a>) -> Self {
        let inverse_maps = constraints
            .intertwinings
            .iter()
            .map(|(f, g)| {
                let fi = invert_partial(f, src.order());
                let gi = invert_partial(g, dst.order());
                (fi, gi)
            })
            .collect();
        IsoSearch {
            src,
            dst,
            gens: src.greedy_generators(),
            src_orders: src.element_orders(),
            dst_orders: dst.element_orders(),
            constraints,
            inverse_maps,
        }
    }

    pub fn find_all(&self) -> Vec<GroupHom> {
        let mut out = Vec::new();
        self.for_each(|h| {
            out.push(h.clone());
            ControlFlow::Continue(())
        });
        out
    }

    pub fn find_first(&self) -> Option<GroupHom> {
        let mut out = None;
        self.for_each(|h| {
            out = Some(h.clone());
            ControlFlow::Break(())
        });
        out
    }

    /// Visits each isomorphism in search order until `visit` breaks.
    pub fn for_each(&self, mut visit: impl FnMut(&GroupHom) -> ControlFlow<()>) {
        if self.src.order() != self.dst.order() {
            return;
        }
        let mut src_hist = self.src_orders.clone();
        let mut dst_hist = self.dst_orders.clone();
        src_hist.sort_unstable();
        dst_hist.sort_unstable();
        if src_hist != dst_hist {
            return;
        }
        if self
            .constraints
            .subgroups
            .iter()
            .any(|(s, t)| s.order() != t.order())
        {
            return;
        }
        let n = self.src.order();
        let mut state = State {
            fwd: vec![None; n],
            used: vec![false; n],
            trail: Vec::new(),
            queue: VecDeque::new(),
        };
        let seed: Vec<_> = std::iter::once((0, 0))
            .chain(self.constraints.elements.iter().copied())
            .collect();
        for (x, y) in seed {
            if x >= n || y >= n || !self.assign(&mut state, x, y) {
                return;
            }
        }
        let _ = self.dfs(&mut state, 0, &mut visit);
    }

    fn dfs(
        &self,
        state: &mut State,
        depth: usize,
        visit: &mut impl FnMut(&GroupHom) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(&g) = self.gens.get(depth) else {
            return match self.close_leaf(state) {
                Some(hom) => visit(&hom),
                None => ControlFlow::Continue(()),
            };
        };
        if state.fwd[g].is_some() {
            return self.dfs(state, depth + 1, visit);
        }
        for y in 0..self.dst.order() {
            if state.used[y] || self.dst_orders[y] != self.src_orders[g] {
                continue;
            }
            let mark = state.trail.len();
            if self.assign(state, g, y) {
                self.dfs(state, depth + 1, visit)?;
            }
            undo(state, mark);
        }
        ControlFlow::Continue(())
    }

    /// Records `x ↦ y` plus every forced consequence; false on conflict.
    fn assign(&self, state: &mut State, x: ElemId, y: ElemId) -> bool {
        state.queue.clear();
        state.queue.push_back((x, y));
        while let Some((x, y)) = state.queue.pop_front() {
            if let Some(z) = state.fwd[x] {
                if z != y {
                    return false;
                }
                continue;
            }
            if state.used[y] || self.src_orders[x] != self.dst_orders[y] {
                return false;
            }
            if self
                .constraints
                .elements
                .iter()
                .any(|&(a, b)| (a == x) != (b == y))
            {
                return false;
            }
            if self
                .constraints
                .subgroups
                .iter()
                .any(|(s, t)| s.contains(x) != t.contains(y))
            {
                return false;
            }
            state.fwd[x] = Some(y);
            state.used[y] = true;
            state.trail.push(x);
            for ((f, g), (fi, gi)) in self
                .constraints
                .intertwinings
                .iter()
                .zip(&self.inverse_maps)
            {
                if let Some(fx) = f.apply(x) {
                    match g.apply(y) {
                        Some(gy) => state.queue.push_back((fx, gy)),
                        None => return false,
                    }
                }
                if let Some(px) = fi.apply(x) {
                    match gi.apply(y) {
                        Some(py) => state.queue.push_back((px, py)),
                        None => return false,
                    }
                }
            }
            state
                .queue
                .push_back((self.src.mul(x, x), self.dst.mul(y, y)));
            state.queue.push_back((self.src.inv(x), self.dst.inv(y)));
        }
        true
    }

    fn close_leaf(&self, state: &State) -> Option<GroupHom> {
        let n = self.src.order();
        let mut img: Vec<Option<ElemId>> = vec![None; n];
        let mut hit = vec![false; n];
        img[0] = Some(0);
        hit[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            let ix = img[x]?;
            for &g in &self.gens {
                let target = self.dst.mul(ix, state.fwd[g]?);
                let xg = self.src.mul(x, g);
                match img[xg] {
                    Some(prev) if prev != target => return None,
                    Some(_) => {}
                    None => {
                        if hit[target] {
                            return None;
                        }
                        hit[target] = true;
                        img[xg] = Some(target);
                        queue.push_back(xg);
                    }
                }
            }
        }
        let img: Vec<ElemId> = img.into_iter().collect::<Option<_>>()?;
        if state
            .fwd
            .iter()
            .enumerate()
            .any(|(x, y)| y.is_some_and(|y| img[x] != y))
        {
            return None;
        }
        let hom = GroupHom::total(img);
        self.constraints.holds_for(&hom).then_some(hom)
    }
}

fn undo(state: &mut State, mark: usize) {
    while state.trail.len() > mark {
        let x = state.trail.pop().unwrap();
        let y = state.fwd[x].take().unwrap();
        state.used[y] = false;
    }
}

fn invert_partial(f: &GroupHom, order: usize) -> GroupHom {
    GroupHom::from_pairs(order, f.pairs().map(|(x, y)| (y, x)))
        .expect("intertwining maps must be injective")
}

/// All isomorphisms `src → dst` satisfying `constraints`, in search order.
pub fn iso_search(
    src: &GroupTable,
    dst: &GroupTable,
    constraints: &IsoConstraints<'_>,
) -> Vec<GroupHom> {
    IsoSearch::new(src, dst, constraints.clone()).find_all()
}
