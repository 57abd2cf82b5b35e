//! The p-groups `G(A)`: generators `g_0, ..., g_k` of order `p`, adjacent
//! generators commuting, and `[g_i, g_{i+d}]` given by row `d-1` of a
//! lower-triangular matrix `A`.
//!
//! Products are computed by collection to the normal form
//! `g_0^{i_0} ... g_k^{i_k}`. Collection always terminates here, but the
//! normal forms need not be distinct; [`build_group`] settles consistency by
//! sweeping the group axioms over the collected table.

mod matrix;
mod oracle;

pub use matrix::{
    enumerate_last_row_zero, enumerate_matrices, free_entry_count, is_prime, MatrixA, MatrixRecord,
};
pub use oracle::{order_oracle, order_oracle_with_limit};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{check_axioms, ElemId, GroupHom, GroupTable, Subgroup};
use crate::Limits;

/// A word as `(generator, exponent)` pairs.
pub type Syllables = Vec<(usize, u32)>;

/// Exponent vector `(i_0, ..., i_k)` of `g_0^{i_0} ... g_k^{i_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalWord(pub Vec<u32>);

impl NormalWord {
    pub fn identity(k: usize) -> Self {
        NormalWord(vec![0; k + 1])
    }

    /// Table id: base-`p` digits with `i_0` most significant.
    pub fn rank(&self, p: u32) -> ElemId {
        self.0
            .iter()
            .fold(0, |acc, &e| acc * p as usize + e as usize)
    }

    pub fn from_rank(mut id: ElemId, p: u32, k: usize) -> Self {
        let mut exps = vec![0; k + 1];
        for slot in exps.iter_mut().rev() {
            *slot = (id % p as usize) as u32;
            id /= p as usize;
        }
        NormalWord(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// As a word of `(generator, exponent)` syllables, zeros dropped.
    pub fn syllables(&self) -> Vec<(usize, u32)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(g, &e)| (g, e))
            .collect()
    }
}

/// Merges equal neighbours, reduces exponents mod `p` and drops zeros.
fn normalize(p: u32, word: &mut Vec<(usize, u32)>) {
    let mut out: Vec<(usize, u32)> = Vec::with_capacity(word.len());
    for &(g, e) in word.iter() {
        let e = e % p;
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == g => {
                last.1 = (last.1 + e) % p;
                if last.1 == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, e)),
        }
    }
    *word = out;
}

/// Collects a word in the generators of `G(A)` to normal form.
///
/// Strategy: repeatedly take the leftmost adjacent pair `g_b g_a` with
/// `b > a` and replace it by `w^-1 g_a g_b`, where `w = [g_a, g_b]`, then
/// merge equal neighbours. Fails once `max_rewrites` swaps have been made.
pub fn collect(word: &[(usize, u32)], a: &MatrixA, max_rewrites: usize) -> Result<NormalWord> {
    let (p, k) = (a.p(), a.k());
    if let Some(&(g, _)) = word.iter().find(|(g, _)| *g > k) {
        return Err(Error::InvalidInput(format!(
            "generator index {g} outside 0..={k}"
        )));
    }
    let mut w: Vec<(usize, u32)> = word.to_vec();
    normalize(p, &mut w);
    let mut rewrites = 0usize;
    while let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i].0 > w[i + 1].0) {
        rewrites += 1;
        if rewrites > max_rewrites {
            return Err(Error::NonTermination {
                rewrites: max_rewrites,
            });
        }
        let (b, x) = w[i];
        let (lo, y) = w[i + 1];
        let mut patch = Vec::with_capacity(b - lo + 4);
        patch.push((b, x - 1));
        let c = a.commutator_exponents(b - lo);
        for t in (1..b - lo).rev() {
            patch.push((lo + t, (p - c[t - 1]) % p));
        }
        patch.extend([(lo, 1), (b, 1), (lo, y - 1)]);
        w.splice(i..i + 2, patch);
        normalize(p, &mut w);
    }
    let mut exps = vec![0; k + 1];
    for (g, e) in w {
        exps[g] = e;
    }
    Ok(NormalWord(exps))
}

/// The relations of the presentation, each as `(lhs, rhs)` syllable words:
/// `g_i^p = 1` and `[g_i, g_{i+d}] = prod_t g_{i+t}^{a[d-1][t]}`.
pub fn relations(a: &MatrixA) -> Vec<(Syllables, Syllables)> {
    let (p, k) = (a.p(), a.k());
    let mut rels = Vec::new();
    for i in 0..=k {
        rels.push((vec![(i, p)], Vec::new()));
    }
    for d in 1..=k {
        let c = a.commutator_exponents(d);
        for i in 0..=k - d {
            let lhs = vec![(i, 1), (i + d, 1), (i, p - 1), (i + d, p - 1)];
            let rhs = (1..d).map(|t| (i + t, c[t - 1])).collect();
            rels.push((lhs, rhs));
        }
    }
    rels
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    Inconsistent { reason: String },
}

/// `G(A)` together with its collected multiplication table.
#[derive(Clone, Debug)]
pub struct GAGroup {
    matrix: MatrixA,
    table: Option<Arc<GroupTable>>,
    gens: Vec<ElemId>,
    consistency: Consistency,
}

impl GAGroup {
    pub fn matrix(&self) -> &MatrixA {
        &self.matrix
    }

    pub fn p(&self) -> u32 {
        self.matrix.p()
    }

    pub fn k(&self) -> usize {
        self.matrix.k()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistency == Consistency::Consistent
    }

    pub fn consistency(&self) -> &Consistency {
        &self.consistency
    }

    /// The table; present exactly when the presentation is consistent.
    pub fn table(&self) -> Option<&Arc<GroupTable>> {
        self.table.as_ref()
    }

    /// Ids of `g_0, ..., g_k`.
    pub fn generators(&self) -> &[ElemId] {
        &self.gens
    }

    pub fn element_of(&self, w: &NormalWord) -> ElemId {
        w.rank(self.p())
    }

    pub fn word_of(&self, id: ElemId) -> NormalWord {
        NormalWord::from_rank(id, self.p(), self.k())
    }

    /// Id of `g_0 g_k`.
    pub fn corner_element(&self) -> ElemId {
        let mut w = NormalWord::identity(self.k());
        w.0[0] = 1;
        w.0[self.k()] = 1;
        self.element_of(&w)
    }

    fn consistent_table(&self) -> Result<&Arc<GroupTable>> {
        self.table.as_ref().ok_or_else(|| {
            Error::InvalidInput(format!(
                "presentation {:?} is inconsistent",
                self.matrix.entries()
            ))
        })
    }

    /// The two index-`p` subgroups and the exponent shift between them,
    /// each property verified on the table.
    pub fn shift_data(&self) -> Result<ShiftData> {
        let table = self.consistent_table()?;
        let (p, k) = (self.p() as usize, self.k());
        let n = table.order();
        let g1_elems: Vec<_> = (0..n).filter(|id| id % p == 0).collect();
        let g2_elems: Vec<_> = (0..n).filter(|id| id / p.pow(k as u32) == 0).collect();
        let g1 = table.subgroup_from_elements(&g1_elems)?;
        let g2 = table.subgroup_from_elements(&g2_elems)?;
        for (name, sub) in [("G1", &g1), ("G2", &g2)] {
            if sub.index() != p {
                return Err(Error::structural(
                    format!("{name} has index {} instead of {p}", sub.index()),
                    sub.elements().to_vec(),
                ));
            }
        }
        let shift = GroupHom::from_pairs(n, g1_elems.iter().map(|&id| (id, id / p)))?;
        shift
            .verify(table, table)
            .map_err(|(a, b)| Error::structural("shift is not a homomorphism", vec![a, b]))?;
        if shift.image_set() != g2.elements() {
            return Err(Error::structural(
                "shift does not map G1 onto G2",
                shift.image_set(),
            ));
        }
        Ok(ShiftData {
            table: Arc::clone(table),
            g1,
            g2,
            shift,
        })
    }
}

/// `G1 = {i_k = 0}`, `G2 = {i_0 = 0}` and the shift `g_i ↦ g_{i+1}`.
#[derive(Clone, Debug)]
pub struct ShiftData {
    pub table: Arc<GroupTable>,
    pub g1: Subgroup,
    pub g2: Subgroup,
    pub shift: GroupHom,
}

/// Builds the collected table of `G(A)` and decides consistency: every
/// product must collect, the table must satisfy the group axioms on all
/// triples, and every defining relation must hold in it.
pub fn build_group(a: &MatrixA, limits: &Limits) -> Result<GAGroup> {
    let (p, k) = (a.p(), a.k());
    let order = (p as u128)
        .checked_pow(k as u32 + 1)
        .filter(|&n| n <= limits.max_order as u128)
        .ok_or(Error::CapExceeded {
            what: "group order",
            requested: (p as u128).saturating_pow(k as u32 + 1),
            limit: limits.max_order as u128,
        })? as usize;
    let words: Vec<Vec<(usize, u32)>> = (0..order)
        .map(|id| NormalWord::from_rank(id, p, k).syllables())
        .collect();
    let mut mul = Vec::with_capacity(order * order);
    let mut buf = Vec::new();
    for u in &words {
        for v in &words {
            buf.clear();
            buf.extend_from_slice(u);
            buf.extend_from_slice(v);
            mul.push(collect(&buf, a, limits.max_rewrites)?.rank(p));
        }
    }
    let gens: Vec<ElemId> = (0..=k).map(|i| (p as usize).pow((k - i) as u32)).collect();
    let inconsistent = |reason: String| GAGroup {
        matrix: a.clone(),
        table: None,
        gens: gens.clone(),
        consistency: Consistency::Inconsistent { reason },
    };
    let inv = match check_axioms(order, &mul) {
        Ok(inv) => inv,
        Err(v) => return Ok(inconsistent(v.to_string())),
    };
    let table = GroupTable::from_checked_parts(order, mul, inv);
    let eval = |w: &[(usize, u32)]| {
        w.iter().fold(0, |acc, &(g, e)| {
            table.mul(acc, table.pow(gens[g], e as usize))
        })
    };
    for (lhs, rhs) in relations(a) {
        if eval(&lhs) != eval(&rhs) {
            return Ok(inconsistent(format!("relation {lhs:?} = {rhs:?} fails")));
        }
    }
    Ok(GAGroup {
        matrix: a.clone(),
        table: Some(Arc::new(table)),
        gens,
        consistency: Consistency::Consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn heis2() -> MatrixA {
        MatrixA::new(2, 2, vec![vec![1]]).unwrap()
    }

    #[test]
    fn collect_examples() {
        let a = heis2();
        assert_eq!(collect(&[], &a, 100).unwrap(), NormalWord(vec![0, 0, 0]));
        for p in [2, 3, 5] {
            let z = MatrixA::zero(p, 3).unwrap();
            assert_eq!(
                collect(&[(0, p)], &z, 100).unwrap(),
                NormalWord::identity(3)
            );
        }
        // g2 g0 = [g0,g2]^-1 g0 g2 = g1 g0 g2 -> g0 g1 g2
        assert_eq!(
            collect(&[(2, 1), (0, 1)], &a, 100).unwrap(),
            NormalWord(vec![1, 1, 1])
        );
        assert!(matches!(
            collect(&[(3, 1)], &a, 100),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn collect_cap_is_a_hard_error() {
        let a = heis2();
        assert!(matches!(
            collect(&[(2, 1), (0, 1)], &a, 0),
            Err(Error::NonTermination { .. })
        ));
    }

    #[test]
    fn collect_is_idempotent_on_normal_words() {
        let a = MatrixA::new(3, 3, vec![vec![1], vec![2, 1]]).unwrap();
        for id in 0..81 {
            let w = NormalWord::from_rank(id, 3, 3);
            assert_eq!(collect(&w.syllables(), &a, 1000).unwrap(), w);
            assert_eq!(w.rank(3), id);
        }
    }

    #[test]
    fn zero_matrix_gives_elementary_abelian_group() {
        for (p, k) in [(2, 1), (2, 3), (3, 2), (5, 1)] {
            let g = build_group(&MatrixA::zero(p, k).unwrap(), &lim()).unwrap();
            assert!(g.is_consistent());
            let t = g.table().unwrap();
            assert_eq!(t.order(), (p as usize).pow(k as u32 + 1));
            assert!(t.is_abelian());
            assert!((1..t.order()).all(|x| t.element_order(x) == p as usize));
        }
    }

    #[test]
    fn heisenberg_mod_two_is_nonabelian_with_center_g1() {
        let g = build_group(&heis2(), &lim()).unwrap();
        assert!(g.is_consistent());
        let t = g.table().unwrap();
        assert_eq!(t.order(), 8);
        assert!(!t.is_abelian());
        let g1 = g.generators()[1];
        assert_eq!(t.center(), t.closure(&[g1]));
    }

    #[test]
    fn generator_products_reproduce_rewrite_rules() {
        let a = MatrixA::new(2, 3, vec![vec![1], vec![1, 1]]).unwrap();
        let g = build_group(&a, &lim()).unwrap();
        let Some(t) = g.table() else { return };
        for i in 0..=3 {
            for j in 0..=3 {
                let expect = collect(&[(i, 1), (j, 1)], &a, 1000).unwrap().rank(2);
                assert_eq!(t.mul(g.generators()[i], g.generators()[j]), expect);
            }
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let limits = Limits {
            max_order: 16,
            ..Limits::default()
        };
        assert!(matches!(
            build_group(&MatrixA::zero(2, 4).unwrap(), &limits),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn shift_data_examples() {
        let g = build_group(&MatrixA::zero(2, 1).unwrap(), &lim()).unwrap();
        let s = g.shift_data().unwrap();
        let [g0, g1] = [g.generators()[0], g.generators()[1]];
        assert_eq!(s.g1, s.table.closure(&[g0]));
        assert_eq!(s.g2, s.table.closure(&[g1]));
        assert_eq!(s.shift.apply(g0), Some(g1));

        let h = build_group(&heis2(), &lim()).unwrap();
        let s = h.shift_data().unwrap();
        let w = |e: [u32; 3]| NormalWord(e.to_vec()).rank(2);
        assert_eq!(s.shift.apply(w([1, 1, 0])), Some(w([0, 1, 1])));
        assert_eq!(s.g1.order(), 4);
        assert_eq!(s.g2.order(), 4);
    }

    #[test]
    fn corner_element_normal_form() {
        let g = build_group(&MatrixA::zero(3, 3).unwrap(), &lim()).unwrap();
        assert_eq!(g.word_of(g.corner_element()), NormalWord(vec![1, 0, 0, 1]));
    }
}
