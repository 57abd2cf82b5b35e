//! Finite graphs of finite groups.
//!
//! Graphs carry directed edges with a fixed-point-free involution `e ↦ ē`
//! and an origin map; loops and multiple edges are allowed. A graph of
//! groups attaches a table to each vertex and to each edge pair, and a
//! monomorphism `α_e: G_e → G_{o(e)}` to each directed edge.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElemId, GroupHom, GroupTable, Subgroup};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub bar: EdgeId,
    pub origin: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    bar: Vec<EdgeId>,
    origin: Vec<VertexId>,
}

impl Graph {
    /// `edges[e] = (origin, bar)`.
    pub fn new(vertex_count: usize, edges: &[(VertexId, EdgeId)]) -> Result<Self> {
        let g = Graph {
            vertex_count,
            bar: edges.iter().map(|&(_, b)| b).collect(),
            origin: edges.iter().map(|&(o, _)| o).collect(),
        };
        if let Some(problem) = g.involution_problem() {
            return Err(Error::InvalidInput(problem));
        }
        Ok(g)
    }

    /// One vertex with a single loop `e = 0`, `ē = 1`.
    pub fn loop_graph() -> Self {
        Graph::new(1, &[(0, 1), (0, 0)]).unwrap()
    }

    /// Two vertices joined by `e = 0` (from 0) and `ē = 1` (from 1).
    pub fn segment() -> Self {
        Graph::new(2, &[(0, 1), (1, 0)]).unwrap()
    }

    fn involution_problem(&self) -> Option<String> {
        let m = self.bar.len();
        for e in 0..m {
            let b = self.bar[e];
            if b >= m {
                return Some(format!("edge {e} has bar {b} out of range"));
            }
            if b == e {
                return Some(format!("edge {e} is its own reverse"));
            }
            if self.bar[b] != e {
                return Some(format!("bar is not an involution at edge {e}"));
            }
            if self.origin[e] >= self.vertex_count {
                return Some(format!("edge {e} has origin out of range"));
            }
        }
        None
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.bar.len()
    }

    pub fn bar(&self, e: EdgeId) -> EdgeId {
        self.bar[e]
    }

    pub fn origin(&self, e: EdgeId) -> VertexId {
        self.origin[e]
    }

    pub fn terminus(&self, e: EdgeId) -> VertexId {
        self.origin[self.bar[e]]
    }

    /// Edges with origin `x`, ascending.
    pub fn edges_at(&self, x: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_count()).filter(move |&e| self.origin[e] == x)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for e in self.edges_at(x) {
                let y = self.terminus(e);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn edge_records(&self) -> Vec<EdgeRecord> {
        (0..self.edge_count())
            .map(|e| EdgeRecord {
                id: e,
                bar: self.bar[e],
                origin: self.origin[e],
            })
            .collect()
    }
}

/// A graph with a positive index on each directed edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeIndexedGraph {
    pub graph: Graph,
    pub index: Vec<u64>,
}

impl EdgeIndexedGraph {
    pub fn new(graph: Graph, index: Vec<u64>) -> Result<Self> {
        if index.len() != graph.edge_count() || index.contains(&0) {
            return Err(Error::InvalidInput(
                "need one positive index per directed edge".into(),
            ));
        }
        Ok(EdgeIndexedGraph { graph, index })
    }

    /// `Σ_{o(e)=x} i(e)`: the valency of any lift of `x` in the universal
    /// cover.
    pub fn degree(&self, x: VertexId) -> u64 {
        self.graph.edges_at(x).map(|e| self.index[e]).sum()
    }
}

/// A problem found by [`GraphOfGroups::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GogViolation {
    Graph {
        detail: String,
    },
    EdgeGroupNotShared {
        edge: EdgeId,
    },
    AlphaDomain {
        edge: EdgeId,
    },
    AlphaTarget {
        edge: EdgeId,
        value: ElemId,
    },
    AlphaNotHom {
        edge: EdgeId,
        pair: (ElemId, ElemId),
    },
    AlphaNotInjective {
        edge: EdgeId,
        pair: (ElemId, ElemId),
    },
}

#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    graph: Graph,
    vertex_groups: Vec<Arc<GroupTable>>,
    edge_groups: Vec<Arc<GroupTable>>,
    edge_group_of: Vec<usize>,
    alphas: Vec<GroupHom>,
}

impl GraphOfGroups {
    /// Assembles the data without checking the monomorphisms; see
    /// [`GraphOfGroups::validate`]. `edge_group_of[e]` indexes
    /// `edge_groups`.
    pub fn new(
        graph: Graph,
        vertex_groups: Vec<Arc<GroupTable>>,
        edge_groups: Vec<Arc<GroupTable>>,
        edge_group_of: Vec<usize>,
        alphas: Vec<GroupHom>,
    ) -> Result<Self> {
        let m = graph.edge_count();
        if vertex_groups.len() != graph.vertex_count()
            || edge_group_of.len() != m
            || alphas.len() != m
            || edge_group_of.iter().any(|&i| i >= edge_groups.len())
        {
            return Err(Error::InvalidInput(
                "graph of groups data does not match the graph".into(),
            ));
        }
        Ok(GraphOfGroups {
            graph,
            vertex_groups,
            edge_groups,
            edge_group_of,
            alphas,
        })
    }

    /// The base of the counting problem: one vertex with group `Z/p`, one
    /// loop with trivial edge group.
    pub fn loop_base(p: usize) -> Self {
        let trivial = Arc::new(GroupTable::cyclic(1));
        GraphOfGroups::new(
            Graph::loop_graph(),
            vec![Arc::new(GroupTable::cyclic(p))],
            vec![trivial],
            vec![0, 0],
            vec![GroupHom::total(vec![0]), GroupHom::total(vec![0])],
        )
        .expect("loop base is well formed")
    }

    /// The one-vertex loop with vertex group `H`, edge group `G1`,
    /// `α_e` the inclusion and `α_ē = φ`.
    pub fn loop_from(h: Arc<GroupTable>, g1: &Subgroup, phi: &GroupHom) -> Result<Self> {
        let (edge_table, embed) = subgroup_table(&h, g1);
        let alpha_e = GroupHom::total(embed.clone());
        let alpha_bar = GroupHom::total(
            embed
                .iter()
                .map(|&x| {
                    phi.apply(x)
                        .ok_or_else(|| Error::InvalidInput(format!("phi is undefined at {x}")))
                })
                .collect::<Result<_>>()?,
        );
        GraphOfGroups::new(
            Graph::loop_graph(),
            vec![h],
            vec![Arc::new(edge_table)],
            vec![0, 0],
            vec![alpha_e, alpha_bar],
        )
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_group(&self, x: VertexId) -> &Arc<GroupTable> {
        &self.vertex_groups[x]
    }

    pub fn edge_group(&self, e: EdgeId) -> &Arc<GroupTable> {
        &self.edge_groups[self.edge_group_of[e]]
    }

    pub fn alpha(&self, e: EdgeId) -> &GroupHom {
        &self.alphas[e]
    }

    /// `Σ_x 1/|G_x|`, exactly.
    pub fn covolume(&self) -> BigRational {
        self.vertex_groups
            .iter()
            .fold(BigRational::zero(), |acc, g| {
                acc + BigRational::new(BigInt::from(1), BigInt::from(g.order()))
            })
    }

    /// `i(e) = |G_{o(e)}| / |G_e|`.
    pub fn edge_indexed(&self) -> Result<EdgeIndexedGraph> {
        let index = (0..self.graph.edge_count())
            .map(|e| {
                let vo = self.vertex_group(self.graph.origin(e)).order();
                let eo = self.edge_group(e).order();
                if !vo.is_multiple_of(eo) {
                    Err(Error::structural(
                        format!("edge {e}: |G_e| = {eo} does not divide |G_o(e)| = {vo}"),
                        vec![e],
                    ))
                } else {
                    Ok((vo / eo) as u64)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        EdgeIndexedGraph::new(self.graph.clone(), index)
    }

    /// Every well-formedness problem: graph involution, shared edge groups,
    /// and each `α_e` a monomorphism into `G_{o(e)}`.
    pub fn validate(&self) -> Vec<GogViolation> {
        let mut out = Vec::new();
        if let Some(detail) = self.graph.involution_problem() {
            out.push(GogViolation::Graph { detail });
            return out;
        }
        if !self.graph.is_connected() {
            out.push(GogViolation::Graph {
                detail: "graph is not connected".into(),
            });
        }
        for e in 0..self.graph.edge_count() {
            if self.edge_group_of[e] != self.edge_group_of[self.graph.bar(e)] {
                out.push(GogViolation::EdgeGroupNotShared { edge: e });
            }
            let src = self.edge_group(e);
            let dst = self.vertex_group(self.graph.origin(e));
            let alpha = &self.alphas[e];
            if alpha.source_order() != src.order() || alpha.domain().len() != src.order() {
                out.push(GogViolation::AlphaDomain { edge: e });
                continue;
            }
            if let Some((_, y)) = alpha.pairs().find(|&(_, y)| y >= dst.order()) {
                out.push(GogViolation::AlphaTarget { edge: e, value: y });
                continue;
            }
            if let Err(pair) = alpha.verify(src, dst) {
                out.push(GogViolation::AlphaNotHom { edge: e, pair });
                continue;
            }
            let mut hit: Vec<Option<ElemId>> = vec![None; dst.order()];
            for (x, y) in alpha.pairs() {
                if let Some(prev) = hit[y] {
                    out.push(GogViolation::AlphaNotInjective {
                        edge: e,
                        pair: (prev, x),
                    });
                    break;
                }
                hit[y] = Some(x);
            }
        }
        out
    }

    /// Decides faithfulness by brute force: for each nontrivial normal
    /// subgroup of a root vertex group lying inside every edge image there,
    /// the edge subgroup family it forces is propagated across the graph and
    /// checked.
    pub fn is_faithful(&self, max_order: usize) -> Result<Faithfulness> {
        if self.graph.vertex_count() == 0 {
            return Ok(Faithfulness::faithful());
        }
        if !self.graph.is_connected() {
            return Err(Error::InvalidInput(
                "graph of groups must be connected".into(),
            ));
        }
        let root = 0;
        let g0 = self.vertex_group(root);
        let images = self.edge_image_intersection(root);
        for cand in g0.subgroups_all(max_order)? {
            if cand.is_trivial() || !cand.is_subset_of(&images) || !g0.is_normal(&cand) {
                continue;
            }
            if let Some(family) = self.propagate_family(root, cand.elements()) {
                return Ok(Faithfulness {
                    faithful: false,
                    witness: Some(family),
                });
            }
        }
        Ok(Faithfulness::faithful())
    }

    fn edge_image_intersection(&self, x: VertexId) -> Subgroup {
        let g = self.vertex_group(x);
        self.graph.edges_at(x).fold(g.whole(), |acc, e| {
            let img = g.closure(&self.alphas[e].image_set());
            g.intersection(&acc, &img)
        })
    }

    fn propagate_family(&self, root: VertexId, n_root: &[ElemId]) -> Option<EdgeSubgroupFamily> {
        let nv = self.graph.vertex_count();
        let ne = self.graph.edge_count();
        let mut vertex: Vec<Option<Vec<ElemId>>> = vec![None; nv];
        let mut edge: Vec<Option<Vec<ElemId>>> = vec![None; ne];
        vertex[root] = Some(n_root.to_vec());
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let nx = vertex[x].clone().unwrap();
            for e in self.graph.edges_at(x) {
                let alpha = &self.alphas[e];
                let inverse = alpha.inverse(self.vertex_group(x).order())?;
                let mut ne_elems: Vec<ElemId> = nx
                    .iter()
                    .map(|&g| inverse.apply(g))
                    .collect::<Option<_>>()?;
                ne_elems.sort_unstable();
                let bar = self.graph.bar(e);
                let y = self.graph.origin(bar);
                let mut ny: Vec<ElemId> = ne_elems
                    .iter()
                    .map(|&h| self.alphas[bar].apply(h))
                    .collect::<Option<_>>()?;
                ny.sort_unstable();
                match &vertex[y] {
                    Some(existing) if *existing != ny => return None,
                    Some(_) => {}
                    None => {
                        let gy = self.vertex_group(y);
                        let sub = gy.subgroup_from_elements(&ny).ok()?;
                        if !gy.is_normal(&sub) {
                            return None;
                        }
                        vertex[y] = Some(ny);
                        queue.push_back(y);
                    }
                }
                match &edge[e] {
                    Some(existing) if *existing != ne_elems => return None,
                    _ => {
                        edge[e] = Some(ne_elems.clone());
                        edge[bar] = Some(ne_elems);
                    }
                }
            }
        }
        let family = EdgeSubgroupFamily {
            edge_subgroups: edge.into_iter().collect::<Option<_>>()?,
            vertex_subgroups: vertex.into_iter().collect::<Option<_>>()?,
        };
        family.revalidates(self).then_some(family)
    }

    pub fn record(&self) -> GogRecord {
        let mut edge_groups = Vec::new();
        for e in 0..self.graph.edge_count() {
            let bar = self.graph.bar(e);
            if e < bar {
                edge_groups.push(EdgeGroupRecord {
                    edges: [e, bar],
                    group: (**self.edge_group(e)).clone(),
                });
            }
        }
        GogRecord {
            vertices: (0..self.graph.vertex_count()).collect(),
            edges: self.graph.edge_records(),
            vertex_groups: self.vertex_groups.iter().map(|g| (**g).clone()).collect(),
            edge_groups,
            alphas: (0..self.graph.edge_count())
                .map(|e| AlphaRecord {
                    edge: e,
                    image: self.alphas[e].pairs().map(|(_, y)| y).collect(),
                })
                .collect(),
        }
    }

    pub fn from_record(record: GogRecord) -> Result<Self> {
        let nv = record.vertices.len();
        if record.vertices.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidInput("vertices must be 0..n in order".into()));
        }
        let mut edges = record.edges.clone();
        edges.sort_by_key(|e| e.id);
        if edges.iter().enumerate().any(|(i, e)| i != e.id) {
            return Err(Error::InvalidInput("edge ids must be 0..m".into()));
        }
        let graph = Graph::new(
            nv,
            &edges.iter().map(|e| (e.origin, e.bar)).collect::<Vec<_>>(),
        )?;
        let m = graph.edge_count();
        let mut edge_group_of = vec![usize::MAX; m];
        let mut edge_groups = Vec::new();
        for (i, eg) in record.edge_groups.into_iter().enumerate() {
            for e in eg.edges {
                if e >= m || edge_group_of[e] != usize::MAX {
                    return Err(Error::InvalidInput(format!(
                        "edge {e} has a missing or repeated edge group"
                    )));
                }
                edge_group_of[e] = i;
            }
            edge_groups.push(Arc::new(eg.group));
        }
        if edge_group_of.contains(&usize::MAX) {
            return Err(Error::InvalidInput("every edge needs an edge group".into()));
        }
        let mut alphas = vec![None; m];
        for a in record.alphas {
            if a.edge >= m {
                return Err(Error::InvalidInput(format!(
                    "alpha for unknown edge {}",
                    a.edge
                )));
            }
            alphas[a.edge] = Some(GroupHom::total(a.image));
        }
        let alphas = alphas
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidInput("every edge needs an alpha".into()))?;
        GraphOfGroups::new(
            graph,
            record.vertex_groups.into_iter().map(Arc::new).collect(),
            edge_groups,
            edge_group_of,
            alphas,
        )
    }
}

/// Interchange form of a graph of groups.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GogRecord {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeRecord>,
    pub vertex_groups: Vec<GroupTable>,
    pub edge_groups: Vec<EdgeGroupRecord>,
    pub alphas: Vec<AlphaRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeGroupRecord {
    pub edges: [EdgeId; 2],
    pub group: GroupTable,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaRecord {
    pub edge: EdgeId,
    pub image: Vec<ElemId>,
}

/// Subgroups `N_e` of the edge groups and the induced `N_x`, as element
/// sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSubgroupFamily {
    pub edge_subgroups: Vec<Vec<ElemId>>,
    pub vertex_subgroups: Vec<Vec<ElemId>>,
}

impl EdgeSubgroupFamily {
    /// `α_e(N_e) = N_{o(e)}` for every edge, each `N_x` a nontrivial normal
    /// subgroup of `G_x`, and `N_e = N_ē`.
    pub fn revalidates(&self, gog: &GraphOfGroups) -> bool {
        let g = gog.graph();
        (0..g.edge_count()).all(|e| {
            let mut img: Vec<_> = self.edge_subgroups[e]
                .iter()
                .filter_map(|&h| gog.alpha(e).apply(h))
                .collect();
            img.sort_unstable();
            img.len() == self.edge_subgroups[e].len()
                && img == self.vertex_subgroups[g.origin(e)]
                && self.edge_subgroups[e] == self.edge_subgroups[g.bar(e)]
        }) && (0..g.vertex_count()).all(|x| {
            let gx = gog.vertex_group(x);
            let nx = &self.vertex_subgroups[x];
            nx.len() > 1
                && gx
                    .subgroup_from_elements(nx)
                    .is_ok_and(|s| gx.is_normal(&s))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Faithfulness {
    pub faithful: bool,
    pub witness: Option<EdgeSubgroupFamily>,
}

impl Faithfulness {
    fn faithful() -> Self {
        Faithfulness {
            faithful: true,
            witness: None,
        }
    }
}

/// Outcome of the one-vertex loop test; the witness is the largest
/// offending subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopFaithfulness {
    pub faithful: bool,
    pub witness: Option<Subgroup>,
}

/// Faithfulness of the loop `(H, G1, G2, φ)`: no nontrivial `N ≤ G1`,
/// normal in `H`, with `φ(N) = N`.
///
/// Computes the largest such `N` as the limit of
/// `M ↦ core_H(M ∩ φ^-1(M))` started at `G1`.
pub fn is_faithful_loop(
    h: &GroupTable,
    g1: &Subgroup,
    g2: &Subgroup,
    phi: &GroupHom,
) -> LoopFaithfulness {
    debug_assert_eq!(g1.order(), g2.order());
    let mut m = g1.clone();
    loop {
        let pre: Vec<ElemId> = m
            .elements()
            .iter()
            .copied()
            .filter(|&x| phi.apply(x).is_some_and(|y| m.contains(y)))
            .collect();
        let pre = h
            .subgroup_from_elements(&pre)
            .expect("preimage of a subgroup is a subgroup");
        let next = h.normal_core(&pre);
        if next == m {
            break;
        }
        m = next;
    }
    if m.is_trivial() {
        LoopFaithfulness {
            faithful: true,
            witness: None,
        }
    } else {
        LoopFaithfulness {
            faithful: false,
            witness: Some(m),
        }
    }
}

/// The table of a subgroup, relabelled `0..|S|` in ascending parent-id
/// order, with its embedding into the parent.
pub fn subgroup_table(parent: &GroupTable, sub: &Subgroup) -> (GroupTable, Vec<ElemId>) {
    let elems = sub.elements().to_vec();
    let mut local = vec![usize::MAX; parent.order()];
    for (i, &x) in elems.iter().enumerate() {
        local[x] = i;
    }
    let n = elems.len();
    let mut mul = Vec::with_capacity(n * n);
    for &a in &elems {
        for &b in &elems {
            mul.push(local[parent.mul(a, b)]);
        }
    }
    let inv = elems.iter().map(|&a| local[parent.inv(a)]).collect();
    (GroupTable::from_checked_parts(n, mul, inv), elems)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn graph_involution_is_checked() {
        assert!(Graph::new(1, &[(0, 0)]).is_err());
        assert!(Graph::new(1, &[(0, 1), (0, 1)]).is_err());
        assert!(Graph::new(1, &[(0, 1), (1, 0)]).is_err());
        let g = Graph::segment();
        assert_eq!(g.terminus(0), 1);
        assert!(g.is_connected());
        assert!(!Graph::new(2, &[]).unwrap().is_connected());
    }

    #[test]
    fn covolume_examples() {
        for p in [2, 3, 5] {
            assert_eq!(GraphOfGroups::loop_base(p).covolume(), rat(1, p as i64));
        }
        let z8 = Arc::new(GroupTable::elementary_abelian(2, 3));
        let g1 = z8.closure(&[4, 2]);
        let phi = GroupHom::from_pairs(8, [(0, 0), (4, 2), (2, 1), (6, 3)]).unwrap();
        let gog = GraphOfGroups::loop_from(z8, &g1, &phi).unwrap();
        assert_eq!(gog.covolume(), rat(1, 8));
        let seg = GraphOfGroups::new(
            Graph::segment(),
            vec![
                Arc::new(GroupTable::cyclic(2)),
                Arc::new(GroupTable::cyclic(3)),
            ],
            vec![Arc::new(GroupTable::cyclic(1))],
            vec![0, 0],
            vec![GroupHom::total(vec![0]), GroupHom::total(vec![0])],
        )
        .unwrap();
        assert_eq!(seg.covolume(), rat(5, 6));
        assert!(seg.validate().is_empty());
    }

    #[test]
    fn edge_indices() {
        let base = GraphOfGroups::loop_base(3).edge_indexed().unwrap();
        assert_eq!(base.index, vec![3, 3]);
        assert_eq!(base.degree(0), 6);
        let t = Arc::new(GroupTable::elementary_abelian(2, 3));
        let whole = t.whole();
        let gog = GraphOfGroups::loop_from(t.clone(), &whole, &GroupHom::identity(8)).unwrap();
        assert_eq!(gog.edge_indexed().unwrap().index, vec![1, 1]);
    }

    #[test]
    fn non_integral_index_is_structural_error() {
        let gog = GraphOfGroups::new(
            Graph::loop_graph(),
            vec![Arc::new(GroupTable::cyclic(4))],
            vec![Arc::new(GroupTable::cyclic(3))],
            vec![0, 0],
            vec![
                GroupHom::total(vec![0, 0, 0]),
                GroupHom::total(vec![0, 0, 0]),
            ],
        )
        .unwrap();
        assert!(matches!(gog.edge_indexed(), Err(Error::Structural { .. })));
    }

    #[test]
    fn validate_negative_fixtures() {
        assert!(GraphOfGroups::loop_base(2).validate().is_empty());
        // Edge group Z/2 embedded as if into Z/4, but o(e) carries Z/2.
        let wrong_target = GraphOfGroups::new(
            Graph::segment(),
            vec![
                Arc::new(GroupTable::cyclic(2)),
                Arc::new(GroupTable::cyclic(4)),
            ],
            vec![Arc::new(GroupTable::cyclic(2))],
            vec![0, 0],
            vec![GroupHom::total(vec![0, 2]), GroupHom::total(vec![0, 2])],
        )
        .unwrap();
        assert_eq!(
            wrong_target.validate(),
            vec![GogViolation::AlphaTarget { edge: 0, value: 2 }]
        );
        let collapsing = GraphOfGroups::new(
            Graph::segment(),
            vec![
                Arc::new(GroupTable::cyclic(2)),
                Arc::new(GroupTable::cyclic(4)),
            ],
            vec![Arc::new(GroupTable::cyclic(2))],
            vec![0, 0],
            vec![GroupHom::total(vec![0, 0]), GroupHom::total(vec![0, 2])],
        )
        .unwrap();
        assert_eq!(
            collapsing.validate(),
            vec![GogViolation::AlphaNotInjective {
                edge: 0,
                pair: (0, 1)
            }]
        );
    }

    #[test]
    fn loop_base_is_faithful() {
        let f = GraphOfGroups::loop_base(2).is_faithful(512).unwrap();
        assert!(f.faithful);
    }

    #[test]
    fn z4_loop_is_not_faithful() {
        let h = Arc::new(GroupTable::cyclic(4));
        let g1 = h.closure(&[2]);
        let phi = GroupHom::identity(4).restrict(&g1);
        let loop_verdict = is_faithful_loop(&h, &g1, &g1, &phi);
        assert!(!loop_verdict.faithful);
        assert_eq!(loop_verdict.witness.as_ref().unwrap(), &g1);
        let gog = GraphOfGroups::loop_from(h, &g1, &phi).unwrap();
        let f = gog.is_faithful(512).unwrap();
        assert!(!f.faithful);
        let w = f.witness.unwrap();
        assert_eq!(w.vertex_subgroups, vec![vec![0, 2]]);
        assert!(w.revalidates(&gog));
    }

    #[test]
    fn klein_loop_with_swap_is_faithful() {
        // (Z/2)^2 with g0 = 2, g1 = 1; G1 = <g0>, G2 = <g1>, φ: g0 ↦ g1.
        let h = Arc::new(GroupTable::elementary_abelian(2, 2));
        let g1 = h.closure(&[2]);
        let g2 = h.closure(&[1]);
        let phi = GroupHom::from_pairs(4, [(0, 0), (2, 1)]).unwrap();
        assert!(is_faithful_loop(&h, &g1, &g2, &phi).faithful);
        let gog = GraphOfGroups::loop_from(h, &g1, &phi).unwrap();
        assert!(gog.validate().is_empty());
        assert!(gog.is_faithful(512).unwrap().faithful);
    }

    #[test]
    fn trivial_edge_group_loop_is_faithful() {
        let h = GroupTable::cyclic(3);
        let t = h.trivial_subgroup();
        let phi = GroupHom::from_pairs(3, [(0, 0)]).unwrap();
        assert!(is_faithful_loop(&h, &t, &t, &phi).faithful);
    }

    #[test]
    fn record_round_trip() {
        let h = Arc::new(GroupTable::cyclic(4));
        let g1 = h.closure(&[2]);
        let gog = GraphOfGroups::loop_from(h, &g1, &GroupHom::identity(4).restrict(&g1)).unwrap();
        let json = serde_json::to_string(&gog.record()).unwrap();
        let back = GraphOfGroups::from_record(serde_json::from_str(&json).unwrap()).unwrap();
        assert!(back.validate().is_empty());
        assert_eq!(back.covolume(), gog.covolume());
        assert!(!back.is_faithful(512).unwrap().faithful);
    }
}
