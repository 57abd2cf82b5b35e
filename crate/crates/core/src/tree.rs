//! Finite balls in the universal covering tree of an edge-indexed graph.
//!
//! Only the edge indices are used: a lift of `x` has `i(e)` neighbours above
//! each edge `e` at `x`, one of which is the parent when the vertex was
//! entered along `ē`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gog::{EdgeId, EdgeIndexedGraph, VertexId};

pub const DEFAULT_MAX_BALL_VERTICES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallVertex {
    pub id: usize,
    pub depth: usize,
    pub base_vertex: VertexId,
    /// Base edge covered by the tree edge from the parent.
    pub edge: Option<EdgeId>,
    #[serde(skip)]
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Vertices in breadth-first order; vertex 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeBall {
    pub radius: usize,
    pub vertices: Vec<BallVertex>,
}

/// The radius-`r` ball around a lift of `x0`.
pub fn universal_ball(
    g: &EdgeIndexedGraph,
    x0: VertexId,
    radius: usize,
    max_vertices: usize,
) -> Result<TreeBall> {
    let graph = &g.graph;
    if x0 >= graph.vertex_count() {
        return Err(Error::InvalidInput(format!("no vertex {x0}")));
    }
    if !graph.is_connected() {
        return Err(Error::InvalidInput("base graph must be connected".into()));
    }
    let mut vertices = vec![BallVertex {
        id: 0,
        depth: 0,
        base_vertex: x0,
        edge: None,
        parent: None,
        children: Vec::new(),
    }];
    let mut next = 0;
    while next < vertices.len() {
        let v = next;
        next += 1;
        let (depth, x, entered) = (vertices[v].depth, vertices[v].base_vertex, vertices[v].edge);
        if depth == radius {
            continue;
        }
        for e in graph.edges_at(x) {
            let mut lifts = g.index[e] as usize;
            if entered.is_some_and(|f| graph.bar(f) == e) {
                lifts -= 1;
            }
            for _ in 0..lifts {
                if vertices.len() >= max_vertices {
                    return Err(Error::CapExceeded {
                        what: "ball vertices",
                        requested: vertices.len() as u128 + 1,
                        limit: max_vertices as u128,
                    });
                }
                let id = vertices.len();
                vertices.push(BallVertex {
                    id,
                    depth: depth + 1,
                    base_vertex: graph.terminus(e),
                    edge: Some(e),
                    parent: Some(v),
                    children: Vec::new(),
                });
                vertices[v].children.push(id);
            }
        }
    }
    Ok(TreeBall { radius, vertices })
}

impl TreeBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        let vx = &self.vertices[v];
        vx.children.len() + usize::from(vx.parent.is_some())
    }

    /// Degree histogram over vertices strictly inside the ball.
    pub fn degree_profile(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for v in self.vertices.iter().filter(|v| v.depth < self.radius) {
            *out.entry(self.degree(v.id)).or_insert(0) += 1;
        }
        out
    }

    /// AHU canonical code of the rooted tree, ignoring labels: equal codes
    /// exactly when the balls are isomorphic as rooted trees.
    pub fn canonical_code(&self) -> String {
        let mut codes: Vec<String> = vec![String::new(); self.len()];
        // Children always have larger ids, so reverse order is post-order.
        for v in (0..self.len()).rev() {
            let mut child: Vec<String> = self.vertices[v]
                .children
                .iter()
                .map(|&c| std::mem::take(&mut codes[c]))
                .collect();
            child.sort_unstable();
            let mut code = String::with_capacity(2 + child.iter().map(String::len).sum::<usize>());
            code.push('(');
            for c in child {
                code.push_str(&c);
            }
            code.push(')');
            codes[v] = code;
        }
        std::mem::take(&mut codes[0])
    }

    /// Indented text, one vertex per line with its base vertex and the base
    /// edge it was reached along.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            let vx = &self.vertices[v];
            let _ = write!(
                out,
                "{}v{} x{}",
                "  ".repeat(vx.depth),
                vx.id,
                vx.base_vertex
            );
            if let Some(e) = vx.edge {
                let _ = write!(out, " via e{e}");
            }
            out.push('\n');
            stack.extend(vx.children.iter().rev());
        }
        out
    }
}

/// A morphism of graphs: images of vertices and of directed edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMap {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// Whether `f: (X, i) → (Y, j)` is a covering of edge-indexed graphs:
/// a graph morphism with `Σ_{e ↦ e', o(e) = x} i(e) = j(e')` for every
/// vertex `x` and every edge `e'` at `f(x)`.
pub fn check_eig_covering(x: &EdgeIndexedGraph, y: &EdgeIndexedGraph, f: &GraphMap) -> bool {
    let (gx, gy) = (&x.graph, &y.graph);
    if f.vertices.len() != gx.vertex_count() || f.edges.len() != gx.edge_count() {
        return false;
    }
    if f.vertices.iter().any(|&v| v >= gy.vertex_count())
        || f.edges.iter().any(|&e| e >= gy.edge_count())
    {
        return false;
    }
    let morphism = (0..gx.edge_count()).all(|e| {
        gy.origin(f.edges[e]) == f.vertices[gx.origin(e)]
            && f.edges[gx.bar(e)] == gy.bar(f.edges[e])
    });
    if !morphism {
        return false;
    }
    (0..gx.vertex_count()).all(|v| {
        let mut sums: HashMap<EdgeId, u64> = HashMap::new();
        for e in gx.edges_at(v) {
            *sums.entry(f.edges[e]).or_insert(0) += x.index[e];
        }
        gy.edges_at(f.vertices[v])
            .all(|e2| sums.get(&e2).copied().unwrap_or(0) == y.index[e2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gog::{Graph, GraphOfGroups};

    fn loop_base(p: usize) -> EdgeIndexedGraph {
        GraphOfGroups::loop_base(p).edge_indexed().unwrap()
    }

    /// Vertices of the radius-r ball in the d-regular tree.
    fn regular_ball_size(d: usize, r: usize) -> usize {
        (0..=r)
            .map(|j| {
                if j == 0 {
                    1
                } else {
                    d * (d - 1).pow(j as u32 - 1)
                }
            })
            .sum()
    }

    #[test]
    fn loop_ball_sizes() {
        let b = universal_ball(&loop_base(2), 0, 1, 100).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.degree(0), 4);
        assert_eq!(universal_ball(&loop_base(3), 0, 2, 100).unwrap().len(), 37);
        assert_eq!(
            universal_ball(&loop_base(2), 0, 4, 1000).unwrap().len(),
            161
        );
        for p in [2, 3, 5] {
            for r in 0..4 {
                let b = universal_ball(&loop_base(p), 0, r, 100_000).unwrap();
                assert_eq!(b.len(), regular_ball_size(2 * p, r));
            }
        }
    }

    #[test]
    fn radius_zero_is_a_point() {
        let b = universal_ball(&loop_base(5), 0, 0, 10).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.degree_profile().is_empty());
    }

    #[test]
    fn profiles() {
        let b = universal_ball(&loop_base(5), 0, 3, 10_000).unwrap();
        assert_eq!(b.degree_profile(), BTreeMap::from([(10, 1 + 10 + 90)]));
        // Both the loop with indices (1, 1) and the segment with indices
        // (2, 2) unwrap to the line; the segment with (1, 1) is its own cover.
        for line in [
            EdgeIndexedGraph::new(Graph::loop_graph(), vec![1, 1]).unwrap(),
            EdgeIndexedGraph::new(Graph::segment(), vec![2, 2]).unwrap(),
        ] {
            let b = universal_ball(&line, 0, 5, 100).unwrap();
            assert_eq!(b.len(), 11);
            assert_eq!(b.degree_profile(), BTreeMap::from([(2, 9)]));
        }
        let edge = EdgeIndexedGraph::new(Graph::segment(), vec![1, 1]).unwrap();
        assert_eq!(universal_ball(&edge, 0, 5, 100).unwrap().len(), 2);
    }

    #[test]
    fn vertex_cap() {
        assert!(matches!(
            universal_ball(&loop_base(2), 0, 4, 160),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn canonical_codes() {
        let a = universal_ball(&loop_base(2), 0, 3, 1000).unwrap();
        let b = universal_ball(&loop_base(2), 0, 3, 1000).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
        let c = universal_ball(&loop_base(3), 0, 1, 1000).unwrap();
        assert_ne!(a.canonical_code(), c.canonical_code());
        // A star with 4 leaves equals the radius-1 ball at p = 2.
        let star = universal_ball(&loop_base(2), 0, 1, 10).unwrap();
        assert_eq!(star.canonical_code(), "(()()()())");
        // The segment with indices (2,1) seen from either end differs.
        let seg = EdgeIndexedGraph::new(Graph::segment(), vec![2, 1]).unwrap();
        let from0 = universal_ball(&seg, 0, 2, 100).unwrap();
        let from1 = universal_ball(&seg, 1, 2, 100).unwrap();
        assert_ne!(from0.canonical_code(), from1.canonical_code());
    }

    #[test]
    fn text_export() {
        let b = universal_ball(&loop_base(2), 0, 1, 10).unwrap();
        let text = b.to_text();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("v0 x0\n  v1 x0 via e0\n"));
    }

    #[test]
    fn eig_coverings() {
        let base = loop_base(3);
        let id = GraphMap {
            vertices: vec![0],
            edges: vec![0, 1],
        };
        assert!(check_eig_covering(&base, &base, &id));
        let broken = loop_base(2);
        assert!(!check_eig_covering(&broken, &base, &id));
        let seg = EdgeIndexedGraph::new(Graph::segment(), vec![2, 1]).unwrap();
        assert!(check_eig_covering(
            &seg,
            &seg,
            &GraphMap {
                vertices: vec![0, 1],
                edges: vec![0, 1]
            }
        ));
        // A 2-cycle with indices 1 double covers the loop with indices 1.
        let cycle = EdgeIndexedGraph::new(
            Graph::new(2, &[(0, 1), (1, 0), (1, 3), (0, 2)]).unwrap(),
            vec![1, 1, 1, 1],
        )
        .unwrap();
        let double = GraphMap {
            vertices: vec![0, 0],
            edges: vec![0, 1, 0, 1],
        };
        assert!(check_eig_covering(&cycle, &loop_base(1), &double));
        assert!(!check_eig_covering(&cycle, &loop_base(2), &double));
    }
}
