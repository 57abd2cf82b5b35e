//! Overlattices of the loop lattice in the automorphism group of the
//! `2p`-regular tree, counted through coverings of graphs of finite groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: finite groups as multiplication tables, subgroups,
//!   homomorphisms and a constrained isomorphism search.
//! * [`pc`]: the p-groups `G(A)` given by a lower-triangular commutator
//!   matrix, built by collection and checked against coset enumeration.
//! * [`gog`]: graphs of groups, covolume, edge indices and faithfulness.
//! * [`covering`]: normalised coverings of the loop by the loop and two
//!   isomorphism predicates bracketing covering isomorphism.
//! * [`tree`]: finite balls of universal covering trees.
//! * [`count`]: the enumeration pipeline, reports and result cache.

pub mod count;
pub mod covering;
pub mod error;
pub mod gog;
pub mod group;
pub mod pc;
pub mod tree;

pub use error::{Error, Result};

/// Desk-scale guards shared by the exhaustive routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest group order any table-based routine will accept.
    pub max_order: usize,
    /// Rewrite budget for a single collection.
    pub max_rewrites: usize,
    /// Vertex budget for universal-cover balls.
    pub max_ball_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: group::DEFAULT_MAX_ORDER,
            max_rewrites: 1_000_000,
            max_ball_vertices: 1_000_000,
        }
    }
}
