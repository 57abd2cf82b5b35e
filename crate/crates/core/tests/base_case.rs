//! The p = 2, k = 1 case against a hand enumeration over both groups of
//! order 4.

mod support;

use std::sync::Arc;

use bsll_core::count::{count_overlattices, CountOptions};
use bsll_core::covering::{iso_necessary, iso_sufficient, LoopCovering};
use bsll_core::group::{GroupHom, GroupTable};
use support::order4::{self, HandCovering};

fn to_library(c: &HandCovering) -> LoopCovering {
    let table = Arc::new(GroupTable::from_mul(order4::ORDER, c.group.table()).unwrap());
    let g1 = table.subgroup_from_elements(&c.g1).unwrap();
    let g2 = table.subgroup_from_elements(&c.g2).unwrap();
    let phi = GroupHom::from_pairs(order4::ORDER, c.phi.iter().copied()).unwrap();
    LoopCovering::new(2, table, g1, g2, phi, c.u).unwrap()
}

#[test]
fn hand_enumeration_counts() {
    let valid = order4::valid_coverings();
    // Z/4 has a single subgroup of order 2, so G1 = G2 and the loop is not
    // faithful. V4 contributes one covering per ordered pair of distinct
    // subgroups, with u the remaining involution.
    assert!(valid.iter().all(|c| c.group == order4::Order4::Klein));
    assert_eq!(valid.len(), 6);
    assert_eq!(order4::class_count(&valid, false), 1);
    assert_eq!(order4::class_count(&valid, true), 1);
}

#[test]
fn validation_matches_hand_enumeration() {
    for c in order4::all_candidates() {
        assert_eq!(to_library(&c).is_valid(), c.is_valid(), "{c:?}");
    }
}

#[test]
fn predicates_match_hand_enumeration() {
    let valid = order4::valid_coverings();
    let lib: Vec<LoopCovering> = valid.iter().map(to_library).collect();
    for (a, la) in valid.iter().zip(&lib) {
        for (b, lb) in valid.iter().zip(&lib) {
            let s = iso_sufficient(la, lb);
            let n = iso_necessary(la, lb);
            assert_eq!(s.is_some(), order4::related(a, b, false), "{a:?} {b:?}");
            assert_eq!(n.is_some(), order4::related(a, b, true), "{a:?} {b:?}");
            if let Some(w) = s {
                assert!(w.replays_sufficient(la, lb));
            }
            if let Some(w) = n {
                assert!(w.replays_necessary(la, lb));
            }
        }
    }
}

#[test]
fn pipeline_matches_hand_enumeration() {
    let valid = order4::valid_coverings();
    let r = count_overlattices(2, 1, &CountOptions::default()).unwrap();
    assert_eq!(
        r.classes_sufficient as usize,
        order4::class_count(&valid, false)
    );
    assert_eq!(
        r.classes_necessary as usize,
        order4::class_count(&valid, true)
    );
    assert!(r.bounds_ok.all);
}
