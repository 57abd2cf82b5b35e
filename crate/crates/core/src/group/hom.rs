use super::{ElemId, GroupTable, Subgroup};
use crate::error::{Error, Result};

/// A homomorphism defined on a closed subset (a subgroup, or the whole group)
/// of a source table.
///
/// The source and target tables are not owned; callers pass them to
/// [`GroupHom::verify`] when the homomorphism law needs checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    lookup: Vec<Option<ElemId>>,
    domain: Vec<ElemId>,
}

impl GroupHom {
    /// A map on the whole source group, `images[x]` being the image of `x`.
    pub fn total(images: Vec<ElemId>) -> Self {
        let domain = (0..images.len()).collect();
        GroupHom {
            lookup: images.into_iter().map(Some).collect(),
            domain,
        }
    }

    pub fn identity(order: usize) -> Self {
        GroupHom::total((0..order).collect())
    }

    /// A map on part of a source group of the given order.
    pub fn from_pairs(
        source_order: usize,
        pairs: impl IntoIterator<Item = (ElemId, ElemId)>,
    ) -> Result<Self> {
        let mut lookup = vec![None; source_order];
        for (x, y) in pairs {
            let slot = lookup
                .get_mut(x)
                .ok_or_else(|| Error::InvalidInput(format!("source id {x} out of range")))?;
            match *slot {
                Some(prev) if prev != y => {
                    return Err(Error::InvalidInput(format!(
                        "source id {x} mapped to both {prev} and {y}"
                    )))
                }
                _ => *slot = Some(y),
            }
        }
        let domain = (0..source_order).filter(|&x| lookup[x].is_some()).collect();
        Ok(GroupHom { lookup, domain })
    }

    /// The restriction of a total map to a subgroup.
    pub fn restrict(&self, sub: &Subgroup) -> Self {
        let mut lookup = vec![None; self.lookup.len()];
        for &x in sub.elements() {
            lookup[x] = self.lookup[x];
        }
        let domain = sub
            .elements()
            .iter()
            .copied()
            .filter(|&x| lookup[x].is_some())
            .collect();
        GroupHom { lookup, domain }
    }

    #[inline]
    pub fn apply(&self, x: ElemId) -> Option<ElemId> {
        self.lookup.get(x).copied().flatten()
    }

    pub fn source_order(&self) -> usize {
        self.lookup.len()
    }

    pub fn domain(&self) -> &[ElemId] {
        &self.domain
    }

    pub fn in_domain(&self, x: ElemId) -> bool {
        self.apply(x).is_some()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
        self.domain
            .iter()
            .map(move |&x| (x, self.lookup[x].unwrap()))
    }

    /// Sorted, deduplicated image set.
    pub fn image_set(&self) -> Vec<ElemId> {
        let mut img: Vec<_> = self.pairs().map(|(_, y)| y).collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    pub fn is_injective(&self) -> bool {
        self.image_set().len() == self.domain.len()
    }

    /// The inverse map from the image back to the domain, if injective.
    pub fn inverse(&self, target_order: usize) -> Option<GroupHom> {
        if !self.is_injective() {
            return None;
        }
        GroupHom::from_pairs(target_order, self.pairs().map(|(x, y)| (y, x))).ok()
    }

    /// `then ∘ self`, defined where both steps are.
    pub fn then(&self, then: &GroupHom) -> GroupHom {
        let mut lookup = vec![None; self.lookup.len()];
        for (x, y) in self.pairs() {
            lookup[x] = then.apply(y);
        }
        let domain = self
            .domain
            .iter()
            .copied()
            .filter(|&x| lookup[x].is_some())
            .collect();
        GroupHom { lookup, domain }
    }

    /// Checks that the domain is closed and `f(ab) = f(a) f(b)` on it.
    /// Returns the first failing pair.
    pub fn verify(&self, src: &GroupTable, dst: &GroupTable) -> Result<(), (ElemId, ElemId)> {
        if self.lookup.len() != src.order() {
            return Err((usize::MAX, usize::MAX));
        }
        for &a in &self.domain {
            let fa = self.lookup[a].unwrap();
            if fa >= dst.order() {
                return Err((a, a));
            }
            for &b in &self.domain {
                let fb = self.lookup[b].unwrap();
                match self.apply(src.mul(a, b)) {
                    Some(fab) if fab == dst.mul(fa, fb) => {}
                    _ => return Err((a, b)),
                }
            }
        }
        Ok(())
    }
}
