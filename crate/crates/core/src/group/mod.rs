//! Concrete finite groups stored as explicit multiplication tables.
//!
//! Element ids run over `0..order` and the identity is always id 0. Every
//! higher-level object in the crate (pc groups, graphs of groups, coverings)
//! reduces its algebra to lookups in a [`GroupTable`], so all structural
//! checks are exhaustive.

mod hom;
mod iso;

pub use hom::GroupHom;
pub use iso::{iso_search, IsoConstraints, IsoSearch};

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ElemId = usize;

/// Default desk-scale cap on group orders handled by exhaustive routines.
pub const DEFAULT_MAX_ORDER: usize = 512;

/// A failed group axiom, carrying the offending elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    OutOfRange { index: usize, value: ElemId },
    Identity(ElemId),
    Inverse(ElemId),
    Associativity(ElemId, ElemId, ElemId),
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomViolation::OutOfRange { index, value } => {
                write!(f, "entry {index} holds out-of-range id {value}")
            }
            AxiomViolation::Identity(a) => write!(f, "0 is not a two-sided identity for {a}"),
            AxiomViolation::Inverse(a) => write!(f, "{a} has no two-sided inverse"),
            AxiomViolation::Associativity(a, b, c) => {
                write!(f, "({a}*{b})*{c} != {a}*({b}*{c})")
            }
        }
    }
}

/// Checks identity, inverse and associativity laws on a raw row-major table
/// and returns the inverse map on success.
pub fn check_axioms(order: usize, mul: &[ElemId]) -> Result<Vec<ElemId>, AxiomViolation> {
    if let Some((index, &value)) = mul.iter().enumerate().find(|(_, &v)| v >= order) {
        return Err(AxiomViolation::OutOfRange { index, value });
    }
    for a in 0..order {
        if mul[a] != a || mul[a * order] != a {
            return Err(AxiomViolation::Identity(a));
        }
    }
    let mut inv = vec![usize::MAX; order];
    for a in 0..order {
        let row = &mul[a * order..(a + 1) * order];
        let b = row
            .iter()
            .position(|&x| x == 0)
            .ok_or(AxiomViolation::Inverse(a))?;
        if mul[b * order + a] != 0 {
            return Err(AxiomViolation::Inverse(a));
        }
        inv[a] = b;
    }
    for a in 0..order {
        for b in 0..order {
            let ab = mul[a * order + b];
            let ab_row = &mul[ab * order..(ab + 1) * order];
            let b_row = &mul[b * order..(b + 1) * order];
            let a_row = &mul[a * order..(a + 1) * order];
            for c in 0..order {
                if ab_row[c] != a_row[b_row[c]] {
                    return Err(AxiomViolation::Associativity(a, b, c));
                }
            }
        }
    }
    Ok(inv)
}

/// Portable form of a table: `{order, mul}` with `mul` row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    pub order: usize,
    pub mul: Vec<ElemId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableRecord", into = "TableRecord")]
pub struct GroupTable {
    order: usize,
    mul: Vec<ElemId>,
    inv: Vec<ElemId>,
    labels: Option<Vec<String>>,
}

impl TryFrom<TableRecord> for GroupTable {
    type Error = Error;

    fn try_from(record: TableRecord) -> Result<Self> {
        GroupTable::from_mul(record.order, record.mul)
    }
}

impl From<GroupTable> for TableRecord {
    fn from(table: GroupTable) -> Self {
        TableRecord {
            order: table.order,
            mul: table.mul,
        }
    }
}

impl GroupTable {
    /// Builds a table, verifying every group axiom exhaustively.
    pub fn from_mul(order: usize, mul: Vec<ElemId>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidTable("order must be positive".into()));
        }
        if mul.len() != order * order {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, found {}",
                order * order,
                mul.len()
            )));
        }
        let inv = check_axioms(order, &mul).map_err(|v| Error::InvalidTable(v.to_string()))?;
        Ok(GroupTable {
            order,
            mul,
            inv,
            labels: None,
        })
    }

    /// Assembles a table whose axioms the caller has already verified with
    /// [`check_axioms`].
    pub(crate) fn from_checked_parts(order: usize, mul: Vec<ElemId>, inv: Vec<ElemId>) -> Self {
        GroupTable {
            order,
            mul,
            inv,
            labels: None,
        }
    }

    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        GroupTable {
            order: n,
            mul,
            inv,
            labels: None,
        }
    }

    /// `(Z/p)^m`, element id = base-`p` digits with the first coordinate most
    /// significant.
    pub fn elementary_abelian(p: usize, m: u32) -> Self {
        (0..m).fold(GroupTable::cyclic(1), |acc, _| {
            acc.direct_product(&GroupTable::cyclic(p))
        })
    }

    /// Direct product; the pair `(a, b)` gets id `a * |other| + b`.
    pub fn direct_product(&self, other: &GroupTable) -> Self {
        let (n, m) = (self.order, other.order);
        let order = n * m;
        let mut mul = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                let a = self.mul(x / m, y / m);
                let b = other.mul(x % m, y % m);
                mul.push(a * m + b);
            }
        }
        let inv = (0..order)
            .map(|x| self.inv(x / m) * m + other.inv(x % m))
            .collect();
        GroupTable {
            order,
            mul,
            inv,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.order {
            return Err(Error::InvalidTable("label count differs from order".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn label(&self, x: ElemId) -> String {
        match &self.labels {
            Some(labels) => labels[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn record(&self) -> TableRecord {
        TableRecord {
            order: self.order,
            mul: self.mul.clone(),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> ElemId {
        0
    }

    #[inline]
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inv[a]
    }

    pub fn pow(&self, a: ElemId, e: usize) -> ElemId {
        let mut acc = 0;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// `g x g^-1`.
    #[inline]
    pub fn conj(&self, g: ElemId, x: ElemId) -> ElemId {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn product<I: IntoIterator<Item = ElemId>>(&self, word: I) -> ElemId {
        word.into_iter().fold(0, |acc, x| self.mul(acc, x))
    }

    pub fn element_order(&self, g: ElemId) -> usize {
        let mut x = g;
        let mut m = 1;
        while x != 0 {
            x = self.mul(x, g);
            m += 1;
        }
        m
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.order).map(|g| self.element_order(g)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, vec![0], Vec::new())
    }

    pub fn whole(&self) -> Subgroup {
        self.closure(&self.greedy_generators())
    }

    /// Smallest subgroup containing `gens`.
    pub fn closure(&self, gens: &[ElemId]) -> Subgroup {
        let mut members = vec![false; self.order];
        members[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !members[y] {
                    members[y] = true;
                    queue.push_back(y);
                }
            }
        }
        let elements = (0..self.order).filter(|&x| members[x]).collect();
        let mut generators = gens.to_vec();
        generators.sort_unstable();
        generators.dedup();
        Subgroup {
            elements,
            generators,
            members,
        }
    }

    /// Generating set chosen greedily in ascending id order: an element is
    /// kept whenever it is not already in the span of the earlier picks.
    pub fn greedy_generators(&self) -> Vec<ElemId> {
        self.greedy_generators_of(0..self.order)
    }

    fn greedy_generators_of(&self, candidates: impl IntoIterator<Item = ElemId>) -> Vec<ElemId> {
        let mut gens = Vec::new();
        let mut span = self.trivial_subgroup();
        for x in candidates {
            if !span.contains(x) {
                gens.push(x);
                span = self.closure(&gens);
            }
        }
        gens
    }

    /// Builds a subgroup from an element set known to be closed; the
    /// generator field is filled greedily.
    pub fn subgroup_from_elements(&self, elements: &[ElemId]) -> Result<Subgroup> {
        let gens = self.greedy_generators_of(elements.iter().copied());
        let sub = self.closure(&gens);
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sub.elements != sorted {
            return Err(Error::structural(
                "element set is not closed under multiplication",
                sorted,
            ));
        }
        Ok(sub)
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        (0..self.order).all(|g| sub.elements.iter().all(|&n| sub.contains(self.conj(g, n))))
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let elements: Vec<_> = a
            .elements
            .iter()
            .copied()
            .filter(|&x| b.contains(x))
            .collect();
        let gens = self.greedy_generators_of(elements.iter().copied());
        self.closure(&gens)
    }

    /// Largest normal subgroup contained in `sub`: the intersection of all
    /// conjugates.
    pub fn normal_core(&self, sub: &Subgroup) -> Subgroup {
        let elements: Vec<_> = sub
            .elements
            .iter()
            .copied()
            .filter(|&x| (0..self.order).all(|g| sub.contains(self.conj(g, x))))
            .collect();
        let gens = self.greedy_generators_of(elements.iter().copied());
        self.closure(&gens)
    }

    pub fn conjugacy_class(&self, g: ElemId) -> Vec<ElemId> {
        let mut class: Vec<_> = (0..self.order).map(|h| self.conj(h, g)).collect();
        class.sort_unstable();
        class.dedup();
        class
    }

    pub fn center(&self) -> Subgroup {
        let elements: Vec<_> = (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect();
        let gens = self.greedy_generators_of(elements.iter().copied());
        self.closure(&gens)
    }

    /// Every subgroup exactly once, ordered by size and then by element set.
    ///
    /// Subgroups are grown by joining known subgroups with cyclic ones until
    /// no new element set appears.
    pub fn subgroups_all(&self, max_order: usize) -> Result<Vec<Subgroup>> {
        if self.order > max_order {
            return Err(Error::CapExceeded {
                what: "group order for subgroup enumeration",
                requested: self.order as u128,
                limit: max_order as u128,
            });
        }
        let mut seen: HashSet<Vec<ElemId>> = HashSet::new();
        let mut all = Vec::new();
        let mut cyclic_gens = Vec::new();
        for x in 0..self.order {
            let c = self.closure(&[x]);
            if seen.insert(c.elements.clone()) {
                cyclic_gens.push(c.generators.first().copied().unwrap_or(0));
                all.push(c);
            }
        }
        let mut frontier: Vec<usize> = (0..all.len()).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for idx in frontier {
                for &c in &cyclic_gens {
                    if all[idx].contains(c) {
                        continue;
                    }
                    let mut gens = all[idx].generators.clone();
                    gens.push(c);
                    let joined = self.closure(&gens);
                    if seen.insert(joined.elements.clone()) {
                        next.push(all.len());
                        all.push(joined);
                    }
                }
            }
            frontier = next;
        }
        all.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then_with(|| a.elements.cmp(&b.elements))
        });
        Ok(all)
    }
}

/// A subgroup of some [`GroupTable`], stored as its sorted element set.
#[derive(Clone, Debug)]
pub struct Subgroup {
    elements: Vec<ElemId>,
    generators: Vec<ElemId>,
    members: Vec<bool>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    fn from_sorted(parent_order: usize, elements: Vec<ElemId>, generators: Vec<ElemId>) -> Self {
        let mut members = vec![false; parent_order];
        for &x in &elements {
            members[x] = true;
        }
        Subgroup {
            elements,
            generators,
            members,
        }
    }

    #[inline]
    pub fn contains(&self, x: ElemId) -> bool {
        self.members.get(x).copied().unwrap_or(false)
    }

    pub fn elements(&self) -> &[ElemId] {
        &self.elements
    }

    pub fn generators(&self) -> &[ElemId] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn parent_order(&self) -> usize {
        self.members.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// Index in the parent group.
    pub fn index(&self) -> usize {
        self.parent_order() / self.order()
    }
}
