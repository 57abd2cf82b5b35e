use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primality by trial division; inputs here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Lower-triangular commutator data `a[s][t]`, `1 <= t <= s <= k-1`, values
/// reduced mod `p`.
///
/// Row `s` (1-based) prescribes the commutator at generator distance `s + 1`:
/// `[g_i, g_{i+s+1}] = g_{i+1}^{a[s][1]} ... g_{i+s}^{a[s][s]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixRecord", into = "MatrixRecord")]
pub struct MatrixA {
    p: u32,
    k: usize,
    rows: Vec<Vec<u32>>,
}

/// File form of a matrix: `{p, k, rows}`, row `s` of length `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub p: u32,
    pub k: usize,
    pub rows: Vec<Vec<u32>>,
}

impl TryFrom<MatrixRecord> for MatrixA {
    type Error = Error;

    fn try_from(r: MatrixRecord) -> Result<Self> {
        MatrixA::new(r.p, r.k, r.rows)
    }
}

impl From<MatrixA> for MatrixRecord {
    fn from(m: MatrixA) -> Self {
        MatrixRecord {
            p: m.p,
            k: m.k,
            rows: m.rows,
        }
    }
}

impl MatrixA {
    pub fn new(p: u32, k: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::InvalidMatrix("k must be at least 1".into()));
        }
        if rows.len() != k - 1 {
            return Err(Error::InvalidMatrix(format!(
                "expected {} rows for k = {k}, found {}",
                k - 1,
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::InvalidMatrix(format!(
                    "row {} must have length {}, found {}",
                    i + 1,
                    i + 1,
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|&&v| v >= p) {
                return Err(Error::InvalidMatrix(format!(
                    "entry {v} in row {} is not in 0..{p}",
                    i + 1
                )));
            }
        }
        Ok(MatrixA { p, k, rows })
    }

    pub fn zero(p: u32, k: usize) -> Result<Self> {
        MatrixA::new(p, k, (1..k).map(|s| vec![0; s]).collect())
    }

    /// Builds a matrix from its free entries listed row by row.
    pub fn from_entries(p: u32, k: usize, entries: &[u32]) -> Result<Self> {
        if entries.len() != free_entry_count(k) {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, found {}",
                free_entry_count(k),
                entries.len()
            )));
        }
        let mut rows = Vec::with_capacity(k.saturating_sub(1));
        let mut it = entries.iter().copied();
        for s in 1..k {
            rows.push(it.by_ref().take(s).collect());
        }
        MatrixA::new(p, k, rows)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Entry `a[s][t]`, 1-based.
    pub fn get(&self, s: usize, t: usize) -> u32 {
        self.rows[s - 1][t - 1]
    }

    pub fn entries(&self) -> Vec<u32> {
        self.rows.iter().flatten().copied().collect()
    }

    /// Exponents `(c_1, ..., c_{d-1})` of the commutator `[g_i, g_{i+d}]`
    /// in terms of `g_{i+1}, ..., g_{i+d-1}`; empty for `d = 1`.
    pub fn commutator_exponents(&self, d: usize) -> &[u32] {
        if d <= 1 {
            &[]
        } else {
            &self.rows[d - 2]
        }
    }

    pub fn last_row_is_zero(&self) -> bool {
        self.rows.last().is_none_or(|r| r.iter().all(|&v| v == 0))
    }

    /// `b·A` mod `p`.
    pub fn scaled(&self, b: u32) -> MatrixA {
        MatrixA {
            p: self.p,
            k: self.k,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&v| (v * b) % self.p).collect())
                .collect(),
        }
    }

    /// Whether `self = b·other` mod `p` for some nonzero `b`.
    pub fn is_homothetic_to(&self, other: &MatrixA) -> bool {
        self.p == other.p && self.k == other.k && (1..self.p).any(|b| other.scaled(b) == *self)
    }
}

pub fn free_entry_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// All `p^(k(k-1)/2)` matrices, lexicographic in the row-major entry list.
pub fn enumerate_matrices(p: u32, k: usize) -> Result<impl Iterator<Item = MatrixA>> {
    enumerate_with_free(p, k, free_entry_count(k))
}

/// Matrices whose last row vanishes: the entries of rows `1..k-2` run
/// lexicographically, the rest are zero.
pub fn enumerate_last_row_zero(p: u32, k: usize) -> Result<impl Iterator<Item = MatrixA>> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    enumerate_with_free(p, k, free_entry_count(k - 1))
}

const MAX_MATRICES: u128 = 1 << 24;

fn enumerate_with_free(p: u32, k: usize, free: usize) -> Result<impl Iterator<Item = MatrixA>> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let total = (p as u128)
        .checked_pow(free as u32)
        .filter(|&t| t <= MAX_MATRICES)
        .ok_or(Error::CapExceeded {
            what: "matrix enumeration",
            requested: u128::MAX,
            limit: MAX_MATRICES,
        })?;
    let all = free_entry_count(k);
    Ok((0..total).map(move |mut index| {
        let mut entries = vec![0u32; all];
        for slot in (0..free).rev() {
            entries[slot] = (index % p as u128) as u32;
            index /= p as u128;
        }
        MatrixA::from_entries(p, k, &entries).expect("enumerated entries are valid")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn validation() {
        assert!(matches!(MatrixA::zero(4, 2), Err(Error::NotPrime(4))));
        assert!(MatrixA::new(2, 3, vec![vec![1], vec![0, 2]]).is_err());
        assert!(MatrixA::new(2, 3, vec![vec![1], vec![0]]).is_err());
        assert!(MatrixA::new(2, 3, vec![vec![1]]).is_err());
        assert!(MatrixA::new(3, 3, vec![vec![2], vec![1, 0]]).is_ok());
        assert_eq!(MatrixA::zero(2, 1).unwrap().rows().len(), 0);
    }

    #[test]
    fn file_format_round_trip_and_rejection() {
        let m = MatrixA::new(3, 3, vec![vec![2], vec![1, 0]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"p":3,"k":3,"rows":[[2],[1,0]]}"#);
        assert_eq!(serde_json::from_str::<MatrixA>(&json).unwrap(), m);
        assert!(serde_json::from_str::<MatrixA>(r#"{"p":3,"k":2,"rows":[[3]]}"#).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_matrices(2, 3).unwrap().count(), 8);
        assert_eq!(enumerate_matrices(2, 1).unwrap().count(), 1);
        assert_eq!(enumerate_matrices(3, 3).unwrap().count(), 27);
        let first: Vec<_> = enumerate_matrices(2, 3)
            .unwrap()
            .take(3)
            .map(|m| m.entries())
            .collect();
        assert_eq!(first, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        assert!(enumerate_matrices(4, 2).is_err());
    }

    #[test]
    fn last_row_zero_family() {
        let fam: Vec<_> = enumerate_last_row_zero(2, 4).unwrap().collect();
        assert_eq!(fam.len(), 8);
        assert!(fam.iter().all(MatrixA::last_row_is_zero));
        assert_eq!(enumerate_last_row_zero(3, 4).unwrap().count(), 27);
        assert_eq!(enumerate_last_row_zero(2, 3).unwrap().count(), 2);
    }

    #[test]
    fn homothety() {
        let a = MatrixA::new(3, 3, vec![vec![1], vec![2, 0]]).unwrap();
        assert!(a.is_homothetic_to(&a.scaled(2)));
        let b = MatrixA::new(3, 3, vec![vec![1], vec![1, 0]]).unwrap();
        assert!(!a.is_homothetic_to(&b));
    }
}
