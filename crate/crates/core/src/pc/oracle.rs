//! Order of the presented group by coset enumeration over the trivial
//! subgroup. Shares nothing with collection: relators are spelled out as
//! words in generators and their formal inverses and traced through a coset
//! table.

use super::MatrixA;
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Relators of the presentation, generator `i` as column `2i` and its
/// inverse as column `2i + 1`.
fn relators(a: &MatrixA) -> Vec<Vec<usize>> {
    let (p, k) = (a.p() as usize, a.k());
    let gen = |i: usize| 2 * i;
    let inv = |i: usize| 2 * i + 1;
    let mut rels = Vec::new();
    for i in 0..=k {
        rels.push(vec![gen(i); p]);
    }
    for d in 1..=k {
        let c = a.commutator_exponents(d);
        for i in 0..=k - d {
            // g_i g_{i+d} g_i^-1 g_{i+d}^-1 (g_{i+1}^{c_1} ... g_{i+d-1}^{c_{d-1}})^-1
            let mut r = vec![gen(i), gen(i + d), inv(i), inv(i + d)];
            for t in (1..d).rev() {
                r.extend(std::iter::repeat_n(inv(i + t), c[t - 1] as usize));
            }
            rels.push(r);
        }
    }
    rels
}

struct CosetTable {
    cols: usize,
    table: Vec<Vec<usize>>,
    forward: Vec<usize>,
    deductions: Vec<(usize, usize)>,
    limit: usize,
}

impl CosetTable {
    fn new(cols: usize, limit: usize) -> Self {
        CosetTable {
            cols,
            table: vec![vec![NONE; cols]],
            forward: vec![0],
            deductions: Vec::new(),
            limit,
        }
    }

    #[inline]
    fn inv_col(x: usize) -> usize {
        x ^ 1
    }

    fn is_live(&self, c: usize) -> bool {
        self.forward[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.table.len() >= self.limit {
            return Err(Error::OracleInconclusive { limit: self.limit });
        }
        let n = self.table.len();
        self.table.push(vec![NONE; self.cols]);
        self.forward.push(n);
        self.table[c][x] = n;
        self.table[n][Self::inv_col(x)] = c;
        self.deductions.push((c, x));
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.forward[r] != r {
            r = self.forward[r];
        }
        let mut x = c;
        while self.forward[x] != r {
            let next = self.forward[x];
            self.forward[x] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.forward[hi] = lo;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                let xi = Self::inv_col(x);
                if self.table[f][xi] == e {
                    self.table[f][xi] = NONE;
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][xi] != NONE {
                    let t = self.table[f1][xi];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][xi] = e1;
                    self.deductions.push((e1, x));
                }
            }
        }
    }

    /// Traces `w` from `c` both ways without defining cosets; records a
    /// deduction when exactly one entry is missing, a coincidence when the
    /// two ends disagree.
    fn scan(&mut self, c: usize, w: &[usize]) {
        let mut f = c;
        let mut i = 0;
        let mut j = w.len();
        while i < j && self.table[f][w[i]] != NONE {
            f = self.table[f][w[i]];
            i += 1;
        }
        if i == j {
            if f != c {
                self.coincidence(f, c);
            }
            return;
        }
        let mut b = c;
        while j > i && self.table[b][Self::inv_col(w[j - 1])] != NONE {
            b = self.table[b][Self::inv_col(w[j - 1])];
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
        } else if j == i + 1 {
            self.table[f][w[i]] = b;
            self.table[b][Self::inv_col(w[i])] = f;
            self.deductions.push((f, w[i]));
        }
    }

    fn process_deductions(&mut self, conjugates: &[Vec<Vec<usize>>]) {
        while let Some((c, x)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            let d = self.table[c][x];
            for w in &conjugates[x] {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, w);
            }
            if d != NONE && self.is_live(d) {
                for w in &conjugates[Self::inv_col(x)] {
                    if !self.is_live(d) {
                        break;
                    }
                    self.scan(d, w);
                }
            }
        }
    }

    fn live_count(&self) -> usize {
        (0..self.table.len()).filter(|&c| self.is_live(c)).count()
    }
}

/// Order of the group presented by the relations for `A`, with coset limit
/// `2 p^(k+1)`.
pub fn order_oracle(a: &MatrixA) -> Result<usize> {
    let limit = 2 * (a.p() as usize).pow(a.k() as u32 + 1);
    order_oracle_with_limit(a, limit)
}

/// Felsch-style enumeration: fill the first undefined table entry, then
/// process every deduction by scanning all relator conjugates that start
/// with the deduced column.
pub fn order_oracle_with_limit(a: &MatrixA, limit: usize) -> Result<usize> {
    let cols = 2 * (a.k() + 1);
    let rels = relators(a);
    // conjugates[x]: every cyclic conjugate of every relator or inverse
    // relator that starts with column x.
    let mut conjugates: Vec<Vec<Vec<usize>>> = vec![Vec::new(); cols];
    for r in &rels {
        let inverse: Vec<usize> = r.iter().rev().map(|&x| CosetTable::inv_col(x)).collect();
        for word in [r, &inverse] {
            for s in 0..word.len() {
                let mut conj = word[s..].to_vec();
                conj.extend_from_slice(&word[..s]);
                if !conjugates[conj[0]].contains(&conj) {
                    conjugates[conj[0]].push(conj);
                }
            }
        }
    }
    let mut ct = CosetTable::new(cols, limit);
    let mut c = 0;
    while c < ct.table.len() {
        for x in 0..cols {
            if !ct.is_live(c) {
                break;
            }
            if ct.table[c][x] == NONE {
                ct.define(c, x)?;
                ct.process_deductions(&conjugates);
            }
        }
        c += 1;
    }
    Ok(ct.live_count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        assert_eq!(order_oracle(&MatrixA::zero(2, 2).unwrap()).unwrap(), 8);
        assert_eq!(
            order_oracle(&MatrixA::new(2, 2, vec![vec![1]]).unwrap()).unwrap(),
            8
        );
        assert_eq!(order_oracle(&MatrixA::zero(3, 1).unwrap()).unwrap(), 9);
        assert_eq!(order_oracle(&MatrixA::zero(2, 3).unwrap()).unwrap(), 16);
    }

    #[test]
    fn relator_shapes() {
        let a = MatrixA::new(3, 3, vec![vec![2], vec![1, 2]]).unwrap();
        let rels = relators(&a);
        assert_eq!(rels.len(), 4 + 3 + 2 + 1);
        // [g0, g3] g2^-2 g1^-1
        assert_eq!(rels.last().unwrap(), &vec![0, 6, 1, 7, 5, 5, 3]);
    }

    #[test]
    fn tiny_limit_is_reported() {
        assert!(matches!(
            order_oracle_with_limit(&MatrixA::zero(2, 3).unwrap(), 4),
            Err(Error::OracleInconclusive { limit: 4 })
        ));
    }
}
