//! Hand enumeration of the two-sheeted coverings of the loop base at p = 2.
//!
//! Everything here is written from scratch over the two groups of order 4,
//! using nothing from the library: subgroups are found by subset closure,
//! faithfulness by checking every subgroup of the edge group, and the two
//! class relations by trying all 24 bijections of the four elements.

#![allow(dead_code)]

pub const ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order4 {
    Cyclic,
    Klein,
}

impl Order4 {
    pub fn mul(self, a: usize, b: usize) -> usize {
        match self {
            Order4::Cyclic => (a + b) % 4,
            Order4::Klein => a ^ b,
        }
    }

    /// Row-major multiplication table.
    pub fn table(self) -> Vec<usize> {
        (0..ORDER)
            .flat_map(|a| (0..ORDER).map(move |b| self.mul(a, b)))
            .collect()
    }

    pub fn inv(self, a: usize) -> usize {
        (0..ORDER).find(|&b| self.mul(a, b) == 0).unwrap()
    }

    pub fn order_of(self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Subgroups as sorted element lists.
    pub fn subgroups(self) -> Vec<Vec<usize>> {
        (0u32..1 << ORDER)
            .filter(|mask| mask & 1 == 1)
            .map(|mask| {
                (0..ORDER)
                    .filter(|&x| mask >> x & 1 == 1)
                    .collect::<Vec<_>>()
            })
            .filter(|s| {
                s.iter()
                    .all(|&a| s.iter().all(|&b| s.contains(&self.mul(a, b))))
            })
            .collect()
    }

    fn is_normal(self, s: &[usize]) -> bool {
        (0..ORDER).all(|g| {
            s.iter()
                .all(|&x| s.contains(&self.mul(self.mul(g, x), self.inv(g))))
        })
    }

    fn automorphisms(self) -> Vec<[usize; ORDER]> {
        permutations()
            .into_iter()
            .filter(|f| {
                (0..ORDER).all(|a| (0..ORDER).all(|b| f[self.mul(a, b)] == self.mul(f[a], f[b])))
            })
            .collect()
    }
}

/// `(G1, G2, φ, u)` with `φ` stored as pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandCovering {
    pub group: Order4,
    pub g1: Vec<usize>,
    pub g2: Vec<usize>,
    pub phi: Vec<(usize, usize)>,
    pub u: usize,
}

impl HandCovering {
    fn phi(&self, x: usize) -> usize {
        self.phi.iter().find(|&&(a, _)| a == x).unwrap().1
    }

    fn phi_inv(&self, y: usize) -> usize {
        self.phi.iter().find(|&&(_, b)| b == y).unwrap().0
    }

    /// No nontrivial normal `N ≤ G1` with `φ(N) = N`.
    pub fn is_faithful(&self) -> bool {
        let h = self.group;
        !h.subgroups().iter().any(|n| {
            if n.len() == 1 || !n.iter().all(|x| self.g1.contains(x)) || !h.is_normal(n) {
                return false;
            }
            let mut image: Vec<usize> = n.iter().map(|&x| self.phi(x)).collect();
            image.sort_unstable();
            &image == n
        })
    }

    pub fn is_valid(&self) -> bool {
        self.group.order_of(self.u) == 2
            && !self.g1.contains(&self.u)
            && !self.g2.contains(&self.u)
            && self.is_faithful()
    }
}

fn permutations() -> Vec<[usize; ORDER]> {
    let mut out = Vec::new();
    let mut cur = [0usize; ORDER];
    fn go(i: usize, used: u32, cur: &mut [usize; ORDER], out: &mut Vec<[usize; ORDER]>) {
        if i == ORDER {
            out.push(*cur);
            return;
        }
        for v in 0..ORDER {
            if used >> v & 1 == 0 {
                cur[i] = v;
                go(i + 1, used | 1 << v, cur, out);
            }
        }
    }
    go(0, 0, &mut cur, &mut out);
    out
}

/// Every `(G1, G2, φ, u)` with both subgroups of index 2, `φ` an isomorphism
/// and `u` any element; validity is decided separately.
pub fn all_candidates() -> Vec<HandCovering> {
    let mut out = Vec::new();
    for group in [Order4::Cyclic, Order4::Klein] {
        let halves: Vec<Vec<usize>> = group
            .subgroups()
            .into_iter()
            .filter(|s| s.len() == 2)
            .collect();
        for g1 in &halves {
            for g2 in &halves {
                // Order-2 groups have exactly one isomorphism between them.
                let phi = vec![(0, 0), (g1[1], g2[1])];
                for u in 0..ORDER {
                    out.push(HandCovering {
                        group,
                        g1: g1.clone(),
                        g2: g2.clone(),
                        phi: phi.clone(),
                        u,
                    });
                }
            }
        }
    }
    out
}

pub fn valid_coverings() -> Vec<HandCovering> {
    all_candidates()
        .into_iter()
        .filter(HandCovering::is_valid)
        .collect()
}

/// Whether a group isomorphism carries one covering to the other, directly
/// or with the two edge directions exchanged. With `up_to_conjugacy` the
/// image of `u` only has to be conjugate to `u'`.
pub fn related(a: &HandCovering, b: &HandCovering, up_to_conjugacy: bool) -> bool {
    if a.group != b.group {
        // Z/4 and V4 are not isomorphic: V4 has no element of order 4.
        return false;
    }
    let h = a.group;
    let maps_onto = |f: &[usize; ORDER], s: &[usize], t: &[usize]| {
        let mut img: Vec<usize> = s.iter().map(|&x| f[x]).collect();
        img.sort_unstable();
        img == t
    };
    let u_ok = |f: &[usize; ORDER]| {
        if up_to_conjugacy {
            (0..ORDER).any(|c| h.mul(h.mul(c, f[a.u]), h.inv(c)) == b.u)
        } else {
            f[a.u] == b.u
        }
    };
    h.automorphisms().iter().any(|f| {
        let direct = maps_onto(f, &a.g1, &b.g1)
            && maps_onto(f, &a.g2, &b.g2)
            && a.g1.iter().all(|&x| f[a.phi(x)] == b.phi(f[x]));
        let flipped = maps_onto(f, &a.g1, &b.g2)
            && maps_onto(f, &a.g2, &b.g1)
            && a.g1.iter().all(|&x| f[a.phi(x)] == b.phi_inv(f[x]));
        (direct || flipped) && u_ok(f)
    })
}

/// Class count by representative comparison.
pub fn class_count(cs: &[HandCovering], up_to_conjugacy: bool) -> usize {
    let mut reps: Vec<&HandCovering> = Vec::new();
    for c in cs {
        if !reps.iter().any(|r| related(r, c, up_to_conjugacy)) {
            reps.push(c);
        }
    }
    reps.len()
}
