use serde::Serialize;

use super::{count_overlattices, process_matrix, CountOptions};
use crate::covering::{iso_necessary, iso_sufficient, make_loop_base, LoopCovering};
use crate::error::Result;
use crate::group::check_axioms;
use crate::pc::{build_group, enumerate_matrices, order_oracle};
use crate::tree::universal_ball;
use crate::Limits;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<SelftestCheck>,
}

const SMALL: [(u32, usize); 5] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)];

fn check(name: &'static str, run: impl FnOnce() -> Result<Option<String>>) -> SelftestCheck {
    match run() {
        Ok(None) => SelftestCheck {
            name,
            passed: true,
            detail: String::new(),
        },
        Ok(Some(failure)) => SelftestCheck {
            name,
            passed: false,
            detail: failure,
        },
        Err(e) => SelftestCheck {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn small_coverings(limits: &Limits) -> Result<Vec<LoopCovering>> {
    let mut out = Vec::new();
    for (p, k) in SMALL {
        for a in enumerate_matrices(p, k)? {
            out.extend(process_matrix(&a, limits)?.coverings);
        }
    }
    Ok(out)
}

/// Fast versions of the invariant suites on small parameters.
pub fn selftest() -> SelftestReport {
    let limits = Limits::default();
    let checks = vec![
        check("oracle_agreement", || {
            for (p, k) in SMALL {
                for a in enumerate_matrices(p, k)? {
                    let consistent = build_group(&a, &limits)?.is_consistent();
                    let full = order_oracle(&a)? == (p as usize).pow(k as u32 + 1);
                    if consistent != full {
                        return Ok(Some(format!("disagreement at {a:?}")));
                    }
                }
            }
            Ok(None)
        }),
        check("group_axioms", || {
            for (p, k) in SMALL {
                for a in enumerate_matrices(p, k)? {
                    let g = build_group(&a, &limits)?;
                    if let Some(t) = g.table() {
                        let r = t.record();
                        if let Err(v) = check_axioms(r.order, &r.mul) {
                            return Ok(Some(format!("{a:?}: {v}")));
                        }
                        g.shift_data()?;
                    }
                }
            }
            Ok(None)
        }),
        check("faithfulness_equivalence", || {
            for (p, k) in SMALL {
                for a in enumerate_matrices(p, k)? {
                    let g = build_group(&a, &limits)?;
                    if !g.is_consistent() {
                        continue;
                    }
                    let s = g.shift_data()?;
                    let by_loop = crate::gog::is_faithful_loop(&s.table, &s.g1, &s.g2, &s.shift);
                    let gog = LoopCovering::from_group(&g, 0)?.target();
                    let general = gog.is_faithful(limits.max_order)?;
                    if by_loop.faithful != general.faithful {
                        return Ok(Some(format!("verdicts differ at {a:?}")));
                    }
                    if let Some(w) = &general.witness {
                        if !w.revalidates(&gog) {
                            return Ok(Some(format!("witness does not revalidate at {a:?}")));
                        }
                    }
                }
            }
            Ok(None)
        }),
        check("tree_regularity", || {
            for p in [2u32, 3, 5] {
                let base = make_loop_base(p)?.edge_indexed()?;
                let ball = universal_ball(&base, 0, 3, limits.max_ball_vertices)?;
                let profile = ball.degree_profile();
                if profile.len() != 1 || !profile.contains_key(&(2 * p as usize)) {
                    return Ok(Some(format!("p = {p}: profile {profile:?}")));
                }
            }
            Ok(None)
        }),
        check("sheets", || {
            for c in small_coverings(&limits)? {
                c.sheets()?;
            }
            Ok(None)
        }),
        check("predicates", || {
            let cs = small_coverings(&limits)?;
            for a in &cs {
                if iso_sufficient(a, a).is_none() {
                    return Ok(Some("sufficient predicate is not reflexive".into()));
                }
                for b in &cs {
                    let s = iso_sufficient(a, b).is_some();
                    let n = iso_necessary(a, b).is_some();
                    if s && !n {
                        return Ok(Some("sufficient witness without necessary witness".into()));
                    }
                    if s != iso_sufficient(b, a).is_some() || n != iso_necessary(b, a).is_some() {
                        return Ok(Some("predicate is not symmetric".into()));
                    }
                }
            }
            Ok(None)
        }),
        check("base_case", || {
            let r = count_overlattices(2, 1, &CountOptions::default())?;
            Ok(
                ((r.classes_necessary, r.classes_sufficient) != (1, 1)).then(|| {
                    format!(
                        "bracket [{}, {}]",
                        r.classes_necessary, r.classes_sufficient
                    )
                }),
            )
        }),
    ];
    SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        let r = super::selftest();
        assert!(r.passed, "{:#?}", r.checks);
    }
}
