//! The enumeration pipeline for overlattices of the loop lattice.
//!
//! Every consistent `G(A)` with a faithful shift loop contributes one
//! covering per admissible `u`. Coverings are then grouped into classes
//! under both isomorphism predicates, giving a bracket on the true count.

mod cache;
mod selftest;

pub use cache::{cache_path, load_cached, store_cached, CACHE_ENV};
pub use selftest::{selftest, SelftestCheck, SelftestReport};

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::covering::{iso_necessary, iso_sufficient, LoopCovering};
use crate::error::{Error, Result};
use crate::gog::is_faithful_loop;
use crate::group::ElemId;
use crate::pc::{
    build_group, enumerate_last_row_zero, enumerate_matrices, is_prime, GAGroup, MatrixA,
};
use crate::Limits;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stated in every report: the pipeline only sees vertex groups that carry
/// a commutator matrix.
pub const STRUCTURE_ASSUMPTION: &str = "every faithful loop (H, G1, G2, phi) with [H:G1] = p is \
     isomorphic to G(A) with its shift for some consistent A (structure lemma for groups \
     generated by two isomorphic index-p subgroups)";

/// An exact rational as `{num, den}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: i128,
    pub den: i128,
}

impl From<&BigRational> for RationalJson {
    fn from(r: &BigRational) -> Self {
        RationalJson {
            num: r.numer().to_i128().expect("numerator fits in i128"),
            den: r.denom().to_i128().expect("denominator fits in i128"),
        }
    }
}

impl RationalJson {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

#[derive(Clone, Debug, Default)]
pub struct CountOptions {
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
    pub limits: Limits,
}

/// A class representative. The vertex group is referenced by its matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRepresentative {
    pub matrix: MatrixA,
    pub u: ElemId,
    /// Exponents of `u` in the normal form `g_0^{i_0} ... g_k^{i_k}`.
    pub u_word: Vec<u32>,
    /// Coverings merged into this class by the sufficient predicate.
    pub members: usize,
    /// Index of the class under the necessary predicate.
    pub necessary_class: usize,
}

impl ClassRepresentative {
    pub fn covering(&self, limits: &Limits) -> Result<LoopCovering> {
        LoopCovering::from_group(&build_group(&self.matrix, limits)?, self.u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFlags {
    /// `classes_necessary >= paper_lower` (vacuous for `k < 3`).
    pub lower: bool,
    /// `classes_sufficient <= paper_upper`.
    pub upper: bool,
    /// `classes_necessary <= classes_sufficient`.
    pub bracket: bool,
    /// `covering_count >= classes_sufficient`.
    pub coverings: bool,
    /// Each filter stage shrinks its input.
    pub filtering: bool,
    pub all: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub groups_seconds: f64,
    pub classes_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub p: u32,
    pub k: usize,
    pub n: u64,
    pub matrices_total: u64,
    pub consistent_count: u64,
    pub faithful_count: u64,
    pub covering_count: u64,
    pub classes_sufficient: u64,
    pub classes_necessary: u64,
    pub paper_lower: u64,
    pub paper_upper: u64,
    pub bounds_ok: BoundFlags,
    pub class_representatives: Vec<ClassRepresentative>,
    pub assumptions: Vec<String>,
    pub tool_version: String,
    pub input_hash: String,
    pub timings: Timings,
}

impl CountReport {
    /// The report as JSON with the timing fields removed.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialise");
        v.as_object_mut().unwrap().remove("timings");
        serde_json::to_string_pretty(&v).expect("reports serialise")
    }
}

fn checked_pow(p: u32, e: usize) -> Result<u64> {
    (p as u64).checked_pow(e as u32).ok_or(Error::CapExceeded {
        what: "power",
        requested: u128::MAX,
        limit: u64::MAX as u128,
    })
}

/// `p^{k(k-3)/2}` for `k >= 3`, else 1.
pub fn paper_lower(p: u32, k: usize) -> Result<u64> {
    if k < 3 {
        Ok(1)
    } else {
        checked_pow(p, k * (k - 3) / 2)
    }
}

/// `p^{(k^2+k+2)/2}`.
pub fn paper_upper(p: u32, k: usize) -> Result<u64> {
    checked_pow(p, (k * k + k + 2) / 2)
}

/// Digest identifying a count request.
pub fn input_hash(p: u32, k: usize, limits: &Limits) -> String {
    let key = format!(
        "count;p={p};k={k};max_order={};max_rewrites={};version={TOOL_VERSION}",
        limits.max_order, limits.max_rewrites
    );
    Sha256::digest(key.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn validate_request(p: u32, k: usize, limits: &Limits) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let order = (p as u128).checked_pow(k as u32 + 1).unwrap_or(u128::MAX);
    if order > limits.max_order as u128 {
        return Err(Error::CapExceeded {
            what: "group order",
            requested: order,
            limit: limits.max_order as u128,
        });
    }
    Ok(())
}

/// What the pipeline learned about one matrix.
#[derive(Clone, Debug)]
pub struct MatrixOutcome {
    pub group: GAGroup,
    pub faithful: Option<bool>,
    pub coverings: Vec<LoopCovering>,
}

/// Builds `G(A)`, tests the shift loop for faithfulness and collects the
/// valid coverings. Validation failures of admissible candidates are errors.
pub fn process_matrix(a: &MatrixA, limits: &Limits) -> Result<MatrixOutcome> {
    let group = build_group(a, limits)?;
    if !group.is_consistent() {
        return Ok(MatrixOutcome {
            group,
            faithful: None,
            coverings: Vec::new(),
        });
    }
    let shift = group.shift_data()?;
    let faithful = is_faithful_loop(&shift.table, &shift.g1, &shift.g2, &shift.shift).faithful;
    let mut coverings = Vec::new();
    if faithful {
        let t = &shift.table;
        let p = a.p() as usize;
        for u in 0..t.order() {
            if t.element_order(u) != p || shift.g1.contains(u) || shift.g2.contains(u) {
                continue;
            }
            let c = LoopCovering::from_group(&group, u)?;
            let violations = c.validate();
            if !violations.is_empty() {
                return Err(Error::Internal(format!(
                    "admissible covering (A = {:?}, u = {u}) failed validation: {}",
                    a.entries(),
                    violations
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join("; ")
                )));
            }
            c.sheets()?;
            coverings.push(c);
        }
    }
    Ok(MatrixOutcome {
        group,
        faithful: Some(faithful),
        coverings,
    })
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Class index of every covering under `related`, numbered by first
/// occurrence. Each covering is compared only against the representatives
/// of its invariant bucket.
pub fn classify(
    coverings: &[LoopCovering],
    related: impl Fn(&LoopCovering, &LoopCovering) -> bool + Sync,
) -> Vec<usize> {
    let mut buckets: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for (i, c) in coverings.iter().enumerate() {
        buckets.entry(c.invariant()).or_default().push(i);
    }
    let buckets: Vec<Vec<usize>> = buckets.into_values().collect();
    // Within a bucket, the representative each member joins.
    let joined: Vec<Vec<(usize, usize)>> = buckets
        .par_iter()
        .map(|members| {
            let mut reps: Vec<usize> = Vec::new();
            members
                .iter()
                .map(|&i| {
                    let rep = reps
                        .iter()
                        .copied()
                        .find(|&r| related(&coverings[r], &coverings[i]))
                        .unwrap_or_else(|| {
                            reps.push(i);
                            i
                        });
                    (i, rep)
                })
                .collect()
        })
        .collect();
    let mut rep_of = vec![0; coverings.len()];
    for (i, rep) in joined.into_iter().flatten() {
        rep_of[i] = rep;
    }
    let mut number = vec![usize::MAX; coverings.len()];
    let mut next = 0;
    (0..coverings.len())
        .map(|i| {
            let r = rep_of[i];
            if number[r] == usize::MAX {
                number[r] = next;
                next += 1;
            }
            number[r]
        })
        .collect()
}

fn class_count(classes: &[usize]) -> u64 {
    classes.iter().max().map_or(0, |&m| m as u64 + 1)
}

/// Runs the full pipeline for `n = p^k`.
pub fn count_overlattices(p: u32, k: usize, opts: &CountOptions) -> Result<CountReport> {
    validate_request(p, k, &opts.limits)?;
    let start = Instant::now();
    let matrices: Vec<MatrixA> = enumerate_matrices(p, k)?.collect();
    let limits = opts.limits;
    let outcomes: Vec<MatrixOutcome> = with_pool(opts.jobs, || {
        matrices
            .par_iter()
            .map(|a| process_matrix(a, &limits))
            .collect::<Result<Vec<_>>>()
    })??;
    let groups_seconds = start.elapsed().as_secs_f64();

    let consistent_count = outcomes.iter().filter(|o| o.group.is_consistent()).count() as u64;
    let faithful_count = outcomes.iter().filter(|o| o.faithful == Some(true)).count() as u64;
    let coverings: Vec<LoopCovering> = outcomes.into_iter().flat_map(|o| o.coverings).collect();

    let class_start = Instant::now();
    let (sufficient, necessary) = with_pool(opts.jobs, || {
        (
            classify(&coverings, |a, b| iso_sufficient(a, b).is_some()),
            classify(&coverings, |a, b| iso_necessary(a, b).is_some()),
        )
    })?;
    let classes_seconds = class_start.elapsed().as_secs_f64();

    let mut class_representatives: Vec<ClassRepresentative> = Vec::new();
    for (i, c) in coverings.iter().enumerate() {
        let class = sufficient[i];
        if class == class_representatives.len() {
            let matrix = c
                .matrix()
                .expect("pipeline coverings carry their matrix")
                .clone();
            let u_word = crate::pc::NormalWord::from_rank(c.u(), p, k).0;
            class_representatives.push(ClassRepresentative {
                matrix,
                u: c.u(),
                u_word,
                members: 0,
                necessary_class: necessary[i],
            });
        }
        class_representatives[class].members += 1;
    }

    let covering_count = coverings.len() as u64;
    let classes_sufficient = class_count(&sufficient);
    let classes_necessary = class_count(&necessary);
    let lower = paper_lower(p, k)?;
    let upper = paper_upper(p, k)?;
    let matrices_total = matrices.len() as u64;
    let order = checked_pow(p, k + 1)?;
    let mut bounds_ok = BoundFlags {
        lower: k < 3 || classes_necessary >= lower,
        upper: classes_sufficient <= upper,
        bracket: classes_necessary <= classes_sufficient,
        coverings: covering_count >= classes_sufficient,
        filtering: consistent_count <= matrices_total
            && faithful_count <= consistent_count
            && covering_count <= faithful_count * order,
        all: false,
    };
    bounds_ok.all = bounds_ok.lower
        && bounds_ok.upper
        && bounds_ok.bracket
        && bounds_ok.coverings
        && bounds_ok.filtering;

    Ok(CountReport {
        p,
        k,
        n: checked_pow(p, k)?,
        matrices_total,
        consistent_count,
        faithful_count,
        covering_count,
        classes_sufficient,
        classes_necessary,
        paper_lower: lower,
        paper_upper: upper,
        bounds_ok,
        class_representatives,
        assumptions: vec![STRUCTURE_ASSUMPTION.to_string()],
        tool_version: TOOL_VERSION.to_string(),
        input_hash: input_hash(p, k, &opts.limits),
        timings: Timings {
            groups_seconds,
            classes_seconds,
            total_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// [`count_overlattices`] through a result cache directory.
pub fn count_cached(
    p: u32,
    k: usize,
    opts: &CountOptions,
    cache_dir: Option<&std::path::Path>,
) -> Result<CountReport> {
    validate_request(p, k, &opts.limits)?;
    if let Some(dir) = cache_dir {
        if let Some(hit) = load_cached(dir, p, k, &opts.limits)? {
            return Ok(hit);
        }
    }
    let report = count_overlattices(p, k, opts)?;
    if let Some(dir) = cache_dir {
        store_cached(dir, &report)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub matrix: MatrixA,
    pub consistent: bool,
    pub u: Option<ElemId>,
    pub violations: Vec<String>,
    pub necessary_class: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub p: u32,
    pub k: usize,
    pub member_count: u64,
    pub valid_count: u64,
    pub classes_necessary: u64,
    /// `p^{(k-2)(k-1)/2} / p`.
    pub required_classes: u64,
    pub all_members_valid: bool,
    pub bound_ok: bool,
    pub members: Vec<FamilyMember>,
}

/// The explicit family: every `A` with vanishing last row, with the base
/// generator sent to `g_0 g_k`. Each member is validated and the valid ones
/// are grouped under the necessary predicate.
pub fn lower_bound_family(p: u32, k: usize, opts: &CountOptions) -> Result<FamilyReport> {
    validate_request(p, k, &opts.limits)?;
    if k < 3 {
        return Err(Error::InvalidInput("the family needs k >= 3".into()));
    }
    let matrices: Vec<MatrixA> = enumerate_last_row_zero(p, k)?.collect();
    let limits = opts.limits;
    let built: Vec<(FamilyMember, Option<LoopCovering>)> = with_pool(opts.jobs, || {
        matrices
            .par_iter()
            .map(|a| -> Result<_> {
                let g = build_group(a, &limits)?;
                if !g.is_consistent() {
                    let violations = match g.consistency() {
                        crate::pc::Consistency::Inconsistent { reason } => {
                            vec![format!("presentation is inconsistent: {reason}")]
                        }
                        crate::pc::Consistency::Consistent => unreachable!(),
                    };
                    return Ok((
                        FamilyMember {
                            matrix: a.clone(),
                            consistent: false,
                            u: None,
                            violations,
                            necessary_class: None,
                        },
                        None,
                    ));
                }
                let u = g.corner_element();
                let c = LoopCovering::from_group(&g, u)?;
                let violations: Vec<String> =
                    c.validate().iter().map(ToString::to_string).collect();
                let valid = violations.is_empty();
                Ok((
                    FamilyMember {
                        matrix: a.clone(),
                        consistent: true,
                        u: Some(u),
                        violations,
                        necessary_class: None,
                    },
                    valid.then_some(c),
                ))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let (mut members, coverings): (Vec<FamilyMember>, Vec<Option<LoopCovering>>) =
        built.into_iter().unzip();
    let valid: Vec<(usize, LoopCovering)> = coverings
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (i, c)))
        .collect();
    let valid_coverings: Vec<LoopCovering> = valid.iter().map(|(_, c)| c.clone()).collect();
    let classes = with_pool(opts.jobs, || {
        classify(&valid_coverings, |a, b| iso_necessary(a, b).is_some())
    })?;
    for ((i, _), class) in valid.iter().zip(&classes) {
        members[*i].necessary_class = Some(*class);
    }
    let classes_necessary = class_count(&classes);
    let free = (k - 2) * (k - 1) / 2;
    let required_classes = checked_pow(p, free)? / p as u64;
    let all_members_valid = valid.len() == members.len();
    Ok(FamilyReport {
        p,
        k,
        member_count: members.len() as u64,
        valid_count: valid.len() as u64,
        classes_necessary,
        required_classes,
        all_members_valid,
        bound_ok: all_members_valid && classes_necessary >= required_classes,
        members,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSummary {
    pub matrix: MatrixA,
    pub consistent: bool,
    pub faithful: Option<bool>,
    pub covering_count: usize,
}

/// One summary per matrix, in enumeration order.
pub fn summarize_matrices(p: u32, k: usize, opts: &CountOptions) -> Result<Vec<MatrixSummary>> {
    validate_request(p, k, &opts.limits)?;
    let matrices: Vec<MatrixA> = enumerate_matrices(p, k)?.collect();
    let limits = opts.limits;
    with_pool(opts.jobs, || {
        matrices
            .par_iter()
            .map(|a| {
                let o = process_matrix(a, &limits)?;
                Ok(MatrixSummary {
                    matrix: a.clone(),
                    consistent: o.group.is_consistent(),
                    faithful: o.faithful,
                    covering_count: o.coverings.len(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleCovering {
    pub u: ElemId,
    pub u_word: Vec<u32>,
    pub violations: Vec<String>,
    pub sheets: Option<u64>,
    pub sheet_formulas: Vec<RationalJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleReport {
    pub matrix: MatrixA,
    pub consistent: bool,
    pub order: Option<usize>,
    pub faithful: Option<bool>,
    pub base_covolume: RationalJson,
    pub target_covolume: Option<RationalJson>,
    pub coverings: Vec<ExampleCovering>,
}

/// Everything the pipeline computes for one matrix; with `u` given, only
/// that covering is reported (valid or not), otherwise every valid one.
pub fn describe_example(a: &MatrixA, u: Option<ElemId>, limits: &Limits) -> Result<ExampleReport> {
    let outcome = process_matrix(a, limits)?;
    let base = crate::covering::make_loop_base(a.p())?;
    let mut report = ExampleReport {
        matrix: a.clone(),
        consistent: outcome.group.is_consistent(),
        order: outcome.group.table().map(|t| t.order()),
        faithful: outcome.faithful,
        base_covolume: (&base.covolume()).into(),
        target_covolume: None,
        coverings: Vec::new(),
    };
    if !report.consistent {
        return Ok(report);
    }
    let describe = |c: &LoopCovering| ExampleCovering {
        u: c.u(),
        u_word: outcome.group.word_of(c.u()).0,
        violations: c.validate().iter().map(ToString::to_string).collect(),
        sheets: c.sheets().ok(),
        sheet_formulas: c.sheet_formulas().iter().map(RationalJson::from).collect(),
    };
    let reference = LoopCovering::from_group(&outcome.group, 0)?;
    report.target_covolume = Some((&reference.target().covolume()).into());
    match u {
        Some(u) => {
            let order = outcome.group.table().unwrap().order();
            if u >= order {
                return Err(Error::InvalidInput(format!(
                    "u = {u} is not below |H| = {order}"
                )));
            }
            report.coverings.push(describe(&reference.with_u(u)));
        }
        None => report.coverings = outcome.coverings.iter().map(describe).collect(),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_formulas() {
        assert_eq!(paper_upper(2, 2).unwrap(), 16);
        assert_eq!(paper_upper(2, 3).unwrap(), 128);
        assert_eq!(paper_upper(2, 4).unwrap(), 2048);
        assert_eq!(paper_lower(2, 2).unwrap(), 1);
        assert_eq!(paper_lower(2, 3).unwrap(), 1);
        assert_eq!(paper_lower(2, 4).unwrap(), 4);
        assert_eq!(paper_lower(3, 4).unwrap(), 9);
    }

    #[test]
    fn base_case() {
        let r = count_overlattices(2, 1, &CountOptions::default()).unwrap();
        assert_eq!((r.classes_necessary, r.classes_sufficient), (1, 1));
        assert_eq!(r.covering_count, 1);
        assert!(r.bounds_ok.all);
        assert_eq!(r.class_representatives[0].u_word, vec![1, 1]);
    }

    #[test]
    fn request_validation() {
        assert!(matches!(
            count_overlattices(4, 2, &CountOptions::default()),
            Err(Error::NotPrime(4))
        ));
        assert!(matches!(
            count_overlattices(2, 9, &CountOptions::default()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn hash_depends_on_input() {
        let l = Limits::default();
        assert_eq!(input_hash(2, 3, &l).len(), 64);
        assert_ne!(input_hash(2, 3, &l), input_hash(2, 4, &l));
        assert_eq!(input_hash(3, 2, &l), input_hash(3, 2, &l));
    }

    #[test]
    fn classify_numbers_by_first_occurrence() {
        let g = build_group(&MatrixA::zero(3, 2).unwrap(), &Limits::default()).unwrap();
        let cs = process_matrix(g.matrix(), &Limits::default())
            .unwrap()
            .coverings;
        let classes = classify(&cs, |a, b| iso_sufficient(a, b).is_some());
        assert_eq!(classes[0], 0);
        let mut seen = 0;
        for &c in &classes {
            assert!(c <= seen);
            if c == seen {
                seen += 1;
            }
        }
    }

    #[test]
    fn family_k3() {
        let r = lower_bound_family(2, 3, &CountOptions::default()).unwrap();
        assert_eq!(r.member_count, 2);
        assert_eq!(r.required_classes, 1);
        assert!(r.classes_necessary >= 1);
    }

    #[test]
    fn example_report() {
        let a = MatrixA::new(2, 2, vec![vec![1]]).unwrap();
        let r = describe_example(&a, Some(5), &Limits::default()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.coverings[0].violations, vec!["order(u) ≠ p (order 4)"]);
        assert_eq!(r.target_covolume, Some(RationalJson { num: 1, den: 8 }));
    }
}
