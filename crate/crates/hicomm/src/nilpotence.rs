//! Lower central series, nilpotence and supernilpotence classification, and
//! the bound/equality/semidistributivity check reports built on top of the
//! commutator fixpoints.

use crate::algebra::{con, is_congruence, FiniteAlgebra};
use crate::commutator::{build_delta, build_rect, hyper_commutator, tc_commutator};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partition::Partition;
use crate::taylor::VerifiedTaylor;

/// The descending chain theta = terms[0] ≥ terms[1] ≥ …, where each next
/// term is the binary term-condition commutator of theta with the previous
/// term. The chain stops at the first repeat or at the diagonal.
#[derive(Debug, Clone)]
pub struct CentralSeries {
    pub theta: Partition,
    pub terms: Vec<Partition>,
}

impl CentralSeries {
    /// Least n with terms[n] = diagonal, if the series reaches it.
    pub fn nilpotence_class(&self) -> Option<usize> {
        self.terms.iter().position(|t| t.is_diag())
    }
}

fn validate_theta(alg: &FiniteAlgebra, theta: &Partition) -> Result<()> {
    if theta.size() != alg.size {
        return Err(Error::Invalid(format!(
            "partition of {} elements against an algebra of {}",
            theta.size(),
            alg.size
        )));
    }
    if !is_congruence(alg, theta) {
        return Err(Error::Invalid(format!("{} is not a congruence of {}", theta, alg.name)));
    }
    Ok(())
}

/// Iterate terms[k+1] = [theta, terms[k]] until the chain stabilizes or hits
/// the diagonal. Termination is guaranteed: the terms weakly decrease in the
/// finite congruence lattice.
pub fn lower_central_series(
    alg: &FiniteAlgebra,
    theta: &Partition,
    limits: &Limits,
) -> Result<CentralSeries> {
    validate_theta(alg, theta)?;
    let mut terms = vec![theta.clone()];
    loop {
        let last = terms.last().unwrap();
        if last.is_diag() {
            break;
        }
        let next = tc_commutator(alg, &[theta.clone(), last.clone()], 1, limits)?;
        if &next == last {
            break;
        }
        terms.push(next);
    }
    Ok(CentralSeries { theta: theta.clone(), terms })
}

/// Least n with the n-th series term equal to the diagonal, or None when
/// the series stabilizes above it.
pub fn nilpotence_class(
    alg: &FiniteAlgebra,
    theta: &Partition,
    limits: &Limits,
) -> Result<Option<usize>> {
    Ok(lower_central_series(alg, theta, limits)?.nilpotence_class())
}

/// The term-condition commutator of `arity` copies of theta; arity 1 is
/// theta itself (the one-argument base of the nested-bound induction).
pub fn diagonal_tc_commutator(
    alg: &FiniteAlgebra,
    theta: &Partition,
    arity: usize,
    limits: &Limits,
) -> Result<Partition> {
    if arity == 0 {
        return Err(Error::Invalid("arity must be at least 1".into()));
    }
    if arity == 1 {
        validate_theta(alg, theta)?;
        return Ok(theta.clone());
    }
    let thetas = vec![theta.clone(); arity];
    tc_commutator(alg, &thetas, arity - 1, limits)
}

/// The relational commutator of `arity` copies of theta; arity 1 is theta.
pub fn diagonal_hyper_commutator(
    alg: &FiniteAlgebra,
    theta: &Partition,
    arity: usize,
    limits: &Limits,
) -> Result<Partition> {
    if arity == 0 {
        return Err(Error::Invalid("arity must be at least 1".into()));
    }
    if arity == 1 {
        validate_theta(alg, theta)?;
        return Ok(theta.clone());
    }
    let thetas = vec![theta.clone(); arity];
    hyper_commutator(alg, &thetas, arity - 1, limits)
}

/// Least arity k (2 ≤ k ≤ max_arity) at which the k-fold diagonal
/// term-condition commutator of theta vanishes, or None if no arity up to
/// the bound vanishes. Dropping an argument only enlarges the commutator,
/// so vanishing persists above the least arity and the first hit is the
/// class.
///
/// Naming conventions differ: under the step-count convention that calls a
/// congruence "n-step supernilpotent" when its (n−1)-fold diagonal
/// commutator vanishes, this k corresponds to step count k+1; under the
/// more common convention ("n-supernilpotent" = vanishing (n+1)-fold
/// commutator) it corresponds to n = k−1. The returned value is the arity
/// itself, which is unambiguous.
pub fn supernilpotence_class(
    alg: &FiniteAlgebra,
    theta: &Partition,
    max_arity: usize,
    limits: &Limits,
) -> Result<Option<usize>> {
    validate_theta(alg, theta)?;
    if max_arity < 2 {
        return Err(Error::Invalid("max arity must be at least 2".into()));
    }
    for k in 2..=max_arity {
        if diagonal_tc_commutator(alg, theta, k, limits)?.is_diag() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// One verified inequality line: the two sides and whether lhs ≤ rhs held.
#[derive(Debug, Clone)]
pub struct BoundLine {
    pub index: usize,
    pub lhs: Partition,
    pub rhs: Partition,
    pub holds: bool,
}

/// Result of the series-versus-diagonal-commutator bound check.
#[derive(Debug, Clone)]
pub struct NilBoundReport {
    /// series_bound[n]: (theta]_n ≤ (n+1)-fold diagonal commutator
    pub series_bound: Vec<BoundLine>,
    /// nesting_bound[k−2]: [theta, k-fold]_TC ≤ (k+1)-fold, for k ≥ 2
    pub nesting_bound: Vec<BoundLine>,
    pub all_hold: bool,
}

/// Verify, for each n ≤ n_max, that the n-th lower-central-series term is
/// below the (n+1)-fold diagonal term-condition commutator, and that
/// re-nesting one theta over a k-fold diagonal commutator stays below the
/// (k+1)-fold one. Both bounds are what makes supernilpotence imply
/// nilpotence, and both require the identity-package witness, so a verified
/// package is a parameter: the check refuses to run without one.
pub fn check_supernil_implies_nil_bound(
    witness: &VerifiedTaylor<'_>,
    theta: &Partition,
    n_max: usize,
    limits: &Limits,
) -> Result<NilBoundReport> {
    let alg = witness.algebra();
    validate_theta(alg, theta)?;
    let series = lower_central_series(alg, theta, limits)?;
    let term = |n: usize| -> &Partition {
        // a stabilized or bottomed-out series continues with its last term
        series.terms.get(n).unwrap_or_else(|| series.terms.last().unwrap())
    };
    let mut series_bound = Vec::new();
    let mut all_hold = true;
    for n in 0..=n_max {
        let lhs = term(n).clone();
        let rhs = diagonal_tc_commutator(alg, theta, n + 1, limits)?;
        let holds = lhs.leq(&rhs);
        all_hold &= holds;
        series_bound.push(BoundLine { index: n, lhs, rhs, holds });
    }
    let mut nesting_bound = Vec::new();
    for k in 2..=n_max.max(2) {
        let inner = diagonal_tc_commutator(alg, theta, k, limits)?;
        let lhs = tc_commutator(alg, &[theta.clone(), inner], 1, limits)?;
        let rhs = diagonal_tc_commutator(alg, theta, k + 1, limits)?;
        let holds = lhs.leq(&rhs);
        all_hold &= holds;
        nesting_bound.push(BoundLine { index: k, lhs, rhs, holds });
    }
    Ok(NilBoundReport { series_bound, nesting_bound, all_hold })
}

/// Result of comparing the two diagonal commutators at one arity.
#[derive(Debug, Clone)]
pub struct EqualityReport {
    pub arity: usize,
    pub tc: Partition,
    pub hyper: Partition,
    pub equal: bool,
    /// a pair related by exactly one of the two, when unequal
    pub counterexample: Option<(usize, usize)>,
}

/// Compute both diagonal commutators of theta at the given arity and report
/// whether they coincide. The coincidence is a theorem for algebras with an
/// identity-package witness, so the check takes the verified package and
/// refuses to run without one.
pub fn check_h_eq_tc(
    witness: &VerifiedTaylor<'_>,
    theta: &Partition,
    arity: usize,
    limits: &Limits,
) -> Result<EqualityReport> {
    let alg = witness.algebra();
    if arity < 2 {
        return Err(Error::Invalid("equality check needs arity at least 2".into()));
    }
    let tc = diagonal_tc_commutator(alg, theta, arity, limits)?;
    let hyper = diagonal_hyper_commutator(alg, theta, arity, limits)?;
    let equal = tc == hyper;
    let mut counterexample = None;
    if !equal {
        'search: for x in 0..alg.size {
            for y in 0..alg.size {
                if tc.same(x, y) != hyper.same(x, y) {
                    counterexample = Some((x, y));
                    break 'search;
                }
            }
        }
    }
    Ok(EqualityReport { arity, tc, hyper, equal, counterexample })
}

/// One saturation line of the meet-semidistributivity report.
#[derive(Debug, Clone)]
pub struct SaturationLine {
    pub alpha: Partition,
    pub arity: usize,
    pub saturated: bool,
}

/// Which of the testable meet-semidistributivity conditions hold: closure
/// saturation Δ(α,…,α) = rect(α,…,α) for every congruence α at arities 2
/// and 3, and neutrality ([α,β] = α ∧ β for both commutators) over all
/// binary congruence tuples.
#[derive(Debug, Clone)]
pub struct SdMeetReport {
    pub saturation: Vec<SaturationLine>,
    pub tc_neutral: bool,
    pub hyper_neutral: bool,
    pub neutrality_counterexample: Option<(Partition, Partition)>,
    pub all_pass: bool,
}

pub fn check_sdmeet(alg: &FiniteAlgebra, limits: &Limits) -> Result<SdMeetReport> {
    let congruences = con(alg)?;
    let mut saturation = Vec::new();
    let mut all_pass = true;
    for alpha in &congruences {
        for arity in [2usize, 3] {
            let thetas = vec![alpha.clone(); arity];
            let delta = build_delta(alg, &thetas, limits)?;
            let rect = build_rect(alg, &thetas, limits)?;
            let saturated = delta == rect;
            all_pass &= saturated;
            saturation.push(SaturationLine { alpha: alpha.clone(), arity, saturated });
        }
    }
    let mut tc_neutral = true;
    let mut hyper_neutral = true;
    let mut neutrality_counterexample = None;
    for alpha in &congruences {
        for beta in &congruences {
            let pair = [alpha.clone(), beta.clone()];
            let meet = alpha.meet(beta);
            let tc = tc_commutator(alg, &pair, 1, limits)?;
            let hyper = hyper_commutator(alg, &pair, 1, limits)?;
            if tc != meet {
                tc_neutral = false;
            }
            if hyper != meet {
                hyper_neutral = false;
            }
            if (tc != meet || hyper != meet) && neutrality_counterexample.is_none() {
                neutrality_counterexample = Some((alpha.clone(), beta.clone()));
            }
        }
    }
    all_pass &= tc_neutral && hyper_neutral;
    Ok(SdMeetReport { saturation, tc_neutral, hyper_neutral, neutrality_counterexample, all_pass })
}
