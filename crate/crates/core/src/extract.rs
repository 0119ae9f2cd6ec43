//! Recovery of a rank-1 optimal solution `X̃ = xxᵀ/τ` from an optimal SDP
//! solution.
//!
//! With an active constraint the factors of `X̄` are rotated pairwise until
//! each one annihilates that constraint; any factor then gives a feasible
//! rank-1 optimum. Without an active constraint the eigen-factors of `X̄` are
//! already optimal for the relaxation with only `H•X = 1`; if the best one
//! violates a constraint, moving from `X̄` towards it until a constraint
//! becomes active reduces to the first case.

use serde::{Deserialize, Serialize};

pub use crate::symmat::Rank1Decomposition;

use crate::error::{Error, Result};
use crate::instances::QcqpInstance;
use crate::linalg::{dot, norm2};
use crate::sdp::{active_set_of, SdpSolution, Status};
use crate::symmat::{SymMatrix, DEFAULT_PSD_TOL, DEFAULT_RANK_TOL};

/// Relative tolerance deciding which constraints count as active.
pub const DEFAULT_ACT_TOL: f64 = 1e-6;
/// Values below this fraction of `‖B‖·tr X` are treated as zero when pairing.
const SPLIT_ZERO: f64 = 1e-14;
/// Post-condition tolerance on `B•xᵢxᵢᵀ`, relative to `‖B‖·tr X`.
const SPLIT_TOL: f64 = 1e-8;
/// Feasibility slack accepted for the rank-1 candidate, relative to
/// `1 + ‖Bₖ‖·‖X̃‖`.
const FEAS_TOL: f64 = 1e-8;
/// Violations below this size, relative to `1 + ‖B‖·‖x‖²`, are treated as
/// solver noise and polished away.
const POLISH_TOL: f64 = 1e-6;
const POLISH_ROUNDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CasePath {
    /// A constraint was active; factors were split against it.
    I,
    /// No constraint was active; an eigen-factor was feasible.
    Ii,
    /// No constraint was active and the best eigen-factor was infeasible; a
    /// convex step made a constraint active and the first case finished.
    IiThenI,
}

impl CasePath {
    pub fn as_str(self) -> &'static str {
        match self {
            CasePath::I => "i",
            CasePath::Ii => "ii",
            CasePath::IiThenI => "ii_then_i",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub x_tilde: SymMatrix,
    /// Factor with `X̃ = xxᵀ` and `H•xxᵀ = 1`, last coordinate nonnegative.
    pub x: Vec<f64>,
    /// `x[..n−1]/x[n−1]` when `H = diag(0,…,0,1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    pub tau: f64,
    pub case_path: CasePath,
    /// `Q•X̃`
    pub objective: f64,
    pub split_count: usize,
    /// Number of factors of the matrix the factor was taken from.
    pub rank: usize,
}

/// Result of the eigen-factor step when no constraint is active.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseIiOutcome {
    Done(ExtractionResult),
    /// The convex combination of `X̄` and the infeasible candidate at which
    /// the first constraint becomes active.
    FallbackNeeded(SymMatrix),
}

/// Rotates factor pairs until `B•xᵢxᵢᵀ = 0` for every factor. Returns the new
/// decomposition and the number of rotations performed.
pub fn sturm_split(decomp: &Rank1Decomposition, b: &SymMatrix) -> Result<(Rank1Decomposition, usize)> {
    if decomp.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            found: decomp.n(),
        });
    }
    let mut xs = decomp.factors.clone();
    let r = xs.len();
    let trace: f64 = xs.iter().map(|x| dot(x, x)).sum();
    let scale = b.frobenius_norm() * trace;
    let zero = SPLIT_ZERO * scale;
    let mut vals: Vec<f64> = xs.iter().map(|x| b.quad_form(x)).collect();
    let cap = r * r;
    let mut splits = 0;
    loop {
        let (i, &vi) = match vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) {
            Some(p) => p,
            None => break,
        };
        let (j, &vj) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        if !(vi < -zero && vj > zero) {
            break;
        }
        if splits >= cap {
            return Err(Error::SplitFailed(format!("no convergence after {cap} rotations")));
        }
        let bij = b.bilinear(&xs[i], &xs[j]);
        let s = small_root(vi, bij, vj);
        let c = 1.0 / (s * s + 1.0).sqrt();
        let xi: Vec<f64> = xs[i].iter().zip(&xs[j]).map(|(a, b)| c * (s * a + b)).collect();
        let xj: Vec<f64> = xs[i].iter().zip(&xs[j]).map(|(a, b)| c * (-a + s * b)).collect();
        vals[i] = b.quad_form(&xi);
        vals[j] = b.quad_form(&xj);
        xs[i] = xi;
        xs[j] = xj;
        splits += 1;
    }
    let worst = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > SPLIT_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SplitFailed(format!(
            "B•X is not zero: residual factor value {worst:e} has no opposite-sign partner"
        )));
    }
    Ok((Rank1Decomposition::new(decomp.n(), xs), splits))
}

/// Root of `a·s² + 2b·s + c = 0` (with `a·c < 0`) of smaller magnitude,
/// computed without cancellation.
fn small_root(a: f64, b: f64, c: f64) -> f64 {
    let disc = (b * b - a * c).sqrt();
    let q = -(b + b.signum() * disc);
    let r1 = q / a;
    let r2 = c / q;
    if r1.abs() <= r2.abs() {
        r1
    } else {
        r2
    }
}

fn finish(inst: &QcqpInstance, x: &[f64], tau: f64, path: CasePath, splits: usize, rank: usize) -> ExtractionResult {
    let mut v: Vec<f64> = x.iter().map(|a| a / tau.sqrt()).collect();
    if v.last().copied().unwrap_or(0.0) < 0.0 {
        v.iter_mut().for_each(|a| *a = -*a);
    }
    polish(inst, &mut v);
    let x_tilde = SymMatrix::outer(&v);
    let u = if inst.has_homogeneous_h() {
        let last = *v.last().unwrap();
        Some(v[..v.len() - 1].iter().map(|a| a / last).collect())
    } else {
        None
    };
    ExtractionResult {
        objective: inst.q.inner_unchecked(&x_tilde),
        x_tilde,
        x: v,
        u,
        tau,
        case_path: path,
        split_count: splits,
        rank,
    }
}

/// Removes violations of solver-noise size: each slightly negative
/// `B•xxᵀ` is pushed to zero by Newton steps along `Bx`, then `H•xxᵀ = 1` is
/// restored by scaling, which keeps every sign.
fn polish(inst: &QcqpInstance, x: &mut [f64]) {
    for _ in 0..POLISH_ROUNDS {
        let mut changed = false;
        for b in inst.set.matrices() {
            let val = b.quad_form(x);
            let noise = POLISH_TOL * (1.0 + b.frobenius_norm() * dot(x, x));
            if val >= 0.0 || val < -noise {
                continue;
            }
            let bx = b.mul_vec(x);
            let g = 2.0 * dot(&bx, &bx);
            if g == 0.0 {
                continue;
            }
            let step = -val / g * (1.0 + 1e-6);
            x.iter_mut().zip(&bx).for_each(|(a, d)| *a += step * d);
            changed = true;
        }
        let hx = inst.h.quad_form(x);
        if hx > 0.0 {
            let c = hx.sqrt().recip();
            x.iter_mut().for_each(|a| *a *= c);
        }
        if !changed {
            break;
        }
    }
}

fn violations(inst: &QcqpInstance, x_tilde: &SymMatrix) -> Vec<usize> {
    let xn = x_tilde.frobenius_norm();
    inst.set
        .matrices()
        .enumerate()
        .filter(|(_, b)| b.inner_unchecked(x_tilde) < -FEAS_TOL * (1.0 + b.frobenius_norm() * xn))
        .map(|(k, _)| k)
        .collect()
}

/// Eigen-factors of `X̄` with the negligible ones dropped, rescaled so the
/// weights `H•xᵢxᵢᵀ` sum to one.
fn factors_of(inst: &QcqpInstance, x_bar: &SymMatrix) -> Result<Rank1Decomposition> {
    let mut d = x_bar.rank1_factors(DEFAULT_RANK_TOL)?;
    let total: f64 = d.factors.iter().map(|x| inst.h.quad_form(x)).sum();
    if !(total > 0.0) {
        return Err(Error::ExtractionFailed(format!("H•X is {total:e}, not positive")));
    }
    let c = total.sqrt().recip();
    d.factors.iter_mut().flatten().for_each(|v| *v *= c);
    Ok(d)
}

fn best_tau(inst: &QcqpInstance, d: &Rank1Decomposition) -> (usize, f64) {
    d.factors
        .iter()
        .map(|x| inst.h.quad_form(x))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, t)| if t > best.1 { (j, t) } else { best })
}

/// First case: split `X̄` against active constraint `k` and keep the factor
/// with the largest `H`-weight.
pub fn extract_case_i(inst: &QcqpInstance, x_bar: &SymMatrix, k: usize) -> Result<ExtractionResult> {
    case_i(inst, x_bar, k, CasePath::I)
}

fn case_i(inst: &QcqpInstance, x_bar: &SymMatrix, k: usize, path: CasePath) -> Result<ExtractionResult> {
    let b = inst
        .set
        .constraints()
        .get(k)
        .ok_or_else(|| Error::InvalidParameter(format!("constraint index {k} out of range")))?;
    let d = factors_of(inst, x_bar)?;
    let r = d.r();
    let (split, count) = sturm_split(&d, &b.matrix)?;
    let (j, tau) = best_tau(inst, &split);
    if tau < 1.0 / r as f64 - 1e-9 {
        return Err(Error::ExtractionFailed(format!(
            "largest H-weight {tau:e} is below 1/{r}; H•X is not 1"
        )));
    }
    let res = finish(inst, &split.factors[j], tau, path, count, r);
    let bad = violations(inst, &res.x_tilde);
    if !bad.is_empty() {
        return Err(Error::ExtractionFailed(format!(
            "rank-1 factor violates constraints {bad:?}; the pairwise condition does not hold for this set"
        )));
    }
    Ok(res)
}

/// Second case: take the first feasible eigen-factor with `H`-weight at least
/// `1/r`, heaviest first. If none is feasible, return the convex combination of `X̄` and
/// the heaviest factor at which a constraint becomes active.
pub fn extract_case_ii(inst: &QcqpInstance, sol: &SdpSolution) -> Result<CaseIiOutcome> {
    let x_bar = &sol.x;
    let d = factors_of(inst, x_bar)?;
    let r = d.r();
    let eta = sol.objective;
    let comp = sol.big_y.inner_unchecked(x_bar).abs();
    let trusted = comp <= 1e-6 * (1.0 + eta.abs());
    let mut order: Vec<(usize, f64)> = d.factors.iter().map(|x| inst.h.quad_form(x)).enumerate().collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let (j0, tau0) = order[0];
    if tau0 < 1.0 / r as f64 - 1e-9 {
        return Err(Error::ExtractionFailed(format!(
            "largest H-weight {tau0:e} is below 1/{r}; H•X is not 1"
        )));
    }
    for &(j, tau) in &order {
        if tau < 1.0 / r as f64 - 1e-9 {
            break;
        }
        let res = finish(inst, &d.factors[j], tau, CasePath::Ii, 0, r);
        // Without a trusted dual slack the objective must be checked directly.
        let optimal = trusted || (res.objective - eta).abs() <= 1e-6 * (1.0 + eta.abs());
        if optimal && violations(inst, &res.x_tilde).is_empty() {
            return Ok(CaseIiOutcome::Done(res));
        }
    }
    let res = finish(inst, &d.factors[j0], tau0, CasePath::Ii, 0, r);
    let bad = violations(inst, &res.x_tilde);
    let mut theta = 1.0f64;
    for k in bad {
        let b = &inst.set.constraints()[k].matrix;
        let vb = b.inner_unchecked(x_bar);
        let vt = b.inner_unchecked(&res.x_tilde);
        theta = theta.min(vb / (vb - vt));
    }
    let x_hat = x_bar.scale(1.0 - theta).axpy(theta, &res.x_tilde);
    Ok(CaseIiOutcome::FallbackNeeded(x_hat))
}

/// Dispatches on the active set of an optimal SDP solution.
pub fn extract(inst: &QcqpInstance, sol: &SdpSolution) -> Result<ExtractionResult> {
    extract_with_tol(inst, sol, DEFAULT_ACT_TOL)
}

pub fn extract_with_tol(inst: &QcqpInstance, sol: &SdpSolution, act_tol: f64) -> Result<ExtractionResult> {
    if sol.status != Status::Optimal {
        return Err(Error::ExtractionFailed(format!(
            "SDP status is {}, not optimal",
            sol.status.as_str()
        )));
    }
    if !inst.h.is_psd(DEFAULT_PSD_TOL) {
        let r = crate::sdp::kkt_residuals(inst, sol);
        if r.max() > 1e-6 * (1.0 + sol.x.frobenius_norm()) {
            return Err(Error::ExtractionFailed(
                "H is indefinite and the KKT residuals are too large to trust".into(),
            ));
        }
    }
    let active = active_set_of(inst, &sol.x, act_tol);
    if let Some(&k) = active.first() {
        return case_i(inst, &sol.x, k, CasePath::I);
    }
    match extract_case_ii(inst, sol)? {
        CaseIiOutcome::Done(r) => Ok(r),
        CaseIiOutcome::FallbackNeeded(x_hat) => {
            let active = active_set_of(inst, &x_hat, act_tol);
            let k = match active.first() {
                Some(&k) => k,
                None => nearest_to_active(inst, &x_hat),
            };
            case_i(inst, &x_hat, k, CasePath::IiThenI)
        }
    }
}

fn nearest_to_active(inst: &QcqpInstance, x: &SymMatrix) -> usize {
    let xn = x.frobenius_norm();
    inst.set
        .matrices()
        .map(|b| b.inner_unchecked(x).abs() / (1.0 + b.frobenius_norm() * xn))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0, |p| p.0)
}

/// `‖Σ xᵢxᵢᵀ − X‖_F`
pub fn reconstruction_error(d: &Rank1Decomposition, x: &SymMatrix) -> f64 {
    d.reconstruct().sub(x).map_or(f64::INFINITY, |m| m.frobenius_norm())
}

/// Largest `|B•xᵢxᵢᵀ|` over the factors.
pub fn max_factor_value(d: &Rank1Decomposition, b: &SymMatrix) -> f64 {
    d.factors.iter().fold(0.0f64, |m, x| m.max(b.quad_form(x).abs()))
}

/// `‖x‖` of the longest factor.
pub fn max_factor_norm(d: &Rank1Decomposition) -> f64 {
    d.factors.iter().fold(0.0f64, |m, x| m.max(norm2(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::is_feasible;
    use crate::instances::{example41, last_coordinate, ConstraintSet};
    use crate::sdp::{solve_relaxation, SolverOptions};
    use proptest::prelude::*;

    fn solved(k: usize) -> (QcqpInstance, SdpSolution) {
        let inst = example41::instance(k).unwrap();
        let sol = solve_relaxation(&inst, &SolverOptions::default()).unwrap();
        (inst, sol)
    }

    #[test]
    fn single_zero_factor_unchanged() {
        let d = Rank1Decomposition::new(2, vec![vec![1.0, 1.0]]);
        let b = SymMatrix::from_diag(&[1.0, -1.0]);
        let (out, n) = sturm_split(&d, &b).unwrap();
        assert_eq!(n, 0);
        assert_eq!(out, d);
    }

    #[test]
    fn identity_splits_onto_diagonals() {
        let d = Rank1Decomposition::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let b = SymMatrix::from_diag(&[1.0, -1.0]);
        let (out, n) = sturm_split(&d, &b).unwrap();
        assert_eq!(n, 1);
        for x in &out.factors {
            assert!(b.quad_form(x).abs() < 1e-15);
            assert!((x[0].abs() - x[1].abs()).abs() < 1e-15);
        }
        assert!(reconstruction_error(&out, &SymMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn small_root_is_a_root() {
        for (a, b, c) in [(-1.0, 0.3, 2.0), (3.0, -5.0, -1e-6), (-1e-9, 1.0, 1.0)] {
            let s = small_root(a, b, c);
            assert!((a * s * s + 2.0 * b * s + c).abs() < 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn split_rejects_nonzero_inner_product() {
        let d = Rank1Decomposition::new(2, vec![vec![1.0, 0.0], vec![0.0, 0.5]]);
        let b = SymMatrix::from_diag(&[1.0, -1.0]);
        assert!(matches!(sturm_split(&d, &b), Err(Error::SplitFailed(_))));
    }

    #[test]
    fn table_case_paths_and_values() {
        let expect = [CasePath::Ii, CasePath::I, CasePath::I, CasePath::Ii, CasePath::IiThenI, CasePath::IiThenI];
        for k in 1..=6 {
            let (inst, sol) = solved(k);
            let r = extract(&inst, &sol).unwrap();
            assert_eq!(r.case_path, expect[k - 1], "row {k}");
            let u = r.u.clone().unwrap();
            assert!(is_feasible(&inst.set, &u).unwrap(), "row {k}: {u:?}");
            assert!((r.objective - example41::OPTIMAL_VALUES[k - 1]).abs() < 1e-5, "row {k}: {}", r.objective);
            assert!(example41::optimal_set_residual(k, [u[0], u[1]]) < 1e-4, "row {k}: {u:?}");
            assert!(r.split_count <= r.rank * r.rank);
            assert!((inst.h.inner(&r.x_tilde).unwrap() - 1.0).abs() < 1e-12);
            assert!(r.tau >= 1.0 / r.rank as f64 - 1e-9);
        }
    }

    #[test]
    fn rank_one_solution_returned_unchanged() {
        let (inst, sol) = solved(2);
        let r = extract(&inst, &sol).unwrap();
        assert!((r.tau - 1.0).abs() < 1e-6);
        assert!(r.x_tilde.sub(&sol.x).unwrap().frobenius_norm() < 1e-5);
    }

    #[test]
    fn row_six_falls_back() {
        let (inst, sol) = solved(6);
        match extract_case_ii(&inst, &sol).unwrap() {
            CaseIiOutcome::FallbackNeeded(x_hat) => {
                assert!((inst.h.inner(&x_hat).unwrap() - 1.0).abs() < 1e-9);
                assert!(!active_set_of(&inst, &x_hat, DEFAULT_ACT_TOL).is_empty());
                assert!((inst.q.inner(&x_hat).unwrap() - sol.objective).abs() < 1e-6);
            }
            CaseIiOutcome::Done(r) => panic!("expected fallback, got {:?}", r.u),
        }
    }

    #[test]
    fn non_optimal_solution_refused() {
        let (inst, mut sol) = solved(1);
        sol.status = Status::MaxIter;
        assert!(extract(&inst, &sol).is_err());
    }

    #[test]
    fn general_normalizer_has_no_point() {
        let set = ConstraintSet::new(example41::constraints().constraints().to_vec()).unwrap();
        let q = example41::objectives()[0].clone();
        let inst = QcqpInstance::new(q, SymMatrix::from_diag(&[1.0, 1.0, 1.0]), set).unwrap();
        let sol = solve_relaxation(&inst, &SolverOptions::default()).unwrap();
        let r = extract(&inst, &sol).unwrap();
        assert!(r.u.is_none());
        assert!((r.objective - sol.objective).abs() < 1e-6 * (1.0 + sol.objective.abs()));
        assert!(inst.h != last_coordinate(3));
    }

    fn arb_split_case() -> impl Strategy<Value = (Rank1Decomposition, SymMatrix)> {
        (2usize..6).prop_flat_map(|n| {
            (1..=n).prop_flat_map(move |r| {
                (
                    proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, n), r),
                    proptest::collection::vec(-3.0f64..3.0, n * (n + 1) / 2),
                )
                    .prop_map(move |(xs, lower)| {
                        let d = Rank1Decomposition::new(n, xs);
                        let mut b = SymMatrix::from_lower(n, lower).unwrap();
                        let x = d.reconstruct();
                        let xx = x.inner(&x).unwrap();
                        if xx > 0.0 {
                            b = b.axpy(-b.inner(&x).unwrap() / xx, &x);
                        }
                        (d, b)
                    })
            })
        })
    }

    proptest! {
        #[test]
        fn split_conserves_matrix((d, b) in arb_split_case()) {
            let x = d.reconstruct();
            let (out, count) = sturm_split(&d, &b).unwrap();
            let scale = 1.0 + b.frobenius_norm() * x.trace();
            prop_assert!(reconstruction_error(&out, &x) <= 1e-10 * (1.0 + x.frobenius_norm()));
            prop_assert!(max_factor_value(&out, &b) <= 1e-8 * scale);
            prop_assert!(count <= d.r() * d.r());
        }
    }
}
