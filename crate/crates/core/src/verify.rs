//! Checks of the pairwise conditions on a constraint set, a sampling
//! falsifier for the region-disjointness condition, and a brute-force oracle
//! for two-variable problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{eval_homogeneous, DEFAULT_FEAS_TOL};
use crate::error::{Error, Result};
use crate::instances::{ConstraintSet, QcqpInstance};
use crate::linalg::Mat;
use crate::symmat::{SymMatrix, DEFAULT_PSD_TOL};

/// Margin below zero required for a point to count as strictly inside a
/// restricted zone.
pub const STRICT_TOL: f64 = 1e-7;
pub const DEFAULT_ANGLE_GRID: usize = 720;
pub const DEFAULT_COARSE: usize = 401;
pub const DEFAULT_REFINE_LEVELS: usize = 3;
const REFINE_KEEP: usize = 50;
const REFINE_HALF_STEPS: usize = 10;
const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Fixed positive weights make every pairwise sum PSD.
    D,
    /// Every pair has some nonzero PSD combination.
    Dprime,
    /// No constraint matrix is PSD.
    Cprime,
    /// Sampling search for a point strictly inside one restricted zone and
    /// inside another. Passing means no counterexample was found, not a proof.
    BprimeFalsifier,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::D => "D",
            Condition::Dprime => "Dprime",
            Condition::Cprime => "Cprime",
            Condition::BprimeFalsifier => "Bprime-falsifier",
        }
    }

    /// True when a pass is a proof rather than an absence of evidence.
    pub fn is_decisive(self) -> bool {
        !matches!(self, Condition::BprimeFalsifier)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    /// Smallest eigenvalue (or region margin) met during the check.
    pub min_margin: f64,
}

/// An axis-aligned box in `ℝᵈ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidParameter("bounding box must have lo < hi in every axis".into()));
        }
        Ok(Self { lo, hi })
    }

    /// `[lo, hi]²`.
    pub fn square(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; 2], vec![hi; 2])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn expanded(&self, frac: f64) -> BoundingBox {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| {
                let pad = frac * (b - a);
                (a - pad, b + pad)
            })
            .unzip();
        BoundingBox { lo, hi }
    }
}

fn pair_sum(set: &ConstraintSet, i: usize, j: usize, wi: f64, wj: f64) -> SymMatrix {
    set.constraints()[i]
        .matrix
        .scale(wi)
        .axpy(wj, &set.constraints()[j].matrix)
}

pub fn verify_condition_d(set: &ConstraintSet) -> Result<ConditionReport> {
    verify_condition_d_tol(set, DEFAULT_PSD_TOL)
}

pub fn verify_condition_d_tol(set: &ConstraintSet, psd_tol: f64) -> Result<ConditionReport> {
    let mut witnesses = Vec::new();
    let mut min_margin = f64::INFINITY;
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let s = pair_sum(set, i, j, set.alpha(i), set.alpha(j));
            let e = s.eig()?;
            let lmin = *e.values.last().unwrap_or(&0.0);
            min_margin = min_margin.min(lmin);
            let lmax = e.values.first().map_or(0.0, |v| v.abs());
            if lmin < -psd_tol * lmax.max(1.0) {
                witnesses.push(Witness {
                    indices: vec![i, j],
                    value: lmin,
                    point: None,
                });
            }
        }
    }
    Ok(ConditionReport {
        condition: Condition::D,
        passed: witnesses.is_empty(),
        witnesses,
        min_margin: finite_or_zero(min_margin),
    })
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Scans `(cos φ, sin φ)` over `grid` angles per pair, trying the pair's own
/// weight direction first.
pub fn verify_condition_dprime(set: &ConstraintSet, grid: usize) -> Result<ConditionReport> {
    if grid < 3 {
        return Err(Error::InvalidParameter(format!("angle grid must be >= 3, got {grid}")));
    }
    let mut witnesses = Vec::new();
    let mut min_margin = f64::INFINITY;
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let mut best = f64::NEG_INFINITY;
            let mut passed = false;
            let first = (set.alpha(i), set.alpha(j));
            let dirs = std::iter::once(first).chain((0..grid).map(|k| {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
                (phi.cos(), phi.sin())
            }));
            for (a, b) in dirs {
                let s = pair_sum(set, i, j, a, b);
                let e = s.eig()?;
                let lmin = *e.values.last().unwrap_or(&0.0);
                let lmax = e.values.first().map_or(0.0, |v| v.abs());
                let rel = lmin / lmax.max(1.0);
                best = best.max(rel);
                if lmin >= -DEFAULT_PSD_TOL * lmax.max(1.0) {
                    passed = true;
                    break;
                }
            }
            min_margin = min_margin.min(best);
            if !passed {
                witnesses.push(Witness {
                    indices: vec![i, j],
                    value: best,
                    point: None,
                });
            }
        }
    }
    Ok(ConditionReport {
        condition: Condition::Dprime,
        passed: witnesses.is_empty(),
        witnesses,
        min_margin: finite_or_zero(min_margin),
    })
}

/// Passes iff no member is PSD; `min_margin` is the smallest `−λ_min`.
pub fn verify_condition_cprime(set: &ConstraintSet) -> Result<ConditionReport> {
    let mut witnesses = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (k, m) in set.matrices().enumerate() {
        let lmin = m.min_eigenvalue()?;
        min_margin = min_margin.min(-lmin);
        if m.is_psd(DEFAULT_PSD_TOL) {
            witnesses.push(Witness {
                indices: vec![k],
                value: lmin,
                point: None,
            });
        }
    }
    Ok(ConditionReport {
        condition: Condition::Cprime,
        passed: witnesses.is_empty(),
        witnesses,
        min_margin: finite_or_zero(min_margin),
    })
}

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = f64::from(base);
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % u64::from(base)) as f64 * inv;
        i /= u64::from(base);
        inv /= b;
    }
    out
}

/// Uniform grid over the box (about half the budget) followed by a randomly
/// shifted Halton sequence.
fn sample_points(bbox: &BoundingBox, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = bbox.dim();
    let mut pts = Vec::with_capacity(samples);
    if d == 0 || samples == 0 {
        return pts;
    }
    let per_axis = ((samples as f64 / 2.0).powf(1.0 / d as f64).floor() as usize).max(2);
    let grid_total = per_axis.pow(d as u32).min(samples);
    let mut idx = vec![0usize; d];
    for _ in 0..grid_total {
        pts.push(
            (0..d)
                .map(|a| bbox.lo[a] + (bbox.hi[a] - bbox.lo[a]) * idx[a] as f64 / (per_axis - 1) as f64)
                .collect(),
        );
        for a in 0..d {
            idx[a] += 1;
            if idx[a] < per_axis {
                break;
            }
            idx[a] = 0;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    let mut i = 1u64;
    while pts.len() < samples {
        pts.push(
            (0..d)
                .map(|a| {
                    let h = (radical_inverse(i, PRIMES[a % PRIMES.len()]) + shift[a]).fract();
                    bbox.lo[a] + (bbox.hi[a] - bbox.lo[a]) * h
                })
                .collect(),
        );
        i += 1;
    }
    pts
}

/// Looks for `u` with `A(u) < −STRICT_TOL` and `B(u) ≤ 0` for distinct `A`, `B`.
pub fn falsify_condition_bprime(
    set: &ConstraintSet,
    bbox: &BoundingBox,
    samples: usize,
    seed: u64,
) -> Result<ConditionReport> {
    if let Some(n) = set.dim() {
        if n != bbox.dim() + 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                found: bbox.dim(),
            });
        }
    }
    let mut witnesses = Vec::new();
    let mut min_margin = f64::INFINITY;
    if set.len() >= 2 {
        let mut vals = vec![0.0; set.len()];
        for u in sample_points(bbox, samples, seed) {
            for (k, m) in set.matrices().enumerate() {
                vals[k] = eval_homogeneous(m, &u)?;
            }
            // Most negative value, and the second smallest among the rest.
            let (a, &va) = vals
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(y.1))
                .unwrap();
            let (b, &vb) = vals
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != a)
                .min_by(|x, y| x.1.total_cmp(y.1))
                .unwrap();
            // Distance from violating: both must fail their thresholds.
            min_margin = min_margin.min((va + STRICT_TOL).max(vb));
            if va < -STRICT_TOL && vb <= 0.0 && witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness {
                    indices: vec![a, b],
                    value: va,
                    point: Some(u),
                });
            }
        }
    }
    Ok(ConditionReport {
        condition: Condition::BprimeFalsifier,
        passed: witnesses.is_empty(),
        witnesses,
        min_margin: finite_or_zero(min_margin),
    })
}

/// Re-evaluates a falsifier witness; true when the violation reproduces.
pub fn replay_bprime_witness(set: &ConstraintSet, w: &Witness) -> Result<bool> {
    let (Some(u), [a, b]) = (&w.point, w.indices.as_slice()) else {
        return Ok(false);
    };
    let cs = set.constraints();
    Ok(a != b
        && eval_homogeneous(&cs[*a].matrix, u)? < -STRICT_TOL
        && eval_homogeneous(&cs[*b].matrix, u)? <= 0.0)
}

/// Best feasible grid value found by [`brute_force_2d`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOptimum {
    pub value: f64,
    pub point: [f64; 2],
}

fn feasible_2d(mats: &[SymMatrix], u: [f64; 2]) -> bool {
    mats.iter().all(|m| quad3(m, u) >= -DEFAULT_FEAS_TOL)
}

fn quad3(m: &SymMatrix, u: [f64; 2]) -> f64 {
    m.quad_form(&[u[0], u[1], 1.0])
}

/// Grid search for the minimum of the objective over feasible points in the
/// box, refined `refine_levels` times around the best candidates.
pub fn brute_force_2d(
    instance: &QcqpInstance,
    bbox: &BoundingBox,
    coarse: usize,
    refine_levels: usize,
) -> Result<GridOptimum> {
    if instance.n != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: instance.n,
        });
    }
    if bbox.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: bbox.dim(),
        });
    }
    if coarse < 51 {
        return Err(Error::InvalidParameter(format!("coarse grid must be >= 51, got {coarse}")));
    }
    let mats: Vec<SymMatrix> = instance.set.matrices().cloned().collect();
    let q = &instance.q;
    let step = [
        (bbox.hi[0] - bbox.lo[0]) / (coarse - 1) as f64,
        (bbox.hi[1] - bbox.lo[1]) / (coarse - 1) as f64,
    ];
    let mut cands: Vec<(f64, [f64; 2])> = Vec::new();
    for i in 0..coarse {
        for j in 0..coarse {
            let u = [bbox.lo[0] + step[0] * i as f64, bbox.lo[1] + step[1] * j as f64];
            if feasible_2d(&mats, u) {
                cands.push((quad3(q, u), u));
            }
        }
    }
    keep_best(&mut cands);
    let mut delta = step;
    for _ in 0..refine_levels {
        let mut next = cands.clone();
        let h = [delta[0] / REFINE_HALF_STEPS as f64, delta[1] / REFINE_HALF_STEPS as f64];
        let k = REFINE_HALF_STEPS as i64;
        for &(_, c) in &cands {
            for di in -k..=k {
                for dj in -k..=k {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let u = [c[0] + h[0] * di as f64, c[1] + h[1] * dj as f64];
                    if bbox.contains(&u) && feasible_2d(&mats, u) {
                        next.push((quad3(q, u), u));
                    }
                }
            }
        }
        keep_best(&mut next);
        cands = next;
        delta = h;
    }
    cands
        .first()
        .map(|&(value, point)| GridOptimum { value, point })
        .ok_or(Error::NoFeasiblePoint)
}

fn keep_best(c: &mut Vec<(f64, [f64; 2])>) {
    c.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1[0].total_cmp(&b.1[0]))
            .then(a.1[1].total_cmp(&b.1[1]))
    });
    c.dedup_by(|a, b| a.1 == b.1);
    c.truncate(REFINE_KEEP);
}

/// A box containing the feasible region, derived from every constraint whose
/// leading `(n−1)×(n−1)` block is negative definite (each such constraint
/// confines the feasible set to an ellipsoid). `None` when no constraint
/// certifies boundedness.
pub fn bounded_region_box(set: &ConstraintSet) -> Result<Option<BoundingBox>> {
    let Some(n) = set.dim() else {
        return Ok(None);
    };
    if n < 2 {
        return Ok(None);
    }
    let d = n - 1;
    let mut out: Option<BoundingBox> = None;
    for m in set.matrices() {
        let neg = Mat::from_fn(d, d, |i, j| -m.get(i, j));
        if crate::linalg::cholesky(&neg).is_none() {
            continue;
        }
        let neg_inv = neg.inverse()?;
        let b: Vec<f64> = (0..d).map(|i| m.get(i, d)).collect();
        // A = −neg, so center = −A⁻¹b = neg⁻¹b and κ = c + bᵀ neg⁻¹ b.
        let center = neg_inv.mul_vec(&b);
        let kappa = m.get(d, d) + crate::linalg::dot(&b, &center);
        if kappa < 0.0 {
            return Err(Error::NoFeasiblePoint);
        }
        let half: Vec<f64> = (0..d).map(|i| (kappa * neg_inv[(i, i)]).sqrt()).collect();
        let lo: Vec<f64> = center.iter().zip(&half).map(|(c, h)| c - h).collect();
        let hi: Vec<f64> = center.iter().zip(&half).map(|(c, h)| c + h).collect();
        out = Some(match out {
            None => BoundingBox { lo, hi },
            Some(prev) => BoundingBox {
                lo: prev.lo.iter().zip(&lo).map(|(a, b)| a.max(*b)).collect(),
                hi: prev.hi.iter().zip(&hi).map(|(a, b)| a.min(*b)).collect(),
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{conjugate, disk, translation, Constraint};
    use crate::instances::{self, example41};

    fn set_of(mats: Vec<SymMatrix>) -> ConstraintSet {
        ConstraintSet::new(
            mats.into_iter()
                .enumerate()
                .map(|(i, m)| Constraint::new(format!("M{i}"), m))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn d_passes_on_disk_ring() {
        let r = verify_condition_d(&instances::instance_disk_ring(0.5).unwrap()).unwrap();
        assert!(r.passed);
        assert!(r.min_margin >= -1e-9);
    }

    #[test]
    fn d_passes_on_strip_pair() {
        let r = verify_condition_d(&instances::instance_strip()).unwrap();
        assert!(r.passed);
        assert_eq!(r.min_margin, 0.0);
    }

    #[test]
    fn d_fails_with_witness() {
        let s = set_of(vec![SymMatrix::from_diag(&[1.0, -2.0, 0.0]), SymMatrix::from_diag(&[-2.0, 1.0, 0.0])]);
        let r = verify_condition_d(&s).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witnesses[0].indices, vec![0, 1]);
        assert_eq!(r.witnesses[0].value, -1.0);
    }

    #[test]
    fn dprime_examples() {
        let ring = instances::instance_disk_ring(1.0 / 3.0).unwrap();
        assert!(verify_condition_dprime(&ring, DEFAULT_ANGLE_GRID).unwrap().passed);
        // {A, −A} passes through the zero combination at α = β.
        let a = SymMatrix::from_diag(&[1.0, -1.0, 0.5]);
        let r = verify_condition_dprime(&set_of(vec![a.clone(), a.neg()]), DEFAULT_ANGLE_GRID).unwrap();
        assert!(r.passed);
        // c·diag(1,−1,0) + s·diag(−1,−1,1) is PSD only for c = s = 0.
        let pair = set_of(vec![SymMatrix::from_diag(&[1.0, -1.0, 0.0]), SymMatrix::from_diag(&[-1.0, -1.0, 1.0])]);
        let r = verify_condition_dprime(&pair, DEFAULT_ANGLE_GRID).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witnesses.len(), 1);
        let s = set_of(vec![SymMatrix::from_diag(&[1.0, 0.0, 0.0]), SymMatrix::from_diag(&[-1.0, 1.0, 1.0])]);
        let s = ConstraintSet::with_alphas(s.constraints().to_vec(), vec![1.0, 3.0]).unwrap();
        assert!(verify_condition_d(&s).unwrap().witnesses.len() == 1);
        assert!(verify_condition_dprime(&s, 8).unwrap().passed);
        assert!(verify_condition_dprime(&s, 2).is_err());
    }

    #[test]
    fn cprime_examples() {
        assert!(verify_condition_cprime(&instances::instance_disk_ring(0.5).unwrap()).unwrap().passed);
        let s = set_of(vec![SymMatrix::from_diag(&[1.0, -1.0, 0.0]), SymMatrix::identity(3)]);
        let r = verify_condition_cprime(&s).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witnesses[0].indices, vec![1]);
        assert!(verify_condition_cprime(&ConstraintSet::new(vec![]).unwrap()).unwrap().passed);
    }

    #[test]
    fn bprime_falsifier_finds_overlapping_disks() {
        let d = disk(1.0).unwrap();
        let shifted = conjugate(&d, &translation([0.5, 0.0])).unwrap();
        let s = ConstraintSet::new(vec![d, shifted]).unwrap();
        let bbox = BoundingBox::square(-2.0, 2.0).unwrap();
        let r = falsify_condition_bprime(&s, &bbox, 10_000, 7).unwrap();
        assert!(!r.passed);
        for w in &r.witnesses {
            assert!(replay_bprime_witness(&s, w).unwrap());
        }
        // (0.25, 0) is deep inside both disks.
        let u = [0.25, 0.0];
        assert!(eval_homogeneous(&s.constraints()[0].matrix, &u).unwrap() < -0.9);
        assert!(eval_homogeneous(&s.constraints()[1].matrix, &u).unwrap() < -0.9);
    }

    #[test]
    fn bprime_falsifier_passes_on_hyperbola_family() {
        let g = [(2, 1.0), (1, 1.0), (0, 1.0), (-1, 1.0), (-2, 1.0)];
        let s = instances::family_hyperbola(&g).unwrap();
        let bbox = BoundingBox::square(-6.0, 6.0).unwrap();
        assert!(falsify_condition_bprime(&s, &bbox, 100_000, 1).unwrap().passed);
        let single = ConstraintSet::new(vec![disk(1.0).unwrap()]).unwrap();
        assert!(falsify_condition_bprime(&single, &bbox, 100, 1).unwrap().passed);
    }

    #[test]
    fn samples_are_deterministic_and_in_box() {
        let bbox = BoundingBox::new(vec![-1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let a = sample_points(&bbox, 1000, 42);
        assert_eq!(a.len(), 1000);
        assert_eq!(a, sample_points(&bbox, 1000, 42));
        assert_ne!(a, sample_points(&bbox, 1000, 43));
        assert!(a.iter().all(|u| bbox.contains(u)));
    }

    #[test]
    fn brute_force_table_rows() {
        let bbox = BoundingBox::square(-5.0, 6.0).unwrap();
        let r1 = brute_force_2d(&example41::instance(1).unwrap(), &bbox, 401, 3).unwrap();
        assert!(r1.value.abs() < 1e-3);
        assert!((r1.point[0] - 2.0).abs() < 1e-3 && (r1.point[1] - 1.0).abs() < 1e-3);
        let r3 = brute_force_2d(&example41::instance(3).unwrap(), &bbox, 401, 3).unwrap();
        assert!((r3.value + 2.0).abs() < 1e-3);
        // The objective grows only quadratically along the boundary away from
        // (−1, 0), so the point is located to about the square root of the
        // value accuracy.
        assert!((r3.point[0] + 1.0).abs() < 1e-3 && r3.point[1].abs() < 3e-2, "{r3:?}");
    }

    #[test]
    fn brute_force_constant_objective() {
        let inst = QcqpInstance::homogeneous(SymMatrix::from_diag(&[0.0, 0.0, 2.5]), example41::constraints()).unwrap();
        let r = brute_force_2d(&inst, &BoundingBox::square(-3.0, 3.0).unwrap(), 51, 1).unwrap();
        assert_eq!(r.value, 2.5);
        let infeasible = QcqpInstance::homogeneous(
            SymMatrix::zeros(3),
            ConstraintSet::new(vec![disk(10.0).unwrap()]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            brute_force_2d(&infeasible, &BoundingBox::square(-1.0, 1.0).unwrap(), 51, 1),
            Err(Error::NoFeasiblePoint)
        );
    }

    #[test]
    fn bounded_box_from_enclosing_circle() {
        let ring = instances::instance_disk_ring(0.5).unwrap();
        let b = bounded_region_box(&ring).unwrap().unwrap();
        for k in 0..2 {
            assert!((b.lo[k] + 1.5).abs() < 1e-12 && (b.hi[k] - 1.5).abs() < 1e-12);
        }
        assert!(bounded_region_box(&example41::constraints()).unwrap().is_none());
    }

    #[test]
    fn bounded_box_of_shifted_ellipse() {
        // −((u₁−1)²/4 + (u₂+2)²) + 1 ≥ 0: ellipse centered (1,−2), half-widths (2,1).
        let e = disk(1.0).unwrap();
        let e = conjugate(&e, &crate::constraints::scaling([2.0, 1.0]).unwrap()).unwrap();
        let e = conjugate(&e, &translation([1.0, -2.0])).unwrap().scaled(-1.0);
        let b = bounded_region_box(&ConstraintSet::new(vec![e]).unwrap()).unwrap().unwrap();
        assert!((b.lo[0] + 1.0).abs() < 1e-12 && (b.hi[0] - 3.0).abs() < 1e-12);
        assert!((b.lo[1] + 3.0).abs() < 1e-12 && (b.hi[1] + 1.0).abs() < 1e-12);
    }
}
