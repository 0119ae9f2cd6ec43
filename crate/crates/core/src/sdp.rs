//! Primal-dual interior-point solver for the SDP relaxation
//!
//! ```text
//! min Q•X  s.t.  H•X = 1,  Bₖ•X ≥ 0,  X ⪰ 0
//! max t    s.t.  Q − tH − Σ yₖBₖ = Y ⪰ 0,  y ≥ 0
//! ```
//!
//! The inequalities get explicit slacks `sₖ = Bₖ•X`, giving a standard-form
//! problem over `𝕊ⁿ₊ × ℝᵐ₊`. Each iteration takes a Mehrotra
//! predictor-corrector step in Nesterov–Todd scaled variables and solves
//! the normal equations by Cholesky.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instances::QcqpInstance;
use crate::linalg::{cholesky, cholesky_solve, lu_solve, Mat};
use crate::symmat::SymMatrix;

const NEAR_OPTIMAL_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative tolerance on gap, residuals and complementarity.
    pub tol: f64,
    pub max_iter: usize,
    /// The relaxation is declared unbounded once `Q•X < −threshold·(1+‖Q‖)`
    /// at a primal feasible iterate.
    pub unbounded_threshold: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            unbounded_threshold: 1e8,
            step_factor: 0.98,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Unbounded,
    Infeasible,
    MaxIter,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Unbounded => "unbounded",
            Status::Infeasible => "infeasible",
            Status::MaxIter => "max_iter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `|H•X − 1|`
    pub primal_eq: f64,
    /// `max(0, −minₖ Bₖ•X)`
    pub primal_ineq: f64,
    /// `‖Q − tH − Σ yₖBₖ − Y‖_F`
    pub dual: f64,
    /// `maxₖ |yₖ·(Bₖ•X)|`
    pub comp_y: f64,
    /// `|Y•X|`
    pub comp_big_y: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        [self.primal_eq, self.primal_ineq, self.dual, self.comp_y, self.comp_big_y]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: Status,
    pub x: SymMatrix,
    pub t: f64,
    pub y: Vec<f64>,
    pub big_y: SymMatrix,
    /// `Q•X`
    pub objective: f64,
    /// `t`, the dual objective.
    pub dual_objective: f64,
    pub iterations: usize,
    pub residuals: KktResiduals,
    /// A recession direction `D ⪰ 0` with `H•D = 0`, `Bₖ•D ≥ 0`, `Q•D < 0`
    /// when the status is unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<SymMatrix>,
}

/// Recomputes every KKT residual directly from the instance and solution.
pub fn kkt_residuals(instance: &QcqpInstance, sol: &SdpSolution) -> KktResiduals {
    kkt_from_parts(instance, &sol.x, sol.t, &sol.y, &sol.big_y)
}

fn kkt_from_parts(inst: &QcqpInstance, x: &SymMatrix, t: f64, y: &[f64], big_y: &SymMatrix) -> KktResiduals {
    let vals: Vec<f64> = inst.set.matrices().map(|b| b.inner_unchecked(x)).collect();
    let mut dual = inst.q.axpy(-t, &inst.h).sub(big_y).expect("same dimension");
    for (b, yk) in inst.set.matrices().zip(y) {
        dual = dual.axpy(-yk, b);
    }
    KktResiduals {
        primal_eq: (inst.h.inner_unchecked(x) - 1.0).abs(),
        primal_ineq: vals.iter().fold(0.0f64, |m, v| m.max(-v)),
        dual: dual.frobenius_norm(),
        comp_y: vals.iter().zip(y).fold(0.0f64, |m, (v, yk)| m.max((v * yk).abs())),
        comp_big_y: big_y.inner_unchecked(x).abs(),
    }
}

/// Indices with `|Bₖ•X| ≤ act_tol·(1 + ‖Bₖ‖_F·‖X‖_F)`.
pub fn active_set(instance: &QcqpInstance, sol: &SdpSolution, act_tol: f64) -> Vec<usize> {
    active_set_of(instance, &sol.x, act_tol)
}

pub(crate) fn active_set_of(instance: &QcqpInstance, x: &SymMatrix, act_tol: f64) -> Vec<usize> {
    let xn = x.frobenius_norm();
    instance
        .set
        .matrices()
        .enumerate()
        .filter(|(_, b)| b.inner_unchecked(x).abs() <= act_tol * (1.0 + b.frobenius_norm() * xn))
        .map(|(k, _)| k)
        .collect()
}

pub fn solve_relaxation(instance: &QcqpInstance, opts: &SolverOptions) -> Result<SdpSolution> {
    let m = instance.set.len();
    let mut rows = Vec::with_capacity(m + 1);
    rows.push(Row {
        psd: instance.h.clone(),
        lp: None,
    });
    for (k, b) in instance.set.matrices().enumerate() {
        rows.push(Row {
            psd: b.clone(),
            lp: Some((k, -1.0)),
        });
    }
    let mut b = vec![0.0; m + 1];
    b[0] = 1.0;
    let problem = Conic {
        n: instance.n,
        m_lp: m,
        c: instance.q.clone(),
        rows,
        b,
    };
    let out = problem.solve(opts);
    let t = out.lam[0];
    let y = out.lam[1..].to_vec();
    let objective = instance.q.inner_unchecked(&out.x);
    let residuals = kkt_from_parts(instance, &out.x, t, &y, &out.z);
    let mut status = match out.outcome {
        Outcome::Converged => Status::Optimal,
        Outcome::PrimalDiverged => Status::Unbounded,
        Outcome::DualDiverged => Status::Infeasible,
        Outcome::Stalled => Status::MaxIter,
    };
    let mut ray = None;
    if status == Status::Unbounded || status == Status::MaxIter {
        if let Some(d) = recession_direction(instance, opts) {
            status = Status::Unbounded;
            ray = Some(d);
        } else if status == Status::Unbounded {
            ray = Some(out.x.scale(1.0 / out.x.trace().max(f64::MIN_POSITIVE)));
        }
    }
    Ok(SdpSolution {
        status,
        x: out.x,
        t,
        y,
        big_y: out.z,
        objective,
        dual_objective: t,
        iterations: out.iterations,
        residuals,
        ray,
    })
}

/// Solves `min Q•D s.t. trace D = 1, H•D = 0, Bₖ•D ≥ 0, D ⪰ 0`; a clearly
/// negative value certifies that the relaxation is unbounded below.
fn recession_direction(instance: &QcqpInstance, opts: &SolverOptions) -> Option<SymMatrix> {
    let m = instance.set.len();
    let mut rows = Vec::with_capacity(m + 2);
    rows.push(Row {
        psd: SymMatrix::identity(instance.n),
        lp: None,
    });
    rows.push(Row {
        psd: instance.h.clone(),
        lp: None,
    });
    for (k, b) in instance.set.matrices().enumerate() {
        rows.push(Row {
            psd: b.clone(),
            lp: Some((k, -1.0)),
        });
    }
    let mut b = vec![0.0; m + 2];
    b[0] = 1.0;
    let problem = Conic {
        n: instance.n,
        m_lp: m,
        c: instance.q.clone(),
        rows,
        b,
    };
    let out = problem.solve(&SolverOptions {
        tol: 1e-9,
        ..opts.clone()
    });
    let qn = 1.0 + instance.q.frobenius_norm();
    if out.outcome != Outcome::Converged {
        return None;
    }
    let d = out.x;
    let ok = instance.q.inner_unchecked(&d) < -1e-6 * qn
        && instance.h.inner_unchecked(&d).abs() <= 1e-7 * (1.0 + instance.h.frobenius_norm())
        && instance
            .set
            .matrices()
            .all(|b| b.inner_unchecked(&d) >= -1e-7 * (1.0 + b.frobenius_norm()));
    ok.then_some(d)
}

/// One equality row `A•X + a·s = b`; the slack part has at most one entry.
struct Row {
    psd: SymMatrix,
    lp: Option<(usize, f64)>,
}

struct Conic {
    n: usize,
    m_lp: usize,
    c: SymMatrix,
    rows: Vec<Row>,
    b: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Converged,
    PrimalDiverged,
    DualDiverged,
    Stalled,
}

struct ConicResult {
    outcome: Outcome,
    x: SymMatrix,
    z: SymMatrix,
    lam: Vec<f64>,
    iterations: usize,
}

/// NT scaling point: `X = G Λ Gᵀ`, `Z = G⁻ᵀ Λ G⁻¹`, `W = GGᵀ`.
struct Scaling {
    g: Mat,
    w: Mat,
    lam: Vec<f64>,
    d: Vec<f64>,
    v: Vec<f64>,
}

struct Direction {
    dx: Mat,
    ds: Vec<f64>,
    dlam: Vec<f64>,
    dz: Mat,
    dw: Vec<f64>,
    /// `ΔX̃` and `ΔZ̃` in the scaled space.
    dx_s: Mat,
    dz_s: Mat,
}

fn inner_dense(a: &SymMatrix, m: &Mat) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a.get(i, j) * m[(i, j)];
        }
    }
    s
}

fn sym_part(m: &Mat) -> Mat {
    Mat::from_fn(m.rows(), m.cols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

fn to_sym(m: &Mat) -> Option<SymMatrix> {
    SymMatrix::from_dense(m).ok()
}

fn min_eig_dense(m: &Mat) -> Option<f64> {
    to_sym(m)?.min_eigenvalue().ok()
}

impl Conic {
    fn apply(&self, x: &SymMatrix, s: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                let mut v = r.psd.inner_unchecked(x);
                if let Some((k, a)) = r.lp {
                    v += a * s[k];
                }
                v
            })
            .collect()
    }

    /// `(Σ λᵢAᵢ, Σ λᵢaᵢ)`
    fn adjoint(&self, lam: &[f64]) -> (SymMatrix, Vec<f64>) {
        let mut m = SymMatrix::zeros(self.n);
        let mut v = vec![0.0; self.m_lp];
        for (r, l) in self.rows.iter().zip(lam) {
            m = m.axpy(*l, &r.psd);
            if let Some((k, a)) = r.lp {
                v[k] += a * l;
            }
        }
        (m, v)
    }

    fn solve(&self, opts: &SolverOptions) -> ConicResult {
        let n = self.n;
        let p = self.rows.len();
        let dense_rows: Vec<Mat> = self.rows.iter().map(|r| r.psd.to_dense()).collect();
        let bnorm = 1.0 + self.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cnorm = 1.0 + self.c.frobenius_norm();
        let nu = (n + self.m_lp) as f64;

        let hi = self.rows[0].psd.trace();
        let mut x = if hi.abs() > 1e-8 && self.b[0] > 0.0 {
            SymMatrix::identity(n).scale(self.b[0] / hi)
        } else {
            SymMatrix::identity(n)
        };
        let mut s = vec![1.0; self.m_lp];
        let mut lam = vec![0.0; p];
        for (i, r) in self.rows.iter().enumerate() {
            if r.lp.is_some() {
                lam[i] = 1.0;
            }
        }
        let mut z = SymMatrix::identity(n);
        let mut w = vec![1.0; self.m_lp];

        let mut outcome = Outcome::Stalled;
        let mut iterations = 0;
        let mut worst = f64::INFINITY;
        let mut broke_down = true;
        for it in 0..opts.max_iter {
            iterations = it;
            let ax = self.apply(&x, &s);
            let rp: Vec<f64> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let (aty, aty_lp) = self.adjoint(&lam);
            let rd = self.c.sub(&aty).and_then(|m| m.sub(&z)).expect("same dimension");
            let rw: Vec<f64> = aty_lp.iter().zip(&w).map(|(a, wk)| -a - wk).collect();

            let pobj = self.c.inner_unchecked(&x);
            let dobj: f64 = self.b.iter().zip(&lam).map(|(b, l)| b * l).sum();
            let comp = z.inner_unchecked(&x) + s.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            let mu = comp / nu;
            let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
            let dinf = (rd.frobenius_norm().powi(2) + rw.iter().map(|v| v * v).sum::<f64>()).sqrt() / cnorm;
            let denom = 1.0 + pobj.abs() + dobj.abs();
            let gap = (pobj - dobj).abs() / denom;
            worst = pinf.max(dinf).max(gap).max(comp / denom);

            if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol && comp / denom <= opts.tol {
                outcome = Outcome::Converged;
                break;
            }
            if pobj < -opts.unbounded_threshold * cnorm && pinf <= 1e-6 {
                outcome = Outcome::PrimalDiverged;
                break;
            }
            if dobj > opts.unbounded_threshold * cnorm && dinf <= 1e-6 {
                outcome = Outcome::DualDiverged;
                break;
            }

            let Some(sc) = self.scaling(&x, &z, &s, &w) else {
                break;
            };
            let wa: Vec<Mat> = dense_rows.iter().map(|a| sc.w.matmul(a).matmul(&sc.w)).collect();
            let mut schur = Mat::from_fn(p, p, |i, j| inner_dense(&self.rows[i].psd, &wa[j]));
            for i in 0..p {
                for j in 0..p {
                    if let (Some((ki, ai)), Some((kj, aj))) = (self.rows[i].lp, self.rows[j].lp) {
                        if ki == kj {
                            schur[(i, j)] += ai * aj * sc.d[ki] * sc.d[ki];
                        }
                    }
                }
            }
            let schur = sym_part(&schur);
            let chol = factor_schur(&schur);
            let rd_dense = rd.to_dense();
            let wrdw = sc.w.matmul(&rd_dense).matmul(&sc.w);

            let solve = |sigma_mu: f64, corr: Option<(&Mat, &[f64])>| -> Option<Direction> {
                self.direction(&sc, &rp, &rd_dense, &wrdw, &rw, &wa, &schur, chol.as_ref(), sigma_mu, corr)
            };

            let Some(aff) = solve(0.0, None) else {
                break;
            };
            let ap_aff = step_limit(&sc.lam, &aff.dx_s, &s, &aff.ds).min(1.0);
            let ad_aff = step_limit(&sc.lam, &aff.dz_s, &w, &aff.dw).min(1.0);
            let xa = x.to_dense().add(&aff.dx.scale(ap_aff));
            let za = z.to_dense().add(&aff.dz.scale(ad_aff));
            let mut comp_aff = 0.0;
            for i in 0..n {
                for j in 0..n {
                    comp_aff += xa[(i, j)] * za[(i, j)];
                }
            }
            for k in 0..self.m_lp {
                comp_aff += (s[k] + ap_aff * aff.ds[k]) * (w[k] + ad_aff * aff.dw[k]);
            }
            let sigma = if mu > 0.0 { (comp_aff / comp).clamp(0.0, 1.0).powi(3) } else { 0.0 };

            let prod = aff.dx_s.matmul(&aff.dz_s);
            let corr_x = sym_part(&prod);
            let corr_lp: Vec<f64> = (0..self.m_lp).map(|k| (aff.ds[k] / sc.d[k]) * (aff.dw[k] * sc.d[k])).collect();
            let Some(dir) = solve(sigma * mu, Some((&corr_x, &corr_lp))) else {
                break;
            };
            let ap = (opts.step_factor * step_limit(&sc.lam, &dir.dx_s, &s, &dir.ds)).min(1.0);
            let ad = (opts.step_factor * step_limit(&sc.lam, &dir.dz_s, &w, &dir.dw)).min(1.0);

            let Some(dx) = to_sym(&dir.dx) else { break };
            let Some(dz) = to_sym(&dir.dz) else { break };
            x = x.axpy(ap, &dx);
            z = z.axpy(ad, &dz);
            for k in 0..self.m_lp {
                s[k] += ap * dir.ds[k];
                w[k] += ad * dir.dw[k];
            }
            for (l, dl) in lam.iter_mut().zip(&dir.dlam) {
                *l += ad * dl;
            }
            iterations = it + 1;
            if ap < 1e-12 && ad < 1e-12 {
                break;
            }
            if it + 1 == opts.max_iter {
                broke_down = false;
            }
        }
        // A breakdown close to the optimum (X or Z numerically singular) is
        // accepted when the last iterate is within a looser tolerance.
        if outcome == Outcome::Stalled && broke_down && worst <= NEAR_OPTIMAL_FACTOR * opts.tol {
            outcome = Outcome::Converged;
        }
        ConicResult {
            outcome,
            x,
            z,
            lam,
            iterations,
        }
    }

    fn scaling(&self, x: &SymMatrix, z: &SymMatrix, s: &[f64], w: &[f64]) -> Option<Scaling> {
        let l = cholesky(&x.to_dense())?;
        let ltzl = to_sym(&l.t_matmul(&z.to_dense().matmul(&l)))?;
        let e = ltzl.eig().ok()?;
        if e.values.iter().any(|v| !(*v > 0.0)) {
            return None;
        }
        let lam: Vec<f64> = e.values.iter().map(|v| v.sqrt()).collect();
        let n = self.n;
        let lv = l.matmul(&e.vectors);
        let g = Mat::from_fn(n, n, |i, j| lv[(i, j)] / lam[j].sqrt());
        let w_ = g.matmul(&g.transpose());
        if s.iter().chain(w).any(|v| !(*v > 0.0)) {
            return None;
        }
        let d = s.iter().zip(w).map(|(a, b)| (a / b).sqrt()).collect();
        let v = s.iter().zip(w).map(|(a, b)| (a * b).sqrt()).collect();
        Some(Scaling {
            g,
            w: sym_part(&w_),
            lam,
            d,
            v,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        sc: &Scaling,
        rp: &[f64],
        rd: &Mat,
        wrdw: &Mat,
        rw: &[f64],
        wa: &[Mat],
        schur: &Mat,
        chol: Option<&Mat>,
        sigma_mu: f64,
        corr: Option<(&Mat, &[f64])>,
    ) -> Option<Direction> {
        let n = self.n;
        let lam = &sc.lam;
        let rc = Mat::from_fn(n, n, |i, j| {
            let mut t = if i == j { sigma_mu - lam[i] * lam[i] } else { 0.0 };
            if let Some((cx, _)) = corr {
                t -= cx[(i, j)];
            }
            2.0 * t / (lam[i] + lam[j])
        });
        let rc_lp: Vec<f64> = (0..self.m_lp)
            .map(|k| {
                let c = corr.map_or(0.0, |(_, cl)| cl[k]);
                (sigma_mu - sc.v[k] * sc.v[k] - c) / sc.v[k]
            })
            .collect();
        let grg = sym_part(&sc.g.matmul(&rc).matmul(&sc.g.transpose()));
        let rhs: Vec<f64> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut v = rp[i] - inner_dense(&r.psd, &grg) + inner_dense(&r.psd, wrdw);
                if let Some((k, a)) = r.lp {
                    v += -a * sc.d[k] * rc_lp[k] + a * sc.d[k] * sc.d[k] * rw[k];
                }
                v
            })
            .collect();
        let dlam = match chol {
            Some(l) => cholesky_solve(l, &rhs),
            None => lu_solve(schur, &rhs).ok()?,
        };
        if dlam.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut dz = rd.clone();
        let mut dw = rw.to_vec();
        for (r, dl) in self.rows.iter().zip(&dlam) {
            let a = r.psd.to_dense();
            dz = dz.sub(&a.scale(*dl));
            if let Some((k, c)) = r.lp {
                dw[k] -= c * dl;
            }
        }
        let dz = sym_part(&dz);
        // W ΔZ W = W R_d W − Σ Δλᵢ W Aᵢ W
        let mut wdzw = wrdw.clone();
        for (wai, dl) in wa.iter().zip(&dlam) {
            wdzw = wdzw.sub(&wai.scale(*dl));
        }
        let dx = sym_part(&grg.sub(&wdzw));
        let ds: Vec<f64> = (0..self.m_lp)
            .map(|k| sc.d[k] * rc_lp[k] - sc.d[k] * sc.d[k] * dw[k])
            .collect();
        let dz_s = sym_part(&sc.g.t_matmul(&dz.matmul(&sc.g)));
        let dx_s = rc.sub(&dz_s);
        Some(Direction {
            dx,
            ds,
            dlam,
            dz,
            dw,
            dx_s,
            dz_s,
        })
    }
}

fn factor_schur(m: &Mat) -> Option<Mat> {
    if let Some(l) = cholesky(m) {
        return Some(l);
    }
    let p = m.rows();
    let scale = (0..p).fold(0.0f64, |a, i| a.max(m[(i, i)].abs())).max(1e-300);
    let mut reg = m.clone();
    for i in 0..p {
        reg[(i, i)] += 1e-13 * scale;
    }
    cholesky(&reg)
}

/// Largest `α` keeping `Λ + αΔ ⪰ 0` and `v + α·dv ≥ 0` (infinite when the
/// direction never leaves the cone).
fn step_limit(lam: &[f64], delta_s: &Mat, v: &[f64], dv: &[f64]) -> f64 {
    let n = lam.len();
    let k = Mat::from_fn(n, n, |i, j| delta_s[(i, j)] / (lam[i] * lam[j]).sqrt());
    let mut alpha = f64::INFINITY;
    if let Some(lmin) = min_eig_dense(&k) {
        if lmin < 0.0 {
            alpha = -1.0 / lmin;
        }
    } else {
        return 0.0;
    }
    for (vi, dvi) in v.iter().zip(dv) {
        if *dvi < 0.0 {
            alpha = alpha.min(-vi / dvi);
        }
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{self, example41, last_coordinate, ConstraintSet};

    fn solve(inst: &QcqpInstance) -> SdpSolution {
        solve_relaxation(inst, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn table_row_two() {
        let inst = example41::instance(2).unwrap();
        let sol = solve(&inst);
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 4.0).abs() < 1e-6);
        let vals: Vec<f64> = inst.set.matrices().map(|b| b.inner(&sol.x).unwrap()).collect();
        assert!(vals[0].abs() < 1e-5 && (vals[1] - 6.0).abs() < 1e-4 && (vals[2] - 3.0).abs() < 1e-4, "{vals:?}");
        assert_eq!(active_set(&inst, &sol, 1e-6), vec![0]);
    }

    #[test]
    fn table_row_one_has_no_active_constraint() {
        let inst = example41::instance(1).unwrap();
        let sol = solve(&inst);
        assert_eq!(sol.status, Status::Optimal);
        assert!(sol.objective.abs() < 1e-6);
        assert!(active_set(&inst, &sol, 1e-6).is_empty());
    }

    #[test]
    fn every_table_row_converges() {
        for k in 1..=6 {
            let inst = example41::instance(k).unwrap();
            let sol = solve(&inst);
            assert_eq!(sol.status, Status::Optimal, "row {k}: {:?}", sol.residuals);
            assert!((sol.objective - example41::OPTIMAL_VALUES[k - 1]).abs() < 1e-5, "row {k}: {}", sol.objective);
            let r = kkt_residuals(&inst, &sol);
            assert!(r.max() <= 1e-6 * (1.0 + sol.x.frobenius_norm()), "row {k}: {r:?}");
            assert!(sol.dual_objective <= sol.objective + 1e-7 * (1.0 + sol.objective.abs()));
        }
    }

    #[test]
    fn strip_pair_is_unbounded() {
        let inst = QcqpInstance::homogeneous(instances::strip_objective(), instances::instance_strip()).unwrap();
        let sol = solve(&inst);
        assert_eq!(sol.status, Status::Unbounded);
        let ray = sol.ray.unwrap();
        assert!(inst.q.inner(&ray).unwrap() < 0.0);
    }

    #[test]
    fn strip_single_has_value_minus_four() {
        let inst = QcqpInstance::homogeneous(instances::strip_objective(), instances::instance_strip_single()).unwrap();
        let sol = solve(&inst);
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 4.0).abs() < 1e-6, "{}", sol.objective);
    }

    #[test]
    fn objective_equal_to_normalizer() {
        let set = instances::instance_disk_ring(0.5).unwrap();
        let inst = QcqpInstance::homogeneous(last_coordinate(3), set).unwrap();
        let sol = solve(&inst);
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hand_built_trivial_solution_has_zero_residuals() {
        let q = SymMatrix::from_diag(&[1.0, 0.0, 0.0]);
        let inst = QcqpInstance::homogeneous(q.clone(), ConstraintSet::new(vec![]).unwrap()).unwrap();
        let x = last_coordinate(3);
        let sol = SdpSolution {
            status: Status::Optimal,
            x: x.clone(),
            t: 0.0,
            y: vec![],
            big_y: q,
            objective: 0.0,
            dual_objective: 0.0,
            iterations: 0,
            residuals: kkt_residuals_zero(),
            ray: None,
        };
        assert_eq!(kkt_residuals(&inst, &sol).max(), 0.0);
        let bumped = SdpSolution {
            x: x.add(&SymMatrix::identity(3).scale(0.1)).unwrap(),
            ..sol
        };
        assert!((kkt_residuals(&inst, &bumped).primal_eq - 0.1).abs() < 1e-15);
        assert!(active_set(&inst, &bumped, 1e-6).is_empty());
    }

    fn kkt_residuals_zero() -> KktResiduals {
        KktResiduals {
            primal_eq: 0.0,
            primal_ineq: 0.0,
            dual: 0.0,
            comp_y: 0.0,
            comp_big_y: 0.0,
        }
    }

    #[test]
    fn positive_definite_normalizer() {
        let set = instances::instance_disk_ring(1.0 / 3.0).unwrap();
        let q = SymMatrix::from_rows(&[vec![1.0, 0.3, -0.5], vec![0.3, -2.0, 0.1], vec![-0.5, 0.1, 0.7]]).unwrap();
        let h = SymMatrix::from_diag(&[0.5, 1.0, 2.0]);
        let inst = QcqpInstance::new(q, h, set).unwrap();
        let sol = solve(&inst);
        assert_eq!(sol.status, Status::Optimal);
        assert!(kkt_residuals(&inst, &sol).max() < 1e-7);
    }

    #[test]
    fn deterministic() {
        let inst = example41::instance(5).unwrap();
        assert_eq!(solve(&inst), solve(&inst));
    }
}
