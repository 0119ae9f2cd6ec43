//! `solve` and `verify` reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use qcqpx_core::constraints::is_feasible;
use qcqpx_core::extract::extract;
use qcqpx_core::sdp::{active_set, solve_relaxation, KktResiduals, SolverOptions, Status};
use qcqpx_core::verify::{
    bounded_region_box, falsify_condition_bprime, verify_condition_cprime, verify_condition_d,
    verify_condition_dprime, BoundingBox, Condition, ConditionReport,
};
use qcqpx_core::{ConstraintSet, ExtractionResult, QcqpInstance};

use crate::{exit, fmt_num, fmt_vec, CliResult};

pub const SOLVE_REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionSummary {
    /// Absent when `H` is not `diag(0,…,0,1)`.
    pub u: Option<Vec<f64>>,
    pub x: Vec<f64>,
    pub tau: f64,
    pub case_path: String,
    pub objective: f64,
    pub split_count: usize,
    pub rank: usize,
    /// `min_k Bₖ•X̃`
    pub min_constraint_value: f64,
    /// `u` passes the absolute point feasibility test.
    pub feasible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub report_version: u32,
    pub n: usize,
    pub m: usize,
    pub status: String,
    /// `Q•X̄`
    pub eta: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub residuals: KktResiduals,
    pub rank: usize,
    pub constraint_values: Vec<f64>,
    pub active_set: Vec<usize>,
    pub extraction: Option<ExtractionSummary>,
    pub extraction_error: Option<String>,
}

impl SolveReport {
    pub fn exit_code(&self) -> i32 {
        match self.status.as_str() {
            "optimal" if self.extraction.is_some() => exit::OK,
            "optimal" => exit::CHECK_FAILED,
            "unbounded" => exit::UNBOUNDED,
            "infeasible" => exit::INFEASIBLE,
            _ => exit::MAX_ITER,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "status      {}", self.status);
        let _ = writeln!(s, "eta         {}", fmt_num(self.eta, 6));
        let _ = writeln!(s, "dual        {}", fmt_num(self.dual_objective, 6));
        let _ = writeln!(s, "iterations  {}", self.iterations);
        let r = &self.residuals;
        let _ = writeln!(
            s,
            "residuals   primal_eq {:.1e}  primal_ineq {:.1e}  dual {:.1e}  comp_y {:.1e}  comp_Y {:.1e}",
            r.primal_eq, r.primal_ineq, r.dual, r.comp_y, r.comp_big_y
        );
        let _ = writeln!(s, "rank        {}", self.rank);
        let _ = writeln!(s, "B•X         {}", fmt_vec(&self.constraint_values, 4));
        let _ = writeln!(s, "active      {:?}", self.active_set);
        match (&self.extraction, &self.extraction_error) {
            (Some(e), _) => {
                let _ = writeln!(s, "case        {}", e.case_path);
                if let Some(u) = &e.u {
                    let _ = writeln!(s, "u           {}", fmt_vec(u, 6));
                }
                let _ = writeln!(s, "tau         {}", fmt_num(e.tau, 6));
                let _ = writeln!(s, "objective   {}", fmt_num(e.objective, 6));
                let _ = writeln!(s, "splits      {}", e.split_count);
                let _ = writeln!(s, "min B•X~    {:.3e}", e.min_constraint_value);
            }
            (None, Some(err)) => {
                let _ = writeln!(s, "extraction  failed: {err}");
            }
            (None, None) => {}
        }
        s
    }
}

fn summarize(inst: &QcqpInstance, r: &ExtractionResult) -> CliResult<ExtractionSummary> {
    let min_val = inst
        .set
        .matrices()
        .map(|b| b.inner(&r.x_tilde))
        .collect::<qcqpx_core::Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let feasible = match &r.u {
        Some(u) => Some(is_feasible(&inst.set, u)?),
        None => None,
    };
    Ok(ExtractionSummary {
        u: r.u.clone(),
        x: r.x.clone(),
        tau: r.tau,
        case_path: r.case_path.as_str().to_string(),
        objective: r.objective,
        split_count: r.split_count,
        rank: r.rank,
        min_constraint_value: if min_val.is_finite() { min_val } else { 0.0 },
        feasible,
    })
}

pub fn solve_instance(inst: &QcqpInstance, opts: &SolverOptions) -> CliResult<SolveReport> {
    let sol = solve_relaxation(inst, opts)?;
    let constraint_values = inst
        .set
        .matrices()
        .map(|b| b.inner(&sol.x))
        .collect::<qcqpx_core::Result<Vec<f64>>>()?;
    let rank = sol.x.numerical_rank(qcqpx_core::symmat::DEFAULT_RANK_TOL)?;
    let (extraction, extraction_error) = if sol.status == Status::Optimal {
        match extract(inst, &sol) {
            Ok(r) => (Some(summarize(inst, &r)?), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let active_set = active_set(inst, &sol, qcqpx_core::extract::DEFAULT_ACT_TOL);
    Ok(SolveReport {
        report_version: SOLVE_REPORT_VERSION,
        n: inst.n,
        m: inst.set.len(),
        status: sol.status.as_str().to_string(),
        eta: sol.objective,
        dual_objective: sol.dual_objective,
        iterations: sol.iterations,
        residuals: sol.residuals,
        rank,
        active_set,
        constraint_values,
        extraction,
        extraction_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub angle_grid: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 20_000,
            seed: 0,
            angle_grid: qcqpx_core::verify::DEFAULT_ANGLE_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub reports: Vec<ConditionReport>,
    /// Search box used by the sampling falsifier.
    pub bbox: Option<BoundingBox>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn to_text(&self, labels: &[String]) -> String {
        let mut s = String::new();
        for r in &self.reports {
            let verdict = match (r.passed, r.condition.is_decisive()) {
                (true, true) => "pass",
                (true, false) => "no counterexample",
                (false, _) => "fail",
            };
            let _ = writeln!(s, "{:<17} {verdict}  (margin {:.3e})", r.condition.name(), r.min_margin);
            for w in r.witnesses.iter().take(5) {
                let names: Vec<&str> = w.indices.iter().map(|&i| labels.get(i).map_or("?", String::as_str)).collect();
                let at = w.point.as_ref().map(|p| format!(" at {}", fmt_vec(p, 4))).unwrap_or_default();
                let _ = writeln!(s, "    witness {names:?} value {:.3e}{at}", w.value);
            }
        }
        s
    }
}

/// Box for the falsifier: the given one, else a padded box around a bounded
/// feasible region, else `[−10, 10]ⁿ⁻¹`.
pub fn default_bbox(set: &ConstraintSet) -> CliResult<Option<BoundingBox>> {
    let Some(n) = set.dim() else {
        return Ok(None);
    };
    if n < 2 {
        return Ok(None);
    }
    Ok(Some(match bounded_region_box(set)? {
        Some(b) => b.expanded(0.1),
        None => BoundingBox::new(vec![-10.0; n - 1], vec![10.0; n - 1])?,
    }))
}

pub fn verify_set(
    set: &ConstraintSet,
    conditions: &[Condition],
    bbox: Option<BoundingBox>,
    opts: &VerifyOptions,
) -> CliResult<VerifyReport> {
    let bbox = match bbox {
        Some(b) => Some(b),
        None => default_bbox(set)?,
    };
    let mut reports = Vec::new();
    for c in conditions {
        let r = match c {
            Condition::D => verify_condition_d(set)?,
            Condition::Dprime => verify_condition_dprime(set, opts.angle_grid)?,
            Condition::Cprime => verify_condition_cprime(set)?,
            Condition::BprimeFalsifier => match &bbox {
                Some(b) => falsify_condition_bprime(set, b, opts.samples, opts.seed)?,
                None => continue,
            },
        };
        reports.push(r);
    }
    Ok(VerifyReport { reports, bbox })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcqpx_core::instances::{example41, instance_disk_ring, instance_strip, strip_objective};

    #[test]
    fn first_row_report() {
        let rep = solve_instance(&example41::instance(1).unwrap(), &SolverOptions::default()).unwrap();
        assert_eq!(rep.status, "optimal");
        assert_eq!(rep.exit_code(), exit::OK);
        let e = rep.extraction.as_ref().unwrap();
        assert_eq!(e.case_path, "ii");
        let u = e.u.as_ref().unwrap();
        assert!((u[0] - 2.0).abs() < 1e-3 && (u[1] - 1.0).abs() < 1e-3);
        assert!(rep.to_text().contains("case        ii"));
    }

    #[test]
    fn strip_is_unbounded() {
        let inst = QcqpInstance::homogeneous(strip_objective(), instance_strip()).unwrap();
        let rep = solve_instance(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(rep.exit_code(), exit::UNBOUNDED);
        assert!(rep.extraction.is_none());
    }

    #[test]
    fn ring_verifies() {
        let all = [Condition::D, Condition::Dprime, Condition::Cprime, Condition::BprimeFalsifier];
        let set = instance_disk_ring(0.5).unwrap();
        let rep = verify_set(&set, &all, None, &VerifyOptions { samples: 2000, ..Default::default() }).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.reports.len(), 4);
    }
}
