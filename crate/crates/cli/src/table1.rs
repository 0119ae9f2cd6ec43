//! Reproduction of the six-objective example: solve, extract and compare
//! against the known optimal values and optimal sets.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use qcqpx_core::instances::example41::{self, OPTIMAL_VALUES};
use qcqpx_core::sdp::SolverOptions;

use crate::report::solve_instance;
use crate::{fmt_num, fmt_vec, CliResult};

pub const VALUE_TOL: f64 = 1e-4;
pub const POINT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub k: usize,
    pub status: String,
    pub eta: f64,
    pub expected_eta: f64,
    pub iterations: usize,
    pub rank: usize,
    pub constraint_values: Vec<f64>,
    pub case_path: Option<String>,
    pub u: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// `Bₖ(u)` for each constraint.
    pub margins: Vec<f64>,
    /// Distance to the unique optimum (rows 1 to 3) or residual of the
    /// equality defining the optimal set.
    pub set_residual: Option<f64>,
    pub feasible: bool,
    pub passed: bool,
    pub problems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub passed: bool,
}

pub fn run(opts: &SolverOptions) -> CliResult<Table1Report> {
    let mut rows = Vec::with_capacity(6);
    for k in 1..=6 {
        let inst = example41::instance(k)?;
        let rep = solve_instance(&inst, opts)?;
        let expected = OPTIMAL_VALUES[k - 1];
        let mut problems = Vec::new();
        if rep.status != "optimal" {
            problems.push(format!("status {}", rep.status));
        }
        if !((rep.eta - expected).abs() <= VALUE_TOL) {
            problems.push(format!("eta {} differs from {expected}", rep.eta));
        }
        let ext = rep.extraction.as_ref();
        let u = ext.and_then(|e| e.u.clone());
        let margins: Vec<f64> = match &u {
            Some(u) => inst
                .set
                .constraints()
                .iter()
                .map(|c| c.evaluate(u))
                .collect::<qcqpx_core::Result<_>>()?,
            None => Vec::new(),
        };
        let feasible = ext.and_then(|e| e.feasible).unwrap_or(false);
        if !feasible {
            problems.push("extracted point is missing or infeasible".into());
        }
        let set_residual = u.as_ref().map(|u| example41::optimal_set_residual(k, [u[0], u[1]]));
        if let Some(r) = set_residual {
            if !(r <= POINT_TOL) {
                problems.push(format!("point is {r:.2e} away from the optimal set"));
            }
        }
        if let Some(e) = ext {
            if !((e.objective - expected).abs() <= VALUE_TOL) {
                problems.push(format!("extracted objective {} differs from {expected}", e.objective));
            }
        }
        if let Some(err) = &rep.extraction_error {
            problems.push(format!("extraction: {err}"));
        }
        let case_path = ext.map(|e| e.case_path.clone());
        if k == 6 && case_path.as_deref() != Some("ii_then_i") {
            problems.push(format!("case path {case_path:?}, expected ii_then_i"));
        }
        rows.push(Table1Row {
            k,
            status: rep.status.clone(),
            eta: rep.eta,
            expected_eta: expected,
            iterations: rep.iterations,
            rank: rep.rank,
            constraint_values: rep.constraint_values.clone(),
            objective: ext.map(|e| e.objective),
            case_path,
            u,
            margins,
            set_residual,
            feasible,
            passed: problems.is_empty(),
            problems,
        });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(Table1Report { rows, passed })
}

impl Table1Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>2}  {:>8}  {:>8}  {:>4}  {:>4}  {:<26}  {:<10}  {:<22}  {:<26}  {}",
            "k", "eta", "expected", "iter", "rank", "B•X", "case", "u", "margins B(u)", "ok"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>2}  {:>8}  {:>8}  {:>4}  {:>4}  {:<26}  {:<10}  {:<22}  {:<26}  {}",
                r.k,
                fmt_num(r.eta, 4),
                fmt_num(r.expected_eta, 2),
                r.iterations,
                r.rank,
                fmt_vec(&r.constraint_values, 3),
                r.case_path.as_deref().unwrap_or("-"),
                r.u.as_ref().map_or("-".into(), |u| fmt_vec(u, 5)),
                fmt_vec(&r.margins, 3),
                if r.passed { "yes" } else { "NO" },
            );
            for p in &r.problems {
                let _ = writeln!(s, "    {p}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed { "all rows match" } else { "MISMATCH" });
        s
    }
}
