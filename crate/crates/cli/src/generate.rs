//! `generate`: builds an instance file from a named family.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use qcqpx_core::instances::{
    self, convex_combination_map, dummy_pad, example41, family_balls, family_hyperbola, family_parabola,
    instance_disk_ring, instance_hyperbola_fan, instance_parabola_star, instance_strip, instance_strip_single,
    linear_equality, strip_objective, variable_splitting_map,
};
use qcqpx_core::verify::{verify_condition_cprime, verify_condition_d, ConditionReport};
use qcqpx_core::{ConstraintSet, InstanceFile, Mat};

use crate::{parse_list, parse_rows, read_instance, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    DiskRing,
    HyperbolaFan,
    ParabolaStar,
    HyperbolaFamily,
    ParabolaFamily,
    Balls,
    Strip,
    StripSingle,
    ConvexCombine,
    Lift,
    LinearEq,
    Pad,
    Example41,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LiftMap {
    /// `(√λ·I ; √(1−λ)·I)`: both sets act on the same variables.
    Convex,
    /// Each set gets its own copy of the variables; the last coordinate is shared.
    Split,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GenerateArgs {
    /// Radius (disk ring, fan, star).
    #[arg(long)]
    pub r: Option<f64>,
    /// Number of arms (fan, star).
    #[arg(long)]
    pub m: Option<usize>,
    /// Center shift `x,y` (fan).
    #[arg(long)]
    pub p: Option<String>,
    /// Family parameters: `a:r,a:r` for hyperbola and parabola families,
    /// `x,y,z:rho;x,y,z:rho` for balls.
    #[arg(long)]
    pub params: Option<String>,
    /// First input file (convex-combine, lift, pad).
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Second input file (convex-combine, lift).
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Weight in (0, 1) for convex-combine and the lift maps.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub map: Option<LiftMap>,
    /// Lift matrix as JSON rows, file path or inline (overrides --map).
    #[arg(long)]
    pub matrix: Option<String>,
    /// Number of dummy constraints (pad).
    #[arg(long)]
    pub count: Option<usize>,
    /// Equality rows `a11,a12;a21,a22` over the first n−1 variables (linear-eq).
    #[arg(long = "rows")]
    pub eq_rows: Option<String>,
    /// Right-hand side `b1,b2` (linear-eq).
    #[arg(long)]
    pub rhs: Option<String>,
}

pub struct Generated {
    pub file: InstanceFile,
    pub d: ConditionReport,
    pub cprime: ConditionReport,
}

fn need<T: Clone>(v: &Option<T>, flag: &str, family: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::usage(format!("{family} needs --{flag}")))
}

fn pair_params(s: &str) -> CliResult<Vec<(i64, f64)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (a, r) = t
                .split_once(':')
                .ok_or_else(|| CliError::usage(format!("expected a:r, got '{t}'")))?;
            let a = a.trim().parse::<i64>().map_err(|_| CliError::usage(format!("not an integer: '{a}'")))?;
            let r = r.trim().parse::<f64>().map_err(|_| CliError::usage(format!("not a number: '{r}'")))?;
            Ok((a, r))
        })
        .collect()
}

fn ball_params(s: &str) -> CliResult<Vec<(Vec<i64>, f64)>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (c, r) = t
                .split_once(':')
                .ok_or_else(|| CliError::usage(format!("expected x,y,z:rho, got '{t}'")))?;
            let center = c
                .split(',')
                .map(|v| v.trim().parse::<i64>().map_err(|_| CliError::usage(format!("not an integer: '{v}'"))))
                .collect::<CliResult<Vec<i64>>>()?;
            let rho = r.trim().parse::<f64>().map_err(|_| CliError::usage(format!("not a number: '{r}'")))?;
            Ok((center, rho))
        })
        .collect()
}

/// Reads a matrix given as JSON rows, inline or from a file.
pub fn parse_matrix(arg: &str) -> CliResult<Mat> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        let path = PathBuf::from(arg);
        std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?
    };
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("matrix must be JSON rows: {e}")))?;
    Ok(Mat::from_rows(&rows)?)
}

fn input_set(path: &Option<PathBuf>, flag: &str, family: &str) -> CliResult<ConstraintSet> {
    let p = need(path, flag, family)?;
    Ok(read_instance(&p)?.constraint_set()?)
}

pub fn generate(family: Family, args: &GenerateArgs) -> CliResult<Generated> {
    let name = family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let fam = name.as_str();
    let mut params = serde_json::Map::new();
    let mut objectives: Vec<(String, qcqpx_core::SymMatrix)> = Vec::new();
    let mut q = None;
    let set = match family {
        Family::DiskRing => {
            let r = need(&args.r, "r", fam)?;
            params.insert("r".into(), json!(r));
            instance_disk_ring(r)?
        }
        Family::HyperbolaFan => {
            let (m, r) = (need(&args.m, "m", fam)?, need(&args.r, "r", fam)?);
            let p = parse_list(args.p.as_deref().unwrap_or("0,0"))?;
            let p: [f64; 2] = p
                .try_into()
                .map_err(|_| CliError::usage("--p takes two numbers x,y"))?;
            params.insert("m".into(), json!(m));
            params.insert("r".into(), json!(r));
            params.insert("p".into(), json!(p));
            instance_hyperbola_fan(m, r, p)?
        }
        Family::ParabolaStar => {
            let (m, r) = (need(&args.m, "m", fam)?, need(&args.r, "r", fam)?);
            params.insert("m".into(), json!(m));
            params.insert("r".into(), json!(r));
            instance_parabola_star(m, r)?
        }
        Family::HyperbolaFamily | Family::ParabolaFamily => {
            let raw = need(&args.params, "params", fam)?;
            let ps = pair_params(&raw)?;
            params.insert("params".into(), json!(raw));
            if family == Family::HyperbolaFamily {
                family_hyperbola(&ps)?
            } else {
                family_parabola(&ps)?
            }
        }
        Family::Balls => {
            let raw = need(&args.params, "params", fam)?;
            params.insert("params".into(), json!(raw));
            family_balls(&ball_params(&raw)?)?
        }
        Family::Strip | Family::StripSingle => {
            q = Some(strip_objective());
            if family == Family::Strip {
                instance_strip()
            } else {
                instance_strip_single()
            }
        }
        Family::ConvexCombine => {
            let a = input_set(&args.a, "a", fam)?;
            let b = input_set(&args.b, "b", fam)?;
            let lambda = need(&args.lambda, "lambda", fam)?;
            params.insert("lambda".into(), json!(lambda));
            instances::convex_combine(&a, &b, lambda)?
        }
        Family::Lift => {
            let a = input_set(&args.a, "a", fam)?;
            let b = input_set(&args.b, "b", fam)?;
            let l = match (&args.matrix, args.map) {
                (Some(m), _) => parse_matrix(m)?,
                (None, Some(map)) => {
                    let lambda = args.lambda.unwrap_or(0.5);
                    params.insert("lambda".into(), json!(lambda));
                    let (na, nb) = (a.dim().unwrap_or(0), b.dim().unwrap_or(0));
                    if na != nb {
                        return Err(CliError::usage(format!(
                            "--map needs equal dimensions, got {na} and {nb}; pass --matrix instead"
                        )));
                    }
                    match map {
                        LiftMap::Convex => convex_combination_map(na, lambda)?,
                        LiftMap::Split => variable_splitting_map(na, lambda)?,
                    }
                }
                (None, None) => return Err(CliError::usage("lift needs --map or --matrix")),
            };
            params.insert("matrix".into(), json!(l.to_rows()));
            instances::lift(&a, &b, &l)?
        }
        Family::LinearEq => {
            let rows = parse_rows(&need(&args.eq_rows, "rows", fam)?)?;
            let rhs = parse_list(&need(&args.rhs, "rhs", fam)?)?;
            params.insert("rows".into(), json!(rows));
            params.insert("rhs".into(), json!(rhs));
            let c = linear_equality(&Mat::from_rows(&rows)?, &rhs)?;
            ConstraintSet::new(vec![c])?
        }
        Family::Pad => {
            let a = input_set(&args.a, "a", fam)?;
            let count = need(&args.count, "count", fam)?;
            params.insert("count".into(), json!(count));
            dummy_pad(&a, count)?
        }
        Family::Example41 => {
            for (k, qk) in example41::objectives().into_iter().enumerate() {
                objectives.push((format!("q{}", k + 1), qk));
            }
            example41::constraints()
        }
    };
    let n = set
        .dim()
        .ok_or_else(|| CliError::usage("generated set is empty"))?;
    let mut file = InstanceFile::from_parts(n, &instances::last_coordinate(n), q.as_ref(), &set)?
        .with_metadata("generator", fam)
        .with_metadata("parameters", Value::Object(params));
    for (name, qk) in &objectives {
        file = file.with_objective(name.clone(), qk);
    }
    Ok(Generated {
        d: verify_condition_d(&set)?,
        cprime: verify_condition_cprime(&set)?,
        file,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_ring_has_eight_constraints() {
        let g = generate(Family::DiskRing, &GenerateArgs { r: Some(0.5), ..Default::default() }).unwrap();
        assert_eq!(g.file.constraints.len(), 8);
        assert!(g.d.passed);
    }

    #[test]
    fn strip_carries_objective() {
        let g = generate(Family::Strip, &GenerateArgs::default()).unwrap();
        assert_eq!(g.file.constraints.len(), 2);
        assert!(g.file.q.is_some());
        assert!(g.d.passed);
    }

    #[test]
    fn missing_flag_is_usage_error() {
        let e = generate(Family::DiskRing, &GenerateArgs::default()).err().unwrap();
        assert_eq!(e.code, crate::exit::USAGE);
        assert!(e.message.contains("--r"));
    }

    #[test]
    fn family_params_parse() {
        assert_eq!(pair_params("1:0.5, -2:0.25").unwrap(), vec![(1, 0.5), (-2, 0.25)]);
        assert_eq!(ball_params("0,0,1:0.5;1,1,1:0.25").unwrap()[1], (vec![1, 1, 1], 0.25));
        assert!(pair_params("1-0.5").is_err());
    }

    #[test]
    fn linear_equality_from_flags() {
        let args = GenerateArgs {
            eq_rows: Some("1,1".into()),
            rhs: Some("0".into()),
            ..Default::default()
        };
        let g = generate(Family::LinearEq, &args).unwrap();
        assert_eq!(g.file.n, 3);
    }
}
