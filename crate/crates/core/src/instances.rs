//! Named constraint families and the recursive lift that builds higher
//! dimensional sets from lower dimensional ones.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constraints::{conjugate, disk, hyperbola, parabola, rotation, scaling, translation, Constraint};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::symmat::SymMatrix;

/// Margin added on top of the exact eigenvalue bound in [`dummy_pad`].
pub const DUMMY_PAD_MARGIN: f64 = 1e-12;

/// An ordered list of constraints sharing one dimension, with optional
/// positive weights (one per constraint).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<Constraint>) -> Result<Self> {
        if let Some(first) = constraints.first() {
            let n = first.n();
            if let Some(bad) = constraints.iter().find(|c| c.n() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bad.n(),
                });
            }
        }
        Ok(Self {
            constraints,
            alphas: None,
            notes: Vec::new(),
        })
    }

    pub fn with_alphas(constraints: Vec<Constraint>, alphas: Vec<f64>) -> Result<Self> {
        let mut set = Self::new(constraints)?;
        set.set_alphas(Some(alphas))?;
        Ok(set)
    }

    pub fn set_alphas(&mut self, alphas: Option<Vec<f64>>) -> Result<()> {
        if let Some(a) = &alphas {
            if a.len() != self.constraints.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.constraints.len(),
                    found: a.len(),
                });
            }
            if let Some(bad) = a.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("alphas must be positive, got {bad}")));
            }
        }
        self.alphas = alphas;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Matrix dimension, or `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.constraints.first().map(Constraint::n)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn alphas(&self) -> Option<&[f64]> {
        self.alphas.as_deref()
    }

    /// Weight of constraint `k`, defaulting to 1.
    pub fn alpha(&self, k: usize) -> f64 {
        self.alphas.as_ref().map_or(1.0, |a| a[k])
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn add_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn matrices(&self) -> impl Iterator<Item = &SymMatrix> {
        self.constraints.iter().map(|c| &c.matrix)
    }

    /// Constraints with their weights multiplied in; the result has no alphas.
    pub fn absorb_alphas(&self) -> ConstraintSet {
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(k, c)| c.scaled(self.alpha(k)))
            .collect();
        ConstraintSet {
            constraints,
            alphas: None,
            notes: self.notes.clone(),
        }
    }

    fn ones(constraints: Vec<Constraint>) -> Result<Self> {
        let m = constraints.len();
        Self::with_alphas(constraints, vec![1.0; m])
    }
}

/// `min Q•X` over rank-1 `X = xxᵀ` with `H•X = 1` and every constraint `≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcqpInstance {
    pub n: usize,
    pub q: SymMatrix,
    pub h: SymMatrix,
    pub set: ConstraintSet,
}

impl QcqpInstance {
    pub fn new(q: SymMatrix, h: SymMatrix, set: ConstraintSet) -> Result<Self> {
        let n = h.n();
        q.check_dim(&h)?;
        if let Some(d) = set.dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, found: d });
            }
        }
        Ok(Self { n, q, h, set })
    }

    /// Uses `H = diag(0,…,0,1)`, which pins the homogenizing coordinate.
    pub fn homogeneous(q: SymMatrix, set: ConstraintSet) -> Result<Self> {
        let h = last_coordinate(q.n());
        Self::new(q, h, set)
    }

    pub fn with_objective(&self, q: SymMatrix) -> Result<Self> {
        Self::new(q, self.h.clone(), self.set.clone())
    }

    /// True when `H = diag(0,…,0,1)` exactly.
    pub fn has_homogeneous_h(&self) -> bool {
        self.h == last_coordinate(self.n)
    }
}

/// `diag(0,…,0,1)` in dimension `n`.
pub fn last_coordinate(n: usize) -> SymMatrix {
    let mut h = SymMatrix::zeros(n);
    if n > 0 {
        h.set(n - 1, n - 1, 1.0);
    }
    h
}

fn sym3(rows: [[f64; 3]; 3]) -> SymMatrix {
    SymMatrix::from_fn(3, |i, j| rows[i][j])
}

/// Six unit-distance disks of radius `r` around a central disk, enclosed by a
/// circle of radius 3/2.
pub fn instance_disk_ring(r: f64) -> Result<ConstraintSet> {
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::InvalidParameter(format!("disk ring radius must lie in (0, 1/2], got {r}")));
    }
    let base = disk(r)?;
    let mut cs = Vec::with_capacity(8);
    for k in 0..6 {
        let m = translation([1.0, 0.0]).then(&rotation(k as f64 * PI / 3.0));
        cs.push(conjugate(&base, &m)?.with_label(format!("B{k}")));
    }
    cs.push(base.with_label("B6"));
    cs.push(disk(1.5)?.scaled(-1.0).with_label("B7"));
    ConstraintSet::with_alphas(cs, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / 3.0])
}

/// `m` hyperbolas rotated by multiples of `π/m` and a disk, all moved by `p`.
pub fn instance_hyperbola_fan(m: usize, r: f64, p: [f64; 2]) -> Result<ConstraintSet> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("hyperbola fan needs m >= 2, got {m}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("hyperbola fan needs r > 0, got {r}")));
    }
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let base = hyperbola(r)?;
    let squeeze = scaling([1.0, (PI / (2.0 * m as f64)).tan()])?;
    let shift = translation(p);
    let mut cs = Vec::with_capacity(m + 1);
    for k in 0..m {
        let t = squeeze.then(&rotation(k as f64 * PI / m as f64)).then(&shift);
        cs.push(conjugate(&base, &t)?.with_label(format!("B{k}")));
    }
    cs.push(conjugate(&disk(r)?, &shift)?.with_label(format!("B{m}")));
    ConstraintSet::ones(cs)
}

/// `m` parabolas opening outward in a star pattern around a central disk.
pub fn instance_parabola_star(m: usize, r: f64) -> Result<ConstraintSet> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("parabola star needs m >= 3, got {m}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("parabola star needs r > 0, got {r}")));
    }
    let base = parabola(r)?;
    let squeeze = scaling([1.0, 2.0 * (PI / m as f64).tan() * r.sqrt()])?;
    let mut cs = Vec::with_capacity(m + 1);
    for k in 0..m {
        let t = squeeze.then(&rotation(2.0 * k as f64 * PI / m as f64));
        cs.push(conjugate(&base, &t)?.with_label(format!("C{k}")));
    }
    cs.push(disk(r)?.with_label(format!("C{m}")));
    let mut alphas = vec![1.0; m];
    alphas.push(1.0 / (2.0 * r));
    ConstraintSet::with_alphas(cs, alphas)
}

fn check_distinct<T: PartialEq + std::fmt::Debug>(keys: &[T]) -> Result<()> {
    for (i, a) in keys.iter().enumerate() {
        if keys[..i].contains(a) {
            return Err(Error::DuplicateParameter(format!("{a:?}")));
        }
    }
    Ok(())
}

/// `(u₂ − a·u₁)² − u₁²/4 + r² ≥ 0` for each `(a, r)`.
pub fn family_hyperbola(params: &[(i64, f64)]) -> Result<ConstraintSet> {
    check_distinct(&params.iter().map(|p| p.0).collect::<Vec<_>>())?;
    let mut cs = Vec::with_capacity(params.len());
    for &(a, r) in params {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("hyperbola family needs r >= 0, got {r}")));
        }
        let a = a as f64;
        cs.push(Constraint::new(
            format!("B({a},{r})"),
            sym3([[a * a - 0.25, -a, 0.0], [-a, 1.0, 0.0], [0.0, 0.0, r * r]]),
        ));
    }
    ConstraintSet::ones(cs)
}

/// `(a·u₁ − u₂)² − u₁ + r ≥ 0` for each `(a, r)`.
pub fn family_parabola(params: &[(i64, f64)]) -> Result<ConstraintSet> {
    check_distinct(&params.iter().map(|p| p.0).collect::<Vec<_>>())?;
    let mut cs = Vec::with_capacity(params.len());
    for &(a, r) in params {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("parabola family needs r >= 1, got {r}")));
        }
        let a = a as f64;
        cs.push(Constraint::new(
            format!("B({a},{r})"),
            sym3([[a * a, -a, -0.5], [-a, 1.0, 0.0], [-0.5, 0.0, r]]),
        ));
    }
    ConstraintSet::ones(cs)
}

/// Excluded balls of radius `ρ ∈ (0, 1/2]` around distinct integer centers.
pub fn family_balls(params: &[(Vec<i64>, f64)]) -> Result<ConstraintSet> {
    check_distinct(&params.iter().map(|p| p.0.clone()).collect::<Vec<_>>())?;
    let dim = params.first().map_or(0, |p| p.0.len());
    let mut cs = Vec::with_capacity(params.len());
    for (center, rho) in params {
        if center.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: center.len(),
            });
        }
        if !(*rho > 0.0 && *rho <= 0.5) {
            return Err(Error::InvalidParameter(format!("ball radius must lie in (0, 1/2], got {rho}")));
        }
        let a: Vec<f64> = center.iter().map(|&v| v as f64).collect();
        let aa: f64 = a.iter().map(|v| v * v).sum();
        let n = dim + 1;
        let m = SymMatrix::from_fn(n, |i, j| match (i == dim, j == dim) {
            (false, false) => f64::from(u8::from(i == j)),
            (true, false) => -a[j],
            (false, true) => -a[i],
            (true, true) => aa - rho * rho,
        });
        cs.push(Constraint::new(format!("ball({center:?},{rho})"), m));
    }
    ConstraintSet::ones(cs)
}

/// `Aᵏ = λ·α_Bᵏ·Bᵏ + (1−λ)·α_Cᵏ·Cᵏ`, pairing constraints by position.
pub fn convex_combine(set_b: &ConstraintSet, set_c: &ConstraintSet, lambda: f64) -> Result<ConstraintSet> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if set_b.len() != set_c.len() {
        return Err(Error::CardinalityMismatch {
            left: set_b.len(),
            right: set_c.len(),
        });
    }
    if let (Some(db), Some(dc)) = (set_b.dim(), set_c.dim()) {
        if db != dc {
            return Err(Error::DimensionMismatch { expected: db, found: dc });
        }
    }
    let mut cs = Vec::with_capacity(set_b.len());
    for (k, (b, c)) in set_b.constraints().iter().zip(set_c.constraints()).enumerate() {
        let m = b
            .matrix
            .scale(lambda * set_b.alpha(k))
            .axpy((1.0 - lambda) * set_c.alpha(k), &c.matrix);
        cs.push(Constraint::new(format!("A{k}"), m));
    }
    let mut out = ConstraintSet::ones(cs)?;
    for (name, s) in [("first", set_b), ("second", set_c)] {
        if s.alphas().is_none() {
            out.add_note(format!("{name} set carried no alphas; all-ones weights were used"));
        }
    }
    Ok(out)
}

/// The strip `−2 ≤ u₁ + u₂ ≤ 2` as two linear constraints.
pub fn instance_strip() -> ConstraintSet {
    let cs = vec![
        Constraint::new("B2", sym3([[0.0, 0.0, 0.5], [0.0, 0.0, 0.5], [0.5, 0.5, 2.0]])),
        Constraint::new("B3", sym3([[0.0, 0.0, -0.5], [0.0, 0.0, -0.5], [-0.5, -0.5, 2.0]])),
    ];
    ConstraintSet::ones(cs).expect("static set")
}

/// The same strip as the single quadratic `4 − (u₁ + u₂)² ≥ 0`.
pub fn instance_strip_single() -> ConstraintSet {
    let cs = vec![Constraint::new(
        "B4",
        sym3([[-1.0, -1.0, 0.0], [-1.0, -1.0, 0.0], [0.0, 0.0, 4.0]]),
    )];
    ConstraintSet::ones(cs).expect("static set")
}

/// Objective `−(u₁ + u₂)²` that is unbounded over the relaxation of the
/// two-constraint strip.
pub fn strip_objective() -> SymMatrix {
    sym3([[-1.0, -1.0, 0.0], [-1.0, -1.0, 0.0], [0.0, 0.0, 0.0]])
}

/// Appends `count` copies of `λI`, with `λ` just large enough that every
/// weighted member plus `λI` is PSD. Dummies get weight 1.
pub fn dummy_pad(set: &ConstraintSet, count: usize) -> Result<ConstraintSet> {
    if count == 0 {
        return Err(Error::InvalidParameter("dummy_pad count must be >= 1".into()));
    }
    let n = set
        .dim()
        .ok_or_else(|| Error::InvalidParameter("cannot pad an empty set of unknown dimension".into()))?;
    let mut worst = 0.0f64;
    for (k, m) in set.matrices().enumerate() {
        worst = worst.max(-(m.scale(set.alpha(k)).min_eigenvalue()?));
    }
    let lambda = if worst > 0.0 { worst + DUMMY_PAD_MARGIN } else { 0.0 };
    let mut cs = set.constraints().to_vec();
    let mut alphas: Vec<f64> = (0..set.len()).map(|k| set.alpha(k)).collect();
    for i in 0..count {
        cs.push(Constraint::new(
            format!("dummy{i}"),
            SymMatrix::identity(n).scale(lambda),
        ));
        alphas.push(1.0);
    }
    let mut out = ConstraintSet::with_alphas(cs, alphas)?;
    for note in set.notes() {
        out.add_note(note.clone());
    }
    Ok(out)
}

/// Scalar (1×1) constraint set `{σ₁, …}`.
pub fn scalar_set(values: &[f64]) -> Result<ConstraintSet> {
    let cs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.is_finite() {
                Ok(Constraint::new(format!("sigma{}", i + 1), SymMatrix::from_diag(&[v])))
            } else {
                Err(Error::NonFinite)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ConstraintSet::ones(cs)
}

/// `Lᵀ·blockdiag(α_Bⁱ·Bⁱ, α_Cⁱ·Cⁱ)·L` for each `i`.
pub fn lift(set_b: &ConstraintSet, set_c: &ConstraintSet, l: &Mat) -> Result<ConstraintSet> {
    if set_b.len() != set_c.len() {
        return Err(Error::CardinalityMismatch {
            left: set_b.len(),
            right: set_c.len(),
        });
    }
    let (Some(nb), Some(nc)) = (set_b.dim(), set_c.dim()) else {
        return ConstraintSet::ones(Vec::new());
    };
    if l.rows() != nb + nc {
        return Err(Error::DimensionMismatch {
            expected: nb + nc,
            found: l.rows(),
        });
    }
    let b = set_b.absorb_alphas();
    let c = set_c.absorb_alphas();
    let cs = b
        .constraints()
        .iter()
        .zip(c.constraints())
        .enumerate()
        .map(|(i, (bi, ci))| {
            Ok(Constraint::new(format!("L{i}"), bi.matrix.block_diag(&ci.matrix).congruence(l)?))
        })
        .collect::<Result<Vec<_>>>()?;
    ConstraintSet::ones(cs)
}

fn check_weights(lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    Ok((lambda.sqrt(), (1.0 - lambda).sqrt()))
}

/// `(√λ·I_k ; √μ·I_k)`, a `2k×k` map that turns a lift into a convex
/// combination of two `k`-dimensional sets (`μ = 1 − λ`).
pub fn convex_combination_map(k: usize, lambda: f64) -> Result<Mat> {
    let (sl, sm) = check_weights(lambda)?;
    Ok(Mat::from_fn(2 * k, k, |i, j| {
        if i == j {
            sl
        } else if i == j + k {
            sm
        } else {
            0.0
        }
    }))
}

/// A `2k×(2k−1)` map sending `(u¹, u², z)` to `(√λ(u¹; z), √μ(u²; z))`, so each
/// block acts on its own copy of the variables and they share the
/// homogenizing coordinate.
pub fn variable_splitting_map(k: usize, lambda: f64) -> Result<Mat> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("block size must be >= 2, got {k}")));
    }
    let (sl, sm) = check_weights(lambda)?;
    let free = k - 1;
    let z = 2 * free;
    Ok(Mat::from_fn(2 * k, 2 * free + 1, |i, j| {
        if i < free {
            if j == i { sl } else { 0.0 }
        } else if i == free {
            if j == z { sl } else { 0.0 }
        } else if i < k + free {
            if j == i - 1 { sm } else { 0.0 }
        } else if j == z {
            sm
        } else {
            0.0
        }
    }))
}

/// `−(A, −b)ᵀ(A, −b)` for the rows of `Au = b`; feasible exactly on the
/// affine solution set.
pub fn linear_equality(a: &Mat, b: &[f64]) -> Result<Constraint> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let n = a.cols() + 1;
    let ab = Mat::from_fn(a.rows(), n, |i, j| if j < a.cols() { a[(i, j)] } else { -b[i] });
    let g = ab.t_matmul(&ab);
    Ok(Constraint::new("linear_eq", SymMatrix::from_dense(&g)?.neg()))
}

pub mod example41 {
    //! Three constraints in the plane and six objectives with known optima.

    use super::*;

    pub const OPTIMAL_VALUES: [f64; 6] = [0.0, 4.0, -2.0, 0.0, 0.0, 0.0];

    /// Unique optimal points for the first three objectives.
    pub const UNIQUE_OPTIMA: [[f64; 2]; 3] = [[2.0, 1.0], [-1.0, 0.0], [-1.0, 0.0]];

    pub fn constraints() -> ConstraintSet {
        ConstraintSet::new(vec![
            Constraint::new("B1", sym3([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 2.0]])),
            Constraint::new("B2", sym3([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 4.0]])),
            Constraint::new("B3", sym3([[1.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])),
        ])
        .expect("static set")
    }

    pub fn objectives() -> [SymMatrix; 6] {
        [
            sym3([[1.0, 0.0, -2.0], [0.0, 1.0, -1.0], [-2.0, -1.0, 5.0]]),
            sym3([[1.0, 0.0, 3.0], [0.0, 1.0, 0.0], [3.0, 0.0, 9.0]]),
            sym3([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
            SymMatrix::zeros(3),
            sym3([[1.0, 4.0, -4.0], [4.0, 16.0, -16.0], [-4.0, -16.0, 16.0]]),
            sym3([[1.0, 0.0, -3.0], [0.0, 0.0, 0.0], [-3.0, 0.0, 9.0]]),
        ]
    }

    /// Row `k ∈ 1..=6`.
    pub fn instance(k: usize) -> Result<QcqpInstance> {
        if !(1..=6).contains(&k) {
            return Err(Error::InvalidParameter(format!("objective index must be in 1..=6, got {k}")));
        }
        let q = objectives()[k - 1].clone();
        QcqpInstance::homogeneous(q, constraints())
    }

    /// Residual of the equality that describes the optimal set of row `k`,
    /// or the distance to the unique optimum for rows 1 to 3.
    pub fn optimal_set_residual(k: usize, u: [f64; 2]) -> f64 {
        match k {
            1..=3 => {
                let t = UNIQUE_OPTIMA[k - 1];
                ((u[0] - t[0]).powi(2) + (u[1] - t[1]).powi(2)).sqrt()
            }
            4 => 0.0,
            5 => (u[0] + 4.0 * u[1] - 4.0).abs(),
            6 => (u[0] - 3.0).abs(),
            _ => f64::INFINITY,
        }
    }
}
