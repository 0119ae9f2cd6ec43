//! Basic quadratic constraints in two variables and the affine maps used to
//! place them.
//!
//! A constraint matrix `B ∈ 𝕊³` describes the region
//! `{u ∈ ℝ² : (u;1)ᵀ B (u;1) ≥ 0}`; the complement `B≤` is the restricted
//! zone. Transforms act by congruence `MᵀBM`, so a chain applied in the order
//! `M₁, M₂, …` equals a single conjugation by `M₁M₂…`. Changing the order of
//! the chain changes the resulting constraint in general.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::ConstraintSet;
use crate::linalg::Mat;
use crate::symmat::SymMatrix;

/// Absolute outward tolerance used by [`is_feasible`].
pub const DEFAULT_FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub matrix: SymMatrix,
}

impl Constraint {
    pub fn new(label: impl Into<String>, matrix: SymMatrix) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn scaled(&self, s: f64) -> Constraint {
        Constraint::new(self.label.clone(), self.matrix.scale(s))
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<f64> {
        evaluate(self, u)
    }
}

fn sym3(rows: [[f64; 3]; 3]) -> SymMatrix {
    SymMatrix::from_fn(3, |i, j| rows[i][j])
}

/// `E^d(r)`: the restricted zone is the closed disk of radius `r` at the origin.
pub fn disk(r: f64) -> Result<Constraint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("disk radius must be > 0, got {r}")));
    }
    Ok(Constraint::new(
        format!("disk({r})"),
        sym3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -r * r]]),
    ))
}

/// `E^h(r)`: feasible where `−u₁² + u₂² + r² ≥ 0`.
pub fn hyperbola(r: f64) -> Result<Constraint> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("hyperbola parameter must be >= 0, got {r}")));
    }
    Ok(Constraint::new(
        format!("hyperbola({r})"),
        sym3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, r * r]]),
    ))
}

/// `E^p(r)`: feasible where `−u₁ + u₂² + r ≥ 0`.
pub fn parabola(r: f64) -> Result<Constraint> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("parabola parameter must be >= 0, got {r}")));
    }
    Ok(Constraint::new(
        format!("parabola({r})"),
        sym3([[0.0, 0.0, -0.5], [0.0, 1.0, 0.0], [-0.5, 0.0, r]]),
    ))
}

/// `E^ℓ(r)`: feasible where `u₁ − r ≥ 0`.
pub fn line(r: f64) -> Result<Constraint> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("line offset must be finite, got {r}")));
    }
    Ok(Constraint::new(
        format!("line({r})"),
        sym3([[0.0, 0.0, 0.5], [0.0, 0.0, 0.0], [0.5, 0.0, -r]]),
    ))
}

/// A nonsingular 3×3 matrix acting on homogeneous points `(v;1) ↦ M(v;1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform3 {
    matrix: Mat,
}

impl Transform3 {
    pub fn new(matrix: Mat) -> Result<Self> {
        if matrix.rows() != 3 || matrix.cols() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: matrix.rows().max(matrix.cols()),
            });
        }
        if !(matrix.det().abs() > 1e-12) {
            return Err(Error::Singular);
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self {
            matrix: Mat::identity(3),
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// The transform equivalent to conjugating by `self` and then by `next`.
    pub fn then(&self, next: &Transform3) -> Transform3 {
        Transform3 {
            matrix: self.matrix.matmul(&next.matrix),
        }
    }

    pub fn inverse(&self) -> Transform3 {
        Transform3 {
            matrix: self.matrix.inverse().expect("Transform3 is nonsingular"),
        }
    }

    /// Maps a point `v` to `u` with `(u;1) ∝ M(v;1)`.
    ///
    /// Returns `None` when the homogeneous coordinate vanishes.
    pub fn map_point(&self, v: [f64; 2]) -> Option<[f64; 2]> {
        let h = self.matrix.mul_vec(&[v[0], v[1], 1.0]);
        if h[2].abs() < 1e-300 {
            None
        } else {
            Some([h[0] / h[2], h[1] / h[2]])
        }
    }
}

/// `S(s) = diag(1/s₁, 1/s₂, 1)`; moves `u` to `v = (s₁u₁, s₂u₂)`.
pub fn scaling(s: [f64; 2]) -> Result<Transform3> {
    if !(s[0] > 0.0 && s[1] > 0.0) || !s.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scaling factors must be positive, got ({}, {})",
            s[0], s[1]
        )));
    }
    Transform3::new(Mat::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => 1.0 / s[0],
        (1, 1) => 1.0 / s[1],
        (2, 2) => 1.0,
        _ => 0.0,
    }))
}

/// `R(θ)`; rotates `u` counter-clockwise by `θ`.
pub fn rotation(theta: f64) -> Transform3 {
    let (s, c) = theta.sin_cos();
    Transform3 {
        matrix: Mat::from_rows(&[vec![c, s, 0.0], vec![-s, c, 0.0], vec![0.0, 0.0, 1.0]])
            .expect("finite"),
    }
}

/// `P(p)`; moves `u` to `v = u + p`.
pub fn translation(p: [f64; 2]) -> Transform3 {
    Transform3 {
        matrix: Mat::from_rows(&[
            vec![1.0, 0.0, -p[0]],
            vec![0.0, 1.0, -p[1]],
            vec![0.0, 0.0, 1.0],
        ])
        .expect("finite"),
    }
}

/// `MᵀBM`, re-symmetrized.
pub fn conjugate(b: &Constraint, m: &Transform3) -> Result<Constraint> {
    if b.n() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: b.n(),
        });
    }
    Ok(Constraint::new(b.label.clone(), b.matrix.congruence(&m.matrix)?))
}

/// `(u;1)ᵀ B (u;1)`.
pub fn evaluate(b: &Constraint, u: &[f64]) -> Result<f64> {
    eval_homogeneous(&b.matrix, u)
}

pub(crate) fn eval_homogeneous(m: &SymMatrix, u: &[f64]) -> Result<f64> {
    let n = m.n();
    if u.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            found: u.len(),
        });
    }
    let mut x = u.to_vec();
    x.push(1.0);
    Ok(m.quad_form(&x))
}

/// True iff every constraint evaluates to at least `−feas_tol` at `u`.
pub fn is_feasible(set: &ConstraintSet, u: &[f64]) -> Result<bool> {
    is_feasible_tol(set, u, DEFAULT_FEAS_TOL)
}

pub fn is_feasible_tol(set: &ConstraintSet, u: &[f64], feas_tol: f64) -> Result<bool> {
    for c in set.constraints() {
        if evaluate(c, u)? < -feas_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ev(c: &Constraint, u: [f64; 2]) -> f64 {
        evaluate(c, &u).unwrap()
    }

    #[test]
    fn basic_matrices_match_displayed_entries() {
        assert_eq!(
            disk(2.0).unwrap().matrix.to_rows(),
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, -4.0]]
        );
        assert_eq!(
            hyperbola(3.0).unwrap().matrix.to_rows(),
            vec![vec![-1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 9.0]]
        );
        assert_eq!(
            parabola(2.0).unwrap().matrix.to_rows(),
            vec![vec![0.0, 0.0, -0.5], vec![0.0, 1.0, 0.0], vec![-0.5, 0.0, 2.0]]
        );
        assert_eq!(
            line(1.5).unwrap().matrix.to_rows(),
            vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.0], vec![0.5, 0.0, -1.5]]
        );
    }

    #[test]
    fn disk_values() {
        assert_eq!(ev(&disk(1.0).unwrap(), [0.0, 0.0]), -1.0);
        assert_eq!(ev(&disk(2.0).unwrap(), [2.0, 0.0]), 0.0);
        assert!(disk(0.0).is_err());
        assert!(disk(-1.0).is_err());
    }

    #[test]
    fn hyperbola_values() {
        assert_eq!(ev(&hyperbola(1.0).unwrap(), [0.0, 0.0]), 1.0);
        assert_eq!(ev(&hyperbola(0.0).unwrap(), [1.0, 1.0]), 0.0);
        assert_eq!(ev(&hyperbola(1.0).unwrap(), [2.0, 0.0]), -3.0);
        assert!(hyperbola(-0.1).is_err());
    }

    #[test]
    fn parabola_values() {
        assert_eq!(ev(&parabola(1.0).unwrap(), [0.0, 0.0]), 1.0);
        assert_eq!(ev(&parabola(2.0).unwrap(), [2.0, 0.0]), 0.0);
        assert_eq!(ev(&parabola(1.0).unwrap(), [3.0, 1.0]), -1.0);
        assert!(parabola(-1.0).is_err());
    }

    #[test]
    fn line_values() {
        assert_eq!(ev(&line(0.0).unwrap(), [1.0, 0.0]), 1.0);
        assert_eq!(ev(&line(1.0).unwrap(), [1.0, 5.0]), 0.0);
        assert_eq!(ev(&line(1.0).unwrap(), [0.0, 0.0]), -1.0);
    }

    #[test]
    fn identity_transforms() {
        assert_eq!(scaling([1.0, 1.0]).unwrap(), Transform3::identity());
        assert_eq!(rotation(0.0), Transform3::identity());
        assert_eq!(translation([0.0, 0.0]), Transform3::identity());
        let r = rotation(2.0 * PI);
        assert!(r.matrix().sub(&Mat::identity(3)).max_abs() < 1e-12);
        assert!(scaling([0.0, 1.0]).is_err());
        assert!(scaling([1.0, -2.0]).is_err());
    }

    #[test]
    fn scaling_moves_boundary() {
        let c = conjugate(&disk(1.0).unwrap(), &scaling([2.0, 3.0]).unwrap()).unwrap();
        assert!(ev(&c, [2.0, 0.0]).abs() < 1e-15);
        assert!(ev(&c, [0.0, 3.0]).abs() < 1e-15);
    }

    #[test]
    fn translated_disk_is_centered_at_p() {
        // Pᵀ E^d(r) P expands to (u₁−1)² + u₂² − r².
        let r = 0.5;
        let c = conjugate(&disk(r).unwrap(), &translation([1.0, 0.0])).unwrap();
        assert_eq!(ev(&c, [1.0, 0.0]), -r * r);
        assert_eq!(ev(&c, [-1.0, 0.0]), 4.0 - r * r);
        assert_eq!(
            c.matrix.to_rows(),
            vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 1.0 - r * r]]
        );
    }

    #[test]
    fn chained_parabola_transforms() {
        // B¹ = S((1,0.2))ᵀ E^p(2) S, B² = R(π/4)ᵀ B¹ R, B³ = P((−1,−2))ᵀ B² P.
        let b0 = parabola(2.0).unwrap();
        let b1 = conjugate(&b0, &scaling([1.0, 0.2]).unwrap()).unwrap();
        // −u₁ + (u₂/0.2)² + 2
        assert!((ev(&b1, [0.0, 0.2]) - 3.0).abs() < 1e-12);
        let b2 = conjugate(&b1, &rotation(PI / 4.0)).unwrap();
        let b3 = conjugate(&b2, &translation([-1.0, -2.0])).unwrap();
        let m = scaling([1.0, 0.2])
            .unwrap()
            .then(&rotation(PI / 4.0))
            .then(&translation([-1.0, -2.0]));
        let direct = conjugate(&b0, &m).unwrap();
        assert!(direct.matrix.sub(&b3.matrix).unwrap().frobenius_norm() < 1e-12);
        // The parabola vertex (2,0) lands at rotate(π/4)·(2,0) + (−1,−2).
        let s = (PI / 4.0).sin();
        let vertex = [2.0 * s - 1.0, 2.0 * s - 2.0];
        assert!(ev(&b3, vertex).abs() < 1e-12);
    }

    #[test]
    fn rotated_line_half_plane() {
        // R(π/4)ᵀ E^ℓ(0) R(π/4): feasible where (u₁ + u₂)/√2 ≥ 0.
        let b1 = conjugate(&line(0.0).unwrap(), &rotation(PI / 4.0)).unwrap();
        assert!(ev(&b1, [1.0, 0.0]) > 0.0);
        assert!(ev(&b1, [-1.0, 0.0]) < 0.0);
        assert!(ev(&b1, [1.0, -1.0]).abs() < 1e-15);
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        assert!(matches!(
            evaluate(&disk(1.0).unwrap(), &[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let z = Constraint::new("zero", SymMatrix::zeros(3));
        assert_eq!(ev(&z, [3.0, -7.0]), 0.0);
    }

    #[test]
    fn conjugate_rejects_non_3x3() {
        let c = Constraint::new("big", SymMatrix::identity(4));
        assert!(conjugate(&c, &Transform3::identity()).is_err());
    }

    #[test]
    fn empty_set_always_feasible() {
        let set = ConstraintSet::new(Vec::new()).unwrap();
        assert!(is_feasible(&set, &[100.0, -3.0]).unwrap());
    }

    fn arb_transform() -> impl Strategy<Value = Transform3> {
        (0.2f64..5.0, 0.2f64..5.0, -PI..PI, -3.0f64..3.0, -3.0f64..3.0, 0usize..6).prop_map(
            |(s1, s2, th, p1, p2, order)| {
                let s = scaling([s1, s2]).unwrap();
                let r = rotation(th);
                let p = translation([p1, p2]);
                match order {
                    0 => s.then(&r).then(&p),
                    1 => s.then(&p).then(&r),
                    2 => r.then(&s).then(&p),
                    3 => r.then(&p).then(&s),
                    4 => p.then(&s).then(&r),
                    _ => p.then(&r).then(&s),
                }
            },
        )
    }

    fn arb_constraint() -> impl Strategy<Value = Constraint> {
        proptest::collection::vec(-3.0f64..3.0, 6)
            .prop_map(|v| Constraint::new("rand", SymMatrix::from_lower(3, v).unwrap()))
    }

    proptest! {
        #[test]
        fn conjugation_is_change_of_variables(
            b in arb_constraint(), m in arb_transform(), v0 in -3.0f64..3.0, v1 in -3.0f64..3.0
        ) {
            let c = conjugate(&b, &m).unwrap();
            let u = m.map_point([v0, v1]).unwrap();
            let lhs = ev(&c, [v0, v1]);
            let rhs = ev(&b, u);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }

        #[test]
        fn conjugation_by_inverse_undoes(b in arb_constraint(), m in arb_transform()) {
            let back = conjugate(&conjugate(&b, &m).unwrap(), &m.inverse()).unwrap();
            let err = back.matrix.sub(&b.matrix).unwrap().frobenius_norm();
            prop_assert!(err <= 1e-10 * (1.0 + b.matrix.frobenius_norm()));
        }

        #[test]
        fn rotation_is_orthogonal(th in -10.0f64..10.0) {
            let r = rotation(th);
            let rtr = r.matrix().t_matmul(r.matrix());
            prop_assert!(rtr.sub(&Mat::identity(3)).max_abs() <= 1e-12);
        }
    }
}
