//! Rotation and frame primitives.
//!
//! Every rotation here is assembled from closed-form trigonometric entries,
//! so two calls with the same angle produce bit-identical matrices.

use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Orthonormality tolerance for frames built from exact formulas.
pub const EXACT_FRAME_TOL: f64 = 1e-12;
/// Orthonormality tolerance for frames produced by ODE integration.
pub const INTEGRATED_FRAME_TOL: f64 = 1e-9;

/// A proper rotation of R³ stored as a 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Wraps `m` after checking `mᵀm = I` and `det m = +1` within `tol`.
    pub fn from_matrix(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let r = Rotation(m);
        let (orth, det) = (r.orthogonality_defect(), m.determinant());
        if orth > tol || (det - 1.0).abs() > tol {
            return Err(Error::validation(format!("matrix is not a rotation: |RᵀR - I| = {orth:.3e}, det = {det}")));
        }
        Ok(r)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Largest entry of `|RᵀR - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Rotation {
    type Output = Vec3;

    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

/// Rotation by `t` about the first coordinate axis.
pub fn rot_x(t: f64) -> Rotation {
    let (s, c) = t.sin_cos();
    Rotation(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
}

/// Rotation by `t` about the third coordinate axis.
pub fn rot_z(t: f64) -> Rotation {
    let (s, c) = t.sin_cos();
    Rotation(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
}

/// The antisymmetric matrix `û` with `û v = u × v`.
pub fn hat(u: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -u.z, u.y, u.z, 0.0, -u.x, -u.y, u.x, 0.0)
}

/// Rodrigues rotation `I + sin t û + (1 - cos t) û²` about the unit axis `u`.
pub fn rodrigues(u: &Vec3, t: f64) -> Result<Rotation> {
    let norm = u.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::validation(format!("rotation axis must be a unit vector (|u| = {norm}); pass u / |u|")));
    }
    Ok(rodrigues_unchecked(u, t))
}

pub(crate) fn rodrigues_unchecked(u: &Vec3, t: f64) -> Rotation {
    let (s, c) = t.sin_cos();
    let k = hat(u);
    Rotation(Matrix3::identity() + k * s + k * k * (1.0 - c))
}

/// An orthonormal, right-handed frame given by its three columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame(Matrix3<f64>);

impl Frame {
    pub fn identity() -> Self {
        Frame(Matrix3::identity())
    }

    /// Builds a frame from columns, checking orthonormality within `tol`.
    pub fn from_columns(f1: Vec3, f2: Vec3, f3: Vec3, tol: f64) -> Result<Self> {
        let frame = Frame(Matrix3::from_columns(&[f1, f2, f3]));
        frame.check(tol)?;
        Ok(frame)
    }

    pub fn from_matrix(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let frame = Frame(m);
        frame.check(tol)?;
        Ok(frame)
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Frame(m)
    }

    fn check(&self, tol: f64) -> Result<()> {
        let defect = self.orthonormality_defect();
        let cross = (self.f1().cross(&self.f2()) - self.f3()).amax();
        if defect > tol || cross > tol {
            return Err(Error::validation(format!(
                "columns are not a right-handed orthonormal frame (defect {defect:.3e}, \
                 |f1×f2 - f3| = {cross:.3e})"
            )));
        }
        Ok(())
    }

    pub fn f1(&self) -> Vec3 {
        self.0.column(0).into_owned()
    }

    pub fn f2(&self) -> Vec3 {
        self.0.column(1).into_owned()
    }

    pub fn f3(&self) -> Vec3 {
        self.0.column(2).into_owned()
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn orthonormality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Right action `F ↦ F g`.
    pub fn right_mul(&self, g: &Rotation) -> Frame {
        Frame(self.0 * g.0)
    }

    /// Left action `F ↦ Q F`.
    pub fn rotated_by(&self, q: &Rotation) -> Frame {
        Frame(q.0 * self.0)
    }
}

/// Nearest rotation to `m` in the Frobenius norm (orthogonal polar factor).
pub fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * v_t;
    }
    r
}

/// Axis of the central frame: `(1, 1, 1)/√3`.
pub fn central_axis() -> Vec3 {
    Vec3::repeat(1.0 / 3f64.sqrt())
}

/// The central frame `C = (U, V, W)` about which epicycles are 3-fold symmetric.
pub fn central_frame() -> Frame {
    let u = central_axis();
    let v = Vec3::new(-1.0, -1.0, 2.0) / 6f64.sqrt();
    let w = Vec3::new(1.0, -1.0, 0.0) / 2f64.sqrt();
    Frame(Matrix3::from_columns(&[u, v, w]))
}
