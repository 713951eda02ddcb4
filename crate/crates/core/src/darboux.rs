//! Constant-torsion curves from their binormal indicatrix.
//!
//! A unit-speed-free spherical curve `B(t)` generates the curve
//!
//! ```text
//! γ(t) = (1/τ) ∫ B × B' dt
//! ```
//!
//! whose binormal is `B` and whose torsion is the constant `τ` wherever its
//! curvature does not vanish. `γ` closes exactly when `∮ B × dB = 0`; the
//! components of that integral are the projected areas
//! `∮(y dz - z dy)`, `∮(z dx - x dz)`, `∮(x dy - y dx)` swept by `B`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::epicycle::SphericalCurve;
use crate::error::{Error, Result};
use crate::frames::{Frame, Vec3};
use crate::numerics::{check_increasing, cumulative_trapezoid, curve_derivatives, CompensatedSum};

/// Per-sample invariants carried alongside a polyline (`NaN` where undefined).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleInvariants {
    pub kappa: f64,
    pub tau: f64,
    pub kappa_g: f64,
}

/// A sampled space curve, the common exchange type of this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    /// Curve parameter at each sample (arclength or epicycle parameter).
    pub params: Vec<f64>,
    pub points: Vec<Vec3>,
    /// Moving frame at each sample, when the producer tracked one.
    pub frames: Option<Vec<Frame>>,
    pub invariants: Option<Vec<SampleInvariants>>,
    /// Target torsion the curve was built with.
    pub torsion: Option<f64>,
    pub provenance: String,
}

impl Polyline {
    pub fn new(params: Vec<f64>, points: Vec<Vec3>, provenance: impl Into<String>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::validation("parameter and point counts differ"));
        }
        if points.len() < 2 {
            return Err(Error::validation("a polyline needs at least 2 samples"));
        }
        check_increasing(&params)?;
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::validation("polyline contains non-finite points"));
        }
        Ok(Self { params, points, frames: None, invariants: None, torsion: None, provenance: provenance.into() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `‖γ(end) - γ(start)‖`.
    pub fn closure_gap(&self) -> f64 {
        (self.points[self.len() - 1] - self.points[0]).norm()
    }

    /// Whether the endpoints coincide within `tol` relative to the curve's extent.
    pub fn is_closed(&self, tol: f64) -> bool {
        self.closure_gap() <= tol * self.extent().max(1.0)
    }

    /// Largest distance of a sample from the first one.
    pub fn extent(&self) -> f64 {
        self.points.iter().map(|p| (p - self.points[0]).norm()).fold(0.0, f64::max)
    }
}

/// The three projected-area integrals of a closed spherical curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaIntegralTriple {
    /// `∮(x dy - y dx)`
    pub ixy: f64,
    /// `∮(y dz - z dy)`
    pub iyz: f64,
    /// `∮(z dx - x dz)`
    pub izx: f64,
}

impl AreaIntegralTriple {
    fn from_vector(v: Vec3) -> Self {
        Self { ixy: v.z, iyz: v.x, izx: v.y }
    }

    /// `∮ B × dB` as a vector `(Iyz, Izx, Ixy)`.
    pub fn as_vector(&self) -> Vec3 {
        Vec3::new(self.iyz, self.izx, self.ixy)
    }

    /// Largest pairwise difference of the three integrals.
    pub fn symmetry_residual(&self) -> f64 {
        (self.ixy - self.iyz).abs().max((self.iyz - self.izx).abs()).max((self.izx - self.ixy).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    #[serde(flatten)]
    pub integrals: AreaIntegralTriple,
    pub closure_gap: f64,
    pub symmetry_residual: f64,
    /// Estimated absolute error of the area integrals.
    pub quadrature_tolerance: f64,
}

/// `dB/dt` per sample: exact velocities when present, else finite differences.
pub(crate) fn binormal_velocities(b: &SphericalCurve) -> Result<Vec<Vec3>> {
    match &b.velocities {
        Some(v) => Ok(v.clone()),
        None => Ok(curve_derivatives(&b.params, &b.points, b.is_closed())?.d1),
    }
}

fn check_torsion(tau: f64) -> Result<()> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::validation(format!("torsion must be finite and nonzero, got {tau}")));
    }
    Ok(())
}

/// Builds `γ = (1/τ) ∫ B × B' dt` by cumulative trapezoid quadrature, `γ(start) = 0`.
///
/// Negating `τ` mirrors the result through the origin.
pub fn gamma_from_binormal(b: &SphericalCurve, tau: f64) -> Result<Polyline> {
    check_torsion(tau)?;
    check_increasing(&b.params)?;
    let vel = binormal_velocities(b)?;
    let integrand: Vec<Vec3> = b.points.iter().zip(&vel).map(|(p, v)| p.cross(v) / tau).collect();
    let points = cumulative_trapezoid(&b.params, &integrand);
    let mut line = Polyline::new(b.params.clone(), points, provenance(b))?;
    line.torsion = Some(tau);
    Ok(line)
}

fn provenance(b: &SphericalCurve) -> String {
    match b.source {
        Some(p) => format!("darboux(m={},n={},alpha={},beta={})", p.m, p.n, p.alpha, p.beta),
        None => "darboux(external)".to_string(),
    }
}

fn trapezoid_vec(params: &[f64], f: &[Vec3], stride: usize) -> Vec3 {
    let mut acc = CompensatedSum::<Vec3>::default();
    let mut i = 0;
    while i + stride < f.len() {
        acc.add((f[i] + f[i + stride]) * (0.5 * (params[i + stride] - params[i])));
        i += stride;
    }
    acc.value()
}

fn closed_integrand(b: &SphericalCurve) -> Result<Vec<Vec3>> {
    if !b.is_closed() {
        return Err(Error::validation("area integrals need a closed curve (B(start) != B(end))"));
    }
    let vel = binormal_velocities(b)?;
    Ok(b.points.iter().zip(&vel).map(|(p, v)| p.cross(v)).collect())
}

/// `∮ B × dB` of a closed curve, componentwise as projected areas.
pub fn area_integrals(b: &SphericalCurve) -> Result<AreaIntegralTriple> {
    let f = closed_integrand(b)?;
    Ok(AreaIntegralTriple::from_vector(trapezoid_vec(&b.params, &f, 1)))
}

/// Normalizing factor of the published closed forms: `√3/(|m| π)`.
pub fn closure_normalization(m: i64) -> f64 {
    3f64.sqrt() / (m.unsigned_abs() as f64 * PI)
}

/// Closed form of the normalized area integral `√3/(|m|π) ∮(x dy - y dx)`.
///
/// Available for `(m, n) = (1, -3)` and `(2, -3)`; other families must use
/// [`area_integrals`].
pub fn closed_form_area(m: i64, n: i64, alpha: f64, beta: f64) -> Result<f64> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let lead = 2.0 * sa * sa * cb * cb;
    match (m, n) {
        (1, -3) => Ok(lead + (ca * ca - 6.0 * ca + 1.0) * sb * sb),
        (2, -3) => Ok(lead + (1.0 - 3.0 * ca + ca * ca) * sb * sb),
        _ => Err(Error::validation(format!("no closed form for (m, n) = ({m}, {n}); use quadrature"))),
    }
}

/// Closure integrals, endpoint gap of `γ` and a quadrature error estimate.
pub fn closure_report(b: &SphericalCurve, tau: f64) -> Result<ClosureReport> {
    check_torsion(tau)?;
    let f = closed_integrand(b)?;
    let full = trapezoid_vec(&b.params, &f, 1);
    let integrals = AreaIntegralTriple::from_vector(full);
    let gamma = gamma_from_binormal(b, tau)?;
    let intervals = b.len() - 1;
    let scale: f64 = f.iter().map(|v| v.norm()).sum::<f64>() * (b.params[intervals] - b.params[0]) / intervals as f64;
    let floor = 1e-15 * scale.max(1.0);
    let quadrature_tolerance = if intervals.is_multiple_of(2) && intervals >= 4 {
        (trapezoid_vec(&b.params, &f, 2) - full).amax() + floor
    } else {
        floor * intervals as f64
    };
    Ok(ClosureReport {
        integrals,
        closure_gap: gamma.closure_gap(),
        symmetry_residual: integrals.symmetry_residual(),
        quadrature_tolerance,
    })
}
