//! Principal-curvature bounds of surfaces and the torsion bound for closed
//! curves of constant torsion on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::Vec3;

/// Principal curvature samples `κ₁ ≤ κ₂` of a surface and their largest gap `μ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceCurvatureBounds {
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
    pub mu: f64,
}

impl SurfaceCurvatureBounds {
    pub fn from_samples(kappa1: Vec<f64>, kappa2: Vec<f64>) -> Result<Self> {
        if kappa1.len() != kappa2.len() || kappa1.is_empty() {
            return Err(Error::validation("need matching, nonempty principal curvature samples"));
        }
        if kappa1.iter().chain(&kappa2).any(|k| !k.is_finite()) {
            return Err(Error::validation("principal curvatures must be finite"));
        }
        let mu = kappa1.iter().zip(&kappa2).map(|(a, b)| (b - a).abs()).fold(0.0, f64::max);
        Ok(Self { kappa1, kappa2, mu })
    }

    /// Bounds with only the gap known.
    pub fn from_mu(mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::validation(format!("μ must be finite and nonnegative, got {mu}")));
        }
        Ok(Self { kappa1: Vec::new(), kappa2: Vec::new(), mu })
    }

    /// A sphere of the given radius is umbilic: `μ = 0`.
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::validation(format!("radius must be positive, got {radius}")));
        }
        Self::from_samples(vec![1.0 / radius], vec![1.0 / radius])
    }

    /// Principal curvatures of the ellipsoid `x²/a² + y²/b² + z²/c² = 1`
    /// sampled on a `(polar × azimuth)` grid; odd `polar` includes the equator.
    pub fn ellipsoid(a: f64, b: f64, c: f64, polar: usize, azimuth: usize) -> Result<Self> {
        if ![a, b, c].iter().all(|x| *x > 0.0 && x.is_finite()) {
            return Err(Error::validation("ellipsoid semi-axes must be positive"));
        }
        if polar == 0 || azimuth == 0 {
            return Err(Error::validation("sampling grid must be nonempty"));
        }
        let (mut k1, mut k2) = (Vec::new(), Vec::new());
        for i in 0..polar {
            let u = std::f64::consts::PI * (i as f64 + 0.5) / polar as f64;
            for j in 0..azimuth {
                let v = std::f64::consts::TAU * j as f64 / azimuth as f64;
                let (p, q) = ellipsoid_principal_curvatures(a, b, c, u, v);
                k1.push(p);
                k2.push(q);
            }
        }
        Self::from_samples(k1, k2)
    }
}

/// Principal curvatures `(κ₁, κ₂)`, `κ₁ ≤ κ₂`, of the ellipsoid at
/// `(a sin u cos v, b sin u sin v, c cos u)` with the inward normal (both positive).
pub fn ellipsoid_principal_curvatures(a: f64, b: f64, c: f64, u: f64, v: f64) -> (f64, f64) {
    let (su, cu, sv, cv) = (u.sin(), u.cos(), v.sin(), v.cos());
    let ru = Vec3::new(a * cu * cv, b * cu * sv, -c * su);
    let rv = Vec3::new(-a * su * sv, b * su * cv, 0.0);
    let ruu = Vec3::new(-a * su * cv, -b * su * sv, -c * cu);
    let ruv = Vec3::new(-a * cu * sv, b * cu * cv, 0.0);
    let rvv = Vec3::new(-a * su * cv, -b * su * sv, 0.0);
    let mut n = ru.cross(&rv).normalize();
    // orient inward, towards the centre
    let r = Vec3::new(a * su * cv, b * su * sv, c * cu);
    if n.dot(&r) > 0.0 {
        n = -n;
    }
    // second fundamental form in an orthonormal tangent basis (e1, rv⊥/|rv⊥|)
    let e1 = ru.normalize();
    let rv_perp = rv - e1 * rv.dot(&e1);
    // coordinates (ru, rv) ↦ (e1, e2): J = [|ru|, ⟨rv,e1⟩; 0, |rv⊥|]
    let (j11, j12, j22) = (ru.norm(), rv.dot(&e1), rv_perp.norm());
    let (l, m, nn) = (ruu.dot(&n), ruv.dot(&n), rvv.dot(&n));
    // S = J⁻ᵀ II J⁻¹ with J⁻¹ = [1/j11, −j12/(j11 j22); 0, 1/j22]
    let (i11, i12, i22) = (1.0 / j11, -j12 / (j11 * j22), 1.0 / j22);
    let p = i11 * i11 * l;
    let q = i11 * (i12 * l + i22 * m);
    let r = i12 * i12 * l + 2.0 * i12 * i22 * m + i22 * i22 * nn;
    let mean = 0.5 * (p + r);
    let half_gap = (0.5 * (p - r)).hypot(q);
    (mean - half_gap, mean + half_gap)
}

/// Bound `μ/2` on `|τ|` for closed curves of constant torsion on the surface.
pub fn torsion_bound(bounds: &SurfaceCurvatureBounds) -> f64 {
    bounds.mu / 2.0
}

/// Whether a closed curve of constant torsion `τ` may exist: `|τ| < μ/2`.
/// Zero torsion (plane curves) is never excluded by the bound.
pub fn admits_closed_ct(bounds: &SurfaceCurvatureBounds, tau: f64) -> bool {
    tau == 0.0 || tau.abs() < torsion_bound(bounds)
}
