//! Planar and spherical epicycles.
//!
//! A spherical `(m, n)`-epicycle with radii `(α, β)` is the curve
//!
//! ```text
//! B(t) = (Q_{mt} C S_α R_{nt} S_β) e₁
//! ```
//!
//! where `C` is the [central frame](crate::frames::central_frame), `Q` rotates
//! about its axis `U`, and `R`, `S` rotate about the first and third
//! coordinate axes. `B` runs around a circle of geodesic radius `β` whose
//! centre runs `m` times around the circle of geodesic radius `α` about `U`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{central_axis, central_frame, hat, rodrigues_unchecked, rot_x, rot_z, Vec3};
use crate::numerics::{check_increasing, CompensatedSum};

/// Minimum sample count accepted by [`sample_epicycle`].
pub const MIN_EPICYCLE_SAMPLES: usize = 16;
/// Unit-norm tolerance for samples of a [`SphericalCurve`].
pub const UNIT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarEpicycleParams {
    /// Radius of the carrier circle.
    pub a: f64,
    /// Radius of the counter-rotating epicycle.
    pub b: f64,
}

impl PlanarEpicycleParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::validation(format!("planar epicycle needs a > 0, b >= 0 (got a={a}, b={b})")));
        }
        Ok(Self { a, b })
    }
}

/// `ρ(t) = (a cos t + b cos(-2t), a sin t + b sin(-2t))`.
pub fn planar_epicycle(p: &PlanarEpicycleParams, t: f64) -> [f64; 2] {
    [p.a * t.cos() + p.b * (-2.0 * t).cos(), p.a * t.sin() + p.b * (-2.0 * t).sin()]
}

fn planar_velocity(p: &PlanarEpicycleParams, t: f64) -> [f64; 2] {
    [-p.a * t.sin() + 2.0 * p.b * (-2.0 * t).sin(), p.a * t.cos() - 2.0 * p.b * (-2.0 * t).cos()]
}

/// Signed area `½∮(x dy - y dx)` over one period, by the periodic trapezoid rule.
///
/// Analytically this is `π(a² - 2b²)`; it vanishes exactly at `b = a/√2`.
pub fn planar_signed_area(p: &PlanarEpicycleParams) -> f64 {
    const N: usize = 256;
    let mut acc = CompensatedSum::<f64>::default();
    for i in 0..N {
        let t = TAU * i as f64 / N as f64;
        let [x, y] = planar_epicycle(p, t);
        let [dx, dy] = planar_velocity(p, t);
        acc.add(x * dy - y * dx);
    }
    0.5 * acc.value() * TAU / N as f64
}

/// Turning number of `ρ` (total rotation of `ρ'` over `2π`), by summing
/// discrete turning angles.
pub fn planar_turning_number(p: &PlanarEpicycleParams) -> Result<i64> {
    const N: usize = 4096;
    let angle = |t: f64| {
        let [dx, dy] = planar_velocity(p, t);
        if dx.hypot(dy) < 1e-12 * p.a {
            None
        } else {
            Some(dy.atan2(dx))
        }
    };
    let first = angle(0.0).ok_or_else(|| Error::validation("epicycle is singular (ρ' = 0)"))?;
    let mut prev = first;
    let mut total = 0.0;
    for i in 1..=N {
        let a = angle(TAU * i as f64 / N as f64).ok_or_else(|| Error::validation("epicycle is singular (ρ' = 0)"))?;
        let mut d = a - prev;
        d -= TAU * (d / TAU).round();
        total += d;
        prev = a;
    }
    Ok((total / TAU).round() as i64)
}

/// Parameters `(m, n, α, β)` of a spherical epicycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpicycleParams {
    /// Windings of the centre about `U`.
    pub m: i64,
    /// Windings of `B` about the moving centre.
    pub n: i64,
    /// Geodesic radius of the centre circle, radians.
    pub alpha: f64,
    /// Geodesic radius of the epicycle, radians.
    pub beta: f64,
}

impl EpicycleParams {
    /// Checked constructor; `α` and `β` must lie in `[0, π]`.
    ///
    /// The degenerate radii 0 and π are accepted.
    pub fn new(m: i64, n: i64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..=PI).contains(&v) {
                return Err(Error::validation(format!("{name} must be in [0, π] radians, got {v}")));
            }
        }
        Ok(Self { m, n, alpha, beta })
    }

    /// Whether the trace is invariant under a third turn about `U`.
    pub fn is_symmetric(&self) -> bool {
        self.n % 3 == 0
    }
}

/// `B(t)`, the first column of `Q_{mt} C S_α R_{nt} S_β`.
pub fn spherical_epicycle(p: &EpicycleParams, t: f64) -> Vec3 {
    let (mt, nt) = (p.m as f64 * t, p.n as f64 * t);
    let q = rodrigues_unchecked(&central_axis(), mt);
    let c = central_frame();
    let tail = rot_z(p.alpha) * rot_x(nt) * rot_z(p.beta);
    q.matrix() * c.matrix() * tail.matrix().column(0)
}

/// Analytic `dB/dt` by the product rule over the `Q_{mt}` and `R_{nt}` factors.
pub fn spherical_epicycle_velocity(p: &EpicycleParams, t: f64) -> Vec3 {
    let (mt, nt) = (p.m as f64 * t, p.n as f64 * t);
    let u = central_axis();
    let q = rodrigues_unchecked(&u, mt);
    let c = central_frame();
    let s_beta_e1 = rot_z(p.beta).matrix().column(0).into_owned();
    let head = q.matrix() * c.matrix() * rot_z(p.alpha).matrix();
    let b = head * rot_x(nt).matrix() * s_beta_e1;
    // d/dθ Q_θ = Û Q_θ and d/dφ R_φ = R_φ ê₁
    let from_q = hat(&u) * b * p.m as f64;
    let from_r = head * rot_x(nt).matrix() * hat(&Vec3::x()) * s_beta_e1 * p.n as f64;
    from_q + from_r
}

/// A sampled curve on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalCurve {
    /// Generating epicycle, or `None` for externally supplied data.
    pub source: Option<EpicycleParams>,
    pub params: Vec<f64>,
    pub points: Vec<Vec3>,
    /// Exact `dB/dt` at each sample when known.
    pub velocities: Option<Vec<Vec3>>,
}

impl SphericalCurve {
    /// Wraps unit-norm samples, checking the sphere and ordering invariants.
    pub fn new(params: Vec<f64>, points: Vec<Vec3>, velocities: Option<Vec<Vec3>>) -> Result<Self> {
        if params.len() != points.len() || params.len() < 2 {
            return Err(Error::validation("spherical curve needs matching params/points, at least 2"));
        }
        if velocities.as_ref().is_some_and(|v| v.len() != points.len()) {
            return Err(Error::validation("velocity count differs from point count"));
        }
        check_increasing(&params)?;
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| (p.norm() - 1.0).abs() > UNIT_NORM_TOL) {
            return Err(Error::validation(format!("sample {i} is off the unit sphere (|B| = {})", p.norm())));
        }
        Ok(Self { source: None, params, points, velocities })
    }

    /// Accepts arbitrary nonzero direction vectors `(h, k, l)` and normalizes them.
    pub fn from_directions(params: Vec<f64>, directions: Vec<Vec3>) -> Result<Self> {
        let points = directions
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let n = d.norm();
                if n > 0.0 && n.is_finite() {
                    Ok(d / n)
                } else {
                    Err(Error::validation(format!("direction {i} has zero or non-finite length")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, points, None)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closed when the first and last samples coincide within `1e-10`.
    pub fn is_closed(&self) -> bool {
        (self.points[0] - self.points[self.len() - 1]).norm() <= UNIT_NORM_TOL
    }
}

/// Samples `B` on a uniform grid over `[0, 2π]` (both ends included).
pub fn sample_epicycle(p: &EpicycleParams, samples: usize) -> Result<SphericalCurve> {
    if samples < MIN_EPICYCLE_SAMPLES {
        return Err(Error::validation(format!("need at least {MIN_EPICYCLE_SAMPLES} samples, got {samples}")));
    }
    let params: Vec<f64> = (0..samples).map(|i| TAU * i as f64 / (samples - 1) as f64).collect();
    let points = params.iter().map(|&t| spherical_epicycle(p, t)).collect();
    let velocities = params.iter().map(|&t| spherical_epicycle_velocity(p, t)).collect();
    Ok(SphericalCurve { source: Some(*p), params, points, velocities: Some(velocities) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, SQRT_2};

    fn example1_beta() -> f64 {
        0.5 * ((67.0 - 24.0 * SQRT_2) / 71.0).acos()
    }

    #[test]
    fn planar_points() {
        let circle = PlanarEpicycleParams::new(1.0, 0.0).unwrap();
        let [x, y] = planar_epicycle(&circle, 0.7);
        assert_abs_diff_eq!(x, 0.7f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(y, 0.7f64.sin(), epsilon = 1e-15);
        let p = PlanarEpicycleParams::new(1.0, 1.0 / SQRT_2).unwrap();
        let [x, y] = planar_epicycle(&p, 0.0);
        assert_abs_diff_eq!(x, 1.0 + 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        assert!(PlanarEpicycleParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn planar_area_zero_and_magnitudes() {
        let zero = PlanarEpicycleParams::new(1.0, 1.0 / SQRT_2).unwrap();
        assert_abs_diff_eq!(planar_signed_area(&zero), 0.0, epsilon = 1e-10);
        let circle = PlanarEpicycleParams::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(planar_signed_area(&circle).abs(), PI, epsilon = 1e-10);
        let both = PlanarEpicycleParams::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(planar_signed_area(&both).abs(), PI, epsilon = 1e-10);
    }

    #[test]
    fn planar_area_matches_brute_force_polygon() {
        // shoelace formula on a fine polygon, independent of the analytic derivative
        let p = PlanarEpicycleParams::new(1.3, 0.4).unwrap();
        let n = 200_000;
        let pts: Vec<[f64; 2]> = (0..n).map(|i| planar_epicycle(&p, TAU * i as f64 / n as f64)).collect();
        let shoelace: f64 = (0..n)
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            * 0.5;
        assert_abs_diff_eq!(planar_signed_area(&p), shoelace, epsilon = 1e-8);
        assert_abs_diff_eq!(planar_signed_area(&p), PI * (1.3f64.powi(2) - 2.0 * 0.16), epsilon = 1e-12);
    }

    #[test]
    fn planar_turning_number_beyond_half_radius() {
        let p = PlanarEpicycleParams::new(1.0, 1.0 / SQRT_2).unwrap();
        let turning = planar_turning_number(&p).unwrap();
        assert_eq!(turning, -2);
        // the identity map of S¹ has turning number 1; the gap of 3 is the
        // obstruction to a regular isotopy between the two
        assert_eq!(1 - turning, 3);
        let small = PlanarEpicycleParams::new(1.0, 0.3).unwrap();
        assert_eq!(planar_turning_number(&small).unwrap(), 1);
    }

    #[test]
    fn epicycle_degenerate_cases() {
        let u = central_axis();
        let fixed = EpicycleParams::new(1, -3, 0.0, 0.0).unwrap();
        for t in [0.0, 0.4, 2.0, 5.5] {
            assert_abs_diff_eq!(spherical_epicycle(&fixed, t), u, epsilon = 1e-15);
            assert_abs_diff_eq!(spherical_epicycle_velocity(&fixed, t), Vec3::zeros(), epsilon = 1e-15);
        }
        let circle = EpicycleParams::new(1, -3, 0.6, 0.0).unwrap();
        for t in [0.0, 1.0, 3.0] {
            let b = spherical_epicycle(&circle, t);
            assert_abs_diff_eq!(b.dot(&u).acos(), 0.6, epsilon = 1e-12);
            assert_abs_diff_eq!(spherical_epicycle_velocity(&circle, t).norm(), 0.6f64.sin(), epsilon = 1e-12);
        }
        assert!(EpicycleParams::new(1, -3, -0.1, 0.2).is_err());
        assert!(EpicycleParams::new(1, -3, 0.1, 3.2).is_err());
        assert!(EpicycleParams::new(1, -3, PI, PI).is_ok());
    }

    #[test]
    fn threefold_symmetry() {
        let p = EpicycleParams::new(2, -3, FRAC_PI_3, 1.1832).unwrap();
        assert!(p.is_symmetric());
        assert!(!EpicycleParams::new(1, 2, 0.3, 0.3).unwrap().is_symmetric());
        let q = rodrigues_unchecked(&central_axis(), TAU * p.m as f64 / 3.0);
        for t in [0.0, 0.3, 1.7, 4.0] {
            let lhs = spherical_epicycle(&p, t + TAU / 3.0);
            assert_abs_diff_eq!(lhs, q * spherical_epicycle(&p, t), epsilon = 1e-12);
        }
    }

    #[test]
    fn sampling_closes_and_validates() {
        let b1 = sample_epicycle(&EpicycleParams::new(1, -3, FRAC_PI_4, example1_beta()).unwrap(), 4096).unwrap();
        assert_eq!(b1.len(), 4096);
        assert!((b1.points[0] - b1.points[4095]).norm() < 1e-12);
        assert!(b1.is_closed());
        let b2 = sample_epicycle(&EpicycleParams::new(2, -3, FRAC_PI_3, 1.1832).unwrap(), 4096).unwrap();
        assert!(b2.is_closed());
        assert!(sample_epicycle(&EpicycleParams::new(1, -3, 0.1, 0.1).unwrap(), 4).is_err());
    }

    #[test]
    fn external_directions_are_normalized() {
        let t = vec![0.0, 1.0, 2.0];
        let d = vec![Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 3.0, 0.0), Vec3::new(0.0, 0.0, 0.5)];
        let c = SphericalCurve::from_directions(t.clone(), d.clone()).unwrap();
        assert!(c.points.iter().all(|p| (p.norm() - 1.0).abs() < 1e-15));
        assert!(SphericalCurve::new(t, d, None).is_err());
    }

    fn params() -> impl Strategy<Value = EpicycleParams> {
        (-3i64..=3, -6i64..=6, 0.0..PI, 0.0..PI).prop_map(|(m, n, a, b)| EpicycleParams::new(m, n, a, b).unwrap())
    }

    proptest! {
        #[test]
        fn unit_norm_tangency_and_period(p in params(), t in 0.0..TAU) {
            let b = spherical_epicycle(&p, t);
            let v = spherical_epicycle_velocity(&p, t);
            prop_assert!((b.norm() - 1.0).abs() < 1e-12);
            prop_assert!(b.dot(&v).abs() < 1e-10);
            prop_assert!((spherical_epicycle(&p, t + TAU) - b).amax() < 1e-12);
        }

        #[test]
        fn velocity_matches_central_difference(p in params(), t in 0.0..TAU) {
            let h = 1e-5;
            let fd = (spherical_epicycle(&p, t + h) - spherical_epicycle(&p, t - h)) / (2.0 * h);
            prop_assert!((fd - spherical_epicycle_velocity(&p, t)).amax() < 1e-7);
        }
    }
}
