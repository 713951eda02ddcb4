//! Reconstructing a curve from prescribed curvature and torsion.
//!
//! The framed curve `(γ, F)` with `F = (T, N, B)` solves
//!
//! ```text
//! γ' = T,    F' = F A,    A = [ 0  -κ   0 ]
//!                             [ κ   0  -τ ]
//!                             [ 0   τ   0 ]
//! ```
//!
//! Curvature is signed: `κ` may pass through zero and the frame stays smooth.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;

use crate::darboux::Polyline;
use crate::error::{Error, Result};
use crate::frames::{nearest_rotation, rot_x, Frame, Rotation, Vec3};
use crate::numerics::fornberg_weights;

/// Minimum number of integration steps.
pub const MIN_FRENET_STEPS: usize = 64;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Curvature and torsion as functions of arclength on `[0, length]`.
#[derive(Clone)]
pub struct FrenetCoefficients {
    curvature: ScalarFn,
    torsion: ScalarFn,
    pub length: f64,
}

impl fmt::Debug for FrenetCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrenetCoefficients").field("length", &self.length).finish_non_exhaustive()
    }
}

impl FrenetCoefficients {
    pub fn new(
        curvature: impl Fn(f64) -> f64 + Send + Sync + 'static,
        torsion: impl Fn(f64) -> f64 + Send + Sync + 'static,
        length: f64,
    ) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::validation(format!("curve length must be positive, got {length}")));
        }
        Ok(Self { curvature: Arc::new(curvature), torsion: Arc::new(torsion), length })
    }

    pub fn constant(kappa: f64, tau: f64, length: f64) -> Result<Self> {
        Self::new(move |_| kappa, move |_| tau, length)
    }

    /// Piecewise-cubic Hermite interpolation of sampled `κ(s)`, `τ(s)`.
    ///
    /// Slopes come from 5-point finite differences; `s` must start at 0.
    pub fn from_samples(s: &[f64], kappa: &[f64], tau: &[f64]) -> Result<Self> {
        if s.len() != kappa.len() || s.len() != tau.len() || s.len() < 5 {
            return Err(Error::validation("need at least 5 matching (s, κ, τ) samples"));
        }
        crate::numerics::check_increasing(s)?;
        if s[0] != 0.0 {
            return Err(Error::validation("arclength samples must start at s = 0"));
        }
        let length = s[s.len() - 1];
        let k = Arc::new(HermiteTable::new(s.to_vec(), kappa.to_vec()));
        let t = Arc::new(HermiteTable::new(s.to_vec(), tau.to_vec()));
        Self::new(move |x| k.eval(x), move |x| t.eval(x), length)
    }

    pub fn curvature(&self, s: f64) -> f64 {
        (self.curvature)(s)
    }

    pub fn torsion(&self, s: f64) -> f64 {
        (self.torsion)(s)
    }

    /// Admissibility on a probe grid of `probes` intervals: every zero of `κ`
    /// is an isolated sign change (no run of vanishing samples).
    pub fn is_admissible(&self, probes: usize) -> bool {
        let vals: Vec<f64> = (0..=probes).map(|i| self.curvature(self.length * i as f64 / probes as f64)).collect();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return false;
        }
        let tiny = 1e-12 * scale;
        !vals.windows(2).any(|w| w[0].abs() <= tiny && w[1].abs() <= tiny)
    }

    fn generator(&self, s: f64) -> Result<Matrix3<f64>> {
        let (k, t) = (self.curvature(s), self.torsion(s));
        if !k.is_finite() || !t.is_finite() {
            return Err(Error::validation(format!("non-finite Frenet coefficients at s = {s}: κ = {k}, τ = {t}")));
        }
        Ok(Matrix3::new(0.0, -k, 0.0, k, 0.0, -t, 0.0, t, 0.0))
    }
}

struct HermiteTable {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl HermiteTable {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let dy = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(2).min(n - 5);
                let w = fornberg_weights(x[i], &x[lo..lo + 5], 1);
                (0..5).map(|j| w[1][j] * y[lo + j]).sum()
            })
            .collect();
        Self { x, y, dy }
    }

    fn eval(&self, s: f64) -> f64 {
        let n = self.x.len();
        let i = self.x.partition_point(|&v| v <= s).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let u = (s - self.x[i]) / h;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * self.y[i] + h10 * h * self.dy[i] + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1]
    }
}

/// Arclength, position and Frenet frame `(T, N, B)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramedCurveState {
    pub s: f64,
    pub position: Vec3,
    pub frame: Frame,
}

impl FramedCurveState {
    pub fn new(s: f64, position: Vec3, frame: Frame) -> Self {
        Self { s, position, frame }
    }

    /// Origin with the coordinate axes as `(T, N, B)`.
    pub fn standard() -> Self {
        Self::new(0.0, Vec3::zeros(), Frame::identity())
    }
}

/// Classical fourth-order integration of `(γ, F)` over `[s₀, s₀ + length]`.
///
/// The frame is projected onto the nearest rotation after every step. The
/// returned polyline carries the frames, one per sample (`steps + 1` samples).
pub fn integrate_frenet(c: &FrenetCoefficients, init: &FramedCurveState, steps: usize) -> Result<Polyline> {
    if steps < MIN_FRENET_STEPS {
        return Err(Error::validation(format!("need at least {MIN_FRENET_STEPS} steps, got {steps}")));
    }
    let h = c.length / steps as f64;
    let mut s = init.s;
    let mut pos = init.position;
    let mut f = *init.frame.matrix();
    let mut params = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut frames = Vec::with_capacity(steps + 1);
    params.push(s);
    points.push(pos);
    frames.push(init.frame);
    for k in 0..steps {
        let local = s - init.s;
        let (a0, am, a1) = (c.generator(local)?, c.generator(local + 0.5 * h)?, c.generator(local + h)?);
        let k1 = f * a0;
        let f2 = f + k1 * (0.5 * h);
        let k2 = f2 * am;
        let f3 = f + k2 * (0.5 * h);
        let k3 = f3 * am;
        let f4 = f + k3 * h;
        let k4 = f4 * a1;
        let t_col = |m: &Matrix3<f64>| m.column(0).into_owned();
        pos += (t_col(&f) + (t_col(&f2) + t_col(&f3)) * 2.0 + t_col(&f4)) * (h / 6.0);
        f = nearest_rotation(&(f + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)));
        s = init.s + (k + 1) as f64 * h;
        params.push(s);
        points.push(pos);
        frames.push(Frame::from_matrix_unchecked(f));
    }
    let mut line = Polyline::new(params, points, "frenet")?;
    line.frames = Some(frames);
    Ok(line)
}

/// Change of gauge `F ↦ F g⁻¹`.
pub fn gauge_transform(frame: &Frame, g: &Rotation) -> Frame {
    frame.right_mul(&g.inverse())
}

/// Connection in the new gauge: `Â = -g' g⁻¹ + g A g⁻¹`.
pub fn gauge_connection(a: &Matrix3<f64>, g: &Rotation, g_prime: &Matrix3<f64>) -> Matrix3<f64> {
    let g_inv = g.inverse();
    -g_prime * g_inv.matrix() + g.matrix() * a * g_inv.matrix()
}

/// Gauge taking the Frenet frame `(T, N, B)` to the Darboux frame `(t, u, ν)`,
/// where `φ` is the directed angle from `N` to the surface normal `ν` about `T`.
pub fn frenet_to_darboux_gauge(phi: f64) -> Rotation {
    rot_x(std::f64::consts::FRAC_PI_2 - phi)
}
