//! Finite differences on sampled curves and compensated quadrature.

use crate::error::{Error, Result};
use crate::frames::Vec3;

/// Half-width of the finite-difference window (7-point stencils).
pub const STENCIL_HALF_WIDTH: usize = 3;

/// Finite-difference weights for derivatives `0..=order` at `z` on nodes `x`.
///
/// Fornberg's recursion; returns `w[k][j]`, the weight of node `j` for the
/// `k`-th derivative.
pub fn fornberg_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First three parameter derivatives of a sampled vector curve.
#[derive(Debug, Clone)]
pub struct CurveDerivatives {
    pub d1: Vec<Vec3>,
    pub d2: Vec<Vec3>,
    pub d3: Vec<Vec3>,
    /// `false` where the stencil would leave an open curve.
    pub valid: Vec<bool>,
}

/// Derivative of a sampled scalar or vector quantity along a parameter grid.
///
/// For `periodic` data the last sample must duplicate the first; stencils
/// wrap across the seam and every sample is valid. Otherwise the outer
/// `STENCIL_HALF_WIDTH` samples at each end are marked invalid and left zero.
pub fn curve_derivatives(params: &[f64], points: &[Vec3], periodic: bool) -> Result<CurveDerivatives> {
    curve_derivatives_strided(params, points, periodic, 1)
}

/// [`curve_derivatives`] with stencil nodes `stride` samples apart.
///
/// Widening the stencil trades truncation error for roundoff: the third
/// derivative of data with spacing `h` carries roundoff of order `ε/h³`.
pub fn curve_derivatives_strided(
    params: &[f64],
    points: &[Vec3],
    periodic: bool,
    stride: usize,
) -> Result<CurveDerivatives> {
    let n = points.len();
    if n != params.len() {
        return Err(Error::validation("parameter and point counts differ"));
    }
    if stride == 0 {
        return Err(Error::validation("stencil stride must be positive"));
    }
    let needed = 2 * STENCIL_HALF_WIDTH * stride + 1 + usize::from(periodic);
    if n < needed {
        return Err(Error::validation(format!("need at least {needed} samples for derivative estimates, got {n}")));
    }
    check_increasing(params)?;
    let m = if periodic { n - 1 } else { n };
    let mut out = CurveDerivatives {
        d1: vec![Vec3::zeros(); n],
        d2: vec![Vec3::zeros(); n],
        d3: vec![Vec3::zeros(); n],
        valid: vec![periodic; n],
    };
    for i in 0..m {
        let Some((idx, nodes)) = stencil(params, i, periodic, stride) else {
            continue;
        };
        let w = fornberg_weights(params[i], &nodes, 3);
        let mut d = [Vec3::zeros(); 3];
        for (k, dk) in d.iter_mut().enumerate() {
            for (slot, &j) in idx.iter().enumerate() {
                *dk += points[j] * w[k + 1][slot];
            }
        }
        out.d1[i] = d[0];
        out.d2[i] = d[1];
        out.d3[i] = d[2];
        out.valid[i] = true;
    }
    if periodic {
        out.d1[n - 1] = out.d1[0];
        out.d2[n - 1] = out.d2[0];
        out.d3[n - 1] = out.d3[0];
    }
    Ok(out)
}

/// Sample indices and node positions of the 7-point window centred on `i`,
/// with neighbouring nodes `stride` samples apart.
///
/// Periodic windows wrap across the seam (the last sample duplicates the
/// first) with nodes shifted by whole periods; open windows that would leave
/// the data return `None`.
pub(crate) fn stencil(params: &[f64], i: usize, periodic: bool, stride: usize) -> Option<([usize; 7], [f64; 7])> {
    let n = params.len();
    let h = STENCIL_HALF_WIDTH as isize;
    let reach = STENCIL_HALF_WIDTH * stride;
    let mut idx = [0usize; 7];
    let mut nodes = [0.0; 7];
    if !periodic && (i < reach || i + reach >= n) {
        return None;
    }
    // distinct samples on a periodic grid exclude the duplicated endpoint
    let m = if periodic { n - 1 } else { n };
    let period = params[n - 1] - params[0];
    for (slot, off) in (-h..=h).enumerate() {
        let j = i as isize + off * stride as isize;
        let (jj, shift) = if periodic {
            let wrapped = j.rem_euclid(m as isize) as usize;
            let laps = (j - wrapped as isize) / m as isize;
            (wrapped, laps as f64 * period)
        } else {
            (j as usize, 0.0)
        };
        idx[slot] = jj;
        nodes[slot] = params[jj] + shift;
    }
    Some((idx, nodes))
}

/// First derivative of a scalar series; same end handling as [`curve_derivatives`].
pub fn scalar_derivative(params: &[f64], values: &[f64], periodic: bool) -> Result<(Vec<f64>, Vec<bool>)> {
    scalar_derivative_strided(params, values, periodic, 1)
}

/// [`scalar_derivative`] with stencil nodes `stride` samples apart.
pub fn scalar_derivative_strided(
    params: &[f64],
    values: &[f64],
    periodic: bool,
    stride: usize,
) -> Result<(Vec<f64>, Vec<bool>)> {
    let pts: Vec<Vec3> = values.iter().map(|&v| Vec3::new(v, 0.0, 0.0)).collect();
    let d = curve_derivatives_strided(params, &pts, periodic, stride)?;
    Ok((d.d1.iter().map(|v| v.x).collect(), d.valid))
}

/// Samples per stencil spacing beyond which higher derivatives are taken
/// on a coarser stride: roughly this many stencil spacings span the data.
pub const TARGET_STENCIL_SPACINGS: usize = 2048;

/// Stride giving about [`TARGET_STENCIL_SPACINGS`] spacings over `samples` samples.
pub fn auto_stride(samples: usize) -> usize {
    (samples / TARGET_STENCIL_SPACINGS).max(1)
}

/// First derivative at every sample of open data: centred 7-point stencils in
/// the interior, one-sided windows of the same width at the ends.
pub fn first_derivative_clamped(params: &[f64], points: &[Vec3]) -> Result<Vec<Vec3>> {
    let n = points.len();
    let width = 2 * STENCIL_HALF_WIDTH + 1;
    if n != params.len() || n < width {
        return Err(Error::validation(format!("need at least {width} matching samples, got {n}")));
    }
    check_increasing(params)?;
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(STENCIL_HALF_WIDTH).min(n - width);
            let w = fornberg_weights(params[i], &params[lo..lo + width], 1);
            (0..width).fold(Vec3::zeros(), |acc, j| acc + points[lo + j] * w[1][j])
        })
        .collect())
}

pub(crate) fn check_increasing(params: &[f64]) -> Result<()> {
    if let Some(w) = params.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::validation(format!("parameters must be strictly increasing ({} then {})", w[0], w[1])));
    }
    Ok(())
}

/// Kahan–Babuška (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl CompensatedSum<f64> {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl CompensatedSum<Vec3> {
    pub fn add(&mut self, x: Vec3) {
        for k in 0..3 {
            let t = self.sum[k] + x[k];
            if self.sum[k].abs() >= x[k].abs() {
                self.comp[k] += (self.sum[k] - t) + x[k];
            } else {
                self.comp[k] += (x[k] - t) + self.sum[k];
            }
            self.sum[k] = t;
        }
    }

    pub fn value(&self) -> Vec3 {
        self.sum + self.comp
    }
}

/// Cumulative trapezoid integral of `f` over `params`, starting from zero.
pub fn cumulative_trapezoid(params: &[f64], f: &[Vec3]) -> Vec<Vec3> {
    let mut acc = CompensatedSum::<Vec3>::default();
    let mut out = Vec::with_capacity(f.len());
    out.push(Vec3::zeros());
    for i in 1..f.len() {
        acc.add((f[i] + f[i - 1]) * (0.5 * (params[i] - params[i - 1])));
        out.push(acc.value());
    }
    out
}

/// Cumulative trapezoid integral of a scalar series.
pub fn cumulative_trapezoid_scalar(params: &[f64], f: &[f64]) -> Vec<f64> {
    let mut acc = CompensatedSum::<f64>::default();
    let mut out = Vec::with_capacity(f.len());
    out.push(0.0);
    for i in 1..f.len() {
        acc.add(0.5 * (f[i] + f[i - 1]) * (params[i] - params[i - 1]));
        out.push(acc.value());
    }
    out
}

/// Trapezoid integral of a scalar series over the whole grid.
pub fn trapezoid(params: &[f64], f: &[f64]) -> f64 {
    cumulative_trapezoid_scalar(params, f).last().copied().unwrap_or(0.0)
}
