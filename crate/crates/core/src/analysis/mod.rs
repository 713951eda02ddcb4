//! Discrete differential invariants of sampled curves and identity checks.
//!
//! Curvature and torsion come from 7-point finite-difference stencils:
//!
//! ```text
//! κ = |γ'×γ''| / |γ'|³,    τ = ⟨γ'×γ'', γ'''⟩ / |γ'×γ''|²
//! ```
//!
//! Curvature is signed by transporting the binormal continuously along the
//! curve; torsion is left undefined where `κ̂ < 1e-6·κ̂_max`.

mod helix;
pub mod sphere;
pub mod surface;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::darboux::Polyline;
use crate::error::{Error, Result};
use crate::frames::Vec3;
use crate::numerics::{
    auto_stride, cumulative_trapezoid_scalar, curve_derivatives, curve_derivatives_strided, first_derivative_clamped,
};

pub use helix::{fit_helix, HelixFit};
pub use sphere::{
    check_binormal_curvature, check_wong, geodesic_curvature, geodesic_curvature_sphere, geodesic_inflection_count,
    geodesic_torsion, integral_identities, on_unit_sphere, sphere_identity_residuals, spherical_ode_residual,
    DarbouxQuantities, OdeResidual, WongFit, IDENTITY_POWERS,
};
pub use surface::{admits_closed_ct, ellipsoid_principal_curvatures, torsion_bound, SurfaceCurvatureBounds};

/// Torsion is not estimated where `κ̂` falls below this fraction of `κ̂_max`.
pub const TORSION_CUTOFF: f64 = 1e-6;
/// Values within this fraction of the maximum magnitude count as zero when
/// counting sign changes.
pub const INFLECTION_DEAD_BAND: f64 = 1e-8;
/// Relative closure gap under which a polyline is treated as periodic.
pub const PERIODIC_GAP_TOL: f64 = 1e-6;

/// Per-sample estimates along a curve (`NaN` where undefined).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveEstimates {
    pub params: Vec<f64>,
    pub arclength: Vec<f64>,
    /// `|γ'|` with respect to the curve parameter.
    pub speed: Vec<f64>,
    /// Signed curvature.
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub tangent: Vec<Vec3>,
    /// Continuously transported principal normal and binormal.
    pub normal: Vec<Vec3>,
    pub binormal: Vec<Vec3>,
    /// `false` where the stencil leaves an open curve.
    pub valid: Vec<bool>,
    pub periodic: bool,
    /// Stencil stride used for the third derivative (torsion).
    pub stride: usize,
}

impl CurveEstimates {
    /// Indices with a defined torsion estimate.
    pub fn torsion_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.tau[i].is_finite())
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Number of distinct samples (the duplicated endpoint of periodic data excluded).
    pub fn distinct(&self) -> usize {
        if self.periodic {
            self.len() - 1
        } else {
            self.len()
        }
    }
}

/// Signed curvature, torsion and frame estimates for sampled points.
///
/// The global sign makes the curvature positive at its largest magnitude.
/// Torsion uses stencils of stride [`auto_stride`] to keep the roundoff of
/// the third derivative in check on fine grids.
pub fn curve_estimates(params: &[f64], points: &[Vec3], periodic: bool) -> Result<CurveEstimates> {
    let distinct = points.len() - usize::from(periodic && !points.is_empty());
    curve_estimates_strided(params, points, periodic, auto_stride(distinct))
}

/// [`curve_estimates`] with an explicit stride for the torsion stencils.
pub fn curve_estimates_strided(
    params: &[f64],
    points: &[Vec3],
    periodic: bool,
    stride: usize,
) -> Result<CurveEstimates> {
    let d = curve_derivatives(params, points, periodic)?;
    let coarse = if stride == 1 { d.clone() } else { curve_derivatives_strided(params, points, periodic, stride)? };
    let n = points.len();
    let speed: Vec<f64> = if periodic {
        d.d1.iter().map(|v| v.norm()).collect()
    } else {
        first_derivative_clamped(params, points)?.iter().map(|v| v.norm()).collect()
    };
    let mut est = CurveEstimates {
        params: params.to_vec(),
        arclength: cumulative_trapezoid_scalar(params, &speed),
        speed,
        kappa: vec![f64::NAN; n],
        tau: vec![f64::NAN; n],
        tangent: vec![Vec3::zeros(); n],
        normal: vec![Vec3::zeros(); n],
        binormal: vec![Vec3::zeros(); n],
        valid: d.valid.clone(),
        periodic,
        stride,
    };
    let mut unsigned = vec![f64::NAN; n];
    let mut raw_binormal = vec![Vec3::zeros(); n];
    for i in (0..n).filter(|&i| d.valid[i]) {
        let c = d.d1[i].cross(&d.d2[i]);
        let sp = d.d1[i].norm();
        est.tangent[i] = d.d1[i] / sp;
        unsigned[i] = c.norm() / (sp * sp * sp);
        if c.norm() > 0.0 {
            raw_binormal[i] = c / c.norm();
        }
    }
    let kmax = unsigned.iter().copied().filter(|k| k.is_finite()).fold(0.0, f64::max);
    if kmax == 0.0 {
        return Err(Error::validation("curve is straight: curvature vanishes at every sample"));
    }
    for i in (0..n).filter(|&i| coarse.valid[i] && unsigned[i] >= TORSION_CUTOFF * kmax) {
        let c = d.d1[i].cross(&d.d2[i]);
        est.tau[i] = c.dot(&coarse.d3[i]) / c.norm_squared();
    }
    // transport the binormal; a flip of the raw binormal marks an inflection
    let mut reference: Option<Vec3> = None;
    let mut argmax = None;
    for i in (0..n).filter(|&i| d.valid[i]) {
        if unsigned[i] <= INFLECTION_DEAD_BAND * kmax {
            est.kappa[i] = 0.0;
            est.binormal[i] = reference.unwrap_or(raw_binormal[i]);
            continue;
        }
        let sigma = match reference {
            Some(r) if raw_binormal[i].dot(&r) < 0.0 => -1.0,
            _ => 1.0,
        };
        est.kappa[i] = sigma * unsigned[i];
        est.binormal[i] = raw_binormal[i] * sigma;
        reference = Some(est.binormal[i]);
        if argmax.is_none_or(|j: usize| unsigned[i] > unsigned[j]) {
            argmax = Some(i);
        }
    }
    if let Some(j) = argmax {
        if est.kappa[j] < 0.0 {
            est.kappa.iter_mut().for_each(|k| *k = -*k);
            est.binormal.iter_mut().for_each(|b| *b = -*b);
        }
    }
    for i in (0..n).filter(|&i| d.valid[i]) {
        est.normal[i] = est.binormal[i].cross(&est.tangent[i]);
    }
    Ok(est)
}

/// Flips every sign so that the sample `i` has positive curvature.
pub fn orient_curvature(est: &mut CurveEstimates, i: usize, positive: bool) {
    if (est.kappa[i] > 0.0) != positive {
        est.kappa.iter_mut().for_each(|k| *k = -*k);
        est.binormal.iter_mut().for_each(|b| *b = -*b);
        est.normal.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Whether a polyline closes up to [`PERIODIC_GAP_TOL`] relative to its size.
pub fn looks_periodic(line: &Polyline) -> bool {
    line.closure_gap() <= PERIODIC_GAP_TOL * line.extent().max(1.0)
}

/// Strict sign changes, ignoring values within the dead-band and invalid samples.
///
/// With `cyclic`, the last counted value is compared with the first as well.
pub fn count_sign_changes(values: &[f64], cyclic: bool) -> usize {
    let scale = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let signs: Vec<bool> =
        values.iter().filter(|v| v.is_finite() && v.abs() > INFLECTION_DEAD_BAND * scale).map(|v| *v > 0.0).collect();
    let mut count = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if cyclic && signs.len() > 1 && signs[0] != signs[signs.len() - 1] {
        count += 1;
    }
    count
}

/// Discrete curvature and torsion summary of a curve.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub samples: usize,
    pub periodic: bool,
    pub length: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// `(s, τ̂)` at every sample where torsion is defined.
    pub tau_samples: Vec<(f64, f64)>,
    /// Target torsion when the curve carries one, else the mean.
    pub tau_reference: f64,
    pub tau_mean: f64,
    /// Largest `|τ̂ − τ_reference|`.
    pub tau_max_dev: f64,
    pub inflection_count: usize,
    /// Samples where torsion was excluded because curvature is nearly zero.
    pub degenerate_samples: usize,
    pub identity_residuals: BTreeMap<String, f64>,
    #[serde(skip)]
    pub estimates: CurveEstimates,
}

/// Analyzes a polyline, treating it as periodic when it closes.
pub fn estimate_curvature_torsion(line: &Polyline) -> Result<AnalysisReport> {
    estimate_with(line, looks_periodic(line))
}

/// Analyzes a polyline with an explicit periodicity choice.
pub fn estimate_with(line: &Polyline, periodic: bool) -> Result<AnalysisReport> {
    let est = curve_estimates(&line.params, &line.points, periodic)?;
    Ok(report_from(est, line.torsion))
}

pub(crate) fn report_from(est: CurveEstimates, target: Option<f64>) -> AnalysisReport {
    let m = est.distinct();
    let kappas: Vec<f64> = est.kappa[..m].iter().copied().filter(|k| k.is_finite()).collect();
    let tau_samples: Vec<(f64, f64)> =
        est.torsion_indices().filter(|&i| i < m).map(|i| (est.arclength[i], est.tau[i])).collect();
    let tau_mean = if tau_samples.is_empty() {
        f64::NAN
    } else {
        tau_samples.iter().map(|p| p.1).sum::<f64>() / tau_samples.len() as f64
    };
    let tau_reference = target.unwrap_or(tau_mean);
    let tau_max_dev = tau_samples.iter().map(|p| (p.1 - tau_reference).abs()).fold(0.0, f64::max);
    let degenerate = (0..m).filter(|&i| est.valid[i] && !est.tau[i].is_finite()).count();
    AnalysisReport {
        samples: est.len(),
        periodic: est.periodic,
        length: est.arclength[est.len() - 1],
        kappa_min: kappas.iter().copied().fold(f64::INFINITY, f64::min),
        kappa_max: kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        tau_samples,
        tau_reference,
        tau_mean,
        tau_max_dev,
        inflection_count: count_sign_changes(&est.kappa[..m], est.periodic),
        degenerate_samples: degenerate,
        identity_residuals: BTreeMap::new(),
        estimates: est,
    }
}
