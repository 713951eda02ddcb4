//! Fitting a circular helix to sampled points.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::frames::Vec3;

/// Axis, radius and pitch (rise per radian) of a circular helix.
#[derive(Debug, Clone, Copy)]
pub struct HelixFit {
    pub axis: Vec3,
    /// A point on the axis.
    pub center: Vec3,
    pub radius: f64,
    /// Axial rise per radian of turning, `τ/(κ² + τ²)` for a helix.
    pub pitch: f64,
    /// Largest deviation of a sample from the fitted cylinder.
    pub max_radial_residual: f64,
}

/// Fits a helix to points sampled along it.
///
/// The axis is the direction least represented in the chord directions (all
/// chords of a helix make the same angle with its axis); the cross-section
/// is an algebraic circle fit and the pitch a linear fit of height against
/// the unwrapped polar angle.
pub fn fit_helix(points: &[Vec3]) -> Result<HelixFit> {
    if points.len() < 8 {
        return Err(Error::validation("need at least 8 points to fit a helix"));
    }
    let chords: Vec<Vec3> = points.windows(2).filter_map(|w| (w[1] - w[0]).try_normalize(0.0)).collect();
    let mean = chords.iter().sum::<Vec3>() / chords.len() as f64;
    let cov = chords.iter().fold(Matrix3::zeros(), |acc, c| acc + (c - mean) * (c - mean).transpose());
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let mut axis: Vec3 = eig.eigenvectors.column(k).into_owned();
    if axis.dot(&mean) < 0.0 {
        axis = -axis;
    }
    // orthonormal basis of the cross-section plane
    let e1 = axis.cross(&if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() }).normalize();
    let e2 = axis.cross(&e1);
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.dot(&e1), p.dot(&e2))).collect();
    // x² + y² + D x + E y + F = 0
    let n = xy.len();
    let a = DMatrix::from_fn(n, 3, |i, j| [xy[i].0, xy[i].1, 1.0][j]);
    let rhs = DVector::from_fn(n, |i, _| -(xy[i].0 * xy[i].0 + xy[i].1 * xy[i].1));
    let sol = a.svd(true, true).solve(&rhs, 1e-14).map_err(|e| Error::validation(e.to_string()))?;
    let (cx, cy) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cx * cx + cy * cy - sol[2];
    if !(r2 > 0.0) {
        return Err(Error::validation("degenerate cross-section: points are collinear"));
    }
    let radius = r2.sqrt();
    let max_radial_residual = xy.iter().map(|(x, y)| ((x - cx).hypot(y - cy) - radius).abs()).fold(0.0, f64::max);
    // unwrapped polar angle against height
    let mut theta = Vec::with_capacity(n);
    let mut prev = 0.0;
    for (i, (x, y)) in xy.iter().enumerate() {
        let raw = (y - cy).atan2(x - cx);
        let t = if i == 0 {
            raw
        } else {
            prev + (raw - prev + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI
        };
        theta.push(t);
        prev = t;
    }
    let h: Vec<f64> = points.iter().map(|p| p.dot(&axis)).collect();
    let (tm, hm) = (theta.iter().sum::<f64>() / n as f64, h.iter().sum::<f64>() / n as f64);
    let stt: f64 = theta.iter().map(|t| (t - tm) * (t - tm)).sum();
    if stt == 0.0 {
        return Err(Error::validation("points do not turn about the fitted axis"));
    }
    let sth: f64 = theta.iter().zip(&h).map(|(t, y)| (t - tm) * (y - hm)).sum();
    Ok(HelixFit { axis, center: e1 * cx + e2 * cy, radius, pitch: (sth / stt).abs(), max_radial_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_a_tilted_helix() {
        let rot = crate::frames::rot_x(0.7) * crate::frames::rot_z(0.2);
        let pts: Vec<Vec3> = (0..400)
            .map(|i| {
                let t = i as f64 * 0.05;
                rot.apply(&Vec3::new(2.0 * t.cos(), 2.0 * t.sin(), 0.3 * t)) + Vec3::new(1.0, -1.0, 4.0)
            })
            .collect();
        let fit = fit_helix(&pts).unwrap();
        assert_abs_diff_eq!(fit.radius, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.pitch, 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.axis.dot(&rot.apply(&Vec3::z())).abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_a_straight_line() {
        let pts: Vec<Vec3> = (0..20).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        assert!(fit_helix(&pts).is_err());
    }
}
