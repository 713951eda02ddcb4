//! Closed space curves of constant torsion built from spherical epicycles,
//! with numerical certificates for their geometry.
//!
//! The binormal indicatrix `B` of a curve of constant torsion `τ` determines
//! the curve through `γ = (1/τ)∫ B × B′`; choosing `B` among spherical
//! epicycles and solving for the cone angle that closes the integral yields
//! closed curves. The analysis modules estimate curvature and torsion of the
//! samples and check the identities such curves must satisfy.
//!
//! ```
//! use constant_torsion::analysis::estimate_curvature_torsion;
//! use constant_torsion::closure::build_closed_ct_curve;
//!
//! let curve = build_closed_ct_curve(1, -3, std::f64::consts::FRAC_PI_4, 1.0, 4096).unwrap();
//! assert!(curve.report.closure_gap < 1e-6);
//! let report = estimate_curvature_torsion(&curve.gamma).unwrap();
//! assert!((report.tau_mean - 1.0).abs() < 1e-4 && report.kappa_min > 0.0);
//! ```

// Input checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod closure;
pub mod darboux;
pub mod epicycle;
pub mod error;
pub mod frames;
pub mod frenet;
pub mod io;
pub mod numerics;
pub mod spherical_ct;
