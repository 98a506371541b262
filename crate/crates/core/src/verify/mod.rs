//! Measurement instruments for weak neutrality.

pub mod crosscheck;
pub mod decay;
pub mod gap;
pub mod geometry;
pub mod invariance;
pub mod suite;

pub use crosscheck::{oracle_crosscheck, sample_annulus, CrossCheck};
pub use decay::{farfield_decay, DecayFit};
pub use gap::{neutrality_gap, NeutralityGap};
pub use geometry::{best_fit_residual, ellipsoid_residual, BoundarySample, GeometryResidual, SurfaceSpec};
pub use invariance::{pt_invariance, Invariance};
pub use suite::{run_suite, Check, SuiteConfig, SuiteReport};
