//! Numerical laboratory for time-frequency concentration operators: Galerkin
//! spectra, geometric regularity constants, spectral deviation bounds and
//! the closed-form Gaussian-disk oracle.

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod field;
pub mod geometry;
pub mod operator;
pub mod quadrature;
pub mod special;
pub mod stats;
pub mod window;

pub use analytic::{AnalyticModel, AnalyticSpectrum, Regime, SharpnessFit};
pub use bounds::{BoundId, BoundParams, BoundReport, ConstantFit, Envelope, GsConstant};
pub use error::{Error, Result};
pub use field::SampledField;
pub use geometry::{Domain, GeometrySummary, QuadSpec, Shape};
pub use operator::{OperatorMatrix, OperatorMetadata, Spectrum};
pub use stats::CountingReport;
pub use window::{AmbiguityTable, Window, WindowConstants, WindowKind};
