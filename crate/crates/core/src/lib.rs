//! Gauge functions, potential theory and Gaussian-field tools for studying hitting
//! probabilities of anisotropic Gaussian random fields, with the linear fractional
//! heat equation as the worked model.

pub mod derived;
pub mod error;
pub mod gauge;
pub mod heat;
pub mod lambert;
pub mod mc;
pub mod potential;
pub mod quadrature;
pub mod scalar;
pub mod special;

pub use derived::{DerivedGauge, GaugeKind, GrowthReport, MonotoneReport};
pub use error::{Error, Result};
pub use gauge::{GaugeFamily, GaugeSpec};
pub use scalar::Real;

/// Gauge function in double precision.
pub type Gauge = GaugeSpec<f64>;
/// Derived gauge (single or two-gauge) in double precision.
pub type PairGauge = DerivedGauge<f64>;
