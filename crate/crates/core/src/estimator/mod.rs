//! Monte Carlo estimation: scheme presets, the gridded-posterior simulator,
//! the canonical measurement and scaling scans.

pub mod canonical;
pub mod scan;
pub mod scheme;
pub mod simulate;
pub mod stats;

pub use canonical::{canonical_sample, CanonicalReport};
pub use scan::{scaling_scan, FitKind, ScanConfig, ScanReport};
pub use scheme::{preset, Component, ProcessingOrder, SchemeSpec};
pub use simulate::{simulate, EstimationReport, PointEstimate, Policy, SimulationConfig, TrialRecord};
