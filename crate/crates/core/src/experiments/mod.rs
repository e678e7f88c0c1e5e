//! Rate sweeps, bound suites, regime calibration and reports.

pub mod calibrate;
pub mod report;
pub mod sampling;
pub mod suite;
pub mod sweep;

pub use calibrate::{calibrate_regimes, Calibration, CalibrationGrid};
pub use report::{emit_report, load_csv, Format, Table};
pub use suite::{run_bound_suite, BoundEntry, Suite, SuiteReport};
pub use sweep::{run_rate_sweep, Approximant, OracleChoice, PathFamily, RateFit, RegimeBounds, SweepSpec};
