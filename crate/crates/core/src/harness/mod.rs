//! Scenario-driven Monte Carlo: BER curves, SNR thresholds, CSV and plots.

pub mod config;
mod engine;
pub mod plot;
pub mod presets;
pub mod report;
mod snr_th;

pub use config::ScenarioConfig;
pub use engine::{estimate_counts, BerCurve, BerPoint, Budget, Counts, RateEstimate, Scenario, TrialRunner, Z95};
pub use presets::{preset, run_preset, Preset, PresetOptions, PRESETS};
pub use report::{load_rows, save_curve, write_curve, CSV_HEADER};
pub use snr_th::{check_monotone, crossing, find_snr_th, SnrThResult};
