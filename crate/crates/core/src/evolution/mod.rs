//! Limiting-absorption evolution, endpoint checks and decay fits.

mod fit;
mod lap;
mod series;
mod spectral;

pub use fit::{fit_decay, DEFAULT_FIT_WINDOW, MIN_FIT_SAMPLES};
pub use lap::{boundary_lap_check, lap_integrand, EndpointRow, LapIntegrand, LapTable, LapVerdict};
pub use series::{EvolutionSeries, Fit, Norms, Quantity, Snapshot};
pub use spectral::{evolve_spectral, evolve_spectral_report, velocity_fields, QuadSpec, SpectralRun};
