//! Convergence sweeps over `eps`, rate fits, reports and the command line.

mod cli;
mod config;
mod fit;
mod report;
mod selftest;
mod sweeps;

pub use cli::{evolve, run_cli, EXIT_ERROR, EXIT_OK, EXIT_VERDICT};
pub use config::{
    data_profile, time_profile, CellSection, CoeffSection, CorrectorSection, DataProfile, DataSection, DomainSection,
    LatticeSection, MeshSection, OutputSection, SweepConfig, SweepSection,
};
pub use fit::{fit_rate, RateFit};
pub use report::{Estimate, RateReport, Verdict, EXACT_LEVEL, MIN_POINTS};
pub use selftest::{run_selftest, Fixture, FIXTURES};
pub use sweeps::{
    convergence_sweep, cosine_corrector_sweep, random_data, resolvent_sweep, Case, Study, FORCING_DT, H1_THRESHOLD,
    L2_THRESHOLD, RESOLVENT_MODES, ZERO_CORRECTOR,
};
