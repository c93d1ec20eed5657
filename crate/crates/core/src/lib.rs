//! Geometric discord and negativity of bipartite quantum states.
//!
//! States live on `C^m (x) C^n` with `2 <= m <= n`. The crate provides
//!
//! * [`matrix`]: dense complex matrices, partial transpose and trace, Jacobi spectra;
//! * [`generators`]: Pauli, Gell-Mann and generalized Gell-Mann bases;
//! * [`bloch`]: the Bloch form `(x, y, T)` and the matrix `G`;
//! * [`measures`]: negativity, geometric discord (exact for `m = 2`), a
//!   brute-force measurement oracle, pure-state formulas and bound checks;
//! * [`families`]: four `2 x 3` families with `D < N^2`;
//! * [`stateio`], [`sweep`], [`sampling`]: state files, CSV sweeps and
//!   Monte-Carlo runs used by the command-line tool.

pub mod bloch;
pub mod error;
pub mod families;
pub mod generators;
pub mod matrix;
pub mod measures;
pub mod sampling;
pub mod state;
pub mod stateio;
pub mod sweep;

pub use bloch::{decompose, g_matrix, reconstruct, BlochForm, GMatrix};
pub use error::{Error, Result, StateViolation};
pub use families::{build, rho1_closed_forms, violates, Family, FamilySpec, RangePolicy};
pub use generators::{basis_for, GeneratorBasis};
pub use matrix::{ComplexMatrix, RealMatrix, Spectrum};
pub use measures::{
    bounds_check, gd_bruteforce_2xn, gd_lower_bound, geometric_discord, maximal_state, measure_report,
    measurement_identity_check, negativity, pt_negative_count, pure_gd, pure_negativity, schmidt, Discord,
    MeasureReport,
};
pub use num_complex::Complex64;
pub use sampling::{sample, verify, Ensemble, SampleSummary, VerifyReport};
pub use state::{DensityMatrix, PureState};
pub use stateio::StateFile;
pub use sweep::{sweep, SweepConfig, SweepRow};
