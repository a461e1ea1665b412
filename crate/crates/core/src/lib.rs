//! Quantum measurement correlations of n-particle spin-s cat states
//! `c1|+s⟩^⊗n + c2|−s⟩^⊗n`, the generalized Bell-like inequality (GBI) built
//! from 2n−1 measuring directions, and numerical search for its violation.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; file formats, the command line and thread-level
//! parallelism live in the `gbi` companion crate.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products, Hermitian
//!   eigendecomposition (cyclic Jacobi).
//! - [`spin`]: spin-s operators, projections `ŝ·r`, spin coherent states in
//!   the north/south-pole gauges, full rotated eigenbases.
//! - [`states`]: the cat state and its local/non-local density split.
//! - [`correlation`]: brute-force oracle, restricted (SCS-subspace)
//!   statistics and closed forms.
//! - [`gbi`]: window products, `p_GB`, analytic maximum configurations,
//!   multi-start violation search, parity scans.
//! - [`lhv`]: Monte-Carlo local hidden-variable models checked against the
//!   same inequality.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod correlation;
pub mod error;
pub mod gbi;
pub mod lhv;
pub mod linalg;
pub mod optimize;
pub mod sampling;
pub mod spin;
pub mod states;

pub use correlation::{
    berry_phase_factor, closed_form_breakdown, closed_form_local, closed_form_nonlocal,
    closed_form_subspace_norm, correlation_oracle_full, correlation_restricted,
    CorrelationBreakdown, MeasurementMode, OutcomeBasis,
};
pub use error::{Error, Result};
pub use gbi::{
    analytic_max_config, evaluate_gbi, maximize_violation, parity_scan, windows, AnalyticConfig,
    DirectionSet, Functional, GbiReport, Maximum, OptimizerConfig, ScanRow, SearchSpace,
    ViolationSearch, Windows, VIOLATION_THRESHOLD,
};
pub use lhv::{
    local_part_is_lhv, lhv_correlation, verify_appendix_bound, AppendixCheck, LhvEstimate,
    LhvModel, LocalPartReport,
};
pub use linalg::{ComplexMatrix, DimCap, StateVector, C64};
pub use spin::{Direction, HalfInteger, ScsPair};
pub use states::{CatState, DensityParts};
