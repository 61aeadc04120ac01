//! Exact computation of the discrete-time parabolic Anderson polymer.
//!
//! A lazy nearest-neighbour walk on `Z^d` (`d <= 3`) is rewarded by a Pareto
//! potential `xi`; the quenched polymer measure weights a trajectory by
//! `exp(xi(S_1) + ... + xi(S_N))`. This crate computes that measure exactly
//! with a log-domain transfer recursion, samples paths from it, decodes its
//! maximum-weight path and evaluates the localization diagnostics built on
//! top of the modified field `psi_N(x) = (1 - |x|/(N+1)) xi(x)`.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled; IO, CLI and the Monte Carlo harness live in the `pamlab` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod field;
pub mod kernel;
pub mod lattice;
pub mod logspace;
pub mod math;
pub mod oracle;
pub mod path;
pub mod polymer;
pub mod rng;
pub mod scenario;
pub mod stats;

pub use error::{Error, Result};
pub use field::{
    gap_diagnostics, modified_field_stats, order_statistics, sample_pareto_field,
    FieldRealization, GapReport, ModifiedFieldStats, OrderStats,
};
pub use kernel::{make_kernel, WalkKernel};
pub use lattice::{enumerate_ball, BallIndex, LatticeSite};
pub use oracle::{compare_dp_vs_oracle, enumerate_paths, Discrepancy, EnumerationResult};
pub use path::{
    classify_path, estimate_event_probability, h_n, sample_path, viterbi_path, EventEstimate,
    EventFlags, PathClassifier, PathSample, PathSampler,
};
pub use polymer::{
    comparator_1d, endpoint_law, final_front, forward_recursion, localization_mass,
    ComparatorChoice, EndpointLaw, Fronts, LocalizationMass, LogWeightFront,
};
pub use scenario::{build_appendix_d_scenario, detect_switch, ScenarioField, SwitchReport};
