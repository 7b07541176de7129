//! Empirical complexity estimation for sorting experiments.
//!
//! The pipeline is: generate seeded inputs ([`workloads`]), sort them with an
//! instrumented quicksort ([`sortlab`]), replicate over a size grid
//! ([`harness`]), fit candidate growth models with full diagnostics
//! ([`statfit`]) and turn the fits into a complexity label ([`verdict`]).

pub mod cli;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod sortlab;
pub mod statfit;
pub mod table;
pub mod verdict;
pub mod workloads;

pub use error::{Error, Result};
pub use harness::{run_experiment, sweep_k, Family, ResponseMode, TrialPolicy, WorkloadSpec};
pub use sortlab::{quicksort_instrumented, weighted_cost, OperationCounts, WeightVector};
pub use statfit::{fit_ols, t_two_sided_p, RegressionFit, Term, TermSet};
pub use table::{ResponseRow, ResponseTable};
pub use verdict::{detect_pseudo_linear, select_model, ComplexityVerdict, Label, SelectionPolicy};
pub use workloads::Seed;
