//! Two-armed fixed-budget best-arm identification.
//!
//! The crate simulates adaptive experiments that allocate samples by the
//! (estimated) Neyman ratio `σ(1)/(σ(1)+σ(2))`, recommend an arm with the AIPW
//! mean estimator, and compares the resulting simple regret against the
//! closed-form minimax constant `(σ(1)+σ(2))/√e`.
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod cli;
pub mod distributions;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod policies;
pub mod rng;
pub mod scalar;
pub mod theory;
pub mod verify;

pub use distributions::{kl_divergence, lower_bound_alternative, Arm, Family, Instance, Marginal};
pub use engine::{
    consistency_curve, run_trial, simulate_trial, sweep_worst_case, ConsistencyRow, Experiment, MCReport, MonteCarlo,
    SweepRow, SweepTable, TrialConfig, TrialResult,
};
pub use error::{Error, Result};
pub use estimators::{
    aipw_estimate, estimate, ipw_estimate, martingale_residuals, recommend, sample_mean_estimate, EstimatorKind,
    EstimatorOutput, RoundRecord,
};
pub use policies::{AllocationState, ArmStats, PolicyConfig, Selection};
pub use rng::RngState;
pub use scalar::Scalar;
pub use theory::{BernoulliConstants, BoundReport, TransportationReport};

pub type Marginal64 = Marginal<f64>;
pub type Instance64 = Instance<f64>;
pub type PolicyConfig64 = PolicyConfig<f64>;
pub type AllocationState64 = AllocationState<f64>;
pub type RoundRecord64 = RoundRecord<f64>;
pub type EstimatorOutput64 = EstimatorOutput<f64>;
pub type Experiment64 = Experiment<f64>;
pub type TrialConfig64 = TrialConfig<f64>;
pub type TrialResult64 = TrialResult<f64>;
pub type MCReport64 = MCReport<f64>;
pub type SweepTable64 = SweepTable<f64>;
pub type BoundReport64 = BoundReport<f64>;

pub type Marginal32 = Marginal<f32>;
pub type Instance32 = Instance<f32>;
pub type PolicyConfig32 = PolicyConfig<f32>;
pub type Experiment32 = Experiment<f32>;
pub type MCReport32 = MCReport<f32>;
