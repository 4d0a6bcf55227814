//! Conditional risk measures on finite probability spaces and sampled checks
//! of their monotonicity, translativity, locality and (quasi)convexity
//! properties.

pub mod checks;
pub mod dual;
pub mod io;
pub mod measures;
pub mod space;

pub use checks::{
    check_assumption_nonconstant, check_convexity, check_locality, check_monotonicity, check_natural_quasiconvexity,
    check_quasiconvexity, check_sensitivity, check_star_quasiconvexity, check_translativity, default_epsilons,
    default_events, replay_witness, sample_triples, CheckConfig, LocalityForm, PropertyReport, PropertyVerdict,
    RiskWitness, Triple,
};
pub use dual::{dual_directions, nqc_mu_interval, separating_dual_witness, DualWitness, MuInterval};
pub use io::{parse_partition, parse_scenario, Scenario};
pub use measures::{MapFn, RiskMeasure};
pub use space::{atom_means, conditional_expectation, FiniteProbSpace, PartitionSigma, RandomVariable};
