//! Brute-force oracles, diagnostic statistics and the experiment harness.

pub mod annulus_run;
pub mod experiment;
pub mod idim;
pub mod oracle;
pub mod summary;
pub mod tails;

pub use annulus_run::{
    plant_annulus_instance, run_annulus_experiment, AnnulusExperimentConfig, AnnulusReport,
    AnnulusWorkload, PlantedInstance,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutput, ExperimentRecord, Variant};
pub use idim::rho_statistic;
pub use oracle::{brute_annulus, brute_furthest};
pub use summary::{nearest_rank, summarize, SummaryRow};
pub use tails::{lemma3_montecarlo, solve_t, TailCheckReport};
