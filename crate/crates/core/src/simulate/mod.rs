//! Forward sampling from the generative reading of a disease tree, and exact
//! enumeration of the same model for small trees.
//!
//! Random streams come from ChaCha8 seeded with the dataset seed, one stream
//! per case index, so any case can be replayed from `(seed, case_id)`.

mod dataset;
mod enumerate;
mod sample;

pub use dataset::{generate_dataset, mask_findings, read_cases, write_cases, DatasetConfig, PatientDistribution};
pub use enumerate::{
    enumerate_joint, enumerate_joint_with, enumerate_two_time, JointDistribution, MAX_ENUMERATION_VARS,
};
pub use sample::{sample_case, sample_case_in_stream, sample_world, CaseRecord, NodeHistory, SampledWorld};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every sampled case.
pub fn case_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
