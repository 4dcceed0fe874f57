//! Likelihoods and posteriors over the disease pool.

mod coherency;
mod hood;
mod posterior;
mod temporal;

pub use coherency::{coherency_report, path_likelihood, CoherencyRow};
pub use hood::{external_only_likelihood, external_only_with, hood_basic, hood_rev, hood_rev_with};
pub use posterior::{posterior, posterior_with_priors, Decomposition, PosteriorReport};
pub use temporal::{
    temporal_pattern_probs, two_time_hood, two_time_posterior, two_time_posterior_with_priors, PatternProbabilities,
};

pub(crate) use posterior::assemble;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;

/// Observed status of one symptom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finding {
    Present,
    Absent,
    #[default]
    Unknown,
}

impl Finding {
    pub fn is_known(self) -> bool {
        self != Finding::Unknown
    }

    /// Whether an observed present/absent state is consistent with this finding.
    pub fn admits(self, present: bool) -> bool {
        match self {
            Finding::Present => present,
            Finding::Absent => !present,
            Finding::Unknown => true,
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Finding::Present => "present",
            Finding::Absent => "absent",
            Finding::Unknown => "unknown",
        })
    }
}

/// Symptom findings taken at one time. Unlisted symptoms are unknown.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FindingSet {
    /// Hours since onset at which the findings were taken.
    pub measurement_time: f64,
    pub values: BTreeMap<String, Finding>,
}

impl FindingSet {
    pub fn new(measurement_time: f64) -> Self {
        Self { measurement_time, values: BTreeMap::new() }
    }

    pub fn with(mut self, symptom_id: impl Into<String>, value: Finding) -> Self {
        self.set(symptom_id, value);
        self
    }

    pub fn set(&mut self, symptom_id: impl Into<String>, value: Finding) {
        self.values.insert(symptom_id.into(), value);
    }

    pub fn get(&self, symptom_id: &str) -> Finding {
        self.values.get(symptom_id).copied().unwrap_or_default()
    }

    pub fn known_count(&self) -> usize {
        self.values.values().filter(|v| v.is_known()).count()
    }

    /// Every listed symptom must exist in `kb`, and the time must be non-negative.
    pub fn check(&self, kb: &KnowledgeBase) -> Result<()> {
        if !self.measurement_time.is_finite() || self.measurement_time < 0.0 {
            return Err(Error::InvalidFindings(format!("measurement time {} must be >= 0", self.measurement_time)));
        }
        for id in self.values.keys() {
            if kb.symptom(id).is_none() {
                return Err(Error::UnknownSymptom {
                    id: id.clone(),
                    context: format!("finding at t = {} h", self.measurement_time),
                });
            }
        }
        Ok(())
    }
}
