//! The three template-aware pair features.

use serde::{Deserialize, Serialize};

use crate::vectorspace::{cosine, SparseVector};

/// Feature names in classifier order.
pub const FEATURE_NAMES: [&str; 3] = ["sim_ab", "sim_at", "sim_bt"];

/// Similarities for one submission pair, always in the order
/// `(sim_ab, sim_at, sim_bt)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairFeatures {
    /// Student A vs student B.
    pub sim_ab: f64,
    /// Student A vs template.
    pub sim_at: f64,
    /// Student B vs template.
    pub sim_bt: f64,
}

impl PairFeatures {
    pub fn new(sim_ab: f64, sim_at: f64, sim_bt: f64) -> Self {
        PairFeatures {
            sim_ab,
            sim_at,
            sim_bt,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.sim_ab, self.sim_at, self.sim_bt]
    }

    pub fn get(&self, index: usize) -> f64 {
        self.as_array()[index]
    }

    /// Same pair seen from B's side.
    pub fn swapped(&self) -> Self {
        PairFeatures::new(self.sim_ab, self.sim_bt, self.sim_at)
    }
}

impl From<[f64; 3]> for PairFeatures {
    fn from(v: [f64; 3]) -> Self {
        PairFeatures::new(v[0], v[1], v[2])
    }
}

/// Vectors must come from the same fitted model. Pass the empty vector as
/// `template` when the course has no starter code; both template features are
/// then zero.
pub fn extract_pair_features(
    a: &SparseVector,
    b: &SparseVector,
    template: &SparseVector,
) -> PairFeatures {
    PairFeatures {
        sim_ab: cosine(a, b),
        sim_at: cosine(a, template),
        sim_bt: cosine(b, template),
    }
}
