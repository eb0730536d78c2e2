use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Geometric predicates (tracelessness, membership, coherence).
    pub geom: f64,
    /// `|det - 1|` accepted by the unimodular constructors.
    pub det: f64,
    /// `|tr^2 - 4|` below which an element counts as parabolic.
    pub parabolic: f64,
    /// Relative singular value threshold for numerical rank.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            geom: 1e-9,
            det: 1e-12,
            parabolic: 1e-8,
            rank: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn with_geom(mut self, geom: f64) -> Self {
        self.geom = geom;
        self
    }
}
