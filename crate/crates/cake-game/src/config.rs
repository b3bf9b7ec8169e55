//! JSON configuration for single runs and sweeps, plus the random-instance
//! sampler used by sweeps and the test batteries.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Choice, GameMode};
use crate::strategies::alice::AliceTieBreak;
use crate::valuation::Valuation;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {}", fields.join("; "))]
    Invalid { fields: Vec<String> },
}

/// Which piece the truthful Bob takes when both are worth exactly half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MyopicTie {
    L,
    R,
    #[serde(rename = "toward-alice")]
    TowardAlice,
    #[serde(rename = "seeded-random")]
    SeededRandom,
}

/// Fictitious-play Bob's rule when the value balance is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BobTie {
    L,
    R,
    #[serde(rename = "seeded-random")]
    SeededRandom,
}

fn default_myopic_tie() -> MyopicTie {
    MyopicTie::L
}

fn default_bob_tie() -> BobTie {
    BobTie::L
}

fn default_alice_tie() -> AliceTieBreak {
    AliceTieBreak::CutZero
}

fn default_n_max() -> usize {
    6
}

fn default_eps_root() -> f64 {
    1e-12
}

/// Alice strategy selector. The `kind` tag matches the CLI vocabulary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AliceSpec {
    BinarySearch,
    /// `alpha` present: tuned for a deceptive opponent lying on a known
    /// budget exponent. Absent: the opponent-agnostic schedule.
    ExploreCommit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
    },
    Blackwell {
        #[serde(default = "default_n_max")]
        n_max: usize,
        #[serde(default = "default_eps_root")]
        eps_root: f64,
    },
    Fictitious {
        #[serde(default = "default_alice_tie")]
        tie_break: AliceTieBreak,
    },
    Fixed {
        x: f64,
    },
}

/// Bob strategy selector. The `kind` tag matches the CLI vocabulary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BobSpec {
    Myopic {
        #[serde(default = "default_myopic_tie")]
        tie_break: MyopicTie,
    },
    Deceptive {
        alpha: f64,
    },
    ThresholdSwitch {
        r: f64,
        beta: f64,
    },
    IntervalAlternating,
    Random,
    Fictitious {
        #[serde(default = "default_bob_tie")]
        tie_break: BobTie,
    },
    RemarkUnboundedFaker {
        alpha: f64,
    },
    Fixed {
        choice: Choice,
    },
}

/// File names for the run artifacts; all optional, resolved against the
/// output directory (the `dir` field, else `CAKE_GAME_OUTPUT_DIR`, else the
/// working directory).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spiral: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    /// Emit the per-round alpha/beta/rho series as CSV.
    #[serde(default)]
    pub spiral: bool,
    /// Emit the balancing strategy's per-round imbalance as CSV.
    #[serde(default, rename = "blackwell-delta")]
    pub blackwell_delta: bool,
}

/// One full game: who plays, on what valuations, for how long.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: GameMode,
    #[serde(rename = "T")]
    pub t_rounds: usize,
    pub seed: u64,
    pub alice: AliceSpec,
    pub bob: BobSpec,
    #[serde(rename = "vA")]
    pub v_alice: Valuation,
    #[serde(rename = "vB")]
    pub v_bob: Valuation,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-level checks beyond what deserialization enforces. Collects
    /// every offense rather than stopping at the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut fields = Vec::new();
        if self.t_rounds == 0 {
            fields.push("T: must be at least 1".to_string());
        }
        match &self.alice {
            AliceSpec::ExploreCommit { alpha: Some(a) } if !(0.0..1.0).contains(a) => {
                fields.push(format!("alice.alpha: {a} outside [0, 1)"));
            }
            AliceSpec::Blackwell { n_max, eps_root } => {
                if !(crate::blackwell::MIN_RESOLUTION..=crate::blackwell::MAX_RESOLUTION)
                    .contains(n_max)
                {
                    fields.push(format!("alice.n_max: {n_max} outside [2, 12]"));
                }
                if !(eps_root.is_finite() && *eps_root > 0.0) {
                    fields.push(format!("alice.eps_root: {eps_root} not a positive number"));
                }
            }
            AliceSpec::Fixed { x } if !(x.is_finite() && (0.0..=1.0).contains(x)) => {
                fields.push(format!("alice.x: {x} outside [0, 1]"));
            }
            _ => {}
        }
        match &self.bob {
            BobSpec::Deceptive { alpha } | BobSpec::RemarkUnboundedFaker { alpha }
                if !(0.0..1.0).contains(alpha) =>
            {
                fields.push(format!("bob.alpha: {alpha} outside [0, 1)"));
            }
            BobSpec::ThresholdSwitch { r, beta } => {
                if !(r.is_finite() && *r >= 0.0) {
                    fields.push(format!("bob.r: {r} not a nonnegative number"));
                }
                if !beta.is_finite() {
                    fields.push(format!("bob.beta: {beta} not finite"));
                }
            }
            _ => {}
        }
        if let Some(required) = self.required_mode() {
            if required != self.mode {
                fields.push(format!(
                    "mode: bob kind requires {required} but config says {}",
                    self.mode
                ));
            }
        }
        if fields.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { fields })
        }
    }

    /// The game mode the configured Bob insists on, if any.
    fn required_mode(&self) -> Option<GameMode> {
        match &self.bob {
            BobSpec::Myopic { .. }
            | BobSpec::Deceptive { .. }
            | BobSpec::ThresholdSwitch { .. }
            | BobSpec::IntervalAlternating
            | BobSpec::RemarkUnboundedFaker { .. } => Some(GameMode::Sequential),
            BobSpec::Fictitious { .. } => Some(GameMode::Simultaneous),
            BobSpec::Random | BobSpec::Fixed { .. } => None,
        }
    }
}

fn default_true() -> bool {
    true
}

/// Random piecewise-valuation generator: densities drawn uniformly from
/// `[delta, upper]` on randomly sized segments, then renormalized to unit
/// mass, rejecting draws whose renormalized densities leave the band.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub count: usize,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub upper: f64,
    /// Inclusive segment-count range, e.g. `[2, 8]`.
    pub segments: [usize; 2],
    #[serde(default = "default_true", rename = "randomize_vA")]
    pub randomize_v_alice: bool,
    #[serde(default = "default_true", rename = "randomize_vB")]
    pub randomize_v_bob: bool,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut fields = Vec::new();
        if self.count == 0 {
            fields.push("instances.count: must be at least 1".to_string());
        }
        // Unit total mass forces the density band to straddle 1.
        if !(self.delta.is_finite() && self.upper.is_finite() && self.delta > 0.0) {
            fields.push("instances.delta/Delta: must be finite and positive".to_string());
        } else if !(self.delta <= 1.0 && 1.0 <= self.upper) {
            fields.push(format!(
                "instances.delta/Delta: band [{}, {}] must contain 1",
                self.delta, self.upper
            ));
        }
        if self.segments[0] < 1 || self.segments[0] > self.segments[1] {
            fields.push(format!(
                "instances.segments: bad range [{}, {}]",
                self.segments[0], self.segments[1]
            ));
        }
        if fields.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { fields })
        }
    }

    pub fn sampler(&self) -> InstanceSampler {
        InstanceSampler {
            delta: self.delta,
            upper: self.upper,
            segments: self.segments[0]..=self.segments[1],
        }
    }
}

/// Draws valuations with densities confined to `[delta, upper]`.
#[derive(Debug, Clone)]
pub struct InstanceSampler {
    pub delta: f64,
    pub upper: f64,
    pub segments: RangeInclusive<usize>,
}

impl InstanceSampler {
    /// Rejection-samples until the renormalized densities stay in band.
    /// The band contains 1 (validated), so the acceptance region is
    /// nonempty and in practice a handful of tries suffice.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Valuation {
        for _ in 0..10_000 {
            let k = rng.random_range(self.segments.clone());
            // Widths bounded away from zero keep segments meaningful.
            let raw: Vec<f64> = (0..k).map(|_| 0.2 + rng.random::<f64>()).collect();
            let total_w: f64 = raw.iter().sum();
            let widths: Vec<f64> = raw.iter().map(|w| w / total_w).collect();
            let densities: Vec<f64> = (0..k)
                .map(|_| rng.random_range(self.delta..=self.upper))
                .collect();
            let mass: f64 = widths.iter().zip(&densities).map(|(w, d)| w * d).sum();
            let scaled: Vec<f64> = densities.iter().map(|d| d / mass).collect();
            if scaled.iter().any(|d| *d < self.delta || *d > self.upper) {
                continue;
            }
            let mut breakpoints = Vec::with_capacity(k + 1);
            breakpoints.push(0.0);
            let mut acc = 0.0;
            for w in &widths[..k - 1] {
                acc += w;
                breakpoints.push(acc);
            }
            breakpoints.push(1.0);
            if let Ok(v) = Valuation::piecewise(breakpoints, scaled) {
                return v;
            }
        }
        panic!(
            "instance sampler failed to find densities in [{}, {}]",
            self.delta, self.upper
        );
    }
}

/// A grid of runs: every `T` times every instance times every seed index,
/// sharing one strategy pairing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: RunConfig,
    #[serde(rename = "T_values")]
    pub t_values: Vec<usize>,
    pub seed_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<InstanceSpec>,
    /// Check the applicable theoretical bound per run and report
    /// violations; the CLI exits 3 if any are found.
    #[serde(default)]
    pub check_bounds: bool,
    /// Aggregate CSV file name, resolved like the run outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl SweepConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)?;
        let cfg: SweepConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut fields = Vec::new();
        if let Err(ConfigError::Invalid { fields: f }) = self.base.validate() {
            // The template's own T is unused by the grid; tolerate 0 there.
            fields.extend(f.into_iter().filter(|m| !m.starts_with("T:")));
        }
        if self.t_values.is_empty() {
            fields.push("T_values: must not be empty".to_string());
        }
        if self.t_values.contains(&0) {
            fields.push("T_values: entries must be at least 1".to_string());
        }
        if self.seed_count == 0 {
            fields.push("seed_count: must be at least 1".to_string());
        }
        if let Some(inst) = &self.instances {
            if let Err(ConfigError::Invalid { fields: f }) = inst.validate() {
                fields.extend(f);
            }
        }
        if fields.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { fields })
        }
    }
}
