//! The repeated game loop, histories, and the two regret measures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::valuation::{stackelberg_value, Valuation, ValuationError};

/// Which piece Bob takes: `L` is `[0, a_t]`, `R` is `[a_t, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Choice {
    L,
    R,
}

impl std::fmt::Display for Choice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Choice::L => "L",
            Choice::R => "R",
        })
    }
}

/// Whether Bob sees the current cut before choosing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameMode {
    Sequential,
    Simultaneous,
}

impl std::fmt::Display for GameMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GameMode::Sequential => "sequential",
            GameMode::Simultaneous => "simultaneous",
        })
    }
}

/// Complete record of one run: cut points, Bob's choices, per-round payoffs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub cuts: Vec<f64>,
    pub choices: Vec<Choice>,
    pub alice_payoffs: Vec<f64>,
    pub bob_payoffs: Vec<f64>,
}

impl History {
    pub fn with_capacity(t: usize) -> Self {
        History {
            cuts: Vec::with_capacity(t),
            choices: Vec::with_capacity(t),
            alice_payoffs: Vec::with_capacity(t),
            bob_payoffs: Vec::with_capacity(t),
        }
    }

    /// Number of completed rounds.
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn total_alice(&self) -> f64 {
        self.alice_payoffs.iter().sum()
    }

    pub fn total_bob(&self) -> f64 {
        self.bob_payoffs.iter().sum()
    }
}

/// Alice side of a run. `cut` is called once per round with the completed
/// rounds so far; `observe` delivers the round's outcome afterwards so
/// stateful strategies can update incrementally instead of rescanning.
pub trait AliceStrategy {
    /// Called once before round 1 with this player's derived seed.
    fn begin(&mut self, _seed: u64) {}
    fn cut(&mut self, past: &History) -> f64;
    fn observe(&mut self, _cut: f64, _choice: Choice) {}
}

/// Bob side of a run. In sequential mode `current_cut` carries `a_t`; in
/// simultaneous mode it is `None`.
pub trait BobStrategy {
    fn begin(&mut self, _seed: u64) {}
    /// A strategy that only works in one mode declares it here and the engine
    /// rejects mismatched runs before round 1.
    fn mode_requirement(&self) -> Option<GameMode> {
        None
    }
    fn choose(&mut self, past: &History, current_cut: Option<f64>) -> Choice;
    fn observe(&mut self, _cut: f64, _choice: Choice) {}
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("round count must be at least 1")]
    NoRounds,
    #[error("bob strategy requires {required} mode but the game runs {actual}")]
    ModeMismatch {
        required: GameMode,
        actual: GameMode,
    },
    #[error("round {round}: alice returned cut {cut}, outside [0, 1]")]
    ProtocolViolation { round: usize, cut: f64 },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

// Distinct per-player seed streams derived from the run seed.
const ALICE_SEED_SALT: u64 = 0x0041_4c49_4345;
const BOB_SEED_SALT: u64 = 0x0042_4f42;

/// Plays `t_rounds` rounds and records everything. Identical inputs and seed
/// reproduce the history bit for bit; each player draws randomness (if any)
/// from its own generator seeded by (run seed, player id).
pub fn run_game(
    alice: &mut dyn AliceStrategy,
    bob: &mut dyn BobStrategy,
    v_alice: &Valuation,
    v_bob: &Valuation,
    t_rounds: usize,
    mode: GameMode,
    seed: u64,
) -> Result<History, EngineError> {
    if t_rounds == 0 {
        return Err(EngineError::NoRounds);
    }
    if let Some(required) = bob.mode_requirement() {
        if required != mode {
            return Err(EngineError::ModeMismatch {
                required,
                actual: mode,
            });
        }
    }
    alice.begin(seed ^ ALICE_SEED_SALT);
    bob.begin(seed ^ BOB_SEED_SALT);

    let mut h = History::with_capacity(t_rounds);
    for round in 1..=t_rounds {
        let a = alice.cut(&h);
        if !(a.is_finite() && (0.0..=1.0).contains(&a)) {
            return Err(EngineError::ProtocolViolation { round, cut: a });
        }
        let b = match mode {
            GameMode::Sequential => bob.choose(&h, Some(a)),
            GameMode::Simultaneous => bob.choose(&h, None),
        };
        let bob_left = v_bob.interval_value(0.0, a)?;
        let bob_right = v_bob.interval_value(a, 1.0)?;
        let alice_left = v_alice.interval_value(0.0, a)?;
        let alice_right = v_alice.interval_value(a, 1.0)?;
        let (u_bob, u_alice) = match b {
            Choice::L => (bob_left, alice_right),
            Choice::R => (bob_right, alice_left),
        };
        alice.observe(a, b);
        bob.observe(a, b);
        h.cuts.push(a);
        h.choices.push(b);
        h.alice_payoffs.push(u_alice);
        h.bob_payoffs.push(u_bob);
    }
    Ok(h)
}

/// `T * u_A^* - sum(u_A^t)`: Alice's shortfall against always cutting at
/// Bob's midpoint with ties in her favor. Can come out slightly negative when
/// Bob tie-breaks against his own interest; reported as computed.
pub fn stackelberg_regret(h: &History, v_alice: &Valuation, v_bob: &Valuation) -> f64 {
    h.len() as f64 * stackelberg_value(v_alice, v_bob) - h.total_alice()
}

/// Bob's cumulative shortfall from taking the better piece every round.
/// Every summand is nonnegative by construction.
pub fn bob_regret(h: &History, v_bob: &Valuation) -> f64 {
    h.cuts
        .iter()
        .zip(&h.bob_payoffs)
        .map(|(&a, &u)| {
            let left = v_bob.interval_value(0.0, a).expect("cut validated in run");
            let right = v_bob.interval_value(a, 1.0).expect("cut validated in run");
            left.max(right) - u
        })
        .sum()
}
