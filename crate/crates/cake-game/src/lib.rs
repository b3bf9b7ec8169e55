//! Simulator for the repeated two-player cake-cutting game.
//!
//! Alice cuts the unit interval at `a_t`, Bob takes `[0, a_t]` or `[a_t, 1]`,
//! Alice gets the remainder, and both sides play for `T` rounds. The crate
//! provides the value-measure primitives, a deterministic game engine, the
//! full strategy zoo for both players (exploiters, equitable enforcers,
//! fictitious play), and the diagnostics used to verify regret and
//! convergence bounds at desk scale.

pub mod blackwell;
pub mod config;
pub mod engine;
pub mod runner;
pub mod spiral;
pub mod strategies;
pub mod valuation;

pub use engine::{
    bob_regret, run_game, stackelberg_regret, Choice, EngineError, GameMode, History,
};
pub use valuation::{stackelberg_value, Valuation, ValuationError};
