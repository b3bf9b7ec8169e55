//! Strategy implementations for both players.

pub mod alice;
pub mod bob;
