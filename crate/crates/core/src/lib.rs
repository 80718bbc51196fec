//! Two-prover games, parallel repetition and the robust-embedding dichotomy.
//!
//! Everything is exact: values and thresholds are [`Rational`]s, randomness is
//! drawn from pinned seeded streams (see [`rng`]), and every exhaustive search is
//! bounded by a [`Caps`] limit that fails fast instead of running away.

pub mod caps;
pub mod error;
pub mod fixtures;
pub mod fortify;
pub mod game;
pub mod nogo;
pub mod powering;
pub mod randgame;
pub mod rational;
pub mod repetition;
pub mod rng;

pub use caps::Caps;
pub use error::{Error, Result};
pub use game::{
    induced_subgame, rect_subgame, strategy_value, value_exact, value_local_search, Game, PairSet,
    RectSubgame, Strategy, Symbol, ValueMethod, ValueResult,
};
pub use rational::Rational;
pub use repetition::{RepStrategy, RepeatedGame, SchemeSpec};
