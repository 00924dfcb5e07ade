//! Pebble games: positions, strategies and their fixpoint computations.

pub(crate) mod arena;
pub mod bijection;
pub mod config;
pub mod existential;
pub mod transducer;

pub use bijection::bijection_game_equiv;
pub use config::{is_winning, Configuration, PartialMap, Pebble};
pub use existential::{
    arrow_k, back_and_forth_equiv, back_and_forth_strategy, consistency_number,
    existential_strategy, PositionalStrategy,
};
pub use transducer::{determinize, realize, Determinized, Responder, Transducer};
