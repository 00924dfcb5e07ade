//! The pebbling comonad `T_k` on bounded fragments.

pub mod bounded;
pub mod coalgebra;
pub mod decomposition;
pub mod laws;
pub mod play;

pub use bounded::{BoundedTk, DEFAULT_MAX_PLAYS};
pub use coalgebra::{coalgebra_of_traversal, traversal_of_coalgebra, Coalgebra, KTraversal};
pub use decomposition::{tree_decomposition_tk, DecompositionReport, TkDecomposition};
pub use laws::{check_comonad_laws, check_laws_on, check_laws_with, LawReport, Pebbling, PlayComonad};
pub use play::{cokleisli_compose, position_of, tk_tuple_holds, Move, Play};
