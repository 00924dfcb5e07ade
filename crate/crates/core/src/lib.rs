//! Executable pebbling comonad: pebble games, the comonad `T_k` on bounded
//! fragments, coalgebras and treewidth, existential-positive logic, and the
//! standard witness constructions.

pub mod comonad;
pub mod constructions;
pub mod error;
pub mod games;
pub mod hom;
pub mod logic;
pub mod structure;
pub mod width;

pub use error::{Error, Result};
pub use structure::{Elem, Homomorphism, Signature, SimpleGraph, Structure, StructureFile, Violation};
