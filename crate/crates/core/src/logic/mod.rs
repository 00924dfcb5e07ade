//! Finitary existential-positive logic and the `□_k` modality.

pub mod eval;
pub mod formula;

pub use eval::{eval_box, eval_box_with, evaluate, evaluate_with, Assignment, BoxOptions, ModalEvaluator};
pub use formula::{canonical_query, Formula, Var};
