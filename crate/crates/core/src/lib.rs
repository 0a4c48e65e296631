//! Workbench for inverse-semigroup presentations: birooted involutive
//! automata, folding, and iterated saturation against a finite relation set,
//! with word-problem queries (`eq`, `is_zero`) on top.
//!
//! The `machine` and `encode` modules turn a two-counter machine into an
//! amalgamated presentation whose zero question mirrors acceptance, and
//! `grid` builds the row-by-row automata of a bounded run and checks them
//! against saturation. `batch` fans independent queries out over a thread
//! pool when the `parallel` feature (default) is on.

pub mod alphabet;
pub mod automaton;
pub mod batch;
pub mod encode;
pub mod grid;
pub mod machine;
pub mod munn;
pub mod presentation;
pub mod stephen;

pub use alphabet::{Alphabet, Letter, SLetter, Word};
pub use automaton::{InverseAutomaton, PendingAutomaton, VertexId};
pub use encode::{encode_amalgam, encode_core, encode_tape, EncodedAmalgam};
pub use grid::{build_grid, closure_agrees, verify_inductive_step, GridAutomaton};
pub use machine::{Config, CounterMachine, RunVerdict};
pub use presentation::{FamilyTag, Presentation, Relation};
pub use stephen::{Budget, ClosureStatus, ZeroVerdict};
