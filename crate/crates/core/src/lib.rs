//! Strategy evaluation for two-player symmetric normal-form games through
//! sink equilibria of response digraphs.
//!
//! Strategies are positional indices `0..n`; labels are cosmetic. The BD
//! metric prefers strategies in sink equilibria of the best-response digraph
//! and the ND metric those in the sink of the non-dominated digraph. Self-play
//! walks the joint-strategy digraphs, whose sinks the metrics are compared
//! against.

pub mod algebra;
pub mod cli;
pub mod digraph;
pub mod game;
pub mod io;
pub mod metagame;
pub mod metrics;
pub mod oracle;
pub mod response;
pub mod selfplay;

pub use digraph::{Digraph, SinkEquilibriumSet};
pub use game::{JointStrategy, Player, SymmetricGame, DEFAULT_EPSILON};
pub use metrics::{evaluate_bd, evaluate_nd, EvaluationReport};
pub use response::Variant;
pub use selfplay::{batch_frequencies, run_self_play, SelfPlayConfig};
