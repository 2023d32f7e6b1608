//! 2-node-connectivity network design toolkit.
//!
//! Solvers for block-tree augmentation, 2-connected dominating set,
//! k-subgraph/quota/budgeted subgraph and crossing-family augmentation, built
//! from three pieces: spanning-tree embeddings with measured stretch,
//! incidence-graph reductions to node-weighted Steiner tree, and the
//! separability graph of a crossing set family. Every solver is paired with
//! a brute-force oracle and the structural equivalences behind the
//! reductions are machine-checked at desk scale by the suite module.

pub mod connectivity;
pub mod crossing;
pub mod dot;
pub mod embed;
pub mod error;
pub mod generate;
pub mod graph;
pub mod incidence;
pub mod io;
pub mod rat;
pub mod solve;
pub mod steiner;
pub mod suite;

pub use error::{Error, Result};
pub use rat::Rat;
