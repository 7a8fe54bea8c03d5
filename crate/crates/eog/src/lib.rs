//! Edge-ordered graphs: containment testing, order-chromatic-number-2
//! classification of forests, grid/weight machinery, the density-increment
//! step, the find-or-certify recursion, and a brute-force extremal-number
//! oracle for desk-scale ground truth.
//!
//! An edge-ordered graph is a finite simple graph together with an injective
//! integer labeling of its edges; the labels induce a linear order on the
//! edge set. `graph` holds the core types, `oracle` decides containment,
//! `pattern` classifies forbidden forests, `weights` and `increment` hold the
//! grid machinery and the single density-increment step, `driver` iterates it,
//! and `exmax` computes exact extremal numbers at tiny scale by exhaustive
//! search.

pub mod driver;
pub mod exmax;
pub mod graph;
pub mod increment;
pub mod oracle;
pub mod pattern;
pub mod synth;
pub mod weights;

pub(crate) mod par;

pub use graph::{EdgeOrderedGraph, Embedding, GraphError};
