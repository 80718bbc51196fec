//! Constraint graphs, assignment testers, composition and graph powering.

pub mod accounting;
pub mod circuit;
pub mod code;
pub mod compose;
pub mod graph;
pub mod power;
pub mod project;
pub mod tester;

pub use accounting::{randomness_accounting, AccountingReport};
pub use circuit::{BooleanCircuit, Gate};
pub use code::{robustize, BinaryCode};
pub use compose::{compose, ComposedGraph};
pub use graph::ConstraintGraph;
pub use power::{power, PoweredGraph, SuperLabeling};
pub use project::{project_superlabeling, ProjectionReport};
pub use tester::{tseitin_tester, TesterOutput};
