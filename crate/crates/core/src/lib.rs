//! Feasibility/desirability games on finite directed graphs.

pub mod choice;
pub mod evolution;
pub mod game;
pub mod graph;
pub mod nodeset;
pub mod normal_form;
pub mod par;

pub use game::{analyze, EquilibriumReport, FdGame};
pub use graph::{GraphError, NameTable, NodeId, Relation};
pub use nodeset::NodeSet;
pub use par::Exec;
