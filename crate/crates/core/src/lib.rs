//! Combinatorial trees of spheres, covers between them, their dynamics, and
//! the self-grafting construction producing systems with many disjoint
//! non-monomial critical cycles.

pub mod dynamics;
pub mod error;
pub mod format;
pub mod grafting;
pub mod report;
pub mod spheres;
pub mod tree;

pub use error::{Error, Result};
pub use report::{Report, Violation, ViolationKind};
pub use spheres::{DynamicalTreeSystem, MarkedTreeOfSpheres, PortraitEntry, TreeCover};
pub use tree::{CombinatorialTree, Edge, TreeBuilder};
