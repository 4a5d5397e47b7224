//! Edit distances between ordered labeled trees.
//!
//! Three regimes are provided, all priced with exact rational costs:
//!
//! * [`classic`]: per-node relabel, delete and insert costs, computed with the
//!   key-root forest dynamic program.
//! * [`gap_general`]: unmatched nodes grouped into connected gaps, each gap of
//!   `k` nodes costing `a + b k`. Defined here for binary trees.
//! * [`gap_subtree`]: as above, but every gap must be a complete subtree.
//!
//! [`oracle`] enumerates every valid mapping between two small trees and is
//! the reference all three programs are tested against. [`align`] is the
//! affine-gap sequence aligner and [`contour`] builds and compares contour
//! trees of grid terrains.

pub mod align;
pub mod classic;
pub mod contour;
pub mod cost;
pub mod error;
pub mod exec;
mod forest;
pub mod gap_general;
pub mod gap_subtree;
pub mod gen;
pub mod mapping;
pub mod oracle;
pub mod suite;
pub mod tree;

pub use cost::{Cost, CostModel, Rational, Relabel, RelabelTable};
pub use error::{Error, Result};
pub use mapping::{EditMapping, Model};
pub use tree::{cdepth_audit, IndexedTree, LabeledTree, NodeId, Traversal};
