//! Factor-free subgroups of free products of ordered groups.
//!
//! Subgroups are represented by irreducible bipartite A-graphs built by
//! folding. Intersections of conjugates are read off pullback graphs, and a
//! computable left order on the free product drives the search for maximal
//! edges.

pub mod agraph;
pub mod error;
pub mod factor;
pub mod fold;
pub mod freegroup;
pub mod instance;
pub mod magnus;
pub mod maxedges;
pub mod positive;
pub mod pullback;
pub mod sweep;
pub mod word;

pub use error::{Error, Result};
