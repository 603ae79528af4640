//! Finite groups, families of subgroups of `G x S_n`, and the wreath
//! containment deciding which family sequences come from N∞-operads.

pub mod cache;
pub mod cli;
pub mod error;
pub mod families;
pub mod graph;
pub mod group;
pub mod io;
pub mod norms;
pub mod realizability;

pub use error::{Error, Result};
