//! Exact stable arithmetic regularity for finite groups and for finite sets
//! with small tripling in represented groups.
//!
//! Everything here is `no_std` with `alloc`; IO lives in the CLI crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod config;
pub mod definability;
pub mod error;
pub mod group;
pub mod level;
pub mod rational;
pub mod repgroup;
pub mod regularity;
pub mod setsys;
pub mod stability;
pub mod stabilizer;
pub mod subset;
pub mod tripling;
pub mod verify;

pub use config::Caps;
pub use error::{Error, Result};
pub use group::{build_group, Element, FiniteGroup, IDENTITY};
pub use level::Level;
pub use rational::Rational;
pub use subset::{CosetDecomposition, GroupSubset, Subgroup};
