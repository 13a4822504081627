//! Command implementations for the `stabreg` binary.

pub mod catalog;
pub mod commands;
pub mod dto;
pub mod oracle;
pub mod rep;
pub mod spec;
pub mod sweep;
