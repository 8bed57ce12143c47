//! Ends of pairs, filtered ends and splitting evidence for quasiconvex
//! subgroups of hyperbolic groups, computed over finite Cayley balls.

pub mod annulus;
pub mod cayley;
pub mod cli;
pub mod constants;
pub mod digraph;
pub mod ends;
pub mod error;
pub mod fingerprint;
pub mod folding;
pub mod input;
pub mod presentation;
pub mod splittings;
pub mod subgroup;

pub use error::{Error, Result};
