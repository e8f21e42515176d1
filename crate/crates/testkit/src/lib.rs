//! Brute-force reference implementations and random instance generators.
//!
//! Everything here is written independently of the engine's internals and
//! favors obviousness over speed.

pub mod gen;
pub mod oracle;
pub mod witness;
