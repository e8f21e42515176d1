//! File formats, sessions, snapshots, benchmarks, the CLI, and the HTTP service for `teamsim-core`.

pub mod bench;
pub mod cli;
pub mod generate;
pub mod names;
pub mod service;
pub mod session;
pub mod snapshot;
pub mod text;

pub use names::{Labels, NodeNames};
pub use session::{Session, SessionConfig, SessionError};
pub use text::{parse_graph, parse_pattern, parse_script, parse_updates, GraphDoc, ParseError, ScriptItem, UpdateSet};
