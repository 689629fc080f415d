//! Rule-based overview summaries of reference lists and other record sets.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`ingest`] parses BibTeX or line-delimited record files, classifies
//!    venues, fills citation counts and flags self-citations.
//! 2. [`profile`] computes distributions with quantifier buckets, ranges and
//!    medians, per-group top records, top authors, feature importance and
//!    subset/superset comparisons.
//! 3. [`plan`] arranges those statistics into paragraphs of typed messages
//!    following a fixed schema per algorithm (`refset` or `prodset`).
//! 4. [`realize`] renders the plan through a template pack.
//!
//! [`cli`] wires the stages together behind the `refsum` binary.

pub mod cli;
pub mod config;
pub mod ingest;
pub mod plan;
pub mod profile;
pub mod realize;
pub mod record;

pub use config::{Algorithm, SummaryConfig};
pub use record::{Item, Record};
