//! Context-aware cricket player contribution ratings.
//!
//! The crate turns ball-by-ball ODI data into per-player, per-match
//! contribution scores. The pipeline is:
//!
//! 1. [`data`] — parse and validate ball/summary CSVs, aggregate to overs,
//!    filter outlier matches.
//! 2. [`features`] — build team, batter, bowler and match-stage embeddings.
//! 3. [`cluster`] — k-means grouping of teams and players by quality.
//! 4. [`projection`] — estimate projected remaining runs at every over
//!    boundary (kNN, ridge, random forest).
//! 5. [`scoring`] — convert projection deltas into per-over expected runs and
//!    per-player batting/bowling contributions, aggregated to match and
//!    series ratings.
//! 6. [`lnc`] — the Duckworth-Lewis resource-table baseline run through the
//!    same contribution pipeline.
//! 7. [`eval`] — man-of-the-match agreement, method comparison, MAE curves.
//! 8. [`synth`] — deterministic synthetic match generator for tests and
//!    benchmarks.

pub mod cluster;
pub mod config;
pub mod data;
pub mod eval;
pub mod features;
pub mod lnc;
pub mod numeric;
pub mod projection;
pub mod scoring;
pub mod synth;

mod error;

pub use error::{CampError, Result};
