//! Duckworth-Lewis resource-table baseline.
//!
//! The table gives the percentage of an innings' scoring resources still
//! available at (overs left, wickets lost). The baseline projects remaining
//! runs as `Z * resource / 100`, with `Z` a nominal first-innings total
//! (235 by convention) or the chase target, and feeds those projections
//! through the same contribution pipeline as the primary metric.
//!
//! Sparse table files are completed by separable linear interpolation:
//! first along the overs axis within each anchored wicket column, then
//! along the wicket axis within each row, which is bilinear on a lattice of
//! anchors. Monotonicity is validated after the fill.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::data::MatchData;
use crate::features::StageVector;
use crate::scoring::{rate_match_with_traces, RatingReport, ScoringParams};
use crate::{CampError, Result};

pub const MAX_OVERS: u32 = 50;
pub const MAX_WICKETS: u32 = 9;

/// Nominal first-innings total used when none is configured.
pub const DEFAULT_FIRST_INNINGS_Z: f64 = 235.0;

const DEFAULT_TABLE_CSV: &str = include_str!("../assets/dl_resource_table.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceTable {
    /// `grid[overs_left][wickets_lost]`, percentages in [0, 100].
    grid: Vec<Vec<f64>>,
    pub provenance: String,
}

impl ResourceTable {
    /// Complete a sparse anchor set into the full grid and validate it.
    pub fn from_anchors(anchors: &[(u32, u32, f64)], provenance: &str) -> Result<Self> {
        if anchors.is_empty() {
            return Err(CampError::validation("resource table: no anchors"));
        }
        let rows = (MAX_OVERS + 1) as usize;
        let cols = (MAX_WICKETS + 1) as usize;
        let mut sparse = vec![vec![None::<f64>; cols]; rows];
        for &(overs, wickets, pct) in anchors {
            if overs > MAX_OVERS || wickets > MAX_WICKETS {
                return Err(CampError::validation(format!(
                    "resource table: anchor ({overs}, {wickets}) outside the grid"
                )));
            }
            if !(0.0..=100.0).contains(&pct) {
                return Err(CampError::validation(format!(
                    "resource table: resource {pct} at ({overs}, {wickets}) outside [0, 100]"
                )));
            }
            if sparse[overs as usize][wickets as usize].replace(pct).is_some() {
                return Err(CampError::validation(format!(
                    "resource table: duplicate anchor ({overs}, {wickets})"
                )));
            }
        }

        // Pass 1: fill each anchored wicket column along the overs axis.
        let mut columns = vec![vec![None::<f64>; rows]; cols];
        for w in 0..cols {
            let anchored: Vec<(usize, f64)> = (0..rows)
                .filter_map(|o| sparse[o][w].map(|v| (o, v)))
                .collect();
            if anchored.is_empty() {
                continue;
            }
            for (o, cell) in columns[w].iter_mut().enumerate() {
                *cell = Some(interpolate(&anchored, o as f64));
            }
        }

        // Pass 2: fill each row along the wicket axis from anchored columns.
        let mut grid = vec![vec![0.0; cols]; rows];
        for o in 0..rows {
            let anchored: Vec<(usize, f64)> = (0..cols)
                .filter_map(|w| columns[w][o].map(|v| (w, v)))
                .collect();
            if anchored.is_empty() {
                return Err(CampError::validation(
                    "resource table: no anchored wicket column",
                ));
            }
            for (w, cell) in grid[o].iter_mut().enumerate() {
                *cell = interpolate(&anchored, w as f64);
            }
        }

        let table = ResourceTable {
            grid,
            provenance: provenance.to_owned(),
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let eps = 1e-9;
        if (self.resource(MAX_OVERS, 0)? - 100.0).abs() > eps {
            return Err(CampError::validation(format!(
                "resource table: ({MAX_OVERS}, 0) must be 100, got {}",
                self.resource(MAX_OVERS, 0)?
            )));
        }
        for o in 0..self.grid.len() {
            for w in 0..self.grid[o].len() {
                let v = self.grid[o][w];
                if !(0.0..=100.0).contains(&v) {
                    return Err(CampError::validation(format!(
                        "resource table: ({o}, {w}) = {v} outside [0, 100]"
                    )));
                }
                if w > 0 && self.grid[o][w] > self.grid[o][w - 1] + eps {
                    return Err(CampError::validation(format!(
                        "resource table: resources increase with wickets at ({o}, {w})"
                    )));
                }
                if o > 0 && self.grid[o][w] < self.grid[o - 1][w] - eps {
                    return Err(CampError::validation(format!(
                        "resource table: resources decrease with overs left at ({o}, {w})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Load from a sparse CSV: `overs_left,wickets_lost,resource_pct`.
    pub fn load(reader: impl Read, provenance: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<&str> = rdr.headers()?.iter().collect();
        if header != ["overs_left", "wickets_lost", "resource_pct"] {
            return Err(CampError::parse(
                1,
                format!("resource table: bad header {:?}", header.join(",")),
            ));
        }
        let mut anchors = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let line = i as u64 + 2;
            let record = record?;
            let parse_u32 = |idx: usize, name: &str| -> Result<u32> {
                record[idx].parse().map_err(|_| {
                    CampError::parse(line, format!("field {name}: invalid integer {:?}", &record[idx]))
                })
            };
            let pct: f64 = record[2].parse().map_err(|_| {
                CampError::parse(line, format!("field resource_pct: invalid number {:?}", &record[2]))
            })?;
            anchors.push((parse_u32(0, "overs_left")?, parse_u32(1, "wickets_lost")?, pct));
        }
        Self::from_anchors(&anchors, provenance)
    }

    /// The published excerpt: decade rows for wicket columns 0/2/4/9, a flat
    /// 7.6 tail column, and zero resources at zero overs. Intermediate cells
    /// are interpolated, which the provenance string records.
    pub fn paper_default() -> Self {
        Self::load(DEFAULT_TABLE_CSV.as_bytes(), "published excerpt; intermediate cells linearly interpolated")
            .expect("embedded table must be valid")
    }

    pub fn resource(&self, overs_left: u32, wickets_lost: u32) -> Result<f64> {
        if overs_left > MAX_OVERS || wickets_lost > MAX_WICKETS {
            return Err(CampError::validation(format!(
                "resource table: ({overs_left} overs left, {wickets_lost} wickets) out of range"
            )));
        }
        Ok(self.grid[overs_left as usize][wickets_lost as usize])
    }
}

/// Piecewise-linear interpolation through anchors sorted by position, flat
/// beyond the ends.
fn interpolate(anchors: &[(usize, f64)], x: f64) -> f64 {
    let first = anchors[0];
    let last = anchors[anchors.len() - 1];
    if x <= first.0 as f64 {
        return first.1;
    }
    if x >= last.0 as f64 {
        return last.1;
    }
    for pair in anchors.windows(2) {
        let (x0, y0) = (pair[0].0 as f64, pair[0].1);
        let (x1, y1) = (pair[1].0 as f64, pair[1].1);
        if x <= x1 {
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    last.1
}

/// Projected remaining runs at a stage: `Z * resource / 100`, where `Z` is
/// the nominal total for a first innings and the chase target for a second.
pub fn lnc_project(
    table: &ResourceTable,
    overs_left: u32,
    wickets_lost: u32,
    innings: u8,
    target: u32,
    first_innings_z: f64,
) -> Result<f64> {
    let z = match innings {
        1 => first_innings_z,
        2 => target as f64,
        other => {
            return Err(CampError::validation(format!(
                "lnc: innings must be 1 or 2, got {other}"
            )))
        }
    };
    Ok(z * table.resource(overs_left, wickets_lost)? / 100.0)
}

/// Projection for a stage vector (the chase target is reconstructed from
/// runs so far plus remaining target).
pub fn lnc_project_stage(
    table: &ResourceTable,
    stage: &StageVector,
    first_innings_z: f64,
) -> Result<f64> {
    let target = stage.runs_so_far + stage.remaining_target;
    lnc_project(
        table,
        stage.overs_remaining,
        stage.wickets_lost,
        stage.innings,
        target,
        first_innings_z,
    )
}

/// Per-boundary projection traces for both innings; terminal boundaries are
/// forced to zero like every other trace source.
pub fn lnc_traces(
    m: &MatchData,
    table: &ResourceTable,
    scheduled_overs: u32,
    first_innings_z: f64,
) -> Result<[Vec<f64>; 2]> {
    let mut traces: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let target = m.summary.target_runs();
    for innings in [1u8, 2] {
        let data = &m.innings[(innings - 1) as usize];
        let mut wickets = 0u32;
        let mut trace = Vec::with_capacity(data.overs.len() + 1);
        for over in &data.overs {
            let overs_left = scheduled_overs - (over.over_index - 1);
            trace.push(lnc_project(table, overs_left, wickets, innings, target, first_innings_z)?);
            wickets += over.wickets.len() as u32;
        }
        trace.push(0.0);
        traces[(innings - 1) as usize] = trace;
    }
    Ok(traces)
}

/// Rate a match with the baseline: identical contribution pipeline, with the
/// resource-table projection substituted for the learned one.
pub fn lnc_rate_match(
    m: &MatchData,
    table: &ResourceTable,
    params: &ScoringParams,
    scheduled_overs: u32,
    first_innings_z: f64,
) -> Result<RatingReport> {
    let traces = lnc_traces(m, table, scheduled_overs, first_innings_z)?;
    let mut report = rate_match_with_traces(m, &traces, params)?;
    report.method = "lnc".to_owned();
    Ok(report)
}
