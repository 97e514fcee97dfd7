//! Outlier filtering of the match pool before any model is trained.

use serde::{Deserialize, Serialize};

use crate::data::matches::MatchData;
use crate::data::types::TeamId;
use crate::{CampError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InningsStats {
    pub n: usize,
    pub min: u32,
    pub max: u32,
    pub mean: f64,
    pub std: f64,
}

fn innings_stats(totals: &[u32]) -> InningsStats {
    let n = totals.len();
    let mean = totals.iter().map(|&t| t as f64).sum::<f64>() / n as f64;
    let var = if n > 1 {
        totals
            .iter()
            .map(|&t| (t as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64
    } else {
        0.0
    };
    InningsStats {
        n,
        min: totals.iter().copied().min().unwrap_or(0),
        max: totals.iter().copied().max().unwrap_or(0),
        mean,
        std: var.sqrt(),
    }
}

/// Acceptance band per innings, computed once and then applied as fixed
/// bounds; re-applying the same band is a no-op, which makes filtering
/// idempotent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaBand {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl SigmaBand {
    pub fn from_stats(stats: &[InningsStats; 2], n_sigma: f64) -> Self {
        SigmaBand {
            lo: [
                stats[0].mean - n_sigma * stats[0].std,
                stats[1].mean - n_sigma * stats[1].std,
            ],
            hi: [
                stats[0].mean + n_sigma * stats[0].std,
                stats[1].mean + n_sigma * stats[1].std,
            ],
        }
    }

    pub fn accepts(&self, m: &MatchData) -> bool {
        (0..2).all(|i| {
            let total = m.summary.innings_totals[i].runs as f64;
            total >= self.lo[i] && total <= self.hi[i]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub n_input: usize,
    pub n_after_team_exclusion: usize,
    pub n_after_filter: usize,
    pub excluded_teams: Vec<TeamId>,
    pub band: SigmaBand,
    pub before: [InningsStats; 2],
    pub after: [InningsStats; 2],
}

/// Drop matches involving excluded teams, then drop matches whose innings
/// totals fall outside mean +/- 2 sigma. The statistics are taken once, over
/// the post-exclusion pool, and both before/after summaries are reported.
pub fn preprocess_matches(
    matches: Vec<MatchData>,
    excluded_teams: &[TeamId],
) -> Result<(Vec<MatchData>, PreprocessReport)> {
    let n_input = matches.len();
    let pool: Vec<MatchData> = matches
        .into_iter()
        .filter(|m| {
            !excluded_teams.contains(&m.summary.team_a) && !excluded_teams.contains(&m.summary.team_b)
        })
        .collect();
    if pool.len() < 2 {
        return Err(CampError::validation(format!(
            "preprocessing needs at least 2 matches after team exclusion, got {}",
            pool.len()
        )));
    }

    let totals = |ms: &[MatchData], innings: usize| -> Vec<u32> {
        ms.iter().map(|m| m.summary.innings_totals[innings].runs).collect()
    };
    let before = [
        innings_stats(&totals(&pool, 0)),
        innings_stats(&totals(&pool, 1)),
    ];
    let band = SigmaBand::from_stats(&before, 2.0);

    let n_after_team_exclusion = pool.len();
    let kept: Vec<MatchData> = pool.into_iter().filter(|m| band.accepts(m)).collect();
    if kept.is_empty() {
        return Err(CampError::validation(
            "preprocessing filtered out every match",
        ));
    }
    let after = [
        innings_stats(&totals(&kept, 0)),
        innings_stats(&totals(&kept, 1)),
    ];

    let report = PreprocessReport {
        n_input,
        n_after_team_exclusion,
        n_after_filter: kept.len(),
        excluded_teams: excluded_teams.to_vec(),
        band,
        before,
        after,
    };
    Ok((kept, report))
}

/// Apply an already-computed band without recomputing statistics.
pub fn apply_band(matches: Vec<MatchData>, band: &SigmaBand) -> Vec<MatchData> {
    matches.into_iter().filter(|m| band.accepts(m)).collect()
}
