//! Rating evaluation: man-of-the-match agreement, method comparison,
//! projection-error reporting, and venue scoring distributions.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::{MatchId, MatchSummary, PlayerId, VenueClass};
use crate::projection::{MaeCell, ProjectionReport};
use crate::scoring::RatingReport;
use crate::{CampError, Result};

/// Agreement counts over one player pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolAgreement {
    pub n_matches: usize,
    pub rank1: usize,
    pub top2: usize,
    pub top3: usize,
    pub frac_rank1: f64,
    pub frac_top2: f64,
    pub frac_top3: f64,
}

impl PoolAgreement {
    fn from_ranks(ranks: &[Option<u32>]) -> Self {
        let n = ranks.len();
        let count = |cut: u32| ranks.iter().filter(|r| r.is_some_and(|r| r <= cut)).count();
        let (rank1, top2, top3) = (count(1), count(2), count(3));
        let frac = |c: usize| c as f64 / n as f64;
        PoolAgreement {
            n_matches: n,
            rank1,
            top2,
            top3,
            frac_rank1: frac(rank1),
            frac_top2: frac(top2),
            frac_top3: frac(top3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodAgreement {
    /// Agreement measured among the winning team's players.
    pub winning_team: PoolAgreement,
    /// Agreement measured among all players of both teams.
    pub all_players: PoolAgreement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n_matches: usize,
    pub methods: BTreeMap<String, MethodAgreement>,
}

/// Where the expert-chosen man of the match lands in each method's ranking.
///
/// Rankings and their tie-breaks come from the rating reports themselves;
/// a man of the match from the losing side simply never agrees in the
/// winning-team pool.
pub fn mom_agreement(
    reports_by_method: &BTreeMap<String, Vec<RatingReport>>,
    summaries: &BTreeMap<MatchId, MatchSummary>,
) -> Result<AgreementReport> {
    let mut n_matches = 0;
    let mut methods = BTreeMap::new();
    for (method, reports) in reports_by_method {
        let mut winning_ranks = Vec::with_capacity(reports.len());
        let mut all_ranks = Vec::with_capacity(reports.len());
        for report in reports {
            let summary = summaries.get(&report.match_id).ok_or_else(|| {
                CampError::validation(format!("no summary for match {}", report.match_id))
            })?;
            let mom = report.entry(&summary.mom).ok_or_else(|| {
                CampError::validation(format!(
                    "match {}: man of the match {} is not in the rated lineup",
                    report.match_id, summary.mom
                ))
            })?;
            winning_ranks.push(mom.rank_winning11);
            all_ranks.push(Some(mom.rank_all22));
        }
        n_matches = reports.len();
        methods.insert(
            method.clone(),
            MethodAgreement {
                winning_team: PoolAgreement::from_ranks(&winning_ranks),
                all_players: PoolAgreement::from_ranks(&all_ranks),
            },
        );
    }
    Ok(AgreementReport { n_matches, methods })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub match_id: MatchId,
    pub player: PlayerId,
    pub team: String,
    pub camp_score: f64,
    pub camp_rank: u32,
    pub lnc_score: f64,
    pub lnc_rank: u32,
}

/// Side-by-side scores and ranks, one row per (match, player). The two
/// report sets must cover the same matches.
pub fn compare_methods(
    camp: &[RatingReport],
    lnc: &[RatingReport],
) -> Result<Vec<ComparisonRow>> {
    let by_id = |reports: &[RatingReport]| -> BTreeMap<MatchId, RatingReport> {
        reports.iter().map(|r| (r.match_id.clone(), r.clone())).collect()
    };
    let camp_map = by_id(camp);
    let lnc_map = by_id(lnc);
    if camp_map.keys().ne(lnc_map.keys()) {
        return Err(CampError::validation(
            "compare: the two methods cover different match sets",
        ));
    }
    let mut rows = Vec::new();
    for (match_id, camp_report) in &camp_map {
        let lnc_report = &lnc_map[match_id];
        for e in &camp_report.entries {
            let other = lnc_report.entry(&e.player).ok_or_else(|| {
                CampError::validation(format!(
                    "match {match_id}: player {} missing from the baseline report",
                    e.player
                ))
            })?;
            rows.push(ComparisonRow {
                match_id: match_id.clone(),
                player: e.player.clone(),
                team: e.team.0.clone(),
                camp_score: e.camp_score,
                camp_rank: e.rank_all22,
                lnc_score: other.camp_score,
                lnc_rank: other.rank_all22,
            });
        }
    }
    Ok(rows)
}

pub const COMPARISON_HEADER: [&str; 7] = [
    "match_id",
    "player",
    "team",
    "camp_score",
    "camp_rank",
    "lnc_score",
    "lnc_rank",
];

pub fn write_comparison(writer: impl Write, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COMPARISON_HEADER)?;
    for r in rows {
        w.write_record([
            r.match_id.as_str(),
            r.player.as_str(),
            &r.team,
            &format!("{:.6}", r.camp_score),
            &r.camp_rank.to_string(),
            &format!("{:.6}", r.lnc_score),
            &r.lnc_rank.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const MAE_HEADER: [&str; 5] = ["model", "innings", "over", "mae", "n"];

/// Flatten per-over MAE curves to CSV rows: one row per (model, innings,
/// over), the absent cells left empty.
pub fn write_mae_report(writer: impl Write, report: &ProjectionReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(MAE_HEADER)?;
    for (model, curves) in &report.curves {
        for (innings_idx, cells) in curves.iter().enumerate() {
            for (over_idx, cell) in cells.iter().enumerate() {
                w.write_record([
                    model.as_str(),
                    &(innings_idx + 1).to_string(),
                    &(over_idx + 1).to_string(),
                    &cell.mae.map(|m| format!("{m:.6}")).unwrap_or_default(),
                    &cell.n.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Summary statistics of one MAE curve (mean over populated cells).
pub fn curve_mean(cells: &[MaeCell]) -> Option<f64> {
    let populated: Vec<f64> = cells.iter().filter_map(|c| c.mae).collect();
    if populated.is_empty() {
        None
    } else {
        Some(populated.iter().sum::<f64>() / populated.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueDistributions {
    /// (match, innings, venue class, total runs).
    pub totals: Vec<(MatchId, u8, VenueClass, u32)>,
    /// Empirical CDF points per (innings, venue class): (score, F(score)).
    pub ecdf: Vec<(u8, VenueClass, u32, f64)>,
    /// Kolmogorov-Smirnov statistic between the two venue classes, per
    /// innings; absent when either class has no matches.
    pub ks: [Option<f64>; 2],
}

/// Raw innings totals split by venue class, with ECDF points and the
/// between-class KS statistic. Plotting is left to external tools.
pub fn export_venue_distributions(summaries: &[MatchSummary]) -> VenueDistributions {
    let mut totals = Vec::with_capacity(summaries.len() * 2);
    for s in summaries {
        for innings in [1u8, 2] {
            totals.push((
                s.match_id.clone(),
                innings,
                s.venue_class,
                s.innings_totals[(innings - 1) as usize].runs,
            ));
        }
    }
    totals.sort_by(|a, b| (a.1, a.2, a.3, &a.0).cmp(&(b.1, b.2, b.3, &b.0)));

    let group = |innings: u8, venue: VenueClass| -> Vec<u32> {
        let mut v: Vec<u32> = totals
            .iter()
            .filter(|(_, i, vc, _)| *i == innings && *vc == venue)
            .map(|(_, _, _, r)| *r)
            .collect();
        v.sort_unstable();
        v
    };

    let mut ecdf = Vec::new();
    let mut ks = [None, None];
    for innings in [1u8, 2] {
        let mut per_class: BTreeMap<VenueClass, Vec<u32>> = BTreeMap::new();
        for venue in [VenueClass::Asia, VenueClass::NonAsia] {
            let scores = group(innings, venue);
            for (i, score) in scores.iter().enumerate() {
                // F at the largest index of each distinct score.
                if i + 1 == scores.len() || scores[i + 1] != *score {
                    ecdf.push((innings, venue, *score, (i + 1) as f64 / scores.len() as f64));
                }
            }
            per_class.insert(venue, scores);
        }
        let asia = &per_class[&VenueClass::Asia];
        let non_asia = &per_class[&VenueClass::NonAsia];
        if !asia.is_empty() && !non_asia.is_empty() {
            let f = |scores: &[u32], x: u32| -> f64 {
                scores.iter().filter(|s| **s <= x).count() as f64 / scores.len() as f64
            };
            let stat = asia
                .iter()
                .chain(non_asia)
                .map(|&x| (f(asia, x) - f(non_asia, x)).abs())
                .fold(0.0, f64::max);
            ks[(innings - 1) as usize] = Some(stat);
        }
    }
    VenueDistributions { totals, ecdf, ks }
}

pub const VENUE_TOTALS_HEADER: [&str; 4] = ["match_id", "innings", "venue_class", "total_runs"];
pub const VENUE_ECDF_HEADER: [&str; 4] = ["innings", "venue_class", "score", "ecdf"];

pub fn write_venue_totals(writer: impl Write, dist: &VenueDistributions) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(VENUE_TOTALS_HEADER)?;
    for (id, innings, venue, runs) in &dist.totals {
        w.write_record([
            id.as_str(),
            &innings.to_string(),
            venue.as_str(),
            &runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_venue_ecdf(writer: impl Write, dist: &VenueDistributions) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(VENUE_ECDF_HEADER)?;
    for (innings, venue, score, f) in &dist.ecdf {
        w.write_record([
            &innings.to_string(),
            venue.as_str(),
            &score.to_string(),
            &format!("{f:.6}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}
