//! Per-over expected runs and player contributions, aggregated into match
//! and series ratings.
//!
//! Given a projected-remaining-runs trace R(S_1..S_{n+1}), the expected runs
//! for over i are `e_i = R(S_i) - R(S_{i+1})`. When m wickets fall in the
//! over the expectation is damped multiplicatively, `e_i' = e_i (1-w)^m`. A
//! batter who faces `b` legal balls and scores `r` contributes
//! `r - (e_i'/6) b`; the over's bowler contributes `e_i' l/6 - r_i`, where
//! `l` is the number of legal balls actually bowled (a partial final over
//! carries proportionally less expectation) and `r_i` includes extras.
//!
//! Aggregation adds a dismissal debit of `w * e_j` against a batter out in
//! over j and a credit of `w * e_k` to the bowler for every bowler-credited
//! wicket in over k; run-outs debit the batter but credit nobody. The net
//! rating is `w_bat * C_bat + w_bowl * C_bowl`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignments;
use crate::data::{MatchData, MatchId, OverRecord, PlayerId, TeamId};
use crate::features::build_stage_vectors;
use crate::projection::{project_innings, ProjectionModel};
use crate::{CampError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringParams {
    /// Wicket weight.
    pub w: f64,
    pub w_bat: f64,
    pub w_bowl: f64,
    /// When false, byes and leg-byes are excluded from the runs conceded in
    /// the bowler's contribution (they always stay out of batter credit).
    pub count_byes_against_bowler: bool,
}

impl Default for ScoringParams {
    fn default() -> Self {
        ScoringParams {
            w: 1.0,
            w_bat: 1.0,
            w_bowl: 0.2,
            count_byes_against_bowler: true,
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.1..=1.0).contains(&self.w) {
            return Err(CampError::validation(format!(
                "w: wicket weight must be in [0.1, 1], got {}",
                self.w
            )));
        }
        if self.w_bat < 0.0 || self.w_bowl < 0.0 {
            return Err(CampError::validation("w_bat and w_bowl must be >= 0"));
        }
        Ok(())
    }
}

/// Net rating from the two aggregated contributions.
pub fn camp_score(c_bat: f64, c_bowl: f64, w_bat: f64, w_bowl: f64) -> f64 {
    w_bat * c_bat + w_bowl * c_bowl
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverExpectation {
    pub over_index: u32,
    /// Raw expectation: the drop in projected remaining runs across the over.
    pub e: f64,
    /// Wicket-adjusted expectation.
    pub e_prime: f64,
    pub wickets: u32,
    /// Per-ball expectation, `e_prime / 6`.
    pub per_ball: f64,
    pub legal_balls: u32,
}

/// Expected runs per over from a projection trace of length `overs + 1`.
pub fn expected_runs(
    r_trace: &[f64],
    overs: &[OverRecord],
    w: f64,
) -> Result<Vec<OverExpectation>> {
    if r_trace.len() != overs.len() + 1 {
        return Err(CampError::validation(format!(
            "expected_runs: trace has {} boundaries for {} overs",
            r_trace.len(),
            overs.len()
        )));
    }
    Ok(overs
        .iter()
        .enumerate()
        .map(|(i, over)| {
            let e = r_trace[i] - r_trace[i + 1];
            let m = over.wickets.len() as u32;
            let e_prime = if m > 0 { e * (1.0 - w).powi(m as i32) } else { e };
            OverExpectation {
                over_index: over.over_index,
                e,
                e_prime,
                wickets: m,
                per_ball: e_prime / 6.0,
                legal_balls: over.legal_balls,
            }
        })
        .collect())
}

/// Per-batter contributions for one over. Only batters who faced a legal
/// ball or scored appear; extras never count toward a batter.
pub fn batter_contributions(
    over: &OverRecord,
    exp: &OverExpectation,
) -> Result<Vec<(PlayerId, f64)>> {
    let mut out = Vec::with_capacity(over.batter_lines.len());
    for line in &over.batter_lines {
        if line.legal_balls > over.legal_balls {
            return Err(CampError::validation(format!(
                "over {}: batter {} faced {} of {} legal balls",
                over.over_index, line.player, line.legal_balls, over.legal_balls
            )));
        }
        if line.legal_balls == 0 && line.runs == 0 {
            continue;
        }
        out.push((
            line.player.clone(),
            line.runs as f64 - exp.per_ball * line.legal_balls as f64,
        ));
    }
    Ok(out)
}

/// The over bowler's contribution: expectation (scaled to the legal balls
/// actually bowled) minus runs conceded.
pub fn bowler_contribution(
    over: &OverRecord,
    exp: &OverExpectation,
    count_byes: bool,
) -> (PlayerId, f64) {
    let conceded = if count_byes {
        over.runs_total
    } else {
        over.runs_total - over.bye_runs
    };
    let expectation = exp.e_prime * exp.legal_balls as f64 / 6.0;
    (over.bowler.clone(), expectation - conceded as f64)
}

/// Everything attributable to one player in one match.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlayerLedger {
    /// (over, contribution) batting entries.
    pub batting: Vec<(u32, f64)>,
    /// (over, contribution) bowling entries.
    pub bowling: Vec<(u32, f64)>,
    /// Dismissal debit, recorded as (over, w * e_j).
    pub dismissal: Option<(u32, f64)>,
    /// Wicket credits, one per bowler-credited wicket: (over, w * e_k).
    pub wicket_credits: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionLedger {
    pub match_id: MatchId,
    pub players: BTreeMap<PlayerId, PlayerLedger>,
    pub expectations: [Vec<OverExpectation>; 2],
}

/// Build the full two-innings ledger from per-innings projection traces.
pub fn build_ledger(
    m: &MatchData,
    traces: &[Vec<f64>; 2],
    params: &ScoringParams,
) -> Result<ContributionLedger> {
    params.validate()?;
    let mut players: BTreeMap<PlayerId, PlayerLedger> = BTreeMap::new();
    for p in m.all_players() {
        players.insert(p.clone(), PlayerLedger::default());
    }
    let mut expectations: [Vec<OverExpectation>; 2] = [Vec::new(), Vec::new()];

    for innings in [0usize, 1] {
        let exps = expected_runs(&traces[innings], &m.innings[innings].overs, params.w)?;
        for (over, exp) in m.innings[innings].overs.iter().zip(&exps) {
            for (player, c) in batter_contributions(over, exp)? {
                players
                    .get_mut(&player)
                    .ok_or_else(|| {
                        CampError::validation(format!("batter {player} missing from lineups"))
                    })?
                    .batting
                    .push((over.over_index, c));
            }
            let (bowler, c) = bowler_contribution(over, exp, params.count_byes_against_bowler);
            let bowler_ledger = players.get_mut(&bowler).ok_or_else(|| {
                CampError::validation(format!("bowler {bowler} missing from lineups"))
            })?;
            bowler_ledger.bowling.push((over.over_index, c));

            for wicket in &over.wickets {
                if wicket.bowler_credited {
                    players
                        .get_mut(&over.bowler)
                        .unwrap()
                        .wicket_credits
                        .push((over.over_index, params.w * exp.e));
                }
                let out_ledger = players.get_mut(&wicket.player_out).ok_or_else(|| {
                    CampError::validation(format!(
                        "dismissed player {} missing from lineups",
                        wicket.player_out
                    ))
                })?;
                if out_ledger.dismissal.is_some() {
                    return Err(CampError::validation(format!(
                        "player {} dismissed twice",
                        wicket.player_out
                    )));
                }
                out_ledger.dismissal = Some((over.over_index, params.w * exp.e));
            }
        }
        expectations[innings] = exps;
    }

    Ok(ContributionLedger {
        match_id: m.summary.match_id.clone(),
        players,
        expectations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerRating {
    pub player: PlayerId,
    pub team: TeamId,
    pub c_bat: f64,
    pub c_bowl: f64,
    pub camp_score: f64,
    /// Rank within the winning team's players; unset for the losing side.
    pub rank_winning11: Option<u32>,
    pub rank_all22: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingReport {
    pub match_id: MatchId,
    pub method: String,
    pub params: ScoringParams,
    /// Sorted by `rank_all22`.
    pub entries: Vec<PlayerRating>,
}

impl RatingReport {
    pub fn entry(&self, player: &PlayerId) -> Option<&PlayerRating> {
        self.entries.iter().find(|e| e.player == *player)
    }
}

/// Deterministic rating order: score, then batting contribution, then id.
pub fn rating_order(a: &PlayerRating, b: &PlayerRating) -> Ordering {
    b.camp_score
        .total_cmp(&a.camp_score)
        .then(b.c_bat.total_cmp(&a.c_bat))
        .then(a.player.cmp(&b.player))
}

/// Fold a ledger into the per-player match report.
pub fn aggregate_match(
    ledger: &ContributionLedger,
    m: &MatchData,
    params: &ScoringParams,
) -> Result<RatingReport> {
    params.validate()?;
    let mut entries = Vec::with_capacity(ledger.players.len());
    for (team, lineup) in &m.lineups {
        for player in lineup {
            let led = ledger.players.get(player).ok_or_else(|| {
                CampError::validation(format!("player {player} missing from ledger"))
            })?;
            let mut c_bat: f64 = led.batting.iter().map(|(_, c)| c).sum();
            if let Some((_, debit)) = led.dismissal {
                c_bat -= debit;
            }
            let c_bowl: f64 = led.bowling.iter().map(|(_, c)| c).sum::<f64>()
                + led.wicket_credits.iter().map(|(_, c)| c).sum::<f64>();
            entries.push(PlayerRating {
                player: player.clone(),
                team: team.clone(),
                c_bat,
                c_bowl,
                camp_score: camp_score(c_bat, c_bowl, params.w_bat, params.w_bowl),
                rank_winning11: None,
                rank_all22: 0,
            });
        }
    }
    entries.sort_by(rating_order);
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank_all22 = i as u32 + 1;
    }
    let mut winners_rank = 0u32;
    for e in entries.iter_mut() {
        if e.team == m.summary.winner {
            winners_rank += 1;
            e.rank_winning11 = Some(winners_rank);
        }
    }
    Ok(RatingReport {
        match_id: ledger.match_id.clone(),
        method: "camp".to_owned(),
        params: *params,
        entries,
    })
}

/// The shared contribution pipeline: any projection trace source runs
/// through the same equations, so substituting a different trace changes
/// values but never report shape.
pub fn rate_match_with_traces(
    m: &MatchData,
    traces: &[Vec<f64>; 2],
    params: &ScoringParams,
) -> Result<RatingReport> {
    let ledger = build_ledger(m, traces, params)?;
    aggregate_match(&ledger, m, params)
}

/// Per-innings trained models for one rating run.
pub struct InningsModels {
    pub first: ProjectionModel,
    pub second: ProjectionModel,
}

/// Full CAMP rating of one match: stage vectors, projection, contributions.
pub fn camp_rate_match(
    m: &MatchData,
    assignments: &ClusterAssignments,
    models: &InningsModels,
    params: &ScoringParams,
    scheduled_overs: u32,
) -> Result<RatingReport> {
    let mut traces: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (idx, model) in [(0usize, &models.first), (1, &models.second)] {
        let stages = build_stage_vectors(m, idx as u8 + 1, assignments, scheduled_overs)?;
        traces[idx] = project_innings(&stages, model)?;
    }
    rate_match_with_traces(m, &traces, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub player: PlayerId,
    pub team: TeamId,
    pub c_bat: f64,
    pub c_bowl: f64,
    pub camp_score: f64,
    pub rank: u32,
}

/// Sum per-player scores across matches and rank them.
pub fn aggregate_series(reports: &[RatingReport]) -> Vec<SeriesEntry> {
    let mut by_player: BTreeMap<(PlayerId, TeamId), (f64, f64, f64)> = BTreeMap::new();
    for report in reports {
        for e in &report.entries {
            let acc = by_player
                .entry((e.player.clone(), e.team.clone()))
                .or_insert((0.0, 0.0, 0.0));
            acc.0 += e.c_bat;
            acc.1 += e.c_bowl;
            acc.2 += e.camp_score;
        }
    }
    let mut entries: Vec<SeriesEntry> = by_player
        .into_iter()
        .map(|((player, team), (c_bat, c_bowl, camp_score))| SeriesEntry {
            player,
            team,
            c_bat,
            c_bowl,
            camp_score,
            rank: 0,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.camp_score
            .total_cmp(&a.camp_score)
            .then(b.c_bat.total_cmp(&a.c_bat))
            .then(a.player.cmp(&b.player))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i as u32 + 1;
    }
    entries
}

pub const RATING_HEADER: [&str; 8] = [
    "match_id",
    "player",
    "team",
    "c_bat",
    "c_bowl",
    "camp_score",
    "rank_winning11",
    "rank_all22",
];

pub fn write_ratings(writer: impl Write, reports: &[RatingReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RATING_HEADER)?;
    for report in reports {
        for e in &report.entries {
            w.write_record([
                report.match_id.as_str(),
                e.player.as_str(),
                e.team.as_str(),
                &format!("{:.6}", e.c_bat),
                &format!("{:.6}", e.c_bowl),
                &format!("{:.6}", e.camp_score),
                &e.rank_winning11.map(|r| r.to_string()).unwrap_or_default(),
                &e.rank_all22.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read rating reports back from the CSV artifact, grouped per match. The
/// scoring parameters are not part of the wire format; callers that need
/// them must consult the run manifest.
pub fn read_ratings(
    reader: impl std::io::Read,
    method: &str,
    params: &ScoringParams,
) -> Result<Vec<RatingReport>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<&str> = rdr.headers()?.iter().collect();
    if header != RATING_HEADER {
        return Err(CampError::parse(1, "ratings: unexpected header"));
    }
    let mut by_match: BTreeMap<MatchId, Vec<PlayerRating>> = BTreeMap::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = record?;
        let num = |idx: usize| -> Result<f64> {
            record[idx]
                .parse()
                .map_err(|_| CampError::parse(line, format!("invalid number {:?}", &record[idx])))
        };
        let rank_winning11 = if record[6].is_empty() {
            None
        } else {
            Some(record[6].parse().map_err(|_| CampError::parse(line, "bad rank"))?)
        };
        by_match
            .entry(MatchId::new(&record[0]))
            .or_default()
            .push(PlayerRating {
                player: PlayerId::new(&record[1]),
                team: TeamId::new(&record[2]),
                c_bat: num(3)?,
                c_bowl: num(4)?,
                camp_score: num(5)?,
                rank_winning11,
                rank_all22: record[7].parse().map_err(|_| CampError::parse(line, "bad rank"))?,
            });
    }
    Ok(by_match
        .into_iter()
        .map(|(match_id, mut entries)| {
            entries.sort_by_key(|e| e.rank_all22);
            RatingReport {
                match_id,
                method: method.to_owned(),
                params: *params,
                entries,
            }
        })
        .collect())
}

pub const SERIES_HEADER: [&str; 6] = ["player", "team", "c_bat", "c_bowl", "camp_score", "rank"];

pub fn write_series(writer: impl Write, entries: &[SeriesEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SERIES_HEADER)?;
    for e in entries {
        w.write_record([
            e.player.as_str(),
            e.team.as_str(),
            &format!("{:.6}", e.c_bat),
            &format!("{:.6}", e.c_bowl),
            &format!("{:.6}", e.camp_score),
            &e.rank.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::data::{DismissalKind, MatchData};

    fn over_record(runs_per_ball: &[u32], bowler: &str, striker: &str) -> OverRecord {
        use crate::data::{BatterOverLine, MatchId};
        OverRecord {
            match_id: MatchId::new("M"),
            innings: 1,
            over_index: 1,
            runs_total: runs_per_ball.iter().sum(),
            bye_runs: 0,
            batter_lines: vec![BatterOverLine {
                player: PlayerId::new(striker),
                runs: runs_per_ball.iter().sum(),
                legal_balls: runs_per_ball.len() as u32,
            }],
            wickets: Vec::new(),
            bowler: PlayerId::new(bowler),
            legal_balls: runs_per_ball.len() as u32,
            short_over_warning: false,
        }
    }

    #[test]
    fn expectation_is_trace_difference() {
        let over = over_record(&[1, 1, 1, 1, 1, 1], "B", "P");
        let exps = expected_runs(&[200.0, 194.0], &[over], 1.0).unwrap();
        assert_eq!(exps[0].e, 6.0);
        assert_eq!(exps[0].e_prime, 6.0);
    }

    #[test]
    fn full_wicket_weight_zeroes_the_expectation() {
        let mut over = over_record(&[0; 6], "B", "P");
        over.wickets.push(crate::data::WicketEvent {
            kind: DismissalKind::Bowled,
            player_out: PlayerId::new("P"),
            bowler_credited: true,
        });
        let exps = expected_runs(&[50.0, 42.0], &[over], 1.0).unwrap();
        assert_eq!(exps[0].e, 8.0);
        assert_eq!(exps[0].e_prime, 0.0);
    }

    #[test]
    fn partial_wicket_weight_applies_per_wicket() {
        let mut over = over_record(&[0; 6], "B", "P");
        over.wickets.push(crate::data::WicketEvent {
            kind: DismissalKind::Bowled,
            player_out: PlayerId::new("P"),
            bowler_credited: true,
        });
        let exps = expected_runs(&[50.0, 42.0], &[over.clone()], 0.3).unwrap();
        assert!((exps[0].e_prime - 5.6).abs() < 1e-12);

        over.wickets.push(crate::data::WicketEvent {
            kind: DismissalKind::Caught,
            player_out: PlayerId::new("Q"),
            bowler_credited: true,
        });
        let exps = expected_runs(&[50.0, 42.0], &[over], 0.3).unwrap();
        assert!((exps[0].e_prime - 3.92).abs() < 1e-12);
    }

    #[test]
    fn trace_length_mismatch_is_an_error() {
        let over = over_record(&[0; 6], "B", "P");
        assert!(expected_runs(&[50.0], &[over], 1.0).is_err());
    }

    #[test]
    fn batter_contribution_examples() {
        // Faces all six, scores 10, e' = 6: contribution 4.
        let over = over_record(&[2, 2, 2, 2, 1, 1], "B", "P");
        let exp = OverExpectation {
            over_index: 1,
            e: 6.0,
            e_prime: 6.0,
            wickets: 0,
            per_ball: 1.0,
            legal_balls: 6,
        };
        let cs = batter_contributions(&over, &exp).unwrap();
        assert_eq!(cs, vec![(PlayerId::new("P"), 4.0)]);

        // Faces 3 scoring 2 with e' = 9: 2 - 4.5 = -2.5.
        let mut over = over_record(&[1, 1, 0], "B", "P");
        over.batter_lines[0].runs = 2;
        let exp = OverExpectation {
            over_index: 1,
            e: 9.0,
            e_prime: 9.0,
            wickets: 0,
            per_ball: 1.5,
            legal_balls: 6,
        };
        over.legal_balls = 6;
        let cs = batter_contributions(&over, &exp).unwrap();
        assert_eq!(cs[0].1, -2.5);
    }

    #[test]
    fn nonstriker_with_no_balls_has_no_entry() {
        use crate::data::BatterOverLine;
        let mut over = over_record(&[1; 6], "B", "P");
        over.batter_lines.push(BatterOverLine {
            player: PlayerId::new("NS"),
            runs: 0,
            legal_balls: 0,
        });
        let exp = OverExpectation {
            over_index: 1,
            e: 6.0,
            e_prime: 6.0,
            wickets: 0,
            per_ball: 1.0,
            legal_balls: 6,
        };
        let cs = batter_contributions(&over, &exp).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].0, PlayerId::new("P"));
    }

    #[test]
    fn bowler_contribution_examples() {
        let over = over_record(&[1, 1, 0, 0, 0, 0], "B", "P");
        let exp = OverExpectation {
            over_index: 1,
            e: 6.0,
            e_prime: 6.0,
            wickets: 0,
            per_ball: 1.0,
            legal_balls: 6,
        };
        assert_eq!(bowler_contribution(&over, &exp, true).1, 4.0);

        // Wicket over at w = 1 conceding 5: e' = 0, contribution -5.
        let over = over_record(&[5, 0, 0, 0, 0, 0], "B", "P");
        let exp = OverExpectation {
            over_index: 1,
            e: 7.0,
            e_prime: 0.0,
            wickets: 1,
            per_ball: 0.0,
            legal_balls: 6,
        };
        assert_eq!(bowler_contribution(&over, &exp, true).1, -5.0);
    }

    /// A deterministic no-wicket fixed point: two runs off every ball.
    fn fixed_point_match() -> MatchData {
        let even_over = || vec![runs(2), runs(2), runs(2), runs(2), runs(2), runs(2)];
        let inn1 = InningsScript {
            overs: vec![("B_p1", even_over()), ("B_p2", even_over())],
            pairs: vec![("A_p1", "A_p2"), ("A_p2", "A_p1")],
        };
        // Chase of 25: 12 then 13 (last ball a three); B wins on the final ball.
        let inn2 = InningsScript {
            overs: vec![
                ("A_p1", even_over()),
                ("A_p2", vec![runs(2), runs(2), runs(2), runs(2), runs(2), runs(3)]),
            ],
            pairs: vec![("B_p1", "B_p2"), ("B_p2", "B_p1")],
        };
        script_match("FIX", "A", "B", inn1, inn2, "B", "B_p1", 2)
    }

    #[test]
    fn meeting_expectation_everywhere_scores_zero() {
        let m = fixed_point_match();
        let traces = [vec![24.0, 12.0, 0.0], vec![25.0, 13.0, 0.0]];
        let report = rate_match_with_traces(&m, &traces, &ScoringParams::default()).unwrap();
        for e in &report.entries {
            assert_eq!(e.c_bat, 0.0, "{}", e.player);
            assert_eq!(e.c_bowl, 0.0, "{}", e.player);
            assert_eq!(e.camp_score, 0.0);
        }
    }

    #[test]
    fn zero_sum_coupling_when_one_batter_faces_all_balls() {
        // One batter faces every ball and there are no extras: the bowler's
        // contribution is exactly the negated batter sum, any trace.
        let m = fixed_point_match();
        let traces = [vec![30.0, 17.0, 0.0], vec![40.0, 21.0, 0.0]];
        let ledger = build_ledger(&m, &traces, &ScoringParams::default()).unwrap();
        for innings in 0..2 {
            for (over, exp) in m.innings[innings]
                .overs
                .iter()
                .zip(&ledger.expectations[innings])
            {
                let batters: f64 = over
                    .batter_lines
                    .iter()
                    .map(|l| l.runs as f64 - exp.per_ball * l.legal_balls as f64)
                    .sum();
                let (_, bowler_c) = bowler_contribution(over, exp, true);
                assert!((bowler_c + batters).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn run_out_debits_batter_and_credits_nobody() {
        let even_over = || vec![runs(2), runs(2), runs(2), runs(2), runs(2), runs(2)];
        let inn1 = InningsScript {
            overs: vec![
                ("B_p1", vec![runs(2), runs(2), runs(2), runs(2), runs(2), out(1, DismissalKind::RunOut, "A_p2")]),
                ("B_p2", even_over()),
            ],
            pairs: vec![("A_p1", "A_p2"), ("A_p3", "A_p1")],
        };
        let inn2 = InningsScript {
            overs: vec![
                ("A_p1", even_over()),
                ("A_p2", vec![runs(2), runs(2), runs(2), runs(2), runs(2), runs(6)]),
            ],
            pairs: vec![("B_p1", "B_p2"), ("B_p2", "B_p1")],
        };
        let m = script_match("RO", "A", "B", inn1, inn2, "B", "B_p1", 2);
        let params = ScoringParams { w: 0.5, ..ScoringParams::default() };
        let traces = [vec![23.0, 12.0, 0.0], vec![24.0, 12.0, 0.0]];
        let ledger = build_ledger(&m, &traces, &params).unwrap();

        let victim = &ledger.players[&PlayerId::new("A_p2")];
        let e1 = ledger.expectations[0][0].e;
        assert_eq!(victim.dismissal, Some((1, params.w * e1)));
        // No bowler anywhere holds a wicket credit.
        for (id, led) in &ledger.players {
            assert!(led.wicket_credits.is_empty(), "{id} got credited");
        }
    }

    #[test]
    fn bowled_wicket_credits_the_bowler_at_full_weight() {
        let even_over = || vec![runs(2), runs(2), runs(2), runs(2), runs(2), runs(2)];
        let inn1 = InningsScript {
            overs: vec![
                ("B_p1", vec![runs(0), runs(0), runs(0), runs(0), runs(0), out(0, DismissalKind::Bowled, "A_p1")]),
                ("B_p2", even_over()),
            ],
            pairs: vec![("A_p1", "A_p2"), ("A_p3", "A_p2")],
        };
        let inn2 = InningsScript {
            // Chasing 13 after a 12-run innings: one ball past the target.
            overs: vec![("A_p2", even_over()), ("A_p3", vec![runs(2)])],
            pairs: vec![("B_p1", "B_p2"), ("B_p2", "B_p1")],
        };
        let m = script_match("WK", "A", "B", inn1, inn2, "B", "B_p1", 2);
        // Maiden wicket over with e = 7 at w = 1: bowler contribution for the
        // over is 0 - 0 = 0, and the credit in aggregation is w * e = 7.
        let traces = [vec![19.0, 12.0, 0.0], vec![14.0, 2.0, 0.0]];
        let params = ScoringParams::default();
        let ledger = build_ledger(&m, &traces, &params).unwrap();
        let bowler = &ledger.players[&PlayerId::new("B_p1")];
        assert_eq!(bowler.bowling, vec![(1, 0.0)]);
        assert_eq!(bowler.wicket_credits, vec![(1, 7.0)]);
        // The dismissed batter is debited the full unadjusted expectation.
        let victim = &ledger.players[&PlayerId::new("A_p1")];
        assert_eq!(victim.dismissal, Some((1, 7.0)));
        let report = aggregate_match(&ledger, &m, &params).unwrap();
        let victim_rating = report.entry(&PlayerId::new("A_p1")).unwrap();
        // c = 0 - per_ball*6 ... per_ball is 0 at w=1; sum of c is 0; debit 7.
        assert_eq!(victim_rating.c_bat, -7.0);
        let bowler_rating = report.entry(&PlayerId::new("B_p1")).unwrap();
        assert_eq!(bowler_rating.c_bowl, 7.0);
    }

    #[test]
    fn telescoping_sums_hold() {
        let m = fixed_point_match();
        let traces = [vec![31.0, 14.0, 0.0], vec![29.0, 16.0, 0.0]];
        let ledger = build_ledger(&m, &traces, &ScoringParams { w: 0.4, ..Default::default() }).unwrap();
        for innings in 0..2 {
            let e_sum: f64 = ledger.expectations[innings].iter().map(|e| e.e).sum();
            assert!((e_sum - traces[innings][0]).abs() < 1e-9);
            let r_sum: u32 = m.innings[innings].overs.iter().map(|o| o.runs_total).sum();
            assert_eq!(r_sum, m.innings[innings].total_runs);
        }
    }

    #[test]
    fn eq9_linearity_and_rank_permutations() {
        let m = fixed_point_match();
        let traces = [vec![40.0, 25.0, 0.0], vec![10.0, 2.0, 0.0]];
        let params = ScoringParams { w_bat: 1.3, w_bowl: 0.7, ..Default::default() };
        let report = rate_match_with_traces(&m, &traces, &params).unwrap();
        for e in &report.entries {
            assert_eq!(e.camp_score, 1.3 * e.c_bat + 0.7 * e.c_bowl);
        }
        let mut all: Vec<u32> = report.entries.iter().map(|e| e.rank_all22).collect();
        all.sort_unstable();
        assert_eq!(all, (1..=report.entries.len() as u32).collect::<Vec<_>>());
        let mut winners: Vec<u32> = report
            .entries
            .iter()
            .filter_map(|e| e.rank_winning11)
            .collect();
        winners.sort_unstable();
        let n_winners = report
            .entries
            .iter()
            .filter(|e| e.team == m.summary.winner)
            .count() as u32;
        assert_eq!(winners, (1..=n_winners).collect::<Vec<_>>());
    }

    #[test]
    fn scaling_both_weights_preserves_all_rankings() {
        let m = fixed_point_match();
        let traces = [vec![40.0, 25.0, 0.0], vec![10.0, 2.0, 0.0]];
        let a = rate_match_with_traces(&m, &traces, &ScoringParams::default()).unwrap();
        let scaled = ScoringParams {
            w_bat: 1.0 * 3.7,
            w_bowl: 0.2 * 3.7,
            ..ScoringParams::default()
        };
        let b = rate_match_with_traces(&m, &traces, &scaled).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.player, y.player);
            assert_eq!(x.rank_all22, y.rank_all22);
            assert_eq!(x.rank_winning11, y.rank_winning11);
        }
    }

    #[test]
    fn table11_equation_fidelity() {
        // Known aggregated pairs combine exactly under the default weights.
        let cases = [
            (12.95, 0.0, 12.95),
            (0.0, 64.20, 12.84),
            (-14.08, -17.00, -17.48),
        ];
        for (c_bat, c_bowl, want) in cases {
            let got = camp_score(c_bat, c_bowl, 1.0, 0.2);
            assert!((got - want).abs() < 0.01, "got {got}, want {want}");
        }
    }

    #[test]
    fn series_aggregation_sums_and_ranks() {
        let m = fixed_point_match();
        let traces = [vec![40.0, 25.0, 0.0], vec![10.0, 2.0, 0.0]];
        let report = rate_match_with_traces(&m, &traces, &ScoringParams::default()).unwrap();
        // A single match series equals the match table.
        let series = aggregate_series(std::slice::from_ref(&report));
        for s in &series {
            let e = report.entry(&s.player).unwrap();
            assert_eq!(s.camp_score, e.camp_score);
            assert_eq!(s.rank, e.rank_all22);
        }
        // Two matches sum.
        let series2 = aggregate_series(&[report.clone(), report.clone()]);
        for s in &series2 {
            let e = report.entry(&s.player).unwrap();
            assert!((s.camp_score - 2.0 * e.camp_score).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_wicket_weight_is_rejected() {
        let params = ScoringParams { w: 0.05, ..Default::default() };
        assert!(params.validate().is_err());
        let params = ScoringParams { w: 1.5, ..Default::default() };
        assert!(params.validate().is_err());
    }
}
