//! Assembly of parsed balls and summaries into validated per-match records.

use std::collections::{BTreeMap, BTreeSet};

use crate::data::aggregate::{aggregate_overs, overs_total};
use crate::data::types::*;
use crate::{CampError, Result};

/// One innings of a match at the over level, with per-player innings lines.
#[derive(Debug, Clone, PartialEq)]
pub struct InningsData {
    pub number: u8,
    pub batting_team: TeamId,
    pub bowling_team: TeamId,
    pub overs: Vec<OverRecord>,
    pub total_runs: u32,
    pub wickets: u32,
    pub batting_lines: Vec<BattingLine>,
    pub bowling_figures: Vec<BowlingFigure>,
}

impl InningsData {
    /// Runs scored before the start of over `i` (1-based boundary index).
    pub fn runs_before_over(&self, over_index: u32) -> u32 {
        self.overs
            .iter()
            .take_while(|o| o.over_index < over_index)
            .map(|o| o.runs_total)
            .sum()
    }
}

/// A fully validated match: summary plus both innings, with the player
/// lineups observed in the ball data.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchData {
    pub summary: MatchSummary,
    pub innings: [InningsData; 2],
    pub lineups: BTreeMap<TeamId, Vec<PlayerId>>,
}

impl MatchData {
    pub fn lineup(&self, team: &TeamId) -> &[PlayerId] {
        self.lineups.get(team).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn all_players(&self) -> impl Iterator<Item = &PlayerId> {
        self.lineups.values().flatten()
    }
}

fn innings_wickets(overs: &[OverRecord]) -> u32 {
    overs.iter().map(|o| o.wickets.len() as u32).sum()
}

fn innings_lines(balls: &[BallEvent], innings: u8) -> (Vec<BattingLine>, Vec<BowlingFigure>) {
    // Appearing at the crease in any role counts as having batted.
    let mut bat: BTreeMap<&PlayerId, (u32, u32, u32, bool)> = BTreeMap::new();
    let mut bowl: BTreeMap<&PlayerId, (u32, u32, u32)> = BTreeMap::new();
    for b in balls.iter().filter(|b| b.innings == innings) {
        bat.entry(&b.striker).or_default();
        bat.entry(&b.non_striker).or_default();
        let line = bat.get_mut(&b.striker).unwrap();
        line.0 += b.runs_off_bat;
        if b.legal_delivery {
            line.1 += 1;
        }
        if b.runs_off_bat == 4 || b.runs_off_bat == 6 {
            line.2 += 1;
        }
        if let Some(d) = &b.dismissal {
            bat.entry(&d.player_out).or_default().3 = true;
        }

        let fig = bowl.entry(&b.bowler).or_default();
        if b.legal_delivery {
            fig.0 += 1;
        }
        fig.1 += b.runs_off_bat;
        if matches!(b.extras_kind, ExtrasKind::Wide | ExtrasKind::NoBall) {
            fig.1 += b.extras_runs;
        }
        if let Some(d) = &b.dismissal {
            if d.kind.credits_bowler() {
                fig.2 += 1;
            }
        }
    }
    (
        bat.into_iter()
            .map(|(player, (runs, balls, boundaries, dismissed))| BattingLine {
                player: player.clone(),
                runs,
                balls,
                boundaries,
                dismissed,
            })
            .collect(),
        bowl.into_iter()
            .map(|(player, (balls, runs_conceded, wickets))| BowlingFigure {
                player: player.clone(),
                balls,
                runs_conceded,
                wickets,
            })
            .collect(),
    )
}

/// Build and cross-validate a match from its summary and ball stream.
///
/// Rejects matches whose ball data disagrees with the summary totals and
/// matches that are not complete under standard rules: the first innings must
/// run its full scheduled length or lose all ten wickets, and the second must
/// end by reaching the target, losing ten wickets, or using all overs.
/// Rain-shortened matches are therefore rejected here.
pub fn build_match_data(
    summary: MatchSummary,
    balls: &[BallEvent],
    scheduled_overs: u32,
) -> Result<MatchData> {
    summary.validate()?;
    for b in balls {
        if b.match_id != summary.match_id {
            return Err(CampError::validation(format!(
                "match {}: ball stream contains events for {}",
                summary.match_id, b.match_id
            )));
        }
    }
    let overs = aggregate_overs(balls)?;
    let mut by_innings: [Vec<OverRecord>; 2] = [Vec::new(), Vec::new()];
    for over in overs {
        by_innings[(over.innings - 1) as usize].push(over);
    }
    if by_innings[0].is_empty() || by_innings[1].is_empty() {
        return Err(CampError::validation(format!(
            "match {}: both innings must be present",
            summary.match_id
        )));
    }

    let mut innings_data = Vec::with_capacity(2);
    for (idx, overs) in by_innings.iter().enumerate() {
        let number = idx as u8 + 1;
        let total_runs = overs_total(overs);
        let wickets = innings_wickets(overs);
        let expected = summary.innings_totals[idx];
        if total_runs != expected.runs || wickets != expected.wickets {
            return Err(CampError::validation(format!(
                "match {} innings {}: ball data gives {}/{} but summary says {}/{}",
                summary.match_id, number, total_runs, wickets, expected.runs, expected.wickets
            )));
        }
        let (batting_lines, bowling_figures) = innings_lines(balls, number);
        innings_data.push(InningsData {
            number,
            batting_team: summary.batting_team(number).clone(),
            bowling_team: summary.bowling_team(number).clone(),
            overs: overs.clone(),
            total_runs,
            wickets,
            batting_lines,
            bowling_figures,
        });
    }

    let full_first = innings_data[0].overs.len() as u32 == scheduled_overs
        && innings_data[0].overs.last().map(|o| o.legal_balls) == Some(6);
    if innings_data[0].wickets < 10 && !full_first {
        return Err(CampError::validation(format!(
            "match {}: first innings ended early without losing 10 wickets (shortened matches are rejected)",
            summary.match_id
        )));
    }
    let target = summary.target_runs();
    let second = &innings_data[1];
    let chased = second.total_runs >= target;
    let full_second = second.overs.len() as u32 == scheduled_overs
        && second.overs.last().map(|o| o.legal_balls) == Some(6);
    if !chased && second.wickets < 10 && !full_second {
        return Err(CampError::validation(format!(
            "match {}: second innings ended early without result (shortened matches are rejected)",
            summary.match_id
        )));
    }
    if chased {
        // A chase stops the moment the target is passed: only the final
        // recorded delivery may take the total to or beyond it.
        let mut cumulative = 0u32;
        let chase_balls: Vec<&BallEvent> = balls.iter().filter(|b| b.innings == 2).collect();
        for (i, b) in chase_balls.iter().enumerate() {
            cumulative += b.total_runs();
            if cumulative >= target && i + 1 != chase_balls.len() {
                return Err(CampError::validation(format!(
                    "match {}: second innings continued after reaching the target",
                    summary.match_id
                )));
            }
        }
    }
    let actual_winner = if chased {
        summary.batting_team(2)
    } else {
        summary.batting_team(1)
    };
    if !chased && second.total_runs == summary.innings_totals[0].runs {
        return Err(CampError::validation(format!(
            "match {}: tied match (no winner)",
            summary.match_id
        )));
    }
    if summary.winner != *actual_winner {
        return Err(CampError::validation(format!(
            "match {}: summary winner {} contradicts ball data winner {}",
            summary.match_id, summary.winner, actual_winner
        )));
    }

    let mut lineups: BTreeMap<TeamId, BTreeSet<PlayerId>> = BTreeMap::new();
    lineups.insert(summary.team_a.clone(), BTreeSet::new());
    lineups.insert(summary.team_b.clone(), BTreeSet::new());
    for inn in &innings_data {
        let batting = lineups.get_mut(&inn.batting_team).unwrap();
        for over in &inn.overs {
            for line in &over.batter_lines {
                batting.insert(line.player.clone());
            }
            for w in &over.wickets {
                batting.insert(w.player_out.clone());
            }
        }
        let bowling = lineups.get_mut(&inn.bowling_team).unwrap();
        for over in &inn.overs {
            bowling.insert(over.bowler.clone());
        }
    }
    // Non-striker appearances: union in players seen at the crease only.
    for (idx, inn) in [&innings_data[0], &innings_data[1]].iter().enumerate() {
        let batting_team = summary.batting_team(idx as u8 + 1).clone();
        let batting = lineups.get_mut(&batting_team).unwrap();
        for b in balls.iter().filter(|b| b.innings == inn.number) {
            batting.insert(b.striker.clone());
            batting.insert(b.non_striker.clone());
        }
    }

    let teams: Vec<_> = lineups.keys().cloned().collect();
    for (i, t1) in teams.iter().enumerate() {
        for t2 in &teams[i + 1..] {
            if let Some(shared) = lineups[t1].intersection(&lineups[t2]).next() {
                return Err(CampError::validation(format!(
                    "match {}: player {} appears for both {} and {}",
                    summary.match_id, shared, t1, t2
                )));
            }
        }
    }
    for (team, players) in &lineups {
        if players.len() > 11 {
            return Err(CampError::validation(format!(
                "match {}: {} fields {} players",
                summary.match_id,
                team,
                players.len()
            )));
        }
    }
    if !lineups.values().any(|l| l.contains(&summary.mom)) {
        return Err(CampError::validation(format!(
            "match {}: man of the match {} is in neither lineup",
            summary.match_id, summary.mom
        )));
    }

    Ok(MatchData {
        summary,
        innings: [innings_data.remove(0), innings_data.remove(0)],
        lineups: lineups
            .into_iter()
            .map(|(team, set)| (team, set.into_iter().collect()))
            .collect(),
    })
}

/// Assemble many matches, pairing each summary with its ball events.
pub fn build_matches(
    summaries: Vec<MatchSummary>,
    balls: &[BallEvent],
    scheduled_overs: u32,
) -> Result<Vec<MatchData>> {
    let mut by_match: BTreeMap<&MatchId, Vec<BallEvent>> = BTreeMap::new();
    for b in balls {
        by_match.entry(&b.match_id).or_default().push(b.clone());
    }
    let mut out = Vec::with_capacity(summaries.len());
    for summary in summaries {
        let match_balls = by_match.remove(&summary.match_id).ok_or_else(|| {
            CampError::validation(format!("match {}: no ball data", summary.match_id))
        })?;
        out.push(build_match_data(summary, &match_balls, scheduled_overs)?);
    }
    if let Some((id, _)) = by_match.into_iter().next() {
        return Err(CampError::validation(format!(
            "ball data for {id} has no matching summary"
        )));
    }
    out.sort_by(|a, b| a.summary.match_id.cmp(&b.summary.match_id));
    Ok(out)
}
