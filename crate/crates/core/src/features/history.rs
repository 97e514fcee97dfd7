//! Innings-level history rows extracted from match data; the raw material
//! for the team and player embeddings.

use crate::data::{MatchData, PlayerId, TeamId, VenueClass};

/// One team's outcome in one match.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamMatchOutcome {
    pub team: TeamId,
    pub opponent: TeamId,
    pub venue: VenueClass,
    /// Innings in which this team batted: 1 or 2.
    pub batting_innings: u8,
    pub runs: u32,
    pub won: bool,
}

pub fn team_history(matches: &[MatchData]) -> Vec<TeamMatchOutcome> {
    let mut out = Vec::with_capacity(matches.len() * 2);
    for m in matches {
        for innings in [1u8, 2] {
            let team = m.summary.batting_team(innings).clone();
            out.push(TeamMatchOutcome {
                opponent: m.summary.other_team(&team).clone(),
                venue: m.summary.venue_class,
                batting_innings: innings,
                runs: m.summary.innings_totals[(innings - 1) as usize].runs,
                won: m.summary.winner == team,
                team,
            });
        }
    }
    out
}

/// One player's batting line in one innings, with match context attached.
#[derive(Debug, Clone, PartialEq)]
pub struct BattingInnings {
    pub player: PlayerId,
    pub opponent: TeamId,
    pub venue: VenueClass,
    pub innings: u8,
    pub runs: u32,
    pub balls: u32,
    pub boundaries: u32,
    pub dismissed: bool,
}

/// One player's bowling figures in one innings, with match context attached.
#[derive(Debug, Clone, PartialEq)]
pub struct BowlingInnings {
    pub player: PlayerId,
    pub opponent: TeamId,
    pub venue: VenueClass,
    pub innings: u8,
    pub balls: u32,
    pub runs_conceded: u32,
    pub wickets: u32,
}

pub fn batting_history(matches: &[MatchData]) -> Vec<BattingInnings> {
    let mut out = Vec::new();
    for m in matches {
        for inn in &m.innings {
            for line in &inn.batting_lines {
                out.push(BattingInnings {
                    player: line.player.clone(),
                    opponent: inn.bowling_team.clone(),
                    venue: m.summary.venue_class,
                    innings: inn.number,
                    runs: line.runs,
                    balls: line.balls,
                    boundaries: line.boundaries,
                    dismissed: line.dismissed,
                });
            }
        }
    }
    out
}

pub fn bowling_history(matches: &[MatchData]) -> Vec<BowlingInnings> {
    let mut out = Vec::new();
    for m in matches {
        for inn in &m.innings {
            for fig in &inn.bowling_figures {
                out.push(BowlingInnings {
                    player: fig.player.clone(),
                    // The bowler's opposition is the side batting this innings.
                    opponent: inn.batting_team.clone(),
                    venue: m.summary.venue_class,
                    innings: inn.number,
                    balls: fig.balls,
                    runs_conceded: fig.runs_conceded,
                    wickets: fig.wickets,
                });
            }
        }
    }
    out
}
