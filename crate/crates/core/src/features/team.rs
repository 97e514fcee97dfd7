//! Team batting-quality embedding.
//!
//! For every (opponent, venue class, batting innings) cell the vector holds
//! the team's average runs and win fraction over qualifying matches. With the
//! ten-team ODI pool that is 9 opponents x 2 venues x 2 innings x 2 values,
//! a 72-d vector. Cells without history stay (0, 0) and are recorded in the
//! missing mask.

use crate::data::TeamId;
use crate::features::history::TeamMatchOutcome;
use crate::{CampError, Result};

pub const TEAM_PARAMS_PER_CELL: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TeamFeatures {
    pub team: TeamId,
    /// The team's opponents, sorted by id; cell blocks follow this order.
    pub opponents: Vec<TeamId>,
    pub values: Vec<f64>,
    /// True where the (opponent, venue, innings) cell had no matches.
    pub missing_cells: Vec<bool>,
}

impl TeamFeatures {
    pub fn expected_len(n_opponents: usize) -> usize {
        n_opponents * 2 * 2 * TEAM_PARAMS_PER_CELL
    }
}

/// Flat index of a cell value: opponent-major, then venue, innings, parameter
/// (0 = average runs, 1 = win probability).
pub fn team_cell_index(opponent: usize, venue: usize, innings: usize, param: usize) -> usize {
    ((opponent * 2 + venue) * 2 + innings) * TEAM_PARAMS_PER_CELL + param
}

pub fn team_feature_names(opponents: &[TeamId]) -> Vec<String> {
    let mut names = Vec::with_capacity(TeamFeatures::expected_len(opponents.len()));
    for (o, _) in opponents.iter().enumerate() {
        for venue in ["asia", "nonasia"] {
            for innings in [1, 2] {
                for param in ["avg_runs", "win_prob"] {
                    names.push(format!("opp{}_{venue}_inn{innings}_{param}", o + 1));
                }
            }
        }
    }
    names
}

/// Build one team's embedding against every other team in the universe.
pub fn build_team_features(
    team: &TeamId,
    universe: &[TeamId],
    history: &[TeamMatchOutcome],
) -> Result<TeamFeatures> {
    if !universe.contains(team) {
        return Err(CampError::validation(format!("unknown team id {team}")));
    }
    let rows: Vec<&TeamMatchOutcome> = history.iter().filter(|h| h.team == *team).collect();
    if rows.is_empty() {
        return Err(CampError::validation(format!("team {team} has no history")));
    }
    let mut opponents: Vec<TeamId> = universe.iter().filter(|t| *t != team).cloned().collect();
    opponents.sort();

    let n_cells = opponents.len() * 4;
    let mut sums = vec![(0u32, 0u32, 0u32); n_cells]; // (matches, runs, wins)
    for row in rows {
        let Some(opp) = opponents.iter().position(|o| *o == row.opponent) else {
            return Err(CampError::validation(format!(
                "team {team}: opponent {} not in the team universe",
                row.opponent
            )));
        };
        let cell = (opp * 2 + row.venue.index()) * 2 + (row.batting_innings - 1) as usize;
        sums[cell].0 += 1;
        sums[cell].1 += row.runs;
        sums[cell].2 += u32::from(row.won);
    }

    let mut values = vec![0.0; n_cells * TEAM_PARAMS_PER_CELL];
    let mut missing_cells = vec![false; n_cells];
    for (cell, (n, runs, wins)) in sums.iter().enumerate() {
        if *n == 0 {
            missing_cells[cell] = true;
            continue;
        }
        values[cell * TEAM_PARAMS_PER_CELL] = *runs as f64 / *n as f64;
        values[cell * TEAM_PARAMS_PER_CELL + 1] = *wins as f64 / *n as f64;
    }

    Ok(TeamFeatures {
        team: team.clone(),
        opponents,
        values,
        missing_cells,
    })
}

/// Team features for the whole universe, sorted by team id.
pub fn build_all_team_features(
    universe: &[TeamId],
    history: &[TeamMatchOutcome],
) -> Result<Vec<TeamFeatures>> {
    let mut teams = universe.to_vec();
    teams.sort();
    teams
        .iter()
        .map(|t| build_team_features(t, universe, history))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::VenueClass;

    fn outcome(team: &str, opp: &str, venue: VenueClass, innings: u8, runs: u32, won: bool) -> TeamMatchOutcome {
        TeamMatchOutcome {
            team: TeamId::new(team),
            opponent: TeamId::new(opp),
            venue,
            batting_innings: innings,
            runs,
            won,
        }
    }

    fn universe(n: usize) -> Vec<TeamId> {
        (1..=n).map(|i| TeamId::new(format!("T{i:02}"))).collect()
    }

    #[test]
    fn single_match_fills_one_cell() {
        let teams = universe(10);
        let history = vec![outcome("T01", "T02", VenueClass::Asia, 1, 250, true)];
        let f = build_team_features(&teams[0], &teams, &history).unwrap();
        assert_eq!(f.values.len(), 72);
        // Opponent T02 is the first sorted opponent; Asia innings 1 is its first cell.
        let idx = team_cell_index(0, 0, 0, 0);
        assert_eq!(f.values[idx], 250.0);
        assert_eq!(f.values[idx + 1], 1.0);
        assert_eq!(f.values.iter().filter(|v| **v != 0.0).count(), 2);
        assert_eq!(f.missing_cells.iter().filter(|m| **m).count(), 35);
    }

    #[test]
    fn ten_team_vector_is_72d_and_names_match() {
        let teams = universe(10);
        let history = vec![outcome("T01", "T03", VenueClass::NonAsia, 2, 200, false)];
        let f = build_team_features(&teams[0], &teams, &history).unwrap();
        assert_eq!(f.values.len(), TeamFeatures::expected_len(9));
        assert_eq!(team_feature_names(&f.opponents).len(), 72);
    }

    #[test]
    fn unknown_team_is_an_error() {
        let teams = universe(3);
        let err = build_team_features(&TeamId::new("XX"), &teams, &[]).unwrap_err();
        assert!(err.to_string().contains("unknown team"));
    }

    #[test]
    fn aggregation_matches_brute_force() {
        // Ten matches for one team; compare against a direct per-cell scan.
        let teams = universe(4);
        let fixtures = [
            ("T02", VenueClass::Asia, 1, 251, true),
            ("T02", VenueClass::Asia, 1, 199, false),
            ("T02", VenueClass::NonAsia, 2, 180, true),
            ("T03", VenueClass::Asia, 2, 240, true),
            ("T03", VenueClass::Asia, 2, 260, true),
            ("T03", VenueClass::NonAsia, 1, 300, false),
            ("T04", VenueClass::Asia, 1, 220, false),
            ("T04", VenueClass::NonAsia, 1, 230, true),
            ("T04", VenueClass::NonAsia, 1, 250, false),
            ("T04", VenueClass::NonAsia, 2, 210, true),
        ];
        let history: Vec<_> = fixtures
            .iter()
            .map(|(o, v, i, r, w)| outcome("T01", o, *v, *i, *r, *w))
            .collect();
        let f = build_team_features(&teams[0], &teams, &history).unwrap();

        for (o, opp) in f.opponents.iter().enumerate() {
            for (v, venue) in [VenueClass::Asia, VenueClass::NonAsia].iter().enumerate() {
                for innings in [1u8, 2] {
                    let rows: Vec<_> = fixtures
                        .iter()
                        .filter(|(fo, fv, fi, _, _)| {
                            *fo == opp.as_str() && fv == venue && *fi == innings
                        })
                        .collect();
                    let idx = team_cell_index(o, v, (innings - 1) as usize, 0);
                    if rows.is_empty() {
                        assert_eq!(f.values[idx], 0.0);
                        assert_eq!(f.values[idx + 1], 0.0);
                        continue;
                    }
                    let avg: f64 =
                        rows.iter().map(|r| r.3 as f64).sum::<f64>() / rows.len() as f64;
                    let wins: f64 = rows.iter().filter(|r| r.4).count() as f64 / rows.len() as f64;
                    assert!((f.values[idx] - avg).abs() < 1e-12);
                    assert!((f.values[idx + 1] - wins).abs() < 1e-12);
                }
            }
        }
    }
}
