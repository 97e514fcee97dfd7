//! Batter and bowler embeddings.
//!
//! Each player is summarized per scenario, where a scenario is one
//! (venue class, opposition team-cluster, innings) combination. With the
//! default three team clusters there are 12 scenarios. Batters carry 11
//! parameters per scenario (6 runs bins, 3 strike-rate bins, boundary and
//! not-out counts: 132-d); bowlers carry 13 (4 bowling-average bins, 5
//! strike-rate bins, 4 economy bins: 156-d).
//!
//! Bin edges are configurable; per-innings bowling average and strike rate
//! are undefined for wicketless innings and those increments are skipped
//! rather than sentinel-filled.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{PlayerId, TeamId};
use crate::features::history::{BattingInnings, BowlingInnings};
use crate::{CampError, Result};

/// Ascending interior edges; `n` edges make `n + 1` half-open bins
/// `[0, e1), [e1, e2), ..., [en, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinEdges(Vec<f64>);

impl BinEdges {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CampError::validation("bin edges must be strictly ascending"));
        }
        if edges.first().is_some_and(|e| *e <= 0.0) {
            return Err(CampError::validation("bin edges must be positive"));
        }
        Ok(BinEdges(edges))
    }

    pub fn n_bins(&self) -> usize {
        self.0.len() + 1
    }

    pub fn index(&self, value: f64) -> usize {
        self.0.iter().position(|e| value < *e).unwrap_or(self.0.len())
    }

    pub fn edges(&self) -> &[f64] {
        &self.0
    }
}

/// All bin edges used by the player embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerBins {
    pub batter_runs: BinEdges,
    pub batter_strike_rate: BinEdges,
    pub bowler_average: BinEdges,
    pub bowler_strike_rate: BinEdges,
    pub bowler_economy: BinEdges,
}

impl Default for PlayerBins {
    fn default() -> Self {
        PlayerBins {
            batter_runs: BinEdges(vec![10.0, 25.0, 50.0, 75.0, 100.0]),
            batter_strike_rate: BinEdges(vec![50.0, 100.0]),
            bowler_average: BinEdges(vec![20.0, 30.0, 40.0]),
            bowler_strike_rate: BinEdges(vec![25.0, 35.0, 45.0, 60.0]),
            bowler_economy: BinEdges(vec![4.0, 5.0, 6.0]),
        }
    }
}

impl PlayerBins {
    pub fn batter_params(&self) -> usize {
        self.batter_runs.n_bins() + self.batter_strike_rate.n_bins() + 2
    }

    pub fn bowler_params(&self) -> usize {
        self.bowler_average.n_bins() + self.bowler_strike_rate.n_bins() + self.bowler_economy.n_bins()
    }
}

/// Opposition team cluster ids, 1-based.
pub type TeamClusters = BTreeMap<TeamId, u32>;

pub fn scenario_count(n_team_clusters: usize) -> usize {
    2 * n_team_clusters * 2
}

/// Scenario index: venue-major, then opposition cluster, then innings.
pub fn scenario_index(venue: usize, cluster: u32, innings: u8, n_team_clusters: usize) -> usize {
    (venue * n_team_clusters + (cluster - 1) as usize) * 2 + (innings - 1) as usize
}

fn scenario_names(n_team_clusters: usize) -> Vec<String> {
    let mut out = Vec::new();
    for venue in ["asia", "nonasia"] {
        for c in 1..=n_team_clusters {
            for innings in [1, 2] {
                out.push(format!("{venue}_c{c}_inn{innings}"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatterFeatures {
    pub player: PlayerId,
    pub values: Vec<f64>,
    pub never_batted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BowlerFeatures {
    pub player: PlayerId,
    pub values: Vec<f64>,
    pub never_bowled: bool,
}

pub fn batter_feature_names(n_team_clusters: usize, bins: &PlayerBins) -> Vec<String> {
    let mut params = Vec::new();
    for i in 1..=bins.batter_runs.n_bins() {
        params.push(format!("runs_bin{i}"));
    }
    for i in 1..=bins.batter_strike_rate.n_bins() {
        params.push(format!("sr_bin{i}"));
    }
    params.push("boundaries".into());
    params.push("not_outs".into());
    scenario_names(n_team_clusters)
        .iter()
        .flat_map(|s| params.iter().map(move |p| format!("{s}_{p}")))
        .collect()
}

pub fn bowler_feature_names(n_team_clusters: usize, bins: &PlayerBins) -> Vec<String> {
    let mut params = Vec::new();
    for i in 1..=bins.bowler_average.n_bins() {
        params.push(format!("avg_bin{i}"));
    }
    for i in 1..=bins.bowler_strike_rate.n_bins() {
        params.push(format!("sr_bin{i}"));
    }
    for i in 1..=bins.bowler_economy.n_bins() {
        params.push(format!("econ_bin{i}"));
    }
    scenario_names(n_team_clusters)
        .iter()
        .flat_map(|s| params.iter().map(move |p| format!("{s}_{p}")))
        .collect()
}

fn opposition_cluster(
    clusters: &TeamClusters,
    opponent: &TeamId,
    n_team_clusters: usize,
) -> Result<u32> {
    let cluster = *clusters.get(opponent).ok_or_else(|| {
        CampError::validation(format!("opponent {opponent} has no team cluster"))
    })?;
    if cluster < 1 || cluster as usize > n_team_clusters {
        return Err(CampError::validation(format!(
            "opponent {opponent}: cluster {cluster} out of range 1..={n_team_clusters}"
        )));
    }
    Ok(cluster)
}

/// Build one batter's embedding from their innings-level history.
pub fn build_batter_features(
    player: &PlayerId,
    history: &[BattingInnings],
    team_clusters: &TeamClusters,
    n_team_clusters: usize,
    bins: &PlayerBins,
) -> Result<BatterFeatures> {
    let params = bins.batter_params();
    let mut values = vec![0.0; scenario_count(n_team_clusters) * params];
    let rows: Vec<_> = history.iter().filter(|r| r.player == *player).collect();
    if rows.is_empty() {
        return Ok(BatterFeatures {
            player: player.clone(),
            values,
            never_batted: true,
        });
    }
    for row in rows {
        let cluster = opposition_cluster(team_clusters, &row.opponent, n_team_clusters)?;
        let s = scenario_index(row.venue.index(), cluster, row.innings, n_team_clusters);
        let base = s * params;
        values[base + bins.batter_runs.index(row.runs as f64)] += 1.0;
        if row.balls > 0 {
            let sr = 100.0 * row.runs as f64 / row.balls as f64;
            values[base + bins.batter_runs.n_bins() + bins.batter_strike_rate.index(sr)] += 1.0;
        }
        values[base + params - 2] += row.boundaries as f64;
        if !row.dismissed {
            values[base + params - 1] += 1.0;
        }
    }
    Ok(BatterFeatures {
        player: player.clone(),
        values,
        never_batted: false,
    })
}

/// Build one bowler's embedding from their innings-level figures.
pub fn build_bowler_features(
    player: &PlayerId,
    history: &[BowlingInnings],
    team_clusters: &TeamClusters,
    n_team_clusters: usize,
    bins: &PlayerBins,
) -> Result<BowlerFeatures> {
    let params = bins.bowler_params();
    let mut values = vec![0.0; scenario_count(n_team_clusters) * params];
    let rows: Vec<_> = history.iter().filter(|r| r.player == *player).collect();
    if rows.is_empty() {
        return Ok(BowlerFeatures {
            player: player.clone(),
            values,
            never_bowled: true,
        });
    }
    let n_avg = bins.bowler_average.n_bins();
    let n_sr = bins.bowler_strike_rate.n_bins();
    for row in rows {
        let cluster = opposition_cluster(team_clusters, &row.opponent, n_team_clusters)?;
        let s = scenario_index(row.venue.index(), cluster, row.innings, n_team_clusters);
        let base = s * params;
        if row.wickets > 0 {
            let avg = row.runs_conceded as f64 / row.wickets as f64;
            let sr = row.balls as f64 / row.wickets as f64;
            values[base + bins.bowler_average.index(avg)] += 1.0;
            values[base + n_avg + bins.bowler_strike_rate.index(sr)] += 1.0;
        }
        if row.balls > 0 {
            let economy = row.runs_conceded as f64 * 6.0 / row.balls as f64;
            values[base + n_avg + n_sr + bins.bowler_economy.index(economy)] += 1.0;
        }
    }
    Ok(BowlerFeatures {
        player: player.clone(),
        values,
        never_bowled: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::VenueClass;
    use proptest::prelude::*;

    fn clusters() -> TeamClusters {
        [("OPP", 2u32), ("OTH", 1u32)]
            .into_iter()
            .map(|(t, c)| (TeamId::new(t), c))
            .collect()
    }

    fn batting_row(runs: u32, balls: u32, boundaries: u32, dismissed: bool) -> BattingInnings {
        BattingInnings {
            player: PlayerId::new("P"),
            opponent: TeamId::new("OPP"),
            venue: VenueClass::Asia,
            innings: 1,
            runs,
            balls,
            boundaries,
            dismissed,
        }
    }

    #[test]
    fn hand_binned_batting_innings() {
        // 87 off 108 with 10 boundaries, dismissed, Asia, vs cluster 2, innings 1:
        // runs bin [75,100), strike rate 80.6 in [50,100).
        let bins = PlayerBins::default();
        let history = vec![batting_row(87, 108, 10, true)];
        let f = build_batter_features(&PlayerId::new("P"), &history, &clusters(), 3, &bins).unwrap();
        assert_eq!(f.values.len(), 132);
        let s = scenario_index(0, 2, 1, 3);
        let base = s * bins.batter_params();
        let expected_runs_bin = 4; // [75, 100)
        assert_eq!(f.values[base + expected_runs_bin], 1.0);
        let sr_base = base + bins.batter_runs.n_bins();
        assert_eq!(f.values[sr_base + 1], 1.0); // [50, 100)
        assert_eq!(f.values[base + bins.batter_params() - 2], 10.0);
        assert_eq!(f.values[base + bins.batter_params() - 1], 0.0);
        assert_eq!(f.values.iter().sum::<f64>(), 12.0);
    }

    #[test]
    fn never_batted_is_zero_vector_with_flag() {
        let bins = PlayerBins::default();
        let f = build_batter_features(&PlayerId::new("P"), &[], &clusters(), 3, &bins).unwrap();
        assert!(f.never_batted);
        assert!(f.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_ball_notout_skips_strike_rate_bin() {
        let bins = PlayerBins::default();
        let history = vec![batting_row(0, 0, 0, false)];
        let f = build_batter_features(&PlayerId::new("P"), &history, &clusters(), 3, &bins).unwrap();
        let s = scenario_index(0, 2, 1, 3);
        let base = s * bins.batter_params();
        assert_eq!(f.values[base], 1.0); // runs bin [0, 10)
        let sr_slice =
            &f.values[base + bins.batter_runs.n_bins()..base + bins.batter_runs.n_bins() + 3];
        assert!(sr_slice.iter().all(|v| *v == 0.0));
        assert_eq!(f.values[base + bins.batter_params() - 1], 1.0); // not-out
    }

    #[test]
    fn hand_binned_bowling_innings() {
        // 10 overs, 45 runs, 3 wickets: economy 4.5, strike rate 20, average 15.
        let bins = PlayerBins::default();
        let history = vec![BowlingInnings {
            player: PlayerId::new("Q"),
            opponent: TeamId::new("OPP"),
            venue: VenueClass::NonAsia,
            innings: 2,
            balls: 60,
            runs_conceded: 45,
            wickets: 3,
        }];
        let f = build_bowler_features(&PlayerId::new("Q"), &history, &clusters(), 3, &bins).unwrap();
        assert_eq!(f.values.len(), 156);
        let s = scenario_index(1, 2, 2, 3);
        let base = s * bins.bowler_params();
        assert_eq!(f.values[base], 1.0); // average 15 in [0, 20)
        assert_eq!(f.values[base + 4], 1.0); // strike rate 20 in [0, 25)
        assert_eq!(f.values[base + 4 + 5 + 1], 1.0); // economy 4.5 in [4, 5)
        assert_eq!(f.values.iter().sum::<f64>(), 3.0);
    }

    #[test]
    fn wicketless_innings_only_increments_economy() {
        let bins = PlayerBins::default();
        let history = vec![BowlingInnings {
            player: PlayerId::new("Q"),
            opponent: TeamId::new("OPP"),
            venue: VenueClass::Asia,
            innings: 1,
            balls: 36,
            runs_conceded: 20,
            wickets: 0,
        }];
        let f = build_bowler_features(&PlayerId::new("Q"), &history, &clusters(), 3, &bins).unwrap();
        assert_eq!(f.values.iter().sum::<f64>(), 1.0);
        let s = scenario_index(0, 2, 1, 3);
        let base = s * bins.bowler_params();
        // Economy 20*6/36 = 3.33 in [0, 4).
        assert_eq!(f.values[base + 4 + 5], 1.0);
    }

    #[test]
    fn missing_opponent_cluster_is_an_error() {
        let bins = PlayerBins::default();
        let history = vec![BattingInnings {
            opponent: TeamId::new("NOWHERE"),
            ..batting_row(10, 10, 0, true)
        }];
        let err =
            build_batter_features(&PlayerId::new("P"), &history, &clusters(), 3, &bins).unwrap_err();
        assert!(err.to_string().contains("no team cluster"));
    }

    #[test]
    fn index_layout_is_bijective() {
        let mut seen = std::collections::BTreeSet::new();
        for venue in 0..2usize {
            for cluster in 1..=3u32 {
                for innings in [1u8, 2] {
                    assert!(seen.insert(scenario_index(venue, cluster, innings, 3)));
                }
            }
        }
        assert_eq!(seen.len(), 12);
        assert_eq!(*seen.iter().max().unwrap(), 11);
    }

    proptest! {
        /// Adding one innings touches exactly one scenario block and adds at
        /// most runs + 3 to its l1 mass.
        #[test]
        fn one_innings_bounded_l1_change(
            runs in 0u32..250,
            extra_balls in 0u32..200,
            dismissed in proptest::bool::ANY,
            venue_asia in proptest::bool::ANY,
            innings in 1u8..=2,
        ) {
            let bins = PlayerBins::default();
            let balls = if runs == 0 { extra_balls } else { runs / 2 + extra_balls + 1 };
            let boundaries = runs / 4 / 4; // anything <= runs/4 is feasible
            let row = BattingInnings {
                player: PlayerId::new("P"),
                opponent: TeamId::new("OPP"),
                venue: if venue_asia { VenueClass::Asia } else { VenueClass::NonAsia },
                innings,
                runs,
                balls,
                boundaries,
                dismissed,
            };
            let base = build_batter_features(&PlayerId::new("P"), &[], &clusters(), 3, &bins).unwrap();
            let one = build_batter_features(&PlayerId::new("P"), &[row], &clusters(), 3, &bins).unwrap();
            let params = bins.batter_params();
            let mut touched = Vec::new();
            for s in 0..scenario_count(3) {
                let delta: f64 = one.values[s * params..(s + 1) * params]
                    .iter()
                    .zip(&base.values[s * params..(s + 1) * params])
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                if delta > 0.0 {
                    touched.push((s, delta));
                }
            }
            prop_assert_eq!(touched.len(), 1);
            prop_assert!(touched[0].1 <= runs as f64 + 3.0);
        }
    }
}
