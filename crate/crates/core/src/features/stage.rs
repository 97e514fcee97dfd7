//! Match-stage feature vector: the game context at an over boundary.
//!
//! Stage `i` is the state at the start of over `i`. The vector carries the
//! two team cluster ids, cluster-wise counts of remaining batters (the pair
//! at the crease included; they are still live resources), cluster-wise
//! remaining bowling capacity (ten overs per bowler minus overs already
//! bowled), wickets lost, runs so far, venue class, and the remaining target
//! for a chase. Stage `i + 1` is derivable from stage `i` plus over `i`
//! alone, so the whole trace is computable online.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignments;
use crate::data::{InningsData, MatchData, MatchId, OverRecord, PlayerId, VenueClass};
use crate::{CampError, Result};

/// Cluster slots 1..=4 plus the dummy cluster 5 for players without history.
pub const CLUSTER_SLOTS: usize = 5;

/// Maximum overs one bowler may bowl in an ODI innings.
pub const BOWLER_OVER_LIMIT: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageVector {
    pub match_id: MatchId,
    pub innings: u8,
    /// Boundary index: state at the start of over `over_index`.
    pub over_index: u32,
    pub batting_team_cluster: u32,
    pub bowling_team_cluster: u32,
    pub remaining_batters: [f64; CLUSTER_SLOTS],
    pub bowling_capacity: [f64; CLUSTER_SLOTS],
    pub wickets_lost: u32,
    pub runs_so_far: u32,
    pub venue: VenueClass,
    /// Runs still needed in a chase; 0 in the first innings.
    pub remaining_target: u32,
    pub overs_remaining: u32,
}

impl StageVector {
    /// Flat numeric encoding used by the projection models. The innings flag
    /// is deliberately absent: models are trained per innings.
    pub fn numeric(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(16);
        v.push(self.batting_team_cluster as f64);
        v.push(self.bowling_team_cluster as f64);
        v.extend_from_slice(&self.remaining_batters);
        v.extend_from_slice(&self.bowling_capacity);
        v.push(self.wickets_lost as f64);
        v.push(self.runs_so_far as f64);
        v.push(self.venue.index() as f64);
        v.push(self.remaining_target as f64);
        v
    }

    pub fn numeric_names() -> Vec<String> {
        let mut names = vec!["batting_team_cluster".to_owned(), "bowling_team_cluster".to_owned()];
        for c in 1..=CLUSTER_SLOTS {
            names.push(format!("bat_c{c}"));
        }
        for c in 1..=CLUSTER_SLOTS {
            names.push(format!("bowl_cap_c{c}"));
        }
        names.extend(
            ["wickets_lost", "runs_so_far", "venue", "remaining_target"]
                .iter()
                .map(|s| s.to_string()),
        );
        names
    }
}

/// Online stage construction for one innings.
pub struct StageBuilder<'a> {
    match_id: MatchId,
    innings: &'a InningsData,
    venue: VenueClass,
    target: u32,
    scheduled_overs: u32,
    batting_lineup: &'a [PlayerId],
    batter_cluster: BTreeMap<&'a PlayerId, u32>,
    bowler_capacity_used: BTreeMap<&'a PlayerId, u32>,
    bowler_cluster: BTreeMap<&'a PlayerId, u32>,
    batting_team_cluster: u32,
    bowling_team_cluster: u32,
    dismissed: BTreeSet<&'a PlayerId>,
    runs: u32,
    wickets: u32,
    next_over: u32,
}

fn slot(cluster: u32, player: &PlayerId) -> Result<usize> {
    if cluster < 1 || cluster as usize > CLUSTER_SLOTS {
        return Err(CampError::validation(format!(
            "player {player}: cluster id {cluster} out of range 1..={CLUSTER_SLOTS}"
        )));
    }
    Ok((cluster - 1) as usize)
}

impl<'a> StageBuilder<'a> {
    pub fn new(
        m: &'a MatchData,
        innings_no: u8,
        assignments: &'a ClusterAssignments,
        scheduled_overs: u32,
    ) -> Result<Self> {
        let innings = &m.innings[(innings_no - 1) as usize];
        let batting_lineup = m.lineup(&innings.batting_team);
        let bowling_lineup = m.lineup(&innings.bowling_team);

        let mut batter_cluster = BTreeMap::new();
        for p in batting_lineup {
            let c = assignments.batters.get(p).copied().ok_or_else(|| {
                CampError::validation(format!("batter {p} has no cluster assignment"))
            })?;
            slot(c, p)?;
            batter_cluster.insert(p, c);
        }
        let mut bowler_cluster = BTreeMap::new();
        for p in bowling_lineup {
            let c = assignments.bowlers.get(p).copied().ok_or_else(|| {
                CampError::validation(format!("bowler {p} has no cluster assignment"))
            })?;
            slot(c, p)?;
            bowler_cluster.insert(p, c);
        }
        let team_cluster = |team| {
            assignments
                .teams
                .get(team)
                .copied()
                .ok_or_else(|| CampError::validation(format!("team {team} has no cluster assignment")))
        };

        Ok(StageBuilder {
            match_id: m.summary.match_id.clone(),
            venue: m.summary.venue_class,
            target: if innings_no == 2 { m.summary.target_runs() } else { 0 },
            scheduled_overs,
            batting_lineup,
            batter_cluster,
            bowler_capacity_used: BTreeMap::new(),
            bowler_cluster,
            batting_team_cluster: team_cluster(&innings.batting_team)?,
            bowling_team_cluster: team_cluster(&innings.bowling_team)?,
            dismissed: BTreeSet::new(),
            runs: 0,
            wickets: 0,
            next_over: 1,
            innings,
        })
    }

    /// The stage at the current over boundary.
    pub fn stage(&self) -> StageVector {
        let mut remaining_batters = [0.0; CLUSTER_SLOTS];
        for p in self.batting_lineup {
            if !self.dismissed.contains(p) {
                remaining_batters[(self.batter_cluster[p] - 1) as usize] += 1.0;
            }
        }
        let mut bowling_capacity = [0.0; CLUSTER_SLOTS];
        for (p, cluster) in &self.bowler_cluster {
            let used = self.bowler_capacity_used.get(*p).copied().unwrap_or(0);
            bowling_capacity[(*cluster - 1) as usize] +=
                BOWLER_OVER_LIMIT.saturating_sub(used) as f64;
        }
        StageVector {
            match_id: self.match_id.clone(),
            innings: self.innings.number,
            over_index: self.next_over,
            batting_team_cluster: self.batting_team_cluster,
            bowling_team_cluster: self.bowling_team_cluster,
            remaining_batters,
            bowling_capacity,
            wickets_lost: self.wickets,
            runs_so_far: self.runs,
            venue: self.venue,
            remaining_target: self.target.saturating_sub(self.runs),
            overs_remaining: self.scheduled_overs.saturating_sub(self.next_over - 1),
        }
    }

    /// Fold one over into the state, moving to the next boundary.
    pub fn advance(&mut self, over: &'a OverRecord) -> Result<()> {
        if self.next_over > self.scheduled_overs {
            return Err(CampError::validation(format!(
                "match {} innings {}: over boundary {} beyond innings end",
                self.match_id, self.innings.number, self.next_over
            )));
        }
        if over.over_index != self.next_over {
            return Err(CampError::validation(format!(
                "match {} innings {}: expected over {}, got {}",
                self.match_id, self.innings.number, self.next_over, over.over_index
            )));
        }
        self.runs += over.runs_total;
        self.wickets += over.wickets.len() as u32;
        for w in &over.wickets {
            self.dismissed.insert(&w.player_out);
        }
        let bowler = self
            .bowler_cluster
            .keys()
            .find(|p| ***p == over.bowler)
            .copied()
            .ok_or_else(|| {
                CampError::validation(format!("bowler {} not in bowling lineup", over.bowler))
            })?;
        *self.bowler_capacity_used.entry(bowler).or_insert(0) += 1;
        self.next_over += 1;
        Ok(())
    }
}

/// All stage vectors for one innings: boundaries 1..=n plus the terminal
/// boundary after the last over, n + 1 vectors in total.
pub fn build_stage_vectors(
    m: &MatchData,
    innings_no: u8,
    assignments: &ClusterAssignments,
    scheduled_overs: u32,
) -> Result<Vec<StageVector>> {
    let innings = &m.innings[(innings_no - 1) as usize];
    if innings.overs.is_empty() {
        return Err(CampError::validation(format!(
            "match {} innings {innings_no}: shorter than one over",
            m.summary.match_id
        )));
    }
    let mut builder = StageBuilder::new(m, innings_no, assignments, scheduled_overs)?;
    let mut out = Vec::with_capacity(innings.overs.len() + 1);
    for over in &innings.overs {
        out.push(builder.stage());
        builder.advance(over)?;
    }
    out.push(builder.stage());
    Ok(out)
}
