//! Deterministic parametric match generator.
//!
//! Produces schema-conformant ball and summary data plus a ground-truth log
//! of the generator's per-over expected runs, so model error can be measured
//! against a known process. Everything is a pure function of the seed; every
//! match draws from its own derived RNG stream.
//!
//! The simulation is intentionally simple: per-ball runs come from a
//! categorical distribution over {0,1,2,3,4,6} whose mean matches the
//! configured per-over rate, wickets fall independently per legal delivery,
//! and every fielder bowls in rotation so that all 22 players of a match are
//! observable in the ball data.

use std::io::Write;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    build_match_data, BallEvent, Dismissal, DismissalKind, ExtrasKind, InningsTotal, MatchData,
    MatchId, MatchSummary, PlayerId, TeamId, VenueClass,
};
use crate::{CampError, Result};

/// Scoring profile shared by every team generated from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeamProfile {
    /// Expected runs per over, extras included.
    pub runs_per_over: f64,
    /// Dismissal probability per legal delivery.
    pub hazard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_matches: usize,
    pub team_profiles: Vec<TeamProfile>,
    pub teams_per_profile: usize,
    /// Fraction of matches played at Asian venues.
    pub asia_fraction: f64,
    pub overs_per_innings: u32,
    pub wide_prob: f64,
    pub leg_bye_prob: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 42,
            n_matches: 50,
            team_profiles: vec![
                TeamProfile { runs_per_over: 4.4, hazard: 0.028 },
                TeamProfile { runs_per_over: 5.0, hazard: 0.024 },
                TeamProfile { runs_per_over: 5.6, hazard: 0.020 },
            ],
            teams_per_profile: 2,
            asia_fraction: 0.5,
            overs_per_innings: 50,
            wide_prob: 0.02,
            leg_bye_prob: 0.015,
        }
    }
}

// Scoring shots and their weights when the batter scores at all; mean 2.11.
const SHOT_RUNS: [u32; 5] = [1, 2, 3, 4, 6];
const SHOT_WEIGHTS: [f64; 5] = [0.55, 0.18, 0.02, 0.18, 0.07];
const SHOT_MEAN: f64 = 2.11;

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_matches == 0 {
            return Err(CampError::validation("generator: n_matches must be >= 1"));
        }
        if self.team_profiles.is_empty() || self.teams_per_profile == 0 {
            return Err(CampError::validation("generator: no teams configured"));
        }
        if self.team_profiles.len() * self.teams_per_profile < 2 {
            return Err(CampError::validation("generator: need at least 2 teams"));
        }
        if !(0.0..=1.0).contains(&self.asia_fraction) {
            return Err(CampError::validation("generator: asia_fraction must be in [0,1]"));
        }
        if self.overs_per_innings < 1 || self.overs_per_innings > 50 {
            return Err(CampError::validation("generator: overs_per_innings must be in 1..=50"));
        }
        for (i, p) in self.team_profiles.iter().enumerate() {
            if p.runs_per_over < 0.0 {
                return Err(CampError::validation(format!(
                    "generator: profile {i}: runs_per_over must be >= 0"
                )));
            }
            if !(0.0..=1.0).contains(&p.hazard) {
                return Err(CampError::validation(format!(
                    "generator: profile {i}: hazard must be in [0,1]"
                )));
            }
            self.bat_mean(p)?;
        }
        for p in [self.wide_prob, self.leg_bye_prob] {
            if !(0.0..1.0).contains(&p) {
                return Err(CampError::validation("generator: extras probabilities must be in [0,1)"));
            }
        }
        Ok(())
    }

    /// Mean off-the-bat runs per legal delivery, calibrated so the per-over
    /// expectation including extras equals the profile rate.
    fn bat_mean(&self, profile: &TeamProfile) -> Result<f64> {
        let per_ball = profile.runs_per_over / 6.0;
        let wides = self.wide_prob / (1.0 - self.wide_prob);
        let mean = (per_ball - self.leg_bye_prob - wides) / (1.0 - self.leg_bye_prob);
        if !(0.0..=SHOT_MEAN).contains(&mean) {
            return Err(CampError::validation(format!(
                "generator: runs_per_over {} is outside the representable range",
                profile.runs_per_over
            )));
        }
        Ok(mean)
    }

    pub fn teams(&self) -> Vec<(TeamId, TeamProfile)> {
        let mut out = Vec::new();
        for (pi, profile) in self.team_profiles.iter().enumerate() {
            for t in 0..self.teams_per_profile {
                let idx = pi * self.teams_per_profile + t + 1;
                out.push((TeamId::new(format!("T{idx:02}")), *profile));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub match_id: MatchId,
    pub innings: u8,
    pub over: u32,
    pub true_expected_runs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedMatch {
    pub summary: MatchSummary,
    pub balls: Vec<BallEvent>,
    pub truth: Vec<TruthRow>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable sub-seed derivation for independent RNG streams.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream))
}

fn lineup(team: &TeamId) -> Vec<PlayerId> {
    (1..=11)
        .map(|i| PlayerId::new(format!("{}_p{i:02}", team)))
        .collect()
}

fn draw_shot(rng: &mut ChaCha8Rng) -> u32 {
    let total: f64 = SHOT_WEIGHTS.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (runs, w) in SHOT_RUNS.iter().zip(SHOT_WEIGHTS) {
        if x < w {
            return *runs;
        }
        x -= w;
    }
    SHOT_RUNS[SHOT_RUNS.len() - 1]
}

struct InningsResult {
    balls: Vec<BallEvent>,
    truth: Vec<TruthRow>,
    total: u32,
    wickets: u32,
    /// Off-the-bat runs per batter, for man-of-the-match selection.
    batter_runs: Vec<(PlayerId, u32)>,
    bowler_wickets: Vec<(PlayerId, u32)>,
}

#[allow(clippy::too_many_arguments)]
fn simulate_innings(
    rng: &mut ChaCha8Rng,
    cfg: &GeneratorConfig,
    match_id: &MatchId,
    innings: u8,
    batting: &[PlayerId],
    bowling: &[PlayerId],
    profile: &TeamProfile,
    target: Option<u32>,
) -> InningsResult {
    let bat_mean = cfg
        .bat_mean(profile)
        .expect("profile validated before simulation");
    let p_score = bat_mean / SHOT_MEAN;

    let mut balls = Vec::new();
    let mut truth = Vec::new();
    let mut total = 0u32;
    let mut wickets = 0u32;
    let mut striker = 0usize;
    let mut non_striker = 1usize;
    let mut next_batter = 2usize;
    let mut runs_by_batter = vec![0u32; 11];
    let mut wickets_by_bowler = vec![0u32; 11];

    let done = |total: u32, wickets: u32| -> bool {
        wickets >= 10 || target.is_some_and(|t| total >= t)
    };

    'overs: for over in 1..=cfg.overs_per_innings {
        if done(total, wickets) {
            break;
        }
        let bowler_idx = ((over - 1) as usize) % 11;
        truth.push(TruthRow {
            match_id: match_id.clone(),
            innings,
            over,
            true_expected_runs: profile.runs_per_over,
        });
        let mut ball_no = 0u32;
        for _legal in 0..6 {
            // Wides are re-bowled before each legal delivery.
            while rng.random::<f64>() < cfg.wide_prob {
                ball_no += 1;
                balls.push(BallEvent {
                    match_id: match_id.clone(),
                    innings,
                    over_index: over,
                    ball_in_over: ball_no,
                    striker: batting[striker].clone(),
                    non_striker: batting[non_striker].clone(),
                    bowler: bowling[bowler_idx].clone(),
                    runs_off_bat: 0,
                    extras_runs: 1,
                    extras_kind: ExtrasKind::Wide,
                    legal_delivery: false,
                    dismissal: None,
                });
                total += 1;
                if done(total, wickets) {
                    break 'overs;
                }
            }

            ball_no += 1;
            let leg_bye = rng.random::<f64>() < cfg.leg_bye_prob;
            let out = rng.random::<f64>() < profile.hazard;
            let mut runs_off_bat = if leg_bye {
                0
            } else if rng.random::<f64>() < p_score {
                draw_shot(rng)
            } else {
                0
            };
            let dismissal = if out {
                let kind = match rng.random_range(0..10u32) {
                    0..=4 => DismissalKind::Caught,
                    5..=7 => DismissalKind::Bowled,
                    8 => DismissalKind::Lbw,
                    _ => DismissalKind::RunOut,
                };
                if kind != DismissalKind::RunOut {
                    runs_off_bat = 0;
                }
                let victim = if kind == DismissalKind::RunOut && rng.random_range(0..10u32) < 3 {
                    non_striker
                } else {
                    striker
                };
                if kind.credits_bowler() {
                    wickets_by_bowler[bowler_idx] += 1;
                }
                Some((kind, victim))
            } else {
                None
            };

            let extras = u32::from(leg_bye);
            runs_by_batter[striker] += runs_off_bat;
            total += runs_off_bat + extras;
            balls.push(BallEvent {
                match_id: match_id.clone(),
                innings,
                over_index: over,
                ball_in_over: ball_no,
                striker: batting[striker].clone(),
                non_striker: batting[non_striker].clone(),
                bowler: bowling[bowler_idx].clone(),
                runs_off_bat,
                extras_runs: extras,
                extras_kind: if leg_bye { ExtrasKind::LegBye } else { ExtrasKind::None },
                legal_delivery: true,
                dismissal: dismissal.as_ref().map(|(kind, victim)| Dismissal {
                    kind: *kind,
                    player_out: batting[*victim].clone(),
                }),
            });

            if let Some((_, victim)) = dismissal {
                wickets += 1;
                if wickets >= 10 {
                    break 'overs;
                }
                if victim == striker {
                    striker = next_batter;
                } else {
                    non_striker = next_batter;
                }
                next_batter += 1;
            }
            if done(total, wickets) {
                break 'overs;
            }
            if (runs_off_bat + extras) % 2 == 1 {
                std::mem::swap(&mut striker, &mut non_striker);
            }
        }
        std::mem::swap(&mut striker, &mut non_striker);
    }

    InningsResult {
        balls,
        truth,
        total,
        wickets,
        batter_runs: batting.iter().cloned().zip(runs_by_batter).collect(),
        bowler_wickets: bowling.iter().cloned().zip(wickets_by_bowler).collect(),
    }
}

fn synth_date(i: usize) -> String {
    format!(
        "{:04}-{:02}-{:02}",
        2001 + i / 360,
        (i / 30) % 12 + 1,
        i % 30 + 1
    )
}

/// Generate the configured number of matches.
pub fn generate(cfg: &GeneratorConfig) -> Result<Vec<GeneratedMatch>> {
    cfg.validate()?;
    let teams = cfg.teams();
    let mut out = Vec::with_capacity(cfg.n_matches);
    for m in 0..cfg.n_matches {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, m as u64));
        let match_id = MatchId::new(format!("S{:04}", m + 1));
        let a = rng.random_range(0..teams.len());
        let mut b = rng.random_range(0..teams.len() - 1);
        if b >= a {
            b += 1;
        }
        let (team1, profile1) = &teams[a];
        let (team2, profile2) = &teams[b];
        let venue = if rng.random::<f64>() < cfg.asia_fraction {
            VenueClass::Asia
        } else {
            VenueClass::NonAsia
        };
        let lineup1 = lineup(team1);
        let lineup2 = lineup(team2);

        let first = simulate_innings(&mut rng, cfg, &match_id, 1, &lineup1, &lineup2, profile1, None);
        let target = first.total + 1;
        // Re-run the chase on a derived stream if it ends tied; tied matches
        // have no winner and are rejected at ingest.
        let mut attempt = 0u64;
        let second = loop {
            let chase_stream = (1u64 << 63) | ((m as u64) << 16) | attempt;
            let mut chase_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, chase_stream));
            let res = simulate_innings(
                &mut chase_rng,
                cfg,
                &match_id,
                2,
                &lineup2,
                &lineup1,
                profile2,
                Some(target),
            );
            if res.total != first.total {
                break res;
            }
            attempt += 1;
        };

        let winner = if second.total >= target { team2.clone() } else { team1.clone() };
        let mom = pick_mom(&winner, team1, &first, &second);

        let mut balls = first.balls;
        balls.extend(second.balls);
        let mut truth = first.truth;
        truth.extend(second.truth);

        let summary = MatchSummary {
            match_id,
            team_a: team1.clone(),
            team_b: team2.clone(),
            venue_class: venue,
            bat_first: team1.clone(),
            innings_totals: [
                InningsTotal { runs: first.total, wickets: first.wickets },
                InningsTotal { runs: second.total, wickets: second.wickets },
            ],
            winner,
            mom,
            date: synth_date(m),
        };
        out.push(GeneratedMatch { summary, balls, truth });
    }
    Ok(out)
}

fn pick_mom(
    winner: &TeamId,
    team1: &TeamId,
    first: &InningsResult,
    second: &InningsResult,
) -> PlayerId {
    // Winning team's best all-round figure: runs plus 20 per wicket.
    let (bat, bowl) = if winner == team1 {
        (&first.batter_runs, &second.bowler_wickets)
    } else {
        (&second.batter_runs, &first.bowler_wickets)
    };
    let mut scores: Vec<(PlayerId, i64)> = bat
        .iter()
        .map(|(p, r)| (p.clone(), *r as i64))
        .collect();
    for (p, w) in bowl {
        if let Some(entry) = scores.iter_mut().find(|(q, _)| q == p) {
            entry.1 += 20 * *w as i64;
        }
    }
    scores.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scores[0].0.clone()
}

/// Generate and assemble into validated [`MatchData`].
pub fn generate_matches(cfg: &GeneratorConfig) -> Result<Vec<MatchData>> {
    generate(cfg)?
        .into_iter()
        .map(|g| build_match_data(g.summary, &g.balls, cfg.overs_per_innings))
        .collect()
}

pub const TRUTH_HEADER: [&str; 4] = ["match_id", "innings", "over", "true_expected_runs"];

pub fn write_truth(writer: impl Write, matches: &[GeneratedMatch]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRUTH_HEADER)?;
    for m in matches {
        for row in &m.truth {
            w.write_record([
                row.match_id.as_str(),
                &row.innings.to_string(),
                &row.over.to_string(),
                &format!("{:.6}", row.true_expected_runs),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
