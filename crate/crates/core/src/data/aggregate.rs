//! Ball-to-over aggregation.

use std::collections::BTreeMap;

use crate::data::types::*;
use crate::{CampError, Result};

/// Aggregate sorted ball events into one [`OverRecord`] per (innings, over).
///
/// Requires the input sorted by (innings, over, ball). Overs within an
/// innings must be contiguous from 1. An over with fewer than six legal
/// deliveries that is not the last of its innings gets a warning flag.
pub fn aggregate_overs(balls: &[BallEvent]) -> Result<Vec<OverRecord>> {
    if balls.is_empty() {
        return Ok(Vec::new());
    }
    let match_id = &balls[0].match_id;
    let mut prev_key = (0u8, 0u32, 0u32);
    for b in balls {
        if b.match_id != *match_id {
            return Err(CampError::validation(format!(
                "mixed match ids in ball stream: {} and {}",
                match_id, b.match_id
            )));
        }
        let key = (b.innings, b.over_index, b.ball_in_over);
        if key <= prev_key {
            return Err(CampError::validation(format!(
                "balls not sorted by (innings, over, ball) at innings {} over {} ball {}",
                b.innings, b.over_index, b.ball_in_over
            )));
        }
        prev_key = key;
    }

    let mut out = Vec::new();
    let mut groups: BTreeMap<(u8, u32), Vec<&BallEvent>> = BTreeMap::new();
    for b in balls {
        groups.entry((b.innings, b.over_index)).or_default().push(b);
    }

    let innings_last_over: BTreeMap<u8, u32> = groups
        .keys()
        .fold(BTreeMap::new(), |mut acc, &(inn, over)| {
            let e = acc.entry(inn).or_insert(0);
            *e = (*e).max(over);
            acc
        });

    let mut expected: BTreeMap<u8, u32> = BTreeMap::new();
    for ((innings, over_index), over_balls) in &groups {
        let next = expected.entry(*innings).or_insert(1);
        if *over_index != *next {
            return Err(CampError::validation(format!(
                "innings {innings}: over sequence gap, expected over {next}, found {over_index}"
            )));
        }
        *next += 1;

        let mut lines: BTreeMap<&PlayerId, (u32, u32)> = BTreeMap::new();
        let mut wickets = Vec::new();
        let mut runs_total = 0u32;
        let mut bye_runs = 0u32;
        let mut legal_balls = 0u32;
        let bowler = &over_balls[0].bowler;
        for b in over_balls {
            if b.bowler != *bowler {
                return Err(CampError::validation(format!(
                    "innings {innings} over {over_index}: more than one bowler ({} and {})",
                    bowler, b.bowler
                )));
            }
            runs_total += b.total_runs();
            if matches!(b.extras_kind, ExtrasKind::Bye | ExtrasKind::LegBye) {
                bye_runs += b.extras_runs;
            }
            let line = lines.entry(&b.striker).or_insert((0, 0));
            line.0 += b.runs_off_bat;
            if b.legal_delivery {
                line.1 += 1;
                legal_balls += 1;
            }
            if let Some(d) = &b.dismissal {
                wickets.push(WicketEvent {
                    kind: d.kind,
                    player_out: d.player_out.clone(),
                    bowler_credited: d.kind.credits_bowler(),
                });
            }
        }
        if legal_balls > 6 {
            return Err(CampError::validation(format!(
                "innings {innings} over {over_index}: {legal_balls} legal deliveries"
            )));
        }
        let is_last = innings_last_over[innings] == *over_index;
        let short_over_warning = legal_balls < 6 && !is_last;

        out.push(OverRecord {
            match_id: match_id.clone(),
            innings: *innings,
            over_index: *over_index,
            runs_total,
            bye_runs,
            batter_lines: lines
                .into_iter()
                .filter(|(_, (runs, balls))| *runs > 0 || *balls > 0)
                .map(|(player, (runs, legal_balls))| BatterOverLine {
                    player: player.clone(),
                    runs,
                    legal_balls,
                })
                .collect(),
            wickets,
            bowler: bowler.clone(),
            legal_balls,
            short_over_warning,
        });
    }
    Ok(out)
}

/// Total runs over a slice of over records.
pub fn overs_total(overs: &[OverRecord]) -> u32 {
    overs.iter().map(|o| o.runs_total).sum()
}
