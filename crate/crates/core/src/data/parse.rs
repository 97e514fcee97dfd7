//! CSV readers and canonical writers for the two input schemas.
//!
//! Both schemas require an exact header row. Writers emit the same canonical
//! form the parsers accept, so `write(parse(file))` reproduces a canonical
//! file byte for byte.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::data::types::*;
use crate::{CampError, Result};

pub const BALL_HEADER: [&str; 13] = [
    "match_id",
    "innings",
    "over",
    "ball",
    "striker",
    "non_striker",
    "bowler",
    "runs_off_bat",
    "extras_runs",
    "extras_kind",
    "legal",
    "dismissal_kind",
    "player_out",
];

pub const SUMMARY_HEADER: [&str; 12] = [
    "match_id",
    "team_a",
    "team_b",
    "venue_class",
    "bat_first",
    "inn1_runs",
    "inn1_wkts",
    "inn2_runs",
    "inn2_wkts",
    "winner",
    "mom",
    "date",
];

/// Ground-country to venue-class mapping, loaded from JSON.
pub type VenueMap = BTreeMap<String, VenueClass>;

pub fn load_venue_map(reader: impl Read) -> Result<VenueMap> {
    let raw: BTreeMap<String, String> = serde_json::from_reader(reader)?;
    let mut map = VenueMap::new();
    for (country, class) in raw {
        let class = VenueClass::parse(&class).ok_or_else(|| {
            CampError::validation(format!(
                "venue map entry {country:?}: expected Asia or NonAsia, got {class:?}"
            ))
        })?;
        map.insert(country, class);
    }
    Ok(map)
}

fn check_header(record: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = record.iter().collect();
    if got != expected {
        return Err(CampError::parse(
            1,
            format!("bad header: expected {:?}, got {:?}", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn field_u32(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<u32> {
    record[idx]
        .parse::<u32>()
        .map_err(|_| CampError::parse(line, format!("field {name}: invalid integer {:?}", &record[idx])))
}

/// Parse the ball CSV into validated events, preserving row order.
pub fn parse_balls(reader: impl Read) -> Result<Vec<BallEvent>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(rdr.headers()?, &BALL_HEADER)?;

    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2; // 1-based, after the header row
        let record = record?;
        if record.len() != BALL_HEADER.len() {
            return Err(CampError::parse(
                line,
                format!("expected {} fields, got {}", BALL_HEADER.len(), record.len()),
            ));
        }
        let innings = field_u32(&record, 1, "innings", line)? as u8;
        let extras_kind = ExtrasKind::parse(&record[9]).ok_or_else(|| {
            CampError::parse(line, format!("field extras_kind: unknown value {:?}", &record[9]))
        })?;
        let legal = match &record[10] {
            "true" => true,
            "false" => false,
            other => {
                return Err(CampError::parse(
                    line,
                    format!("field legal: expected true or false, got {other:?}"),
                ))
            }
        };
        let dismissal = match (&record[11], &record[12]) {
            ("", "") => None,
            ("", _) | (_, "") => {
                return Err(CampError::parse(
                    line,
                    "fields dismissal_kind and player_out must be set together",
                ))
            }
            (kind, out_id) => {
                let kind = DismissalKind::parse(kind).ok_or_else(|| {
                    CampError::parse(line, format!("field dismissal_kind: unknown value {kind:?}"))
                })?;
                Some(Dismissal {
                    kind,
                    player_out: PlayerId::new(out_id),
                })
            }
        };
        let event = BallEvent {
            match_id: MatchId::new(&record[0]),
            innings,
            over_index: field_u32(&record, 2, "over", line)?,
            ball_in_over: field_u32(&record, 3, "ball", line)?,
            striker: PlayerId::new(&record[4]),
            non_striker: PlayerId::new(&record[5]),
            bowler: PlayerId::new(&record[6]),
            runs_off_bat: field_u32(&record, 7, "runs_off_bat", line)?,
            extras_runs: field_u32(&record, 8, "extras_runs", line)?,
            extras_kind,
            legal_delivery: legal,
            dismissal,
        };
        event
            .validate()
            .map_err(|e| CampError::parse(line, e.to_string()))?;
        out.push(event);
    }
    Ok(out)
}

/// Write events in the canonical ball CSV form.
pub fn write_balls(writer: impl Write, balls: &[BallEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BALL_HEADER)?;
    for b in balls {
        let (dk, po) = match &b.dismissal {
            Some(d) => (d.kind.as_str(), d.player_out.as_str()),
            None => ("", ""),
        };
        w.write_record([
            b.match_id.as_str(),
            &b.innings.to_string(),
            &b.over_index.to_string(),
            &b.ball_in_over.to_string(),
            b.striker.as_str(),
            b.non_striker.as_str(),
            b.bowler.as_str(),
            &b.runs_off_bat.to_string(),
            &b.extras_runs.to_string(),
            b.extras_kind.as_str(),
            if b.legal_delivery { "true" } else { "false" },
            dk,
            po,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parse the match summary CSV. The `venue_class` column accepts a class name
/// directly or, when a venue map is supplied, a ground country resolved
/// through it. Unknown venues are an error, never a guess.
pub fn parse_summaries(reader: impl Read, venue_map: Option<&VenueMap>) -> Result<Vec<MatchSummary>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(rdr.headers()?, &SUMMARY_HEADER)?;

    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = record?;
        if record.len() != SUMMARY_HEADER.len() {
            return Err(CampError::parse(
                line,
                format!("expected {} fields, got {}", SUMMARY_HEADER.len(), record.len()),
            ));
        }
        let venue_raw = &record[3];
        let venue_class = match VenueClass::parse(venue_raw) {
            Some(v) => v,
            None => match venue_map.and_then(|m| m.get(venue_raw)) {
                Some(v) => *v,
                None => {
                    return Err(CampError::parse(
                        line,
                        format!("field venue_class: unknown venue {venue_raw:?} (not a class, not in the venue map)"),
                    ))
                }
            },
        };
        let summary = MatchSummary {
            match_id: MatchId::new(&record[0]),
            team_a: TeamId::new(&record[1]),
            team_b: TeamId::new(&record[2]),
            venue_class,
            bat_first: TeamId::new(&record[4]),
            innings_totals: [
                InningsTotal {
                    runs: field_u32(&record, 5, "inn1_runs", line)?,
                    wickets: field_u32(&record, 6, "inn1_wkts", line)?,
                },
                InningsTotal {
                    runs: field_u32(&record, 7, "inn2_runs", line)?,
                    wickets: field_u32(&record, 8, "inn2_wkts", line)?,
                },
            ],
            winner: TeamId::new(&record[9]),
            mom: PlayerId::new(&record[10]),
            date: record[11].to_owned(),
        };
        summary
            .validate()
            .map_err(|e| CampError::parse(line, e.to_string()))?;
        out.push(summary);
    }
    Ok(out)
}

/// Write summaries in the canonical summary CSV form.
pub fn write_summaries(writer: impl Write, summaries: &[MatchSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        w.write_record([
            s.match_id.as_str(),
            s.team_a.as_str(),
            s.team_b.as_str(),
            s.venue_class.as_str(),
            s.bat_first.as_str(),
            &s.innings_totals[0].runs.to_string(),
            &s.innings_totals[0].wickets.to_string(),
            &s.innings_totals[1].runs.to_string(),
            &s.innings_totals[1].wickets.to_string(),
            s.winner.as_str(),
            s.mom.as_str(),
            &s.date,
        ])?;
    }
    w.flush()?;
    Ok(())
}
