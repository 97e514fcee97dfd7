//! CSV export and reload of the feature embeddings: one row per entity,
//! header carrying the canonical index names. Values use the shortest
//! round-trip float form so reloaded vectors are bit-identical.

use std::io::{Read, Write};

use crate::data::{PlayerId, TeamId};
use crate::features::player::{batter_feature_names, bowler_feature_names, PlayerBins};
use crate::features::team::team_feature_names;
use crate::features::{BatterFeatures, BowlerFeatures, TeamFeatures};
use crate::{CampError, Result};

pub fn write_team_features(writer: impl Write, teams: &[TeamFeatures]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let opponents = teams.first().map(|t| t.opponents.clone()).unwrap_or_default();
    let mut header = vec!["team_id".to_owned(), "opponents".to_owned()];
    header.extend(team_feature_names(&opponents));
    w.write_record(&header)?;
    for t in teams {
        if t.opponents.len() != opponents.len()
            || t.values.len() != TeamFeatures::expected_len(opponents.len())
        {
            return Err(CampError::validation(format!(
                "team {}: inconsistent feature dimensions",
                t.team
            )));
        }
        let mut rec = vec![
            t.team.0.clone(),
            t.opponents.iter().map(|o| o.as_str()).collect::<Vec<_>>().join(";"),
        ];
        rec.extend(t.values.iter().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_team_features(reader: impl Read) -> Result<Vec<TeamFeatures>> {
    rows(reader, "team_id")?
        .into_iter()
        .map(|(id, meta, values)| {
            Ok(TeamFeatures {
                team: TeamId::new(id),
                opponents: meta.split(';').map(TeamId::new).collect(),
                values,
                missing_cells: Vec::new(),
            })
        })
        .collect()
}

pub fn write_batter_features(
    writer: impl Write,
    batters: &[BatterFeatures],
    n_team_clusters: usize,
    bins: &PlayerBins,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["player_id".to_owned(), "never_batted".to_owned()];
    header.extend(batter_feature_names(n_team_clusters, bins));
    w.write_record(&header)?;
    for b in batters {
        let mut rec = vec![b.player.0.clone(), u8::from(b.never_batted).to_string()];
        rec.extend(b.values.iter().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_batter_features(reader: impl Read) -> Result<Vec<BatterFeatures>> {
    rows(reader, "player_id")?
        .into_iter()
        .map(|(id, meta, values)| {
            Ok(BatterFeatures {
                player: PlayerId::new(id),
                values,
                never_batted: flag(&meta)?,
            })
        })
        .collect()
}

pub fn write_bowler_features(
    writer: impl Write,
    bowlers: &[BowlerFeatures],
    n_team_clusters: usize,
    bins: &PlayerBins,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["player_id".to_owned(), "never_bowled".to_owned()];
    header.extend(bowler_feature_names(n_team_clusters, bins));
    w.write_record(&header)?;
    for b in bowlers {
        let mut rec = vec![b.player.0.clone(), u8::from(b.never_bowled).to_string()];
        rec.extend(b.values.iter().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bowler_features(reader: impl Read) -> Result<Vec<BowlerFeatures>> {
    rows(reader, "player_id")?
        .into_iter()
        .map(|(id, meta, values)| {
            Ok(BowlerFeatures {
                player: PlayerId::new(id),
                values,
                never_bowled: flag(&meta)?,
            })
        })
        .collect()
}

fn flag(meta: &str) -> Result<bool> {
    match meta {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(CampError::validation(format!("bad flag value {other:?}"))),
    }
}

fn rows(reader: impl Read, id_column: &str) -> Result<Vec<(String, String, Vec<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?;
    if header.get(0) != Some(id_column) {
        return Err(CampError::parse(
            1,
            format!("feature file: expected first column {id_column}"),
        ));
    }
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = record?;
        if record.len() < 2 {
            return Err(CampError::parse(line, "feature file: too few columns"));
        }
        let values: Vec<f64> = (2..record.len())
            .map(|j| {
                record[j].parse().map_err(|_| {
                    CampError::parse(line, format!("invalid number {:?}", &record[j]))
                })
            })
            .collect::<Result<_>>()?;
        out.push((record[0].to_owned(), record[1].to_owned(), values));
    }
    Ok(out)
}
