//! Projected-remaining-runs estimation.
//!
//! Every model maps a match-stage vector to the runs the batting side is
//! expected to add before the innings ends. Models are trained per innings;
//! a chase behaves differently from setting a total, and only the second
//! innings carries a remaining target.

mod forest;
mod kfold;
mod knn;
mod ridge;

use serde::{Deserialize, Serialize};

pub use forest::{forest_fit, forest_fit_raw, ForestModel, ForestParams};
pub use kfold::{evaluate_models, kfold_match_split, EvalParams, MaeCell, ProjectionReport, TracePoint};
pub use knn::{KnnModel, KnnParams, RelaxLevel, WeightKind};
pub use ridge::{ridge_fit, ridge_fit_raw, RidgeModel};

use crate::cluster::ClusterAssignments;
use crate::data::{MatchData, MatchId};
use crate::features::{build_stage_vectors, StageVector};
use crate::{CampError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Knn,
    Ridge,
    Forest,
}

impl ModelKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "knn" => Some(ModelKind::Knn),
            "ridge" => Some(ModelKind::Ridge),
            "forest" => Some(ModelKind::Forest),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Knn => "knn",
            ModelKind::Ridge => "ridge",
            ModelKind::Forest => "forest",
        }
    }
}

/// One stage of one historical innings, labelled with the runs actually
/// scored after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub stage: StageVector,
    pub features: Vec<f64>,
    pub overs_remaining: u32,
    pub wickets_lost: u32,
    pub actual_remaining: f64,
    pub match_id: MatchId,
    pub innings: u8,
}

/// Examples from every over boundary of every innings, terminal boundaries
/// excluded (their remaining runs are zero by definition).
pub fn build_training_examples(
    matches: &[MatchData],
    assignments: &ClusterAssignments,
    scheduled_overs: u32,
) -> Result<Vec<TrainingExample>> {
    let mut out = Vec::new();
    for m in matches {
        for innings_no in [1u8, 2] {
            let innings = &m.innings[(innings_no - 1) as usize];
            let stages = build_stage_vectors(m, innings_no, assignments, scheduled_overs)?;
            for stage in stages.iter().take(stages.len() - 1) {
                let actual_remaining = (innings.total_runs - stage.runs_so_far) as f64;
                out.push(TrainingExample {
                    features: stage.numeric(),
                    overs_remaining: stage.overs_remaining,
                    wickets_lost: stage.wickets_lost,
                    actual_remaining,
                    match_id: m.summary.match_id.clone(),
                    innings: innings_no,
                    stage: stage.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Header of the training-example CSV: identity and label columns followed
/// by the numeric stage encoding.
pub fn examples_header() -> Vec<String> {
    let mut h = vec![
        "match_id".to_owned(),
        "innings".to_owned(),
        "over".to_owned(),
        "overs_remaining".to_owned(),
        "wickets_lost".to_owned(),
        "venue".to_owned(),
        "actual_remaining".to_owned(),
    ];
    h.extend(StageVector::numeric_names());
    h
}

pub fn write_examples(writer: impl std::io::Write, examples: &[TrainingExample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(examples_header())?;
    for e in examples {
        let mut record = vec![
            e.match_id.0.clone(),
            e.innings.to_string(),
            e.stage.over_index.to_string(),
            e.overs_remaining.to_string(),
            e.wickets_lost.to_string(),
            e.stage.venue.as_str().to_owned(),
            format!("{:.6}", e.actual_remaining),
        ];
        record.extend(e.features.iter().map(|v| format!("{v:.6}")));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_examples(reader: impl std::io::Read) -> Result<Vec<TrainingExample>> {
    use crate::data::VenueClass;
    use crate::features::CLUSTER_SLOTS;

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != examples_header() {
        return Err(CampError::parse(1, "training examples: unexpected header"));
    }
    let fixed = 7usize;
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = record?;
        let field = |idx: usize| -> &str { &record[idx] };
        let num = |idx: usize| -> Result<f64> {
            field(idx)
                .parse()
                .map_err(|_| CampError::parse(line, format!("invalid number {:?}", field(idx))))
        };
        let features: Vec<f64> =
            (fixed..record.len()).map(num).collect::<Result<Vec<f64>>>()?;
        if features.len() != StageVector::numeric_names().len() {
            return Err(CampError::parse(line, "wrong feature count"));
        }
        let venue = VenueClass::parse(field(5))
            .ok_or_else(|| CampError::parse(line, format!("bad venue {:?}", field(5))))?;
        let innings: u8 = field(1)
            .parse()
            .map_err(|_| CampError::parse(line, "bad innings"))?;
        let over_index: u32 = field(2)
            .parse()
            .map_err(|_| CampError::parse(line, "bad over"))?;
        let overs_remaining: u32 = field(3)
            .parse()
            .map_err(|_| CampError::parse(line, "bad overs_remaining"))?;
        let wickets_lost: u32 = field(4)
            .parse()
            .map_err(|_| CampError::parse(line, "bad wickets_lost"))?;
        let mut remaining_batters = [0.0; CLUSTER_SLOTS];
        remaining_batters.copy_from_slice(&features[2..2 + CLUSTER_SLOTS]);
        let mut bowling_capacity = [0.0; CLUSTER_SLOTS];
        bowling_capacity.copy_from_slice(&features[2 + CLUSTER_SLOTS..2 + 2 * CLUSTER_SLOTS]);
        let stage = StageVector {
            match_id: MatchId::new(field(0)),
            innings,
            over_index,
            batting_team_cluster: features[0] as u32,
            bowling_team_cluster: features[1] as u32,
            remaining_batters,
            bowling_capacity,
            wickets_lost,
            runs_so_far: features[2 + 2 * CLUSTER_SLOTS + 1] as u32,
            venue,
            remaining_target: features[2 + 2 * CLUSTER_SLOTS + 3] as u32,
            overs_remaining,
        };
        out.push(TrainingExample {
            features,
            overs_remaining,
            wickets_lost,
            actual_remaining: num(6)?,
            match_id: MatchId::new(field(0)),
            innings,
            stage,
        });
    }
    Ok(out)
}

/// A trained projector for one innings.
#[derive(Debug, Clone)]
pub enum ProjectionModel {
    Knn(KnnModel),
    Ridge(RidgeModel),
    Forest(ForestModel),
}

impl ProjectionModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ProjectionModel::Knn(_) => ModelKind::Knn,
            ProjectionModel::Ridge(_) => ModelKind::Ridge,
            ProjectionModel::Forest(_) => ModelKind::Forest,
        }
    }

    pub fn innings(&self) -> u8 {
        match self {
            ProjectionModel::Knn(m) => m.innings,
            ProjectionModel::Ridge(m) => m.innings,
            ProjectionModel::Forest(m) => m.innings,
        }
    }

    pub fn project(&self, stage: &StageVector) -> Result<f64> {
        if stage.innings != self.innings() {
            return Err(CampError::validation(format!(
                "innings-{} model asked to project an innings-{} stage",
                self.innings(),
                stage.innings
            )));
        }
        match self {
            ProjectionModel::Knn(m) => m.project(stage),
            ProjectionModel::Ridge(m) => Ok(m.predict(&stage.numeric())),
            ProjectionModel::Forest(m) => Ok(m.predict(&stage.numeric())),
        }
    }
}

/// Projected remaining runs at every boundary of an innings: model
/// predictions at boundaries 1..=n plus the terminal boundary, which is 0 by
/// definition. Predictions are clamped at zero.
pub fn project_innings(stages: &[StageVector], model: &ProjectionModel) -> Result<Vec<f64>> {
    let Some((terminal, interior)) = stages.split_last() else {
        return Err(CampError::validation("innings shorter than one over"));
    };
    if interior.is_empty() {
        return Err(CampError::validation("innings shorter than one over"));
    }
    debug_assert_eq!(terminal.over_index, interior.len() as u32 + 1);
    let mut out = Vec::with_capacity(stages.len());
    for stage in interior {
        out.push(model.project(stage)?.max(0.0));
    }
    out.push(0.0);
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::*;
    use test_support::fixture_examples;

    #[test]
    fn examples_satisfy_remaining_runs_identity() {
        let (matches, examples) = fixture_examples(3, 31);
        for e in &examples {
            let m = matches
                .iter()
                .find(|m| m.summary.match_id == e.match_id)
                .unwrap();
            let total = m.innings[(e.innings - 1) as usize].total_runs as f64;
            assert!(e.actual_remaining >= 0.0);
            assert_eq!(e.actual_remaining, total - e.stage.runs_so_far as f64);
        }
    }

    #[test]
    fn projection_trace_has_terminal_zero_and_eq1_identity() {
        let (matches, examples) = fixture_examples(4, 32);
        let inn1: Vec<_> = examples.iter().filter(|e| e.innings == 1).cloned().collect();
        let model = ProjectionModel::Knn(
            KnnModel::fit(inn1, 1, KnnParams::default()).unwrap(),
        );
        let assignments = test_support::fixture_assignments(&matches);
        let stages =
            crate::features::build_stage_vectors(&matches[0], 1, &assignments, 50).unwrap();
        let r = project_innings(&stages, &model).unwrap();
        assert_eq!(r.len(), stages.len());
        assert_eq!(*r.last().unwrap(), 0.0);
        assert!(r.iter().all(|v| *v >= 0.0));
        // Eq. (1): the projected total is runs-so-far plus projected remaining.
        for (stage, ri) in stages.iter().zip(&r) {
            let p = stage.runs_so_far as f64 + ri;
            assert!((p - stage.runs_so_far as f64 - *ri).abs() < 1e-9);
        }
    }

    #[test]
    fn full_innings_yields_51_boundaries() {
        let (matches, examples) = fixture_examples(3, 33);
        // Find a full 50-over first innings.
        let m = matches
            .iter()
            .find(|m| m.innings[0].overs.len() == 50)
            .expect("a full innings in the fixture");
        let inn1: Vec<_> = examples.iter().filter(|e| e.innings == 1).cloned().collect();
        let model = ProjectionModel::Knn(KnnModel::fit(inn1, 1, KnnParams::default()).unwrap());
        let assignments = test_support::fixture_assignments(&matches);
        let stages = crate::features::build_stage_vectors(m, 1, &assignments, 50).unwrap();
        assert_eq!(stages.len(), 51);
        assert_eq!(project_innings(&stages, &model).unwrap().len(), 51);
    }
}
