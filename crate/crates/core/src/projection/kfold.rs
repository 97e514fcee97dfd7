//! Cross-validated projection error. Regression models are scored on
//! match-disjoint folds; the nearest-neighbour model uses leave-one-match-out
//! instead, the same hygiene rule it uses when projecting.

use std::collections::{BTreeMap, BTreeSet};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::MatchId;
use crate::projection::{
    forest_fit, ridge_fit, ForestParams, KnnModel, KnnParams, ModelKind, TrainingExample,
};
use crate::synth::derive_seed;
use crate::{CampError, Result};

/// Mean absolute error for one over; absent when no test example fell there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaeCell {
    pub mae: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub match_id: MatchId,
    pub innings: u8,
    pub over: u32,
    pub predicted: f64,
    pub actual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    /// Number of over rows per innings (the scheduled innings length).
    pub overs: u32,
    /// Per model: per-over MAE cells for innings 1 and 2.
    pub curves: BTreeMap<String, [Vec<MaeCell>; 2]>,
    pub traces: BTreeMap<String, Vec<TracePoint>>,
}

impl ProjectionReport {
    pub fn empty(overs: u32) -> Self {
        ProjectionReport {
            overs,
            curves: BTreeMap::new(),
            traces: BTreeMap::new(),
        }
    }

    pub fn insert_curve(&mut self, model: &str, points: Vec<TracePoint>) {
        let mut sums = [vec![0.0; self.overs as usize], vec![0.0; self.overs as usize]];
        let mut counts = [vec![0usize; self.overs as usize], vec![0usize; self.overs as usize]];
        for p in &points {
            let inn = (p.innings - 1) as usize;
            let over = (p.over - 1) as usize;
            sums[inn][over] += (p.predicted - p.actual).abs();
            counts[inn][over] += 1;
        }
        let cells = |inn: usize| -> Vec<MaeCell> {
            sums[inn]
                .iter()
                .zip(&counts[inn])
                .map(|(s, n)| MaeCell {
                    mae: (*n > 0).then(|| s / *n as f64),
                    n: *n,
                })
                .collect()
        };
        self.curves.insert(model.to_owned(), [cells(0), cells(1)]);
        let mut points = points;
        points.sort_by(|a, b| {
            (&a.match_id, a.innings, a.over).cmp(&(&b.match_id, b.innings, b.over))
        });
        self.traces.insert(model.to_owned(), points);
    }
}

/// Deterministic match-level fold assignment: matches are shuffled by seed
/// and dealt round-robin into `k` folds.
pub fn kfold_match_split(
    match_ids: &BTreeSet<MatchId>,
    k: usize,
    seed: u64,
) -> BTreeMap<MatchId, usize> {
    let mut ids: Vec<&MatchId> = match_ids.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..ids.len()).rev() {
        let j = rng.random_range(0..=i);
        ids.swap(i, j);
    }
    ids.into_iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i % k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub k_folds: usize,
    pub seed: u64,
    pub lambda: f64,
    pub forest: ForestParams,
    pub knn: KnnParams,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            k_folds: 5,
            seed: 42,
            lambda: 1.0,
            forest: ForestParams::default(),
            knn: KnnParams::default(),
        }
    }
}

fn split_by_innings(examples: &[TrainingExample]) -> [Vec<TrainingExample>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for e in examples {
        out[(e.innings - 1) as usize].push(e.clone());
    }
    out
}

fn knn_loo_trace(examples: &[TrainingExample], params: KnnParams) -> Result<Vec<TracePoint>> {
    let mut points = Vec::with_capacity(examples.len());
    for (innings_idx, innings_examples) in split_by_innings(examples).into_iter().enumerate() {
        if innings_examples.is_empty() {
            continue;
        }
        let params = KnnParams { leave_one_out: true, ..params };
        let model = KnnModel::fit(innings_examples.clone(), innings_idx as u8 + 1, params)?;
        for e in &innings_examples {
            let predicted = model.project(&e.stage)?;
            points.push(TracePoint {
                match_id: e.match_id.clone(),
                innings: e.innings,
                over: e.stage.over_index,
                predicted,
                actual: e.actual_remaining,
            });
        }
    }
    Ok(points)
}

type Predictor = Box<dyn Fn(&[f64]) -> f64>;

fn regression_fold_trace(
    examples: &[TrainingExample],
    kind: ModelKind,
    params: &EvalParams,
) -> Result<Vec<TracePoint>> {
    let match_ids: BTreeSet<MatchId> = examples.iter().map(|e| e.match_id.clone()).collect();
    if match_ids.len() < params.k_folds {
        return Err(CampError::validation(format!(
            "k-fold: {} matches cannot fill {} folds",
            match_ids.len(),
            params.k_folds
        )));
    }
    let folds = kfold_match_split(&match_ids, params.k_folds, params.seed);
    let mut points = Vec::with_capacity(examples.len());
    for fold in 0..params.k_folds {
        for innings in [1u8, 2] {
            let train: Vec<TrainingExample> = examples
                .iter()
                .filter(|e| e.innings == innings && folds[&e.match_id] != fold)
                .cloned()
                .collect();
            let test: Vec<&TrainingExample> = examples
                .iter()
                .filter(|e| e.innings == innings && folds[&e.match_id] == fold)
                .collect();
            if test.is_empty() {
                continue;
            }
            let predict: Predictor = match kind {
                ModelKind::Ridge => {
                    let model = ridge_fit(&train, params.lambda, innings)?;
                    Box::new(move |f| model.predict(f))
                }
                ModelKind::Forest => {
                    let seed = derive_seed(params.seed, (fold as u64) << 8 | innings as u64);
                    let model = forest_fit(&train, params.forest, seed, innings)?;
                    Box::new(move |f| model.predict(f))
                }
                ModelKind::Knn => unreachable!("knn uses leave-one-match-out"),
            };
            for e in test {
                points.push(TracePoint {
                    match_id: e.match_id.clone(),
                    innings: e.innings,
                    over: e.stage.over_index,
                    predicted: predict(&e.features),
                    actual: e.actual_remaining,
                });
            }
        }
    }
    Ok(points)
}

/// Cross-validated per-over MAE for the requested model kinds.
pub fn evaluate_models(
    examples: &[TrainingExample],
    kinds: &[ModelKind],
    params: &EvalParams,
    overs: u32,
) -> Result<ProjectionReport> {
    if params.k_folds < 2 {
        return Err(CampError::validation("k-fold: k_folds must be >= 2"));
    }
    if examples.is_empty() {
        return Err(CampError::validation("k-fold: no examples"));
    }
    for innings in [1u8, 2] {
        if !examples.iter().any(|e| e.innings == innings) {
            return Err(CampError::validation(format!(
                "k-fold: examples must span both innings, innings {innings} is empty"
            )));
        }
    }
    let mut report = ProjectionReport::empty(overs);
    for kind in kinds {
        let points = match kind {
            ModelKind::Knn => knn_loo_trace(examples, params.knn)?,
            _ => regression_fold_trace(examples, *kind, params)?,
        };
        report.insert_curve(kind.as_str(), points);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::test_support::fixture_examples;

    #[test]
    fn perfect_predictor_scores_zero() {
        // Feed predictions equal to actuals through the aggregation path.
        let (_, examples) = fixture_examples(3, 51);
        let mut report = ProjectionReport::empty(50);
        let points: Vec<TracePoint> = examples
            .iter()
            .map(|e| TracePoint {
                match_id: e.match_id.clone(),
                innings: e.innings,
                over: e.stage.over_index,
                predicted: e.actual_remaining,
                actual: e.actual_remaining,
            })
            .collect();
        report.insert_curve("oracle", points);
        for cells in report.curves["oracle"].iter() {
            for c in cells {
                if let Some(mae) = c.mae {
                    assert_eq!(mae, 0.0);
                }
            }
        }
    }

    #[test]
    fn constant_predictor_mae_matches_direct_recomputation() {
        let (_, examples) = fixture_examples(4, 52);
        let mut report = ProjectionReport::empty(50);
        let constant = 235.0;
        let points: Vec<TracePoint> = examples
            .iter()
            .map(|e| TracePoint {
                match_id: e.match_id.clone(),
                innings: e.innings,
                over: e.stage.over_index,
                predicted: (constant - e.stage.runs_so_far as f64).max(0.0),
                actual: e.actual_remaining,
            })
            .collect();
        report.insert_curve("const235", points);

        for innings in [1u8, 2] {
            for over in 1..=50u32 {
                let relevant: Vec<&TrainingExample> = examples
                    .iter()
                    .filter(|e| e.innings == innings && e.stage.over_index == over)
                    .collect();
                let cell = report.curves["const235"][(innings - 1) as usize][(over - 1) as usize];
                if relevant.is_empty() {
                    assert!(cell.mae.is_none());
                    continue;
                }
                let want = relevant
                    .iter()
                    .map(|e| {
                        let pred = (constant - e.stage.runs_so_far as f64).max(0.0);
                        (pred - e.actual_remaining).abs()
                    })
                    .sum::<f64>()
                    / relevant.len() as f64;
                assert!((cell.mae.unwrap() - want).abs() < 1e-12);
                assert_eq!(cell.n, relevant.len());
            }
        }
    }

    #[test]
    fn report_shape_is_50_overs_per_model_and_innings() {
        let (_, examples) = fixture_examples(6, 53);
        let params = EvalParams {
            k_folds: 3,
            forest: ForestParams { n_trees: 5, ..ForestParams::default() },
            ..EvalParams::default()
        };
        let report = evaluate_models(
            &examples,
            &[ModelKind::Knn, ModelKind::Ridge, ModelKind::Forest],
            &params,
            50,
        )
        .unwrap();
        assert_eq!(report.curves.len(), 3);
        for cells in report.curves.values() {
            assert_eq!(cells[0].len(), 50);
            assert_eq!(cells[1].len(), 50);
        }
    }

    #[test]
    fn fold_split_is_deterministic_and_balanced() {
        let ids: BTreeSet<MatchId> = (0..20).map(|i| MatchId::new(format!("M{i:02}"))).collect();
        let a = kfold_match_split(&ids, 5, 9);
        let b = kfold_match_split(&ids, 5, 9);
        assert_eq!(a, b);
        let mut counts = vec![0usize; 5];
        for fold in a.values() {
            counts[*fold] += 1;
        }
        assert!(counts.iter().all(|c| *c == 4));
        let c = kfold_match_split(&ids, 5, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn too_few_matches_for_folds_is_an_error() {
        let (_, examples) = fixture_examples(2, 54);
        let params = EvalParams { k_folds: 5, ..EvalParams::default() };
        let err = evaluate_models(&examples, &[ModelKind::Ridge], &params, 50).unwrap_err();
        assert!(err.to_string().contains("folds"), "{err}");
    }
}
