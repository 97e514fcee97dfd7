//! Filtered weighted nearest-neighbour projection.
//!
//! Candidates are historical stages with the same remaining resources
//! (overs remaining, wickets lost) as the query; the prediction is the
//! similarity-weighted average of their actual remaining runs. When the
//! exact resource filter is empty the filter relaxes stepwise: +/-1 over,
//! then +/-1 wicket as well, then the whole store. Each relaxation is
//! logged. With the leave-one-out flag set, stages from the query's own
//! match never enter the candidate set.

use serde::{Deserialize, Serialize};

use crate::data::MatchId;
use crate::features::StageVector;
use crate::numeric::{euclidean, Scaler};
use crate::projection::TrainingExample;
use crate::{CampError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// w = 1 / (d + epsilon)
    InverseDistance,
    /// w = exp(-d)
    SoftmaxNegDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub epsilon: f64,
    /// Optional cap on the number of nearest candidates used; default is the
    /// whole filtered set.
    pub cap: Option<usize>,
    pub weighting: WeightKind,
    pub leave_one_out: bool,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            epsilon: 1e-6,
            cap: None,
            weighting: WeightKind::InverseDistance,
            leave_one_out: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxLevel {
    Exact,
    OverPm1,
    WicketPm1,
    Global,
}

impl RelaxLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelaxLevel::Exact => "exact",
            RelaxLevel::OverPm1 => "overs+-1",
            RelaxLevel::WicketPm1 => "overs+-1,wickets+-1",
            RelaxLevel::Global => "global",
        }
    }
}

#[derive(Debug, Clone)]
pub struct KnnModel {
    pub innings: u8,
    pub params: KnnParams,
    examples: Vec<TrainingExample>,
    standardized: Vec<Vec<f64>>,
    scaler: Scaler,
}

fn diff_within(a: u32, b: u32, tol: u32) -> bool {
    a.abs_diff(b) <= tol
}

impl KnnModel {
    pub fn fit(examples: Vec<TrainingExample>, innings: u8, params: KnnParams) -> Result<Self> {
        if examples.is_empty() {
            return Err(CampError::validation("knn: empty example store"));
        }
        if let Some(bad) = examples.iter().find(|e| e.innings != innings) {
            return Err(CampError::validation(format!(
                "knn: innings-{} store fed an innings-{} example",
                innings, bad.innings
            )));
        }
        let features: Vec<Vec<f64>> = examples.iter().map(|e| e.features.clone()).collect();
        let scaler = Scaler::fit(&features)?;
        let standardized = features.iter().map(|f| scaler.transform(f)).collect();
        Ok(KnnModel {
            innings,
            params,
            examples,
            standardized,
            scaler,
        })
    }

    pub fn examples(&self) -> &[TrainingExample] {
        &self.examples
    }

    /// Candidate indices for the given resources, applying the relaxation
    /// ladder. The returned level reports how far the filter had to widen.
    pub fn candidates(
        &self,
        overs_remaining: u32,
        wickets_lost: u32,
        exclude_match: Option<&MatchId>,
    ) -> (Vec<usize>, RelaxLevel) {
        let eligible = |e: &TrainingExample| exclude_match != Some(&e.match_id);
        for level in [
            RelaxLevel::Exact,
            RelaxLevel::OverPm1,
            RelaxLevel::WicketPm1,
            RelaxLevel::Global,
        ] {
            let (over_tol, wicket_tol) = match level {
                RelaxLevel::Exact => (0, 0),
                RelaxLevel::OverPm1 => (1, 0),
                RelaxLevel::WicketPm1 => (1, 1),
                RelaxLevel::Global => (u32::MAX, u32::MAX),
            };
            let hits: Vec<usize> = self
                .examples
                .iter()
                .enumerate()
                .filter(|(_, e)| {
                    eligible(e)
                        && diff_within(e.overs_remaining, overs_remaining, over_tol)
                        && diff_within(e.wickets_lost, wickets_lost, wicket_tol)
                })
                .map(|(i, _)| i)
                .collect();
            if !hits.is_empty() {
                if level != RelaxLevel::Exact {
                    log::debug!(
                        "knn: relaxed resource filter to {} for ({overs_remaining} overs left, {wickets_lost} wickets)",
                        level.as_str()
                    );
                }
                return (hits, level);
            }
        }
        (Vec::new(), RelaxLevel::Global)
    }

    /// Weighted-average projection for a query stage, clamped at zero.
    pub fn project(&self, stage: &StageVector) -> Result<f64> {
        let exclude = self.params.leave_one_out.then_some(&stage.match_id);
        let (mut candidates, _) =
            self.candidates(stage.overs_remaining, stage.wickets_lost, exclude);
        if candidates.is_empty() {
            return Err(CampError::validation(format!(
                "knn: no candidates for match {} innings {} over {} even after relaxation",
                stage.match_id, stage.innings, stage.over_index
            )));
        }
        let query = self.scaler.transform(&stage.numeric());
        let mut scored: Vec<(usize, f64)> = candidates
            .drain(..)
            .map(|i| (i, euclidean(&self.standardized[i], &query)))
            .collect();
        if let Some(cap) = self.params.cap {
            scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            scored.truncate(cap.max(1));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, d) in &scored {
            let w = match self.params.weighting {
                WeightKind::InverseDistance => 1.0 / (d + self.params.epsilon),
                WeightKind::SoftmaxNegDistance => (-d).exp(),
            };
            num += w * self.examples[*i].actual_remaining;
            den += w;
        }
        Ok((num / den).max(0.0))
    }
}
