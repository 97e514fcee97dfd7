//! Random-forest regression: bootstrap-sampled CART trees with
//! variance-reduction splits, averaged at prediction time.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::projection::TrainingExample;
use crate::synth::derive_seed;
use crate::{CampError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Fraction of features considered at each split.
    pub feature_frac: f64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 12,
            min_leaf: 5,
            feature_frac: 1.0 / 3.0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(CampError::validation("forest: n_trees must be >= 1"));
        }
        if self.min_leaf == 0 {
            return Err(CampError::validation("forest: min_leaf must be >= 1"));
        }
        if !(0.0 < self.feature_frac && self.feature_frac <= 1.0) {
            return Err(CampError::validation("forest: feature_frac must be in (0,1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: u32, right: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, features: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    at = if features[*feature] < *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub innings: u8,
    pub seed: u64,
    pub params: ForestParams,
    pub trees: Vec<Tree>,
}

struct TreeBuilder<'a> {
    xs: &'a [Vec<f64>],
    ys: &'a [f64],
    params: ForestParams,
    n_features: usize,
    n_split_features: usize,
    nodes: Vec<Node>,
}

impl<'a> TreeBuilder<'a> {
    fn build(&mut self, samples: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> u32 {
        let idx = self.nodes.len() as u32;
        self.nodes.push(Node::Leaf { value: 0.0 }); // reserved, fixed below

        let n = samples.len() as f64;
        let mean = samples.iter().map(|&i| self.ys[i]).sum::<f64>() / n;
        let sse: f64 = samples.iter().map(|&i| (self.ys[i] - mean).powi(2)).sum();

        let can_split =
            depth < self.params.max_depth && samples.len() >= 2 * self.params.min_leaf && sse > 0.0;
        let split = can_split.then(|| self.best_split(&samples, rng)).flatten();

        match split {
            None => {
                self.nodes[idx as usize] = Node::Leaf { value: mean };
            }
            Some((feature, threshold)) => {
                let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
                    .into_iter()
                    .partition(|&i| self.xs[i][feature] < threshold);
                let left = self.build(left_samples, depth + 1, rng);
                let right = self.build(right_samples, depth + 1, rng);
                self.nodes[idx as usize] = Node::Split { feature, threshold, left, right };
            }
        }
        idx
    }

    /// Best variance-reduction split over a random feature subset, or none
    /// if no split satisfies the min-leaf constraint.
    fn best_split(&self, samples: &[usize], rng: &mut ChaCha8Rng) -> Option<(usize, f64)> {
        let mut feats: Vec<usize> = (0..self.n_features).collect();
        for i in 0..self.n_split_features {
            let j = rng.random_range(i..feats.len());
            feats.swap(i, j);
        }
        let mut feats = feats[..self.n_split_features].to_vec();
        feats.sort_unstable();

        let mut best: Option<(f64, usize, f64)> = None;
        let min_leaf = self.params.min_leaf;
        for &f in &feats {
            let mut order: Vec<usize> = samples.to_vec();
            order.sort_by(|&a, &b| self.xs[a][f].total_cmp(&self.xs[b][f]).then(a.cmp(&b)));

            let total_sum: f64 = order.iter().map(|&i| self.ys[i]).sum();
            let total_sq: f64 = order.iter().map(|&i| self.ys[i] * self.ys[i]).sum();
            let n = order.len();
            let mut left_sum = 0.0;
            let mut left_sq = 0.0;
            for pos in 0..n - 1 {
                let i = order[pos];
                left_sum += self.ys[i];
                left_sq += self.ys[i] * self.ys[i];
                let n_left = pos + 1;
                let n_right = n - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let v_here = self.xs[i][f];
                let v_next = self.xs[order[pos + 1]][f];
                if v_here == v_next {
                    continue; // cannot separate equal values
                }
                let right_sum = total_sum - left_sum;
                let right_sq = total_sq - left_sq;
                let sse = (left_sq - left_sum * left_sum / n_left as f64)
                    + (right_sq - right_sum * right_sum / n_right as f64);
                if best.is_none_or(|(b, _, _)| sse < b) {
                    best = Some((sse, f, (v_here + v_next) / 2.0));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// Fit a forest on raw feature rows.
pub fn forest_fit_raw(
    xs: &[Vec<f64>],
    ys: &[f64],
    params: ForestParams,
    seed: u64,
    innings: u8,
) -> Result<ForestModel> {
    params.validate()?;
    if xs.len() < params.min_leaf {
        return Err(CampError::validation(format!(
            "forest: {} examples is fewer than min_leaf {}",
            xs.len(),
            params.min_leaf
        )));
    }
    if xs.len() != ys.len() {
        return Err(CampError::validation("forest: feature/target length mismatch"));
    }
    let n_features = xs[0].len();
    let n_split_features = ((n_features as f64 * params.feature_frac).ceil() as usize)
        .clamp(1, n_features);

    let trees: Vec<Tree> = (0..params.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
            let samples: Vec<usize> = (0..xs.len()).map(|_| rng.random_range(0..xs.len())).collect();
            let mut builder = TreeBuilder {
                xs,
                ys,
                params,
                n_features,
                n_split_features,
                nodes: Vec::new(),
            };
            builder.build(samples, 0, &mut rng);
            Tree { nodes: builder.nodes }
        })
        .collect();

    Ok(ForestModel { innings, seed, params, trees })
}

/// Fit from training examples of one innings.
pub fn forest_fit(
    examples: &[TrainingExample],
    params: ForestParams,
    seed: u64,
    innings: u8,
) -> Result<ForestModel> {
    let xs: Vec<Vec<f64>> = examples.iter().map(|e| e.features.clone()).collect();
    let ys: Vec<f64> = examples.iter().map(|e| e.actual_remaining).collect();
    forest_fit_raw(&xs, &ys, params, seed, innings)
}

impl ForestModel {
    /// Mean of the tree predictions, clamped at zero.
    pub fn predict(&self, features: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(features)).sum();
        (sum / self.trees.len() as f64).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_xs(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![i as f64, (i % 7) as f64]).collect()
    }

    #[test]
    fn constant_target_predicts_exactly() {
        let xs = grid_xs(40);
        let ys = vec![7.5; 40];
        let model = forest_fit_raw(&xs, &ys, ForestParams::default(), 3, 1).unwrap();
        for x in xs.iter().step_by(5) {
            assert_eq!(model.predict(x), 7.5);
        }
    }

    #[test]
    fn single_stump_predicts_bootstrap_mean() {
        let xs = grid_xs(30);
        let ys: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let params = ForestParams { n_trees: 1, max_depth: 0, ..ForestParams::default() };
        let model = forest_fit_raw(&xs, &ys, params, 11, 1).unwrap();

        // Recompute the bootstrap sample with the same derived stream.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(11, 0));
        let samples: Vec<usize> = (0..30).map(|_| rng.random_range(0..30)).collect();
        let mean = samples.iter().map(|&i| ys[i]).sum::<f64>() / 30.0;
        assert!((model.predict(&[3.0, 3.0]) - mean.max(0.0)).abs() < 1e-12);
    }

    #[test]
    fn piecewise_constant_beats_ridge() {
        // A step function: the forest can localize, ridge cannot.
        let xs: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64 / 10.0, 1.0 + (i % 3) as f64]).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| if x[0] < 5.0 { 10.0 } else if x[0] < 14.0 { 90.0 } else { 40.0 })
            .collect();
        let forest = forest_fit_raw(&xs, &ys, ForestParams { n_trees: 30, ..ForestParams::default() }, 5, 1).unwrap();
        let ridge = crate::projection::ridge::ridge_fit_raw(&xs, &ys, 1.0, 1).unwrap();
        let mae = |pred: &dyn Fn(&[f64]) -> f64| -> f64 {
            xs.iter()
                .zip(&ys)
                .map(|(x, y)| (pred(x) - y).abs())
                .sum::<f64>()
                / xs.len() as f64
        };
        let forest_mae = mae(&|x| forest.predict(x));
        let ridge_mae = mae(&|x| ridge.predict(x));
        assert!(
            forest_mae < ridge_mae,
            "forest {forest_mae} should beat ridge {ridge_mae}"
        );
    }

    #[test]
    fn identical_seeds_give_identical_forests() {
        let xs = grid_xs(60);
        let ys: Vec<f64> = (0..60).map(|i| (i * i % 97) as f64).collect();
        let params = ForestParams { n_trees: 10, ..ForestParams::default() };
        let a = forest_fit_raw(&xs, &ys, params, 123, 1).unwrap();
        let b = forest_fit_raw(&xs, &ys, params, 123, 1).unwrap();
        assert_eq!(a, b);
        let c = forest_fit_raw(&xs, &ys, params, 124, 1).unwrap();
        assert_ne!(a.trees, c.trees);
    }

    #[test]
    fn min_leaf_is_respected_via_prediction_granularity() {
        let xs = grid_xs(20);
        let ys: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let params = ForestParams { n_trees: 1, min_leaf: 10, max_depth: 4, ..ForestParams::default() };
        let model = forest_fit_raw(&xs, &ys, params, 1, 1).unwrap();
        // With min_leaf 10 of 20 samples, at most one split is possible.
        let distinct: std::collections::BTreeSet<u64> = xs
            .iter()
            .map(|x| model.predict(x).to_bits())
            .collect();
        assert!(distinct.len() <= 2, "{distinct:?}");
    }

    #[test]
    fn too_few_examples_is_an_error() {
        let xs = grid_xs(3);
        let ys = vec![1.0, 2.0, 3.0];
        let params = ForestParams { min_leaf: 5, ..ForestParams::default() };
        assert!(forest_fit_raw(&xs, &ys, params, 0, 1).is_err());
    }
}
