//! k-means clustering of team and player embeddings.
//!
//! Features are z-scored per dimension before clustering (raw counts have
//! wildly different scales). Initialization is k-means++ driven by an
//! explicit seed over entities sorted by id, so a fit is deterministic and
//! independent of input order. Players with no history never enter the fit;
//! they are placed in the dummy fifth cluster.

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{PlayerId, TeamId};
use crate::features::{BatterFeatures, BowlerFeatures, TeamFeatures};
use crate::numeric::{squared_distance, Scaler};
use crate::{CampError, Result};

/// Cluster id for players with an empty history.
pub const DUMMY_CLUSTER: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Team,
    Batter,
    Bowler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub kind: EntityKind,
    pub k: usize,
    pub seed: u64,
    /// Centroids in standardized feature space.
    pub centroids: Vec<Vec<f64>>,
    /// Entity id to cluster id 1..=k, or [`DUMMY_CLUSTER`] for empty history.
    pub assignments: BTreeMap<String, u32>,
    pub scaler: Scaler,
    pub inertia: f64,
    /// Inertia after every Lloyd iteration; non-increasing by construction.
    pub inertia_trace: Vec<f64>,
}

fn nearest(centroids: &[Vec<f64>], point: &[f64]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(c, point);
        // Strict comparison keeps the lowest index on ties.
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn kmeans_plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())].clone());
    let mut weights = vec![0.0; points.len()];
    while centroids.len() < k {
        let mut total = 0.0;
        for (w, p) in weights.iter_mut().zip(points) {
            *w = nearest(&centroids, p).1;
            total += *w;
        }
        let next = if total > 0.0 {
            let mut x = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if x < *w {
                    chosen = i;
                    break;
                }
                x -= w;
            }
            chosen
        } else {
            // All remaining mass on duplicates of chosen centroids; cannot
            // happen when the input has >= k distinct points.
            rng.random_range(0..points.len())
        };
        centroids.push(points[next].clone());
    }
    centroids
}

/// Lloyd's algorithm with k-means++ initialization over entities sorted by
/// id. Fails when the input has fewer than `k` distinct vectors.
pub fn kmeans_fit(
    entities: &[(String, Vec<f64>)],
    kind: EntityKind,
    k: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
) -> Result<ClusterModel> {
    if k < 1 {
        return Err(CampError::validation("k-means: k must be >= 1"));
    }
    let mut sorted: Vec<&(String, Vec<f64>)> = entities.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in sorted.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(CampError::validation(format!(
                "k-means: duplicate entity id {}",
                pair[0].0
            )));
        }
    }

    let mut distinct: Vec<&[f64]> = Vec::new();
    for (_, v) in &sorted {
        if !distinct.contains(&v.as_slice()) {
            distinct.push(v);
        }
    }
    if distinct.len() < k {
        return Err(CampError::validation(format!(
            "k-means: {} distinct vectors is fewer than k={k}",
            distinct.len()
        )));
    }

    let raw: Vec<Vec<f64>> = sorted.iter().map(|(_, v)| v.clone()).collect();
    let scaler = Scaler::fit(&raw)?;
    let points: Vec<Vec<f64>> = raw.iter().map(|r| scaler.transform(r)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_plus_plus_init(&points, k, &mut rng);
    let mut labels = vec![0usize; points.len()];
    let mut inertia_trace = Vec::new();

    for _ in 0..max_iters {
        let mut inertia = 0.0;
        for (label, p) in labels.iter_mut().zip(&points) {
            let (idx, d) = nearest(&centroids, p);
            *label = idx;
            inertia += d;
        }
        if let Some(prev) = inertia_trace.last() {
            debug_assert!(
                inertia <= prev + 1e-9,
                "inertia increased: {prev} -> {inertia}"
            );
        }
        inertia_trace.push(inertia);

        let dim = points[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (label, p) in labels.iter().zip(&points) {
            counts[*label] += 1;
            for (s, v) in sums[*label].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut shift_sq = 0.0;
        let mut norm_sq = 0.0;
        for c in 0..k {
            norm_sq += centroids[c].iter().map(|v| v * v).sum::<f64>();
            if counts[c] == 0 {
                continue; // keep the old centroid for an empty cluster
            }
            let new: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            shift_sq += squared_distance(&centroids[c], &new);
            centroids[c] = new;
        }
        if shift_sq.sqrt() < tol * (1.0 + norm_sq.sqrt()) {
            break;
        }
    }

    let mut inertia = 0.0;
    let mut assignments = BTreeMap::new();
    for ((id, _), p) in sorted.iter().zip(&points) {
        let (idx, d) = nearest(&centroids, p);
        inertia += d;
        assignments.insert(id.clone(), idx as u32 + 1);
    }

    Ok(ClusterModel {
        kind,
        k,
        seed,
        centroids,
        assignments,
        scaler,
        inertia,
        inertia_trace,
    })
}

impl ClusterModel {
    /// Nearest-centroid assignment for a raw (unstandardized) vector; ties
    /// break toward the lowest cluster id.
    pub fn assign(&self, vector: &[f64]) -> Result<u32> {
        if vector.len() != self.scaler.dim() {
            return Err(CampError::validation(format!(
                "assign: vector has {} dims, model expects {}",
                vector.len(),
                self.scaler.dim()
            )));
        }
        if self.centroids.is_empty() {
            return Err(CampError::validation(
                "assign: model has no centroids (trained on an empty pool)",
            ));
        }
        let p = self.scaler.transform(vector);
        Ok(nearest(&self.centroids, &p).0 as u32 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmeansConfig {
    pub k_teams: usize,
    pub k_batters: usize,
    pub k_bowlers: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        KmeansConfig {
            k_teams: 3,
            k_batters: 4,
            k_bowlers: 4,
            max_iters: 300,
            tol: 1e-6,
            seed: 42,
        }
    }
}

impl KmeansConfig {
    pub fn validate(&self) -> Result<()> {
        // Player cluster ids must stay below the dummy cluster id.
        for (name, k) in [("k_batters", self.k_batters), ("k_bowlers", self.k_bowlers)] {
            if k < 1 || k as u32 >= DUMMY_CLUSTER {
                return Err(CampError::validation(format!(
                    "{name}: must be in 1..={}",
                    DUMMY_CLUSTER - 1
                )));
            }
        }
        if self.k_teams < 1 || self.k_teams as u32 >= DUMMY_CLUSTER {
            return Err(CampError::validation(format!(
                "k_teams: must be in 1..={}",
                DUMMY_CLUSTER - 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterBundle {
    pub teams: ClusterModel,
    pub batters: ClusterModel,
    pub bowlers: ClusterModel,
}

/// Typed view of the three assignment maps, the form consumed by the
/// stage-vector builder.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterAssignments {
    pub teams: BTreeMap<TeamId, u32>,
    pub batters: BTreeMap<PlayerId, u32>,
    pub bowlers: BTreeMap<PlayerId, u32>,
}

impl ClusterBundle {
    pub fn assignments(&self) -> ClusterAssignments {
        ClusterAssignments {
            teams: self
                .teams
                .assignments
                .iter()
                .map(|(id, c)| (TeamId::new(id.clone()), *c))
                .collect(),
            batters: self
                .batters
                .assignments
                .iter()
                .map(|(id, c)| (PlayerId::new(id.clone()), *c))
                .collect(),
            bowlers: self
                .bowlers
                .assignments
                .iter()
                .map(|(id, c)| (PlayerId::new(id.clone()), *c))
                .collect(),
        }
    }
}

fn fit_player_model(
    entities: Vec<(String, Vec<f64>, bool)>,
    kind: EntityKind,
    k: usize,
    cfg: &KmeansConfig,
    seed: u64,
) -> Result<ClusterModel> {
    let trainable: Vec<(String, Vec<f64>)> = entities
        .iter()
        .filter(|(_, _, empty)| !empty)
        .map(|(id, v, _)| (id.clone(), v.clone()))
        .collect();
    let mut model = if trainable.is_empty() {
        // Everyone sits in the dummy cluster; there is nothing to fit.
        ClusterModel {
            kind,
            k,
            seed,
            centroids: Vec::new(),
            assignments: BTreeMap::new(),
            scaler: Scaler {
                means: Vec::new(),
                stds: Vec::new(),
            },
            inertia: 0.0,
            inertia_trace: Vec::new(),
        }
    } else {
        kmeans_fit(&trainable, kind, k, seed, cfg.max_iters, cfg.tol)?
    };
    for (id, _, empty) in entities {
        if empty {
            model.assignments.insert(id, DUMMY_CLUSTER);
        }
    }
    Ok(model)
}

/// Fit the team model alone. The player feature builders need team cluster
/// ids before the player models exist, so this is callable on its own; it
/// draws the same derived seed as [`cluster_all`] and therefore produces the
/// identical model.
pub fn fit_team_model(teams: &[TeamFeatures], cfg: &KmeansConfig) -> Result<ClusterModel> {
    let team_entities: Vec<(String, Vec<f64>)> = teams
        .iter()
        .map(|t| (t.team.0.clone(), t.values.clone()))
        .collect();
    kmeans_fit(
        &team_entities,
        EntityKind::Team,
        cfg.k_teams,
        crate::synth::derive_seed(cfg.seed, 1),
        cfg.max_iters,
        cfg.tol,
    )
}

/// Fit the three cluster models. Team ids feed the team model; players with
/// empty histories go straight to the dummy cluster.
pub fn cluster_all(
    teams: &[TeamFeatures],
    batters: &[BatterFeatures],
    bowlers: &[BowlerFeatures],
    cfg: &KmeansConfig,
) -> Result<ClusterBundle> {
    cfg.validate()?;
    let team_model = fit_team_model(teams, cfg)?;

    let batter_model = fit_player_model(
        batters
            .iter()
            .map(|b| (b.player.0.clone(), b.values.clone(), b.never_batted))
            .collect(),
        EntityKind::Batter,
        cfg.k_batters,
        cfg,
        crate::synth::derive_seed(cfg.seed, 2),
    )?;
    let bowler_model = fit_player_model(
        bowlers
            .iter()
            .map(|b| (b.player.0.clone(), b.values.clone(), b.never_bowled))
            .collect(),
        EntityKind::Bowler,
        cfg.k_bowlers,
        cfg,
        crate::synth::derive_seed(cfg.seed, 3),
    )?;

    Ok(ClusterBundle {
        teams: team_model,
        batters: batter_model,
        bowlers: bowler_model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;

    fn blob(center: &[f64], n: usize, spread: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                center
                    .iter()
                    .map(|c| c + spread * (rng.random::<f64>() - 0.5))
                    .collect()
            })
            .collect()
    }

    fn entities(groups: &[Vec<Vec<f64>>]) -> Vec<(String, Vec<f64>)> {
        groups
            .iter()
            .enumerate()
            .flat_map(|(g, vs)| {
                vs.iter()
                    .enumerate()
                    .map(move |(i, v)| (format!("g{g}_e{i:03}"), v.clone()))
            })
            .collect()
    }

    #[test]
    fn separated_blobs_cluster_perfectly() {
        // Every dimension varies across blob centers: standardization scales
        // dimensions independently, so a noise-only dimension would be
        // amplified to unit variance and drown the separation.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let groups = [
            blob(&[0.0, 0.0, 100.0], 20, 0.5, &mut rng),
            blob(&[100.0, 0.0, 0.0], 20, 0.5, &mut rng),
            blob(&[0.0, 100.0, 50.0], 20, 0.5, &mut rng),
        ];
        let model =
            kmeans_fit(&entities(&groups), EntityKind::Team, 3, 7, 300, 1e-6).unwrap();
        // Every group lands in exactly one cluster.
        for g in 0..3 {
            let ids: Vec<u32> = model
                .assignments
                .iter()
                .filter(|(id, _)| id.starts_with(&format!("g{g}_")))
                .map(|(_, c)| *c)
                .collect();
            assert!(ids.windows(2).all(|w| w[0] == w[1]), "group {g} split: {ids:?}");
        }
        let mut clusters: Vec<u32> = (0..3)
            .map(|g| model.assignments[&format!("g{g}_e000")])
            .collect();
        clusters.sort_unstable();
        assert_eq!(clusters, vec![1, 2, 3]);
    }

    #[test]
    fn k1_centroid_is_the_standardized_mean() {
        let pts = vec![
            ("a".to_owned(), vec![1.0, 10.0]),
            ("b".to_owned(), vec![3.0, 20.0]),
            ("c".to_owned(), vec![5.0, 60.0]),
        ];
        let model = kmeans_fit(&pts, EntityKind::Team, 1, 0, 300, 1e-6).unwrap();
        let scaled: Vec<Vec<f64>> = pts.iter().map(|(_, v)| model.scaler.transform(v)).collect();
        for d in 0..2 {
            let mean: f64 = scaled.iter().map(|p| p[d]).sum::<f64>() / 3.0;
            assert!((model.centroids[0][d] - mean).abs() < 1e-9);
        }
    }

    #[test]
    fn fewer_distinct_points_than_k_is_an_error() {
        let pts = vec![
            ("a".to_owned(), vec![1.0, 1.0]),
            ("b".to_owned(), vec![1.0, 1.0]),
        ];
        let err = kmeans_fit(&pts, EntityKind::Team, 2, 0, 300, 1e-6).unwrap_err();
        assert!(err.to_string().contains("distinct"), "{err}");
    }

    #[test]
    fn deterministic_and_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let groups = [
            blob(&[0.0; 4], 15, 2.0, &mut rng),
            blob(&[30.0; 4], 15, 2.0, &mut rng),
        ];
        let mut ents = entities(&groups);
        let a = kmeans_fit(&ents, EntityKind::Batter, 2, 9, 300, 1e-6).unwrap();
        let b = kmeans_fit(&ents, EntityKind::Batter, 2, 9, 300, 1e-6).unwrap();
        assert_eq!(a, b);
        ents.reverse();
        let c = kmeans_fit(&ents, EntityKind::Batter, 2, 9, 300, 1e-6).unwrap();
        assert_eq!(a.assignments, c.assignments);
    }

    #[test]
    fn inertia_trace_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<(String, Vec<f64>)> = (0..1000)
            .map(|i| {
                (
                    format!("e{i:04}"),
                    (0..6).map(|_| rng.random::<f64>() * 100.0).collect(),
                )
            })
            .collect();
        let model = kmeans_fit(&pts, EntityKind::Bowler, 4, 11, 300, 1e-9).unwrap();
        assert!(model.inertia_trace.len() > 1);
        for w in model.inertia_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "inertia increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn assign_breaks_ties_toward_lowest_cluster() {
        let pts = vec![
            ("a".to_owned(), vec![0.0]),
            ("b".to_owned(), vec![10.0]),
        ];
        let model = kmeans_fit(&pts, EntityKind::Team, 2, 0, 300, 1e-6).unwrap();
        // The midpoint is equidistant from both centroids.
        assert_eq!(model.assign(&[5.0]).unwrap(), 1);
        assert_eq!(model.assign(&[0.0]).unwrap(), model.assignments["a"]);
    }

    #[test]
    fn assign_rejects_dimension_mismatch() {
        let pts = vec![
            ("a".to_owned(), vec![0.0, 1.0]),
            ("b".to_owned(), vec![10.0, 3.0]),
        ];
        let model = kmeans_fit(&pts, EntityKind::Team, 2, 0, 300, 1e-6).unwrap();
        assert!(model.assign(&[5.0]).is_err());
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pts: Vec<(String, Vec<f64>)> = (0..40)
            .map(|i| {
                (
                    format!("e{i:02}"),
                    (0..5).map(|_| rng.random::<f64>() * 7.3).collect(),
                )
            })
            .collect();
        let model = kmeans_fit(&pts, EntityKind::Batter, 3, 21, 300, 1e-6).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: ClusterModel = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);
        // Bit-exact centroids after the round trip.
        for (a, b) in model.centroids.iter().flatten().zip(back.centroids.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn dummy_cluster_iff_empty_history() {
        use crate::data::PlayerId;
        use crate::features::{BatterFeatures, BowlerFeatures, TeamFeatures};

        let teams: Vec<TeamFeatures> = (0..4)
            .map(|i| TeamFeatures {
                team: TeamId::new(format!("T{i}")),
                opponents: Vec::new(),
                values: vec![i as f64 * 10.0, 1.0],
                missing_cells: Vec::new(),
            })
            .collect();
        let batters: Vec<BatterFeatures> = (0..8)
            .map(|i| BatterFeatures {
                player: PlayerId::new(format!("P{i}")),
                values: vec![i as f64, (i * i) as f64],
                never_batted: i % 2 == 0,
            })
            .collect();
        let bowlers: Vec<BowlerFeatures> = (0..8)
            .map(|i| BowlerFeatures {
                player: PlayerId::new(format!("P{i}")),
                values: vec![(8 - i) as f64, 1.0],
                never_bowled: i >= 6,
            })
            .collect();
        let cfg = KmeansConfig {
            k_teams: 2,
            k_batters: 2,
            k_bowlers: 2,
            ..KmeansConfig::default()
        };
        let bundle = cluster_all(&teams, &batters, &bowlers, &cfg).unwrap();
        for b in &batters {
            let c = bundle.batters.assignments[b.player.as_str()];
            assert_eq!(c == DUMMY_CLUSTER, b.never_batted, "{}", b.player);
        }
        for b in &bowlers {
            let c = bundle.bowlers.assignments[b.player.as_str()];
            assert_eq!(c == DUMMY_CLUSTER, b.never_bowled, "{}", b.player);
        }
    }

    #[test]
    fn all_empty_histories_all_dummy() {
        use crate::data::PlayerId;
        use crate::features::{BatterFeatures, TeamFeatures};
        let teams: Vec<TeamFeatures> = (0..3)
            .map(|i| TeamFeatures {
                team: TeamId::new(format!("T{i}")),
                opponents: Vec::new(),
                values: vec![i as f64],
                missing_cells: Vec::new(),
            })
            .collect();
        let batters: Vec<BatterFeatures> = (0..5)
            .map(|i| BatterFeatures {
                player: PlayerId::new(format!("P{i}")),
                values: vec![0.0, 0.0],
                never_batted: true,
            })
            .collect();
        let cfg = KmeansConfig { k_teams: 3, ..KmeansConfig::default() };
        let bundle = cluster_all(&teams, &batters, &[], &cfg).unwrap();
        assert!(bundle
            .batters
            .assignments
            .values()
            .all(|c| *c == DUMMY_CLUSTER));
    }
}
