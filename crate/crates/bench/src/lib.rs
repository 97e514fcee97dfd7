//! Shared fixtures for the benchmarks: deterministic synthetic datasets and
//! the feature/cluster scaffolding needed to exercise each model.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use camp_core::cluster::{cluster_all, fit_team_model, ClusterAssignments, KmeansConfig};
use camp_core::data::{MatchData, PlayerId, TeamId};
use camp_core::features::{
    batting_history, bowling_history, build_all_team_features, build_batter_features,
    build_bowler_features, team_history, PlayerBins, TeamClusters,
};
use camp_core::projection::{build_training_examples, TrainingExample};
use camp_core::synth::{generate_matches, GeneratorConfig};

pub fn synthetic_matches(seed: u64, n_matches: usize) -> Vec<MatchData> {
    generate_matches(&GeneratorConfig {
        seed,
        n_matches,
        ..GeneratorConfig::default()
    })
    .expect("generator config is valid")
}

pub fn assignments_for(matches: &[MatchData]) -> ClusterAssignments {
    let kmeans = KmeansConfig { seed: 17, ..KmeansConfig::default() };
    let mut universe: Vec<TeamId> = matches
        .iter()
        .flat_map(|m| [m.summary.team_a.clone(), m.summary.team_b.clone()])
        .collect();
    universe.sort();
    universe.dedup();
    let teams = build_all_team_features(&universe, &team_history(matches)).unwrap();
    let team_model = fit_team_model(&teams, &kmeans).unwrap();
    let team_clusters: TeamClusters = team_model
        .assignments
        .iter()
        .map(|(id, c)| (TeamId::new(id.clone()), *c))
        .collect();
    let bins = PlayerBins::default();
    let bat_history = batting_history(matches);
    let bowl_history = bowling_history(matches);
    let mut players: Vec<PlayerId> = matches.iter().flat_map(|m| m.all_players().cloned()).collect();
    players.sort();
    players.dedup();
    let batters: Vec<_> = players
        .iter()
        .map(|p| build_batter_features(p, &bat_history, &team_clusters, 3, &bins).unwrap())
        .collect();
    let bowlers: Vec<_> = players
        .iter()
        .map(|p| build_bowler_features(p, &bowl_history, &team_clusters, 3, &bins).unwrap())
        .collect();
    cluster_all(&teams, &batters, &bowlers, &kmeans).unwrap().assignments()
}

pub fn examples_for(matches: &[MatchData], assignments: &ClusterAssignments) -> Vec<TrainingExample> {
    build_training_examples(matches, assignments, 50).unwrap()
}

/// Random dense points for the clustering benchmark.
pub fn random_points(n: usize, dim: usize, seed: u64) -> Vec<(String, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            (
                format!("e{i:05}"),
                (0..dim).map(|_| rng.random::<f64>() * 100.0).collect(),
            )
        })
        .collect()
}
