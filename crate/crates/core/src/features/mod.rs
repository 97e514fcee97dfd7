//! Feature embeddings: teams, batters, bowlers, and match stages.

mod history;
mod io;
mod player;
mod stage;
mod team;

pub use io::{
    read_batter_features, read_bowler_features, read_team_features, write_batter_features,
    write_bowler_features, write_team_features,
};
pub use history::{
    batting_history, bowling_history, team_history, BattingInnings, BowlingInnings,
    TeamMatchOutcome,
};
pub use player::{
    batter_feature_names, bowler_feature_names, build_batter_features, build_bowler_features,
    scenario_count, scenario_index, BatterFeatures, BinEdges, BowlerFeatures, PlayerBins,
    TeamClusters,
};
pub use stage::{
    build_stage_vectors, StageBuilder, StageVector, BOWLER_OVER_LIMIT, CLUSTER_SLOTS,
};
pub use team::{
    build_all_team_features, build_team_features, team_cell_index, team_feature_names,
    TeamFeatures, TEAM_PARAMS_PER_CELL,
};
