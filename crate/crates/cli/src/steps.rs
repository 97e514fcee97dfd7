//! Command implementations. Every command reads its inputs from files and
//! writes its outputs to files, so a `pipeline` run is exactly the same as
//! running the commands one after another.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use camp_core::cluster::{
    cluster_all, fit_team_model, ClusterBundle, ClusterModel,
};
use camp_core::config::RunConfig;
use camp_core::data::{
    build_matches, load_venue_map, parse_balls, parse_summaries, write_balls, write_summaries,
    MatchData, MatchId, MatchSummary, PlayerId, TeamId,
};
use camp_core::eval::{
    compare_methods, curve_mean, export_venue_distributions, mom_agreement, write_comparison,
    write_mae_report, write_venue_ecdf, write_venue_totals, AgreementReport,
};
use camp_core::features::{
    batting_history, bowling_history, build_all_team_features, build_batter_features,
    build_bowler_features, read_batter_features, read_bowler_features, read_team_features,
    team_history, write_batter_features, write_bowler_features, write_team_features,
    BatterFeatures, BowlerFeatures, TeamClusters, TeamFeatures,
};
use camp_core::lnc::{lnc_project_stage, lnc_rate_match, ResourceTable};
use camp_core::projection::{
    evaluate_models, forest_fit, read_examples, ridge_fit, write_examples, ForestModel, KnnModel,
    ModelKind, ProjectionModel, ProjectionReport, RidgeModel, TracePoint, TrainingExample,
};
use camp_core::scoring::{
    aggregate_series, camp_rate_match, read_ratings, write_ratings, write_series, InningsModels,
    RatingReport,
};
use camp_core::synth::{generate, write_truth};
use camp_core::Result;

use crate::fsio::{open_artifact, open_input, write_atomic};
use crate::manifest::write_manifest;

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> Self {
        let out = PathBuf::from(&cfg.paths.out_dir);
        Ctx { cfg, out }
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_buffered(&self, name: &str, build: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        build(&mut buf)?;
        write_atomic(&self.artifact(name), &buf)?;
        println!("wrote {}", self.artifact(name).display());
        Ok(())
    }

    fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<()> {
        self.write_buffered(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }
}

pub fn cmd_simulate(ctx: &Ctx) -> Result<()> {
    let gen_cfg = ctx.cfg.generator_config();
    let matches = generate(&gen_cfg)?;
    let balls: Vec<_> = matches.iter().flat_map(|m| m.balls.clone()).collect();
    let summaries: Vec<_> = matches.iter().map(|m| m.summary.clone()).collect();

    let mut buf = Vec::new();
    write_balls(&mut buf, &balls)?;
    write_atomic(Path::new(&ctx.cfg.paths.balls), &buf)?;
    println!("wrote {} ({} balls)", ctx.cfg.paths.balls, balls.len());

    let mut buf = Vec::new();
    write_summaries(&mut buf, &summaries)?;
    write_atomic(Path::new(&ctx.cfg.paths.summaries), &buf)?;
    println!("wrote {} ({} matches)", ctx.cfg.paths.summaries, summaries.len());

    ctx.write_buffered("truth.csv", |buf| write_truth(buf, &matches))?;
    write_manifest(&ctx.out, "simulate", &ctx.cfg)
}

pub fn cmd_ingest(ctx: &Ctx) -> Result<()> {
    let venue_map = match &ctx.cfg.paths.venue_map {
        Some(path) => Some(load_venue_map(open_input(Path::new(path))?)?),
        None => None,
    };
    let balls = parse_balls(open_input(Path::new(&ctx.cfg.paths.balls))?)?;
    let summaries = parse_summaries(
        open_input(Path::new(&ctx.cfg.paths.summaries))?,
        venue_map.as_ref(),
    )?;
    let matches = build_matches(summaries, &balls, ctx.cfg.scheduled_overs)?;
    let excluded: Vec<TeamId> = ctx.cfg.excluded_teams.iter().map(TeamId::new).collect();
    let (kept, report) = camp_core::data::preprocess_matches(matches, &excluded)?;

    let kept_ids: BTreeSet<&MatchId> = kept.iter().map(|m| &m.summary.match_id).collect();
    let mut canonical_balls: Vec<_> = balls
        .into_iter()
        .filter(|b| kept_ids.contains(&b.match_id))
        .collect();
    canonical_balls.sort_by(|a, b| {
        (&a.match_id, a.innings, a.over_index, a.ball_in_over).cmp(&(
            &b.match_id,
            b.innings,
            b.over_index,
            b.ball_in_over,
        ))
    });
    let canonical_summaries: Vec<MatchSummary> =
        kept.iter().map(|m| m.summary.clone()).collect();

    ctx.write_buffered("canonical_balls.csv", |buf| write_balls(buf, &canonical_balls))?;
    ctx.write_buffered("canonical_summaries.csv", |buf| {
        write_summaries(buf, &canonical_summaries)
    })?;
    ctx.write_json("preprocess_report.json", &report)?;
    println!(
        "kept {} of {} matches after preprocessing",
        report.n_after_filter, report.n_input
    );
    write_manifest(&ctx.out, "ingest", &ctx.cfg)
}

fn load_canonical(ctx: &Ctx) -> Result<Vec<MatchData>> {
    let balls = parse_balls(open_artifact(&ctx.artifact("canonical_balls.csv"), "ingest")?)?;
    let summaries = parse_summaries(
        open_artifact(&ctx.artifact("canonical_summaries.csv"), "ingest")?,
        None,
    )?;
    build_matches(summaries, &balls, ctx.cfg.scheduled_overs)
}

fn team_universe(matches: &[MatchData]) -> Vec<TeamId> {
    let set: BTreeSet<TeamId> = matches
        .iter()
        .flat_map(|m| [m.summary.team_a.clone(), m.summary.team_b.clone()])
        .collect();
    set.into_iter().collect()
}

fn all_players(matches: &[MatchData]) -> Vec<PlayerId> {
    let set: BTreeSet<PlayerId> = matches
        .iter()
        .flat_map(|m| m.all_players().cloned())
        .collect();
    set.into_iter().collect()
}

/// In-memory feature + cluster construction, shared by the file-backed
/// commands and the dataset checks.
pub fn build_features(
    matches: &[MatchData],
    cfg: &RunConfig,
) -> Result<(Vec<TeamFeatures>, Vec<BatterFeatures>, Vec<BowlerFeatures>)> {
    let universe = team_universe(matches);
    let teams = build_all_team_features(&universe, &team_history(matches))?;
    let team_model = fit_team_model(&teams, &cfg.kmeans_config())?;
    let team_clusters: TeamClusters = team_model
        .assignments
        .iter()
        .map(|(id, c)| (TeamId::new(id.clone()), *c))
        .collect();

    let bat_history = batting_history(matches);
    let bowl_history = bowling_history(matches);
    let players = all_players(matches);
    let mut batters = Vec::with_capacity(players.len());
    let mut bowlers = Vec::with_capacity(players.len());
    for p in &players {
        batters.push(build_batter_features(
            p,
            &bat_history,
            &team_clusters,
            cfg.clustering.k_teams,
            &cfg.bins,
        )?);
        bowlers.push(build_bowler_features(
            p,
            &bowl_history,
            &team_clusters,
            cfg.clustering.k_teams,
            &cfg.bins,
        )?);
    }
    Ok((teams, batters, bowlers))
}

pub fn cmd_features(ctx: &Ctx) -> Result<()> {
    let matches = load_canonical(ctx)?;
    let (teams, batters, bowlers) = build_features(&matches, &ctx.cfg)?;
    let k_teams = ctx.cfg.clustering.k_teams;
    ctx.write_buffered("team_features.csv", |buf| write_team_features(buf, &teams))?;
    ctx.write_buffered("batter_features.csv", |buf| {
        write_batter_features(buf, &batters, k_teams, &ctx.cfg.bins)
    })?;
    ctx.write_buffered("bowler_features.csv", |buf| {
        write_bowler_features(buf, &bowlers, k_teams, &ctx.cfg.bins)
    })?;
    write_manifest(&ctx.out, "features", &ctx.cfg)
}

pub fn cmd_cluster(ctx: &Ctx) -> Result<()> {
    let teams = read_team_features(open_artifact(&ctx.artifact("team_features.csv"), "features")?)?;
    let batters =
        read_batter_features(open_artifact(&ctx.artifact("batter_features.csv"), "features")?)?;
    let bowlers =
        read_bowler_features(open_artifact(&ctx.artifact("bowler_features.csv"), "features")?)?;
    let bundle = cluster_all(&teams, &batters, &bowlers, &ctx.cfg.kmeans_config())?;
    ctx.write_json("team_clusters.json", &bundle.teams)?;
    ctx.write_json("batter_clusters.json", &bundle.batters)?;
    ctx.write_json("bowler_clusters.json", &bundle.bowlers)?;
    write_manifest(&ctx.out, "cluster", &ctx.cfg)
}

fn load_cluster_bundle(ctx: &Ctx) -> Result<ClusterBundle> {
    let read = |name: &str| -> Result<ClusterModel> {
        Ok(serde_json::from_reader(open_artifact(
            &ctx.artifact(name),
            "cluster",
        )?)?)
    };
    Ok(ClusterBundle {
        teams: read("team_clusters.json")?,
        batters: read("batter_clusters.json")?,
        bowlers: read("bowler_clusters.json")?,
    })
}

pub fn cmd_project(ctx: &Ctx) -> Result<()> {
    let matches = load_canonical(ctx)?;
    let assignments = load_cluster_bundle(ctx)?.assignments();
    let examples = camp_core::projection::build_training_examples(
        &matches,
        &assignments,
        ctx.cfg.scheduled_overs,
    )?;
    ctx.write_buffered("training_examples.csv", |buf| write_examples(buf, &examples))?;

    let report = evaluate_models(
        &examples,
        &[ModelKind::Knn, ModelKind::Ridge, ModelKind::Forest],
        &ctx.cfg.eval_params(),
        ctx.cfg.scheduled_overs,
    )?;
    ctx.write_json("projection_report.json", &report)?;

    let by_innings = |innings: u8| -> Vec<TrainingExample> {
        examples.iter().filter(|e| e.innings == innings).cloned().collect()
    };
    match ctx.cfg.model {
        ModelKind::Ridge => {
            for innings in [1u8, 2] {
                let model = ridge_fit(&by_innings(innings), ctx.cfg.projection.lambda, innings)?;
                ctx.write_json(&format!("models/ridge_inn{innings}.json"), &model)?;
            }
        }
        ModelKind::Forest => {
            for innings in [1u8, 2] {
                let seed = camp_core::synth::derive_seed(ctx.cfg.forest_seed(), innings as u64);
                let model = forest_fit(&by_innings(innings), ctx.cfg.projection.forest, seed, innings)?;
                ctx.write_json(&format!("models/forest_inn{innings}.json"), &model)?;
            }
        }
        ModelKind::Knn => {} // the example store is the model
    }
    write_manifest(&ctx.out, "project", &ctx.cfg)
}

fn load_examples(ctx: &Ctx) -> Result<Vec<TrainingExample>> {
    read_examples(open_artifact(&ctx.artifact("training_examples.csv"), "project")?)
}

fn rating_models(ctx: &Ctx) -> Result<InningsModels> {
    let model_of = |innings: u8| -> Result<ProjectionModel> {
        match ctx.cfg.model {
            ModelKind::Knn => {
                let examples: Vec<TrainingExample> = load_examples(ctx)?
                    .into_iter()
                    .filter(|e| e.innings == innings)
                    .collect();
                Ok(ProjectionModel::Knn(KnnModel::fit(
                    examples,
                    innings,
                    ctx.cfg.knn_params(),
                )?))
            }
            ModelKind::Ridge => {
                let model: RidgeModel = serde_json::from_reader(open_artifact(
                    &ctx.artifact(&format!("models/ridge_inn{innings}.json")),
                    "project",
                )?)?;
                Ok(ProjectionModel::Ridge(model))
            }
            ModelKind::Forest => {
                let model: ForestModel = serde_json::from_reader(open_artifact(
                    &ctx.artifact(&format!("models/forest_inn{innings}.json")),
                    "project",
                )?)?;
                Ok(ProjectionModel::Forest(model))
            }
        }
    };
    Ok(InningsModels { first: model_of(1)?, second: model_of(2)? })
}

#[derive(serde::Serialize)]
struct RatingMeta {
    method: &'static str,
    model: String,
    w: f64,
    w_bat: f64,
    w_bowl: f64,
    n_matches: usize,
    leave_one_out: bool,
}

pub fn cmd_rate(ctx: &Ctx) -> Result<()> {
    let matches = load_canonical(ctx)?;
    let assignments = load_cluster_bundle(ctx)?.assignments();
    let models = rating_models(ctx)?;
    let mut reports = Vec::with_capacity(matches.len());
    for m in &matches {
        reports.push(camp_rate_match(
            m,
            &assignments,
            &models,
            &ctx.cfg.scoring,
            ctx.cfg.scheduled_overs,
        )?);
    }
    ctx.write_buffered("camp_ratings.csv", |buf| write_ratings(buf, &reports))?;
    ctx.write_buffered("camp_series.csv", |buf| {
        write_series(buf, &aggregate_series(&reports))
    })?;
    ctx.write_json(
        "camp_meta.json",
        &RatingMeta {
            method: "camp",
            model: ctx.cfg.model.as_str().to_owned(),
            w: ctx.cfg.scoring.w,
            w_bat: ctx.cfg.scoring.w_bat,
            w_bowl: ctx.cfg.scoring.w_bowl,
            n_matches: reports.len(),
            leave_one_out: ctx.cfg.leave_one_out,
        },
    )?;
    write_manifest(&ctx.out, "rate", &ctx.cfg)
}

fn load_resource_table(ctx: &Ctx) -> Result<ResourceTable> {
    match &ctx.cfg.paths.resource_table {
        Some(path) => ResourceTable::load(open_input(Path::new(path))?, path),
        None => Ok(ResourceTable::paper_default()),
    }
}

pub fn cmd_baseline(ctx: &Ctx) -> Result<()> {
    let matches = load_canonical(ctx)?;
    let table = load_resource_table(ctx)?;
    let mut reports = Vec::with_capacity(matches.len());
    for m in &matches {
        reports.push(lnc_rate_match(
            m,
            &table,
            &ctx.cfg.scoring,
            ctx.cfg.scheduled_overs,
            ctx.cfg.lnc_z,
        )?);
    }
    ctx.write_buffered("lnc_ratings.csv", |buf| write_ratings(buf, &reports))?;
    ctx.write_buffered("lnc_series.csv", |buf| {
        write_series(buf, &aggregate_series(&reports))
    })?;
    ctx.write_json(
        "lnc_meta.json",
        &RatingMeta {
            method: "lnc",
            model: "resource_table".to_owned(),
            w: ctx.cfg.scoring.w,
            w_bat: ctx.cfg.scoring.w_bat,
            w_bowl: ctx.cfg.scoring.w_bowl,
            n_matches: reports.len(),
            leave_one_out: false,
        },
    )?;
    write_manifest(&ctx.out, "baseline", &ctx.cfg)
}

#[derive(serde::Serialize)]
struct EvaluationSummary {
    n_matches: usize,
    agreement: AgreementReport,
    /// KS statistic between venue classes per innings.
    venue_ks: [Option<f64>; 2],
    /// Mean of populated per-over MAE cells, per model and innings.
    mae_means: BTreeMap<String, [Option<f64>; 2]>,
}

pub fn cmd_evaluate(ctx: &Ctx) -> Result<()> {
    let summaries = parse_summaries(
        open_artifact(&ctx.artifact("canonical_summaries.csv"), "ingest")?,
        None,
    )?;
    let camp_reports = read_ratings(
        open_artifact(&ctx.artifact("camp_ratings.csv"), "rate")?,
        "camp",
        &ctx.cfg.scoring,
    )?;
    let lnc_reports = read_ratings(
        open_artifact(&ctx.artifact("lnc_ratings.csv"), "baseline")?,
        "lnc",
        &ctx.cfg.scoring,
    )?;

    let summary_map: BTreeMap<MatchId, MatchSummary> = summaries
        .iter()
        .map(|s| (s.match_id.clone(), s.clone()))
        .collect();
    let by_method: BTreeMap<String, Vec<RatingReport>> = [
        ("camp".to_owned(), camp_reports.clone()),
        ("lnc".to_owned(), lnc_reports.clone()),
    ]
    .into();
    let agreement = mom_agreement(&by_method, &summary_map)?;
    ctx.write_json("agreement.json", &agreement)?;

    let comparison = compare_methods(&camp_reports, &lnc_reports)?;
    ctx.write_buffered("comparison.csv", |buf| write_comparison(buf, &comparison))?;

    // Projection error report with the baseline curve appended.
    let mut projection_report: ProjectionReport = serde_json::from_reader(open_artifact(
        &ctx.artifact("projection_report.json"),
        "project",
    )?)?;
    let examples = load_examples(ctx)?;
    let table = load_resource_table(ctx)?;
    let lnc_points: Vec<TracePoint> = examples
        .iter()
        .map(|e| {
            Ok(TracePoint {
                match_id: e.match_id.clone(),
                innings: e.innings,
                over: e.stage.over_index,
                predicted: lnc_project_stage(&table, &e.stage, ctx.cfg.lnc_z)?,
                actual: e.actual_remaining,
            })
        })
        .collect::<Result<_>>()?;
    projection_report.insert_curve("lnc", lnc_points);
    ctx.write_buffered("mae_report.csv", |buf| {
        write_mae_report(buf, &projection_report)
    })?;

    let dist = export_venue_distributions(&summaries);
    ctx.write_buffered("venue_totals.csv", |buf| write_venue_totals(buf, &dist))?;
    ctx.write_buffered("venue_ecdf.csv", |buf| write_venue_ecdf(buf, &dist))?;

    let mae_means: BTreeMap<String, [Option<f64>; 2]> = projection_report
        .curves
        .iter()
        .map(|(model, curves)| {
            (model.clone(), [curve_mean(&curves[0]), curve_mean(&curves[1])])
        })
        .collect();
    ctx.write_json(
        "evaluation_summary.json",
        &EvaluationSummary {
            n_matches: summaries.len(),
            agreement,
            venue_ks: dist.ks,
            mae_means,
        },
    )?;

    if let Some(dataset_dir) = ctx.cfg.with_dataset.clone() {
        let checks = dataset_checks(Path::new(&dataset_dir), &ctx.cfg)?;
        ctx.write_json("dataset_checks.json", &checks)?;
    }
    write_manifest(&ctx.out, "evaluate", &ctx.cfg)
}

pub fn cmd_pipeline(ctx: &Ctx) -> Result<()> {
    cmd_ingest(ctx)?;
    cmd_features(ctx)?;
    cmd_cluster(ctx)?;
    cmd_project(ctx)?;
    cmd_rate(ctx)?;
    cmd_baseline(ctx)?;
    cmd_evaluate(ctx)
}

/// Dataset-dependent reproduction checks, run fully in memory against an
/// external dataset directory holding `balls.csv`, `summaries.csv`, and
/// optionally `venue_map.json`.
#[derive(Debug, serde::Serialize)]
pub struct DatasetChecks {
    pub n_input: usize,
    pub n_after_filter: usize,
    pub first_innings_after: camp_core::data::InningsStats,
    pub second_innings_after: camp_core::data::InningsStats,
    pub mom_rank1_frac: f64,
    pub mom_top2_frac: f64,
    pub mom_top3_frac: f64,
}

pub fn dataset_checks(dir: &Path, cfg: &RunConfig) -> Result<DatasetChecks> {
    let venue_map_path = dir.join("venue_map.json");
    let venue_map = if venue_map_path.exists() {
        Some(load_venue_map(open_input(&venue_map_path)?)?)
    } else {
        None
    };
    let balls = parse_balls(open_input(&dir.join("balls.csv"))?)?;
    let summaries = parse_summaries(open_input(&dir.join("summaries.csv"))?, venue_map.as_ref())?;
    let matches = build_matches(summaries, &balls, cfg.scheduled_overs)?;
    let excluded: Vec<TeamId> = cfg.excluded_teams.iter().map(TeamId::new).collect();
    let (kept, report) = camp_core::data::preprocess_matches(matches, &excluded)?;

    let (teams, batters, bowlers) = build_features(&kept, cfg)?;
    let assignments = cluster_all(&teams, &batters, &bowlers, &cfg.kmeans_config())?.assignments();
    let examples = camp_core::projection::build_training_examples(
        &kept,
        &assignments,
        cfg.scheduled_overs,
    )?;
    let split = |innings: u8| -> Vec<TrainingExample> {
        examples.iter().filter(|e| e.innings == innings).cloned().collect()
    };
    let models = InningsModels {
        first: ProjectionModel::Knn(KnnModel::fit(split(1), 1, cfg.knn_params())?),
        second: ProjectionModel::Knn(KnnModel::fit(split(2), 2, cfg.knn_params())?),
    };
    let mut reports = Vec::with_capacity(kept.len());
    for m in &kept {
        reports.push(camp_rate_match(
            m,
            &assignments,
            &models,
            &cfg.scoring,
            cfg.scheduled_overs,
        )?);
    }
    let summary_map: BTreeMap<MatchId, MatchSummary> = kept
        .iter()
        .map(|m| (m.summary.match_id.clone(), m.summary.clone()))
        .collect();
    let by_method: BTreeMap<String, Vec<RatingReport>> =
        [("camp".to_owned(), reports)].into();
    let agreement = mom_agreement(&by_method, &summary_map)?;
    let pool = agreement.methods["camp"].winning_team;

    Ok(DatasetChecks {
        n_input: report.n_input,
        n_after_filter: report.n_after_filter,
        first_innings_after: report.after[0].clone(),
        second_innings_after: report.after[1].clone(),
        mom_rank1_frac: pool.frac_rank1,
        mom_top2_frac: pool.frac_top2,
        mom_top3_frac: pool.frac_top3,
    })
}
