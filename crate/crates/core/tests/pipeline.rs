//! End-to-end flow over the core APIs: generate, ingest, build features,
//! cluster, project, rate, evaluate.

use std::collections::BTreeMap;

use camp_core::cluster::{cluster_all, KmeansConfig, DUMMY_CLUSTER};
use camp_core::data::{MatchId, MatchSummary};
use camp_core::eval::{compare_methods, mom_agreement};
use camp_core::features::{
    batting_history, bowling_history, build_all_team_features, build_batter_features,
    build_bowler_features, team_history, PlayerBins, TeamClusters,
};
use camp_core::lnc::{lnc_rate_match, ResourceTable};
use camp_core::projection::{build_training_examples, KnnModel, KnnParams, ProjectionModel};
use camp_core::scoring::{camp_rate_match, InningsModels, RatingReport, ScoringParams};
use camp_core::synth::{generate_matches, GeneratorConfig};
use camp_core::data::{MatchData, PlayerId, TeamId};

struct Flow {
    matches: Vec<MatchData>,
    camp_reports: Vec<RatingReport>,
    lnc_reports: Vec<RatingReport>,
}

fn run_flow(seed: u64, n_matches: usize) -> Flow {
    let gen_cfg = GeneratorConfig {
        seed,
        n_matches,
        ..GeneratorConfig::default()
    };
    let matches = generate_matches(&gen_cfg).unwrap();

    let kmeans = KmeansConfig {
        seed: 99,
        ..KmeansConfig::default()
    };
    let universe: Vec<TeamId> = {
        let mut v: Vec<TeamId> = matches
            .iter()
            .flat_map(|m| [m.summary.team_a.clone(), m.summary.team_b.clone()])
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let teams = build_all_team_features(&universe, &team_history(&matches)).unwrap();
    let team_model = camp_core::cluster::fit_team_model(&teams, &kmeans).unwrap();
    let team_clusters: TeamClusters = team_model
        .assignments
        .iter()
        .map(|(id, c)| (TeamId::new(id.clone()), *c))
        .collect();

    let bins = PlayerBins::default();
    let bat_history = batting_history(&matches);
    let bowl_history = bowling_history(&matches);
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

    let bundle = cluster_all(&teams, &batters, &bowlers, &kmeans).unwrap();
    let assignments = bundle.assignments();

    let examples = build_training_examples(&matches, &assignments, 50).unwrap();
    let split = |innings: u8| -> Vec<_> {
        examples.iter().filter(|e| e.innings == innings).cloned().collect()
    };
    let models = InningsModels {
        first: ProjectionModel::Knn(KnnModel::fit(split(1), 1, KnnParams::default()).unwrap()),
        second: ProjectionModel::Knn(KnnModel::fit(split(2), 2, KnnParams::default()).unwrap()),
    };

    let params = ScoringParams::default();
    let table = ResourceTable::paper_default();
    let mut camp_reports = Vec::new();
    let mut lnc_reports = Vec::new();
    for m in &matches {
        camp_reports.push(camp_rate_match(m, &assignments, &models, &params, 50).unwrap());
        lnc_reports.push(lnc_rate_match(m, &table, &params, 50, 235.0).unwrap());
    }
    Flow {
        matches,
        camp_reports,
        lnc_reports,
    }
}

#[test]
fn full_flow_produces_consistent_reports() {
    let flow = run_flow(1234, 10);
    for (m, report) in flow.matches.iter().zip(&flow.camp_reports) {
        // Every ratings report covers all 22 observed players.
        assert_eq!(report.entries.len(), 22);
        let mut all: Vec<u32> = report.entries.iter().map(|e| e.rank_all22).collect();
        all.sort_unstable();
        assert_eq!(all, (1..=22).collect::<Vec<_>>());
        let mut winners: Vec<u32> = report.entries.iter().filter_map(|e| e.rank_winning11).collect();
        winners.sort_unstable();
        assert_eq!(winners, (1..=11).collect::<Vec<_>>());
        // Linearity of the net score.
        for e in &report.entries {
            assert_eq!(e.camp_score, e.c_bat + 0.2 * e.c_bowl);
        }
        assert_eq!(report.match_id, m.summary.match_id);
    }
}

#[test]
fn camp_and_lnc_reports_share_shape() {
    let flow = run_flow(777, 6);
    for (camp, lnc) in flow.camp_reports.iter().zip(&flow.lnc_reports) {
        assert_eq!(camp.entries.len(), lnc.entries.len());
        let ids = |r: &RatingReport| {
            let mut v: Vec<PlayerId> = r.entries.iter().map(|e| e.player.clone()).collect();
            v.sort();
            v
        };
        assert_eq!(ids(camp), ids(lnc));
    }
    let rows = compare_methods(&flow.camp_reports, &flow.lnc_reports).unwrap();
    assert_eq!(
        rows.len(),
        flow.camp_reports.iter().map(|r| r.entries.len()).sum::<usize>()
    );
}

#[test]
fn agreement_runs_over_both_methods() {
    let flow = run_flow(31415, 8);
    let summaries: BTreeMap<MatchId, MatchSummary> = flow
        .matches
        .iter()
        .map(|m| (m.summary.match_id.clone(), m.summary.clone()))
        .collect();
    let by_method: BTreeMap<String, Vec<RatingReport>> = [
        ("camp".to_owned(), flow.camp_reports.clone()),
        ("lnc".to_owned(), flow.lnc_reports.clone()),
    ]
    .into();
    let agreement = mom_agreement(&by_method, &summaries).unwrap();
    assert_eq!(agreement.n_matches, 8);
    for m in agreement.methods.values() {
        assert!(m.winning_team.rank1 <= m.winning_team.top2);
        assert!(m.winning_team.top2 <= m.winning_team.top3);
        assert!(m.all_players.top3 <= 8);
    }
}

#[test]
fn whole_flow_is_deterministic() {
    let a = run_flow(2020, 5);
    let b = run_flow(2020, 5);
    assert_eq!(a.camp_reports, b.camp_reports);
    assert_eq!(a.lnc_reports, b.lnc_reports);
}

#[test]
fn dummy_cluster_members_never_batted() {
    // The generator has every player bowl, but most never bat.
    let gen_cfg = GeneratorConfig {
        seed: 555,
        n_matches: 6,
        ..GeneratorConfig::default()
    };
    let matches = generate_matches(&gen_cfg).unwrap();
    let universe: Vec<TeamId> = {
        let mut v: Vec<TeamId> = matches
            .iter()
            .flat_map(|m| [m.summary.team_a.clone(), m.summary.team_b.clone()])
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let kmeans = KmeansConfig::default();
    let teams = build_all_team_features(&universe, &team_history(&matches)).unwrap();
    let team_model = camp_core::cluster::fit_team_model(&teams, &kmeans).unwrap();
    let team_clusters: TeamClusters = team_model
        .assignments
        .iter()
        .map(|(id, c)| (TeamId::new(id.clone()), *c))
        .collect();
    let bins = PlayerBins::default();
    let bat_history = batting_history(&matches);
    let mut players: Vec<PlayerId> = matches.iter().flat_map(|m| m.all_players().cloned()).collect();
    players.sort();
    players.dedup();
    let batters: Vec<_> = players
        .iter()
        .map(|p| build_batter_features(p, &bat_history, &team_clusters, 3, &bins).unwrap())
        .collect();
    let bowlers: Vec<_> = players
        .iter()
        .map(|p| {
            camp_core::features::build_bowler_features(
                p,
                &bowling_history(&matches),
                &team_clusters,
                3,
                &bins,
            )
            .unwrap()
        })
        .collect();
    let bundle = cluster_all(&teams, &batters, &bowlers, &kmeans).unwrap();
    for b in &batters {
        let assigned = bundle.batters.assignments[b.player.as_str()];
        assert_eq!(assigned == DUMMY_CLUSTER, b.never_batted);
    }
}
