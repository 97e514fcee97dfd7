//! Ingestion: parsing, validation, over aggregation, and match preprocessing.

mod aggregate;
mod matches;
mod parse;
mod preprocess;
mod types;

pub use aggregate::{aggregate_overs, overs_total};
pub use matches::{build_match_data, build_matches, InningsData, MatchData};
pub use parse::{
    load_venue_map, parse_balls, parse_summaries, write_balls, write_summaries, VenueMap,
    BALL_HEADER, SUMMARY_HEADER,
};
pub use preprocess::{apply_band, preprocess_matches, InningsStats, PreprocessReport, SigmaBand};
pub use types::{
    BallEvent, BatterOverLine, BattingLine, BowlingFigure, Dismissal, DismissalKind, ExtrasKind,
    InningsTotal, MatchId, MatchSummary, OverRecord, PlayerId, TeamId, VenueClass, WicketEvent,
};

#[cfg(test)]
pub(crate) mod test_support {
    use super::types::*;

    /// Plain legal delivery with the given runs off the bat.
    pub fn ball(
        match_id: &str,
        innings: u8,
        over: u32,
        ball_in_over: u32,
        striker: &str,
        non_striker: &str,
        bowler: &str,
        runs: u32,
    ) -> BallEvent {
        BallEvent {
            match_id: MatchId::new(match_id),
            innings,
            over_index: over,
            ball_in_over,
            striker: PlayerId::new(striker),
            non_striker: PlayerId::new(non_striker),
            bowler: PlayerId::new(bowler),
            runs_off_bat: runs,
            extras_runs: 0,
            extras_kind: ExtrasKind::None,
            legal_delivery: true,
            dismissal: None,
        }
    }
}
