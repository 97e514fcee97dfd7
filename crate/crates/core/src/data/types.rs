use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{CampError, Result};

macro_rules! id_newtype {
    ($name:ident) => {
        #[derive(
            Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

id_newtype!(MatchId);
id_newtype!(TeamId);
id_newtype!(PlayerId);

/// Match venues are split into two pitch-condition classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VenueClass {
    Asia,
    NonAsia,
}

impl VenueClass {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Asia" | "asia" => Some(VenueClass::Asia),
            "NonAsia" | "non_asia" | "nonasia" | "NonAsian" => Some(VenueClass::NonAsia),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            VenueClass::Asia => "Asia",
            VenueClass::NonAsia => "NonAsia",
        }
    }

    /// Index used in feature layouts: Asia = 0, NonAsia = 1.
    pub fn index(&self) -> usize {
        match self {
            VenueClass::Asia => 0,
            VenueClass::NonAsia => 1,
        }
    }
}

impl fmt::Display for VenueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrasKind {
    None,
    Wide,
    NoBall,
    Bye,
    LegBye,
}

impl ExtrasKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" | "" => Some(ExtrasKind::None),
            "wide" => Some(ExtrasKind::Wide),
            "no_ball" => Some(ExtrasKind::NoBall),
            "bye" => Some(ExtrasKind::Bye),
            "leg_bye" => Some(ExtrasKind::LegBye),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ExtrasKind::None => "none",
            ExtrasKind::Wide => "wide",
            ExtrasKind::NoBall => "no_ball",
            ExtrasKind::Bye => "bye",
            ExtrasKind::LegBye => "leg_bye",
        }
    }

    /// Wides and no-balls must be re-bowled; everything else is a legal delivery.
    pub fn implies_legal(&self) -> bool {
        !matches!(self, ExtrasKind::Wide | ExtrasKind::NoBall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DismissalKind {
    Bowled,
    Caught,
    Lbw,
    Stumped,
    HitWicket,
    RunOut,
    Retired,
    ObstructingField,
}

impl DismissalKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bowled" => Some(DismissalKind::Bowled),
            "caught" => Some(DismissalKind::Caught),
            "lbw" => Some(DismissalKind::Lbw),
            "stumped" => Some(DismissalKind::Stumped),
            "hit_wicket" => Some(DismissalKind::HitWicket),
            "run_out" => Some(DismissalKind::RunOut),
            "retired" => Some(DismissalKind::Retired),
            "obstructing_field" => Some(DismissalKind::ObstructingField),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DismissalKind::Bowled => "bowled",
            DismissalKind::Caught => "caught",
            DismissalKind::Lbw => "lbw",
            DismissalKind::Stumped => "stumped",
            DismissalKind::HitWicket => "hit_wicket",
            DismissalKind::RunOut => "run_out",
            DismissalKind::Retired => "retired",
            DismissalKind::ObstructingField => "obstructing_field",
        }
    }

    /// Whether the wicket counts toward the bowler's figures. Run-outs,
    /// retirements and obstruction do not.
    pub fn credits_bowler(&self) -> bool {
        matches!(
            self,
            DismissalKind::Bowled
                | DismissalKind::Caught
                | DismissalKind::Lbw
                | DismissalKind::Stumped
                | DismissalKind::HitWicket
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dismissal {
    pub kind: DismissalKind,
    pub player_out: PlayerId,
}

/// One delivery of a match, as parsed from the ball CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallEvent {
    pub match_id: MatchId,
    pub innings: u8,
    pub over_index: u32,
    pub ball_in_over: u32,
    pub striker: PlayerId,
    pub non_striker: PlayerId,
    pub bowler: PlayerId,
    pub runs_off_bat: u32,
    pub extras_runs: u32,
    pub extras_kind: ExtrasKind,
    pub legal_delivery: bool,
    pub dismissal: Option<Dismissal>,
}

impl BallEvent {
    pub fn total_runs(&self) -> u32 {
        self.runs_off_bat + self.extras_runs
    }

    pub fn validate(&self) -> Result<()> {
        if self.innings != 1 && self.innings != 2 {
            return Err(CampError::validation(format!(
                "field innings: expected 1 or 2, got {}",
                self.innings
            )));
        }
        if self.over_index < 1 || self.over_index > 50 {
            return Err(CampError::validation(format!(
                "field over: expected 1..=50, got {}",
                self.over_index
            )));
        }
        if self.ball_in_over < 1 {
            return Err(CampError::validation("field ball: must be >= 1"));
        }
        if self.legal_delivery != self.extras_kind.implies_legal() {
            return Err(CampError::validation(format!(
                "field legal: extras_kind {} requires legal={}",
                self.extras_kind.as_str(),
                self.extras_kind.implies_legal()
            )));
        }
        if self.extras_kind == ExtrasKind::Wide && self.runs_off_bat != 0 {
            return Err(CampError::validation(
                "field runs_off_bat: must be 0 on a wide",
            ));
        }
        if self.extras_kind == ExtrasKind::None && self.extras_runs != 0 {
            return Err(CampError::validation(
                "field extras_runs: must be 0 when extras_kind is none",
            ));
        }
        if matches!(self.extras_kind, ExtrasKind::Bye | ExtrasKind::LegBye)
            && self.runs_off_bat != 0
        {
            return Err(CampError::validation(format!(
                "field runs_off_bat: must be 0 on a {}",
                self.extras_kind.as_str()
            )));
        }
        if self.striker == self.non_striker {
            return Err(CampError::validation(
                "field non_striker: striker and non-striker are the same player",
            ));
        }
        if let Some(d) = &self.dismissal {
            // The batting side at this ball is exactly the pair at the crease.
            if d.player_out != self.striker && d.player_out != self.non_striker {
                return Err(CampError::validation(format!(
                    "field player_out: {} is not at the crease",
                    d.player_out
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InningsTotal {
    pub runs: u32,
    pub wickets: u32,
}

/// Match-level facts from the summary CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub match_id: MatchId,
    pub team_a: TeamId,
    pub team_b: TeamId,
    pub venue_class: VenueClass,
    pub bat_first: TeamId,
    pub innings_totals: [InningsTotal; 2],
    pub winner: TeamId,
    pub mom: PlayerId,
    pub date: String,
}

impl MatchSummary {
    /// Second-innings target: first-innings total plus one.
    pub fn target_runs(&self) -> u32 {
        self.innings_totals[0].runs + 1
    }

    pub fn batting_team(&self, innings: u8) -> &TeamId {
        if innings == 1 {
            &self.bat_first
        } else {
            self.other_team(&self.bat_first)
        }
    }

    pub fn bowling_team(&self, innings: u8) -> &TeamId {
        self.other_team(self.batting_team(innings))
    }

    pub fn other_team(&self, team: &TeamId) -> &TeamId {
        if *team == self.team_a {
            &self.team_b
        } else {
            &self.team_a
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.team_a == self.team_b {
            return Err(CampError::validation("field team_b: teams are identical"));
        }
        if self.bat_first != self.team_a && self.bat_first != self.team_b {
            return Err(CampError::validation(format!(
                "field bat_first: {} is not one of the playing teams",
                self.bat_first
            )));
        }
        if self.winner != self.team_a && self.winner != self.team_b {
            return Err(CampError::validation(format!(
                "field winner: {} is not one of the playing teams (no-result matches are rejected)",
                self.winner
            )));
        }
        if self.innings_totals[0].wickets > 10 || self.innings_totals[1].wickets > 10 {
            return Err(CampError::validation("field wickets: more than 10"));
        }
        if self.date.len() != 10 || !self.date.is_char_boundary(4) {
            return Err(CampError::validation(format!(
                "field date: expected YYYY-MM-DD, got {:?}",
                self.date
            )));
        }
        let bytes = self.date.as_bytes();
        let digits_ok = bytes
            .iter()
            .enumerate()
            .all(|(i, b)| if i == 4 || i == 7 { *b == b'-' } else { b.is_ascii_digit() });
        if !digits_ok {
            return Err(CampError::validation(format!(
                "field date: expected YYYY-MM-DD, got {:?}",
                self.date
            )));
        }
        Ok(())
    }
}

/// Per-batter line within one over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatterOverLine {
    pub player: PlayerId,
    pub runs: u32,
    pub legal_balls: u32,
}

/// One batter's full-innings line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BattingLine {
    pub player: PlayerId,
    pub runs: u32,
    pub balls: u32,
    /// Fours plus sixes.
    pub boundaries: u32,
    pub dismissed: bool,
}

/// One bowler's full-innings figures. Runs conceded follow the conventional
/// scorecard: off-the-bat runs plus wides and no-balls, byes and leg-byes
/// excluded. Wickets count bowler-credited dismissals only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BowlingFigure {
    pub player: PlayerId,
    pub balls: u32,
    pub runs_conceded: u32,
    pub wickets: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WicketEvent {
    pub kind: DismissalKind,
    pub player_out: PlayerId,
    pub bowler_credited: bool,
}

/// Ball events aggregated to the over level, the unit the rating pipeline
/// works on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverRecord {
    pub match_id: MatchId,
    pub innings: u8,
    pub over_index: u32,
    /// All runs in the over, extras included.
    pub runs_total: u32,
    /// Bye and leg-bye runs within `runs_total` (not conceded off the bat).
    pub bye_runs: u32,
    pub batter_lines: Vec<BatterOverLine>,
    pub wickets: Vec<WicketEvent>,
    pub bowler: PlayerId,
    pub legal_balls: u32,
    /// Set when the over has fewer than six legal deliveries but is not the
    /// final over of the innings.
    pub short_over_warning: bool,
}
