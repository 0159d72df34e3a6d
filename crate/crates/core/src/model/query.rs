use std::collections::BTreeSet;
use std::fmt;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use super::tags::{HouseRule, RoomType, TransportPref};
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

/// One user request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TravelQuery {
    pub id: String,
    pub origin: String,
    pub destinations: Vec<String>,
    pub start_date: NaiveDate,
    pub n_days: u32,
    pub n_people: u32,
    pub budget: Money,
    #[serde(default)]
    pub house_rules: BTreeSet<HouseRule>,
    #[serde(default)]
    pub room_types: BTreeSet<RoomType>,
    #[serde(default)]
    pub cuisines: BTreeSet<String>,
    #[serde(default)]
    pub transport_prefs: BTreeSet<TransportPref>,
    pub split: Split,
}

impl TravelQuery {
    /// Calendar date of the given 1-based trip day.
    pub fn date_of_day(&self, day: u32) -> Option<NaiveDate> {
        self.start_date
            .checked_add_days(Days::new(u64::from(day.checked_sub(1)?)))
    }

    pub fn has_hard_preferences(&self) -> bool {
        !(self.house_rules.is_empty()
            && self.room_types.is_empty()
            && self.cuisines.is_empty()
            && self.transport_prefs.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryViolation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for QueryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Returns every broken query invariant; empty means the query is valid.
pub fn validate_query(q: &TravelQuery) -> Vec<QueryViolation> {
    let mut out = Vec::new();
    let mut push = |field, message: String| out.push(QueryViolation { field, message });
    if q.id.trim().is_empty() {
        push("id", "id must not be empty".into());
    }
    if q.budget <= Money::ZERO {
        push("budget", "budget must be positive".into());
    }
    if q.n_people < 1 {
        push("n_people", "n_people must be at least 1".into());
    }
    if matches!(q.n_days, 3 | 5 | 7) {
        let expected = (q.n_days as usize - 1) / 2;
        if q.destinations.len() != expected {
            push(
                "destinations",
                format!("destinations count must be {expected}"),
            );
        }
    } else {
        push("n_days", "n_days must be 3, 5, or 7".into());
    }
    if q.destinations.iter().any(|d| d == &q.origin) {
        push("destinations", "origin must not be a destination".into());
    }
    out
}
