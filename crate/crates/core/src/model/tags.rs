use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} tag {value:?}")]
pub struct TagParseError {
    pub kind: &'static str,
    pub value: String,
}

/// An activity a party may need an accommodation to permit.
///
/// On a query the tag means the party brings it along (`pets`); on an
/// accommodation it is written as a prohibition (`no-pets`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HouseRule {
    Parties,
    Smoking,
    #[serde(rename = "children-under-10")]
    ChildrenUnder10,
    Pets,
    Visitors,
}

impl HouseRule {
    pub const ALL: [HouseRule; 5] = [
        HouseRule::Parties,
        HouseRule::Smoking,
        HouseRule::ChildrenUnder10,
        HouseRule::Pets,
        HouseRule::Visitors,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            HouseRule::Parties => "parties",
            HouseRule::Smoking => "smoking",
            HouseRule::ChildrenUnder10 => "children-under-10",
            HouseRule::Pets => "pets",
            HouseRule::Visitors => "visitors",
        }
    }

    pub fn prohibition_tag(self) -> String {
        format!("no-{}", self.tag())
    }

    /// Parses the accommodation-side form, `no-<tag>`.
    pub fn from_prohibition(s: &str) -> Result<Self, TagParseError> {
        s.trim()
            .strip_prefix("no-")
            .ok_or_else(|| TagParseError {
                kind: "house rule",
                value: s.to_string(),
            })?
            .parse()
    }
}

impl fmt::Display for HouseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for HouseRule {
    type Err = TagParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        HouseRule::ALL
            .into_iter()
            .find(|r| r.tag().eq_ignore_ascii_case(t))
            .ok_or_else(|| TagParseError {
                kind: "house rule",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoomType {
    EntireRoom,
    PrivateRoom,
    SharedRoom,
    NotSharedRoom,
}

impl RoomType {
    pub const ALL: [RoomType; 4] = [
        RoomType::EntireRoom,
        RoomType::PrivateRoom,
        RoomType::SharedRoom,
        RoomType::NotSharedRoom,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            RoomType::EntireRoom => "entire-room",
            RoomType::PrivateRoom => "private-room",
            RoomType::SharedRoom => "shared-room",
            RoomType::NotSharedRoom => "not-shared-room",
        }
    }

    /// Whether an accommodation of type `offered` satisfies a request for `self`.
    /// `not-shared-room` is satisfied by any room that is not shared.
    pub fn satisfied_by(self, offered: RoomType) -> bool {
        match self {
            RoomType::NotSharedRoom => offered != RoomType::SharedRoom,
            requested => requested == offered,
        }
    }
}

impl fmt::Display for RoomType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RoomType {
    type Err = TagParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        RoomType::ALL
            .into_iter()
            .find(|r| r.tag().eq_ignore_ascii_case(t))
            .ok_or_else(|| TagParseError {
                kind: "room type",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportPref {
    NoFlight,
    NoSelfDriving,
}

impl TransportPref {
    pub fn tag(self) -> &'static str {
        match self {
            TransportPref::NoFlight => "no-flight",
            TransportPref::NoSelfDriving => "no-self-driving",
        }
    }
}

impl fmt::Display for TransportPref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TransportPref {
    type Err = TagParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "no-flight" => Ok(TransportPref::NoFlight),
            "no-self-driving" => Ok(TransportPref::NoSelfDriving),
            _ => Err(TagParseError {
                kind: "transport preference",
                value: s.to_string(),
            }),
        }
    }
}
