use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::bundle::GroundMode;
use crate::money::Money;

/// Wall-clock time of day, `HH:MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockTime(u16);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid time {0:?}, expected HH:MM")]
pub struct ParseClockError(pub String);

impl ClockTime {
    pub fn new(hour: u16, minute: u16) -> Option<Self> {
        (hour < 24 && minute < 60).then_some(ClockTime(hour * 60 + minute))
    }

    pub fn minutes_since_midnight(self) -> u16 {
        self.0
    }

    /// Minutes from `self` until `later`, wrapping past midnight.
    pub fn minutes_until(self, later: ClockTime) -> u32 {
        let (a, b) = (u32::from(self.0), u32::from(later.0));
        if b >= a {
            b - a
        } else {
            b + 24 * 60 - a
        }
    }
}

impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

impl FromStr for ClockTime {
    type Err = ParseClockError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseClockError(s.to_string());
        let (h, m) = s.trim().split_once(':').ok_or_else(err)?;
        if h.is_empty() || h.len() > 2 || m.len() != 2 {
            return Err(err());
        }
        let h: u16 = h.parse().map_err(|_| err())?;
        let m: u16 = m.parse().map_err(|_| err())?;
        ClockTime::new(h, m).ok_or_else(err)
    }
}

impl Serialize for ClockTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClockTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A named item located in a city, written `Name, City`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Place {
    pub name: String,
    pub city: String,
}

impl Place {
    pub fn new(name: impl Into<String>, city: impl Into<String>) -> Self {
        Place {
            name: name.into(),
            city: city.into(),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.name, self.city)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurrentCity {
    Stay(String),
    Travel { from: String, to: String },
}

impl CurrentCity {
    pub fn is_travel(&self) -> bool {
        matches!(self, CurrentCity::Travel { .. })
    }

    /// Cities where meals and attractions may be located on this day.
    pub fn cities(&self) -> Vec<&str> {
        match self {
            CurrentCity::Stay(c) => vec![c.as_str()],
            CurrentCity::Travel { from, to } => vec![from.as_str(), to.as_str()],
        }
    }

    pub fn contains(&self, city: &str) -> bool {
        match self {
            CurrentCity::Stay(c) => c == city,
            CurrentCity::Travel { from, to } => from == city || to == city,
        }
    }

    /// Where the traveller sleeps at the end of the day.
    pub fn end_city(&self) -> &str {
        match self {
            CurrentCity::Stay(c) => c,
            CurrentCity::Travel { to, .. } => to,
        }
    }
}

impl fmt::Display for CurrentCity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurrentCity::Stay(c) => f.write_str(c),
            CurrentCity::Travel { from, to } => write!(f, "from {from} to {to}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportMode {
    Flight,
    SelfDriving,
    Taxi,
}

impl From<GroundMode> for TransportMode {
    fn from(m: GroundMode) -> Self {
        match m {
            GroundMode::SelfDriving => TransportMode::SelfDriving,
            GroundMode::Taxi => TransportMode::Taxi,
        }
    }
}

/// One transportation leg as stated in a plan. The stated cost is
/// informational; costing always uses the reference price.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Leg {
    Flight {
        flight_id: String,
        origin: String,
        destination: String,
        departure: ClockTime,
        arrival: ClockTime,
        cost: Money,
    },
    Ground {
        ground_mode: GroundMode,
        origin: String,
        destination: String,
        duration_minutes: u32,
        cost: Money,
    },
}

impl Leg {
    pub fn mode(&self) -> TransportMode {
        match self {
            Leg::Flight { .. } => TransportMode::Flight,
            Leg::Ground { ground_mode, .. } => (*ground_mode).into(),
        }
    }

    pub fn origin(&self) -> &str {
        match self {
            Leg::Flight { origin, .. } | Leg::Ground { origin, .. } => origin,
        }
    }

    pub fn destination(&self) -> &str {
        match self {
            Leg::Flight { destination, .. } | Leg::Ground { destination, .. } => destination,
        }
    }

    pub fn stated_cost(&self) -> Money {
        match self {
            Leg::Flight { cost, .. } | Leg::Ground { cost, .. } => *cost,
        }
    }

    pub fn duration_minutes(&self) -> u32 {
        match self {
            Leg::Flight { departure, arrival, .. } => departure.minutes_until(*arrival),
            Leg::Ground { duration_minutes, .. } => *duration_minutes,
        }
    }

    pub fn flight_id(&self) -> Option<&str> {
        match self {
            Leg::Flight { flight_id, .. } => Some(flight_id),
            Leg::Ground { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DayEntry {
    pub day: u32,
    pub current_city: CurrentCity,
    pub transportation: Option<Leg>,
    pub breakfast: Option<Place>,
    pub attraction: Option<Place>,
    pub lunch: Option<Place>,
    pub dinner: Option<Place>,
    pub accommodation: Option<Place>,
}

impl DayEntry {
    pub fn new(day: u32, current_city: CurrentCity) -> Self {
        DayEntry {
            day,
            current_city,
            transportation: None,
            breakfast: None,
            attraction: None,
            lunch: None,
            dinner: None,
            accommodation: None,
        }
    }

    /// Breakfast, lunch and dinner slots in order.
    pub fn meals(&self) -> [(&'static str, Option<&Place>); 3] {
        [
            ("breakfast", self.breakfast.as_ref()),
            ("lunch", self.lunch.as_ref()),
            ("dinner", self.dinner.as_ref()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plan {
    pub query_id: String,
    pub days: Vec<DayEntry>,
}

impl Plan {
    /// Whether days are numbered 1..=n without gaps.
    pub fn days_contiguous(&self) -> bool {
        self.days
            .iter()
            .enumerate()
            .all(|(i, d)| d.day as usize == i + 1)
    }

    pub fn legs(&self) -> impl Iterator<Item = (u32, &Leg)> {
        self.days
            .iter()
            .filter_map(|d| d.transportation.as_ref().map(|l| (d.day, l)))
    }

    pub fn meals(&self) -> impl Iterator<Item = (u32, &'static str, &Place)> {
        self.days.iter().flat_map(|d| {
            d.meals()
                .into_iter()
                .filter_map(move |(slot, m)| m.map(|p| (d.day, slot, p)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_parsing() {
        assert_eq!("08:05".parse::<ClockTime>().unwrap().to_string(), "08:05");
        assert_eq!("8:05".parse::<ClockTime>().unwrap().to_string(), "08:05");
        assert!("24:00".parse::<ClockTime>().is_err());
        assert!("12:7".parse::<ClockTime>().is_err());
    }

    #[test]
    fn overnight_flight_duration() {
        let dep = ClockTime::new(23, 0).unwrap();
        let arr = ClockTime::new(1, 30).unwrap();
        assert_eq!(dep.minutes_until(arr), 150);
    }

    #[test]
    fn current_city_cities() {
        let t = CurrentCity::Travel {
            from: "A".into(),
            to: "B".into(),
        };
        assert_eq!(t.to_string(), "from A to B");
        assert!(t.contains("A") && t.contains("B") && !t.contains("C"));
        assert_eq!(t.end_city(), "B");
    }
}
