use std::collections::{BTreeSet, HashSet};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::plan::ClockTime;
use super::tags::{HouseRule, RoomType};
use crate::money::Money;

/// The five reference tables, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Flights,
    Distances,
    Accommodations,
    Restaurants,
    Attractions,
}

impl TableKind {
    pub const ALL: [TableKind; 5] = [
        TableKind::Flights,
        TableKind::Distances,
        TableKind::Accommodations,
        TableKind::Restaurants,
        TableKind::Attractions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Flights => "flights",
            TableKind::Distances => "distances",
            TableKind::Accommodations => "accommodations",
            TableKind::Restaurants => "restaurants",
            TableKind::Attractions => "attractions",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        TableKind::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(name.trim()))
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub flight_id: String,
    pub origin: String,
    pub destination: String,
    pub departure: ClockTime,
    pub arrival: ClockTime,
    /// Per person.
    pub price: Money,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundMode {
    SelfDriving,
    Taxi,
}

impl GroundMode {
    pub fn tag(self) -> &'static str {
        match self {
            GroundMode::SelfDriving => "self-driving",
            GroundMode::Taxi => "taxi",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "self-driving" => Some(GroundMode::SelfDriving),
            "taxi" => Some(GroundMode::Taxi),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundRoute {
    pub origin: String,
    pub destination: String,
    pub mode: GroundMode,
    pub distance_miles: f64,
    pub duration_minutes: u32,
    /// Per group.
    pub cost: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accommodation {
    pub name: String,
    pub city: String,
    /// Per room-night.
    pub price: Money,
    pub room_type: RoomType,
    /// Activities this accommodation prohibits.
    pub house_rules: BTreeSet<HouseRule>,
    pub minimum_nights: u32,
    pub maximum_occupancy: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restaurant {
    pub name: String,
    pub city: String,
    /// Per person per meal.
    pub average_cost: Money,
    pub cuisines: BTreeSet<String>,
}

impl Restaurant {
    pub fn serves(&self, cuisine: &str) -> bool {
        self.cuisines.iter().any(|c| c.eq_ignore_ascii_case(cuisine))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attraction {
    pub name: String,
    pub city: String,
}

/// The sandbox a plan must be drawn from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBundle {
    pub flights: Vec<Flight>,
    pub distances: Vec<GroundRoute>,
    pub accommodations: Vec<Accommodation>,
    pub restaurants: Vec<Restaurant>,
    pub attractions: Vec<Attraction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleViolation {
    pub table: TableKind,
    /// Zero-based row index within the table.
    pub row: usize,
    pub rule: String,
}

impl fmt::Display for BundleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} row {}: {}", self.table, self.row + 1, self.rule)
    }
}

impl ReferenceBundle {
    pub fn flight(&self, flight_id: &str) -> Option<&Flight> {
        self.flights.iter().find(|f| f.flight_id == flight_id)
    }

    pub fn ground_route(&self, origin: &str, destination: &str, mode: GroundMode) -> Option<&GroundRoute> {
        self.distances
            .iter()
            .find(|r| r.origin == origin && r.destination == destination && r.mode == mode)
    }

    pub fn accommodation(&self, name: &str, city: &str) -> Option<&Accommodation> {
        self.accommodations
            .iter()
            .find(|a| a.name == name && a.city == city)
    }

    pub fn restaurant(&self, name: &str, city: &str) -> Option<&Restaurant> {
        self.restaurants
            .iter()
            .find(|r| r.name == name && r.city == city)
    }

    pub fn attraction(&self, name: &str, city: &str) -> Option<&Attraction> {
        self.attractions
            .iter()
            .find(|a| a.name == name && a.city == city)
    }

    pub fn restaurants_in<'a>(&'a self, city: &'a str) -> impl Iterator<Item = &'a Restaurant> + 'a {
        self.restaurants.iter().filter(move |r| r.city == city)
    }

    pub fn accommodations_in<'a>(&'a self, city: &'a str) -> impl Iterator<Item = &'a Accommodation> + 'a {
        self.accommodations.iter().filter(move |a| a.city == city)
    }

    pub fn attractions_in<'a>(&'a self, city: &'a str) -> impl Iterator<Item = &'a Attraction> + 'a {
        self.attractions.iter().filter(move |a| a.city == city)
    }

    pub fn row_count(&self, table: TableKind) -> usize {
        match table {
            TableKind::Flights => self.flights.len(),
            TableKind::Distances => self.distances.len(),
            TableKind::Accommodations => self.accommodations.len(),
            TableKind::Restaurants => self.restaurants.len(),
            TableKind::Attractions => self.attractions.len(),
        }
    }

    /// Checks every table invariant. Row indices are zero-based.
    pub fn validate(&self) -> Vec<BundleViolation> {
        let mut out = Vec::new();
        let mut v = |table, row, rule: &str| {
            out.push(BundleViolation {
                table,
                row,
                rule: rule.to_string(),
            })
        };

        let mut seen = HashSet::new();
        for (i, f) in self.flights.iter().enumerate() {
            if f.price.is_negative() {
                v(TableKind::Flights, i, "price must be non-negative");
            }
            if !seen.insert(f.flight_id.as_str()) {
                v(TableKind::Flights, i, "duplicate flight_id");
            }
        }

        let mut seen = HashSet::new();
        for (i, r) in self.distances.iter().enumerate() {
            if r.cost.is_negative() {
                v(TableKind::Distances, i, "cost must be non-negative");
            }
            if !(r.distance_miles.is_finite() && r.distance_miles >= 0.0) {
                v(TableKind::Distances, i, "distance_miles must be non-negative");
            }
            if !seen.insert((r.origin.as_str(), r.destination.as_str(), r.mode)) {
                v(TableKind::Distances, i, "duplicate (origin, destination, mode)");
            }
        }

        let mut seen = HashSet::new();
        for (i, a) in self.accommodations.iter().enumerate() {
            if a.price.is_negative() {
                v(TableKind::Accommodations, i, "price must be non-negative");
            }
            if a.minimum_nights < 1 {
                v(TableKind::Accommodations, i, "minimum_nights must be at least 1");
            }
            if a.maximum_occupancy < 1 {
                v(TableKind::Accommodations, i, "maximum_occupancy must be at least 1");
            }
            if !seen.insert((a.name.as_str(), a.city.as_str())) {
                v(TableKind::Accommodations, i, "duplicate (name, city)");
            }
        }

        let mut seen = HashSet::new();
        for (i, r) in self.restaurants.iter().enumerate() {
            if r.average_cost.is_negative() {
                v(TableKind::Restaurants, i, "average_cost must be non-negative");
            }
            if !seen.insert((r.name.as_str(), r.city.as_str())) {
                v(TableKind::Restaurants, i, "duplicate (name, city)");
            }
        }

        let mut seen = HashSet::new();
        for (i, a) in self.attractions.iter().enumerate() {
            if !seen.insert((a.name.as_str(), a.city.as_str())) {
                v(TableKind::Attractions, i, "duplicate (name, city)");
            }
        }
        out
    }

    /// Keeps only rows touching the given cities; flights and routes must
    /// have both endpoints in the set.
    pub fn restricted_to(&self, cities: &BTreeSet<&str>) -> ReferenceBundle {
        let has = |c: &str| cities.contains(c);
        ReferenceBundle {
            flights: self
                .flights
                .iter()
                .filter(|f| has(&f.origin) && has(&f.destination))
                .cloned()
                .collect(),
            distances: self
                .distances
                .iter()
                .filter(|r| has(&r.origin) && has(&r.destination))
                .cloned()
                .collect(),
            accommodations: self.accommodations.iter().filter(|a| has(&a.city)).cloned().collect(),
            restaurants: self.restaurants.iter().filter(|r| has(&r.city)).cloned().collect(),
            attractions: self.attractions.iter().filter(|a| has(&a.city)).cloned().collect(),
        }
    }
}
