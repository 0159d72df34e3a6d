//! Seeded synthetic reference data and queries.
//!
//! [`tiny_case`] draws small single-destination cases whose assembly space
//! is cheap to enumerate. [`world`] builds a multi-city bundle with a
//! query set whose budgets are always attainable.

use std::collections::BTreeSet;

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::ids;
use crate::model::{
    Accommodation, Attraction, ClockTime, Flight, GroundMode, GroundRoute, HouseRule, ReferenceBundle, Restaurant,
    RoomType, Split, TransportPref, TravelQuery,
};
use crate::money::Money;
use crate::solver::space::{route_labels, Space};
use crate::solver::{solve, Objective, SearchConfig};

const CITIES: [&str; 8] = [
    "Ashford",
    "Brookvale",
    "Cedar Falls",
    "Dunmore",
    "Eastwick",
    "Fairhaven",
    "Glenrock",
    "Harbor City",
];
const CUISINES: [&str; 6] = ["Italian", "Mexican", "Chinese", "Indian", "French", "Thai"];
const RESTAURANTS: [&str; 8] = [
    "Blue Door",
    "Copper Pot",
    "Saffron House",
    "Little Fig",
    "Olive Tree",
    "Night Market",
    "Corner Deli",
    "Red Lantern",
];
const HOTELS: [&str; 6] = ["Maple Inn", "Harbor Suites", "Pine Lodge", "City Loft", "Garden Rooms", "Station Hostel"];
const SIGHTS: [&str; 6] = ["Old Mill", "River Walk", "Art Museum", "Botanical Garden", "Clock Tower", "History Center"];

fn base_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2025, 3, 1).expect("valid date")
}

fn dollars(rng: &mut impl Rng, lo: i64, hi: i64) -> Money {
    Money::from_dollars(rng.gen_range(lo..=hi))
}

fn clock(rng: &mut impl Rng) -> (ClockTime, ClockTime) {
    let dep = rng.gen_range(6 * 60..20 * 60);
    let arr = dep + rng.gen_range(45..240);
    let t = |m: u16| ClockTime::new((m / 60) % 24, m % 60).expect("valid time");
    (t(dep), t(arr))
}

fn accommodation(rng: &mut impl Rng, name: &str, city: &str, easy: bool) -> Accommodation {
    let offered = [RoomType::EntireRoom, RoomType::PrivateRoom, RoomType::SharedRoom];
    Accommodation {
        name: name.to_string(),
        city: city.to_string(),
        price: dollars(rng, 50, 260),
        room_type: *offered.choose(rng).expect("non-empty"),
        house_rules: HouseRule::ALL.into_iter().filter(|_| rng.gen_bool(0.2)).collect(),
        minimum_nights: if easy { 1 } else { *[1, 1, 1, 2, 2, 3].choose(rng).expect("non-empty") },
        maximum_occupancy: rng.gen_range(1..=4),
    }
}

fn restaurant(rng: &mut impl Rng, name: &str, city: &str, pool: &[&str]) -> Restaurant {
    let n = rng.gen_range(1..=2);
    Restaurant {
        name: name.to_string(),
        city: city.to_string(),
        average_cost: dollars(rng, 8, 60),
        cuisines: pool.choose_multiple(rng, n).map(|c| c.to_string()).collect(),
    }
}

fn preferences(rng: &mut impl Rng, q: &mut TravelQuery, cuisine_pool: &[&str]) {
    q.house_rules = HouseRule::ALL.into_iter().filter(|_| rng.gen_bool(0.2)).collect();
    if rng.gen_bool(0.3) {
        q.room_types.insert(*RoomType::ALL.choose(rng).expect("non-empty"));
    }
    if rng.gen_bool(0.3) {
        let n = rng.gen_range(1..=2);
        q.cuisines = cuisine_pool.choose_multiple(rng, n).map(|c| c.to_string()).collect();
    }
    if rng.gen_bool(0.2) {
        q.transport_prefs
            .insert(if rng.gen_bool(0.5) { TransportPref::NoFlight } else { TransportPref::NoSelfDriving });
    }
}

fn tiny_draw(rng: &mut impl Rng) -> (TravelQuery, ReferenceBundle) {
    let cities: Vec<&str> = CITIES.choose_multiple(rng, 3).copied().collect();
    let (o, d, other) = (cities[0], cities[1], cities[2]);
    let start = base_date() + Days::new(rng.gen_range(0..3));
    let mut b = ReferenceBundle::default();
    let mut fid = 0;
    let mut flight = |rng: &mut ChaCha8Rng, b: &mut ReferenceBundle, from: &str, to: &str, date: NaiveDate| {
        fid += 1;
        let (departure, arrival) = clock(rng);
        b.flights.push(Flight {
            flight_id: format!("F{fid:03}"),
            origin: from.to_string(),
            destination: to.to_string(),
            departure,
            arrival,
            price: dollars(rng, 60, 400),
            date,
        });
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    for (from, to, day) in [(o, d, 0u64), (d, o, 2)] {
        let n_flights = if local.gen_bool(0.1) { 0 } else { local.gen_range(1..=2) };
        for _ in 0..n_flights {
            flight(&mut local, &mut b, from, to, start + Days::new(day));
        }
        if local.gen_bool(0.3) {
            flight(&mut local, &mut b, from, to, start + Days::new(1));
        }
        for mode in [GroundMode::SelfDriving, GroundMode::Taxi] {
            if local.gen_bool(0.45) {
                let miles = local.gen_range(40..600) as f64;
                b.distances.push(GroundRoute {
                    origin: from.to_string(),
                    destination: to.to_string(),
                    mode,
                    distance_miles: miles,
                    duration_minutes: (miles * 1.2) as u32,
                    cost: Money::from_dollars((miles * if mode == GroundMode::Taxi { 1.0 } else { 0.2 }) as i64),
                });
            }
        }
    }
    if local.gen_bool(0.3) {
        flight(&mut local, &mut b, o, other, start);
    }
    let n_acc = if local.gen_bool(0.04) { 0 } else { local.gen_range(1..=2) };
    for name in HOTELS.choose_multiple(&mut local, n_acc + 1).take(n_acc) {
        b.accommodations.push(accommodation(&mut local, name, d, false));
    }
    if local.gen_bool(0.3) {
        b.accommodations.push(accommodation(&mut local, HOTELS[0], o, false));
    }
    let pool = &CUISINES[..4];
    let n_d = if local.gen_bool(0.15) { 2 } else { 3 };
    let n_o = local.gen_range(0..=1);
    let names: Vec<&str> = RESTAURANTS.choose_multiple(&mut local, 4).copied().collect();
    for name in &names[..n_d] {
        b.restaurants.push(restaurant(&mut local, name, d, pool));
    }
    for name in &names[..n_o] {
        b.restaurants.push(restaurant(&mut local, name, o, pool));
    }
    for (city, n) in [(d, local.gen_range(0..=2)), (o, local.gen_range(0..=1))] {
        for name in SIGHTS.choose_multiple(&mut local, n) {
            b.attractions.push(Attraction {
                name: name.to_string(),
                city: city.to_string(),
            });
        }
    }
    let mut q = TravelQuery {
        id: format!("tiny-{:08x}", local.gen::<u32>()),
        origin: o.to_string(),
        destinations: vec![d.to_string()],
        start_date: start,
        n_days: 3,
        n_people: local.gen_range(1..=4),
        budget: dollars(&mut local, 500, 3000),
        house_rules: BTreeSet::new(),
        room_types: BTreeSet::new(),
        cuisines: BTreeSet::new(),
        transport_prefs: BTreeSet::new(),
        split: Split::Train,
    };
    preferences(&mut local, &mut q, pool);
    (q, b)
}

/// A random three-day, one-destination case whose full assembly space
/// (attraction choices included) has at most `cap` members. Oversized
/// draws are shrunk by dropping optional rows rather than redrawn, so
/// small spaces are not over-represented.
pub fn tiny_case(rng: &mut impl Rng, cap: u128) -> (TravelQuery, ReferenceBundle) {
    let (q, mut b) = tiny_draw(rng);
    while Space::new(&q, &b).full_product() > cap {
        let dest = &q.destinations[0];
        let d_restaurants = b.restaurants.iter().filter(|r| &r.city == dest).count();
        let mut tables = Vec::new();
        if !b.attractions.is_empty() {
            tables.push(0);
        }
        if b.restaurants.len() > d_restaurants {
            tables.push(1);
        }
        if b.flights.len() + b.distances.len() > 2 {
            tables.push(2);
        }
        if b.accommodations.len() > 1 {
            tables.push(3);
        }
        match tables.choose(rng) {
            Some(0) => {
                let i = rng.gen_range(0..b.attractions.len());
                b.attractions.remove(i);
            }
            Some(1) => {
                let i = b.restaurants.iter().position(|r| &r.city != dest).expect("origin row");
                b.restaurants.remove(i);
            }
            Some(2) => {
                let i = rng.gen_range(0..b.flights.len() + b.distances.len());
                if i < b.flights.len() {
                    b.flights.remove(i);
                } else {
                    b.distances.remove(i - b.flights.len());
                }
            }
            Some(_) => {
                b.accommodations.pop();
            }
            None => return tiny_case(rng, cap),
        }
    }
    (q, b)
}

/// A bundle plus queries over it.
#[derive(Debug, Clone)]
pub struct World {
    pub bundle: ReferenceBundle,
    pub queries: Vec<TravelQuery>,
}

fn world_bundle(rng: &mut ChaCha8Rng) -> ReferenceBundle {
    let mut b = ReferenceBundle::default();
    for city in CITIES {
        for (i, name) in HOTELS.choose_multiple(rng, 4).enumerate() {
            b.accommodations.push(accommodation(rng, name, city, i == 0));
        }
        for name in RESTAURANTS.choose_multiple(rng, 6) {
            b.restaurants.push(restaurant(rng, name, city, &CUISINES));
        }
        for name in SIGHTS.choose_multiple(rng, 4) {
            b.attractions.push(Attraction {
                name: name.to_string(),
                city: city.to_string(),
            });
        }
    }
    for (i, from) in CITIES.iter().enumerate() {
        for (j, to) in CITIES.iter().enumerate() {
            if i == j {
                continue;
            }
            let miles = (60 + (i.abs_diff(j) * 97 + (i * j) % 53) * 3) as f64;
            for mode in [GroundMode::SelfDriving, GroundMode::Taxi] {
                b.distances.push(GroundRoute {
                    origin: from.to_string(),
                    destination: to.to_string(),
                    mode,
                    distance_miles: miles,
                    duration_minutes: (miles * 1.1) as u32,
                    cost: Money::from_dollars((miles * if mode == GroundMode::Taxi { 1.1 } else { 0.25 }) as i64),
                });
            }
        }
    }
    b
}

fn add_flights(rng: &mut ChaCha8Rng, b: &mut ReferenceBundle, q: &TravelQuery) {
    for (i, cc) in route_labels(q).iter().enumerate() {
        let crate::model::CurrentCity::Travel { from, to } = cc else { continue };
        let date = q.date_of_day(i as u32 + 1).expect("trip dates are in range");
        for _ in 0..2 {
            let (departure, arrival) = clock(rng);
            let id = format!("F{:04}", b.flights.len() + 1);
            b.flights.push(Flight {
                flight_id: id,
                origin: from.clone(),
                destination: to.clone(),
                departure,
                arrival,
                price: dollars(rng, 70, 420),
                date,
            });
        }
    }
}

fn cost_range(q: &TravelQuery, b: &ReferenceBundle) -> Option<(Money, Money)> {
    let free = SearchConfig::default().disable(ids::BUDGET);
    let lo = solve(q, b, &free).ok()?.cost;
    let hi = solve(q, b, &free.with_objective(Objective::MaxCost)).ok()?.cost;
    Some((lo, hi))
}

/// A multi-city world with `n_train` training and `n_validation`
/// validation queries. Every query is solvable and its budget lies
/// strictly below the cost of the most expensive feasible plan found.
pub fn world(seed: u64, n_train: usize, n_validation: usize) -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = world_bundle(&mut rng);
    let mut queries = Vec::new();
    for k in 0..n_train + n_validation {
        let (split, id) = if k < n_train {
            (Split::Train, format!("train-{:03}", k + 1))
        } else {
            (Split::Validation, format!("val-{:03}", k - n_train + 1))
        };
        let n_days = *[3u32, 3, 5, 5, 7].choose(&mut rng).expect("non-empty");
        let k_dest = (n_days as usize - 1) / 2;
        let cities: Vec<&str> = CITIES.choose_multiple(&mut rng, k_dest + 1).copied().collect();
        let mut q = TravelQuery {
            id,
            origin: cities[0].to_string(),
            destinations: cities[1..].iter().map(|c| c.to_string()).collect(),
            start_date: base_date() + Days::new(rng.gen_range(0..28)),
            n_days,
            n_people: rng.gen_range(1..=4),
            budget: Money::from_dollars(1_000_000),
            house_rules: BTreeSet::new(),
            room_types: BTreeSet::new(),
            cuisines: BTreeSet::new(),
            transport_prefs: BTreeSet::new(),
            split,
        };
        add_flights(&mut rng, &mut b, &q);
        let mut range = None;
        for attempt in 0..12 {
            q.house_rules.clear();
            q.room_types.clear();
            q.cuisines.clear();
            q.transport_prefs.clear();
            if attempt < 10 {
                preferences(&mut rng, &mut q, &CUISINES);
            }
            if attempt == 11 {
                q.n_people = 1;
            }
            match cost_range(&q, &b) {
                Some((lo, hi)) if hi > lo => {
                    range = Some((lo, hi));
                    break;
                }
                _ => {}
            }
        }
        let (lo, hi) = range.expect("a preference-free query over the world bundle is solvable");
        let span = (hi - lo).cents();
        let frac = rng.gen_range(30..=70);
        q.budget = lo + Money::from_cents(span * frac / 100);
        queries.push(q);
    }
    World { bundle: b, queries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_cases_respect_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (q, b) = tiny_case(&mut rng, 5_000);
            assert!(Space::new(&q, &b).full_product() <= 5_000);
            assert!(b.validate().is_empty());
            assert!(crate::model::validate_query(&q).is_empty());
        }
    }

    #[test]
    fn world_is_deterministic() {
        let a = world(11, 4, 1);
        let b = world(11, 4, 1);
        assert_eq!(a.queries, b.queries);
        assert_eq!(a.bundle, b.bundle);
        assert!(a.bundle.validate().is_empty());
        assert_eq!(a.queries.iter().filter(|q| q.split == Split::Train).count(), 4);
    }
}
