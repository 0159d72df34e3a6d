use std::collections::{BTreeMap, HashSet};

use super::{Category, ConstraintDescriptor, ConstraintOutcome, Evidence};
use crate::model::{
    plan_cost_breakdown, CurrentCity, Leg, Place, Plan, ReferenceBundle, TransportMode, TransportPref, TravelQuery,
};

pub mod ids {
    pub const WITHIN_SANDBOX: &str = "within-sandbox";
    pub const COMPLETE_INFORMATION: &str = "complete-information";
    pub const WITHIN_CURRENT_CITY: &str = "within-current-city";
    pub const REASONABLE_CITY_ROUTE: &str = "reasonable-city-route";
    pub const DIVERSE_RESTAURANTS: &str = "diverse-restaurants";
    pub const DIVERSE_ATTRACTIONS: &str = "diverse-attractions";
    pub const NO_CONFLICTING_TRANSPORTATION: &str = "no-conflicting-transportation";
    pub const MINIMUM_NIGHTS_STAY: &str = "minimum-nights-stay";
    pub const BUDGET: &str = "budget";
    pub const ROOM_RULES: &str = "room-rules";
    pub const ROOM_TYPE: &str = "room-type";
    pub const CUISINE: &str = "cuisine";
    pub const TRANSPORTATION_PREFERENCE: &str = "transportation-preference";
}

fn always(_: &TravelQuery) -> bool {
    true
}

/// The full catalogue in its fixed order: eight commonsense checkers, then
/// five hard ones.
pub static CATALOGUE: [ConstraintDescriptor; 13] = [
    ConstraintDescriptor {
        id: ids::WITHIN_SANDBOX,
        category: Category::Commonsense,
        rule_template: "Use only flights, ground routes, restaurants, attractions and accommodations that appear in the reference data, each in the city it is listed under.",
        applicable: always,
        check: within_sandbox,
    },
    ConstraintDescriptor {
        id: ids::COMPLETE_INFORMATION,
        category: Category::Commonsense,
        rule_template: "Give transportation on every travel day and only on travel days, an accommodation on every day except the last, and breakfast, lunch and dinner on every day spent in a single city.",
        applicable: always,
        check: complete_information,
    },
    ConstraintDescriptor {
        id: ids::WITHIN_CURRENT_CITY,
        category: Category::Commonsense,
        rule_template: "Meals and attractions must be in the day's current city (either city on a travel day), transportation must match the day's travel, and each accommodation must be in the city where the day ends.",
        applicable: always,
        check: within_current_city,
    },
    ConstraintDescriptor {
        id: ids::REASONABLE_CITY_ROUTE,
        category: Category::Commonsense,
        rule_template: "Start in {origin}, visit {route} in that order, and return to {origin} on day {n_days}.",
        applicable: always,
        check: reasonable_city_route,
    },
    ConstraintDescriptor {
        id: ids::DIVERSE_RESTAURANTS,
        category: Category::Commonsense,
        rule_template: "Do not eat at the same restaurant more than once during the trip.",
        applicable: always,
        check: diverse_restaurants,
    },
    ConstraintDescriptor {
        id: ids::DIVERSE_ATTRACTIONS,
        category: Category::Commonsense,
        rule_template: "Do not visit the same attraction on more than one day.",
        applicable: always,
        check: diverse_attractions,
    },
    ConstraintDescriptor {
        id: ids::NO_CONFLICTING_TRANSPORTATION,
        category: Category::Commonsense,
        rule_template: "Do not combine flights and self-driving in the same trip.",
        applicable: always,
        check: no_conflicting_transportation,
    },
    ConstraintDescriptor {
        id: ids::MINIMUM_NIGHTS_STAY,
        category: Category::Commonsense,
        rule_template: "Stay at each accommodation for at least its minimum number of consecutive nights.",
        applicable: always,
        check: minimum_nights_stay,
    },
    ConstraintDescriptor {
        id: ids::BUDGET,
        category: Category::Hard,
        rule_template: "Total plan cost must not exceed ${budget}.",
        applicable: always,
        check: budget,
    },
    ConstraintDescriptor {
        id: ids::ROOM_RULES,
        category: Category::Hard,
        rule_template: "Every booked accommodation must allow {house_rules}.",
        applicable: |q| !q.house_rules.is_empty(),
        check: room_rules,
    },
    ConstraintDescriptor {
        id: ids::ROOM_TYPE,
        category: Category::Hard,
        rule_template: "Book at least one accommodation of each requested room type: {room_types}.",
        applicable: |q| !q.room_types.is_empty(),
        check: room_type,
    },
    ConstraintDescriptor {
        id: ids::CUISINE,
        category: Category::Hard,
        rule_template: "Eat at least one meal at a restaurant serving each requested cuisine: {cuisines}.",
        applicable: |q| !q.cuisines.is_empty(),
        check: cuisine,
    },
    ConstraintDescriptor {
        id: ids::TRANSPORTATION_PREFERENCE,
        category: Category::Hard,
        rule_template: "Do not use {forbidden_modes}.",
        applicable: |q| !q.transport_prefs.is_empty(),
        check: transportation_preference,
    },
];

fn run(id: &str, p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    super::descriptor(id).expect("catalogued id").evaluate(p, q, b)
}

pub fn check_within_sandbox(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::WITHIN_SANDBOX, p, q, b)
}
pub fn check_complete_information(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::COMPLETE_INFORMATION, p, q, b)
}
pub fn check_within_current_city(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::WITHIN_CURRENT_CITY, p, q, b)
}
pub fn check_reasonable_city_route(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::REASONABLE_CITY_ROUTE, p, q, b)
}
pub fn check_diverse_restaurants(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::DIVERSE_RESTAURANTS, p, q, b)
}
pub fn check_diverse_attractions(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::DIVERSE_ATTRACTIONS, p, q, b)
}
pub fn check_no_conflicting_transportation(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::NO_CONFLICTING_TRANSPORTATION, p, q, b)
}
pub fn check_minimum_nights_stay(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::MINIMUM_NIGHTS_STAY, p, q, b)
}
pub fn check_budget(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::BUDGET, p, q, b)
}
pub fn check_room_rules(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::ROOM_RULES, p, q, b)
}
pub fn check_room_type(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::ROOM_TYPE, p, q, b)
}
pub fn check_cuisine(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::CUISINE, p, q, b)
}
pub fn check_transportation_preference(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
    run(ids::TRANSPORTATION_PREFERENCE, p, q, b)
}

fn within_sandbox(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<Evidence> {
    let mut ev = Vec::new();
    for d in &p.days {
        match &d.transportation {
            Some(Leg::Flight {
                flight_id,
                origin,
                destination,
                ..
            }) => match b.flight(flight_id) {
                None => ev.push(Evidence::at(
                    d.day,
                    "transportation",
                    format!("flight {flight_id} is not in the reference data"),
                )),
                Some(f) if &f.origin != origin || &f.destination != destination => ev.push(Evidence::at(
                    d.day,
                    "transportation",
                    format!("flight {flight_id} flies from {} to {}", f.origin, f.destination),
                )),
                Some(f) if Some(f.date) != q.date_of_day(d.day) => ev.push(Evidence::at(
                    d.day,
                    "transportation",
                    format!("flight {flight_id} departs on {}", f.date),
                )),
                Some(_) => {}
            },
            Some(Leg::Ground {
                ground_mode,
                origin,
                destination,
                ..
            }) => {
                if b.ground_route(origin, destination, *ground_mode).is_none() {
                    ev.push(Evidence::at(
                        d.day,
                        "transportation",
                        format!("no {} route from {origin} to {destination}", ground_mode.tag()),
                    ));
                }
            }
            None => {}
        }
        for (slot, meal) in d.meals() {
            if let Some(m) = meal {
                if b.restaurant(&m.name, &m.city).is_none() {
                    ev.push(Evidence::at(d.day, slot, format!("restaurant {m} is not in the reference data")));
                }
            }
        }
        if let Some(a) = &d.attraction {
            if b.attraction(&a.name, &a.city).is_none() {
                ev.push(Evidence::at(d.day, "attraction", format!("attraction {a} is not in the reference data")));
            }
        }
        if let Some(a) = &d.accommodation {
            if b.accommodation(&a.name, &a.city).is_none() {
                ev.push(Evidence::at(
                    d.day,
                    "accommodation",
                    format!("accommodation {a} is not in the reference data"),
                ));
            }
        }
    }
    ev
}

fn complete_information(p: &Plan, _q: &TravelQuery, _b: &ReferenceBundle) -> Vec<Evidence> {
    let mut ev = Vec::new();
    let last = p.days.len();
    for (i, d) in p.days.iter().enumerate() {
        let travel = d.current_city.is_travel();
        match (&d.transportation, travel) {
            (None, true) => ev.push(Evidence::at(d.day, "transportation", "missing transportation on a travel day")),
            (Some(_), false) => ev.push(Evidence::at(d.day, "transportation", "transportation on a non-travel day")),
            _ => {}
        }
        if i + 1 < last && d.accommodation.is_none() {
            ev.push(Evidence::at(d.day, "accommodation", "missing accommodation"));
        }
        if !travel {
            for (slot, meal) in d.meals() {
                if meal.is_none() {
                    ev.push(Evidence::at(d.day, slot, format!("missing {slot}")));
                }
            }
        }
    }
    ev
}

fn within_current_city(p: &Plan, _q: &TravelQuery, _b: &ReferenceBundle) -> Vec<Evidence> {
    let mut ev = Vec::new();
    for d in &p.days {
        let cc = &d.current_city;
        if let (Some(leg), CurrentCity::Travel { from, to }) = (&d.transportation, cc) {
            if leg.origin() != from || leg.destination() != to {
                ev.push(Evidence::at(
                    d.day,
                    "transportation",
                    format!(
                        "leg from {} to {} does not match travel from {from} to {to}",
                        leg.origin(),
                        leg.destination()
                    ),
                ));
            }
        }
        let mut located = |field: &str, place: Option<&Place>| {
            if let Some(pl) = place {
                if !cc.contains(&pl.city) {
                    ev.push(Evidence::at(d.day, field, format!("{pl} is outside {cc}")));
                }
            }
        };
        for (slot, meal) in d.meals() {
            located(slot, meal);
        }
        located("attraction", d.attraction.as_ref());
        if let Some(a) = &d.accommodation {
            if a.city != cc.end_city() {
                ev.push(Evidence::at(
                    d.day,
                    "accommodation",
                    format!("{a} is not in {}, where day {} ends", cc.end_city(), d.day),
                ));
            }
        }
    }
    ev
}

fn reasonable_city_route(p: &Plan, q: &TravelQuery, _b: &ReferenceBundle) -> Vec<Evidence> {
    let mut ev = Vec::new();
    let mut here = q.origin.as_str();
    let mut visited: Vec<&str> = Vec::new();
    for d in &p.days {
        match &d.current_city {
            CurrentCity::Stay(c) => {
                if c != here {
                    ev.push(Evidence::at(d.day, "current_city", format!("in {c} but the trip is in {here}")));
                }
            }
            CurrentCity::Travel { from, to } => {
                if from != here {
                    ev.push(Evidence::at(
                        d.day,
                        "current_city",
                        format!("departs {from} but the trip is in {here}"),
                    ));
                }
                if from == to {
                    ev.push(Evidence::at(d.day, "current_city", format!("travels from {from} to itself")));
                }
                if to != &q.origin {
                    visited.push(to);
                }
            }
        }
        here = d.current_city.end_city();
    }
    if here != q.origin {
        let day = p.days.last().map(|d| d.day).unwrap_or(0);
        ev.push(Evidence::at(day, "current_city", format!("trip ends in {here}, not {}", q.origin)));
    }
    if visited.iter().copied().ne(q.destinations.iter().map(String::as_str)) {
        ev.push(Evidence::plan_wide(
            "current_city",
            format!("visits [{}], requested [{}]", visited.join(", "), q.destinations.join(", ")),
        ));
    }
    ev
}

fn repeated<'a, I>(items: I, label: &str) -> Vec<Evidence>
where
    I: Iterator<Item = (u32, &'static str, &'a Place)>,
{
    let items: Vec<_> = items.collect();
    let mut counts: BTreeMap<&Place, usize> = BTreeMap::new();
    for (_, _, p) in &items {
        *counts.entry(*p).or_default() += 1;
    }
    items
        .into_iter()
        .filter(|(_, _, p)| counts[p] > 1)
        .map(|(day, field, p)| Evidence::at(day, field, format!("{label} {p} repeated")))
        .collect()
}

fn diverse_restaurants(p: &Plan, _q: &TravelQuery, _b: &ReferenceBundle) -> Vec<Evidence> {
    repeated(p.meals(), "restaurant")
}

fn diverse_attractions(p: &Plan, _q: &TravelQuery, _b: &ReferenceBundle) -> Vec<Evidence> {
    repeated(
        p.days
            .iter()
            .filter_map(|d| d.attraction.as_ref().map(|a| (d.day, "attraction", a))),
        "attraction",
    )
}

fn no_conflicting_transportation(p: &Plan, _q: &TravelQuery, _b: &ReferenceBundle) -> Vec<Evidence> {
    let flies = p.legs().any(|(_, l)| l.mode() == TransportMode::Flight);
    let drives = p.legs().any(|(_, l)| l.mode() == TransportMode::SelfDriving);
    if !(flies && drives) {
        return Vec::new();
    }
    p.legs()
        .filter(|(_, l)| matches!(l.mode(), TransportMode::Flight | TransportMode::SelfDriving))
        .map(|(day, l)| {
            let what = if l.mode() == TransportMode::Flight { "flight" } else { "self-driving" };
            Evidence::at(day, "transportation", format!("{what} mixed with the other mode"))
        })
        .collect()
}

fn minimum_nights_stay(p: &Plan, _q: &TravelQuery, b: &ReferenceBundle) -> Vec<Evidence> {
    let mut ev = Vec::new();
    let days = &p.days;
    let mut i = 0;
    while i < days.len() {
        let Some(a) = &days[i].accommodation else {
            i += 1;
            continue;
        };
        let mut j = i;
        while j + 1 < days.len() && days[j + 1].accommodation.as_ref() == Some(a) {
            j += 1;
        }
        let nights = (j - i + 1) as u32;
        if let Some(h) = b.accommodation(&a.name, &a.city) {
            if nights < h.minimum_nights {
                ev.push(Evidence::at(
                    days[i].day,
                    "accommodation",
                    format!("{a} booked for {nights} night(s), minimum is {}", h.minimum_nights),
                ));
            }
        }
        i = j + 1;
    }
    ev
}

fn budget(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<Evidence> {
    let bd = plan_cost_breakdown(p, q, b);
    if !bd.unresolved.is_empty() {
        return bd
            .unresolved
            .iter()
            .map(|u| Evidence::at(u.day, &u.field, format!("cannot price {}: {u}", u.field)))
            .collect();
    }
    let total = bd.resolved_total();
    if total > q.budget {
        vec![Evidence::plan_wide(
            "budget",
            format!("total cost ${total} exceeds budget ${}", q.budget),
        )]
    } else {
        Vec::new()
    }
}

fn room_rules(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<Evidence> {
    let mut ev = Vec::new();
    let mut seen = HashSet::new();
    for d in &p.days {
        let Some(a) = &d.accommodation else { continue };
        if !seen.insert(a) {
            continue;
        }
        let Some(h) = b.accommodation(&a.name, &a.city) else { continue };
        let clashes: Vec<String> = h
            .house_rules
            .intersection(&q.house_rules)
            .map(|r| r.prohibition_tag())
            .collect();
        if !clashes.is_empty() {
            ev.push(Evidence::at(d.day, "accommodation", format!("{a} has {}", clashes.join(", "))));
        }
    }
    ev
}

fn room_type(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<Evidence> {
    let booked: Vec<_> = p
        .days
        .iter()
        .filter_map(|d| d.accommodation.as_ref())
        .filter_map(|a| b.accommodation(&a.name, &a.city))
        .collect();
    q.room_types
        .iter()
        .filter(|t| !booked.iter().any(|h| t.satisfied_by(h.room_type)))
        .map(|t| Evidence::plan_wide("accommodation", format!("no booked accommodation offers {t}")))
        .collect()
}

fn cuisine(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<Evidence> {
    let chosen: Vec<_> = p
        .meals()
        .filter_map(|(_, _, m)| b.restaurant(&m.name, &m.city))
        .collect();
    q.cuisines
        .iter()
        .filter(|c| !chosen.iter().any(|r| r.serves(c)))
        .map(|c| Evidence::plan_wide("meals", format!("no chosen restaurant serves {c}")))
        .collect()
}

fn transportation_preference(p: &Plan, q: &TravelQuery, _b: &ReferenceBundle) -> Vec<Evidence> {
    let no_flight = q.transport_prefs.contains(&TransportPref::NoFlight);
    let no_drive = q.transport_prefs.contains(&TransportPref::NoSelfDriving);
    p.legs()
        .filter_map(|(day, l)| match l.mode() {
            TransportMode::Flight if no_flight => Some(Evidence::at(day, "transportation", "flight used despite no-flight")),
            TransportMode::SelfDriving if no_drive => {
                Some(Evidence::at(day, "transportation", "self-driving used despite no-self-driving"))
            }
            _ => None,
        })
        .collect()
}
