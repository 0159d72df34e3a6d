//! Every constraint re-derived directly from its definition.

use std::collections::BTreeMap;

use chrono::Days;
use tripwise_core::model::{CurrentCity, GroundMode, Leg, Place, Plan, RoomType, TransportPref};
use tripwise_core::{Money, ReferenceBundle, TravelQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

fn v(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn meals(p: &Plan) -> Vec<&Place> {
    let mut out = Vec::new();
    for d in &p.days {
        for m in [&d.breakfast, &d.lunch, &d.dinner].into_iter().flatten() {
            out.push(m);
        }
    }
    out
}

fn has_restaurant(b: &ReferenceBundle, p: &Place) -> bool {
    b.restaurants.iter().any(|r| r.name == p.name && r.city == p.city)
}

fn has_attraction(b: &ReferenceBundle, p: &Place) -> bool {
    b.attractions.iter().any(|r| r.name == p.name && r.city == p.city)
}

fn hotel<'a>(b: &'a ReferenceBundle, p: &Place) -> Option<&'a tripwise_core::model::Accommodation> {
    b.accommodations.iter().find(|a| a.name == p.name && a.city == p.city)
}

fn cities_of(c: &CurrentCity) -> Vec<&str> {
    match c {
        CurrentCity::Stay(x) => vec![x.as_str()],
        CurrentCity::Travel { from, to } => vec![from.as_str(), to.as_str()],
    }
}

fn end_of(c: &CurrentCity) -> &str {
    match c {
        CurrentCity::Stay(x) => x,
        CurrentCity::Travel { to, .. } => to,
    }
}

fn sandbox(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> bool {
    for d in &p.days {
        match &d.transportation {
            Some(Leg::Flight {
                flight_id,
                origin,
                destination,
                ..
            }) => {
                let date = q.start_date.checked_add_days(Days::new(u64::from(d.day) - 1));
                let ok = b.flights.iter().any(|f| {
                    &f.flight_id == flight_id && &f.origin == origin && &f.destination == destination && Some(f.date) == date
                });
                if !ok {
                    return false;
                }
            }
            Some(Leg::Ground {
                ground_mode,
                origin,
                destination,
                ..
            }) => {
                let ok = b
                    .distances
                    .iter()
                    .any(|r| &r.origin == origin && &r.destination == destination && r.mode == *ground_mode);
                if !ok {
                    return false;
                }
            }
            None => {}
        }
        for m in [&d.breakfast, &d.lunch, &d.dinner].into_iter().flatten() {
            if !has_restaurant(b, m) {
                return false;
            }
        }
        if let Some(a) = &d.attraction {
            if !has_attraction(b, a) {
                return false;
            }
        }
        if let Some(h) = &d.accommodation {
            if hotel(b, h).is_none() {
                return false;
            }
        }
    }
    true
}

fn complete(p: &Plan) -> bool {
    let n = p.days.len();
    for (i, d) in p.days.iter().enumerate() {
        let travelling = matches!(d.current_city, CurrentCity::Travel { .. });
        if travelling != d.transportation.is_some() {
            return false;
        }
        if i + 1 != n && d.accommodation.is_none() {
            return false;
        }
        if !travelling && (d.breakfast.is_none() || d.lunch.is_none() || d.dinner.is_none()) {
            return false;
        }
    }
    true
}

fn in_city(p: &Plan) -> bool {
    for d in &p.days {
        let cities = cities_of(&d.current_city);
        if let (Some(l), CurrentCity::Travel { from, to }) = (&d.transportation, &d.current_city) {
            let (lo, ld) = match l {
                Leg::Flight { origin, destination, .. } | Leg::Ground { origin, destination, .. } => (origin, destination),
            };
            if lo != from || ld != to {
                return false;
            }
        }
        for x in [&d.breakfast, &d.lunch, &d.dinner, &d.attraction].into_iter().flatten() {
            if !cities.contains(&x.city.as_str()) {
                return false;
            }
        }
        if let Some(h) = &d.accommodation {
            if h.city != end_of(&d.current_city) {
                return false;
            }
        }
    }
    true
}

fn route(p: &Plan, q: &TravelQuery) -> bool {
    let mut here = q.origin.clone();
    let mut seen = Vec::new();
    for d in &p.days {
        match &d.current_city {
            CurrentCity::Stay(c) => {
                if *c != here {
                    return false;
                }
            }
            CurrentCity::Travel { from, to } => {
                if *from != here || from == to {
                    return false;
                }
                if *to != q.origin {
                    seen.push(to.clone());
                }
                here = to.clone();
            }
        }
    }
    here == q.origin && seen == q.destinations
}

fn all_distinct(items: &[&Place]) -> bool {
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if items[i] == items[j] {
                return false;
            }
        }
    }
    true
}

fn uses_flight(p: &Plan) -> bool {
    p.days.iter().any(|d| matches!(d.transportation, Some(Leg::Flight { .. })))
}

fn uses_driving(p: &Plan) -> bool {
    p.days.iter().any(|d| {
        matches!(
            d.transportation,
            Some(Leg::Ground {
                ground_mode: GroundMode::SelfDriving,
                ..
            })
        )
    })
}

fn nights(p: &Plan, b: &ReferenceBundle) -> bool {
    let mut i = 0;
    while i < p.days.len() {
        let Some(h) = p.days[i].accommodation.clone() else {
            i += 1;
            continue;
        };
        let mut len = 0;
        while i < p.days.len() && p.days[i].accommodation.as_ref() == Some(&h) {
            len += 1;
            i += 1;
        }
        if let Some(row) = hotel(b, &h) {
            if len < row.minimum_nights {
                return false;
            }
        }
    }
    true
}

/// Total cost, or `None` when any priced item is missing from the bundle.
pub fn cost(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Option<Money> {
    let people = i64::from(q.n_people);
    let mut cents: i64 = 0;
    for d in &p.days {
        match &d.transportation {
            Some(Leg::Flight { flight_id, .. }) => {
                let f = b.flights.iter().find(|f| &f.flight_id == flight_id)?;
                cents += f.price.cents() * people;
            }
            Some(Leg::Ground {
                ground_mode,
                origin,
                destination,
                ..
            }) => {
                let r = b
                    .distances
                    .iter()
                    .find(|r| &r.origin == origin && &r.destination == destination && r.mode == *ground_mode)?;
                cents += r.cost.cents();
            }
            None => {}
        }
        for m in [&d.breakfast, &d.lunch, &d.dinner].into_iter().flatten() {
            let r = b.restaurants.iter().find(|r| r.name == m.name && r.city == m.city)?;
            cents += r.average_cost.cents() * people;
        }
        if let Some(h) = &d.accommodation {
            let a = hotel(b, h)?;
            let occ = i64::from(a.maximum_occupancy);
            let rooms = (people + occ - 1) / occ;
            cents += a.price.cents() * rooms;
        }
    }
    Some(Money::from_cents(cents))
}

fn booked<'a>(p: &Plan, b: &'a ReferenceBundle) -> Vec<&'a tripwise_core::model::Accommodation> {
    p.days
        .iter()
        .filter_map(|d| d.accommodation.as_ref())
        .filter_map(|h| hotel(b, h))
        .collect()
}

fn room_ok(want: RoomType, got: RoomType) -> bool {
    match want {
        RoomType::NotSharedRoom => got != RoomType::SharedRoom,
        w => w == got,
    }
}

/// Verdict per constraint id, all thirteen ids present.
pub fn verdicts(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> BTreeMap<&'static str, Verdict> {
    let mut out = BTreeMap::new();
    out.insert("within-sandbox", v(sandbox(p, q, b)));
    out.insert("complete-information", v(complete(p)));
    out.insert("within-current-city", v(in_city(p)));
    out.insert("reasonable-city-route", v(route(p, q)));
    out.insert("diverse-restaurants", v(all_distinct(&meals(p))));
    let sights: Vec<&Place> = p.days.iter().filter_map(|d| d.attraction.as_ref()).collect();
    out.insert("diverse-attractions", v(all_distinct(&sights)));
    out.insert("no-conflicting-transportation", v(!(uses_flight(p) && uses_driving(p))));
    out.insert("minimum-nights-stay", v(nights(p, b)));
    out.insert("budget", v(cost(p, q, b).is_some_and(|c| c <= q.budget)));

    let stays = booked(p, b);
    out.insert(
        "room-rules",
        if q.house_rules.is_empty() {
            Verdict::NotApplicable
        } else {
            v(stays.iter().all(|a| a.house_rules.iter().all(|r| !q.house_rules.contains(r))))
        },
    );
    out.insert(
        "room-type",
        if q.room_types.is_empty() {
            Verdict::NotApplicable
        } else {
            v(q.room_types.iter().all(|t| stays.iter().any(|a| room_ok(*t, a.room_type))))
        },
    );
    let eaten: Vec<_> = meals(p)
        .into_iter()
        .filter_map(|m| b.restaurants.iter().find(|r| r.name == m.name && r.city == m.city))
        .collect();
    out.insert(
        "cuisine",
        if q.cuisines.is_empty() {
            Verdict::NotApplicable
        } else {
            v(q.cuisines.iter().all(|c| {
                eaten
                    .iter()
                    .any(|r| r.cuisines.iter().any(|rc| rc.to_lowercase() == c.to_lowercase()))
            }))
        },
    );
    out.insert(
        "transportation-preference",
        if q.transport_prefs.is_empty() {
            Verdict::NotApplicable
        } else {
            let flight_ok = !q.transport_prefs.contains(&TransportPref::NoFlight) || !uses_flight(p);
            let drive_ok = !q.transport_prefs.contains(&TransportPref::NoSelfDriving) || !uses_driving(p);
            v(flight_ok && drive_ok)
        },
    );
    out
}
