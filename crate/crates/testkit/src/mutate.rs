//! Targeted edits that push a well-formed plan into failure branches the
//! well-formed space never reaches.

use tripwise_core::model::{CurrentCity, GroundMode, Leg, Place, Plan};
use tripwise_core::{ReferenceBundle, TravelQuery};

fn edit(p: &Plan, f: impl FnOnce(&mut Plan)) -> Plan {
    let mut m = p.clone();
    f(&mut m);
    m
}

/// Named variants of `p`. Each one changes a single aspect.
pub fn mutations(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<(&'static str, Plan)> {
    let mut out = Vec::new();
    let last = p.days.len() - 1;
    let dest = q.destinations[0].clone();
    let stay = p
        .days
        .iter()
        .position(|d| !matches!(d.current_city, CurrentCity::Travel { .. }))
        .unwrap_or(0);

    out.push(("unknown restaurant", edit(p, |m| m.days[stay].lunch = Some(Place::new("Nowhere Diner", &dest)))));
    out.push(("unknown attraction", edit(p, |m| m.days[stay].attraction = Some(Place::new("Lost Temple", &dest)))));
    out.push(("unknown hotel", edit(p, |m| m.days[0].accommodation = Some(Place::new("Phantom Inn", &dest)))));
    out.push(("meal in wrong city", edit(p, |m| m.days[stay].dinner = Some(Place::new("Far Cafe", "Elsewhere")))));
    if let Some(r) = b.restaurants.iter().find(|r| r.city == q.origin) {
        out.push(("origin meal on stay day", edit(p, |m| m.days[stay].breakfast = Some(Place::new(&r.name, &r.city)))));
    }
    if let Some(a) = b.accommodations.iter().find(|a| a.city == q.origin) {
        out.push(("hotel in origin", edit(p, |m| m.days[0].accommodation = Some(Place::new(&a.name, &a.city)))));
    }
    out.push(("no transportation", edit(p, |m| m.days[0].transportation = None)));
    out.push(("transport on stay day", edit(p, |m| m.days[stay].transportation = m.days[0].transportation.clone())));
    out.push(("no accommodation", edit(p, |m| m.days[0].accommodation = None)));
    out.push(("missing stay meal", edit(p, |m| m.days[stay].lunch = None)));
    out.push(("final night booked", edit(p, |m| m.days[last].accommodation = m.days[0].accommodation.clone())));
    out.push(("split stay", edit(p, |m| {
        if let Some(other) = b.accommodations.iter().find(|a| a.city == dest && Some(a.name.as_str()) != m.days[0].accommodation.as_ref().map(|h| h.name.as_str())) {
            m.days[stay].accommodation = Some(Place::new(&other.name, &other.city));
        }
    })));
    out.push(("repeated meal", edit(p, |m| m.days[stay].dinner = m.days[stay].breakfast.clone())));
    out.push(("repeated attraction", edit(p, |m| {
        let a = m.days.iter().find_map(|d| d.attraction.clone());
        for d in &mut m.days {
            d.attraction = a.clone();
        }
    })));
    out.push(("reversed leg", edit(p, |m| {
        if let (Some(first), Some(back)) = (m.days[0].transportation.clone(), m.days[last].transportation.clone()) {
            m.days[0].transportation = Some(back);
            m.days[last].transportation = Some(first);
        }
    })));
    out.push(("no return", edit(p, |m| m.days[last].current_city = CurrentCity::Stay(dest.clone()))));
    out.push(("self loop", edit(p, |m| {
        m.days[last].current_city = CurrentCity::Travel {
            from: dest.clone(),
            to: dest.clone(),
        }
    })));
    out.push(("wrong stay city", edit(p, |m| m.days[stay].current_city = CurrentCity::Stay(q.origin.clone()))));
    out.push(("fabricated flight", edit(p, |m| {
        m.days[0].transportation = Some(Leg::Flight {
            flight_id: "ZZ999".into(),
            origin: q.origin.clone(),
            destination: dest.clone(),
            departure: "09:00".parse().unwrap(),
            arrival: "11:00".parse().unwrap(),
            cost: tripwise_core::Money::from_dollars(1),
        })
    })));
    for f in b.flights.iter().take(3) {
        out.push(("other flight", edit(p, |m| {
            m.days[0].transportation = Some(Leg::Flight {
                flight_id: f.flight_id.clone(),
                origin: q.origin.clone(),
                destination: dest.clone(),
                departure: f.departure,
                arrival: f.arrival,
                cost: f.price,
            })
        })));
    }
    for mode in [GroundMode::SelfDriving, GroundMode::Taxi] {
        out.push(("ground leg", edit(p, |m| {
            m.days[last].transportation = Some(Leg::Ground {
                ground_mode: mode,
                origin: dest.clone(),
                destination: q.origin.clone(),
                duration_minutes: 60,
                cost: tripwise_core::Money::from_dollars(5),
            })
        })));
        out.push(("ground leg out", edit(p, |m| {
            m.days[0].transportation = Some(Leg::Ground {
                ground_mode: mode,
                origin: q.origin.clone(),
                destination: dest.clone(),
                duration_minutes: 60,
                cost: tripwise_core::Money::from_dollars(5),
            })
        })));
    }
    out.push(("drop all meals", edit(p, |m| {
        for d in &mut m.days {
            d.breakfast = None;
            d.lunch = None;
            d.dinner = None;
        }
    })));
    out
}
