//! Plan costing.
//!
//! Flights and meals are charged per person, ground transport per group,
//! and lodging per room-night with the party packed into
//! `ceil(n_people / maximum_occupancy)` rooms. Attractions are free.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bundle::{ReferenceBundle, TableKind};
use super::plan::{Leg, Plan};
use super::query::TravelQuery;
use crate::money::Money;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{name} not found in {table}")]
pub struct UnresolvedItem {
    pub day: u32,
    pub field: String,
    pub name: String,
    pub table: TableKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLine {
    pub day: u32,
    pub field: String,
    pub item: String,
    pub unit_price: Money,
    pub quantity: u32,
    pub amount: Money,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub lines: Vec<CostLine>,
    pub unresolved: Vec<UnresolvedItem>,
}

impl CostBreakdown {
    /// Sum of resolved lines only.
    pub fn resolved_total(&self) -> Money {
        self.lines.iter().map(|l| l.amount).sum()
    }
}

/// Resolve-tolerant costing: every item that resolves is priced, the rest
/// are reported as unresolved.
pub fn plan_cost_breakdown(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> CostBreakdown {
    let mut out = CostBreakdown::default();
    let people = q.n_people;
    for d in &p.days {
        if let Some(leg) = &d.transportation {
            match leg {
                Leg::Flight { flight_id, .. } => match b.flight(flight_id) {
                    Some(f) => out.lines.push(line(d.day, "transportation", flight_id, f.price, people)),
                    None => out.unresolved.push(UnresolvedItem {
                        day: d.day,
                        field: "transportation".into(),
                        name: flight_id.clone(),
                        table: TableKind::Flights,
                    }),
                },
                Leg::Ground {
                    ground_mode,
                    origin,
                    destination,
                    ..
                } => match b.ground_route(origin, destination, *ground_mode) {
                    Some(r) => out.lines.push(line(
                        d.day,
                        "transportation",
                        &format!("{} from {origin} to {destination}", ground_mode.tag()),
                        r.cost,
                        1,
                    )),
                    None => out.unresolved.push(UnresolvedItem {
                        day: d.day,
                        field: "transportation".into(),
                        name: format!("{} from {origin} to {destination}", ground_mode.tag()),
                        table: TableKind::Distances,
                    }),
                },
            }
        }
        for (slot, meal) in d.meals() {
            let Some(m) = meal else { continue };
            match b.restaurant(&m.name, &m.city) {
                Some(r) => out.lines.push(line(d.day, slot, &m.to_string(), r.average_cost, people)),
                None => out.unresolved.push(UnresolvedItem {
                    day: d.day,
                    field: slot.into(),
                    name: m.to_string(),
                    table: TableKind::Restaurants,
                }),
            }
        }
        if let Some(a) = &d.accommodation {
            match b.accommodation(&a.name, &a.city) {
                Some(h) => {
                    let rooms = people.div_ceil(h.maximum_occupancy.max(1));
                    out.lines.push(line(d.day, "accommodation", &a.to_string(), h.price, rooms));
                }
                None => out.unresolved.push(UnresolvedItem {
                    day: d.day,
                    field: "accommodation".into(),
                    name: a.to_string(),
                    table: TableKind::Accommodations,
                }),
            }
        }
    }
    out
}

fn line(day: u32, field: &str, item: &str, unit_price: Money, quantity: u32) -> CostLine {
    CostLine {
        day,
        field: field.to_string(),
        item: item.to_string(),
        unit_price,
        quantity,
        amount: unit_price * quantity,
    }
}

/// Total cost of a plan whose every priced item resolves in `b`.
pub fn plan_total_cost(p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Result<Money, UnresolvedItem> {
    let breakdown = plan_cost_breakdown(p, q, b);
    match breakdown.unresolved.into_iter().next() {
        Some(u) => Err(u),
        None => Ok(breakdown.lines.iter().map(|l| l.amount).sum()),
    }
}
