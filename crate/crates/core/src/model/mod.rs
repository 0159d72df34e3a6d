//! Shared domain types: travel queries, the reference sandbox, and plans.
//!
//! Every type here is an immutable value after construction and is
//! `Send + Sync`.

mod bundle;
mod cost;
mod plan;
mod query;
mod tags;

pub use bundle::{
    Accommodation, Attraction, BundleViolation, Flight, GroundMode, GroundRoute, ReferenceBundle,
    Restaurant, TableKind,
};
pub use cost::{plan_cost_breakdown, plan_total_cost, CostBreakdown, CostLine, UnresolvedItem};
pub use plan::{ClockTime, CurrentCity, DayEntry, Leg, ParseClockError, Place, Plan, TransportMode};
pub use query::{validate_query, QueryViolation, Split, TravelQuery};
pub use tags::{HouseRule, RoomType, TagParseError, TransportPref};
