mod common;

use common::{bundle, query, FLIGHTS};
use proptest::prelude::*;
use tripwise_core::model::{plan_cost_breakdown, CurrentCity, DayEntry, Leg, Place, Plan, TableKind};
use tripwise_core::{parse_plan, plan_total_cost, Money};

/// Five rows: two flights, one accommodation, one restaurant, one attraction.
fn five_rows() -> tripwise_core::ReferenceBundle {
    bundle(&[
        (TableKind::Flights, FLIGHTS),
        (
            TableKind::Accommodations,
            "name,city,price,room_type,house_rules,minimum_nights,maximum_occupancy\n\
             Maple Inn,Denver,120,entire-room,,1,2\n",
        ),
        (TableKind::Restaurants, "name,city,average_cost,cuisines\nRioja,Denver,25.50,Spanish\n"),
        (TableKind::Attractions, "name,city\nRed Rocks,Denver\n"),
    ])
}

const PLAN: &str = "\
Day 1:
Current City: from Austin to Denver
Transportation: Flight Number: F1, from Austin to Denver, Departure: 08:00, Arrival: 10:30, Cost: $200
Breakfast: -
Attraction: Red Rocks, Denver
Lunch: -
Dinner: Rioja, Denver
Accommodation: Maple Inn, Denver

Day 2:
Current City: Denver
Transportation: -
Breakfast: -
Attraction: -
Lunch: Rioja, Denver
Dinner: -
Accommodation: Maple Inn, Denver

Day 3:
Current City: from Denver to Austin
Transportation: Flight Number: F2, from Denver to Austin, Departure: 17:00, Arrival: 19:40, Cost: $180
Breakfast: -
Attraction: -
Lunch: -
Dinner: -
Accommodation: -
";

#[test]
fn hand_summed_ledger() {
    let q = query(serde_json::json!({"n_people": 3}));
    let b = five_rows();
    let plan = parse_plan(PLAN, &q).plan().cloned().expect("delivered");
    // F1 200 x 3 people              =  600.00
    // F2 180 x 3 people              =  540.00
    // Rioja 25.50 x 3, day 1 dinner   =   76.50
    // Rioja 25.50 x 3, day 2 lunch    =   76.50
    // Maple Inn 120 x 2 rooms, day 1  =  240.00
    // Maple Inn 120 x 2 rooms, day 2  =  240.00
    // Red Rocks                       =    0.00
    // total                           = 1773.00
    assert_eq!(plan_total_cost(&plan, &q, &b).unwrap(), Money::from_dollars(1773));
    let lines = plan_cost_breakdown(&plan, &q, &b).lines;
    let amounts: Vec<String> = lines.iter().map(|l| l.amount.to_string()).collect();
    assert_eq!(amounts.len(), 6);
    assert_eq!(amounts.iter().filter(|a| *a == "76.50").count(), 2);
}

#[test]
fn empty_plan_costs_nothing() {
    let q = query(serde_json::json!({}));
    let b = five_rows();
    let plan = Plan {
        query_id: "q1".into(),
        days: (1..=3).map(|d| DayEntry::new(d, CurrentCity::Stay("Austin".into()))).collect(),
    };
    assert_eq!(plan_total_cost(&plan, &q, &b).unwrap(), Money::ZERO);
}

#[test]
fn one_flight_for_two() {
    let q = query(serde_json::json!({"n_people": 2}));
    let b = five_rows();
    let mut plan = parse_plan(PLAN, &q).plan().cloned().unwrap();
    for d in &mut plan.days {
        d.breakfast = None;
        d.lunch = None;
        d.dinner = None;
        d.accommodation = None;
    }
    plan.days[2].transportation = None;
    assert_eq!(plan_total_cost(&plan, &q, &b).unwrap(), Money::from_dollars(400));
}

#[test]
fn unknown_item_is_reported() {
    let q = query(serde_json::json!({}));
    let b = five_rows();
    let mut plan = parse_plan(PLAN, &q).plan().cloned().unwrap();
    plan.days[1].dinner = Some(Place::new("Ghost Kitchen", "Denver"));
    let err = plan_total_cost(&plan, &q, &b).unwrap_err();
    assert_eq!(err.day, 2);
    assert_eq!(err.to_string(), "Ghost Kitchen, Denver not found in restaurants");
}

#[test]
fn ground_leg_is_per_group() {
    let q = query(serde_json::json!({"n_people": 4}));
    let b = bundle(&[(
        TableKind::Distances,
        "origin,destination,mode,distance_miles,duration_minutes,cost\nAustin,Denver,taxi,900,800,950\n",
    )]);
    let mut plan = Plan {
        query_id: "q1".into(),
        days: vec![DayEntry::new(
            1,
            CurrentCity::Travel {
                from: "Austin".into(),
                to: "Denver".into(),
            },
        )],
    };
    plan.days[0].transportation = Some(Leg::Ground {
        ground_mode: tripwise_core::model::GroundMode::Taxi,
        origin: "Austin".into(),
        destination: "Denver".into(),
        duration_minutes: 800,
        cost: Money::from_dollars(1),
    });
    assert_eq!(plan_total_cost(&plan, &q, &b).unwrap(), Money::from_dollars(950));
}

proptest! {
    #[test]
    fn meal_order_within_a_day_is_irrelevant(perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let q = query(serde_json::json!({}));
        let b = common::single_candidate();
        let plan = parse_plan(common::SINGLE_PLAN, &q).plan().cloned().unwrap();
        let base = plan_total_cost(&plan, &q, &b).unwrap();
        let mut shuffled = plan.clone();
        let meals = [plan.days[1].breakfast.clone(), plan.days[1].lunch.clone(), plan.days[1].dinner.clone()];
        shuffled.days[1].breakfast = meals[perm[0]].clone();
        shuffled.days[1].lunch = meals[perm[1]].clone();
        shuffled.days[1].dinner = meals[perm[2]].clone();
        prop_assert_eq!(plan_total_cost(&shuffled, &q, &b).unwrap(), base);
    }

    #[test]
    fn adding_a_priced_item_increases_cost(people in 1u32..6, cents in 1i64..100_000) {
        let q = query(serde_json::json!({"n_people": people}));
        let b = bundle(&[(
            TableKind::Restaurants,
            &format!("name,city,average_cost,cuisines\nRioja,Denver,{},Spanish\n", Money::from_cents(cents)),
        )]);
        let mut plan = Plan {
            query_id: "q1".into(),
            days: vec![DayEntry::new(1, CurrentCity::Stay("Denver".into()))],
        };
        let before = plan_total_cost(&plan, &q, &b).unwrap();
        plan.days[0].lunch = Some(Place::new("Rioja", "Denver"));
        prop_assert!(plan_total_cost(&plan, &q, &b).unwrap() > before);
    }
}
