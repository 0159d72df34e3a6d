#![allow(dead_code)]

use std::collections::BTreeMap;

use tripwise_core::ingest::RawReferenceDocument;
use tripwise_core::model::{ReferenceBundle, TableKind, TravelQuery};

pub fn bundle(blocks: &[(TableKind, &str)]) -> ReferenceBundle {
    let doc = RawReferenceDocument {
        blocks: blocks
            .iter()
            .map(|(k, v)| (*k, v.to_string()))
            .collect::<BTreeMap<_, _>>(),
    };
    let b = doc.to_bundle().expect("fixture parses");
    assert!(b.validate().is_empty(), "fixture is valid: {:?}", b.validate());
    b
}

pub fn query(json: serde_json::Value) -> TravelQuery {
    let mut base = serde_json::json!({
        "id": "q1",
        "origin": "Austin",
        "destinations": ["Denver"],
        "start_date": "2025-03-01",
        "n_days": 3,
        "n_people": 2,
        "budget": 1700,
        "split": "train"
    });
    for (k, v) in json.as_object().expect("object") {
        base[k] = v.clone();
    }
    serde_json::from_value(base).expect("fixture query")
}

pub const FLIGHTS: &str = "\
flight_id,origin,destination,departure,arrival,price,date
F1,Austin,Denver,08:00,10:30,200,2025-03-01
F2,Denver,Austin,17:00,19:40,180,2025-03-03
";

/// Austin to Denver and back, with exactly one feasible plan when no
/// attraction is listed: the stay day must use all three Denver
/// restaurants, leaving none for travel days.
pub fn single_candidate() -> ReferenceBundle {
    bundle(&[
        (TableKind::Flights, FLIGHTS),
        (
            TableKind::Distances,
            "origin,destination,mode,distance_miles,duration_minutes,cost\n",
        ),
        (
            TableKind::Accommodations,
            "name,city,price,room_type,house_rules,minimum_nights,maximum_occupancy\n\
             Maple Inn,Denver,120,entire-room,no-smoking,1,2\n",
        ),
        (
            TableKind::Restaurants,
            "name,city,average_cost,cuisines\n\
             Rioja,Denver,25,Mediterranean\n\
             Sushi Den,Denver,30,Japanese\n\
             Snooze,Denver,15,American\n",
        ),
        (TableKind::Attractions, "name,city\n"),
    ])
}

/// The single feasible plan for [`single_candidate`], in plan grammar.
pub const SINGLE_PLAN: &str = "\
Day 1:
Current City: from Austin to Denver
Transportation: Flight Number: F1, from Austin to Denver, Departure: 08:00, Arrival: 10:30, Cost: $200
Breakfast: -
Attraction: -
Lunch: -
Dinner: -
Accommodation: Maple Inn, Denver

Day 2:
Current City: Denver
Transportation: -
Breakfast: Rioja, Denver
Attraction: -
Lunch: Sushi Den, Denver
Dinner: Snooze, Denver
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

/// A two-destination bundle with a choice of accommodations and legs.
pub fn two_cities() -> ReferenceBundle {
    bundle(&[
        (
            TableKind::Flights,
            "flight_id,origin,destination,departure,arrival,price,date\n\
             F10,Austin,Denver,08:00,10:30,210,2025-03-01\n\
             F11,Austin,Denver,13:00,15:30,160,2025-03-01\n\
             F12,Denver,Boise,09:15,10:45,140,2025-03-03\n\
             F13,Boise,Austin,12:00,17:10,260,2025-03-05\n",
        ),
        (
            TableKind::Distances,
            "origin,destination,mode,distance_miles,duration_minutes,cost\n\
             Denver,Boise,taxi,830,760,900\n\
             Denver,Boise,self-driving,830,760,210\n\
             Boise,Austin,self-driving,1650,1440,400\n",
        ),
        (
            TableKind::Accommodations,
            "name,city,price,room_type,house_rules,minimum_nights,maximum_occupancy\n\
             Maple Inn,Denver,120,entire-room,no-smoking,1,2\n\
             Pine Lodge,Denver,95,private-room,no-pets;no-parties,2,2\n\
             River House,Boise,140,entire-room,,1,4\n\
             Bunk Hub,Boise,40,shared-room,no-visitors,1,1\n",
        ),
        (
            TableKind::Restaurants,
            "name,city,average_cost,cuisines\n\
             Rioja,Denver,25,Mediterranean\n\
             Sushi Den,Denver,30,Japanese\n\
             Snooze,Denver,15,American;Breakfast\n\
             Tamayo,Denver,28,Mexican\n\
             Fork,Boise,22,American\n\
             Bardenay,Boise,26,American;Italian\n\
             Kin,Boise,45,Japanese\n\
             Diablo,Boise,12,Mexican\n\
             Uchi,Austin,50,Japanese\n",
        ),
        (
            TableKind::Attractions,
            "name,city\n\
             Red Rocks,Denver\n\
             Union Station,Denver\n\
             Boise River Greenbelt,Boise\n\
             Capitol,Austin\n",
        ),
    ])
}

pub fn two_city_query(extra: serde_json::Value) -> TravelQuery {
    let mut q = serde_json::json!({
        "id": "q5",
        "destinations": ["Denver", "Boise"],
        "n_days": 5,
        "budget": 3000
    });
    for (k, v) in extra.as_object().expect("object") {
        q[k] = v.clone();
    }
    query(q)
}
