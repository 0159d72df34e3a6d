//! Straight-line enumeration of every well-formed assembly for a
//! three-day, one-destination query.

use chrono::Days;
use tripwise_core::model::{CurrentCity, DayEntry, Leg, Place, Plan, TableKind};
use tripwise_core::{Money, ReferenceBundle, TravelQuery};

use crate::verdict::{cost, verdicts, Verdict};

fn legs(q: &TravelQuery, b: &ReferenceBundle, from: &str, to: &str, day: u32) -> Vec<Leg> {
    let date = q.start_date + Days::new(u64::from(day - 1));
    let mut out = Vec::new();
    for f in &b.flights {
        if f.origin == from && f.destination == to && f.date == date {
            out.push(Leg::Flight {
                flight_id: f.flight_id.clone(),
                origin: from.to_string(),
                destination: to.to_string(),
                departure: f.departure,
                arrival: f.arrival,
                cost: f.price,
            });
        }
    }
    for r in &b.distances {
        if r.origin == from && r.destination == to {
            out.push(Leg::Ground {
                ground_mode: r.mode,
                origin: from.to_string(),
                destination: to.to_string(),
                duration_minutes: r.duration_minutes,
                cost: r.cost,
            });
        }
    }
    out
}

/// Subsets of `items` with size between `lo` and `hi`, smaller first, each
/// keeping input order.
fn subsets(items: &[Place], lo: usize, hi: usize) -> Vec<Vec<Place>> {
    let n = items.len();
    let mut all: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let picked: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if picked.len() >= lo && picked.len() <= hi {
            all.push(picked);
        }
    }
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all.into_iter().map(|ix| ix.into_iter().map(|i| items[i].clone()).collect()).collect()
}

fn with_meals(d: &mut DayEntry, meals: &[Place]) {
    d.breakfast = meals.first().cloned();
    d.lunch = meals.get(1).cloned();
    d.dinner = meals.get(2).cloned();
}

/// Every assembly of the well-formed space, in no particular order.
///
/// Panics unless the query is three days with one destination.
pub fn enumerate(q: &TravelQuery, b: &ReferenceBundle) -> Vec<Plan> {
    assert_eq!(q.n_days, 3, "reference enumerator handles three-day trips only");
    assert_eq!(q.destinations.len(), 1);
    let o = q.origin.as_str();
    let d = q.destinations[0].as_str();

    let out_legs = legs(q, b, o, d, 1);
    let back_legs = legs(q, b, d, o, 3);
    let hotels: Vec<Place> = b
        .accommodations
        .iter()
        .filter(|a| a.city == d)
        .map(|a| Place::new(&a.name, &a.city))
        .collect();
    let travel_food: Vec<Place> = b
        .restaurants
        .iter()
        .filter(|r| r.city == o || r.city == d)
        .map(|r| Place::new(&r.name, &r.city))
        .collect();
    let stay_food: Vec<Place> = b
        .restaurants
        .iter()
        .filter(|r| r.city == d)
        .map(|r| Place::new(&r.name, &r.city))
        .collect();
    let day1_meals = subsets(&travel_food, 0, 3);
    let k = stay_food.len().min(3);
    let day2_meals = subsets(&stay_food, k, k);
    let day3_meals = day1_meals.clone();
    let sights = |cities: &[&str]| -> Vec<Option<Place>> {
        let mut v = vec![None];
        v.extend(
            b.attractions
                .iter()
                .filter(|a| cities.contains(&a.city.as_str()))
                .map(|a| Some(Place::new(&a.name, &a.city))),
        );
        v
    };
    let a1 = sights(&[o, d]);
    let a2 = sights(&[d]);
    let a3 = sights(&[d, o]);

    let travel = |from: &str, to: &str| CurrentCity::Travel {
        from: from.to_string(),
        to: to.to_string(),
    };
    let mut plans = Vec::new();
    for l1 in &out_legs {
        for l3 in &back_legs {
            for h in &hotels {
                for m1 in &day1_meals {
                    for m2 in &day2_meals {
                        for m3 in &day3_meals {
                            for x1 in &a1 {
                                for x2 in &a2 {
                                    for x3 in &a3 {
                                        let mut d1 = DayEntry::new(1, travel(o, d));
                                        d1.transportation = Some(l1.clone());
                                        with_meals(&mut d1, m1);
                                        d1.attraction = x1.clone();
                                        d1.accommodation = Some(h.clone());
                                        let mut d2 = DayEntry::new(2, CurrentCity::Stay(d.to_string()));
                                        with_meals(&mut d2, m2);
                                        d2.attraction = x2.clone();
                                        d2.accommodation = Some(h.clone());
                                        let mut d3 = DayEntry::new(3, travel(d, o));
                                        d3.transportation = Some(l3.clone());
                                        with_meals(&mut d3, m3);
                                        d3.attraction = x3.clone();
                                        plans.push(Plan {
                                            query_id: q.id.clone(),
                                            days: vec![d1, d2, d3],
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    plans
}

/// Assemblies passing every applicable constraint, with their costs.
pub fn feasible(q: &TravelQuery, b: &ReferenceBundle) -> Vec<(Plan, Money)> {
    enumerate(q, b)
        .into_iter()
        .filter(|p| verdicts(p, q, b).values().all(|v| *v != Verdict::Fail))
        .map(|p| {
            let c = cost(&p, q, b).expect("feasible plans are fully priced");
            (p, c)
        })
        .collect()
}

/// Largest row count any table of a [`small_case`] bundle may have.
pub const MAX_ROWS: usize = 3;

/// A random three-day case with at most [`MAX_ROWS`] rows per table.
pub fn small_case(rng: &mut impl rand::Rng) -> (TravelQuery, ReferenceBundle) {
    loop {
        let (q, b) = tripwise_core::synth::tiny_case(rng, 5_000);
        if TableKind::ALL.into_iter().all(|k| b.row_count(k) <= MAX_ROWS) {
            return (q, b);
        }
    }
}
