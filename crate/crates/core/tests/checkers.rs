mod common;

use common::{query, single_candidate, two_cities, two_city_query, SINGLE_PLAN};
use proptest::prelude::*;
use tripwise_core::constraints::{check_diverse_attractions, check_room_rules, ids, Category, Registry, Status};
use tripwise_core::model::Place;
use tripwise_core::solver::{generate_plan, SearchConfig};
use tripwise_core::{check_plan, parse_plan, write_plan, Money, ParsedPlanResult};

fn statuses(outcomes: &[tripwise_core::ConstraintOutcome]) -> Vec<(&str, Status)> {
    outcomes.iter().map(|o| (o.constraint_id.as_str(), o.status)).collect()
}

#[test]
fn undelivered_fails_every_applicable_checker() {
    let q = query(serde_json::json!({"cuisines": ["Japanese"]}));
    let b = single_candidate();
    let out = check_plan(&ParsedPlanResult::NotDelivered { reason: "no day blocks".into() }, &q, &b);
    assert_eq!(out.len(), 10);
    assert!(out.iter().all(|o| o.status == Status::Fail && o.message == "not delivered"));
    assert_eq!(out.iter().filter(|o| o.category == Category::Commonsense).count(), 8);
    let hard: Vec<_> = out.iter().filter(|o| o.category == Category::Hard).map(|o| o.constraint_id.as_str()).collect();
    assert_eq!(hard, [ids::BUDGET, ids::CUISINE]);
}

#[test]
fn single_plan_passes() {
    let q = query(serde_json::json!({}));
    let b = single_candidate();
    let p = parse_plan(SINGLE_PLAN, &q);
    let out = check_plan(&p, &q, &b);
    assert_eq!(out.len(), 9);
    assert!(out.iter().all(|o| o.status == Status::Pass), "{:?}", statuses(&out));
}

#[test]
fn solver_plan_passes_everything() {
    let q = two_city_query(serde_json::json!({
        "house_rules": ["parties"],
        "room_types": ["entire-room"],
        "cuisines": ["Mexican"],
    }));
    let b = two_cities();
    let plan = generate_plan(&q, &b, &SearchConfig::default()).unwrap();
    let out = check_plan(&plan.clone().into(), &q, &b);
    assert_eq!(out.len(), 12);
    assert!(out.iter().all(|o| o.status == Status::Pass), "{:?}\n{}", statuses(&out), write_plan(&plan));
}

#[test]
fn only_budget_fails() {
    let b = single_candidate();
    // Cost of the single plan for two: flights 400 + 360, meals 140, lodging 240 = 1140.
    let q = query(serde_json::json!({"budget": 1140}));
    let plan = parse_plan(SINGLE_PLAN, &q);
    assert!(check_plan(&plan, &q, &b).iter().all(|o| o.status == Status::Pass));
    let mut pricier = b.clone();
    pricier.restaurants[0].average_cost = Money::from_dollars(26);
    let out = check_plan(&plan, &q, &pricier);
    let failed: Vec<_> = out.iter().filter(|o| o.failed()).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].constraint_id, "budget");
    assert_eq!(failed[0].message, "total cost $1142 exceeds budget $1140");
}

#[test]
fn budget_boundary_is_inclusive() {
    let b = single_candidate();
    let plan = parse_plan(SINGLE_PLAN, &query(serde_json::json!({})));
    let at = query(serde_json::json!({"budget": 1140}));
    let under = query(serde_json::json!({"budget": "1139.99"}));
    let budget = |q| {
        check_plan(&plan, q, &b)
            .into_iter()
            .find(|o| o.constraint_id == "budget")
            .unwrap()
            .status
    };
    assert_eq!(budget(&at), Status::Pass);
    assert_eq!(budget(&under), Status::Fail);
}

#[test]
fn room_rules_names_only_the_conflicting_stay() {
    let q = two_city_query(serde_json::json!({"house_rules": ["smoking"]}));
    let b = two_cities();
    let plan = generate_plan(&q, &b, &SearchConfig::default().disable(ids::ROOM_RULES)).unwrap();
    let mut plan = plan;
    for d in &mut plan.days[..2] {
        d.accommodation = Some(Place::new("Maple Inn", "Denver"));
    }
    for d in &mut plan.days[2..4] {
        d.accommodation = Some(Place::new("River House", "Boise"));
    }
    let o = check_room_rules(&plan, &q, &b);
    assert_eq!(o.status, Status::Fail);
    assert_eq!(o.evidence.len(), 1);
    assert_eq!(o.evidence[0].day, Some(1));
    assert!(o.evidence[0].detail.contains("Maple Inn"));
    assert!(!o.evidence[0].detail.contains("River House"));
    assert!(o.evidence[0].detail.contains("no-smoking"));

    let none = query(serde_json::json!({}));
    assert_eq!(check_room_rules(&plan, &none, &b).status, Status::NotApplicable);
}

#[test]
fn repeated_attractions() {
    let q = query(serde_json::json!({}));
    let b = single_candidate();
    let mut plan = parse_plan(SINGLE_PLAN, &q).plan().cloned().unwrap();
    let x = Place::new("Red Rocks", "Denver");
    plan.days[0].attraction = Some(x.clone());
    plan.days[2].attraction = Some(x.clone());
    let o = check_diverse_attractions(&plan, &q, &b);
    assert_eq!(o.status, Status::Fail);
    assert_eq!(o.evidence.iter().map(|e| e.day).collect::<Vec<_>>(), [Some(1), Some(3)]);

    plan.days[1].attraction = Some(x);
    plan.days[2].attraction = None;
    let o = check_diverse_attractions(&plan, &q, &b);
    assert_eq!(o.evidence.iter().map(|e| e.day).collect::<Vec<_>>(), [Some(1), Some(2)]);

    plan.days[1].attraction = Some(Place::new("Union Station", "Denver"));
    assert_eq!(check_diverse_attractions(&plan, &q, &b).status, Status::Pass);
}

#[test]
fn registry_can_drop_checkers() {
    let reg = Registry::without(&["budget", "cuisine"]).unwrap();
    assert_eq!(reg.entries().len(), 11);
    assert!(Registry::without(&["bogus"]).is_err());
    let q = query(serde_json::json!({}));
    let out = reg.check_plan(&ParsedPlanResult::NotDelivered { reason: "x".into() }, &q, &single_candidate());
    assert_eq!(out.len(), 8);
}

fn mutated_plan() -> impl Strategy<Value = String> {
    let lines: Vec<&'static str> = SINGLE_PLAN.lines().collect();
    prop::collection::vec((0..lines.len(), 0usize..6), 0..4).prop_map(move |edits| {
        let mut ls: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        for (i, kind) in edits {
            let i = i % ls.len();
            match kind {
                0 => ls[i] = ls[i].replace("Denver", "Boise"),
                1 => ls[i] = ls[i].replace("Rioja", "Snooze"),
                2 => ls[i] = ls[i].replace(": -", ": Red Rocks, Denver"),
                3 => ls[i] = ls[i].replace("F1", "F2"),
                4 => {
                    ls.remove(i);
                }
                _ => ls[i] = ls[i].replace("Maple Inn, Denver", "-"),
            }
        }
        ls.join("\n")
    })
}

proptest! {
    #[test]
    fn totality_and_evidence(text in mutated_plan(), cuisine in any::<bool>()) {
        let q = if cuisine {
            query(serde_json::json!({"cuisines": ["Japanese"], "room_types": ["shared-room"]}))
        } else {
            query(serde_json::json!({}))
        };
        let b = single_candidate();
        let parsed = parse_plan(&text, &q);
        let out = check_plan(&parsed, &q, &b);
        let reg = Registry::full();
        prop_assert_eq!(out.len(), reg.applicable(&q).count());
        for o in &out {
            let d = tripwise_core::constraints::descriptor(&o.constraint_id).unwrap();
            prop_assert_eq!(o.category, d.category);
            prop_assert_eq!(o.status == Status::Fail, !o.evidence.is_empty());
            prop_assert!(o.status != Status::NotApplicable);
        }
    }
}
