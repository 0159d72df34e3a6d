mod common;

use common::{query, single_candidate, two_cities, two_city_query, SINGLE_PLAN};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tripwise_core::constraints::{ids, Registry};
use tripwise_core::solver::{
    brute_force_oracle, difficulty_score, generate_plan, route_labels, solve, Objective, SearchConfig, SolverError,
    Strategy,
};
use tripwise_core::synth::tiny_case;
use tripwise_core::{plan_total_cost, write_plan};

fn exhaustive() -> SearchConfig {
    SearchConfig {
        exhaustive_cap: u64::MAX,
        ..SearchConfig::exhaustive()
    }
}

#[test]
fn single_candidate_is_found_by_every_strategy() {
    let q = query(serde_json::json!({}));
    let b = single_candidate();
    for strategy in [Strategy::Greedy, Strategy::Beam, Strategy::Exhaustive] {
        let cfg = SearchConfig {
            strategy,
            ..Default::default()
        };
        let p = generate_plan(&q, &b, &cfg).unwrap();
        assert_eq!(write_plan(&p), SINGLE_PLAN, "{strategy:?}");
    }
    let oracle = brute_force_oracle(&q, &b, &Registry::full(), 1_000_000).unwrap();
    assert_eq!(oracle.feasible.len(), 1);
    assert_eq!(write_plan(&oracle.feasible[0].0), SINGLE_PLAN);
}

#[test]
fn empty_accommodations_is_infeasible() {
    let q = query(serde_json::json!({}));
    let mut b = single_candidate();
    b.accommodations.clear();
    let err = generate_plan(&q, &b, &SearchConfig::default()).unwrap_err();
    let inf = err.infeasible().expect("infeasible");
    assert_eq!(inf.constraint_id, ids::WITHIN_SANDBOX);
    assert_eq!(inf.explanation, "no accommodation in Denver");
    let oracle = brute_force_oracle(&q, &b, &Registry::full(), 1_000_000).unwrap();
    assert!(oracle.feasible.is_empty());
}

#[test]
fn over_budget_names_budget() {
    let q = query(serde_json::json!({"budget": 1000}));
    let err = generate_plan(&q, &single_candidate(), &SearchConfig::exhaustive()).unwrap_err();
    let inf = err.infeasible().unwrap();
    assert_eq!(inf.constraint_id, ids::BUDGET);
    assert!(inf.explanation.contains("$1140"), "{}", inf.explanation);
}

#[test]
fn house_rules_filter_names_room_rules() {
    let q = query(serde_json::json!({"house_rules": ["smoking"]}));
    let err = generate_plan(&q, &single_candidate(), &SearchConfig::default()).unwrap_err();
    let inf = err.infeasible().unwrap();
    assert_eq!(inf.constraint_id, ids::ROOM_RULES);
    assert_eq!(inf.explanation, "no accommodation satisfies room rules in Denver");
}

#[test]
fn too_few_restaurants_names_complete_information() {
    let q = query(serde_json::json!({}));
    let mut b = single_candidate();
    b.restaurants.pop();
    let err = generate_plan(&q, &b, &SearchConfig::default()).unwrap_err();
    assert_eq!(err.infeasible().unwrap().constraint_id, ids::COMPLETE_INFORMATION);
    let relaxed = SearchConfig::default().disable(ids::COMPLETE_INFORMATION);
    let p = generate_plan(&q, &b, &relaxed).unwrap();
    assert!(p.days[1].dinner.is_none());
}

#[test]
fn cuisine_lookahead() {
    let q = query(serde_json::json!({"cuisines": ["Thai"]}));
    let err = generate_plan(&q, &single_candidate(), &SearchConfig::default()).unwrap_err();
    let inf = err.infeasible().unwrap();
    assert_eq!(inf.constraint_id, ids::CUISINE);
    assert_eq!(inf.explanation, "no restaurant on the route serves Thai");
}

#[test]
fn transport_preference_is_respected() {
    let b = two_cities();
    let q = two_city_query(serde_json::json!({"transport_prefs": ["no-flight"]}));
    let err = generate_plan(&q, &b, &SearchConfig::default()).unwrap_err();
    let inf = err.infeasible().unwrap();
    assert_eq!(inf.constraint_id, ids::TRANSPORTATION_PREFERENCE);
    assert!(inf.explanation.contains("from Austin to Denver on day 1"));

    let q = two_city_query(serde_json::json!({"transport_prefs": ["no-self-driving"]}));
    let p = generate_plan(&q, &b, &SearchConfig::default()).unwrap();
    let text = write_plan(&p);
    assert!(!text.contains("Self-driving"), "{text}");
}

#[test]
fn no_mixing_flights_and_driving() {
    let b = two_cities();
    let q = two_city_query(serde_json::json!({"budget": 100000}));
    let p = generate_plan(&q, &b, &exhaustive()).unwrap();
    let text = write_plan(&p);
    assert!(text.contains("Flight Number"));
    assert!(!text.contains("Self-driving"), "{text}");
}

#[test]
fn min_cost_matches_oracle_minimum() {
    let b = two_cities();
    let q = two_city_query(serde_json::json!({"n_people": 3}));
    let s = solve(&q, &b, &exhaustive()).unwrap();
    assert_eq!(plan_total_cost(&s.plan, &q, &b).unwrap(), s.cost);
    let beam = solve(&q, &b, &SearchConfig::default()).unwrap();
    assert_eq!(beam.cost, s.cost);
    let max = solve(&q, &b, &exhaustive().with_objective(Objective::MaxCost).disable(ids::BUDGET)).unwrap();
    assert!(max.cost > s.cost);
    let first = solve(&q, &b, &exhaustive().with_objective(Objective::FirstFeasible)).unwrap();
    assert!(Registry::full().failures(&first.plan, &q, &b).is_empty());
}

#[test]
fn beam_matches_exhaustive_on_tiny_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut compared = 0;
    for _ in 0..200 {
        let (q, b) = tiny_case(&mut rng, 50_000);
        let ex = solve(&q, &b, &SearchConfig::exhaustive());
        let beam = solve(&q, &b, &SearchConfig::default());
        match (ex, beam) {
            (Ok(e), Ok(m)) => {
                assert_eq!(e.cost, m.cost, "{}", q.id);
                compared += 1;
            }
            (Err(SolverError::Infeasible(_)), Err(SolverError::Infeasible(_))) => {}
            (Ok(e), Err(m)) => panic!("beam missed {}: {m} vs {}", q.id, write_plan(&e.plan)),
            (e, m) => panic!("mismatch on {}: {e:?} vs {m:?}", q.id),
        }
    }
    assert!(compared > 40, "only {compared} feasible cases");
}

#[test]
fn exhaustive_agrees_with_library_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..40 {
        let (q, b) = tiny_case(&mut rng, 4_000);
        let oracle = brute_force_oracle(&q, &b, &Registry::full(), 1_000_000).unwrap();
        match solve(&q, &b, &SearchConfig::exhaustive()) {
            Ok(s) => {
                assert_eq!(Some(s.cost), oracle.min_cost(), "{}", q.id);
                assert!(oracle.feasible.iter().any(|(p, _)| *p == s.plan));
            }
            Err(SolverError::Infeasible(_)) => assert!(oracle.feasible.is_empty(), "{}", q.id),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn deterministic_output() {
    let b = two_cities();
    let q = two_city_query(serde_json::json!({}));
    let cfg = SearchConfig {
        random_seed: 17,
        ..Default::default()
    };
    let a = write_plan(&generate_plan(&q, &b, &cfg).unwrap());
    let c = write_plan(&generate_plan(&q, &b, &cfg).unwrap());
    assert_eq!(a, c);
}

#[test]
fn cap_and_validation() {
    let b = two_cities();
    let q = two_city_query(serde_json::json!({}));
    let cfg = SearchConfig {
        exhaustive_cap: 10,
        ..SearchConfig::exhaustive()
    };
    assert!(matches!(generate_plan(&q, &b, &cfg), Err(SolverError::CapExceeded { cap: 10, .. })));
    assert!(matches!(
        brute_force_oracle(&q, &b, &Registry::full(), 10),
        Err(SolverError::CapExceeded { .. })
    ));
    let bad = query(serde_json::json!({"n_days": 4}));
    assert!(matches!(generate_plan(&bad, &b, &SearchConfig::default()), Err(SolverError::InvalidQuery(_))));
}

#[test]
fn difficulty_is_a_fraction() {
    let q = query(serde_json::json!({}));
    let d = difficulty_score(&q, &single_candidate(), 1_000_000).unwrap();
    assert_eq!(d.feasible, 1);
    assert!(d.total > 1);
    assert!(d.score() > 0.0 && d.score() < 1.0);
}

#[test]
fn route_is_forced() {
    let q = two_city_query(serde_json::json!({}));
    let labels: Vec<String> = route_labels(&q).iter().map(|c| c.to_string()).collect();
    assert_eq!(
        labels,
        ["from Austin to Denver", "Denver", "from Denver to Boise", "Boise", "from Boise to Austin"]
    );
}
