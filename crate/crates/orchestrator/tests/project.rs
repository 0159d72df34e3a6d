mod common;

use std::collections::BTreeMap;

use tripwise_agents::BackendConfig;
use tripwise_core::constraints::ids;
use tripwise_core::model::Split;
use tripwise_core::promptgen::DEFAULT_EPS;
use tripwise_core::solver::{generate_plan, SearchConfig};
use tripwise_core::{write_plan, Percent, Status};
use tripwise_orchestrator::{OrchError, Project};

#[test]
fn clean_mock_delivers_and_passes_everything() {
    let (_d, p) = common::project(8, 3);
    let r = p.run_evaluation(Split::Train, None, &BackendConfig::mock()).unwrap();
    assert_eq!(r.artifacts.len(), 8);
    assert_eq!(r.report.delivery_rate, Percent::HUNDRED);
    assert_eq!(r.report.final_pass_rate, Percent::HUNDRED);
    assert_eq!(r.revision_id, "R0");
    let v = p.run_evaluation(Split::Validation, None, &BackendConfig::mock()).unwrap();
    assert_eq!(v.artifacts.len(), 3);
    assert_ne!(v.run_id, r.run_id);
}

#[test]
fn empty_split_is_rejected() {
    let (_d, p) = common::project(4, 0);
    let err = p.run_evaluation(Split::Validation, None, &BackendConfig::mock()).unwrap_err();
    assert!(matches!(err, OrchError::Validation(ref m) if m.contains("no plans")), "{err}");
    assert!(p.runs().list().is_empty());
}

#[test]
fn unknown_revision_is_rejected() {
    let (_d, p) = common::project(2, 0);
    let err = p.run_evaluation(Split::Train, Some(3), &BackendConfig::mock()).unwrap_err();
    assert!(matches!(err, OrchError::UnknownRevision(3)));
}

#[test]
fn budget_fault_zeroes_hard_macro() {
    let (_d, p) = common::project(6, 0);
    let cfg = BackendConfig::mock_with_fault(ids::BUDGET, 1.0, false);
    let r = p.run_evaluation(Split::Train, None, &cfg).unwrap();
    for plan in &r.report.plans {
        let budget = plan.outcomes.iter().find(|o| o.constraint_id == ids::BUDGET).unwrap();
        assert_eq!(budget.status, Status::Fail);
    }
    assert_eq!(r.report.hard_macro, Percent::ZERO);
    assert_eq!(r.report.commonsense_macro, Percent::HUNDRED);
}

#[test]
fn stored_records_reproduce_their_reports() {
    let (d, p) = common::project(6, 0);
    let mut profile = tripwise_agents::MockConfig::default();
    profile.fault_profile.insert(ids::DIVERSE_RESTAURANTS.into(), 0.5);
    profile.fault_profile.insert(ids::WITHIN_SANDBOX.into(), 0.5);
    let r = p.run_evaluation(Split::Train, None, &BackendConfig::ScriptedMock(profile)).unwrap();
    assert!(r.is_consistent());
    assert_eq!(r.recompute().unwrap(), r.report);
    let prompt = p.runs().get_text(&r.artifacts[0].prompt).unwrap();
    assert!(prompt.contains("## Rules"));
    drop(p);
    let reopened = Project::open(d.path()).unwrap();
    let back = reopened.load_run(&r.run_id).unwrap();
    assert_eq!(back, r);
    assert_eq!(reopened.ledger().get(0).unwrap().metrics_snapshot.as_ref(), Some(&r.report));
}

#[test]
fn loop_without_faults_stops_after_one_iteration() {
    let (_d, p) = common::project(5, 0);
    let out = p.run_loop(5, DEFAULT_EPS, Split::Train, &BackendConfig::mock()).unwrap();
    assert_eq!(out.records.len(), 1);
    assert!(out.converged);
    assert_eq!(p.ledger().revisions().len(), 1);
}

#[test]
fn loop_with_taught_fault_improves() {
    let (_d, p) = common::project(5, 0);
    let cfg = BackendConfig::mock_with_fault(ids::DIVERSE_ATTRACTIONS, 1.0, true);
    let out = p.run_loop(4, DEFAULT_EPS, Split::Train, &cfg).unwrap();
    assert!(out.records.len() >= 2);
    assert!(out.records[1].report.final_pass_rate > out.records[0].report.final_pass_rate);
    for (k, r) in out.records.iter().enumerate() {
        assert_eq!(r.revision, k as u32);
    }
    let r1 = p.ledger().get(1).unwrap().clone();
    let ex = p.exemplar(&r1.exemplars[0]).unwrap();
    assert!(ex.failed_constraints.contains(&ids::DIVERSE_ATTRACTIONS.to_string()));
    assert!(p.revision_prompt(1).unwrap().contains("Failed constraints: diverse-attractions"));
}

#[test]
fn loop_respects_max_iters() {
    let (_d, p) = common::project(4, 0);
    let cfg = BackendConfig::mock_with_fault(ids::DIVERSE_ATTRACTIONS, 1.0, true);
    let out = p.run_loop(1, DEFAULT_EPS, Split::Train, &cfg).unwrap();
    assert_eq!(out.records.len(), 1);
    assert!(!out.converged);
    assert!(matches!(
        p.run_loop(0, DEFAULT_EPS, Split::Train, &cfg),
        Err(OrchError::Validation(_))
    ));
}

#[test]
fn loop_never_mines_validation_queries() {
    let (_d, p) = common::project(2, 2);
    let err = p.run_loop(3, DEFAULT_EPS, Split::Validation, &BackendConfig::mock()).unwrap_err();
    assert!(matches!(err, OrchError::Validation(_)));
}

#[test]
fn failures_group_by_constraint_and_match_the_outcome_matrix() {
    let (_d, p) = common::project(10, 0);
    let clean = p.run_evaluation(Split::Train, None, &BackendConfig::mock()).unwrap();
    assert!(p.list_failures(&clean.run_id).unwrap().is_empty());

    let mut profile = tripwise_agents::MockConfig { seed: 5, ..Default::default() };
    for id in tripwise_agents::SUPPORTED_FAULTS {
        profile.fault_profile.insert(id.to_string(), 0.4);
    }
    let r = p.run_evaluation(Split::Train, None, &BackendConfig::ScriptedMock(profile)).unwrap();
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for plan in &r.report.plans {
        for o in &plan.outcomes {
            if o.status == Status::Fail {
                *tally.entry(o.constraint_id.clone()).or_default() += 1;
            }
        }
    }
    let groups = p.list_failures(&r.run_id).unwrap();
    assert!(groups.len() >= 2);
    let got: BTreeMap<String, usize> = groups.iter().map(|g| (g.constraint_id.clone(), g.count)).collect();
    assert_eq!(got, tally);
    for w in groups.windows(2) {
        assert!(w[0].count >= w[1].count);
    }
    for g in &groups {
        assert_eq!(g.items.len(), g.count);
        for item in &g.items {
            assert_eq!(item.outcome.constraint_id, g.constraint_id);
            assert!(!item.raw_text.is_empty());
        }
    }
    assert!(matches!(p.list_failures("run-9999"), Err(OrchError::UnknownRun(_))));
}

#[test]
fn exemplar_submission() {
    let (_d, p) = common::project(4, 1);
    let cfg = BackendConfig::mock_with_fault(ids::DIVERSE_ATTRACTIONS, 1.0, false);
    let r = p.run_evaluation(Split::Train, None, &cfg).unwrap();
    let q = p.queries()[0].clone();
    let fixed = write_plan(&generate_plan(&q, p.bundle(), &SearchConfig::default()).unwrap());
    let id = p.submit_exemplar(&r.run_id, &q.id, &fixed, "one visit per sight").unwrap();
    assert_eq!(p.exemplar(&id).unwrap().failed_constraints, [ids::DIVERSE_ATTRACTIONS]);
    assert_eq!(p.submit_exemplar(&r.run_id, &q.id, &fixed, "one visit per sight").unwrap(), id);

    let still_broken = p.runs().get_text(&r.artifacts[0].raw_text).unwrap();
    match p.submit_exemplar(&r.run_id, &q.id, &still_broken, "") {
        Err(OrchError::ExemplarInvariantViolation { failing, .. }) => assert_eq!(failing, [ids::DIVERSE_ATTRACTIONS]),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        p.submit_exemplar(&r.run_id, "train-999", &fixed, ""),
        Err(OrchError::UnknownQuery(_))
    ));
    assert!(matches!(
        p.submit_exemplar(&r.run_id, &q.id, "Day 1:\nnonsense", ""),
        Err(OrchError::ParseFailure(_))
    ));
    assert!(matches!(p.submit_exemplar("run-0404", &q.id, &fixed, ""), Err(OrchError::UnknownRun(_))));

    let v = p.run_evaluation(Split::Validation, None, &cfg).unwrap();
    let vq = p.split_queries(Split::Validation)[0].clone();
    let vfix = write_plan(&generate_plan(&vq, p.bundle(), &SearchConfig::default()).unwrap());
    assert!(matches!(p.submit_exemplar(&v.run_id, &vq.id, &vfix, ""), Err(OrchError::Validation(_))));
}

#[test]
fn over_budget_correction_is_refused() {
    let (_d, p) = common::project(3, 0);
    let r = p.run_evaluation(Split::Train, None, &BackendConfig::mock_with_fault(ids::BUDGET, 1.0, false)).unwrap();
    let q = &p.queries()[0];
    let same = p.runs().get_text(&r.artifacts[0].raw_text).unwrap();
    match p.submit_exemplar(&r.run_id, &q.id, &same, "") {
        Err(OrchError::ExemplarInvariantViolation { failing, .. }) => assert_eq!(failing, [ids::BUDGET]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn revisions_persist_across_reopen() {
    let (d, p) = common::project(3, 0);
    let r = p.run_evaluation(Split::Train, None, &BackendConfig::mock_with_fault(ids::WITHIN_SANDBOX, 1.0, false)).unwrap();
    let q = p.queries()[1].clone();
    let fixed = write_plan(&generate_plan(&q, p.bundle(), &SearchConfig::default()).unwrap());
    let ex = p.submit_exemplar(&r.run_id, &q.id, &fixed, "use listed sights").unwrap();
    assert!(matches!(p.create_revision(&["ex-missing".into()], None), Err(OrchError::Validation(_))));
    let i = p.create_revision(&[ex.clone()], Some("Follow every rule.".into())).unwrap();
    assert_eq!(i, 1);
    drop(p);
    let p = Project::open(d.path()).unwrap();
    let ledger = p.ledger();
    assert_eq!(ledger.revisions().len(), 2);
    assert_eq!(ledger.latest().exemplars, [ex]);
    assert_eq!(ledger.latest().rule_override.as_deref(), Some("Follow every rule."));
    assert!(d.path().join("revisions/R1.prompt.txt").exists());
    assert!(p.revision_prompt(1).unwrap().contains("Failed constraints: within-sandbox"));
    assert!(matches!(p.revision_prompt(7), Err(OrchError::UnknownRevision(7))));
}

#[test]
fn report_table_shows_deltas() {
    let (_d, p) = common::project(4, 0);
    let a = p.run_evaluation(Split::Train, None, &BackendConfig::mock_with_fault(ids::BUDGET, 1.0, false)).unwrap();
    let b = p.run_evaluation(Split::Train, None, &BackendConfig::mock()).unwrap();
    let t = p.report_table(&[a.run_id.clone(), b.run_id.clone()]).unwrap();
    assert!(t.contains("100.00 (+100.00)"), "{t}");
    assert!(t.lines().nth(2).unwrap().contains(&a.run_id));
}
