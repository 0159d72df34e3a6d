use proptest::prelude::*;
use tripwise_core::constraints::{Category, ConstraintOutcome, Registry, Status};
use tripwise_core::metrics::render_table;
use tripwise_core::{compute_metrics, diff_reports, Percent, PlanEvaluation};

fn registry() -> Vec<String> {
    Registry::full().ids()
}

fn outcome(id: &str, category: Category, status: Status) -> ConstraintOutcome {
    ConstraintOutcome {
        constraint_id: id.to_string(),
        category,
        status,
        message: String::new(),
        evidence: Vec::new(),
    }
}

/// A plan with the given per-checker verdicts: commonsense ids first, then
/// hard ids, in catalogue order.
fn plan(id: &str, commonsense: &[bool], hard: &[bool]) -> PlanEvaluation {
    let reg = Registry::full();
    let cs = reg.entries().iter().filter(|d| d.category == Category::Commonsense);
    let hd = reg.entries().iter().filter(|d| d.category == Category::Hard);
    let st = |ok: bool| if ok { Status::Pass } else { Status::Fail };
    let mut outcomes: Vec<_> = cs.zip(commonsense).map(|(d, &ok)| outcome(d.id, d.category, st(ok))).collect();
    outcomes.extend(hd.zip(hard).map(|(d, &ok)| outcome(d.id, d.category, st(ok))));
    PlanEvaluation {
        query_id: id.to_string(),
        delivered: true,
        outcomes,
    }
}

fn pct(s: &str) -> Percent {
    s.parse().unwrap()
}

#[test]
fn fourteen_of_sixteen() {
    let a = plan("a", &[true; 8], &[true]);
    let mut b_cs = [true; 8];
    b_cs[0] = false;
    b_cs[5] = false;
    let b = plan("b", &b_cs, &[true]);
    let r = compute_metrics("run", &registry(), vec![a, b]).unwrap();
    assert_eq!(r.commonsense_micro, pct("87.50"));
    assert_eq!(r.commonsense_macro, pct("50.00"));
    assert_eq!(r.final_pass_rate, pct("50.00"));
    assert_eq!(r.hard_micro, Percent::HUNDRED);
}

#[test]
fn five_of_one_eighty() {
    let plans: Vec<_> = (0..180)
        .map(|i| {
            let ok = i < 5;
            plan(&format!("q{i}"), &[ok; 8], &[true])
        })
        .collect();
    let r = compute_metrics("run", &registry(), plans).unwrap();
    assert_eq!(r.final_pass_rate.to_string(), "2.78");
}

#[test]
fn all_pass_is_hundred() {
    let plans = vec![plan("a", &[true; 8], &[true, true]), plan("b", &[true; 8], &[true])];
    let r = compute_metrics("run", &registry(), plans).unwrap();
    assert!(r.values().iter().all(|v| *v == Percent::HUNDRED));
}

#[test]
fn not_applicable_is_outside_denominators() {
    let mut p = plan("a", &[true; 8], &[false]);
    p.outcomes.push(outcome("cuisine", Category::Hard, Status::NotApplicable));
    let mut q = plan("b", &[true; 8], &[true]);
    q.outcomes.push(outcome("cuisine", Category::Hard, Status::NotApplicable));
    let r = compute_metrics("run", &registry(), vec![p, q]).unwrap();
    assert_eq!(r.hard_micro, pct("50.00"));
    assert_eq!(r.hard_macro, pct("50.00"));
}

#[test]
fn paper_style_delta() {
    let make = |pass: usize| {
        let plans: Vec<_> = (0..180)
            .map(|i| plan(&format!("q{i}"), &[i < pass; 8], &[true]))
            .collect();
        compute_metrics("run", &registry(), plans).unwrap()
    };
    let r0 = make(5);
    let r1 = make(12);
    assert_eq!(r1.final_pass_rate.to_string(), "6.67");
    let d = diff_reports(&r0, &r1).unwrap();
    assert_eq!(d.final_pass_rate.signed(), "+3.89");
    let same = diff_reports(&r0, &r0).unwrap();
    assert!(same.values().iter().all(|v| *v == Percent::ZERO));
    let table = render_table(&[("R0", &r0), ("R1", &r1)]);
    assert!(table.contains("6.67 (+3.89)"), "{table}");
}

#[test]
fn hand_subtracted_deltas() {
    // a: micro 15/16, macro 1/2; b: micro 16/16, macro 2/2.
    let mut cs = [true; 8];
    cs[3] = false;
    let a = compute_metrics("a", &registry(), vec![plan("x", &cs, &[true]), plan("y", &[true; 8], &[true])]).unwrap();
    let b = compute_metrics("b", &registry(), vec![plan("x", &[true; 8], &[true]), plan("y", &[true; 8], &[true])]).unwrap();
    let d = diff_reports(&a, &b).unwrap();
    assert_eq!(a.commonsense_micro, pct("93.75"));
    assert_eq!(d.commonsense_micro, pct("6.25"));
    assert_eq!(d.commonsense_macro, pct("50.00"));
    assert_eq!(d.final_pass_rate, pct("50.00"));
    assert_eq!(d.hard_macro, Percent::ZERO);
}

#[test]
fn empty_run_is_an_error() {
    assert!(compute_metrics("run", &registry(), Vec::new()).is_err());
}

#[test]
fn half_up_rounding() {
    assert_eq!(Percent::from_ratio(10, 180).to_string(), "5.56");
    assert_eq!(Percent::from_ratio(12, 180).to_string(), "6.67");
    assert_eq!(Percent::from_ratio(1, 8).to_string(), "12.50");
}

/// Plans with the same number of applicable checks per category.
fn uniform_run() -> impl Strategy<Value = Vec<PlanEvaluation>> {
    (1usize..=5).prop_flat_map(|n_hard| {
        prop::collection::vec(
            (prop::collection::vec(prop::bool::weighted(0.8), 8), prop::collection::vec(prop::bool::weighted(0.7), n_hard), any::<bool>()),
            1..25,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (cs, hd, delivered))| {
                    let mut p = plan(&format!("q{i}"), &cs, &hd);
                    p.delivered = delivered;
                    p
                })
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn final_below_both_macros(plans in uniform_run()) {
        let r = compute_metrics("run", &registry(), plans).unwrap();
        prop_assert!(r.final_pass_rate <= r.commonsense_macro);
        prop_assert!(r.final_pass_rate <= r.hard_macro);
    }

    #[test]
    fn micro_at_least_macro(plans in uniform_run()) {
        let r = compute_metrics("run", &registry(), plans).unwrap();
        prop_assert!(r.commonsense_micro >= r.commonsense_macro);
        prop_assert!(r.hard_micro >= r.hard_macro);
    }

    #[test]
    fn order_does_not_matter(plans in uniform_run(), seed in any::<u64>()) {
        let a = compute_metrics("run", &registry(), plans.clone()).unwrap();
        let mut shuffled = plans;
        let n = shuffled.len();
        shuffled.rotate_left((seed as usize) % n);
        shuffled.reverse();
        let b = compute_metrics("run", &registry(), shuffled).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn duplication_does_not_matter(plans in uniform_run()) {
        let a = compute_metrics("run", &registry(), plans.clone()).unwrap();
        let doubled: Vec<_> = plans.iter().chain(plans.iter()).cloned().collect();
        let b = compute_metrics("run", &registry(), doubled).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }
}
