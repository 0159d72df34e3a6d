//! Solver-backed mock agent with seeded fault injection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use tripwise_core::constraints::ids;
use tripwise_core::model::{Place, Plan};
use tripwise_core::promptgen::exemplar_constraint_ids;
use tripwise_core::solver::{generate_plan, Objective, SearchConfig};
use tripwise_core::{write_plan, ReferenceBundle, Registry, TravelQuery};

use crate::{AgentError, MockConfig};

/// Constraint ids the mock knows how to break.
pub const SUPPORTED_FAULTS: [&str; 6] = [
    ids::BUDGET,
    ids::COMPLETE_INFORMATION,
    ids::DIVERSE_ATTRACTIONS,
    ids::DIVERSE_RESTAURANTS,
    ids::WITHIN_CURRENT_CITY,
    ids::WITHIN_SANDBOX,
];

fn rng_for(seed: u64, q: &TravelQuery) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(q.id.as_bytes());
    let digest = h.finalize();
    let mut s = [0u8; 32];
    s.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(s)
}

pub(crate) fn plan(prompt: &str, q: &TravelQuery, b: &ReferenceBundle, cfg: &MockConfig) -> Result<String, AgentError> {
    let mut plan =
        generate_plan(q, b, &SearchConfig::default()).map_err(|e| AgentError::MockInfeasible(e.to_string()))?;
    let suppressed = if cfg.prompt_sensitive {
        exemplar_constraint_ids(prompt)
    } else {
        Default::default()
    };
    let mut rng = rng_for(cfg.seed, q);
    for (id, p) in &cfg.fault_profile {
        let draw: f64 = rng.gen();
        if draw >= *p || suppressed.contains(id) {
            continue;
        }
        if !inject(id, &mut plan, q, b) {
            log::debug!("query {}: fault {id} has nothing to act on", q.id);
        }
    }
    Ok(write_plan(&plan))
}

/// Applies one fault. Returns false when the plan offers nothing to break.
pub fn inject(id: &str, plan: &mut Plan, q: &TravelQuery, b: &ReferenceBundle) -> bool {
    match id {
        ids::BUDGET => {
            let cfg = SearchConfig::default().with_objective(Objective::MaxCost).disable(ids::BUDGET);
            match generate_plan(q, b, &cfg) {
                Ok(p) => {
                    *plan = p;
                    true
                }
                Err(_) => false,
            }
        }
        ids::COMPLETE_INFORMATION => plan.days.first_mut().and_then(|d| d.accommodation.take()).is_some(),
        ids::DIVERSE_ATTRACTIONS => {
            let Some((i, a)) = plan.days.iter().enumerate().find_map(|(i, d)| d.attraction.clone().map(|a| (i, a)))
            else {
                return false;
            };
            match (0..plan.days.len()).find(|&j| j != i && plan.days[j].current_city.contains(&a.city)) {
                Some(j) => {
                    plan.days[j].attraction = Some(a);
                    true
                }
                None => false,
            }
        }
        ids::DIVERSE_RESTAURANTS => {
            // Copy one meal over another slot, preferring a copy that leaves
            // cuisine coverage and the budget intact.
            let mut candidates = Vec::new();
            for d in &plan.days {
                for m in [&d.breakfast, &d.lunch, &d.dinner].into_iter().flatten() {
                    for (j, e) in plan.days.iter().enumerate() {
                        if !e.current_city.contains(&m.city) {
                            continue;
                        }
                        for slot in 0..3 {
                            let mut c = plan.clone();
                            let target = match slot {
                                0 => &mut c.days[j].breakfast,
                                1 => &mut c.days[j].lunch,
                                _ => &mut c.days[j].dinner,
                            };
                            if target.as_ref() == Some(m) {
                                continue;
                            }
                            *target = Some(m.clone());
                            candidates.push(c);
                        }
                    }
                }
            }
            let registry = Registry::full();
            let wanted = [ids::DIVERSE_RESTAURANTS];
            let pick = candidates
                .iter()
                .position(|c| registry.failures(c, q, b) == wanted)
                .or((!candidates.is_empty()).then_some(0));
            match pick {
                Some(k) => {
                    *plan = candidates.swap_remove(k);
                    true
                }
                None => false,
            }
        }
        ids::WITHIN_SANDBOX => match plan.days.iter_mut().find(|d| !d.current_city.is_travel()) {
            Some(d) => {
                let city = d.current_city.end_city().to_string();
                d.attraction = Some(Place::new("Unlisted Landmark", city));
                true
            }
            None => false,
        },
        ids::WITHIN_CURRENT_CITY => {
            for d in &mut plan.days {
                if let Some(a) = b.attractions.iter().find(|a| !d.current_city.contains(&a.city)) {
                    d.attraction = Some(Place::new(&a.name, &a.city));
                    return true;
                }
            }
            false
        }
        _ => false,
    }
}
