use super::space::Space;
use super::{check_query, SolverError};
use crate::constraints::Registry;
use crate::model::{plan_total_cost, Plan, ReferenceBundle, TravelQuery};
use crate::money::Money;

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Size of the enumerated space, attraction choices included.
    pub total: u128,
    /// Every assembly that passes the registry, in enumeration order.
    pub feasible: Vec<(Plan, Money)>,
}

impl OracleResult {
    pub fn min_cost(&self) -> Option<Money> {
        self.feasible.iter().map(|(_, c)| *c).min()
    }
}

/// Enumerates every well-formed assembly and keeps those that pass
/// `registry`. Refuses spaces larger than `cap`.
pub fn brute_force_oracle(
    q: &TravelQuery,
    b: &ReferenceBundle,
    registry: &Registry,
    cap: u64,
) -> Result<OracleResult, SolverError> {
    check_query(q)?;
    let space = Space::new(q, b);
    let total = space.full_product();
    if total > cap as u128 {
        return Err(SolverError::CapExceeded { product: total, cap });
    }
    let mut radix: Vec<usize> = Vec::new();
    radix.extend(space.legs.iter().map(|l| l.options.len()));
    radix.extend(space.stays.iter().map(|s| s.options.len()));
    radix.extend(space.meals.iter().map(|m| m.combos.len()));
    radix.extend(space.attractions.iter().map(|a| a.len() + 1));
    let mut feasible = Vec::new();
    if total == 0 {
        return Ok(OracleResult { total, feasible });
    }
    let (nl, ns, nm) = (space.legs.len(), space.stays.len(), space.meals.len());
    let mut digits = vec![0usize; radix.len()];
    loop {
        let attractions: Vec<Option<usize>> = digits[nl + ns + nm..]
            .iter()
            .zip(&space.attractions)
            .map(|(&d, eligible)| if d == 0 { None } else { Some(eligible[d - 1]) })
            .collect();
        let plan = space.assemble(&digits[..nl], &digits[nl..nl + ns], &digits[nl + ns..nl + ns + nm], &attractions);
        if registry.failures(&plan, q, b).is_empty() {
            let cost = plan_total_cost(&plan, q, b).expect("assemblies reference only bundle rows");
            feasible.push((plan, cost));
        }
        let mut k = radix.len();
        loop {
            if k == 0 {
                return Ok(OracleResult { total, feasible });
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < radix[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Difficulty {
    pub feasible: u64,
    pub total: u64,
}

impl Difficulty {
    /// Share of well-formed assemblies that satisfy every constraint.
    pub fn feasible_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.feasible as f64 / self.total as f64
        }
    }

    /// One minus the feasible fraction.
    pub fn score(&self) -> f64 {
        1.0 - self.feasible_fraction()
    }
}

pub fn difficulty_score(q: &TravelQuery, b: &ReferenceBundle, cap: u64) -> Result<Difficulty, SolverError> {
    let r = brute_force_oracle(q, b, &Registry::full(), cap)?;
    Ok(Difficulty {
        feasible: r.feasible.len() as u64,
        total: r.total as u64,
    })
}
