use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::space::Space;
use super::{Infeasible, Objective, SearchConfig, Solution, SolverError, Strategy};
use crate::constraints::{descriptor, ids, Registry};
use crate::ingest::write_plan;
use crate::model::{Leg, Plan, RoomType, TransportMode, TransportPref};
use crate::money::Money;

#[derive(Debug, Clone, Copy)]
enum Stage {
    Leg(usize),
    Stay(usize),
    Meal(usize),
}

#[derive(Debug, Clone)]
struct State {
    choices: Vec<usize>,
    cost: Money,
    used: Vec<bool>,
    flight: bool,
    drive: bool,
    cuisine: u64,
    room: u64,
}

struct Leaf {
    plan: Plan,
    cost: Money,
    key: TieKey,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct TieKey {
    accommodations: Vec<String>,
    flights: Vec<String>,
    restaurants: Vec<String>,
    text: String,
}

fn tie_key(p: &Plan) -> TieKey {
    TieKey {
        accommodations: p
            .days
            .iter()
            .filter_map(|d| d.accommodation.as_ref().map(|a| a.name.clone()))
            .collect(),
        flights: p.legs().filter_map(|(_, l)| l.flight_id().map(str::to_string)).collect(),
        restaurants: p.meals().map(|(_, _, r)| r.name.clone()).collect(),
        text: write_plan(p),
    }
}

#[derive(Default)]
struct Stats {
    prunes: BTreeMap<&'static str, u64>,
    closest: Option<(usize, Plan, Vec<&'static str>)>,
    leaves: u64,
}

pub(crate) struct Search<'a> {
    space: Space<'a>,
    registry: Registry,
    objective: Objective,
    stages: Vec<Stage>,
    lb: Vec<Money>,
    ub: Vec<Money>,
    budget: Option<Money>,
    diverse_restaurants: bool,
    no_conflict: bool,
    cuisine_need: u64,
    rest_cuisine: Vec<u64>,
    room_need: u64,
    acc_room: Vec<u64>,
    remaining_cuisine: Vec<u64>,
    remaining_room: Vec<u64>,
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn infeasible(id: &str, explanation: impl Into<String>) -> SolverError {
    SolverError::Infeasible(Infeasible {
        constraint_id: id.to_string(),
        explanation: explanation.into(),
    })
}

impl<'a> Search<'a> {
    pub fn prepare(mut space: Space<'a>, registry: Registry, objective: Objective) -> Result<Self, SolverError> {
        let q = space.q;
        let b = space.b;
        let active = registry.clone();
        let on = |id: &str| active.contains(id) && descriptor(id).is_some_and(|d| d.applicable(q));

        let forbid_flight = on(ids::TRANSPORTATION_PREFERENCE) && q.transport_prefs.contains(&TransportPref::NoFlight);
        let forbid_drive =
            on(ids::TRANSPORTATION_PREFERENCE) && q.transport_prefs.contains(&TransportPref::NoSelfDriving);
        for slot in &mut space.legs {
            let day = slot.day_idx + 1;
            if slot.options.is_empty() {
                return Err(infeasible(
                    ids::WITHIN_SANDBOX,
                    format!("no flight or ground route from {} to {} on day {day}", slot.from, slot.to),
                ));
            }
            slot.options.retain(|o| match o.leg.mode() {
                TransportMode::Flight => !forbid_flight,
                TransportMode::SelfDriving => !forbid_drive,
                TransportMode::Taxi => true,
            });
            if slot.options.is_empty() {
                return Err(infeasible(
                    ids::TRANSPORTATION_PREFERENCE,
                    format!("no permitted transportation from {} to {} on day {day}", slot.from, slot.to),
                ));
            }
        }

        let rules = on(ids::ROOM_RULES);
        let nights_rule = on(ids::MINIMUM_NIGHTS_STAY);
        for slot in &mut space.stays {
            if slot.options.is_empty() {
                return Err(infeasible(ids::WITHIN_SANDBOX, format!("no accommodation in {}", slot.city)));
            }
            if rules {
                slot.options
                    .retain(|o| b.accommodations[o.acc_idx].house_rules.is_disjoint(&q.house_rules));
                if slot.options.is_empty() {
                    return Err(infeasible(
                        ids::ROOM_RULES,
                        format!("no accommodation satisfies room rules in {}", slot.city),
                    ));
                }
            }
            if nights_rule {
                let nights = slot.nights.len() as u32;
                slot.options
                    .retain(|o| b.accommodations[o.acc_idx].minimum_nights <= nights);
                if slot.options.is_empty() {
                    return Err(infeasible(
                        ids::MINIMUM_NIGHTS_STAY,
                        format!("no accommodation in {} accepts a stay of {nights} night(s)", slot.city),
                    ));
                }
            }
        }

        if on(ids::COMPLETE_INFORMATION) {
            for m in &space.meals {
                let cc = &space.route[m.day_idx];
                if !cc.is_travel() && m.eligible.len() < 3 {
                    return Err(infeasible(
                        ids::COMPLETE_INFORMATION,
                        format!(
                            "only {} restaurant(s) in {cc} for the three meals of day {}",
                            m.eligible.len(),
                            m.day_idx + 1
                        ),
                    ));
                }
            }
        }

        let mut stages = Vec::new();
        stages.extend((0..space.legs.len()).map(Stage::Leg));
        stages.extend((0..space.stays.len()).map(Stage::Stay));
        stages.extend((0..space.meals.len()).map(Stage::Meal));

        let cuisines: Vec<&String> = if on(ids::CUISINE) { q.cuisines.iter().collect() } else { Vec::new() };
        let cuisine_need = full_mask(cuisines.len().min(64));
        let rest_cuisine: Vec<u64> = b
            .restaurants
            .iter()
            .map(|r| {
                cuisines
                    .iter()
                    .take(64)
                    .enumerate()
                    .filter(|(_, c)| r.serves(c))
                    .fold(0, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let rooms: Vec<RoomType> = if on(ids::ROOM_TYPE) { q.room_types.iter().copied().collect() } else { Vec::new() };
        let room_need = full_mask(rooms.len().min(64));
        let acc_room: Vec<u64> = b
            .accommodations
            .iter()
            .map(|a| {
                rooms
                    .iter()
                    .take(64)
                    .enumerate()
                    .filter(|(_, t)| t.satisfied_by(a.room_type))
                    .fold(0, |m, (i, _)| m | 1 << i)
            })
            .collect();

        let n = stages.len();
        let mut lb = vec![Money::ZERO; n + 1];
        let mut ub = vec![Money::ZERO; n + 1];
        let mut remaining_cuisine = vec![0u64; n + 1];
        let mut remaining_room = vec![0u64; n + 1];
        let mut search = Search {
            space,
            registry,
            objective,
            stages,
            lb: Vec::new(),
            ub: Vec::new(),
            budget: on(ids::BUDGET).then_some(q.budget),
            diverse_restaurants: on(ids::DIVERSE_RESTAURANTS),
            no_conflict: on(ids::NO_CONFLICTING_TRANSPORTATION),
            cuisine_need,
            rest_cuisine,
            room_need,
            acc_room,
            remaining_cuisine: Vec::new(),
            remaining_room: Vec::new(),
        };
        for i in (0..n).rev() {
            let costs: Vec<Money> = (0..search.n_options(i)).map(|c| search.option_cost(i, c)).collect();
            lb[i] = lb[i + 1] + costs.iter().copied().min().unwrap_or(Money::ZERO);
            ub[i] = ub[i + 1] + costs.iter().copied().max().unwrap_or(Money::ZERO);
            let (mut cm, mut rm) = (remaining_cuisine[i + 1], remaining_room[i + 1]);
            match search.stages[i] {
                Stage::Meal(m) => {
                    for &r in &search.space.meals[m].eligible {
                        cm |= search.rest_cuisine[r];
                    }
                }
                Stage::Stay(s) => {
                    for o in &search.space.stays[s].options {
                        rm |= search.acc_room[o.acc_idx];
                    }
                }
                Stage::Leg(_) => {}
            }
            remaining_cuisine[i] = cm;
            remaining_room[i] = rm;
        }
        search.lb = lb;
        search.ub = ub;
        search.remaining_cuisine = remaining_cuisine;
        search.remaining_room = remaining_room;

        if remaining_cuisine_missing(&search) {
            let missing: Vec<&str> = cuisines
                .iter()
                .enumerate()
                .filter(|(i, _)| search.remaining_cuisine[0] & (1 << i) == 0)
                .map(|(_, c)| c.as_str())
                .collect();
            return Err(infeasible(
                ids::CUISINE,
                format!("no restaurant on the route serves {}", missing.join(", ")),
            ));
        }
        if search.remaining_room[0] & search.room_need != search.room_need {
            let missing: Vec<&str> = rooms
                .iter()
                .enumerate()
                .filter(|(i, _)| search.remaining_room[0] & (1 << i) == 0)
                .map(|(_, t)| t.tag())
                .collect();
            return Err(infeasible(
                ids::ROOM_TYPE,
                format!("no usable accommodation on the route offers {}", missing.join(", ")),
            ));
        }
        if let Some(budget) = search.budget {
            if search.lb[0] > budget {
                return Err(infeasible(
                    ids::BUDGET,
                    format!("the cheapest assembly costs ${}, over the budget of ${budget}", search.lb[0]),
                ));
            }
        }
        Ok(search)
    }

    pub fn product(&self) -> u128 {
        (0..self.stages.len()).map(|i| self.n_options(i) as u128).product()
    }

    fn n_options(&self, i: usize) -> usize {
        match self.stages[i] {
            Stage::Leg(l) => self.space.legs[l].options.len(),
            Stage::Stay(s) => self.space.stays[s].options.len(),
            Stage::Meal(m) => self.space.meals[m].combos.len(),
        }
    }

    fn option_cost(&self, i: usize, c: usize) -> Money {
        match self.stages[i] {
            Stage::Leg(l) => self.space.legs[l].options[c].cost,
            Stage::Stay(s) => self.space.stays[s].options[c].cost,
            Stage::Meal(m) => self.space.meals[m].combos[c].cost,
        }
    }

    fn root(&self) -> State {
        State {
            choices: Vec::with_capacity(self.stages.len()),
            cost: Money::ZERO,
            used: vec![false; self.space.b.restaurants.len()],
            flight: false,
            drive: false,
            cuisine: 0,
            room: 0,
        }
    }

    /// Applies choice `c` at stage `i`, or names the constraint it rules out.
    fn extend(&self, s: &State, i: usize, c: usize) -> Result<State, &'static str> {
        let mut n = s.clone();
        n.choices.push(c);
        n.cost += self.option_cost(i, c);
        match self.stages[i] {
            Stage::Leg(l) => match &self.space.legs[l].options[c].leg {
                Leg::Flight { .. } => n.flight = true,
                Leg::Ground { ground_mode, .. } => {
                    if *ground_mode == crate::model::GroundMode::SelfDriving {
                        n.drive = true;
                    }
                }
            },
            Stage::Stay(st) => n.room |= self.acc_room[self.space.stays[st].options[c].acc_idx],
            Stage::Meal(m) => {
                for &r in &self.space.meals[m].combos[c].restaurants {
                    if self.diverse_restaurants && n.used[r] {
                        return Err(ids::DIVERSE_RESTAURANTS);
                    }
                    n.used[r] = true;
                    n.cuisine |= self.rest_cuisine[r];
                }
            }
        }
        if self.no_conflict && n.flight && n.drive {
            return Err(ids::NO_CONFLICTING_TRANSPORTATION);
        }
        if let Some(budget) = self.budget {
            if n.cost + self.lb[i + 1] > budget {
                return Err(ids::BUDGET);
            }
        }
        if (n.cuisine | self.remaining_cuisine[i + 1]) & self.cuisine_need != self.cuisine_need {
            return Err(ids::CUISINE);
        }
        if (n.room | self.remaining_room[i + 1]) & self.room_need != self.room_need {
            return Err(ids::ROOM_TYPE);
        }
        Ok(n)
    }

    fn assemble(&self, s: &State) -> Plan {
        let (nl, ns) = (self.space.legs.len(), self.space.stays.len());
        let legs = &s.choices[..nl];
        let stays = &s.choices[nl..nl + ns];
        let meals = &s.choices[nl + ns..];
        self.space.assemble(legs, stays, meals, &self.space.greedy_attractions())
    }

    /// Full verification of a complete assembly.
    fn verify(&self, s: &State, stats: &mut Stats) -> Option<Leaf> {
        stats.leaves += 1;
        let plan = self.assemble(s);
        let fails = self.registry.failures(&plan, self.space.q, self.space.b);
        if fails.is_empty() {
            let key = tie_key(&plan);
            return Some(Leaf {
                plan,
                cost: s.cost,
                key,
            });
        }
        if stats.closest.as_ref().is_none_or(|(n, _, _)| fails.len() < *n) {
            stats.closest = Some((fails.len(), plan, fails));
        }
        None
    }

    fn better(&self, a: &Leaf, b: &Leaf) -> bool {
        let by_cost = match self.objective {
            Objective::MaxCost => b.cost.cmp(&a.cost),
            _ => a.cost.cmp(&b.cost),
        };
        by_cost.then_with(|| a.key.cmp(&b.key)) == Ordering::Less
    }

    pub fn run(&self, config: &SearchConfig) -> Result<Solution, SolverError> {
        let mut stats = Stats::default();
        let found = match config.strategy {
            Strategy::Exhaustive => {
                let product = self.product();
                if product > config.exhaustive_cap as u128 {
                    return Err(SolverError::CapExceeded {
                        product,
                        cap: config.exhaustive_cap,
                    });
                }
                let mut best = None;
                self.dfs(0, self.root(), &mut best, &mut stats);
                best
            }
            Strategy::Greedy => self.beam(1, &mut stats),
            Strategy::Beam => self.beam(config.beam_width, &mut stats),
        };
        match found {
            Some(leaf) => Ok(Solution {
                plan: leaf.plan,
                cost: leaf.cost,
                leaves_checked: stats.leaves,
            }),
            None => Err(self.explain(stats)),
        }
    }

    fn bounded_out(&self, i: usize, partial: Money, best: &Option<Leaf>) -> bool {
        let Some(best) = best else { return false };
        match self.objective {
            Objective::MinCost => partial + self.lb[i + 1] > best.cost,
            Objective::MaxCost => partial + self.ub[i + 1] < best.cost,
            Objective::FirstFeasible => true,
        }
    }

    /// Returns true once the search can stop.
    fn dfs(&self, i: usize, s: State, best: &mut Option<Leaf>, stats: &mut Stats) -> bool {
        if i == self.stages.len() {
            let worth = match best {
                None => true,
                Some(b) => match self.objective {
                    Objective::MinCost => s.cost <= b.cost,
                    Objective::MaxCost => s.cost >= b.cost,
                    Objective::FirstFeasible => false,
                },
            };
            if worth {
                if let Some(leaf) = self.verify(&s, stats) {
                    if best.as_ref().is_none_or(|b| self.better(&leaf, b)) {
                        *best = Some(leaf);
                    }
                }
            }
            return self.objective == Objective::FirstFeasible && best.is_some();
        }
        for c in 0..self.n_options(i) {
            if self.bounded_out(i, s.cost + self.option_cost(i, c), best) {
                continue;
            }
            match self.extend(&s, i, c) {
                Ok(n) => {
                    if self.dfs(i + 1, n, best, stats) {
                        return true;
                    }
                }
                Err(id) => *stats.prunes.entry(id).or_default() += 1,
            }
        }
        false
    }

    fn score(&self, i: usize, s: &State) -> i64 {
        match self.objective {
            Objective::MaxCost => -(s.cost + self.ub[i + 1]).cents(),
            _ => (s.cost + self.lb[i + 1]).cents(),
        }
    }

    fn beam(&self, width: usize, stats: &mut Stats) -> Option<Leaf> {
        let mut beam = vec![self.root()];
        for i in 0..self.stages.len() {
            let mut next: Vec<(i64, State)> = Vec::new();
            for s in &beam {
                for c in 0..self.n_options(i) {
                    match self.extend(s, i, c) {
                        Ok(n) => next.push((self.score(i, &n), n)),
                        Err(id) => *stats.prunes.entry(id).or_default() += 1,
                    }
                }
            }
            next.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.choices.cmp(&b.1.choices)));
            next.truncate(width);
            beam = next.into_iter().map(|(_, s)| s).collect();
            if beam.is_empty() {
                return None;
            }
        }
        let mut best: Option<Leaf> = None;
        for s in &beam {
            if let Some(leaf) = self.verify(s, stats) {
                if self.objective == Objective::FirstFeasible {
                    return Some(leaf);
                }
                if best.as_ref().is_none_or(|b| self.better(&leaf, b)) {
                    best = Some(leaf);
                }
            }
        }
        best
    }

    fn explain(&self, stats: Stats) -> SolverError {
        if let Some((_, plan, fails)) = stats.closest {
            let first = fails[0];
            let detail = descriptor(first)
                .map(|d| d.evaluate(&plan, self.space.q, self.space.b).message)
                .unwrap_or_default();
            return infeasible(
                first,
                format!("closest candidate fails {}: {detail}", fails.join(", ")),
            );
        }
        let q = self.space.q;
        let (id, _) = stats
            .prunes
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(k, v)| (*k, *v))
            .unwrap_or((ids::BUDGET, 0));
        let explanation = match id {
            ids::BUDGET => format!("every candidate plan exceeds the budget of ${}", q.budget),
            ids::DIVERSE_RESTAURANTS => "not enough distinct restaurants for every meal".to_string(),
            ids::NO_CONFLICTING_TRANSPORTATION => "every route mixes flights with self-driving".to_string(),
            ids::CUISINE => format!(
                "no choice of restaurants covers {}",
                q.cuisines.iter().cloned().collect::<Vec<_>>().join(", ")
            ),
            ids::ROOM_TYPE => format!(
                "no choice of accommodations covers {}",
                q.room_types.iter().map(|t| t.tag()).collect::<Vec<_>>().join(", ")
            ),
            other => format!("every candidate violates {other}"),
        };
        infeasible(id, explanation)
    }
}

fn remaining_cuisine_missing(s: &Search<'_>) -> bool {
    s.remaining_cuisine[0] & s.cuisine_need != s.cuisine_need
}
