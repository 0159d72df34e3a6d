//! The space of well-formed plan assemblies for a query.
//!
//! The route is forced by the query: each destination gets an arrival day
//! and a full stay day, and the last day returns to the origin. An
//! assembly then picks
//!
//! * one leg per travel day from the matching flights (on that date) and
//!   ground routes,
//! * one accommodation per destination, booked for every night spent there,
//! * a set of restaurants per day from the day's cities, assigned to
//!   breakfast, lunch and dinner in reference order: exactly
//!   `min(3, eligible)` on stay days, zero to three on travel days,
//! * at most one attraction per day from the day's cities.

use crate::model::{CurrentCity, DayEntry, Leg, Place, Plan, ReferenceBundle, TravelQuery};
use crate::money::Money;

/// Day-by-day current-city labels implied by the query's route.
pub fn route_labels(q: &TravelQuery) -> Vec<CurrentCity> {
    let mut labels = Vec::with_capacity(q.n_days as usize);
    let mut here = q.origin.clone();
    for d in &q.destinations {
        labels.push(CurrentCity::Travel {
            from: here.clone(),
            to: d.clone(),
        });
        labels.push(CurrentCity::Stay(d.clone()));
        here = d.clone();
    }
    labels.push(CurrentCity::Travel {
        from: here,
        to: q.origin.clone(),
    });
    labels
}

#[derive(Debug, Clone)]
pub(crate) struct LegOption {
    pub leg: Leg,
    pub cost: Money,
}

#[derive(Debug, Clone)]
pub(crate) struct LegSlot {
    pub day_idx: usize,
    pub from: String,
    pub to: String,
    pub options: Vec<LegOption>,
}

#[derive(Debug, Clone)]
pub(crate) struct StayOption {
    pub acc_idx: usize,
    pub cost: Money,
}

#[derive(Debug, Clone)]
pub(crate) struct StaySlot {
    pub city: String,
    pub nights: Vec<usize>,
    pub options: Vec<StayOption>,
}

#[derive(Debug, Clone)]
pub(crate) struct MealCombo {
    pub restaurants: Vec<usize>,
    pub cost: Money,
}

#[derive(Debug, Clone)]
pub(crate) struct MealSlot {
    pub day_idx: usize,
    pub eligible: Vec<usize>,
    pub combos: Vec<MealCombo>,
}

#[derive(Debug, Clone)]
pub(crate) struct Space<'a> {
    pub q: &'a TravelQuery,
    pub b: &'a ReferenceBundle,
    pub route: Vec<CurrentCity>,
    pub legs: Vec<LegSlot>,
    pub stays: Vec<StaySlot>,
    pub meals: Vec<MealSlot>,
    /// Eligible attraction indices per day.
    pub attractions: Vec<Vec<usize>>,
}

/// All subsets of `items` with size in `sizes`, each in input order,
/// smaller subsets first.
pub(crate) fn combinations(items: &[usize], min: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in min..=max.min(items.len()) {
        rec(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

impl<'a> Space<'a> {
    pub fn new(q: &'a TravelQuery, b: &'a ReferenceBundle) -> Self {
        let route = route_labels(q);
        let people = q.n_people;

        let mut legs = Vec::new();
        for (i, cc) in route.iter().enumerate() {
            let CurrentCity::Travel { from, to } = cc else { continue };
            let date = q.date_of_day(i as u32 + 1);
            let mut options = Vec::new();
            for f in &b.flights {
                if &f.origin == from && &f.destination == to && Some(f.date) == date {
                    options.push(LegOption {
                        leg: Leg::Flight {
                            flight_id: f.flight_id.clone(),
                            origin: from.clone(),
                            destination: to.clone(),
                            departure: f.departure,
                            arrival: f.arrival,
                            cost: f.price,
                        },
                        cost: f.price * people,
                    });
                }
            }
            for r in &b.distances {
                if &r.origin == from && &r.destination == to {
                    options.push(LegOption {
                        leg: Leg::Ground {
                            ground_mode: r.mode,
                            origin: from.clone(),
                            destination: to.clone(),
                            duration_minutes: r.duration_minutes,
                            cost: r.cost,
                        },
                        cost: r.cost,
                    });
                }
            }
            legs.push(LegSlot {
                day_idx: i,
                from: from.clone(),
                to: to.clone(),
                options,
            });
        }

        let mut stays: Vec<StaySlot> = Vec::new();
        for (i, cc) in route.iter().enumerate().take(route.len().saturating_sub(1)) {
            let city = cc.end_city();
            match stays.last_mut() {
                Some(s) if s.city == city => s.nights.push(i),
                _ => stays.push(StaySlot {
                    city: city.to_string(),
                    nights: vec![i],
                    options: Vec::new(),
                }),
            }
        }
        for s in &mut stays {
            let nights = s.nights.len() as u32;
            s.options = b
                .accommodations
                .iter()
                .enumerate()
                .filter(|(_, a)| a.city == s.city)
                .map(|(idx, a)| StayOption {
                    acc_idx: idx,
                    cost: a.price * people.div_ceil(a.maximum_occupancy.max(1)) * nights,
                })
                .collect();
        }

        let mut meals = Vec::new();
        let mut attractions = Vec::new();
        for (i, cc) in route.iter().enumerate() {
            let eligible: Vec<usize> = b
                .restaurants
                .iter()
                .enumerate()
                .filter(|(_, r)| cc.contains(&r.city))
                .map(|(idx, _)| idx)
                .collect();
            let (min, max) = if cc.is_travel() {
                (0, 3)
            } else {
                let k = eligible.len().min(3);
                (k, k)
            };
            let combos = combinations(&eligible, min, max)
                .into_iter()
                .map(|rs| MealCombo {
                    cost: rs.iter().map(|&r| b.restaurants[r].average_cost * people).sum(),
                    restaurants: rs,
                })
                .collect();
            meals.push(MealSlot {
                day_idx: i,
                eligible,
                combos,
            });
            attractions.push(
                b.attractions
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| cc.contains(&a.city))
                    .map(|(idx, _)| idx)
                    .collect(),
            );
        }

        Space {
            q,
            b,
            route,
            legs,
            stays,
            meals,
            attractions,
        }
    }

    /// Number of assemblies excluding attraction choices.
    pub fn search_product(&self) -> u128 {
        let legs: u128 = self.legs.iter().map(|l| l.options.len() as u128).product();
        let stays: u128 = self.stays.iter().map(|s| s.options.len() as u128).product();
        let meals: u128 = self.meals.iter().map(|m| m.combos.len() as u128).product();
        legs * stays * meals
    }

    /// Number of assemblies including attraction choices.
    pub fn full_product(&self) -> u128 {
        let attr: u128 = self.attractions.iter().map(|a| a.len() as u128 + 1).product();
        self.search_product() * attr
    }

    /// Builds the plan for one choice per slot. `attractions[d]` indexes
    /// into the bundle's attraction table.
    pub fn assemble(&self, legs: &[usize], stays: &[usize], meals: &[usize], attractions: &[Option<usize>]) -> Plan {
        let b = self.b;
        let mut days: Vec<DayEntry> = self
            .route
            .iter()
            .enumerate()
            .map(|(i, cc)| DayEntry::new(i as u32 + 1, cc.clone()))
            .collect();
        for (slot, &choice) in self.legs.iter().zip(legs) {
            days[slot.day_idx].transportation = Some(slot.options[choice].leg.clone());
        }
        for (slot, &choice) in self.stays.iter().zip(stays) {
            let a = &b.accommodations[slot.options[choice].acc_idx];
            for &n in &slot.nights {
                days[n].accommodation = Some(Place::new(&a.name, &a.city));
            }
        }
        for (slot, &choice) in self.meals.iter().zip(meals) {
            let d = &mut days[slot.day_idx];
            let mut it = slot.combos[choice].restaurants.iter().map(|&r| {
                let r = &b.restaurants[r];
                Place::new(&r.name, &r.city)
            });
            d.breakfast = it.next();
            d.lunch = it.next();
            d.dinner = it.next();
        }
        for (d, a) in days.iter_mut().zip(attractions) {
            d.attraction = a.map(|i| {
                let a = &b.attractions[i];
                Place::new(&a.name, &a.city)
            });
        }
        Plan {
            query_id: self.q.id.clone(),
            days,
        }
    }

    /// First unused eligible attraction for each day, in order.
    pub fn greedy_attractions(&self) -> Vec<Option<usize>> {
        let mut used = vec![false; self.b.attractions.len()];
        self.attractions
            .iter()
            .map(|eligible| {
                let pick = eligible.iter().copied().find(|&a| !used[a]);
                if let Some(a) = pick {
                    used[a] = true;
                }
                pick
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_order() {
        assert_eq!(
            combinations(&[4, 7, 9], 0, 2),
            vec![vec![], vec![4], vec![7], vec![9], vec![4, 7], vec![4, 9], vec![7, 9]]
        );
        assert_eq!(combinations(&[1, 2], 3, 3), Vec::<Vec<usize>>::new());
        assert_eq!(combinations(&[1, 2, 3, 4], 3, 3).len(), 4);
    }
}
