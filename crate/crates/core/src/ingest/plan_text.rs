//! The line-oriented plan grammar shared by agents, the solver and the
//! exemplar store.
//!
//! ```text
//! Day 1:
//! Current City: from Austin to Denver
//! Transportation: Flight Number: F100, from Austin to Denver, Departure: 08:00, Arrival: 10:30, Cost: $200
//! Breakfast: -
//! Attraction: Red Rocks, Denver
//! Lunch: -
//! Dinner: Rioja, Denver
//! Accommodation: Maple Inn, Denver
//! ```
//!
//! Labels are matched case-insensitively; names keep their case. `-` marks
//! an absent entry. Ground legs are written
//! `Self-driving, from A to B, Duration: 90 minutes, Cost: $45` (or `Taxi, ...`).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{CurrentCity, DayEntry, GroundMode, Leg, Place, Plan, TravelQuery};
use crate::money::Money;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ParsedPlanResult {
    Delivered { plan: Plan },
    NotDelivered { reason: String },
}

impl ParsedPlanResult {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            ParsedPlanResult::Delivered { plan } => Some(plan),
            ParsedPlanResult::NotDelivered { .. } => None,
        }
    }

    pub fn is_delivered(&self) -> bool {
        self.plan().is_some()
    }
}

impl From<Plan> for ParsedPlanResult {
    fn from(plan: Plan) -> Self {
        ParsedPlanResult::Delivered { plan }
    }
}

const LABELS: [&str; 7] = [
    "current city",
    "transportation",
    "breakfast",
    "attraction",
    "lunch",
    "dinner",
    "accommodation",
];

const DISPLAY_LABELS: [&str; 7] = [
    "Current City",
    "Transportation",
    "Breakfast",
    "Attraction",
    "Lunch",
    "Dinner",
    "Accommodation",
];

#[derive(Default)]
struct DayBlock {
    day: u32,
    header_line: usize,
    current_city: Option<CurrentCity>,
    seen: [bool; 7],
    entry_fields: [Option<FieldValue>; 7],
}

enum FieldValue {
    Leg(Leg),
    Place(Place),
}

/// Parses agent output into a plan for `q`. Never panics; any deviation
/// from the grammar yields `NotDelivered` carrying the first error.
pub fn parse_plan(text: &str, q: &TravelQuery) -> ParsedPlanResult {
    match parse_days(text) {
        Ok(days) if days.is_empty() => not_delivered("no day blocks"),
        Ok(days) if days.len() != q.n_days as usize => not_delivered(format!(
            "expected {} days, found {}",
            q.n_days,
            days.len()
        )),
        Ok(days) => ParsedPlanResult::Delivered {
            plan: Plan {
                query_id: q.id.clone(),
                days,
            },
        },
        Err(reason) => not_delivered(reason),
    }
}

fn not_delivered(reason: impl Into<String>) -> ParsedPlanResult {
    ParsedPlanResult::NotDelivered { reason: reason.into() }
}

fn parse_days(text: &str) -> Result<Vec<DayEntry>, String> {
    let mut days = Vec::new();
    let mut block: Option<DayBlock> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(n) = day_header(line) {
            if let Some(b) = block.take() {
                days.push(finish(b)?);
            }
            let expected = days.len() as u32 + 1;
            if n != expected {
                return Err(format!("line {lineno}: day {n} out of sequence, expected day {expected}"));
            }
            block = Some(DayBlock {
                day: n,
                header_line: lineno,
                ..Default::default()
            });
            continue;
        }
        let Some(b) = block.as_mut() else {
            return Err(format!("line {lineno}: content before the first day block"));
        };
        let (label, value) = line
            .split_once(':')
            .ok_or_else(|| format!("line {lineno}: expected `Label: value`"))?;
        let label = label.trim().to_ascii_lowercase();
        let idx = LABELS
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| format!("line {lineno}: unknown label {:?}", label))?;
        if b.seen[idx] {
            return Err(format!("line {lineno}: duplicate {} in day {}", DISPLAY_LABELS[idx], b.day));
        }
        b.seen[idx] = true;
        let value = value.trim();
        if idx == 0 {
            b.current_city = Some(parse_current_city(value).map_err(|e| format!("line {lineno}: {e}"))?);
        } else if value == "-" {
            b.entry_fields[idx] = None;
        } else if idx == 1 {
            b.entry_fields[idx] = Some(FieldValue::Leg(parse_leg(value).map_err(|e| format!("line {lineno}: {e}"))?));
        } else {
            b.entry_fields[idx] = Some(FieldValue::Place(parse_place(value).map_err(|e| format!("line {lineno}: {e}"))?));
        }
    }
    if let Some(b) = block.take() {
        days.push(finish(b)?);
    }
    Ok(days)
}

fn day_header(line: &str) -> Option<u32> {
    let rest = line.get(..3)?.eq_ignore_ascii_case("day").then(|| &line[3..])?;
    let rest = rest.trim_start();
    let num = rest.strip_suffix(':')?.trim();
    if num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    num.parse().ok()
}

fn finish(mut b: DayBlock) -> Result<DayEntry, String> {
    if let Some(missing) = b.seen.iter().position(|s| !s) {
        return Err(format!(
            "day {} (line {}): missing {}",
            b.day, b.header_line, DISPLAY_LABELS[missing]
        ));
    }
    let mut entry = DayEntry::new(b.day, b.current_city.take().expect("seen"));
    let mut take_place = |i: usize| match b.entry_fields[i].take() {
        Some(FieldValue::Place(p)) => Some(p),
        _ => None,
    };
    entry.breakfast = take_place(2);
    entry.attraction = take_place(3);
    entry.lunch = take_place(4);
    entry.dinner = take_place(5);
    entry.accommodation = take_place(6);
    entry.transportation = match b.entry_fields[1].take() {
        Some(FieldValue::Leg(l)) => Some(l),
        _ => None,
    };
    Ok(entry)
}

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    let head = s.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix).then(|| &s[prefix.len()..])
}

fn parse_route(s: &str) -> Result<(String, String), String> {
    let rest = strip_prefix_ci(s.trim(), "from ").ok_or_else(|| format!("expected `from A to B`, found {s:?}"))?;
    let (a, b) = rest
        .split_once(" to ")
        .ok_or_else(|| format!("expected `from A to B`, found {s:?}"))?;
    let (a, b) = (a.trim(), b.trim());
    if a.is_empty() || b.is_empty() {
        return Err(format!("expected `from A to B`, found {s:?}"));
    }
    Ok((a.to_string(), b.to_string()))
}

fn parse_current_city(v: &str) -> Result<CurrentCity, String> {
    if v.is_empty() || v == "-" {
        return Err("current city is required".into());
    }
    if strip_prefix_ci(v, "from ").is_some() {
        let (from, to) = parse_route(v)?;
        Ok(CurrentCity::Travel { from, to })
    } else {
        Ok(CurrentCity::Stay(v.to_string()))
    }
}

fn parse_place(v: &str) -> Result<Place, String> {
    let (name, city) = v
        .rsplit_once(',')
        .ok_or_else(|| format!("expected `Name, City`, found {v:?}"))?;
    let (name, city) = (name.trim(), city.trim());
    if name.is_empty() || city.is_empty() {
        return Err(format!("expected `Name, City`, found {v:?}"));
    }
    Ok(Place::new(name, city))
}

fn labelled<'a>(seg: &'a str, label: &str) -> Result<&'a str, String> {
    let seg = seg.trim();
    let rest = strip_prefix_ci(seg, label).ok_or_else(|| format!("expected `{label} ...`, found {seg:?}"))?;
    Ok(rest.trim_start_matches(':').trim())
}

fn parse_cost(seg: &str) -> Result<Money, String> {
    let v = labelled(seg, "Cost")?;
    v.parse().map_err(|_| format!("invalid cost {v:?}"))
}

fn parse_leg(v: &str) -> Result<Leg, String> {
    if let Some(rest) = strip_prefix_ci(v, "Flight Number:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 5 {
            return Err(format!("expected 5 comma-separated flight fields, found {}", parts.len()));
        }
        let flight_id = parts[0].trim();
        if flight_id.is_empty() {
            return Err("missing flight number".into());
        }
        let (origin, destination) = parse_route(parts[1])?;
        let dep = labelled(parts[2], "Departure")?;
        let arr = labelled(parts[3], "Arrival")?;
        return Ok(Leg::Flight {
            flight_id: flight_id.to_string(),
            origin,
            destination,
            departure: dep.parse().map_err(|_| format!("invalid departure {dep:?}"))?,
            arrival: arr.parse().map_err(|_| format!("invalid arrival {arr:?}"))?,
            cost: parse_cost(parts[4])?,
        });
    }
    let parts: Vec<&str> = v.split(',').collect();
    let mode = GroundMode::from_tag(parts[0]).ok_or_else(|| format!("unknown transportation {v:?}"))?;
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated {} fields, found {}", mode.tag(), parts.len()));
    }
    let (origin, destination) = parse_route(parts[1])?;
    let dur = labelled(parts[2], "Duration")?;
    let minutes = dur
        .strip_suffix("minutes")
        .or_else(|| dur.strip_suffix("mins"))
        .unwrap_or(dur)
        .trim();
    Ok(Leg::Ground {
        ground_mode: mode,
        origin,
        destination,
        duration_minutes: minutes.parse().map_err(|_| format!("invalid duration {dur:?}"))?,
        cost: parse_cost(parts[3])?,
    })
}

fn write_leg(out: &mut String, leg: &Leg) {
    match leg {
        Leg::Flight {
            flight_id,
            origin,
            destination,
            departure,
            arrival,
            cost,
        } => {
            let _ = write!(
                out,
                "Flight Number: {flight_id}, from {origin} to {destination}, Departure: {departure}, Arrival: {arrival}, Cost: ${cost}"
            );
        }
        Leg::Ground {
            ground_mode,
            origin,
            destination,
            duration_minutes,
            cost,
        } => {
            let mode = match ground_mode {
                GroundMode::SelfDriving => "Self-driving",
                GroundMode::Taxi => "Taxi",
            };
            let _ = write!(
                out,
                "{mode}, from {origin} to {destination}, Duration: {duration_minutes} minutes, Cost: ${cost}"
            );
        }
    }
}

/// Canonical plan text. `parse_plan(write_plan(p), q)` reproduces `p`.
pub fn write_plan(p: &Plan) -> String {
    let mut out = String::new();
    for (i, d) in p.days.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "Day {}:", d.day);
        let _ = writeln!(out, "Current City: {}", d.current_city);
        out.push_str("Transportation: ");
        match &d.transportation {
            Some(l) => write_leg(&mut out, l),
            None => out.push('-'),
        }
        out.push('\n');
        for (label, place) in [
            ("Breakfast", &d.breakfast),
            ("Attraction", &d.attraction),
            ("Lunch", &d.lunch),
            ("Dinner", &d.dinner),
            ("Accommodation", &d.accommodation),
        ] {
            match place {
                Some(p) => {
                    let _ = writeln!(out, "{label}: {p}");
                }
                None => {
                    let _ = writeln!(out, "{label}: -");
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Split;
    use chrono::NaiveDate;
    use std::collections::BTreeSet;

    fn query(n_days: u32) -> TravelQuery {
        TravelQuery {
            id: "q".into(),
            origin: "Austin".into(),
            destinations: vec!["Denver".into()],
            start_date: NaiveDate::from_ymd_opt(2024, 3, 1).unwrap(),
            n_days,
            n_people: 1,
            budget: Money::from_dollars(1000),
            house_rules: BTreeSet::new(),
            room_types: BTreeSet::new(),
            cuisines: BTreeSet::new(),
            transport_prefs: BTreeSet::new(),
            split: Split::Train,
        }
    }

    const THREE_DAYS: &str = "\
Day 1:
Current City: from Austin to Denver
Transportation: Flight Number: F100, from Austin to Denver, Departure: 08:00, Arrival: 10:30, Cost: $200
Breakfast: -
Attraction: Red Rocks, Denver
Lunch: -
Dinner: Rioja, Denver
Accommodation: Maple Inn, Denver

Day 2:
Current City: Denver
Transportation: -
Breakfast: Snooze, Denver
Attraction: -
Lunch: Tacos Tequila, Denver
Dinner: Guard and Grace, Denver
Accommodation: Maple Inn, Denver

Day 3:
Current City: from Denver to Austin
Transportation: Self-driving, from Denver to Austin, Duration: 900 minutes, Cost: $150
Breakfast: -
Attraction: -
Lunch: -
Dinner: -
Accommodation: -
";

    #[test]
    fn parses_three_days() {
        let r = parse_plan(THREE_DAYS, &query(3));
        let plan = r.plan().expect("delivered");
        assert_eq!(plan.days.len(), 3);
        assert_eq!(plan.days[0].transportation.as_ref().unwrap().duration_minutes(), 150);
        assert_eq!(plan.days[1].current_city, CurrentCity::Stay("Denver".into()));
        assert_eq!(plan.days[2].accommodation, None);
        assert_eq!(write_plan(plan), THREE_DAYS);
    }

    #[test]
    fn empty_text_is_not_delivered() {
        assert_eq!(
            parse_plan("", &query(3)),
            ParsedPlanResult::NotDelivered {
                reason: "no day blocks".into()
            }
        );
    }

    #[test]
    fn day_count_mismatch() {
        let two: String = THREE_DAYS.split("\nDay 3:").next().unwrap().to_string();
        assert_eq!(
            parse_plan(&two, &query(3)),
            ParsedPlanResult::NotDelivered {
                reason: "expected 3 days, found 2".into()
            }
        );
    }

    #[test]
    fn labels_are_case_insensitive() {
        let lower = THREE_DAYS
            .replace("Current City:", "current city:")
            .replace("Day 2:", "DAY 2:")
            .replace("Breakfast:", "BREAKFAST:");
        let a = parse_plan(&lower, &query(3));
        let b = parse_plan(THREE_DAYS, &query(3));
        assert_eq!(a, b);
    }

    #[test]
    fn grammar_errors_are_reported() {
        let cases = [
            ("Hello\nDay 1:", "content before the first day block"),
            ("Day 2:\n", "day 2 out of sequence"),
            (&THREE_DAYS.replace("Lunch: -\nDinner: Rioja", "Dinner: Rioja"), "missing Lunch"),
            (&THREE_DAYS.replace("Breakfast: Snooze, Denver", "Breakfast: Snooze"), "expected `Name, City`"),
            (&THREE_DAYS.replace("Cost: $150", "Cost: cheap"), "invalid cost"),
            (&THREE_DAYS.replace("Self-driving", "Bicycle"), "unknown transportation"),
        ];
        for (text, needle) in cases {
            match parse_plan(text, &query(3)) {
                ParsedPlanResult::NotDelivered { reason } => {
                    assert!(reason.contains(needle), "{reason:?} should mention {needle:?}")
                }
                other => panic!("expected failure for {needle}, got {other:?}"),
            }
        }
    }
}
