use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{extract_rules, instantiate, ExemplarStore, PromptError, PromptRevision};
use crate::ingest::{table_text, write_plan, ParsedPlanResult};
use crate::model::{ReferenceBundle, TableKind, TravelQuery};

pub const EXAMPLES_HEADING: &str = "## Examples";
const RULES_HEADING: &str = "## Rules";
const REFERENCE_HEADING: &str = "## Reference data";
const FORMAT_HEADING: &str = "## Output format";
const FAILED_PREFIX: &str = "Failed constraints:";

pub const OUTPUT_FORMAT: &str = "\
Write one block per day, starting with `Day N:` and followed by exactly these
seven lines in any order:

Current City: <city> | from <city> to <city>
Transportation: - | Flight Number: <id>, from <city> to <city>, Departure: HH:MM, Arrival: HH:MM, Cost: $<amount>
                  | Self-driving, from <city> to <city>, Duration: <n> minutes, Cost: $<amount>
                  | Taxi, from <city> to <city>, Duration: <n> minutes, Cost: $<amount>
Breakfast: - | <restaurant>, <city>
Attraction: - | <attraction>, <city>
Lunch: - | <restaurant>, <city>
Dinner: - | <restaurant>, <city>
Accommodation: - | <accommodation>, <city>

Use `-` for an empty entry. Separate days with a blank line and write nothing else.
";

fn task_statement(out: &mut String, q: &TravelQuery) {
    out.push_str("## Task\n");
    let _ = writeln!(
        out,
        "Plan a {}-day trip for {} traveller(s) starting in {} on {}, visiting {} in that order, with a budget of ${}.",
        q.n_days,
        q.n_people,
        q.origin,
        q.start_date,
        q.destinations.join(", "),
        q.budget
    );
    out.push_str("Use only the reference data below and follow every rule.\n\n");
}

fn rules_section(out: &mut String, r: &PromptRevision, q: &TravelQuery) {
    out.push_str(RULES_HEADING);
    out.push('\n');
    match &r.rule_override {
        Some(text) => {
            out.push_str(instantiate(text, q).trim_end());
            out.push('\n');
        }
        None => {
            for (i, rule) in extract_rules(&r.manifest(), q).iter().enumerate() {
                let _ = writeln!(out, "{}. {rule}", i + 1);
            }
        }
    }
    out.push('\n');
}

fn plan_text(p: &ParsedPlanResult) -> String {
    match p {
        ParsedPlanResult::Delivered { plan } => write_plan(plan),
        ParsedPlanResult::NotDelivered { reason } => format!("(not delivered: {reason})\n"),
    }
}

fn examples_section(out: &mut String, r: &PromptRevision, store: &ExemplarStore) -> Result<(), PromptError> {
    out.push_str(EXAMPLES_HEADING);
    out.push('\n');
    if r.exemplars.is_empty() {
        out.push_str("(none)\n\n");
        return Ok(());
    }
    for (i, id) in r.exemplars.iter().enumerate() {
        let e = store.resolve(id)?;
        let _ = writeln!(out, "### Example {}", i + 1);
        let _ = writeln!(out, "{FAILED_PREFIX} {}", e.failed_constraints.join(", "));
        out.push_str("Failed plan:\n");
        out.push_str(&plan_text(&e.failed_plan));
        out.push_str("\nCorrected plan:\n");
        out.push_str(&write_plan(&e.corrected_plan));
        let _ = writeln!(out, "\nNote: {}\n", e.author_note.trim());
    }
    Ok(())
}

fn reference_section(out: &mut String, q: &TravelQuery, b: &ReferenceBundle) {
    out.push_str(REFERENCE_HEADING);
    out.push('\n');
    let mut cities: BTreeSet<&str> = q.destinations.iter().map(String::as_str).collect();
    cities.insert(&q.origin);
    let local = b.restricted_to(&cities);
    for kind in TableKind::ALL {
        let _ = writeln!(out, "### {}", kind.name());
        out.push_str(&table_text(&local, kind));
        out.push('\n');
    }
}

/// The full prompt for one query.
pub fn render_prompt(
    r: &PromptRevision,
    q: &TravelQuery,
    b: &ReferenceBundle,
    store: &ExemplarStore,
) -> Result<String, PromptError> {
    let mut out = String::new();
    task_statement(&mut out, q);
    rules_section(&mut out, r, q);
    examples_section(&mut out, r, store)?;
    reference_section(&mut out, q, b);
    out.push_str(FORMAT_HEADING);
    out.push('\n');
    out.push_str(OUTPUT_FORMAT);
    Ok(out)
}

/// The query-independent form of a revision: rule templates with their
/// placeholders, the exemplars and the output format.
pub fn render_revision(r: &PromptRevision, store: &ExemplarStore) -> Result<String, PromptError> {
    let mut out = format!("# Prompt revision {}\n\n", r.id());
    out.push_str(RULES_HEADING);
    out.push('\n');
    match &r.rule_override {
        Some(text) => {
            out.push_str(text.trim_end());
            out.push('\n');
        }
        None => {
            for (i, rule) in r.rules.iter().enumerate() {
                let _ = writeln!(out, "{}. [{}] {}", i + 1, rule.constraint_id, rule.template);
            }
        }
    }
    out.push('\n');
    examples_section(&mut out, r, store)?;
    out.push_str(REFERENCE_HEADING);
    out.push_str("\n(filled per query)\n\n");
    out.push_str(FORMAT_HEADING);
    out.push('\n');
    out.push_str(OUTPUT_FORMAT);
    Ok(out)
}

/// Constraint ids named on `Failed constraints:` lines of the examples
/// section.
pub fn exemplar_constraint_ids(prompt: &str) -> BTreeSet<String> {
    let mut ids = BTreeSet::new();
    let mut inside = false;
    for line in prompt.lines() {
        if line.starts_with("## ") {
            inside = line == EXAMPLES_HEADING;
            continue;
        }
        if let Some(rest) = line.strip_prefix(FAILED_PREFIX).filter(|_| inside) {
            ids.extend(rest.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string));
        }
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_only_from_examples() {
        let text = "## Rules\nFailed constraints: budget\n## Examples\n### Example 1\nFailed constraints: cuisine, room-type\n## Reference data\nFailed constraints: budget\n";
        let ids: Vec<_> = exemplar_constraint_ids(text).into_iter().collect();
        assert_eq!(ids, ["cuisine", "room-type"]);
    }
}
