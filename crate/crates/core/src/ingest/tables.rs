//! The five canonical reference CSV files.

use std::collections::BTreeSet;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use super::IngestError;
use crate::model::{
    Accommodation, Attraction, Flight, GroundMode, GroundRoute, HouseRule, ReferenceBundle,
    Restaurant, RoomType, TableKind,
};
use crate::money::Money;

/// Exact header row of each canonical file, in [`TableKind::ALL`] order.
pub const TABLE_HEADERS: [(TableKind, &[&str]); 5] = [
    (
        TableKind::Flights,
        &["flight_id", "origin", "destination", "departure", "arrival", "price", "date"],
    ),
    (
        TableKind::Distances,
        &["origin", "destination", "mode", "distance_miles", "duration_minutes", "cost"],
    ),
    (
        TableKind::Accommodations,
        &[
            "name",
            "city",
            "price",
            "room_type",
            "house_rules",
            "minimum_nights",
            "maximum_occupancy",
        ],
    ),
    (TableKind::Restaurants, &["name", "city", "average_cost", "cuisines"]),
    (TableKind::Attractions, &["name", "city"]),
];

pub(crate) fn headers(kind: TableKind) -> &'static [&'static str] {
    TABLE_HEADERS
        .iter()
        .find(|(k, _)| *k == kind)
        .map(|(_, h)| *h)
        .expect("every table has headers")
}

/// A field that failed to parse: (column index, offending value).
pub(crate) type FieldError = (usize, String);

pub(crate) trait TableRow: Sized {
    const KIND: TableKind;
    fn to_fields(&self) -> Vec<String>;
    fn from_fields(f: &[&str]) -> Result<Self, FieldError>;
}

fn field<T: std::str::FromStr>(f: &[&str], i: usize) -> Result<T, FieldError> {
    f[i].trim().parse().map_err(|_| (i, f[i].to_string()))
}

fn text(f: &[&str], i: usize) -> Result<String, FieldError> {
    let v = f[i].trim();
    if v.is_empty() {
        Err((i, f[i].to_string()))
    } else {
        Ok(v.to_string())
    }
}

fn join_tags<I: IntoIterator<Item = String>>(tags: I) -> String {
    tags.into_iter().collect::<Vec<_>>().join(";")
}

fn split_tags(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').map(str::trim).filter(|t| !t.is_empty())
}

impl TableRow for Flight {
    const KIND: TableKind = TableKind::Flights;
    fn to_fields(&self) -> Vec<String> {
        vec![
            self.flight_id.clone(),
            self.origin.clone(),
            self.destination.clone(),
            self.departure.to_string(),
            self.arrival.to_string(),
            self.price.to_string(),
            self.date.format("%Y-%m-%d").to_string(),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self, FieldError> {
        Ok(Flight {
            flight_id: text(f, 0)?,
            origin: text(f, 1)?,
            destination: text(f, 2)?,
            departure: field(f, 3)?,
            arrival: field(f, 4)?,
            price: field::<Money>(f, 5)?,
            date: NaiveDate::parse_from_str(f[6].trim(), "%Y-%m-%d").map_err(|_| (6, f[6].to_string()))?,
        })
    }
}

impl TableRow for GroundRoute {
    const KIND: TableKind = TableKind::Distances;
    fn to_fields(&self) -> Vec<String> {
        vec![
            self.origin.clone(),
            self.destination.clone(),
            self.mode.tag().to_string(),
            self.distance_miles.to_string(),
            self.duration_minutes.to_string(),
            self.cost.to_string(),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self, FieldError> {
        Ok(GroundRoute {
            origin: text(f, 0)?,
            destination: text(f, 1)?,
            mode: GroundMode::from_tag(f[2]).ok_or((2, f[2].to_string()))?,
            distance_miles: field(f, 3)?,
            duration_minutes: field(f, 4)?,
            cost: field(f, 5)?,
        })
    }
}

impl TableRow for Accommodation {
    const KIND: TableKind = TableKind::Accommodations;
    fn to_fields(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.city.clone(),
            self.price.to_string(),
            self.room_type.tag().to_string(),
            join_tags(self.house_rules.iter().map(|r| r.prohibition_tag())),
            self.minimum_nights.to_string(),
            self.maximum_occupancy.to_string(),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self, FieldError> {
        let house_rules = split_tags(f[4])
            .map(HouseRule::from_prohibition)
            .collect::<Result<BTreeSet<_>, _>>()
            .map_err(|_| (4, f[4].to_string()))?;
        Ok(Accommodation {
            name: text(f, 0)?,
            city: text(f, 1)?,
            price: field(f, 2)?,
            room_type: field::<RoomType>(f, 3)?,
            house_rules,
            minimum_nights: field(f, 5)?,
            maximum_occupancy: field(f, 6)?,
        })
    }
}

impl TableRow for Restaurant {
    const KIND: TableKind = TableKind::Restaurants;
    fn to_fields(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.city.clone(),
            self.average_cost.to_string(),
            join_tags(self.cuisines.iter().cloned()),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self, FieldError> {
        Ok(Restaurant {
            name: text(f, 0)?,
            city: text(f, 1)?,
            average_cost: field(f, 2)?,
            cuisines: split_tags(f[3]).map(str::to_string).collect(),
        })
    }
}

impl TableRow for Attraction {
    const KIND: TableKind = TableKind::Attractions;
    fn to_fields(&self) -> Vec<String> {
        vec![self.name.clone(), self.city.clone()]
    }
    fn from_fields(f: &[&str]) -> Result<Self, FieldError> {
        Ok(Attraction {
            name: text(f, 0)?,
            city: text(f, 1)?,
        })
    }
}

pub(crate) fn write_rows<W: Write, R: TableRow>(w: W, rows: &[R]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(headers(R::KIND))?;
    for r in rows {
        wtr.write_record(r.to_fields())?;
    }
    wtr.flush()?;
    Ok(())
}

pub(crate) fn rows_to_string<R: TableRow>(rows: &[R]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

fn read_rows<R: Read, T: TableRow>(rdr: R, file: &str) -> Result<Vec<T>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(rdr);
    let expected = headers(T::KIND);
    let found = rdr
        .headers()
        .map_err(|e| IngestError::SchemaMismatch {
            file: file.to_string(),
            expected: expected.join(","),
            found: e.to_string(),
        })?
        .clone();
    if found.iter().collect::<Vec<_>>() != expected {
        return Err(IngestError::SchemaMismatch {
            file: file.to_string(),
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::SchemaMismatch {
            file: file.to_string(),
            expected: expected.join(","),
            found: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields: Vec<&str> = rec.iter().collect();
        let row = T::from_fields(&fields).map_err(|(col, value)| IngestError::InvalidValue {
            file: file.to_string(),
            line,
            column: expected[col].to_string(),
            value,
        })?;
        out.push(row);
    }
    Ok(out)
}

fn read_table<T: TableRow>(dir: &Path) -> Result<Vec<T>, IngestError> {
    let name = T::KIND.name();
    let file = format!("{name}.csv");
    let path = dir.join(&file);
    if !path.is_file() {
        return Err(IngestError::MissingTable(name.to_string()));
    }
    let f = fs::File::open(&path).map_err(|e| IngestError::io(&path, e))?;
    read_rows(f, &file)
}

/// Loads and validates the five canonical CSV files in `dir`.
pub fn parse_reference_csv(dir: &Path) -> Result<ReferenceBundle, IngestError> {
    let bundle = ReferenceBundle {
        flights: read_table(dir)?,
        distances: read_table(dir)?,
        accommodations: read_table(dir)?,
        restaurants: read_table(dir)?,
        attractions: read_table(dir)?,
    };
    if let Some(v) = bundle.validate().into_iter().next() {
        return Err(IngestError::InvariantViolation {
            file: format!("{}.csv", v.table),
            row: v.row + 1,
            rule: v.rule,
        });
    }
    Ok(bundle)
}

fn write_file(path: &Path, contents: &str) -> Result<(), IngestError> {
    fs::write(path, contents).map_err(|e| IngestError::io(path, e))
}

/// Writes all five canonical files and returns their paths in table order.
pub fn write_reference_csv(bundle: &ReferenceBundle, dir: &Path) -> Result<Vec<PathBuf>, IngestError> {
    fs::create_dir_all(dir).map_err(|e| IngestError::io(dir, e))?;
    let mut paths = Vec::new();
    for kind in TableKind::ALL {
        let path = dir.join(format!("{}.csv", kind.name()));
        write_file(&path, &table_text(bundle, kind))?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn table_text(bundle: &ReferenceBundle, kind: TableKind) -> String {
    match kind {
        TableKind::Flights => rows_to_string(&bundle.flights),
        TableKind::Distances => rows_to_string(&bundle.distances),
        TableKind::Accommodations => rows_to_string(&bundle.accommodations),
        TableKind::Restaurants => rows_to_string(&bundle.restaurants),
        TableKind::Attractions => rows_to_string(&bundle.attractions),
    }
}

/// Parses an embedded block whose header may use loose spelling
/// (`Flight ID`, `distance-miles`) and any column order. Unknown or
/// missing columns are rejected.
pub(crate) fn read_loose_block<T: TableRow>(key: &str, text: &str) -> Result<Vec<T>, IngestError> {
    let malformed = |line: usize, reason: String| IngestError::MalformedBlock {
        key: key.to_string(),
        line,
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let expected = headers(T::KIND);
    let header = rdr.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    let mut positions = vec![usize::MAX; expected.len()];
    for (src, h) in header.iter().enumerate() {
        let norm = normalize_header(h);
        let Some(dst) = expected.iter().position(|e| *e == norm) else {
            return Err(malformed(1, format!("unknown column {h:?}")));
        };
        if positions[dst] != usize::MAX {
            return Err(malformed(1, format!("duplicate column {h:?}")));
        }
        positions[dst] = src;
    }
    if let Some(missing) = positions.iter().position(|p| *p == usize::MAX) {
        return Err(malformed(1, format!("missing column {}", expected[missing])));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            malformed(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields: Vec<&str> = positions.iter().map(|&p| rec.get(p).unwrap_or("")).collect();
        let row = T::from_fields(&fields)
            .map_err(|(col, value)| malformed(line, format!("invalid {} value {value:?}", expected[col])))?;
        out.push(row);
    }
    Ok(out)
}

fn normalize_header(h: &str) -> String {
    h.trim()
        .to_ascii_lowercase()
        .chars()
        .map(|c| if c == ' ' || c == '-' { '_' } else { c })
        .collect()
}
