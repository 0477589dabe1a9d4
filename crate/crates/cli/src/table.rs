//! Tabular artifacts: canonical CSV and JSON rendering and the round-trip
//! verifier behind `--check`.

use qtwick_core::clt::{ExperimentReport, REPORT_HEADER};
use qtwick_core::coeffs::BaseSequence;
use qtwick_core::format_f64;
use qtwick_core::jw::SparseState;
use qtwick_core::pairings::PairPartition;
use qtwick_core::wickpoly::{EpsilonString, QTPolynomial};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    OptInt,
    Float,
    OptFloat,
    Bool,
    Text,
    Eps,
    Pairing,
    Poly,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    None,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Float(x) => format_f64(*x),
            Cell::Bool(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::None => "none".to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(x) => Value::from(*x),
            Cell::Float(x) => Value::from(*x),
            Cell::Bool(x) => Value::from(*x),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::None => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::None, Into::into)
    }
}

pub struct Schema {
    pub name: &'static str,
    pub columns: &'static [(&'static str, Kind)],
}

pub const PAIRINGS: Schema = Schema {
    name: "pairings",
    columns: &[("pairing", Kind::Pairing), ("cross", Kind::Int), ("nest", Kind::Int)],
};

pub const TUPLE_CLASS: Schema = Schema {
    name: "tuple class",
    columns: &[
        ("tuple", Kind::Text),
        ("class", Kind::Text),
        ("cross", Kind::OptInt),
        ("nest", Kind::OptInt),
    ],
};

pub const WICK: Schema = Schema {
    name: "wick",
    columns: &[
        ("input", Kind::Text),
        ("polynomial", Kind::Poly),
        ("q", Kind::OptFloat),
        ("t", Kind::OptFloat),
        ("value", Kind::OptFloat),
    ],
};

pub const FOCK_MOMENT: Schema = Schema {
    name: "fock moment",
    columns: &[
        ("ops", Kind::Text),
        ("d", Kind::Int),
        ("m", Kind::Int),
        ("q", Kind::Float),
        ("t", Kind::Float),
        ("moment", Kind::Float),
    ],
};

pub const FOCK_RESIDUAL: Schema = Schema {
    name: "fock residual",
    columns: &[
        ("f", Kind::Int),
        ("g", Kind::Int),
        ("d", Kind::Int),
        ("m", Kind::Int),
        ("q", Kind::Float),
        ("t", Kind::Float),
        ("residual", Kind::Float),
    ],
};

pub const FOCK_GRAM: Schema = Schema {
    name: "fock gram",
    columns: &[
        ("d", Kind::Int),
        ("n", Kind::Int),
        ("q", Kind::Float),
        ("t", Kind::Float),
        ("index", Kind::Int),
        ("eigenvalue", Kind::Float),
    ],
};

pub const NORMAL_ORDER: Schema = Schema {
    name: "normal order",
    columns: &[
        ("tuple", Kind::Text),
        ("eps", Kind::Eps),
        ("pairing", Kind::Pairing),
        ("pattern", Kind::Eps),
        ("beta", Kind::Float),
        ("beta_closed_form", Kind::Float),
    ],
};

pub const JW_MOMENT: Schema = Schema {
    name: "jw moment",
    columns: &[
        ("ops", Kind::Text),
        ("n", Kind::Int),
        ("t", Kind::Float),
        ("seed", Kind::OptInt),
        ("value", Kind::Float),
    ],
};

pub const JW_CHECK: Schema = Schema {
    name: "jw check",
    columns: &[
        ("n", Kind::Int),
        ("checks", Kind::Int),
        ("max_deviation", Kind::Float),
        ("passed", Kind::Bool),
    ],
};

const SCHEMAS: [&Schema; 9] = [
    &PAIRINGS,
    &TUPLE_CLASS,
    &WICK,
    &FOCK_MOMENT,
    &FOCK_RESIDUAL,
    &FOCK_GRAM,
    &NORMAL_ORDER,
    &JW_MOMENT,
    &JW_CHECK,
];

pub struct Table {
    pub schema: &'static Schema,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static Schema) -> Self {
        Self {
            schema,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.schema.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let rows = self.rows.iter().map(|r| r.iter().map(Cell::render).collect());
        write_csv(self.schema, rows)
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .schema
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(&(name, _), cell)| (name.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("rows serialise");
        s.push('\n');
        s
    }
}

fn write_csv(schema: &Schema, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(schema.columns.iter().map(|c| c.0))
        .expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

fn canonical(kind: Kind, field: &str) -> Result<String, String> {
    let bad = |e: &dyn std::fmt::Display| format!("{field:?}: {e}");
    Ok(match kind {
        Kind::Int => field.parse::<u64>().map_err(|e| bad(&e))?.to_string(),
        Kind::OptInt if field == "none" => field.to_string(),
        Kind::OptInt => field.parse::<u64>().map_err(|e| bad(&e))?.to_string(),
        Kind::Float => format_f64(field.parse::<f64>().map_err(|e| bad(&e))?),
        Kind::OptFloat if field == "none" => field.to_string(),
        Kind::OptFloat => format_f64(field.parse::<f64>().map_err(|e| bad(&e))?),
        Kind::Bool => field.parse::<bool>().map_err(|e| bad(&e))?.to_string(),
        Kind::Text => field.to_string(),
        Kind::Eps => field.parse::<EpsilonString>().map_err(|e| bad(&e))?.to_string(),
        Kind::Pairing => field.parse::<PairPartition>().map_err(|e| bad(&e))?.to_string(),
        Kind::Poly => field.parse::<QTPolynomial>().map_err(|e| bad(&e))?.to_string(),
    })
}

/// Outcome of a successful `--check`.
#[derive(Debug, PartialEq, Eq)]
pub struct CheckSummary {
    pub kind: &'static str,
    pub rows: usize,
}

/// Re-parses a CSV artifact by its header and requires the canonical
/// re-rendering to reproduce the input byte for byte.
pub fn check_csv(text: &str) -> Result<CheckSummary, CliError> {
    let header = text.lines().next().unwrap_or_default().trim_end_matches('\r');
    let (kind, rendered, rows) = match header {
        REPORT_HEADER => {
            let r = ExperimentReport::from_csv(text)?;
            ("clt report", r.to_csv(), r.rows.len())
        }
        "i,j,mu" => {
            let b = BaseSequence::from_csv(text)?;
            ("coefficient base", b.to_csv(), b.values().len())
        }
        "bitmask,coefficient" => {
            let s = SparseState::from_csv(text, 1)?;
            ("jw state", s.to_csv(), s.support_len())
        }
        _ => {
            let schema = SCHEMAS
                .iter()
                .find(|s| s.columns.iter().map(|c| c.0).eq(header.split(',')))
                .ok_or_else(|| CliError::Check(format!("unrecognised header {header:?}")))?;
            let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
            let mut rows = Vec::new();
            for (k, record) in reader.records().enumerate() {
                let record = record.map_err(|e| CliError::Check(e.to_string()))?;
                if record.len() != schema.columns.len() {
                    return Err(CliError::Check(format!(
                        "row {} has {} fields, expected {}",
                        k + 1,
                        record.len(),
                        schema.columns.len()
                    )));
                }
                let row = schema
                    .columns
                    .iter()
                    .zip(record.iter())
                    .map(|(&(name, kind), field)| {
                        canonical(kind, field)
                            .map_err(|e| CliError::Check(format!("row {}, column {name}: {e}", k + 1)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
            }
            let n = rows.len();
            (schema.name, write_csv(schema, rows.into_iter()), n)
        }
    };
    if rendered != text {
        let line = rendered
            .lines()
            .zip(text.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| rendered.lines().count().min(text.lines().count()));
        return Err(CliError::Check(format!(
            "{kind} does not round-trip: first difference on line {}",
            line + 1
        )));
    }
    Ok(CheckSummary { kind, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_cells_are_quoted() {
        let mut t = Table::new(&PAIRINGS);
        t.push(vec![Cell::Text("{(1,2),(3,4)}".into()), 0usize.into(), 0usize.into()]);
        let csv = t.to_csv();
        assert_eq!(csv, "pairing,cross,nest\n\"{(1,2),(3,4)}\",0,0\n");
        assert_eq!(check_csv(&csv).unwrap(), CheckSummary { kind: "pairings", rows: 1 });
    }

    #[test]
    fn non_canonical_input_is_rejected() {
        let csv = "n,checks,max_deviation,passed\n2,16,0.0,true\n";
        assert!(check_csv(csv).is_err());
        assert!(check_csv("what,ever\n1,2\n").is_err());
        let ok = "n,checks,max_deviation,passed\n2,16,0.0000000000000000e0,true\n";
        assert!(check_csv(ok).is_ok());
    }

    #[test]
    fn json_uses_nulls_for_missing() {
        let mut t = Table::new(&WICK);
        t.push(vec![
            Cell::Text("11**".into()),
            Cell::Text("q + t".into()),
            Cell::None,
            Cell::None,
            Cell::None,
        ]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["polynomial"], "q + t");
        assert!(v[0]["value"].is_null());
    }
}
