use certikit::domain::format_float;
use serde_json::Value;

/// What a subcommand produces: a one-line summary, a JSON document, and optionally a CSV
/// table.
pub struct Artifacts {
    pub summary: String,
    pub json: Value,
    pub csv: Option<String>,
}

impl Artifacts {
    pub fn new(summary: impl Into<String>, json: Value) -> Self {
        Artifacts {
            summary: summary.into(),
            json,
            csv: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

/// A CSV cell. Floats use 17 significant digits so reruns diff exactly.
pub enum Cell {
    Int(u64),
    Float(f64),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .into_iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => format_float(v),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// JSON for a real that may be infinite.
pub fn real(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}
