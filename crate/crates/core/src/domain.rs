//! Points, labels, datasets, and certificates.
//!
//! Datasets are ordered sequences with repeats allowed; subsets are always addressed by
//! index so that a certificate can cite the exact occurrences it uses.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CertError, Result};

/// A binary label stored as `+1` / `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::Neg => Label::Pos,
            Label::Pos => Label::Neg,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }

    pub fn sign(self) -> f64 {
        f64::from(self.as_i8())
    }

    pub fn from_int(v: i64) -> Result<Label> {
        match v {
            1 => Ok(Label::Pos),
            -1 => Ok(Label::Neg),
            other => Err(CertError::input(format!("label must be +1 or -1, got {other}"))),
        }
    }

    pub fn parse(s: &str) -> Result<Label> {
        let v: i64 = s
            .trim()
            .trim_start_matches('+')
            .parse()
            .map_err(|_| CertError::input(format!("cannot parse label {s:?}")))?;
        Label::from_int(v)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Label::from_int(v).map_err(serde::de::Error::custom)
    }
}

/// A domain element: either an id in a finite domain or a real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Discrete(usize),
    Vector(Vec<f64>),
}

impl Point {
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Point::Discrete(_) => None,
            Point::Vector(v) => Some(v.len()),
        }
    }

    pub fn as_discrete(&self) -> Option<usize> {
        match self {
            Point::Discrete(id) => Some(*id),
            Point::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Point::Discrete(_) => None,
            Point::Vector(v) => Some(v),
        }
    }

    /// Parses `3` as a discrete point and `0.5,0,1` as a vector.
    pub fn parse(s: &str) -> Result<Point> {
        let s = s.trim();
        if !s.contains(',') {
            if let Ok(id) = s.parse::<usize>() {
                return Ok(Point::Discrete(id));
            }
        }
        let coords = s
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| CertError::input(format!("cannot parse coordinate {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(CertError::input("empty point"));
        }
        Ok(Point::Vector(coords))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Discrete(id) => write!(f, "{id}"),
            Point::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub point: Point,
    pub label: Label,
}

impl LabeledExample {
    pub fn new(point: Point, label: Label) -> Self {
        LabeledExample { point, label }
    }

    pub fn discrete(id: usize, label: Label) -> Self {
        LabeledExample::new(Point::Discrete(id), label)
    }

    pub fn vector(coords: Vec<f64>, label: Label) -> Self {
        LabeledExample::new(Point::Vector(coords), label)
    }

    pub fn flipped(&self) -> Self {
        LabeledExample::new(self.point.clone(), self.label.flip())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedExample {
    pub point: Point,
    pub label: Label,
    pub weight: u64,
}

impl WeightedExample {
    pub fn new(point: Point, label: Label, weight: u64) -> Result<Self> {
        if weight == 0 {
            return Err(CertError::input("weights must be positive"));
        }
        Ok(WeightedExample { point, label, weight })
    }

    pub fn unit(example: &LabeledExample) -> Self {
        WeightedExample {
            point: example.point.clone(),
            label: example.label,
            weight: 1,
        }
    }
}

/// An ordered sequence of labeled examples.
///
/// `origin[i]` is the index of example `i` in the dataset this one was cut from (the
/// identity for a freshly built dataset), so nested subsequences keep pointing at the
/// original occurrences.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    origin: Vec<usize>,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>) -> Self {
        let origin = (0..examples.len()).collect();
        Dataset { examples, origin }
    }

    pub fn empty() -> Self {
        Dataset::default()
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn get(&self, i: usize) -> Option<&LabeledExample> {
        self.examples.get(i)
    }

    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn push(&mut self, example: LabeledExample) {
        let next = self.origin.iter().max().map_or(0, |m| m + 1);
        self.examples.push(example);
        self.origin.push(next);
    }

    /// Flips the labels at `indices` in place.
    pub fn flip_labels(&mut self, indices: &[usize]) {
        for &i in indices {
            self.examples[i].label = self.examples[i].label.flip();
        }
    }

    /// Returns a copy with `example` appended.
    pub fn with(&self, example: LabeledExample) -> Dataset {
        let mut out = self.clone();
        out.push(example);
        out
    }

    /// Common vector dimension, `None` for discrete or empty datasets.
    pub fn dimension(&self) -> Option<usize> {
        self.examples.first().and_then(|e| e.point.dimension())
    }

    pub fn check_indices(&self, indices: &[usize]) -> Result<()> {
        match indices.iter().find(|&&i| i >= self.len()) {
            Some(i) => Err(CertError::input(format!(
                "index {i} out of range for dataset of size {}",
                self.len()
            ))),
            None => Ok(()),
        }
    }

    /// The subsequence at `indices`, in the order given.
    pub fn subsequence(&self, indices: &[usize]) -> Result<Dataset> {
        self.check_indices(indices)?;
        Ok(Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            origin: indices.iter().map(|&i| self.origin[i]).collect(),
        })
    }

    /// Unit-weight view with an optional heavy element.
    pub fn weighted_view(&self, heavy: Option<usize>, heavy_weight: u64) -> Result<Vec<WeightedExample>> {
        weighted_view(&self.examples, heavy, heavy_weight)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let discrete = match headers.as_slice() {
            [p, l] if p == "point" && l == "label" => true,
            [coords @ .., l] if l == "label" && !coords.is_empty() => {
                for (i, h) in coords.iter().enumerate() {
                    if *h != format!("x{}", i + 1) {
                        return Err(CertError::input(format!("unexpected column header {h:?}")));
                    }
                }
                false
            }
            _ => {
                return Err(CertError::input(
                    "dataset header must be `point,label` or `x1,...,xd,label`",
                ))
            }
        };
        let mut examples = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let label = Label::parse(&record[record.len() - 1])?;
            let point = if discrete {
                let id = record[0]
                    .parse::<usize>()
                    .map_err(|_| CertError::input(format!("bad point id {:?}", &record[0])))?;
                Point::Discrete(id)
            } else {
                let coords = (0..record.len() - 1)
                    .map(|j| {
                        record[j]
                            .parse::<f64>()
                            .map_err(|_| CertError::input(format!("bad coordinate {:?}", &record[j])))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Point::Vector(coords)
            };
            examples.push(LabeledExample::new(point, label));
        }
        let data = Dataset::new(examples);
        data.check_uniform()?;
        Ok(data)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
        Dataset::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        self.check_uniform()?;
        let mut wtr = csv::Writer::from_writer(writer);
        match self.dimension() {
            None => {
                wtr.write_record(["point", "label"])?;
                for e in &self.examples {
                    let id = e.point.as_discrete().expect("uniform dataset");
                    wtr.write_record([id.to_string(), e.label.as_i8().to_string()])?;
                }
            }
            Some(d) => {
                let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
                header.push("label".into());
                wtr.write_record(&header)?;
                for e in &self.examples {
                    let mut row: Vec<String> = e
                        .point
                        .as_vector()
                        .expect("uniform dataset")
                        .iter()
                        .map(|x| format_float(*x))
                        .collect();
                    row.push(e.label.as_i8().to_string());
                    wtr.write_record(&row)?;
                }
            }
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    fn check_uniform(&self) -> Result<()> {
        let dim = self.dimension();
        for e in &self.examples {
            if e.point.dimension() != dim {
                return Err(CertError::input("dataset mixes point kinds or dimensions"));
            }
        }
        Ok(())
    }
}

impl Serialize for Dataset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.examples.serialize(serializer)
    }
}

impl FromIterator<LabeledExample> for Dataset {
    fn from_iter<I: IntoIterator<Item = LabeledExample>>(iter: I) -> Self {
        Dataset::new(iter.into_iter().collect())
    }
}

/// Full-precision decimal rendering (17 significant digits).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Unit weights everywhere except an optional heavy element.
pub fn weighted_view(
    examples: &[LabeledExample],
    heavy: Option<usize>,
    heavy_weight: u64,
) -> Result<Vec<WeightedExample>> {
    if heavy_weight == 0 {
        return Err(CertError::input("heavy weight must be at least 1"));
    }
    if let Some(h) = heavy {
        if h >= examples.len() {
            return Err(CertError::input(format!(
                "heavy index {h} out of range for sequence of size {}",
                examples.len()
            )));
        }
    }
    Ok(examples
        .iter()
        .enumerate()
        .map(|(i, e)| WeightedExample {
            point: e.point.clone(),
            label: e.label,
            weight: if Some(i) == heavy { heavy_weight } else { 1 },
        })
        .collect())
}

/// A subsequence of a dataset that certifies `label` at `test` under budget `b`.
///
/// Serialized as `{indices, b, test, label, minimal}`; the source dataset is kept
/// separately and passed back in when revalidating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub indices: Vec<usize>,
    #[serde(rename = "b")]
    pub budget: u64,
    pub test: Point,
    pub label: Label,
    pub minimal: bool,
}

impl Certificate {
    pub fn new(mut indices: Vec<usize>, budget: u64, test: Point, label: Label, minimal: bool) -> Self {
        indices.sort_unstable();
        Certificate {
            indices,
            budget,
            test,
            label,
            minimal,
        }
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn examples(&self, source: &Dataset) -> Result<Dataset> {
        source.subsequence(&self.indices)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Certificate> {
        Ok(serde_json::from_str(s)?)
    }
}
