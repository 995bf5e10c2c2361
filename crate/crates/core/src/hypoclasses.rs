//! Hypothesis families: finite sign matrices, singletons, and halfspaces.
//!
//! Halfspaces predict `+1` when `w·x >= 0`. Affine halfspaces in `R^d` are homogeneous
//! halfspaces in `R^(d+1)` evaluated on the lifted point `(x, 1)`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, Label, LabeledExample, Point};
use crate::error::{CertError, Result};

/// Largest number of hypotheses an enumerated construction may produce.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// A member of a family: a row id for finite kinds, a weight vector for halfspaces.
///
/// For singletons the id is the domain point labeled `+1`, so ids run over `1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Hypothesis {
    Id(usize),
    Weights(Vec<f64>),
}

impl Hypothesis {
    /// `3` is an id; `w=0,0,1` or `0,0,1` is a weight vector.
    pub fn parse(s: &str) -> Result<Hypothesis> {
        let s = s.trim();
        let body = s.strip_prefix("w=").unwrap_or(s);
        if body == s && !s.contains(',') {
            if let Ok(id) = s.parse::<usize>() {
                return Ok(Hypothesis::Id(id));
            }
        }
        let w = body
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| CertError::input(format!("bad weight {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Hypothesis::Weights(w))
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Id(id) => write!(f, "h{id}"),
            Hypothesis::Weights(w) => write!(f, "w={w:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    FiniteEnumerated,
    Singletons,
    HalfspaceHomogeneous,
    HalfspaceAffine,
}

/// A dense `H x N` sign matrix over the domain ids in `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFamily {
    domain: Vec<usize>,
    columns: HashMap<usize, usize>,
    signs: Vec<Label>,
    rows: usize,
    vc_hint: Option<usize>,
}

impl FiniteFamily {
    pub fn new(domain: Vec<usize>, rows: Vec<Vec<Label>>) -> Result<FiniteFamily> {
        let mut columns = HashMap::with_capacity(domain.len());
        for (c, &id) in domain.iter().enumerate() {
            if columns.insert(id, c).is_some() {
                return Err(CertError::input(format!("duplicate domain id {id}")));
            }
        }
        if rows.is_empty() {
            return Err(CertError::input("a finite family needs at least one hypothesis"));
        }
        let mut seen = HashSet::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != domain.len() {
                return Err(CertError::input(format!(
                    "hypothesis row {r} has {} entries, domain has {}",
                    row.len(),
                    domain.len()
                )));
            }
            if !seen.insert(row.as_slice()) {
                return Err(CertError::input(format!(
                    "hypothesis row {r} duplicates an earlier row"
                )));
            }
        }
        let n_rows = rows.len();
        Ok(FiniteFamily {
            domain,
            columns,
            signs: rows.into_iter().flatten().collect(),
            rows: n_rows,
            vc_hint: None,
        })
    }

    pub fn with_vc_dimension(mut self, vc: usize) -> Self {
        self.vc_hint = Some(vc);
        self
    }

    /// CSV: first row lists the domain ids, each further row is one hypothesis of `±1`s.
    pub fn read_csv<R: Read>(reader: R) -> Result<FiniteFamily> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = records.next().ok_or_else(|| CertError::input("empty family file"))??;
        let domain = header
            .iter()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| CertError::input(format!("bad domain id {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for rec in records {
            let rec = rec?;
            rows.push(rec.iter().map(Label::parse).collect::<Result<Vec<_>>>()?);
        }
        FiniteFamily::new(domain, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<FiniteFamily> {
        FiniteFamily::read_csv(std::fs::File::open(path)?)
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn column(&self, id: usize) -> Option<usize> {
        self.columns.get(&id).copied()
    }

    #[inline]
    pub fn sign(&self, row: usize, col: usize) -> Label {
        self.signs[row * self.domain.len() + col]
    }

    pub fn row(&self, row: usize) -> &[Label] {
        let n = self.domain.len();
        &self.signs[row * n..(row + 1) * n]
    }

    pub fn vc_hint(&self) -> Option<usize> {
        self.vc_hint
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisFamily {
    Finite(FiniteFamily),
    /// Domain `1..=n`; hypothesis `i` labels only point `i` positive.
    Singletons {
        n: usize,
    },
    /// `x ↦ +1 iff w·x >= 0` on `R^dim`.
    Halfspace {
        dim: usize,
    },
    /// `x ↦ +1 iff w·(x, 1) >= 0` on `R^dim`.
    AffineHalfspace {
        dim: usize,
    },
}

impl HypothesisFamily {
    pub fn singletons(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CertError::input("singletons need n >= 1"));
        }
        Ok(HypothesisFamily::Singletons { n })
    }

    pub fn halfspace(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CertError::input("halfspaces need d >= 1"));
        }
        Ok(HypothesisFamily::Halfspace { dim })
    }

    pub fn affine_halfspace(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CertError::input("halfspaces need d >= 1"));
        }
        Ok(HypothesisFamily::AffineHalfspace { dim })
    }

    /// Parses `singletons:n=5`, `finite:<path>`, `halfspace:d=3`, `affine-halfspace:d=3`,
    /// or `coupon:d=2,k=8`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| CertError::input(format!("class spec {spec:?} needs `kind:params`")))?;
        let params = || -> Result<HashMap<&str, usize>> {
            rest.split(',')
                .map(|kv| {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| CertError::input(format!("bad class parameter {kv:?}")))?;
                    let v = v
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| CertError::input(format!("bad class parameter {kv:?}")))?;
                    Ok((k.trim(), v))
                })
                .collect()
        };
        let get = |m: &HashMap<&str, usize>, key: &str| {
            m.get(key)
                .copied()
                .ok_or_else(|| CertError::input(format!("class spec {spec:?} is missing `{key}`")))
        };
        match kind.trim() {
            "singletons" => HypothesisFamily::singletons(get(&params()?, "n")?),
            "finite" => Ok(HypothesisFamily::Finite(FiniteFamily::load(rest.trim())?)),
            "halfspace" => HypothesisFamily::halfspace(get(&params()?, "d")?),
            "affine-halfspace" => HypothesisFamily::affine_halfspace(get(&params()?, "d")?),
            "coupon" => {
                let p = params()?;
                Ok(coupon_family(get(&p, "d")?, get(&p, "k")?)?.0)
            }
            other => Err(CertError::input(format!("unknown class kind {other:?}"))),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            HypothesisFamily::Finite(_) => FamilyKind::FiniteEnumerated,
            HypothesisFamily::Singletons { .. } => FamilyKind::Singletons,
            HypothesisFamily::Halfspace { .. } => FamilyKind::HalfspaceHomogeneous,
            HypothesisFamily::AffineHalfspace { .. } => FamilyKind::HalfspaceAffine,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, HypothesisFamily::Finite(_) | HypothesisFamily::Singletons { .. })
    }

    pub fn is_halfspace(&self) -> bool {
        !self.is_finite()
    }

    /// Domain size for finite kinds, input dimension for halfspaces.
    pub fn ambient(&self) -> usize {
        match self {
            HypothesisFamily::Finite(f) => f.domain.len(),
            HypothesisFamily::Singletons { n } => *n,
            HypothesisFamily::Halfspace { dim } | HypothesisFamily::AffineHalfspace { dim } => *dim,
        }
    }

    /// Length of the weight vector for halfspace kinds.
    pub fn parameter_dimension(&self) -> Option<usize> {
        match self {
            HypothesisFamily::Halfspace { dim } => Some(*dim),
            HypothesisFamily::AffineHalfspace { dim } => Some(dim + 1),
            _ => None,
        }
    }

    pub fn num_hypotheses(&self) -> Option<usize> {
        match self {
            HypothesisFamily::Finite(f) => Some(f.rows),
            HypothesisFamily::Singletons { n } => Some(*n),
            _ => None,
        }
    }

    /// Hypothesis ids of a finite kind, in enumeration order.
    pub fn hypothesis_ids(&self) -> Option<Vec<usize>> {
        match self {
            HypothesisFamily::Finite(f) => Some((0..f.rows).collect()),
            HypothesisFamily::Singletons { n } => Some((1..=*n).collect()),
            _ => None,
        }
    }

    /// Domain ids of a finite kind.
    pub fn domain_ids(&self) -> Option<Vec<usize>> {
        match self {
            HypothesisFamily::Finite(f) => Some(f.domain.clone()),
            HypothesisFamily::Singletons { n } => Some((1..=*n).collect()),
            _ => None,
        }
    }

    /// Column of a domain id in a finite kind.
    pub fn column(&self, id: usize) -> Option<usize> {
        match self {
            HypothesisFamily::Finite(f) => f.column(id),
            HypothesisFamily::Singletons { n } => (1..=*n).contains(&id).then(|| id - 1),
            _ => None,
        }
    }

    /// Position of a finite hypothesis id in [`Self::hypothesis_ids`].
    pub fn row_of(&self, id: usize) -> Option<usize> {
        match self {
            HypothesisFamily::Finite(f) => (id < f.rows).then_some(id),
            HypothesisFamily::Singletons { n } => (1..=*n).contains(&id).then(|| id - 1),
            _ => None,
        }
    }

    /// Sign of finite hypothesis at row position `row` on domain column `col`.
    #[inline]
    pub fn finite_sign(&self, row: usize, col: usize) -> Label {
        match self {
            HypothesisFamily::Finite(f) => f.sign(row, col),
            HypothesisFamily::Singletons { .. } => {
                if row == col {
                    Label::Pos
                } else {
                    Label::Neg
                }
            }
            _ => panic!("finite_sign on a halfspace family"),
        }
    }

    pub fn vc_dimension(&self) -> Result<usize> {
        match self {
            HypothesisFamily::Finite(f) => match f.vc_hint {
                Some(d) => Ok(d),
                None => vc_dimension_exhaustive(self, ENUMERATION_GUARD),
            },
            HypothesisFamily::Singletons { n } => Ok(usize::from(*n >= 2)),
            HypothesisFamily::Halfspace { dim } => Ok(*dim),
            HypothesisFamily::AffineHalfspace { dim } => Ok(dim + 1),
        }
    }

    /// Maps a point into the space where halfspace weights act (lifting affine points).
    pub fn lift(&self, point: &Point) -> Result<Vec<f64>> {
        let (dim, affine) = match self {
            HypothesisFamily::Halfspace { dim } => (*dim, false),
            HypothesisFamily::AffineHalfspace { dim } => (*dim, true),
            _ => return Err(CertError::input("lift is only defined for halfspace families")),
        };
        let v = point
            .as_vector()
            .ok_or_else(|| CertError::input("halfspace families need vector points"))?;
        if v.len() != dim {
            return Err(CertError::input(format!(
                "point has dimension {}, family expects {dim}",
                v.len()
            )));
        }
        let mut out = v.to_vec();
        if affine {
            out.push(1.0);
        }
        Ok(out)
    }

    pub fn check_hypothesis(&self, h: &Hypothesis) -> Result<()> {
        match (self, h) {
            (HypothesisFamily::Finite(f), Hypothesis::Id(id)) if *id < f.rows => Ok(()),
            (HypothesisFamily::Singletons { n }, Hypothesis::Id(id)) if (1..=*n).contains(id) => Ok(()),
            (_, Hypothesis::Weights(w)) if self.parameter_dimension() == Some(w.len()) => Ok(()),
            _ => Err(CertError::input(format!(
                "hypothesis {h} is not a member of this family"
            ))),
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if self.is_finite() {
            let id = p
                .as_discrete()
                .ok_or_else(|| CertError::input("finite families need discrete points"))?;
            self.column(id)
                .map(|_| ())
                .ok_or_else(|| CertError::input(format!("point {id} is outside the domain")))
        } else {
            self.lift(p).map(|_| ())
        }
    }

    pub fn predict(&self, h: &Hypothesis, p: &Point) -> Result<Label> {
        self.check_hypothesis(h)?;
        match (self, h) {
            (HypothesisFamily::Finite(_) | HypothesisFamily::Singletons { .. }, Hypothesis::Id(id)) => {
                let col = p
                    .as_discrete()
                    .and_then(|pid| self.column(pid))
                    .ok_or_else(|| CertError::input(format!("point {p} is outside the domain")))?;
                let row = self.row_of(*id).expect("checked");
                Ok(self.finite_sign(row, col))
            }
            (_, Hypothesis::Weights(w)) => Ok(halfspace_sign(w, &self.lift(p)?)),
            _ => unreachable!("check_hypothesis rejects mismatched kinds"),
        }
    }
}

/// `+1` iff `w·z >= 0`, up to the LP tolerance relative to the magnitude of the terms.
///
/// LP witnesses sit exactly on the constraints of boundary positives, so an exact sign test
/// would mislabel them on rounding noise.
#[inline]
pub fn halfspace_sign(w: &[f64], z: &[f64]) -> Label {
    let (s, mag) = w
        .iter()
        .zip(z)
        .fold((0.0, 0.0), |(s, m), (a, b)| (s + a * b, m + (a * b).abs()));
    if s >= -SIGN_TOLERANCE * (1.0 + mag) {
        Label::Pos
    } else {
        Label::Neg
    }
}

const SIGN_TOLERANCE: f64 = 1e-9;

/// Labels each point by `target`.
pub fn label_dataset(family: &HypothesisFamily, target: &Hypothesis, points: &[Point]) -> Result<Dataset> {
    points
        .iter()
        .map(|p| Ok(LabeledExample::new(p.clone(), family.predict(target, p)?)))
        .collect::<Result<Vec<_>>>()
        .map(Dataset::new)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(u128::from(n - i)) / u128::from(i + 1);
    }
    acc
}

/// The tightness family over domain `{x_0, ..., x_k}` (ids `0..=k`).
///
/// One hypothesis per `d`-subset of `{x_1, ..., x_k}` (lexicographic order) labels exactly
/// that subset positive; the final row is the target, which labels only `x_0` positive.
/// Returns the family and the target's id.
pub fn coupon_family(d: usize, k: usize) -> Result<(HypothesisFamily, Hypothesis)> {
    if d == 0 || k < d {
        return Err(CertError::input(format!("need k >= d >= 1, got d={d}, k={k}")));
    }
    let count = binomial(k as u64, d as u64);
    if count > ENUMERATION_GUARD {
        return Err(CertError::capacity("coupon family size", count, ENUMERATION_GUARD));
    }
    let domain: Vec<usize> = (0..=k).collect();
    let mut rows = Vec::with_capacity(count as usize + 1);
    for subset in (1..=k).combinations(d) {
        let mut row = vec![Label::Neg; k + 1];
        for i in subset {
            row[i] = Label::Pos;
        }
        rows.push(row);
    }
    let mut star = vec![Label::Neg; k + 1];
    star[0] = Label::Pos;
    rows.push(star);
    let target = Hypothesis::Id(rows.len() - 1);
    let family = FiniteFamily::new(domain, rows)?.with_vc_dimension(d);
    Ok((HypothesisFamily::Finite(family), target))
}

/// Largest `s` such that some `s` domain points are shattered, by exhaustive search.
pub fn vc_dimension_exhaustive(family: &HypothesisFamily, guard: u128) -> Result<usize> {
    let n = family
        .num_hypotheses()
        .ok_or_else(|| CertError::input("exhaustive VC search needs a finite family"))?;
    let cols = family.ambient();
    let mut best = 0;
    for size in 1..=cols {
        // a class of n hypotheses cannot shatter more than log2(n) points
        if (1u128 << size.min(127)) > n as u128 {
            break;
        }
        let work = binomial(cols as u64, size as u64).saturating_mul(n as u128);
        if work > guard {
            return Err(CertError::capacity("VC dimension search", work, guard));
        }
        let shattered = (0..cols).combinations(size).any(|subset| {
            let patterns: HashSet<Vec<Label>> = (0..n)
                .map(|row| subset.iter().map(|&c| family.finite_sign(row, c)).collect())
                .collect();
            patterns.len() == 1 << size
        });
        if shattered {
            best = size;
        } else {
            break;
        }
    }
    Ok(best)
}
