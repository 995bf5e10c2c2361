//! Robust hollow stars.
//!
//! A `b`-robust hollow star is a sequence with one heavy element (weight `b + 1`) that is not
//! `b`-robustly realizable, while dropping any single element makes it realizable. The
//! largest such sequence, `s_b`, is one more than the worst-case minimal certificate size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{weighted_view, Dataset, Label, LabeledExample, Point};
use crate::error::{CertError, Result};
use crate::hypoclasses::{HypothesisFamily, ENUMERATION_GUARD};
use crate::oracles::Oracle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HollowStar {
    pub elements: Vec<LabeledExample>,
    pub heavy_index: usize,
    #[serde(rename = "b")]
    pub budget: u64,
    pub verified: bool,
}

impl HollowStar {
    pub fn new(elements: Vec<LabeledExample>, heavy_index: usize, budget: u64) -> Result<HollowStar> {
        if heavy_index >= elements.len() {
            return Err(CertError::input(format!(
                "heavy index {heavy_index} out of range for a star of size {}",
                elements.len()
            )));
        }
        Ok(HollowStar {
            elements,
            heavy_index,
            budget,
            verified: false,
        })
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn heavy_example(&self) -> &LabeledExample {
        &self.elements[self.heavy_index]
    }

    /// All elements except the heavy one, in order.
    pub fn body(&self) -> Vec<LabeledExample> {
        self.elements
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.heavy_index)
            .map(|(_, e)| e.clone())
            .collect()
    }

    /// Runs [`verify_star`] and records the outcome.
    pub fn verified_with(mut self, oracle: &Oracle<'_>) -> Result<HollowStar> {
        self.verified = verify_star(oracle, &self)?;
        Ok(self)
    }
}

pub fn verify_star(oracle: &Oracle<'_>, star: &HollowStar) -> Result<bool> {
    let b = star.budget;
    let weighted = weighted_view(&star.elements, Some(star.heavy_index), b + 1)?;
    if oracle.is_robustly_realizable(&weighted, b)?.is_some() {
        return Ok(false);
    }
    for i in 0..weighted.len() {
        let mut rest = weighted.clone();
        rest.remove(i);
        if oracle.is_robustly_realizable(&rest, b)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `b + 1` copies of the body of a zero-budget star followed by its heavy element.
pub fn lift_star(star: &HollowStar, b: u64) -> Result<HollowStar> {
    if star.budget != 0 {
        return Err(CertError::input("lift_star expects a star with budget 0"));
    }
    let body = star.body();
    let mut elements = Vec::with_capacity(body.len() * (b as usize + 1) + 1);
    for _ in 0..=b {
        elements.extend(body.iter().cloned());
    }
    elements.push(star.heavy_example().clone());
    let heavy = elements.len() - 1;
    HollowStar::new(elements, heavy, b)
}

/// The minimal certificate a star encodes: its body certifies the flipped heavy pair.
pub fn hardest_instance(star: &HollowStar) -> (Dataset, Point, Label) {
    let heavy = star.heavy_example();
    (Dataset::new(star.body()), heavy.point.clone(), heavy.label.flip())
}

#[derive(Debug, Clone, Copy)]
pub struct StarSearchConfig {
    /// Maximum copies of one `(point, label)` pair among the unit-weight elements.
    pub multiplicity_cap: Option<usize>,
    /// Largest star size considered.
    pub size_cap: Option<usize>,
    /// Bound on count vectors times heavy choices.
    pub guard: u128,
    /// Skip sizes below the lift of the zero-budget optimum.
    pub prune_with_lift: bool,
}

impl Default for StarSearchConfig {
    fn default() -> Self {
        StarSearchConfig {
            multiplicity_cap: None,
            size_cap: None,
            guard: ENUMERATION_GUARD,
            prune_with_lift: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarSearch {
    pub s_b: usize,
    pub witness: HollowStar,
    /// `false` when the guard stopped the search and `s_b` is only a lower bound.
    pub exact: bool,
    pub multiplicity_cap: usize,
    pub size_cap: usize,
}

/// Precomputed mistake table for one finite family: `err[pair][h]` over pairs
/// `(column, label)` with index `2 * column + [label = +1]`.
struct Table {
    pairs: Vec<LabeledExample>,
    err: Vec<Vec<u64>>,
    hyps: usize,
}

impl Table {
    fn new(family: &HypothesisFamily) -> Result<Table> {
        let domain = family
            .domain_ids()
            .ok_or_else(|| CertError::input("star search needs a finite family"))?;
        let hyps = family.num_hypotheses().expect("finite family");
        let mut pairs = Vec::with_capacity(2 * domain.len());
        let mut err = Vec::with_capacity(2 * domain.len());
        for (col, &id) in domain.iter().enumerate() {
            for label in [Label::Neg, Label::Pos] {
                pairs.push(LabeledExample::discrete(id, label));
                err.push(
                    (0..hyps)
                        .map(|h| u64::from(family.finite_sign(h, col) != label))
                        .collect(),
                );
            }
        }
        Ok(Table { pairs, err, hyps })
    }
}

/// Best star for one heavy pair: `(size, counts)`.
struct Search<'a> {
    table: &'a Table,
    b: u64,
    heavy: usize,
    cap: usize,
    size_cap: usize,
    /// Only stars strictly larger than this are reported.
    floor: usize,
}

impl Search<'_> {
    fn run(&self) -> Option<(usize, Vec<usize>)> {
        let mut counts = vec![0usize; self.table.pairs.len()];
        let mut e = vec![0u64; self.table.hyps];
        let mut best = None;
        self.dfs(0, 1, &mut counts, &mut e, &mut best);
        best
    }

    fn is_star(&self, counts: &[usize], e: &[u64]) -> bool {
        let b = self.b;
        let heavy = &self.table.err[self.heavy];
        let w = b + 1;
        if (0..e.len()).any(|h| e[h] + w * heavy[h] <= b) {
            return false;
        }
        if !e.iter().any(|&v| v <= b) {
            return false;
        }
        counts.iter().enumerate().filter(|(_, &c)| c > 0).all(|(p, _)| {
            let ep = &self.table.err[p];
            (0..e.len()).any(|h| e[h] - ep[h] + w * heavy[h] <= b)
        })
    }

    fn dfs(
        &self,
        pair: usize,
        size: usize,
        counts: &mut Vec<usize>,
        e: &mut Vec<u64>,
        best: &mut Option<(usize, Vec<usize>)>,
    ) {
        let remaining = (self.table.pairs.len() - pair) * self.cap;
        let target = best.as_ref().map_or(self.floor, |(s, _)| *s);
        if (size + remaining).min(self.size_cap) <= target {
            return;
        }
        if pair == self.table.pairs.len() {
            if self.is_star(counts, e) {
                *best = Some((size, counts.clone()));
            }
            return;
        }
        // larger multiplicities first so the first star found at a size is lexicographically
        // largest; ties between equal sizes keep the earlier one
        let max_c = self.cap.min(self.size_cap - size);
        for c in (0..=max_c).rev() {
            counts[pair] = c;
            if c > 0 {
                for (v, &x) in e.iter_mut().zip(&self.table.err[pair]) {
                    *v += c as u64 * x;
                }
            }
            self.dfs(pair + 1, size + c, counts, e, best);
            if c > 0 {
                for (v, &x) in e.iter_mut().zip(&self.table.err[pair]) {
                    *v -= c as u64 * x;
                }
            }
        }
        counts[pair] = 0;
    }
}

fn star_from_counts(table: &Table, heavy: usize, counts: &[usize], b: u64) -> Result<HollowStar> {
    let mut elements = Vec::new();
    for (p, &c) in counts.iter().enumerate() {
        elements.extend(std::iter::repeat_n(table.pairs[p].clone(), c));
    }
    elements.push(table.pairs[heavy].clone());
    let idx = elements.len() - 1;
    HollowStar::new(elements, idx, b)
}

/// Largest `b`-robust hollow star of a finite family, searched over count vectors.
///
/// Multiplicities of unit elements are capped (default `b + 1`). If the search space
/// exceeds the guard and `b > 0`, the lift of the zero-budget optimum is returned as a lower
/// bound with `exact = false`.
pub fn robust_star_number(oracle: &Oracle<'_>, b: u64, config: StarSearchConfig) -> Result<StarSearch> {
    let family = oracle.family();
    let table = Table::new(family)?;
    let npairs = table.pairs.len() as u32;
    let cap = config.multiplicity_cap.unwrap_or(b as usize + 1);
    let size_cap = config
        .size_cap
        .unwrap_or(2 * (b as usize + 1) * family.ambient())
        .max(1);
    let space = (cap as u128 + 1)
        .checked_pow(npairs)
        .and_then(|v| v.checked_mul(npairs as u128))
        .unwrap_or(u128::MAX);
    if space > config.guard {
        if b == 0 {
            return Err(CertError::capacity("hollow star search", space, config.guard));
        }
        let base = robust_star_number(
            oracle,
            0,
            StarSearchConfig {
                multiplicity_cap: None,
                ..config
            },
        )?;
        let lifted = lift_star(&base.witness, b)?.verified_with(oracle)?;
        return Ok(StarSearch {
            s_b: lifted.size(),
            witness: lifted,
            exact: false,
            multiplicity_cap: cap,
            size_cap,
        });
    }

    // the lifted zero-budget optimum is always a star, so smaller sizes need not be searched
    let floor = if config.prune_with_lift && b > 0 && cap > b as usize {
        let base = robust_star_number(
            oracle,
            0,
            StarSearchConfig {
                multiplicity_cap: Some(1),
                ..config
            },
        )?;
        ((b as usize + 1) * (base.s_b - 1) + 1).min(size_cap).saturating_sub(1)
    } else {
        0
    };

    let results: Vec<Option<(usize, Vec<usize>)>> = (0..table.pairs.len())
        .into_par_iter()
        .map(|heavy| {
            Search {
                table: &table,
                b,
                heavy,
                cap,
                size_cap,
                floor,
            }
            .run()
        })
        .collect();
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for (heavy, r) in results.into_iter().enumerate() {
        if let Some((size, counts)) = r {
            if best.as_ref().is_none_or(|(s, _, _)| size > *s) {
                best = Some((size, heavy, counts));
            }
        }
    }
    let (s_b, heavy, counts) = best.ok_or_else(|| CertError::input("no hollow star exists within the search caps"))?;
    let witness = star_from_counts(&table, heavy, &counts, b)?.verified_with(oracle)?;
    if !witness.verified {
        return Err(CertError::Numerical("search witness failed star verification".into()));
    }
    Ok(StarSearch {
        s_b,
        witness,
        exact: true,
        multiplicity_cap: cap,
        size_cap,
    })
}
