//! Realizability, agreement, and certificate checks.
//!
//! Agreement is decided by a single encoding: `(x, y)` is in the `b`-robust agreement region
//! of `S` exactly when `S` followed by `(x, -y)` with weight `b + 1` is not `b`-robustly
//! realizable. Every other question reduces to weighted realizability.
//!
//! Finite families are answered by enumerating hypotheses. Halfspaces use a deletion search:
//! some set of examples with total weight at most `b` is dropped and the rest must be
//! separable, which is one LP. The default strategy only branches on examples in the support
//! of the LP's infeasibility proof, since any successful deletion set must hit that support.

use std::collections::HashSet;

use crate::conic::{halfspace_consistency_lp, Consistency, LpSettings};
use crate::domain::{weighted_view, Dataset, Label, LabeledExample, Point, WeightedExample};
use crate::error::{CertError, Result};
use crate::hypoclasses::{binomial, Hypothesis, HypothesisFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleBackend {
    EnumerateHypotheses,
    DeletionLp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeletionStrategy {
    /// Branch on the support of each infeasibility proof; at most `(p+1)^b` LPs.
    #[default]
    SupportBranching,
    /// Try every deletion set of weight at most `b`, smallest first.
    Exhaustive,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub deletion_guard: u128,
    pub strategy: DeletionStrategy,
    pub lp: LpSettings<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            deletion_guard: 1_000_000,
            strategy: DeletionStrategy::default(),
            lp: LpSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle<'f> {
    family: &'f HypothesisFamily,
    config: OracleConfig,
}

impl<'f> Oracle<'f> {
    pub fn new(family: &'f HypothesisFamily) -> Self {
        Oracle {
            family,
            config: OracleConfig::default(),
        }
    }

    pub fn with_config(family: &'f HypothesisFamily, config: OracleConfig) -> Self {
        Oracle { family, config }
    }

    pub fn family(&self) -> &'f HypothesisFamily {
        self.family
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn backend(&self) -> OracleBackend {
        if self.family.is_finite() {
            OracleBackend::EnumerateHypotheses
        } else {
            OracleBackend::DeletionLp
        }
    }

    /// `Σ w_i · [h(x_i) ≠ y_i]`.
    pub fn weighted_error(&self, h: &Hypothesis, weighted: &[WeightedExample]) -> Result<u64> {
        let mut total = 0u64;
        for e in weighted {
            if self.family.predict(h, &e.point)? != e.label {
                total += e.weight;
            }
        }
        Ok(total)
    }

    /// A hypothesis with weighted error at most `b`, if one exists.
    pub fn is_robustly_realizable(&self, weighted: &[WeightedExample], b: u64) -> Result<Option<Hypothesis>> {
        match self.backend() {
            OracleBackend::EnumerateHypotheses => self.realizable_finite(weighted, b),
            OracleBackend::DeletionLp => self.realizable_halfspace(weighted, b),
        }
    }

    /// Unit-weight realizability of a plain sequence.
    pub fn is_realizable(&self, data: &[LabeledExample], b: u64) -> Result<bool> {
        let weighted = weighted_view(data, None, 1)?;
        Ok(self.is_robustly_realizable(&weighted, b)?.is_some())
    }

    /// A hypothesis with at most `b` mistakes on `data` that predicts `-label` at `test`.
    /// `None` means `(test, label)` is in the `b`-robust agreement region.
    pub fn agreement_counterexample(
        &self,
        data: &[LabeledExample],
        b: u64,
        test: &Point,
        label: Label,
    ) -> Result<Option<Hypothesis>> {
        self.family.check_point(test)?;
        let mut seq: Vec<WeightedExample> = data.iter().map(WeightedExample::unit).collect();
        seq.push(WeightedExample::new(test.clone(), label.flip(), b + 1)?);
        self.is_robustly_realizable(&seq, b)
    }

    pub fn in_robust_agreement(&self, data: &[LabeledExample], b: u64, test: &Point, label: Label) -> Result<bool> {
        Ok(self.agreement_counterexample(data, b, test, label)?.is_none())
    }

    pub fn is_certificate(
        &self,
        data: &Dataset,
        indices: &[usize],
        b: u64,
        test: &Point,
        label: Label,
    ) -> Result<bool> {
        self.is_certificate_with(data, indices, b, test, label, false)
    }

    /// As [`Self::is_certificate`]; with `trusted_superset` the realizability condition is
    /// skipped because the caller knows `data` itself is `b`-robustly realizable.
    pub fn is_certificate_with(
        &self,
        data: &Dataset,
        indices: &[usize],
        b: u64,
        test: &Point,
        label: Label,
        trusted_superset: bool,
    ) -> Result<bool> {
        let sub = data.subsequence(indices)?;
        if !trusted_superset && !self.is_realizable(sub.examples(), b)? {
            return Ok(false);
        }
        self.in_robust_agreement(sub.examples(), b, test, label)
    }

    /// A certificate is minimal iff no single index can be dropped.
    pub fn is_minimal_certificate(
        &self,
        data: &Dataset,
        indices: &[usize],
        b: u64,
        test: &Point,
        label: Label,
    ) -> Result<bool> {
        if !self.is_certificate(data, indices, b, test, label)? {
            return Ok(false);
        }
        for k in 0..indices.len() {
            let mut rest = indices.to_vec();
            rest.remove(k);
            if self.is_certificate_with(data, &rest, b, test, label, true)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn realizable_finite(&self, weighted: &[WeightedExample], b: u64) -> Result<Option<Hypothesis>> {
        let fam = self.family;
        let cols = weighted
            .iter()
            .map(|e| {
                e.point
                    .as_discrete()
                    .and_then(|id| fam.column(id))
                    .ok_or_else(|| CertError::input(format!("point {} is outside the domain", e.point)))
            })
            .collect::<Result<Vec<_>>>()?;
        let ids = fam.hypothesis_ids().expect("finite family");
        'rows: for (row, id) in ids.into_iter().enumerate() {
            let mut err = 0u64;
            for (e, &c) in weighted.iter().zip(&cols) {
                if fam.finite_sign(row, c) != e.label {
                    err += e.weight;
                    if err > b {
                        continue 'rows;
                    }
                }
            }
            return Ok(Some(Hypothesis::Id(id)));
        }
        Ok(None)
    }

    fn realizable_halfspace(&self, weighted: &[WeightedExample], b: u64) -> Result<Option<Hypothesis>> {
        let p = self.family.parameter_dimension().expect("halfspace family");
        let lifted = weighted
            .iter()
            .map(|e| self.family.lift(&e.point))
            .collect::<Result<Vec<_>>>()?;
        let search = DeletionSearch {
            lifted: &lifted,
            weighted,
            dim: p,
            lp: &self.config.lp,
        };
        let deletable = weighted.iter().filter(|e| e.weight <= b).count() as u64;
        match self.config.strategy {
            DeletionStrategy::SupportBranching => {
                let branches = (p as u128 + 1).saturating_pow(b.min(64) as u32);
                if branches > self.config.deletion_guard {
                    return Err(CertError::capacity(
                        "deletion branching",
                        branches,
                        self.config.deletion_guard,
                    ));
                }
                let mut seen = HashSet::new();
                search.branch(&mut Vec::new(), b, &mut seen)
            }
            DeletionStrategy::Exhaustive => {
                let total: u128 = (0..=b.min(deletable)).map(|k| binomial(deletable, k)).sum();
                if total > self.config.deletion_guard {
                    return Err(CertError::capacity(
                        "deletion subsets",
                        total,
                        self.config.deletion_guard,
                    ));
                }
                search.exhaustive(b)
            }
        }
    }
}

struct DeletionSearch<'a> {
    lifted: &'a [Vec<f64>],
    weighted: &'a [WeightedExample],
    dim: usize,
    lp: &'a LpSettings<f64>,
}

enum Outcome {
    Consistent(Vec<f64>),
    /// Indices (into the full sequence) in the support of the infeasibility proof.
    Blocked(Vec<usize>),
}

impl DeletionSearch<'_> {
    /// Consistency of the sequence with `deleted` (sorted) removed.
    fn solve(&self, deleted: &[usize]) -> Result<Outcome> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut order = Vec::new();
        for (i, (z, e)) in self.lifted.iter().zip(self.weighted).enumerate() {
            if deleted.binary_search(&i).is_ok() {
                continue;
            }
            if e.label == Label::Pos {
                pos.push(z.clone());
                order.push((0, i));
            } else {
                neg.push(z.clone());
                order.push((1, i));
            }
        }
        if pos.is_empty() && neg.is_empty() {
            return Ok(Outcome::Consistent(vec![0.0; self.dim]));
        }
        // multipliers are laid out positives first, then negatives
        order.sort_by_key(|&(class, i)| (class, i));
        match halfspace_consistency_lp(&pos, &neg, None, self.lp)? {
            Consistency::Consistent { witness } => Ok(Outcome::Consistent(witness)),
            Consistency::Inconsistent { multipliers } => {
                let mut support: Vec<usize> = multipliers
                    .iter()
                    .zip(&order)
                    .filter(|(&m, _)| m > self.lp.tol)
                    .map(|(_, &(_, i))| i)
                    .collect();
                support.sort_unstable();
                Ok(Outcome::Blocked(support))
            }
        }
    }

    fn branch(
        &self,
        deleted: &mut Vec<usize>,
        budget: u64,
        seen: &mut HashSet<Vec<usize>>,
    ) -> Result<Option<Hypothesis>> {
        if !seen.insert(deleted.clone()) {
            return Ok(None);
        }
        match self.solve(deleted)? {
            Outcome::Consistent(w) => Ok(Some(Hypothesis::Weights(w))),
            Outcome::Blocked(support) => {
                for i in support {
                    let w = self.weighted[i].weight;
                    if w > budget {
                        continue;
                    }
                    let pos = deleted.binary_search(&i).unwrap_err();
                    deleted.insert(pos, i);
                    let found = self.branch(deleted, budget - w, seen)?;
                    deleted.remove(pos);
                    if found.is_some() {
                        return Ok(found);
                    }
                }
                Ok(None)
            }
        }
    }

    fn exhaustive(&self, b: u64) -> Result<Option<Hypothesis>> {
        let candidates: Vec<usize> = (0..self.weighted.len())
            .filter(|&i| self.weighted[i].weight <= b)
            .collect();
        for size in 0..=candidates.len().min(b as usize) {
            for combo in itertools::Itertools::combinations(candidates.iter().copied(), size) {
                let weight: u64 = combo.iter().map(|&i| self.weighted[i].weight).sum();
                if weight > b {
                    continue;
                }
                if let Outcome::Consistent(w) = self.solve(&combo)? {
                    return Ok(Some(Hypothesis::Weights(w)));
                }
            }
        }
        Ok(None)
    }
}
