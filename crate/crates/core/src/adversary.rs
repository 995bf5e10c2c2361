//! Label-flipping adversaries with budget `b`.

use itertools::Itertools;
use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Dataset, Label, Point};
use crate::error::{CertError, Result};
use crate::hypoclasses::{binomial, ENUMERATION_GUARD};
use crate::oracles::Oracle;
use crate::sampling::rng::trial_rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corruption {
    pub data: Dataset,
    /// Indices whose labels were flipped, ascending.
    pub flipped: Vec<usize>,
}

fn flip(data: &Dataset, indices: &[usize]) -> Dataset {
    let mut out = data.clone();
    out.flip_labels(indices);
    out
}

/// Flips `b` distinct uniformly chosen labels.
pub fn corrupt_random(data: &Dataset, b: usize, seed: u64) -> Result<Corruption> {
    if b > data.len() {
        return Err(CertError::input(format!(
            "budget {b} exceeds dataset size {}",
            data.len()
        )));
    }
    let mut rng = trial_rng(seed, 0);
    let mut flipped = index::sample(&mut rng, data.len(), b).into_vec();
    flipped.sort_unstable();
    Ok(Corruption {
        data: flip(data, &flipped),
        flipped,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct WorstCaseConfig {
    pub guard: u128,
    /// Size of the certificates counted by the tie-break score; no score when `None`.
    pub score_size: Option<usize>,
}

impl Default for WorstCaseConfig {
    fn default() -> Self {
        WorstCaseConfig {
            guard: ENUMERATION_GUARD,
            score_size: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCaseReport {
    pub corruption: Corruption,
    /// Whether the flip set removed `(test, label)` from the agreement region.
    pub success: bool,
    /// Surviving certificates of the scored size, for unsuccessful searches.
    pub score: Option<usize>,
    pub flip_sets_tried: u128,
}

/// Searches all flip sets of size at most `b` (by size, then lexicographically) for one that
/// ejects `(test, label)` from the `b`-robust agreement region.
pub fn corrupt_worst_case(
    oracle: &Oracle<'_>,
    data: &Dataset,
    b: usize,
    test: &Point,
    label: Label,
    config: WorstCaseConfig,
) -> Result<WorstCaseReport> {
    let n = data.len();
    let bb = b.min(n);
    let total: u128 = (0..=bb).map(|k| binomial(n as u64, k as u64)).sum();
    if total > config.guard {
        return Err(CertError::capacity("worst-case flip sets", total, config.guard));
    }
    let budget = b as u64;
    for size in 0..=bb {
        let sets: Vec<Vec<usize>> = (0..n).combinations(size).collect();
        let outcomes = sets
            .par_iter()
            .map(|s| {
                let corrupted = flip(data, s);
                oracle.in_robust_agreement(corrupted.examples(), budget, test, label)
            })
            .collect::<Result<Vec<bool>>>()?;
        if let Some(k) = outcomes.iter().position(|&agree| !agree) {
            let flipped = sets[k].clone();
            return Ok(WorstCaseReport {
                corruption: Corruption {
                    data: flip(data, &flipped),
                    flipped,
                },
                success: true,
                score: None,
                flip_sets_tried: total,
            });
        }
    }

    let Some(size) = config.score_size else {
        return Ok(WorstCaseReport {
            corruption: Corruption {
                data: data.clone(),
                flipped: Vec::new(),
            },
            success: false,
            score: None,
            flip_sets_tried: total,
        });
    };
    let cert_work = binomial(n as u64, size as u64).saturating_mul(total);
    if cert_work > config.guard {
        return Err(CertError::capacity(
            "worst-case tie-break scoring",
            cert_work,
            config.guard,
        ));
    }
    let all_sets: Vec<Vec<usize>> = (0..=bb).flat_map(|k| (0..n).combinations(k)).collect();
    let scores = all_sets
        .par_iter()
        .map(|s| {
            let corrupted = flip(data, s);
            let mut count = 0usize;
            for idx in (0..n).combinations(size) {
                if oracle.is_certificate(&corrupted, &idx, budget, test, label)? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<usize>>>()?;
    let (k, &score) = scores
        .iter()
        .enumerate()
        .min_by_key(|&(k, &s)| (s, k))
        .expect("at least the empty flip set");
    let flipped = all_sets[k].clone();
    Ok(WorstCaseReport {
        corruption: Corruption {
            data: flip(data, &flipped),
            flipped,
        },
        success: false,
        score: Some(score),
        flip_sets_tried: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::LabeledExample;
    use crate::hypoclasses::HypothesisFamily;

    fn copies(id: usize, label: Label, k: usize) -> Vec<LabeledExample> {
        (0..k).map(|_| LabeledExample::discrete(id, label)).collect()
    }

    #[test]
    fn random_flip_counts() {
        let data: Dataset = (1..=6).map(|i| LabeledExample::discrete(i, Label::Neg)).collect();
        assert_eq!(corrupt_random(&data, 0, 1).unwrap().data, data);
        let all = corrupt_random(&data, 6, 1).unwrap();
        assert!(all.data.examples().iter().all(|e| e.label == Label::Pos));
        for b in 0..=6 {
            let c = corrupt_random(&data, b, 42).unwrap();
            let changed = c
                .data
                .examples()
                .iter()
                .zip(data.examples())
                .filter(|(a, o)| a.label != o.label)
                .count();
            assert_eq!(changed, b);
            assert_eq!(c.flipped.len(), b);
        }
        assert!(corrupt_random(&data, 7, 1).is_err());
    }

    #[test]
    fn copies_resist_and_fall() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let test = Point::Discrete(2);
        for b in 1..=2usize {
            let strong = Dataset::new(copies(2, Label::Pos, 2 * b + 1));
            let r = corrupt_worst_case(&o, &strong, b, &test, Label::Pos, WorstCaseConfig::default()).unwrap();
            assert!(!r.success);
            let weak = Dataset::new(copies(2, Label::Pos, 2 * b));
            let r = corrupt_worst_case(&o, &weak, b, &test, Label::Pos, WorstCaseConfig::default()).unwrap();
            assert!(r.success);
            assert_eq!(r.corruption.flipped, (0..b).collect::<Vec<_>>());
        }
    }

    #[test]
    fn zero_budget_is_identity() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let data = Dataset::new(copies(1, Label::Neg, 1));
        let cfg = WorstCaseConfig {
            score_size: Some(1),
            ..WorstCaseConfig::default()
        };
        let r = corrupt_worst_case(&o, &data, 0, &Point::Discrete(1), Label::Neg, cfg).unwrap();
        assert!(!r.success);
        assert_eq!(r.corruption.data, data);
        assert_eq!(r.score, Some(1));
    }
}
