#![allow(dead_code)]

use std::collections::HashMap;

use certikit::hypoclasses::FiniteFamily;
use certikit::{HypothesisFamily, Label, LabeledExample, Point};
use rand::Rng;

/// Finite family on domain `1..=domain` with `hyps` random distinct rows.
pub fn random_family<R: Rng>(rng: &mut R, domain: usize, hyps: usize) -> HypothesisFamily {
    let total = 1usize << domain;
    let hyps = hyps.min(total);
    let chosen = rand::seq::index::sample(rng, total, hyps).into_vec();
    let rows = chosen.into_iter().map(|mask| mask_row(mask, domain)).collect();
    HypothesisFamily::Finite(FiniteFamily::new((1..=domain).collect(), rows).unwrap())
}

/// Family whose rows are the bit patterns selected by `subset` (bit `k` set keeps pattern `k`).
pub fn family_from_patterns(domain: usize, subset: u64) -> HypothesisFamily {
    let rows = (0..1usize << domain)
        .filter(|k| subset >> k & 1 == 1)
        .map(|k| mask_row(k, domain))
        .collect();
    HypothesisFamily::Finite(FiniteFamily::new((1..=domain).collect(), rows).unwrap())
}

fn mask_row(mask: usize, domain: usize) -> Vec<Label> {
    (0..domain)
        .map(|j| if mask >> j & 1 == 1 { Label::Pos } else { Label::Neg })
        .collect()
}

/// Plain truth table of a finite family: `table[h][point id]`.
pub struct Truth {
    pub rows: Vec<HashMap<usize, Label>>,
    pub domain: Vec<usize>,
}

impl Truth {
    pub fn of(family: &HypothesisFamily) -> Truth {
        let domain = family.domain_ids().unwrap();
        let rows = family
            .hypothesis_ids()
            .unwrap()
            .into_iter()
            .map(|id| {
                let h = certikit::Hypothesis::Id(id);
                domain
                    .iter()
                    .map(|&p| (p, family.predict(&h, &Point::Discrete(p)).unwrap()))
                    .collect()
            })
            .collect();
        Truth { rows, domain }
    }

    fn label(&self, h: usize, p: &Point) -> Label {
        self.rows[h][&p.as_discrete().unwrap()]
    }

    /// Hypotheses with at most `b` mistakes, counting `heavy` (if any) with weight `b + 1`.
    pub fn survivors(&self, data: &[LabeledExample], heavy: Option<&LabeledExample>, b: u64) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&h| {
                let mut err: u64 = data.iter().filter(|e| self.label(h, &e.point) != e.label).count() as u64;
                if let Some(e) = heavy {
                    if self.label(h, &e.point) != e.label {
                        err += b + 1;
                    }
                }
                err <= b
            })
            .collect()
    }

    pub fn realizable(&self, data: &[LabeledExample], b: u64) -> bool {
        !self.survivors(data, None, b).is_empty()
    }

    /// Every hypothesis with at most `b` mistakes predicts `label` at `test`.
    pub fn agrees(&self, data: &[LabeledExample], b: u64, test: &Point, label: Label) -> bool {
        self.survivors(data, None, b)
            .into_iter()
            .all(|h| self.label(h, test) == label)
    }

    pub fn certifies(&self, data: &[LabeledExample], b: u64, test: &Point, label: Label) -> bool {
        self.realizable(data, b) && self.agrees(data, b, test, label)
    }

    /// Largest minimum-certificate size over multisets with at most `cap` copies of each
    /// `(point, label)` pair, by dynamic programming over count vectors.
    pub fn max_minimum_certificate(&self, b: u64, cap: usize) -> usize {
        let pairs: Vec<LabeledExample> = self
            .domain
            .iter()
            .flat_map(|&p| {
                [
                    LabeledExample::discrete(p, Label::Neg),
                    LabeledExample::discrete(p, Label::Pos),
                ]
            })
            .collect();
        let tests: Vec<(Point, Label)> = self
            .domain
            .iter()
            .flat_map(|&p| [(Point::Discrete(p), Label::Neg), (Point::Discrete(p), Label::Pos)])
            .collect();
        let base = cap + 1;
        let total = base.pow(pairs.len() as u32);
        // mistakes of each hypothesis per pair
        let err: Vec<Vec<u64>> = pairs
            .iter()
            .map(|e| {
                (0..self.rows.len())
                    .map(|h| (self.label(h, &e.point) != e.label) as u64)
                    .collect()
            })
            .collect();
        let mut best = vec![vec![usize::MAX; tests.len()]; total];
        let mut answer = 0;
        for code in 0..total {
            let mut counts = Vec::with_capacity(pairs.len());
            let mut c = code;
            for _ in 0..pairs.len() {
                counts.push(c % base);
                c /= base;
            }
            let size: usize = counts.iter().sum();
            let survivors: Vec<usize> = (0..self.rows.len())
                .filter(|&h| counts.iter().zip(&err).map(|(&k, e)| k as u64 * e[h]).sum::<u64>() <= b)
                .collect();
            if survivors.is_empty() {
                continue;
            }
            // counts are little-endian digits, so removing one copy of pair p is code - base^p
            let mut stride = 1;
            for &k in &counts {
                if k > 0 {
                    let (head, tail) = best.split_at_mut(code);
                    for (t, slot) in tail[0].iter_mut().enumerate() {
                        *slot = (*slot).min(head[code - stride][t]);
                    }
                }
                stride *= base;
            }
            for (t, (x, y)) in tests.iter().enumerate() {
                if survivors.iter().all(|&h| self.label(h, x) == *y) {
                    best[code][t] = best[code][t].min(size);
                    answer = answer.max(best[code][t]);
                }
            }
        }
        answer
    }
}

pub fn neg(id: usize) -> LabeledExample {
    LabeledExample::discrete(id, Label::Neg)
}

pub fn pos(id: usize) -> LabeledExample {
    LabeledExample::discrete(id, Label::Pos)
}
