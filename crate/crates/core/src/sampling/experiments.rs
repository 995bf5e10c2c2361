use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::coefficient::certificate_coefficient;
use super::distribution::{Distribution, PointSampler};
use super::rng::{grid_stream, trial_rng};
use crate::domain::{Dataset, LabeledExample, Point};
use crate::error::{CertError, Result};
use crate::hypoclasses::{coupon_family, Hypothesis, HypothesisFamily};
use crate::oracles::Oracle;

pub const Z95: f64 = 1.959963984540054;
pub const Z99: f64 = 2.5758293035489004;

/// Wilson score interval for `successes / n`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub stream: u64,
    pub m: usize,
    pub b: u64,
    /// `None` when the oracle hit a capacity guard.
    pub outcome: Option<bool>,
    pub certificate_size: Option<usize>,
    pub wall_time: f64,
}

/// Draws `m` points and labels them with the target.
pub fn draw_labeled(
    family: &HypothesisFamily,
    sampler: &dyn PointSampler,
    target: &Hypothesis,
    m: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Dataset> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let z = sampler.draw(rng)?;
        let y = family.predict(target, &z)?;
        out.push(LabeledExample::new(z, y));
    }
    Ok(Dataset::new(out))
}

/// Independent agreement trials at one sample size.
#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    oracle: &Oracle<'_>,
    sampler: &dyn PointSampler,
    target: &Hypothesis,
    test: &Point,
    b: u64,
    m: usize,
    trials: usize,
    seed: u64,
    cell: usize,
) -> Result<Vec<TrialRecord>> {
    let family = oracle.family();
    let label = family.predict(target, test)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let stream = grid_stream(cell, t);
            let mut rng = trial_rng(seed, stream);
            let data = draw_labeled(family, sampler, target, m, &mut rng)?;
            let outcome = match oracle.in_robust_agreement(data.examples(), b, test, label) {
                Ok(v) => Some(v),
                Err(CertError::Capacity { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(TrialRecord {
                seed,
                stream,
                m,
                b,
                outcome,
                certificate_size: None,
                wall_time: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub capacity_failures: usize,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Empirical probability that the test point lands in the `b`-robust agreement region of
/// `m` target-labeled draws, for each `m` in the grid.
#[allow(clippy::too_many_arguments)]
pub fn agreement_probability_curve(
    oracle: &Oracle<'_>,
    sampler: &dyn PointSampler,
    target: &Hypothesis,
    test: &Point,
    b: u64,
    m_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if trials == 0 {
        return Err(CertError::input("curve needs at least one trial"));
    }
    if let Some(dist) = sampler.as_finite() {
        if oracle.family().is_finite() && certificate_coefficient(oracle.family(), dist, target, test)? == 0.0 {
            return Err(CertError::Unboundable(
                "certificate coefficient is zero: the test point is never certified".into(),
            ));
        }
    }
    m_grid
        .iter()
        .enumerate()
        .map(|(cell, &m)| {
            let records = run_trials(oracle, sampler, target, test, b, m, trials, seed, cell)?;
            let successes = records.iter().filter(|r| r.outcome == Some(true)).count();
            let capacity_failures = records.iter().filter(|r| r.outcome.is_none()).count();
            let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
            Ok(CurvePoint {
                m,
                trials,
                successes,
                capacity_failures,
                probability: successes as f64 / trials as f64,
                ci_low,
                ci_high,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TightnessTerm {
    B,
    Dlog,
    Delta,
}

impl TightnessTerm {
    pub fn parse(s: &str) -> Result<TightnessTerm> {
        match s {
            "b" => Ok(TightnessTerm::B),
            "dlog" => Ok(TightnessTerm::Dlog),
            "delta" => Ok(TightnessTerm::Delta),
            other => Err(CertError::input(format!("unknown tightness term {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessParams {
    /// Budget for the `b` term.
    pub b: u64,
    /// Subset size of the coupon-collector family.
    pub d: usize,
    /// Number of coupons.
    pub k: usize,
    /// Mass of the rare support point in the `b`-term instance.
    pub eps: f64,
    /// Sample sizes for the `delta` term.
    pub m_values: Vec<usize>,
}

impl Default for TightnessParams {
    fn default() -> Self {
        TightnessParams {
            b: 3,
            d: 2,
            k: 30,
            eps: 0.05,
            m_values: vec![10, 20, 30],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRow {
    pub m: usize,
    pub trials: usize,
    /// Trials in which the term's bad event happened.
    pub events: usize,
    pub frequency: f64,
    /// 99% Wilson interval for `frequency`.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Exact probability of the bad event.
    pub reference: f64,
    /// Trials where the test point was not in the agreement region.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub term: TightnessTerm,
    pub epsilon_x: f64,
    pub b: u64,
    pub rows: Vec<TightnessRow>,
}

fn binomial_pmf(m: usize, k: usize, p: f64) -> f64 {
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (m - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)
}

/// Probability that at least `j` of `k` equally likely coupons are unseen after `m` draws,
/// by inclusion-exclusion.
pub fn prob_at_least_unseen(k: usize, m: usize, j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    if j > k {
        return 0.0;
    }
    let choose = |n: usize, r: usize| -> f64 {
        let mut c = 1.0f64;
        for i in 0..r {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        c
    };
    let exactly = |u: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..=(k - u) {
            let frac = 1.0 - (u + i) as f64 / k as f64;
            let term = choose(k - u, i) * frac.powi(m as i32);
            s += if i % 2 == 0 { term } else { -term };
        }
        choose(k, u) * s
    };
    let below: f64 = (0..j).map(exactly).sum();
    (1.0 - below).clamp(0.0, 1.0)
}

/// Reproduces one lower-bound construction at desk scale and reports how often its bad
/// event occurs at the critical sample size, next to the exact probability.
pub fn tightness_experiments(
    term: TightnessTerm,
    params: &TightnessParams,
    trials: usize,
    seed: u64,
) -> Result<TightnessReport> {
    if trials == 0 {
        return Err(CertError::input("tightness experiments need at least one trial"));
    }
    match term {
        TightnessTerm::B => b_term(params, trials, seed),
        TightnessTerm::Delta | TightnessTerm::Dlog => coupon_terms(term, params, trials, seed),
    }
}

fn b_term(params: &TightnessParams, trials: usize, seed: u64) -> Result<TightnessReport> {
    let eps = params.eps;
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(CertError::input("b-term eps must lie in (0, 1/2]"));
    }
    let b = params.b;
    let family = HypothesisFamily::singletons(3)?;
    let dist = Distribution::finite(vec![1, 2], vec![eps, 1.0 - eps])?;
    let target = Hypothesis::Id(3);
    let test = Point::Discrete(3);
    let eps_x = certificate_coefficient(&family, &dist, &target, &test)?;
    let m = ((b as f64 + 1.0) / (4.0 * eps_x) - 1e-9).ceil() as usize;
    let oracle = Oracle::new(&family);
    let records = run_trials(&oracle, &dist, &target, &test, b, m, trials, seed, 0)?;
    let failures = records.iter().filter(|r| r.outcome == Some(false)).count();
    // failure iff one of the two support points was seen at most b times
    let reference: f64 = (0..=m)
        .filter(|&c| c as u64 <= b || (m - c) as u64 <= b)
        .map(|c| binomial_pmf(m, c, eps))
        .sum();
    let (ci_low, ci_high) = wilson_interval(failures, trials, Z99);
    Ok(TightnessReport {
        term: TightnessTerm::B,
        epsilon_x: eps_x,
        b,
        rows: vec![TightnessRow {
            m,
            trials,
            events: failures,
            frequency: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            reference: reference.min(1.0),
            failures,
        }],
    })
}

fn coupon_terms(term: TightnessTerm, params: &TightnessParams, trials: usize, seed: u64) -> Result<TightnessReport> {
    let (d, k) = (params.d, params.k);
    let (family, target) = coupon_family(d, k)?;
    let dist = Distribution::uniform_on((1..=k).collect())?;
    let test = Point::Discrete(0);
    let eps_x = certificate_coefficient(&family, &dist, &target, &test)?;
    let oracle = Oracle::new(&family);
    let grid: Vec<usize> = match term {
        TightnessTerm::Delta => params.m_values.clone(),
        _ => vec![((k as f64 / 2.0) * (k as f64 / d as f64).ln()).ceil() as usize],
    };
    let label = family.predict(&target, &test)?;
    let mut rows = Vec::with_capacity(grid.len());
    for (cell, &m) in grid.iter().enumerate() {
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, grid_stream(cell, t));
                let mut seen = vec![false; k + 1];
                let mut data = Vec::with_capacity(m);
                for _ in 0..m {
                    let z = rng.random_range(1..=k);
                    seen[z] = true;
                    let p = Point::Discrete(z);
                    let y = family.predict(&target, &p)?;
                    data.push(LabeledExample::new(p, y));
                }
                let event = match term {
                    TightnessTerm::Delta => !seen[1..=d].iter().any(|&s| s),
                    _ => seen[1..].iter().filter(|&&s| !s).count() >= d,
                };
                let agree = oracle.in_robust_agreement(&data, 0, &test, label)?;
                Ok((event, !agree))
            })
            .collect::<Result<Vec<_>>>()?;
        let events = outcomes.iter().filter(|o| o.0).count();
        let failures = outcomes.iter().filter(|o| o.1).count();
        let reference = match term {
            TightnessTerm::Delta => (1.0 - d as f64 / k as f64).powi(m as i32),
            _ => prob_at_least_unseen(k, m, d),
        };
        let (ci_low, ci_high) = wilson_interval(events, trials, Z99);
        rows.push(TightnessRow {
            m,
            trials,
            events,
            frequency: events as f64 / trials as f64,
            ci_low,
            ci_high,
            reference,
            failures,
        });
    }
    Ok(TightnessReport {
        term,
        epsilon_x: eps_x,
        b: 0,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_interval(30, 100, Z95);
        assert!(lo < 0.3 && hi > 0.3);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        let (lo, _) = wilson_interval(0, 50, Z95);
        assert!(lo < 1e-12);
    }

    #[test]
    fn coupon_probability_small_cases() {
        // 2 coupons, 1 draw: exactly one unseen
        assert!((prob_at_least_unseen(2, 1, 1) - 1.0).abs() < 1e-12);
        assert!(prob_at_least_unseen(2, 1, 2).abs() < 1e-12);
        // 2 coupons, 3 draws: both seen unless all draws equal
        assert!((prob_at_least_unseen(2, 3, 1) - 0.25).abs() < 1e-12);
        assert_eq!(prob_at_least_unseen(5, 3, 0), 1.0);
    }

    #[test]
    fn curve_on_singletons() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let dist = Distribution::uniform_on(vec![1, 2]).unwrap();
        let curve = agreement_probability_curve(&o, &dist, &Hypothesis::Id(3), &Point::Discrete(3), 0, &[0, 40], 50, 9)
            .unwrap();
        assert_eq!(curve[0].successes, 0);
        assert_eq!(curve[1].successes, 50);
    }

    #[test]
    fn curve_rejects_zero_coefficient() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let dist = Distribution::uniform_on(vec![2]).unwrap();
        let err =
            agreement_probability_curve(&o, &dist, &Hypothesis::Id(3), &Point::Discrete(3), 0, &[5], 5, 1).unwrap_err();
        assert!(matches!(err, CertError::Unboundable(_)));
    }

    #[test]
    fn curves_are_reproducible() {
        let (fam, star) = coupon_family(2, 8).unwrap();
        let o = Oracle::new(&fam);
        let dist = Distribution::uniform_on((1..=8).collect()).unwrap();
        let run = || agreement_probability_curve(&o, &dist, &star, &Point::Discrete(0), 0, &[10, 20], 40, 77).unwrap();
        assert_eq!(run(), run());
    }
}
