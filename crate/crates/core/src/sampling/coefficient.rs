use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::distribution::{Distribution, PointSampler};
use super::rng::{trial_rng, COEFFICIENT_STREAM};
use crate::domain::{Label, Point};
use crate::error::{CertError, Result};
use crate::hypoclasses::{Hypothesis, HypothesisFamily};
use crate::scalar::dot;

/// Exact `ε_x`: the least disagreement mass with the target among hypotheses that mislabel
/// the test point. `f64::INFINITY` when no hypothesis mislabels it.
pub fn certificate_coefficient(
    family: &HypothesisFamily,
    dist: &Distribution,
    target: &Hypothesis,
    test: &Point,
) -> Result<f64> {
    let ids = family
        .hypothesis_ids()
        .ok_or_else(|| CertError::input("exact certificate coefficient needs a finite family"))?;
    let (points, probs) = dist
        .support()
        .ok_or_else(|| CertError::input("exact certificate coefficient needs a finite-support distribution"))?;
    let support: Vec<Point> = points.iter().map(|&p| Point::Discrete(p)).collect();
    let star_test = family.predict(target, test)?;
    let star: Vec<Label> = support
        .iter()
        .map(|z| family.predict(target, z))
        .collect::<Result<_>>()?;
    let mut best = f64::INFINITY;
    for id in ids {
        let h = Hypothesis::Id(id);
        if family.predict(&h, test)? == star_test {
            continue;
        }
        let mut mass = 0.0;
        for ((z, &p), &y) in support.iter().zip(probs).zip(&star) {
            if family.predict(&h, z)? != y {
                mass += p;
            }
        }
        best = best.min(mass);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    pub estimate: f64,
    /// 95% binomial half-width at the estimate.
    pub half_width: f64,
    pub samples: usize,
    pub candidates: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub samples: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            directions: 256,
            seed: 0,
        }
    }
}

/// Monte Carlo upper estimate of `ε_x` for halfspaces, minimizing over hyperplanes through
/// the test point (through the origin as well for homogeneous families).
///
/// The best cut is chosen on one sample and its error is measured on a second, independent
/// sample of the same size, so the estimate and its half-width refer to a fixed hypothesis
/// in `H_x` and are an honest upper estimate.
///
/// Candidate normals are random directions, plus `±(x - c)` when the sampler is uniform on a
/// ball centered at `c`, which is the optimal cut for a target that is constant on the ball.
pub fn certificate_coefficient_mc(
    family: &HypothesisFamily,
    sampler: &dyn PointSampler,
    target: &Hypothesis,
    test: &Point,
    config: McConfig,
) -> Result<CoefficientEstimate> {
    if !family.is_halfspace() {
        return Err(CertError::input("Monte Carlo coefficient is for halfspace families"));
    }
    if config.samples < 1000 {
        return Err(CertError::input("Monte Carlo coefficient needs at least 1000 samples"));
    }
    family.check_hypothesis(target)?;
    let homogeneous = matches!(family, HypothesisFamily::Halfspace { .. });
    let x = test
        .as_vector()
        .ok_or_else(|| CertError::input("halfspace test point must be a vector"))?
        .to_vec();
    family.check_point(test)?;
    let d = x.len();
    let star_test = family.predict(target, test)?;

    let mut rng = trial_rng(config.seed, COEFFICIENT_STREAM);
    let mut pts = Vec::with_capacity(config.samples);
    let mut labels = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        let z = sampler.draw(&mut rng)?;
        labels.push(family.predict(target, &z)?);
        pts.push(z.as_vector().expect("vector sampler").to_vec());
    }

    let xnorm2 = dot(&x, &x);
    let project = |u: Vec<f64>| -> Vec<f64> {
        if homogeneous && xnorm2 > 0.0 {
            let t = dot(&u, &x) / xnorm2;
            u.iter().zip(&x).map(|(a, b)| a - t * b).collect()
        } else {
            u
        }
    };
    let mut normals: Vec<Vec<f64>> = Vec::with_capacity(2 * config.directions + 2);
    if !homogeneous {
        if let Some((c, _)) = sampler.uniform_ball() {
            let u: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
            if dot(&u, &u) > 0.0 {
                normals.push(u.iter().map(|v| -v).collect());
                normals.push(u);
            }
        }
    }
    for _ in 0..config.directions {
        let u = project((0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());
        if dot(&u, &u) > 1e-24 {
            normals.push(u.iter().map(|v| -v).collect());
            normals.push(u);
        }
    }
    if normals.is_empty() {
        return Err(CertError::Numerical("no usable cut directions".into()));
    }

    // the test point sits on each cut; it takes the label opposite to the target's
    let offset_of = |u: &[f64]| if homogeneous { 0.0 } else { dot(u, &x) };
    let errs = |u: &[f64], z: &[f64], y: Label| {
        let s = dot(u, z) - offset_of(u);
        let h = match star_test {
            Label::Pos => s > 0.0,
            Label::Neg => s >= 0.0,
        };
        h != (y == Label::Pos)
    };
    let (_, chosen) = normals
        .par_iter()
        .enumerate()
        .map(|(k, u)| {
            let count = pts.iter().zip(&labels).filter(|(z, &y)| errs(u, z, y)).count();
            (count, k)
        })
        .min()
        .expect("nonempty candidates");

    // score the selected cut on fresh draws so the minimum does not bias the estimate down
    let u = &normals[chosen];
    let mut wrong = 0usize;
    for _ in 0..config.samples {
        let z = sampler.draw(&mut rng)?;
        let y = family.predict(target, &z)?;
        if errs(u, z.as_vector().expect("vector sampler"), y) {
            wrong += 1;
        }
    }
    let n = config.samples as f64;
    let p = wrong as f64 / n;
    Ok(CoefficientEstimate {
        estimate: p,
        half_width: 1.96 * (p * (1.0 - p) / n).sqrt(),
        samples: config.samples,
        candidates: normals.len(),
    })
}

/// `ceil(C · (b + d·ln(1/ε) + ln(1/δ)) / ε)`.
pub fn sample_size_bound(b: u64, d: usize, eps: f64, delta: f64, c: f64) -> Result<usize> {
    if eps == 0.0 {
        return Err(CertError::Unboundable(
            "certificate coefficient is zero; no sample size certifies this point".into(),
        ));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CertError::input(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CertError::input(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(CertError::input("constant must be positive"));
    }
    if d == 0 {
        return Err(CertError::input("dimension must be at least 1"));
    }
    let v = c * (b as f64 + d as f64 * (1.0 / eps).ln() + (1.0 / delta).ln()) / eps;
    // absorb rounding noise in the logarithms before taking the ceiling
    Ok((v - 1e-9 * v.max(1.0)).ceil() as usize)
}

pub const DEFAULT_BOUND_CONSTANT: f64 = 8.0;
