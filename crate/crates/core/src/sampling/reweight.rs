use serde::Serialize;

use super::coefficient::{certificate_coefficient_mc, sample_size_bound, CoefficientEstimate, McConfig};
use super::distribution::{rejection_sample, Distribution, Reweighted, ReweightingScheme, DEFAULT_ATTEMPT_CAP};
use super::rng::{trial_rng, NORMALIZER_STREAM, PIPELINE_STREAM};
use crate::certify::minimal_certificate;
use crate::domain::{Certificate, Dataset, LabeledExample, Point};
use crate::error::{CertError, Result};
use crate::hypoclasses::Hypothesis;
use crate::oracles::Oracle;

#[derive(Debug, Clone, Copy)]
pub struct ReweightOptions {
    pub eps_samples: usize,
    pub directions: usize,
    /// The Monte Carlo estimate of `ε_x(D_w)` is divided by this before sizing the sample.
    pub safety: f64,
    pub bound_constant: f64,
    /// Dimension fed to the sample-size bound; defaults to the family's VC dimension.
    pub dimension: Option<usize>,
    /// Shrink the accepted sample with the greedy minimal-certificate pass.
    pub shrink: bool,
    pub attempt_cap: u64,
    pub z_samples: usize,
}

impl Default for ReweightOptions {
    fn default() -> Self {
        ReweightOptions {
            eps_samples: 100_000,
            directions: 256,
            safety: 2.0,
            bound_constant: 8.0,
            dimension: None,
            shrink: true,
            attempt_cap: DEFAULT_ATTEMPT_CAP,
            z_samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReweightReport {
    /// `None` if the accepted sample did not put the test point in the agreement region.
    pub certificate: Option<Certificate>,
    /// Accepted sample, labeled by the target.
    pub sample: Dataset,
    pub eps_estimate: CoefficientEstimate,
    pub eps_used: f64,
    pub dimension: usize,
    pub m_w: usize,
    pub accepted: usize,
    pub raw_draws: u64,
    pub normalizer: f64,
    pub normalizer_threshold: f64,
    pub in_agreement: bool,
}

impl ReweightReport {
    pub fn draws_per_acceptance(&self) -> f64 {
        self.raw_draws as f64 / self.accepted.max(1) as f64
    }
}

/// Certifies `(test, target(test))` from samples of the tilted distribution `D_w`.
///
/// Estimates `ε_x(D_w)`, sizes the accepted sample by the sample-size bound at confidence
/// `delta / 2`, draws it by rejection from `D`, and shrinks it to a minimal certificate.
#[allow(clippy::too_many_arguments)]
pub fn reweighted_certificate(
    oracle: &Oracle<'_>,
    dist: &Distribution,
    scheme: &ReweightingScheme,
    target: &Hypothesis,
    b: u64,
    test: &Point,
    delta: f64,
    seed: u64,
    options: ReweightOptions,
) -> Result<ReweightReport> {
    let family = oracle.family();
    let label = family.predict(target, test)?;
    let dimension = match options.dimension {
        Some(d) => d,
        None => family.vc_dimension()?,
    };

    let sampler = Reweighted {
        dist,
        scheme,
        attempt_cap: options.attempt_cap,
    };
    let eps_estimate = certificate_coefficient_mc(
        family,
        &sampler,
        target,
        test,
        McConfig {
            samples: options.eps_samples,
            directions: options.directions,
            seed,
        },
    )?;
    let eps_used = (eps_estimate.estimate / options.safety).min(1.0);

    let normalizer = scheme.normalizer(dist, options.z_samples, &mut trial_rng(seed, NORMALIZER_STREAM));
    let normalizer_threshold = ReweightingScheme::validity_threshold(eps_used, b, dimension);
    if normalizer <= 0.0 || normalizer < normalizer_threshold {
        return Err(CertError::input(format!(
            "reweighting normalizer {normalizer} is below the validity threshold {normalizer_threshold}"
        )));
    }

    let m_w = sample_size_bound(b, dimension, eps_used, delta / 2.0, options.bound_constant)?;
    let mut rng = trial_rng(seed, PIPELINE_STREAM);
    let mut raw_draws = 0u64;
    let mut examples = Vec::with_capacity(m_w);
    for _ in 0..m_w {
        let (z, draws) = rejection_sample(dist, scheme, &mut rng, options.attempt_cap)?;
        raw_draws += draws;
        let y = family.predict(target, &z)?;
        examples.push(LabeledExample::new(z, y));
    }
    let sample = Dataset::new(examples);
    let in_agreement = oracle.in_robust_agreement(sample.examples(), b, test, label)?;
    let certificate = if !in_agreement {
        None
    } else if options.shrink {
        Some(minimal_certificate(oracle, &sample, b, test, label)?)
    } else {
        Some(Certificate::new(
            (0..sample.len()).collect(),
            b,
            test.clone(),
            label,
            false,
        ))
    };
    Ok(ReweightReport {
        certificate,
        sample,
        eps_estimate,
        eps_used,
        dimension,
        m_w,
        accepted: m_w,
        raw_draws,
        normalizer,
        normalizer_threshold,
        in_agreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypoclasses::HypothesisFamily;

    #[test]
    fn constant_scheme_matches_direct_sampling() {
        let fam = HypothesisFamily::affine_halfspace(2).unwrap();
        let o = Oracle::new(&fam);
        let ball = Distribution::unit_ball(2).unwrap();
        let scheme = ReweightingScheme::constant(1.0).unwrap();
        let target = Hypothesis::Weights(vec![0.0, 0.0, 1.0]);
        let test = Point::Vector(vec![0.0, 0.0]);
        let opts = ReweightOptions {
            eps_samples: 5000,
            directions: 32,
            z_samples: 1000,
            ..ReweightOptions::default()
        };
        let r = reweighted_certificate(&o, &ball, &scheme, &target, 0, &test, 0.1, 3, opts).unwrap();
        assert_eq!(r.raw_draws, r.accepted as u64);
        assert!(r.in_agreement);
        let cert = r.certificate.unwrap();
        assert!(o
            .is_certificate(&r.sample, &cert.indices, 0, &test, cert.label)
            .unwrap());
    }
}
