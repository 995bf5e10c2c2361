//! Distributions, certificate coefficients, sample-size experiments, and the rejection
//! sampling pipeline for reweighted certificates.
//!
//! All randomness flows through [`rng::trial_rng`]: a ChaCha stream keyed by the master
//! seed and indexed by trial, so parallel and serial runs produce identical numbers.

pub mod coefficient;
pub mod distribution;
pub mod experiments;
pub mod reweight;
pub mod rng;

pub use coefficient::{
    certificate_coefficient, certificate_coefficient_mc, sample_size_bound, CoefficientEstimate, McConfig,
    DEFAULT_BOUND_CONSTANT,
};
pub use distribution::{
    rejection_sample, sample_ball, Distribution, PointSampler, Reweighted, ReweightingScheme, WeightFunction,
    DEFAULT_ATTEMPT_CAP,
};
pub use experiments::{
    agreement_probability_curve, draw_labeled, prob_at_least_unseen, run_trials, tightness_experiments,
    wilson_interval, CurvePoint, TightnessParams, TightnessReport, TightnessRow, TightnessTerm, TrialRecord, Z95, Z99,
};
pub use reweight::{reweighted_certificate, ReweightOptions, ReweightReport};
pub use rng::trial_rng;
