use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for one trial: the master seed picks the key, the trial index picks the stream,
/// so results do not depend on scheduling.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for trial `trial` of grid cell `cell`.
pub fn grid_stream(cell: usize, trial: usize) -> u64 {
    ((cell as u64) << 32) | trial as u64
}

/// Streams reserved for auxiliary draws (coefficient estimates, normalizers, pipelines).
pub const COEFFICIENT_STREAM: u64 = u64::MAX;
pub const NORMALIZER_STREAM: u64 = u64::MAX - 1;
pub const PIPELINE_STREAM: u64 = u64::MAX - 2;
