use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domain::Point;
use crate::error::{CertError, Result};
use crate::scalar::dot;

/// Source of i.i.d. points.
pub trait PointSampler: Sync {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<Point>;

    /// Ball on which draws are uniform, when known exactly.
    fn uniform_ball(&self) -> Option<(Vec<f64>, f64)> {
        None
    }

    /// The underlying finite-support distribution, when there is one.
    fn as_finite(&self) -> Option<&Distribution> {
        None
    }
}

#[derive(Debug, Clone)]
pub enum Distribution {
    FiniteSupport {
        points: Vec<usize>,
        probs: Vec<f64>,
        index: WeightedIndex<f64>,
    },
    UniformBall {
        center: Vec<f64>,
        radius: f64,
    },
}

impl Distribution {
    pub fn finite(points: Vec<usize>, probs: Vec<f64>) -> Result<Distribution> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(CertError::input(
                "finite support needs matching, nonempty points and probabilities",
            ));
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(CertError::input("probabilities must lie in [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(CertError::input(format!("probabilities sum to {total}, not 1")));
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CertError::input("support points must be distinct"));
        }
        let index = WeightedIndex::new(&probs).map_err(|e| CertError::input(format!("bad weights: {e}")))?;
        Ok(Distribution::FiniteSupport { points, probs, index })
    }

    pub fn uniform_on(points: Vec<usize>) -> Result<Distribution> {
        let n = points.len();
        Distribution::finite(points, vec![1.0 / n as f64; n])
    }

    pub fn uniform_ball(center: Vec<f64>, radius: f64) -> Result<Distribution> {
        if center.is_empty() {
            return Err(CertError::input("ball needs dimension >= 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CertError::input("ball radius must be positive"));
        }
        Ok(Distribution::UniformBall { center, radius })
    }

    pub fn unit_ball(d: usize) -> Result<Distribution> {
        Distribution::uniform_ball(vec![0.0; d], 1.0)
    }

    /// `points:1,2` | `weighted:1=0.25,2=0.75` | `ball:d=6[,radius=r][,center=c1;c2;...]`
    pub fn parse(spec: &str) -> Result<Distribution> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| CertError::input(format!("distribution spec {spec:?} needs a kind prefix")))?;
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CertError::input(format!("bad number {s:?} in {spec:?}")))
        };
        let id = |s: &str| -> Result<usize> {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CertError::input(format!("bad point id {s:?} in {spec:?}")))
        };
        match kind.trim() {
            "points" => Distribution::uniform_on(rest.split(',').map(id).collect::<Result<_>>()?),
            "weighted" => {
                let mut pts = Vec::new();
                let mut probs = Vec::new();
                for item in rest.split(',') {
                    let (p, w) = item
                        .split_once('=')
                        .ok_or_else(|| CertError::input(format!("expected id=prob, got {item:?}")))?;
                    pts.push(id(p)?);
                    probs.push(num(w)?);
                }
                Distribution::finite(pts, probs)
            }
            "ball" => {
                let mut d = None;
                let mut radius = 1.0;
                let mut center = None;
                for item in rest.split(',') {
                    let (k, v) = item
                        .split_once('=')
                        .ok_or_else(|| CertError::input(format!("expected key=value, got {item:?}")))?;
                    match k.trim() {
                        "d" => d = Some(id(v)?),
                        "radius" => radius = num(v)?,
                        "center" => center = Some(v.split(';').map(num).collect::<Result<Vec<_>>>()?),
                        other => return Err(CertError::input(format!("unknown ball key {other:?}"))),
                    }
                }
                let center = match (center, d) {
                    (Some(c), Some(d)) if c.len() != d => {
                        return Err(CertError::input("ball center length does not match d"));
                    }
                    (Some(c), _) => c,
                    (None, Some(d)) => vec![0.0; d],
                    (None, None) => return Err(CertError::input("ball needs d or center")),
                };
                Distribution::uniform_ball(center, radius)
            }
            other => Err(CertError::input(format!("unknown distribution kind {other:?}"))),
        }
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            Distribution::FiniteSupport { .. } => None,
            Distribution::UniformBall { center, .. } => Some(center.len()),
        }
    }

    /// Probability of a discrete point (zero off the support).
    pub fn mass(&self, id: usize) -> f64 {
        match self {
            Distribution::FiniteSupport { points, probs, .. } => {
                points.iter().position(|&p| p == id).map_or(0.0, |i| probs[i])
            }
            Distribution::UniformBall { .. } => 0.0,
        }
    }

    pub fn support(&self) -> Option<(&[usize], &[f64])> {
        match self {
            Distribution::FiniteSupport { points, probs, .. } => Some((points, probs)),
            Distribution::UniformBall { .. } => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Distribution::FiniteSupport { points, index, .. } => Point::Discrete(points[index.sample(rng)]),
            Distribution::UniformBall { center, radius } => Point::Vector(sample_ball(center, *radius, rng)),
        }
    }
}

/// Gaussian direction scaled to radius `r · U^{1/d}`.
pub fn sample_ball<R: Rng + ?Sized>(center: &[f64], radius: f64, rng: &mut R) -> Vec<f64> {
    let d = center.len();
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dot(&g, &g).sqrt();
        if norm == 0.0 {
            continue;
        }
        let u: f64 = rng.random();
        let r = radius * u.powf(1.0 / d as f64);
        return center.iter().zip(&g).map(|(c, x)| c + r * x / norm).collect();
    }
}

impl PointSampler for Distribution {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        Ok(self.sample(rng))
    }

    fn uniform_ball(&self) -> Option<(Vec<f64>, f64)> {
        match self {
            Distribution::UniformBall { center, radius } => Some((center.clone(), *radius)),
            Distribution::FiniteSupport { .. } => None,
        }
    }

    fn as_finite(&self) -> Option<&Distribution> {
        matches!(self, Distribution::FiniteSupport { .. }).then_some(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    BallIndicator {
        center: Vec<f64>,
        radius: f64,
    },
    Constant(f64),
    /// Weights for discrete points; missing points get weight 0.
    Table(Vec<(usize, f64)>),
}

/// A pointwise weight `w: X -> [0, 1]` defining the tilted distribution `D_w ∝ w · D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightingScheme {
    pub weight: WeightFunction,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl ReweightingScheme {
    pub fn ball_indicator(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CertError::input("indicator radius must be positive"));
        }
        Ok(ReweightingScheme {
            weight: WeightFunction::BallIndicator { center, radius },
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(CertError::input("constant weight must lie in [0, 1]"));
        }
        Ok(ReweightingScheme {
            weight: WeightFunction::Constant(c),
        })
    }

    pub fn table(entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.iter().any(|(_, w)| !(0.0..=1.0).contains(w)) {
            return Err(CertError::input("table weights must lie in [0, 1]"));
        }
        Ok(ReweightingScheme {
            weight: WeightFunction::Table(entries),
        })
    }

    pub fn weight(&self, z: &Point) -> f64 {
        match (&self.weight, z) {
            (WeightFunction::Constant(c), _) => *c,
            (WeightFunction::BallIndicator { center, radius }, Point::Vector(v)) => {
                if v.len() == center.len() && dist2(v, center) <= radius * radius {
                    1.0
                } else {
                    0.0
                }
            }
            (WeightFunction::Table(t), Point::Discrete(id)) => t.iter().find(|(p, _)| p == id).map_or(0.0, |&(_, w)| w),
            _ => 0.0,
        }
    }

    /// Exact `Z = E_D[w]` where a closed form exists.
    pub fn exact_normalizer(&self, dist: &Distribution) -> Option<f64> {
        match (&self.weight, dist) {
            (WeightFunction::Constant(c), _) => Some(*c),
            (_, Distribution::FiniteSupport { points, probs, .. }) => Some(
                points
                    .iter()
                    .zip(probs)
                    .map(|(&p, &q)| q * self.weight(&Point::Discrete(p)))
                    .sum(),
            ),
            (WeightFunction::BallIndicator { center: c, radius: r }, Distribution::UniformBall { center, radius }) => {
                if c.len() != center.len() {
                    return Some(0.0);
                }
                let gap = dist2(c, center).sqrt();
                if gap + r <= *radius {
                    Some((r / radius).powi(center.len() as i32))
                } else if gap >= r + radius {
                    Some(0.0)
                } else {
                    None
                }
            }
            (WeightFunction::Table(_), Distribution::UniformBall { .. }) => Some(0.0),
        }
    }

    /// `Z`, exactly when possible and otherwise by Monte Carlo with `samples` draws.
    pub fn normalizer(&self, dist: &Distribution, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
        self.exact_normalizer(dist).unwrap_or_else(|| {
            let hits: f64 = (0..samples).map(|_| self.weight(&dist.sample(rng))).sum();
            hits / samples.max(1) as f64
        })
    }

    /// Smallest admissible normalizer, `eps^3 / (8 (b+1) (d+1))`.
    pub fn validity_threshold(eps: f64, b: u64, d: usize) -> f64 {
        eps.powi(3) / (8.0 * (b as f64 + 1.0) * (d as f64 + 1.0))
    }
}

/// Draws from `D` until one is accepted with probability `w(z)`; returns the point and the
/// number of draws used.
pub fn rejection_sample(
    dist: &Distribution,
    scheme: &ReweightingScheme,
    rng: &mut ChaCha8Rng,
    attempt_cap: u64,
) -> Result<(Point, u64)> {
    for attempt in 1..=attempt_cap {
        let z = dist.sample(rng);
        let w = scheme.weight(&z);
        if w >= 1.0 || (w > 0.0 && rng.random::<f64>() < w) {
            return Ok((z, attempt));
        }
    }
    Err(CertError::Starvation { attempts: attempt_cap })
}

pub const DEFAULT_ATTEMPT_CAP: u64 = 10_000_000;

/// `D_w` as a [`PointSampler`].
#[derive(Debug, Clone)]
pub struct Reweighted<'a> {
    pub dist: &'a Distribution,
    pub scheme: &'a ReweightingScheme,
    pub attempt_cap: u64,
}

impl<'a> Reweighted<'a> {
    pub fn new(dist: &'a Distribution, scheme: &'a ReweightingScheme) -> Self {
        Reweighted {
            dist,
            scheme,
            attempt_cap: DEFAULT_ATTEMPT_CAP,
        }
    }
}

impl PointSampler for Reweighted<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        rejection_sample(self.dist, self.scheme, rng, self.attempt_cap).map(|(z, _)| z)
    }

    fn uniform_ball(&self) -> Option<(Vec<f64>, f64)> {
        match (&self.scheme.weight, self.dist) {
            (WeightFunction::Constant(c), _) if *c > 0.0 => self.dist.uniform_ball(),
            (WeightFunction::BallIndicator { center: c, radius: r }, Distribution::UniformBall { center, radius }) => {
                (c.len() == center.len() && dist2(c, center).sqrt() + r <= *radius).then(|| (c.clone(), *r))
            }
            _ => None,
        }
    }
}
