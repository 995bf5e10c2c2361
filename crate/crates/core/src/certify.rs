//! Certificate extraction.
//!
//! * [`minimal_certificate`]: one greedy deletion pass; the result is inclusion-minimal.
//! * [`minimum_certificate`]: subsets by increasing size; exact but exponential.
//! * [`caratheodory_certificate`]: halfspaces at `b = 0`, at most `d` points.
//! * [`chunked_certificate`]: `b + 1` disjoint zero-budget certificates, concatenated.

use itertools::Itertools;
use rayon::prelude::*;

use crate::conic::{caratheodory_reduce, conic_membership, ConicInstance, ConicSolution};
use crate::domain::{Certificate, Dataset, Label, LabeledExample, Point};
use crate::error::{CertError, Result};
use crate::hypoclasses::{binomial, ENUMERATION_GUARD};
use crate::oracles::Oracle;
use crate::stars::HollowStar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyOrder {
    /// Try dropping the latest examples first.
    #[default]
    Descending,
    Ascending,
}

/// Explains why `data` does not certify `(test, label)`.
fn not_certifiable(oracle: &Oracle<'_>, data: &Dataset, b: u64, test: &Point, label: Label) -> Result<CertError> {
    if !oracle.is_realizable(data.examples(), b)? {
        return Ok(CertError::NotCertifiable {
            reason: format!("data is not {b}-robustly realizable"),
            witness: None,
        });
    }
    let witness = oracle.agreement_counterexample(data.examples(), b, test, label)?;
    Ok(CertError::NotCertifiable {
        reason: format!("({test}, {label}) is not in the {b}-robust agreement region"),
        witness,
    })
}

pub fn minimal_certificate(
    oracle: &Oracle<'_>,
    data: &Dataset,
    b: u64,
    test: &Point,
    label: Label,
) -> Result<Certificate> {
    minimal_certificate_ordered(oracle, data, b, test, label, GreedyOrder::default())
}

pub fn minimal_certificate_ordered(
    oracle: &Oracle<'_>,
    data: &Dataset,
    b: u64,
    test: &Point,
    label: Label,
    order: GreedyOrder,
) -> Result<Certificate> {
    let all: Vec<usize> = (0..data.len()).collect();
    if !oracle.is_certificate(data, &all, b, test, label)? {
        return Err(not_certifiable(oracle, data, b, test, label)?);
    }
    let mut keep = vec![true; data.len()];
    let visit: Vec<usize> = match order {
        GreedyOrder::Descending => all.iter().rev().copied().collect(),
        GreedyOrder::Ascending => all.clone(),
    };
    for i in visit {
        keep[i] = false;
        let rest: Vec<usize> = all.iter().copied().filter(|&j| keep[j]).collect();
        if !oracle.is_certificate_with(data, &rest, b, test, label, true)? {
            keep[i] = true;
        }
    }
    let indices = all.into_iter().filter(|&j| keep[j]).collect();
    Ok(Certificate::new(indices, b, test.clone(), label, true))
}

/// Smallest certifying subset, first in lexicographic order among those of that size.
pub fn minimum_certificate(
    oracle: &Oracle<'_>,
    data: &Dataset,
    b: u64,
    test: &Point,
    label: Label,
    size_cap: usize,
) -> Result<Certificate> {
    let n = data.len();
    let cap = size_cap.min(n);
    if n > 24 && cap > 6 {
        return Err(CertError::capacity(
            "exact certificate search (|data| > 24 and size cap > 6)",
            n as u128,
            24,
        ));
    }
    let work: u128 = (0..=cap).map(|k| binomial(n as u64, k as u64)).sum();
    if work > ENUMERATION_GUARD {
        return Err(CertError::capacity(
            "exact certificate search subsets",
            work,
            ENUMERATION_GUARD,
        ));
    }
    let trusted = oracle.is_realizable(data.examples(), b)?;
    for size in 0..=cap {
        let subsets: Vec<Vec<usize>> = (0..n).combinations(size).collect();
        let hit = subsets
            .par_iter()
            .map(|s| oracle.is_certificate_with(data, s, b, test, label, trusted))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .position(|ok| ok);
        if let Some(k) = hit {
            let indices = subsets[k].clone();
            return Ok(Certificate::new(indices, b, test.clone(), label, true));
        }
    }
    Err(match not_certifiable(oracle, data, b, test, label)? {
        CertError::NotCertifiable { witness: None, .. } if trusted => CertError::NotCertifiable {
            reason: format!("no certificate of size <= {cap}"),
            witness: None,
        },
        e => e,
    })
}

/// Carathéodory certificate with its conic coefficients (aligned with `certificate.indices`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConicCertificate {
    pub certificate: Certificate,
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Zero-budget halfspace certificate of size at most `d`.
///
/// For label `+1` the target `x` is written as a conic combination of the signed points
/// `y_i x_i`. Label `-1` uses the Farkas form of "no consistent `w` has `w·x >= 0`", a conic
/// instance in one extra dimension whose support contains the test generator plus at most
/// `d` data points.
pub fn caratheodory_certificate(
    oracle: &Oracle<'_>,
    data: &Dataset,
    test: &Point,
    label: Label,
) -> Result<ConicCertificate> {
    let family = oracle.family();
    if !family.is_halfspace() {
        return Err(CertError::input("Carathéodory certificates need a halfspace family"));
    }
    let lifted = data
        .examples()
        .iter()
        .map(|e| family.lift(&e.point))
        .collect::<Result<Vec<_>>>()?;
    let x = family.lift(test)?;
    let settings = oracle.config().lp;
    let n = data.len();

    let (instance, data_cols) = match label {
        Label::Pos => {
            let gens = lifted
                .iter()
                .zip(data.examples())
                .map(|(z, e)| z.iter().map(|v| v * e.label.sign()).collect())
                .collect();
            (ConicInstance::new(gens, x)?, n)
        }
        Label::Neg => {
            let mut gens: Vec<Vec<f64>> = lifted
                .iter()
                .zip(data.examples())
                .map(|(z, e)| {
                    let mut g: Vec<f64> = z.iter().map(|v| v * e.label.sign()).collect();
                    g.push(if e.label == Label::Neg { 1.0 } else { 0.0 });
                    g
                })
                .collect();
            let mut gx = x.clone();
            gx.push(0.0);
            gens.push(gx);
            let mut target = vec![0.0; x.len()];
            target.push(1.0);
            (ConicInstance::new(gens, target)?, n)
        }
    };

    let solution = conic_membership(&instance, &settings)?;
    let ConicSolution::Feasible { coefficients, .. } = solution else {
        return Err(not_certifiable(oracle, data, 0, test, label)?);
    };
    let reduced = caratheodory_reduce(&instance, &coefficients, &settings)?;
    let ConicSolution::Feasible {
        coefficients, residual, ..
    } = reduced
    else {
        unreachable!("reduction keeps feasibility");
    };
    let indices: Vec<usize> = (0..data_cols).filter(|&i| coefficients[i] > 0.0).collect();
    let coeffs = indices.iter().map(|&i| coefficients[i]).collect();
    let certificate = Certificate::new(indices, 0, test.clone(), label, false);
    if !oracle.is_certificate(data, &certificate.indices, 0, test, label)? {
        return Err(CertError::Numerical(
            "conic support failed certificate revalidation".into(),
        ));
    }
    Ok(ConicCertificate {
        certificate,
        coefficients: coeffs,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkSize {
    Fixed(usize),
    /// Double from 4 until half of a 20-chunk probe qualifies (cap `2^14`).
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChunkedCertificate {
    /// Indices into the stream; concatenation of the per-chunk certificates.
    pub certificate: Certificate,
    pub chunk_size: usize,
    pub chunks_scanned: usize,
    /// Stream offsets of the chunks that contributed.
    pub chunk_starts: Vec<usize>,
}

const AUTO_START: usize = 4;
const AUTO_CAP: usize = 1 << 14;
const AUTO_PROBE: usize = 20;

/// Chunk is zero-realizable with `(test, label)` in its zero-budget agreement region.
fn chunk_qualifies(oracle: &Oracle<'_>, chunk: &[LabeledExample], test: &Point, label: Label) -> Result<bool> {
    Ok(oracle.is_realizable(chunk, 0)? && oracle.in_robust_agreement(chunk, 0, test, label)?)
}

fn auto_chunk_size(oracle: &Oracle<'_>, stream: &Dataset, test: &Point, label: Label) -> Result<usize> {
    let mut size = AUTO_START;
    loop {
        let chunks: Vec<&[LabeledExample]> = stream.examples().chunks_exact(size).take(AUTO_PROBE).collect();
        if chunks.is_empty() {
            return Err(CertError::InsufficientSample {
                chunks_scanned: 0,
                qualifying: 0,
                needed: 1,
            });
        }
        let hits = chunks
            .par_iter()
            .map(|c| chunk_qualifies(oracle, c, test, label))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&q| q)
            .count();
        if 2 * hits >= chunks.len() || size >= AUTO_CAP {
            return Ok(size);
        }
        size *= 2;
    }
}

pub fn chunked_certificate(
    oracle: &Oracle<'_>,
    stream: &Dataset,
    b: u64,
    test: &Point,
    label: Label,
    chunk_size: ChunkSize,
    chunks_needed: usize,
) -> Result<ChunkedCertificate> {
    if chunks_needed == 0 {
        return Err(CertError::input("chunks_needed must be at least 1"));
    }
    let size = match chunk_size {
        ChunkSize::Fixed(0) => return Err(CertError::input("chunk size must be positive")),
        ChunkSize::Fixed(s) => s,
        ChunkSize::Auto => auto_chunk_size(oracle, stream, test, label)?,
    };
    let chunks: Vec<&[LabeledExample]> = stream.examples().chunks_exact(size).collect();
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut picked = Vec::new();
    let mut scanned = 0;
    'scan: for (batch_no, group) in chunks.chunks(batch).enumerate() {
        let flags = group
            .par_iter()
            .map(|c| chunk_qualifies(oracle, c, test, label))
            .collect::<Result<Vec<_>>>()?;
        for (k, q) in flags.into_iter().enumerate() {
            scanned += 1;
            if q {
                picked.push(batch_no * batch + k);
                if picked.len() == chunks_needed {
                    break 'scan;
                }
            }
        }
    }
    if picked.len() < chunks_needed {
        return Err(CertError::InsufficientSample {
            chunks_scanned: scanned,
            qualifying: picked.len(),
            needed: chunks_needed,
        });
    }
    let parts = picked
        .par_iter()
        .map(|&c| {
            let start = c * size;
            let local = Dataset::new(chunks[c].to_vec());
            minimal_certificate(oracle, &local, 0, test, label)
                .map(|cert| cert.indices.iter().map(|&i| start + i).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let indices: Vec<usize> = parts.concat();
    if !oracle.is_certificate(stream, &indices, b, test, label)? {
        return Err(CertError::NotCertifiable {
            reason: format!(
                "concatenated certificate is not {b}-robustly realizable (stream has more than {b} corruptions)"
            ),
            witness: None,
        });
    }
    Ok(ChunkedCertificate {
        certificate: Certificate::new(indices, b, test.clone(), label, false),
        chunk_size: size,
        chunks_scanned: scanned,
        chunk_starts: picked.iter().map(|&c| c * size).collect(),
    })
}

/// `b + 1` concatenated copies of a zero-budget star body; the test pair is the heavy
/// element with its label flipped. Every `b`-robust certificate needs all of it.
pub fn chunk_lower_instance(star: &HollowStar, b: u64) -> (Dataset, Point, Label) {
    let body = star.body();
    let mut examples = Vec::with_capacity(body.len() * (b as usize + 1));
    for _ in 0..=b {
        examples.extend(body.iter().cloned());
    }
    let heavy = star.heavy_example();
    (Dataset::new(examples), heavy.point.clone(), heavy.label.flip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypoclasses::HypothesisFamily;

    fn neg(id: usize) -> LabeledExample {
        LabeledExample::discrete(id, Label::Neg)
    }

    fn singletons_instance(n: usize) -> Dataset {
        (1..n).map(neg).collect()
    }

    #[test]
    fn singletons_cannot_shrink() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let cert = minimal_certificate(&o, &singletons_instance(3), 0, &Point::Discrete(3), Label::Pos).unwrap();
        assert_eq!(cert.indices, vec![0, 1]);
        assert!(cert.minimal);
    }

    #[test]
    fn copies_survive_greedy_deletion() {
        let fam = HypothesisFamily::singletons(4).unwrap();
        let o = Oracle::new(&fam);
        let b = 2;
        let mut ex = vec![neg(1), neg(3)];
        ex.extend((0..=b).map(|_| LabeledExample::discrete(2, Label::Pos)));
        ex.push(neg(4));
        let data = Dataset::new(ex);
        let cert = minimal_certificate(&o, &data, b, &Point::Discrete(2), Label::Pos).unwrap();
        assert_eq!(cert.size(), b as usize + 1);
        assert!(cert
            .indices
            .iter()
            .all(|&i| data.examples()[i].point == Point::Discrete(2)));
    }

    #[test]
    fn test_point_present_gives_singleton_certificate() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let data = Dataset::new(vec![neg(1), LabeledExample::discrete(2, Label::Pos), neg(3)]);
        let cert = minimal_certificate(&o, &data, 0, &Point::Discrete(2), Label::Pos).unwrap();
        assert_eq!(cert.indices, vec![1]);
    }

    #[test]
    fn greedy_rejects_uncertifiable_input_with_witness() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let err = minimal_certificate(&o, &Dataset::new(vec![neg(1)]), 0, &Point::Discrete(3), Label::Pos).unwrap_err();
        match err {
            CertError::NotCertifiable { witness, .. } => assert!(witness.is_some()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minimum_on_singletons() {
        let fam = HypothesisFamily::singletons(4).unwrap();
        let o = Oracle::new(&fam);
        let cert = minimum_certificate(&o, &singletons_instance(4), 0, &Point::Discrete(4), Label::Pos, 6).unwrap();
        assert_eq!(cert.size(), 3);
    }

    #[test]
    fn minimum_halfspace_ring() {
        let fam = HypothesisFamily::halfspace(2).unwrap();
        let o = Oracle::new(&fam);
        let data: Dataset = (0..6)
            .map(|k| {
                let t = (k as f64) * std::f64::consts::PI / 3.0 + 0.1;
                LabeledExample::vector(vec![t.cos(), t.sin()], Label::Pos)
            })
            .collect();
        let test = Point::Vector(vec![0.3, 0.2]);
        let cert = minimum_certificate(&o, &data, 0, &test, Label::Pos, 6).unwrap();
        assert!(cert.size() <= 2);
        let car = caratheodory_certificate(&o, &data, &test, Label::Pos).unwrap();
        assert!(car.certificate.size() <= 2);
    }

    #[test]
    fn caratheodory_examples() {
        let fam = HypothesisFamily::halfspace(2).unwrap();
        let o = Oracle::new(&fam);
        let data: Dataset = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
            .iter()
            .map(|p| LabeledExample::vector(p.to_vec(), Label::Pos))
            .collect();
        let c = caratheodory_certificate(&o, &data, &Point::Vector(vec![2.0, 1.0]), Label::Pos).unwrap();
        assert!(c.certificate.size() <= 2);
        assert!(c.residual <= 1e-9);

        let c = caratheodory_certificate(&o, &data, &Point::Vector(vec![0.0, 1.0]), Label::Pos).unwrap();
        assert_eq!(c.certificate.size(), 1);
    }

    #[test]
    fn caratheodory_negative_label() {
        let fam = HypothesisFamily::halfspace(2).unwrap();
        let o = Oracle::new(&fam);
        let data = Dataset::new(vec![
            LabeledExample::vector(vec![1.0, 0.0], Label::Neg),
            LabeledExample::vector(vec![0.0, 1.0], Label::Neg),
            LabeledExample::vector(vec![-1.0, -1.0], Label::Pos),
        ]);
        let test = Point::Vector(vec![1.0, 1.0]);
        let c = caratheodory_certificate(&o, &data, &test, Label::Neg).unwrap();
        assert!(c.certificate.size() <= 2);
        assert!(o
            .is_certificate(&data, &c.certificate.indices, 0, &test, Label::Neg)
            .unwrap());
        assert!(caratheodory_certificate(&o, &data, &Point::Vector(vec![-1.0, 0.0]), Label::Neg).is_err());
    }

    #[test]
    fn chunked_singletons() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let stream: Dataset = (0..64).map(|i| neg(1 + (i * 7 % 5) % 2)).collect();
        let out = chunked_certificate(&o, &stream, 1, &Point::Discrete(3), Label::Pos, ChunkSize::Fixed(8), 2).unwrap();
        assert!(out.certificate.size() <= 4);
        assert!(o
            .is_certificate(&stream, &out.certificate.indices, 1, &Point::Discrete(3), Label::Pos)
            .unwrap());

        let auto = chunked_certificate(&o, &stream, 0, &Point::Discrete(3), Label::Pos, ChunkSize::Auto, 1).unwrap();
        assert_eq!(auto.certificate.size(), 2);
    }

    #[test]
    fn chunked_reports_short_stream() {
        let fam = HypothesisFamily::singletons(3).unwrap();
        let o = Oracle::new(&fam);
        let stream: Dataset = (0..16).map(|_| neg(1)).collect();
        let err =
            chunked_certificate(&o, &stream, 1, &Point::Discrete(3), Label::Pos, ChunkSize::Fixed(8), 2).unwrap_err();
        assert!(matches!(
            err,
            CertError::InsufficientSample {
                chunks_scanned: 2,
                qualifying: 0,
                needed: 2
            }
        ));
    }

    #[test]
    fn lower_instance_shape() {
        let star = HollowStar::new(vec![neg(1), neg(2), neg(3)], 2, 0).unwrap();
        let (data, test, label) = chunk_lower_instance(&star, 1);
        assert_eq!(data.examples(), &[neg(1), neg(2), neg(1), neg(2)]);
        assert_eq!(test, Point::Discrete(3));
        assert_eq!(label, Label::Pos);
        let (plain, _, _) = chunk_lower_instance(&star, 0);
        assert_eq!(plain.len(), 2);
    }
}
