use std::path::PathBuf;

use certikit::adversary::{corrupt_random, corrupt_worst_case, WorstCaseConfig};
use certikit::certify::{
    caratheodory_certificate, chunked_certificate, minimal_certificate_ordered, minimum_certificate, ChunkSize,
    GreedyOrder,
};
use certikit::conic::{caratheodory_reduce, conic_membership};
use certikit::hypoclasses::ENUMERATION_GUARD;
use certikit::oracles::DeletionStrategy;
use certikit::sampling::{
    agreement_probability_curve, certificate_coefficient, certificate_coefficient_mc, reweighted_certificate,
    tightness_experiments, Distribution, McConfig, PointSampler, ReweightOptions, Reweighted, ReweightingScheme,
    TightnessParams, TightnessTerm, DEFAULT_ATTEMPT_CAP,
};
use certikit::stars::{robust_star_number, StarSearchConfig};
use certikit::{
    CertError, ConicInstance, ConicSolution, Dataset, Hypothesis, HypothesisFamily, Label, LpSettings, Oracle,
    OracleConfig, Point, Result,
};
use clap::{Args, ValueEnum};
use serde_json::json;

use crate::output::{csv_table, real, Artifacts, Cell};

fn input(msg: impl Into<String>) -> CertError {
    CertError::Input(msg.into())
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    Point::parse(s).map_err(|e| e.to_string())
}

fn parse_label(s: &str) -> std::result::Result<Label, String> {
    Label::parse(s).map_err(|e| e.to_string())
}

fn parse_hypothesis(s: &str) -> std::result::Result<Hypothesis, String> {
    Hypothesis::parse(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// LP tolerance on residuals, pivots, and zero-snapping.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Pivot cap per LP; 0 picks 50·(rows+cols)+1000.
    #[arg(long, default_value_t = 0)]
    pub max_pivots: usize,
    /// Largest number of LPs one halfspace realizability query may run.
    #[arg(long, default_value_t = 1_000_000)]
    pub deletion_guard: u128,
    #[arg(long, value_enum, default_value_t = Strategy::Support)]
    pub deletion_strategy: Strategy,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Strategy {
    Support,
    Exhaustive,
}

impl OracleArgs {
    fn config(&self) -> Result<OracleConfig> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(input("tol must be positive"));
        }
        Ok(OracleConfig {
            deletion_guard: self.deletion_guard,
            strategy: match self.deletion_strategy {
                Strategy::Support => DeletionStrategy::SupportBranching,
                Strategy::Exhaustive => DeletionStrategy::Exhaustive,
            },
            lp: self.lp(),
        })
    }

    fn lp(&self) -> LpSettings {
        LpSettings {
            tol: self.tol,
            max_pivots: self.max_pivots,
        }
    }
}

fn family(spec: &str) -> Result<HypothesisFamily> {
    HypothesisFamily::from_spec(spec)
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Method {
    Greedy,
    Exact,
    Caratheodory,
    Chunked,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Order {
    Descending,
    Ascending,
}

#[derive(Args, Debug, Clone)]
pub struct CertifyArgs {
    #[arg(long, value_enum, default_value_t = Method::Greedy)]
    pub method: Method,
    #[arg(long, default_value_t = 0)]
    pub b: u64,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub test: Point,
    #[arg(long, value_parser = parse_label, allow_hyphen_values = true)]
    pub label: Label,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub class: String,
    /// Greedy deletion order.
    #[arg(long, value_enum, default_value_t = Order::Descending)]
    pub order: Order,
    /// Largest size tried by the exact method; defaults to the dataset size.
    #[arg(long)]
    pub size_cap: Option<usize>,
    /// Chunk size for the chunked method: an integer or `auto`.
    #[arg(long, default_value = "auto")]
    pub chunk_size: String,
    /// Qualifying chunks to concatenate; defaults to b+1.
    #[arg(long)]
    pub chunks_needed: Option<usize>,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

pub fn certify(args: &CertifyArgs) -> Result<Artifacts> {
    let family = family(&args.class)?;
    let oracle = Oracle::with_config(&family, args.oracle.config()?);
    let data = Dataset::load(&args.data)?;
    let (b, test, label) = (args.b, &args.test, args.label);
    let (cert, extra) = match args.method {
        Method::Greedy => {
            let order = match args.order {
                Order::Descending => GreedyOrder::Descending,
                Order::Ascending => GreedyOrder::Ascending,
            };
            (
                minimal_certificate_ordered(&oracle, &data, b, test, label, order)?,
                json!({}),
            )
        }
        Method::Exact => {
            let cap = args.size_cap.unwrap_or(data.len());
            (minimum_certificate(&oracle, &data, b, test, label, cap)?, json!({}))
        }
        Method::Caratheodory => {
            if b != 0 {
                return Err(input("the caratheodory method needs b = 0"));
            }
            let c = caratheodory_certificate(&oracle, &data, test, label)?;
            let extra = json!({"coefficients": c.coefficients, "residual": c.residual});
            (c.certificate, extra)
        }
        Method::Chunked => {
            let size = match args.chunk_size.as_str() {
                "auto" => ChunkSize::Auto,
                s => ChunkSize::Fixed(s.parse().map_err(|_| input(format!("bad chunk size {s:?}")))?),
            };
            let needed = args.chunks_needed.unwrap_or(b as usize + 1);
            let c = chunked_certificate(&oracle, &data, b, test, label, size, needed)?;
            let extra = json!({
                "chunk_size": c.chunk_size,
                "chunks_scanned": c.chunks_scanned,
                "chunk_starts": c.chunk_starts,
            });
            (c.certificate, extra)
        }
    };
    let summary = format!(
        "certificate of size {} (from {} examples) for ({}, {}) at b={}",
        cert.size(),
        data.len(),
        test,
        label,
        b
    );
    let mut doc = serde_json::to_value(&cert)?;
    if let (Some(obj), Some(more)) = (doc.as_object_mut(), extra.as_object()) {
        obj.extend(more.clone());
    }
    Ok(Artifacts::new(summary, doc))
}

#[derive(Args, Debug, Clone)]
pub struct AgreeArgs {
    #[arg(long, default_value_t = 0)]
    pub b: u64,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub test: Point,
    #[arg(long, value_parser = parse_label, allow_hyphen_values = true)]
    pub label: Label,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub class: String,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

pub fn agree(args: &AgreeArgs) -> Result<Artifacts> {
    let family = family(&args.class)?;
    let oracle = Oracle::with_config(&family, args.oracle.config()?);
    let data = Dataset::load(&args.data)?;
    let realizable = oracle.is_realizable(data.examples(), args.b)?;
    let witness = oracle.agreement_counterexample(data.examples(), args.b, &args.test, args.label)?;
    let inside = witness.is_none();
    let summary = format!(
        "({}, {}) is {} the {}-robust agreement region; data {} {}-robustly realizable",
        args.test,
        args.label,
        if inside { "in" } else { "not in" },
        args.b,
        if realizable { "is" } else { "is not" },
        args.b
    );
    Ok(Artifacts::new(
        summary,
        json!({
            "in_agreement": inside,
            "realizable": realizable,
            "counterexample": witness,
            "b": args.b,
        }),
    ))
}

#[derive(Args, Debug, Clone)]
pub struct StarArgs {
    #[arg(long)]
    pub class: String,
    #[arg(long, default_value_t = 0)]
    pub b: u64,
    /// Copies allowed per (point, label) pair; defaults to b+1.
    #[arg(long)]
    pub multiplicity_cap: Option<usize>,
    /// Largest star size searched; defaults to 2(b+1) times the domain size.
    #[arg(long)]
    pub size_cap: Option<usize>,
    #[arg(long, default_value_t = ENUMERATION_GUARD)]
    pub guard: u128,
    /// Search below the lift of the zero-budget optimum as well.
    #[arg(long)]
    pub no_prune: bool,
}

pub fn star(args: &StarArgs) -> Result<(Artifacts, bool)> {
    let family = family(&args.class)?;
    let oracle = Oracle::new(&family);
    let search = robust_star_number(
        &oracle,
        args.b,
        StarSearchConfig {
            multiplicity_cap: args.multiplicity_cap,
            size_cap: args.size_cap,
            guard: args.guard,
            prune_with_lift: !args.no_prune,
        },
    )?;
    let summary = if search.exact {
        format!("s_b: {}", search.s_b)
    } else {
        format!(
            "s_b: >= {} (guard reached; lower bound from the lifted zero-budget star)",
            search.s_b
        )
    };
    Ok((Artifacts::new(summary, serde_json::to_value(&search)?), search.exact))
}

#[derive(Args, Debug, Clone)]
pub struct SamplerArgs {
    /// `points:1,2`, `weighted:1=0.25,2=0.75`, or `ball:d=3,radius=1`.
    #[arg(long)]
    pub dist: String,
    /// Reweight by the indicator of a ball of this radius around the test point.
    #[arg(long)]
    pub reweight_radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ATTEMPT_CAP)]
    pub attempt_cap: u64,
}

struct Sampler {
    dist: Distribution,
    scheme: Option<ReweightingScheme>,
    attempt_cap: u64,
}

impl Sampler {
    fn new(args: &SamplerArgs, test: &Point) -> Result<Sampler> {
        let dist = Distribution::parse(&args.dist)?;
        let scheme = match args.reweight_radius {
            None => None,
            Some(r) => {
                let center = test
                    .as_vector()
                    .ok_or_else(|| input("ball reweighting needs a vector test point"))?;
                Some(ReweightingScheme::ball_indicator(center.to_vec(), r)?)
            }
        };
        Ok(Sampler {
            dist,
            scheme,
            attempt_cap: args.attempt_cap,
        })
    }

    fn with<T>(&self, f: impl FnOnce(&dyn PointSampler) -> Result<T>) -> Result<T> {
        match &self.scheme {
            None => f(&self.dist),
            Some(scheme) => f(&Reweighted {
                dist: &self.dist,
                scheme,
                attempt_cap: self.attempt_cap,
            }),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CoeffArgs {
    #[arg(long)]
    pub class: String,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long, value_parser = parse_hypothesis, allow_hyphen_values = true)]
    pub target: Hypothesis,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub test: Point,
    /// Monte Carlo draws for halfspace families (twice this many are used).
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 256)]
    pub directions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn coeff(args: &CoeffArgs) -> Result<Artifacts> {
    let family = family(&args.class)?;
    let sampler = Sampler::new(&args.sampler, &args.test)?;
    if family.is_finite() {
        if sampler.scheme.is_some() {
            return Err(input("reweighting is only supported for halfspace coefficients"));
        }
        let eps = certificate_coefficient(&family, &sampler.dist, &args.target, &args.test)?;
        return Ok(Artifacts::new(
            format!("epsilon_x = {eps} (exact)"),
            json!({"epsilon_x": real(eps), "exact": true}),
        ));
    }
    let est = sampler.with(|s| {
        certificate_coefficient_mc(
            &family,
            s,
            &args.target,
            &args.test,
            McConfig {
                samples: args.samples,
                directions: args.directions,
                seed: args.seed,
            },
        )
    })?;
    Ok(Artifacts::new(
        format!("epsilon_x ~ {} +- {} (Monte Carlo)", est.estimate, est.half_width),
        json!({
            "epsilon_x": est.estimate,
            "half_width": est.half_width,
            "samples": est.samples,
            "candidates": est.candidates,
            "exact": false,
            "seed": args.seed,
        }),
    ))
}

fn parse_grid(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| input(format!("bad sample size {v:?}")))
        })
        .collect()
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    #[arg(long)]
    pub class: String,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long, value_parser = parse_hypothesis, allow_hyphen_values = true)]
    pub target: Hypothesis,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub test: Point,
    #[arg(long, default_value_t = 0)]
    pub b: u64,
    /// Comma-separated sample sizes.
    #[arg(long)]
    pub m: String,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

pub fn curve(args: &CurveArgs) -> Result<Artifacts> {
    let family = family(&args.class)?;
    let oracle = Oracle::with_config(&family, args.oracle.config()?);
    let sampler = Sampler::new(&args.sampler, &args.test)?;
    let grid = parse_grid(&args.m)?;
    let points = sampler.with(|s| {
        agreement_probability_curve(
            &oracle,
            s,
            &args.target,
            &args.test,
            args.b,
            &grid,
            args.trials,
            args.seed,
        )
    })?;
    let csv = csv_table(
        &["m", "prob", "ci_low", "ci_high"],
        points
            .iter()
            .map(|p| vec![Cell::from(p.m), p.probability.into(), p.ci_low.into(), p.ci_high.into()]),
    );
    let last = points.last().expect("nonempty grid");
    Ok(Artifacts::new(
        format!(
            "{} grid points; agreement probability {} at m={}",
            points.len(),
            last.probability,
            last.m
        ),
        json!({"points": points, "seed": args.seed, "b": args.b}),
    )
    .with_csv(csv))
}

#[derive(Args, Debug, Clone)]
pub struct TightnessArgs {
    #[arg(long, value_parser = TightnessTerm::parse)]
    pub term: TightnessTerm,
    #[arg(long, default_value_t = 3)]
    pub b: u64,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 30)]
    pub k: usize,
    /// Mass of the rare point in the b-term instance.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Sample sizes for the delta term.
    #[arg(long, default_value = "10,20,30")]
    pub m: String,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn tightness(args: &TightnessArgs) -> Result<Artifacts> {
    let params = TightnessParams {
        b: args.b,
        d: args.d,
        k: args.k,
        eps: args.eps,
        m_values: parse_grid(&args.m)?,
    };
    let report = tightness_experiments(args.term, &params, args.trials, args.seed)?;
    let csv = csv_table(
        &[
            "m",
            "trials",
            "events",
            "frequency",
            "ci_low",
            "ci_high",
            "reference",
            "failures",
        ],
        report.rows.iter().map(|r| {
            vec![
                Cell::from(r.m),
                r.trials.into(),
                r.events.into(),
                r.frequency.into(),
                r.ci_low.into(),
                r.ci_high.into(),
                r.reference.into(),
                r.failures.into(),
            ]
        }),
    );
    let summary = report
        .rows
        .iter()
        .map(|r| format!("m={}: {:.4} (reference {:.4})", r.m, r.frequency, r.reference))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Artifacts::new(summary, serde_json::to_value(&report)?).with_csv(csv))
}

#[derive(Args, Debug, Clone)]
pub struct ReweightArgs {
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub b: u64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Radius of the ball around the test point (1/2, 0, ..., 0).
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    #[arg(long, default_value_t = 100_000)]
    pub eps_samples: usize,
    #[arg(long, default_value_t = 256)]
    pub directions: usize,
    #[arg(long, default_value_t = 2.0)]
    pub safety: f64,
    #[arg(long, default_value_t = 8.0)]
    pub bound_constant: f64,
    /// Dimension fed to the sample-size bound; defaults to the VC dimension d+1.
    #[arg(long)]
    pub bound_dimension: Option<usize>,
    /// Keep the whole accepted sample instead of shrinking it.
    #[arg(long)]
    pub no_shrink: bool,
    #[arg(long, default_value_t = DEFAULT_ATTEMPT_CAP)]
    pub attempt_cap: u64,
    #[arg(long, default_value_t = 100_000)]
    pub z_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

pub fn reweight_demo(args: &ReweightArgs) -> Result<Artifacts> {
    let d = args.d;
    let family = HypothesisFamily::affine_halfspace(d)?;
    let oracle = Oracle::with_config(&family, args.oracle.config()?);
    let mut w = vec![0.0; d + 1];
    w[d] = 1.0;
    let target = Hypothesis::Weights(w);
    let mut x = vec![0.0; d];
    x[0] = 0.5;
    let test = Point::Vector(x.clone());
    let dist = Distribution::unit_ball(d)?;
    let scheme = ReweightingScheme::ball_indicator(x, args.radius)?;
    let report = reweighted_certificate(
        &oracle,
        &dist,
        &scheme,
        &target,
        args.b,
        &test,
        args.delta,
        args.seed,
        ReweightOptions {
            eps_samples: args.eps_samples,
            directions: args.directions,
            safety: args.safety,
            bound_constant: args.bound_constant,
            dimension: args.bound_dimension,
            shrink: !args.no_shrink,
            attempt_cap: args.attempt_cap,
            z_samples: args.z_samples,
        },
    )?;
    let mut doc = serde_json::to_value(&report)?;
    if let Some(obj) = doc.as_object_mut() {
        obj.remove("sample");
        obj.insert("draws_per_acceptance".into(), report.draws_per_acceptance().into());
    }
    let summary = format!(
        "eps_w ~ {:.4}, m_w = {}, raw draws {} ({:.1} per acceptance), certificate size {}",
        report.eps_estimate.estimate,
        report.m_w,
        report.raw_draws,
        report.draws_per_acceptance(),
        report.certificate.as_ref().map_or_else(
            || "none (test point not in the agreement region)".to_string(),
            |c| c.size().to_string()
        )
    );
    Ok(Artifacts::new(summary, doc))
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum AttackMode {
    Random,
    Worst,
}

#[derive(Args, Debug, Clone)]
pub struct AttackArgs {
    #[arg(long, value_enum)]
    pub mode: AttackMode,
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub data: PathBuf,
    /// Required for worst-case attacks.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub test: Option<Point>,
    #[arg(long, value_parser = parse_label, allow_hyphen_values = true)]
    pub label: Option<Label>,
    /// Certificate size counted by the tie-break score of unsuccessful worst-case searches.
    #[arg(long)]
    pub score_size: Option<usize>,
    #[arg(long, default_value_t = ENUMERATION_GUARD)]
    pub guard: u128,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

pub fn attack(args: &AttackArgs) -> Result<Artifacts> {
    let data = Dataset::load(&args.data)?;
    let (corruption, doc) = match args.mode {
        AttackMode::Random => {
            let c = corrupt_random(&data, args.b, args.seed)?;
            let doc = json!({"mode": "random", "flipped": c.flipped, "seed": args.seed});
            (c, doc)
        }
        AttackMode::Worst => {
            let spec = args
                .class
                .as_deref()
                .ok_or_else(|| input("worst-case attacks need --class"))?;
            let test = args
                .test
                .as_ref()
                .ok_or_else(|| input("worst-case attacks need --test"))?;
            let label = args.label.ok_or_else(|| input("worst-case attacks need --label"))?;
            let family = family(spec)?;
            let oracle = Oracle::with_config(&family, args.oracle.config()?);
            let config = WorstCaseConfig {
                guard: args.guard,
                score_size: args.score_size,
            };
            let r = corrupt_worst_case(&oracle, &data, args.b, test, label, config)?;
            let doc = json!({
                "mode": "worst",
                "flipped": r.corruption.flipped,
                "success": r.success,
                "score": r.score,
                "flip_sets_tried": r.flip_sets_tried.to_string(),
            });
            (r.corruption, doc)
        }
    };
    let mut csv = Vec::new();
    corruption.data.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).map_err(|e| input(e.to_string()))?;
    let summary = match doc.get("success").and_then(|v| v.as_bool()) {
        Some(true) if corruption.flipped.is_empty() => "the test pair is already outside the agreement region".into(),
        Some(true) => format!("flipping {:?} ejects the test pair", corruption.flipped),
        Some(false) => format!("no flip set of size <= {} ejects the test pair", args.b),
        None => format!("flipped {:?}", corruption.flipped),
    };
    Ok(Artifacts::new(summary, doc).with_csv(csv))
}

#[derive(Args, Debug, Clone)]
pub struct ConicArgs {
    /// Labeled points; generators are the signed (and, for affine classes, lifted) points.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub test: Point,
    #[arg(long, value_parser = parse_label, allow_hyphen_values = true, default_value = "1")]
    pub label: Label,
    /// Halfspace class used for lifting; defaults to homogeneous halfspaces.
    #[arg(long)]
    pub class: Option<String>,
    /// Shrink the support with the Carathéodory reduction.
    #[arg(long)]
    pub reduce: bool,
    /// Print the coefficients or the separator in full.
    #[arg(long)]
    pub dump: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

pub fn conic(args: &ConicArgs) -> Result<Artifacts> {
    let data = Dataset::load(&args.data)?;
    let dim = args
        .test
        .dimension()
        .ok_or_else(|| input("conic membership needs a vector test point"))?;
    let family = match &args.class {
        Some(spec) => family(spec)?,
        None => HypothesisFamily::halfspace(dim)?,
    };
    if !family.is_halfspace() {
        return Err(input("conic membership needs a halfspace class"));
    }
    let generators = data
        .examples()
        .iter()
        .map(|e| Ok(family.lift(&e.point)?.into_iter().map(|v| v * e.label.sign()).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let target: Vec<f64> = family
        .lift(&args.test)?
        .into_iter()
        .map(|v| v * args.label.sign())
        .collect();
    let instance = ConicInstance::new(generators, target)?;
    let settings = args.oracle.lp();
    let mut solution = conic_membership(&instance, &settings)?;
    if args.reduce {
        if let Some(alpha) = solution.coefficients() {
            solution = caratheodory_reduce(&instance, alpha, &settings)?;
        }
    }
    let (summary, mut doc) = match &solution {
        ConicSolution::Feasible { support, residual, .. } => (
            format!("feasible with support {} (residual {:.3e})", support.len(), residual),
            json!({"feasible": true, "support": support, "residual": residual}),
        ),
        ConicSolution::Infeasible { .. } => ("infeasible; separator found".to_string(), json!({"feasible": false})),
    };
    if args.dump {
        let obj = doc.as_object_mut().expect("object");
        match &solution {
            ConicSolution::Feasible { coefficients, .. } => {
                obj.insert("alpha".into(), json!(coefficients));
            }
            ConicSolution::Infeasible { separator } => {
                // adding zero turns -0.0 into 0.0
                let w: Vec<f64> = separator.iter().map(|v| v + 0.0).collect();
                obj.insert("w".into(), json!(w));
            }
        }
    }
    Ok(Artifacts::new(summary, doc))
}
