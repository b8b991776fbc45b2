//! Seeded verification suites over the whole library: chart ranks, map
//! identities, equivalence of the generation criteria, the quadric model,
//! and Monte Carlo stratum statistics.
//!
//! Each suite is a list of named checks; each check runs one pure, seeded
//! computation per sample index and aggregates only order-independent
//! summaries (counts, maxima, min-index first failure).  Reports are
//! therefore byte-identical across thread counts and repeated runs with
//! the same seed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::b2model::{
    b2_to_x, coordinate_change_identity_holds, f_inverse, f_map, f_round_trip_residual, g_inverse,
    g_map, x_rel_distance, x_to_b2, y_rel_distance, z2_canonical,
};
use crate::error::Error;
use crate::generation::{
    all_commute, classify, common_eigenline, friedland_generates, generates_by_span, CommonLine,
    Stratum, StratumTag,
};
use crate::invariants::{
    b2_coords, conjugate, conjugation_residual, find_conjugator, intertwiner_kernel,
    orbit_equivalent, realize_b2, semisimplify_detailed, sibirskii, traceless_retract, B2Coords,
};
use crate::mat2::{Mat2, MatTuple, ProjLine};
use crate::sample::{
    edge_family, sample_complex_sphere, sample_conjugator, sample_exact_tuple, sample_tangent_point,
    sample_unit_complex, SplitMix64,
};
use crate::scalar::{ExactScalar, FloatScalar, Scalar};
use crate::strata::{
    i_map, j_map, numeric_jacobian_rank, p_trivialize, s1_act, s1_act_spheres, sigma_map, t_chart,
    tau_map, ChartKind, ChartSpec, JACOBIAN_STEP,
};

/// Working tolerance shared by the float-backend checks.
const TOL: f64 = 1e-9;

/// The five suites, ordered as they run under "all".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    Ranks,
    Maps,
    Equivalences,
    B2,
    MonteCarlo,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] = [
        SuiteName::Ranks,
        SuiteName::Maps,
        SuiteName::Equivalences,
        SuiteName::B2,
        SuiteName::MonteCarlo,
    ];
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteName::Ranks => "RANKS",
            SuiteName::Maps => "MAPS",
            SuiteName::Equivalences => "EQUIVALENCES",
            SuiteName::B2 => "B2",
            SuiteName::MonteCarlo => "MONTECARLO",
        })
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ranks" => Ok(SuiteName::Ranks),
            "maps" => Ok(SuiteName::Maps),
            "equivalences" => Ok(SuiteName::Equivalences),
            "b2" => Ok(SuiteName::B2),
            "montecarlo" | "monte-carlo" => Ok(SuiteName::MonteCarlo),
            other => Err(format!(
                "unknown suite '{other}' (expected ranks, maps, equivalences, b2, or montecarlo)"
            )),
        }
    }
}

/// Knobs shared by every suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub r_min: usize,
    pub r_max: usize,
    /// Samples per check (per chart for the rank suite).
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the process-wide default.  Affects wall
    /// time only, never results.
    pub threads: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { r_min: 2, r_max: 5, samples: 400, seed: 0, threads: 0 }
    }
}

/// Aggregated result of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub count: u64,
    pub failures: u64,
    pub worst_residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

/// One suite's report: every check plus the conjunction of their verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub r_min: usize,
    pub r_max: usize,
    pub samples: u64,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// Result of a single indexed sample inside a check.
#[derive(Debug, Clone)]
struct Outcome {
    residual: f64,
    fail: Option<String>,
    tags: Vec<(String, u64)>,
}

impl Outcome {
    fn ok(residual: f64) -> Self {
        Outcome { residual: sanitize(residual), fail: None, tags: Vec::new() }
    }

    fn fail(residual: f64, why: impl Into<String>) -> Self {
        Outcome { residual: sanitize(residual), fail: Some(why.into()), tags: Vec::new() }
    }

    /// Pass iff `residual <= limit`.
    fn check(residual: f64, limit: f64, what: &str) -> Self {
        let residual = sanitize(residual);
        if residual <= limit {
            Outcome::ok(residual)
        } else {
            Outcome::fail(residual, format!("{what}: residual {residual:.3e} > {limit:.1e}"))
        }
    }

    fn require(cond: bool, what: impl Into<String>) -> Self {
        if cond {
            Outcome::ok(0.0)
        } else {
            Outcome::fail(1.0, what)
        }
    }

    fn tagged(tag: impl Into<String>) -> Self {
        Outcome { residual: 0.0, fail: None, tags: vec![(tag.into(), 1)] }
    }

    fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tags.push((tag.into(), 1));
        self
    }

    /// Combine two sub-checks of the same sample: worst residual, first
    /// failure message wins.
    fn and(mut self, other: Outcome) -> Self {
        self.residual = self.residual.max(other.residual);
        if self.fail.is_none() {
            self.fail = other.fail;
        }
        self.tags.extend(other.tags);
        self
    }
}

fn sanitize(r: f64) -> f64 {
    if r.is_nan() {
        f64::MAX
    } else {
        r.min(f64::MAX)
    }
}

/// Run a fallible sample body, converting library errors into failures.
fn attempt(f: impl FnOnce() -> Result<Outcome, Error>) -> Outcome {
    f().unwrap_or_else(|e| Outcome::fail(f64::MAX, format!("error: {e}")))
}

/// Order-independent accumulator over sample indices.
#[derive(Debug, Clone, Default)]
struct Agg {
    count: u64,
    failures: u64,
    worst: f64,
    first_fail: Option<(u64, String)>,
    tags: BTreeMap<String, u64>,
}

impl Agg {
    fn single(index: u64, o: Outcome) -> Self {
        let mut tags = BTreeMap::new();
        for (k, n) in o.tags {
            *tags.entry(k).or_insert(0) += n;
        }
        Agg {
            count: 1,
            failures: o.fail.is_some() as u64,
            worst: o.residual,
            first_fail: o.fail.map(|m| (index, m)),
            tags,
        }
    }

    fn merge(mut self, other: Agg) -> Self {
        self.count += other.count;
        self.failures += other.failures;
        self.worst = self.worst.max(other.worst);
        self.first_fail = match (self.first_fail.take(), other.first_fail) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        for (k, n) in other.tags {
            *self.tags.entry(k).or_insert(0) += n;
        }
        self
    }
}

/// Run one check over `n` indices in parallel and fold the outcomes.
fn execute<F>(name: String, check_seed: u64, n: u64, body: F) -> CheckResult
where
    F: Fn(u64, u64) -> Outcome + Sync,
{
    let agg = (0..n)
        .into_par_iter()
        .map(|i| Agg::single(i, body(check_seed, i)))
        .reduce(Agg::default, Agg::merge);
    let mut details = BTreeMap::new();
    if let Some((index, msg)) = agg.first_fail {
        details.insert("first_fail".into(), format!("sample {index}: {msg}"));
    }
    for (tag, count) in agg.tags {
        details.insert(tag, count.to_string());
    }
    CheckResult {
        name,
        count: agg.count,
        failures: agg.failures,
        worst_residual: agg.worst,
        pass: agg.failures == 0,
        details,
    }
}

/// Sequentially numbers checks so each gets an independent, stable seed.
struct SuiteBuilder {
    base_seed: u64,
    ordinal: u64,
    checks: Vec<CheckResult>,
}

impl SuiteBuilder {
    fn new(params: &SuiteParams, suite: SuiteName) -> Self {
        let salt = suite as u64 + 1;
        let base_seed = SplitMix64::for_sample(params.seed, salt).next_u64();
        SuiteBuilder { base_seed, ordinal: 0, checks: Vec::new() }
    }

    fn run<F>(&mut self, name: impl Into<String>, n: u64, body: F)
    where
        F: Fn(u64, u64) -> Outcome + Sync,
    {
        let check_seed = SplitMix64::for_sample(self.base_seed, self.ordinal).next_u64();
        self.ordinal += 1;
        self.checks.push(execute(name.into(), check_seed, n, body));
    }
}

/// Run one suite; results are independent of `params.threads`.
pub fn run_suite(name: SuiteName, params: &SuiteParams) -> SuiteReport {
    let work = || run_suite_inner(name, params);
    if params.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(params.threads)
            .build()
            .expect("thread pool construction")
            .install(work)
    } else {
        work()
    }
}

/// Run several suites in order.
pub fn run_suites(names: &[SuiteName], params: &SuiteParams) -> Vec<SuiteReport> {
    names.iter().map(|n| run_suite(*n, params)).collect()
}

fn run_suite_inner(name: SuiteName, params: &SuiteParams) -> SuiteReport {
    let params = SuiteParams {
        r_min: params.r_min.max(2),
        r_max: params.r_max.max(params.r_min.max(2)),
        samples: params.samples.max(1),
        ..*params
    };
    let mut b = SuiteBuilder::new(&params, name);
    match name {
        SuiteName::Ranks => ranks_suite(&params, &mut b),
        SuiteName::Maps => maps_suite(&params, &mut b),
        SuiteName::Equivalences => equivalences_suite(&params, &mut b),
        SuiteName::B2 => b2_suite(&params, &mut b),
        SuiteName::MonteCarlo => montecarlo_suite(&params, &mut b),
    }
    let pass = b.checks.iter().all(|c| c.pass);
    SuiteReport {
        suite: name.to_string(),
        r_min: params.r_min,
        r_max: params.r_max,
        samples: params.samples,
        seed: params.seed,
        checks: b.checks,
        pass,
    }
}

/// Cycle the tuple length through [r_min, r_max] by sample index.
fn r_for(params: &SuiteParams, i: u64) -> usize {
    params.r_min + (i as usize) % (params.r_max - params.r_min + 1)
}

fn gaussian_matrix(rng: &mut SplitMix64) -> Mat2<FloatScalar> {
    Mat2::new(
        rng.next_complex_gaussian(),
        rng.next_complex_gaussian(),
        rng.next_complex_gaussian(),
        rng.next_complex_gaussian(),
    )
}

fn gaussian_tuple(rng: &mut SplitMix64, r: usize) -> MatTuple<FloatScalar> {
    MatTuple::new((0..r).map(|_| gaussian_matrix(rng)).collect()).expect("r >= 1")
}

/// Upper-triangular non-commuting tuple whose first member has eigenvalues
/// ±a separated by at least 1 (keeps the shared-line recovery stable).
fn triangular_noncommuting(rng: &mut SplitMix64, r: usize) -> MatTuple<FloatScalar> {
    loop {
        let a = FloatScalar::new(0.5 + rng.next_f64(), 0.25 * rng.next_gaussian());
        let mut mats = vec![Mat2::new(
            a,
            rng.next_complex_gaussian(),
            FloatScalar::new(0.0, 0.0),
            -a,
        )];
        for _ in 1..r {
            mats.push(Mat2::new(
                rng.next_complex_gaussian(),
                rng.next_complex_gaussian(),
                FloatScalar::new(0.0, 0.0),
                rng.next_complex_gaussian(),
            ));
        }
        let t = MatTuple::new(mats).expect("r >= 1");
        if !all_commute(&t, TOL) {
            return t;
        }
    }
}

fn rel_s<S: Scalar>(a: &S, b: &S) -> f64 {
    a.sub(b).abs() / (1.0 + a.abs() + b.abs())
}

fn b2_rel<S: Scalar>(a: &B2Coords<S>, b: &B2Coords<S>) -> f64 {
    rel_s(&a.z1, &b.z1).max(rel_s(&a.z2, &b.z2)).max(rel_s(&a.x, &b.x))
}

fn tuple_rel<S: Scalar>(a: &MatTuple<S>, b: &MatTuple<S>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.sub(y).norm() / (1.0 + x.norm() + y.norm()))
        .fold(0.0, f64::max)
}

/// Sine of the angle between two projective lines.
fn line_distance<S: Scalar>(a: &ProjLine<S>, b: &ProjLine<S>) -> f64 {
    let x = a.rep();
    let y = b.rep();
    let cross = x[0].mul(&y[1]).sub(&x[1].mul(&y[0])).abs();
    let nx = (x[0].abs().powi(2) + x[1].abs().powi(2)).sqrt();
    let ny = (y[0].abs().powi(2) + y[1].abs().powi(2)).sqrt();
    cross / (nx * ny)
}

// ---------------------------------------------------------------------------
// RANKS
// ---------------------------------------------------------------------------

fn draw_chart_params(spec: &ChartSpec, rng: &mut SplitMix64) -> Vec<f64> {
    match spec.kind {
        ChartKind::IMap => {
            let half = spec.domain_dim() / 2;
            let mut out = Vec::with_capacity(spec.domain_dim());
            for _ in 0..2 {
                let raw: Vec<f64> = (0..half).map(|_| rng.next_gaussian()).collect();
                let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                let rho = 0.2 + 0.6 * rng.next_f64();
                out.extend(raw.iter().map(|x| x / norm * rho));
            }
            out
        }
        _ => (0..spec.domain_dim()).map(|_| rng.next_gaussian()).collect(),
    }
}

fn ranks_suite(params: &SuiteParams, b: &mut SuiteBuilder) {
    for r in params.r_min..=params.r_max {
        let mut specs = vec![ChartSpec::t_chart(0, r)];
        if r > 1 {
            specs.push(ChartSpec::t_chart(r - 1, r));
        }
        specs.push(ChartSpec::w_fiber(r));
        specs.push(ChartSpec::incidence_fiber(r));
        specs.push(ChartSpec::j_map(r));
        specs.push(ChartSpec::i_map(r));
        for spec in specs {
            b.run(format!("{}_r{}", spec.name(), r), params.samples, move |seed, i| {
                let mut rng = SplitMix64::for_sample(seed, i);
                let mut point = draw_chart_params(&spec, &mut rng);
                for _ in 0..16 {
                    if spec.margin(&point).is_ok_and(|m| m >= 10.0 * JACOBIAN_STEP) {
                        break;
                    }
                    point = draw_chart_params(&spec, &mut rng);
                }
                match numeric_jacobian_rank(&spec, &point, JACOBIAN_STEP) {
                    Ok(entry) if entry.pass => Outcome::ok(entry.tail_ratio),
                    Ok(entry) => Outcome::fail(
                        entry.tail_ratio,
                        format!(
                            "rank {} != expected {} (ratios {:.2e}/{:.2e})",
                            entry.observed_rank,
                            entry.expected_rank,
                            entry.rank_ratio,
                            entry.tail_ratio
                        ),
                    ),
                    Err(e) => Outcome::fail(f64::MAX, format!("jacobian failed: {e}")),
                }
            });
        }
    }
}

// ---------------------------------------------------------------------------
// MAPS
// ---------------------------------------------------------------------------

fn maps_suite(params: &SuiteParams, b: &mut SuiteBuilder) {
    let p = *params;
    let n = p.samples;

    b.run("i_equivariance", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i).max(2);
            let mut rng = SplitMix64::for_sample(seed, i);
            let bs = sample_complex_sphere(&mut rng, r - 1);
            let cs = sample_complex_sphere(&mut rng, r - 1);
            let lambda = sample_unit_complex(&mut rng);
            let (lb, lc) = s1_act_spheres(&lambda, &bs, &cs)?;
            let lhs = i_map(&lb, &lc)?;
            let rhs = s1_act(&lambda, &i_map(&bs, &cs)?)?;
            let diff = tuple_rel(&lhs, &rhs);
            Ok(Outcome::check(diff, 0.0, "i(lambda.(b,c)) != lambda.i(b,c) bit-exactly"))
        })
    });

    b.run("tau_i_swap", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i).max(2);
            let mut rng = SplitMix64::for_sample(seed, i);
            let bs = sample_complex_sphere(&mut rng, r - 1);
            let cs = sample_complex_sphere(&mut rng, r - 1);
            let lhs = tau_map(&i_map(&bs, &cs)?);
            let rhs = i_map(&cs, &bs)?;
            Ok(Outcome::check(tuple_rel(&lhs, &rhs), 0.0, "tau(i(b,c)) != i(c,b) bit-exactly"))
        })
    });

    b.run("tau_involution", n, move |seed, i| {
        let r = r_for(&p, i);
        let mut rng = SplitMix64::for_sample(seed, i);
        let t = gaussian_tuple(&mut rng, r);
        let twice = tau_map(&tau_map(&t));
        Outcome::check(tuple_rel(&twice, &t), 0.0, "tau^2 != id bit-exactly")
    });

    b.run("tau_scaled_conjugation", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = gaussian_tuple(&mut rng, r);
            let rot = Mat2::new(
                FloatScalar::new(0.0, 0.0),
                FloatScalar::new(-1.0, 0.0),
                FloatScalar::new(1.0, 0.0),
                FloatScalar::new(0.0, 0.0),
            );
            let conj = conjugate(&t, &rot, TOL)?;
            let lhs = tau_map(&t);
            let diff = lhs
                .iter()
                .zip(conj.iter())
                .map(|(x, y)| x.sub(&y.neg()).norm() / (1.0 + x.norm() + y.norm()))
                .fold(0.0, f64::max);
            Ok(Outcome::check(diff, 1e-12, "tau != -conjugation by the quarter turn"))
        })
    });

    b.run("tau_preserves_tag", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = if i % 3 == 0 {
                let fams = edge_family(r);
                fams[(i / 3) as usize % fams.len()].1.clone()
            } else {
                gaussian_tuple(&mut rng, r)
            };
            let before = classify(&t, TOL)?.tag();
            let after = classify(&tau_map(&t), TOL)?.tag();
            Ok(Outcome::require(
                before == after,
                format!("tau moved the stratum: {before} -> {after}"),
            ))
        })
    });

    b.run("sigma_involution", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i).max(2);
            let mut rng = SplitMix64::for_sample(seed, i);
            let bs = sample_complex_sphere(&mut rng, r - 1);
            let cs = sample_complex_sphere(&mut rng, r - 1);
            let (sb, sc) = sigma_map(&bs, &cs)?;
            let (bb, cc) = sigma_map(&sb, &sc)?;
            let same = bb == bs && cc == cs;
            Ok(Outcome::require(same, "sigma^2 != id bit-exactly"))
        })
    });

    b.run("sigma_equivariance", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i).max(2);
            let mut rng = SplitMix64::for_sample(seed, i);
            let bs = sample_complex_sphere(&mut rng, r - 1);
            let cs = sample_complex_sphere(&mut rng, r - 1);
            let lambda = sample_unit_complex(&mut rng);
            let (lb, lc) = s1_act_spheres(&lambda, &bs, &cs)?;
            let (x1, x2) = sigma_map(&lb, &lc)?;
            let (sb, sc) = sigma_map(&bs, &cs)?;
            let (y1, y2) = s1_act_spheres(&lambda, &sb, &sc)?;
            Ok(Outcome::require(
                x1 == y1 && x2 == y2,
                "sigma(lambda.(b,c)) != lambda.sigma(b,c) bit-exactly",
            ))
        })
    });

    b.run("s1_vs_conjugation", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = gaussian_tuple(&mut rng, r);
            let lambda = sample_unit_complex(&mut rng);
            let acted = s1_act(&lambda, &t)?;
            let diag = Mat2::diag(FloatScalar::new(1.0, 0.0), lambda);
            let conj = conjugate(&t, &diag, TOL)?;
            Ok(Outcome::check(
                tuple_rel(&acted, &conj),
                1e-12,
                "circle action != conjugation by diag(1, lambda)",
            ))
        })
    });

    b.run("j_preimage", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i).max(2);
            let mut rng = SplitMix64::for_sample(seed, i);
            if i % 8 == 0 {
                // The origin: shared eigenline (0 : 1), never commuting.
                let t = j_map(&vec![FloatScalar::new(0.0, 0.0); r - 1]);
                let stratum = classify(&t, TOL)?;
                let line_ok = match &stratum {
                    Stratum::EigenShared { line: Some(l) } => l.approx_same(&ProjLine::e2(), TOL),
                    _ => false,
                };
                Ok(Outcome::require(line_ok, "j(0) did not share exactly the line (0:1)")
                    .and(Outcome::require(!all_commute(&t, TOL), "j(0) claimed to commute"))
                    .with_tag("origin"))
            } else {
                // Entry magnitudes spread over [1e-2, 10].
                let bs: Vec<FloatScalar> = (0..r - 1)
                    .map(|_| {
                        let dir = sample_unit_complex(&mut rng);
                        let mag = 10f64.powf(-2.0 + 3.0 * rng.next_f64());
                        dir * FloatScalar::new(mag, 0.0)
                    })
                    .collect();
                let t = j_map(&bs);
                let tag = classify(&t, TOL)?.tag();
                Ok(Outcome::require(
                    tag == StratumTag::Generating,
                    format!("j(b), b != 0 classified {tag}"),
                )
                .and(Outcome::require(!all_commute(&t, TOL), "j(b) claimed to commute")))
            }
        })
    });

    b.run("p_equivariance", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i).max(2);
            let mut rng = SplitMix64::for_sample(seed, i);
            let base = triangular_noncommuting(&mut rng, r);
            let g = sample_conjugator(seed, i, 100.0);
            let moved = conjugate(&base, &g, TOL)?;
            let expected = ProjLine::e1().apply(&g)?;
            let (line, fiber) = match p_trivialize(&moved, 0, TOL) {
                Err(Error::LineOutsideChart { .. }) => p_trivialize(&moved, 1, TOL)?,
                other => other?,
            };
            let mut out = Outcome::check(
                line_distance(&line, &expected),
                1e-9,
                "projection did not commute with conjugation",
            );
            let tri = fiber
                .iter()
                .map(|m| m.c.abs() / (1.0 + m.norm()))
                .fold(0.0, f64::max);
            out = out.and(Outcome::check(tri, 1e-9, "trivialized fiber not upper triangular"));
            let drift = sibirskii(&fiber).rel_distance(&sibirskii(&moved)).unwrap_or(f64::MAX);
            Ok(out.and(Outcome::check(drift, 1e-9, "fiber left the conjugation orbit")))
        })
    });

    b.run("f_g_round_trip", n, move |seed, i| {
        attempt(|| {
            let t = sample_tangent_point(seed, i, (1e-2, 1e2), 10.0);
            let y = g_map(&t)?;
            let back = g_inverse(&y)?;
            let mut out = Outcome::check(
                crate::b2model::tangent_rel_distance(&t, &back),
                1e-10,
                "g inverse round trip",
            );
            let x = f_map(&y)?;
            let y2 = f_inverse(&x, TOL)?;
            out = out.and(Outcome::check(
                y_rel_distance(&z2_canonical(&y), &y2),
                1e-10,
                "f inverse round trip",
            ));
            Ok(out)
        })
    });
}

// ---------------------------------------------------------------------------
// EQUIVALENCES
// ---------------------------------------------------------------------------

fn exact_int(re: i64, im: i64) -> ExactScalar {
    ExactScalar::from_int(re, im)
}

fn exact_frac(n: i64, d: i64) -> ExactScalar {
    ExactScalar::new(
        num::BigRational::new(n.into(), d.into()),
        num::BigRational::from_integer(0.into()),
    )
}

/// Pairs exercising both sides of the r = 2 trace criterion, including
/// near-misses that straddle the generating locus.
fn straddle_pairs() -> Vec<MatTuple<ExactScalar>> {
    let m = |a, b, c, d| Mat2::new(a, b, c, d);
    let pair = |x: Mat2<ExactScalar>, y: Mat2<ExactScalar>| {
        MatTuple::new(vec![x, y]).expect("two matrices")
    };
    let zero = exact_int(0, 0);
    let one = exact_int(1, 0);
    let mut out = vec![
        // diag(1,-1) with the swap: generating.
        pair(
            Mat2::diag(one.clone(), one.neg()),
            m(zero.clone(), one.clone(), one.clone(), zero.clone()),
        ),
        // Unipotent with the identity: commuting.
        pair(
            m(one.clone(), one.clone(), zero.clone(), one.clone()),
            Mat2::identity(),
        ),
        // Two diagonal matrices: commuting.
        pair(
            Mat2::diag(exact_int(1, 0), exact_int(2, 0)),
            Mat2::diag(exact_int(3, 0), exact_int(4, 0)),
        ),
        // Triangular non-commuting: shares a line, does not generate.
        pair(
            m(exact_int(1, 0), exact_int(1, 0), zero.clone(), exact_int(-1, 0)),
            m(exact_int(2, 0), exact_int(3, 0), zero.clone(), exact_int(5, 0)),
        ),
        // Scalar with unipotent: commuting.
        pair(
            Mat2::scalar(&exact_int(2, 0)),
            m(one.clone(), exact_int(5, 0), zero.clone(), one.clone()),
        ),
        // Opposite nilpotents: generating.
        pair(
            m(zero.clone(), one.clone(), zero.clone(), zero.clone()),
            m(zero.clone(), zero.clone(), one.clone(), zero.clone()),
        ),
        // Identity pair: commuting.
        pair(Mat2::identity(), Mat2::identity()),
    ];
    // diag(1,-1) against [[1,t],[t,-1]]: equality of the two trace sides
    // holds exactly at t = 0 and fails for every nonzero t.
    for t in [exact_int(0, 0), exact_frac(1, 1000), exact_frac(1, 10)] {
        out.push(pair(
            Mat2::diag(one.clone(), one.neg()),
            m(one.clone(), t.clone(), t.clone(), one.neg()),
        ));
    }
    out
}

fn equivalences_suite(params: &SuiteParams, b: &mut SuiteBuilder) {
    let p = *params;
    let n = p.samples;

    b.run("burnside", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = gaussian_tuple(&mut rng, r);
            let closure = generates_by_span(&t, TOL);
            let line = common_eigenline(&t, TOL)?;
            let agree = closure.generates == matches!(line, CommonLine::None);
            let mut out = Outcome::require(
                agree,
                format!(
                    "span dim {} vs eigenline search disagree",
                    closure.span_dim
                ),
            );
            let fams = edge_family(r);
            let (name, tuple, expect) = &fams[i as usize % fams.len()];
            let tag = classify(tuple, TOL)?.tag();
            out = out.and(Outcome::require(
                tag == *expect,
                format!("edge family {name} classified {tag}, expected {expect}"),
            ));
            Ok(out)
        })
    });

    b.run("friedland_exact", n, move |seed, i| {
        attempt(|| {
            let curated = straddle_pairs();
            let t = if (i as usize) < curated.len() {
                curated[i as usize].clone()
            } else {
                sample_exact_tuple(2, seed, i)
            };
            let by_trace = friedland_generates(&t, 0.0)?;
            let by_span = generates_by_span(&t, 0.0).generates;
            Ok(Outcome::require(
                by_trace == by_span,
                format!("trace criterion says {by_trace}, span closure says {by_span}"),
            ))
        })
    });

    b.run("sibirskii_invariance", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = gaussian_tuple(&mut rng, r);
            let g = sample_conjugator(seed, i, 100.0);
            let moved = conjugate(&t, &g, TOL)?;
            let d = sibirskii(&moved).rel_distance(&sibirskii(&t)).unwrap_or(f64::MAX);
            Ok(Outcome::check(d, 1e-9, "trace invariants moved under conjugation"))
        })
    });

    b.run("semisimplify_preserves", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let fams: Vec<_> = edge_family(r)
                .into_iter()
                .filter(|(_, _, tag)| *tag != StratumTag::Generating)
                .collect();
            let (name, base, _) = &fams[i as usize % fams.len()];
            let g = sample_conjugator(seed, i, 100.0);
            let t = conjugate(base, &g, TOL)?;
            let (out_tuple, _) = semisimplify_detailed(&t, TOL)?;
            let diagonal = out_tuple.iter().all(|m| m.is_diagonal(0.0));
            let mut out = Outcome::require(
                diagonal,
                format!("semisimplification of {name} is not exactly diagonal"),
            );
            let d = sibirskii(&out_tuple).rel_distance(&sibirskii(&t)).unwrap_or(f64::MAX);
            out = out.and(Outcome::check(d, 1e-9, "semisimplification moved the invariants"));
            Ok(out)
        })
    });

    b.run("orbit_separation", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = gaussian_tuple(&mut rng, r);
            if i % 2 == 0 {
                // Conjugate pair: equivalent, one-dimensional intertwiner
                // space, and the found conjugator actually works.
                let g = sample_conjugator(seed, i, 100.0);
                let moved = conjugate(&t, &g, TOL)?;
                let mut out = Outcome::require(
                    orbit_equivalent(&t, &moved, TOL)?,
                    "conjugate pair not recognized as equivalent",
                );
                let search = find_conjugator(&t, &moved, TOL)?;
                out = out.and(Outcome::require(
                    search.kernel_dim == 1,
                    format!("kernel dimension {} != 1 for a conjugate pair", search.kernel_dim),
                ));
                match search.conjugator {
                    Some(found) => {
                        let resid = conjugation_residual(&t, &moved, &found, TOL)?;
                        out = out.and(Outcome::check(resid, 1e-8, "recovered conjugator residual"));
                    }
                    None => {
                        out = out.and(Outcome::fail(1.0, "no conjugator recovered"));
                    }
                }
                Ok(out)
            } else {
                // Independent draws: distinct orbits, zero-dimensional
                // intertwiner space.
                let mut other = gaussian_tuple(&mut rng, r);
                for _ in 0..10 {
                    let sep = sibirskii(&other).rel_distance(&sibirskii(&t)).unwrap_or(f64::MAX);
                    if sep > 1e-3 {
                        break;
                    }
                    other = gaussian_tuple(&mut rng, r);
                }
                let mut out = Outcome::require(
                    !orbit_equivalent(&t, &other, TOL)?,
                    "independent tuples claimed equivalent",
                );
                let search = find_conjugator(&t, &other, TOL)?;
                out = out.and(Outcome::require(
                    search.kernel_dim == 0,
                    format!("kernel dimension {} != 0 for distinct orbits", search.kernel_dim),
                ));
                Ok(out)
            }
        })
    });

    b.run("freeness_kernel", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = gaussian_tuple(&mut rng, r);
            if !generates_by_span(&t, TOL).generates {
                return Ok(Outcome::fail(1.0, "random tuple failed to generate"));
            }
            let kernel = intertwiner_kernel(&t, &t, TOL)?;
            Ok(Outcome::require(
                kernel.len() == 1,
                format!("self-intertwiner space has dimension {}", kernel.len()),
            ))
        })
    });

    b.run("retraction_tags", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let s = [0.0, 0.25, 0.5, 0.75, 1.0][(i % 5) as usize];
            let t = if i % 2 == 0 {
                gaussian_tuple(&mut rng, r)
            } else {
                let fams = edge_family(r);
                fams[(i / 2) as usize % fams.len()].1.clone()
            };
            let before = classify(&t, TOL)?.tag();
            let after = classify(&traceless_retract(&t, s), TOL)?.tag();
            Ok(Outcome::require(
                before == after,
                format!("retraction at s = {s} moved the stratum: {before} -> {after}"),
            ))
        })
    });
}

// ---------------------------------------------------------------------------
// B2
// ---------------------------------------------------------------------------

fn b2_suite(params: &SuiteParams, b: &mut SuiteBuilder) {
    let n = params.samples;

    b.run("coordinate_identity", 1, |_seed, _i| {
        Outcome::require(
            coordinate_change_identity_holds(),
            "symbolic coordinate-change identity failed",
        )
    });

    b.run("b2_x_round_trip", n, move |seed, i| {
        let mut rng = SplitMix64::for_sample(seed, i);
        let coords = B2Coords {
            z1: rng.next_complex_gaussian(),
            z2: rng.next_complex_gaussian(),
            x: rng.next_complex_gaussian(),
        };
        let back = x_to_b2(&b2_to_x(&coords));
        let mut out = Outcome::check(b2_rel(&back, &coords), 1e-12, "float round trip");

        let small = |rng: &mut SplitMix64| {
            exact_int(rng.next_i64_in(-20, 20), rng.next_i64_in(-20, 20))
        };
        let ecoords = B2Coords { z1: small(&mut rng), z2: small(&mut rng), x: small(&mut rng) };
        let eback = x_to_b2(&b2_to_x(&ecoords));
        out = out.and(Outcome::require(
            eback.z1 == ecoords.z1 && eback.z2 == ecoords.z2 && eback.x == ecoords.x,
            "exact round trip not an identity",
        ));
        out
    });

    b.run("f_round_trip", n, move |seed, i| {
        attempt(|| {
            let t = sample_tangent_point(seed, i, (1e-3, 1e3), 1e3);
            let y = g_map(&t)?;
            let x = f_map(&y)?;
            let y2 = f_inverse(&x, TOL)?;
            let mut out = Outcome::check(
                f_round_trip_residual(&z2_canonical(&y), &y2),
                1e-10,
                "f then f_inverse",
            );
            let x2 = f_map(&y2)?;
            out = out.and(Outcome::check(x_rel_distance(&x, &x2), 1e-10, "f_inverse then f"));
            Ok(out)
        })
    });

    b.run("g_round_trip", n, move |seed, i| {
        attempt(|| {
            let t = sample_tangent_point(seed, i, (1e-3, 1e3), 1e3);
            let y = g_map(&t)?;
            let back = g_inverse(&y)?;
            let mut out = Outcome::check(
                crate::b2model::tangent_rel_distance(&t, &back),
                1e-10,
                "g then g_inverse",
            );
            let y2 = g_map(&back)?;
            out = out.and(Outcome::check(y_rel_distance(&y, &y2), 1e-10, "g_inverse then g"));
            Ok(out)
        })
    });

    b.run("z2_equivariance", n, move |seed, i| {
        attempt(|| {
            let t = sample_tangent_point(seed, i, (1e-3, 1e3), 1e3);
            let y = g_map(&t)?;
            let x_pos = f_map(&y)?;
            let x_neg = f_map(&y.negate())?;
            let mut out = Outcome::require(
                x_pos.x1 == x_neg.x1 && x_pos.x2 == x_neg.x2 && x_pos.x3 == x_neg.x3,
                "f(-lambda, -y) != f(lambda, y) bit-exactly",
            );
            let c1 = z2_canonical(&y);
            let c2 = z2_canonical(&y.negate());
            out = out.and(Outcome::require(
                c1.lambda == c2.lambda && c1.y == c2.y,
                "canonical representatives of y and -y differ",
            ));
            let c3 = z2_canonical(&c1);
            out = out.and(Outcome::require(
                c3.lambda == c1.lambda && c3.y == c1.y,
                "canonicalization is not idempotent",
            ));
            Ok(out)
        })
    });

    b.run("y_quadric_residual", n, move |seed, i| {
        attempt(|| {
            let t = sample_tangent_point(seed, i, (1e-3, 1e3), 1e3);
            let y = g_map(&t)?;
            y.validate()?;
            let scale = 1.0 + y.size_squared();
            Ok(Outcome::check(
                y.quadratic_residual() / scale,
                1e-12,
                "sphere equation residual",
            ))
        })
    });

    b.run("realize_chain", n, move |seed, i| {
        attempt(|| {
            let t = sample_tangent_point(seed, i, (0.1, 10.0), 3.0);
            let y = g_map(&t)?;
            let x = f_map(&y)?;
            let coords = x_to_b2(&x);
            let scale = 1.0 + coords.z1.abs().max(coords.z2.abs()).max(coords.x.abs());
            if coords.z1.abs() < 1e-2 * scale && coords.z2.abs() < 1e-2 * scale {
                return Ok(Outcome::tagged("skipped_near_degenerate"));
            }
            let realized = realize_b2(&coords)?;
            let tag = classify(&realized, TOL)?.tag();
            let mut out = Outcome::require(
                tag == StratumTag::Generating,
                format!("off-quadric realization classified {tag}"),
            );
            let recovered = b2_coords(&realized, TOL)?;
            out = out.and(Outcome::check(
                b2_rel(&recovered, &coords),
                1e-9,
                "trace coordinates of the realization",
            ));
            Ok(out)
        })
    });

    b.run("realization_round_trip", n, move |seed, i| {
        attempt(|| {
            let mut rng = SplitMix64::for_sample(seed, i);
            let coords = B2Coords {
                z1: rng.next_complex_gaussian(),
                z2: rng.next_complex_gaussian(),
                x: rng.next_complex_gaussian(),
            };
            let scale = 1.0 + coords.z1.abs().max(coords.z2.abs()).max(coords.x.abs());
            let mut out = if coords.z1.abs() < 1e-2 * scale {
                Outcome::tagged("skipped_near_degenerate")
            } else {
                let realized = realize_b2(&coords)?;
                let recovered = b2_coords(&realized, TOL)?;
                Outcome::check(b2_rel(&recovered, &coords), 1e-10, "float realization round trip")
            };

            // Exact branch: z1 = 2a^2 keeps the square root rational.
            let mut a = exact_int(rng.next_i64_in(-9, 9), rng.next_i64_in(-9, 9));
            if a.is_zero() {
                a = exact_int(1, 1);
            }
            let two = exact_int(2, 0);
            let ecoords = B2Coords {
                z1: two.mul(&a.mul(&a)),
                z2: exact_int(rng.next_i64_in(-9, 9), rng.next_i64_in(-9, 9)),
                x: exact_int(rng.next_i64_in(-9, 9), rng.next_i64_in(-9, 9)),
            };
            let realized = realize_b2(&ecoords)?;
            let recovered = b2_coords(&realized, 0.0)?;
            out = out.and(Outcome::require(
                recovered.z1 == ecoords.z1
                    && recovered.z2 == ecoords.z2
                    && recovered.x == ecoords.x,
                "exact realization round trip not an identity",
            ));
            Ok(out)
        })
    });
}

// ---------------------------------------------------------------------------
// MONTECARLO
// ---------------------------------------------------------------------------

fn montecarlo_suite(params: &SuiteParams, b: &mut SuiteBuilder) {
    let p = *params;
    let n = p.samples;

    b.run("generation_probability", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let t = gaussian_tuple(&mut rng, r);
            let tag = classify(&t, TOL)?.tag();
            // The non-generating locus has positive codimension: hitting it
            // with continuous samples means the classifier is broken.
            Ok(Outcome::require(
                tag == StratumTag::Generating,
                format!("continuous sample classified {tag}"),
            ))
        })
    });

    b.run("stratum_frequencies", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let random_tag = classify(&gaussian_tuple(&mut rng, r), TOL)?.tag();
            let mut out = Outcome::tagged(format!("count_{random_tag}"));

            let fams = edge_family(r);
            let (name, tuple, expect) = &fams[i as usize % fams.len()];
            let tag = classify(tuple, TOL)?.tag();
            out = out.and(Outcome::require(
                tag == *expect,
                format!("edge family {name} classified {tag}, expected {expect}"),
            ));
            out = out.and(Outcome::tagged(format!("count_{tag}")));
            Ok(out)
        })
    });

    b.run("t_chart_never_generates", n, move |seed, i| {
        attempt(|| {
            let r = r_for(&p, i);
            let mut rng = SplitMix64::for_sample(seed, i);
            let base = gaussian_matrix(&mut rng);
            let coeffs: Vec<_> = (0..r - 1)
                .map(|_| (rng.next_complex_gaussian(), rng.next_complex_gaussian()))
                .collect();
            let t = t_chart(0, &base, &coeffs)?;
            let tag = classify(&t, TOL)?.tag();
            Ok(Outcome::require(
                tag == StratumTag::Commuting,
                format!("pencil chart output classified {tag}"),
            ))
        })
    });

    b.run("sampler_determinism", n, move |seed, i| {
        let r = r_for(&p, i);
        let a = crate::sample::sample_float_tuple(r, crate::sample::Dist::Gaussian, seed, i);
        let b = crate::sample::sample_float_tuple(r, crate::sample::Dist::Gaussian, seed, i);
        let float_same = a.iter().zip(b.iter()).all(|(x, y)| x == y);
        let ea = sample_exact_tuple(2, seed, i);
        let eb = sample_exact_tuple(2, seed, i);
        let exact_same = ea.iter().zip(eb.iter()).all(|(x, y)| x == y);
        Outcome::require(float_same && exact_same, "sampler stream is not reproducible")
    });
}
