//! Batch front end for the matrix-tuple toolkit: parse tuple documents,
//! answer single-shot questions about them, and drive the verification
//! suites.
//!
//! Every command is non-interactive and seed-explicit. Commands that
//! answer a question print one JSON [`report::Report`] to stdout; commands
//! that construct tuples print tuple documents. The exit code is part of
//! the interface:
//!
//! * `0` — success,
//! * `1` — mathematical failure or mismatch (inconsistent classification,
//!   non-equivalent orbits, a failed suite),
//! * `2` — input error (unparseable document, bad flags, I/O),
//! * `3` — the request needs an operation the chosen backend cannot do.

pub mod document;
pub mod report;

use std::collections::BTreeMap;
use std::io::{Read as _, Write as _};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use mat2gen::{
    b2_coords, classify, common_eigenline, conjugation_residual, f_inverse, f_map,
    f_round_trip_residual, find_conjugator, friedland_gap, friedland_generates, g_inverse, g_map,
    generates_by_span, orbit_equivalent, realize_b2, run_suites, sample_tangent_point,
    sample_tuples, semisimplify, sibirskii, tangent_rel_distance, x_rel_distance, z2_canonical,
    AnyTuple, B2Coords, CommonLine, Dist, Error as CoreError, ExactScalar, FloatScalar, MatTuple,
    Scalar, StratumTag, SuiteName, SuiteParams, SuiteReport,
};

use document::{exact_repr, float_repr, parse_rational, TupleDocument};
use report::{InputsDigest, Report, LOW_CONFIDENCE, NON_GENERIC};

/// A command that could not run to a clean verdict, sorted by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2: the inputs never made it into the mathematics.
    Input(String),
    /// Exit 1: the mathematics reported a failure or mismatch.
    Math(String),
    /// Exit 3: the operation is not available on the requested backend.
    Unsupported(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Math(_) => 1,
            Failure::Input(_) => 2,
            Failure::Unsupported(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Math(m) | Failure::Input(m) | Failure::Unsupported(m) => m,
        }
    }

    fn from_core(e: CoreError) -> Failure {
        match e {
            CoreError::UnsupportedBackend | CoreError::NoExactSqrt => {
                Failure::Unsupported(e.to_string())
            }
            other => Failure::Math(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mat2gen",
    version,
    about = "Generation, invariants, and verification for tuples of 2x2 complex matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Classify a tuple: span generation, common eigenline, stratum tag.
    Check {
        /// Tuple document path, or "-" for stdin.
        file: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Report the trace invariants (and B2 coordinates of traceless pairs).
    Invariants {
        /// Tuple document path, or "-" for stdin.
        file: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Emit the diagonal semisimplification of a non-generating tuple.
    Semisimplify {
        /// Tuple document path, or "-" for stdin.
        file: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Decide whether two tuples have conjugate semisimplifications.
    OrbitEq {
        /// First tuple document path, or "-" for stdin.
        file_a: String,
        /// Second tuple document path.
        file_b: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Construct a traceless pair with the prescribed invariant coordinates.
    Realize {
        /// Tr(A1^2), as "re" or "re,im" (rationals "p/q" on the exact backend).
        #[arg(long)]
        z1: String,
        /// Tr(A2^2), same format as --z1.
        #[arg(long)]
        z2: String,
        /// Tr(A1 A2), same format as --z1.
        #[arg(long)]
        x: String,
        #[arg(long, value_enum, default_value_t = BackendArg::Float64)]
        backend: BackendArg,
    },
    /// Round-trip battery for the invariant coordinate model.
    B2 {
        /// Run the f/g round trips (the only mode).
        #[arg(long, required = true)]
        roundtrip: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
    },
    /// Run the verification suites and report every check.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 2)]
        r_min: usize,
        #[arg(long, default_value_t = 5)]
        r_max: usize,
        #[arg(long, default_value_t = 400)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads (0 = rayon default). Affects wall time only.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Stream sampled tuple documents and summarize their strata.
    Sample {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = DistArg::Gaussian)]
        dist: DistArg,
        #[arg(long)]
        seed: u64,
        /// Write the documents here instead of stdout (summary then goes
        /// to stdout instead of stderr).
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Float64,
    GaussianRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Ranks,
    Maps,
    Equivalences,
    B2,
    Montecarlo,
    All,
}

impl SuiteArg {
    fn names(self) -> Vec<SuiteName> {
        match self {
            SuiteArg::Ranks => vec![SuiteName::Ranks],
            SuiteArg::Maps => vec![SuiteName::Maps],
            SuiteArg::Equivalences => vec![SuiteName::Equivalences],
            SuiteArg::B2 => vec![SuiteName::B2],
            SuiteArg::Montecarlo => vec![SuiteName::MonteCarlo],
            SuiteArg::All => SuiteName::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Gaussian,
    UnitDisc,
    Rational,
}

impl From<DistArg> for Dist {
    fn from(d: DistArg) -> Dist {
        match d {
            DistArg::Gaussian => Dist::Gaussian,
            DistArg::UnitDisc => Dist::UnitDisc,
            DistArg::Rational => Dist::Rational,
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Check { file, tol } => cmd_check(&file, tol),
        Cmd::Invariants { file, tol } => cmd_invariants(&file, tol),
        Cmd::Semisimplify { file, tol } => cmd_semisimplify(&file, tol),
        Cmd::OrbitEq { file_a, file_b, tol } => cmd_orbit_eq(&file_a, &file_b, tol),
        Cmd::Realize { z1, z2, x, backend } => cmd_realize(&z1, &z2, &x, backend),
        Cmd::B2 { roundtrip: _, seed, n } => cmd_b2_roundtrip(seed, n),
        Cmd::Verify { suite, r_min, r_max, samples, seed, threads } => {
            cmd_verify(suite, r_min, r_max, samples, seed, threads)
        }
        Cmd::Sample { r, n, dist, seed, out } => cmd_sample(r, n, dist.into(), seed, out.as_deref()),
    }
}

fn read_input(file: &str) -> Result<String, Failure> {
    if file == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("{file}: {e}")))
    }
}

fn load_document(file: &str) -> Result<TupleDocument, Failure> {
    TupleDocument::from_json(&read_input(file)?)
}

/// Print to stdout without panicking when the reader hangs up: a closed
/// pipe ends the run quietly on the I/O-error exit code, anything else
/// surfaces as a regular input failure.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(2),
        Err(e) => Err(Failure::Input(format!("stdout: {e}"))),
    }
}

fn print_report(report: &Report) -> Result<(), Failure> {
    emit(&report.to_json())
}

fn line_value(line: &[FloatScalar; 2]) -> Value {
    json!([[line[0].re, line[0].im], [line[1].re, line[1].im]])
}

/// Stratum, span data, eigenline status, and the pair criterion verdict.
fn cmd_check(file: &str, tol: f64) -> Result<i32, Failure> {
    let doc = load_document(file)?;
    let digest = InputsDigest::new("check")
        .part("document", &doc.to_json_line())
        .part("tol", &format!("{tol:e}"))
        .finish();
    let mut report = Report::new("check", digest);
    let mut results = Map::new();

    let tag = match doc.to_tuple()? {
        AnyTuple::Float(t) => {
            let closure = generates_by_span(&t, tol);
            let stratum = classify(&t, tol).map_err(Failure::from_core)?;
            results.insert("generates".into(), json!(closure.generates));
            results.insert("span_dim".into(), json!(closure.span_dim));
            results.insert("stratum".into(), json!(stratum.tag().to_string()));
            let line = common_eigenline(&t, tol).map_err(Failure::from_core)?;
            results.insert(
                "common_eigenline".into(),
                match line {
                    CommonLine::None => json!("NONE"),
                    CommonLine::AllLines => json!("ALL_LINES"),
                    CommonLine::Line(l) => line_value(&l.rep()),
                },
            );
            if t.r() == 2 {
                let verdict = friedland_generates(&t, tol).map_err(Failure::from_core)?;
                let gap = friedland_gap(&t).map_err(Failure::from_core)?;
                results.insert("friedland".into(), json!(verdict));
                report.residuals.insert("friedland_gap".into(), gap);
                if gap <= 100.0 * tol {
                    report.flag(LOW_CONFIDENCE);
                }
            }
            stratum.tag()
        }
        AnyTuple::Exact(t) => {
            let closure = generates_by_span(&t, 0.0);
            let stratum = classify(&t, 0.0).map_err(Failure::from_core)?;
            results.insert("generates".into(), json!(closure.generates));
            results.insert("span_dim".into(), json!(closure.span_dim));
            results.insert("stratum".into(), json!(stratum.tag().to_string()));
            // Eigenlines need square roots the rational backend lacks.
            results.insert("common_eigenline".into(), Value::Null);
            if t.r() == 2 {
                let verdict = friedland_generates(&t, 0.0).map_err(Failure::from_core)?;
                results.insert("friedland".into(), json!(verdict));
                report
                    .residuals
                    .insert("friedland_gap".into(), friedland_gap(&t).map_err(Failure::from_core)?);
            }
            stratum.tag()
        }
    };
    if tag != StratumTag::Generating {
        report.flag(NON_GENERIC);
    }
    report.results = Value::Object(results);
    print_report(&report)?;
    Ok(0)
}

fn invariant_entries_float(t: &MatTuple<FloatScalar>) -> Value {
    let mut map = Map::new();
    for (name, v) in sibirskii(t).flatten() {
        map.insert(name, serde_json::to_value(float_repr(&v)).expect("entry"));
    }
    Value::Object(map)
}

fn invariant_entries_exact(t: &MatTuple<ExactScalar>) -> Value {
    let mut map = Map::new();
    for (name, v) in sibirskii(t).flatten() {
        map.insert(name, serde_json::to_value(exact_repr(&v)).expect("entry"));
    }
    Value::Object(map)
}

/// Trace invariants; for traceless pairs also the (z1, z2, x) point.
fn cmd_invariants(file: &str, tol: f64) -> Result<i32, Failure> {
    let doc = load_document(file)?;
    let digest = InputsDigest::new("invariants")
        .part("document", &doc.to_json_line())
        .part("tol", &format!("{tol:e}"))
        .finish();
    let mut report = Report::new("invariants", digest);
    let mut results = Map::new();
    results.insert("r".into(), json!(doc.r));

    match doc.to_tuple()? {
        AnyTuple::Float(t) => {
            results.insert("invariants".into(), invariant_entries_float(&t));
            if let Ok(c) = b2_coords(&t, tol) {
                results.insert(
                    "b2".into(),
                    json!({
                        "z1": float_repr(&c.z1),
                        "z2": float_repr(&c.z2),
                        "x": float_repr(&c.x),
                        "off_quadric": c.off_quadric(tol),
                    }),
                );
                report.residuals.insert("quadric".into(), c.quadric().abs());
            }
            if !classify(&t, tol).map_err(Failure::from_core)?.tag().eq(&StratumTag::Generating) {
                report.flag(NON_GENERIC);
            }
        }
        AnyTuple::Exact(t) => {
            results.insert("invariants".into(), invariant_entries_exact(&t));
            if let Ok(c) = b2_coords(&t, 0.0) {
                results.insert(
                    "b2".into(),
                    json!({
                        "z1": exact_repr(&c.z1),
                        "z2": exact_repr(&c.z2),
                        "x": exact_repr(&c.x),
                        "off_quadric": c.off_quadric(0.0),
                    }),
                );
            }
            if !classify(&t, 0.0).map_err(Failure::from_core)?.tag().eq(&StratumTag::Generating) {
                report.flag(NON_GENERIC);
            }
        }
    }
    report.results = Value::Object(results);
    print_report(&report)?;
    Ok(0)
}

/// Emit the semisimplified tuple as a document.
fn cmd_semisimplify(file: &str, tol: f64) -> Result<i32, Failure> {
    let doc = load_document(file)?;
    let out = match doc.to_tuple()? {
        AnyTuple::Float(t) => {
            TupleDocument::from_float(&semisimplify(&t, tol).map_err(Failure::from_core)?)
        }
        AnyTuple::Exact(t) => {
            TupleDocument::from_exact(&semisimplify(&t, 0.0).map_err(Failure::from_core)?)
        }
    };
    emit(&out.to_json())?;
    Ok(0)
}

fn conjugator_value_float(g: &mat2gen::Mat2<FloatScalar>) -> Value {
    json!([
        [float_repr(&g.a), float_repr(&g.b)],
        [float_repr(&g.c), float_repr(&g.d)],
    ])
}

fn conjugator_value_exact(g: &mat2gen::Mat2<ExactScalar>) -> Value {
    json!([
        [exact_repr(&g.a), exact_repr(&g.b)],
        [exact_repr(&g.c), exact_repr(&g.d)],
    ])
}

/// Same orbit closure? Exit 0 when equivalent, 1 when not.
fn cmd_orbit_eq(file_a: &str, file_b: &str, tol: f64) -> Result<i32, Failure> {
    let doc_a = load_document(file_a)?;
    let doc_b = load_document(file_b)?;
    let digest = InputsDigest::new("orbit-eq")
        .part("document_a", &doc_a.to_json_line())
        .part("document_b", &doc_b.to_json_line())
        .part("tol", &format!("{tol:e}"))
        .finish();
    let mut report = Report::new("orbit-eq", digest);
    let mut results = Map::new();

    let equivalent = match (doc_a.to_tuple()?, doc_b.to_tuple()?) {
        (AnyTuple::Float(s), AnyTuple::Float(t)) => {
            let equivalent = orbit_equivalent(&s, &t, tol).map_err(Failure::from_core)?;
            let ss = semisimplify(&s, tol).map_err(Failure::from_core)?;
            let tt = semisimplify(&t, tol).map_err(Failure::from_core)?;
            let delta = sibirskii(&ss).rel_distance(&sibirskii(&tt)).unwrap_or(f64::MAX);
            report.residuals.insert("invariant_delta_max".into(), delta);
            let search = find_conjugator(&ss, &tt, tol).map_err(Failure::from_core)?;
            results.insert("kernel_dim".into(), json!(search.kernel_dim));
            match &search.conjugator {
                Some(g) => {
                    results.insert("conjugator".into(), conjugator_value_float(g));
                    let residual =
                        conjugation_residual(&ss, &tt, g, tol).map_err(Failure::from_core)?;
                    report.residuals.insert("conjugation_residual".into(), residual);
                }
                None => {
                    results.insert("conjugator".into(), Value::Null);
                }
            }
            if search.non_generic {
                report.flag(NON_GENERIC);
            }
            equivalent
        }
        (AnyTuple::Exact(s), AnyTuple::Exact(t)) => {
            let equivalent = orbit_equivalent(&s, &t, 0.0).map_err(Failure::from_core)?;
            let ss = semisimplify(&s, 0.0).map_err(Failure::from_core)?;
            let tt = semisimplify(&t, 0.0).map_err(Failure::from_core)?;
            let delta = sibirskii(&ss).rel_distance(&sibirskii(&tt)).unwrap_or(f64::MAX);
            report.residuals.insert("invariant_delta_max".into(), delta);
            let search = find_conjugator(&ss, &tt, 0.0).map_err(Failure::from_core)?;
            results.insert("kernel_dim".into(), json!(search.kernel_dim));
            match &search.conjugator {
                Some(g) => {
                    results.insert("conjugator".into(), conjugator_value_exact(g));
                    let residual =
                        conjugation_residual(&ss, &tt, g, 0.0).map_err(Failure::from_core)?;
                    report.residuals.insert("conjugation_residual".into(), residual);
                }
                None => {
                    results.insert("conjugator".into(), Value::Null);
                }
            }
            if search.non_generic {
                report.flag(NON_GENERIC);
            }
            equivalent
        }
        _ => {
            return Err(Failure::Input(
                "orbit-eq needs both documents on the same scalar backend".into(),
            ))
        }
    };
    results.insert("equivalent".into(), json!(equivalent));
    report.results = Value::Object(results);
    print_report(&report)?;
    Ok(if equivalent { 0 } else { 1 })
}

fn parse_float_scalar(text: &str) -> Result<FloatScalar, Failure> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Failure::Input(format!("number {s:?}: {e}")))
    };
    match text.split_once(',') {
        Some((re, im)) => Ok(FloatScalar::new(parse(re)?, parse(im)?)),
        None => Ok(FloatScalar::new(parse(text)?, 0.0)),
    }
}

fn parse_exact_scalar(text: &str) -> Result<ExactScalar, Failure> {
    match text.split_once(',') {
        Some((re, im)) => Ok(ExactScalar::new(parse_rational(re)?, parse_rational(im)?)),
        None => Ok(ExactScalar::new(
            parse_rational(text)?,
            parse_rational("0")?,
        )),
    }
}

/// Build a traceless pair realizing (z1, z2, x) and print its document.
fn cmd_realize(z1: &str, z2: &str, x: &str, backend: BackendArg) -> Result<i32, Failure> {
    let out = match backend {
        BackendArg::Float64 => {
            let c = B2Coords::new(
                parse_float_scalar(z1)?,
                parse_float_scalar(z2)?,
                parse_float_scalar(x)?,
            );
            TupleDocument::from_float(&realize_b2(&c).map_err(Failure::from_core)?)
        }
        BackendArg::GaussianRational => {
            let c = B2Coords::new(
                parse_exact_scalar(z1)?,
                parse_exact_scalar(z2)?,
                parse_exact_scalar(x)?,
            );
            TupleDocument::from_exact(&realize_b2(&c).map_err(Failure::from_core)?)
        }
    };
    emit(&out.to_json())?;
    Ok(0)
}

/// f/g round trips at full advertised ranges; exit 1 past any budget.
fn cmd_b2_roundtrip(seed: u64, n: u64) -> Result<i32, Failure> {
    const FLAT_TOL: f64 = 1e-10;
    let digest = InputsDigest::new("b2")
        .part("mode", "roundtrip")
        .part("seed", &seed.to_string())
        .part("n", &n.to_string())
        .finish();
    let mut report = Report::new("b2", digest);
    report.seed = Some(seed);

    let mut worst_g = 0.0f64;
    let mut worst_f_y = 0.0f64;
    let mut worst_f_x = 0.0f64;
    let mut worst_quadric = 0.0f64;
    for i in 0..n {
        let t = sample_tangent_point(seed, i, (1e-3, 1e3), 1e3);
        let y = g_map(&t).map_err(Failure::from_core)?;
        let back = g_inverse(&y).map_err(Failure::from_core)?;
        worst_g = worst_g.max(tangent_rel_distance(&t, &back));
        worst_quadric =
            worst_quadric.max(y.quadratic_residual() / (1.0 + y.size_squared()));
        let x = f_map(&y).map_err(Failure::from_core)?;
        let y2 = f_inverse(&x, 1e-9).map_err(Failure::from_core)?;
        worst_f_y = worst_f_y.max(f_round_trip_residual(&z2_canonical(&y), &y2));
        let x2 = f_map(&y2).map_err(Failure::from_core)?;
        worst_f_x = worst_f_x.max(x_rel_distance(&x, &x2));
    }

    report.residuals.insert("g_round_trip".into(), worst_g);
    report.residuals.insert("f_round_trip_y".into(), worst_f_y);
    report.residuals.insert("f_round_trip_x".into(), worst_f_x);
    report.residuals.insert("quadric_scaled".into(), worst_quadric);
    let pass = worst_g <= FLAT_TOL
        && worst_f_y <= FLAT_TOL
        && worst_f_x <= FLAT_TOL
        && worst_quadric <= 1e-12;
    report.results = json!({ "n": n, "pass": pass });
    print_report(&report)?;
    Ok(if pass { 0 } else { 1 })
}

/// Front the verification suites; exit 0 only when every check passes.
fn cmd_verify(
    suite: SuiteArg,
    r_min: usize,
    r_max: usize,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<i32, Failure> {
    let digest = InputsDigest::new("verify")
        .part("suite", &format!("{suite:?}"))
        .part("r_min", &r_min.to_string())
        .part("r_max", &r_max.to_string())
        .part("samples", &samples.to_string())
        .part("seed", &seed.to_string())
        .finish();
    let mut report = Report::new("verify", digest);
    report.seed = Some(seed);

    let params = SuiteParams { r_min, r_max, samples, seed, threads };
    let suites: Vec<SuiteReport> = run_suites(&suite.names(), &params);
    let pass = suites.iter().all(|s| s.pass);
    for s in &suites {
        for c in &s.checks {
            report
                .residuals
                .insert(format!("{}.{}", s.suite, c.name), c.worst_residual);
        }
    }
    report.results = json!({
        "pass": pass,
        "suites": suites,
    });
    print_report(&report)?;
    Ok(if pass { 0 } else { 1 })
}

/// Stream sampled documents; summarize stratum frequencies in a report.
fn cmd_sample(
    r: usize,
    n: u64,
    dist: Dist,
    seed: u64,
    out: Option<&str>,
) -> Result<i32, Failure> {
    let digest = InputsDigest::new("sample")
        .part("r", &r.to_string())
        .part("n", &n.to_string())
        .part("dist", &dist.to_string())
        .part("seed", &seed.to_string())
        .finish();
    let mut report = Report::new("sample", digest);
    report.seed = Some(seed);

    let mut sink: Box<dyn std::io::Write> = match out {
        Some(path) => Box::new(
            std::fs::File::create(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut frequencies: BTreeMap<String, u64> = BTreeMap::new();
    for sample in sample_tuples(r, n as usize, dist, seed) {
        let tag = match &sample {
            AnyTuple::Float(t) => classify(t, 1e-9).map_err(Failure::from_core)?.tag(),
            AnyTuple::Exact(t) => classify(t, 0.0).map_err(Failure::from_core)?.tag(),
        };
        *frequencies.entry(tag.to_string()).or_insert(0) += 1;
        let doc = TupleDocument::from_tuple(&sample);
        writeln!(sink, "{}", doc.to_json_line())
            .map_err(|e| Failure::Input(format!("write: {e}")))?;
    }
    sink.flush().map_err(|e| Failure::Input(format!("write: {e}")))?;
    drop(sink);

    report.results = json!({
        "r": r,
        "n": n,
        "dist": dist.to_string(),
        "frequencies": frequencies,
    });
    // With documents on stdout the summary moves to stderr to keep the
    // stream parseable line by line.
    if out.is_some() {
        print_report(&report)?;
    } else {
        eprintln!("{}", report.to_json());
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_parsers_accept_both_forms() {
        assert_eq!(parse_float_scalar("2").unwrap(), FloatScalar::new(2.0, 0.0));
        assert_eq!(
            parse_float_scalar("-1.5, 3").unwrap(),
            FloatScalar::new(-1.5, 3.0)
        );
        assert!(parse_float_scalar("x").is_err());

        let z = parse_exact_scalar("3/4, -1/2").unwrap();
        assert_eq!(z, ExactScalar::new(
            parse_rational("3/4").unwrap(),
            parse_rational("-1/2").unwrap(),
        ));
        assert_eq!(parse_exact_scalar("5").unwrap(), ExactScalar::from_int(5, 0));
    }

    #[test]
    fn failure_exit_codes_follow_the_contract() {
        assert_eq!(Failure::Math("m".into()).exit_code(), 1);
        assert_eq!(Failure::Input("i".into()).exit_code(), 2);
        assert_eq!(Failure::Unsupported("u".into()).exit_code(), 3);
        assert_eq!(
            Failure::from_core(CoreError::UnsupportedBackend).exit_code(),
            3
        );
        assert_eq!(
            Failure::from_core(CoreError::EmptyTuple).exit_code(),
            1
        );
    }

    #[test]
    fn cli_parses_and_requires_seeds() {
        use clap::Parser;
        assert!(Cli::try_parse_from(["mat2gen", "verify", "--suite", "all"]).is_err());
        assert!(Cli::try_parse_from(["mat2gen", "sample", "--r", "2", "--n", "5"]).is_err());
        assert!(Cli::try_parse_from(["mat2gen", "b2", "--seed", "1"]).is_err());
        let cli =
            Cli::try_parse_from(["mat2gen", "verify", "--suite", "montecarlo", "--seed", "7"])
                .unwrap();
        match cli.cmd {
            Cmd::Verify { suite, seed, threads, .. } => {
                assert_eq!(suite, SuiteArg::Montecarlo);
                assert_eq!(seed, 7);
                assert_eq!(threads, 0);
            }
            _ => panic!("parsed the wrong command"),
        }
    }
}
