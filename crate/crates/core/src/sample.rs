//! Deterministic sampling for the verification suites.
//!
//! Every random object is produced by a counter-keyed stream: sample k of a
//! run seeded with s draws from its own generator derived from (s, k), so a
//! suite's output is a pure function of (seed, sample index) no matter how
//! samples are scheduled across threads.  The generator is the standard
//! 64-bit add-gamma/mix construction, which is splittable, tiny, and more
//! than random enough for Monte Carlo classification work.

use num::BigRational;

use crate::b2model::TangentPoint;
use crate::mat2::{Mat2, MatTuple};
use crate::scalar::{ExactScalar, FloatScalar, Scalar};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based splittable generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: mix64(seed) }
    }

    /// The independent stream for sample `index` of a run seeded with
    /// `seed`.  Distinct indices land in unrelated stretches of the state
    /// space, so parallel consumers never share a stream.
    pub fn for_sample(seed: u64, index: u64) -> Self {
        SplitMix64 {
            state: mix64(seed ^ mix64(index.wrapping_add(GAMMA))),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A pair of independent standard normals (Box–Muller).
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let r = (-2.0 * self.next_open01().ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.next_f64();
        (r * theta.cos(), r * theta.sin())
    }

    pub fn next_gaussian(&mut self) -> f64 {
        self.next_gaussian_pair().0
    }

    /// Uniform integer in [lo, hi] inclusive.
    pub fn next_i64_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + (self.next_u64() % span) as i64
    }

    pub fn next_complex_gaussian(&mut self) -> FloatScalar {
        let (re, im) = self.next_gaussian_pair();
        FloatScalar::new(re, im)
    }

    /// Uniform on the closed unit disc, by rejection.
    fn next_complex_unit_disc(&mut self) -> FloatScalar {
        loop {
            let re = 2.0 * self.next_f64() - 1.0;
            let im = 2.0 * self.next_f64() - 1.0;
            if re * re + im * im <= 1.0 {
                return FloatScalar::new(re, im);
            }
        }
    }

    fn next_rational(&mut self) -> BigRational {
        let num = self.next_i64_in(-100, 100);
        let den = self.next_i64_in(1, 100);
        BigRational::new(num.into(), den.into())
    }

    fn next_exact_entry(&mut self) -> ExactScalar {
        let re = self.next_rational();
        let im = self.next_rational();
        ExactScalar::new(re, im)
    }
}

/// Entry distribution of sampled tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dist {
    /// Independent standard normal real and imaginary parts (float backend).
    Gaussian,
    /// Uniform on the unit disc (float backend).
    UnitDisc,
    /// Gaussian rationals with numerators in [−100, 100] and denominators
    /// in [1, 100] (exact backend).
    Rational,
}

impl std::fmt::Display for Dist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Dist::Gaussian => "gaussian",
            Dist::UnitDisc => "unit-disc",
            Dist::Rational => "rational",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Dist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Dist::Gaussian),
            "unit-disc" | "unit_disc" | "disc" => Ok(Dist::UnitDisc),
            "rational" => Ok(Dist::Rational),
            other => Err(format!(
                "unknown distribution {other:?} (expected gaussian, unit-disc, or rational)"
            )),
        }
    }
}

/// A sampled tuple on whichever backend the distribution dictates.
#[derive(Debug, Clone)]
pub enum AnyTuple {
    Float(MatTuple<FloatScalar>),
    Exact(MatTuple<ExactScalar>),
}

impl AnyTuple {
    pub fn r(&self) -> usize {
        match self {
            AnyTuple::Float(t) => t.r(),
            AnyTuple::Exact(t) => t.r(),
        }
    }
}

fn float_matrix(rng: &mut SplitMix64, dist: Dist) -> Mat2<FloatScalar> {
    let mut entry = || match dist {
        Dist::Gaussian => rng.next_complex_gaussian(),
        Dist::UnitDisc => rng.next_complex_unit_disc(),
        Dist::Rational => unreachable!("rational entries are exact"),
    };
    let (a, b, c, d) = (entry(), entry(), entry(), entry());
    Mat2::new(a, b, c, d)
}

fn exact_matrix(rng: &mut SplitMix64) -> Mat2<ExactScalar> {
    let (a, b, c, d) = (
        rng.next_exact_entry(),
        rng.next_exact_entry(),
        rng.next_exact_entry(),
        rng.next_exact_entry(),
    );
    Mat2::new(a, b, c, d)
}

/// Sample `index` of the (r, dist, seed) stream, on the float backend.
/// Panics if the distribution is [`Dist::Rational`].
pub fn sample_float_tuple(r: usize, dist: Dist, seed: u64, index: u64) -> MatTuple<FloatScalar> {
    assert!(dist != Dist::Rational, "rational sampling is exact-backend");
    let mut rng = SplitMix64::for_sample(seed, index);
    let mats = (0..r).map(|_| float_matrix(&mut rng, dist)).collect();
    MatTuple::new(mats).expect("r >= 1")
}

/// Sample `index` of the exact rational stream.
pub fn sample_exact_tuple(r: usize, seed: u64, index: u64) -> MatTuple<ExactScalar> {
    let mut rng = SplitMix64::for_sample(seed, index);
    let mats = (0..r).map(|_| exact_matrix(&mut rng)).collect();
    MatTuple::new(mats).expect("r >= 1")
}

/// Backend-dispatching single sample.
pub fn sample_tuple(r: usize, dist: Dist, seed: u64, index: u64) -> AnyTuple {
    match dist {
        Dist::Gaussian | Dist::UnitDisc => AnyTuple::Float(sample_float_tuple(r, dist, seed, index)),
        Dist::Rational => AnyTuple::Exact(sample_exact_tuple(r, seed, index)),
    }
}

/// The deterministic stream of `n` samples.
pub fn sample_tuples(
    r: usize,
    n: usize,
    dist: Dist,
    seed: u64,
) -> impl Iterator<Item = AnyTuple> {
    (0..n as u64).map(move |i| sample_tuple(r, dist, seed, i))
}

/// An invertible Gaussian conjugator with 2-norm condition number at most
/// `max_cond`, found by deterministic rejection.
pub fn sample_conjugator(seed: u64, index: u64, max_cond: f64) -> Mat2<FloatScalar> {
    let mut rng = SplitMix64::for_sample(seed ^ 0xc0de_c0de_c0de_c0de, index);
    loop {
        let g = float_matrix(&mut rng, Dist::Gaussian);
        // For 2x2: σ1² σ2² = |det|², σ1² + σ2² = ‖g‖²_F.
        let f = g.norm().powi(2);
        let d = g.det().abs();
        if d == 0.0 {
            continue;
        }
        let disc = (f * f - 4.0 * d * d).max(0.0).sqrt();
        let s1_sq = (f + disc) / 2.0;
        let cond = (s1_sq / (d * d / s1_sq)).sqrt();
        if cond <= max_cond {
            return g;
        }
    }
}

/// A uniform point on the real unit 2-sphere.
pub fn sample_unit_vec3(rng: &mut SplitMix64) -> [f64; 3] {
    loop {
        let w = [rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()];
        let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        if n > 1e-3 {
            return [w[0] / n, w[1] / n, w[2] / n];
        }
    }
}

/// A tangent-bundle point with |λ| log-uniform in [λ_lo, λ_hi] and a
/// tangent vector of log-uniform size capped at `v_max`.  The tangency
/// constraint holds by construction (Gram–Schmidt against u).
pub fn sample_tangent_point(seed: u64, index: u64, lambda_range: (f64, f64), v_max: f64) -> TangentPoint {
    let mut rng = SplitMix64::for_sample(seed ^ 0x7a4e_9e11_5eed_5eed, index);
    let (lo, hi) = lambda_range;
    let modulus = lo * (hi / lo).powf(rng.next_f64());
    let phase = 2.0 * std::f64::consts::PI * rng.next_f64();
    let lambda = FloatScalar::new(modulus * phase.cos(), modulus * phase.sin());

    let u = sample_unit_vec3(&mut rng);
    let w = [rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()];
    let dot = w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
    let mut v = [w[0] - dot * u[0], w[1] - dot * u[1], w[2] - dot * u[2]];
    let scale = 10f64.powf(-3.0 + 6.0 * rng.next_f64());
    for c in &mut v {
        *c *= scale;
    }
    let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if vn > v_max {
        let shrink = v_max / vn;
        for c in &mut v {
            *c *= shrink;
        }
    }
    TangentPoint { lambda, u, v }
}

/// A unit-modulus scalar with uniform phase.
pub fn sample_unit_complex(rng: &mut SplitMix64) -> FloatScalar {
    let phase = 2.0 * std::f64::consts::PI * rng.next_f64();
    FloatScalar::new(phase.cos(), phase.sin())
}

/// A complex-sphere point ‖b‖ = 1 in ℂ^n (Hermitian norm), n ≥ 1.
pub fn sample_complex_sphere(rng: &mut SplitMix64, n: usize) -> Vec<FloatScalar> {
    loop {
        let b: Vec<FloatScalar> = (0..n).map(|_| rng.next_complex_gaussian()).collect();
        let norm: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return b.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Hand-constructed tuples with exactly known strata, exercising every
/// branch of the classification: scalar families, diagonal families,
/// triangular families (visible and conjugated shared lines), one-matrix
/// polynomial families, and generating families.
pub fn edge_family(r: usize) -> Vec<(String, MatTuple<FloatScalar>, crate::generation::StratumTag)> {
    use crate::generation::StratumTag::{Commuting, EigenShared, Generating};

    let c = |re: f64, im: f64| FloatScalar::new(re, im);
    let m = |a: f64, b: f64, cc: f64, d: f64| {
        Mat2::new(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0))
    };
    let tuple = |mats: Vec<Mat2<FloatScalar>>| MatTuple::new(mats).unwrap();
    let mut out: Vec<(String, MatTuple<FloatScalar>, crate::generation::StratumTag)> = Vec::new();

    out.push(("identities".into(), tuple(vec![Mat2::identity(); r]), Commuting));
    out.push(("zeros".into(), tuple(vec![Mat2::zero(); r]), Commuting));

    let scalars = (0..r)
        .map(|k| Mat2::scalar(&c(k as f64 + 1.0, -(k as f64))))
        .collect();
    out.push(("distinct-scalars".into(), tuple(scalars), Commuting));

    let diags = (0..r)
        .map(|k| Mat2::diag(c(k as f64 + 1.0, 0.0), c(-(k as f64) - 2.0, 1.0)))
        .collect();
    out.push(("distinct-diagonals".into(), tuple(diags), Commuting));

    // Polynomials in one non-scalar matrix commute.
    let base = m(0.0, 1.0, 0.0, 0.0);
    let powers = (0..r)
        .map(|k| {
            let ak = c(k as f64 + 1.0, 0.0);
            let bk = c(2.0 * k as f64 - 1.0, 0.0);
            base.scale(&ak).add(&Mat2::scalar(&bk))
        })
        .collect();
    out.push(("nilpotent-pencil".into(), tuple(powers), Commuting));

    // Triangular with at least one nonzero commutator: a visible shared line.
    let tri = (0..r)
        .map(|k| m(1.0 + k as f64, 1.0, 0.0, -(1.0 + k as f64)))
        .collect();
    let tri = tuple(tri);
    out.push(("triangular-shared-line".into(), tri.clone(), if r == 1 { Commuting } else { EigenShared }));

    // The same tuple with its line hidden by a fixed conjugation.
    let g = m(2.0, 1.0, 1.0, 1.0);
    let hidden = crate::invariants::conjugate(&tri, &g, 1e-9).unwrap();
    out.push(("conjugated-shared-line".into(), hidden, if r == 1 { Commuting } else { EigenShared }));

    // Nilpotent against a non-scalar diagonal: shared (1:0), not commuting.
    if r >= 2 {
        let mut mats = vec![m(0.0, 1.0, 0.0, 0.0), m(1.0, 0.0, 0.0, -1.0)];
        for k in 2..r {
            mats.push(m(0.0, k as f64, 0.0, 0.0));
        }
        out.push(("nilpotent-vs-diagonal".into(), tuple(mats), EigenShared));
    }

    // Generating families.
    if r >= 2 {
        let mut mats = vec![m(1.0, 0.0, 0.0, -1.0), m(0.0, 1.0, 1.0, 0.0)];
        for _ in 2..r {
            mats.push(Mat2::identity());
        }
        out.push(("diag-and-swap".into(), tuple(mats), Generating));

        // Lower companion plus diagonal, padded with symmetric fill.
        let b: Vec<FloatScalar> = (0..r - 1).map(|k| c(1.0 + k as f64, 0.5)).collect();
        let mut mats: Vec<Mat2<FloatScalar>> = b
            .iter()
            .map(|bk| Mat2::new(c(0.0, 0.0), *bk, c(1.0, 0.0), c(0.0, 0.0)))
            .collect();
        mats.push(m(1.0, 0.0, 0.0, -1.0));
        out.push(("offdiag-and-diag".into(), tuple(mats), Generating));
    }

    // The shared line at (0:1): zero off-diagonal data.
    if r >= 2 {
        let mut mats: Vec<Mat2<FloatScalar>> =
            (0..r - 1).map(|_| m(0.0, 0.0, 1.0, 0.0)).collect();
        mats.push(m(1.0, 0.0, 0.0, -1.0));
        out.push(("lower-corner-family".into(), tuple(mats), EigenShared));
    }

    out
}
