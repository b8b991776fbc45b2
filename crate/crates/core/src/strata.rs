//! Charts over the non-generating strata and the comparison maps between
//! spheres, affine spaces, and tuple space.
//!
//! The commuting stratum is covered by charts (A, (a_k A + b_k I)_{k≠i})
//! of real dimension 4r+4; the shared-line stratum fibers over the
//! projective line with upper-triangular fibers of real dimension 6r; and
//! two sphere/affine comparison maps i and j land in tuple space with
//! ranks 2(2r−3) and 2(r−1).  Each parametrization is checked numerically:
//! a central-difference Jacobian, its singular values, and a two-threshold
//! gap rule for the rank.  Alongside the charts live the circle action,
//! the flip τ, and the conjugate-swap involution σ used in the comparison
//! arguments.

use crate::error::Error;
use crate::generation::{classify, Stratum};
use crate::invariants::conjugate;
use crate::linalg::{singular_values, ColMat};
use crate::mat2::{Mat2, MatTuple, ProjLine};
use crate::scalar::{FloatScalar, Scalar};

/// Central-difference step for Jacobian estimation: balances h² truncation
/// against ulp/h cancellation at unit scale.
pub const JACOBIAN_STEP: f64 = 1e-5;
/// A singular value above this (relative to σ₁) counts toward the rank.
pub const RANK_GAP_HIGH: f64 = 1e-6;
/// Everything below the rank must fall under this (relative to σ₁).
pub const RANK_GAP_LOW: f64 = 1e-9;

/// Which parametrization a rank check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// One free non-scalar matrix in `slot`, scalar pencils elsewhere:
    /// covers the commuting stratum.
    TChart { slot: usize },
    /// Upper-triangular tuples restricted away from the commuting locus:
    /// the fiber of the shared-line projection.
    WFiber,
    /// The full affine space of upper-triangular tuples (no exclusion).
    IncidenceFiber,
    /// b ↦ (([[0, b_k], [1, 0]])_k, diag(1,−1)).
    JMap,
    /// Sphere-pair chart through i(b, c) = (([[0, b_k], [c_k, 0]])_k, diag(1,−1)).
    IMap,
}

/// A chart together with the tuple length it parametrizes into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub r: usize,
}

impl ChartSpec {
    pub fn t_chart(slot: usize, r: usize) -> Self {
        assert!(slot < r, "slot {slot} out of range for r = {r}");
        ChartSpec { kind: ChartKind::TChart { slot }, r }
    }

    pub fn w_fiber(r: usize) -> Self {
        ChartSpec { kind: ChartKind::WFiber, r }
    }

    pub fn incidence_fiber(r: usize) -> Self {
        ChartSpec { kind: ChartKind::IncidenceFiber, r }
    }

    pub fn j_map(r: usize) -> Self {
        assert!(r >= 2, "the affine comparison map needs r >= 2");
        ChartSpec { kind: ChartKind::JMap, r }
    }

    pub fn i_map(r: usize) -> Self {
        assert!(r >= 2, "the sphere comparison map needs r >= 2");
        ChartSpec { kind: ChartKind::IMap, r }
    }

    pub fn name(&self) -> String {
        match self.kind {
            ChartKind::TChart { slot } => format!("T_CHART_{}", slot + 1),
            ChartKind::WFiber => "W_FIBER".into(),
            ChartKind::IncidenceFiber => "INCIDENCE_FIBER".into(),
            ChartKind::JMap => "J_MAP".into(),
            ChartKind::IMap => "I_MAP".into(),
        }
    }

    /// Real dimension of the parameter space.
    pub fn domain_dim(&self) -> usize {
        match self.kind {
            ChartKind::TChart { .. } => 4 * self.r + 4,
            ChartKind::WFiber | ChartKind::IncidenceFiber => 6 * self.r,
            ChartKind::JMap => 2 * (self.r - 1),
            ChartKind::IMap => 2 * (2 * self.r - 3),
        }
    }

    /// Expected real rank of the Jacobian at a generic point: every chart
    /// here is an immersion, so the rank equals the domain dimension.
    pub fn expected_rank(&self) -> usize {
        self.domain_dim()
    }

    /// Real dimension of the flattened tuple space the chart maps into.
    pub fn output_dim(&self) -> usize {
        8 * self.r
    }

    /// Evaluate the chart at a parameter vector, flattening the resulting
    /// tuple entry-by-entry into real coordinates.
    pub fn eval(&self, params: &[f64]) -> Result<Vec<f64>, Error> {
        if params.len() != self.domain_dim() {
            return Err(Error::LengthMismatch {
                left: params.len(),
                right: self.domain_dim(),
            });
        }
        let t = match self.kind {
            ChartKind::TChart { slot } => {
                let base = mat_from_reals(&params[0..8]);
                let mut coeffs = Vec::with_capacity(self.r - 1);
                for k in 0..self.r - 1 {
                    let off = 8 + 4 * k;
                    coeffs.push((
                        FloatScalar::new(params[off], params[off + 1]),
                        FloatScalar::new(params[off + 2], params[off + 3]),
                    ));
                }
                t_chart(slot, &base, &coeffs)?
            }
            ChartKind::WFiber | ChartKind::IncidenceFiber => {
                let mats = params
                    .chunks_exact(6)
                    .map(|q| {
                        Mat2::new(
                            FloatScalar::new(q[0], q[1]),
                            FloatScalar::new(q[2], q[3]),
                            FloatScalar::new(0.0, 0.0),
                            FloatScalar::new(q[4], q[5]),
                        )
                    })
                    .collect();
                MatTuple::new(mats).expect("r >= 1")
            }
            ChartKind::JMap => {
                let b: Vec<FloatScalar> = params
                    .chunks_exact(2)
                    .map(|q| FloatScalar::new(q[0], q[1]))
                    .collect();
                j_map(&b)
            }
            ChartKind::IMap => {
                let half = params.len() / 2;
                let b = sphere_chart_point(&params[..half], self.r - 1)?;
                let c = sphere_chart_point(&params[half..], self.r - 1)?;
                i_map(&b, &c)?
            }
        };
        Ok(flatten_tuple(&t))
    }

    /// Distance from the chart's excluded locus (infinite when there is
    /// none): non-scalarity of the base for the commuting chart, the
    /// largest commutator for the shared-line fiber, and the sphere-chart
    /// pivot heights for the sphere pair.
    pub fn margin(&self, params: &[f64]) -> Result<f64, Error> {
        if params.len() != self.domain_dim() {
            return Err(Error::LengthMismatch {
                left: params.len(),
                right: self.domain_dim(),
            });
        }
        match self.kind {
            ChartKind::TChart { .. } => {
                let base = mat_from_reals(&params[0..8]);
                Ok(nonscalarity(&base))
            }
            ChartKind::WFiber => {
                let flat = self.eval(params)?;
                let t = tuple_from_flat(&flat);
                let mut worst = 0.0f64;
                let mats = t.mats();
                for i in 0..mats.len() {
                    for j in i + 1..mats.len() {
                        worst = worst.max(mats[i].commutator(&mats[j]).norm());
                    }
                }
                Ok(worst)
            }
            ChartKind::IncidenceFiber | ChartKind::JMap => Ok(f64::INFINITY),
            ChartKind::IMap => {
                let half = params.len() / 2;
                let pivot = |chunk: &[f64]| -> f64 {
                    let s: f64 = chunk.iter().map(|x| x * x).sum();
                    (1.0 - s).max(0.0).sqrt()
                };
                Ok(pivot(&params[..half]).min(pivot(&params[half..])))
            }
        }
    }
}

/// ‖A − (Tr A / 2)·I‖: zero exactly on scalar matrices.
fn nonscalarity(m: &Mat2<FloatScalar>) -> f64 {
    let half_tr = m.trace() * FloatScalar::new(0.5, 0.0);
    m.sub(&Mat2::scalar(&half_tr)).norm()
}

fn mat_from_reals(q: &[f64]) -> Mat2<FloatScalar> {
    Mat2::new(
        FloatScalar::new(q[0], q[1]),
        FloatScalar::new(q[2], q[3]),
        FloatScalar::new(q[4], q[5]),
        FloatScalar::new(q[6], q[7]),
    )
}

/// Flatten a tuple to interleaved (re, im) coordinates, matrix by matrix.
pub fn flatten_tuple(t: &MatTuple<FloatScalar>) -> Vec<f64> {
    let mut out = Vec::with_capacity(8 * t.r());
    for m in t.iter() {
        for z in [&m.a, &m.b, &m.c, &m.d] {
            out.push(z.re);
            out.push(z.im);
        }
    }
    out
}

fn tuple_from_flat(flat: &[f64]) -> MatTuple<FloatScalar> {
    let mats = flat
        .chunks_exact(8)
        .map(mat_from_reals)
        .collect();
    MatTuple::new(mats).expect("r >= 1")
}

/// Chart of the unit sphere in ℂ^n ≅ ℝ^{2n}: 2n−1 free coordinates plus a
/// nonnegative pivot filling the last real slot.  Points with coordinate
/// norm ≥ 1 fall outside the chart.
fn sphere_chart_point(coords: &[f64], n: usize) -> Result<Vec<FloatScalar>, Error> {
    debug_assert_eq!(coords.len(), 2 * n - 1);
    let s: f64 = coords.iter().map(|x| x * x).sum();
    if s >= 1.0 {
        return Err(Error::NotOnSphere { norm: s.sqrt() });
    }
    let pivot = (1.0 - s).sqrt();
    let mut reals: Vec<f64> = coords.to_vec();
    reals.push(pivot);
    Ok(reals
        .chunks_exact(2)
        .map(|q| FloatScalar::new(q[0], q[1]))
        .collect())
}

/// The commuting-stratum chart: `base` in position `slot`, the pencil
/// a_k·base + b_k·I in every other position.
pub fn t_chart<S: Scalar>(
    slot: usize,
    base: &Mat2<S>,
    coeffs: &[(S, S)],
) -> Result<MatTuple<S>, Error> {
    let r = coeffs.len() + 1;
    if slot >= r {
        return Err(Error::LengthMismatch { left: slot, right: r });
    }
    if base.is_scalar(if S::EXACT { 0.0 } else { 1e-12 }) {
        return Err(Error::ScalarBase);
    }
    let mut mats = Vec::with_capacity(r);
    let mut next = coeffs.iter();
    for k in 0..r {
        if k == slot {
            mats.push(base.clone());
        } else {
            let (a, b) = next.next().expect("coeffs length is r - 1");
            mats.push(base.scale(a).add(&Mat2::scalar(b)));
        }
    }
    Ok(MatTuple::new(mats).expect("r >= 1"))
}

/// Outcome of one Jacobian rank estimate.
#[derive(Debug, Clone, Copy)]
pub struct RankEntry {
    pub observed_rank: usize,
    pub expected_rank: usize,
    /// σ_k / σ₁ at k = expected rank (must exceed [`RANK_GAP_HIGH`]).
    pub rank_ratio: f64,
    /// σ_{k+1} / σ₁ (must fall below [`RANK_GAP_LOW`]; 0 when absent).
    pub tail_ratio: f64,
    pub pass: bool,
}

/// Estimate the real rank of a chart's Jacobian at `params` by central
/// differences with step `h`, requiring the sample to sit at least 10h
/// from the chart's excluded locus.
pub fn numeric_jacobian_rank(
    spec: &ChartSpec,
    params: &[f64],
    h: f64,
) -> Result<RankEntry, Error> {
    let margin = spec.margin(params)?;
    let required = 10.0 * h;
    if margin < required {
        return Err(Error::MarginViolation { margin, required });
    }
    let n = spec.domain_dim();
    let m = spec.output_dim();
    let mut probe = params.to_vec();
    let mut columns: Vec<Vec<FloatScalar>> = Vec::with_capacity(n);
    for k in 0..n {
        probe[k] = params[k] + h;
        let plus = spec.eval(&probe)?;
        probe[k] = params[k] - h;
        let minus = spec.eval(&probe)?;
        probe[k] = params[k];
        let col = plus
            .iter()
            .zip(minus.iter())
            .map(|(p, q)| FloatScalar::new((p - q) / (2.0 * h), 0.0))
            .collect();
        columns.push(col);
    }
    let sigma = singular_values(ColMat::from_columns(m, columns));
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(RankEntry {
            observed_rank: 0,
            expected_rank: spec.expected_rank(),
            rank_ratio: 0.0,
            tail_ratio: 0.0,
            pass: spec.expected_rank() == 0,
        });
    }
    let expected = spec.expected_rank();
    let observed = sigma.iter().filter(|s| **s > RANK_GAP_HIGH * top).count();
    let rank_ratio = if expected >= 1 && expected <= sigma.len() {
        sigma[expected - 1] / top
    } else {
        0.0
    };
    let tail_ratio = if expected < sigma.len() {
        sigma[expected] / top
    } else {
        0.0
    };
    let pass = observed == expected && rank_ratio > RANK_GAP_HIGH && tail_ratio < RANK_GAP_LOW;
    Ok(RankEntry {
        observed_rank: observed,
        expected_rank: expected,
        rank_ratio,
        tail_ratio,
        pass,
    })
}

/// Trivialize the shared-line projection over a standard chart of the
/// projective line: returns the shared line and the fiber tuple g⁻¹ t g,
/// upper triangular up to the working tolerance.
///
/// Chart 0 holds the lines (1 : q) with conjugator [[1, 0], [q, 1]];
/// chart 1 holds the lines (p : 1) with conjugator [[p, 1], [1, 0]].
pub fn p_trivialize<S: Scalar>(
    t: &MatTuple<S>,
    chart: usize,
    tol: f64,
) -> Result<(ProjLine<S>, MatTuple<S>), Error> {
    if S::EXACT {
        return Err(Error::UnsupportedBackend);
    }
    let line = match classify(t, tol)? {
        Stratum::EigenShared { line: Some(line) } => line,
        Stratum::EigenShared { line: None } => return Err(Error::UnsupportedBackend),
        _ => return Err(Error::WrongStratum),
    };
    let rep = line.rep();
    let (p, q) = (rep[0].clone(), rep[1].clone());
    let scale = p.abs().max(q.abs());
    let g = match chart {
        0 => {
            if p.abs() <= tol * scale {
                return Err(Error::LineOutsideChart { chart });
            }
            // (1 : q/p) with conjugator [[1, 0], [q/p, 1]].
            Mat2::new(S::one(), S::zero(), q.div(&p), S::one())
        }
        1 => {
            if q.abs() <= tol * scale {
                return Err(Error::LineOutsideChart { chart });
            }
            Mat2::new(p.div(&q), S::one(), S::one(), S::zero())
        }
        other => return Err(Error::LineOutsideChart { chart: other }),
    };
    let g_inv = g.inverse().expect("chart conjugators are unimodular");
    let fiber = conjugate(t, &g_inv, tol)?;
    Ok((line, fiber))
}

fn check_unit_modulus<S: Scalar>(lambda: &S) -> Result<(), Error> {
    if S::EXACT {
        if lambda.mul(&lambda.conj()) == S::one() {
            Ok(())
        } else {
            Err(Error::NotUnitModulus { modulus: lambda.abs() })
        }
    } else {
        let modulus = lambda.abs();
        if (modulus - 1.0).abs() <= 1e-12 {
            Ok(())
        } else {
            Err(Error::NotUnitModulus { modulus })
        }
    }
}

fn check_sphere<S: Scalar>(v: &[S]) -> Result<(), Error> {
    if S::EXACT {
        let mut sum = S::zero();
        for z in v {
            sum = sum.add(&z.mul(&z.conj()));
        }
        if sum == S::one() {
            Ok(())
        } else {
            Err(Error::NotOnSphere { norm: sum.abs().sqrt() })
        }
    } else {
        let norm = v.iter().map(|z| z.abs().powi(2)).sum::<f64>().sqrt();
        if (norm - 1.0).abs() <= 1e-12 {
            Ok(())
        } else {
            Err(Error::NotOnSphere { norm })
        }
    }
}

/// The circle action: b-entries pick up λ̄, c-entries pick up λ, diagonal
/// entries are fixed.  Agrees with conjugation by diag(1, λ).
pub fn s1_act<S: Scalar>(lambda: &S, t: &MatTuple<S>) -> Result<MatTuple<S>, Error> {
    check_unit_modulus(lambda)?;
    let lbar = lambda.conj();
    Ok(t.map_mats(|m| {
        Mat2::new(
            m.a.clone(),
            lbar.mul(&m.b),
            lambda.mul(&m.c),
            m.d.clone(),
        )
    }))
}

/// The sphere-pair circle action λ·(b, c) = (λ̄·b, λ·c).
pub fn s1_act_spheres<S: Scalar>(
    lambda: &S,
    b: &[S],
    c: &[S],
) -> Result<(Vec<S>, Vec<S>), Error> {
    check_unit_modulus(lambda)?;
    let lbar = lambda.conj();
    Ok((
        b.iter().map(|z| lbar.mul(z)).collect(),
        c.iter().map(|z| lambda.mul(z)).collect(),
    ))
}

/// The sphere-pair inclusion i(b, c) = (([[0, b_k], [c_k, 0]])_k, diag(1,−1)).
/// On-sphere inputs always generate: some b_k and some c_l are nonzero.
pub fn i_map<S: Scalar>(b: &[S], c: &[S]) -> Result<MatTuple<S>, Error> {
    if b.len() != c.len() {
        return Err(Error::LengthMismatch { left: b.len(), right: c.len() });
    }
    check_sphere(b)?;
    check_sphere(c)?;
    let mut mats: Vec<Mat2<S>> = b
        .iter()
        .zip(c.iter())
        .map(|(bk, ck)| Mat2::new(S::zero(), bk.clone(), ck.clone(), S::zero()))
        .collect();
    mats.push(Mat2::diag(S::one(), S::one().neg()));
    Ok(MatTuple::new(mats).expect("r >= 2"))
}

/// The affine inclusion j(b) = (([[0, b_k], [1, 0]])_k, diag(1,−1)):
/// generating exactly when b ≠ 0, shared line (0:1) at b = 0, and never
/// commuting.
pub fn j_map<S: Scalar>(b: &[S]) -> MatTuple<S> {
    let mut mats: Vec<Mat2<S>> = b
        .iter()
        .map(|bk| Mat2::new(S::zero(), bk.clone(), S::one(), S::zero()))
        .collect();
    mats.push(Mat2::diag(S::one(), S::one().neg()));
    MatTuple::new(mats).expect("r >= 1")
}

/// The flip τ: entrywise [[a, b], [c, d]] ↦ [[−d, c], [b, −a]]; an
/// involution equal to −1 times conjugation by [[0, −1], [1, 0]].
pub fn tau_map<S: Scalar>(t: &MatTuple<S>) -> MatTuple<S> {
    t.map_mats(|m| Mat2::new(m.d.neg(), m.c.clone(), m.b.clone(), m.a.neg()))
}

/// The conjugate-swap involution σ(b, c) = (c̄, b̄) on sphere pairs.
pub fn sigma_map<S: Scalar>(b: &[S], c: &[S]) -> Result<(Vec<S>, Vec<S>), Error> {
    if b.len() != c.len() {
        return Err(Error::LengthMismatch { left: b.len(), right: c.len() });
    }
    check_sphere(b)?;
    check_sphere(c)?;
    Ok((
        c.iter().map(Scalar::conj).collect(),
        b.iter().map(Scalar::conj).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::{all_commute, StratumTag};
    use crate::invariants::sibirskii;
    use crate::sample::SplitMix64;
    use crate::scalar::ExactScalar;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> FloatScalar {
        FloatScalar::new(re, im)
    }

    fn fm(rows: [[f64; 2]; 2]) -> Mat2<FloatScalar> {
        Mat2::from_rows(rows.map(|r| r.map(|x| c(x, 0.0))))
    }

    #[test]
    fn t_chart_examples() {
        let base = fm([[1.0, 0.0], [0.0, -1.0]]);
        let t = t_chart(0, &base, &[(c(1.0, 0.0), c(0.0, 0.0))]).unwrap();
        assert_eq!(t.get(0), &base);
        assert_eq!(t.get(1), &base);

        let nil = fm([[0.0, 1.0], [0.0, 0.0]]);
        let t = t_chart(0, &nil, &[(c(0.0, 0.0), c(1.0, 0.0))]).unwrap();
        assert_eq!(t.get(1), &Mat2::identity());

        // Polynomial pencils in one matrix always commute.
        let t = t_chart(
            1,
            &fm([[2.0, 1.0], [3.0, -1.0]]),
            &[(c(0.5, 1.0), c(-2.0, 0.25)), (c(1.0, -1.0), c(0.0, 3.0))],
        )
        .unwrap();
        assert!(all_commute(&t, TOL));
        assert_eq!(classify(&t, TOL).unwrap().tag(), StratumTag::Commuting);

        assert!(matches!(
            t_chart(0, &Mat2::<FloatScalar>::identity(), &[(c(1.0, 0.0), c(0.0, 0.0))]),
            Err(Error::ScalarBase)
        ));
    }

    #[test]
    fn chart_dimensions() {
        for r in 2..=6 {
            assert_eq!(ChartSpec::t_chart(0, r).domain_dim(), 4 * r + 4);
            assert_eq!(ChartSpec::w_fiber(r).domain_dim(), 6 * r);
            assert_eq!(ChartSpec::incidence_fiber(r).domain_dim(), 6 * r);
            assert_eq!(ChartSpec::j_map(r).domain_dim(), 2 * (r - 1));
            assert_eq!(ChartSpec::i_map(r).domain_dim(), 2 * (2 * r - 3));
        }
    }

    fn generic_params(spec: &ChartSpec, seed: u64) -> Vec<f64> {
        let mut rng = SplitMix64::for_sample(seed, 0);
        match spec.kind {
            ChartKind::IMap => {
                let half = spec.domain_dim() / 2;
                let mut coords = Vec::with_capacity(spec.domain_dim());
                for _ in 0..2 {
                    let raw: Vec<f64> = (0..half).map(|_| rng.next_gaussian()).collect();
                    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
                    let rho = 0.3 + 0.4 * rng.next_f64();
                    coords.extend(raw.iter().map(|x| x / norm * rho));
                }
                coords
            }
            _ => (0..spec.domain_dim()).map(|_| rng.next_gaussian()).collect(),
        }
    }

    #[test]
    fn jacobian_ranks_match_expectations() {
        for r in [2usize, 3] {
            let specs = [
                ChartSpec::t_chart(0, r),
                ChartSpec::w_fiber(r),
                ChartSpec::incidence_fiber(r),
                ChartSpec::j_map(r),
                ChartSpec::i_map(r),
            ];
            for spec in specs {
                let params = generic_params(&spec, 17 + r as u64);
                let entry = numeric_jacobian_rank(&spec, &params, JACOBIAN_STEP).unwrap();
                assert!(
                    entry.pass,
                    "{} at r={r}: observed {} expected {} ratios {:.2e}/{:.2e}",
                    spec.name(),
                    entry.observed_rank,
                    entry.expected_rank,
                    entry.rank_ratio,
                    entry.tail_ratio
                );
            }
        }
    }

    #[test]
    fn jacobian_margin_enforcement() {
        // A scalar base sits on the excluded locus of the commuting chart.
        let spec = ChartSpec::t_chart(0, 2);
        let mut params = vec![0.0; spec.domain_dim()];
        params[0] = 1.0;
        params[6] = 1.0; // base = I
        params[8] = 1.0; // coefficient a_1 = 1
        assert!(matches!(
            numeric_jacobian_rank(&spec, &params, JACOBIAN_STEP),
            Err(Error::MarginViolation { .. })
        ));
    }

    #[test]
    fn trivialization_of_triangular_tuples() {
        let t = MatTuple::new(vec![
            fm([[1.0, 1.0], [0.0, -1.0]]),
            fm([[2.0, 1.0], [0.0, -2.0]]),
        ])
        .unwrap();
        let (line, fiber) = p_trivialize(&t, 0, TOL).unwrap();
        assert!(line.approx_same(&ProjLine::e1(), TOL));
        assert_eq!(fiber.get(0), t.get(0));
        assert_eq!(fiber.get(1), t.get(1));

        // (1:0) lies outside chart 1.
        assert!(matches!(
            p_trivialize(&t, 1, TOL),
            Err(Error::LineOutsideChart { chart: 1 })
        ));

        // Commuting input is the wrong stratum.
        let d = MatTuple::new(vec![fm([[1.0, 0.0], [0.0, 2.0]]), fm([[3.0, 0.0], [0.0, 4.0]])])
            .unwrap();
        assert!(matches!(p_trivialize(&d, 0, TOL), Err(Error::WrongStratum)));
    }

    #[test]
    fn trivialization_is_equivariant() {
        let t = MatTuple::new(vec![
            fm([[1.0, 1.0], [0.0, -1.0]]),
            fm([[2.0, 1.0], [0.0, -2.0]]),
        ])
        .unwrap();
        let g = fm([[1.0, 2.0], [1.0, 3.0]]);
        let moved = conjugate(&t, &g, TOL).unwrap();
        let (line_moved, fiber) = p_trivialize(&moved, 0, TOL).unwrap();
        let (line, _) = p_trivialize(&t, 0, TOL).unwrap();
        let pushed = line.apply(&g).unwrap();
        assert!(
            line_moved.approx_same(&pushed, 1e-8),
            "projection failed to commute with conjugation"
        );
        // The fiber is upper triangular and stays in the orbit.
        for m in fiber.iter() {
            assert!(m.is_upper_triangular(1e-8));
        }
        let d = sibirskii(&fiber).rel_distance(&sibirskii(&t)).unwrap();
        assert!(d <= 1e-8, "fiber invariants drifted by {d}");
    }

    #[test]
    fn circle_action_matches_conjugation() {
        let t = MatTuple::new(vec![fm([[1.0, 2.0], [3.0, 4.0]]), fm([[0.0, -1.0], [1.0, 0.5]])])
            .unwrap();
        let id = s1_act(&c(1.0, 0.0), &t).unwrap();
        assert_eq!(id.get(0), t.get(0));

        let neg = s1_act(&c(-1.0, 0.0), &t).unwrap();
        assert_eq!(neg.get(0), &fm([[1.0, -2.0], [-3.0, 4.0]]));

        let mut rng = SplitMix64::for_sample(23, 1);
        for _ in 0..20 {
            let lambda = crate::sample::sample_unit_complex(&mut rng);
            let acted = s1_act(&lambda, &t).unwrap();
            let diag = Mat2::diag(c(1.0, 0.0), lambda);
            let conj = conjugate(&t, &diag, TOL).unwrap();
            for (a, b) in acted.iter().zip(conj.iter()) {
                assert!(a.sub(b).norm() <= 1e-12 * (1.0 + b.norm()));
            }
        }

        assert!(matches!(
            s1_act(&c(2.0, 0.0), &t),
            Err(Error::NotUnitModulus { .. })
        ));

        // Exact backend with a rational point of the circle.
        let te = MatTuple::new(vec![Mat2::new(
            ExactScalar::from_int(1, 0),
            ExactScalar::from_int(2, 1),
            ExactScalar::from_int(0, -3),
            ExactScalar::from_int(4, 0),
        )])
        .unwrap();
        let lam = ExactScalar::new(
            num::BigRational::new(3.into(), 5.into()),
            num::BigRational::new(4.into(), 5.into()),
        );
        let acted = s1_act(&lam, &te).unwrap();
        let diag = Mat2::diag(ExactScalar::from_int(1, 0), lam);
        let conj = conjugate(&te, &diag, 0.0).unwrap();
        assert_eq!(acted.get(0), conj.get(0));
    }

    #[test]
    fn sphere_inclusion_generates() {
        let b = vec![c(1.0, 0.0)];
        let cc = vec![c(1.0, 0.0)];
        let t = i_map(&b, &cc).unwrap();
        assert_eq!(t.get(0), &fm([[0.0, 1.0], [1.0, 0.0]]));
        assert_eq!(t.get(1), &fm([[1.0, 0.0], [0.0, -1.0]]));
        assert_eq!(classify(&t, TOL).unwrap().tag(), StratumTag::Generating);

        assert!(matches!(
            i_map(&[c(2.0, 0.0)], &[c(1.0, 0.0)]),
            Err(Error::NotOnSphere { .. })
        ));
    }

    #[test]
    fn sphere_inclusion_equivariance_and_flip() {
        let mut rng = SplitMix64::for_sample(31, 4);
        for _ in 0..20 {
            let b = crate::sample::sample_complex_sphere(&mut rng, 2);
            let cc = crate::sample::sample_complex_sphere(&mut rng, 2);
            let lambda = crate::sample::sample_unit_complex(&mut rng);

            // i(λ̄b, λc) = λ · i(b, c): identical arithmetic, bit-exact.
            let (lb, lc) = s1_act_spheres(&lambda, &b, &cc).unwrap();
            let lhs = i_map(&lb, &lc).unwrap();
            let rhs = s1_act(&lambda, &i_map(&b, &cc).unwrap()).unwrap();
            for (x, y) in lhs.iter().zip(rhs.iter()) {
                assert_eq!(x, y);
            }

            // τ ∘ i = i ∘ swap, bit-exact.
            let flipped = tau_map(&i_map(&b, &cc).unwrap());
            let swapped = i_map(&cc, &b).unwrap();
            for (x, y) in flipped.iter().zip(swapped.iter()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn flip_is_an_involution_matching_scaled_conjugation() {
        let t = MatTuple::new(vec![fm([[1.0, 2.0], [3.0, 4.0]]), fm([[0.5, -1.5], [2.5, -0.5]])])
            .unwrap();
        assert_eq!(tau_map(&t).get(0), &fm([[-4.0, 3.0], [2.0, -1.0]]));
        let twice = tau_map(&tau_map(&t));
        assert_eq!(twice.get(0), t.get(0));
        assert_eq!(twice.get(1), t.get(1));

        // −1 · conjugation by [[0, −1], [1, 0]].
        let rot = fm([[0.0, -1.0], [1.0, 0.0]]);
        let conj = conjugate(&t, &rot, TOL).unwrap();
        for (x, y) in tau_map(&t).iter().zip(conj.iter()) {
            assert!(x.sub(&y.neg()).norm() <= 1e-14);
        }

        // diag(1, −1) is a fixed point.
        let d = MatTuple::new(vec![fm([[1.0, 0.0], [0.0, -1.0]])]).unwrap();
        assert_eq!(tau_map(&d).get(0), d.get(0));

        // τ preserves the stratum.
        let gen = MatTuple::new(vec![fm([[1.0, 0.0], [0.0, -1.0]]), fm([[0.0, 1.0], [1.0, 0.0]])])
            .unwrap();
        assert_eq!(
            classify(&tau_map(&gen), TOL).unwrap().tag(),
            classify(&gen, TOL).unwrap().tag()
        );
    }

    #[test]
    fn affine_inclusion_strata() {
        // b = 0: the shared line is (0:1).
        let t = j_map(&[c(0.0, 0.0)]);
        match classify(&t, TOL).unwrap() {
            Stratum::EigenShared { line: Some(l) } => {
                assert!(l.approx_same(&ProjLine::e2(), TOL))
            }
            other => panic!("expected a shared line, got {:?}", other.tag()),
        }

        // b ≠ 0 generates.
        let t = j_map(&[c(1.0, 0.0)]);
        assert_eq!(classify(&t, TOL).unwrap().tag(), StratumTag::Generating);

        // Never commuting, any b.
        for b in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(-2.5, 0.5)] {
            assert!(!all_commute(&j_map(&[b]), TOL));
        }
    }

    #[test]
    fn conjugate_swap_involution() {
        let b = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let cc = vec![c(0.0, 1.0), c(0.0, 0.0)];
        let (sb, sc) = sigma_map(&b, &cc).unwrap();
        assert_eq!(sb, vec![c(0.0, -1.0), c(0.0, 0.0)]);
        assert_eq!(sc, vec![c(0.6, 0.0), c(0.0, -0.8)]);
        let (bb, cc2) = sigma_map(&sb, &sc).unwrap();
        assert_eq!(bb, b);
        assert_eq!(cc2, cc);

        // Real pairs reduce to the plain swap.
        let br = vec![c(1.0, 0.0)];
        let cr = vec![c(-1.0, 0.0)];
        let (sb, sc) = sigma_map(&br, &cr).unwrap();
        assert_eq!((sb, sc), (cr, br));

        // S¹-equivariance: σ(λ·(b,c)) = λ·σ(b,c), bit-exact.
        let mut rng = SplitMix64::for_sample(77, 0);
        for _ in 0..20 {
            let lambda = crate::sample::sample_unit_complex(&mut rng);
            let (lb, lc) = s1_act_spheres(&lambda, &b, &cc).unwrap();
            let (x1, x2) = sigma_map(&lb, &lc).unwrap();
            let (sb, sc) = sigma_map(&b, &cc).unwrap();
            let (y1, y2) = s1_act_spheres(&lambda, &sb, &sc).unwrap();
            assert_eq!(x1, y1);
            assert_eq!(x2, y2);
        }
    }
}
