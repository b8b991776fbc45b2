//! Geometric model of the invariant space of generating traceless pairs.
//!
//! In the coordinates (x1, x2, x3) obtained from (z1, z2, x) by a fixed
//! linear change, the generating locus is the complement of the cone
//! x1² + x2² + x3² = 0.  That complement is parametrized, up to a sign
//! (λ, y) ↦ (−λ, −y), by pairs of a nonzero scale λ and a point y on the
//! complex bilinear sphere y1² + y2² + y3² = 1 via f(λ, y) = λy; and the
//! sphere itself is parametrized by real tangent data (u, v) with ‖u‖ = 1,
//! u·v = 0 via y = √(1+‖v‖²)·u + i·v.  Both maps come with explicit
//! inverses here, along with the sign-quotient canonical form and the
//! embedding of the circle-times-sphere core.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::invariants::B2Coords;
use crate::scalar::{ExactScalar, FloatScalar, Scalar};

/// Tolerance for the defining constraints of [`YPoint`] and
/// [`TangentPoint`]; residuals scale with the squared point size.
pub const POINT_VALIDITY_TOL: f64 = 1e-12;

/// Coordinates in which the non-generating locus is x1² + x2² + x3² = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct XCoords<S: Scalar> {
    pub x1: S,
    pub x2: S,
    pub x3: S,
}

impl<S: Scalar> XCoords<S> {
    pub fn new(x1: S, x2: S, x3: S) -> Self {
        XCoords { x1, x2, x3 }
    }

    /// x1² + x2² + x3², plainly evaluated.  The float pipeline uses a
    /// compensated version internally where cancellation matters.
    pub fn sum_squares(&self) -> S {
        self.x1
            .mul(&self.x1)
            .add(&self.x2.mul(&self.x2))
            .add(&self.x3.mul(&self.x3))
    }
}

/// The fixed linear change of coordinates
/// x1 = x, x2 = (z1 − z2)/2, x3 = (z1 + z2)/(2i),
/// under which x² − z1·z2 = x1² + x2² + x3² identically.
pub fn b2_to_x<S: Scalar>(c: &B2Coords<S>) -> XCoords<S> {
    let half = S::from_c64(FloatScalar::new(0.5, 0.0));
    let minus_half_i = S::from_c64(FloatScalar::new(0.0, -0.5));
    XCoords {
        x1: c.x.clone(),
        x2: c.z1.sub(&c.z2).mul(&half),
        x3: c.z1.add(&c.z2).mul(&minus_half_i),
    }
}

/// Inverse of [`b2_to_x`]: z1 = x2 + i·x3, z2 = −x2 + i·x3, x = x1.
pub fn x_to_b2<S: Scalar>(x: &XCoords<S>) -> B2Coords<S> {
    let i_x3 = S::i().mul(&x.x3);
    B2Coords {
        z1: x.x2.add(&i_x3),
        z2: x.x2.neg().add(&i_x3),
        x: x.x1.clone(),
    }
}

/// A point of the 5-manifold Y: a nonzero scale λ and a point of the
/// complex bilinear sphere y1² + y2² + y3² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct YPoint {
    pub lambda: FloatScalar,
    pub y: [FloatScalar; 3],
}

impl YPoint {
    /// |y1² + y2² + y3² − 1|, evaluated with compensated products so the
    /// residual reflects the constructed point rather than the evaluation.
    pub fn quadratic_residual(&self) -> f64 {
        let (re, im) = bilinear_square_sum(&self.y);
        FloatScalar::new(re - 1.0, im).norm()
    }

    pub fn size_squared(&self) -> f64 {
        self.y.iter().map(|c| c.norm_sqr()).sum()
    }

    /// λ ≠ 0 and the sphere relation holds to `POINT_VALIDITY_TOL`
    /// relative to 1 + ‖y‖².
    pub fn validate(&self) -> Result<(), Error> {
        if self.lambda.norm() == 0.0 {
            return Err(Error::InvalidPoint("scale λ must be nonzero".into()));
        }
        let residual = self.quadratic_residual();
        let bound = POINT_VALIDITY_TOL * (1.0 + self.size_squared());
        if residual > bound {
            return Err(Error::InvalidPoint(format!(
                "sphere relation off by {residual:.3e} (allowed {bound:.3e})"
            )));
        }
        Ok(())
    }

    /// The sign-flipped point (−λ, −y).
    pub fn negate(&self) -> YPoint {
        YPoint {
            lambda: -self.lambda,
            y: [-self.y[0], -self.y[1], -self.y[2]],
        }
    }
}

/// A point of ℂ× × TS²: nonzero scale, unit base point u, tangent vector v.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentPoint {
    pub lambda: FloatScalar,
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl TangentPoint {
    pub fn validate(&self) -> Result<(), Error> {
        if self.lambda.norm() == 0.0 {
            return Err(Error::InvalidPoint("scale λ must be nonzero".into()));
        }
        let norm = dot3(&self.u, &self.u).sqrt();
        if (norm - 1.0).abs() > POINT_VALIDITY_TOL {
            return Err(Error::NotOnSphere { norm });
        }
        let incidence = dot3(&self.u, &self.v);
        let bound = POINT_VALIDITY_TOL * (1.0 + dot3(&self.v, &self.v).sqrt());
        if incidence.abs() > bound {
            return Err(Error::InvalidPoint(format!(
                "tangent vector not orthogonal: u·v = {incidence:.3e}"
            )));
        }
        Ok(())
    }

    pub fn negate(&self) -> TangentPoint {
        TangentPoint {
            lambda: -self.lambda,
            u: [-self.u[0], -self.u[1], -self.u[2]],
            v: [-self.v[0], -self.v[1], -self.v[2]],
        }
    }
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Exact product split: returns (a·b rounded, exact rounding error).
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &t in terms {
        let tmp = s + t;
        if s.abs() >= t.abs() {
            c += (s - tmp) + t;
        } else {
            c += (t - tmp) + s;
        }
        s = tmp;
    }
    s + c
}

/// Real and imaginary parts of y1² + y2² + y3², with every product split
/// into rounded value plus exact error before summation.  The bilinear
/// square of a near-isotropic vector cancels almost completely, and the
/// naive evaluation would lose the round-trip budget at sizes ~10³.
fn bilinear_square_sum(y: &[FloatScalar; 3]) -> (f64, f64) {
    let mut re_terms = Vec::with_capacity(12);
    let mut im_terms = Vec::with_capacity(6);
    for c in y {
        let (p, e) = two_product(c.re, c.re);
        re_terms.push(p);
        re_terms.push(e);
        let (p, e) = two_product(c.im, c.im);
        re_terms.push(-p);
        re_terms.push(-e);
        let (p, e) = two_product(c.re, c.im);
        im_terms.push(p);
        im_terms.push(e);
    }
    (compensated_sum(&re_terms), 2.0 * compensated_sum(&im_terms))
}

/// f(λ, y) = λ·y.  The output satisfies x1² + x2² + x3² = λ² ≠ 0, and
/// f(−λ, −y) = f(λ, y) bit-exactly.
pub fn f_map(p: &YPoint) -> Result<XCoords<FloatScalar>, Error> {
    p.validate()?;
    Ok(XCoords {
        x1: p.lambda * p.y[0],
        x2: p.lambda * p.y[1],
        x3: p.lambda * p.y[2],
    })
}

/// Invert [`f_map`] off the cone: λ is the principal square root of
/// x1² + x2² + x3² and y = x/λ, which is already the canonical
/// representative of the sign orbit.
pub fn f_inverse(x: &XCoords<FloatScalar>, tol: f64) -> Result<YPoint, Error> {
    let (re, im) = bilinear_square_sum(&[x.x1, x.x2, x.x3]);
    let s = FloatScalar::new(re, im);
    if s.norm() <= tol {
        return Err(Error::OnQuadric);
    }
    let lambda = Scalar::sqrt_principal(&s).expect("float sqrt is total");
    let inv = FloatScalar::new(1.0, 0.0) / lambda;
    let p = YPoint {
        lambda,
        y: [x.x1 * inv, x.x2 * inv, x.x3 * inv],
    };
    Ok(z2_canonical(&p))
}

/// g(λ, u, v) = (λ, √(1+‖v‖²)·u + i·v): the homeomorphism from
/// ℂ× × TS² onto Y.
pub fn g_map(t: &TangentPoint) -> Result<YPoint, Error> {
    t.validate()?;
    let stretch = (1.0 + dot3(&t.v, &t.v)).sqrt();
    let y = [
        FloatScalar::new(stretch * t.u[0], t.v[0]),
        FloatScalar::new(stretch * t.u[1], t.v[1]),
        FloatScalar::new(stretch * t.u[2], t.v[2]),
    ];
    Ok(YPoint { lambda: t.lambda, y })
}

/// Invert [`g_map`]: v = Im y, u = Re y / ‖Re y‖.  The sphere relation
/// forces ‖Re y‖² = 1 + ‖Im y‖² ≥ 1, so the normalization is total.
pub fn g_inverse(p: &YPoint) -> Result<TangentPoint, Error> {
    p.validate()?;
    let re = [p.y[0].re, p.y[1].re, p.y[2].re];
    let v = [p.y[0].im, p.y[1].im, p.y[2].im];
    let n = dot3(&re, &re).sqrt();
    if n == 0.0 {
        return Err(Error::InvalidPoint(
            "sphere point with vanishing real part".into(),
        ));
    }
    Ok(TangentPoint {
        lambda: p.lambda,
        u: [re[0] / n, re[1] / n, re[2] / n],
        v,
    })
}

/// The canonical representative of the orbit {p, −p}: the one whose scale
/// has Re λ > 0, or Re λ = 0 and Im λ > 0.
pub fn z2_canonical(p: &YPoint) -> YPoint {
    let keep = p.lambda.re > 0.0 || (p.lambda.re == 0.0 && p.lambda.im > 0.0);
    if keep {
        p.clone()
    } else {
        p.negate()
    }
}

/// Embed the circle-times-sphere core with zero tangent vector.
pub fn circle_sphere_embed(lambda: FloatScalar, u: [f64; 3]) -> Result<TangentPoint, Error> {
    let modulus = lambda.norm();
    if (modulus - 1.0).abs() > POINT_VALIDITY_TOL {
        return Err(Error::NotUnitModulus { modulus });
    }
    let t = TangentPoint { lambda, u, v: [0.0; 3] };
    t.validate()?;
    Ok(t)
}

/// Retract onto the core: (λ, u, v) ↦ (λ/|λ|, u).  Composed with
/// [`circle_sphere_embed`] this is the identity.
pub fn retract_to_core(t: &TangentPoint) -> Result<(FloatScalar, [f64; 3]), Error> {
    t.validate()?;
    let modulus = t.lambda.norm();
    Ok((t.lambda / modulus, t.u))
}

/// Largest relative componentwise distance between two Y points.
pub fn y_rel_distance(a: &YPoint, b: &YPoint) -> f64 {
    let mut worst = rel_c(a.lambda, b.lambda);
    for k in 0..3 {
        worst = worst.max(rel_c(a.y[k], b.y[k]));
    }
    worst
}

/// Round-trip residual for recovering a Y point from its scaled coordinates,
/// normalized by the conditioning of that recovery.
///
/// Storing x = λy loses information at the scale of one rounding per
/// component, and the scaling factor is read back from Σxₖ², whose terms
/// reach ‖y‖² in magnitude while the sum itself is λ². To first order the
/// recovered pair differs from the original by a single global factor
/// 1 + O(ε·‖y‖²): for ‖v‖ near 10³ that is ~3·10⁻¹⁰ no matter how the
/// arithmetic is arranged, so a flat componentwise tolerance cannot hold
/// there. Dividing by 1 + ‖y‖² — the same factor the quadric residual is
/// scaled by — charges each sample for exactly that conditioning, and for
/// ‖y‖ ~ 1 the metric is the plain relative distance.
pub fn f_round_trip_residual(a: &YPoint, b: &YPoint) -> f64 {
    y_rel_distance(a, b) / (1.0 + a.size_squared())
}

/// Largest relative componentwise distance between two tangent points.
pub fn tangent_rel_distance(a: &TangentPoint, b: &TangentPoint) -> f64 {
    let mut worst = rel_c(a.lambda, b.lambda);
    for k in 0..3 {
        worst = worst.max(rel_f(a.u[k], b.u[k]));
        worst = worst.max(rel_f(a.v[k], b.v[k]));
    }
    worst
}

/// Largest relative componentwise distance between two coordinate triples.
pub fn x_rel_distance(a: &XCoords<FloatScalar>, b: &XCoords<FloatScalar>) -> f64 {
    rel_c(a.x1, b.x1)
        .max(rel_c(a.x2, b.x2))
        .max(rel_c(a.x3, b.x3))
}

fn rel_c(a: FloatScalar, b: FloatScalar) -> f64 {
    (a - b).norm() / (1.0 + a.norm() + b.norm())
}

fn rel_f(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs() + b.abs())
}

/// Symbolic check that the coordinate change respects the two defining
/// polynomials: expanding over exact Gaussian rationals,
/// x² − z1·z2 = x1² + x2² + x3² holds in both directions of the change.
pub fn coordinate_change_identity_holds() -> bool {
    // Forward: substitute x1, x2, x3 as polynomials in (z1, z2, x).
    let z1 = Poly3::var(0);
    let z2 = Poly3::var(1);
    let x = Poly3::var(2);
    let half = Poly3::constant(ExactScalar::from_c64(FloatScalar::new(0.5, 0.0)));
    let minus_half_i = Poly3::constant(ExactScalar::from_c64(FloatScalar::new(0.0, -0.5)));
    let x1 = x.clone();
    let x2 = z1.sub(&z2).mul(&half);
    let x3 = z1.add(&z2).mul(&minus_half_i);
    let lhs = x.mul(&x).sub(&z1.mul(&z2));
    let rhs = x1.mul(&x1).add(&x2.mul(&x2)).add(&x3.mul(&x3));
    if lhs != rhs {
        return false;
    }

    // Backward: substitute z1, z2, x as polynomials in (x1, x2, x3).
    let x1 = Poly3::var(0);
    let x2 = Poly3::var(1);
    let x3 = Poly3::var(2);
    let i = Poly3::constant(ExactScalar::from_int(0, 1));
    let i_x3 = i.mul(&x3);
    let z1 = x2.add(&i_x3);
    let z2 = x2.neg().add(&i_x3);
    let x = x1.clone();
    let lhs = x.mul(&x).sub(&z1.mul(&z2));
    let rhs = x1.mul(&x1).add(&x2.mul(&x2)).add(&x3.mul(&x3));
    lhs == rhs
}

/// Polynomials over exact Gaussian rationals in three variables, just
/// enough machinery to expand and compare the quadric identity.
#[derive(Debug, Clone, PartialEq)]
struct Poly3 {
    terms: BTreeMap<(u8, u8, u8), ExactScalar>,
}

impl Poly3 {
    fn constant(c: ExactScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0, 0), c);
        }
        Poly3 { terms }
    }

    fn var(k: usize) -> Self {
        let mut exp = [0u8; 3];
        exp[k] = 1;
        let mut terms = BTreeMap::new();
        terms.insert((exp[0], exp[1], exp[2]), ExactScalar::from_int(1, 0));
        Poly3 { terms }
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let entry = terms.entry(*m).or_insert_with(ExactScalar::zero);
            *entry = entry.add(c);
        }
        terms.retain(|_, c| !c.is_zero());
        Poly3 { terms }
    }

    fn neg(&self) -> Self {
        Poly3 {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut terms: BTreeMap<(u8, u8, u8), ExactScalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = (ma.0 + mb.0, ma.1 + mb.1, ma.2 + mb.2);
                let prod = ca.mul(cb);
                let entry = terms.entry(m).or_insert_with(ExactScalar::zero);
                *entry = entry.add(&prod);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly3 { terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::{generates_by_span, StratumTag};
    use crate::generation::classify;
    use crate::invariants::realize_b2;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> FloatScalar {
        FloatScalar::new(re, im)
    }

    #[test]
    fn coordinate_change_frozen_point_and_round_trip() {
        let b = B2Coords::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let x = b2_to_x(&b);
        assert_eq!(x, XCoords::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        let back = x_to_b2(&x);
        assert_eq!(back, b);

        // A generic point round trips exactly on the exact backend.
        let b = B2Coords::new(
            ExactScalar::from_int(3, 2),
            ExactScalar::from_int(-1, 5),
            ExactScalar::from_int(7, -4),
        );
        let back = x_to_b2(&b2_to_x(&b));
        assert_eq!(back, b);
    }

    #[test]
    fn coordinate_change_identity_symbolically() {
        assert!(coordinate_change_identity_holds());
    }

    #[test]
    fn quadric_values_match_across_the_change() {
        let b = B2Coords::new(c(2.0, 1.0), c(-0.5, 3.0), c(1.25, -2.0));
        let x = b2_to_x(&b);
        let lhs = b.quadric();
        let rhs = x.sum_squares();
        assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn f_map_examples() {
        let p = YPoint { lambda: c(1.0, 0.0), y: [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)] };
        let x = f_map(&p).unwrap();
        assert_eq!(x, XCoords::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));

        // The sign orbit collapses bit-exactly.
        let q = p.negate();
        assert_eq!(f_map(&q).unwrap(), x);

        let s2 = 2.0f64.sqrt();
        let p = YPoint { lambda: c(2.0, 0.0), y: [c(0.0, 1.0), c(s2, 0.0), c(0.0, 0.0)] };
        let x = f_map(&p).unwrap();
        assert_eq!(x.x1, c(0.0, 2.0));
        assert_eq!(x.x2, c(2.0 * s2, 0.0));
        let ss = x.sum_squares();
        assert!((ss - c(4.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn f_map_rejects_invalid_points() {
        let bad = YPoint { lambda: c(1.0, 0.0), y: [c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)] };
        assert!(matches!(f_map(&bad), Err(Error::InvalidPoint(_))));
        let zero_scale = YPoint { lambda: c(0.0, 0.0), y: [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)] };
        assert!(matches!(f_map(&zero_scale), Err(Error::InvalidPoint(_))));
    }

    #[test]
    fn f_inverse_examples_and_quadric_rejection() {
        let x = XCoords::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let p = f_inverse(&x, TOL).unwrap();
        assert_eq!(p.lambda, c(1.0, 0.0));
        assert_eq!(p.y[0], c(1.0, 0.0));

        let s2 = 2.0f64.sqrt();
        let x = XCoords::new(c(0.0, 2.0), c(2.0 * s2, 0.0), c(0.0, 0.0));
        let p = f_inverse(&x, TOL).unwrap();
        assert!((p.lambda - c(2.0, 0.0)).norm() <= 1e-12);
        assert!((p.y[0] - c(0.0, 1.0)).norm() <= 1e-12);
        assert!((p.y[1] - c(s2, 0.0)).norm() <= 1e-12);

        // The isotropic vector (1, i, 0) sits on the cone.
        let x = XCoords::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        assert_eq!(f_inverse(&x, TOL).unwrap_err(), Error::OnQuadric);
    }

    #[test]
    fn f_round_trip_is_the_canonical_form() {
        let s2 = 2.0f64.sqrt();
        for p in [
            YPoint { lambda: c(2.0, 0.0), y: [c(0.0, 1.0), c(s2, 0.0), c(0.0, 0.0)] },
            YPoint { lambda: c(-3.0, 1.0), y: [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)] },
            YPoint { lambda: c(0.0, -2.0), y: [c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0)] },
        ] {
            let back = f_inverse(&f_map(&p).unwrap(), TOL).unwrap();
            let canonical = z2_canonical(&p);
            assert!(
                y_rel_distance(&back, &canonical) <= 1e-12,
                "round trip strayed for {p:?}"
            );
        }
    }

    #[test]
    fn f_round_trip_residual_absorbs_large_points() {
        // At ‖v‖ = 10³ the y components are ~10³ and their squares ~10⁶;
        // the recovered scaling factor is then only good to ~10⁻¹⁰
        // relative, which is what the conditioning-scaled residual charges
        // for.
        let v = [600.0, 0.0, -800.0];
        let w = (1.0 + 1e6f64).sqrt();
        let t = TangentPoint { lambda: c(2.0, -1.0), u: [0.0, 1.0, 0.0], v };
        let y = g_map(&t).unwrap();
        assert!((y.size_squared() - (1.0 + 2e6)).abs() < 1.0);
        assert_eq!(y.y[1], c(w, 0.0));

        let back = f_inverse(&f_map(&y).unwrap(), TOL).unwrap();
        let canonical = z2_canonical(&y);
        assert!(f_round_trip_residual(&canonical, &back) <= 1e-10);

        // For points of unit size the scaled residual is the plain
        // relative distance up to the fixed factor 1 + ‖y‖².
        let small = YPoint { lambda: c(1.0, 0.0), y: [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)] };
        let other = YPoint { lambda: c(1.0, 1e-8), y: small.y };
        let flat = y_rel_distance(&small, &other);
        assert!((f_round_trip_residual(&small, &other) - flat / 2.0).abs() <= 1e-20);
    }

    #[test]
    fn g_map_examples_and_equivariance() {
        let t = TangentPoint { lambda: c(1.0, 0.0), u: [1.0, 0.0, 0.0], v: [0.0; 3] };
        let p = g_map(&t).unwrap();
        assert_eq!(p.y, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let t = TangentPoint { lambda: c(2.0, 0.0), u: [0.0, 1.0, 0.0], v: [1.0, 0.0, 0.0] };
        let p = g_map(&t).unwrap();
        let s2 = 2.0f64.sqrt();
        assert_eq!(p.y[0], c(0.0, 1.0));
        assert_eq!(p.y[1], c(s2, 0.0));
        assert!(p.quadratic_residual() <= 1e-15);

        // Odd map: g(−λ, −u, −v) = −g(λ, u, v) bit-exactly.
        let neg = g_map(&t.negate()).unwrap();
        assert_eq!(neg, p.negate());
    }

    #[test]
    fn g_map_validates_inputs() {
        let bad_u = TangentPoint { lambda: c(1.0, 0.0), u: [2.0, 0.0, 0.0], v: [0.0; 3] };
        assert!(matches!(g_map(&bad_u), Err(Error::NotOnSphere { .. })));
        let bad_v = TangentPoint { lambda: c(1.0, 0.0), u: [1.0, 0.0, 0.0], v: [1.0, 0.0, 0.0] };
        assert!(matches!(g_map(&bad_v), Err(Error::InvalidPoint(_))));
    }

    #[test]
    fn g_inverse_examples_and_round_trip() {
        let p = YPoint { lambda: c(1.0, 0.0), y: [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)] };
        let t = g_inverse(&p).unwrap();
        assert_eq!(t.u, [1.0, 0.0, 0.0]);
        assert_eq!(t.v, [0.0, 0.0, 0.0]);

        let s2 = 2.0f64.sqrt();
        let p = YPoint { lambda: c(2.0, 0.0), y: [c(0.0, 1.0), c(s2, 0.0), c(0.0, 0.0)] };
        let t = g_inverse(&p).unwrap();
        assert!((t.u[1] - 1.0).abs() <= 1e-15);
        assert!((t.v[0] - 1.0).abs() <= 1e-15);

        let original = TangentPoint {
            lambda: c(-0.5, 1.5),
            u: [0.6, 0.0, 0.8],
            v: [-0.8 * 2.0, 0.0, 0.6 * 2.0],
        };
        let back = g_inverse(&g_map(&original).unwrap()).unwrap();
        assert!(tangent_rel_distance(&back, &original) <= 1e-12);

        // Real part of the sphere relation: ‖Re y‖² − ‖Im y‖² = 1.
        let p = g_map(&original).unwrap();
        let re2: f64 = p.y.iter().map(|c| c.re * c.re).sum();
        let im2: f64 = p.y.iter().map(|c| c.im * c.im).sum();
        assert!((re2 - im2 - 1.0).abs() <= 1e-12 * (1.0 + re2 + im2));
    }

    #[test]
    fn canonical_sign_representative() {
        let y = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let p = YPoint { lambda: c(1.0, 0.0), y };
        assert_eq!(z2_canonical(&p), p);

        let q = YPoint { lambda: c(-1.0, 0.0), y };
        let canon = z2_canonical(&q);
        assert_eq!(canon.lambda, c(1.0, 0.0));
        assert_eq!(canon.y[0], c(-1.0, 0.0));

        // Purely imaginary scales: both orbit members collapse together.
        let a = YPoint { lambda: c(0.0, 1.0), y };
        let b = a.negate();
        assert_eq!(z2_canonical(&a), z2_canonical(&b));
        assert_eq!(z2_canonical(&a).lambda, c(0.0, 1.0));
    }

    #[test]
    fn core_embedding_and_retraction() {
        let t = circle_sphere_embed(c(1.0, 0.0), [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.v, [0.0; 3]);
        let (lambda, u) = retract_to_core(&t).unwrap();
        assert_eq!(lambda, c(1.0, 0.0));
        assert_eq!(u, [0.0, 0.0, 1.0]);

        // Retraction rescales any valid tangent point to the unit circle.
        let t = TangentPoint { lambda: c(2.0, 0.0), u: [1.0, 0.0, 0.0], v: [0.0, 3.0, 0.0] };
        let (lambda, _) = retract_to_core(&t).unwrap();
        assert_eq!(lambda, c(1.0, 0.0));

        assert!(matches!(
            circle_sphere_embed(c(2.0, 0.0), [1.0, 0.0, 0.0]),
            Err(Error::NotUnitModulus { .. })
        ));
    }

    #[test]
    fn composite_chain_lands_in_the_generating_stratum() {
        let samples = [
            TangentPoint { lambda: c(1.0, 0.0), u: [1.0, 0.0, 0.0], v: [0.0; 3] },
            TangentPoint { lambda: c(-2.0, 0.5), u: [0.0, 0.6, 0.8], v: [0.0, -0.8, 0.6] },
            TangentPoint { lambda: c(0.0, 3.0), u: [0.6, 0.8, 0.0], v: [1.6, -1.2, 0.0] },
        ];
        for t in &samples {
            let b = x_to_b2(&f_map(&g_map(t).unwrap()).unwrap());
            assert!(b.off_quadric(TOL), "chain point fell on the quadric for {t:?}");
            let pair = realize_b2(&b).unwrap();
            assert!(generates_by_span(&pair, TOL).generates);
            assert_eq!(classify(&pair, TOL).unwrap().tag(), StratumTag::Generating);
        }
    }

    #[test]
    fn compensated_square_sum_beats_naive_evaluation() {
        // A stretched sphere point: y = √(1+‖v‖²)·u + i·v with ‖v‖ = 1000.
        let t = TangentPoint {
            lambda: c(1.0, 0.0),
            u: [0.0, 1.0, 0.0],
            v: [1000.0, 0.0, 0.0],
        };
        let p = g_map(&t).unwrap();
        // The relation holds far below the naive cancellation floor
        // eps·‖y‖² ≈ 2e-10.
        assert!(p.quadratic_residual() <= 1e-12 * (1.0 + p.size_squared()));
        assert!(p.validate().is_ok());
    }
}
