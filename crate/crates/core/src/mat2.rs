//! 2x2 complex matrices, finite tuples of them, and projective lines.
//!
//! A matrix `[[a, b], [c, d]]` acts on column vectors; a [`ProjLine`] is a
//! point of the complex projective line written in homogeneous coordinates
//! `(p : q)` and stored in a canonical scaling so that equal lines have equal
//! representations.

use crate::error::Error;
use crate::scalar::{FloatScalar, Scalar};

/// A 2x2 matrix with entries `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<S: Scalar> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_rows(rows: [[S; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = rows;
        Mat2 { a, b, c, d }
    }

    pub fn zero() -> Self {
        Mat2::new(S::zero(), S::zero(), S::zero(), S::zero())
    }

    pub fn identity() -> Self {
        Mat2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    /// The scalar matrix `s * I`.
    pub fn scalar(s: &S) -> Self {
        Mat2::new(s.clone(), S::zero(), S::zero(), s.clone())
    }

    pub fn diag(a: S, d: S) -> Self {
        Mat2::new(a, S::zero(), S::zero(), d)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Mat2::new(
            self.a.mul(&rhs.a).add(&self.b.mul(&rhs.c)),
            self.a.mul(&rhs.b).add(&self.b.mul(&rhs.d)),
            self.c.mul(&rhs.a).add(&self.d.mul(&rhs.c)),
            self.c.mul(&rhs.b).add(&self.d.mul(&rhs.d)),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Mat2::new(
            self.a.add(&rhs.a),
            self.b.add(&rhs.b),
            self.c.add(&rhs.c),
            self.d.add(&rhs.d),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Mat2::new(
            self.a.sub(&rhs.a),
            self.b.sub(&rhs.b),
            self.c.sub(&rhs.c),
            self.d.sub(&rhs.d),
        )
    }

    pub fn neg(&self) -> Self {
        Mat2::new(self.a.neg(), self.b.neg(), self.c.neg(), self.d.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        Mat2::new(
            self.a.mul(s),
            self.b.mul(s),
            self.c.mul(s),
            self.d.mul(s),
        )
    }

    pub fn trace(&self) -> S {
        self.a.add(&self.d)
    }

    pub fn det(&self) -> S {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Inverse via the adjugate; `None` when the determinant is exactly
    /// zero.  Float callers decide their own near-singularity threshold
    /// before calling.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        Some(Mat2::new(
            self.d.div(&det),
            self.b.neg().div(&det),
            self.c.neg().div(&det),
            self.a.div(&det),
        ))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[S; 2]) -> [S; 2] {
        [
            self.a.mul(&v[0]).add(&self.b.mul(&v[1])),
            self.c.mul(&v[0]).add(&self.d.mul(&v[1])),
        ]
    }

    /// Entries flattened row-major, viewing the matrix as a vector in C^4.
    pub fn vec4(&self) -> [S; 4] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
        ]
    }

    /// Frobenius norm as binary64 (approximate on the exact backend; used
    /// for scale estimates only).
    pub fn norm(&self) -> f64 {
        let s = self.a.abs().powi(2)
            + self.b.abs().powi(2)
            + self.c.abs().powi(2)
            + self.d.abs().powi(2);
        s.sqrt()
    }

    /// Scalar test: exactly `b = c = 0, a = d` on the exact backend, the
    /// same conditions up to `tol * ||A||` on the float backend.
    pub fn is_scalar(&self, tol: f64) -> bool {
        if S::EXACT {
            self.b.is_zero() && self.c.is_zero() && self.a == self.d
        } else {
            let bound = tol * self.norm();
            self.b.abs() <= bound && self.c.abs() <= bound && self.a.sub(&self.d).abs() <= bound
        }
    }

    /// Upper-triangular test (`c = 0`), exact or up to `tol * ||A||`.
    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        if S::EXACT {
            self.c.is_zero()
        } else {
            self.c.abs() <= tol * self.norm()
        }
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        if S::EXACT {
            self.b.is_zero() && self.c.is_zero()
        } else {
            let bound = tol * self.norm();
            self.b.abs() <= bound && self.c.abs() <= bound
        }
    }

    /// Entrywise conversion, e.g. into binary64 entries.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat2<T> {
        Mat2::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }
}

impl<S: Scalar> std::fmt::Display for Mat2<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.a, self.b, self.c, self.d
        )
    }
}

/// An ordered tuple of 2x2 matrices over one backend; always nonempty.
#[derive(Debug, Clone, PartialEq)]
pub struct MatTuple<S: Scalar> {
    mats: Vec<Mat2<S>>,
}

impl<S: Scalar> MatTuple<S> {
    pub fn new(mats: Vec<Mat2<S>>) -> Result<Self, Error> {
        if mats.is_empty() {
            return Err(Error::EmptyTuple);
        }
        Ok(MatTuple { mats })
    }

    /// Tuple length `r`.
    pub fn r(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[Mat2<S>] {
        &self.mats
    }

    pub fn into_mats(self) -> Vec<Mat2<S>> {
        self.mats
    }

    pub fn get(&self, i: usize) -> &Mat2<S> {
        &self.mats[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Mat2<S>> {
        self.mats.iter()
    }

    /// Largest Frobenius norm among the members (the natural scale for
    /// tuple-level tolerances); zero for a tuple of zero matrices.
    pub fn norm_max(&self) -> f64 {
        self.mats.iter().map(Mat2::norm).fold(0.0, f64::max)
    }

    pub fn map_mats(&self, f: impl Fn(&Mat2<S>) -> Mat2<S>) -> Self {
        MatTuple {
            mats: self.mats.iter().map(f).collect(),
        }
    }
}

/// A point of the complex projective line, stored canonically.
///
/// Canonical scaling: on the float backend the larger-modulus coordinate is
/// scaled to 1 (ties scale `p`); on the exact backend `p` is scaled to 1
/// whenever it is nonzero, else `q`.  Two equal lines therefore compare
/// equal componentwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjLine<S: Scalar> {
    p: S,
    q: S,
}

impl<S: Scalar> ProjLine<S> {
    pub fn new(p: S, q: S) -> Result<Self, Error> {
        if S::EXACT {
            if p.is_zero() && q.is_zero() {
                return Err(Error::ZeroLine);
            }
            if !p.is_zero() {
                let q = q.div(&p);
                Ok(ProjLine { p: S::one(), q })
            } else {
                Ok(ProjLine {
                    p: S::zero(),
                    q: S::one(),
                })
            }
        } else {
            let (ap, aq) = (p.abs(), q.abs());
            if ap == 0.0 && aq == 0.0 {
                return Err(Error::ZeroLine);
            }
            if ap >= aq {
                let q = q.div(&p);
                Ok(ProjLine { p: S::one(), q })
            } else {
                let p = p.div(&q);
                Ok(ProjLine { p, q: S::one() })
            }
        }
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    /// The standard basis line (1 : 0), spanned by e1.
    pub fn e1() -> Self {
        ProjLine {
            p: S::one(),
            q: S::zero(),
        }
    }

    /// The standard basis line (0 : 1), spanned by e2.
    pub fn e2() -> Self {
        ProjLine {
            p: S::zero(),
            q: S::one(),
        }
    }

    /// A representative vector of the line.
    pub fn rep(&self) -> [S; 2] {
        [self.p.clone(), self.q.clone()]
    }

    /// Image line under an invertible matrix.
    pub fn apply(&self, g: &Mat2<S>) -> Result<Self, Error> {
        let [p, q] = g.apply(&self.rep());
        ProjLine::new(p, q)
    }

    /// Chordal distance `|p1 q2 - q1 p2| / (||v1|| ||v2||)`; zero exactly
    /// when the lines coincide, at most 1.
    pub fn chordal_dist(&self, other: &Self) -> f64 {
        let cross = self.p.mul(&other.q).sub(&self.q.mul(&other.p)).abs();
        let n1 = (self.p.abs().powi(2) + self.q.abs().powi(2)).sqrt();
        let n2 = (other.p.abs().powi(2) + other.q.abs().powi(2)).sqrt();
        cross / (n1 * n2)
    }

    /// Same line up to `tol` in the chordal metric (exact equality on the
    /// exact backend).
    pub fn approx_same(&self, other: &Self, tol: f64) -> bool {
        if S::EXACT {
            self == other
        } else {
            self.chordal_dist(other) <= tol
        }
    }

    /// Deterministic ordering key for float lines: the `(1 : q)` chart
    /// precedes the `(p : 1)` chart, then lexicographic on the free
    /// coordinate's components.
    pub fn order_key(&self) -> (u8, f64, f64) {
        let one = S::one();
        if self.p == one {
            let z = self.q.to_c64();
            (0, z.re, z.im)
        } else {
            let z = self.p.to_c64();
            (1, z.re, z.im)
        }
    }
}

/// The eigenline locus of a single matrix: every line (for scalar
/// matrices), or one or two distinct lines.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenLines<S: Scalar> {
    AllLines,
    Lines(Vec<ProjLine<S>>),
}

/// Eigenlines of a matrix on the float backend.
///
/// Exact tuples reject: eigenvalues of a Gaussian-rational matrix leave the
/// field in general, so the exact backend does not offer this operation.
/// Scalar matrices (up to `tol * ||A||`) report [`EigenLines::AllLines`];
/// otherwise the one or two distinct eigenlines are returned in canonical
/// order.
pub fn eigenlines<S: Scalar>(m: &Mat2<S>, tol: f64) -> Result<EigenLines<S>, Error> {
    if S::EXACT {
        return Err(Error::UnsupportedBackend);
    }
    if m.is_scalar(tol) {
        return Ok(EigenLines::AllLines);
    }
    let mf = m.map(Scalar::to_c64);
    let lines = float_eigenlines(&mf, tol);
    Ok(EigenLines::Lines(
        lines
            .into_iter()
            .map(|l| {
                ProjLine::new(S::from_c64(*l.p()), S::from_c64(*l.q()))
                    .expect("nonzero representative")
            })
            .collect(),
    ))
}

/// Concrete binary64 eigenline computation for a non-scalar matrix.
fn float_eigenlines(m: &Mat2<FloatScalar>, tol: f64) -> Vec<ProjLine<FloatScalar>> {
    let scale = m.norm();
    let tr = m.trace();
    let det = m.det();
    let disc = tr * tr - det.scale(4.0);
    let sq = disc.sqrt();

    // A computed eigenvalue gap at noise level is indistinguishable from a
    // repeated eigenvalue.  When the traceless part dominates the gap the
    // matrix is defective up to roundoff, and the mean eigenvalue tr/2
    // pins its single eigenline to full precision — the split roots would
    // each be off by O(sqrt(eps)).
    let balanced = m.sub(&Mat2::scalar(&(tr * FloatScalar::new(0.5, 0.0))));
    if sq.norm() <= 1e-6 * scale && balanced.norm() > 10.0 * sq.norm() {
        let r0 = (balanced.a.norm_sqr() + balanced.b.norm_sqr()).sqrt();
        let r1 = (balanced.c.norm_sqr() + balanced.d.norm_sqr()).sqrt();
        if r0.max(r1) <= tol * scale {
            return Vec::new();
        }
        let (alpha, beta) = if r0 >= r1 {
            (balanced.a, balanced.b)
        } else {
            (balanced.c, balanced.d)
        };
        return vec![ProjLine::new(beta, -alpha).expect("dominant row is nonzero")];
    }

    let mut l1 = (tr + sq) * FloatScalar::new(0.5, 0.0);
    let mut l2 = (tr - sq) * FloatScalar::new(0.5, 0.0);
    // Refine the smaller root through the product to dodge cancellation.
    if l1.norm() >= l2.norm() {
        if l1.norm() > 0.0 {
            l2 = det / l1;
        }
    } else if l2.norm() > 0.0 {
        l1 = det / l2;
    }

    let mut lines: Vec<ProjLine<FloatScalar>> = Vec::with_capacity(2);
    for lambda in [l1, l2] {
        let shifted = m.sub(&Mat2::scalar(&lambda));
        // The kernel of a singular 2x2 matrix is read off its dominant row:
        // row (alpha, beta) annihilates (beta, -alpha).
        let r0 = (shifted.a.norm_sqr() + shifted.b.norm_sqr()).sqrt();
        let r1 = (shifted.c.norm_sqr() + shifted.d.norm_sqr()).sqrt();
        let (alpha, beta) = if r0 >= r1 {
            (shifted.a, shifted.b)
        } else {
            (shifted.c, shifted.d)
        };
        if r0.max(r1) <= tol * scale {
            // Both rows vanish: lambda-eigenspace is the whole plane, which
            // the scalar pre-check should have caught.
            continue;
        }
        let line = ProjLine::new(beta, -alpha).expect("dominant row is nonzero");
        if !lines.iter().any(|known| known.approx_same(&line, tol)) {
            lines.push(line);
        }
    }
    lines.sort_by(|x, y| {
        x.order_key()
            .partial_cmp(&y.order_key())
            .expect("finite keys")
    });
    lines
}
