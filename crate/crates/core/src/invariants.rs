//! Conjugation invariants and the orbit quotient.
//!
//! For a tuple (A_1, …, A_r) of 2x2 matrices, the trace functions
//! Tr(A_i), Tr(A_i^2), Tr(A_i A_j) for i < j, and Tr(A_i A_j A_l) for
//! i < j < l generate the ring of simultaneous-conjugation invariants, so
//! two tuples with closed orbits are conjugate exactly when these
//! r + r + C(r,2) + C(r,3) numbers agree.  This module computes them,
//! retracts tuples into the traceless slice, realizes a prescribed
//! invariant triple as a concrete traceless pair, semisimplifies
//! non-generating tuples onto their diagonal parts, and searches for an
//! explicit conjugator between equivalent tuples by solving the
//! intertwiner system G A_i = B_i G.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::generation::{classify, common_eigenline, generates_by_span, CommonLine, Stratum};
use crate::linalg::nullspace4;
use crate::mat2::{Mat2, MatTuple, ProjLine};
use crate::scalar::Scalar;

/// The generating set of conjugation invariants of a tuple.  Index keys are
/// 1-based and strictly increasing, matching the usual notation.
#[derive(Debug, Clone, PartialEq)]
pub struct SibInvariants<S: Scalar> {
    pub r: usize,
    /// Tr(A_i), indexed 1..=r.
    pub t1: Vec<S>,
    /// Tr(A_i^2), indexed 1..=r.
    pub t2: Vec<S>,
    /// Tr(A_i A_j) for i < j.
    pub t11: BTreeMap<(usize, usize), S>,
    /// Tr(A_i A_j A_l) for i < j < l.
    pub t111: BTreeMap<(usize, usize, usize), S>,
}

impl<S: Scalar> SibInvariants<S> {
    /// Total number of invariants: r + r + C(r,2) + C(r,3).
    pub fn len(&self) -> usize {
        self.r + self.r + self.t11.len() + self.t111.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flatten to labelled scalars, e.g. `t1(2)`, `t11(1,3)`, `t111(1,2,4)`.
    pub fn flatten(&self) -> Vec<(String, S)> {
        let mut out = Vec::with_capacity(self.len());
        for (i, v) in self.t1.iter().enumerate() {
            out.push((format!("t1({})", i + 1), v.clone()));
        }
        for (i, v) in self.t2.iter().enumerate() {
            out.push((format!("t2({})", i + 1), v.clone()));
        }
        for (&(i, j), v) in &self.t11 {
            out.push((format!("t11({i},{j})"), v.clone()));
        }
        for (&(i, j, l), v) in &self.t111 {
            out.push((format!("t111({i},{j},{l})"), v.clone()));
        }
        out
    }

    /// Largest componentwise deviation `|a - b| / (1 + |a| + |b|)` between
    /// two invariant sets; `None` if the shapes differ.
    pub fn rel_distance(&self, other: &Self) -> Option<f64> {
        let lhs = self.flatten();
        let rhs = other.flatten();
        if lhs.len() != rhs.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for ((la, a), (lb, b)) in lhs.iter().zip(rhs.iter()) {
            if la != lb {
                return None;
            }
            let d = a.sub(b).abs() / (1.0 + a.abs() + b.abs());
            worst = worst.max(d);
        }
        Some(worst)
    }

    /// Componentwise agreement: exact equality on the exact backend,
    /// relative deviation at most `tol` on the float backend.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if S::EXACT {
            return self == other;
        }
        matches!(self.rel_distance(other), Some(d) if d <= tol)
    }
}

/// Compute all generating invariants of the tuple.
pub fn sibirskii<S: Scalar>(t: &MatTuple<S>) -> SibInvariants<S> {
    let r = t.r();
    let t1: Vec<S> = t.iter().map(Mat2::trace).collect();
    let t2: Vec<S> = t.iter().map(|m| m.mul(m).trace()).collect();
    let mut t11 = BTreeMap::new();
    for i in 0..r {
        for j in i + 1..r {
            t11.insert((i + 1, j + 1), t.get(i).mul(t.get(j)).trace());
        }
    }
    let mut t111 = BTreeMap::new();
    for i in 0..r {
        for j in i + 1..r {
            let prod_ij = t.get(i).mul(t.get(j));
            for l in j + 1..r {
                t111.insert((i + 1, j + 1, l + 1), prod_ij.mul(t.get(l)).trace());
            }
        }
    }
    SibInvariants { r, t1, t2, t11, t111 }
}

/// Deformation toward the traceless slice: A_i ↦ A_i − s·(Tr(A_i)/2)·I.
/// At s = 0 this is the identity; at s = 1 every output is traceless.
pub fn traceless_retract<S: Scalar>(t: &MatTuple<S>, s: f64) -> MatTuple<S> {
    let half_s = S::from_c64(crate::scalar::FloatScalar::new(s / 2.0, 0.0));
    t.map_mats(|m| {
        let shift = Mat2::scalar(&half_s.mul(&m.trace()));
        m.sub(&shift)
    })
}

/// The invariant coordinates (z1, z2, x) = (Tr(A1^2), Tr(A2^2), Tr(A1 A2))
/// of a traceless pair.  The pair generates exactly when the point misses
/// the quadric x^2 − z1 z2 = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct B2Coords<S: Scalar> {
    pub z1: S,
    pub z2: S,
    pub x: S,
}

impl<S: Scalar> B2Coords<S> {
    pub fn new(z1: S, z2: S, x: S) -> Self {
        B2Coords { z1, z2, x }
    }

    /// The defining polynomial x^2 − z1 z2 of the excluded quadric.
    pub fn quadric(&self) -> S {
        self.x.mul(&self.x).sub(&self.z1.mul(&self.z2))
    }

    /// Does the point miss the quadric?  Exact on the exact backend;
    /// relative to the coordinate scale on the float backend.
    pub fn off_quadric(&self, tol: f64) -> bool {
        let q = self.quadric();
        if S::EXACT {
            !q.is_zero()
        } else {
            let scale = 1.0 + self.x.abs().powi(2) + self.z1.abs() * self.z2.abs();
            q.abs() > tol * scale
        }
    }
}

/// Read off the (z1, z2, x) coordinates of a traceless pair.
pub fn b2_coords<S: Scalar>(t: &MatTuple<S>, tol: f64) -> Result<B2Coords<S>, Error> {
    if t.r() != 2 {
        return Err(Error::WrongArity { expected: 2, got: t.r() });
    }
    for m in t.iter() {
        let tr = m.trace();
        let ok = if S::EXACT {
            tr.is_zero()
        } else {
            tr.abs() <= tol * (1.0 + m.norm())
        };
        if !ok {
            return Err(Error::NotTraceless { residual: tr.abs() });
        }
    }
    let (a1, a2) = (t.get(0), t.get(1));
    Ok(B2Coords {
        z1: a1.mul(a1).trace(),
        z2: a2.mul(a2).trace(),
        x: a1.mul(a2).trace(),
    })
}

/// A section of the invariant map over the pair chart: build a traceless
/// pair whose (z1, z2, x) coordinates are exactly the given ones.
///
/// Charts: if z1 ≠ 0, A1 = diag(a, −a) with a the principal square root of
/// z1/2, and A2 = [[d, 1], [c, −d]] with d = x/(2a), c = z2/2 − d^2.  If
/// z1 = 0 ≠ z2 the roles swap.  If z1 = z2 = 0 the pair is the nilpotent
/// couple [[0,1],[0,0]], [[0,0],[x,0]].  On the exact backend the needed
/// square root may not exist among Gaussian rationals, in which case the
/// construction reports [`Error::NoExactSqrt`] rather than leaving the
/// field.
pub fn realize_b2<S: Scalar>(c: &B2Coords<S>) -> Result<MatTuple<S>, Error> {
    let two = S::from_int(2, 0);
    let one = S::one();
    let half = |v: &S| v.div(&two);

    let diag_and_companion = |zd: &S, zo: &S, x: &S| -> Result<(Mat2<S>, Mat2<S>), Error> {
        let a = half(zd).sqrt_principal().ok_or(Error::NoExactSqrt)?;
        let d = x.div(&two.mul(&a));
        let cc = half(zo).sub(&d.mul(&d));
        let diag = Mat2::diag(a.clone(), a.neg());
        let comp = Mat2::new(d.clone(), one.clone(), cc, d.neg());
        Ok((diag, comp))
    };

    let (m1, m2) = if !c.z1.is_zero() {
        diag_and_companion(&c.z1, &c.z2, &c.x)?
    } else if !c.z2.is_zero() {
        let (diag, comp) = diag_and_companion(&c.z2, &c.z1, &c.x)?;
        (comp, diag)
    } else {
        let zero = S::zero();
        (
            Mat2::new(zero.clone(), one, zero.clone(), zero.clone()),
            Mat2::new(zero.clone(), zero.clone(), c.x.clone(), zero),
        )
    };
    Ok(MatTuple::new(vec![m1, m2]).expect("two matrices"))
}

/// Simultaneous conjugation t ↦ (g A_1 g⁻¹, …, g A_r g⁻¹).
///
/// The conjugator must be invertible: exactly nonzero determinant on the
/// exact backend, |det| > tol·‖g‖² on the float backend.
pub fn conjugate<S: Scalar>(
    t: &MatTuple<S>,
    g: &Mat2<S>,
    tol: f64,
) -> Result<MatTuple<S>, Error> {
    let det = g.det();
    let threshold = if S::EXACT { 0.0 } else { tol * g.norm().powi(2) };
    let invertible = if S::EXACT {
        !det.is_zero()
    } else {
        det.abs() > threshold
    };
    if !invertible {
        return Err(Error::SingularConjugator { det_abs: det.abs(), threshold });
    }
    let g_inv = g.inverse().expect("determinant checked nonzero");
    Ok(t.map_mats(|m| g.mul(m).mul(&g_inv)))
}

/// Max over members of ‖g A_i g⁻¹ − B_i‖ / (1 + ‖A_i‖ + ‖B_i‖): how far g
/// is from conjugating s onto t.
pub fn conjugation_residual<S: Scalar>(
    s: &MatTuple<S>,
    t: &MatTuple<S>,
    g: &Mat2<S>,
    tol: f64,
) -> Result<f64, Error> {
    if s.r() != t.r() {
        return Err(Error::LengthMismatch { left: s.r(), right: t.r() });
    }
    let gs = conjugate(s, g, tol)?;
    let mut worst = 0.0f64;
    for (a, b) in gs.iter().zip(t.iter()) {
        let d = a.sub(b).norm() / (1.0 + a.norm() + b.norm());
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Replace a tuple by the semisimple representative in its orbit closure.
///
/// Generating tuples are returned unchanged (their orbit is already
/// closed).  A non-generating tuple shares an eigenline; a unitary basis
/// change moves that line to (1:0), making every member upper triangular
/// up to numerical residue, and the strictly-upper parts are then
/// discarded, leaving an exactly diagonal tuple.  The float backend does
/// this in full generality; the exact backend handles only tuples that
/// are already upper triangular (the eigenline search is numerical).
pub fn semisimplify<S: Scalar>(t: &MatTuple<S>, tol: f64) -> Result<MatTuple<S>, Error> {
    semisimplify_detailed(t, tol).map(|(out, _)| out)
}

/// As [`semisimplify`], also reporting the largest relative lower-left
/// residual observed after the triangularizing basis change (0 when the
/// input was generating or already triangular).
pub fn semisimplify_detailed<S: Scalar>(
    t: &MatTuple<S>,
    tol: f64,
) -> Result<(MatTuple<S>, f64), Error> {
    if S::EXACT {
        let closure = generates_by_span(t, tol);
        if closure.generates {
            return Ok((t.clone(), 0.0));
        }
        if t.iter().all(|m| m.is_upper_triangular(0.0)) {
            return Ok((t.map_mats(diag_part), 0.0));
        }
        return Err(Error::UnsupportedBackend);
    }

    let stratum = classify(t, tol)?;
    if matches!(stratum, Stratum::Generating { .. }) {
        return Ok((t.clone(), 0.0));
    }

    let line = shared_line_with_retry(t, tol)?;
    let rep = line.rep();
    let norm = (rep[0].abs().powi(2) + rep[1].abs().powi(2)).sqrt();
    let inv_norm = S::from_c64(crate::scalar::FloatScalar::new(1.0 / norm, 0.0));
    let u0 = rep[0].mul(&inv_norm);
    let u1 = rep[1].mul(&inv_norm);
    // Unitary with first column (u0, u1); conjugating by its inverse sends
    // the shared line to (1:0).
    let g_inv = Mat2::new(u0.conj(), u1.conj(), u1.neg(), u0.clone());
    let triangular = conjugate(t, &g_inv, tol)?;
    let mut residual = 0.0f64;
    for m in triangular.iter() {
        residual = residual.max(m.c.abs() / (1.0 + m.norm()));
    }
    Ok((triangular.map_mats(diag_part), residual))
}

fn diag_part<S: Scalar>(m: &Mat2<S>) -> Mat2<S> {
    Mat2::diag(m.a.clone(), m.d.clone())
}

fn shared_line_with_retry<S: Scalar>(
    t: &MatTuple<S>,
    tol: f64,
) -> Result<ProjLine<S>, Error> {
    for attempt_tol in [tol, tol * 100.0] {
        match common_eigenline(t, attempt_tol)? {
            CommonLine::Line(l) => return Ok(l),
            CommonLine::AllLines => return Ok(ProjLine::e1()),
            CommonLine::None => continue,
        }
    }
    Err(Error::InconsistentClassification {
        span_dim: generates_by_span(t, tol).span_dim,
        tol,
    })
}

/// Basis of the intertwiner space {G : G A_i = B_i G for all i}, as
/// row-major 4-vectors (G_a, G_b, G_c, G_d).
pub fn intertwiner_kernel<S: Scalar>(
    s: &MatTuple<S>,
    t: &MatTuple<S>,
    tol: f64,
) -> Result<Vec<[S; 4]>, Error> {
    if s.r() != t.r() {
        return Err(Error::LengthMismatch { left: s.r(), right: t.r() });
    }
    // G A − B G = 0 in the unknowns (w, x, y, z) = (G_a, G_b, G_c, G_d)
    // contributes four rows per member pair.
    let mut rows: Vec<[S; 4]> = Vec::with_capacity(4 * s.r());
    let zero = S::zero;
    for (a, b) in s.iter().zip(t.iter()) {
        rows.push([a.a.sub(&b.a), a.c.clone(), b.b.neg(), zero()]);
        rows.push([a.b.clone(), a.d.sub(&b.a), zero(), b.b.neg()]);
        rows.push([b.c.neg(), zero(), a.a.sub(&b.d), a.c.clone()]);
        rows.push([zero(), b.c.neg(), a.b.clone(), a.d.sub(&b.d)]);
    }
    Ok(nullspace4(&rows, tol))
}

/// Outcome of the conjugator search: the dimension of the intertwiner
/// space, an invertible intertwiner if one was found, and whether the
/// search bailed out on a degenerate (≥2-dimensional, no invertible
/// combination found) kernel.
#[derive(Debug, Clone)]
pub struct ConjugatorSearch<S: Scalar> {
    pub kernel_dim: usize,
    pub conjugator: Option<Mat2<S>>,
    pub non_generic: bool,
}

/// Look for g with g A_i g⁻¹ = B_i, by solving the linear intertwiner
/// system and scanning at most ten deterministic kernel combinations
/// (basis vectors, then pairwise sums) for an invertible one.
pub fn find_conjugator<S: Scalar>(
    s: &MatTuple<S>,
    t: &MatTuple<S>,
    tol: f64,
) -> Result<ConjugatorSearch<S>, Error> {
    let kernel = intertwiner_kernel(s, t, tol)?;
    let kernel_dim = kernel.len();
    let mut candidates: Vec<[S; 4]> = kernel.clone();
    for i in 0..kernel.len() {
        for j in i + 1..kernel.len() {
            let sum = [
                kernel[i][0].add(&kernel[j][0]),
                kernel[i][1].add(&kernel[j][1]),
                kernel[i][2].add(&kernel[j][2]),
                kernel[i][3].add(&kernel[j][3]),
            ];
            candidates.push(sum);
        }
    }
    candidates.truncate(10);
    for v in &candidates {
        let g = Mat2::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone());
        let det = g.det();
        let invertible = if S::EXACT {
            !det.is_zero()
        } else {
            det.abs() > tol * g.norm().powi(2)
        };
        if invertible {
            return Ok(ConjugatorSearch {
                kernel_dim,
                conjugator: Some(g),
                non_generic: false,
            });
        }
    }
    Ok(ConjugatorSearch {
        kernel_dim,
        conjugator: None,
        non_generic: kernel_dim >= 1,
    })
}

/// Are the two tuples conjugate after semisimplification?  Compares the
/// full invariant sets of the semisimplified tuples, which separate
/// orbits of semisimple tuples.
pub fn orbit_equivalent<S: Scalar>(
    s: &MatTuple<S>,
    t: &MatTuple<S>,
    tol: f64,
) -> Result<bool, Error> {
    if s.r() != t.r() {
        return Err(Error::LengthMismatch { left: s.r(), right: t.r() });
    }
    let ss = semisimplify(s, tol)?;
    let tt = semisimplify(t, tol)?;
    Ok(sibirskii(&ss).approx_eq(&sibirskii(&tt), tol))
}
