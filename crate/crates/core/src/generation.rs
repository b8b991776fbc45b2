//! Does a tuple generate the full 2x2 matrix algebra?
//!
//! The workhorse is a span closure: starting from the identity, keep
//! right-multiplying by the tuple members until the linear span of the
//! products stops growing.  The tuple generates exactly when that span is
//! all of the 4-dimensional matrix space, and (for 2x2 matrices) exactly
//! when the members share no eigenline — so non-generating tuples split
//! into the commuting ones and the ones sharing a single eigenline while
//! failing to commute.  For pairs there is also a closed-form criterion in
//! traces, implemented here as [`friedland_generates`].

use crate::error::Error;
use crate::linalg::rank_of_span;
use crate::mat2::{eigenlines, EigenLines, Mat2, MatTuple, ProjLine};
use crate::scalar::Scalar;

/// A product of tuple members, stored as 0-based member indices in
/// multiplication order; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word(pub Vec<usize>);

impl Word {
    fn extended(&self, i: usize) -> Word {
        let mut w = self.0.clone();
        w.push(i);
        Word(w)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        let names: Vec<String> = self.0.iter().map(|i| format!("A{}", i + 1)).collect();
        write!(f, "{}", names.join("*"))
    }
}

/// Result of the span closure: whether the span reached dimension 4, the
/// dimension it stabilized at, and words whose products form a basis.
#[derive(Debug, Clone)]
pub struct SpanClosure {
    pub generates: bool,
    pub span_dim: usize,
    pub basis_words: Vec<Word>,
}

/// Close the span of words in the tuple under right multiplication.
///
/// Each round multiplies the words added in the previous round by every
/// member and keeps the products that enlarge the span, as judged by
/// [`rank_of_span`].  The dimension is capped at 4, so at most three rounds
/// add anything and every kept word has length at most 3.
pub fn generates_by_span<S: Scalar>(t: &MatTuple<S>, tol: f64) -> SpanClosure {
    let mut basis_mats: Vec<Mat2<S>> = vec![Mat2::identity()];
    let mut basis_words: Vec<Word> = vec![Word(Vec::new())];
    let mut basis_vecs: Vec<[S; 4]> = vec![basis_mats[0].vec4()];
    // Indices into the basis of the words not yet multiplied out.
    let mut frontier: Vec<usize> = vec![0];

    while !frontier.is_empty() && basis_vecs.len() < 4 {
        let mut added: Vec<usize> = Vec::new();
        'frontier: for &w in &frontier {
            for i in 0..t.r() {
                let cand = basis_mats[w].mul(t.get(i));
                let mut probe = basis_vecs.clone();
                probe.push(cand.vec4());
                if rank_of_span(&probe, tol) > basis_vecs.len() {
                    basis_vecs.push(cand.vec4());
                    basis_mats.push(cand);
                    basis_words.push(basis_words[w].extended(i));
                    added.push(basis_mats.len() - 1);
                    if basis_vecs.len() == 4 {
                        break 'frontier;
                    }
                }
            }
        }
        frontier = added;
    }

    let span_dim = basis_vecs.len();
    SpanClosure {
        generates: span_dim == 4,
        span_dim,
        basis_words,
    }
}

/// The common-eigenline locus of a tuple: none, a single line, or every
/// line (tuples of scalar matrices).
#[derive(Debug, Clone, PartialEq)]
pub enum CommonLine<S: Scalar> {
    None,
    AllLines,
    Line(ProjLine<S>),
}

/// Is `line` an eigenline of every member of the tuple?
///
/// The incidence test is the cross product `det([Av, v])`, compared to zero
/// exactly on the exact backend and against `tol * ||A|| * ||v||^2` on the
/// float backend.
pub fn is_incident<S: Scalar>(t: &MatTuple<S>, line: &ProjLine<S>, tol: f64) -> bool {
    t.iter().all(|m| matrix_incident(m, line, tol))
}

fn matrix_incident<S: Scalar>(m: &Mat2<S>, line: &ProjLine<S>, tol: f64) -> bool {
    let v = line.rep();
    let mv = m.apply(&v);
    let cross = mv[0].mul(&v[1]).sub(&mv[1].mul(&v[0]));
    if S::EXACT {
        cross.is_zero()
    } else {
        let v_norm2 = v[0].abs().powi(2) + v[1].abs().powi(2);
        cross.abs() <= tol * m.norm() * v_norm2
    }
}

/// Find a line that is an eigenline of every member (float backend only).
///
/// Any common eigenline must be an eigenline of each individual member, so
/// it suffices to enumerate the (at most two) eigenlines of the first
/// non-scalar member and test them against the rest, in canonical line
/// order.  A tuple of scalar matrices fixes every line.
pub fn common_eigenline<S: Scalar>(
    t: &MatTuple<S>,
    tol: f64,
) -> Result<CommonLine<S>, Error> {
    if S::EXACT {
        return Err(Error::UnsupportedBackend);
    }
    let Some(pivot) = t.iter().find(|m| !m.is_scalar(tol)) else {
        return Ok(CommonLine::AllLines);
    };
    let candidates = match eigenlines(pivot, tol)? {
        EigenLines::AllLines => unreachable!("pivot is not scalar"),
        EigenLines::Lines(lines) => lines,
    };
    for line in candidates {
        if is_incident(t, &line, tol) {
            return Ok(CommonLine::Line(line));
        }
    }
    Ok(CommonLine::None)
}

/// Tag of the trichotomy: the generating tuples, the commuting tuples, and
/// the tuples sharing one eigenline without commuting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StratumTag {
    Generating,
    EigenShared,
    Commuting,
}

impl std::fmt::Display for StratumTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StratumTag::Generating => "GENERATING",
            StratumTag::EigenShared => "EIGEN_SHARED",
            StratumTag::Commuting => "COMMUTING",
        };
        f.write_str(s)
    }
}

/// Classification of a tuple with its witness: basis words when it
/// generates, the shared eigenline (float backend only) when it does not
/// commute.
#[derive(Debug, Clone)]
pub enum Stratum<S: Scalar> {
    Generating { span_words: Vec<Word> },
    EigenShared { line: Option<ProjLine<S>> },
    Commuting,
}

impl<S: Scalar> Stratum<S> {
    pub fn tag(&self) -> StratumTag {
        match self {
            Stratum::Generating { .. } => StratumTag::Generating,
            Stratum::EigenShared { .. } => StratumTag::EigenShared,
            Stratum::Commuting => StratumTag::Commuting,
        }
    }
}

/// Do all members commute pairwise?  Exact zero commutators on the exact
/// backend, `||[Ai, Aj]|| <= tol * ||Ai|| * ||Aj||` on the float backend.
pub fn all_commute<S: Scalar>(t: &MatTuple<S>, tol: f64) -> bool {
    let mats = t.mats();
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let comm = mats[i].commutator(&mats[j]);
            if S::EXACT {
                if !(comm.a.is_zero() && comm.b.is_zero() && comm.c.is_zero() && comm.d.is_zero())
                {
                    return false;
                }
            } else if comm.norm() > tol * mats[i].norm() * mats[j].norm() {
                return false;
            }
        }
    }
    true
}

/// Sort a tuple into the trichotomy.
///
/// The span closure decides generation; commutators decide the commuting
/// stratum; what remains shares a single eigenline, which is witnessed on
/// the float backend.  If the span says "does not generate" but no common
/// eigenline shows up even after widening the tolerance a hundredfold, the
/// two sub-tests contradict each other and the error is surfaced rather
/// than silently absorbed.
pub fn classify<S: Scalar>(t: &MatTuple<S>, tol: f64) -> Result<Stratum<S>, Error> {
    let closure = generates_by_span(t, tol);
    if closure.generates {
        return Ok(Stratum::Generating {
            span_words: closure.basis_words,
        });
    }
    if all_commute(t, tol) {
        return Ok(Stratum::Commuting);
    }
    if S::EXACT {
        // Non-generating and non-commuting leaves exactly the shared-line
        // stratum; the witness line itself needs float eigenline machinery.
        return Ok(Stratum::EigenShared { line: None });
    }
    for attempt_tol in [tol, tol * 100.0] {
        if let CommonLine::Line(line) = common_eigenline(t, attempt_tol)? {
            return Ok(Stratum::EigenShared { line: Some(line) });
        }
    }
    Err(Error::InconsistentClassification {
        span_dim: closure.span_dim,
        tol,
    })
}

/// The two sides of the closed-form generation criterion for pairs:
/// `(2 tr(A1 A2) - tr(A1) tr(A2))^2` and the product of the two
/// discriminants `(2 tr(Ai^2) - tr(Ai)^2)`.
pub fn friedland_sides<S: Scalar>(t: &MatTuple<S>) -> Result<(S, S), Error> {
    if t.r() != 2 {
        return Err(Error::WrongArity {
            expected: 2,
            got: t.r(),
        });
    }
    let (a1, a2) = (t.get(0), t.get(1));
    let two = S::from_int(2, 0);
    let t1 = a1.trace();
    let t2 = a2.trace();
    let x = a1.mul(a2).trace();
    let lhs_root = two.mul(&x).sub(&t1.mul(&t2));
    let lhs = lhs_root.mul(&lhs_root);
    let d1 = two.mul(&a1.mul(a1).trace()).sub(&t1.mul(&t1));
    let d2 = two.mul(&a2.mul(a2).trace()).sub(&t2.mul(&t2));
    Ok((lhs, d1.mul(&d2)))
}

/// Relative gap `|lhs - rhs| / (1 + |lhs| + |rhs|)` between the two sides
/// of the pair criterion; zero exactly on the degenerate locus.
pub fn friedland_gap<S: Scalar>(t: &MatTuple<S>) -> Result<f64, Error> {
    let (lhs, rhs) = friedland_sides(t)?;
    Ok(lhs.sub(&rhs).abs() / (1.0 + lhs.abs() + rhs.abs()))
}

/// Closed-form generation test for pairs: the two sides of
/// [`friedland_sides`] are unequal.  Exact comparison on the exact backend;
/// relative gap above `tol` on the float backend.
pub fn friedland_generates<S: Scalar>(t: &MatTuple<S>, tol: f64) -> Result<bool, Error> {
    let (lhs, rhs) = friedland_sides(t)?;
    if S::EXACT {
        Ok(lhs != rhs)
    } else {
        let gap = lhs.sub(&rhs).abs() / (1.0 + lhs.abs() + rhs.abs());
        Ok(gap > tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ExactScalar, FloatScalar};

    const TOL: f64 = 1e-9;

    fn fm(rows: [[f64; 2]; 2]) -> Mat2<FloatScalar> {
        Mat2::from_rows(rows.map(|r| r.map(|x| FloatScalar::new(x, 0.0))))
    }

    fn em(rows: [[i64; 2]; 2]) -> Mat2<ExactScalar> {
        Mat2::from_rows(rows.map(|r| r.map(|x| ExactScalar::from_int(x, 0))))
    }

    fn ft(mats: Vec<Mat2<FloatScalar>>) -> MatTuple<FloatScalar> {
        MatTuple::new(mats).unwrap()
    }

    fn et(mats: Vec<Mat2<ExactScalar>>) -> MatTuple<ExactScalar> {
        MatTuple::new(mats).unwrap()
    }

    fn diag_and_swap() -> MatTuple<FloatScalar> {
        ft(vec![fm([[1.0, 0.0], [0.0, -1.0]]), fm([[0.0, 1.0], [1.0, 0.0]])])
    }

    fn triangular_pair() -> MatTuple<FloatScalar> {
        ft(vec![fm([[1.0, 1.0], [0.0, 1.0]]), fm([[2.0, 0.0], [0.0, 1.0]])])
    }

    #[test]
    fn span_closure_examples() {
        let s = generates_by_span(&diag_and_swap(), TOL);
        assert!(s.generates);
        assert_eq!(s.span_dim, 4);
        assert_eq!(s.basis_words.len(), 4);
        assert!(s.basis_words.iter().all(|w| w.0.len() <= 3));

        let identity3 = ft(vec![Mat2::identity(); 3]);
        let s = generates_by_span(&identity3, TOL);
        assert!(!s.generates);
        assert_eq!(s.span_dim, 1);

        let s = generates_by_span(&triangular_pair(), TOL);
        assert!(!s.generates);
        assert_eq!(s.span_dim, 3);
    }

    #[test]
    fn span_closure_witness_words_reproduce_a_basis() {
        let t = diag_and_swap();
        let s = generates_by_span(&t, TOL);
        let vecs: Vec<[FloatScalar; 4]> = s
            .basis_words
            .iter()
            .map(|w| {
                w.0.iter()
                    .fold(Mat2::identity(), |acc, &i| acc.mul(t.get(i)))
                    .vec4()
            })
            .collect();
        assert_eq!(rank_of_span(&vecs, TOL), 4);
    }

    #[test]
    fn span_closure_on_exact_backend() {
        let t = et(vec![em([[1, 0], [0, -1]]), em([[0, 1], [1, 0]])]);
        let s = generates_by_span(&t, 0.0);
        assert!(s.generates);
        let tri = et(vec![em([[1, 1], [0, 1]]), em([[2, 0], [0, 1]])]);
        assert_eq!(generates_by_span(&tri, 0.0).span_dim, 3);
    }

    #[test]
    fn common_eigenline_cases() {
        let t = triangular_pair();
        match common_eigenline(&t, TOL).unwrap() {
            CommonLine::Line(l) => assert!(l.approx_same(&ProjLine::e1(), TOL)),
            other => panic!("expected the (1:0) line, got {other:?}"),
        }
        assert_eq!(
            common_eigenline(&diag_and_swap(), TOL).unwrap(),
            CommonLine::None
        );
        let scalars = ft(vec![
            Mat2::scalar(&FloatScalar::new(2.0, 0.0)),
            Mat2::scalar(&FloatScalar::new(0.0, 3.0)),
        ]);
        assert_eq!(
            common_eigenline(&scalars, TOL).unwrap(),
            CommonLine::AllLines
        );
        let exact = et(vec![em([[1, 1], [0, 1]]), em([[2, 0], [0, 1]])]);
        assert_eq!(
            common_eigenline(&exact, TOL).unwrap_err(),
            Error::UnsupportedBackend
        );
    }

    #[test]
    fn incidence_test() {
        let t = ft(vec![fm([[1.0, 1.0], [0.0, 2.0]])]);
        assert!(is_incident(&t, &ProjLine::e1(), TOL));
        assert!(!is_incident(&t, &ProjLine::e2(), TOL));
        let e = et(vec![em([[1, 1], [0, 2]])]);
        assert!(is_incident(&e, &ProjLine::e1(), 0.0));
        assert!(!is_incident(&e, &ProjLine::e2(), 0.0));
    }

    #[test]
    fn classify_the_three_strata() {
        assert_eq!(
            classify(&diag_and_swap(), TOL).unwrap().tag(),
            StratumTag::Generating
        );
        assert_eq!(
            classify(&triangular_pair(), TOL).unwrap().tag(),
            StratumTag::EigenShared
        );
        // Diagonal tuples commute.
        let diags = ft(vec![fm([[1.0, 0.0], [0.0, 2.0]]), fm([[3.0, 0.0], [0.0, 4.0]])]);
        assert_eq!(classify(&diags, TOL).unwrap().tag(), StratumTag::Commuting);
        // A nilpotent block next to the identity commutes.
        let nil = ft(vec![fm([[0.0, 1.0], [0.0, 0.0]]), Mat2::identity()]);
        assert_eq!(classify(&nil, TOL).unwrap().tag(), StratumTag::Commuting);
        // Nilpotent block against a non-scalar diagonal: shared line (1:0),
        // no commuting.
        let shared = ft(vec![fm([[0.0, 1.0], [0.0, 0.0]]), fm([[1.0, 0.0], [0.0, -1.0]])]);
        match classify(&shared, TOL).unwrap() {
            Stratum::EigenShared { line: Some(l) } => {
                assert!(l.approx_same(&ProjLine::e1(), TOL))
            }
            other => panic!("expected a witnessed shared line, got tag {:?}", other.tag()),
        }
        // Single-matrix tuples commute vacuously.
        let single = ft(vec![fm([[0.0, 1.0], [0.0, 0.0]])]);
        assert_eq!(classify(&single, TOL).unwrap().tag(), StratumTag::Commuting);
    }

    #[test]
    fn classify_exact_backend_omits_the_witness() {
        let shared = et(vec![em([[0, 1], [0, 0]]), em([[1, 0], [0, -1]])]);
        match classify(&shared, 0.0).unwrap() {
            Stratum::EigenShared { line } => assert!(line.is_none()),
            other => panic!("expected EIGEN_SHARED, got {:?}", other.tag()),
        }
        let gen = et(vec![em([[1, 0], [0, -1]]), em([[0, 1], [1, 0]])]);
        assert_eq!(classify(&gen, 0.0).unwrap().tag(), StratumTag::Generating);
    }

    #[test]
    fn pair_criterion_examples() {
        // Diagonal + swap: sides 0 and 16.
        let t = diag_and_swap();
        let (lhs, rhs) = friedland_sides(&t).unwrap();
        assert_eq!(lhs, FloatScalar::new(0.0, 0.0));
        assert_eq!(rhs, FloatScalar::new(16.0, 0.0));
        assert!(friedland_generates(&t, TOL).unwrap());

        // Two diagonal matrices: both sides 1.
        let d = ft(vec![fm([[1.0, 0.0], [0.0, 2.0]]), fm([[3.0, 0.0], [0.0, 4.0]])]);
        let (lhs, rhs) = friedland_sides(&d).unwrap();
        assert_eq!(lhs, rhs);
        assert!(!friedland_generates(&d, TOL).unwrap());

        // Unipotent + identity: both sides 0.
        let u = ft(vec![fm([[1.0, 1.0], [0.0, 1.0]]), Mat2::identity()]);
        let (lhs, rhs) = friedland_sides(&u).unwrap();
        assert!(lhs.is_zero() && rhs.is_zero());
        assert!(!friedland_generates(&u, TOL).unwrap());

        let triple = ft(vec![Mat2::identity(), Mat2::identity(), Mat2::identity()]);
        assert_eq!(
            friedland_generates(&triple, TOL).unwrap_err(),
            Error::WrongArity { expected: 2, got: 3 }
        );
    }

    #[test]
    fn pair_criterion_matches_span_on_exact_pairs() {
        // A small deterministic sweep of rational pairs.
        let mut cases = Vec::new();
        for p in -2i64..=2 {
            for q in -2i64..=2 {
                cases.push(et(vec![em([[p, q], [1, -p]]), em([[0, 1], [q, p]])]));
                cases.push(et(vec![em([[p, 0], [0, q]]), em([[p, 1], [0, q]])]));
            }
        }
        for t in &cases {
            let by_span = generates_by_span(t, 0.0).generates;
            let by_traces = friedland_generates(t, 0.0).unwrap();
            assert_eq!(by_span, by_traces, "disagreement on {t:?}");
        }
    }

    #[test]
    fn friedland_gap_is_zero_only_on_the_degenerate_locus() {
        assert!(friedland_gap(&diag_and_swap()).unwrap() > 0.1);
        assert_eq!(friedland_gap(&triangular_pair()).unwrap(), 0.0);
    }
}
