//! Rank and kernel computations behind the two backends.
//!
//! The float side runs a one-sided Jacobi SVD: columns are orthogonalized by
//! complex plane rotations until all pairwise inner products vanish to
//! working precision, after which the column norms are the singular values.
//! Jacobi is slower than bidiagonalization but computes small singular
//! values to high relative accuracy, which is exactly what rank gaps need.
//! The exact side is plain Gaussian elimination over the Gaussian
//! rationals — error-free, so no tolerance enters.

use crate::scalar::{FloatScalar, Scalar};

/// Dense column-major complex matrix in one flat allocation.
#[derive(Debug, Clone)]
pub(crate) struct ColMat {
    pub m: usize,
    pub n: usize,
    data: Vec<FloatScalar>,
}

impl ColMat {
    pub fn from_columns<I, C>(m: usize, cols: I) -> ColMat
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = FloatScalar>,
    {
        let mut data = Vec::new();
        let mut n = 0;
        for col in cols {
            let before = data.len();
            data.extend(col);
            assert_eq!(data.len() - before, m, "ragged column");
            n += 1;
        }
        ColMat { m, n, data }
    }

    pub fn identity(n: usize) -> ColMat {
        let mut data = vec![FloatScalar::new(0.0, 0.0); n * n];
        for j in 0..n {
            data[j * n + j] = FloatScalar::new(1.0, 0.0);
        }
        ColMat { m: n, n, data }
    }

    pub fn col(&self, j: usize) -> &[FloatScalar] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    /// Disjoint mutable views of columns `p < q`.
    fn col_pair_mut(&mut self, p: usize, q: usize) -> (&mut [FloatScalar], &mut [FloatScalar]) {
        debug_assert!(p < q);
        let (head, tail) = self.data.split_at_mut(q * self.m);
        (
            &mut head[p * self.m..(p + 1) * self.m],
            &mut tail[..self.m],
        )
    }

    fn col_norm(&self, j: usize) -> f64 {
        self.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// One-sided Jacobi: orthogonalize the columns of `a` in place, mirroring
/// every rotation into `v` when present.  On return the columns of `a` are
/// pairwise orthogonal to working precision.
fn jacobi_sweeps(a: &mut ColMat, mut v: Option<&mut ColMat>) {
    const EPS: f64 = 1e-15;
    const MAX_SWEEPS: usize = 60;
    let n = a.n;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                // One pass computes ||p||^2, ||q||^2 and <p, q>.
                let (mut app, mut aqq) = (0.0, 0.0);
                let mut apq = FloatScalar::new(0.0, 0.0);
                for k in 0..a.m {
                    let (x, y) = (a.col(p)[k], a.col(q)[k]);
                    app += x.norm_sqr();
                    aqq += y.norm_sqr();
                    apq += x.conj() * y;
                }
                let off = apq.norm();
                if off <= EPS * (app * aqq).sqrt() || off == 0.0 {
                    continue;
                }
                rotated = true;
                // Phase factor aligning <p, q> with the real axis, then the
                // classical real rotation annihilating the cross term.
                let u = apq / off;
                let tau = (aqq - app) / (2.0 * off);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ubar = u.conj();
                let (cp, cq) = a.col_pair_mut(p, q);
                for k in 0..cp.len() {
                    let (x, y) = (cp[k], cq[k]);
                    cp[k] = x * c - y * (ubar * s);
                    cq[k] = x * s + y * (ubar * c);
                }
                if let Some(vmat) = v.as_deref_mut() {
                    let (vp, vq) = vmat.col_pair_mut(p, q);
                    for k in 0..vp.len() {
                        let (x, y) = (vp[k], vq[k]);
                        vp[k] = x * c - y * (ubar * s);
                        vq[k] = x * s + y * (ubar * c);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Singular values in descending order.
pub(crate) fn singular_values(mut a: ColMat) -> Vec<f64> {
    jacobi_sweeps(&mut a, None);
    let mut svals: Vec<f64> = (0..a.n).map(|j| a.col_norm(j)).collect();
    svals.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    svals
}

/// Singular values (descending) together with the matching right singular
/// vectors as columns.
pub(crate) fn singular_values_and_right(mut a: ColMat) -> (Vec<f64>, ColMat) {
    let mut v = ColMat::identity(a.n);
    jacobi_sweeps(&mut a, Some(&mut v));
    let mut order: Vec<usize> = (0..a.n).collect();
    let norms: Vec<f64> = (0..a.n).map(|j| a.col_norm(j)).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).expect("finite"));
    let svals = order.iter().map(|&j| norms[j]).collect();
    let vperm = ColMat::from_columns(v.m, order.iter().map(|&j| v.col(j).to_vec()));
    (svals, vperm)
}

/// Numerical rank from a descending singular value list: the count above
/// `tol` times the largest.  A zero (or empty) spectrum has rank 0.
pub(crate) fn rank_from_singular_values(svals: &[f64], tol: f64) -> usize {
    let top = svals.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    svals.iter().take_while(|&&s| s > tol * top).count()
}

/// Row-echelon rank over an exact field; tolerance-free.
fn exact_rank<S: Scalar>(vectors: &[[S; 4]]) -> usize {
    let mut rows: Vec<[S; 4]> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..4 {
        let Some(offset) = rows[rank..].iter().position(|r| !r[col].is_zero()) else {
            continue;
        };
        rows.swap(rank, rank + offset);
        let (pivoted, below) = rows.split_at_mut(rank + 1);
        let pivot_row = &pivoted[rank];
        for row in below.iter_mut() {
            if !row[col].is_zero() {
                let f = row[col].div(&pivot_row[col]);
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = x.sub(&f.mul(p));
                }
            }
        }
        rank += 1;
        if rank == rows.len() || rank == 4 {
            break;
        }
    }
    rank
}

/// Dimension of the span of vectors in C^4.
///
/// Float backend: singular values of the 4 x n matrix, counting those above
/// `tol` times the largest.  Exact backend: elimination rank, `tol` unused.
pub fn rank_of_span<S: Scalar>(vectors: &[[S; 4]], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    if S::EXACT {
        exact_rank(vectors)
    } else {
        let a = ColMat::from_columns(
            4,
            vectors.iter().map(|v| v.iter().map(Scalar::to_c64)),
        );
        rank_from_singular_values(&singular_values(a), tol)
    }
}

/// Basis of the right kernel of an `m x 4` system, one `[S; 4]` per basis
/// vector.
///
/// Float backend: right singular vectors whose singular values fall at or
/// below `tol` times the largest (an orthonormal basis).  Exact backend:
/// reduced row echelon form and free-column back-substitution.
pub fn nullspace4<S: Scalar>(rows: &[[S; 4]], tol: f64) -> Vec<[S; 4]> {
    if S::EXACT {
        exact_nullspace4(rows)
    } else {
        let m = rows.len().max(1);
        // Columns of the system matrix; an all-zero system still needs its
        // full kernel, which the SVD path handles via a zero top value.
        let a = ColMat::from_columns(
            m,
            (0..4).map(|j| {
                (0..m).map(move |i| {
                    rows.get(i).map_or(FloatScalar::new(0.0, 0.0), |r| r[j].to_c64())
                })
            }),
        );
        let (svals, v) = singular_values_and_right(a);
        let rank = rank_from_singular_values(&svals, tol);
        (rank..4)
            .map(|j| {
                let col = v.col(j);
                [
                    S::from_c64(col[0]),
                    S::from_c64(col[1]),
                    S::from_c64(col[2]),
                    S::from_c64(col[3]),
                ]
            })
            .collect()
    }
}

fn exact_nullspace4<S: Scalar>(rows: &[[S; 4]]) -> Vec<[S; 4]> {
    // Reduced row echelon form with recorded pivot columns.
    let mut rref: Vec<[S; 4]> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut rank = 0;
    for col in 0..4 {
        let Some(offset) = rref[rank..].iter().position(|r| !r[col].is_zero()) else {
            continue;
        };
        rref.swap(rank, rank + offset);
        let pivot = rref[rank][col].clone();
        for x in rref[rank].iter_mut() {
            *x = x.div(&pivot);
        }
        let pivot_row = rref[rank].clone();
        for (j, row) in rref.iter_mut().enumerate() {
            if j != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = x.sub(&f.mul(p));
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
        if rank == rref.len() || rank == 4 {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    (0..4)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = [S::zero(), S::zero(), S::zero(), S::zero()];
            v[free] = S::one();
            for &(pr, pc) in &pivots {
                v[pc] = rref[pr][free].neg();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar;

    fn c(re: f64, im: f64) -> FloatScalar {
        FloatScalar::new(re, im)
    }

    fn e(re: i64, im: i64) -> ExactScalar {
        ExactScalar::from_int(re, im)
    }

    #[test]
    fn singular_values_of_diagonal_design() {
        // Columns 3*e1, 2*e2 in C^4: singular values exactly {3, 2}.
        let a = ColMat::from_columns(
            4,
            [
                vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0)],
            ],
        );
        let s = singular_values(a);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn frobenius_norm_is_preserved() {
        let cols = [
            vec![c(1.0, 2.0), c(-0.5, 0.25), c(3.0, 0.0), c(0.0, 1.0)],
            vec![c(2.0, 0.0), c(1.0, 1.0), c(-1.0, 2.0), c(0.5, 0.0)],
            vec![c(0.0, -1.0), c(2.0, 2.0), c(1.0, 0.0), c(1.0, 1.0)],
        ];
        let frob2: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
        let s = singular_values(ColMat::from_columns(4, cols));
        let sum2: f64 = s.iter().map(|x| x * x).sum();
        assert!((frob2 - sum2).abs() <= 1e-12 * frob2);
    }

    #[test]
    fn pauli_basis_spans_everything() {
        // I, X, Y, Z flattened row-major span all of C^4.
        let fl: Vec<[FloatScalar; 4]> = vec![
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ];
        assert_eq!(rank_of_span(&fl, 1e-9), 4);
        let ex: Vec<[ExactScalar; 4]> = vec![
            [e(1, 0), e(0, 0), e(0, 0), e(1, 0)],
            [e(0, 0), e(1, 0), e(1, 0), e(0, 0)],
            [e(0, 0), e(0, -1), e(0, 1), e(0, 0)],
            [e(1, 0), e(0, 0), e(0, 0), e(-1, 0)],
        ];
        assert_eq!(rank_of_span(&ex, 0.0), 4);
    }

    #[test]
    fn dependent_vectors_collapse_rank() {
        let v1 = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let v2 = [c(0.0, 1.0), c(0.0, 2.0), c(0.0, 0.0), c(0.0, 1.0)]; // i * v1
        let v3 = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(rank_of_span(&[v1, v2, v3], 1e-9), 2);
        assert_eq!(rank_of_span::<FloatScalar>(&[], 1e-9), 0);
        let z = [c(0.0, 0.0); 4];
        assert_eq!(rank_of_span(&[z], 1e-9), 0);
    }

    #[test]
    fn exact_rank_agrees_with_float_on_rational_data() {
        let exact: Vec<[ExactScalar; 4]> = vec![
            [e(1, 0), e(2, 1), e(3, 0), e(4, 0)],
            [e(2, 0), e(4, 2), e(6, 0), e(8, 0)], // 2 * row 0
            [e(0, 1), e(1, 0), e(0, 0), e(1, 1)],
        ];
        let float: Vec<[FloatScalar; 4]> = exact
            .iter()
            .map(|row| std::array::from_fn(|k| row[k].to_c64()))
            .collect();
        assert_eq!(rank_of_span(&exact, 0.0), 2);
        assert_eq!(rank_of_span(&float, 1e-9), 2);
    }

    #[test]
    fn float_nullspace_is_orthonormal_and_annihilated() {
        // Rows e1, e2: kernel is span{e3, e4}.
        let rows = [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ];
        let basis = nullspace4(&rows, 1e-9);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
            for row in &rows {
                let dot: FloatScalar = row.iter().zip(v).map(|(r, x)| r * x).sum();
                assert!(dot.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_nullspace_solves_the_system() {
        let rows: Vec<[ExactScalar; 4]> = vec![
            [e(1, 0), e(2, 0), e(3, 0), e(4, 0)],
            [e(2, 0), e(4, 0), e(6, 0), e(8, 0)],
        ];
        let basis = nullspace4(&rows, 0.0);
        assert_eq!(basis.len(), 3);
        for v in &basis {
            for row in &rows {
                let mut dot = ExactScalar::from_int(0, 0);
                for k in 0..4 {
                    dot = dot.add(&row[k].mul(&v[k]));
                }
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn rank_rule_edge_cases() {
        assert_eq!(rank_from_singular_values(&[], 1e-9), 0);
        assert_eq!(rank_from_singular_values(&[0.0, 0.0], 1e-9), 0);
        assert_eq!(rank_from_singular_values(&[1.0, 1e-3, 1e-12], 1e-9), 2);
    }
}
