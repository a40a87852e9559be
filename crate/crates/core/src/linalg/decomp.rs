//! Spectral machinery: Hermitian eigendecomposition, SVD, the Moore-Penrose
//! inverse, operator absolute value and fractional powers of positive
//! semidefinite matrices.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian before factorizing.
pub const HERMITIAN_RTOL: f64 = 1e-12;

/// Eigenvalues in `[-PSD_RTOL * (1 + lambda_max), 0]` count as zero.
pub const PSD_RTOL: f64 = 1e-10;

/// Eigendecomposition `H = Q diag(eigenvalues) Q*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: Matrix,
}

impl HermEigen {
    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|x| x)
    }

    /// `Q diag(f(lambda_i)) Q*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let q = self.eigenvectors.as_dmatrix();
        let mut scaled = q.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).scale_mut(w);
        }
        Matrix::wrap(scaled * q.adjoint())
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Thin singular value decomposition `A = U diag(sigma) V*`.
///
/// `left` is `m x k` and `right` is `n x k` with `k = min(m, n)`; both have
/// orthonormal columns (unitary when `A` is square).
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: Matrix,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub right: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.left.as_dmatrix().clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        Matrix::wrap(us * self.right.as_dmatrix().adjoint())
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

pub fn conj_transpose(a: &Matrix) -> Matrix {
    a.adjoint()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H*) / 2` first; inputs further than
/// `1e-12 (1 + max|h_ij|)` from Hermitian are rejected.
pub fn herm_eig(h: &Matrix) -> Result<HermEigen> {
    h.check_square()?;
    let deviation = h.max_abs_diff(&h.adjoint());
    if deviation > HERMITIAN_RTOL * (1.0 + h.max_abs()) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(herm_eig_unchecked(&h.hermitian_part()))
}

fn herm_eig_unchecked(h: &Matrix) -> HermEigen {
    let eig = SymmetricEigen::new(h.as_dmatrix().clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let n = order.len();
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermEigen { eigenvalues, eigenvectors: Matrix::wrap(vectors) }
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations.
pub fn svd(a: &Matrix) -> SvdResult {
    let d = a.as_dmatrix();
    if d.nrows() < d.ncols() {
        let t = svd(&Matrix::wrap(d.adjoint()));
        return SvdResult { left: t.right, singular_values: t.singular_values, right: t.left };
    }
    let (g, v) = hestenes(d.clone());
    let n = g.ncols();
    let norms: Vec<f64> = (0..n).map(|j| g.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut left = DMatrix::zeros(g.nrows(), n);
    let mut filled = 0;
    for &j in &order {
        if norms[j] > 0.0 {
            let col = g.column(j) / Complex64::new(norms[j], 0.0);
            if push_orthonormal(&mut left, filled, col) {
                filled += 1;
                continue;
            }
        }
        break;
    }
    let mut e = 0;
    while filled < n {
        let mut col = DVector::zeros(g.nrows());
        col[e] = Complex64::new(1.0, 0.0);
        e += 1;
        if push_orthonormal(&mut left, filled, col) {
            filled += 1;
        }
    }
    let right = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SvdResult {
        left: Matrix::wrap(left),
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        right: Matrix::wrap(right),
    }
}

/// Orthogonalizes the columns of `g` in place; returns `(G V, V)`.
fn hestenes(mut g: DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = g.ncols();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                let mag = gamma.norm();
                if mag == 0.0 || mag <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / mag;
                let zeta = (beta - alpha) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut g, &mut v] {
                    for r in 0..m.nrows() {
                        let x = m[(r, p)];
                        let y = m[(r, q)] * phase;
                        m[(r, p)] = x * c - y * s;
                        m[(r, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (g, v)
}

/// Appends `col` as column `k` after two Gram-Schmidt passes against the
/// first `k` columns. Fails if little of `col` survives.
fn push_orthonormal(q: &mut DMatrix<Complex64>, k: usize, mut col: DVector<Complex64>) -> bool {
    let start = col.norm();
    for _ in 0..2 {
        for j in 0..k {
            let c = q.column(j).dotc(&col);
            col -= q.column(j) * c;
        }
    }
    let norm = col.norm();
    if norm <= 0.5 * start {
        return false;
    }
    q.set_column(k, &(col / Complex64::new(norm, 0.0)));
    true
}

/// Default relative rank cutoff for [`pinv`]: `max(m, n) * eps`.
pub fn default_rank_rtol(a: &Matrix) -> f64 {
    a.rows().max(a.cols()) as f64 * f64::EPSILON
}

/// Moore-Penrose inverse via the SVD.
///
/// Singular values `sigma_i <= rank_rtol * sigma_max` are treated as zero;
/// `None` selects [`default_rank_rtol`]. The zero matrix maps to the zero
/// matrix of transposed shape.
pub fn pinv(a: &Matrix, rank_rtol: Option<f64>) -> Matrix {
    let rtol = rank_rtol.unwrap_or_else(|| default_rank_rtol(a));
    let dec = svd(a);
    let cutoff = rtol * dec.sigma_max();
    let mut v = dec.right.as_dmatrix().clone();
    for (j, &s) in dec.singular_values.iter().enumerate() {
        let w = if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 };
        v.column_mut(j).scale_mut(w);
    }
    Matrix::wrap(v * dec.left.as_dmatrix().adjoint())
}

/// Numerical rank under the same cutoff as [`pinv`].
pub fn rank(a: &Matrix, rank_rtol: Option<f64>) -> usize {
    let rtol = rank_rtol.unwrap_or_else(|| default_rank_rtol(a));
    let dec = svd(a);
    let cutoff = rtol * dec.sigma_max();
    dec.singular_values.iter().filter(|&&s| s > cutoff && s > 0.0).count()
}

/// `|A| = (A* A)^{1/2}`.
pub fn abs_op(a: &Matrix) -> Matrix {
    psd_power(&(&a.adjoint() * a), 0.5).expect("A*A is positive semidefinite")
}

/// `H^p` for Hermitian positive semidefinite `H` and real `p >= 0`.
///
/// Eigenvalues at or below `1e-10 * lambda_max` are treated as exact zeros;
/// anything below `-1e-10 (1 + lambda_max)` is a genuine negative eigenvalue
/// and is rejected. `p = 0` yields the projection onto the support of `H`.
pub fn psd_power(h: &Matrix, p: f64) -> Result<Matrix> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidParameter(format!("power must be finite and >= 0, got {p}")));
    }
    let eig = herm_eig(h)?;
    let lambda_max = eig.max().max(0.0);
    if eig.min() < -PSD_RTOL * (1.0 + lambda_max) {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    let zero_cut = PSD_RTOL * lambda_max;
    let out = eig
        .reconstruct_with(|lambda| {
            if lambda <= zero_cut {
                0.0
            } else if p == 0.0 {
                1.0
            } else {
                lambda.powf(p)
            }
        })
        .hermitian_part();
    out.check_finite("fractional matrix power")
}

/// Positivity test: `H` is Hermitian within `tol (1 + max|h_ij|)` and its
/// Hermitian part has `lambda_min >= -tol (1 + lambda_max)`.
pub fn is_positive(h: &Matrix, tol: f64) -> Result<bool> {
    h.check_square()?;
    if h.max_abs_diff(&h.adjoint()) > tol * (1.0 + h.max_abs()) {
        return Ok(false);
    }
    let eig = herm_eig_unchecked(&h.hermitian_part());
    Ok(eig.min() >= -tol * (1.0 + eig.max().max(0.0)))
}

/// Assembles the block operator `[[a1, a3*], [a3, a2]]`.
pub fn block2(a1: &Matrix, a3: &Matrix, a2: &Matrix) -> Result<Matrix> {
    let n = a1.check_square()?;
    let n2 = a2.check_square()?;
    if n2 != n || a3.rows() != n || a3.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "block2 expects n x n blocks, got {}x{}, {}x{}, {}x{}",
            a1.rows(),
            a1.cols(),
            a3.rows(),
            a3.cols(),
            a2.rows(),
            a2.cols()
        )));
    }
    let a3_adj = a3.adjoint();
    let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, true) => a1.get(r, c),
        (true, false) => a3_adj.get(r, c - n),
        (false, true) => a3.get(r - n, c),
        (false, false) => a2.get(r - n, c - n),
    });
    Ok(Matrix::wrap(m))
}

/// Orthogonal projections `(A A†, A† A)` onto `range(A)` and `range(A*)`.
pub fn range_projections(a: &Matrix) -> (Matrix, Matrix) {
    let mp = moore_penrose(a, None);
    (mp.range, mp.corange)
}

/// `A†` together with `A A†` and `A† A`, all read off one SVD.
#[derive(Clone, Debug)]
pub struct MoorePenrose {
    pub pinv: Matrix,
    /// `A A†`, built as `U_k U_k*`.
    pub range: Matrix,
    /// `A† A`, built as `V_k V_k*`.
    pub corange: Matrix,
    pub rank: usize,
}

/// Like [`pinv`], but the projections are assembled from the retained
/// singular vectors, so they are Hermitian and idempotent to rounding.
pub fn moore_penrose(a: &Matrix, rank_rtol: Option<f64>) -> MoorePenrose {
    let rtol = rank_rtol.unwrap_or_else(|| default_rank_rtol(a));
    let dec = svd(a);
    let cutoff = rtol * dec.sigma_max();
    let k = dec.singular_values.iter().take_while(|&&s| s > cutoff && s > 0.0).count();
    if k == 0 {
        return MoorePenrose {
            pinv: Matrix::zeros(a.cols(), a.rows()),
            range: Matrix::zeros(a.rows(), a.rows()),
            corange: Matrix::zeros(a.cols(), a.cols()),
            rank: 0,
        };
    }
    let l = dec.left.as_dmatrix().columns(0, k).into_owned();
    let r = dec.right.as_dmatrix().columns(0, k).into_owned();
    let mut scaled = r.clone();
    for (j, &s) in dec.singular_values[..k].iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    MoorePenrose {
        pinv: Matrix::wrap(scaled * l.adjoint()),
        range: Matrix::wrap(&l * l.adjoint()).hermitian_part(),
        corange: Matrix::wrap(&r * r.adjoint()).hermitian_part(),
        rank: k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> Matrix {
        Matrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn herm_eig_small_cases() {
        let e = herm_eig(&Matrix::from_diagonal(&[2.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0]);

        let e = herm_eig(&real(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert!((e.eigenvalues[0] - 0.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn herm_eig_rejects_bad_input() {
        assert!(matches!(herm_eig(&real(&[&[1.0, 2.0, 3.0]])), Err(Error::NotSquare { .. })));
        assert!(matches!(herm_eig(&real(&[&[0.0, 1.0], &[0.0, 0.0]])), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn svd_rank_one() {
        let s = svd(&real(&[&[1.0, 1.0], &[0.0, 0.0]]));
        assert!((s.singular_values[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(s.singular_values[1].abs() < 1e-14);
        let s = svd(&Matrix::identity(4));
        assert!(s.singular_values.iter().all(|&x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn pinv_of_zero_has_transposed_shape() {
        let z = Matrix::zeros(2, 3);
        let p = pinv(&z, None);
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert!(p.is_zero());
    }

    #[test]
    fn abs_op_examples() {
        let a = real(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let h = 0.5f64.sqrt();
        let expected = real(&[&[h, h], &[h, h]]);
        assert!(abs_op(&a).max_abs_diff(&expected) < 1e-14);

        let d = Matrix::from_diagonal(&[2.0, -1.0]);
        assert!(abs_op(&d).max_abs_diff(&Matrix::from_diagonal(&[2.0, 1.0])) < 1e-14);

        let star = abs_op(&a.adjoint());
        assert!(star.max_abs_diff(&Matrix::from_diagonal(&[2f64.sqrt(), 0.0])) < 1e-14);
    }

    #[test]
    fn psd_power_examples() {
        let p = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        for exp in [0.0, 0.3, 1.0, 2.5] {
            assert!(psd_power(&p, exp).unwrap().max_abs_diff(&p) < 1e-14, "p = {exp}");
        }
        let root = psd_power(&Matrix::from_diagonal(&[4.0, 1.0]), 0.5).unwrap();
        assert!(root.max_abs_diff(&Matrix::from_diagonal(&[2.0, 1.0])) < 1e-14);

        let ones = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let sq = psd_power(&ones, 2.0).unwrap();
        assert!(sq.max_abs_diff(&(&ones * &ones)) < 1e-13);
    }

    #[test]
    fn psd_power_errors() {
        let neg = Matrix::from_diagonal(&[1.0, -0.5]);
        assert!(matches!(psd_power(&neg, 0.5), Err(Error::NotPositive { .. })));
        assert!(matches!(psd_power(&Matrix::identity(2), -1.0), Err(Error::InvalidParameter(_))));
        // Rounding-level negative eigenvalues are clamped.
        let tiny = Matrix::from_diagonal(&[1.0, -1e-13]);
        assert!(psd_power(&tiny, 0.5).is_ok());
    }

    #[test]
    fn positivity_examples() {
        assert!(is_positive(&real(&[&[2.0, 1.0], &[1.0, 1.0]]), 1e-12).unwrap());
        assert!(!is_positive(&real(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-12).unwrap());
        assert!(is_positive(&real(&[&[1.0, 2.0, 3.0]]), 1e-12).is_err());
    }

    #[test]
    fn block2_shapes() {
        let i = Matrix::identity(2);
        let b = block2(&i, &i, &i).unwrap();
        assert_eq!(b.rows(), 4);
        assert!(is_positive(&b, 1e-12).unwrap());
        let z = Matrix::zeros(3, 3);
        assert!(block2(&z, &z, &z).unwrap().is_zero());
        assert!(matches!(block2(&i, &Matrix::zeros(2, 3), &i), Err(Error::DimensionMismatch(_))));
    }
}
