#![allow(dead_code)]

use berezin_lab::harness::random_operator;
use berezin_lab::linalg::Matrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(rows: &[&[f64]]) -> Matrix {
    Matrix::from_real_rows(rows).unwrap()
}

/// `m x n` complex Gaussian product of exact rank `rank`.
pub fn rect(m: usize, n: usize, rank: usize, seed: u64) -> Matrix {
    if rank == 0 {
        return Matrix::zeros(m, n);
    }
    let k = m.max(n);
    let g = random_operator(k, k, seed).unwrap();
    let h = random_operator(k, k, seed ^ 0x9e37_79b9_7f4a_7c15).unwrap();
    let x = DMatrix::from_fn(m, rank, |i, j| g.get(i, j));
    let y = DMatrix::from_fn(rank, n, |i, j| h.get(i, j));
    Matrix::from_dmatrix(x * y).unwrap()
}

pub fn psd(n: usize, rank: usize, seed: u64) -> Matrix {
    let g = rect(n, n, rank, seed);
    (&g * &g.adjoint()).hermitian_part()
}

pub fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    a.rows() == b.rows() && a.cols() == b.cols() && a.max_abs_diff(b) <= tol
}
