mod common;

use berezin_lab::linalg::*;
use common::{c, close, psd, real, rect};
use proptest::prelude::*;

fn hermitian(n: usize, seed: u64) -> Matrix {
    let g = rect(n, n, n, seed);
    (&g + &g.adjoint()).scale_re(0.5)
}

/// Roots of the characteristic polynomial of a Hermitian 2x2 or 3x3 matrix.
fn char_poly_roots(h: &Matrix) -> Vec<f64> {
    let e = |i, j| h.get(i, j);
    let mut roots = match h.rows() {
        1 => vec![e(0, 0).re],
        2 => {
            let tr = (e(0, 0) + e(1, 1)).re;
            let det = (e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0)).re;
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            vec![(tr - disc) / 2.0, (tr + disc) / 2.0]
        }
        3 => {
            let tr = (e(0, 0) + e(1, 1) + e(2, 2)).re;
            let minor = |i: usize, j: usize| (e(i, i) * e(j, j) - e(i, j) * e(j, i)).re;
            let m2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
            let det = (e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0)))
            .re;
            // x^3 - tr x^2 + m2 x - det, depressed by x = t + tr/3.
            let shift = tr / 3.0;
            let p = m2 - tr * tr / 3.0;
            let q = -2.0 * tr.powi(3) / 27.0 + tr * m2 / 3.0 - det;
            if p.abs() < 1e-300 {
                vec![shift; 3]
            } else {
                let r = 2.0 * (-p / 3.0).sqrt();
                let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
                let theta = arg.acos() / 3.0;
                (0..3).map(|k| shift + r * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos()).collect()
            }
        }
        _ => unreachable!(),
    };
    roots.sort_by(f64::total_cmp);
    roots
}

fn penrose_residual(a: &Matrix, p: &Matrix) -> f64 {
    let ap = a * p;
    let pa = p * a;
    [
        (&ap * a).max_abs_diff(a),
        (&pa * p).max_abs_diff(p),
        ap.max_abs_diff(&ap.adjoint()),
        pa.max_abs_diff(&pa.adjoint()),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[test]
fn conj_transpose_definition() {
    let a = Matrix::from_rows(&[[c(0.0, 1.0), c(0.0, 0.0)], [c(1.0, 0.0), c(2.0, 0.0)]]).unwrap();
    let expected = Matrix::from_rows(&[[c(0.0, -1.0), c(1.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]]).unwrap();
    assert_eq!(conj_transpose(&a), expected);
    assert_eq!(conj_transpose(&conj_transpose(&a)), a);
    assert_eq!(conj_transpose(&Matrix::identity(3)), Matrix::identity(3));
}

#[test]
fn herm_eig_matches_characteristic_polynomial() {
    for seed in 0..200 {
        let n = 1 + (seed % 3) as usize;
        let h = hermitian(n, seed);
        let eig = herm_eig(&h).unwrap();
        let roots = char_poly_roots(&h);
        for (x, y) in eig.eigenvalues.iter().zip(&roots) {
            assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "seed {seed}: {:?} vs {roots:?}", eig.eigenvalues);
        }
    }
}

#[test]
fn herm_eig_reconstructs_random_5x5() {
    let h = hermitian(5, 11);
    let eig = herm_eig(&h).unwrap();
    let scale = 1.0 + eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(eig.reconstruct().max_abs_diff(&h) < 1e-10 * scale);
    let q = &eig.eigenvectors;
    assert!(close(&(&q.adjoint() * q), &Matrix::identity(5), 1e-10));
    assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn herm_eig_symmetrizes_rounding_noise() {
    let mut h = hermitian(3, 5).into_dmatrix();
    h[(0, 1)] += c(1e-15, 0.0);
    assert!(herm_eig(&Matrix::from_dmatrix(h).unwrap()).is_ok());
}

#[test]
fn svd_squares_match_gram_eigenvalues() {
    let a = rect(4, 3, 3, 21);
    let s = svd(&a);
    assert_eq!(s.singular_values.len(), 3);
    let gram = herm_eig(&(&a.adjoint() * &a).hermitian_part()).unwrap();
    for (sigma, lambda) in s.singular_values.iter().rev().zip(&gram.eigenvalues) {
        assert!((sigma * sigma - lambda).abs() < 1e-10 * (1.0 + lambda));
    }
}

#[test]
fn rank_one_pinv_examples() {
    let a = real(&[&[0.5, 0.5], &[0.0, 0.0]]);
    let p = pinv(&a, None);
    assert!(close(&p, &real(&[&[1.0, 0.0], &[1.0, 0.0]]), 1e-12));
    assert!(penrose_residual(&a, &p) < 1e-12);

    let a = real(&[&[0.5, 0.0], &[0.5, 0.0]]);
    let p = pinv(&a, None);
    assert!(close(&p, &real(&[&[1.0, 1.0], &[0.0, 0.0]]), 1e-12));
    assert!(penrose_residual(&a, &p) < 1e-12);
}

#[test]
fn rank_one_pinv_matches_outer_product_formula() {
    for seed in 0..50 {
        let g = rect(5, 5, 5, seed);
        let x = Matrix::from_dmatrix(g.as_dmatrix().columns(0, 1).into_owned()).unwrap();
        let y = Matrix::from_dmatrix(g.as_dmatrix().columns(1, 1).into_owned()).unwrap();
        let a = &x * &y.adjoint();
        let scale = x.as_dmatrix().norm_squared() * y.as_dmatrix().norm_squared();
        let expected = (&y * &x.adjoint()).scale_re(1.0 / scale);
        assert!(close(&pinv(&a, None), &expected, 1e-10 * (1.0 + expected.max_abs())));
    }
}

#[test]
fn invertible_pinv_is_inverse() {
    let a = rect(4, 4, 4, 8);
    let inv = a.as_dmatrix().clone().try_inverse().unwrap();
    assert!(pinv(&a, None).max_abs_diff(&Matrix::from_dmatrix(inv).unwrap()) < 1e-10);
}

#[test]
fn moore_penrose_bundle_is_consistent() {
    let a = rect(5, 4, 2, 3);
    let mp = moore_penrose(&a, Some(1e-10));
    assert_eq!(mp.rank, 2);
    assert!(close(&mp.range, &(&a * &mp.pinv), 1e-10));
    assert!(close(&mp.corange, &(&mp.pinv * &a), 1e-10));
    let (v, u) = range_projections(&a);
    assert!(close(&v, &mp.range, 1e-10) && close(&u, &mp.corange, 1e-10));
}

#[test]
fn abs_op_examples() {
    let a = real(&[&[1.0, 1.0], &[0.0, 0.0]]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = abs_op(&a);
    assert!(close(&m, &real(&[&[h, h], &[h, h]]), 1e-12));
    assert!(close(&(&m * &m), &(&a.adjoint() * &a), 1e-12));
    assert!(close(&abs_op(&a.adjoint()), &Matrix::from_diagonal(&[2f64.sqrt(), 0.0]), 1e-12));
    assert!(close(&abs_op(&Matrix::from_diagonal(&[2.0, -1.0])), &Matrix::from_diagonal(&[2.0, 1.0]), 1e-12));
}

#[test]
fn psd_power_by_multiplication() {
    let j = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
    assert!(close(&psd_power(&j, 2.0).unwrap(), &(&j * &j), 1e-12));
    assert!(close(
        &psd_power(&Matrix::from_diagonal(&[4.0, 1.0]), 0.5).unwrap(),
        &Matrix::from_diagonal(&[2.0, 1.0]),
        1e-12
    ));
}

#[test]
fn positivity_of_moore_penrose_blocks() {
    for seed in 0..50 {
        let n = 2 + (seed % 4) as usize;
        let a = rect(n, n, 1 + (seed % n as u64) as usize, seed);
        let mp = moore_penrose(&a, Some(1e-10));
        let aa = &a * &a.adjoint();
        let block = block2(&mp.corange, &a, &aa).unwrap();
        assert!(is_positive(&block, 1e-9).unwrap(), "seed {seed}");
        let ata = &a.adjoint() * &a;
        let block = block2(&ata, &a, &mp.range).unwrap();
        assert!(is_positive(&block, 1e-9).unwrap(), "seed {seed}");
    }
}

#[test]
fn block2_examples() {
    let i = Matrix::identity(2);
    let b = block2(&i, &i, &i).unwrap();
    assert!(close(
        &b,
        &real(&[&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0], &[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0]]),
        0.0
    ));
    assert!(is_positive(&b, 1e-12).unwrap());
    let z = Matrix::zeros(3, 3);
    assert!(block2(&z, &z, &z).unwrap().is_zero());
    assert!(block2(&i, &z, &i).is_err());
}

fn shape() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..=8, 1usize..=8, any::<u64>()).prop_flat_map(|(m, n, seed)| (Just(m), Just(n), 0..=m.min(n), Just(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn penrose_identities((m, n, k, seed) in shape()) {
        let a = rect(m, n, k, seed);
        let p = pinv(&a, None);
        let sigma = svd(&a).sigma_max();
        prop_assert!(penrose_residual(&a, &p) <= 1e-10 * (1.0 + sigma));
        prop_assert_eq!(rank(&a, Some(1e-10)), k);
    }

    #[test]
    fn pinv_involution_and_adjoint((m, n, k, seed) in shape()) {
        let a = rect(m, n, k, seed);
        let p = pinv(&a, Some(1e-10));
        prop_assert!(close(&pinv(&p, Some(1e-10)), &a, 1e-9 * (1.0 + a.max_abs())));
        prop_assert!(close(&pinv(&a.adjoint(), Some(1e-10)), &p.adjoint(), 1e-9 * (1.0 + p.max_abs())));
    }

    #[test]
    fn range_projections_are_orthogonal_projections((m, n, k, seed) in shape()) {
        let a = rect(m, n, k, seed);
        let mp = moore_penrose(&a, Some(1e-10));
        for proj in [&mp.range, &mp.corange] {
            prop_assert!(close(&(proj * proj), proj, 1e-9));
            prop_assert!(close(proj, &proj.adjoint(), 1e-9));
            prop_assert!((proj.trace().re - k as f64).abs() < 1e-9);
        }
        prop_assert!(close(&(&mp.range * &a), &a, 1e-9 * (1.0 + a.max_abs())));
    }

    #[test]
    fn svd_reconstructs((m, n, k, seed) in shape()) {
        let a = rect(m, n, k, seed);
        let s = svd(&a);
        prop_assert!(s.reconstruct().max_abs_diff(&a) <= 1e-10 * (1.0 + s.sigma_max()));
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let r = m.min(n);
        prop_assert!(close(&(&s.left.adjoint() * &s.left), &Matrix::identity(r), 1e-10));
        prop_assert!(close(&(&s.right.adjoint() * &s.right), &Matrix::identity(r), 1e-10));
    }

    #[test]
    fn herm_eig_reconstructs(n in 1usize..=8, seed in any::<u64>()) {
        let h = hermitian(n, seed);
        let eig = herm_eig(&h).unwrap();
        let scale = 1.0 + eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10 * scale);
        let q = &eig.eigenvectors;
        prop_assert!(close(&(&q.adjoint() * q), &Matrix::identity(n), 1e-10));
    }

    #[test]
    fn abs_op_squares_to_gram(n in 1usize..=6, seed in any::<u64>()) {
        let a = rect(n, n, n, seed);
        let m = abs_op(&a);
        let gram = &a.adjoint() * &a;
        prop_assert!(close(&(&m * &m), &gram, 1e-9 * (1.0 + gram.max_abs())));
        prop_assert!(is_positive(&m, 1e-10).unwrap());
        let h = &psd(n, n, seed) + &Matrix::identity(n);
        prop_assert!(close(&abs_op(&h), &h, 1e-9 * (1.0 + h.max_abs())));
    }

    #[test]
    fn psd_power_is_additive(
        n in 1usize..=6,
        k in 0usize..=6,
        seed in any::<u64>(),
        p in prop::sample::select(vec![0.5, 1.0, 1.5, 2.0]),
        q in prop::sample::select(vec![0.5, 1.0, 1.5, 2.0]),
    ) {
        let h = psd(n, k.min(n), seed);
        let top = herm_eig(&h).unwrap().max();
        let h = if top > 0.0 { h.scale_re(1.0 / top) } else { h };
        let lhs = &psd_power(&h, p).unwrap() * &psd_power(&h, q).unwrap();
        prop_assert!(close(&lhs, &psd_power(&h, p + q).unwrap(), 1e-9));
    }

    #[test]
    fn projections_are_fixed_by_powers((m, n, k, seed) in shape(), p in 0.1f64..4.0) {
        let proj = moore_penrose(&rect(m, n, k, seed), Some(1e-10)).range;
        prop_assert!(close(&psd_power(&proj, p).unwrap(), &proj, 1e-9));
    }
}
