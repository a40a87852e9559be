mod common;

use berezin_lab::bounds::*;
use berezin_lab::harness::{rng_from, sample_instance, FamilyKind};
use berezin_lab::linalg::{moore_penrose, pinv, psd_power, Matrix};
use berezin_lab::rkhs::{standard_family, KernelFamily};
use common::{c, real, rect};
use proptest::prelude::*;

const EXACT: f64 = 1e-12;

fn std(n: usize) -> KernelFamily {
    standard_family(n).unwrap()
}

fn near(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

fn rel(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()))
}

fn e2() -> Matrix {
    real(&[&[1.0, 1.0], &[0.0, 0.0]])
}

#[test]
fn assa_first_branch_by_hand() {
    let a = real(&[&[0.5, 0.5], &[0.0, 0.0]]);
    let ev = eval_assa(&a, 0.5, 1.0, &std(2)).unwrap();
    assert!(near(ev.branch("AA†").unwrap(), 17.0 / 32.0, EXACT));
    // |A|^4 = 1/8 [[1,1],[1,1]], AA† = diag(1,0), |A*|^2 = diag(1/2,0).
    let dense = real(&[&[(1.0 / 8.0 + 1.0) / 4.0 + 0.25, 1.0 / 32.0], &[1.0 / 32.0, 1.0 / 32.0]]);
    assert!(near(ev.branch("AA†").unwrap(), dense.max_abs(), EXACT));
    assert!(near(ev.lhs, 0.25, EXACT));
}

#[test]
fn vbc_with_exact_projections() {
    let a = e2();
    let half = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let diag = Matrix::from_diagonal(&[1.0, 0.0]);
    let direct = eval_vbc(&a, 1.0, &std(2)).unwrap();
    let exact = eval_vbc_with(&a, &half, &diag, 1.0, &std(2)).unwrap();
    assert!(near(direct.bound, exact.bound, 1e-10));
    assert!(direct.reference_bound.is_none());
    assert!(!is_invertible(&a));
}

#[test]
fn ere_intermediate_and_t1_consistency() {
    let a = e2();
    let v = &a * &pinv(&a, None);
    let m = &(&a.adjoint() * &a) + &v.scale(c(0.0, 1.0));
    assert!(near(std(2).ber(&m).unwrap(), 2f64.sqrt(), EXACT));

    let ere = eval_ere(&a, &std(2)).unwrap();
    let t1 = eval_t1(&a, &a, &std(2)).unwrap();
    assert!(near(t1.bound / 4.0, ere.bound, EXACT));
    assert!(near(t1.lhs / 4.0, ere.lhs, EXACT));

    let i = Matrix::identity(2);
    let ev = eval_ere(&i, &std(2)).unwrap();
    assert!(near(ev.bound, 1.0, EXACT) && near(ev.lhs, 1.0, EXACT));
}

#[test]
fn hjh_single_operator_branch() {
    let ev = eval_hjh_cor(&e2(), 1.0, &std(2)).unwrap();
    assert!(near(ev.branch("AA†").unwrap(), 0.5 * 2f64.sqrt() + 0.5, EXACT));
    assert!(near(ev.lhs, 1.0, EXACT));
    let ev = eval_hjh(&Matrix::identity(2), &Matrix::zeros(2, 2), 1.0, &std(2)).unwrap();
    assert!(near(ev.bound, 1.0, EXACT) && near(ev.lhs, 1.0, EXACT));
    let z = Matrix::zeros(2, 2);
    let ev = eval_hjh(&z, &z, 1.0, &std(2)).unwrap();
    assert_eq!((ev.lhs, ev.bound), (0.0, 0.0));
}

#[test]
fn ani1_branches() {
    let a = real(&[&[0.5, 0.0], &[0.5, 0.0]]);
    let ev = eval_ani1(&a, 1.0, &std(2)).unwrap();
    assert!(near(ev.branch("A†A").unwrap(), 13.0 / 32.0, EXACT));
    assert!(near(ev.branch("AA†").unwrap(), 5.0 / 16.0, EXACT));
    assert!(near(ev.bound, 0.3125, EXACT));
    assert!(near(ev.reference_bound.unwrap(), 0.5625, EXACT));
}

#[test]
fn identity_equality_cases() {
    let i = Matrix::identity(2);
    let z = Matrix::zeros(2, 2);
    let f = std(2);
    let checks = [
        (eval_nnbb(&i, &i, &f).unwrap(), 2.0),
        (eval_virat(&i, &i, &i, 1.0, &f).unwrap(), 1.0),
        (eval_rohit(&i, &z, 1.0, &f).unwrap(), 1.0),
        (eval_mm1(&i, &i, &i, 1.0, &f).unwrap(), 1.0),
        (eval_trainv(&i, &z, 0.5, 2.0, 2.0, 1.0, &f).unwrap(), 1.0),
        (eval_problm(&i, &i, &f).unwrap(), 4.0),
        (eval_som(&i, &i, 1.0, &f).unwrap(), 1.0),
        (eval_th10(&i, 0.3, 2.0, &f).unwrap(), 1.0),
    ];
    for (ev, value) in checks {
        assert!(near(ev.lhs, value, EXACT) && near(ev.bound, value, EXACT), "{}", ev.bound_id);
    }
    let ev = eval_nnbb(&z, &z, &f).unwrap();
    assert_eq!((ev.lhs, ev.bound), (0.0, 0.0));
    let ev = eval_mm1(&i, &i, &z, 1.0, &f).unwrap();
    assert!(ev.lhs == 0.0 && ev.satisfied);
}

#[test]
fn problm_special_cases() {
    let f = std(2);
    let ev = eval_problm_i(&e2(), &Matrix::zeros(2, 2), &f).unwrap();
    assert!(near(ev.bound, 1.0, EXACT) && near(ev.lhs, 1.0, EXACT));

    for seed in 0..20 {
        let a = rect(3, 3, 1 + (seed % 3) as usize, seed);
        let p = pinv(&a, Some(RANK_RTOL));
        let f = std(3);
        let ev = eval_problm_i(&a, &p, &f).unwrap();
        let mp = moore_penrose(&a, Some(RANK_RTOL));
        let grams = &(&a.adjoint() * &a) + &(&p.adjoint() * &p);
        let expected = f.ber(&(&mp.range + &mp.corange)).unwrap() * f.ber_norm(&grams).unwrap();
        assert!(rel(ev.bound, expected), "seed {seed}");
    }
}

#[test]
fn som_recovers_single_operator_form() {
    let f = std(2);
    let ev = eval_som(&Matrix::identity(2), &e2(), 1.0, &f).unwrap();
    assert!(near(ev.branch("|A2|").unwrap(), 1.0, EXACT));
    assert!(near(ev.lhs, 1.0, EXACT));
    let ev = eval_som(&e2(), &e2(), 1.0, &f).unwrap();
    assert!(near(ev.bound, 1.0, EXACT) && near(ev.lhs, 1.0, EXACT));
}

#[test]
fn ram_reductions() {
    let f = std(3);
    let i = Matrix::identity(3);
    let pair = ProductPair { a1: &i, b1: &i, a2: &i, b2: &i, m: &i, n: &i };
    let ev = eval_ram(pair, 1.0, 1.0, &f).unwrap();
    assert!(near(ev.lhs, 4.0, EXACT) && near(ev.bound, 4.0, EXACT));

    let ops: Vec<Matrix> = (0..4).map(|k| rect(3, 3, 3, 40 + k)).collect();
    for (r, s) in [(1.0, 1.0), (2.0, 1.5), (3.0, 2.0)] {
        let pair = ProductPair { a1: &ops[0], b1: &ops[1], a2: &ops[2], b2: &ops[3], m: &i, n: &i };
        let ev = eval_ram(pair, r, s, &f).unwrap();
        assert_eq!(ev.reference_id, Some(BoundId::RefRam33));
        assert!(near(ev.bound, ev.reference_bound.unwrap(), EXACT * (1.0 + ev.bound)));
    }

    let z = Matrix::zeros(3, 3);
    let m = rect(3, 3, 2, 9);
    let pair = ProductPair { a1: &i, b1: &i, a2: &z, b2: &z, m: &m, n: &ops[0] };
    let ev = eval_ram(pair, 1.0, 1.0, &f).unwrap();
    let mp = moore_penrose(&m, Some(RANK_RTOL));
    let expected = f.ber_norm(&(&m.adjoint() * &m)).unwrap() * f.ber_norm(&mp.range).unwrap();
    assert!(rel(ev.bound, expected));
    assert!(near(ev.lhs, f.ber_norm(&m).unwrap().powi(2), EXACT));

    let pair = ProductPair { a1: &i, b1: &i, a2: &z, b2: &z, m: &i, n: &ops[0] };
    let ev = eval_ram(pair, 1.0, 1.0, &f).unwrap();
    let som = eval_som(&i, &i, 1.0, &f).unwrap();
    assert!(near(ev.bound, som.bound, EXACT) && near(ev.lhs, som.lhs, EXACT));
}

#[test]
fn ram_prefactor_fails_on_a_single_identity_term() {
    let (i, z) = (Matrix::identity(2), Matrix::zeros(2, 2));
    let ops = ProductPair { a1: &i, b1: &i, a2: &z, b2: &z, m: &i, n: &i };
    let ev = eval_ram(ops, 2.0, 2.0, &std(2)).unwrap();
    assert_eq!(ev.lhs, 1.0);
    assert!(near(ev.bound, 0.25, EXACT));
    assert!(!ev.satisfied);
    let reference = eval_ram33(&i, &i, &z, &z, 2.0, 2.0, &std(2)).unwrap();
    assert!(!reference.satisfied);
}

#[test]
fn ram44_term_count_scaling() {
    let f = std(3);
    let (a, m, b) = (rect(3, 3, 3, 1), rect(3, 3, 2, 2), rect(3, 3, 3, 3));
    let t = ProductTerm { a: &a, m: &m, b: &b };
    for r in [1.0, 1.5, 2.0, 3.0] {
        let one = eval_ram44(&[t], r, &f).unwrap();
        let two = eval_ram44(&[t, t], r, &f).unwrap();
        let scale = 2f64.powf(r);
        assert!(rel(two.bound, scale * one.bound));
        assert!(rel(two.lhs, scale * one.lhs));
    }
    let i = Matrix::identity(3);
    let ev = eval_ram44(&[ProductTerm { a: &i, m: &i, b: &i }], 1.0, &f).unwrap();
    assert!(near(ev.bound, 1.0, EXACT) && near(ev.lhs, 1.0, EXACT));
    assert!(eval_ram44(&[], 1.0, &f).is_err());

    // n = 1, M = I is the form 1/2 |B*B + A*A| at r = 1.
    let ev = eval_ram44(&[ProductTerm { a: &a, m: &i, b: &b }], 1.0, &f).unwrap();
    let expected = 0.5 * f.ber_norm(&(&(&b.adjoint() * &b) + &(&a.adjoint() * &a))).unwrap();
    assert!(rel(ev.bound, expected));
}

#[test]
fn trainv_ignores_lambda_for_partial_isometries() {
    let f = std(3);
    let w = moore_penrose(&rect(3, 3, 2, 5), Some(RANK_RTOL)).range;
    let z = Matrix::zeros(3, 3);
    let base = eval_trainv(&w, &z, 0.1, 2.0, 2.0, 1.0, &f).unwrap();
    for lambda in [0.0, 0.3, 0.7, 1.0] {
        let ev = eval_trainv(&w, &z, lambda, 2.0, 2.0, 1.0, &f).unwrap();
        assert!(near(ev.bound, base.bound, 1e-10), "lambda {lambda}");
    }
}

#[test]
fn paper_sharpness_claims() {
    let f2 = std(2);
    let f3 = std(3);
    let norm = |ev: &BoundEvaluation| (ev.normalized_bound, ev.normalized_reference().unwrap());
    let cases = [
        norm(&eval_assa(&real(&[&[0.5, 0.5], &[0.0, 0.0]]), 0.5, 1.0, &f2).unwrap()),
        (eval_vbc(&Matrix::from_diagonal(&[2.0, 1.0]), 1.0, &f2).unwrap().normalized_bound, 2.5),
        norm(&eval_nnbb(&e2(), &Matrix::zeros(2, 2), &f2).unwrap()),
        norm(&eval_ere(&e2(), &f2).unwrap()),
        norm(&eval_ani1(&real(&[&[0.5, 0.0], &[0.5, 0.0]]), 1.0, &f2).unwrap()),
        norm(&eval_th10(&real(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]), 0.0, 1.0, &f3).unwrap()),
    ];
    for (new, old) in cases {
        assert!(new < old, "{new} vs {old}");
    }
    let a = real(&[&[2.0, 2.0], &[0.0, 0.0]]);
    let pinh1 = eval_pinh1(&a, 0.5, 2.0, &f2).unwrap();
    assert!(near(pinh1.normalized_bound, 32.25f64.powf(0.25), EXACT));
    assert!(near(pinh1.normalized_reference().unwrap(), 6f64.sqrt(), EXACT));
}

#[test]
fn block_lemmas_reject_non_positive_blocks() {
    let f = std(2);
    let i = Matrix::identity(2);
    let big = i.scale_re(2.0);
    assert!(matches!(eval_mm1(&i, &i, &big, 1.0, &f), Err(berezin_lab::Error::Precondition(_))));
    assert!(eval_virat(&i, &i, &big, 1.0, &f).is_err());
    assert!(eval_trainvr(&i, &i, &big, 2.0, 2.0, 1.0, &f).is_err());
    assert!(eval_trainvr(&i, &i, &i, 2.0, 3.0, 1.0, &f).is_err());
}

fn permute(a: &Matrix, perm: &[usize]) -> Matrix {
    let n = a.rows();
    let d = nalgebra::DMatrix::from_fn(n, n, |i, j| a.get(perm[i], perm[j]));
    Matrix::from_dmatrix(d).unwrap()
}

fn sampled(id_index: usize, dim: usize, seed: u64, kind: FamilyKind) -> BoundInstance {
    let id = BoundId::ALL[id_index];
    sample_instance(id, dim, kind, true, &mut rng_from(seed)).unwrap()
}

fn kind() -> impl Strategy<Value = FamilyKind> {
    prop_oneof![Just(FamilyKind::Standard), Just(FamilyKind::RandomUnit), Just(FamilyKind::Szego)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exponent_coherence(idx in 0..BoundId::ALL.len(), dim in 2usize..=5, seed in any::<u64>(), kind in kind()) {
        let inst = sampled(idx, dim, seed, kind);
        if let Ok(ev) = inst.evaluate() {
            prop_assert!(rel(ev.normalized_bound.powf(ev.exponent), ev.bound));
            let min = ev.branches.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(ev.bound, min);
            prop_assert_eq!(ev.satisfied, within(ev.lhs, ev.bound, SATISFIED_RTOL, SATISFIED_ATOL));
        }
    }

    #[test]
    fn every_branch_dominates(dim in 2usize..=5, seed in any::<u64>(), kind in kind(), which in 0usize..5) {
        let id = [BoundId::ThmAssa, BoundId::ThmProblmI, BoundId::ThmSom, BoundId::CorAni1, BoundId::CorHjh][which];
        let inst = sample_instance(id, dim, kind, true, &mut rng_from(seed)).unwrap();
        let ops = &inst.operators;
        let f = &inst.family;
        let ev = match id {
            BoundId::ThmProblmI => eval_problm(&ops[0], &ops[1], f),
            _ => inst.evaluate(),
        }
        .unwrap();
        prop_assert!(ev.branches.len() == 2);
        for b in &ev.branches {
            prop_assert!(within(ev.lhs, b.value, SATISFIED_RTOL, SATISFIED_ATOL), "{} {}: {} > {}", id, b.name, ev.lhs, b.value);
        }
        let first = &ev.branches[0];
        let winner = ev.branches.iter().find(|b| b.value == ev.bound).unwrap();
        prop_assert!(first.value == ev.bound || winner.value < first.value);
    }

    #[test]
    fn permutation_covariance(idx in 0..BoundId::ALL.len(), dim in 2usize..=5, seed in any::<u64>()) {
        let inst = sampled(idx, dim, seed, FamilyKind::Standard);
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.rotate_left(1 + (seed as usize) % (dim - 1));
        let mut moved = inst.clone();
        moved.operators = inst.operators.iter().map(|a| permute(a, &perm)).collect();
        if let (Ok(x), Ok(y)) = (inst.evaluate(), moved.evaluate()) {
            prop_assert!(rel(x.lhs, y.lhs), "{}: lhs {} vs {}", x.bound_id, x.lhs, y.lhs);
            prop_assert!(rel(x.bound, y.bound), "{}: bound {} vs {}", x.bound_id, x.bound, y.bound);
        }
    }

    #[test]
    fn projection_shortcut(dim in 2usize..=5, rank in 0usize..=5, seed in any::<u64>(), lambda in 0.0f64..=1.0,
                           r in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let a = rect(dim, dim, rank.min(dim), seed);
        let f = standard_family(dim).unwrap();
        let ev = eval_assa(&a, lambda, r, &f).unwrap();
        let v = moore_penrose(&a, Some(RANK_RTOL)).range;
        let g = &a.adjoint() * &a;
        let cg = &a * &a.adjoint();
        let m = (&psd_power(&g, 2.0 * r).unwrap() + &v).scale_re(lambda / 2.0)
            + psd_power(&cg, r).unwrap().scale_re(1.0 - lambda);
        let direct = f.ber_norm(&m).unwrap();
        prop_assert!((ev.branch("AA†").unwrap() - direct).abs() < 1e-10 * (1.0 + direct));

        let th10 = eval_th10(&a, lambda, r, &f).unwrap();
        let ber = f.ber(&a).unwrap();
        let high = f.ber_norm(&(&psd_power(&g, 2.0 * r).unwrap() + &v)).unwrap();
        let low = f.ber_norm(&(&psd_power(&g, r).unwrap() + &v)).unwrap();
        let expected = lambda / 2.0 * high + (1.0 - lambda) / 2.0 * ber.powf(r) * low;
        prop_assert!((th10.bound - expected).abs() < 1e-10 * (1.0 + expected));
    }

    #[test]
    fn th10_crossover(lambda in 0.0f64..=1.0) {
        let a = real(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]);
        let ev = eval_th10(&a, lambda, 1.0, &std(3)).unwrap();
        prop_assert!(near(ev.bound * ev.bound, 0.25 * (6.0 * lambda + 2.5).powi(2), 1e-11));
        if lambda <= 0.25 {
            prop_assert!(ev.bound * ev.bound < 4.25);
        }
    }
}
