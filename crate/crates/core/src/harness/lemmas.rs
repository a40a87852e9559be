//! Scalar and vector inequalities the bound proofs are assembled from.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::generate::{gaussian_complex, sample_operator, sample_positive_block};
use super::{rng_from, sub_seed, summarize, triage, BoundReport, Outcome, TrialReport, Violation};
use crate::bounds::{within, RANK_RTOL};
use crate::linalg::{abs_op, moore_penrose, psd_power, Matrix};

const REL_TOL: f64 = 1e-9;
const ABS_TOL: f64 = 1e-12;

/// Exponents used by the reversed power inequality.
pub const REVERSE_EXPONENTS: [f64; 3] = [0.25, 0.5, 0.75];

type Check = fn(&mut ChaCha8Rng, usize) -> (f64, f64, Value);

fn run_suite(seed: u64, trials: usize, checks: &[(&str, Check)]) -> TrialReport {
    let bounds: Vec<BoundReport> = checks
        .iter()
        .enumerate()
        .map(|(stream, &(name, check))| {
            let outcomes: Vec<Outcome> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let s = sub_seed(seed, 0x1e44_0000 + stream as u64, t as u64);
                    let (lhs, rhs, inputs) = check(&mut rng_from(s), t);
                    let violation = (!within(lhs, rhs, REL_TOL, ABS_TOL)).then(|| Violation {
                        trial: t,
                        seed: s,
                        label: triage(lhs, rhs, REL_TOL, ABS_TOL).into(),
                        lhs: Some(lhs),
                        bound: Some(rhs),
                        message: None,
                        instance: None,
                        evaluation: None,
                        inputs: Some(inputs),
                    });
                    Outcome::Checked { lhs, bound: rhs, violation }
                })
                .collect();
            summarize(name.to_string(), None, outcomes, REL_TOL)
        })
        .collect();
    TrialReport::new(bounds)
}

fn positive(rng: &mut impl Rng) -> f64 {
    (rng.random_range(-3.0..3.0f64)).exp()
}

fn real(rng: &mut impl Rng) -> f64 {
    rng.random_range(-10.0..10.0)
}

fn weighted_am_gm(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let (a, b, l) = (positive(rng), positive(rng), rng.random::<f64>());
    let m = 1.0 - l;
    (a.powf(l) * b.powf(m), l * a + m * b, json!({"alpha": a, "beta": b, "lambda": l}))
}

fn power_mean(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let (a, b, l) = (positive(rng), positive(rng), rng.random::<f64>());
    let r = rng.random_range(1.0..4.0);
    let m = 1.0 - l;
    let rhs = (l * a.powf(r) + m * b.powf(r)).powf(1.0 / r);
    (l * a + m * b, rhs, json!({"alpha": a, "beta": b, "lambda": l, "r": r}))
}

fn bohr(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let n = rng.random_range(1..=6usize);
    let r = rng.random_range(1.0..4.0);
    let xs: Vec<f64> = (0..n).map(|_| positive(rng)).collect();
    let lhs = xs.iter().sum::<f64>().powf(r);
    let rhs = (n as f64).powf(r - 1.0) * xs.iter().map(|x| x.powf(r)).sum::<f64>();
    (lhs, rhs, json!({"alphas": xs, "r": r}))
}

fn sqrt2_rotation(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let (a, b) = (real(rng), real(rng));
    ((a + b).abs(), 2f64.sqrt() * Complex64::new(a, b).norm(), json!({"alpha": a, "beta": b}))
}

fn two_term_cauchy_schwarz(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let (a1, a2, b1, b2) = (real(rng), real(rng), real(rng), real(rng));
    let lhs = (a1 * b1 + a2 * b2).powi(2);
    let rhs = (a1 * a1 + a2 * a2) * (b1 * b1 + b2 * b2);
    (lhs, rhs, json!({"alpha": [a1, a2], "beta": [b1, b2]}))
}

/// Checks the weighted AM-GM and power-mean chain, the Bohr inequality, the
/// `|a + b| <= sqrt(2) |a + ib|` estimate and two-term Cauchy-Schwarz.
pub fn scalar_lemma_suite(seed: u64, trials: usize) -> TrialReport {
    run_suite(
        seed,
        trials,
        &[
            ("weighted-am-gm", weighted_am_gm),
            ("power-mean", power_mean),
            ("bohr", bohr),
            ("sqrt2-rotation", sqrt2_rotation),
            ("two-term-cauchy-schwarz", two_term_cauchy_schwarz),
        ],
    )
}

fn dim(rng: &mut impl Rng) -> usize {
    rng.random_range(2..=6)
}

fn vector(rng: &mut impl Rng, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| gaussian_complex(rng))
}

fn unit(rng: &mut impl Rng, n: usize) -> DVector<Complex64> {
    let v = vector(rng, n);
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// `<A u, v>`.
fn form(a: &Matrix, u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    v.dotc(&(a.as_dmatrix() * u))
}

fn vec_json(v: &DVector<Complex64>) -> Value {
    Value::from(v.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>())
}

fn random_psd(rng: &mut ChaCha8Rng) -> Matrix {
    let n = dim(rng);
    let g = sample_operator(n, true, rng);
    (&g * &g.adjoint()).hermitian_part()
}

fn jensen_power(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let a = random_psd(rng);
    let u = unit(rng, a.rows());
    let r = rng.random_range(1.0..4.0);
    let ar = psd_power(&a, r).expect("positive input");
    let lhs = form(&a, &u, &u).re.max(0.0).powf(r);
    (lhs, form(&ar, &u, &u).re, json!({"a": a, "u": vec_json(&u), "r": r}))
}

fn jensen_power_reverse(rng: &mut ChaCha8Rng, trial: usize) -> (f64, f64, Value) {
    let a = random_psd(rng);
    let u = unit(rng, a.rows());
    let r = REVERSE_EXPONENTS[trial % REVERSE_EXPONENTS.len()];
    let ar = psd_power(&a, r).expect("positive input");
    let rhs = form(&a, &u, &u).re.max(0.0).powf(r);
    (form(&ar, &u, &u).re, rhs, json!({"a": a, "u": vec_json(&u), "r": r}))
}

fn buzano(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let n = dim(rng);
    let (u, v, w) = (vector(rng, n), vector(rng, n), unit(rng, n));
    let lhs = (w.dotc(&u) * v.dotc(&w)).norm();
    let rhs = 0.5 * (u.norm() * v.norm() + v.dotc(&u).norm());
    (lhs, rhs, json!({"u": vec_json(&u), "v": vec_json(&v), "w": vec_json(&w)}))
}

fn mixed_schwarz(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let n = dim(rng);
    let a = sample_operator(n, true, rng);
    let u = unit(rng, n);
    let lhs = form(&a, &u, &u).norm_sqr();
    let rhs = form(&abs_op(&a), &u, &u).re * form(&abs_op(&a.adjoint()), &u, &u).re;
    (lhs, rhs, json!({"a": a, "u": vec_json(&u)}))
}

fn pinv_schwarz(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let n = dim(rng);
    let a = sample_operator(n, true, rng);
    let (u, v) = (unit(rng, n), unit(rng, n));
    let lhs = form(&a, &u, &v).norm_sqr();
    let gram = &a.adjoint() * &a;
    let proj = moore_penrose(&a, Some(RANK_RTOL)).range;
    let rhs = form(&gram, &u, &u).re * form(&proj, &v, &v).re;
    (lhs, rhs, json!({"a": a, "u": vec_json(&u), "v": vec_json(&v)}))
}

fn block_positivity(rng: &mut ChaCha8Rng, _: usize) -> (f64, f64, Value) {
    let n = dim(rng);
    let b = sample_positive_block(n, true, rng);
    let (u, v) = (vector(rng, n), vector(rng, n));
    let lhs = form(&b[2], &u, &v).norm_sqr();
    let rhs = form(&b[0], &u, &u).re * form(&b[1], &v, &v).re;
    let inputs = json!({"a1": b[0], "a2": b[1], "a3": b[2], "u": vec_json(&u), "v": vec_json(&v)});
    (lhs, rhs, inputs)
}

/// Checks the power inequality `<Au,u>^r <= <A^r u,u>` (and its reverse for
/// `0 < r < 1`), Buzano, the mixed Schwarz inequality, its Moore-Penrose
/// variant, and the Cauchy-Schwarz consequence of block positivity.
pub fn vector_lemma_suite(seed: u64, trials: usize) -> TrialReport {
    run_suite(
        seed,
        trials,
        &[
            ("jensen-power", jensen_power),
            ("jensen-power-reverse", jensen_power_reverse),
            ("buzano", buzano),
            ("mixed-schwarz", mixed_schwarz),
            ("pinv-schwarz", pinv_schwarz),
            ("block-positivity", block_positivity),
        ],
    )
}
