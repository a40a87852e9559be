//! One evaluator per inequality.
//!
//! Notation in the docs: `|X|` is `berezin_norm`, `ber` is `berezin_number`,
//! both over the supplied family; `A†` is the Moore-Penrose inverse,
//! `U = A†A` and `V = AA†`.

use num_complex::Complex64;

use super::{check_at_least_one, check_conjugates, check_unit_interval, BoundEvaluation, BoundId, Draft};
use crate::error::{Error, Result};
use crate::linalg::{block2, is_positive, moore_penrose, psd_power, svd, Matrix};
use crate::rkhs::KernelFamily;

/// Tolerance for the block-positivity precondition of the lemma evaluators.
pub const BLOCK_POSITIVITY_TOL: f64 = 1e-9;

/// Relative singular-value cutoff for the numerical rank used by every
/// evaluator: by `A†`, by the projections `AA†`, `A†A`, and by the
/// invertibility test of `ref-vbc1`.
pub const RANK_RTOL: f64 = 1e-10;

fn check_ops(fam: &KernelFamily, ops: &[&Matrix]) -> Result<()> {
    let n = fam.dim();
    for (i, op) in ops.iter().enumerate() {
        if op.rows() != n || op.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator #{} is {}x{}, expected {n}x{n} to match the kernel family",
                i + 1,
                op.rows(),
                op.cols()
            )));
        }
    }
    Ok(())
}

fn pow(h: &Matrix, p: f64) -> Result<Matrix> {
    psd_power(h, p)
}

fn spow(x: f64, e: f64) -> f64 {
    x.max(0.0).powf(e)
}

/// `A* A`.
fn gram(a: &Matrix) -> Matrix {
    &a.adjoint() * a
}

/// `A A*`.
fn cogram(a: &Matrix) -> Matrix {
    a * &a.adjoint()
}

fn i_times(a: &Matrix) -> Matrix {
    a.scale(Complex64::new(0.0, 1.0))
}

/// Quantities derived from a single operator.
struct Parts {
    a: Matrix,
    pinv: Matrix,
    /// `A A†`
    v: Matrix,
    /// `A† A`
    u: Matrix,
}

impl Parts {
    fn new(a: &Matrix) -> Self {
        let mp = moore_penrose(a, Some(RANK_RTOL));
        Self { a: a.clone(), pinv: mp.pinv, v: mp.range, u: mp.corange }
    }
}

fn ensure_block_positive(a1: &Matrix, a2: &Matrix, a3: &Matrix) -> Result<()> {
    let block = block2(a1, a3, a2)?;
    if is_positive(&block, BLOCK_POSITIVITY_TOL)? {
        Ok(())
    } else {
        Err(Error::Precondition("block operator [[A1, A3*], [A3, A2]] is not positive".into()))
    }
}

/// `ber^{2r}(A) <= min{ |λ/2 (|A|^{4r} + V^r) + (1-λ)|A*|^{2r}|,
///                      |λ/2 (|A*|^{4r} + U^r) + (1-λ)|A|^{2r}| }`.
pub fn eval_assa(a: &Matrix, lambda: f64, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    check_unit_interval("lambda", lambda)?;
    check_at_least_one("r", r)?;
    let p = Parts::new(a);
    let g = gram(a);
    let cg = cogram(a);
    let first = pow(&g, 2.0 * r)? + pow(&p.v, r)?;
    let first = first.scale_re(lambda / 2.0) + pow(&cg, r)?.scale_re(1.0 - lambda);
    let second = pow(&cg, 2.0 * r)? + pow(&p.u, r)?;
    let second = second.scale_re(lambda / 2.0) + pow(&g, r)?.scale_re(1.0 - lambda);
    let reference = eval_assa2(a, lambda, r, fam)?;
    Draft::new(BoundId::ThmAssa, 2.0 * r, spow(fam.ber(a)?, 2.0 * r))
        .branch("AA†", fam.ber_norm(&first)?)
        .branch("A†A", fam.ber_norm(&second)?)
        .reference_eval(&reference)
        .finish()
}

/// `ber^{2r}(A) <= ber(λ|A|^{2r} + (1-λ)|A*|^{2r})`.
pub fn eval_assa2(a: &Matrix, lambda: f64, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    check_unit_interval("lambda", lambda)?;
    check_at_least_one("r", r)?;
    let mix = pow(&gram(a), r)?.scale_re(lambda) + pow(&cogram(a), r)?.scale_re(1.0 - lambda);
    Draft::new(BoundId::RefAssa2, 2.0 * r, spow(fam.ber(a)?, 2.0 * r)).branch("bound", fam.ber(&mix)?).finish()
}

/// `ber^{2r}(A) <= 1/4 ||A|^r + |A*|^r| |(U|A|U)^r + (V|A*|V)^r|`.
///
/// Carries the invertible-case reference `ber(A) <= 1/2 ||A|^2 + I|` only
/// when `sigma_min > 1e-10 sigma_max`.
pub fn eval_vbc(a: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    let p = Parts::new(a);
    eval_vbc_with(a, &p.u, &p.v, r, fam)
}

/// [`eval_vbc`] with caller-supplied projections `U = A†A` and `V = AA†`.
pub fn eval_vbc_with(a: &Matrix, u: &Matrix, v: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a, u, v])?;
    check_at_least_one("r", r)?;
    let abs = pow(&gram(a), 0.5)?;
    let abs_star = pow(&cogram(a), 0.5)?;
    let outer = pow(&abs, r)? + pow(&abs_star, r)?;
    let inner = pow(&(&(u * &abs) * u), r)? + pow(&(&(v * &abs_star) * v), r)?;
    let bound = 0.25 * fam.ber_norm(&outer)? * fam.ber_norm(&inner)?;
    let mut draft = Draft::new(BoundId::ThmVbc, 2.0 * r, spow(fam.ber(a)?, 2.0 * r)).branch("bound", bound);
    if is_invertible(a) {
        draft = draft.reference_eval(&eval_vbc1(a, fam)?);
    }
    draft.finish()
}

pub fn is_invertible(a: &Matrix) -> bool {
    let s = svd(a);
    let smin = *s.singular_values.last().expect("non-empty spectrum");
    smin > RANK_RTOL * s.sigma_max()
}

/// `ber(A) <= 1/2 ||A|^2 + I|` for invertible `A`.
pub fn eval_vbc1(a: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    if !is_invertible(a) {
        return Err(Error::Precondition("reference ref-vbc1 requires an invertible operator".into()));
    }
    let m = gram(a) + Matrix::identity(a.rows());
    Draft::new(BoundId::RefVbc1, 1.0, fam.ber(a)?).branch("bound", 0.5 * fam.ber_norm(&m)?).finish()
}

/// `ber^{2r}(A) <= λ/2 ||A|^{4r} + V^r| + (1-λ)/2 ber^r(A) ||A|^{2r} + V^r|`,
/// evaluated with the computed `ber(A)` on the right.
pub fn eval_th10(a: &Matrix, lambda: f64, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    check_unit_interval("lambda", lambda)?;
    check_at_least_one("r", r)?;
    let p = Parts::new(a);
    let g = gram(a);
    let ber = fam.ber(a)?;
    let vr = pow(&p.v, r)?;
    let high = fam.ber_norm(&(pow(&g, 2.0 * r)? + vr.clone()))?;
    let low = fam.ber_norm(&(pow(&g, r)? + vr))?;
    let bound = lambda / 2.0 * high + (1.0 - lambda) / 2.0 * spow(ber, r) * low;
    Draft::new(BoundId::ThmTh10, 2.0 * r, spow(ber, 2.0 * r))
        .branch("bound", bound)
        .reference_eval(&eval_gfd(a, fam)?)
        .finish()
}

/// `ber^4(A) <= 1/4 ||A|^4 + |A*|^4| + 1/4 |A^2|^2`.
pub fn eval_gfd(a: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    let g = gram(a);
    let cg = cogram(a);
    let quartic = &g * &g + &cg * &cg;
    let square = fam.ber_norm(&(a * a))?;
    Draft::new(BoundId::RefGfd, 4.0, spow(fam.ber(a)?, 4.0))
        .branch("bound", 0.25 * fam.ber_norm(&quartic)? + 0.25 * square * square)
        .finish()
}

/// `ber(A1 + A2) <= ber(|A1|^2 + |A2|^2 + i(A1A1† + A2A2†)) / sqrt(2)`.
pub fn eval_nnbb(a1: &Matrix, a2: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2])?;
    let (p1, p2) = (Parts::new(a1), Parts::new(a2));
    let m = gram(a1) + gram(a2) + i_times(&(&p1.v + &p2.v));
    let sum = a1 + a2;
    Draft::new(BoundId::ThmNnbb, 1.0, fam.ber(&sum)?)
        .branch("bound", fam.ber(&m)? / 2f64.sqrt())
        .reference_eval(&eval_xxcc(&sum, fam)?)
        .finish()
}

/// `ber^2(A) <= 1/2 ||A|^2 + |A*|^2|`.
pub fn eval_xxcc(a: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    Draft::new(BoundId::RefXxcc, 2.0, spow(fam.ber(a)?, 2.0))
        .branch("bound", 0.5 * fam.ber_norm(&(gram(a) + cogram(a)))?)
        .finish()
}

/// `ber^2(A1 + A2) <= ber(|A1|^2 + iA2A2†) ber(|A2|^2 + iA1A1†)
///                    + 1/2 ||A1|^2 + A2A2†| ||A2|^2 + A1A1†|`.
pub fn eval_t1(a1: &Matrix, a2: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2])?;
    let (p1, p2) = (Parts::new(a1), Parts::new(a2));
    let (g1, g2) = (gram(a1), gram(a2));
    let cross = fam.ber(&(&g1 + &i_times(&p2.v)))? * fam.ber(&(&g2 + &i_times(&p1.v)))?;
    let real = fam.ber_norm(&(&g1 + &p2.v))? * fam.ber_norm(&(&g2 + &p1.v))?;
    let sum = a1 + a2;
    Draft::new(BoundId::ThmT1, 2.0, spow(fam.ber(&sum)?, 2.0))
        .branch("bound", cross + 0.5 * real)
        .reference_eval(&eval_gfd2(&sum, fam)?)
        .finish()
}

/// The equal-operator case of [`eval_t1`], divided by four:
/// `ber^2(A) <= 1/4 ber^2(|A|^2 + iAA†) + 1/8 ||A|^2 + AA†|^2`.
pub fn eval_ere(a: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    let p = Parts::new(a);
    let g = gram(a);
    let b = fam.ber(&(&g + &i_times(&p.v)))?;
    let n = fam.ber_norm(&(&g + &p.v))?;
    Draft::new(BoundId::CorEre, 2.0, spow(fam.ber(a)?, 2.0))
        .branch("bound", 0.25 * b * b + 0.125 * n * n)
        .reference_eval(&eval_gfd2(a, fam)?)
        .finish()
}

/// `ber^2(A) <= 1/4 ber^2(|A| + i|A*|) + 1/8 ||A| + |A*||^2`.
pub fn eval_gfd2(a: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    let abs = pow(&gram(a), 0.5)?;
    let abs_star = pow(&cogram(a), 0.5)?;
    let b = fam.ber(&(&abs + &i_times(&abs_star)))?;
    let n = fam.ber_norm(&(&abs + &abs_star))?;
    Draft::new(BoundId::RefGfd2, 2.0, spow(fam.ber(a)?, 2.0)).branch("bound", 0.25 * b * b + 0.125 * n * n).finish()
}

/// Shared right-hand side of the block lemmas driven by Buzano's inequality:
/// `1/2 (|X^{2r}| |Y^{2r}|)^{1/2} + 1/2 ber^r(XY)`.
fn buzano_geometric(x: &Matrix, y: &Matrix, r: f64, fam: &KernelFamily) -> Result<f64> {
    let xn = fam.ber_norm(&pow(x, 2.0 * r)?)?;
    let yn = fam.ber_norm(&pow(y, 2.0 * r)?)?;
    Ok(0.5 * (xn * yn).sqrt() + 0.5 * spow(fam.ber(&(x * y))?, r))
}

/// `1/4 |X^{2r} + Y^{2r}| + 1/2 ber^r(XY)`.
fn buzano_arithmetic(x: &Matrix, y: &Matrix, r: f64, fam: &KernelFamily) -> Result<f64> {
    let n = fam.ber_norm(&(pow(x, 2.0 * r)? + pow(y, 2.0 * r)?))?;
    Ok(0.25 * n + 0.5 * spow(fam.ber(&(x * y))?, r))
}

/// For `[[A1, A3*], [A3, A2]] >= 0`:
/// `ber^{2r}(A3) <= 1/2 (|A1^{2r}| |A2^{2r}|)^{1/2} + 1/2 ber^r(A1A2)`.
pub fn eval_mm1(a1: &Matrix, a2: &Matrix, a3: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2, a3])?;
    check_at_least_one("r", r)?;
    ensure_block_positive(a1, a2, a3)?;
    Draft::new(BoundId::LemMm1, 2.0 * r, spow(fam.ber(a3)?, 2.0 * r))
        .branch("bound", buzano_geometric(a1, a2, r, fam)?)
        .finish()
}

/// The diagonal blocks `X = A1†A1 + A2*A2`, `Y = A1A1* + A2A2†` of the
/// positive block operator whose off-diagonal block is `A1 + A2`.
fn sum_blocks(a1: &Matrix, a2: &Matrix) -> (Matrix, Matrix) {
    let (p1, p2) = (Parts::new(a1), Parts::new(a2));
    (&p1.u + &gram(a2), &cogram(a1) + &p2.v)
}

pub fn eval_hjh(a1: &Matrix, a2: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2])?;
    check_at_least_one("r", r)?;
    let (x, y) = sum_blocks(a1, a2);
    Draft::new(BoundId::ThmHjh, 2.0 * r, spow(fam.ber(&(a1 + a2))?, 2.0 * r))
        .branch("bound", buzano_geometric(&x, &y, r, fam)?)
        .finish()
}

/// Single-operator form of [`eval_hjh`]: the minimum of the `A2 = A` and
/// `A1 = A` specializations.
pub fn eval_hjh_cor(a: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    check_at_least_one("r", r)?;
    let p = Parts::new(a);
    let a2 = a * a;
    // (A*A)(AA†) = A* A^2 A†
    let left = fam.ber_norm(&pow(&gram(a), 2.0 * r)?)? * fam.ber_norm(&pow(&p.v, r)?)?;
    let left = 0.5 * left.sqrt() + 0.5 * spow(fam.ber(&(&(&a.adjoint() * &a2) * &p.pinv))?, r);
    // (A†A)(AA*) = A† A^2 A*
    let right = fam.ber_norm(&pow(&cogram(a), 2.0 * r)?)? * fam.ber_norm(&pow(&p.u, r)?)?;
    let right = 0.5 * right.sqrt() + 0.5 * spow(fam.ber(&(&(&p.pinv * &a2) * &a.adjoint()))?, r);
    Draft::new(BoundId::CorHjh, 2.0 * r, spow(fam.ber(&p.a)?, 2.0 * r))
        .branch("AA†", left)
        .branch("A†A", right)
        .finish()
}

/// For `[[A1, A3*], [A3, A2]] >= 0`:
/// `ber^{2r}(A3) <= 1/4 |A1^{2r} + A2^{2r}| + 1/2 ber^r(A1A2)`.
pub fn eval_virat(a1: &Matrix, a2: &Matrix, a3: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2, a3])?;
    check_at_least_one("r", r)?;
    ensure_block_positive(a1, a2, a3)?;
    Draft::new(BoundId::LemVirat, 2.0 * r, spow(fam.ber(a3)?, 2.0 * r))
        .branch("bound", buzano_arithmetic(a1, a2, r, fam)?)
        .finish()
}

pub fn eval_rohit(a1: &Matrix, a2: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2])?;
    check_at_least_one("r", r)?;
    let (x, y) = sum_blocks(a1, a2);
    Draft::new(BoundId::ThmRohit, 2.0 * r, spow(fam.ber(&(a1 + a2))?, 2.0 * r))
        .branch("bound", buzano_arithmetic(&x, &y, r, fam)?)
        .finish()
}

/// Single-operator form of [`eval_rohit`]:
/// `ber^{2r}(A) <= min{ 1/4 ||A*|^{4r} + U^r| + 1/2 ber^r(A†A^2A*),
///                      1/4 ||A|^{4r} + V^r| + 1/2 ber^r(A*A^2A†) }`.
pub fn eval_ani1(a: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    check_at_least_one("r", r)?;
    let p = Parts::new(a);
    let a2 = a * a;
    let first = fam.ber_norm(&(pow(&cogram(a), 2.0 * r)? + pow(&p.u, r)?))?;
    let first = 0.25 * first + 0.5 * spow(fam.ber(&(&(&p.pinv * &a2) * &a.adjoint()))?, r);
    let second = fam.ber_norm(&(pow(&gram(a), 2.0 * r)? + pow(&p.v, r)?))?;
    let second = 0.25 * second + 0.5 * spow(fam.ber(&(&(&a.adjoint() * &a2) * &p.pinv))?, r);
    Draft::new(BoundId::CorAni1, 2.0 * r, spow(fam.ber(a)?, 2.0 * r))
        .branch("A†A", first)
        .branch("AA†", second)
        .reference_eval(&eval_ani20(a, fam)?)
        .finish()
}

/// `ber^2(A) <= 1/4 ber(|A|^4 + I) + 1/2 ber(|A|^2)`.
pub fn eval_ani20(a: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    let g = gram(a);
    let quartic = &g * &g + Matrix::identity(a.rows());
    Draft::new(BoundId::RefAni20, 2.0, spow(fam.ber(a)?, 2.0))
        .branch("bound", 0.25 * fam.ber(&quartic)? + 0.5 * fam.ber(&g)?)
        .finish()
}

/// For `[[A1, A3*], [A3, A2]] >= 0` and Hölder conjugates `γ, δ`:
/// `ber^{2r}(A3) <= |A1^{rγ}/γ + A2^{rδ}/δ|`.
#[allow(clippy::too_many_arguments)]
pub fn eval_trainvr(
    a1: &Matrix,
    a2: &Matrix,
    a3: &Matrix,
    gamma: f64,
    delta: f64,
    r: f64,
    fam: &KernelFamily,
) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2, a3])?;
    check_at_least_one("r", r)?;
    check_conjugates(gamma, delta)?;
    ensure_block_positive(a1, a2, a3)?;
    let m = pow(a1, r * gamma)?.scale_re(1.0 / gamma) + pow(a2, r * delta)?.scale_re(1.0 / delta);
    Draft::new(BoundId::LemTrainvr, 2.0 * r, spow(fam.ber(a3)?, 2.0 * r)).branch("bound", fam.ber_norm(&m)?).finish()
}

/// `ber^{2r}(A1 + A2) <= |P^{rγ}/γ + Q^{rδ}/δ|` with
/// `P = (A1A1*)^λ + (A2*A2)^λ` and `Q = (A1†A1)^{1-λ} + (A2A2†)^{1-λ}`.
///
/// A zeroth power is the support projection.
#[allow(clippy::too_many_arguments)]
pub fn eval_trainv(
    a1: &Matrix,
    a2: &Matrix,
    lambda: f64,
    gamma: f64,
    delta: f64,
    r: f64,
    fam: &KernelFamily,
) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2])?;
    check_unit_interval("lambda", lambda)?;
    check_at_least_one("r", r)?;
    check_conjugates(gamma, delta)?;
    let (p1, p2) = (Parts::new(a1), Parts::new(a2));
    let p = pow(&cogram(a1), lambda)? + pow(&gram(a2), lambda)?;
    let q = pow(&p1.u, 1.0 - lambda)? + pow(&p2.v, 1.0 - lambda)?;
    let m = pow(&p, r * gamma)?.scale_re(1.0 / gamma) + pow(&q, r * delta)?.scale_re(1.0 / delta);
    let sum = a1 + a2;
    Draft::new(BoundId::ThmTrainv, 2.0 * r, spow(fam.ber(&sum)?, 2.0 * r))
        .branch("bound", fam.ber_norm(&m)?)
        .reference_eval(&eval_pinh2(&sum, lambda, r, fam)?)
        .finish()
}

/// `A2 = 0`, `γ = δ = 2` case of [`eval_trainv`]:
/// `ber^{2r}(A) <= 1/2 |(AA*)^{2λr} + (A†A)^{2(1-λ)r}|`.
pub fn eval_pinh1(a: &Matrix, lambda: f64, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    check_unit_interval("lambda", lambda)?;
    check_at_least_one("r", r)?;
    let p = Parts::new(a);
    let m = pow(&cogram(a), 2.0 * lambda * r)? + pow(&p.u, 2.0 * (1.0 - lambda) * r)?;
    Draft::new(BoundId::RefPinh1, 2.0 * r, spow(fam.ber(a)?, 2.0 * r))
        .branch("bound", 0.5 * fam.ber_norm(&m)?)
        .reference_eval(&eval_pinh2(a, lambda, r, fam)?)
        .finish()
}

/// `ber^r(A) <= 1/2 |(AA*)^{λr} + (A*A)^{(1-λ)r}|`.
pub fn eval_pinh2(a: &Matrix, lambda: f64, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a])?;
    check_unit_interval("lambda", lambda)?;
    check_at_least_one("r", r)?;
    let m = pow(&cogram(a), lambda * r)? + pow(&gram(a), (1.0 - lambda) * r)?;
    Draft::new(BoundId::RefPinh2, r, spow(fam.ber(a)?, r)).branch("bound", 0.5 * fam.ber_norm(&m)?).finish()
}

fn problm_branches(a1: &Matrix, a2: &Matrix, fam: &KernelFamily) -> Result<(f64, f64, f64)> {
    check_ops(fam, &[a1, a2])?;
    let (p1, p2) = (Parts::new(a1), Parts::new(a2));
    let (g1, g2) = (gram(a1), gram(a2));
    let first = fam.ber_norm(&(&g1 + &g2))? * fam.ber_norm(&(&p1.v + &p2.v))?;
    let second = fam.ber_norm(&(&g1 + &p2.u))? * fam.ber_norm(&(&cogram(a2) + &p1.v))?;
    Ok((spow(fam.ber_norm(&(a1 + a2))?, 2.0), first, second))
}

/// Both Berezin-norm bounds on `|A1 + A2|^2_ber`; the reported id is the
/// branch attaining the minimum (`thm-problm-i` on ties).
pub fn eval_problm(a1: &Matrix, a2: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    let (lhs, first, second) = problm_branches(a1, a2, fam)?;
    let id = if second < first { BoundId::ThmProblmII } else { BoundId::ThmProblmI };
    Draft::new(id, 2.0, lhs).branch("i", first).branch("ii", second).finish()
}

/// `|A1 + A2|^2_ber <= |A1*A1 + A2*A2| |A1A1† + A2A2†|`.
pub fn eval_problm_i(a1: &Matrix, a2: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    let (lhs, first, _) = problm_branches(a1, a2, fam)?;
    Draft::new(BoundId::ThmProblmI, 2.0, lhs).branch("i", first).finish()
}

/// `|A1 + A2|^2_ber <= |A1*A1 + A2†A2| |A2A2* + A1A1†|`.
pub fn eval_problm_ii(a1: &Matrix, a2: &Matrix, fam: &KernelFamily) -> Result<BoundEvaluation> {
    let (lhs, _, second) = problm_branches(a1, a2, fam)?;
    Draft::new(BoundId::ThmProblmII, 2.0, lhs).branch("ii", second).finish()
}

/// `ber^r(A1*A2) <= 1/2 min{ ||A2|^{2r} + (A1*A2A2†A1)^r|,
///                           ||A1|^{2r} + (A2*A1A1†A2)^r| }`.
pub fn eval_som(a1: &Matrix, a2: &Matrix, r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, a2])?;
    check_at_least_one("r", r)?;
    let (p1, p2) = (Parts::new(a1), Parts::new(a2));
    let (a1s, a2s) = (a1.adjoint(), a2.adjoint());
    let m2 = pow(&gram(a2), r)? + pow(&(&(&a1s * &p2.v) * a1), r)?;
    let m1 = pow(&gram(a1), r)? + pow(&(&(&a2s * &p1.v) * a2), r)?;
    Draft::new(BoundId::ThmSom, r, spow(fam.ber(&(&a1s * a2))?, r))
        .branch("|A2|", 0.5 * fam.ber_norm(&m2)?)
        .branch("|A1|", 0.5 * fam.ber_norm(&m1)?)
        .finish()
}

/// Operators of the two-term product inequality, in the order
/// `A1, B1, A2, B2, M, N`.
#[derive(Clone, Copy, Debug)]
pub struct ProductPair<'a> {
    pub a1: &'a Matrix,
    pub b1: &'a Matrix,
    pub a2: &'a Matrix,
    pub b2: &'a Matrix,
    pub m: &'a Matrix,
    pub n: &'a Matrix,
}

/// `|A1*MB1 + A2*NB2|^2_ber <= 2^{-(r+s-2)}
///     |(B1*|M|^2B1)^r + (B2*|N|^2B2)^r|^{1/r} |(A1*MM†A1)^s + (A2*NN†A2)^s|^{1/s}`.
///
/// The `M = N = I` reference is attached only when both are exactly the
/// identity.
pub fn eval_ram(ops: ProductPair<'_>, r: f64, s: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    let ProductPair { a1, b1, a2, b2, m, n } = ops;
    check_ops(fam, &[a1, b1, a2, b2, m, n])?;
    check_at_least_one("r", r)?;
    check_at_least_one("s", s)?;
    let (pm, pn) = (Parts::new(m), Parts::new(n));
    let right = pow(&(&(&b1.adjoint() * &gram(m)) * b1), r)? + pow(&(&(&b2.adjoint() * &gram(n)) * b2), r)?;
    let left = pow(&(&(&a1.adjoint() * &pm.v) * a1), s)? + pow(&(&(&a2.adjoint() * &pn.v) * a2), s)?;
    let bound = 2f64.powf(-(r + s - 2.0)) * spow(fam.ber_norm(&right)?, 1.0 / r) * spow(fam.ber_norm(&left)?, 1.0 / s);
    let target = &(&(&a1.adjoint() * m) * b1) + &(&(&a2.adjoint() * n) * b2);
    let mut draft = Draft::new(BoundId::ThmRam, 2.0, spow(fam.ber_norm(&target)?, 2.0)).branch("bound", bound);
    let identity = Matrix::identity(fam.dim());
    if *m == identity && *n == identity {
        draft = draft.reference_eval(&eval_ram33(a1, b1, a2, b2, r, s, fam)?);
    }
    draft.finish()
}

/// `|A1*B1 + A2*B2|^2_ber <= 2^{-(r+s-2)} ||B1|^{2r} + |B2|^{2r}|^{1/r}
///                                        ||A1|^{2s} + |A2|^{2s}|^{1/s}`.
#[allow(clippy::too_many_arguments)]
pub fn eval_ram33(
    a1: &Matrix,
    b1: &Matrix,
    a2: &Matrix,
    b2: &Matrix,
    r: f64,
    s: f64,
    fam: &KernelFamily,
) -> Result<BoundEvaluation> {
    check_ops(fam, &[a1, b1, a2, b2])?;
    check_at_least_one("r", r)?;
    check_at_least_one("s", s)?;
    let right = pow(&gram(b1), r)? + pow(&gram(b2), r)?;
    let left = pow(&gram(a1), s)? + pow(&gram(a2), s)?;
    let bound = 2f64.powf(-(r + s - 2.0)) * spow(fam.ber_norm(&right)?, 1.0 / r) * spow(fam.ber_norm(&left)?, 1.0 / s);
    let target = &(&a1.adjoint() * b1) + &(&a2.adjoint() * b2);
    Draft::new(BoundId::RefRam33, 2.0, spow(fam.ber_norm(&target)?, 2.0)).branch("bound", bound).finish()
}

/// One `(A_i, M_i, B_i)` term of a product sum `sum_i A_i* M_i B_i`.
#[derive(Clone, Copy, Debug)]
pub struct ProductTerm<'a> {
    pub a: &'a Matrix,
    pub m: &'a Matrix,
    pub b: &'a Matrix,
}

/// `ber^r(sum A_i*M_iB_i) <= n^{r-1} / 2^r |sum (B_i*|M_i|^2B_i + A_i*M_iM_i†A_i)^r|`.
pub fn eval_ram44(terms: &[ProductTerm<'_>], r: f64, fam: &KernelFamily) -> Result<BoundEvaluation> {
    if terms.is_empty() {
        return Err(Error::InvalidParameter("thm-ram44 needs at least one term".into()));
    }
    check_at_least_one("r", r)?;
    let dim = fam.dim();
    let mut target = Matrix::zeros(dim, dim);
    let mut inner = Matrix::zeros(dim, dim);
    for t in terms {
        check_ops(fam, &[t.a, t.m, t.b])?;
        let pm = Parts::new(t.m);
        let a_adj = t.a.adjoint();
        target = target + &(&a_adj * t.m) * t.b;
        let summand = &(&t.b.adjoint() * &gram(t.m)) * t.b + &(&a_adj * &pm.v) * t.a;
        inner = inner + pow(&summand, r)?;
    }
    let n = terms.len() as f64;
    let bound = n.powf(r - 1.0) / 2f64.powf(r) * fam.ber_norm(&inner)?;
    Draft::new(BoundId::ThmRam44, r, spow(fam.ber(&target)?, r)).branch("bound", bound).finish()
}
