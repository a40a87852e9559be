//! The worked examples: exact instances whose bound values are known in
//! closed form.

use serde::{Deserialize, Serialize};

use crate::bounds::{
    eval_ani1, eval_assa, eval_ere, eval_gfd, eval_nnbb, eval_pinh1, eval_pinh2, eval_th10, eval_vbc, BoundEvaluation,
};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::rkhs::standard_family;

/// Absolute tolerance for every golden value.
pub const GOLDEN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub bound_id: String,
    pub quantity: String,
    pub expected: f64,
    pub actual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub rows: Vec<GoldenRow>,
    pub overall_pass: bool,
}

impl GoldenReport {
    pub fn row(&self, bound_id: &str, quantity: &str) -> Option<&GoldenRow> {
        self.rows.iter().find(|r| r.bound_id == bound_id && r.quantity == quantity)
    }
}

struct Rows(Vec<GoldenRow>);

impl Rows {
    fn push(&mut self, bound_id: &str, quantity: &str, expected: f64, actual: f64) {
        self.0.push(GoldenRow {
            bound_id: bound_id.into(),
            quantity: quantity.into(),
            expected,
            actual,
            pass: (actual - expected).abs() <= GOLDEN_TOL,
        });
    }
}

fn real(rows: &[&[f64]]) -> Matrix {
    Matrix::from_real_rows(rows).expect("literal matrix")
}

/// A failed evaluation shows up as a NaN row.
fn field(ev: &Result<BoundEvaluation>, f: impl Fn(&BoundEvaluation) -> f64) -> f64 {
    ev.as_ref().map(f).unwrap_or(f64::NAN)
}

fn reference(ev: &Result<BoundEvaluation>) -> f64 {
    field(ev, |e| e.reference_bound.unwrap_or(f64::NAN))
}

/// Evaluates every worked example on the standard family.
pub fn paper_suite() -> GoldenReport {
    let fam2 = standard_family(2).expect("n >= 1");
    let fam3 = standard_family(3).expect("n >= 1");
    let mut rows = Rows(Vec::new());

    let a = real(&[&[0.5, 0.5], &[0.0, 0.0]]);
    let ev = eval_assa(&a, 0.5, 1.0, &fam2);
    rows.push("thm-assa", "ref-assa2 bound on ber^2", 0.375, reference(&ev));
    rows.push("thm-assa", "bound on ber^2", 0.3125, field(&ev, |e| e.bound));

    let a = Matrix::from_diagonal(&[2.0, 1.0]);
    let ev = eval_vbc(&a, 1.0, &fam2);
    rows.push("thm-vbc", "ref-vbc1 bound on ber", 2.5, field(&ev, |e| e.normalized_reference().unwrap_or(f64::NAN)));
    rows.push("thm-vbc", "normalized bound on ber", 2.0, field(&ev, |e| e.normalized_bound));

    let a = real(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]);
    rows.push("thm-th10", "ref-gfd bound on ber^4", 4.25, field(&eval_gfd(&a, &fam3), |e| e.bound));
    for (label, lambda) in [("0", 0.0), ("1/8", 0.125), ("1/4", 0.25), ("1/2", 0.5), ("1", 1.0)] {
        let ev = eval_th10(&a, lambda, 1.0, &fam3);
        let quantity = format!("bound on ber^2 at lambda={label}");
        rows.push("thm-th10", &quantity, 0.5 * (6.0 * lambda + 2.5), field(&ev, |e| e.bound));
    }

    let a = real(&[&[1.0, 1.0], &[0.0, 0.0]]);
    let z = Matrix::zeros(2, 2);
    let ev = eval_nnbb(&a, &z, &fam2);
    rows.push(
        "thm-nnbb",
        "ref-xxcc bound on ber^2",
        1.5,
        field(&ev, |e| e.reference_bound.map_or(f64::NAN, |r| r * r)),
    );
    rows.push("thm-nnbb", "bound on ber^2", 1.0, field(&ev, |e| e.bound * e.bound));

    let ev = eval_ere(&a, &fam2);
    rows.push("cor-ere", "ref-gfd2 bound on ber^2", 1.1875, reference(&ev));
    rows.push("cor-ere", "bound on ber^2", 1.0, field(&ev, |e| e.bound));

    let a = real(&[&[0.5, 0.0], &[0.5, 0.0]]);
    let ev = eval_ani1(&a, 1.0, &fam2);
    rows.push("cor-ani1", "ref-ani20 bound on ber^2", 0.5625, reference(&ev));
    rows.push("cor-ani1", "bound on ber^2", 0.3125, field(&ev, |e| e.bound));

    let a = real(&[&[2.0, 2.0], &[0.0, 0.0]]);
    rows.push("thm-trainv", "ref-pinh1 bound on ber^4", 32.25, field(&eval_pinh1(&a, 0.5, 2.0, &fam2), |e| e.bound));
    rows.push("thm-trainv", "ref-pinh2 bound on ber^2", 6.0, field(&eval_pinh2(&a, 0.5, 2.0, &fam2), |e| e.bound));

    let overall_pass = rows.0.iter().all(|r| r.pass);
    GoldenReport { rows: rows.0, overall_pass }
}
