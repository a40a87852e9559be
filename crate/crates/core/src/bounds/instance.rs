use serde::{Deserialize, Serialize};

use super::catalog::*;
use super::{BoundEvaluation, BoundId, BoundParams};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rkhs::KernelFamily;

/// Everything needed to replay one evaluation.
///
/// Operator order follows the inequality: `[A]`, `[A1, A2]`,
/// `[A1, A2, A3]` for the block lemmas, `[A1, B1, A2, B2, M, N]` for
/// `thm-ram`, `[A1, B1, A2, B2]` for `ref-ram33`, and flattened
/// `(A_i, M_i, B_i)` triples for `thm-ram44`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInstance {
    pub bound_id: BoundId,
    pub params: BoundParams,
    pub operators: Vec<Matrix>,
    pub family: KernelFamily,
}

impl BoundId {
    /// Number of operators the evaluator consumes.
    pub fn arity(self, n_terms: usize) -> usize {
        use BoundId::*;
        match self {
            ThmAssa | RefAssa2 | ThmVbc | RefVbc1 | ThmTh10 | RefGfd | RefXxcc | CorEre | RefGfd2 | CorHjh
            | CorAni1 | RefAni20 | RefPinh1 | RefPinh2 => 1,
            ThmNnbb | ThmT1 | ThmHjh | ThmRohit | ThmTrainv | ThmProblmI | ThmProblmII | ThmSom => 2,
            LemMm1 | LemVirat | LemTrainvr => 3,
            RefRam33 => 4,
            ThmRam => 6,
            ThmRam44 => 3 * n_terms,
        }
    }
}

impl BoundInstance {
    pub fn new(bound_id: BoundId, params: BoundParams, operators: Vec<Matrix>, family: KernelFamily) -> Self {
        Self { bound_id, params, operators, family }
    }

    pub fn evaluate(&self) -> Result<BoundEvaluation> {
        let p = &self.params;
        let fam = &self.family;
        let id = self.bound_id;
        if id == BoundId::ThmRam44 && p.n_terms == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let expected = id.arity(p.n_terms);
        if self.operators.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "{id} expects {expected} operator(s), got {}",
                self.operators.len()
            )));
        }
        let o = &self.operators;
        use BoundId::*;
        match id {
            ThmAssa => eval_assa(&o[0], p.lambda, p.r, fam),
            RefAssa2 => eval_assa2(&o[0], p.lambda, p.r, fam),
            ThmVbc => eval_vbc(&o[0], p.r, fam),
            RefVbc1 => eval_vbc1(&o[0], fam),
            ThmTh10 => eval_th10(&o[0], p.lambda, p.r, fam),
            RefGfd => eval_gfd(&o[0], fam),
            ThmNnbb => eval_nnbb(&o[0], &o[1], fam),
            RefXxcc => eval_xxcc(&o[0], fam),
            ThmT1 => eval_t1(&o[0], &o[1], fam),
            CorEre => eval_ere(&o[0], fam),
            RefGfd2 => eval_gfd2(&o[0], fam),
            LemMm1 => eval_mm1(&o[0], &o[1], &o[2], p.r, fam),
            ThmHjh => eval_hjh(&o[0], &o[1], p.r, fam),
            CorHjh => eval_hjh_cor(&o[0], p.r, fam),
            LemVirat => eval_virat(&o[0], &o[1], &o[2], p.r, fam),
            ThmRohit => eval_rohit(&o[0], &o[1], p.r, fam),
            CorAni1 => eval_ani1(&o[0], p.r, fam),
            RefAni20 => eval_ani20(&o[0], fam),
            LemTrainvr => eval_trainvr(&o[0], &o[1], &o[2], p.gamma, p.delta, p.r, fam),
            ThmTrainv => eval_trainv(&o[0], &o[1], p.lambda, p.gamma, p.delta, p.r, fam),
            RefPinh1 => eval_pinh1(&o[0], p.lambda, p.r, fam),
            RefPinh2 => eval_pinh2(&o[0], p.lambda, p.r, fam),
            ThmProblmI => eval_problm_i(&o[0], &o[1], fam),
            ThmProblmII => eval_problm_ii(&o[0], &o[1], fam),
            ThmSom => eval_som(&o[0], &o[1], p.r, fam),
            ThmRam => {
                eval_ram(ProductPair { a1: &o[0], b1: &o[1], a2: &o[2], b2: &o[3], m: &o[4], n: &o[5] }, p.r, p.s, fam)
            }
            RefRam33 => eval_ram33(&o[0], &o[1], &o[2], &o[3], p.r, p.s, fam),
            ThmRam44 => {
                let terms: Vec<ProductTerm<'_>> =
                    o.chunks_exact(3).map(|t| ProductTerm { a: &t[0], m: &t[1], b: &t[2] }).collect();
                eval_ram44(&terms, p.r, fam)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rkhs::standard_family;

    #[test]
    fn arity_is_checked() {
        let inst = BoundInstance::new(
            BoundId::ThmNnbb,
            BoundParams::default(),
            vec![Matrix::identity(2)],
            standard_family(2).unwrap(),
        );
        assert!(matches!(inst.evaluate(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn ram44_identity_triples() {
        let i = Matrix::identity(2);
        let params = BoundParams { n_terms: 2, ..BoundParams::default() };
        let inst = BoundInstance::new(BoundId::ThmRam44, params, vec![i.clone(); 6], standard_family(2).unwrap());
        let ev = inst.evaluate().unwrap();
        assert!((ev.lhs - 2.0).abs() < 1e-12);
        assert!((ev.bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let inst = BoundInstance::new(
            BoundId::ThmAssa,
            BoundParams::default(),
            vec![Matrix::from_real_rows(&[[0.5, 0.5], [0.0, 0.0]]).unwrap()],
            standard_family(2).unwrap(),
        );
        let back = BoundInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.evaluate().unwrap(), inst.evaluate().unwrap());
    }
}
