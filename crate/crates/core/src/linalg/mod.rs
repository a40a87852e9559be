//! Dense complex linear algebra.

mod decomp;
mod matrix;

pub use decomp::{
    abs_op, block2, conj_transpose, default_rank_rtol, herm_eig, is_positive, moore_penrose, pinv, psd_power,
    range_projections, rank, svd, HermEigen, MoorePenrose, SvdResult, HERMITIAN_RTOL, PSD_RTOL,
};
pub use matrix::Matrix;
