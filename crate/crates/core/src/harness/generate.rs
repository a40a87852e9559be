//! Seeded random operators, kernel families and bound instances.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundId, BoundInstance, BoundParams, RANK_RTOL};
use crate::error::{Error, Result};
use crate::linalg::{abs_op, moore_penrose, svd, Matrix};
use crate::rkhs::{standard_family, szego_family, KernelFamily};

/// Grid the exponents `r` and `s` are drawn from.
pub const EXPONENT_GRID: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

/// Largest modulus of a sampled Szegő point.
pub const SZEGO_RADIUS: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Standard,
    RandomUnit,
    Szego,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Standard => "standard",
            FamilyKind::RandomUnit => "random-unit",
            FamilyKind::Szego => "szego",
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(FamilyKind::Standard),
            "random-unit" => Ok(FamilyKind::RandomUnit),
            "szego" => Ok(FamilyKind::Szego),
            other => Err(Error::InvalidParameter(format!("unknown family kind `{other}`"))),
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent seed for trial `index` of stream `stream`.
pub fn sub_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(seed ^ splitmix(stream)) ^ index)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Square complex Gaussian matrix with exactly `rank` singular values kept.
pub fn random_operator(dim: usize, rank: usize, seed: u64) -> Result<Matrix> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if rank > dim {
        return Err(Error::InvalidParameter(format!("rank {rank} exceeds dimension {dim}")));
    }
    if rank == 0 {
        return Ok(Matrix::zeros(dim, dim));
    }
    let mut rng = rng_from(seed);
    let g = Matrix::wrap(DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(&mut rng)));
    if rank == dim {
        return Ok(g);
    }
    let mut f = svd(&g);
    for s in f.singular_values.iter_mut().skip(rank) {
        *s = 0.0;
    }
    Ok(f.reconstruct())
}

/// `count` Gaussian unit vectors in `C^dim`, labelled `u1, u2, ...`.
pub fn random_unit_family(dim: usize, count: usize, seed: u64) -> Result<KernelFamily> {
    if count == 0 {
        return Err(Error::InvalidParameter("family needs at least one vector".into()));
    }
    let mut rng = rng_from(seed);
    let kernels: Vec<Vec<Complex64>> = (0..count)
        .map(|_| {
            let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(&mut rng)).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / norm).collect()
        })
        .collect();
    let points = (1..=count).map(|i| format!("u{i}")).collect();
    KernelFamily::new(dim, points, kernels)
}

/// Family of the given kind on `C^dim`; random kinds use `2 dim` points.
pub fn sample_family(kind: FamilyKind, dim: usize, rng: &mut impl Rng) -> Result<KernelFamily> {
    match kind {
        FamilyKind::Standard => standard_family(dim),
        FamilyKind::RandomUnit => random_unit_family(dim, 2 * dim, rng.random()),
        FamilyKind::Szego => {
            let points: Vec<Complex64> = (0..2 * dim)
                .map(|_| {
                    let radius = SZEGO_RADIUS * rng.random::<f64>().sqrt();
                    Complex64::from_polar(radius, std::f64::consts::TAU * rng.random::<f64>())
                })
                .collect();
            szego_family(&points, dim)
        }
    }
}

/// Draws the scalar parameters used by a fuzz trial.
pub fn sample_params(rng: &mut impl Rng) -> BoundParams {
    let lambda = rng.random::<f64>();
    let r = EXPONENT_GRID[rng.random_range(0..EXPONENT_GRID.len())];
    let s = EXPONENT_GRID[rng.random_range(0..EXPONENT_GRID.len())];
    // 1 + 3(1 - u) with u in [0, 1) lies in (1, 4]
    let gamma = 1.0 + 3.0 * (1.0 - rng.random::<f64>());
    BoundParams { lambda, r, s, n_terms: 1, ..BoundParams::default() }.with_gamma(gamma)
}

struct OperatorSampler<'a, R: Rng> {
    rng: &'a mut R,
    dim: usize,
    allow_rank_deficient: bool,
}

impl<R: Rng> OperatorSampler<'_, R> {
    fn rank(&mut self, dim: usize) -> usize {
        if self.allow_rank_deficient && self.rng.random_bool(0.5) {
            self.rng.random_range(0..dim)
        } else {
            dim
        }
    }

    fn any(&mut self) -> Matrix {
        let rank = self.rank(self.dim);
        self.with_rank(self.dim, rank)
    }

    fn full(&mut self) -> Matrix {
        self.with_rank(self.dim, self.dim)
    }

    fn with_rank(&mut self, dim: usize, rank: usize) -> Matrix {
        random_operator(dim, rank, self.rng.random()).expect("rank within dimension")
    }

    /// Pair `(A1, A2)`, occasionally with `A2 = A1` or `A2 = 0`.
    fn pair(&mut self) -> Vec<Matrix> {
        let a1 = self.any();
        let u = self.rng.random::<f64>();
        let a2 = if u < 0.1 {
            a1.clone()
        } else if u < 0.15 {
            Matrix::zeros(self.dim, self.dim)
        } else {
            self.any()
        };
        vec![a1, a2]
    }

    /// `(A1, A2, A3)` with `[[A1, A3*], [A3, A2]]` positive.
    fn positive_block(&mut self) -> Vec<Matrix> {
        let n = self.dim;
        match self.rng.random_range(0..4) {
            0 => {
                let rank = self.rank(2 * n);
                let g = self.with_rank(2 * n, rank);
                let b = &g * &g.adjoint();
                let m = b.as_dmatrix();
                let a1 = Matrix::wrap(m.view((0, 0), (n, n)).into_owned());
                let a2 = Matrix::wrap(m.view((n, n), (n, n)).into_owned());
                let a3 = Matrix::wrap(m.view((n, 0), (n, n)).into_owned());
                vec![a1.hermitian_part(), a2.hermitian_part(), a3]
            }
            1 => {
                let a = self.any();
                vec![abs_op(&a), abs_op(&a.adjoint()), a]
            }
            2 => {
                let a = self.any();
                let u = moore_penrose(&a, Some(RANK_RTOL)).corange;
                let cg = &a * &a.adjoint();
                vec![u, cg.hermitian_part(), a]
            }
            _ => {
                let a = self.any();
                let g = &a.adjoint() * &a;
                let v = moore_penrose(&a, Some(RANK_RTOL)).range;
                vec![g.hermitian_part(), v, a]
            }
        }
    }
}

/// Random operator on `C^dim`, rank deficient half the time when allowed.
pub(crate) fn sample_operator(dim: usize, allow_rank_deficient: bool, rng: &mut impl Rng) -> Matrix {
    OperatorSampler { rng, dim, allow_rank_deficient }.any()
}

/// `[A1, A2, A3]` with `[[A1, A3*], [A3, A2]]` positive.
pub(crate) fn sample_positive_block(dim: usize, allow_rank_deficient: bool, rng: &mut impl Rng) -> Vec<Matrix> {
    OperatorSampler { rng, dim, allow_rank_deficient }.positive_block()
}

/// Random instance of `id` on `C^dim`.
pub fn sample_instance(
    id: BoundId,
    dim: usize,
    kind: FamilyKind,
    allow_rank_deficient: bool,
    rng: &mut impl Rng,
) -> Result<BoundInstance> {
    let mut params = sample_params(rng);
    let family = sample_family(kind, dim, rng)?;
    let mut ops = OperatorSampler { rng, dim, allow_rank_deficient };
    use BoundId::*;
    let operators = match id {
        RefVbc1 => vec![ops.full()],
        ThmNnbb | ThmT1 | ThmHjh | ThmRohit | ThmTrainv | ThmProblmI | ThmProblmII | ThmSom => ops.pair(),
        LemMm1 | LemVirat | LemTrainvr => ops.positive_block(),
        ThmRam => {
            let mut v: Vec<Matrix> = (0..4).map(|_| ops.any()).collect();
            if ops.rng.random_bool(0.2) {
                v.extend([Matrix::identity(dim), Matrix::identity(dim)]);
            } else {
                v.extend([ops.any(), ops.any()]);
            }
            v
        }
        RefRam33 => (0..4).map(|_| ops.any()).collect(),
        ThmRam44 => {
            params.n_terms = ops.rng.random_range(1..=3);
            (0..3 * params.n_terms).map(|_| ops.any()).collect()
        }
        _ => vec![ops.any()],
    };
    Ok(BoundInstance::new(id, params, operators, family))
}
