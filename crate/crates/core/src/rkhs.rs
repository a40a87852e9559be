//! Finite reproducing-kernel models and the Berezin functionals.
//!
//! A [`KernelFamily`] is a finite list of kernel vectors `k_x` in `C^dim`,
//! one per labelled point. Every functional works with the normalized kernels
//! `k_x / |k_x|`, so the supremum over `X` is an exact maximum over the list.
//!
//! On disk a family is
//! `{"dim": d, "points": ["x", ...], "kernels": [[[re, im], ...], ...]}`.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Kernel vectors `{k_x : x in X}` over a finite point set.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelFamily {
    dim: usize,
    points: Vec<String>,
    kernels: Vec<Vec<Complex64>>,
    // Normalized kernels as the columns of a dim x |X| matrix.
    unit: Matrix,
}

impl KernelFamily {
    pub fn new(dim: usize, points: Vec<String>, kernels: Vec<Vec<Complex64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("kernel dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidParameter("kernel family needs at least one point".into()));
        }
        if points.len() != kernels.len() {
            return Err(Error::DimensionMismatch(format!("{} points but {} kernels", points.len(), kernels.len())));
        }
        let mut unit = DMatrix::zeros(dim, kernels.len());
        for (j, (label, k)) in points.iter().zip(&kernels).enumerate() {
            if k.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "kernel at point {label} has length {}, expected {dim}",
                    k.len()
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("kernel vector"));
            }
            let norm = k.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !norm.is_finite() || norm <= 0.0 {
                return Err(Error::ZeroKernel(label.clone()));
            }
            for (i, z) in k.iter().enumerate() {
                unit[(i, j)] = z / norm;
            }
        }
        Ok(Self { dim, points, kernels, unit: Matrix::wrap(unit) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    /// Kernels as supplied (not normalized).
    pub fn kernels(&self) -> &[Vec<Complex64>] {
        &self.kernels
    }

    /// Normalized kernels as matrix columns.
    pub fn unit_kernels(&self) -> &Matrix {
        &self.unit
    }

    /// The normalized kernel at point index `x`.
    pub fn unit_kernel(&self, x: usize) -> Result<Vec<Complex64>> {
        if x >= self.len() {
            return Err(Error::IndexOutOfRange { index: x, len: self.len() });
        }
        Ok(self.unit.as_dmatrix().column(x).iter().copied().collect())
    }

    /// Same points with every kernel scaled to unit norm.
    pub fn normalized(&self) -> KernelFamily {
        let kernels = (0..self.len()).map(|x| self.unit.as_dmatrix().column(x).iter().copied().collect()).collect();
        KernelFamily { dim: self.dim, points: self.points.clone(), kernels, unit: self.unit.clone() }
    }

    fn check_operator(&self, op: &Matrix) -> Result<()> {
        if op.rows() != self.dim || op.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{} but the kernel family lives in dimension {}",
                op.rows(),
                op.cols(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Berezin transform at every point, in point order.
    pub fn transforms(&self, op: &Matrix) -> Result<Vec<Complex64>> {
        self.check_operator(op)?;
        let k = self.unit.as_dmatrix();
        let ak = op.as_dmatrix() * k;
        Ok((0..self.len()).map(|x| k.column(x).dotc(&ak.column(x))).collect())
    }

    /// `ber(A) = max_x |<A k_x, k_x>|`.
    pub fn ber(&self, op: &Matrix) -> Result<f64> {
        Ok(self.transforms(op)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// `|A|_ber = max_{x,y} |<A k_x, k_y>|`.
    pub fn ber_norm(&self, op: &Matrix) -> Result<f64> {
        self.check_operator(op)?;
        let k = self.unit.as_dmatrix();
        let gram = k.adjoint() * (op.as_dmatrix() * k);
        Ok(gram.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FamilyFile = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    dim: usize,
    points: Vec<String>,
    kernels: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<FamilyFile> for KernelFamily {
    type Error = Error;

    fn try_from(raw: FamilyFile) -> Result<Self> {
        let kernels =
            raw.kernels.into_iter().map(|k| k.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect();
        KernelFamily::new(raw.dim, raw.points, kernels)
    }
}

impl Serialize for KernelFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyFile {
            dim: self.dim,
            points: self.points.clone(),
            kernels: self.kernels.iter().map(|k| k.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KernelFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FamilyFile::deserialize(deserializer)?;
        KernelFamily::try_from(raw).map_err(serde::de::Error::custom)
    }
}

pub fn normalized(family: &KernelFamily) -> KernelFamily {
    family.normalized()
}

/// Standard basis kernels `e_1, ..., e_n` at points `"1"` through `"n"`.
pub fn standard_family(n: usize) -> Result<KernelFamily> {
    if n == 0 {
        return Err(Error::InvalidParameter("standard family needs n >= 1".into()));
    }
    let points = (1..=n).map(|i| i.to_string()).collect();
    let kernels = (0..n)
        .map(|i| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[i] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    KernelFamily::new(n, points, kernels)
}

/// Szegő kernels of the Hardy space truncated to the first `truncation`
/// Taylor coefficients: the kernel at `w` is `(conj(w)^j)_{j < truncation}`.
pub fn szego_family(points: &[Complex64], truncation: usize) -> Result<KernelFamily> {
    if truncation == 0 {
        return Err(Error::InvalidParameter("truncation must be >= 1".into()));
    }
    let mut labels = Vec::with_capacity(points.len());
    let mut kernels = Vec::with_capacity(points.len());
    for &w in points {
        let label = format_complex(w);
        if w.norm().is_nan() || w.norm() >= 1.0 {
            return Err(Error::OutsideDisk(label));
        }
        let wbar = w.conj();
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut k = Vec::with_capacity(truncation);
        for _ in 0..truncation {
            k.push(coeff);
            coeff *= wbar;
        }
        labels.push(label);
        kernels.push(k);
    }
    KernelFamily::new(truncation, labels, kernels)
}

pub fn load_family(path: impl AsRef<Path>) -> Result<KernelFamily> {
    KernelFamily::load(path)
}

pub(crate) fn format_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// An operator paired with the kernel family it is read through.
#[derive(Clone, Debug)]
pub struct BerezinContext {
    operator: Matrix,
    family: KernelFamily,
}

impl BerezinContext {
    pub fn new(operator: Matrix, family: KernelFamily) -> Result<Self> {
        family.check_operator(&operator)?;
        Ok(Self { operator, family })
    }

    pub fn operator(&self) -> &Matrix {
        &self.operator
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }
}

/// `Ã(x) = <A k_x, k_x>` with the normalized kernel at point index `x`.
pub fn berezin_transform(ctx: &BerezinContext, x: usize) -> Result<Complex64> {
    let k = ctx.family.unit_kernel(x)?;
    let ak = ctx.operator.as_dmatrix() * nalgebra::DVector::from_vec(k.clone());
    Ok(k.iter().zip(ak.iter()).map(|(ki, aki)| ki.conj() * aki).sum())
}

pub fn berezin_number(ctx: &BerezinContext) -> f64 {
    ctx.family.ber(&ctx.operator).expect("context validated on construction")
}

pub fn berezin_norm(ctx: &BerezinContext) -> f64 {
    ctx.family.ber_norm(&ctx.operator).expect("context validated on construction")
}

pub fn berezin_range(ctx: &BerezinContext) -> Vec<Complex64> {
    ctx.family.transforms(&ctx.operator).expect("context validated on construction")
}
