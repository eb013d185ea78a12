use faer::{Mat, MatRef, Side};

use super::basis::SectorMatrix;
use crate::{Error, Result};

/// Asymmetry above this (relative to the largest entry) rejects a matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Eigen-decomposition of one sector block, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    down: usize,
    energies: Vec<f64>,
    /// Column `k` is the eigenvector of `energies[k]`.
    vectors: Mat<f64>,
}

impl SectorSpectrum {
    pub(crate) fn from_parts(down: usize, energies: Vec<f64>, vectors: Mat<f64>) -> Self {
        debug_assert_eq!(vectors.nrows(), energies.len());
        Self {
            down,
            energies,
            vectors,
        }
    }

    #[inline]
    pub fn down(&self) -> usize {
        self.down
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    #[inline]
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    #[inline]
    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    /// `max_k ‖H v_k − E_k v_k‖_∞`.
    pub fn max_residual(&self, h: &SectorMatrix) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for k in 0..d {
            for i in 0..d {
                let hv: f64 = (0..d).map(|j| h.get(i, j) * self.vectors[(j, k)]).sum();
                worst = worst.max((hv - self.energies[k] * self.vectors[(i, k)]).abs());
            }
        }
        worst
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.vectors.transpose() * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Bitwise equality of eigenvalues and eigenvectors.
    pub fn bit_identical(&self, other: &Self) -> bool {
        let d = self.dim();
        self.down == other.down
            && d == other.dim()
            && self
                .energies
                .iter()
                .zip(&other.energies)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && (0..d).all(|k| (0..d).all(|i| self.vectors[(i, k)].to_bits() == other.vectors[(i, k)].to_bits()))
    }
}

/// Symmetric eigen-decomposition of a sector block.
pub fn diagonalize(h: &SectorMatrix, down: usize) -> Result<SectorSpectrum> {
    let asym = h.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE * h.max_abs().max(1.0) {
        return Err(Error::Validation(format!(
            "sector matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let d = h.dim();
    let m = Mat::from_fn(d, d, |i, j| h.get(i, j));
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Validation(format!("eigensolver failed: {e:?}")))?;
    let energies: Vec<f64> = eig.S().column_vector().iter().copied().collect();
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::Validation("non-finite eigenvalue".into()));
    }
    Ok(SectorSpectrum::from_parts(down, energies, eig.U().to_owned()))
}
