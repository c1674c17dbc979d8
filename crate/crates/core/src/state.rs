//! Density matrices and the column-stacking vectorization.
//!
//! `vec(ρ)[i + N·j] = ρ[i, j]`. The superoperator in [`crate::lindblad`] is
//! assembled against exactly this layout.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::C64;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// An N×N Hermitian, unit-trace state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: Mat<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace. Positivity is only reported.
    pub fn from_matrix(mat: Mat<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        let herm = hermiticity_error(mat.as_ref());
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("‖ρ − ρ†‖_F = {herm:.3e}")));
        }
        let tr = trace(mat.as_ref());
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        Ok(Self { mat })
    }

    /// Hermitizes `(M + M†)/2` and rescales to unit trace.
    pub fn normalized(mat: MatRef<'_, C64>) -> Result<Self> {
        let mut h = hermitian_part(mat);
        let tr = trace(h.as_ref()).re;
        if !tr.is_finite() || tr.abs() < f64::MIN_POSITIVE {
            return Err(Error::InvalidState(format!("cannot normalise, trace = {tr}")));
        }
        let inv = 1.0 / tr;
        for j in 0..h.ncols() {
            for i in 0..h.nrows() {
                h[(i, j)] *= inv;
            }
        }
        Ok(Self { mat: h })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let w = C64::new(1.0 / n as f64, 0.0);
        Self { mat: Mat::from_fn(n, n, |i, j| if i == j { w } else { C64::new(0.0, 0.0) }) }
    }

    pub fn site_localized(n: usize, site: usize) -> Result<Self> {
        if site >= n {
            return Err(Error::InvalidParameter(format!("site {site} outside 0..{n}")));
        }
        let mut mat = Mat::<C64>::zeros(n, n);
        mat[(site, site)] = C64::new(1.0, 0.0);
        Ok(Self { mat })
    }

    /// Projector onto `psi / ‖psi‖`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2.is_nan() || norm2 <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let n = psi.len();
        let s = 1.0 / norm2;
        Ok(Self { mat: Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj() * s) })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        trace(self.mat.as_ref())
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(self.mat.as_ref())
    }

    /// Spectrum of ρ, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self.mat.as_ref())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    pub fn vectorize(&self) -> Vec<C64> {
        vectorize(self.mat.as_ref())
    }
}

pub fn trace(m: MatRef<'_, C64>) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `‖M − M†‖_F`.
pub fn hermiticity_error(m: MatRef<'_, C64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn hermitian_part(m: MatRef<'_, C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

pub fn frobenius(m: MatRef<'_, C64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn frobenius_distance(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::EigenSolver(format!("{e:?}")))
}

pub fn vectorize(m: MatRef<'_, C64>) -> Vec<C64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * m.ncols());
    for j in 0..m.ncols() {
        for i in 0..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn devectorize(v: &[C64]) -> Result<Mat<C64>> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(Error::Structural(format!("length {} is not a perfect square", v.len())));
    }
    Ok(Mat::from_fn(n, n, |i, j| v[i + n * j]))
}
