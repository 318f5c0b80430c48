//! Random-matrix ensembles and data covariance matrices.
//!
//! The two classical ensembles are the symmetrized complex Gaussian matrix
//! (GUE) and the sample covariance of a Gaussian panel (LUE). Observed
//! sensor panels enter the pipeline through [`covariance`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// An N x T real panel: rows are spatial points, columns are time samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    row_labels: Option<Vec<String>>,
    dt: Option<f64>,
}

impl DataMatrix {
    /// Build a panel from a column-major matrix. Requires N >= 2, T >= 2 and
    /// finite entries.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() < 2 || values.ncols() < 2 {
            return Err(Error::InvalidDimension(format!(
                "panel must be at least 2x2, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data panel"));
        }
        Ok(Self {
            values,
            row_labels: None,
            dt: None,
        })
    }

    /// Build a panel from row slices.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let t = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != t) {
            return Err(Error::InvalidDimension("ragged rows in panel".into()));
        }
        let values = DMatrix::from_fn(n, t, |i, j| rows[i][j]);
        Self::new(values)
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::InvalidDimension(format!(
                "{} labels for {} rows",
                labels.len(),
                self.n()
            )));
        }
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn t(&self) -> usize {
        self.values.ncols()
    }

    /// Aspect ratio c = N/T.
    pub fn ratio(&self) -> f64 {
        self.n() as f64 / self.t() as f64
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn dt(&self) -> Option<f64> {
        self.dt
    }

    /// Shift every row to zero mean and unit variance (population convention,
    /// so a standardized row satisfies sum(x^2)/T = 1 exactly).
    pub fn standardized(&self) -> Result<DataMatrix> {
        let t = self.t() as f64;
        let mut out = self.values.clone();
        for (index, mut row) in out.row_iter_mut().enumerate() {
            let mean = row.sum() / t;
            row.add_scalar_mut(-mean);
            let var = row.iter().map(|x| x * x).sum::<f64>() / t;
            if var <= 0.0 || !var.is_finite() {
                return Err(Error::DegenerateRow { index });
            }
            row.scale_mut(1.0 / var.sqrt());
        }
        Ok(DataMatrix {
            values: out,
            row_labels: self.row_labels.clone(),
            dt: self.dt,
        })
    }
}

/// Which construction produced a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixOrigin {
    Gue,
    Lue,
    Covariance,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Real symmetric storage.
    Dense(DMatrix<f64>),
    /// Spectrum-only storage (ascending eigenvalues). Used for the complex
    /// Hermitian GUE, whose downstream consumers need only eigenvalues.
    Spectral(Vec<f64>),
}

/// A real-spectrum Hermitian matrix together with its provenance and shape
/// metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    repr: Repr,
    origin: MatrixOrigin,
    /// Number of time samples behind a covariance-type matrix.
    t: Option<usize>,
}

impl HermitianMatrix {
    /// Wrap a dense real symmetric matrix. Symmetry is enforced to 1e-12
    /// relative.
    pub fn from_dense(values: DMatrix<f64>, origin: MatrixOrigin, t: Option<usize>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::InvalidDimension(format!(
                "{}x{} matrix is not square",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hermitian matrix"));
        }
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut max_asym = 0.0f64;
        for i in 0..values.nrows() {
            for j in 0..i {
                max_asym = max_asym.max((values[(i, j)] - values[(j, i)]).abs());
            }
        }
        if max_asym > 1e-12 * scale {
            return Err(Error::NotSymmetric {
                max_asymmetry: max_asym / scale,
            });
        }
        Ok(Self {
            repr: Repr::Dense(values),
            origin,
            t,
        })
    }

    fn from_spectrum(mut eigenvalues: Vec<f64>, origin: MatrixOrigin) -> Self {
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Self {
            repr: Repr::Spectral(eigenvalues),
            origin,
            t: None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Dense(m) => m.nrows(),
            Repr::Spectral(e) => e.len(),
        }
    }

    pub fn origin(&self) -> MatrixOrigin {
        self.origin
    }

    /// Time-sample count for LUE/covariance matrices.
    pub fn time_samples(&self) -> Option<usize> {
        self.t
    }

    /// Dense entries, when the matrix is stored densely.
    pub fn as_dense(&self) -> Option<&DMatrix<f64>> {
        match &self.repr {
            Repr::Dense(m) => Some(m),
            Repr::Spectral(_) => None,
        }
    }

    /// Precomputed spectrum, when the matrix is stored spectrally.
    pub(crate) fn as_spectrum(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Spectral(e) => Some(e),
            Repr::Dense(_) => None,
        }
    }

    /// Entry-wise sum of two densely stored matrices of equal dimension.
    pub fn try_add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        let (a, b) = match (self.as_dense(), other.as_dense()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::InvalidDimension(
                    "matrix sum requires dense storage on both sides".into(),
                ))
            }
        };
        if a.nrows() != b.nrows() {
            return Err(Error::InvalidDimension(format!(
                "cannot add {}x{} to {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        HermitianMatrix::from_dense(a + b, MatrixOrigin::Covariance, self.t.or(other.t))
    }
}

/// Sample the symmetrized complex Gaussian ensemble (C + C^H) / (2 sqrt n)
/// with C an n x n matrix of i.i.d. standard complex Gaussians. The result is
/// stored spectrally: the complex Hermitian matrix is eigensolved immediately
/// and only its (real) spectrum is kept.
pub fn sample_gue(n: usize, seed: u64) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("GUE dimension must be >= 1".into()));
    }
    let mut rng = rng::stream(seed);
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let (re, im) = rng::gaussian_pair(&mut rng);
            c[(i, j)] = Complex64::new(re, im);
        }
    }
    let h = (&c + c.adjoint()) / Complex64::new(2.0 * (n as f64).sqrt(), 0.0);
    let eig = h.symmetric_eigenvalues();
    Ok(HermitianMatrix::from_spectrum(
        eig.iter().copied().collect(),
        MatrixOrigin::Gue,
    ))
}

/// Sample the Laguerre ensemble R R^T / t with R an n x t matrix of i.i.d.
/// standard real Gaussians. Requires n <= t (c = n/t <= 1).
pub fn sample_lue(n: usize, t: usize, seed: u64) -> Result<HermitianMatrix> {
    if n == 0 || t == 0 {
        return Err(Error::InvalidDimension("LUE dimensions must be >= 1".into()));
    }
    if n > t {
        return Err(Error::InvalidRatio { n, t });
    }
    let mut rng = rng::stream(seed);
    let data = rng::gaussian_vec(&mut rng, n * t);
    let r = DMatrix::from_vec(n, t, data);
    let x = &r * r.transpose() / t as f64;
    HermitianMatrix::from_dense(x, MatrixOrigin::Lue, Some(t))
}

/// Covariance matrix X X^T / T of a panel, optionally standardizing each row
/// to zero mean and unit variance first. Standardized covariances have unit
/// diagonal by construction.
pub fn covariance(data: &DataMatrix, standardize: bool) -> Result<HermitianMatrix> {
    let panel;
    let x = if standardize {
        panel = data.standardized()?;
        panel.values()
    } else {
        data.values()
    };
    let t = data.t();
    let cov = x * x.transpose() / t as f64;
    // Symmetrize away the last-bit noise from the matrix product.
    let cov = (&cov + cov.transpose()) / 2.0;
    HermitianMatrix::from_dense(cov, MatrixOrigin::Covariance, Some(t))
}
