//! Dense real symmetric linear algebra.
//!
//! [`SymMatrix`] holds an exactly symmetric matrix, [`SpdMatrix`] adds the
//! positive definiteness guarantee and a write-once cache of its spectral
//! decomposition, and [`InvertibleMatrix`] carries the congruence factors
//! `M` used in `X -> M X Mᵀ`. All matrix functions act on the spectrum
//! eigenvector by eigenvector, so there is no need to cluster eigenvalues
//! except when reporting eigenprojections.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Maximum tolerated asymmetry, relative to the largest absolute entry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// A matrix is accepted as positive definite when
/// `λ_min > dim · PD_TOL · λ_max`.
pub const PD_TOL: f64 = 1e-14;
/// Relative tolerance used to group equal eigenvalues into eigenprojections.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-10;
/// Smallest admissible LU pivot magnitude for [`InvertibleMatrix`].
pub const PIVOT_THRESHOLD: f64 = 1e-300;
/// Default slack for [`loewner_leq`].
pub const DEFAULT_LOEWNER_SLACK: f64 = 1e-9;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 30;

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Empty);
    }
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// `(M + Mᵀ)/2`, which is exactly symmetric in floating point.
pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// `S X S` for symmetric `S`, symmetrized.
pub(crate) fn sandwich(outer: &DMatrix<f64>, inner: &DMatrix<f64>) -> DMatrix<f64> {
    symmetrize(&(outer * inner * outer))
}

/// A real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    /// Validates squareness and symmetry, then symmetrizes as `(A + Aᵀ)/2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        let n = m.nrows();
        let scale = m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        let mut asym = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric {
                asymmetry: asym / scale,
            });
        }
        Ok(Self {
            data: symmetrize(&m),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub(crate) fn from_raw(m: DMatrix<f64>) -> Self {
        Self {
            data: symmetrize(&m),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty);
        }
        Self::new(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(diag),
        ))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    /// Square root of the sum of squared entries, equal to `(Σ λ_i²)^{1/2}`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        symmetric_eigenvalues(&self.data)
            .map(|v| v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs())))
            .expect("Jacobi sweep on a symmetric matrix")
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(&self.data)
    }

    pub fn spectral_decompose(&self) -> Result<Spectrum> {
        spectral_decompose(self)
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        Self {
            data: &self.data * c,
        }
    }

    /// Matrix exponential. The result is always positive definite.
    pub fn exp(&self) -> SpdMatrix {
        let spectrum = spectral_decompose(self).expect("Jacobi sweep on a symmetric matrix");
        let (data, spectrum) = spectrum.map_monotone(f64::exp, true);
        SpdMatrix::with_spectrum(data, spectrum)
    }

    /// Whether `A B = B A` up to `rel_tol · ‖A‖ ‖B‖` in Frobenius norm.
    pub fn commutes_with(&self, other: &SymMatrix, rel_tol: f64) -> bool {
        let ab = &self.data * &other.data;
        let ba = &other.data * &self.data;
        (ab - ba).norm() <= rel_tol * self.frobenius_norm() * other.frobenius_norm()
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        SymMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        SymMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        self.scale(rhs)
    }
}

impl AsRef<SymMatrix> for SymMatrix {
    fn as_ref(&self) -> &SymMatrix {
        self
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Pairs `(λ_i, v_i)`.
    pub fn pairs(&self) -> Vec<(f64, Vec<f64>)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, self.vectors.column(i).iter().copied().collect()))
            .collect()
    }

    /// Distinct eigenvalues with their orthogonal eigenprojections
    /// `E_i = Σ v vᵀ`, grouping eigenvalues within `rel_tol · max|λ|`.
    pub fn eigenprojections(&self, rel_tol: f64) -> Vec<(f64, SymMatrix)> {
        let n = self.values.len();
        let scale = self
            .values
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        let mut out: Vec<(f64, SymMatrix)> = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && self.values[end] - self.values[start] <= rel_tol * scale {
                end += 1;
            }
            let mut proj = DMatrix::zeros(n, n);
            for k in start..end {
                let v = self.vectors.column(k);
                proj += v * v.transpose();
            }
            let mean = self.values[start..end].iter().sum::<f64>() / (end - start) as f64;
            out.push((mean, SymMatrix::from_raw(proj)));
            start = end;
        }
        out
    }

    /// `V diag(f(λ)) Vᵀ`, symmetrized.
    pub(crate) fn compose(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let values: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.compose_with(&values)
    }

    /// `V diag(values) Vᵀ` with the given values in column order.
    pub(crate) fn compose_with(&self, values: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, &fl) in values.iter().enumerate() {
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= fl);
        }
        symmetrize(&(scaled * self.vectors.transpose()))
    }

    /// Applies a strictly monotone `f` and returns both the recomposed matrix
    /// and the spectrum of the result (reordered when `f` is decreasing).
    pub(crate) fn map_monotone(
        &self,
        f: impl Fn(f64) -> f64,
        increasing: bool,
    ) -> (DMatrix<f64>, Spectrum) {
        let data = self.compose(&f);
        let n = self.values.len();
        let spectrum = if increasing {
            Spectrum {
                values: self.values.iter().map(|&l| f(l)).collect(),
                vectors: self.vectors.clone(),
            }
        } else {
            Spectrum {
                values: self.values.iter().rev().map(|&l| f(l)).collect(),
                vectors: DMatrix::from_fn(n, n, |r, c| self.vectors[(r, n - 1 - c)]),
            }
        };
        (data, spectrum)
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[j * n + i] * a[j * n + i];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on a column-major `n × n` buffer. Returns the number of
/// sweeps performed; `v`, when given, accumulates the rotations.
fn jacobi_in_place(a: &mut [f64], n: usize, mut v: Option<&mut [f64]>) -> Result<usize> {
    let total = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * total;
    let mut sweeps = 0;
    while off_diagonal_norm(a, n) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[q * n + p];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[p * n + k];
                    let akq = a[q * n + k];
                    a[p * n + k] = c * akp - s * akq;
                    a[q * n + k] = s * akp + c * akq;
                }
                // A <- Jᵀ A
                for k in 0..n {
                    let apk = a[k * n + p];
                    let aqk = a[k * n + q];
                    a[k * n + p] = c * apk - s * aqk;
                    a[k * n + q] = s * apk + c * aqk;
                }
                a[q * n + p] = 0.0;
                a[p * n + q] = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[p * n + k];
                        let vkq = v[q * n + k];
                        v[p * n + k] = c * vkp - s * vkq;
                        v[q * n + k] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Ok(sweeps)
}

fn ascending_order(a: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    order
}

pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut a = m.as_slice().to_vec();
    jacobi_in_place(&mut a, n, None)?;
    let order = ascending_order(&a, n);
    Ok(order.iter().map(|&i| a[i * n + i]).collect())
}

/// Spectral decomposition by cyclic Jacobi rotations: eigenvalues ascending,
/// eigenvectors orthonormal.
pub fn spectral_decompose(a: &SymMatrix) -> Result<Spectrum> {
    let n = a.dim();
    let mut buf = a.data.as_slice().to_vec();
    let mut v = DMatrix::<f64>::identity(n, n);
    jacobi_in_place(&mut buf, n, Some(v.as_mut_slice()))?;
    let order = ascending_order(&buf, n);
    Ok(Spectrum {
        values: order.iter().map(|&i| buf[i * n + i]).collect(),
        vectors: DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]),
    })
}

fn check_positive_spectrum(values: &[f64]) -> Result<()> {
    let n = values.len() as f64;
    let min = values[0];
    let max = values[values.len() - 1];
    if !(min > 0.0 && min > n * PD_TOL * max) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// A symmetric positive definite matrix with a write-once spectral cache.
#[derive(Clone, Debug)]
pub struct SpdMatrix {
    base: SymMatrix,
    spectrum: OnceLock<Spectrum>,
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl AsRef<SymMatrix> for SpdMatrix {
    fn as_ref(&self) -> &SymMatrix {
        &self.base
    }
}

/// Serialized as a list of rows.
impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

/// Serialized as a list of rows.
impl Serialize for SpdMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.base.serialize(serializer)
    }
}

impl SpdMatrix {
    /// Validates positive definiteness (`λ_min > dim · 1e-14 · λ_max`) and
    /// caches the spectrum.
    pub fn new(base: SymMatrix) -> Result<Self> {
        let spectrum = spectral_decompose(&base)?;
        check_positive_spectrum(&spectrum.values)?;
        Ok(Self {
            base,
            spectrum: OnceLock::from(spectrum),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SymMatrix::from_rows(rows)?)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_diagonal(diag)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(SymMatrix::identity(dim)).expect("identity is positive definite")
    }

    /// Wraps a matrix known to be positive definite by construction; the
    /// spectrum is computed on first use.
    pub(crate) fn from_raw(m: DMatrix<f64>) -> Self {
        Self {
            base: SymMatrix::from_raw(m),
            spectrum: OnceLock::new(),
        }
    }

    pub(crate) fn with_spectrum(m: DMatrix<f64>, spectrum: Spectrum) -> Self {
        Self {
            base: SymMatrix::from_raw(m),
            spectrum: OnceLock::from(spectrum),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.base.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.base.to_rows()
    }

    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| {
            spectral_decompose(&self.base).expect("Jacobi sweep on a symmetric matrix")
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum().values()
    }

    fn mapped(&self, f: impl Fn(f64) -> f64, increasing: bool) -> SpdMatrix {
        let (data, spectrum) = self.spectrum().map_monotone(f, increasing);
        SpdMatrix::with_spectrum(data, spectrum)
    }

    pub fn sqrt(&self) -> SpdMatrix {
        self.mapped(f64::sqrt, true)
    }

    pub fn inv_sqrt(&self) -> SpdMatrix {
        self.mapped(|l| 1.0 / l.sqrt(), false)
    }

    pub fn inverse(&self) -> SpdMatrix {
        self.mapped(|l| 1.0 / l, false)
    }

    /// `A^p = Σ λ_i^p v_i v_iᵀ`, with eigenvalue powers taken as
    /// `exp(p · ln λ)`; `p = ±1/2` and `p = ±1` use the exact paths.
    pub fn power(&self, p: f64) -> SpdMatrix {
        if p == 0.5 {
            self.sqrt()
        } else if p == -0.5 {
            self.inv_sqrt()
        } else if p == 1.0 {
            self.clone()
        } else if p == -1.0 {
            self.inverse()
        } else if p == 0.0 {
            SpdMatrix::identity(self.dim())
        } else {
            self.mapped(|l| (p * l.ln()).exp(), p > 0.0)
        }
    }

    pub fn log(&self) -> SymMatrix {
        SymMatrix::from_raw(self.spectrum().compose(f64::ln))
    }

    pub fn determinant(&self) -> f64 {
        self.eigenvalues().iter().product()
    }

    pub fn log_determinant(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l.ln()).sum()
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.base.frobenius_norm()
    }

    /// `c · A` for `c > 0`.
    pub fn scale(&self, c: f64) -> Result<SpdMatrix> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        let (data, spectrum) = self.spectrum().map_monotone(|l| c * l, true);
        Ok(SpdMatrix::with_spectrum(data, spectrum))
    }
}

/// Scalar tag selecting one of the spectral matrix functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Sqrt,
    Log,
    Exp,
    Power(f64),
}

/// Applies `f` eigenvalue-wise to `a`. `Exp` treats `a` as a symmetric
/// matrix; the other tags use its positive spectrum.
pub fn matrix_function(a: &SpdMatrix, f: MatrixFunction) -> SymMatrix {
    match f {
        MatrixFunction::Sqrt => a.sqrt().base,
        MatrixFunction::Log => a.log(),
        MatrixFunction::Exp => a.as_sym().exp().base,
        MatrixFunction::Power(p) => a.power(p).base,
    }
}

/// `λ_min(B − A) / max(1, ‖B − A‖₂)`; nonnegative iff `A ≤ B`.
pub fn loewner_margin(a: &impl AsRef<SymMatrix>, b: &impl AsRef<SymMatrix>) -> Result<f64> {
    let (a, b) = (a.as_ref(), b.as_ref());
    check_dims(a.dim(), b.dim())?;
    let diff = b - a;
    let values = diff.eigenvalues()?;
    let norm = values.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Ok(values[0] / norm.max(1.0))
}

/// `A ≤ B` in the Loewner order: `λ_min(B − A) ≥ −slack · max(1, ‖B − A‖₂)`.
pub fn loewner_leq(
    a: &impl AsRef<SymMatrix>,
    b: &impl AsRef<SymMatrix>,
    slack: f64,
) -> Result<bool> {
    Ok(loewner_margin(a, b)? >= -slack)
}

/// An invertible real matrix, the factor of a congruence transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertibleMatrix {
    data: DMatrix<f64>,
}

impl InvertibleMatrix {
    /// Accepts `m` when every LU pivot exceeds [`PIVOT_THRESHOLD`] in magnitude.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        let lu = m.clone().lu();
        let u = lu.u();
        let pivot = u
            .diagonal()
            .iter()
            .fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
        if pivot <= PIVOT_THRESHOLD {
            return Err(Error::Singular { pivot });
        }
        Ok(Self { data: m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Spectral norm of `M Mᵀ`, i.e. `‖M‖₂²`.
    pub fn gram_norm(&self) -> f64 {
        SymMatrix::from_raw(&self.data * self.data.transpose()).spectral_norm()
    }
}

/// `M A Mᵀ`, validated as positive definite.
pub fn congruence(m: &InvertibleMatrix, a: &SpdMatrix) -> Result<SpdMatrix> {
    check_dims(m.dim(), a.dim())?;
    let out = &m.data * a.matrix() * m.data.transpose();
    SpdMatrix::new(SymMatrix::from_raw(out))
}

/// `M A Mᵀ` for a symmetric (not necessarily definite) `A`.
pub fn congruence_sym(m: &InvertibleMatrix, a: &SymMatrix) -> Result<SymMatrix> {
    check_dims(m.dim(), a.dim())?;
    Ok(SymMatrix::from_raw(
        &m.data * a.matrix() * m.data.transpose(),
    ))
}

pub fn frobenius_norm(a: &impl AsRef<SymMatrix>) -> f64 {
    a.as_ref().frobenius_norm()
}

pub fn trace(a: &impl AsRef<SymMatrix>) -> f64 {
    a.as_ref().trace()
}

pub fn determinant(a: &SpdMatrix) -> f64 {
    a.determinant()
}

/// Relative Frobenius distance `‖A − B‖₂ / max(‖B‖₂, tiny)`.
pub fn relative_frobenius(a: &impl AsRef<SymMatrix>, b: &impl AsRef<SymMatrix>) -> f64 {
    let (a, b) = (a.as_ref(), b.as_ref());
    (a.matrix() - b.matrix()).norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn spd(rows: &[&[f64]]) -> SpdMatrix {
        SpdMatrix::new(sym(rows)).unwrap()
    }

    #[test]
    fn rejects_asymmetric_and_non_square() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { .. }));
        assert_eq!(SymMatrix::from_rows(&[]).unwrap_err(), Error::Empty);
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let s = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-15, 1.0]]).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn diagonal_decomposition() {
        let s = spectral_decompose(&sym(&[&[4.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(s.values(), &[1.0, 4.0]);
        assert!((s.vectors()[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((s.vectors()[(0, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_has_triple_eigenvalue() {
        let s = spectral_decompose(&SymMatrix::identity(3)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0]);
        let proj = s.eigenprojections(EIGEN_CLUSTER_TOL);
        assert_eq!(proj.len(), 1);
        assert!(relative_frobenius(&proj[0].1, &SymMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn two_by_two_hand_solved() {
        // det([[2-λ,1],[1,2-λ]]) = (2-λ)² - 1 = 0  =>  λ = 1, 3
        let s = spectral_decompose(&sym(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-14);
        assert!((s.values()[1] - 3.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = s.vectors().column(0);
        let v1 = s.vectors().column(1);
        // (1,-1)/√2 and (1,1)/√2 up to sign
        assert!((v0[0] * v0[1] + 0.5).abs() < 1e-14);
        assert!((v0[0].abs() - h).abs() < 1e-14);
        assert!((v1[0] * v1[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn matrix_functions_on_simple_inputs() {
        let d = SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let r = d.sqrt();
        assert!(relative_frobenius(&r, &SymMatrix::from_diagonal(&[2.0, 3.0]).unwrap()) < 1e-15);
        let l = SpdMatrix::identity(3).log();
        assert_eq!(l.frobenius_norm(), 0.0);

        let a = spd(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let root = a.sqrt();
        let sq = SymMatrix::from_raw(root.matrix() * root.matrix());
        assert!((sq.matrix() - a.matrix()).norm() <= 1e-12);
        assert_eq!(a.power(0.5), a.sqrt());
        assert_eq!(
            matrix_function(&a, MatrixFunction::Power(0.5)),
            matrix_function(&a, MatrixFunction::Sqrt)
        );
    }

    #[test]
    fn exp_log_round_trip() {
        let a = spd(&[&[3.0, 0.5, 0.1], &[0.5, 2.0, -0.3], &[0.1, -0.3, 1.5]]);
        let back = a.log().exp();
        assert!(relative_frobenius(&back, &a) < 1e-12);
    }

    #[test]
    fn loewner_examples() {
        let i = SymMatrix::identity(2);
        assert!(loewner_leq(&i, &i.scale(2.0), DEFAULT_LOEWNER_SLACK).unwrap());
        assert!(loewner_leq(&i, &i, DEFAULT_LOEWNER_SLACK).unwrap());
        // I₂ vs [[1,2],[2,1]]: difference [[0,2],[2,0]] has eigenvalues ±2
        let b = sym(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(!loewner_leq(&i, &b, DEFAULT_LOEWNER_SLACK).unwrap());
        assert!(matches!(
            loewner_leq(&i, &SymMatrix::identity(3), 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn congruence_examples() {
        let a = spd(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let out = congruence(&InvertibleMatrix::identity(2), &a).unwrap();
        assert_eq!(out, a);
        let m = InvertibleMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let out = congruence(&m, &SpdMatrix::identity(2)).unwrap();
        assert_eq!(out.to_rows(), vec![vec![4.0, 0.0], vec![0.0, 1.0]]);
        assert!(congruence(&m, &SpdMatrix::identity(3)).is_err());
    }

    #[test]
    fn singular_factor_rejected() {
        let err = InvertibleMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn non_positive_definite_rejected() {
        let err = SpdMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap_err();
        match err {
            Error::NotPositiveDefinite { min_eigenvalue } => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        // numerically singular
        assert!(SpdMatrix::from_diagonal(&[1.0, 1e-16]).is_err());
    }

    #[test]
    fn norms_trace_det() {
        let d = SymMatrix::from_diagonal(&[3.0, 4.0]).unwrap();
        assert_eq!(d.frobenius_norm(), 5.0);
        assert_eq!(SpdMatrix::identity(3).determinant(), 1.0);
        let a = sym(&[&[2.0, 1.0], &[1.0, 2.0]]);
        // entrywise: 4 + 1 + 1 + 4 = 10
        assert!((a.frobenius_norm() - 10f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.trace(), 4.0);
        assert!((spd(&[&[2.0, 1.0], &[1.0, 2.0]]).determinant() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn negative_power_reverses_order() {
        let a = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let inv = a.power(-0.25);
        let v = inv.spectrum().values();
        assert!(v[0] < v[1]);
        let fresh = spectral_decompose(inv.as_sym()).unwrap();
        assert!((fresh.values()[0] - v[0]).abs() < 1e-15);
    }
}
