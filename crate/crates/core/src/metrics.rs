//! Riemannian and Thompson metrics, geodesics, and the semiparallelogram law.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sandwich, symmetric_eigenvalues, SpdMatrix};

/// Absolute and relative tolerance used when comparing metric values.
pub const METRIC_ABS_TOL: f64 = 1e-9;
pub const METRIC_REL_TOL: f64 = 1e-9;
/// Slack in the semiparallelogram inequality.
pub const NPC_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricTag {
    Riemannian,
    Thompson,
}

impl fmt::Display for MetricTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricTag::Riemannian => "riemannian",
            MetricTag::Thompson => "thompson",
        })
    }
}

impl FromStr for MetricTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "riemannian" => Ok(MetricTag::Riemannian),
            "thompson" => Ok(MetricTag::Thompson),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

/// Whether two metric values agree to `1e-9` absolute plus `1e-9` relative.
pub fn metric_values_close(x: f64, y: f64) -> bool {
    (x - y).abs() <= METRIC_ABS_TOL + METRIC_REL_TOL * x.abs().max(y.abs())
}

fn same_dim(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `A^{-1/2} B A^{-1/2}` formed explicitly so that it stays symmetric.
pub(crate) fn whiten(a: &SpdMatrix, b: &SpdMatrix) -> DMatrix<f64> {
    sandwich(a.inv_sqrt().matrix(), b.matrix())
}

/// Eigenvalues of `A^{-1/2} B A^{-1/2}`, ascending.
pub fn relative_eigenvalues(a: &SpdMatrix, b: &SpdMatrix) -> Result<Vec<f64>> {
    same_dim(a, b)?;
    symmetric_eigenvalues(&whiten(a, b))
}

/// `δ(A, B) = ‖log(A^{-1/2} B A^{-1/2})‖₂ = (Σ log² λ_i)^{1/2}`.
pub fn delta(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let values = relative_eigenvalues(a, b)?;
    Ok(values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

/// `d_T(A, B) = max |log λ_i|` over the eigenvalues of `A^{-1/2} B A^{-1/2}`.
pub fn thompson(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let values = relative_eigenvalues(a, b)?;
    Ok(values.iter().fold(0.0_f64, |acc, l| acc.max(l.ln().abs())))
}

pub fn distance(metric: MetricTag, a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    match metric {
        MetricTag::Riemannian => delta(a, b),
        MetricTag::Thompson => thompson(a, b),
    }
}

/// The geodesic point `A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
///
/// The endpoints `t = 0` and `t = 1` return `A` and `B` unchanged.
pub fn weighted_geometric(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    same_dim(a, b)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "geodesic parameter must lie in [0, 1], got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(a.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    Ok(geodesic_unchecked(a, b, t))
}

pub(crate) fn geodesic_unchecked(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> SpdMatrix {
    let inner = SpdMatrix::from_raw(whiten(a, b)).power(t);
    SpdMatrix::from_raw(sandwich(a.sqrt().matrix(), inner.matrix()))
}

/// `A #_t B` together with `δ(A, B)`, sharing one eigendecomposition.
pub(crate) fn geodesic_with_delta(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> (SpdMatrix, f64) {
    let whitened = SpdMatrix::from_raw(whiten(a, b));
    let d = whitened
        .eigenvalues()
        .iter()
        .map(|l| l.ln().powi(2))
        .sum::<f64>()
        .sqrt();
    let inner = whitened.power(t);
    (
        SpdMatrix::from_raw(sandwich(a.sqrt().matrix(), inner.matrix())),
        d,
    )
}

/// Both sides of the semiparallelogram inequality
/// `δ²(x1, x2) + 4 δ²(x, m) ≤ 2 δ²(x, x1) + 2 δ²(x, x2)` with `m = x1 # x2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NpcReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn npc_check(x1: &SpdMatrix, x2: &SpdMatrix, x: &SpdMatrix) -> Result<NpcReport> {
    same_dim(x1, x2)?;
    same_dim(x1, x)?;
    let m = weighted_geometric(x1, x2, 0.5)?;
    let lhs = delta(x1, x2)?.powi(2) + 4.0 * delta(x, &m)?.powi(2);
    let rhs = 2.0 * delta(x, x1)?.powi(2) + 2.0 * delta(x, x2)?.powi(2);
    Ok(NpcReport {
        lhs,
        rhs,
        holds: lhs <= rhs + NPC_SLACK,
    })
}
