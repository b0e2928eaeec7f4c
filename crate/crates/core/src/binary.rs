//! Two-variable arithmetic, harmonic and geometric means.

use crate::error::{Error, Result};
use crate::linalg::{
    congruence, loewner_margin, relative_frobenius, InvertibleMatrix, SpdMatrix, SymMatrix,
};
use crate::metrics::weighted_geometric;
use crate::report::{Check, Report, Tolerance};

fn same_dim(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `A # B`, the midpoint of the geodesic from `A` to `B`.
pub fn geometric_mean(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    weighted_geometric(a, b, 0.5)
}

/// `(A + B)/2`.
pub fn arithmetic_mean(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    same_dim(a, b)?;
    Ok(SpdMatrix::from_raw((a.matrix() + b.matrix()) * 0.5))
}

/// `2 (A⁻¹ + B⁻¹)⁻¹`.
pub fn harmonic_mean(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    same_dim(a, b)?;
    let sum = SpdMatrix::from_raw(a.inverse().matrix() + b.inverse().matrix());
    Ok(SpdMatrix::from_raw(sum.inverse().matrix() * 2.0))
}

/// Relative residual `‖X A⁻¹ X − B‖₂ / ‖B‖₂` of the Riccati equation whose
/// unique positive definite solution is `A # B`.
pub fn riccati_residual(a: &SpdMatrix, b: &SpdMatrix, x: &SpdMatrix) -> Result<f64> {
    same_dim(a, b)?;
    same_dim(a, x)?;
    let lhs = x.matrix() * a.inverse().matrix() * x.matrix();
    Ok((lhs - b.matrix()).norm() / b.frobenius_norm())
}

/// Evaluates the six basic properties of the binary geometric mean.
///
/// Monotonicity is tested on `C = A − P ≤ A`, `D = B − Q ≤ B` where
/// `P ∝ M Mᵀ` and `Q ∝ Mᵀ M` are scaled to spectral norm `λ_min/10` of `A`
/// and `B`. Property (v) compares `A # I` with `A^{1/2}`, `A # K` with
/// `A^{1/2} K^{1/2}` for a `K` sharing `A`'s eigenvectors, and `A # B` with
/// `A^{1/2} B^{1/2}` when `A` and `B` already commute.
pub fn check_basic_properties(
    a: &SpdMatrix,
    b: &SpdMatrix,
    m: &InvertibleMatrix,
    tol: Tolerance,
) -> Result<Report> {
    same_dim(a, b)?;
    if m.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: m.dim(),
        });
    }
    let mut report = Report::default();
    let ab = geometric_mean(a, b)?;

    let ba = geometric_mean(b, a)?;
    report.push(Check::equality(
        "(i) commutativity",
        relative_frobenius(&ab, &ba),
        tol.residual,
    ));

    let lhs = congruence(m, &ab)?;
    let rhs = geometric_mean(&congruence(m, a)?, &congruence(m, b)?)?;
    report.push(Check::equality(
        "(ii) congruence invariance",
        relative_frobenius(&lhs, &rhs),
        tol.residual,
    ));

    let lhs = ab.inverse();
    let rhs = geometric_mean(&a.inverse(), &b.inverse())?;
    report.push(Check::equality(
        "(iii) inversion invariance",
        relative_frobenius(&lhs, &rhs),
        tol.residual,
    ));

    let mm = m.matrix();
    let p = shrink_psd(SymMatrix::from_raw(mm * mm.transpose()), a);
    let q = shrink_psd(SymMatrix::from_raw(mm.transpose() * mm), b);
    let c = SpdMatrix::new(a.as_sym() - &p)?;
    let d = SpdMatrix::new(b.as_sym() - &q)?;
    let cd = geometric_mean(&c, &d)?;
    report.push(Check::order(
        "(iv) monotonicity",
        loewner_margin(&cd, &ab)?,
        tol.slack,
    ));

    let id = SpdMatrix::identity(a.dim());
    let mut residual = relative_frobenius(&geometric_mean(a, &id)?, &a.sqrt());
    let spectrum = a.spectrum();
    let partner = SpdMatrix::from_raw(spectrum.compose_with(b.eigenvalues()));
    let product = SymMatrix::from_raw(a.sqrt().matrix() * partner.sqrt().matrix());
    residual = residual.max(relative_frobenius(&geometric_mean(a, &partner)?, &product));
    if a.as_sym().commutes_with(b.as_sym(), 1e-12) {
        let product = SymMatrix::from_raw(a.sqrt().matrix() * b.sqrt().matrix());
        residual = residual.max(relative_frobenius(&ab, &product));
    }
    report.push(Check::equality(
        "(v) commuting case",
        residual,
        tol.residual,
    ));

    let h = harmonic_mean(a, b)?;
    let ar = arithmetic_mean(a, b)?;
    let margin = loewner_margin(&h, &ab)?.min(loewner_margin(&ab, &ar)?);
    report.push(Check::order("(vi) AGM inequality", margin, tol.slack));

    Ok(report)
}

/// Rescales the positive semidefinite `p` to spectral norm `λ_min(a)/10`.
fn shrink_psd(p: SymMatrix, a: &SpdMatrix) -> SymMatrix {
    let norm = p.spectral_norm();
    p.scale(0.1 * a.eigenvalues()[0] / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::loewner_leq;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn commuting_geometric_mean() {
        let g = geometric_mean(&diag(&[1.0, 4.0]), &diag(&[4.0, 1.0])).unwrap();
        assert!(relative_frobenius(&g, &diag(&[2.0, 2.0])) < 1e-15);
    }

    #[test]
    fn mean_with_inverse_is_identity() {
        let a = SpdMatrix::from_rows(&[
            vec![3.0, 1.0, 0.2],
            vec![1.0, 2.0, 0.5],
            vec![0.2, 0.5, 1.0],
        ])
        .unwrap();
        let g = geometric_mean(&a, &a.inverse()).unwrap();
        assert!(relative_frobenius(&g, &SpdMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn mean_with_identity_is_square_root() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let g = geometric_mean(&a, &SpdMatrix::identity(2)).unwrap();
        // sqrt([[2,1],[1,1]]) = [[a,b],[b,c]] with a² + b² = 2, b(a + c) = 1, b² + c² = 1
        // solved through the trace identity √det = 1, tr √A = √(tr A + 2√det) = √5:
        // √A = (A + I)/√5
        let s5 = 5f64.sqrt();
        let expected =
            SpdMatrix::from_rows(&[vec![3.0 / s5, 1.0 / s5], vec![1.0 / s5, 2.0 / s5]]).unwrap();
        assert!(relative_frobenius(&g, &expected) < 1e-14);
        assert!(relative_frobenius(&a.sqrt(), &expected) < 1e-14);
    }

    #[test]
    fn riccati_is_satisfied() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.4], vec![0.4, 1.0]]).unwrap();
        let b = SpdMatrix::from_rows(&[vec![1.0, -0.3], vec![-0.3, 5.0]]).unwrap();
        let g = geometric_mean(&a, &b).unwrap();
        assert!(riccati_residual(&a, &b, &g).unwrap() <= 1e-9);
    }

    #[test]
    fn arithmetic_and_harmonic() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.4], vec![0.4, 1.0]]).unwrap();
        assert!(relative_frobenius(&arithmetic_mean(&a, &a).unwrap(), &a) < 1e-15);
        assert!(relative_frobenius(&harmonic_mean(&a, &a).unwrap(), &a) < 1e-14);
        let i = SpdMatrix::identity(2);
        let three = diag(&[3.0, 3.0]);
        assert!(
            relative_frobenius(&arithmetic_mean(&i, &three).unwrap(), &diag(&[2.0, 2.0])) < 1e-15
        );
        assert!(
            relative_frobenius(&harmonic_mean(&i, &three).unwrap(), &diag(&[1.5, 1.5])) < 1e-15
        );
    }

    #[test]
    fn agm_chain_on_a_pair() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.4], vec![0.4, 1.0]]).unwrap();
        let b = SpdMatrix::from_rows(&[vec![1.0, -0.3], vec![-0.3, 5.0]]).unwrap();
        let g = geometric_mean(&a, &b).unwrap();
        assert!(loewner_leq(&harmonic_mean(&a, &b).unwrap(), &g, 1e-9).unwrap());
        assert!(loewner_leq(&g, &arithmetic_mean(&a, &b).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn identity_inputs_have_zero_residuals() {
        let i = SpdMatrix::identity(3);
        let report =
            check_basic_properties(&i, &i, &InvertibleMatrix::identity(3), Tolerance::default())
                .unwrap();
        assert_eq!(report.checks.len(), 6);
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
            assert!(c.residual.abs() < 1e-15, "{c:?}");
        }
    }

    #[test]
    fn commuting_inputs_property_v() {
        let a = diag(&[1.0, 4.0, 2.5]);
        let b = diag(&[3.0, 0.5, 7.0]);
        let m = InvertibleMatrix::from_rows(&[
            vec![1.0, 0.2, 0.0],
            vec![0.0, 1.0, 0.3],
            vec![0.1, 0.0, 1.0],
        ])
        .unwrap();
        let report = check_basic_properties(&a, &b, &m, Tolerance::default()).unwrap();
        assert!(report.all_passed());
        assert!(report.get("(v)").unwrap().residual <= 1e-10);
    }
}
