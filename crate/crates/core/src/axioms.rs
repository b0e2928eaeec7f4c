//! Numerical checks of the ten axioms (P1)–(P10) for a multivariable mean.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    congruence, loewner_margin, relative_frobenius, InvertibleMatrix, SpdMatrix, SymMatrix,
};
use crate::metrics::delta;
use crate::multi::{
    alm_mean, check_weighted, karcher_mean, weighted_arithmetic, weighted_harmonic, SolverConfig,
    Weight,
};
use crate::random::{commuting_tuple, random_invertible, random_psd, rng_from_seed};
use crate::report::{Check, Report, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanSelector {
    Alm,
    Karcher,
}

impl MeanSelector {
    /// Evaluates the selected mean. The ALM mean only accepts uniform weights.
    pub fn evaluate(
        self,
        w: &Weight,
        points: &[SpdMatrix],
        cfg: &SolverConfig,
    ) -> Result<SpdMatrix> {
        check_weighted(w, points)?;
        match self {
            MeanSelector::Alm => {
                if !w.is_uniform() {
                    return Err(Error::InvalidWeight(
                        "the ALM mean is defined for uniform weights only".into(),
                    ));
                }
                Ok(alm_mean(points, cfg)?.point)
            }
            MeanSelector::Karcher => Ok(karcher_mean(w, points, cfg)?.point),
        }
    }
}

impl fmt::Display for MeanSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeanSelector::Alm => "alm",
            MeanSelector::Karcher => "karcher",
        })
    }
}

impl FromStr for MeanSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alm" => Ok(MeanSelector::Alm),
            "karcher" => Ok(MeanSelector::Karcher),
            other => Err(Error::InvalidParameter(format!("unknown mean '{other}'"))),
        }
    }
}

/// A weighted tuple together with the auxiliary data the axioms quantify over.
#[derive(Clone, Debug)]
pub struct AxiomInputs {
    pub weight: Weight,
    pub points: Vec<SpdMatrix>,
    /// Pairwise commuting points for (P1).
    pub commuting: Vec<SpdMatrix>,
    /// Positive scalars for (P2).
    pub scalars: Vec<f64>,
    /// Index permutation for (P3).
    pub permutation: Vec<usize>,
    /// A tuple with `points[i] ≤ dominating[i]`, used by (P4), (P5) and (P7).
    pub dominating: Vec<SpdMatrix>,
    /// Congruence for (P6).
    pub congruence: InvertibleMatrix,
    /// Mixing parameter in `[0, 1]` for (P7).
    pub lambda: f64,
}

impl AxiomInputs {
    /// Draws the auxiliary data from `seed`. The dominating tuple adds to each
    /// point a random positive semidefinite matrix of spectral norm equal to
    /// half the point's largest eigenvalue.
    pub fn from_seed(weight: Weight, points: Vec<SpdMatrix>, seed: u64) -> Result<Self> {
        let dim = check_weighted(&weight, &points)?;
        let n = points.len();
        let mut rng = rng_from_seed(seed);
        let commuting = commuting_tuple(n, dim, 0.5, &mut rng);
        let scalars = (0..n)
            .map(|_| 10f64.powf(rng.gen_range(-1.0..1.0)))
            .collect();
        let mut permutation: Vec<usize> = (0..n).collect();
        permutation.shuffle(&mut rng);
        if n > 1 && permutation.iter().enumerate().all(|(i, &p)| i == p) {
            permutation.rotate_left(1);
        }
        let dominating = points
            .iter()
            .map(|a| {
                let bound = 0.5 * a.spectrum().max();
                let p = random_psd(dim, bound, &mut rng);
                SpdMatrix::new(a.as_sym() + &p)
            })
            .collect::<Result<Vec<_>>>()?;
        let congruence = random_invertible(dim, &mut rng);
        let lambda = rng.gen_range(0.0..=1.0);
        Ok(Self {
            weight,
            points,
            commuting,
            scalars,
            permutation,
            dominating,
            congruence,
            lambda,
        })
    }
}

/// `exp(Σ w_k log A_k)`, the weighted geometric mean of commuting points.
fn commuting_product(w: &Weight, points: &[SpdMatrix]) -> SpdMatrix {
    let mut sum = SymMatrix::zeros(points[0].dim());
    for (wk, a) in w.entries().iter().zip(points) {
        sum = &sum + &a.log().scale(*wk);
    }
    sum.exp()
}

/// Evaluates (P1)–(P10) for `mean`. Equalities are relative Frobenius
/// residuals against `tol.residual`; order relations are Loewner margins
/// against `tol.slack`; (P5) passes when
/// `δ(G(𝔸), G(𝔹)) ≤ Σ w_k δ(A_k, B_k) + tol.residual`.
pub fn check_alm_axioms(
    inputs: &AxiomInputs,
    mean: MeanSelector,
    cfg: &SolverConfig,
    tol: Tolerance,
) -> Result<Report> {
    let w = &inputs.weight;
    let a = &inputs.points;
    check_weighted(w, a)?;
    check_weighted(w, &inputs.commuting)?;
    check_weighted(w, &inputs.dominating)?;
    if inputs.scalars.len() != a.len() || inputs.permutation.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: inputs.scalars.len().min(inputs.permutation.len()),
        });
    }
    if !(0.0..=1.0).contains(&inputs.lambda) {
        return Err(Error::InvalidParameter(format!(
            "mixing parameter must lie in [0, 1], got {}",
            inputs.lambda
        )));
    }
    let g = |w: &Weight, points: &[SpdMatrix]| mean.evaluate(w, points, cfg);
    let ga = g(w, a)?;
    let mut report = Report::default();

    let lhs = g(w, &inputs.commuting)?;
    report.push(Check::equality(
        "(P1) consistency with scalars",
        relative_frobenius(&lhs, &commuting_product(w, &inputs.commuting)),
        tol.residual,
    ));

    let scaled = a
        .iter()
        .zip(&inputs.scalars)
        .map(|(x, c)| x.scale(*c))
        .collect::<Result<Vec<_>>>()?;
    let factor: f64 = w
        .entries()
        .iter()
        .zip(&inputs.scalars)
        .map(|(wk, c)| c.powf(*wk))
        .product();
    report.push(Check::equality(
        "(P2) joint homogeneity",
        relative_frobenius(&g(w, &scaled)?, &ga.scale(factor)?),
        tol.residual,
    ));

    let perm_w = Weight::new(inputs.permutation.iter().map(|&i| w.entries()[i]).collect())?;
    let perm_a: Vec<SpdMatrix> = inputs.permutation.iter().map(|&i| a[i].clone()).collect();
    report.push(Check::equality(
        "(P3) permutation invariance",
        relative_frobenius(&g(&perm_w, &perm_a)?, &ga),
        tol.residual,
    ));

    let b = &inputs.dominating;
    let gb = g(w, b)?;
    report.push(Check::order(
        "(P4) monotonicity",
        loewner_margin(&ga, &gb)?,
        tol.slack,
    ));

    let mut bound = 0.0;
    for ((wk, x), y) in w.entries().iter().zip(a).zip(b) {
        bound += wk * delta(x, y)?;
    }
    let gap = delta(&ga, &gb)?;
    report.push(Check::flag(
        "(P5) continuity",
        (gap - bound).max(0.0),
        tol.residual,
        gap <= bound + tol.residual,
    ));

    let m = &inputs.congruence;
    let moved = a
        .iter()
        .map(|x| congruence(m, x))
        .collect::<Result<Vec<_>>>()?;
    report.push(Check::equality(
        "(P6) congruence invariance",
        relative_frobenius(&g(w, &moved)?, &congruence(m, &ga)?),
        tol.residual,
    ));

    let lambda = inputs.lambda;
    let mixed = a
        .iter()
        .zip(b)
        .map(|(x, y)| SpdMatrix::new(&x.as_sym().scale(lambda) + &y.as_sym().scale(1.0 - lambda)))
        .collect::<Result<Vec<_>>>()?;
    let chord = &ga.as_sym().scale(lambda) + &gb.as_sym().scale(1.0 - lambda);
    report.push(Check::order(
        "(P7) joint concavity",
        loewner_margin(&chord, &g(w, &mixed)?)?,
        tol.slack,
    ));

    let inverted: Vec<SpdMatrix> = a.iter().map(SpdMatrix::inverse).collect();
    report.push(Check::equality(
        "(P8) self-duality",
        relative_frobenius(&g(w, &inverted)?.inverse(), &ga),
        tol.residual,
    ));

    let log_det: f64 = w
        .entries()
        .iter()
        .zip(a)
        .map(|(wk, x)| wk * x.log_determinant())
        .sum();
    report.push(Check::equality(
        "(P9) determinant identity",
        (ga.log_determinant() - log_det).abs(),
        tol.residual,
    ));

    let lower = loewner_margin(&weighted_harmonic(w, a)?, &ga)?;
    let upper = loewner_margin(&ga, &weighted_arithmetic(w, a)?)?;
    report.push(Check::order(
        "(P10) AGH mean inequalities",
        lower.min(upper),
        tol.slack,
    ));

    Ok(report)
}

/// Convenience wrapper drawing the auxiliary data from `seed`.
pub fn check_alm_axioms_seeded(
    weight: Weight,
    points: Vec<SpdMatrix>,
    mean: MeanSelector,
    seed: u64,
    cfg: &SolverConfig,
    tol: Tolerance,
) -> Result<Report> {
    let inputs = AxiomInputs::from_seed(weight, points, seed)?;
    check_alm_axioms(&inputs, mean, cfg, tol)
}
