//! Multivariable means: ALM, inductive, power and Karcher means.
//!
//! The iterative solvers share [`SolverConfig`] and report a [`Solution`]
//! carrying the iteration count and the final residual alongside the point.
//! Summations over the points always run in index order so results do not
//! depend on how a caller schedules work.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::binary::geometric_mean;
use crate::error::{Error, Result};
use crate::linalg::{loewner_margin, sandwich, SpdMatrix, SymMatrix};
use crate::metrics::{
    delta, distance, geodesic_with_delta, thompson, weighted_geometric, MetricTag,
};

/// Tolerance on `|Σ w_k − 1|`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Largest tuple accepted by [`alm_mean`]; the recursion costs grow
/// factorially with the number of points.
pub const ALM_MAX_POINTS: usize = 8;

/// Positive weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weight(Vec<f64>);

impl Weight {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidWeight("empty weight".into()));
        }
        if let Some(bad) = entries
            .iter()
            .find(|w| !(w.is_finite() && **w > 0.0 && **w <= 1.0))
        {
            return Err(Error::InvalidWeight(format!(
                "entry {bad} is outside (0, 1]"
            )));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeight(format!("entries sum to {sum}")));
        }
        Ok(Self(entries))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform weight of length zero");
        Self(vec![1.0 / n as f64; n])
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.0.len() as f64;
        self.0.iter().all(|w| (w - u).abs() <= WEIGHT_SUM_TOL)
    }

    /// The smallest denominator `D ≤ max_denominator` with every entry within
    /// `1e-9` of some `c_k / D`, together with the numerators `c_k`.
    pub fn rational(&self, max_denominator: usize) -> Result<(usize, Vec<usize>)> {
        rational_masses(&self.0, max_denominator)
    }
}

/// Distance below which a mass counts as equal to a fraction.
pub const RATIONAL_TOL: f64 = 1e-9;

pub(crate) fn rational_masses(
    masses: &[f64],
    max_denominator: usize,
) -> Result<(usize, Vec<usize>)> {
    for d in 1..=max_denominator {
        let numerators: Option<Vec<usize>> = masses
            .iter()
            .map(|m| {
                let c = (m * d as f64).round();
                (c >= 1.0 && (m - c / d as f64).abs() <= RATIONAL_TOL).then_some(c as usize)
            })
            .collect();
        if let Some(c) = numerators {
            if c.iter().sum::<usize>() == d {
                return Ok((d, c));
            }
        }
    }
    Err(Error::NotRepresentable { max_denominator })
}

/// A weight together with equally many points of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTuple {
    weight: Weight,
    points: Vec<SpdMatrix>,
}

impl WeightedTuple {
    pub fn new(weight: Weight, points: Vec<SpdMatrix>) -> Result<Self> {
        check_weighted(&weight, &points)?;
        Ok(Self { weight, points })
    }

    pub fn uniform(points: Vec<SpdMatrix>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("no points".into()));
        }
        Self::new(Weight::uniform(points.len()), points)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn points(&self) -> &[SpdMatrix] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }
}

/// Tolerances and iteration limits for the fixed-point solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stopping tolerance on the solver residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial step length in `(0, 1]`; halved whenever a step increases the
    /// residual.
    pub damping: f64,
    /// Metric used for the power-mean fixed-point residual.
    pub metric: MetricTag,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            damping: 1.0,
            metric: MetricTag::Thompson,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

/// A solver result.
#[derive(Clone, Debug)]
pub struct Solution {
    pub point: SpdMatrix,
    pub iterations: usize,
    pub residual: f64,
}

impl Solution {
    fn exact(point: SpdMatrix) -> Self {
        Self {
            point,
            iterations: 0,
            residual: 0.0,
        }
    }
}

fn all_equal(points: &[SpdMatrix]) -> bool {
    points.iter().all(|p| *p == points[0])
}

pub(crate) fn check_points(points: &[SpdMatrix]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::Precondition("no points".into()))?;
    let dim = first.dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    Ok(dim)
}

pub(crate) fn check_weighted(weight: &Weight, points: &[SpdMatrix]) -> Result<usize> {
    let dim = check_points(points)?;
    if weight.len() != points.len() {
        return Err(Error::InvalidWeight(format!(
            "{} weights for {} points",
            weight.len(),
            points.len()
        )));
    }
    Ok(dim)
}

/// `Σ w_k A_k`.
pub fn weighted_arithmetic(w: &Weight, points: &[SpdMatrix]) -> Result<SpdMatrix> {
    let dim = check_weighted(w, points)?;
    let mut sum = DMatrix::zeros(dim, dim);
    for (wk, p) in w.entries().iter().zip(points) {
        sum += p.matrix() * *wk;
    }
    Ok(SpdMatrix::from_raw(sum))
}

/// `(Σ w_k A_k⁻¹)⁻¹`.
pub fn weighted_harmonic(w: &Weight, points: &[SpdMatrix]) -> Result<SpdMatrix> {
    let dim = check_weighted(w, points)?;
    let mut sum = DMatrix::zeros(dim, dim);
    for (wk, p) in w.entries().iter().zip(points) {
        sum += p.inverse().matrix() * *wk;
    }
    Ok(SpdMatrix::from_raw(sum).inverse())
}

/// The Ando–Li–Mathias mean.
///
/// For three or more points every point is replaced by the ALM mean of the
/// others, repeatedly, until the tuple's Riemannian diameter drops to
/// `cfg.tol`; the first point of the final tuple is returned. The reported
/// iteration count is that of the outermost level.
pub fn alm_mean(points: &[SpdMatrix], cfg: &SolverConfig) -> Result<Solution> {
    check_points(points)?;
    cfg.validate()?;
    if points.len() > ALM_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "ALM tuple size",
            max: ALM_MAX_POINTS,
        });
    }
    alm_level(points, cfg.tol, cfg)
}

/// Inner levels of the ALM recursion are solved more tightly than the level
/// that consumes them, down to this floor.
const ALM_INNER_TOL_FLOOR: f64 = 1e-12;
/// A level whose diameter is below this value and no longer shrinks has hit
/// rounding noise and is accepted.
const ALM_NOISE_CEILING: f64 = 1e-11;

fn diameter(points: &[SpdMatrix]) -> Result<f64> {
    let mut d = 0.0_f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d = d.max(delta(&points[i], &points[j])?);
        }
    }
    Ok(d)
}

fn alm_level(points: &[SpdMatrix], tol: f64, cfg: &SolverConfig) -> Result<Solution> {
    match points.len() {
        1 => return Ok(Solution::exact(points[0].clone())),
        2 => return Ok(Solution::exact(geometric_mean(&points[0], &points[1])?)),
        3 => return alm_triple(points, tol, cfg),
        _ => {}
    }
    let n = points.len();
    let mut current = points.to_vec();
    let mut others = Vec::with_capacity(n - 1);
    let inner_tol = (tol * 1e-1).max(ALM_INNER_TOL_FLOOR).min(tol);
    let mut previous = f64::INFINITY;
    for iteration in 0..=cfg.max_iter {
        let diam = diameter(&current)?;
        let stalled = diam <= ALM_NOISE_CEILING && diam > 0.9 * previous;
        previous = diam;
        if diam <= tol || stalled {
            return Ok(Solution {
                point: current.swap_remove(0),
                iterations: iteration,
                residual: diam,
            });
        }
        if iteration == cfg.max_iter {
            return Err(Error::NoConvergence {
                solver: "ALM mean",
                iterations: iteration,
                residual: diam,
            });
        }
        let mut next = Vec::with_capacity(n);
        for skip in 0..n {
            others.clear();
            others.extend(
                current
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, p)| p.clone()),
            );
            next.push(alm_level(&others, inner_tol, cfg)?.point);
        }
        current = next;
    }
    unreachable!("loop returns on its last iteration")
}

/// The three-point level: the midpoints of the current triple also yield its
/// pairwise distances, so the diameter costs nothing extra.
fn alm_triple(points: &[SpdMatrix], tol: f64, cfg: &SolverConfig) -> Result<Solution> {
    let mut current = [points[0].clone(), points[1].clone(), points[2].clone()];
    let mut previous = f64::INFINITY;
    for iteration in 0..=cfg.max_iter {
        let (m0, d12) = geodesic_with_delta(&current[1], &current[2], 0.5);
        let (m1, d02) = geodesic_with_delta(&current[0], &current[2], 0.5);
        let (m2, d01) = geodesic_with_delta(&current[0], &current[1], 0.5);
        let diam = d12.max(d02).max(d01);
        let stalled = diam <= ALM_NOISE_CEILING && diam > 0.9 * previous;
        previous = diam;
        if diam <= tol || stalled {
            let [first, _, _] = current;
            return Ok(Solution {
                point: first,
                iterations: iteration,
                residual: diam,
            });
        }
        if iteration == cfg.max_iter {
            return Err(Error::NoConvergence {
                solver: "ALM mean",
                iterations: iteration,
                residual: diam,
            });
        }
        current = [m0, m1, m2];
    }
    unreachable!("loop returns on its last iteration")
}

/// Sturm's inductive mean `S_1 = x_1`, `S_k = S_{k−1} #_{1/k} x_k`.
pub fn inductive_mean(points: &[SpdMatrix]) -> Result<SpdMatrix> {
    check_points(points)?;
    let mut s = points[0].clone();
    for (k, x) in points.iter().enumerate().skip(1) {
        s = weighted_geometric(&s, x, 1.0 / (k + 1) as f64)?;
    }
    Ok(s)
}

/// Weighted inductive mean: the running point moves toward `x_k` by the
/// fraction `w_k / (w_1 + … + w_k)` of the geodesic. Uniform weights give
/// [`inductive_mean`].
pub fn weighted_inductive_mean(w: &Weight, points: &[SpdMatrix]) -> Result<SpdMatrix> {
    check_weighted(w, points)?;
    if w.is_uniform() {
        return inductive_mean(points);
    }
    let mut s = points[0].clone();
    let mut mass = w.entries()[0];
    for (wk, x) in w.entries().iter().zip(points).skip(1) {
        mass += wk;
        s = weighted_geometric(&s, x, (wk / mass).min(1.0))?;
    }
    Ok(s)
}

fn metric_of_spectrum(metric: MetricTag, values: &[f64]) -> f64 {
    match metric {
        MetricTag::Riemannian => values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt(),
        MetricTag::Thompson => values.iter().fold(0.0_f64, |acc, l| acc.max(l.ln().abs())),
    }
}

/// `S(X) = Σ w_k (X^{-1/2} A_k X^{-1/2})^t`, so that
/// `Σ w_k (X #_t A_k) = X^{1/2} S(X) X^{1/2}`.
fn power_map(t: f64, w: &Weight, points: &[SpdMatrix], x: &SpdMatrix) -> SpdMatrix {
    let inv_root = x.inv_sqrt();
    let dim = x.dim();
    let mut sum = DMatrix::zeros(dim, dim);
    for (wk, a) in w.entries().iter().zip(points) {
        let y = SpdMatrix::from_raw(sandwich(inv_root.matrix(), a.matrix())).power(t);
        sum += y.matrix() * *wk;
    }
    SpdMatrix::from_raw(sum)
}

/// Residual `d(X, Σ w_k (X #_t A_k))` of the power-mean equation.
pub fn power_residual(
    t: f64,
    w: &Weight,
    points: &[SpdMatrix],
    x: &SpdMatrix,
    metric: MetricTag,
) -> Result<f64> {
    check_weighted(w, points)?;
    let s = power_map(t, w, points, x);
    Ok(metric_of_spectrum(metric, s.eigenvalues()))
}

/// The `t`-weighted power mean, the unique positive definite solution of
/// `X = Σ w_k (X #_t A_k)` for `t ∈ (0, 1]`.
///
/// Starting from the weighted arithmetic mean, each step maps
/// `X ↦ X^{1/2} S^{h/t} X^{1/2}` with `S = Σ w_k (X^{-1/2} A_k X^{-1/2})^t`.
/// Every fixed point of this map solves the power-mean equation. `h` starts
/// at `max(cfg.damping, t)` and is halved, never below `t`, whenever the
/// residual grows; at `h = t` the step is the plain map
/// `X ↦ Σ w_k (X #_t A_k)`, a strict contraction for the Thompson metric.
pub fn power_mean(
    t: f64,
    w: &Weight,
    points: &[SpdMatrix],
    cfg: &SolverConfig,
) -> Result<Solution> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "power mean exponent must lie in (0, 1], got {t}"
        )));
    }
    check_weighted(w, points)?;
    cfg.validate()?;
    if all_equal(points) {
        return Ok(Solution::exact(points[0].clone()));
    }
    let mut x = weighted_arithmetic(w, points)?;
    let mut s = power_map(t, w, points, &x);
    let mut residual = metric_of_spectrum(cfg.metric, s.eigenvalues());
    let mut h = cfg.damping.max(t);
    for iteration in 0..cfg.max_iter {
        if residual <= cfg.tol {
            return Ok(Solution {
                point: x,
                iterations: iteration,
                residual,
            });
        }
        let step = s.power(h / t);
        let candidate = SpdMatrix::from_raw(sandwich(x.sqrt().matrix(), step.matrix()));
        let cand_s = power_map(t, w, points, &candidate);
        let cand_residual = metric_of_spectrum(cfg.metric, cand_s.eigenvalues());
        if cand_residual > residual && h > t {
            h = (0.5 * h).max(t);
            continue;
        }
        x = candidate;
        s = cand_s;
        residual = cand_residual;
    }
    if residual <= cfg.tol {
        return Ok(Solution {
            point: x,
            iterations: cfg.max_iter,
            residual,
        });
    }
    Err(Error::NoConvergence {
        solver: "power mean",
        iterations: cfg.max_iter,
        residual,
    })
}

/// `Σ w_k log(X^{-1/2} A_k X^{-1/2})`, the left side of the Karcher equation.
pub fn karcher_gradient(w: &Weight, points: &[SpdMatrix], x: &SpdMatrix) -> Result<SymMatrix> {
    check_weighted(w, points)?;
    Ok(karcher_sum(w, points, x))
}

fn karcher_sum(w: &Weight, points: &[SpdMatrix], x: &SpdMatrix) -> SymMatrix {
    let inv_root = x.inv_sqrt();
    let dim = x.dim();
    let mut sum = DMatrix::zeros(dim, dim);
    for (wk, a) in w.entries().iter().zip(points) {
        let log = SpdMatrix::from_raw(sandwich(inv_root.matrix(), a.matrix())).log();
        sum += log.matrix() * *wk;
    }
    SymMatrix::from_raw(sum)
}

/// Frobenius norm of the Karcher equation at `x`.
pub fn karcher_residual(w: &Weight, points: &[SpdMatrix], x: &SpdMatrix) -> Result<f64> {
    Ok(karcher_gradient(w, points, x)?.frobenius_norm())
}

/// The weighted Karcher (least squares) mean, the zero of
/// `Σ w_k log(X^{-1/2} A_k X^{-1/2})`.
///
/// Iterates `X ↦ X^{1/2} exp(h Σ w_k log(X^{-1/2} A_k X^{-1/2})) X^{1/2}`
/// from the weighted arithmetic mean with `h = cfg.damping`, rejecting any
/// step that increases the residual and halving `h` instead.
pub fn karcher_mean(w: &Weight, points: &[SpdMatrix], cfg: &SolverConfig) -> Result<Solution> {
    check_weighted(w, points)?;
    cfg.validate()?;
    if all_equal(points) {
        return Ok(Solution::exact(points[0].clone()));
    }
    let mut x = weighted_arithmetic(w, points)?;
    let mut grad = karcher_sum(w, points, &x);
    let mut residual = grad.frobenius_norm();
    let mut h = cfg.damping;
    for iteration in 0..cfg.max_iter {
        if residual <= cfg.tol {
            return Ok(Solution {
                point: x,
                iterations: iteration,
                residual,
            });
        }
        let step = grad.scale(h).exp();
        let candidate = SpdMatrix::from_raw(sandwich(x.sqrt().matrix(), step.matrix()));
        let cand_grad = karcher_sum(w, points, &candidate);
        let cand_residual = cand_grad.frobenius_norm();
        if cand_residual > residual {
            h *= 0.5;
            if h < 1e-12 {
                break;
            }
            continue;
        }
        x = candidate;
        grad = cand_grad;
        residual = cand_residual;
    }
    if residual <= cfg.tol {
        return Ok(Solution {
            point: x,
            iterations: cfg.max_iter,
            residual,
        });
    }
    Err(Error::NoConvergence {
        solver: "Karcher mean",
        iterations: cfg.max_iter,
        residual,
    })
}

/// Power means along a decreasing schedule of exponents together with their
/// Thompson distance to the Karcher mean.
#[derive(Clone, Debug)]
pub struct PowerLimitTrace {
    /// `P_t` at the smallest scheduled `t`.
    pub estimate: SpdMatrix,
    pub karcher: SpdMatrix,
    /// `(t, P_t)` in schedule order.
    pub means: Vec<(f64, SpdMatrix)>,
    /// `(t, d_T(P_t, Λ))` in schedule order.
    pub gaps: Vec<(f64, f64)>,
}

/// Slack allowed when asserting that the gaps are nonincreasing.
pub const POWER_GAP_SLACK: f64 = 1e-8;

impl PowerLimitTrace {
    pub fn gaps_nonincreasing(&self, slack: f64) -> bool {
        self.gaps.windows(2).all(|w| w[1].1 <= w[0].1 + slack)
    }

    /// Smallest Loewner margin of `P_s ≤ P_t` over adjacent schedule entries
    /// (`s` the later, smaller exponent).
    pub fn ordering_margin(&self) -> Result<f64> {
        let mut margin = f64::INFINITY;
        for pair in self.means.windows(2) {
            margin = margin.min(loewner_margin(&pair[1].1, &pair[0].1)?);
        }
        Ok(margin)
    }
}

/// Approximates the Karcher mean by power means `P_t` as `t → 0⁺`.
pub fn karcher_via_power_limit(
    w: &Weight,
    points: &[SpdMatrix],
    cfg: &SolverConfig,
    schedule: &[f64],
) -> Result<PowerLimitTrace> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty schedule".into()));
    }
    if schedule.iter().any(|t| !(*t > 0.0 && *t <= 1.0))
        || schedule.windows(2).any(|p| p[1] >= p[0])
    {
        return Err(Error::InvalidParameter(
            "schedule must be strictly decreasing in (0, 1]".into(),
        ));
    }
    let karcher = karcher_mean(w, points, cfg)?.point;
    let mut means = Vec::with_capacity(schedule.len());
    let mut gaps = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let p = power_mean(t, w, points, cfg)?.point;
        gaps.push((t, thompson(&p, &karcher)?));
        means.push((t, p));
    }
    Ok(PowerLimitTrace {
        estimate: means[means.len() - 1].1.clone(),
        karcher,
        means,
        gaps,
    })
}

/// Outcome of the Yamazaki implication
/// `Σ w_k log A_k ≤ 0  ⇒  Λ(w; A_1, …, A_n) ≤ I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YamazakiReport {
    pub premise_holds: bool,
    pub conclusion_holds: bool,
    /// Loewner margin of `Σ w_k log A_k ≤ 0`.
    pub premise_margin: f64,
    /// Loewner margin of `Λ ≤ I`.
    pub conclusion_margin: f64,
}

impl YamazakiReport {
    pub fn implication_holds(&self) -> bool {
        !self.premise_holds || self.conclusion_holds
    }
}

/// Slack on the conclusion `Λ ≤ I`.
pub const YAMAZAKI_SLACK: f64 = 1e-8;
/// Slack on the premise, enough to absorb rounding in `Σ w_k log A_k`.
pub const YAMAZAKI_PREMISE_SLACK: f64 = 1e-12;

pub fn yamazaki_check(
    w: &Weight,
    points: &[SpdMatrix],
    cfg: &SolverConfig,
) -> Result<YamazakiReport> {
    let dim = check_weighted(w, points)?;
    let mut log_sum = DMatrix::zeros(dim, dim);
    for (wk, a) in w.entries().iter().zip(points) {
        log_sum += a.log().matrix() * *wk;
    }
    let log_sum = SymMatrix::from_raw(log_sum);
    let premise_margin = loewner_margin(&log_sum, &SymMatrix::zeros(dim))?;
    let lambda = karcher_mean(w, points, cfg)?.point;
    let conclusion_margin = loewner_margin(&lambda, &SymMatrix::identity(dim))?;
    Ok(YamazakiReport {
        premise_holds: premise_margin >= -YAMAZAKI_PREMISE_SLACK,
        conclusion_holds: conclusion_margin >= -YAMAZAKI_SLACK,
        premise_margin,
        conclusion_margin,
    })
}

/// Max pairwise distance of a tuple in the given metric.
pub fn tuple_diameter(points: &[SpdMatrix], metric: MetricTag) -> Result<f64> {
    let mut d = 0.0_f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d = d.max(distance(metric, &points[i], &points[j])?);
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::relative_frobenius;

    fn scalar(x: f64) -> SpdMatrix {
        SpdMatrix::from_diagonal(&[x]).unwrap()
    }

    fn sample_triple() -> Vec<SpdMatrix> {
        vec![
            SpdMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(),
            SpdMatrix::from_rows(&[vec![1.0, -0.2], vec![-0.2, 3.0]]).unwrap(),
            SpdMatrix::from_rows(&[vec![1.5, 0.6], vec![0.6, 1.2]]).unwrap(),
        ]
    }

    #[test]
    fn weight_validation() {
        assert!(Weight::new(vec![0.5, 0.5]).is_ok());
        assert!(Weight::new(vec![]).is_err());
        assert!(Weight::new(vec![0.5, 0.6]).is_err());
        assert!(Weight::new(vec![1.5, -0.5]).is_err());
        assert!(Weight::new(vec![1.0, 0.0]).is_err());
        assert!(Weight::uniform(4).is_uniform());
        let t = WeightedTuple::new(Weight::uniform(2), vec![scalar(1.0)]);
        assert!(t.is_err());
        let mixed = WeightedTuple::uniform(vec![scalar(1.0), SpdMatrix::identity(2)]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.damping = 0.0;
        assert!(cfg.validate().is_err());
        cfg = SolverConfig {
            tol: -1.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn alm_base_cases() {
        let cfg = SolverConfig::default();
        let p = sample_triple();
        let two = alm_mean(&p[..2], &cfg).unwrap().point;
        let g = geometric_mean(&p[0], &p[1]).unwrap();
        assert_eq!(two, g);
        let same = vec![p[0].clone(), p[0].clone(), p[0].clone()];
        let r = alm_mean(&same, &cfg).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.point, p[0]);
        let tight = SolverConfig { tol: 1e-14, ..cfg };
        let x = alm_mean(&[scalar(1.0), scalar(2.0), scalar(4.0)], &tight).unwrap();
        assert!((x.point.matrix()[(0, 0)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn alm_rejects_large_tuples() {
        let many = vec![scalar(1.0); ALM_MAX_POINTS + 1];
        assert!(matches!(
            alm_mean(&many, &SolverConfig::default()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn alm_iteration_cap() {
        let cfg = SolverConfig {
            max_iter: 2,
            ..SolverConfig::default()
        };
        assert!(matches!(
            alm_mean(&sample_triple(), &cfg),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn inductive_examples() {
        let a = sample_triple()[0].clone();
        let s = inductive_mean(&[a.clone(), a.clone(), a.clone()]).unwrap();
        assert!(relative_frobenius(&s, &a) < 1e-14);
        let s = inductive_mean(&[scalar(1.0), scalar(1.0), scalar(8.0)]).unwrap();
        assert!((s.matrix()[(0, 0)] - 2.0).abs() < 1e-14);
        let w = Weight::new(vec![0.25, 0.75]).unwrap();
        let s = weighted_inductive_mean(&w, &[scalar(16.0), scalar(1.0)]).unwrap();
        assert!((s.matrix()[(0, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn power_mean_examples() {
        let cfg = SolverConfig::default();
        let p = sample_triple();
        let w = Weight::uniform(3);
        let r = power_mean(1.0, &w, &p, &cfg).unwrap();
        let arith = weighted_arithmetic(&w, &p).unwrap();
        assert!(relative_frobenius(&r.point, &arith) < 1e-12);
        let r = power_mean(0.5, &Weight::uniform(2), &[scalar(1.0), scalar(9.0)], &cfg).unwrap();
        assert!((r.point.matrix()[(0, 0)] - 4.0).abs() < 1e-12);
        let same = vec![p[1].clone(); 3];
        let r = power_mean(0.3, &w, &same, &cfg).unwrap();
        assert!(relative_frobenius(&r.point, &p[1]) < 1e-12);
        assert!(power_mean(0.0, &w, &p, &cfg).is_err());
        assert!(power_mean(1.1, &w, &p, &cfg).is_err());
    }

    #[test]
    fn power_mean_small_exponent_converges() {
        let cfg = SolverConfig::default();
        let r = power_mean(0.01, &Weight::uniform(3), &sample_triple(), &cfg).unwrap();
        assert!(r.residual <= cfg.tol);
        let check = power_residual(
            0.01,
            &Weight::uniform(3),
            &sample_triple(),
            &r.point,
            MetricTag::Thompson,
        )
        .unwrap();
        assert!(check <= 1e-9);
    }

    #[test]
    fn karcher_examples() {
        let cfg = SolverConfig::default();
        let r = karcher_mean(
            &Weight::uniform(3),
            &[scalar(1.0), scalar(2.0), scalar(4.0)],
            &cfg,
        )
        .unwrap();
        assert!((r.point.matrix()[(0, 0)] - 2.0).abs() < 1e-12);
        let p = sample_triple();
        let r = karcher_mean(&Weight::uniform(2), &p[..2], &cfg).unwrap();
        let g = geometric_mean(&p[0], &p[1]).unwrap();
        assert!(delta(&r.point, &g).unwrap() < 1e-9);
        let d1 = SpdMatrix::from_diagonal(&[1.0, 8.0, 2.0]).unwrap();
        let d2 = SpdMatrix::from_diagonal(&[4.0, 1.0, 0.5]).unwrap();
        let w = Weight::new(vec![0.5, 0.5]).unwrap();
        let r = karcher_mean(&w, &[d1, d2], &cfg).unwrap();
        let expected = SpdMatrix::from_diagonal(&[2.0, 8f64.sqrt(), 1.0]).unwrap();
        assert!(relative_frobenius(&r.point, &expected) < 1e-12);
    }

    #[test]
    fn karcher_residual_below_tolerance() {
        let cfg = SolverConfig::default();
        let w = Weight::new(vec![0.2, 0.3, 0.5]).unwrap();
        let p = sample_triple();
        let r = karcher_mean(&w, &p, &cfg).unwrap();
        assert!(karcher_residual(&w, &p, &r.point).unwrap() <= cfg.tol);
    }

    #[test]
    fn power_limit_on_equal_points() {
        let p = vec![sample_triple()[2].clone(); 3];
        let trace = karcher_via_power_limit(
            &Weight::uniform(3),
            &p,
            &SolverConfig::default(),
            &[1.0, 0.5, 0.1, 0.01],
        )
        .unwrap();
        assert!(trace.gaps.iter().all(|(_, g)| *g < 1e-12));
        assert!(karcher_via_power_limit(
            &Weight::uniform(3),
            &p,
            &SolverConfig::default(),
            &[0.5, 0.5]
        )
        .is_err());
    }

    #[test]
    fn power_limit_scalar_gaps() {
        let w = Weight::new(vec![0.2, 0.5, 0.3]).unwrap();
        let a = [0.5, 3.0, 7.0];
        let pts: Vec<SpdMatrix> = a.iter().map(|x| scalar(*x)).collect();
        let schedule = [1.0, 0.5, 0.1, 0.01];
        let trace = karcher_via_power_limit(&w, &pts, &SolverConfig::default(), &schedule).unwrap();
        let log_mean: f64 = w.entries().iter().zip(&a).map(|(w, a)| w * a.ln()).sum();
        for (t, gap) in &trace.gaps {
            let p: f64 = w
                .entries()
                .iter()
                .zip(&a)
                .map(|(w, a)| w * a.powf(*t))
                .sum::<f64>()
                .powf(1.0 / t);
            assert!((gap - (p.ln() - log_mean).abs()).abs() < 1e-10, "t={t}");
        }
        assert!(trace.gaps_nonincreasing(POWER_GAP_SLACK));
    }

    #[test]
    fn yamazaki_examples() {
        let cfg = SolverConfig::default();
        let a = sample_triple()[1].clone();
        let r = yamazaki_check(&Weight::uniform(2), &[a.clone(), a.inverse()], &cfg).unwrap();
        assert!(r.premise_holds && r.conclusion_holds);
        assert!(r.implication_holds());
        let d1 = SpdMatrix::from_diagonal(&[0.5, 0.9]).unwrap();
        let d2 = SpdMatrix::from_diagonal(&[0.8, 0.3]).unwrap();
        let r = yamazaki_check(&Weight::uniform(2), &[d1, d2], &cfg).unwrap();
        assert!(r.premise_holds && r.conclusion_holds);
    }
}
