//! Sturm's stochastic walks, cyclic deterministic walks, and the coupled-walk
//! monotonicity experiment.
//!
//! A walk over a weighted tuple `x_1, …, x_n` starts at `σ(1) = x_{ω(1)}` and
//! moves a fraction `1/k` of the way toward the next sample,
//! `σ(k) = σ(k−1) #_{1/k} x_{ω(k)}`. Indices are zero-based throughout.

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{loewner_leq, loewner_margin, SpdMatrix};
use crate::metrics::{delta, geodesic_unchecked};
use crate::multi::{check_weighted, karcher_mean, SolverConfig, Weight, WeightedTuple};
use crate::random::{rng_from_seed, SeededRng};

/// Largest block length accepted by [`deterministic_walk`].
pub const MAX_BLOCK_DENOMINATOR: usize = 64;
/// Loewner slack used when validating that one tuple dominates another.
pub const DOMINATION_SLACK: f64 = 1e-12;

/// Draws indices with probabilities given by a weight.
///
/// Each draw takes the top 53 bits of one `u64` as a uniform `u ∈ [0, 1)` and
/// returns the first index whose cumulative weight exceeds `u`. Rounding can
/// leave the last cumulative value just below one; a draw landing past it is
/// rejected and repeated.
#[derive(Clone, Debug)]
pub struct IndexSampler {
    cumulative: Vec<f64>,
}

impl IndexSampler {
    pub fn new(w: &Weight) -> Self {
        let mut total = 0.0;
        let cumulative = w
            .entries()
            .iter()
            .map(|x| {
                total += x;
                total
            })
            .collect();
        Self { cumulative }
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> usize {
        loop {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if let Some(i) = self.cumulative.iter().position(|&c| u < c) {
                return i;
            }
        }
    }
}

/// What a walk records at its checkpoints.
#[derive(Clone, Copy, Debug)]
pub enum Recording<'a> {
    /// The Riemannian distance to a target point.
    Distance(&'a SpdMatrix),
    /// The full walk point.
    Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CheckpointValue {
    Distance(f64),
    Point(SpdMatrix),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub step: usize,
    pub value: CheckpointValue,
}

impl Checkpoint {
    pub fn distance(&self) -> Option<f64> {
        match self.value {
            CheckpointValue::Distance(d) => Some(d),
            CheckpointValue::Point(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkTrace {
    /// The realized indices `ω(1), …, ω(K)`.
    pub indices: Vec<usize>,
    pub checkpoints: Vec<Checkpoint>,
    /// `None` for deterministic walks.
    pub seed: Option<u64>,
    pub weight: Weight,
    /// `σ(K)`.
    pub last: SpdMatrix,
}

fn check_schedule(steps: usize, schedule: &[usize]) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "a walk needs at least one step".into(),
        ));
    }
    if let Some(bad) = schedule.iter().find(|&&k| k == 0 || k > steps) {
        return Err(Error::InvalidParameter(format!(
            "checkpoint {bad} lies outside 1..={steps}"
        )));
    }
    if schedule.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn record(point: &SpdMatrix, recording: Recording<'_>) -> Result<CheckpointValue> {
    Ok(match recording {
        Recording::Distance(target) => CheckpointValue::Distance(delta(point, target)?),
        Recording::Point => CheckpointValue::Point(point.clone()),
    })
}

/// One inductive-mean update `σ(k) = σ(k−1) #_{1/k} x`.
fn advance(sigma: SpdMatrix, x: &SpdMatrix, k: usize) -> SpdMatrix {
    if k == 1 || sigma == *x {
        x.clone()
    } else {
        geodesic_unchecked(&sigma, x, 1.0 / k as f64)
    }
}

fn run_walk(
    w: &Weight,
    points: &[SpdMatrix],
    indices: Vec<usize>,
    schedule: &[usize],
    recording: Recording<'_>,
    seed: Option<u64>,
) -> Result<WalkTrace> {
    if let Recording::Distance(target) = recording {
        if target.dim() != points[0].dim() {
            return Err(Error::DimensionMismatch {
                expected: points[0].dim(),
                found: target.dim(),
            });
        }
    }
    let mut sigma = points[indices[0]].clone();
    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut next = schedule.iter().peekable();
    for (k0, &i) in indices.iter().enumerate() {
        let k = k0 + 1;
        sigma = advance(sigma, &points[i], k);
        if next.peek() == Some(&&k) {
            next.next();
            checkpoints.push(Checkpoint {
                step: k,
                value: record(&sigma, recording)?,
            });
        }
    }
    Ok(WalkTrace {
        indices,
        checkpoints,
        seed,
        weight: w.clone(),
        last: sigma,
    })
}

/// `steps` indices drawn independently with probabilities `w`.
pub fn sample_indices(w: &Weight, steps: usize, seed: u64) -> Vec<usize> {
    let sampler = IndexSampler::new(w);
    let mut rng: SeededRng = rng_from_seed(seed);
    (0..steps).map(|_| sampler.sample(&mut rng)).collect()
}

/// Sturm's walk with i.i.d. indices drawn from `w` using `seed`.
pub fn sturm_walk(
    w: &Weight,
    points: &[SpdMatrix],
    steps: usize,
    seed: u64,
    schedule: &[usize],
    recording: Recording<'_>,
) -> Result<WalkTrace> {
    check_weighted(w, points)?;
    check_schedule(steps, schedule)?;
    let indices = sample_indices(w, steps, seed);
    run_walk(w, points, indices, schedule, recording, Some(seed))
}

/// The cyclic block of a rational weight: with `w_k = c_k / D`, index `k`
/// appears `c_k` times, indices in increasing order.
pub fn cyclic_block(w: &Weight) -> Result<Vec<usize>> {
    let (_, counts) = w.rational(MAX_BLOCK_DENOMINATOR)?;
    Ok(counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
        .collect())
}

/// The walk whose indices repeat [`cyclic_block`] forever.
pub fn deterministic_walk(
    w: &Weight,
    points: &[SpdMatrix],
    steps: usize,
    schedule: &[usize],
    recording: Recording<'_>,
) -> Result<WalkTrace> {
    check_weighted(w, points)?;
    check_schedule(steps, schedule)?;
    let block = cyclic_block(w)?;
    let indices = block.iter().copied().cycle().take(steps).collect();
    run_walk(w, points, indices, schedule, recording, None)
}

/// Loewner margins from [`monotonicity_experiment`]; see
/// [`crate::linalg::loewner_margin`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// `(k, margin of σ_𝔸(k) ≤ σ_𝔹(k))` at each checkpoint.
    pub checkpoints: Vec<(usize, f64)>,
    /// Margin of `Λ(𝔸) ≤ Λ(𝔹)`.
    pub karcher_margin: f64,
    pub slack: f64,
}

impl MonotonicityReport {
    pub fn walks_ordered(&self) -> bool {
        self.checkpoints.iter().all(|(_, m)| *m >= -self.slack)
    }

    pub fn holds(&self) -> bool {
        self.walks_ordered() && self.karcher_margin >= -self.slack
    }

    pub fn worst_margin(&self) -> f64 {
        self.checkpoints
            .iter()
            .map(|(_, m)| *m)
            .fold(self.karcher_margin, f64::min)
    }
}

/// Runs the walks over `a` and `b` with one shared index sequence and compares
/// them in the Loewner order at every checkpoint, then compares their Karcher
/// means.
///
/// Both tuples must carry the same weight and satisfy `A_k ≤ B_k`.
pub fn monotonicity_experiment(
    a: &WeightedTuple,
    b: &WeightedTuple,
    steps: usize,
    seed: u64,
    schedule: &[usize],
    cfg: &SolverConfig,
    slack: f64,
) -> Result<MonotonicityReport> {
    if a.weight() != b.weight() || a.len() != b.len() {
        return Err(Error::Precondition(
            "coupled walks need tuples with the same weight".into(),
        ));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    for (k, (x, y)) in a.points().iter().zip(b.points()).enumerate() {
        if !loewner_leq(x, y, DOMINATION_SLACK)? {
            return Err(Error::Precondition(format!(
                "point {k} of the first tuple is not below its partner"
            )));
        }
    }
    check_schedule(steps, schedule)?;
    let indices = sample_indices(a.weight(), steps, seed);
    let mut sa = a.points()[indices[0]].clone();
    let mut sb = b.points()[indices[0]].clone();
    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut next = schedule.iter().peekable();
    for (k0, &i) in indices.iter().enumerate() {
        let k = k0 + 1;
        sa = advance(sa, &a.points()[i], k);
        sb = advance(sb, &b.points()[i], k);
        if next.peek() == Some(&&k) {
            next.next();
            checkpoints.push((k, loewner_margin(&sa, &sb)?));
        }
    }
    let la = karcher_mean(a.weight(), a.points(), cfg)?.point;
    let lb = karcher_mean(b.weight(), b.points(), cfg)?.point;
    Ok(MonotonicityReport {
        checkpoints,
        karcher_margin: loewner_margin(&la, &lb)?,
        slack,
    })
}

/// Distances to the Karcher mean from one walk per seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub karcher: SpdMatrix,
    pub schedule: Vec<usize>,
    /// `distances[s][j]` is `δ(σ(schedule[j]), Λ)` for the walk of `seeds[s]`.
    pub distances: Vec<Vec<f64>>,
    pub seeds: Vec<u64>,
}

impl ConvergenceSummary {
    /// Median over seeds of the distance at checkpoint `j`.
    pub fn median(&self, j: usize) -> f64 {
        let mut column: Vec<f64> = self.distances.iter().map(|row| row[j]).collect();
        column.sort_by(f64::total_cmp);
        let m = column.len();
        if m % 2 == 1 {
            column[m / 2]
        } else {
            0.5 * (column[m / 2 - 1] + column[m / 2])
        }
    }

    /// Number of seeds whose distance at checkpoint `later` is strictly below
    /// the one at checkpoint `earlier`.
    pub fn improved(&self, earlier: usize, later: usize) -> usize {
        self.distances
            .iter()
            .filter(|row| row[later] < row[earlier])
            .count()
    }
}

/// Runs one Sturm walk per seed and measures its distance to the Karcher mean
/// at each checkpoint. Seeds are processed in the given order.
pub fn convergence_experiment(
    w: &Weight,
    points: &[SpdMatrix],
    seeds: &[u64],
    schedule: &[usize],
    cfg: &SolverConfig,
) -> Result<ConvergenceSummary> {
    check_weighted(w, points)?;
    let steps = *schedule
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty checkpoint schedule".into()))?;
    let karcher = karcher_mean(w, points, cfg)?.point;
    let mut distances = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let trace = sturm_walk(
            w,
            points,
            steps,
            seed,
            schedule,
            Recording::Distance(&karcher),
        )?;
        distances.push(
            trace
                .checkpoints
                .iter()
                .map(|c| c.distance().expect("distance recording"))
                .collect(),
        );
    }
    Ok(ConvergenceSummary {
        karcher,
        schedule: schedule.to_vec(),
        distances,
        seeds: seeds.to_vec(),
    })
}
