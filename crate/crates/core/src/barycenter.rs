//! Finitely supported measures, their Wasserstein distance, and the Karcher
//! barycenter.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::metrics::delta;
use crate::multi::{check_points, karcher_mean, rational_masses, SolverConfig, Weight};

/// Default bound on the common denominator of the masses.
pub const DEFAULT_MAX_DENOMINATOR: usize = 64;
/// Largest number of equal-mass atoms the transport problem is solved for.
pub const MAX_ATOMS: usize = 512;
pub const CONTRACTIVITY_SLACK: f64 = 1e-8;
/// Largest `n · k` accepted by [`iterativity_check`].
pub const MAX_REPETITION_SIZE: usize = 64;

/// A probability measure with finitely many atoms. Atoms may repeat.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    atoms: Vec<SpdMatrix>,
    masses: Weight,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<SpdMatrix>, masses: Vec<f64>) -> Result<Self> {
        check_points(&atoms)?;
        if atoms.len() != masses.len() {
            return Err(Error::DimensionMismatch {
                expected: atoms.len(),
                found: masses.len(),
            });
        }
        Ok(Self {
            atoms,
            masses: Weight::new(masses)?,
        })
    }

    pub fn uniform(atoms: Vec<SpdMatrix>) -> Result<Self> {
        check_points(&atoms)?;
        let masses = Weight::uniform(atoms.len());
        Ok(Self { atoms, masses })
    }

    /// The point mass at `x`.
    pub fn dirac(x: SpdMatrix) -> Self {
        Self {
            atoms: vec![x],
            masses: Weight::uniform(1),
        }
    }

    pub fn atoms(&self) -> &[SpdMatrix] {
        &self.atoms
    }

    pub fn masses(&self) -> &[f64] {
        self.masses.entries()
    }

    pub fn weight(&self) -> &Weight {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }
}

/// Rewrites `mu` as `D` atoms of mass `1/D`, where `D ≤ max_denominator` is
/// the smallest denominator for which every mass lies within `1e-9` of a
/// multiple of `1/D`. An atom of mass `c/D` is repeated `c` times.
pub fn uniformize(mu: &DiscreteMeasure, max_denominator: usize) -> Result<DiscreteMeasure> {
    let (_, counts) = rational_masses(mu.masses(), max_denominator)?;
    let atoms = repeat_atoms(&mu.atoms, &counts, 1);
    DiscreteMeasure::uniform(atoms)
}

fn repeat_atoms(atoms: &[SpdMatrix], counts: &[usize], factor: usize) -> Vec<SpdMatrix> {
    atoms
        .iter()
        .zip(counts)
        .flat_map(|(a, &c)| std::iter::repeat_n(a, c * factor).cloned())
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Minimum-cost perfect matching on a square cost matrix by the Hungarian
/// method with row and column potentials, `O(N³)`. Returns the total cost and
/// the column assigned to each row.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = cost.len();
    if n == 0 {
        return (0.0, Vec::new());
    }
    // 1-based arrays; row 0 and column 0 are sentinels
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (total, assignment)
}

/// The optimal coupling found by [`wasserstein_coupling`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coupling {
    pub distance: f64,
    /// Number of equal-mass atoms on each side.
    pub atoms: usize,
    /// `pairs[k] = (i, j)`: the `k`-th unit of mass moves from atom `i` of the
    /// first measure to atom `j` of the second.
    pub pairs: Vec<(usize, usize)>,
}

/// The `W₁` distance with Riemannian ground cost, via uniformization to a
/// common number `N` of equal-mass atoms and an optimal assignment:
/// `(1/N) min_π Σ_k δ(x_k, y_{π(k)})`.
pub fn wasserstein_coupling(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Coupling> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: nu.dim(),
        });
    }
    let (dm, cm) = rational_masses(mu.masses(), DEFAULT_MAX_DENOMINATOR)?;
    let (dn, cn) = rational_masses(nu.masses(), DEFAULT_MAX_DENOMINATOR)?;
    let n = dm / gcd(dm, dn) * dn;
    if n > MAX_ATOMS {
        return Err(Error::TooLarge {
            what: "common atom count",
            max: MAX_ATOMS,
        });
    }
    let mut ground = vec![vec![0.0; nu.len()]; mu.len()];
    for (i, x) in mu.atoms.iter().enumerate() {
        for (j, y) in nu.atoms.iter().enumerate() {
            ground[i][j] = delta(x, y)?;
        }
    }
    let owner = |counts: &[usize], factor: usize| -> Vec<usize> {
        counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c * factor))
            .collect()
    };
    let rows = owner(&cm, n / dm);
    let cols = owner(&cn, n / dn);
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| ground[i][j]).collect())
        .collect();
    let (total, assignment) = min_cost_assignment(&cost);
    Ok(Coupling {
        distance: total / n as f64,
        atoms: n,
        pairs: assignment
            .iter()
            .enumerate()
            .map(|(k, &l)| (rows[k], cols[l]))
            .collect(),
    })
}

pub fn wasserstein(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    Ok(wasserstein_coupling(mu, nu)?.distance)
}

/// The Karcher barycenter: the weighted Karcher mean of the atoms with the
/// masses as weights.
pub fn karcher_barycenter(mu: &DiscreteMeasure, cfg: &SolverConfig) -> Result<SpdMatrix> {
    Ok(karcher_mean(&mu.masses, &mu.atoms, cfg)?.point)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContractivityReport {
    /// `δ(β(μ), β(ν))`.
    pub lhs: f64,
    /// `d^W(μ, ν)`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn contractivity_check(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cfg: &SolverConfig,
) -> Result<ContractivityReport> {
    let rhs = wasserstein(mu, nu)?;
    let lhs = delta(&karcher_barycenter(mu, cfg)?, &karcher_barycenter(nu, cfg)?)?;
    Ok(ContractivityReport {
        lhs,
        rhs,
        holds: lhs <= rhs + CONTRACTIVITY_SLACK,
    })
}

/// `δ(Λ(x_1, …, x_n), Λ(x_1, …, x_n, …, x_1, …, x_n))` with the tuple repeated
/// `k` times, both means uniformly weighted.
pub fn iterativity_check(points: &[SpdMatrix], k: usize, cfg: &SolverConfig) -> Result<f64> {
    let n = check_points(points).map(|_| points.len())?;
    if k == 0 {
        return Err(Error::InvalidParameter(
            "repetition count must be positive".into(),
        ));
    }
    if n * k > MAX_REPETITION_SIZE {
        return Err(Error::TooLarge {
            what: "repeated tuple size",
            max: MAX_REPETITION_SIZE,
        });
    }
    let once = karcher_mean(&Weight::uniform(n), points, cfg)?.point;
    let repeated: Vec<SpdMatrix> = (0..k).flat_map(|_| points.iter().cloned()).collect();
    let many = karcher_mean(&Weight::uniform(n * k), &repeated, cfg)?.point;
    if once == many {
        return Ok(0.0);
    }
    delta(&once, &many)
}
