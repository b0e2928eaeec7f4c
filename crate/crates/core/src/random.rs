//! Seeded generators for random positive definite inputs.
//!
//! Every random quantity in the crate comes from [`SeededRng`], ChaCha with
//! eight rounds seeded from a `u64`. Its output stream is specified
//! independently of platform and word size, so traces and generated inputs
//! are reproducible everywhere.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{InvertibleMatrix, SpdMatrix, SymMatrix};
use crate::multi::Weight;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `(Z + Zᵀ)/2` with standard normal `Z`.
pub fn random_symmetric(dim: usize, rng: &mut impl Rng) -> SymMatrix {
    SymMatrix::from_raw(gaussian_matrix(dim, dim, rng))
}

/// `exp(spread · G)` for a random symmetric `G`.
pub fn random_spd(dim: usize, spread: f64, rng: &mut impl Rng) -> SpdMatrix {
    random_symmetric(dim, rng).scale(spread).exp()
}

pub fn random_tuple(n: usize, dim: usize, spread: f64, rng: &mut impl Rng) -> Vec<SpdMatrix> {
    (0..n).map(|_| random_spd(dim, spread, rng)).collect()
}

/// Haar-like orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let qr = gaussian_matrix(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
    q
}

/// `U diag(s) Vᵀ` with singular values log-uniform in `[1/2, 2]`.
pub fn random_invertible(dim: usize, rng: &mut impl Rng) -> InvertibleMatrix {
    let u = random_orthogonal(dim, rng);
    let v = random_orthogonal(dim, rng);
    let s: Vec<f64> = (0..dim)
        .map(|_| (rng.gen_range(-1.0..1.0) * std::f64::consts::LN_2).exp())
        .collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s));
    InvertibleMatrix::new(u * d * v.transpose()).expect("well-conditioned by construction")
}

/// `G Gᵀ` rescaled to spectral norm `bound`.
pub fn random_psd(dim: usize, bound: f64, rng: &mut impl Rng) -> SymMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let p = SymMatrix::from_raw(&g * g.transpose());
    let norm = p.spectral_norm();
    p.scale(bound / norm)
}

/// A point at Riemannian distance exactly `radius` from `x`, in a random
/// direction: `x^{1/2} exp(radius · H/‖H‖₂) x^{1/2}`.
pub fn perturb(x: &SpdMatrix, radius: f64, rng: &mut impl Rng) -> SpdMatrix {
    let h = random_symmetric(x.dim(), rng);
    let h = h.scale(radius / h.frobenius_norm());
    let step = h.exp();
    let root = x.sqrt();
    SpdMatrix::from_raw(root.matrix() * step.matrix() * root.matrix())
}

/// Points sharing one random eigenbasis, hence pairwise commuting.
pub fn commuting_tuple(n: usize, dim: usize, spread: f64, rng: &mut impl Rng) -> Vec<SpdMatrix> {
    let q = random_orthogonal(dim, rng);
    (0..n)
        .map(|_| {
            let diag: Vec<f64> = (0..dim)
                .map(|_| (spread * rng.sample::<f64, _>(StandardNormal)).exp())
                .collect();
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
            SpdMatrix::from_raw(&q * d * q.transpose())
        })
        .collect()
}

/// Random weight with entries proportional to uniforms on `[1/2, 3/2]`.
pub fn random_weight(n: usize, rng: &mut impl Rng) -> Weight {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // absorb rounding so the sum is 1 to the last bit
    let rest: f64 = w[..n - 1].iter().sum();
    w[n - 1] = 1.0 - rest;
    Weight::new(w).expect("normalized positive entries")
}
