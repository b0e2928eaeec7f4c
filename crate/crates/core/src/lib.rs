//! Geometric means on the cone of symmetric positive definite matrices.
//!
//! The crate covers the binary geometric mean `A # B`, the Riemannian and
//! Thompson metrics, the ALM, inductive, power and Karcher means of several
//! matrices, Sturm's stochastic walks, and Karcher barycenters of finitely
//! supported measures with their Wasserstein contractivity. Each family comes
//! with executable checkers for the properties it is expected to satisfy.
//!
//! ```
//! use spd_means::{geometric_mean, SpdMatrix};
//!
//! let a = SpdMatrix::from_diagonal(&[4.0]).unwrap();
//! let b = SpdMatrix::from_diagonal(&[9.0]).unwrap();
//! let g = geometric_mean(&a, &b).unwrap();
//! assert!((g.matrix()[(0, 0)] - 6.0).abs() < 1e-12);
//! ```

pub mod axioms;
pub mod barycenter;
pub mod binary;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod multi;
pub mod random;
pub mod report;
pub mod stochastic;

pub use axioms::{check_alm_axioms, AxiomInputs, MeanSelector};
pub use barycenter::{karcher_barycenter, wasserstein, DiscreteMeasure};
pub use binary::{arithmetic_mean, geometric_mean, harmonic_mean};
pub use error::{Error, Result};
pub use linalg::{InvertibleMatrix, SpdMatrix, SymMatrix};
pub use metrics::{delta, thompson, weighted_geometric, MetricTag};
pub use multi::{
    alm_mean, inductive_mean, karcher_mean, power_mean, Solution, SolverConfig, Weight,
    WeightedTuple,
};
pub use report::{Check, Report, Tolerance};
pub use stochastic::{deterministic_walk, sturm_walk, Recording, WalkTrace};
