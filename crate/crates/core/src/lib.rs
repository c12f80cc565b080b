//! Hybrid point sets built from Halton-type sequences over `F_p[X]` and
//! polynomial lattice point sets, with exact star-discrepancy evaluation
//! and computable discrepancy certificates.

pub mod discrepancy;
pub mod error;
pub mod gfpoly;
pub mod plattice;
pub mod search;
pub mod seqgen;
pub mod suites;
pub mod walsh;

/// Exact rational numbers used for coordinates, volumes and discrepancies.
pub type Rational = num_rational::Ratio<i128>;

pub use discrepancy::{
    hybrid_bound_certificate, star_discrepancy_1d, star_discrepancy_exact, Certificate, PointSetD,
};
pub use error::{Error, ErrorKind, Result};
pub use gfpoly::{PrimeModulus, Poly};
pub use plattice::{korobov_qvec, LatticeConfig, SubLatticeSpec};
pub use seqgen::{BasePRational, HaltonConfig, ResidueClass, SigmaBijection};
pub use walsh::WalshIndex;
