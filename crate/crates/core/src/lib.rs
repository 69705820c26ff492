//! Principal eigenvectors and principal ratios of graphs, and how they react
//! to adding or deleting a single edge.
//!
//! The numeric core (Chebyshev evaluation, the dense eigensolver, power
//! iteration and the eigenvector perturbation pipeline) is generic over the
//! [`Real`] scalar trait; the aliases below fix it to `f64`.

pub mod bounds;
pub mod chebyshev;
pub mod edgelist;
pub mod error;
pub mod families;
pub mod graph;
pub mod linalg;
pub mod perturbation;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use families::{FamilySpec, RingDescriptor};
pub use graph::{Edge, Graph, StructureSummary};
pub use scalar::Real;

pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type SymmetricEigen64 = linalg::SymmetricEigen<f64>;
pub type Eigenpair64 = spectral::Eigenpair<f64>;
pub type SpectrumSummary64 = spectral::SpectrumSummary<f64>;
pub type RatioReport64 = spectral::RatioReport<f64>;

pub type PerturbationSystem64 = perturbation::PerturbationSystem<f64>;
pub type PerturbationReport64 = perturbation::PerturbationReport<f64>;
