//! High-precision construction of Pade and type I/II Hermite-Pade
//! approximants to an explicit algebraic model function, scalar mixed
//! Green-logarithmic equilibrium problems on two real segments, and
//! empirical verification of the predicted convergence rates.

pub mod complex;
pub mod equilibrium;
pub mod error;
pub mod hp;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod potential;
pub mod precision;
pub mod rates;

pub use complex::{Complex, Point};
pub use equilibrium::{EquilibriumSolution, RateKind};
pub use error::{CoreError, Result};
pub use hp::{HpSolution, RemainderOrder, SystemKind};
pub use model::ModelParams;
pub use poly::{poly_roots, Polynomial, ZeroSet};
pub use rates::{RatePoint, RateReport};
pub use potential::{Segment, SegmentMeasure};
pub use precision::PrecisionContext;
