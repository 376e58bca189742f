//! Exact difference-differential calculus for free noncommutative functions
//! and synthesis of antiderivatives over the rationals.

pub mod derivations;
pub mod diffcalc;
pub mod error;
pub mod exactalg;
pub mod integrate;
pub mod json;
pub mod multilinear;
pub mod ncpoly;
pub mod report;
pub mod suite;
pub mod testkit;

pub use derivations::DerivationTable;
pub use diffcalc::{NcFn, NcFunction, NcOracle};
pub use error::{NcError, Result};
pub use exactalg::{PointMatrix, Scalar, ScalarMatrix};
pub use integrate::{
    Antiderivative, ConstantDifference, DeltaSample, IntegrabilitySample, SampleConfig,
};
pub use multilinear::{ArgShape, MultiLinearMap};
pub use ncpoly::{Monomial, MonomialKey, NcPolynomial, Word};
pub use report::CheckReport;
