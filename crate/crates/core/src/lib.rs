//! Iterated-weight improvements of Hardy, gaussian Poincaré and Hardy–Poincaré
//! inequalities, with the numerical machinery to check them.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, threading and the
//! command line live in the `ineq-forge` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod math;

pub mod error;
pub mod functionals;
pub mod quadrature;
pub mod radial_calculus;
pub mod special;
pub mod spectral_verifier;
mod tabulate;
pub mod tridiagonal;
pub mod weight_chains;

pub use error::{Error, Result};
pub use functionals::{FunctionalValue, RhsAdjustment};
pub use quadrature::QuadratureResult;
pub use radial_calculus::{Gauge, MeasureKind, MeasureSpec, RadialProfile};
pub use spectral_verifier::{Discretization, RadialDomain, RemainderProbe, VerificationReport, Verdict};
pub use tridiagonal::{Coordinate, TridiagonalSystem};
pub use weight_chains::{FamilyTag, WeightChainSpec, WeightSequenceSample};
