//! Exact-arithmetic engine for equivariant vector bundles on the projective
//! line: Birkhoff–Grothendieck splitting with factorization witnesses, the
//! finite-dimensional algebra of global endomorphisms, and canonical
//! reductions of structure group to Levi subgroups with machine-checkable
//! certificates of equivariance, minimality and uniqueness.
//!
//! Everything is computed over cyclotomic number fields; there is no floating
//! point anywhere. Certificates embed enough data for independent replay.

pub mod error;
pub mod scalar;
pub mod poly;
pub mod ratfunc;
pub mod linalg;
pub mod laurent;
pub mod mpoly;
pub mod bundle;
pub mod endo;
pub mod equivariant;
pub mod levi;
pub mod quotients;
pub mod instance;
pub mod report;

pub use error::Error;
pub use scalar::Scalar;
pub use poly::Poly;
pub use laurent::{LaurentPoly, LaurentMatrix};
pub use bundle::{BundleDesc, SplitBundle, SplitType};
pub use endo::{EndAlgebra, GlobalEndo};
pub use equivariant::{GammaStructure, Mobius};
pub use levi::{Decomposition, LeviClass};
pub use instance::Instance;

pub type Result<T> = std::result::Result<T, Error>;
