//! Exact polynomial automorphisms of affine 3-space and mechanical checks
//! that the automorphism `theta_N = (pi beta)^N pi (pi beta)^-N` is tame but
//! not co-tame for `N >= 3`.

pub mod affine;
pub mod certify;
pub mod degree;
pub mod endomorphism;
pub mod error;
pub mod field;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod region;
pub mod report;
pub mod stability;
pub mod strata;
pub mod suite;
pub mod word;

pub use affine::AffineMap;
pub use degree::{DegreeFn, DegreeValue, WeightVector};
pub use endomorphism::Endomorphism;
pub use error::{Error, Result};
pub use field::{BaseField, Field, FieldSpec, GaloisField, PrimeField, Rationals, SampleRng};
pub use monomial::Monomial;
pub use poly::{Budget, Polynomial};
pub use strata::{Stratum, StratumLabel};
pub use word::{Atom, Word};
