//! Ladder operators `P̂` (second-order differential) and `M̂` (first-order
//! integral) with `[P̂, M̂] = 1`, their Laguerre-type eigenfunctions, and the
//! applications built on them: an umbral solver for integro-differential
//! equations, flattened beam modes and point maps between heat-type PDEs.
//!
//! The ladder algebra is generic over [`Scalar`]; run it over
//! [`BigRational`](num_rational::BigRational) for exact identities and over
//! `f64` for evaluation.

pub mod beams;
pub mod cli;
pub mod error;
pub mod ladder;
pub mod laguerre;
pub mod orthogonality;
pub mod pde_maps;
pub mod profiles;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod table;
pub mod umbral_solver;
pub mod verify;

pub use error::{Error, Result};
pub use ladder::{closed_form_coeffs, monomial, LadderState};
pub use profiles::{Flavor, YProfile};
pub use scalar::{Dual, Scalar};

pub type ExactState = LadderState<num_rational::BigRational>;
pub type FloatState = LadderState<f64>;
