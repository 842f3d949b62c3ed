//! Elliptic bases and elliptic normal bases for finite field extensions
//! F_{q^d}/F_q: construction from a curve/torsion pair, near-shift Frobenius,
//! sparse multiplication with exact operation counts, the five-convolution
//! normal-basis tensor, and quasi-linear coordinate changes to a polynomial
//! basis for inversion and division.

pub mod bitint;
pub mod bundle;
pub mod conv;
pub mod counters;
pub mod curve;
pub mod ell_functions;
pub mod error;
pub mod ext;
pub mod field;
pub mod omega;
pub mod models;
pub mod params;
pub mod poly;
pub mod psi;
pub mod rng;
pub mod solve;
pub mod theta;

pub use conv::{convolution_inverse, cyclic_convolution, ConvolutionStrategy};
pub use counters::{A1Shape, OpTally};
pub use curve::{velu_isogeny, CurvePoint, Isogeny, Point, WeierstrassCurve};
pub use ell_functions::{gamma, gamma_origin, u_func, EllFunction, GammaValue};
pub use error::{Error, Result};
pub use ext::QuotientField;
pub use field::{BaseField, BaseFieldElement, ExtFieldElement, Field, PrimeField};
pub use models::CurveModel;
pub use omega::{Basis, CoordVector, OmegaContext};
pub use params::{
    compute_dq, existence_check, find_base_change, BaseChangePlan, DqProfile, XiModel,
};
pub use poly::{multipoint_eval, Polynomial};
pub use psi::{lagrange_invert, PsiContext};
pub use rng::SplitMix64;
pub use solve::{quadratic_roots, sqrt};
pub use theta::{OrbitKind, ThetaContext};
