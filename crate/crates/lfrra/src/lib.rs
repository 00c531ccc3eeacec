//! Linear fractional relative risk aversion (LFRRA) preferences.
//!
//! The RRA of the family is `(αq+β)/(ασq+1)`. The crate provides
//!
//! * [`specfun`]: Gauss hypergeometric function with its integral
//!   continuation, exponential integral, lower incomplete gamma, Lambert W
//!   and adaptive quadrature;
//! * [`utility`]: utility levels, marginal utilities, admissible quantity
//!   ranges and demand for the family and its limits (HARA, CREMR and the
//!   translated CREMR form);
//! * [`markup`]: the monopolistically competitive pricing equilibrium —
//!   case classification, markup and quantity ranges, the markup solver,
//!   second-order conditions, comparative statics and equilibrium curves;
//! * [`estimator`]: constrained least-squares estimation from firm markups
//!   and quantities with percentile-bootstrap classification of RRA shape;
//! * [`solve`]: bracketed root finding and one-dimensional minimisation.

pub mod error;
pub mod estimator;
pub mod markup;
pub mod solve;
pub mod specfun;
pub mod utility;

pub use error::{Error, Result};
pub use estimator::{
    EstimationConfig, EstimationResult, FirmObservation, PreparedData, RawObservation, RraType, Specification,
};
pub use markup::{CaseLabel, MarkupSolution};
pub use utility::{LfrraParams, UtilitySpec, Variant};
