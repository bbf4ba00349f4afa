//! Closed-form isotropic correlation function of an arbitrary triangle.
//!
//! The analytic path ([`geometry`], [`omega`], [`cf_eval`]) is generic over
//! the scalar type; [`oracle`], [`quadrature`] and [`formfactor`] work in
//! `f64`. Concrete aliases for the common instantiations live at the crate
//! root.

// Reference constants keep their published digits; `!(x >= lo)` style
// comparisons are how NaN gets rejected.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cf_eval;
pub mod error;
pub mod formfactor;
pub mod geometry;
pub mod omega;
pub mod oracle;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod validate;

pub use cf_eval::{
    chain_constants, correlation, eval_profile, first_derivative, interval_formula,
    second_derivative, third_derivative, BoundaryConstants, CFValue, CorrelationFunction,
    IntervalFormula,
};
pub use error::{DomainError, Error, EvalError, GeometryError, QuadratureError, Result};
pub use geometry::{
    breakpoints, classify, derive_metrics, BreakpointLadder, Height, Interval, ShapeCase,
    SideTriple, TriangleMetrics,
};
pub use omega::{angular_constants, AngularConstants};
pub use oracle::PlacedTriangle;
pub use scalar::Real;

pub type Triangle = TriangleMetrics<f64>;
pub type Triangle32 = TriangleMetrics<f32>;
pub type Correlation = CorrelationFunction<f64>;
pub type Correlation32 = CorrelationFunction<f32>;
pub type Ladder = BreakpointLadder<f64>;
pub type Constants = AngularConstants<f64>;
pub type Sample = CFValue<f64>;
