//! Rotated bounding boxes modelled as 2-D Gaussians.
//!
//! The crate converts oriented boxes into Gaussians and evaluates the
//! closed-form Gaussian Wasserstein distance with its analytic gradient. The
//! IoU-shaped losses are built on top of that distance. Exact rotated-box IoU
//! comes from convex clipping. The [`harness`] module runs the loss-behaviour
//! experiments and writes CSV and SVG output.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases. The harness works in `f64` only.

pub mod error;
pub mod gaussian;
pub mod geometry;
pub mod harness;
pub mod loss;
mod scalar;

pub use error::{Error, Result};
pub use gaussian::{
    box_to_gaussian, gwd_gradient, gwd_gradient_params, gwd_squared, gwd_squared_commutative,
    sqrtm_spd2, transport_map, Gaussian2, SymMat2,
};
pub use geometry::{
    box_vertices, clip_convex, convert_convention, make_box, monte_carlo_iou,
    monte_carlo_iou_estimate, rotated_iou, BoxParams, Convention, ConvexPolygon, McEstimate,
    OrientedBox, Point2,
};
pub use loss::{
    decode_deltas, encode_deltas, encode_params, gwd_loss, regression_objective, smooth_l1,
    smooth_l1_gradient, LossConfig, LossForm, RegressionDelta, RegressionWeights, Transform,
    SMOOTH_L1_BETA,
};
pub use scalar::Scalar;

pub type OrientedBox64 = OrientedBox<f64>;
pub type OrientedBox32 = OrientedBox<f32>;
pub type BoxParams64 = BoxParams<f64>;
pub type BoxParams32 = BoxParams<f32>;
pub type Gaussian64 = Gaussian2<f64>;
pub type Gaussian32 = Gaussian2<f32>;
pub type SymMat64 = SymMat2<f64>;
pub type SymMat32 = SymMat2<f32>;
pub type Polygon64 = ConvexPolygon<f64>;
pub type Polygon32 = ConvexPolygon<f32>;
pub type LossConfig64 = LossConfig<f64>;
pub type LossConfig32 = LossConfig<f32>;
