//! Hyperpolygon spaces, the strongly parabolic Higgs bundles they map to, and the
//! numerical machinery that checks the small-R degeneration of the Hitchin metric.
//!
//! Everything numeric is generic over [`Real`]; the `*64` aliases below fix `f64`.

pub mod error;
pub mod extrapolate;
pub mod gibbons_hawking;
pub mod globalmetric;
pub mod higgs;
pub mod hp_tangent;
pub mod hyperpolygon;
pub mod localmodel;
pub mod mat2;
pub mod quadrature;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Tol};

pub type CVec2 = mat2::Vec2<f64>;
pub type CCovec2 = mat2::Covec2<f64>;
pub type CMat2 = mat2::Mat2<f64>;
pub type Herm2 = mat2::Herm2<f64>;
pub type QuiverRep = hyperpolygon::QuiverRep<f64>;
pub type BetaWeights = hyperpolygon::BetaWeights<f64>;
pub type GroupElt = hyperpolygon::GroupElt<f64>;
pub type TangentHP = hp_tangent::TangentHP<f64>;
pub type ParabolicHiggs = higgs::ParabolicHiggs<f64>;
pub type AlphaWeights = higgs::AlphaWeights<f64>;
pub type LocalData = localmodel::LocalData<f64>;
pub type LocalTangent = localmodel::LocalTangent<f64>;
pub type ApproxMetric = globalmetric::ApproxMetric<f64>;
pub type GHData = gibbons_hawking::GHData<f64>;

pub type QuiverRep32 = hyperpolygon::QuiverRep<f32>;
pub type LocalData32 = localmodel::LocalData<f32>;
