//! Geo-aggregated routing on the Euclidean plane.
//!
//! Every point of a bounded world disk is a router. Routers remember
//! directions to the representatives of ball aggregates taken from a
//! multilevel self-similar cover, choosing only aggregates whose angular size
//! stays under `arccos(1/σ)`. Forwarding in small steps toward those
//! representatives keeps every routed path within stretch `σ`, and each
//! router needs only a bounded number of aggregates per order, so tables grow
//! with `log_s(R / r_0)`.
//!
//! All math is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the common `f64` case.

// `!(x > 0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod cover;
pub mod error;
pub mod format;
pub mod geometry;
pub mod routing;
pub mod scalar;

pub use cover::{Aggregate, Cover, LevelCover, MultilevelCover};
pub use error::{Error, Result};
pub use geometry::{Angle, Direction, Disk, Point};
pub use routing::{Decision, RoutePath, Router, RoutingParams, RoutingTable};
pub use scalar::Scalar;

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type Direction64 = Direction<f64>;
pub type Aggregate64 = Aggregate<f64>;
pub type LevelCover64 = LevelCover<f64>;
pub type MultilevelCover64 = MultilevelCover<f64>;
pub type MultilevelCover32 = MultilevelCover<f32>;
pub type RoutingParams64 = RoutingParams<f64>;
pub type RoutingParams32 = RoutingParams<f32>;
pub type RoutingTable64 = RoutingTable<f64>;
pub type RoutePath64 = RoutePath<f64>;
