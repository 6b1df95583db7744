//! Computational experiments around Runge approximation, polynomial and
//! rational hulls, power series and Siciak extremal functions on C^n, with
//! "random" (measurably parametrized) versions over finite sample spaces.

pub mod compact;
pub mod contour;
pub mod error;
pub mod exec;
pub mod expr;
pub mod extremal;
pub mod hulls;
pub mod numeric;
pub mod random;
pub mod runge;
pub mod series;

pub use compact::{hausdorff, image, max_abs_on, union, CompactNet, Shape};
pub use error::{Error, ParseError, Result};
pub use expr::FunctionExpr;
pub use numeric::{c64, BoxRegion, ComplexMap, MultiIndex, Polynomial, RationalFunction, C64};
