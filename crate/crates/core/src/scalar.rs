//! Scalar abstractions shared by the aligners.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, Num};

/// A cost value that can be summed and compared.
///
/// Blanket-implemented, so `i32`, `i64`, `f32`, `f64` and
/// `num_rational::Ratio<i64>` all qualify.
pub trait Cost: Num + Copy + PartialOrd + Debug + Send + Sync {}

impl<T> Cost for T where T: Num + Copy + PartialOrd + Debug + Send + Sync {}

/// An attention weight read from a text file.
pub trait Weight: Float + FromStr + Display + Debug + Send + Sync {}

impl<T> Weight for T where T: Float + FromStr + Display + Debug + Send + Sync {}
