//! Arithmetic abstractions shared by datasets and the LP core.
//!
//! Two layers:
//!
//! * [`Count`] is what a dataset multiplicity needs: additive, ordered,
//!   convertible from an integer bound. Implemented by `BigInt` (integer
//!   datasets), `BigRational` (relaxed datasets) and the binary floats.
//! * [`LpScalar`] is the field the simplex pivots over. Implemented by
//!   `BigRational` (exact mode, the default) and `f64`/`f32` (tolerance
//!   mode). Integer types deliberately do not implement it: their division
//!   truncates.

use std::fmt;

use num::{BigInt, BigRational, ToPrimitive};
use num_traits::{NumAssign, Signed, Zero};

/// A dataset multiplicity. Exact types keep comparisons in `verify` free of
/// drift; floats are accepted so relaxed float-mode solutions can be
/// inspected with the same code.
pub trait Count:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Zero + std::ops::AddAssign
{
    fn from_count(n: u64) -> Self;
}

impl Count for BigInt {
    fn from_count(n: u64) -> Self {
        BigInt::from(n)
    }
}

impl Count for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

impl Count for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }
}

impl Count for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }
}

/// Scalar type the revised simplex runs on.
///
/// `EXACT` types must return a zero [`tolerance`](LpScalar::tolerance); the
/// solver then compares exactly and keeps Bland's rule permanently on.
pub trait LpScalar: Count + NumAssign + Signed {
    const EXACT: bool;

    /// Pivot tolerance: values within it of zero are treated as zero.
    fn tolerance() -> Self;

    /// Splits a non-negative value into integer floor and fractional rest.
    fn floor_frac(&self) -> (u64, Self);
}

impl LpScalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn floor_frac(&self) -> (u64, Self) {
        let fl = self.floor();
        let n = fl.to_integer().to_u64().unwrap_or(0);
        (n, self - fl)
    }
}

impl LpScalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-9
    }

    fn floor_frac(&self) -> (u64, Self) {
        let fl = self.floor().max(0.0);
        (fl as u64, self - fl)
    }
}

impl LpScalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-4
    }

    fn floor_frac(&self) -> (u64, Self) {
        let fl = self.floor().max(0.0);
        (fl as u64, self - fl)
    }
}
