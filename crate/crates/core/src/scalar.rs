//! Floating-point scalar abstraction shared by every solver.

use core::fmt::{Debug, Display};
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Working precision of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Precision {
    Fp32,
    Fp64,
}

impl Precision {
    /// Relative tolerance used when comparing against an FP64 reference.
    pub const fn tolerance(self) -> f64 {
        match self {
            Precision::Fp32 => 1e-5,
            Precision::Fp64 => 1e-12,
        }
    }

    /// Pivots with magnitude below this value are treated as zero.
    pub const fn pivot_floor(self) -> f64 {
        match self {
            Precision::Fp32 => 1e-20,
            Precision::Fp64 => 1e-30,
        }
    }

    pub const fn word_bytes(self) -> usize {
        match self {
            Precision::Fp32 => 4,
            Precision::Fp64 => 8,
        }
    }

    /// Code stored in the binary mesh header.
    pub const fn code(self) -> u32 {
        match self {
            Precision::Fp32 => 32,
            Precision::Fp64 => 64,
        }
    }

    pub const fn from_code(code: u32) -> Option<Self> {
        match code {
            32 => Some(Precision::Fp32),
            64 => Some(Precision::Fp64),
            _ => None,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Precision::Fp32 => "fp32",
            Precision::Fp64 => "fp64",
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Precision {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fp32" | "f32" | "single" => Ok(Precision::Fp32),
            "fp64" | "f64" | "double" => Ok(Precision::Fp64),
            _ => Err(()),
        }
    }
}

/// Real scalar type a solver can run in (`f32` or `f64`).
pub trait Real:
    Copy
    + Debug
    + Display
    + Default
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const PRECISION: Precision;
    const ZERO: Self;
    const ONE: Self;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;

    fn write_le(self, out: &mut alloc::vec::Vec<u8>);
    /// Reads one value from the first `PRECISION.word_bytes()` bytes.
    fn read_le(bytes: &[u8]) -> Self;

    /// True when `|v|` is below the precision's pivot floor.
    #[inline]
    fn is_negligible_pivot(self) -> bool {
        // NaN pivots compare false against the floor; catch them explicitly
        !(self.abs().to_f64() >= Self::PRECISION.pivot_floor())
    }

    #[inline]
    fn max_abs(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Real for f32 {
    const PRECISION: Precision = Precision::Fp32;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn abs(self) -> Self {
        f32::abs(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    fn write_le(self, out: &mut alloc::vec::Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        let mut buf = [0u8; 4];
        buf.copy_from_slice(&bytes[..4]);
        f32::from_le_bytes(buf)
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Fp64;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn write_le(self, out: &mut alloc::vec::Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        let mut buf = [0u8; 8];
        buf.copy_from_slice(&bytes[..8]);
        f64::from_le_bytes(buf)
    }
}

/// Max-norm of a slice, in FP64.
pub fn max_norm<T: Real>(v: &[T]) -> f64 {
    v.iter().fold(0.0f64, |m, x| {
        let a = x.abs().to_f64();
        if a > m {
            a
        } else {
            m
        }
    })
}

/// `‖u − v‖∞` in FP64. Slices must have equal length.
pub fn max_abs_diff<T: Real, U: Real>(u: &[T], v: &[U]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).fold(0.0f64, |m, (a, b)| {
        let d = (a.to_f64() - b.to_f64()).abs();
        if d > m || d.is_nan() {
            d
        } else {
            m
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_are_ordered() {
        assert!(Precision::Fp32.tolerance() > Precision::Fp64.tolerance());
        assert!(Precision::Fp64.tolerance() > 0.0);
    }

    #[test]
    fn precision_codes_round_trip() {
        for p in [Precision::Fp32, Precision::Fp64] {
            assert_eq!(Precision::from_code(p.code()), Some(p));
        }
        assert_eq!(Precision::from_code(16), None);
    }

    #[test]
    fn negligible_pivots() {
        assert!(0.0f64.is_negligible_pivot());
        assert!(1e-31f64.is_negligible_pivot());
        assert!(!1e-29f64.is_negligible_pivot());
        assert!(1e-21f32.is_negligible_pivot());
        assert!(f64::NAN.is_negligible_pivot());
    }

    #[test]
    fn le_bytes_round_trip() {
        let mut out = alloc::vec::Vec::new();
        1.25f64.write_le(&mut out);
        (-3.5f32).write_le(&mut out);
        assert_eq!(f64::read_le(&out[..8]), 1.25);
        assert_eq!(f32::read_le(&out[8..]), -3.5);
    }
}
