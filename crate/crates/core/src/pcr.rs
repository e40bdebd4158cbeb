//! Parallel cyclic reduction.
//!
//! The system is normalised to a unit diagonal and then, for strides
//! `s = 1, 2, 4, ...`, every row eliminates its couplings to rows `i ± s`.
//! After `P = ⌈log2 n⌉` steps all off-diagonal couplings vanish and the
//! right-hand side holds the solution. Rows outside `[0, n)` act as identity
//! rows with zero right-hand side, so no padding is needed for non-power-of-two
//! sizes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolveError;
use crate::scalar::Real;
use crate::system::TridiagonalSystem;

/// Number of reduction steps: the smallest `P` with `2^P >= n`.
pub fn pcr_steps(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub fn pcr_solve<T: Real>(sys: &TridiagonalSystem<T>) -> Result<Vec<T>, SolveError> {
    let n = sys.len();
    let mut a = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let bi = sys.b()[i];
        if bi.is_negligible_pivot() {
            return Err(SolveError::ZeroPivot { index: i });
        }
        a.push(sys.a()[i] / bi);
        c.push(sys.c()[i] / bi);
        d.push(sys.d()[i] / bi);
    }

    let mut na = vec![T::ZERO; n];
    let mut nc = vec![T::ZERO; n];
    let mut nd = vec![T::ZERO; n];
    for p in 0..pcr_steps(n) {
        let s = 1usize << p;
        for i in 0..n {
            let (a_lo, c_lo, d_lo) = if i >= s {
                (a[i - s], c[i - s], d[i - s])
            } else {
                (T::ZERO, T::ZERO, T::ZERO)
            };
            let (a_hi, c_hi, d_hi) = if i + s < n {
                (a[i + s], c[i + s], d[i + s])
            } else {
                (T::ZERO, T::ZERO, T::ZERO)
            };
            let den = T::ONE - a[i] * c_lo - c[i] * a_hi;
            if den.is_negligible_pivot() {
                return Err(SolveError::ZeroPivot { index: i });
            }
            let r = T::ONE / den;
            na[i] = -(r * (a[i] * a_lo));
            nc[i] = -(r * (c[i] * c_hi));
            nd[i] = r * (d[i] - a[i] * d_lo - c[i] * d_hi);
        }
        core::mem::swap(&mut a, &mut na);
        core::mem::swap(&mut c, &mut nc);
        core::mem::swap(&mut d, &mut nd);
    }
    Ok(d)
}
