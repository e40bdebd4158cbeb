//! A single tridiagonal system `a_i u_{i-1} + b_i u_i + c_i u_{i+1} = d_i`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolveError;
use crate::scalar::Real;

/// One tridiagonal system of size `n`.
///
/// `a` is the sub-diagonal and `c` the super-diagonal, both stored with length
/// `n` so that row `i` reads `a[i]`, `b[i]`, `c[i]`, `d[i]`. The corner entries
/// `a[0]` and `c[n-1]` lie outside the matrix and must be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem<T> {
    a: Vec<T>,
    b: Vec<T>,
    c: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> TridiagonalSystem<T> {
    pub fn new(a: Vec<T>, b: Vec<T>, c: Vec<T>, d: Vec<T>) -> Result<Self, SolveError> {
        let n = b.len();
        if n == 0 {
            return Err(SolveError::Empty);
        }
        for v in [&a, &c, &d] {
            if v.len() != n {
                return Err(SolveError::LengthMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        if a[0] != T::ZERO || c[n - 1] != T::ZERO {
            return Err(SolveError::BoundaryCoefficient);
        }
        Ok(Self { a, b, c, d })
    }

    /// Builds a system from slices, copying them.
    pub fn from_slices(a: &[T], b: &[T], c: &[T], d: &[T]) -> Result<Self, SolveError> {
        Self::new(a.to_vec(), b.to_vec(), c.to_vec(), d.to_vec())
    }

    /// Identity matrix with right-hand side `d`.
    pub fn identity(d: Vec<T>) -> Result<Self, SolveError> {
        let n = d.len();
        Self::new(vec![T::ZERO; n], vec![T::ONE; n], vec![T::ZERO; n], d)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.b.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }
    pub fn b(&self) -> &[T] {
        &self.b
    }
    pub fn c(&self) -> &[T] {
        &self.c
    }
    pub fn d(&self) -> &[T] {
        &self.d
    }

    /// Replaces the right-hand side, keeping the matrix.
    pub fn with_rhs(&self, d: Vec<T>) -> Result<Self, SolveError> {
        if d.len() != self.len() {
            return Err(SolveError::LengthMismatch {
                expected: self.len(),
                found: d.len(),
            });
        }
        Ok(Self {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d,
        })
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<T>, Vec<T>, Vec<T>) {
        (self.a, self.b, self.c, self.d)
    }

    /// Checks `|b_i| > |a_i| + |c_i|` for every row.
    pub fn check_diagonal_dominance(&self) -> Result<(), SolveError> {
        for i in 0..self.len() {
            if self.b[i].abs() <= self.a[i].abs() + self.c[i].abs() {
                return Err(SolveError::NotDiagonallyDominant { index: i });
            }
        }
        Ok(())
    }

    /// `A·u`, with out-of-range neighbours contributing zero.
    pub fn apply(&self, u: &[T]) -> Vec<T> {
        let n = self.len();
        assert_eq!(u.len(), n, "vector length must match system size");
        (0..n)
            .map(|i| {
                let mut s = self.b[i] * u[i];
                if i > 0 {
                    s += self.a[i] * u[i - 1];
                }
                if i + 1 < n {
                    s += self.c[i] * u[i + 1];
                }
                s
            })
            .collect()
    }

    /// `max_i |(A·u)_i − d_i|`, evaluated in FP64.
    pub fn residual_max_norm(&self, u: &[T]) -> f64 {
        let n = self.len();
        assert_eq!(u.len(), n, "vector length must match system size");
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut s = self.b[i].to_f64() * u[i].to_f64();
            if i > 0 {
                s += self.a[i].to_f64() * u[i - 1].to_f64();
            }
            if i + 1 < n {
                s += self.c[i].to_f64() * u[i + 1].to_f64();
            }
            let r = (s - self.d[i].to_f64()).abs();
            if r > worst {
                worst = r;
            }
        }
        worst
    }

    /// Converts the coefficients to another precision.
    pub fn cast<U: Real>(&self) -> TridiagonalSystem<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::from_f64(x.to_f64())).collect::<Vec<U>>();
        TridiagonalSystem {
            a: conv(&self.a),
            b: conv(&self.b),
            c: conv(&self.c),
            d: conv(&self.d),
        }
    }
}

/// Free-function form of [`TridiagonalSystem::residual_max_norm`].
pub fn residual_max_norm<T: Real>(sys: &TridiagonalSystem<T>, u: &[T]) -> f64 {
    sys.residual_max_norm(u)
}
