//! Dense Gaussian elimination with partial pivoting, used as a reference.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolveError;
use crate::scalar::Real;
use crate::system::TridiagonalSystem;

/// Largest system the dense reference accepts.
pub const DENSE_ORACLE_LIMIT: usize = 4096;

/// Solves the system by expanding it into a dense `n × n` matrix and running
/// Gaussian elimination with partial pivoting, always in FP64.
pub fn dense_oracle_solve<T: Real>(sys: &TridiagonalSystem<T>) -> Result<Vec<f64>, SolveError> {
    let n = sys.len();
    if n > DENSE_ORACLE_LIMIT {
        return Err(SolveError::OracleTooLarge {
            n,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    let mut m = vec![0.0f64; n * n];
    let mut rhs: Vec<f64> = sys.d().iter().map(|v| v.to_f64()).collect();
    for i in 0..n {
        m[i * n + i] = sys.b()[i].to_f64();
        if i > 0 {
            m[i * n + i - 1] = sys.a()[i].to_f64();
        }
        if i + 1 < n {
            m[i * n + i + 1] = sys.c()[i].to_f64();
        }
    }

    for k in 0..n {
        let mut piv = k;
        let mut best = m[k * n + k].abs();
        for r in k + 1..n {
            let v = m[r * n + k].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 || best.is_nan() {
            return Err(SolveError::SingularMatrix { column: k });
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            rhs.swap(k, piv);
        }
        let pivot = m[k * n + k];
        for r in k + 1..n {
            let factor = m[r * n + k] / pivot;
            // structurally zero rows need no update
            if factor == 0.0 {
                continue;
            }
            m[r * n + k] = 0.0;
            for j in k + 1..n {
                m[r * n + j] -= factor * m[k * n + j];
            }
            rhs[r] -= factor * rhs[k];
        }
    }

    let mut u = vec![0.0f64; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= m[k * n + j] * u[j];
        }
        u[k] = s / m[k * n + k];
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_by_hand() {
        let sys = TridiagonalSystem::new(
            vec![0.0, 0.5],
            vec![1.0, 1.0],
            vec![0.5, 0.0],
            vec![1.5, 1.5],
        )
        .unwrap();
        let u = dense_oracle_solve(&sys).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-15);
        assert!((u[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_unknown() {
        let sys = TridiagonalSystem::new(vec![0.0], vec![3.0], vec![0.0], vec![9.0]).unwrap();
        assert_eq!(dense_oracle_solve(&sys).unwrap(), vec![3.0]);
    }

    #[test]
    fn identity_returns_rhs() {
        let d = vec![1.5, -2.0, 0.0, 7.25, 3.0];
        let sys = TridiagonalSystem::identity(d.clone()).unwrap();
        assert_eq!(dense_oracle_solve(&sys).unwrap(), d);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        // [0 1; 1 0] u = [2; 3] -> u = [3, 2]
        let sys = TridiagonalSystem::new(
            vec![0.0, 1.0],
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![2.0, 3.0],
        )
        .unwrap();
        assert_eq!(dense_oracle_solve(&sys).unwrap(), vec![3.0, 2.0]);
    }

    #[test]
    fn singular_detected() {
        let sys =
            TridiagonalSystem::new(vec![0.0; 2], vec![1.0, 0.0], vec![0.0; 2], vec![1.0; 2]).unwrap();
        assert_eq!(
            dense_oracle_solve(&sys),
            Err(SolveError::SingularMatrix { column: 1 })
        );
    }

    #[test]
    fn size_limit() {
        let sys = TridiagonalSystem::identity(vec![0.0f32; DENSE_ORACLE_LIMIT + 1]).unwrap();
        assert!(matches!(
            dense_oracle_solve(&sys),
            Err(SolveError::OracleTooLarge { .. })
        ));
    }
}
