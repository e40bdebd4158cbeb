//! Thomas algorithm: forward elimination followed by back substitution.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolveError;
use crate::scalar::Real;
use crate::system::TridiagonalSystem;

/// Solves `sys` with the Thomas algorithm. The input is left untouched.
pub fn thomas_solve<T: Real>(sys: &TridiagonalSystem<T>) -> Result<Vec<T>, SolveError> {
    let n = sys.len();
    let mut c_star = vec![T::ZERO; n];
    let mut u = vec![T::ZERO; n];
    thomas_solve_into(sys.a(), sys.b(), sys.c(), sys.d(), &mut c_star, &mut u)?;
    Ok(u)
}

/// Slice form of the Thomas solve. `c_star` is scratch space and `u` receives
/// the solution (it holds `d*` during the forward sweep). All slices have the
/// same length.
pub fn thomas_solve_into<T: Real>(
    a: &[T],
    b: &[T],
    c: &[T],
    d: &[T],
    c_star: &mut [T],
    u: &mut [T],
) -> Result<(), SolveError> {
    let n = b.len();
    debug_assert!(a.len() == n && c.len() == n && d.len() == n);
    debug_assert!(c_star.len() == n && u.len() == n);
    if n == 0 {
        return Err(SolveError::Empty);
    }

    if b[0].is_negligible_pivot() {
        return Err(SolveError::ZeroPivot { index: 0 });
    }
    u[0] = d[0] / b[0];
    c_star[0] = c[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * c_star[i - 1];
        if den.is_negligible_pivot() {
            return Err(SolveError::ZeroPivot { index: i });
        }
        let r = T::ONE / den;
        u[i] = r * (d[i] - a[i] * u[i - 1]);
        c_star[i] = r * c[i];
    }

    for i in (0..n - 1).rev() {
        u[i] -= c_star[i] * u[i + 1];
    }
    Ok(())
}

/// Thomas solve of `lanes` independent systems stored interleaved: element `i`
/// of lane `l` lives at `i * lanes + l`.
///
/// `d` is overwritten with the solutions. Lanes advance through the sweep in
/// chunks of `vector` so one row of every lane is finished before the next row
/// starts. Each lane performs exactly the arithmetic of [`thomas_solve_into`],
/// so results are bitwise identical to the scalar solver.
///
/// `failures[l]` receives the first zero-pivot row of lane `l`, if any; the
/// remaining lanes are still solved.
#[allow(clippy::too_many_arguments)]
pub fn thomas_interleaved<T: Real>(
    n: usize,
    lanes: usize,
    vector: usize,
    a: &[T],
    b: &[T],
    c: &[T],
    d: &mut [T],
    c_star: &mut [T],
    failures: &mut [Option<usize>],
) {
    debug_assert!(a.len() >= n * lanes && b.len() >= n * lanes && c.len() >= n * lanes);
    debug_assert!(d.len() >= n * lanes && c_star.len() >= n * lanes);
    debug_assert!(failures.len() >= lanes);
    let vector = vector.max(1);
    if n == 0 || lanes == 0 {
        return;
    }
    for f in failures.iter_mut().take(lanes) {
        *f = None;
    }

    let mut chunk = 0;
    while chunk < lanes {
        let end = (chunk + vector).min(lanes);
        for l in chunk..end {
            if b[l].is_negligible_pivot() {
                failures[l] = Some(0);
            }
            d[l] = d[l] / b[l];
            c_star[l] = c[l] / b[l];
        }
        chunk = end;
    }

    for i in 1..n {
        let row = i * lanes;
        let prev = row - lanes;
        let mut chunk = 0;
        while chunk < lanes {
            let end = (chunk + vector).min(lanes);
            for l in chunk..end {
                let den = b[row + l] - a[row + l] * c_star[prev + l];
                if den.is_negligible_pivot() && failures[l].is_none() {
                    failures[l] = Some(i);
                }
                let r = T::ONE / den;
                d[row + l] = r * (d[row + l] - a[row + l] * d[prev + l]);
                c_star[row + l] = r * c[row + l];
            }
            chunk = end;
        }
    }

    for i in (0..n - 1).rev() {
        let row = i * lanes;
        let next = row + lanes;
        let mut chunk = 0;
        while chunk < lanes {
            let end = (chunk + vector).min(lanes);
            for l in chunk..end {
                d[row + l] -= c_star[row + l] * d[next + l];
            }
            chunk = end;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_system() {
        let sys = TridiagonalSystem::new(
            vec![0.0; 3],
            vec![2.0; 3],
            vec![0.0; 3],
            vec![2.0, 4.0, 6.0],
        )
        .unwrap();
        assert_eq!(thomas_solve(&sys).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn single_unknown() {
        let sys = TridiagonalSystem::new(vec![0.0], vec![5.0], vec![0.0], vec![10.0]).unwrap();
        assert_eq!(thomas_solve(&sys).unwrap(), vec![2.0]);
    }

    #[test]
    fn zero_pivots_are_reported() {
        let sys = TridiagonalSystem::new(vec![0.0; 2], vec![0.0, 1.0], vec![0.0; 2], vec![1.0; 2])
            .unwrap();
        assert_eq!(thomas_solve(&sys), Err(SolveError::ZeroPivot { index: 0 }));

        // b_1 - a_1 c*_0 = 1 - 1 * 1 = 0
        let sys = TridiagonalSystem::new(
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0; 3],
        )
        .unwrap();
        assert_eq!(thomas_solve(&sys), Err(SolveError::ZeroPivot { index: 1 }));
    }

    #[test]
    fn fp32_pivot_floor() {
        let sys = TridiagonalSystem::new(vec![0.0f32], vec![1e-21], vec![0.0], vec![1.0]).unwrap();
        assert_eq!(thomas_solve(&sys), Err(SolveError::ZeroPivot { index: 0 }));
    }

    #[test]
    fn interleaved_matches_scalar_bitwise() {
        // three lanes with different coefficients, n = 4
        let n = 4;
        let lanes = 3;
        let systems: Vec<TridiagonalSystem<f64>> = (0..lanes)
            .map(|l| {
                let s = l as f64;
                TridiagonalSystem::new(
                    vec![0.0, 0.3 + s, -0.2, 0.1 * s],
                    vec![4.0 + s, 3.0, 5.0 - s, 2.5],
                    vec![0.7, -0.4 * s, 1.1, 0.0],
                    vec![1.0, 2.0 + s, -3.0, 0.5],
                )
                .unwrap()
            })
            .collect();
        let mut a = vec![0.0; n * lanes];
        let mut b = a.clone();
        let mut c = a.clone();
        let mut d = a.clone();
        for (l, s) in systems.iter().enumerate() {
            for i in 0..n {
                a[i * lanes + l] = s.a()[i];
                b[i * lanes + l] = s.b()[i];
                c[i * lanes + l] = s.c()[i];
                d[i * lanes + l] = s.d()[i];
            }
        }
        let mut scratch = vec![0.0; n * lanes];
        let mut failures = vec![None; lanes];
        thomas_interleaved(n, lanes, 2, &a, &b, &c, &mut d, &mut scratch, &mut failures);
        assert!(failures.iter().all(Option::is_none));
        for (l, s) in systems.iter().enumerate() {
            let u = thomas_solve(s).unwrap();
            for i in 0..n {
                assert_eq!(d[i * lanes + l].to_bits(), u[i].to_bits());
            }
        }
    }

    #[test]
    fn interleaved_flags_only_failing_lane() {
        let lanes = 2;
        let a = vec![0.0; 2 * lanes];
        let b = vec![1.0, 0.0, 1.0, 1.0];
        let c = vec![0.0; 2 * lanes];
        let mut d = vec![1.0; 2 * lanes];
        let mut scratch = vec![0.0; 2 * lanes];
        let mut failures = vec![None; lanes];
        thomas_interleaved(2, lanes, 1, &a, &b, &c, &mut d, &mut scratch, &mut failures);
        assert_eq!(failures, vec![None, Some(0)]);
        assert_eq!(d[0], 1.0);
        assert_eq!(d[2], 1.0);
    }
}
