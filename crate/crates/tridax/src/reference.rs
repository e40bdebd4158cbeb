//! Straightforward ADI implementation used to check the blocked driver.
//!
//! Plain nested loops over `Vec` indices and a textbook Thomas solve per line.
//! Nothing here shares code with the line batching in the core crate.

use tridax_core::{DiagonalRule, Dims, Mesh, Real};

fn thomas_line<T: Real>(a: &[T], b: &[T], c: &[T], d: &mut [T]) {
    let n = d.len();
    let mut cp = vec![T::ZERO; n];
    cp[0] = c[0] / b[0];
    d[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        d[i] = (d[i] - a[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
}

fn idx(dims: Dims, b: usize, i: usize, j: usize, k: usize) -> usize {
    ((b * dims.z + k) * dims.y + j) * dims.x + i
}

/// One ADI step on `u` in place.
pub fn naive_adi_step<T: Real>(u: &mut Mesh<T>, gamma: f64, rule: DiagonalRule) {
    let dims = u.dims();
    let (nx, ny, nz) = (dims.x, dims.y, dims.z);
    let planar = dims.is_planar();
    let g = T::from_f64(gamma);
    let two = T::from_f64(2.0);
    let src = u.data().to_vec();
    let mut d = vec![T::ZERO; src.len()];

    for b in 0..u.batch() {
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let interior = i > 0
                        && i + 1 < nx
                        && j > 0
                        && j + 1 < ny
                        && (planar || (k > 0 && k + 1 < nz));
                    if !interior {
                        continue;
                    }
                    let at = |i, j, k| src[idx(dims, b, i, j, k)];
                    let c = at(i, j, k);
                    let mut s = (at(i - 1, j, k) - two * c) + at(i + 1, j, k);
                    s += (at(i, j - 1, k) - two * c) + at(i, j + 1, k);
                    if !planar {
                        s += (at(i, j, k - 1) - two * c) + at(i, j, k + 1);
                    }
                    d[idx(dims, b, i, j, k)] = g * s;
                }
            }
        }
    }

    let off = T::from_f64(-0.5 * gamma);
    let diag = match rule {
        DiagonalRule::Standard => T::from_f64(1.0 + gamma),
        DiagonalRule::Literal => T::from_f64(gamma),
    };
    let coeffs = |n: usize| {
        let mut a = vec![off; n];
        let mut bb = vec![diag; n];
        let mut c = vec![off; n];
        for e in [0, n - 1] {
            a[e] = T::ZERO;
            bb[e] = T::ONE;
            c[e] = T::ZERO;
        }
        (a, bb, c)
    };

    let axes: &[usize] = if planar { &[0, 1] } else { &[0, 1, 2] };
    for &axis in axes {
        let n = [nx, ny, nz][axis];
        let (a, bb, c) = coeffs(n);
        let mut line = vec![T::ZERO; n];
        for b in 0..u.batch() {
            for k in 0..nz {
                for j in 0..ny {
                    for i in 0..nx {
                        // visit each line once, from its first point
                        let first = [i, j, k][axis] == 0;
                        if !first {
                            continue;
                        }
                        let point = |s: usize| match axis {
                            0 => idx(dims, b, s, j, k),
                            1 => idx(dims, b, i, s, k),
                            _ => idx(dims, b, i, j, s),
                        };
                        for (s, l) in line.iter_mut().enumerate() {
                            *l = d[point(s)];
                        }
                        thomas_line(&a, &bb, &c, &mut line);
                        for (s, l) in line.iter().enumerate() {
                            d[point(s)] = *l;
                        }
                    }
                }
            }
        }
    }

    for (ui, di) in u.data_mut().iter_mut().zip(&d) {
        *ui += *di;
    }
}

pub fn naive_adi_run<T: Real>(u: &mut Mesh<T>, gamma: f64, rule: DiagonalRule, iters: usize) {
    for _ in 0..iters {
        naive_adi_step(u, gamma, rule);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_fixed_point() {
        let mut u = Mesh::<f64>::zeros(Dims::new(5, 5, 5), 1).unwrap();
        naive_adi_step(&mut u, 0.5, DiagonalRule::Standard);
        assert!(u.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn thomas_line_solves() {
        let a = [0.0, -1.0, -1.0];
        let b = [2.0, 2.0, 2.0];
        let c = [-1.0, -1.0, 0.0];
        let mut d = [1.0, 0.0, 1.0];
        thomas_line(&a, &b, &c, &mut d);
        for v in d {
            assert!((v - 1.0f64).abs() < 1e-15);
        }
    }
}
