//! ADI steps against a straightforward loop implementation.

mod common;

use common::rng;
use rand::Rng;
use tridax_core::{adi_rhs, adi_step, AdiConfig, AdiError, AdiTraffic, Dims, Mesh};

fn interior(seed: u64, dims: Dims, batch: usize) -> Mesh<f64> {
    let mut r = rng(seed);
    let edge = |i: usize, n: usize| n > 1 && (i == 0 || i + 1 == n);
    Mesh::from_fn(dims, batch, |_, i, j, k| {
        let v = r.random_range(-1.0..1.0);
        if edge(i, dims.x) || edge(j, dims.y) || edge(k, dims.z) {
            0.0
        } else {
            v
        }
    })
    .unwrap()
}

/// Plain nested loops over a `[b][k][j][i]` array.
fn naive_step(u: &mut [f64], (x, y, z): (usize, usize, usize), batch: usize, gamma: f64) {
    let idx = |b: usize, i: usize, j: usize, k: usize| ((b * z + k) * y + j) * x + i;
    let planar = z == 1;
    let mut d = vec![0.0; u.len()];
    for b in 0..batch {
        for k in 0..z {
            for j in 0..y {
                for i in 0..x {
                    let boundary = i == 0 || i == x - 1 || j == 0 || j == y - 1 || (!planar && (k == 0 || k == z - 1));
                    if boundary {
                        continue;
                    }
                    let c = u[idx(b, i, j, k)];
                    let mut s = (u[idx(b, i - 1, j, k)] - 2.0 * c) + u[idx(b, i + 1, j, k)];
                    s += (u[idx(b, i, j - 1, k)] - 2.0 * c) + u[idx(b, i, j + 1, k)];
                    if !planar {
                        s += (u[idx(b, i, j, k - 1)] - 2.0 * c) + u[idx(b, i, j, k + 1)];
                    }
                    d[idx(b, i, j, k)] = gamma * s;
                }
            }
        }
    }
    let axes: &[usize] = if planar { &[0, 1] } else { &[0, 1, 2] };
    for &axis in axes {
        let n = [x, y, z][axis];
        let (e1, e2) = match axis {
            0 => (y, z),
            1 => (x, z),
            _ => (x, y),
        };
        for b in 0..batch {
            for p in 0..e1 {
                for q in 0..e2 {
                    let at = |r: usize| match axis {
                        0 => idx(b, r, p, q),
                        1 => idx(b, p, r, q),
                        _ => idx(b, p, q, r),
                    };
                    let mut line: Vec<f64> = (0..n).map(|r| d[at(r)]).collect();
                    thomas_textbook(&mut line, gamma);
                    for (r, v) in line.into_iter().enumerate() {
                        d[at(r)] = v;
                    }
                }
            }
        }
    }
    for (ui, di) in u.iter_mut().zip(&d) {
        *ui += di;
    }
}

fn thomas_textbook(d: &mut [f64], gamma: f64) {
    let n = d.len();
    let row = |i: usize| {
        if i == 0 || i == n - 1 {
            (0.0, 1.0, 0.0)
        } else {
            (-0.5 * gamma, 1.0 + gamma, -0.5 * gamma)
        }
    };
    let mut cp = vec![0.0; n];
    let (_, b0, c0) = row(0);
    cp[0] = c0 / b0;
    d[0] /= b0;
    for i in 1..n {
        let (a, b, c) = row(i);
        let m = b - a * cp[i - 1];
        cp[i] = c / m;
        d[i] = (d[i] - a * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
}

fn check_against_naive(dims: Dims, batch: usize, steps: usize, seed: u64) {
    let mut u = interior(seed, dims, batch);
    let mut reference = u.data().to_vec();
    let cfg = AdiConfig::new(0.5, 1);
    for _ in 0..steps {
        adi_step(&mut u, &cfg).unwrap();
        naive_step(&mut reference, (dims.x, dims.y, dims.z), batch, 0.5);
    }
    let scale = reference.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let diff = tridax_core::scalar::max_abs_diff(u.data(), &reference);
    assert!(diff <= 1e-12 * scale, "{dims:?}: {diff}");
}

#[test]
fn rhs_matches_loops() {
    let dims = Dims::new(8, 8, 8);
    let u = interior(1, dims, 2);
    let (_, d) = adi_rhs(&u, &AdiConfig::new(0.3, 1)).unwrap();
    for b in 0..2 {
        for k in 1..7 {
            for j in 1..7 {
                for i in 1..7 {
                    let c = u.get(b, i, j, k);
                    let s = ((u.get(b, i - 1, j, k) - 2.0 * c) + u.get(b, i + 1, j, k))
                        + ((u.get(b, i, j - 1, k) - 2.0 * c) + u.get(b, i, j + 1, k))
                        + ((u.get(b, i, j, k - 1) - 2.0 * c) + u.get(b, i, j, k + 1));
                    assert_eq!(d.get(b, i, j, k), 0.3 * s);
                }
            }
        }
    }
    assert_eq!(d.get(0, 0, 3, 3), 0.0);
}

#[test]
fn constant_field_has_zero_increment() {
    let u = Mesh::filled(Dims::new(6, 6, 6), 1, 2.5).unwrap();
    let (_, d) = adi_rhs(&u, &AdiConfig::new(0.5, 1)).unwrap();
    assert!(d.data().iter().all(|&v| v == 0.0));
}

#[test]
fn zero_is_fixed_point() {
    let mut u = Mesh::<f64>::zeros(Dims::new(8, 8, 8), 2).unwrap();
    let delta = adi_step(&mut u, &AdiConfig::new(0.7, 1)).unwrap();
    assert_eq!(delta, 0.0);
    assert!(u.data().iter().all(|&v| v == 0.0));
}

#[test]
fn step_12_cubed_matches_naive() {
    check_against_naive(Dims::new(12, 12, 12), 1, 1, 12);
}

#[test]
fn ten_steps_3d_match_naive() {
    check_against_naive(Dims::new(16, 16, 16), 2, 10, 16);
}

#[test]
fn ten_steps_2d_match_naive() {
    check_against_naive(Dims::planar(64, 64), 2, 10, 64);
}

#[test]
fn max_norm_does_not_grow() {
    let mut r = rng(99);
    for trial in 0..100 {
        let dims = if trial % 2 == 0 {
            Dims::new(r.random_range(4..10), r.random_range(4..10), r.random_range(4..10))
        } else {
            Dims::planar(r.random_range(4..24), r.random_range(4..24))
        };
        let gamma = r.random_range(0.01..=1.0);
        let mut u = interior(1000 + trial, dims, 1);
        let before = u.max_abs();
        adi_step(&mut u, &AdiConfig::new(gamma, 1)).unwrap();
        assert!(u.max_abs() <= before, "trial {trial}: {dims:?} γ={gamma}");
    }
}

#[test]
fn fp32_tracks_fp64() {
    let dims = Dims::new(10, 10, 10);
    let u64 = interior(7, dims, 1);
    let mut a = u64.clone();
    let mut b: Mesh<f32> = u64.cast();
    let cfg = AdiConfig::new(0.5, 1);
    for _ in 0..5 {
        adi_step(&mut a, &cfg).unwrap();
        adi_step(&mut b, &cfg).unwrap();
    }
    assert!(tridax_core::scalar::max_abs_diff(b.data(), a.data()) < 1e-4);
}

#[test]
fn invalid_configurations() {
    let mut u = Mesh::<f64>::zeros(Dims::new(8, 8, 8), 1).unwrap();
    assert!(matches!(adi_step(&mut u, &AdiConfig::new(0.0, 1)), Err(AdiError::InvalidConfig(_))));
    assert!(matches!(adi_step(&mut u, &AdiConfig::new(f64::NAN, 1)), Err(AdiError::InvalidConfig(_))));
    let mut small = Mesh::<f64>::zeros(Dims::new(8, 3, 8), 1).unwrap();
    assert!(matches!(adi_step(&mut small, &AdiConfig::new(0.5, 1)), Err(AdiError::MeshTooSmall { .. })));
    let mut bad = Mesh::<f64>::zeros(Dims::new(8, 8, 8), 1).unwrap();
    bad.set(0, 3, 3, 3, f64::INFINITY);
    assert!(matches!(adi_step(&mut bad, &AdiConfig::new(0.5, 1)), Err(AdiError::NonFinite)));
}

#[test]
fn traffic_passes() {
    let t2 = AdiTraffic::new(Dims::planar(10, 10), 3, 8, false);
    assert_eq!(t2.per_iteration(), 9 * 100 * 3 * 8);
    let t3 = AdiTraffic::new(Dims::new(10, 10, 10), 1, 4, false);
    assert_eq!(t3.per_iteration(), 11 * 1000 * 4);
    let stored = AdiTraffic::new(Dims::new(10, 10, 10), 1, 4, true);
    assert_eq!(stored.per_iteration(), 20 * 1000 * 4);
}
