#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tridax_core::{Real, TridiagonalSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly dominant system with a random sign on each diagonal entry.
pub fn dominant<T: Real>(rng: &mut impl Rng, n: usize) -> TridiagonalSystem<T> {
    let mut a = vec![T::ZERO; n];
    let mut b = vec![T::ZERO; n];
    let mut c = vec![T::ZERO; n];
    let mut d = vec![T::ZERO; n];
    for i in 0..n {
        if i > 0 {
            a[i] = T::from_f64(rng.random_range(-1.0..1.0));
        }
        if i + 1 < n {
            c[i] = T::from_f64(rng.random_range(-1.0..1.0));
        }
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let margin: f64 = rng.random_range(0.5..2.0);
        b[i] = T::from_f64(sign * (a[i].abs().to_f64() + c[i].abs().to_f64() + margin));
        d[i] = T::from_f64(rng.random_range(-1.0..1.0));
    }
    TridiagonalSystem::new(a, b, c, d).unwrap()
}

pub fn seeded<T: Real>(seed: u64, n: usize) -> TridiagonalSystem<T> {
    dominant(&mut rng(seed), n)
}

/// `‖u − v‖∞ / max(1, ‖v‖∞)` in FP64.
pub fn rel_diff<T: Real>(u: &[T], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len());
    let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let diff = u
        .iter()
        .zip(v)
        .fold(0.0f64, |m, (a, b)| m.max((a.to_f64() - b).abs()));
    diff / scale
}
