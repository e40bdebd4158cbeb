//! Seeded problem generators. The same seed gives the same bits on every
//! platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tridax_core::{Dims, Layout, Mesh, MeshError, Real, SolveError, TridiagonalBatch, TridiagonalSystem};

/// Parameters of a random diagonally dominant batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    pub seed: u64,
    pub batch: usize,
    pub n: usize,
    /// `b_i = |a_i| + |c_i| + margin`.
    pub margin: f64,
}

impl SystemSpec {
    pub fn new(seed: u64, batch: usize, n: usize) -> Self {
        Self {
            seed,
            batch,
            n,
            margin: 1.0,
        }
    }
}

/// One system; coefficients are drawn in FP64 and rounded to `T`.
pub fn random_system<T: Real, R: Rng>(rng: &mut R, n: usize, margin: f64) -> TridiagonalSystem<T> {
    let mut a = vec![T::ZERO; n];
    let mut b = vec![T::ZERO; n];
    let mut c = vec![T::ZERO; n];
    let mut d = vec![T::ZERO; n];
    for i in 0..n {
        let ai = if i == 0 { 0.0 } else { rng.random_range(-1.0..1.0) };
        let ci = if i + 1 == n { 0.0 } else { rng.random_range(-1.0..1.0) };
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        a[i] = T::from_f64(ai);
        c[i] = T::from_f64(ci);
        // dominance is checked after rounding, so build it from the rounded values
        b[i] = T::from_f64(sign * (a[i].abs().to_f64() + c[i].abs().to_f64() + margin));
        d[i] = T::from_f64(rng.random_range(-1.0..1.0));
    }
    TridiagonalSystem::new(a, b, c, d).expect("generated system is well formed")
}

pub fn random_systems<T: Real>(spec: &SystemSpec) -> Vec<TridiagonalSystem<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.batch)
        .map(|_| random_system(&mut rng, spec.n, spec.margin))
        .collect()
}

pub fn random_batch<T: Real>(spec: &SystemSpec) -> Result<TridiagonalBatch<T>, SolveError> {
    TridiagonalBatch::from_systems(&random_systems(spec), Layout::SystemMajor)
}

/// Uniform `[-1, 1)` interior with a zero boundary.
pub fn random_mesh<T: Real>(seed: u64, dims: Dims, batch: usize) -> Result<Mesh<T>, MeshError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edge = |i: usize, n: usize| n > 1 && (i == 0 || i + 1 == n);
    Mesh::from_fn(dims, batch, |_, i, j, k| {
        let v: f64 = rng.random_range(-1.0..1.0);
        if edge(i, dims.x) || edge(j, dims.y) || edge(k, dims.z) {
            T::ZERO
        } else {
            T::from_f64(v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_dominant() {
        let spec = SystemSpec::new(7, 5, 33);
        let a = random_systems::<f64>(&spec);
        let b = random_systems::<f64>(&spec);
        assert_eq!(a, b);
        for s in &a {
            s.check_diagonal_dominance().unwrap();
        }
        let c = random_systems::<f32>(&spec);
        for s in &c {
            s.check_diagonal_dominance().unwrap();
        }
    }

    #[test]
    fn mesh_boundary_is_zero() {
        let m = random_mesh::<f64>(1, Dims::new(5, 4, 3), 2).unwrap();
        assert_eq!(m.get(1, 0, 2, 1), 0.0);
        assert_eq!(m.get(0, 2, 3, 1), 0.0);
        assert_eq!(m.get(0, 2, 2, 0), 0.0);
        assert_ne!(m.get(0, 2, 2, 1), 0.0);
        let p = random_mesh::<f64>(1, Dims::planar(5, 4), 1).unwrap();
        assert_ne!(p.get(0, 2, 2, 0), 0.0);
    }
}
