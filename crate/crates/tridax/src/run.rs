//! Timed drivers: batched solves and ADI runs, split across threads by batch.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use tridax_core::adi::{adi_rhs, adi_sweep, adi_update, check_mesh, AdiTraffic};
use tridax_core::{
    effective_bandwidth, AdiConfig, AdiError, Algorithm, BatchError, DiagonalRule, Dims, Mesh, Precision,
    Real, TridiagonalBatch,
};

/// Report layout version; bumped when a field or CSV column changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Runs `f` on a pool of `threads` workers (0 picks one per core).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseStats {
    pub name: String,
    pub seconds: f64,
    pub bytes: u64,
    /// `bytes / seconds` in GB/s; absent when the phase was too fast to time.
    pub bandwidth_gbs: Option<f64>,
}

impl PhaseStats {
    fn new(name: impl Into<String>, seconds: f64, bytes: u64) -> Self {
        Self {
            name: name.into(),
            seconds,
            bytes,
            bandwidth_gbs: effective_bandwidth(bytes, seconds).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRow {
    pub iteration: usize,
    /// Unrolled block the iteration belongs to.
    pub block: usize,
    pub delta_max: f64,
    pub u_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub precision: Precision,
    pub dims: Dims,
    pub batch: usize,
    pub gamma: f64,
    pub iterations: usize,
    pub unroll: usize,
    pub rule: DiagonalRule,
    pub algorithm: &'static str,
    pub phases: Vec<PhaseStats>,
    pub total: PhaseStats,
    pub rows: Vec<IterationRow>,
    /// Max deviation from the naive reference, when checked.
    pub verify_max_deviation: Option<f64>,
}

/// Runs `cfg.n_iter` ADI steps, splitting the batch across the current
/// rayon pool. Results do not depend on the split.
pub fn adi_run<T: Real>(u0: Mesh<T>, cfg: &AdiConfig) -> Result<(Mesh<T>, RunReport), AdiError> {
    cfg.validate()?;
    let dims = u0.dims();
    check_mesh(dims)?;
    let batch = u0.batch();
    let word = T::PRECISION.word_bytes();
    let traffic = AdiTraffic::new(dims, batch, word, false);
    let axes = dims.solved_axes();

    let parts = rayon::current_num_threads().clamp(1, batch);
    let mut chunks = split(u0, parts);
    let mut times = vec![0.0f64; 2 + axes.len()];
    let mut rows = Vec::with_capacity(cfg.n_iter);
    let start = Instant::now();

    for it in 0..cfg.n_iter {
        let t = Instant::now();
        let mut work = chunks
            .par_iter()
            .map(|u| adi_rhs(u, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        times[0] += t.elapsed().as_secs_f64();

        for (a, &axis) in axes.iter().enumerate() {
            let t = Instant::now();
            work.par_iter_mut()
                .try_for_each(|(coeffs, d)| adi_sweep(d, coeffs, axis, cfg))?;
            times[1 + a] += t.elapsed().as_secs_f64();
        }

        let t = Instant::now();
        let deltas: Vec<f64> = chunks
            .par_iter_mut()
            .zip(work.par_iter())
            .map(|(u, (_, d))| adi_update(u, d))
            .collect();
        times[1 + axes.len()] += t.elapsed().as_secs_f64();

        rows.push(IterationRow {
            iteration: it,
            block: it / cfg.unroll,
            delta_max: deltas.iter().copied().fold(0.0, f64::max),
            u_max: chunks.iter().map(Mesh::max_abs).fold(0.0, f64::max),
        });
    }
    let elapsed = start.elapsed().as_secs_f64();

    let n = cfg.n_iter as u64;
    let mut phases = vec![PhaseStats::new("rhs", times[0], n * traffic.rhs)];
    for (a, axis) in axes.iter().enumerate() {
        phases.push(PhaseStats::new(format!("sweep-{axis}"), times[1 + a], n * traffic.sweep));
    }
    phases.push(PhaseStats::new("update", times[1 + axes.len()], n * traffic.update));

    let u = if chunks.len() == 1 {
        chunks.pop().unwrap()
    } else {
        Mesh::stack(&chunks).expect("chunks share a shape")
    };
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        precision: T::PRECISION,
        dims,
        batch,
        gamma: cfg.gamma,
        iterations: cfg.n_iter,
        unroll: cfg.unroll,
        rule: cfg.rule,
        algorithm: cfg.algo.name(),
        phases,
        total: PhaseStats::new("total", elapsed, n * traffic.per_iteration()),
        rows,
        verify_max_deviation: None,
    };
    Ok((u, report))
}

/// Splits the batch into at most `parts` contiguous meshes.
fn split<T: Real>(u: Mesh<T>, parts: usize) -> Vec<Mesh<T>> {
    if parts <= 1 {
        return vec![u];
    }
    let batch = u.batch();
    let per = batch.div_ceil(parts);
    let singles = u.split_batch();
    singles
        .chunks(per)
        .map(|c| Mesh::stack(c).expect("same shape"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema_version: u32,
    pub algorithm: &'static str,
    pub precision: Precision,
    pub batch: usize,
    pub n: usize,
    pub seconds: f64,
    /// a, b, c, d read and u written.
    pub bytes: u64,
    pub bandwidth_gbs: Option<f64>,
    /// Largest `‖Au − d‖∞` over the batch.
    pub max_residual: f64,
}

/// Solves every system on the current rayon pool. Fails on the first system
/// (in batch order) that cannot be solved.
pub fn solve_batch<T: Real>(
    batch: &TridiagonalBatch<T>,
    algo: Algorithm,
) -> Result<(Vec<Vec<T>>, SolveReport), BatchError> {
    let systems: Vec<_> = (0..batch.count()).map(|s| batch.system(s)).collect();
    let start = Instant::now();
    let results: Vec<_> = systems.par_iter().map(|s| algo.solve(s)).collect();
    let seconds = start.elapsed().as_secs_f64();
    let solutions = results
        .into_iter()
        .enumerate()
        .map(|(system, r)| r.map_err(|source| BatchError { system, source }))
        .collect::<Result<Vec<_>, _>>()?;
    let max_residual = systems
        .par_iter()
        .zip(&solutions)
        .map(|(s, u)| s.residual_max_norm(u))
        .reduce(|| 0.0, f64::max);
    let (count, n) = (batch.count(), batch.system_len());
    let bytes = (5 * count * n * T::PRECISION.word_bytes()) as u64;
    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        algorithm: algo.name(),
        precision: T::PRECISION,
        batch: count,
        n,
        seconds,
        bytes,
        bandwidth_gbs: effective_bandwidth(bytes, seconds).ok(),
        max_residual,
    };
    Ok((solutions, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_mesh;

    #[test]
    fn split_does_not_change_result() {
        let u0 = random_mesh::<f64>(3, Dims::new(6, 5, 4), 5).unwrap();
        let cfg = AdiConfig::new(0.5, 3);
        let (one, _) = with_threads(1, || adi_run(u0.clone(), &cfg)).unwrap();
        let (many, report) = with_threads(4, || adi_run(u0, &cfg)).unwrap();
        assert_eq!(one, many);
        assert_eq!(report.rows.len(), 3);
        assert_eq!(report.phases.len(), 5);
        let per_iter = AdiTraffic::new(Dims::new(6, 5, 4), 5, 8, false).per_iteration();
        assert_eq!(report.total.bytes, 3 * per_iter);
    }

    #[test]
    fn rejects_zero_iterations() {
        let u0 = random_mesh::<f64>(3, Dims::planar(6, 6), 1).unwrap();
        assert!(adi_run(u0, &AdiConfig::new(0.5, 0)).is_err());
    }
}
