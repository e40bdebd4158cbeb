use alloc::vec;
use alloc::vec::Vec;

use super::design::{ceil_div, log2_ceil, DesignKind, DesignPoint, ModelError, SpikeCeiling, Workload};
use crate::tiled::ReducedSolver;

/// One additive component of a latency estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LatencyTerm {
    pub name: &'static str,
    pub cycles: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LatencyEstimate {
    pub cycles: u64,
    pub frequency_hz: f64,
    pub seconds: f64,
    /// Breakdown; for looped designs this is one loop body.
    pub terms: Vec<LatencyTerm>,
    /// Spike only: block cost is large enough to stall the pipeline.
    pub stall: bool,
}

impl LatencyEstimate {
    fn new(cycles: u64, design: &DesignPoint, terms: Vec<LatencyTerm>) -> Self {
        Self {
            cycles,
            frequency_hz: design.frequency_hz,
            seconds: cycles_to_seconds(cycles, design.frequency_hz),
            terms,
            stall: false,
        }
    }
}

pub fn cycles_to_seconds(cycles: u64, hz: f64) -> f64 {
    cycles as f64 / hz
}

/// Nearest whole cycle count; negative input saturates to zero.
pub fn seconds_to_cycles(seconds: f64, hz: f64) -> u64 {
    (seconds * hz + 0.5) as u64
}

fn term(name: &'static str, cycles: u64) -> LatencyTerm {
    LatencyTerm { name, cycles }
}

fn prepare(design: &DesignPoint, kind: DesignKind) -> Result<(), ModelError> {
    debug_assert_eq!(design.kind, kind);
    design.validate()
}

fn positive(values: &[u64]) -> Result<(), ModelError> {
    if values.contains(&0) {
        Err(ModelError::InvalidParameter("sizes must be positive"))
    } else {
        Ok(())
    }
}

/// Batched Thomas across `v * N_CU` lanes of `g` interleaved systems.
pub fn batched_thomas(batch: u64, n: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::BatchedThomas)?;
    positive(&[batch, n])?;
    let g = d.group as u64;
    let lanes = d.vector as u64 * d.compute_units as u64;
    let groups = ceil_div(batch, g * lanes);
    let fill = d.thomas_form.prologue() * g * n;
    let stream = groups * g * n;
    Ok(LatencyEstimate::new(
        fill + stream,
        d,
        vec![term("fill", fill), term("stream", stream)],
    ))
}

/// Batched PCR over the whole batch, `f_U` rows per cycle.
pub fn batched_pcr(batch: u64, n: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::BatchedPcr)?;
    positive(&[batch, n])?;
    let steps = log2_ceil(n);
    let per_step = ceil_div(batch * n, d.unroll as u64) + d.pipeline_latency as u64;
    Ok(LatencyEstimate::new(
        per_step * steps,
        d,
        vec![term("step", per_step)],
    ))
}

/// Batched Spike with `m` partitions per system.
pub fn batched_spike(batch: u64, n: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::BatchedSpike)?;
    positive(&[batch, n])?;
    let g = d.group as u64;
    let m = d.partitions as u64;
    let groups = match d.spike_ceiling {
        SpikeCeiling::PlusOne => ceil_div(batch * m, g) + 1,
        SpikeCeiling::DivisorPlusOne => ceil_div(batch * m, g + 1),
    };
    let block = ceil_div(g * n, m);
    let reduced = m * d.block_cost();
    let stream = (1 + groups) * block;
    let mut est = LatencyEstimate::new(
        stream + reduced,
        d,
        vec![term("stream", stream), term("reduced", reduced)],
    );
    est.stall = reduced >= n;
    Ok(est)
}

fn tile_rows(n: u64, t: u64) -> Result<u64, ModelError> {
    let m = ceil_div(n, t);
    if t < 2 || m < 3 {
        return Err(ModelError::InvalidParameter(
            "tiles need at least two tiles of three rows",
        ));
    }
    Ok(m)
}

fn tile_phase(batch: u64, n: u64, d: &DesignPoint) -> Result<u64, ModelError> {
    let g = d.group as u64;
    let t = d.tiles as u64;
    let m = tile_rows(n, t)?;
    Ok((2 + ceil_div(batch * t, g)) * m * g)
}

/// Tiled solve with a Thomas reduced solver.
pub fn thomas_thomas(batch: u64, n: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::ThomasThomas)?;
    positive(&[batch, n])?;
    let tiles = tile_phase(batch, n, d)?;
    let t = d.tiles as u64;
    let reduced = d.reduced_group as u64 * 2 * t * 2;
    Ok(LatencyEstimate::new(
        tiles + reduced,
        d,
        vec![term("tiles", tiles), term("reduced", reduced)],
    ))
}

/// Tiled solve with a PCR reduced solver.
pub fn thomas_pcr(batch: u64, n: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::ThomasPcr)?;
    positive(&[batch, n])?;
    let tiles = tile_phase(batch, n, d)?;
    let t = d.tiles as u64;
    let reduced = pcr_reduced(t, d);
    Ok(LatencyEstimate::new(
        tiles + reduced,
        d,
        vec![term("tiles", tiles), term("reduced", reduced)],
    ))
}

fn pcr_reduced(t: u64, d: &DesignPoint) -> u64 {
    (2 * t + d.pipeline_latency as u64) * log2_ceil(2 * t)
}

/// 3D ADI, x and y sweeps fused with the RHS and overlapped with z.
pub fn adi3d(x: u64, y: u64, z: u64, batch: u64, iters: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::Adi3d)?;
    positive(&[x, y, z, batch, iters])?;
    let p = d.points_per_cycle();
    let g = d.group as u64;
    let rhs = ceil_div(2 * x * y, p);
    let xs = 2 * p * ceil_div(x, p) + 3 * g * x;
    let ys = ceil_div(2 * x * y, p) + 3 * g * y;
    let batch_term = ceil_div(batch, 2 * d.compute_units as u64) * ceil_div(x * y * z, p);
    let rhs_xy = rhs + xs + ys + batch_term;
    let zs = ceil_div(2 * x * z, p) + 3 * g * z + batch_term;
    Ok(LatencyEstimate::new(
        iters * rhs_xy.max(zs),
        d,
        vec![
            term("rhs", rhs),
            term("x", xs),
            term("y", ys),
            term("z", ceil_div(2 * x * z, p) + 3 * g * z),
            term("batch", batch_term),
        ],
    ))
}

/// 2D ADI with `f_U` iterations unrolled per pass over the batch.
pub fn adi2d(x: u64, y: u64, batch: u64, iters: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::Adi2d)?;
    positive(&[x, y, batch, iters])?;
    let p = d.points_per_cycle();
    let g = d.group as u64;
    let f = d.unroll as u64;
    let rhs = ceil_div(2 * x, p);
    let xs = 2 * p * ceil_div(x, p) + 3 * g * x;
    let ys = ceil_div(2 * x * y, p) + 3 * g * y;
    let batch_term = ceil_div(batch, d.compute_units as u64) * ceil_div(x * y, p);
    let pass = f * (rhs + xs + ys) + batch_term;
    Ok(LatencyEstimate::new(
        ceil_div(iters, f) * pass,
        d,
        vec![
            term("rhs", rhs),
            term("x", xs),
            term("y", ys),
            term("batch", batch_term),
        ],
    ))
}

/// Delay FIFO depth between unrolled 2D ADI iterations.
pub fn adi2d_fifo_words(x: u64, y: u64, d: &DesignPoint) -> u64 {
    let v = d.vector as u64;
    let g = d.group as u64;
    ceil_div(2 * x, v) + 2 * v * ceil_div(x, v) + 3 * g * x + 3 * g * y + ceil_div(2 * x * y, v)
}

/// 2D ADI whose x and y sweeps run tiled solvers.
pub fn adi2d_tiled(x: u64, y: u64, batch: u64, iters: u64, d: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    prepare(d, DesignKind::Adi2dTiled)?;
    positive(&[x, y, batch, iters])?;
    let p = d.points_per_cycle();
    let g = d.group as u64;
    let (t1, t2) = (d.tiles_x as u64, d.tiles_y as u64);
    tile_rows(x, t1)?;
    tile_rows(y, t2)?;
    let reduced = |t: u64| match d.reduced_solver {
        ReducedSolver::Thomas => 4 * g * t,
        ReducedSolver::Pcr => pcr_reduced(t, d),
    };
    let stream = ceil_div(batch * x * y, p);
    let rhs_x = ceil_div(2 * x, p) + 2 * p * ceil_div(x, p) + ceil_div(3 * g * x, t1) + reduced(t1) + stream;
    let ys = ceil_div(2 * y * d.tile_extent_x as u64, p) + ceil_div(3 * g * y, t2) + reduced(t2) + stream;
    Ok(LatencyEstimate::new(
        iters * (rhs_x + ys),
        d,
        vec![term("rhs-x", rhs_x), term("y", ys)],
    ))
}

/// Latency of `design` on `workload`.
pub fn estimate_latency(workload: &Workload, design: &DesignPoint) -> Result<LatencyEstimate, ModelError> {
    workload.validate()?;
    use DesignKind as K;
    match (*workload, design.kind) {
        (Workload::Batched { n, batch }, kind) if kind.is_batched() => match kind {
            K::BatchedThomas => batched_thomas(batch, n, design),
            K::BatchedPcr => batched_pcr(batch, n, design),
            K::BatchedSpike => batched_spike(batch, n, design),
            K::ThomasThomas => thomas_thomas(batch, n, design),
            _ => thomas_pcr(batch, n, design),
        },
        (Workload::Adi2d { x, y, batch, iterations }, K::Adi2d) => adi2d(x, y, batch, iterations, design),
        (Workload::Adi2d { x, y, batch, iterations }, K::Adi2dTiled) => {
            adi2d_tiled(x, y, batch, iterations, design)
        }
        (Workload::Adi3d { x, y, z, batch, iterations }, K::Adi3d) => {
            adi3d(x, y, z, batch, iterations, design)
        }
        (w, kind) => Err(ModelError::WorkloadMismatch {
            kind,
            workload: match w {
                Workload::Batched { .. } => "batched",
                Workload::Adi2d { .. } => "adi2d",
                Workload::Adi3d { .. } => "adi3d",
            },
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Precision;

    fn dp(kind: DesignKind) -> DesignPoint {
        DesignPoint::new(kind, Precision::Fp32)
    }

    #[test]
    fn thomas_calibration() {
        let e = batched_thomas(8000, 128, &dp(DesignKind::BatchedThomas)).unwrap();
        assert_eq!(e.cycles, 143_360);
        assert!((e.seconds - 4.7787e-4).abs() < 1e-8);
    }

    #[test]
    fn thomas_base_form() {
        let mut d = dp(DesignKind::BatchedThomas);
        d.thomas_form = super::super::ThomasForm::Base;
        let e = batched_thomas(8000, 128, &d).unwrap();
        assert_eq!(e.cycles, (1 + 32) * 32 * 128);
    }

    #[test]
    fn pcr_examples() {
        let d = dp(DesignKind::BatchedPcr);
        assert_eq!(batched_pcr(1, 2, &d).unwrap().cycles, 32);
        assert_eq!(batched_pcr(8000, 128, &d).unwrap().cycles, 7_168_210);
    }

    #[test]
    fn spike_example() {
        let mut d = dp(DesignKind::BatchedSpike).with_partitions(4);
        d.block_cost = Some(10);
        let e = batched_spike(1000, 256, &d).unwrap();
        assert_eq!(e.cycles, (1 + 126) * 2048 + 40);
        assert!(!e.stall);
        d.block_cost = Some(64);
        assert!(batched_spike(1000, 256, &d).unwrap().stall);
    }

    #[test]
    fn thomas_thomas_example() {
        let d = dp(DesignKind::ThomasThomas).with_tiles(4);
        assert_eq!(thomas_thomas(1, 512, &d).unwrap().cycles, 12_800);
        assert!(thomas_thomas(1, 8, &d).is_err());
    }

    #[test]
    fn seconds_round_trip() {
        for c in [0u64, 1, 143_360, 85_395_200, 1 << 40] {
            assert_eq!(seconds_to_cycles(cycles_to_seconds(c, 292e6), 292e6), c);
        }
    }

    #[test]
    fn mismatch() {
        let w = Workload::Batched { n: 8, batch: 1 };
        assert!(matches!(
            estimate_latency(&w, &dp(DesignKind::Adi3d)),
            Err(ModelError::WorkloadMismatch { .. })
        ));
    }
}
