//! Lookup of published measurements matching a model query.
//!
//! Only the batched Thomas runtime was published as a time. ADI runtimes are
//! recovered from the published bandwidth and the byte count of
//! [`AdiTraffic`], so they are reconstructions.

use tridax_core::perfmodel::reference::{self as table, Comparison};
use tridax_core::perfmodel::{DesignKind, DesignPoint, LatencyEstimate, Workload};
use tridax_core::{AdiTraffic, Dims, Precision, ReducedSolver};

use crate::report::MeasuredComparison;

pub const MEASURED: &str = "measured runtime";
pub const RECONSTRUCTED: &str = "runtime reconstructed from measured bandwidth";

/// Bytes one ADI run moves under the generated-coefficient accounting.
pub fn adi_bytes(dims: Dims, batch: u64, iterations: u64, precision: Precision) -> u64 {
    AdiTraffic::new(dims, batch as usize, precision.word_bytes(), false).per_iteration() * iterations
}

fn pick(batch: u64, small: u64, large: u64, bw: (f64, f64)) -> Option<f64> {
    match batch {
        b if b == small => Some(bw.0),
        b if b == large => Some(bw.1),
        _ => None,
    }
}

/// Measured or reconstructed seconds for this configuration.
pub fn measured_seconds(w: &Workload, d: &DesignPoint) -> Option<(&'static str, f64)> {
    let p = d.precision;
    match (*w, d.kind) {
        (Workload::Batched { n: 128, batch: 8000 }, DesignKind::BatchedThomas) if p == Precision::Fp32 => {
            Some((MEASURED, table::THOMAS_8000X128_SECONDS))
        }
        (Workload::Adi2d { x, y, batch, iterations: 120 }, DesignKind::Adi2d) if x == y => {
            let rows = match p {
                Precision::Fp32 => &table::ADI2D_FP32,
                Precision::Fp64 => &table::ADI2D_FP64,
            };
            let &(_, s, l) = rows.iter().find(|r| r.0 as u64 == x)?;
            let bw = pick(batch, 1500, 3000, (s, l))?;
            reconstruct(Dims::planar(x as usize, y as usize), batch, 120, p, bw)
        }
        (Workload::Adi3d { x, y, z, batch, iterations: 100 }, DesignKind::Adi3d) => {
            let rows = match p {
                Precision::Fp32 => &table::ADI3D_FP32,
                Precision::Fp64 => &table::ADI3D_FP64,
            };
            let &(_, s, l) = rows.iter().find(|r| r.0.map(u64::from) == [x, y, z])?;
            let bw = pick(batch, 24, 72, (s, l))?;
            reconstruct(Dims::new(x as usize, y as usize, z as usize), batch, 100, p, bw)
        }
        (Workload::Adi2d { x, y, batch, iterations: 100 }, DesignKind::Adi2dTiled)
            if x == y && p == Precision::Fp64 =>
        {
            let &(_, s, l) = table::ADI2D_TILED_FP64.iter().find(|r| r.0 as u64 == x)?;
            let col = match d.reduced_solver {
                ReducedSolver::Pcr => 0,
                ReducedSolver::Thomas => 1,
            };
            let bw = pick(batch, 60, 180, (s[col], l[col]))?;
            reconstruct(Dims::planar(x as usize, y as usize), batch, 100, p, bw)
        }
        _ => None,
    }
}

fn reconstruct(dims: Dims, batch: u64, iters: u64, p: Precision, gbs: f64) -> Option<(&'static str, f64)> {
    let bytes = adi_bytes(dims, batch, iters, p) as f64;
    table::runtime_from_bandwidth(bytes, gbs).ok().map(|s| (RECONSTRUCTED, s))
}

pub fn compare(w: &Workload, d: &DesignPoint, l: &LatencyEstimate) -> Option<MeasuredComparison> {
    let (source, seconds) = measured_seconds(w, d)?;
    Some(MeasuredComparison {
        source,
        comparison: Comparison::new(l.seconds, seconds),
    })
}
