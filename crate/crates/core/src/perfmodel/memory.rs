use alloc::vec::Vec;

use super::design::{ceil_div, log2_ceil, Budget, DesignKind, DesignPoint, ModelError, Workload};
use super::device::DeviceProfile;
use super::latency::adi2d_fifo_words;
use crate::scalar::Precision;
use crate::tiled::ReducedSolver;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ResourceEstimate {
    /// Words held by one solver instance.
    pub words: u64,
    /// Solver instances on the device (lanes times compute units).
    pub replicas: u64,
    pub total_words: u64,
    pub bytes: u64,
    /// URAM-sized blocks needed to hold `bytes`.
    pub ram_blocks: u64,
    pub hbm_ports: u32,
    pub feasible: bool,
    pub violations: Vec<Budget>,
}

impl ResourceEstimate {
    pub fn require_feasible(self) -> Result<Self, ModelError> {
        if self.feasible {
            Ok(self)
        } else {
            Err(ModelError::InfeasibleDesign {
                violations: self.violations,
            })
        }
    }
}

/// Single Thomas solver: a, b, c, d ping-pong plus c*, d* and the u buffer.
pub fn thomas_words(g: u64, n: u64) -> u64 {
    12 * g * n + 4 * g
}

fn tile_group(d: &DesignPoint, t: u64) -> u64 {
    ceil_div(d.group as u64, t)
}

fn check_tiles(n: u64, t: u64) -> Result<(), ModelError> {
    if t < 2 || ceil_div(n, t) < 3 {
        return Err(ModelError::InvalidParameter(
            "tiles need at least two tiles of three rows",
        ));
    }
    Ok(())
}

/// Default reduced system FIFO of the Thomas-Thomas design.
pub fn thomas_thomas_fifo_words(d: &DesignPoint, t: u64) -> u64 {
    3 * 4 * d.reduced_group as u64 * t
}

fn thomas_thomas_words(d: &DesignPoint, n: u64, t: u64) -> Result<u64, ModelError> {
    check_tiles(n, t)?;
    let gt = tile_group(d, t);
    let fifo = d.fifo_words.unwrap_or_else(|| thomas_thomas_fifo_words(d, t));
    Ok(18 * gt * n + 28 * t * gt + fifo)
}

fn thomas_pcr_words(d: &DesignPoint, n: u64, t: u64) -> Result<u64, ModelError> {
    check_tiles(n, t)?;
    let gt = tile_group(d, t);
    Ok(18 * gt * n + 3 * (2 * t + d.pipeline_latency as u64) * log2_ceil(2 * t))
}

/// Words of one solver instance for systems of length `n`.
///
/// For the batched designs `n` is the system length. ADI designs take their
/// mesh from [`estimate_resources`] instead.
pub fn memory_words(d: &DesignPoint, n: u64) -> Result<u64, ModelError> {
    d.validate()?;
    if n == 0 {
        return Err(ModelError::InvalidParameter("sizes must be positive"));
    }
    let g = d.group as u64;
    match d.kind {
        DesignKind::BatchedThomas => Ok(thomas_words(g, n)),
        DesignKind::BatchedSpike => Ok(3 * thomas_words(g, n)),
        DesignKind::ThomasThomas => thomas_thomas_words(d, n, d.tiles as u64),
        DesignKind::ThomasPcr => thomas_pcr_words(d, n, d.tiles as u64),
        // a, c, d ping-pong for one system; scaled by the batch elsewhere
        DesignKind::BatchedPcr => Ok(6 * n),
        _ => Err(ModelError::InvalidParameter("mesh designs need a workload")),
    }
}

fn tiled_solver_words(d: &DesignPoint, n: u64, t: u64) -> Result<u64, ModelError> {
    match d.reduced_solver {
        ReducedSolver::Thomas => thomas_thomas_words(d, n, t),
        ReducedSolver::Pcr => thomas_pcr_words(d, n, t),
    }
}

/// Words per compute unit of an ADI design.
fn adi_words(d: &DesignPoint, w: &Workload) -> Result<u64, ModelError> {
    let g = d.group as u64;
    let v = d.vector as u64;
    match (*w, d.kind) {
        (Workload::Adi2d { x, y, .. }, DesignKind::Adi2d) => {
            let solvers = v * (thomas_words(g, x) + thomas_words(g, y));
            Ok(d.unroll as u64 * (solvers + 2 * x * y) + adi2d_fifo_words(x, y, d))
        }
        (Workload::Adi2d { x, y, .. }, DesignKind::Adi2dTiled) => {
            let sx = tiled_solver_words(d, x, d.tiles_x as u64)?;
            let sy = tiled_solver_words(d, y, d.tiles_y as u64)?;
            Ok(v * (sx + sy) + 2 * d.tile_extent_x as u64 * y)
        }
        (Workload::Adi3d { x, y, z, .. }, DesignKind::Adi3d) => {
            let solvers = v * (thomas_words(g, x) + thomas_words(g, y) + thomas_words(g, z));
            Ok(solvers + 2 * x * y + 2 * x * z)
        }
        (_, kind) => Err(ModelError::WorkloadMismatch {
            kind,
            workload: "mesh",
        }),
    }
}

/// HBM ports used by a design. Synthesized designs report their measured
/// port count; the rest take two ports per streamed array per compute unit.
pub fn hbm_ports(d: &DesignPoint) -> u32 {
    match d.kind {
        DesignKind::Adi2d if d.precision == Precision::Fp64 => 18,
        DesignKind::Adi2d | DesignKind::Adi3d | DesignKind::Adi2dTiled => 24,
        DesignKind::ThomasThomas | DesignKind::ThomasPcr => 24,
        // a, b, c, d in and u out
        _ => 2 * 5 * d.compute_units,
    }
}

/// Memory and port use of `d` on `w`, checked against `device`.
pub fn estimate_resources(
    w: &Workload,
    d: &DesignPoint,
    device: &DeviceProfile,
) -> Result<ResourceEstimate, ModelError> {
    w.validate()?;
    d.validate()?;
    let cus = d.compute_units as u64;
    let (words, replicas) = match (*w, d.kind) {
        (Workload::Batched { n, batch }, DesignKind::BatchedPcr) => {
            (memory_words(d, n)? * batch, cus)
        }
        (Workload::Batched { n, .. }, kind) if kind.is_batched() => {
            (memory_words(d, n)?, d.vector as u64 * cus)
        }
        (Workload::Batched { .. }, kind) => {
            return Err(ModelError::WorkloadMismatch {
                kind,
                workload: "batched",
            })
        }
        _ => (adi_words(d, w)?, cus),
    };
    let total_words = words * replicas;
    let bytes = total_words * device.word_bytes(d.precision);
    let block_bytes = device.uram_bytes / device.uram_blocks as u64;
    let ports = hbm_ports(d);
    let mut violations = Vec::new();
    if bytes > device.on_chip_bytes() {
        violations.push(Budget::OnChipMemory);
    }
    if ports > device.hbm_ports {
        violations.push(Budget::HbmPorts);
    }
    Ok(ResourceEstimate {
        words,
        replicas,
        total_words,
        bytes,
        ram_blocks: ceil_div(bytes, block_bytes),
        hbm_ports: ports,
        feasible: violations.is_empty(),
        violations,
    })
}
