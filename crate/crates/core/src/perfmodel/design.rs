use core::fmt;
use core::str::FromStr;

use crate::scalar::Precision;
use crate::tiled::ReducedSolver;

/// Hardware architecture being modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DesignKind {
    BatchedThomas,
    BatchedPcr,
    BatchedSpike,
    ThomasThomas,
    ThomasPcr,
    Adi2d,
    Adi3d,
    Adi2dTiled,
}

impl DesignKind {
    pub const ALL: [DesignKind; 8] = [
        DesignKind::BatchedThomas,
        DesignKind::BatchedPcr,
        DesignKind::BatchedSpike,
        DesignKind::ThomasThomas,
        DesignKind::ThomasPcr,
        DesignKind::Adi2d,
        DesignKind::Adi3d,
        DesignKind::Adi2dTiled,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            DesignKind::BatchedThomas => "batched-thomas",
            DesignKind::BatchedPcr => "batched-pcr",
            DesignKind::BatchedSpike => "batched-spike",
            DesignKind::ThomasThomas => "thomas-thomas",
            DesignKind::ThomasPcr => "thomas-pcr",
            DesignKind::Adi2d => "adi2d",
            DesignKind::Adi3d => "adi3d",
            DesignKind::Adi2dTiled => "adi2d-tiled",
        }
    }

    /// Solves independent 1D systems rather than a mesh application.
    pub const fn is_batched(self) -> bool {
        !self.is_adi()
    }

    pub const fn is_adi(self) -> bool {
        matches!(self, DesignKind::Adi2d | DesignKind::Adi3d | DesignKind::Adi2dTiled)
    }

    pub const fn is_tiled(self) -> bool {
        matches!(
            self,
            DesignKind::ThomasThomas | DesignKind::ThomasPcr | DesignKind::Adi2dTiled
        )
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DesignKind {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        DesignKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .or(match s.as_str() {
                "thomas" => Some(DesignKind::BatchedThomas),
                "pcr" => Some(DesignKind::BatchedPcr),
                "spike" => Some(DesignKind::BatchedSpike),
                "adi-2d" => Some(DesignKind::Adi2d),
                "adi-3d" => Some(DesignKind::Adi3d),
                _ => None,
            })
            .ok_or(ModelError::InvalidParameter("unknown design kind"))
    }
}

/// Pipeline prologue of the batched Thomas design.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ThomasForm {
    /// Forward and backward passes overlap across group batches.
    #[default]
    PingPong,
    /// One pass of fill before streaming.
    Base,
}

impl ThomasForm {
    pub const fn prologue(self) -> u64 {
        match self {
            ThomasForm::PingPong => 3,
            ThomasForm::Base => 1,
        }
    }
}

/// How the Spike group count is rounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SpikeCeiling {
    /// `ceil(B*m/g) + 1`
    #[default]
    PlusOne,
    /// `ceil(B*m/(g+1))`
    DivisorPlusOne,
}

/// Parameters of one candidate FPGA design.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignPoint {
    pub kind: DesignKind,
    pub precision: Precision,
    /// Systems interleaved per solver (g).
    pub group: u32,
    /// Group size of the reduced solver (g_r).
    pub reduced_group: u32,
    /// Vector lanes (v).
    pub vector: u32,
    /// Unroll factor (f_U).
    pub unroll: u32,
    /// Tiles per system for 1D tiled designs (t).
    pub tiles: u32,
    /// Tiles along x and y for the tiled 2D ADI design.
    pub tiles_x: u32,
    pub tiles_y: u32,
    /// x extent of the plane buffered by the tiled y sweep.
    pub tile_extent_x: u32,
    /// Compute units (N_CU).
    pub compute_units: u32,
    /// Spike partitions (m).
    pub partitions: u32,
    /// Arithmetic pipeline latency (l).
    pub pipeline_latency: u32,
    /// Per block reduced solve cost of Spike (C). Defaults to `2l`.
    pub block_cost: Option<u32>,
    /// Mesh points read per cycle (p). Defaults to `v`.
    pub points_per_cycle: Option<u32>,
    pub frequency_hz: f64,
    pub thomas_form: ThomasForm,
    pub spike_ceiling: SpikeCeiling,
    pub reduced_solver: ReducedSolver,
    /// Override of the reduced system FIFO of the Thomas-Thomas design.
    pub fifo_words: Option<u64>,
}

impl DesignPoint {
    pub fn new(kind: DesignKind, precision: Precision) -> Self {
        let group = default_group(precision);
        Self {
            kind,
            precision,
            group,
            reduced_group: group,
            vector: 8,
            unroll: 1,
            tiles: 4,
            tiles_x: 4,
            tiles_y: 4,
            tile_extent_x: 8,
            compute_units: 1,
            partitions: 4,
            pipeline_latency: 30,
            block_cost: None,
            points_per_cycle: None,
            frequency_hz: 300e6,
            thomas_form: ThomasForm::PingPong,
            spike_ceiling: SpikeCeiling::PlusOne,
            reduced_solver: match kind {
                DesignKind::ThomasPcr => ReducedSolver::Pcr,
                _ => ReducedSolver::Thomas,
            },
            fifo_words: None,
        }
    }

    pub fn with_group(mut self, g: u32) -> Self {
        self.group = g;
        self
    }
    pub fn with_vector(mut self, v: u32) -> Self {
        self.vector = v;
        self
    }
    pub fn with_unroll(mut self, f: u32) -> Self {
        self.unroll = f;
        self
    }
    pub fn with_tiles(mut self, t: u32) -> Self {
        self.tiles = t;
        self.tiles_x = t;
        self.tiles_y = t;
        self
    }
    pub fn with_compute_units(mut self, n: u32) -> Self {
        self.compute_units = n;
        self
    }
    pub fn with_partitions(mut self, m: u32) -> Self {
        self.partitions = m;
        self
    }
    pub fn with_frequency(mut self, hz: f64) -> Self {
        self.frequency_hz = hz;
        self
    }

    pub fn block_cost(&self) -> u64 {
        self.block_cost
            .map(u64::from)
            .unwrap_or(2 * self.pipeline_latency as u64)
    }

    pub fn points_per_cycle(&self) -> u64 {
        self.points_per_cycle.unwrap_or(self.vector) as u64
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            (self.group, "group must be positive"),
            (self.reduced_group, "reduced group must be positive"),
            (self.vector, "vector width must be positive"),
            (self.unroll, "unroll factor must be positive"),
            (self.tiles, "tile count must be positive"),
            (self.tiles_x, "tile count must be positive"),
            (self.tiles_y, "tile count must be positive"),
            (self.tile_extent_x, "tile extent must be positive"),
            (self.compute_units, "compute units must be positive"),
            (self.partitions, "partitions must be positive"),
        ];
        for (value, msg) in positive {
            if value == 0 {
                return Err(ModelError::InvalidParameter(msg));
            }
        }
        if let Some(p) = self.points_per_cycle {
            if p == 0 || p > self.vector {
                return Err(ModelError::InvalidParameter(
                    "points per cycle must be in 1..=vector",
                ));
            }
        }
        if !(self.frequency_hz > 0.0) || !self.frequency_hz.is_finite() {
            return Err(ModelError::InvalidParameter("frequency must be positive"));
        }
        Ok(())
    }
}

/// Problem whose runtime is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Workload {
    Batched { n: u64, batch: u64 },
    Adi2d { x: u64, y: u64, batch: u64, iterations: u64 },
    Adi3d { x: u64, y: u64, z: u64, batch: u64, iterations: u64 },
}

impl Workload {
    pub fn batch(&self) -> u64 {
        match *self {
            Workload::Batched { batch, .. }
            | Workload::Adi2d { batch, .. }
            | Workload::Adi3d { batch, .. } => batch,
        }
    }

    /// Design kinds able to run this workload.
    pub fn kinds(&self) -> &'static [DesignKind] {
        match self {
            Workload::Batched { .. } => &[
                DesignKind::BatchedThomas,
                DesignKind::BatchedPcr,
                DesignKind::BatchedSpike,
                DesignKind::ThomasThomas,
                DesignKind::ThomasPcr,
            ],
            Workload::Adi2d { .. } => &[DesignKind::Adi2d, DesignKind::Adi2dTiled],
            Workload::Adi3d { .. } => &[DesignKind::Adi3d],
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = match *self {
            Workload::Batched { n, batch } => n > 0 && batch > 0,
            Workload::Adi2d { x, y, batch, iterations } => {
                x > 0 && y > 0 && batch > 0 && iterations > 0
            }
            Workload::Adi3d { x, y, z, batch, iterations } => {
                x > 0 && y > 0 && z > 0 && batch > 0 && iterations > 0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidParameter("workload sizes must be positive"))
        }
    }
}

/// Budget exceeded by a design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Budget {
    OnChipMemory,
    HbmPorts,
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Budget::OnChipMemory => "on-chip memory",
            Budget::HbmPorts => "HBM ports",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("design {kind} cannot run a {workload} workload")]
    WorkloadMismatch { kind: DesignKind, workload: &'static str },
    #[error("design exceeds budget: {}", budgets(.violations))]
    InfeasibleDesign { violations: alloc::vec::Vec<Budget> },
    #[error("no design in the grid fits the device")]
    NoFeasibleDesign,
    #[error("duration must be positive")]
    ZeroDuration,
}

fn budgets(v: &[Budget]) -> alloc::string::String {
    use alloc::string::ToString;
    v.iter().map(|b| b.to_string()).collect::<alloc::vec::Vec<_>>().join(", ")
}

/// Interleave group that hides the pipeline latency.
pub const fn default_group(precision: Precision) -> u32 {
    match precision {
        Precision::Fp32 => 32,
        Precision::Fp64 => 64,
    }
}

pub(crate) fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// `ceil(log2 n)`, zero for `n <= 1`.
pub fn log2_ceil(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        (64 - (n - 1).leading_zeros()) as u64
    }
}
