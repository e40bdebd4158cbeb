//! Analytic cycle, memory and feasibility models of the FPGA designs, plus a
//! design space enumerator.
//!
//! Cycle counts are integers; every fractional term is rounded up on its own.
//! Logarithms are base-2 ceilings.

mod design;
mod device;
mod dse;
mod latency;
mod memory;
pub mod reference;

pub use design::{
    default_group, log2_ceil, Budget, DesignKind, DesignPoint, ModelError, SpikeCeiling,
    ThomasForm, Workload,
};
pub use device::DeviceProfile;
pub use dse::{dse_enumerate, DseEntry, DseReport, ParameterGrid};
pub use latency::{
    adi2d as latency_adi2d, adi2d_fifo_words, adi2d_tiled as latency_adi2d_tiled,
    adi3d as latency_adi3d, batched_pcr as latency_batched_pcr,
    batched_spike as latency_batched_spike, batched_thomas as latency_batched_thomas,
    cycles_to_seconds, estimate_latency, seconds_to_cycles, thomas_pcr as latency_thomas_pcr,
    thomas_thomas as latency_thomas_thomas, LatencyEstimate, LatencyTerm,
};
pub use memory::{
    estimate_resources, hbm_ports, memory_words, thomas_thomas_fifo_words, thomas_words,
    ResourceEstimate,
};
