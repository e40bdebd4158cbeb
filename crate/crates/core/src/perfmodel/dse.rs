use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::design::{default_group, DesignKind, DesignPoint, ModelError, Workload};
use super::device::DeviceProfile;
use super::latency::{estimate_latency, LatencyEstimate};
use super::memory::{estimate_resources, ResourceEstimate};
use crate::scalar::Precision;
use crate::tiled::ReducedSolver;

/// Parameter ranges swept by [`dse_enumerate`]. Empty `groups` means the
/// precision default.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ParameterGrid {
    pub kinds: Vec<DesignKind>,
    pub groups: Vec<u32>,
    pub vectors: Vec<u32>,
    pub unrolls: Vec<u32>,
    pub tiles: Vec<u32>,
    pub compute_units: Vec<u32>,
    pub partitions: Vec<u32>,
    pub frequencies_hz: Vec<f64>,
    pub pipeline_latency: u32,
}

impl Default for ParameterGrid {
    fn default() -> Self {
        Self {
            kinds: DesignKind::ALL.to_vec(),
            groups: Vec::new(),
            vectors: vec![8],
            unrolls: vec![1, 2, 3],
            tiles: vec![2, 4, 8, 16],
            compute_units: vec![1, 2, 3, 4],
            partitions: vec![2, 4, 8],
            frequencies_hz: vec![300e6],
            pipeline_latency: 30,
        }
    }
}

impl ParameterGrid {
    /// Grid with no candidates.
    pub fn empty() -> Self {
        Self {
            kinds: Vec::new(),
            ..Self::default()
        }
    }

    /// Every design point in the grid applicable to `w`.
    pub fn points(&self, w: &Workload, precision: Precision) -> Vec<DesignPoint> {
        let groups = if self.groups.is_empty() {
            vec![default_group(precision)]
        } else {
            self.groups.clone()
        };
        let one = [1u32];
        let mut out = Vec::new();
        for &kind in &self.kinds {
            if !w.kinds().contains(&kind) {
                continue;
            }
            use DesignKind as K;
            let uses = |k: &[DesignKind]| k.contains(&kind);
            let gs: &[u32] = if kind == K::BatchedPcr { &one } else { &groups };
            let vs: &[u32] = if kind == K::BatchedPcr { &one } else { &self.vectors };
            let fs: &[u32] = if uses(&[K::BatchedPcr, K::Adi2d]) { &self.unrolls } else { &one };
            let ts: &[u32] = if kind.is_tiled() { &self.tiles } else { &one };
            let cs: &[u32] = if uses(&[K::BatchedThomas, K::Adi2d, K::Adi3d, K::Adi2dTiled]) {
                &self.compute_units
            } else {
                &one
            };
            let ms: &[u32] = if kind == K::BatchedSpike { &self.partitions } else { &one };
            let rs: &[ReducedSolver] = if kind == K::Adi2dTiled {
                &[ReducedSolver::Thomas, ReducedSolver::Pcr]
            } else {
                &[ReducedSolver::Thomas]
            };
            for &hz in &self.frequencies_hz {
                for &g in gs {
                    for &v in vs {
                        for &f in fs {
                            for &t in ts {
                                for &c in cs {
                                    for &m in ms {
                                        for &r in rs {
                                            let mut d = DesignPoint::new(kind, precision)
                                                .with_group(g)
                                                .with_vector(v)
                                                .with_unroll(f)
                                                .with_tiles(t)
                                                .with_compute_units(c)
                                                .with_partitions(m)
                                                .with_frequency(hz);
                                            d.reduced_group = g;
                                            d.pipeline_latency = self.pipeline_latency;
                                            if kind == K::Adi2dTiled {
                                                d.reduced_solver = r;
                                            }
                                            out.push(d);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DseEntry {
    /// 1-based position among feasible designs; `None` when rejected.
    pub rank: Option<usize>,
    pub design: DesignPoint,
    pub latency: LatencyEstimate,
    pub resources: ResourceEstimate,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DseReport {
    pub ranked: Vec<DseEntry>,
    /// Designs exceeding a device budget, in grid order.
    pub rejected: Vec<DseEntry>,
}

fn order(a: &DseEntry, b: &DseEntry) -> Ordering {
    a.latency
        .seconds
        .total_cmp(&b.latency.seconds)
        .then(a.design.kind.cmp(&b.design.kind))
        .then(a.resources.total_words.cmp(&b.resources.total_words))
}

/// Evaluates every grid point, drops infeasible ones and ranks the rest by
/// modelled time.
pub fn dse_enumerate(
    w: &Workload,
    precision: Precision,
    device: &DeviceProfile,
    grid: &ParameterGrid,
) -> Result<DseReport, ModelError> {
    w.validate()?;
    device
        .validate()
        .map_err(ModelError::InvalidParameter)?;
    let mut report = DseReport::default();
    for design in grid.points(w, precision) {
        // points the formulas reject, such as tiles too small for n, are skipped
        let (Ok(latency), Ok(resources)) = (
            estimate_latency(w, &design),
            estimate_resources(w, &design, device),
        ) else {
            continue;
        };
        let entry = DseEntry {
            rank: None,
            design,
            latency,
            resources,
        };
        if entry.resources.feasible {
            report.ranked.push(entry);
        } else {
            report.rejected.push(entry);
        }
    }
    if report.ranked.is_empty() {
        return Err(ModelError::NoFeasibleDesign);
    }
    report.ranked.sort_by(order);
    for (i, e) in report.ranked.iter_mut().enumerate() {
        e.rank = Some(i + 1);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_beats_pcr() {
        let grid = ParameterGrid {
            kinds: vec![DesignKind::BatchedThomas, DesignKind::BatchedPcr],
            ..ParameterGrid::default()
        };
        let w = Workload::Batched { n: 128, batch: 8000 };
        let r = dse_enumerate(&w, Precision::Fp32, &DeviceProfile::u280(), &grid).unwrap();
        assert_eq!(r.ranked[0].design.kind, DesignKind::BatchedThomas);
        assert_eq!(r.ranked[0].rank, Some(1));
    }

    #[test]
    fn empty_grid() {
        let w = Workload::Batched { n: 128, batch: 8000 };
        assert_eq!(
            dse_enumerate(&w, Precision::Fp32, &DeviceProfile::u280(), &ParameterGrid::empty()),
            Err(ModelError::NoFeasibleDesign)
        );
    }

    #[test]
    fn large_systems_need_tiles() {
        let w = Workload::Batched { n: 8192, batch: 1000 };
        let r = dse_enumerate(&w, Precision::Fp32, &DeviceProfile::u280(), &ParameterGrid::default())
            .unwrap();
        assert!(r.ranked.iter().all(|e| e.design.kind.is_tiled()));
    }
}
