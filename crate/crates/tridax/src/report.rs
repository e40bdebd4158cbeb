//! Model and DSE reports as JSON or CSV.
//!
//! CSV column order is fixed by [`DESIGN_COLUMNS`] and only changes with
//! [`SCHEMA_VERSION`](crate::run::SCHEMA_VERSION).

use std::io::Write;

use serde::Serialize;
use tridax_core::perfmodel::{
    reference::Comparison, DesignPoint, DseEntry, DseReport, LatencyEstimate, ResourceEstimate, Workload,
};

use crate::run::{RunReport, SolveReport, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub const DESIGN_COLUMNS: [&str; 20] = [
    "schema_version",
    "algorithm",
    "precision",
    "group",
    "reduced_group",
    "vector",
    "unroll",
    "tiles",
    "compute_units",
    "partitions",
    "frequency_hz",
    "cycles",
    "seconds",
    "words",
    "total_words",
    "bytes",
    "hbm_ports",
    "feasible",
    "violations",
    "rank",
];

fn design_row(
    d: &DesignPoint,
    l: &LatencyEstimate,
    r: &ResourceEstimate,
    rank: Option<usize>,
) -> Vec<String> {
    let violations: Vec<String> = r.violations.iter().map(|v| v.to_string()).collect();
    vec![
        SCHEMA_VERSION.to_string(),
        d.kind.to_string(),
        d.precision.to_string(),
        d.group.to_string(),
        d.reduced_group.to_string(),
        d.vector.to_string(),
        d.unroll.to_string(),
        d.tiles.to_string(),
        d.compute_units.to_string(),
        d.partitions.to_string(),
        d.frequency_hz.to_string(),
        l.cycles.to_string(),
        format!("{:.9e}", l.seconds),
        r.words.to_string(),
        r.total_words.to_string(),
        r.bytes.to_string(),
        r.hbm_ports.to_string(),
        r.feasible.to_string(),
        violations.join(";"),
        rank.map(|r| r.to_string()).unwrap_or_default(),
    ]
}

/// Output of a single model evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub schema_version: u32,
    pub workload: Workload,
    pub design: DesignPoint,
    pub latency: LatencyEstimate,
    pub resources: ResourceEstimate,
    /// Published hardware measurement for this configuration, if one exists.
    pub measured: Option<MeasuredComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasuredComparison {
    pub source: &'static str,
    #[serde(flatten)]
    pub comparison: Comparison,
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

pub fn write_model<W: Write>(mut out: W, r: &ModelReport, format: Format) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, r)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            let mut header: Vec<&str> = DESIGN_COLUMNS.to_vec();
            header.extend(["measured_seconds", "relative_error"]);
            w.write_record(&header)?;
            let mut row = design_row(&r.design, &r.latency, &r.resources, None);
            match &r.measured {
                Some(m) => {
                    row.push(format!("{:.9e}", m.comparison.measured));
                    row.push(format!("{:.6}", m.comparison.relative_error));
                }
                None => row.extend([String::new(), String::new()]),
            }
            w.write_record(&row)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DseJson<'a> {
    schema_version: u32,
    workload: &'a Workload,
    ranked: &'a [DseEntry],
    rejected: &'a [DseEntry],
}

/// Ranked designs first, then rejected ones with an empty rank.
pub fn write_dse<W: Write>(mut out: W, w: &Workload, r: &DseReport, format: Format) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            let doc = DseJson {
                schema_version: SCHEMA_VERSION,
                workload: w,
                ranked: &r.ranked,
                rejected: &r.rejected,
            };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut csv = csv_writer(out);
            csv.write_record(DESIGN_COLUMNS)?;
            for e in r.ranked.iter().chain(&r.rejected) {
                csv.write_record(design_row(&e.design, &e.latency, &e.resources, e.rank))?;
            }
            csv.flush()?;
        }
    }
    Ok(())
}

pub const SOLVE_COLUMNS: [&str; 9] = [
    "schema_version",
    "algorithm",
    "precision",
    "batch",
    "n",
    "seconds",
    "bytes",
    "bandwidth_gbs",
    "max_residual",
];

pub fn write_solve<W: Write>(mut out: W, r: &SolveReport, format: Format) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, r)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(SOLVE_COLUMNS)?;
            w.write_record([
                r.schema_version.to_string(),
                r.algorithm.to_string(),
                r.precision.to_string(),
                r.batch.to_string(),
                r.n.to_string(),
                format!("{:.9e}", r.seconds),
                r.bytes.to_string(),
                r.bandwidth_gbs.map(|b| format!("{b:.6}")).unwrap_or_default(),
                format!("{:.6e}", r.max_residual),
            ])?;
            w.flush()?;
        }
    }
    Ok(())
}

/// One row per iteration, then one per phase.
pub const RUN_COLUMNS: [&str; 9] = [
    "schema_version",
    "kind",
    "name",
    "iteration",
    "block",
    "delta_max",
    "u_max",
    "seconds",
    "bandwidth_gbs",
];

pub fn write_run<W: Write>(mut out: W, r: &RunReport, format: Format) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, r)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(RUN_COLUMNS)?;
            let v = r.schema_version.to_string();
            for row in &r.rows {
                w.write_record([
                    v.clone(),
                    "iteration".into(),
                    String::new(),
                    row.iteration.to_string(),
                    row.block.to_string(),
                    format!("{:.9e}", row.delta_max),
                    format!("{:.9e}", row.u_max),
                    String::new(),
                    String::new(),
                ])?;
            }
            for p in r.phases.iter().chain([&r.total]) {
                w.write_record([
                    v.clone(),
                    "phase".into(),
                    p.name.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("{:.9e}", p.seconds),
                    p.bandwidth_gbs.map(|b| format!("{b:.6}")).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
