//! Command line front end.
//!
//! Exit status: 0 success, 1 internal error, 2 usage error, 3 infeasible
//! design or failed verification.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tridax_core::perfmodel::{
    dse_enumerate, estimate_latency, estimate_resources, DesignKind, DesignPoint, ModelError, ThomasForm,
    Workload,
};
use tridax_core::scalar::max_abs_diff;
use tridax_core::{
    AdiConfig, Algorithm, DiagonalRule, Dims, ExecConfig, Mesh, Precision, Real, ReducedSolver, TilePlan,
};

use crate::report::{self, Format, ModelReport};
use crate::{calibration, config, generate, io as mio, reference, run};

#[derive(Debug, Parser)]
#[command(name = "tridax", version, about = "Batched tridiagonal solvers, ADI runs and FPGA model")]
pub struct Cli {
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a batch of systems from a file or a seeded generator.
    Solve(SolveArgs),
    /// Run ADI heat diffusion on a batch of meshes.
    Adi(AdiArgs),
    /// Evaluate the latency and resource model for one design.
    Model(ModelArgs),
    /// Rank every design in a parameter grid.
    Dse(DseArgs),
    /// Quick correctness and calibration checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Thomas,
    Pcr,
    ThomasThomas,
    ThomasPcr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Fp32,
    Fp64,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Fp32 => Precision::Fp32,
            PrecisionArg::Fp64 => Precision::Fp64,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Batch file; when absent a batch is generated.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgoArg::Thomas)]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 4)]
    pub tiles: usize,
    /// Precision of generated batches.
    #[arg(long, value_enum, default_value_t = PrecisionArg::Fp64)]
    pub precision: PrecisionArg,
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Diagonal dominance margin of generated systems.
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    /// Solution file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the generated batch here.
    #[arg(long)]
    pub save_input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdiArgs {
    /// Mesh extents `X,Y` or `X,Y,Z`.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<Dims>,
    /// Initial mesh file instead of a generated one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long, default_value_t = 1)]
    pub unroll: usize,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Fp64)]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value_t = AlgoArg::Thomas)]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 4)]
    pub tiles: usize,
    #[arg(long, default_value_t = 32)]
    pub group: usize,
    #[arg(long, default_value_t = 8)]
    pub vector: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare against the naive reference implementation.
    #[arg(long)]
    pub verify: bool,
    /// Use `b = γ` on the main diagonal instead of `1 + γ`.
    #[arg(long)]
    pub literal_diagonal: bool,
    /// Final mesh file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value_t = PrecisionArg::Fp32)]
    pub precision: PrecisionArg,
    #[arg(long, default_value_t = 1)]
    pub batch: u64,
    /// System length of batched designs.
    #[arg(long)]
    pub size: Option<u64>,
    /// Mesh extents of ADI designs.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<Dims>,
    #[arg(long, default_value_t = 100)]
    pub iters: u64,
    /// Built-in profile name, file, or name in `TRIDAX_DEVICE_DIR`.
    #[arg(long, default_value = "u280")]
    pub device: String,
    /// Overrides the device clock.
    #[arg(long)]
    pub freq_mhz: Option<f64>,
    /// Report file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Design kind, e.g. batched-thomas, thomas-pcr, adi2d.
    #[arg(long)]
    pub algo: String,
    #[command(flatten)]
    pub common: DesignArgs,
    #[arg(long)]
    pub group: Option<u32>,
    #[arg(long, default_value_t = 8)]
    pub vector: u32,
    #[arg(long, default_value_t = 1)]
    pub unroll: u32,
    #[arg(long, default_value_t = 4)]
    pub tiles: u32,
    #[arg(long, default_value_t = 1)]
    pub cus: u32,
    #[arg(long, default_value_t = 4)]
    pub partitions: u32,
    /// Spike per-block reduced cost.
    #[arg(long)]
    pub block_cost: Option<u32>,
    /// Pipeline latency in cycles.
    #[arg(long, default_value_t = 30)]
    pub latency: u32,
    /// Batched Thomas without the ping-pong prologue.
    #[arg(long)]
    pub base_form: bool,
    /// Reduced solver of the tiled ADI design.
    #[arg(long, value_enum)]
    pub reduced: Option<ReducedArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReducedArg {
    Thomas,
    Pcr,
}

#[derive(Debug, Args)]
pub struct DseArgs {
    #[command(flatten)]
    pub common: DesignArgs,
    /// Parameter grid file (JSON or key = value).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Restrict the grid to these design kinds.
    #[arg(long, value_delimiter = ',')]
    pub algo: Vec<String>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Rejected(String),
    Internal(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Rejected(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let parts: Vec<usize> = s
        .split([',', 'x'])
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad extent `{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y] if x > 0 && y > 0 => Ok(Dims::planar(x, y)),
        [x, y, z] if x > 0 && y > 0 && z > 0 => Ok(Dims::new(x, y, z)),
        _ => Err("expected X,Y or X,Y,Z with positive extents".into()),
    }
}

fn algorithm(algo: AlgoArg, tiles: usize, n: usize) -> Result<Algorithm, Failure> {
    let tiled = |t: usize| -> Result<usize, Failure> {
        TilePlan::new(n, t).map_err(|e| usage(format!("--tiles {t}: {e}")))?;
        Ok(t)
    };
    Ok(match algo {
        AlgoArg::Thomas => Algorithm::Thomas,
        AlgoArg::Pcr => Algorithm::Pcr,
        AlgoArg::ThomasThomas => Algorithm::ThomasThomas { tiles: tiled(tiles)? },
        AlgoArg::ThomasPcr => Algorithm::ThomasPcr { tiles: tiled(tiles)? },
    })
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let format = cli.format;
    run::with_threads(cli.threads, move || match cli.command {
        Command::Solve(a) => cmd_solve(a, format),
        Command::Adi(a) => cmd_adi(a, format),
        Command::Model(a) => cmd_model(a, format),
        Command::Dse(a) => cmd_dse(a, format),
        Command::Selftest => cmd_selftest(),
    })
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Rejected(m) => eprintln!("{m}"),
                Failure::Internal(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn cmd_solve(a: SolveArgs, format: Format) -> Result<(), Failure> {
    match &a.input {
        Some(path) => {
            let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
            let header: [u8; mio::HEADER_LEN] = bytes
                .get(..mio::HEADER_LEN)
                .and_then(|h| h.try_into().ok())
                .ok_or_else(|| usage("input is not a batch file"))?;
            let header = mio::Header::parse(&header).map_err(|e| usage(e.to_string()))?;
            match header.precision {
                Precision::Fp32 => solve_with::<f32>(&a, format, Some(&bytes)),
                Precision::Fp64 => solve_with::<f64>(&a, format, Some(&bytes)),
            }
        }
        None => match Precision::from(a.precision) {
            Precision::Fp32 => solve_with::<f32>(&a, format, None),
            Precision::Fp64 => solve_with::<f64>(&a, format, None),
        },
    }
}

fn solve_with<T: Real>(a: &SolveArgs, format: Format, input: Option<&[u8]>) -> Result<(), Failure> {
    let batch = match input {
        Some(bytes) => mio::decode_batch::<T>(bytes).map_err(|e| usage(format!("bad batch file: {e}")))?,
        None => {
            let n = a.size.ok_or_else(|| usage("--size is required without --input"))?;
            if n == 0 || a.batch == 0 {
                return Err(usage("--size and --batch must be positive"));
            }
            if !(a.margin > 0.0) {
                return Err(usage("--margin must be positive"));
            }
            let spec = generate::SystemSpec {
                margin: a.margin,
                ..generate::SystemSpec::new(a.seed, a.batch, n)
            };
            generate::random_batch::<T>(&spec).map_err(|e| Failure::Internal(e.into()))?
        }
    };
    if let Some(p) = &a.save_input {
        let bytes = mio::encode_batch(&batch).map_err(anyhow::Error::from)?;
        mio::write_atomic(p, &bytes).with_context(|| format!("cannot write {}", p.display()))?;
    }
    let algo = algorithm(a.algo, a.tiles, batch.system_len())?;
    let (solutions, report) =
        run::solve_batch(&batch, algo).map_err(|e| Failure::Rejected(format!("solve failed: {e}")))?;
    if let Some(p) = &a.out {
        let bytes = mio::encode_solutions(&solutions).map_err(anyhow::Error::from)?;
        mio::write_atomic(p, &bytes).with_context(|| format!("cannot write {}", p.display()))?;
    }
    report::write_solve(open_out(None)?, &report, format)?;
    Ok(())
}

fn cmd_adi(a: AdiArgs, format: Format) -> Result<(), Failure> {
    if !(a.gamma > 0.0) || !a.gamma.is_finite() {
        return Err(usage("--gamma must be positive"));
    }
    if a.iters == 0 || a.unroll == 0 || a.group == 0 || a.vector == 0 {
        return Err(usage("--iters, --unroll, --group and --vector must be positive"));
    }
    match &a.input {
        Some(path) => {
            let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
            match mio::decode_mesh(&bytes).map_err(|e| usage(format!("bad mesh file: {e}")))? {
                mio::AnyMesh::F32(m) => adi_with(&a, format, m),
                mio::AnyMesh::F64(m) => adi_with(&a, format, m),
            }
        }
        None => {
            let dims = a.dims.ok_or_else(|| usage("--dims is required without --input"))?;
            if a.batch == 0 {
                return Err(usage("--batch must be positive"));
            }
            match Precision::from(a.precision) {
                Precision::Fp32 => adi_with(&a, format, generate::random_mesh::<f32>(a.seed, dims, a.batch).unwrap()),
                Precision::Fp64 => adi_with(&a, format, generate::random_mesh::<f64>(a.seed, dims, a.batch).unwrap()),
            }
        }
    }
}

fn adi_with<T: Real>(a: &AdiArgs, format: Format, u0: Mesh<T>) -> Result<(), Failure> {
    let dims = u0.dims();
    let shortest = dims.solved_axes().iter().map(|&ax| dims.extent(ax)).min().unwrap_or(0);
    let algo = algorithm(a.algo, a.tiles, shortest)?;
    let rule = if a.literal_diagonal {
        DiagonalRule::Literal
    } else {
        DiagonalRule::Standard
    };
    let cfg = AdiConfig {
        unroll: a.unroll,
        rule,
        algo,
        exec: ExecConfig {
            group: a.group,
            vector: a.vector,
        },
        ..AdiConfig::new(a.gamma, a.iters)
    };
    let reference = a.verify.then(|| u0.clone());
    let (u, mut rep) = run::adi_run(u0, &cfg).map_err(|e| match e {
        tridax_core::AdiError::MeshTooSmall { .. } | tridax_core::AdiError::InvalidConfig(_) => usage(e.to_string()),
        e => Failure::Internal(e.into()),
    })?;
    let mut verify_failed = None;
    if let Some(mut r) = reference {
        reference::naive_adi_run(&mut r, cfg.gamma, rule, cfg.n_iter);
        let dev = max_abs_diff(u.data(), r.data());
        rep.verify_max_deviation = Some(dev);
        let tol = T::PRECISION.tolerance() * r.max_abs().max(1.0);
        if !(dev <= tol) {
            verify_failed = Some(format!("FAIL verify: max deviation {dev:.3e} above {tol:.1e}"));
        } else {
            eprintln!("PASS verify: max deviation {dev:.3e}");
        }
    }
    if let Some(p) = &a.out {
        let bytes = mio::encode_mesh(&u).map_err(anyhow::Error::from)?;
        mio::write_atomic(p, &bytes).with_context(|| format!("cannot write {}", p.display()))?;
    }
    report::write_run(open_out(None)?, &rep, format)?;
    match verify_failed {
        Some(m) => Err(Failure::Rejected(m)),
        None => Ok(()),
    }
}

fn workload(kind: DesignKind, c: &DesignArgs) -> Result<Workload, Failure> {
    let w = if kind.is_adi() {
        let d = c.dims.ok_or_else(|| usage("--dims is required for ADI designs"))?;
        match (kind, d.is_planar()) {
            (DesignKind::Adi3d, false) => Workload::Adi3d {
                x: d.x as u64,
                y: d.y as u64,
                z: d.z as u64,
                batch: c.batch,
                iterations: c.iters,
            },
            (DesignKind::Adi2d | DesignKind::Adi2dTiled, true) => Workload::Adi2d {
                x: d.x as u64,
                y: d.y as u64,
                batch: c.batch,
                iterations: c.iters,
            },
            _ => return Err(usage(format!("--dims does not match {kind}"))),
        }
    } else {
        let n = c.size.ok_or_else(|| usage("--size is required for batched designs"))?;
        Workload::Batched { n, batch: c.batch }
    };
    w.validate().map_err(|e| usage(e.to_string()))?;
    Ok(w)
}

fn device(c: &DesignArgs) -> Result<tridax_core::perfmodel::DeviceProfile, Failure> {
    let mut dev = config::resolve_device(&c.device).map_err(|e| usage(e.to_string()))?;
    if let Some(f) = c.freq_mhz {
        if !(f > 0.0) {
            return Err(usage("--freq-mhz must be positive"));
        }
        dev.frequency_hz = f * 1e6;
    }
    Ok(dev)
}

fn model_error(e: ModelError) -> Failure {
    match e {
        ModelError::NoFeasibleDesign | ModelError::InfeasibleDesign { .. } => Failure::Rejected(e.to_string()),
        e => usage(e.to_string()),
    }
}

fn cmd_model(a: ModelArgs, format: Format) -> Result<(), Failure> {
    let kind: DesignKind = a.algo.parse().map_err(|_| usage(format!("unknown design `{}`", a.algo)))?;
    let dev = device(&a.common)?;
    let w = workload(kind, &a.common)?;
    let mut d = DesignPoint::new(kind, a.common.precision.into())
        .with_vector(a.vector)
        .with_unroll(a.unroll)
        .with_tiles(a.tiles)
        .with_compute_units(a.cus)
        .with_partitions(a.partitions)
        .with_frequency(dev.frequency_hz);
    if let Some(g) = a.group {
        d = d.with_group(g);
        d.reduced_group = g;
    }
    d.block_cost = a.block_cost;
    d.pipeline_latency = a.latency;
    if a.base_form {
        d.thomas_form = ThomasForm::Base;
    }
    if let Some(r) = a.reduced {
        d.reduced_solver = match r {
            ReducedArg::Thomas => ReducedSolver::Thomas,
            ReducedArg::Pcr => ReducedSolver::Pcr,
        };
    }
    let latency = estimate_latency(&w, &d).map_err(model_error)?;
    let resources = estimate_resources(&w, &d, &dev).map_err(model_error)?;
    let feasible = resources.feasible;
    let violations = resources.violations.clone();
    let rep = ModelReport {
        schema_version: run::SCHEMA_VERSION,
        measured: calibration::compare(&w, &d, &latency),
        workload: w,
        design: d,
        latency,
        resources,
    };
    report::write_model(open_out(a.common.out.as_deref())?, &rep, format)?;
    if feasible {
        Ok(())
    } else {
        Err(model_error(ModelError::InfeasibleDesign { violations }))
    }
}

fn cmd_dse(a: DseArgs, format: Format) -> Result<(), Failure> {
    let dev = device(&a.common)?;
    let mut grid = match &a.grid {
        Some(p) => config::load_grid(p).map_err(|e| usage(e.to_string()))?,
        None => Default::default(),
    };
    if !a.algo.is_empty() {
        grid.kinds = a
            .algo
            .iter()
            .map(|s| s.parse().map_err(|_| usage(format!("unknown design `{s}`"))))
            .collect::<Result<_, _>>()?;
    }
    if let Some(f) = a.common.freq_mhz {
        grid.frequencies_hz = vec![f * 1e6];
    }
    let w = match (a.common.dims, a.common.size) {
        (Some(d), None) if d.is_planar() => workload(DesignKind::Adi2d, &a.common)?,
        (Some(_), None) => workload(DesignKind::Adi3d, &a.common)?,
        (None, Some(_)) => workload(DesignKind::BatchedThomas, &a.common)?,
        _ => return Err(usage("give exactly one of --size and --dims")),
    };
    let precision = a.common.precision.into();
    match dse_enumerate(&w, precision, &dev, &grid) {
        Ok(r) => {
            report::write_dse(open_out(a.common.out.as_deref())?, &w, &r, format)?;
            Ok(())
        }
        Err(ModelError::NoFeasibleDesign) => {
            let mut out = open_out(a.common.out.as_deref())?;
            match format {
                Format::Csv => writeln!(out, "{}\n# no feasible design", report::DESIGN_COLUMNS.join(","))
                    .map_err(anyhow::Error::from)?,
                Format::Json => writeln!(
                    out,
                    "{{\"schema_version\": {}, \"ranked\": [], \"error\": \"no feasible design\"}}",
                    run::SCHEMA_VERSION
                )
                .map_err(anyhow::Error::from)?,
            }
            Err(Failure::Rejected(
                "no design in the grid fits the device; widen the grid or use a larger device".into(),
            ))
        }
        Err(e) => Err(model_error(e)),
    }
}

fn cmd_selftest() -> Result<(), Failure> {
    let checks = crate::selftest::run_all();
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.pass);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Rejected(format!("{failed} self-test check(s) failed")))
    }
}
