//! Command-line front end for `tessnet-core`.
//!
//! [`dispatch`] parses an argument vector, runs one subcommand and returns
//! the process exit status. Output goes to the supplied writers so the whole
//! tool can be driven from tests.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tessnet_core::format;
use tessnet_core::kcoverage::{self, Dimension};
use tessnet_core::partition::{self, CellId, PartitionFrame};
use tessnet_core::placement::{self, BackboneParams};
use tessnet_core::routing::{self, DeadEndReason, Field, RouteOutcome, RoutePolicy};
use tessnet_core::{acoustic, energy, verify};
use tessnet_core::{
    Absorption, AcousticParams, CellShape, MonteCarloConfig, Placement, Point3, Region,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DEAD_END: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Meters,
    Kilometers,
}

impl Units {
    fn to_km(self, x: f64) -> f64 {
        match self {
            Units::Meters => x / 1000.0,
            Units::Kilometers => x,
        }
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    pub output_format: OutputFormat,
    pub units: Units,
}

#[derive(Debug, Parser)]
#[command(
    name = "tessnet",
    version,
    about = "Space-filling placement, partitioning and routing for 3D underwater sensor networks"
)]
struct Cli {
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format. `verify` defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Length unit of acoustic radii on the command line and in output.
    /// Other subcommands are unit-free: lengths come out in whatever unit
    /// went in.
    #[arg(long, global = true, value_enum, default_value = "kilometers")]
    units: Units,
    /// Worker threads for parallel internals. Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// File of `key = value` lines supplying defaults for any long flag.
    /// Flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Backbone placement as `u,v,w,x,y,z` rows.
    Plan(PlanArgs),
    /// Per-shape constants of the nonhierarchical partition, scaled by r_t.
    Partition(PartitionArgs),
    /// Cell ids of `x y z` points read one per line.
    Locate(LocateArgs),
    /// Coverage report of a generated placement.
    Verify(VerifyArgs),
    /// Acoustic SIR in dB as `R,N,sir_db` rows.
    Sir(SirArgs),
    /// Per-packet and network energy ratios relative to TO.
    Energy(EnergyArgs),
    /// k-coverage table `k,lambda,p_geq_k,overhead`.
    Kcov(KcovArgs),
    /// Greedy route through a field of cells.
    Route(RouteArgs),
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p
            .parse()
            .map_err(|_| format!("bad number {p:?} in {s:?}"))?;
    }
    Ok(out)
}

fn parse_point(s: &str) -> std::result::Result<Point3, String> {
    parse_triple(s).map(|[x, y, z]| Point3::new(x, y, z))
}

fn parse_cell_id(s: &str) -> std::result::Result<CellId, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let ints: Vec<i64> = parts
        .iter()
        .map(|p| p.parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("expected integers u,v,w, got {s:?}"))?;
    match ints[..] {
        [u, v, w] => Ok(CellId::new(u, v, w)),
        _ => Err(format!("expected u,v,w, got {s:?}")),
    }
}

fn parse_shape(s: &str) -> std::result::Result<CellShape, String> {
    s.parse().map_err(|e: tessnet_core::Error| e.to_string())
}

fn parse_model(s: &str) -> std::result::Result<ModelChoice, String> {
    match s.to_ascii_lowercase().as_str() {
        "auto" => Ok(ModelChoice::Auto),
        "strip" | "strips" => Ok(ModelChoice::Strip),
        _ => parse_shape(s).map(ModelChoice::Shape),
    }
}

fn parse_policy(s: &str) -> std::result::Result<RoutePolicy, String> {
    s.parse().map_err(|e: tessnet_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy)]
enum ModelChoice {
    Auto,
    Strip,
    Shape(CellShape),
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Backbone-to-backbone range.
    #[arg(long)]
    r_bb: f64,
    /// Backbone-to-sensor range.
    #[arg(long, default_value_t = 1.0)]
    r_bs: f64,
    /// auto (best adjusted lattice), CB, HP, RD, TO or strip.
    #[arg(long, default_value = "auto", value_parser = parse_model)]
    model: ModelChoice,
    /// Side of the cubic deployment region.
    #[arg(long, default_value_t = 10.0)]
    side: f64,
    #[arg(long, default_value = "0,0,0", value_parser = parse_point, allow_hyphen_values = true)]
    center: Point3,
    /// Lattice anchor point.
    #[arg(long, default_value = "0,0,0", value_parser = parse_point, allow_hyphen_values = true)]
    reference: Point3,
    /// Clip to the region itself instead of the region grown by one cell
    /// radius.
    #[arg(long)]
    no_inflate: bool,
    /// Leave out the connector nodes a strip placement needs when strips
    /// are out of each other's range.
    #[arg(long)]
    no_aux: bool,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    /// Transmission radius.
    #[arg(long, default_value_t = 1.0)]
    r_t: f64,
}

#[derive(Debug, Args)]
struct LocateArgs {
    #[arg(long, default_value = "0,0,0", value_parser = parse_point, allow_hyphen_values = true)]
    sink: Point3,
    /// Transmission radius.
    #[arg(long, default_value_t = 1.0)]
    r_t: f64,
    /// Read points from this file instead of standard input.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    plan: PlanArgs,
    /// Sampling pitch. Defaults to r_bs/20.
    #[arg(long)]
    grid_step: Option<f64>,
}

#[derive(Debug, Args)]
struct SirArgs {
    #[arg(long, default_value = "RD", value_parser = parse_shape)]
    shape: CellShape,
    /// Cluster sizes.
    #[arg(long, value_delimiter = ',', default_value = "1,8,27")]
    n: Vec<u64>,
    /// Explicit cell radii. Overrides the sweep flags.
    #[arg(long, value_delimiter = ',')]
    radius: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    r_min: f64,
    #[arg(long, default_value_t = 5.0)]
    r_max: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Lowest band frequency, Hz.
    #[arg(long, default_value_t = 10e3)]
    f_min: f64,
    /// Bandwidth, Hz.
    #[arg(long, default_value_t = 7e3)]
    bandwidth: f64,
    #[arg(long, default_value_t = 1.5)]
    spreading: f64,
    /// Drop the absorption term and keep geometric spreading only.
    #[arg(long)]
    no_absorption: bool,
}

#[derive(Debug, Args)]
struct EnergyArgs {
    /// Exponent of the distance-power law.
    #[arg(long, default_value_t = energy::DEFAULT_POWER_EXPONENT)]
    power_exponent: f64,
}

#[derive(Debug, Args)]
struct KcovArgs {
    #[arg(long, default_value_t = 3)]
    dim: u8,
    #[arg(long, default_value_t = 4)]
    k_max: u64,
    /// Also estimate each probability by Monte Carlo with this many samples.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Debug, Args)]
struct RouteArgs {
    /// CSV of `u,v,w,alive,energy` rows.
    #[arg(long)]
    field: PathBuf,
    #[arg(long, value_parser = parse_cell_id, allow_hyphen_values = true)]
    src: CellId,
    #[arg(long, value_parser = parse_cell_id, allow_hyphen_values = true)]
    dest: CellId,
    /// least-loaded, highest-energy or uniform-random (seeded by --seed).
    #[arg(long, default_value = "least-loaded", value_parser = parse_policy)]
    policy: RoutePolicy,
    /// Defaults to four times the id metric between src and dest.
    #[arg(long)]
    max_hops: Option<u64>,
}

/// Flags named on the command line, without the leading dashes.
fn explicit_flags(argv: &[String]) -> Vec<String> {
    argv.iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect()
}

fn config_path(argv: &[String]) -> CliResult<Option<PathBuf>> {
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            return match argv.get(i + 1) {
                Some(p) => Ok(Some(PathBuf::from(p))),
                None => Err(usage("--config needs a file")),
            };
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// underscores in keys read as dashes.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            data(format!(
                "config line {}: expected key = value: {line:?}",
                i + 1
            ))
        })?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(data(format!("config line {}: empty key", i + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

/// Appends config entries as flags unless the command line already sets
/// them. Keys must name a global flag or a flag of the chosen subcommand.
fn merge_config(argv: &mut Vec<String>, config: &BTreeMap<String, String>) -> CliResult<()> {
    let cmd = Cli::command();
    let sub = argv
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a))
        .cloned();
    let explicit = explicit_flags(argv);
    for (key, value) in config {
        if key == "config" {
            return Err(usage("config files cannot name another config file"));
        }
        let arg = cmd
            .get_arguments()
            .chain(sub.iter().flat_map(|s| s.get_arguments()))
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| usage(format!("config key {key:?} is not a flag of this command")))?;
        if explicit.iter().any(|f| f == key) {
            continue;
        }
        if arg.get_action().takes_values() {
            argv.push(format!("--{key}={value}"));
        } else {
            match value.as_str() {
                "true" | "1" | "yes" => argv.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(usage(format!(
                        "config key {key:?} expects true or false, got {value:?}"
                    )))
                }
            }
        }
    }
    Ok(())
}

/// Thread pool for the parallel parts of a command.
struct Pool(Option<rayon::ThreadPool>);

impl Pool {
    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.0 {
            Some(p) => p.install(f),
            None => f(),
        }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// status. Diagnostics go to `err` as one line.
pub fn dispatch<S: AsRef<str>>(
    argv: &[S],
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let mut argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    if argv.is_empty() {
        argv.push("tessnet".into());
    }
    match parse_and_run(argv, stdin, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "tessnet: {e}");
            e.exit_code()
        }
    }
}

fn parse_and_run(
    mut argv: Vec<String>,
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<i32> {
    if let Some(path) = config_path(&argv)? {
        let config = parse_config(&read_file(&path)?)?;
        merge_config(&mut argv, &config)?;
    }
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(out, "{}", e.render())?;
                    Ok(EXIT_OK)
                }
                _ => {
                    write!(err, "{}", e.render())?;
                    Ok(EXIT_USAGE)
                }
            };
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(usage)?;
    let pool = match cli.threads {
        Some(0) => return Err(usage("--threads must be at least 1")),
        Some(n) => Pool(Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| usage(format!("cannot start {n} threads: {e}")))?,
        )),
        None => Pool(None),
    };
    let default_format = match cli.command {
        Command::Verify(_) => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    let cfg = RunConfig {
        seed: cli.seed,
        output_format: cli.format.unwrap_or(default_format),
        units: cli.units,
    };
    match &cli.command {
        Command::Plan(a) => cmd_plan(a, &cfg, out),
        Command::Partition(a) => cmd_partition(a, &cfg, out),
        Command::Locate(a) => cmd_locate(a, &cfg, stdin, out),
        Command::Verify(a) => cmd_verify(a, &cfg, &pool, out),
        Command::Sir(a) => cmd_sir(a, &cfg, &pool, out),
        Command::Energy(a) => cmd_energy(a, &cfg, out),
        Command::Kcov(a) => cmd_kcov(a, &cfg, &pool, out),
        Command::Route(a) => cmd_route(a, &cfg, out, err),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(data)?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn build_placement(a: &PlanArgs) -> CliResult<Placement> {
    let params = BackboneParams::new(a.r_bb, a.r_bs).map_err(usage)?;
    let region = Region::cube(a.center, a.side).map_err(usage)?;
    let grow = |r: f64| {
        if a.no_inflate {
            region
        } else {
            region.inflate(r)
        }
    };
    match a.model {
        ModelChoice::Strip => {
            let pl = placement::generate_strip_placement(params, &grow(a.r_bs), a.reference);
            if a.no_aux {
                return Ok(pl);
            }
            let aux = placement::strip_auxiliary_nodes(&pl, a.r_bb).map_err(usage)?;
            Ok(pl.with_auxiliary(aux))
        }
        ModelChoice::Auto => {
            let cell = placement::select_best_cell(params).map_err(usage)?;
            Ok(placement::generate_cell_lattice(
                cell,
                &grow(cell.radius),
                a.reference,
            ))
        }
        ModelChoice::Shape(shape) => {
            let cell = placement::adjusted_radius(shape, params).map_err(usage)?;
            Ok(placement::generate_cell_lattice(
                cell,
                &grow(cell.radius),
                a.reference,
            ))
        }
    }
}

fn cmd_plan(a: &PlanArgs, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let pl = build_placement(a)?;
    match cfg.output_format {
        OutputFormat::Csv => pl.write_csv(&mut *out)?,
        OutputFormat::Json => write_json(out, &to_value(&pl))?,
    }
    Ok(EXIT_OK)
}

fn cmd_partition(a: &PartitionArgs, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    if !(a.r_t > 0.0) {
        return Err(usage(format!("--r-t must be positive, got {}", a.r_t)));
    }
    let rows = partition::partition_table();
    match cfg.output_format {
        OutputFormat::Csv => {
            writeln!(
                out,
                "shape,max_cell_radius,min_sensing_range,active_node_ratio,lifetime_ratio"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.shape,
                    format::length(r.max_cell_radius * a.r_t),
                    format::length(r.min_sensing_range * a.r_t),
                    format::length(r.active_node_ratio),
                    format::length(r.lifetime_ratio)
                )?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "shape": r.shape.name(),
                        "max_cell_radius": r.max_cell_radius * a.r_t,
                        "min_sensing_range": r.min_sensing_range * a.r_t,
                        "active_node_ratio": r.active_node_ratio,
                        "lifetime_ratio": r.lifetime_ratio,
                    })
                })
                .collect();
            write_json(out, &json!(rows))?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `x y z` lines; commas also separate. Blank lines and `#`
/// comments are skipped.
pub fn parse_points(text: &str) -> CliResult<Vec<Point3>> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| data(format!("line {}: expected three numbers: {line:?}", i + 1)))?;
        match nums[..] {
            [x, y, z] if nums.iter().all(|v| v.is_finite()) => pts.push(Point3::new(x, y, z)),
            _ => {
                return Err(data(format!(
                    "line {}: expected three finite numbers: {line:?}",
                    i + 1
                )))
            }
        }
    }
    Ok(pts)
}

fn cmd_locate(
    a: &LocateArgs,
    cfg: &RunConfig,
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let frame = PartitionFrame::new(a.sink, a.r_t).map_err(usage)?;
    let text = match &a.input {
        Some(p) => read_file(p)?,
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(data)?;
            s
        }
    };
    let ids: Vec<CellId> = parse_points(&text)?
        .iter()
        .map(|p| partition::locate_cell(p, &frame))
        .collect();
    match cfg.output_format {
        OutputFormat::Csv => {
            for id in &ids {
                writeln!(out, "{},{},{}", id.u, id.v, id.w)?;
            }
        }
        OutputFormat::Json => write_json(out, &to_value(&ids))?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, cfg: &RunConfig, pool: &Pool, out: &mut dyn Write) -> CliResult<i32> {
    let pl = build_placement(&a.plan)?;
    let region = Region::cube(a.plan.center, a.plan.side).map_err(usage)?;
    let step = a.grid_step.unwrap_or(a.plan.r_bs / 20.0);
    let report = pool
        .run(|| verify::verify_coverage(&pl, a.plan.r_bs, &region, step))
        .map_err(usage)?;
    match cfg.output_format {
        OutputFormat::Json => writeln!(out, "{}", report.to_json())?,
        OutputFormat::Csv => {
            writeln!(
                out,
                "samples_total,samples_covered,worst_gap,coverage_fraction"
            )?;
            writeln!(
                out,
                "{},{},{},{}",
                report.samples_total,
                report.samples_covered,
                format::length(report.worst_gap),
                format::probability(report.coverage_fraction)
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn sweep(a: &SirArgs) -> CliResult<Vec<f64>> {
    if !a.radius.is_empty() {
        return Ok(a.radius.clone());
    }
    if !(a.r_min > 0.0 && a.r_max >= a.r_min) || a.steps == 0 {
        return Err(usage(
            "radius sweep needs 0 < r-min <= r-max and steps >= 1",
        ));
    }
    if a.steps == 1 {
        return Ok(vec![a.r_min]);
    }
    let n = a.steps - 1;
    Ok((0..=n)
        .map(|i| a.r_min + (a.r_max - a.r_min) * i as f64 / n as f64)
        .collect())
}

fn cmd_sir(a: &SirArgs, cfg: &RunConfig, pool: &Pool, out: &mut dyn Write) -> CliResult<i32> {
    let mut params = AcousticParams::new(a.f_min, a.bandwidth, a.spreading).map_err(usage)?;
    if a.no_absorption {
        params = params.with_absorption(Absorption::Disabled);
    }
    let radii = sweep(a)?;
    let units = cfg.units;
    let rows: Vec<(f64, u64, f64)> = pool
        .run(|| {
            use rayon::prelude::*;
            a.n.iter()
                .flat_map(|&n| radii.iter().map(move |&r| (r, n)))
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|(r, n)| {
                    acoustic::acoustic_sir(units.to_km(r), n, a.shape, &params)
                        .map(|s| (r, n, acoustic::to_db(s)))
                })
                .collect::<tessnet_core::Result<Vec<_>>>()
        })
        .map_err(usage)?;
    match cfg.output_format {
        OutputFormat::Csv => {
            writeln!(out, "R,N,sir_db")?;
            for (r, n, db) in rows {
                writeln!(out, "{},{n},{}", format::length(r), format::length(db))?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|&(r, n, db)| json!({"R": r, "N": n, "sir_db": db}))
                .collect();
            write_json(out, &json!(rows))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_energy(a: &EnergyArgs, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let table = energy::energy_table(a.power_exponent).map_err(usage)?;
    match cfg.output_format {
        OutputFormat::Csv => {
            writeln!(out, "model,per_packet_ratio,network_ratio")?;
            for r in &table {
                writeln!(
                    out,
                    "{},{},{}",
                    r.model,
                    format::length(r.per_packet_ratio),
                    format::length(r.network_ratio)
                )?;
            }
        }
        OutputFormat::Json => write_json(out, &to_value(&table))?,
    }
    Ok(EXIT_OK)
}

fn cmd_kcov(a: &KcovArgs, cfg: &RunConfig, pool: &Pool, out: &mut dyn Write) -> CliResult<i32> {
    let dim = Dimension::try_from(a.dim).map_err(usage)?;
    let rows = kcoverage::kcoverage_table(dim, a.k_max).map_err(usage)?;
    let estimates = match a.samples {
        Some(samples) => Some(
            rows.iter()
                .map(|r| {
                    let mc = MonteCarloConfig::gaf(dim, r.k, samples, cfg.seed).map_err(usage)?;
                    pool.run(|| kcoverage::monte_carlo_k_coverage(&mc))
                        .map_err(usage)
                })
                .collect::<CliResult<Vec<_>>>()?,
        ),
        None => None,
    };
    match cfg.output_format {
        OutputFormat::Csv => {
            write!(out, "k,lambda,p_geq_k,overhead")?;
            if estimates.is_some() {
                write!(out, ",mc_p_geq_k,mc_std_error")?;
            }
            writeln!(out)?;
            for (i, r) in rows.iter().enumerate() {
                write!(
                    out,
                    "{},{:.8},{},{:?}",
                    r.k,
                    r.lambda_k,
                    format::probability(r.p_geq_k),
                    r.overhead
                )?;
                if let Some(est) = &estimates {
                    write!(
                        out,
                        ",{},{}",
                        format::probability(est[i].probability),
                        format::sig(est[i].std_error, 3)
                    )?;
                }
                writeln!(out)?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut v = to_value(r);
                    if let Some(est) = &estimates {
                        v["monte_carlo"] = to_value(&est[i]);
                    }
                    v
                })
                .collect();
            write_json(out, &json!(rows))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_route(
    a: &RouteArgs,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<i32> {
    let mut field = Field::from_csv(&read_file(&a.field)?).map_err(data)?;
    let policy = match a.policy {
        RoutePolicy::UniformRandom(_) => RoutePolicy::UniformRandom(cfg.seed),
        p => p,
    };
    let max_hops = a
        .max_hops
        .unwrap_or_else(|| routing::default_max_hops(a.src, a.dest));
    let result = routing::route(a.src, a.dest, &mut field, policy, max_hops).map_err(usage)?;
    match cfg.output_format {
        OutputFormat::Csv => {
            writeln!(out, "hop,u,v,w")?;
            for (i, id) in result.path.iter().enumerate() {
                writeln!(out, "{i},{},{},{}", id.u, id.v, id.w)?;
            }
        }
        OutputFormat::Json => write_json(out, &to_value(&result))?,
    }
    match result.outcome {
        RouteOutcome::Delivered => Ok(EXIT_OK),
        RouteOutcome::DeadEnd { at, reason } => {
            let why = match reason {
                DeadEndReason::NoImprovingNeighbor => {
                    "no alive neighbor closer to the destination".to_string()
                }
                DeadEndReason::HopLimit => format!("hop limit {max_hops} reached"),
            };
            writeln!(
                err,
                "tessnet: dead end at {at} after {} hops: {why}",
                result.hops
            )?;
            Ok(EXIT_DEAD_END)
        }
    }
}
