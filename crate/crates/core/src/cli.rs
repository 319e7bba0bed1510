//! Command-line runner: `geoagg <subcommand> --config <path> --out <dir>`.
//!
//! Config files hold `key = value` lines; `#` starts a comment. Lengths are
//! meters and angles radians; a `_km` or `_deg` suffix converts at parse
//! time. Exit codes: 0 all checks pass, 1 invariant or runtime violation,
//! 2 config error.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    interior_owners, optimize_scale_factor, run_scaling_experiment, run_stretch_experiment,
    scale_total, scaling_summary, square_lattice_factory, stretch_summary, write_scaling_csv, write_scaling_owner_csv,
    write_stretch_csv, ExperimentConfig, DEFAULT_FATNESS_SAMPLES,
};
use crate::cover::{build_multilevel_cover, orders_to_reach};
use crate::error::Error;
use crate::format::fmt12;
use crate::geometry::{alpha_from_sigma, Point};
use crate::routing::{path_stretch, RoutingParams, Router};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Largest tolerated max/min ratio of per-order counts over interior orders.
pub const MAX_FLATNESS: f64 = 2.0;
/// Minimum coefficient of determination for the logarithmic fit.
pub const MIN_R_SQUARED: f64 = 0.95;
/// Largest fatness a square-lattice level may have.
pub const LATTICE_MAX_FATNESS: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "geoagg", version, about = "Geo-aggregated routing simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Per-level aggregate counts and measured fatness.
    CoverStats(RunArgs),
    /// Route one source/destination pair and print its stretch.
    Route(RunArgs),
    /// Stretch compliance over seeded random pairs.
    StretchExp(RunArgs),
    /// Routing-table size against world radius.
    TableExp(RunArgs),
    /// Scale factor minimizing the per-router entry bound.
    OptimizeS(RunArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Summary,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Summary
    }

    fn summary(self) -> bool {
        self != Format::Csv
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Violation(_) => EXIT_VIOLATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Violation(m) => write!(f, "violation: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Violation(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Violation(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Violation(format!("json: {e}"))
    }
}

/// Library errors raised by bad inputs are config errors; the rest are
/// runtime violations.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::RoutingHole { .. } | Error::StepLimitExceeded(_) => CliError::Violation(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

const KNOWN_KEYS: &[&str] = &[
    "r0",
    "s",
    "sigma",
    "alpha",
    "world_radius",
    "world_radii",
    "delta",
    "trials",
    "seed",
    "source_x",
    "source_y",
    "dest_x",
    "dest_y",
    "epsilon_delta",
    "fatness_samples",
    "pair_min_distance",
    "pair_max_distance",
    "max_steps",
    "k",
];

const LENGTH_KEYS: &[&str] = &[
    "r0",
    "world_radius",
    "world_radii",
    "delta",
    "source_x",
    "source_y",
    "dest_x",
    "dest_y",
    "pair_min_distance",
    "pair_max_distance",
];

/// Parsed `key = value` file with unit suffixes already folded in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    numbers: BTreeMap<String, Vec<f64>>,
    raw: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut kv = KeyValues::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let (base, factor) = if let Some(b) = key.strip_suffix("_km") {
                if !LENGTH_KEYS.contains(&b) {
                    return Err(CliError::Config(format!("line {}: `{key}` is not a length", n + 1)));
                }
                (b.to_string(), 1000.0)
            } else if key == "alpha_deg" {
                ("alpha".to_string(), std::f64::consts::PI / 180.0)
            } else {
                (key.to_string(), 1.0)
            };
            if !KNOWN_KEYS.contains(&base.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if kv.raw.contains_key(&base) {
                return Err(CliError::Config(format!("line {}: `{key}` given more than once", n + 1)));
            }
            let values = value
                .split(',')
                .map(|v| {
                    let v = v.trim();
                    v.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .map(|x| x * factor)
                        .ok_or_else(|| CliError::Config(format!("line {}: `{v}` is not a finite number", n + 1)))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            kv.raw.insert(base.clone(), value.to_string());
            kv.numbers.insert(base, values);
        }
        Ok(kv)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.numbers.contains_key(key)
    }

    pub fn get(&self, key: &str) -> CliResult<Option<f64>> {
        match self.numbers.get(key).map(Vec::as_slice) {
            None => Ok(None),
            Some([x]) => Ok(Some(*x)),
            Some(_) => Err(CliError::Config(format!("`{key}` takes a single value"))),
        }
    }

    pub fn require(&self, key: &str) -> CliResult<f64> {
        self.get(key)?.ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn positive(&self, key: &str) -> CliResult<f64> {
        let x = self.require(key)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(CliError::Config(format!("`{key}` must be positive, got {x}")))
        }
    }

    fn count(&self, key: &str) -> CliResult<Option<usize>> {
        match self.get(key)? {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(Some(x as usize)),
            Some(x) => Err(CliError::Config(format!("`{key}` must be a non-negative integer, got {x}"))),
        }
    }

    /// The seed is mandatory and parsed as an exact integer.
    pub fn seed(&self) -> CliResult<u64> {
        let raw = self
            .raw
            .get("seed")
            .ok_or_else(|| CliError::Config("missing required key `seed`".into()))?;
        raw.parse::<u64>()
            .map_err(|_| CliError::Config(format!("`seed` must be a non-negative integer, got `{raw}`")))
    }

    /// `sigma`, or `alpha`/`alpha_deg` converted back to `1/cos α`.
    pub fn sigma(&self) -> CliResult<f64> {
        match (self.get("sigma")?, self.get("alpha")?) {
            (Some(_), Some(_)) => Err(CliError::Config("give either `sigma` or `alpha_deg`, not both".into())),
            (Some(s), None) if s > 1.0 => Ok(s),
            (Some(s), None) => Err(CliError::Config(format!("`sigma` must exceed 1, got {s}"))),
            (None, Some(a)) if a > 0.0 && a < std::f64::consts::FRAC_PI_2 => Ok(1.0 / a.cos()),
            (None, Some(a)) => Err(CliError::Config(format!("alpha must lie in (0, 90) degrees, got {} rad", a))),
            (None, None) => Err(CliError::Config("missing `sigma` or `alpha_deg`".into())),
        }
    }

    pub fn world_radii(&self) -> CliResult<Vec<f64>> {
        let radii = match (self.numbers.get("world_radius"), self.numbers.get("world_radii")) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either `world_radius` or `world_radii`, not both".into()))
            }
            (Some(r), None) if r.len() == 1 => r.clone(),
            (Some(_), None) => return Err(CliError::Config("`world_radius` takes a single value".into())),
            (None, Some(r)) => r.clone(),
            (None, None) => return Err(CliError::Config("missing required key `world_radius`".into())),
        };
        if radii.iter().any(|&r| !(r > 0.0)) {
            return Err(CliError::Config("world radii must be positive".into()));
        }
        Ok(radii)
    }

    pub fn world_radius(&self) -> CliResult<f64> {
        match self.world_radii()?.as_slice() {
            [r] => Ok(*r),
            _ => Err(CliError::Config("this subcommand takes a single `world_radius`".into())),
        }
    }

    fn experiment(&self, delta: f64) -> CliResult<ExperimentConfig<f64>> {
        let mut c = ExperimentConfig::new(
            self.positive("r0")?,
            self.require("s")?,
            self.sigma()?,
            self.world_radii()?,
            self.count("trials")?.ok_or_else(|| CliError::Config("missing required key `trials`".into()))?,
            delta,
            self.seed()?,
        );
        c.epsilon_delta = self.get("epsilon_delta")?;
        if c.epsilon_delta.is_some_and(|e| e <= -1.0) {
            return Err(CliError::Config("`epsilon_delta` must exceed -1".into()));
        }
        c.fatness_samples = self.count("fatness_samples")?.unwrap_or(DEFAULT_FATNESS_SAMPLES);
        c.pair_min_distance = self.get("pair_min_distance")?;
        c.pair_max_distance = self.get("pair_max_distance")?;
        c.validate()?;
        Ok(c)
    }
}

pub fn load_config(path: &Path) -> CliResult<KeyValues> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    KeyValues::parse(&text)
}

fn create(out: &Path, name: &str) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_json(out: &Path, name: &str, value: &serde_json::Value) -> CliResult<()> {
    let mut w = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cover_stats(kv: &KeyValues, args: &RunArgs) -> CliResult<()> {
    let r_0 = kv.positive("r0")?;
    let s = kv.require("s")?;
    let world = kv.world_radius()?;
    let seed = kv.seed()?;
    let samples = kv.count("fatness_samples")?.unwrap_or(DEFAULT_FATNESS_SAMPLES);
    let cover = build_multilevel_cover(r_0, s, world)?;

    let fatness: Vec<usize> = cover
        .levels()
        .iter()
        .map(|l| crate::cover::measure_fatness(l, samples, seed.wrapping_add(l.order() as u64)))
        .collect();
    if args.format.csv() {
        let mut w = csv::Writer::from_writer(create(&args.out, "cover_stats.csv")?);
        w.write_record(["order", "radius", "aggregates", "k_measured"])?;
        for (level, k) in cover.levels().iter().zip(&fatness) {
            w.write_record([level.order().to_string(), fmt12(level.radius()), level.len().to_string(), k.to_string()])?;
        }
        w.flush()?;
    }
    let k_max = fatness.iter().copied().max().unwrap_or(0);
    let pass = k_max <= LATTICE_MAX_FATNESS;
    if args.format.summary() {
        let summary = json!({
            "experiment": "cover_stats",
            "r_0": r_0,
            "s": s,
            "world_radius": world,
            "seed": seed,
            "top_order": cover.top_order(),
            "levels": cover.levels().len(),
            "aggregates": cover.levels().iter().map(|l| l.len()).collect::<Vec<_>>(),
            "k_measured": fatness,
            "pass": { "fatness": pass },
        });
        write_json(&args.out, "cover_stats_summary.json", &summary)?;
    }
    println!("levels {} top_order {} k_max {}", cover.levels().len(), cover.top_order(), k_max);
    if !pass {
        let (order, k) = fatness.iter().enumerate().max_by_key(|(_, &k)| k).expect("non-empty");
        return Err(CliError::Violation(format!("level {order} has fatness {k} > {LATTICE_MAX_FATNESS}")));
    }
    Ok(())
}

fn route(kv: &KeyValues, args: &RunArgs) -> CliResult<()> {
    let r_0 = kv.positive("r0")?;
    let s = kv.require("s")?;
    let world = kv.world_radius()?;
    let sigma = kv.sigma()?;
    let delta = kv.positive("delta")?;
    let seed = kv.seed()?;
    let source = Point::new(kv.require("source_x")?, kv.require("source_y")?);
    let dest = Point::new(kv.require("dest_x")?, kv.require("dest_y")?);
    if source == dest {
        return Err(CliError::Config("source and destination coincide".into()));
    }
    let mut params = RoutingParams::new(sigma, r_0, delta)?;
    if let Some(m) = kv.count("max_steps")? {
        params = params.with_max_steps(m);
    }
    let cover = build_multilevel_cover(r_0, s, world)?;
    let router = Router::new(&cover, params)?;
    let path = router.route(source, dest)?;
    let stretch = path_stretch(&path);
    let tolerance = params.stretch_tolerance();

    if args.format.csv() {
        let mut w = create(&args.out, "path.txt")?;
        path.write_text(&mut w)?;
        w.flush()?;
    }
    if args.format.summary() {
        let summary = json!({
            "experiment": "route",
            "seed": seed,
            "sigma": sigma,
            "alpha": alpha_from_sigma(sigma)?.radians(),
            "straight": fmt12(path.length() / stretch),
            "length": fmt12(path.length()),
            "stretch": fmt12(stretch),
            "steps": path.steps.len(),
            "tolerance": fmt12(tolerance),
            "pass": { "stretch": stretch <= tolerance },
        });
        write_json(&args.out, "route_summary.json", &summary)?;
    }
    println!("{stretch:.6}");
    if stretch > tolerance {
        return Err(CliError::Violation(format!("stretch {stretch} exceeds {tolerance}")));
    }
    Ok(())
}

fn stretch_exp(kv: &KeyValues, args: &RunArgs) -> CliResult<()> {
    let config = kv.experiment(kv.positive("delta")?)?;
    let report = run_stretch_experiment(&config)?;
    if args.format.csv() {
        write_stretch_csv(&report, create(&args.out, "stretch.csv")?)?;
    }
    if args.format.summary() {
        write_json(&args.out, "stretch_summary.json", &stretch_summary(&config, &report))?;
    }
    println!(
        "trials {} max_stretch {} violations {}",
        report.records.len(),
        fmt12(report.max_stretch),
        report.violation_count
    );
    match report.first_failure() {
        None => Ok(()),
        Some(r) => Err(CliError::Violation(format!(
            "{} of {} trials failed; first is trial {} from ({}, {}) to ({}, {}): stretch {} vs tolerance {}, \
             {} progress and {} deviation violations, termination {}",
            report.records.iter().filter(|t| !t.passed).count(),
            report.records.len(),
            r.index,
            fmt12(r.source.x),
            fmt12(r.source.y),
            fmt12(r.destination.x),
            fmt12(r.destination.y),
            fmt12(r.stretch),
            fmt12(report.tolerance),
            r.progress_violations,
            r.deviation_violations,
            if r.termination_ok { "ok" } else { "late" },
        ))),
    }
}

fn table_exp(kv: &KeyValues, args: &RunArgs) -> CliResult<()> {
    let r_0 = kv.positive("r0")?;
    let delta = kv.get("delta")?.unwrap_or(r_0 / 50.0);
    let config = kv.experiment(delta)?;
    let (first, last) = (config.world_radii[0], config.world_radii[config.world_radii.len() - 1]);
    if config.world_radii.len() < 2 || last / first < 100.0 {
        return Err(CliError::Config("`world_radii` must span at least two decades".into()));
    }
    let report = run_scaling_experiment(&config, square_lattice_factory(config.r_0, config.s), interior_owners)?;
    if args.format.csv() {
        write_scaling_csv(&report, create(&args.out, "table.csv")?)?;
        write_scaling_owner_csv(&report, create(&args.out, "table_owners.csv")?)?;
    }
    let fit_ok = report.fit.r_squared >= MIN_R_SQUARED;
    let flat_ok = report.flatness.is_none_or(|f| f <= MAX_FLATNESS);
    if args.format.summary() {
        let mut summary = scaling_summary(&config, &report, MAX_FLATNESS);
        summary["pass"]["fit"] = json!(fit_ok);
        write_json(&args.out, "table_summary.json", &summary)?;
    }
    println!(
        "slope {} intercept {} r_squared {}",
        fmt12(report.fit.slope),
        fmt12(report.fit.intercept),
        fmt12(report.fit.r_squared)
    );
    if let Some(v) = report.violations.first() {
        return Err(CliError::Violation(format!(
            "{} per-order counts exceed the bound; first: R {} owner {} order {} has {} > {}",
            report.violations.len(),
            fmt12(v.world_radius),
            v.owner_index,
            v.order,
            v.count,
            fmt12(v.bound)
        )));
    }
    if !fit_ok {
        return Err(CliError::Violation(format!(
            "log fit r_squared {} < {MIN_R_SQUARED}",
            fmt12(report.fit.r_squared)
        )));
    }
    if !flat_ok {
        return Err(CliError::Violation(format!(
            "per-order flatness {} > {MAX_FLATNESS}",
            fmt12(report.flatness.unwrap_or(f64::NAN))
        )));
    }
    Ok(())
}

fn optimize_s(kv: &KeyValues, args: &RunArgs) -> CliResult<()> {
    let r_0 = kv.positive("r0")?;
    let world = kv.world_radius()?;
    let sigma = kv.sigma()?;
    let seed = kv.seed()?;
    let k = kv.count("k")?.unwrap_or(LATTICE_MAX_FATNESS);
    let opt = optimize_scale_factor(world, r_0, sigma, k)?;
    let alpha = alpha_from_sigma(sigma)?.radians();
    let ratio = world / r_0;

    if args.format.csv() {
        // the plateau left ends the search is built on
        let mut w = csv::Writer::from_writer(create(&args.out, "optimize_s.csv")?);
        w.write_record(["orders", "s", "total"])?;
        let mut n = orders_to_reach(ratio, crate::analysis::MAX_SCALE);
        loop {
            let s = ratio.powf(1.0 / n as f64);
            if s <= 1.0 {
                break;
            }
            let total = scale_total(s, ratio, alpha, k)?;
            w.write_record([orders_to_reach(ratio, s).to_string(), fmt12(s), fmt12(total)])?;
            if n >= opt.orders + 8 {
                break;
            }
            n += 1;
        }
        w.flush()?;
    }
    let step = 1e-3;
    let neighbors = [opt.s_star - step, opt.s_star + step]
        .into_iter()
        .filter(|&s| s > 1.0 && s <= crate::analysis::MAX_SCALE)
        .map(|s| scale_total(s, ratio, alpha, k))
        .collect::<crate::error::Result<Vec<f64>>>()?;
    let local_ok = neighbors.iter().all(|&t| t >= opt.predicted_total);
    if args.format.summary() {
        let summary = json!({
            "experiment": "optimize_s",
            "seed": seed,
            "r_0": r_0,
            "world_radius": world,
            "sigma": sigma,
            "k": k,
            "s_star": fmt12(opt.s_star).parse::<f64>().unwrap_or(opt.s_star),
            "predicted_total": fmt12(opt.predicted_total).parse::<f64>().unwrap_or(opt.predicted_total),
            "orders": opt.orders,
            "pass": { "local_optimality": local_ok },
        });
        write_json(&args.out, "optimize_s_summary.json", &summary)?;
    }
    println!("s_star {} total {} orders {}", fmt12(opt.s_star), fmt12(opt.predicted_total), opt.orders);
    if !local_ok {
        return Err(CliError::Violation("a neighbor of s_star has a smaller total".into()));
    }
    Ok(())
}

/// Runs one parsed invocation.
pub fn execute(command: &Command) -> CliResult<()> {
    let (Command::CoverStats(args)
    | Command::Route(args)
    | Command::StretchExp(args)
    | Command::TableExp(args)
    | Command::OptimizeS(args)) = command;
    let kv = load_config(&args.config)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::Config(format!("{}: {e}", args.out.display())))?;
    match command {
        Command::CoverStats(_) => cover_stats(&kv, args),
        Command::Route(_) => route(&kv, args),
        Command::StretchExp(_) => stretch_exp(&kv, args),
        Command::TableExp(_) => table_exp(&kv, args),
        Command::OptimizeS(_) => optimize_s(&kv, args),
    }
}

/// Parses `argv`, runs and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
