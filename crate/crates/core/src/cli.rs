//! Command-line front end: configuration parsing, command dispatch and
//! CSV/JSON emission.
//!
//! Every CSV starts with a `#` comment line carrying the SHA-256 of the
//! configuration (or of the canonical argument string for commands without
//! one), followed by a header row. Numbers use 15 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::analytic::{critical_point, find_xc, solve_eps_u, UniversalSolver};
use crate::green::{free_green, full_green};
use crate::model::{validate_centers, CenterConfig};
use crate::spectral::{solve_spectrum, SolverOptions};
use crate::states::{assemble_wavefunction, current_density, eigen_residual, normalize_state};
use crate::verify::{self, VerifyOptions};
use crate::Error;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_POLE: u8 = 4;

/// Grid points closer than this to a center or source are skipped.
pub const POINT_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub units: String,
    pub centers: Vec<CenterConfig>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Default output path when `--out` is absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Strict parse of a JSON run configuration.
pub fn parse_config(text: &str) -> crate::Result<RunConfig> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
    if cfg.units != "natural" {
        return Err(Error::Config(format!(
            "config: units must be \"natural\", got {:?}",
            cfg.units
        )));
    }
    validate_centers(&cfg.centers)?;
    cfg.solver.validate()?;
    Ok(cfg)
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `%.15g`-style formatting: 15 significant digits, trailing zeros dropped,
/// exponent form outside `[1e-5, 1e15)`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.14e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let fixed = format!("{:.*}", (14 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// `A:B:STEP`, inclusive of `B` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl YRange {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for YRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_list(s, ':', 3)?;
        let r = YRange {
            start: v[0],
            stop: v[1],
            step: v[2],
        };
        if !(r.step > 0.0 && r.stop >= r.start) {
            return Err("y-range needs STEP > 0 and B >= A".into());
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub Vector3<f64>);

impl FromStr for Point {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_list(s, ',', 3)?;
        Ok(Point(Vector3::new(v[0], v[1], v[2])))
    }
}

/// `NX,NY,NZ,EXTENT`: a cube `[-EXTENT, EXTENT]^3` with `N` points per axis;
/// an axis with one point sits at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub counts: [usize; 3],
    pub extent: f64,
}

impl GridSpec {
    fn axis(n: usize, extent: f64) -> Vec<f64> {
        if n == 1 {
            return vec![0.0];
        }
        (0..n)
            .map(|i| -extent + 2.0 * extent * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn points(&self) -> Vec<Vector3<f64>> {
        let [nx, ny, nz] = self.counts;
        let (xs, ys, zs) = (
            Self::axis(nx, self.extent),
            Self::axis(ny, self.extent),
            Self::axis(nz, self.extent),
        );
        let mut out = Vec::with_capacity(nx * ny * nz);
        for x in &xs {
            for y in &ys {
                for z in &zs {
                    out.push(Vector3::new(*x, *y, *z));
                }
            }
        }
        out
    }
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_list(s, ',', 4)?;
        let mut counts = [0usize; 3];
        for (c, x) in counts.iter_mut().zip(&v) {
            if !(*x >= 1.0 && x.fract() == 0.0) {
                return Err(format!("grid count {x} is not a positive integer"));
            }
            *c = *x as usize;
        }
        if !(v[3] > 0.0) {
            return Err("grid extent must be positive".into());
        }
        Ok(GridSpec {
            counts,
            extent: v[3],
        })
    }
}

fn parse_list(s: &str, sep: char, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(sep)
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(format!("expected {n} finite numbers separated by '{sep}'"));
    }
    Ok(v)
}

#[derive(Debug, Parser)]
#[command(name = "zrp", version, about = "Relativistic zero-range potential solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound states of a configuration.
    Spectrum(SpectrumArgs),
    /// Two-center universal functions over a range of y.
    Twocenter(TwoCenterArgs),
    /// Critical point y_c(x), or the separation x_c with y_c = 1.
    Critical(CriticalArgs),
    /// A bound state and its current on a grid.
    Wavefunction(WavefunctionArgs),
    /// Green's function samples on a grid; free particle without --config.
    Green(GreenArgs),
    /// Identity and oracle checks with pass/fail.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TwoCenterArgs {
    #[arg(long)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y_range: YRange,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["x", "find_xc"])))]
pub struct CriticalArgs {
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub find_xc: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct WavefunctionArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub state: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: GridSpec,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub energy: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub source: Point,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: GridSpec,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Perturb the first state's coefficients; the suite must fail.
    #[arg(long)]
    pub corrupt: bool,
    #[command(flatten)]
    pub output: Output,
}

/// Raised when the verification suite finds a failing check.
#[derive(Debug, thiserror::Error)]
#[error("verification failed: {0}")]
pub struct VerificationFailed(pub String);

/// Raised for malformed inputs detected outside the library.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return EXIT_NUMERICAL;
    }
    if err.downcast_ref::<UsageError>().is_some() || err.downcast_ref::<io::Error>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Pole { .. }) => EXIT_POLE,
        Some(
            Error::Config(_)
            | Error::Domain { .. }
            | Error::CoincidentCenters { .. }
            | Error::NoCenters
            | Error::NonHermitian { .. }
            | Error::BadGrid,
        ) => EXIT_CONFIG,
        Some(_) => EXIT_NUMERICAL,
        None => EXIT_CONFIG,
    }
}

struct Loaded {
    config: RunConfig,
    hash: String,
}

fn load(path: &Path) -> anyhow::Result<Loaded> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let config = parse_config(&text).with_context(|| path.display().to_string())?;
    Ok(Loaded {
        config,
        hash: config_hash(text.as_bytes()),
    })
}

fn sink(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| UsageError(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

/// CSV writer preceded by the hash comment and any extra comment lines.
fn csv_out(
    out: Option<&Path>,
    hash: &str,
    comments: &[String],
    header: &[String],
) -> anyhow::Result<csv::Writer<Box<dyn Write>>> {
    let mut w = sink(out)?;
    writeln!(w, "# config_sha256={hash}")?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    Ok(csv)
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn out_path<'a>(flag: &'a Option<PathBuf>, cfg: Option<&'a RunConfig>) -> Option<&'a Path> {
    flag.as_deref()
        .or_else(|| cfg.and_then(|c| c.output.as_deref()))
}

fn cmd_spectrum(args: &SpectrumArgs) -> anyhow::Result<()> {
    let Loaded { config, hash } = load(&args.config)?;
    let spec = solve_spectrum(&config.centers, &config.solver)?;
    let comments: Vec<String> = spec
        .threshold_candidates
        .iter()
        .map(|t| {
            format!(
                "threshold_candidate branch={} energy={} lambda={}",
                t.branch,
                fmt_num(t.energy),
                fmt_num(t.lambda)
            )
        })
        .collect();
    let header = strings(&["state_index", "branch", "E", "k", "eps", "signature", "residual"]);
    let mut w = csv_out(out_path(&args.output.out, Some(&config)), &hash, &comments, &header)?;
    for (i, s) in spec.states.into_iter().enumerate() {
        let s = normalize_state(&config.centers, s)?;
        let res = eigen_residual(&config.centers, s.energy, &s.coefficients)?;
        w.write_record([
            i.to_string(),
            s.branch.to_string(),
            fmt_num(s.energy),
            fmt_num(s.kin.k),
            fmt_num(s.kin.eps),
            s.signature.to_string(),
            fmt_num(res),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_twocenter(args: &TwoCenterArgs) -> anyhow::Result<()> {
    let r = args.y_range;
    let hash = config_hash(
        format!("twocenter x={} y={}:{}:{}", args.x, r.start, r.stop, r.step).as_bytes(),
    );
    let solver = UniversalSolver::new(args.x)?;
    let header = strings(&["y", "eps_g_minus", "eps_g_plus", "eps_u"]);
    let comments = vec![format!(
        "x={} y_c={} eps_gc={}",
        fmt_num(args.x),
        fmt_num(solver.critical.y_c),
        fmt_num(solver.critical.eps_gc.eps)
    )];
    let mut w = csv_out(args.output.out.as_deref(), &hash, &comments, &header)?;
    for y in r.values() {
        let g = solver.gerade(y)?;
        let u = solve_eps_u(args.x, y)?;
        w.write_record([
            fmt_num(y),
            fmt_opt(g.g_minus.map(|p| p.eps)),
            fmt_opt(g.g_plus.map(|p| p.eps)),
            fmt_opt(u.map(|p| p.eps)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_critical(args: &CriticalArgs) -> anyhow::Result<()> {
    let out = args.output.out.as_deref();
    if args.find_xc {
        let c = find_xc()?;
        let hash = config_hash(b"critical find_xc");
        let mut w = csv_out(out, &hash, &[], &strings(&["x_c", "eps_gc"]))?;
        w.write_record([fmt_num(c.x), fmt_num(c.eps_gc.eps)])?;
        w.flush()?;
    } else {
        let x = args.x.expect("clap enforces the group");
        let c = critical_point(x)?;
        let hash = config_hash(format!("critical x={x}").as_bytes());
        let mut w = csv_out(out, &hash, &[], &strings(&["x", "y_c", "eps_gc"]))?;
        w.write_record([fmt_num(x), fmt_num(c.y_c), fmt_num(c.eps_gc.eps)])?;
        w.flush()?;
    }
    Ok(())
}

fn near_any(r: &Vector3<f64>, points: &[Vector3<f64>]) -> bool {
    points.iter().any(|p| (r - p).norm() < POINT_GUARD)
}

fn cmd_wavefunction(args: &WavefunctionArgs) -> anyhow::Result<()> {
    let Loaded { config, hash } = load(&args.config)?;
    let states = solve_spectrum(&config.centers, &config.solver)?.states;
    let n = states.len();
    let state = states.into_iter().nth(args.state).ok_or_else(|| {
        UsageError(format!("state index {} out of range ({n} states)", args.state))
    })?;
    let state = normalize_state(&config.centers, state)?;
    let centers: Vec<Vector3<f64>> = config.centers.iter().map(|c| c.pos()).collect();
    let mut header = strings(&["x", "y", "z"]);
    for i in 1..=4 {
        header.push(format!("psi{i}_re"));
        header.push(format!("psi{i}_im"));
    }
    header.extend(strings(&["density", "j_x", "j_y", "j_z"]));
    let comments = vec![format!(
        "state={} E={} signature={}",
        args.state,
        fmt_num(state.energy),
        state.signature
    )];
    let mut w = csv_out(out_path(&args.output.out, Some(&config)), &hash, &comments, &header)?;
    for r in args.grid.points() {
        if near_any(&r, &centers) {
            continue;
        }
        let psi = assemble_wavefunction(&config.centers, &state, &r)?;
        let j = current_density(&psi);
        let mut row: Vec<String> = r.iter().map(|v| fmt_num(*v)).collect();
        for z in psi.iter() {
            row.push(fmt_num(z.re));
            row.push(fmt_num(z.im));
        }
        row.push(fmt_num(psi.norm_squared()));
        row.extend(j.iter().map(|v| fmt_num(*v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_green(args: &GreenArgs) -> anyhow::Result<()> {
    let loaded = args.config.as_deref().map(load).transpose()?;
    let (centers, hash) = match &loaded {
        Some(l) => (l.config.centers.clone(), l.hash.clone()),
        None => (Vec::new(), config_hash(b"free")),
    };
    let src = args.source.0;
    let mut avoid: Vec<Vector3<f64>> = centers.iter().map(|c| c.pos()).collect();
    avoid.push(src);
    let mut header = strings(&["x", "y", "z"]);
    for i in 0..4 {
        for j in 0..4 {
            header.push(format!("g{i}{j}_re"));
            header.push(format!("g{i}{j}_im"));
        }
    }
    let comments = vec![format!(
        "E={} source={},{},{} centers={}",
        fmt_num(args.energy),
        fmt_num(src.x),
        fmt_num(src.y),
        fmt_num(src.z),
        centers.len()
    )];
    // Reject pole energies before any output is written.
    if !centers.is_empty() {
        full_green(&centers, args.energy, &(src + Vector3::new(1.0, 0.0, 0.0)), &src)?;
    }
    let cfg = loaded.as_ref().map(|l| &l.config);
    let mut w = csv_out(out_path(&args.output.out, cfg), &hash, &comments, &header)?;
    for r in args.grid.points() {
        if near_any(&r, &avoid) {
            continue;
        }
        let g = if centers.is_empty() {
            free_green(args.energy, &r, &src)?
        } else {
            full_green(&centers, args.energy, &r, &src)?
        };
        let mut row: Vec<String> = r.iter().map(|v| fmt_num(*v)).collect();
        for i in 0..4 {
            for j in 0..4 {
                row.push(fmt_num(g[(i, j)].re));
                row.push(fmt_num(g[(i, j)].im));
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<()> {
    let Loaded { config, hash } = load(&args.config)?;
    let report = verify::run(
        &config.centers,
        &VerifyOptions {
            solver: config.solver,
            seed: args.seed,
            corrupt: args.corrupt,
        },
    )?;
    let mut w = sink(out_path(&args.output.out, Some(&config)))?;
    let doc = serde_json::json!({ "config_sha256": hash, "report": report, "passed": report.passed() });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    for c in &report.checks {
        eprintln!(
            "{} {} = {:e} (tolerance {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    if !report.passed() {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        return Err(VerificationFailed(failed.join(", ")).into());
    }
    Ok(())
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Twocenter(a) => cmd_twocenter(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Wavefunction(a) => cmd_wavefunction(a),
        Command::Green(a) => cmd_green(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Caps the global thread pool at `ZRP_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("ZRP_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| UsageError(format!("ZRP_THREADS={v:?} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
