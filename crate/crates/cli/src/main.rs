//! `crbounds`: evaluate, export and certify capacity bounds.
//!
//! Exit codes: 0 success / gap certified, 1 gap above threshold,
//! 2 usage error, 3 runtime failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::builder::TypedValueParser;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use crbounds::gap::{
    certify_with, compare_bounds, sweep_with, CertifyConfig, SweepConfig, DEFAULT_SIGMAS,
};
use crbounds::outer::{
    cifc_p2p_sets, outer_i_sets, outer_piecewise, p2p_bc_sets, region_of, TransformParams, DEFAULT_RHO_GRID,
};
use crbounds::region::{
    from_constraints, gap_for_points, intersect_regions, Grid, RateConstraintSet, Region, DEFAULT_GRID_POINTS,
};
use crbounds::{classify_regime, corner_points, ChannelParams};
use serde_json::{json, Value};

const EXIT_GAP_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "crbounds", version, about = "Capacity bounds for parallel Gaussian links with a cognitive relay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write every outer bound as a boundary CSV plus a summary JSON.
    Bounds {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        res: Resolution,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Certify the 3-bit gap for one channel or a random sweep; prints JSON.
    Gap {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        res: Resolution,
        /// Number of random channels to certify instead of a single channel.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        sweep: Option<u64>,
        /// Smallest squared gain of the sweep.
        #[arg(long, default_value_t = 0.01)]
        min_snr: f64,
        /// Largest squared gain of the sweep.
        #[arg(long, default_value_t = 1e4)]
        max_snr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reference channel h11 = 1, h1c = 0.5, h2c = 1, h22 = 5: inner region,
    /// correlation and piecewise outer bounds, and a JSON with corners and
    /// gaps.
    Fig4 {
        #[command(flatten)]
        res: Resolution,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ChannelArgs {
    #[arg(long, allow_negative_numbers = true)]
    h11: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h22: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h1c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h2c: Option<f64>,
    /// JSON file with keys h11, h22, h1c, h2c.
    #[arg(long, conflicts_with_all = ["h11", "h22", "h1c", "h2c"])]
    channel: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Resolution {
    /// Number of R1 samples.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS, value_parser = clap::value_parser!(u32).range(16..).map(|v| v as usize))]
    grid: usize,
    /// Correlation grid resolution per axis.
    #[arg(long, default_value_t = DEFAULT_RHO_GRID, value_parser = clap::value_parser!(u32).range(8..).map(|v| v as usize))]
    rho_grid: usize,
    /// Comma-separated noise splits in (0, 1] for the transformed-channel bounds.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIGMAS.to_vec())]
    sigma_list: Vec<f64>,
}

impl Resolution {
    fn config(&self) -> CertifyConfig {
        CertifyConfig {
            grid_points: self.grid,
            rho_grid: self.rho_grid,
            sigmas: self.sigma_list.clone(),
            ..CertifyConfig::default()
        }
    }
}

fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, msg).exit()
}

impl ChannelArgs {
    fn given(&self) -> bool {
        self.channel.is_some() || [self.h11, self.h22, self.h1c, self.h2c].iter().any(Option::is_some)
    }

    fn resolve(&self) -> anyhow::Result<ChannelParams> {
        if let Some(path) = &self.channel {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(ChannelParams::from_json_str(&text)?);
        }
        match (self.h11, self.h22, self.h1c, self.h2c) {
            (Some(a), Some(b), Some(c), Some(d)) => match ChannelParams::new(a, b, c, d) {
                Ok(ch) => Ok(ch),
                Err(e) => usage_error(ErrorKind::ValueValidation, e),
            },
            _ => usage_error(
                ErrorKind::MissingRequiredArgument,
                "give all of --h11 --h22 --h1c --h2c, or --channel <file>",
            ),
        }
    }
}

fn check_sigmas(sigmas: &[f64]) {
    if sigmas.is_empty() {
        usage_error(ErrorKind::ValueValidation, "--sigma-list must not be empty");
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
        usage_error(ErrorKind::ValueValidation, format!("noise split {s} is outside (0, 1]"));
    }
}

fn write_csv(dir: &Path, name: &str, r: &Region) -> anyhow::Result<()> {
    let path = dir.join(name);
    r.write_csv(&path).with_context(|| format!("writing {}", path.display()))
}

fn write_json(dir: &Path, name: &str, v: &Value) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn constraints_json(cs: &RateConstraintSet) -> Value {
    cs.iter().map(|c| json!({"r1": c.r1, "r2": c.r2, "bound": c.bound})).collect()
}

fn extent_json(r: &Region) -> Value {
    let max_r2 = r.samples().map(|p| p.r2).fold(f64::NEG_INFINITY, f64::max);
    json!({"maxR1": r.max_r1(), "maxR2": if max_r2.is_finite() { Some(max_r2) } else { None }})
}

/// Intersection over noise splits; `None` when no split yields a bound.
fn intersect_families(families: Vec<Vec<RateConstraintSet>>, grid: Grid) -> anyhow::Result<Option<Region>> {
    if families.is_empty() {
        return Ok(None);
    }
    let regions = families.iter().map(|f| region_of(f, grid)).collect::<Result<Vec<_>, _>>()?;
    Ok(Some(intersect_regions(&regions)?))
}

fn empty_region(grid: Grid) -> Region {
    Region::from_samples(grid, vec![f64::NEG_INFINITY; grid.points()]).expect("grid-sized boundary")
}

fn cmd_bounds(channel: &ChannelArgs, res: &Resolution, out: &Path) -> anyhow::Result<u8> {
    let ch = channel.resolve()?;
    check_sigmas(&res.sigma_list);
    let cfg = res.config();
    let corr_sets = outer_i_sets(&ch, cfg.rho_grid, cfg.rz_steps)?;
    let pw = outer_piecewise(&ch);
    let grid = Grid::enclosing(corr_sets.iter().chain([&pw]), cfg.grid_points)?;

    let mut cifc = Vec::new();
    let mut skipped_cifc = Vec::new();
    for &s in &cfg.sigmas {
        match cifc_p2p_sets(&ch, s, cfg.alpha_steps) {
            Ok(sets) => cifc.push(sets),
            Err(crbounds::BoundsError::Unbounded) => skipped_cifc.push(s),
            Err(e) => return Err(e.into()),
        }
    }
    let mut bc = Vec::new();
    let mut bc_pairs = Vec::new();
    for &s11 in &cfg.sigmas {
        for &s22 in &cfg.sigmas {
            if !TransformParams::new(0.0, s11, s22)?.is_degraded_for(&ch) {
                continue;
            }
            match p2p_bc_sets(&ch, s11, s22, cfg.alpha_steps) {
                Ok(sets) => {
                    bc.push(sets);
                    bc_pairs.push([s11, s22]);
                }
                Err(crbounds::BoundsError::Unbounded) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }

    let th1 = region_of(&corr_sets, grid)?;
    let th2 = from_constraints(&pw, grid)?;
    let th3 = intersect_families(cifc, grid)?;
    let th4 = intersect_families(bc, grid)?;
    if th4.is_none() {
        eprintln!("note: no noise split satisfies the degradedness condition; outer-th4.csv is empty");
    }

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(out, "outer-th1.csv", &th1)?;
    write_csv(out, "outer-th2.csv", &th2)?;
    write_csv(out, "outer-th3.csv", th3.as_ref().unwrap_or(&empty_region(grid)))?;
    write_csv(out, "outer-th4.csv", th4.as_ref().unwrap_or(&empty_region(grid)))?;
    let summary = json!({
        "channel": ch,
        "regime": classify_regime(&ch),
        "grid": {"r1Max": grid.r1_max(), "points": grid.points()},
        "rhoGrid": cfg.rho_grid,
        "sigmas": cfg.sigmas,
        "outer-th1": extent_json(&th1),
        "outer-th2": {"extent": extent_json(&th2), "constraints": constraints_json(&pw)},
        "outer-th3": {
            "available": th3.is_some(),
            "unboundedSigmas": skipped_cifc,
            "extent": th3.as_ref().map(extent_json),
        },
        "outer-th4": {
            "available": th4.is_some(),
            "feasiblePairs": bc_pairs,
            "extent": th4.as_ref().map(extent_json),
        },
    });
    write_json(out, "summary.json", &summary)?;
    Ok(0)
}

fn cmd_gap(channel: &ChannelArgs, res: &Resolution, sweep: Option<u64>, min_snr: f64, max_snr: f64, seed: u64) -> anyhow::Result<u8> {
    check_sigmas(&res.sigma_list);
    let cfg = res.config();
    let (value, pass) = match sweep {
        Some(count) => {
            if channel.given() {
                usage_error(ErrorKind::ArgumentConflict, "--sweep cannot be combined with a channel");
            }
            if !(min_snr > 0.0 && min_snr <= max_snr && max_snr.is_finite()) {
                usage_error(ErrorKind::ValueValidation, "need 0 < --min-snr <= --max-snr");
            }
            let sc = SweepConfig {
                count: count as usize,
                min_snr,
                max_snr,
                seed,
            };
            let report = sweep_with(&sc, &cfg)?;
            (serde_json::to_value(&report)?, report.pass)
        }
        None => {
            let report = certify_with(&channel.resolve()?, &cfg)?;
            (serde_json::to_value(&report)?, report.pass)
        }
    };
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(if pass { 0 } else { EXIT_GAP_FAIL })
}

fn cmd_fig4(res: &Resolution, out: &Path) -> anyhow::Result<u8> {
    check_sigmas(&res.sigma_list);
    let ch = ChannelParams::fig4();
    let cmp = compare_bounds(&ch, &res.config())?;
    let (a, b) = corner_points(&cmp.piecewise_set)?;
    let corner = |p: crbounds::RatePair| {
        let g = gap_for_points(&[p], &cmp.inner);
        json!({"corner": p, "achieved": p.shifted_down(g), "gap": g})
    };
    let report = json!({
        "channel": ch,
        "regime": classify_regime(&ch),
        "grid": {"r1Max": cmp.grid.r1_max(), "points": cmp.grid.points()},
        "cornerA": corner(a),
        "cornerB": corner(b),
        "gapPiecewise": cmp.gap_piecewise,
        "gapCorrelation": cmp.gap_correlation,
        "innerInCorrelation": cmp.correlation.dominates(&cmp.inner, 1e-6)?,
        "correlationInPiecewise": cmp.piecewise.dominates(&cmp.correlation, 1e-6)?,
    });
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(out, "inner-th5.csv", &cmp.inner)?;
    write_csv(out, "outer-th1.csv", &cmp.correlation)?;
    write_csv(out, "outer-th2.csv", &cmp.piecewise)?;
    write_json(out, "fig4.json", &report)?;
    Ok(0)
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("CRBOUNDS_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => bail!("CRBOUNDS_THREADS must be a positive integer, got {v:?}"),
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    configure_threads()?;
    match &cli.command {
        Command::Bounds { channel, res, out } => cmd_bounds(channel, res, out),
        Command::Gap {
            channel,
            res,
            sweep,
            min_snr,
            max_snr,
            seed,
        } => cmd_gap(channel, res, *sweep, *min_snr, *max_snr, *seed),
        Command::Fig4 { res, out } => cmd_fig4(res, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.to_string().starts_with("CRBOUNDS_THREADS") {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}
