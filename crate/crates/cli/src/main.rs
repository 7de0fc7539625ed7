use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use glassy_walk::disorder::DisorderKind;
use glassy_walk::experiment::{
    fit_csv, run_response, run_sweep, sigma_report, DistributionConfig, ExperimentConfig,
};
use glassy_walk::FitModel;

/// Quantum walks with quenched spherical disorder in the coin.
#[derive(Parser)]
#[command(name = "glassy-walk", version)]
struct Cli {
    /// Worker threads for Monte Carlo sweeps (0 = one per core). Never changes results.
    #[arg(long, global = true, env = "GLASSY_WALK_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the disorder strength of a distribution.
    Sigma(DistArgs),
    /// Disorder-averaged spread versus step count, and its scaling exponent.
    Sweep(RunArgs),
    /// Scaling exponent across a grid of disorder strengths, with a model fit.
    Response(RunArgs),
    /// Fit a response model to an existing `sigma,alpha,alpha_err` CSV.
    Fit(FitArgs),
}

#[derive(Args, Default)]
struct DistArgs {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// uniform, vmf, circular, cl1 or cl2.
    #[arg(long)]
    dist: Option<DisorderKind>,

    /// Native parameter of the distribution.
    #[arg(long, visible_aliases = ["r", "kappa", "d", "delta", "rho"], conflicts_with = "strength")]
    param: Option<f64>,

    /// Target disorder strength instead of a native parameter.
    #[arg(long)]
    strength: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dist: DistArgs,

    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<usize>>,

    /// Disorder configurations per step count.
    #[arg(long)]
    n_configs: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Use the exact classical random walk instead of a disorder distribution.
    #[arg(long)]
    classical: bool,

    /// Comma-separated disorder strengths for response curves.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,

    /// gaussian-decay or parabola (default depends on the distribution).
    #[arg(long)]
    model: Option<FitModel>,

    /// Output prefix; writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with columns sigma,alpha,alpha_err.
    input: PathBuf,

    #[arg(long, default_value = "gaussian-decay")]
    model: FitModel,

    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(args: &DistArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            ExperimentConfig::from_toml(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(kind) = args.dist {
        let keep = cfg.distribution.as_ref().filter(|d| d.kind == kind);
        cfg.distribution = Some(keep.cloned().unwrap_or(DistributionConfig {
            kind,
            param: None,
            strength: None,
        }));
    }
    if args.param.is_some() || args.strength.is_some() {
        let Some(d) = cfg.distribution.as_mut() else {
            bail!("--param/--strength need --dist or a [distribution] section");
        };
        d.param = args.param;
        d.strength = args.strength;
    }
    Ok(cfg)
}

fn apply_run_args(args: &RunArgs, workers: Option<usize>) -> Result<ExperimentConfig> {
    let mut cfg = load_config(&args.dist)?;
    if let Some(t) = &args.times {
        cfg.sweep.times = t.clone();
    }
    if let Some(n) = args.n_configs {
        cfg.sweep.n_configs = n;
    }
    if let Some(s) = args.seed {
        cfg.sweep.master_seed = s;
    }
    if args.classical {
        cfg.sweep.classical = true;
    }
    if let Some(g) = &args.grid {
        cfg.response.sigma_grid = Some(g.clone());
    }
    if args.model.is_some() {
        cfg.response.model = args.model;
    }
    if args.out.is_some() {
        cfg.run.output = args.out.clone();
    }
    if let Some(w) = workers {
        cfg.run.workers = w;
    }
    Ok(cfg)
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(cfg: &ExperimentConfig, csv: &str, json: &str) -> Result<()> {
    match &cfg.run.output {
        Some(prefix) => {
            write(&with_extension(prefix, "csv"), csv)?;
            write(&with_extension(prefix, "json"), json)?;
            print!("{json}");
        }
        None => print!("{csv}{json}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sigma(args) => {
            let spec = load_config(&args)?.spec()?;
            println!("{}", sigma_report(&spec));
        }
        Command::Sweep(args) => {
            let cfg = apply_run_args(&args, cli.workers)?;
            let out = run_sweep(&cfg)?;
            emit(&cfg, &out.csv, &out.json)?;
        }
        Command::Response(args) => {
            let cfg = apply_run_args(&args, cli.workers)?;
            let out = run_response(&cfg)?;
            emit(&cfg, &out.csv, &out.json)?;
        }
        Command::Fit(args) => {
            let text = fs::read_to_string(&args.input)
                .with_context(|| format!("reading {}", args.input.display()))?;
            let json = fit_csv(&text, args.model)?.to_json() + "\n";
            match &args.out {
                Some(path) => write(path, &json)?,
                None => print!("{json}"),
            }
        }
    }
    Ok(())
}
