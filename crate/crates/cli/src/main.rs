use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nojd::bench::{self, Algorithm, CampaignConfig, DEFAULT_PL_GRID};
use nojd::metrics::ScoreReport;
use nojd::problemgen::{generate_run, ScenarioSpec, PRESETS};
use nojd::{format, selftest, SweepConfig};

#[derive(Parser)]
#[command(name = "nojd", version, about = "Non-orthogonal joint diagonalization of complex matrix sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generated instances as matrix-set files.
    Gen(GenArgs),
    /// Diagonalize one instance and print its scores.
    Run(RunArgs),
    /// Run a Monte Carlo campaign and write CSV reports.
    Campaign(CampaignArgs),
    /// Run the built-in numerical self-checks.
    Selftest,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Preset name or path to a scenario TOML file.
    #[arg(long, default_value = "ref5")]
    scenario: String,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Stopping threshold on the largest rotation magnitude of a sweep.
    #[arg(long, default_value_t = 1e-8)]
    tau: f64,
    #[arg(long = "max-sweeps", default_value_t = 100)]
    max_sweeps: usize,
}

impl SolveArgs {
    fn config(&self) -> SweepConfig {
        SweepConfig { tau: self.tau, max_sweeps: self.max_sweeps, record_trajectory: true }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Perturbation level in dB (absent: exact problem).
    #[arg(long)]
    pl: Option<f64>,
    #[arg(long, default_value = "instances")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Matrix-set file; when absent, run 0 of the scenario is generated.
    input: Option<PathBuf>,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value = "cjdi")]
    algo: String,
    /// Perturbation level in dB for generated instances.
    #[arg(long)]
    pl: Option<f64>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args)]
struct CampaignArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Monte Carlo runs (default: 200 for N < 50, 20 otherwise).
    #[arg(long)]
    runs: Option<usize>,
    /// Algorithms to run, comma separated.
    #[arg(long, default_value = "cjdi,basic", value_delimiter = ',')]
    algo: Vec<String>,
    /// Perturbation grid in dB, comma separated, or `grid` for 0,10,…,50.
    /// Absent: exact problems.
    #[arg(long)]
    pl: Option<String>,
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long, default_value = "campaign")]
    out: PathBuf,
}

fn load_scenario(args: &ScenarioArgs) -> Result<(String, ScenarioSpec)> {
    let (id, mut spec) = match ScenarioSpec::preset(&args.scenario) {
        Some(spec) => (args.scenario.clone(), spec),
        None => {
            let path = Path::new(&args.scenario);
            if !path.exists() {
                bail!("unknown scenario `{}` (presets: {}; or a TOML file)", args.scenario, PRESETS.join(", "));
            }
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            (id, ScenarioSpec::from_toml(&text)?)
        }
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    Ok((id, spec))
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    if text == "grid" {
        return Ok(DEFAULT_PL_GRID.to_vec());
    }
    text.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad perturbation level `{t}`")))
        .collect()
}

fn gen(args: &GenArgs) -> Result<()> {
    let (_, spec) = load_scenario(&args.scenario)?;
    let pl = args.pl.or(spec.pl_db);
    let spec = spec.with_pl(pl);
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(args.out.join("scenario.toml"), spec.to_toml())?;
    for run in 0..args.runs {
        let inst = generate_run(&spec, run as u64)?;
        let path = args.out.join(format!("instance_{run:04}.nojd"));
        format::write_file(&inst.set, &path)?;
        println!("{}  mou {:.6e}  cond_a {:.6e}", path.display(), inst.meta.mou, inst.meta.cond_a);
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let algorithm: Algorithm = args.algo.parse()?;
    let (set, pl) = match &args.input {
        Some(path) => (format::read_file(path)?, Vec::new()),
        None => {
            let (_, spec) = load_scenario(&args.scenario)?;
            let inst = generate_run(&spec.clone().with_pl(args.pl.or(spec.pl_db)), 0)?;
            (inst.set, inst.meta.pl_db)
        }
    };
    let cfg = args.solve.config();
    let (v, report) = match algorithm {
        Algorithm::Cjdi => nojd::cjdi(&set, &cfg)?,
        Algorithm::Basic => nojd::basic_generalized_jdi(&set, &cfg)?,
    };
    println!("algorithm {}", algorithm.name());
    println!("sweeps  {} ({})", report.sweeps, if report.converged { "converged" } else { "sweep limit" });
    if report.pairing_warning {
        println!("warning: column pairing unreliable");
    }
    print!("{}", ScoreReport::new(&v.v, &set, pl)?);
    Ok(())
}

fn campaign(args: &CampaignArgs) -> Result<()> {
    let (id, spec) = load_scenario(&args.scenario)?;
    let algorithms = args.algo.iter().map(|a| a.parse()).collect::<nojd::Result<Vec<Algorithm>>>()?;
    let runs = args.runs.unwrap_or(if spec.n < 50 { 200 } else { 20 });
    let cfg = CampaignConfig {
        scenario_id: id,
        spec,
        algorithms,
        runs,
        pl_grid: args.pl.as_deref().map(parse_grid).transpose()?,
        sweep: SweepConfig { record_trajectory: true, ..args.solve.config() },
    };
    let result = bench::run_campaign(&cfg)?;
    bench::report(&result, &args.out)?;
    print!("{}", bench::digest(&result));
    println!("reports written to {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Campaign(a) => campaign(a),
        Command::Selftest => {
            let checks = selftest::run_all();
            for c in &checks {
                println!("[{}] {}  {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                return ExitCode::FAILURE;
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
