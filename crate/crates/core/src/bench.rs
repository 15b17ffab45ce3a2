//! Monte Carlo campaigns over generated scenarios, with CSV reports.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cjdi::CjdiSolver;
use crate::error::{NojdError, Result};
use crate::jdi::{run_sweeps, BasicSolver, RunReport, SweepConfig, Sweeper};
use crate::problemgen::{add_noise_run, generate_run, ProblemInstance, ScenarioSpec};

/// Final PI above which a run counts as divergent.
pub const DIVERGENCE_PI: f64 = 1e-2;
/// Fraction of runs allowed to fail generation before the campaign aborts.
pub const FAILURE_BUDGET: f64 = 0.10;
/// Default perturbation grid in dB.
pub const DEFAULT_PL_GRID: [f64; 6] = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0];
/// Environment variable bounding the worker pool.
pub const THREADS_ENV: &str = "NOJD_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Cjdi,
    Basic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Cjdi, Algorithm::Basic];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cjdi => "cjdi",
            Algorithm::Basic => "basic",
        }
    }

    /// Run on one instance.
    pub fn solve(self, instance: &ProblemInstance, cfg: &SweepConfig) -> Result<RunReport> {
        let mut solver: Box<dyn Sweeper> = match self {
            Algorithm::Cjdi => Box::new(CjdiSolver::new(&instance.set)?),
            Algorithm::Basic => Box::new(BasicSolver::new(&instance.set)?),
        };
        run_sweeps(solver.as_mut(), cfg)
    }
}

impl FromStr for Algorithm {
    type Err = NojdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cjdi" => Ok(Algorithm::Cjdi),
            "basic" => Ok(Algorithm::Basic),
            _ => Err(NojdError::InvalidConfig(format!("unknown algorithm `{s}` (expected cjdi or basic)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub scenario_id: String,
    pub spec: ScenarioSpec,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    /// `Some`: approximate mode over these levels; `None`: exact mode
    /// (or the spec's own level, if it has one).
    pub pl_grid: Option<Vec<f64>>,
    pub sweep: SweepConfig,
}

impl CampaignConfig {
    pub fn new(scenario_id: impl Into<String>, spec: ScenarioSpec, runs: usize) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            spec,
            algorithms: Algorithm::ALL.to_vec(),
            runs,
            pl_grid: None,
            sweep: SweepConfig::default(),
        }
    }

    fn levels(&self) -> Vec<Option<f64>> {
        match &self.pl_grid {
            Some(grid) => grid.iter().map(|&p| Some(p)).collect(),
            None => vec![self.spec.pl_db],
        }
    }
}

/// One algorithm on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    pub run: usize,
    pub pl_db: Option<f64>,
    pub report: RunReport,
    /// `NaN` when the solve failed.
    pub final_pi: f64,
    pub diverged: bool,
    pub error: Option<String>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub scenario_id: String,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub pl_grid: Option<Vec<f64>>,
    /// Ordered by level, then run, then algorithm.
    pub outcomes: Vec<RunOutcome>,
    /// Runs whose instance could not be generated.
    pub failures: Vec<(usize, String)>,
    pub wall_clock: Duration,
}

/// Aggregate of one (level, algorithm) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub pl_db: Option<f64>,
    pub runs: usize,
    pub mean_pi: f64,
    pub mean_pi_convergent: f64,
    pub median_pi: f64,
    pub p90_pi: f64,
    pub divergent: usize,
    pub divergence_rate: f64,
    pub mean_sweeps_to_tau: f64,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

pub fn median(xs: &[f64]) -> f64 {
    let v = sorted(xs);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Nearest-rank percentile, `q ∈ (0, 1]`.
pub fn percentile(xs: &[f64], q: f64) -> f64 {
    let v = sorted(xs);
    if v.is_empty() {
        return f64::NAN;
    }
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

impl CampaignResult {
    pub fn levels(&self) -> Vec<Option<f64>> {
        let mut out: Vec<Option<f64>> = Vec::new();
        for o in &self.outcomes {
            if !out.contains(&o.pl_db) {
                out.push(o.pl_db);
            }
        }
        out
    }

    pub fn outcomes_for(&self, algorithm: Algorithm, pl_db: Option<f64>) -> impl Iterator<Item = &RunOutcome> {
        self.outcomes.iter().filter(move |o| o.algorithm == algorithm && o.pl_db == pl_db)
    }

    pub fn divergence_count(&self, algorithm: Algorithm, pl_db: Option<f64>) -> usize {
        self.outcomes_for(algorithm, pl_db).filter(|o| o.diverged).count()
    }

    fn cell_id(&self, pl_db: Option<f64>) -> String {
        match (&self.pl_grid, pl_db) {
            (Some(_), Some(pl)) => format!("{}@{}dB", self.scenario_id, pl),
            _ => self.scenario_id.clone(),
        }
    }

    pub fn summaries(&self) -> Vec<Summary> {
        let mut out = Vec::new();
        for level in self.levels() {
            for &algorithm in &self.algorithms {
                let cell: Vec<&RunOutcome> = self.outcomes_for(algorithm, level).collect();
                let pis: Vec<f64> = cell.iter().map(|o| o.final_pi).filter(|p| !p.is_nan()).collect();
                let good: Vec<f64> = cell.iter().filter(|o| !o.diverged).map(|o| o.final_pi).collect();
                let to_tau: Vec<f64> =
                    cell.iter().filter(|o| o.report.converged).map(|o| o.report.sweeps as f64).collect();
                let divergent = cell.iter().filter(|o| o.diverged).count();
                out.push(Summary {
                    scenario: self.cell_id(level),
                    algorithm,
                    pl_db: level,
                    runs: cell.len(),
                    mean_pi: mean(&pis),
                    mean_pi_convergent: mean(&good),
                    median_pi: median(&pis),
                    p90_pi: percentile(&pis, 0.9),
                    divergent,
                    divergence_rate: if cell.is_empty() { 0.0 } else { divergent as f64 / cell.len() as f64 },
                    mean_sweeps_to_tau: mean(&to_tau),
                });
            }
        }
        out
    }

    /// Mean PI after sweep `s` (runs that stopped earlier carry their last value).
    pub fn mean_trajectory(&self, algorithm: Algorithm, pl_db: Option<f64>, max_sweeps: usize) -> Vec<f64> {
        let cell: Vec<&RunOutcome> = self.outcomes_for(algorithm, pl_db).filter(|o| o.error.is_none()).collect();
        (1..=max_sweeps)
            .map(|s| {
                let vals: Vec<f64> = cell
                    .iter()
                    .filter_map(|o| {
                        let recs = &o.report.records;
                        recs.iter().take_while(|r| r.sweep <= s).last().and_then(|r| r.pi)
                    })
                    .collect();
                mean(&vals)
            })
            .collect()
    }

    /// Mean wall-clock time per sweep of an algorithm over all its runs.
    pub fn seconds_per_sweep(&self, algorithm: Algorithm) -> f64 {
        let (t, s) = self
            .outcomes
            .iter()
            .filter(|o| o.algorithm == algorithm && o.error.is_none())
            .fold((0.0, 0usize), |(t, s), o| (t + o.elapsed.as_secs_f64(), s + o.report.sweeps));
        if s == 0 {
            f64::NAN
        } else {
            t / s as f64
        }
    }
}

/// Worker pool sized by `NOJD_THREADS` (unset or invalid: rayon default).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| NojdError::InvalidConfig(format!("thread pool: {e}")))
}

fn run_one(instance: &ProblemInstance, algorithm: Algorithm, run: usize, pl_db: Option<f64>, cfg: &SweepConfig) -> RunOutcome {
    let start = Instant::now();
    let result = algorithm.solve(instance, cfg);
    let elapsed = start.elapsed();
    match result {
        Ok(report) => {
            let final_pi = report.final_pi().unwrap_or(f64::NAN);
            RunOutcome {
                algorithm,
                run,
                pl_db,
                diverged: !(final_pi <= DIVERGENCE_PI),
                final_pi,
                report,
                error: None,
                elapsed,
            }
        }
        Err(e) => RunOutcome {
            algorithm,
            run,
            pl_db,
            report: RunReport::default(),
            final_pi: f64::NAN,
            diverged: true,
            error: Some(e.to_string()),
            elapsed,
        },
    }
}

/// Generate the instances and run every algorithm on them.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.spec.validate()?;
    cfg.sweep.validate()?;
    if cfg.algorithms.is_empty() {
        return Err(NojdError::InvalidConfig("no algorithm selected".into()));
    }
    let start = Instant::now();
    let pool = thread_pool()?;
    let exact_spec = cfg.spec.clone().with_pl(None);
    let levels = cfg.levels();

    let generated: Vec<(usize, Result<ProblemInstance>)> =
        pool.install(|| (0..cfg.runs).into_par_iter().map(|r| (r, generate_run(&exact_spec, r as u64))).collect());
    let mut failures = Vec::new();
    let mut instances = Vec::new();
    for (run, g) in generated {
        match g {
            Ok(inst) => instances.push((run, inst)),
            Err(e) => failures.push((run, e.to_string())),
        }
    }
    if failures.len() as f64 > FAILURE_BUDGET * cfg.runs as f64 {
        let (run, msg) = &failures[0];
        return Err(NojdError::InvalidConfig(format!(
            "{} of {} runs failed generation (first: run {run}: {msg})",
            failures.len(),
            cfg.runs
        )));
    }

    let tasks: Vec<(Option<f64>, usize, Algorithm)> = levels
        .iter()
        .flat_map(|&l| {
            instances
                .iter()
                .flat_map(move |(r, _)| cfg.algorithms.iter().map(move |&a| (l, *r, a)))
        })
        .collect();
    let by_run = |run: usize| &instances.iter().find(|(r, _)| *r == run).expect("task from instance").1;
    let outcomes: Vec<RunOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(level, run, algorithm)| {
                let base = by_run(run);
                match level {
                    Some(pl) if pl != f64::INFINITY => {
                        let noisy = add_noise_run(base, pl, cfg.spec.seed, run as u64);
                        run_one(&noisy, algorithm, run, level, &cfg.sweep)
                    }
                    _ => run_one(base, algorithm, run, level, &cfg.sweep),
                }
            })
            .collect()
    });

    Ok(CampaignResult {
        scenario_id: cfg.scenario_id.clone(),
        algorithms: cfg.algorithms.clone(),
        runs: cfg.runs,
        pl_grid: cfg.pl_grid.clone(),
        outcomes,
        failures,
        wall_clock: start.elapsed(),
    })
}

/// Ten significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.9e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn level_dir(pl: f64) -> String {
    format!("pl_{pl}")
}

fn write_trajectory<'a>(path: &Path, outcomes: impl Iterator<Item = &'a RunOutcome>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "run", "sweep", "pi", "c_ils", "max_rot"])?;
    for o in outcomes {
        for r in &o.report.records {
            w.write_record([
                o.algorithm.name().to_string(),
                o.run.to_string(),
                r.sweep.to_string(),
                fmt_opt(r.pi),
                fmt_num(r.c_ils),
                fmt_num(r.max_rotation),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_summary(path: &Path, summaries: &[Summary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "scenario",
        "algorithm",
        "runs",
        "mean_pi",
        "mean_pi_convergent",
        "median_pi",
        "p90_pi",
        "divergence_rate",
        "mean_sweeps_to_tau",
    ])?;
    for s in summaries {
        w.write_record([
            s.scenario.clone(),
            s.algorithm.name().to_string(),
            s.runs.to_string(),
            fmt_num(s.mean_pi),
            fmt_num(s.mean_pi_convergent),
            fmt_num(s.median_pi),
            fmt_num(s.p90_pi),
            fmt_num(s.divergence_rate),
            fmt_num(s.mean_sweeps_to_tau),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_pl_curve(path: &Path, summaries: &[Summary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "pl_db", "mean_pi", "median_pi", "divergence_rate"])?;
    for s in summaries {
        w.write_record([
            s.algorithm.name().to_string(),
            fmt_opt(s.pl_db),
            fmt_num(s.mean_pi),
            fmt_num(s.median_pi),
            fmt_num(s.divergence_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable digest (the only output carrying timings).
pub fn digest(result: &CampaignResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario      {}", result.scenario_id);
    let _ = writeln!(out, "runs          {}", result.runs);
    let _ = writeln!(out, "gen failures  {}", result.failures.len());
    for (run, msg) in &result.failures {
        let _ = writeln!(out, "  run {run}: {msg}");
    }
    let _ = writeln!(out, "wall clock    {:.3} s", result.wall_clock.as_secs_f64());
    for &a in &result.algorithms {
        let _ = writeln!(out, "{:<13} {:.3e} s/sweep", a.name(), result.seconds_per_sweep(a));
    }
    let _ = writeln!(out);
    for s in result.summaries() {
        let _ = writeln!(
            out,
            "{} {}: mean PI {:.3e} (excl. divergent {:.3e}), median {:.3e}, p90 {:.3e}, divergent {}/{} = {}, mean sweeps to tau {:.2}",
            s.scenario,
            s.algorithm.name(),
            s.mean_pi,
            s.mean_pi_convergent,
            s.median_pi,
            s.p90_pi,
            s.divergent,
            s.runs,
            s.divergence_rate,
            s.mean_sweeps_to_tau,
        );
    }
    let errors: Vec<&RunOutcome> = result.outcomes.iter().filter(|o| o.error.is_some()).collect();
    if !errors.is_empty() {
        let _ = writeln!(out, "\nsolver errors:");
        for o in errors {
            let _ = writeln!(out, "  {} run {}: {}", o.algorithm.name(), o.run, o.error.as_deref().unwrap_or(""));
        }
    }
    out
}

/// Write the campaign files into `out_dir`.
///
/// Exact mode: `trajectory.csv`, `summary.csv`, `campaign.txt`.
/// Approximate mode: one `pl_<dB>/trajectory.csv` per level plus
/// `pl_curve.csv`, `summary.csv` and `campaign.txt`.
pub fn report(result: &CampaignResult, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let summaries = result.summaries();
    match &result.pl_grid {
        None => write_trajectory(&out_dir.join("trajectory.csv"), result.outcomes.iter())?,
        Some(grid) => {
            for &pl in grid {
                let dir = out_dir.join(level_dir(pl));
                std::fs::create_dir_all(&dir)?;
                write_trajectory(&dir.join("trajectory.csv"), result.outcomes.iter().filter(|o| o.pl_db == Some(pl)))?;
            }
            write_pl_curve(&out_dir.join("pl_curve.csv"), &summaries)?;
        }
    }
    write_summary(&out_dir.join("summary.csv"), &summaries)?;
    std::fs::write(out_dir.join("campaign.txt"), digest(result))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0], 0.9), 9.0);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn algorithm_names_parse() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("acdc".parse::<Algorithm>().is_err());
    }

    #[test]
    fn number_format_has_ten_digits() {
        assert_eq!(fmt_num(1.0), "1.000000000e0");
        assert_eq!(fmt_num(-2.5e-9), "-2.500000000e-9");
    }
}
