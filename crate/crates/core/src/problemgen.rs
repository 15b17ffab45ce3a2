//! Seedable synthetic problems: `M_k = A D_k Aᴴ (+ Ξ_k)` with controlled
//! MOU, condition numbers and perturbation level.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::embedding::{TargetSet, Truth};
use crate::error::{NojdError, Result};
use crate::linalg::CMatrix;
use crate::metrics;

/// Redraws allowed before a spec is declared unattainable.
pub const MAX_ATTEMPTS: usize = 2000;
/// Standard deviation of `D_k(2,2)` in the cond(D) stress.
pub const COND_D_STRESS_STD: f64 = 1e-4;

/// Scenario description; also the flat key-value config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mou_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mou_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond_a_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond_a_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond_d_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond_d_max: Option<f64>,
    /// Absent: exact joint diagonalization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pl_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

/// Names accepted by [`ScenarioSpec::preset`].
pub const PRESETS: [&str; 8] = ["ref5", "mou5", "conda5", "condd5", "ref50", "mou50", "conda50", "condd50"];

impl ScenarioSpec {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            mou_min: None,
            mou_max: None,
            cond_a_min: None,
            cond_a_max: None,
            cond_d_min: None,
            cond_d_max: None,
            pl_db: None,
            seed: 0,
        }
    }

    /// The eight experiment scenarios (K = 5).
    pub fn preset(name: &str) -> Option<Self> {
        let s5 = Self::new(5, 5);
        let s50 = Self::new(50, 5);
        let near_one = Some(1.0 - 1e-6);
        Some(match name {
            "ref5" => Self { mou_max: Some(0.6), cond_a_max: Some(5.0), ..s5 },
            "mou5" => Self { mou_min: near_one, cond_a_max: Some(5.0), ..s5 },
            "conda5" => Self { mou_max: Some(0.6), cond_a_min: Some(100.0), ..s5 },
            "condd5" => Self { mou_max: Some(0.6), cond_a_max: Some(5.0), cond_d_min: Some(1e4), ..s5 },
            "ref50" => Self { cond_a_max: Some(50.0), ..s50 },
            "mou50" => Self { mou_min: near_one, cond_a_max: Some(50.0), ..s50 },
            "conda50" => Self { cond_a_min: Some(100.0), ..s50 },
            "condd50" => Self { cond_a_max: Some(50.0), cond_d_min: Some(1e4), ..s50 },
            _ => return None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_pl(mut self, pl_db: Option<f64>) -> Self {
        self.pl_db = pl_db;
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| NojdError::InvalidConfig(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat spec always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NojdError::InvalidConfig(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        for (name, v) in [("mou_min", self.mou_min), ("mou_max", self.mou_max)] {
            if let Some(x) = v {
                if !(0.0..=1.0).contains(&x) {
                    return bad(format!("{name} must lie in [0, 1], got {x}"));
                }
            }
        }
        for (name, v) in [
            ("cond_a_min", self.cond_a_min),
            ("cond_a_max", self.cond_a_max),
            ("cond_d_min", self.cond_d_min),
            ("cond_d_max", self.cond_d_max),
        ] {
            if let Some(x) = v {
                if !(x >= 1.0) || x.is_infinite() {
                    return bad(format!("{name} must be a finite value ≥ 1, got {x}"));
                }
            }
        }
        for (lo, hi, what) in [
            (self.mou_min, self.mou_max, "mou"),
            (self.cond_a_min, self.cond_a_max, "cond_a"),
            (self.cond_d_min, self.cond_d_max, "cond_d"),
        ] {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo >= hi {
                    return bad(format!("{what}_min ({lo}) must be below {what}_max ({hi})"));
                }
            }
        }
        if self.cond_a_max == Some(1.0) {
            return bad("cond_a_max must exceed 1".into());
        }
        if self.mou_min.is_some() && self.cond_d_min.is_some() {
            return bad("mou_min and cond_d_min both rewrite D_k(2,2) and cannot be combined".into());
        }
        if let Some(pl) = self.pl_db {
            if pl.is_nan() || pl == f64::NEG_INFINITY {
                return bad(format!("pl_db must be a number or +inf, got {pl}"));
            }
        }
        Ok(())
    }
}

/// Measured properties of a generated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMeta {
    pub mou: f64,
    pub cond_a: f64,
    pub cond_d: Vec<f64>,
    /// Per-matrix perturbation level; `+∞` without noise.
    pub pl_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    /// Possibly noisy targets, carrying the truth `(A, D_k)`.
    pub set: TargetSet,
    /// Noise matrices `Ξ_k` (zero for exact problems).
    pub xi: Vec<CMatrix>,
    pub meta: InstanceMeta,
}

impl ProblemInstance {
    pub fn truth(&self) -> &Truth {
        self.set.truth().expect("generated instances carry truth")
    }

    /// `A D_k Aᴴ`.
    pub fn exact_matrices(&self) -> Vec<CMatrix> {
        let t = self.truth();
        t.diagonals.iter().map(|d| t.mixing.congruence_diag(d)).collect()
    }

    /// Recompute the metadata from the stored matrices.
    pub fn measure(&self) -> Result<InstanceMeta> {
        let t = self.truth();
        Ok(InstanceMeta {
            mou: metrics::mou(&t.diagonals)?,
            cond_a: t.mixing.condition_number(),
            cond_d: t.diagonals.iter().map(|d| metrics::diagonal_condition(d)).collect(),
            pl_db: metrics::perturbation_level(&self.exact_matrices(), &self.xi)?,
        })
    }
}

// Stream layout: instance `run` draws its exact part from stream 2·run and
// its noise from stream 2·run + 1 of the seed.
fn stream_rng(seed: u64, run: u64, noise: bool) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(2 * run + noise as u64);
    rng
}

/// Complex normal with unit total variance.
fn complex_normal(rng: &mut impl Rng, std: f64) -> Complex64 {
    let dist = Normal::new(0.0, std * std::f64::consts::FRAC_1_SQRT_2).expect("positive std");
    Complex64::new(dist.sample(rng), dist.sample(rng))
}

fn random_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, |_, _| complex_normal(rng, 1.0))
}

/// Exact instance number 0 of the spec.
pub fn generate(spec: &ScenarioSpec) -> Result<ProblemInstance> {
    generate_run(spec, 0)
}

/// Instance `run` of the spec; deterministic in `(spec, run)`.
pub fn generate_run(spec: &ScenarioSpec, run: u64) -> Result<ProblemInstance> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, run, false);
    let mut last_violation = "mou";
    for _ in 0..MAX_ATTEMPTS {
        let mixing = shape_condition(random_matrix(spec.n, &mut rng), spec)?;
        let cond_a = mixing.condition_number();
        if spec.cond_a_min.is_some_and(|lo| !(cond_a > lo)) {
            last_violation = "cond_a_min";
            continue;
        }
        if spec.cond_a_max.is_some_and(|hi| !(cond_a < hi)) {
            last_violation = "cond_a_max";
            continue;
        }
        let Some(diagonals) = draw_diagonals(spec, &mut rng)? else {
            last_violation = if spec.mou_min.is_some() { "mou_min" } else { "cond_d_min" };
            continue;
        };
        let mou = metrics::mou(&diagonals)?;
        if spec.mou_min.is_some_and(|lo| !(mou > lo)) {
            last_violation = "mou_min";
            continue;
        }
        if spec.mou_max.is_some_and(|hi| !(mou < hi)) {
            last_violation = "mou_max";
            continue;
        }
        let cond_d: Vec<f64> = diagonals.iter().map(|d| metrics::diagonal_condition(d)).collect();
        if spec.cond_d_min.is_some_and(|lo| cond_d.iter().any(|&c| !(c > lo))) {
            last_violation = "cond_d_min";
            continue;
        }
        if spec.cond_d_max.is_some_and(|hi| cond_d.iter().any(|&c| !(c < hi))) {
            last_violation = "cond_d_max";
            continue;
        }
        let set = TargetSet::from_truth(mixing, diagonals)?;
        let xi = vec![CMatrix::zeros(spec.n); spec.k];
        let exact = ProblemInstance {
            meta: InstanceMeta { mou, cond_a, cond_d, pl_db: vec![f64::INFINITY; spec.k] },
            set,
            xi,
        };
        return match spec.pl_db {
            Some(pl) => Ok(add_noise(&exact, pl, &mut stream_rng(spec.seed, run, true))),
            None => Ok(exact),
        };
    }
    Err(NojdError::Unattainable { bound: last_violation, attempts: MAX_ATTEMPTS })
}

// Log-linear reshaping of the singular values onto the target condition
// number, keeping the singular vectors and the largest singular value.
fn shape_condition(a: CMatrix, spec: &ScenarioSpec) -> Result<CMatrix> {
    let cond = a.condition_number();
    let target = match (spec.cond_a_min, spec.cond_a_max) {
        (Some(lo), Some(hi)) if !(cond > lo && cond < hi) => (lo * hi).sqrt(),
        (Some(lo), None) if !(cond > lo) => 1.1 * lo,
        (None, Some(hi)) if !(cond < hi) => 0.9 * hi,
        _ => return Ok(a),
    };
    if !cond.is_finite() || cond <= 1.0 {
        return Ok(a);
    }
    let svd = a.to_nalgebra().svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let s = &svd.singular_values;
    let s_max = s.max();
    let ratio = target.ln() / cond.ln();
    let shaped: Vec<Complex64> = s
        .iter()
        .map(|&x| Complex64::new(s_max * ((x / s_max).ln() * ratio).exp(), 0.0))
        .collect();
    let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(shaped));
    Ok(CMatrix::from_nalgebra(&(u * sigma * vt)))
}

// `diagonals[k][i] = D_k(i,i)` with the stress rewrites applied; `None` when
// a rewrite could not reach its bound.
fn draw_diagonals(spec: &ScenarioSpec, rng: &mut impl Rng) -> Result<Option<Vec<Vec<Complex64>>>> {
    let (n, k) = (spec.n, spec.k);
    let mut d: Vec<Vec<Complex64>> = (0..k).map(|_| (0..n).map(|_| complex_normal(rng, 1.0)).collect()).collect();
    if let Some(lo) = spec.cond_d_min {
        for dk in d.iter_mut() {
            let mut ok = false;
            for _ in 0..MAX_ATTEMPTS {
                dk[1] = complex_normal(rng, COND_D_STRESS_STD);
                if metrics::diagonal_condition(dk) > lo {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Ok(None);
            }
        }
    }
    if let Some(lo) = spec.mou_min {
        let zeta: Vec<Complex64> = (0..k).map(|_| complex_normal(rng, 1.0)).collect();
        let target = 1.0 - 0.5 * (1.0 - lo);
        let with_amplitude = |amp: f64| -> Vec<Vec<Complex64>> {
            let mut out = d.clone();
            for (dk, z) in out.iter_mut().zip(&zeta) {
                dk[1] = dk[0] + z * amp;
            }
            out
        };
        let pair_corr = |dd: &[Vec<Complex64>]| -> f64 {
            let a: Vec<Complex64> = dd.iter().map(|x| x[0]).collect();
            let b: Vec<Complex64> = dd.iter().map(|x| x[1]).collect();
            metrics::mou(&[a, b]).unwrap_or(1.0)
        };
        let (mut lo_amp, mut hi_amp) = (0.0, 1.0);
        if pair_corr(&with_amplitude(hi_amp)) >= target {
            lo_amp = hi_amp;
        } else {
            for _ in 0..60 {
                let mid = 0.5 * (lo_amp + hi_amp);
                if pair_corr(&with_amplitude(mid)) >= target {
                    lo_amp = mid;
                } else {
                    hi_amp = mid;
                }
            }
        }
        d = with_amplitude(lo_amp);
    }
    Ok(Some(d))
}

/// Fresh Gaussian noise at the requested per-matrix level:
/// `Ξ_k = β_k N_k` with `10·log₁₀(‖A D_k Aᴴ‖_F / ‖Ξ_k‖_F) = pl_db`.
/// `pl_db = +∞` returns the exact problem.
pub fn add_noise(instance: &ProblemInstance, pl_db: f64, rng: &mut impl Rng) -> ProblemInstance {
    let truth = instance.truth().clone();
    let exact = instance.exact_matrices();
    let n = instance.set.n();
    let xi: Vec<CMatrix> = exact
        .iter()
        .map(|s| {
            if pl_db == f64::INFINITY {
                return CMatrix::zeros(n);
            }
            let noise = random_matrix(n, rng);
            let beta = s.norm() / (noise.norm() * 10f64.powf(pl_db / 10.0));
            noise.scale(Complex64::new(beta, 0.0))
        })
        .collect();
    let matrices: Vec<CMatrix> = exact.iter().zip(&xi).map(|(s, x)| s.add(x)).collect();
    let pl = metrics::perturbation_level(&exact, &xi).expect("lengths agree");
    let set = TargetSet::new(matrices)
        .and_then(|s| s.with_truth(truth))
        .expect("dimensions preserved");
    ProblemInstance {
        set,
        xi,
        meta: InstanceMeta { pl_db: pl, ..instance.meta.clone() },
    }
}

/// Noisy version of instance `run`, using the run's dedicated noise stream.
pub fn add_noise_run(instance: &ProblemInstance, pl_db: f64, seed: u64, run: u64) -> ProblemInstance {
    add_noise(instance, pl_db, &mut stream_rng(seed, run, true))
}
