//! Real-embedding pipelines: the modified JDi sweep over all real index
//! pairs, its structure-preserving paired variant, and the basic complex
//! generalization that recovers a complex diagonalizer by column pairing.

use num_complex::Complex64;

use crate::cjdi::ComplexDiagonalizer;
use crate::embedding::{hermitian_split, RealEmbeddedSet, TargetSet};
use crate::error::{NojdError, Result};
use crate::linalg::{CMatrix, RMatrix};
use crate::metrics;
use crate::rotations::{
    accumulate_real_pair, apply_rotation_real, build_plane_criterion, real_accumulate_flops,
    real_update_flops, rotate_rows_real, rotate_symmetric_plane, solve_pair, solve_rotation, Family,
    CRITERION_FLOPS_PER_MATRIX,
};

/// Stopping rule of the sweep loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// Stop once a sweep's largest `max(|sinh y|, |sin θ|)` is `≤ tau`.
    pub tau: f64,
    pub max_sweeps: usize,
    /// Keep every sweep record; otherwise only the last one is kept.
    pub record_trajectory: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            tau: 1e-8,
            max_sweeps: 100,
            record_trajectory: true,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(NojdError::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if self.max_sweeps == 0 {
            return Err(NojdError::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a single sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepStats {
    /// Largest rotation magnitude over the non-skipped pairs.
    pub max_rotation: f64,
    /// Pairs whose pencil was degenerate.
    pub skipped: usize,
    /// Pair solves performed.
    pub visits: usize,
    pub flops: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    /// One-based sweep number.
    pub sweep: usize,
    pub max_rotation: f64,
    pub c_ils: f64,
    pub pi: Option<f64>,
    pub skipped: usize,
    pub flops: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub records: Vec<SweepRecord>,
    pub sweeps: usize,
    pub converged: bool,
    pub initial_c_ils: f64,
    pub initial_pi: Option<f64>,
    /// Set when column pairing found no reliable partner for some column.
    pub pairing_warning: bool,
}

impl RunReport {
    pub fn final_record(&self) -> Option<&SweepRecord> {
        self.records.last()
    }

    pub fn final_pi(&self) -> Option<f64> {
        self.final_record().and_then(|r| r.pi).or(self.initial_pi)
    }

    /// First sweep after which PI is below `threshold`.
    pub fn sweeps_to_pi(&self, threshold: f64) -> Option<usize> {
        if self.initial_pi.is_some_and(|p| p < threshold) {
            return Some(0);
        }
        self.records
            .iter()
            .find(|r| r.pi.is_some_and(|p| p < threshold))
            .map(|r| r.sweep)
    }

    pub fn total_flops(&self) -> u64 {
        self.records.iter().map(|r| r.flops).sum()
    }
}

/// A solver that advances one sweep at a time.
pub trait Sweeper {
    fn sweep(&mut self) -> Result<SweepStats>;
    fn c_ils(&self) -> f64;
    fn pi(&self) -> Option<f64>;
    fn sweeps_done(&self) -> usize;
}

/// Drive a solver until the stopping rule fires.
pub fn run_sweeps<S: Sweeper + ?Sized>(solver: &mut S, cfg: &SweepConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut report = RunReport {
        initial_c_ils: solver.c_ils(),
        initial_pi: solver.pi(),
        ..Default::default()
    };
    while report.sweeps < cfg.max_sweeps {
        let stats = solver.sweep()?;
        report.sweeps += 1;
        let record = SweepRecord {
            sweep: report.sweeps,
            max_rotation: stats.max_rotation,
            c_ils: solver.c_ils(),
            pi: solver.pi(),
            skipped: stats.skipped,
            flops: stats.flops,
        };
        if !cfg.record_trajectory {
            report.records.clear();
        }
        report.records.push(record);
        if stats.max_rotation <= cfg.tau {
            report.converged = true;
            break;
        }
    }
    Ok(report)
}

/// Accumulated real transform `𝓥`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealDiagonalizer {
    pub v: RMatrix,
}

impl RealDiagonalizer {
    pub fn det_modulus(&self) -> f64 {
        self.v.determinant().abs()
    }

    /// Fails when `|det 𝓥|` left `[1e-6, 1e6]`.
    pub fn check(&self) -> Result<()> {
        let d = self.det_modulus();
        if (1e-6..=1e6).contains(&d) {
            Ok(())
        } else {
            Err(NojdError::Singular)
        }
    }
}

fn symmetric_off_diag(mats: &[RMatrix]) -> f64 {
    mats.iter().map(RMatrix::off_diag_sqr).sum()
}

/// Modified JDi on a set of real symmetric matrices, visiting every pair
/// `p < q` of the full dimension.
#[derive(Debug, Clone)]
pub struct JdiSolver {
    mats: Vec<RMatrix>,
    v: RMatrix,
    sweeps: usize,
}

impl JdiSolver {
    pub fn new(mats: Vec<RMatrix>) -> Result<Self> {
        let dim = mats.first().ok_or(NojdError::EmptySet)?.n();
        if dim < 2 {
            return Err(NojdError::DimensionTooSmall { min: 2, actual: dim });
        }
        for m in &mats {
            if m.n() != dim {
                return Err(NojdError::DimensionMismatch { expected: dim, actual: m.n() });
            }
            if !m.is_finite() {
                return Err(NojdError::NonFinite { sweep: 0, i: 0, j: 0, family: None });
            }
        }
        Ok(Self {
            mats,
            v: RMatrix::identity(dim),
            sweeps: 0,
        })
    }

    pub fn from_embedded(set: &RealEmbeddedSet) -> Result<Self> {
        Self::new(set.matrices().to_vec())
    }

    pub fn working_set(&self) -> &[RMatrix] {
        &self.mats
    }

    pub fn diagonalizer(&self) -> RealDiagonalizer {
        RealDiagonalizer { v: self.v.clone() }
    }
}

impl Sweeper for JdiSolver {
    fn sweep(&mut self) -> Result<SweepStats> {
        let dim = self.v.n();
        let count = self.mats.len() as u64;
        let mut stats = SweepStats::default();
        self.sweeps += 1;
        for p in 0..dim {
            for q in p + 1..dim {
                let rot = solve_rotation(&build_plane_criterion(&self.mats, p, q));
                stats.visits += 1;
                stats.flops += count * CRITERION_FLOPS_PER_MATRIX;
                if rot.skipped {
                    stats.skipped += 1;
                    continue;
                }
                stats.max_rotation = stats.max_rotation.max(rot.magnitude());
                if rot.is_identity() {
                    continue;
                }
                for m in &mut self.mats {
                    rotate_symmetric_plane(m, p, q, &rot);
                    if !(m.get(p, p).is_finite() && m.get(q, q).is_finite()) {
                        return Err(NojdError::NonFinite { sweep: self.sweeps, i: p, j: q, family: None });
                    }
                }
                rotate_rows_real(&mut self.v, p, q, &rot);
                stats.flops += count * real_update_flops(dim) + real_accumulate_flops(dim);
            }
        }
        Ok(stats)
    }

    /// Off-diagonal mass of the working matrices.
    fn c_ils(&self) -> f64 {
        symmetric_off_diag(&self.mats)
    }

    fn pi(&self) -> Option<f64> {
        None
    }

    fn sweeps_done(&self) -> usize {
        self.sweeps
    }
}

/// Modified JDi on the embedded set.
pub fn jdi_modified(set: &RealEmbeddedSet, cfg: &SweepConfig) -> Result<(RealDiagonalizer, RunReport)> {
    let mut solver = JdiSolver::from_embedded(set)?;
    let report = run_sweeps(&mut solver, cfg)?;
    Ok((solver.diagonalizer(), report))
}

/// The embedded pipeline restricted to the structure-preserving paired
/// rotations, in the same schedule as the complex algorithm. Its working set
/// stays an exact real embedding throughout.
#[derive(Debug, Clone)]
pub struct PairedRealSolver {
    set: RealEmbeddedSet,
    v: RMatrix,
    sweeps: usize,
}

impl PairedRealSolver {
    pub fn new(set: RealEmbeddedSet) -> Self {
        let dim = 2 * set.n();
        Self {
            set,
            v: RMatrix::identity(dim),
            sweeps: 0,
        }
    }

    pub fn working_set(&self) -> &RealEmbeddedSet {
        &self.set
    }

    pub fn diagonalizer(&self) -> RealDiagonalizer {
        RealDiagonalizer { v: self.v.clone() }
    }

    /// Complex `V` with `f(V) = 𝓥`.
    pub fn complex_diagonalizer(&self) -> Result<ComplexDiagonalizer> {
        Ok(ComplexDiagonalizer::new(crate::embedding::real_unembed(&self.v)?))
    }
}

impl Sweeper for PairedRealSolver {
    fn sweep(&mut self) -> Result<SweepStats> {
        let n = self.set.n();
        let count = self.set.len() as u64;
        let mut stats = SweepStats::default();
        self.sweeps += 1;
        for i in 0..n {
            for j in i + 1..n {
                for family in [Family::RealPart, Family::ImagPart] {
                    let sol = solve_pair(&self.set, i, j, family);
                    stats.visits += 1;
                    stats.flops += count * CRITERION_FLOPS_PER_MATRIX;
                    if sol.rotation.skipped {
                        stats.skipped += 1;
                        continue;
                    }
                    stats.max_rotation = stats.max_rotation.max(sol.rotation.magnitude());
                    if sol.rotation.is_identity() {
                        continue;
                    }
                    apply_rotation_real(&mut self.set, &sol);
                    accumulate_real_pair(&mut self.v, &sol);
                    stats.flops += 2 * (count * real_update_flops(2 * n) + real_accumulate_flops(2 * n));
                    let ok = self.set.matrices().iter().all(|m| m.get(i, i).is_finite() && m.get(j, j).is_finite());
                    if !ok {
                        return Err(NojdError::NonFinite { sweep: self.sweeps, i, j, family: Some(family) });
                    }
                }
            }
        }
        Ok(stats)
    }

    fn c_ils(&self) -> f64 {
        match self.set.unembed() {
            Ok(h) => h.recombine().iter().map(CMatrix::off_diag_sqr).sum(),
            Err(_) => f64::NAN,
        }
    }

    fn pi(&self) -> Option<f64> {
        None
    }

    fn sweeps_done(&self) -> usize {
        self.sweeps
    }
}

/// Result of matching the `2N` real columns into `N` complex ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    /// `(p, q)` real column indices per recovered complex column.
    pub pairs: Vec<(usize, usize)>,
    /// Pairing residual in `[0, 1]` per pair (0: exact partner).
    pub residuals: Vec<f64>,
    /// Recovered complex columns, unit norm, first significant entry real-positive.
    pub mixing: CMatrix,
    pub warning: bool,
}

impl Pairing {
    /// Column order `[p_0 … p_{N−1}, q_0 … q_{N−1}]` putting each pair at `(i, i+N)`.
    pub fn permutation(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).chain(self.pairs.iter().map(|p| p.1)).collect()
    }
}

/// Residual above which a best match is reported as unreliable.
pub const PAIRING_WARNING: f64 = 0.5;

/// Match the columns of a real `2N × 2N` estimate of `f(A)`, up to column
/// permutation and per-pair 2×2 mixing, back into complex columns.
///
/// Columns `c` and `c'` belong together exactly when `c'` lies in
/// `span{c, J c}` with `J[t; b] = [−b; t]`. With unit columns the residual of
/// the best least-squares fit is `1 − ⟨c', c⟩² − ⟨c', Jc⟩²`. Matching is
/// greedy in column order; ties go to the lowest index.
pub fn pair_columns(a_real: &RMatrix) -> Result<Pairing> {
    let dim = a_real.n();
    if dim % 2 != 0 || dim < 4 {
        return Err(NojdError::DimensionTooSmall { min: 4, actual: dim });
    }
    let n = dim / 2;
    let cols: Vec<Vec<f64>> = (0..dim)
        .map(|c| {
            let col: Vec<f64> = (0..dim).map(|r| a_real.get(r, c)).collect();
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                Err(NojdError::ZeroLine { index: c })
            } else {
                Ok(col.iter().map(|x| x / norm).collect())
            }
        })
        .collect::<Result<_>>()?;
    let rotated: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| (0..dim).map(|r| if r < n { -c[r + n] } else { c[r - n] }).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut used = vec![false; dim];
    let mut pairs = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for p in 0..dim {
        if used[p] {
            continue;
        }
        used[p] = true;
        let mut best: Option<(usize, f64)> = None;
        for q in 0..dim {
            if used[q] {
                continue;
            }
            let r = (1.0 - dot(&cols[q], &cols[p]).powi(2) - dot(&cols[q], &rotated[p]).powi(2)).max(0.0);
            if best.is_none_or(|(_, b)| r < b) {
                best = Some((q, r));
            }
        }
        let (q, r) = best.expect("an even number of columns leaves a partner");
        used[q] = true;
        pairs.push((p, q));
        residuals.push(r);
    }

    let mut mixing = CMatrix::zeros(n);
    for (k, &(p, _)) in pairs.iter().enumerate() {
        let col: Vec<Complex64> = (0..n).map(|r| Complex64::new(cols[p][r], -cols[p][r + n])).collect();
        for (r, z) in normalize_column(col).into_iter().enumerate() {
            mixing.set(r, k, z);
        }
    }
    let warning = residuals.iter().any(|&r| r > PAIRING_WARNING);
    Ok(Pairing { pairs, residuals, mixing, warning })
}

/// Unit norm, first significant entry real-positive.
pub(crate) fn normalize_column(mut col: Vec<Complex64>) -> Vec<Complex64> {
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return col;
    }
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = col.iter().find(|z| z.norm() > 1e-8 * max).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    for z in &mut col {
        *z = *z * phase / norm;
    }
    col
}

/// Complex diagonalizer from a real one: pairs the rows of `𝓥`, then
/// conjugate-transposes the recovered columns.
pub fn retrieve_complex(v_real: &RMatrix) -> Result<(CMatrix, Pairing)> {
    let pairing = pair_columns(&v_real.transpose())?;
    Ok((pairing.mixing.adjoint(), pairing))
}

/// Basic generalization: split, embed, run modified JDi, recover the complex
/// diagonalizer by row pairing.
#[derive(Debug, Clone)]
pub struct BasicSolver {
    jdi: JdiSolver,
    target: TargetSet,
}

impl BasicSolver {
    pub fn new(target: &TargetSet) -> Result<Self> {
        let embedded = hermitian_split(target).embed();
        Ok(Self {
            jdi: JdiSolver::from_embedded(&embedded)?,
            target: target.clone(),
        })
    }

    pub fn real_solver(&self) -> &JdiSolver {
        &self.jdi
    }

    pub fn complex_diagonalizer(&self) -> Result<(ComplexDiagonalizer, Pairing)> {
        let (v, pairing) = retrieve_complex(&self.jdi.v)?;
        Ok((ComplexDiagonalizer::new(v), pairing))
    }
}

impl Sweeper for BasicSolver {
    fn sweep(&mut self) -> Result<SweepStats> {
        self.jdi.sweep()
    }

    /// Criterion of the recovered complex diagonalizer on the original set.
    fn c_ils(&self) -> f64 {
        match retrieve_complex(&self.jdi.v) {
            Ok((v, _)) => metrics::c_ils(&v, &self.target),
            Err(_) => f64::NAN,
        }
    }

    fn pi(&self) -> Option<f64> {
        let truth = self.target.truth()?;
        let (v, _) = retrieve_complex(&self.jdi.v).ok()?;
        metrics::global_performance(&v, &truth.mixing).ok()
    }

    fn sweeps_done(&self) -> usize {
        self.jdi.sweeps
    }
}

/// Table-driven basic generalization of JDi to complex targets.
pub fn basic_generalized_jdi(set: &TargetSet, cfg: &SweepConfig) -> Result<(ComplexDiagonalizer, RunReport)> {
    let mut solver = BasicSolver::new(set)?;
    let mut report = run_sweeps(&mut solver, cfg)?;
    let (v, pairing) = solver.complex_diagonalizer()?;
    report.pairing_warning = pairing.warning;
    Ok((v, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_complex(n: usize, rng: &mut impl Rng) -> CMatrix {
        CMatrix::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::default().validate().is_ok());
        assert!(SweepConfig { tau: 0.0, ..Default::default() }.validate().is_err());
        assert!(SweepConfig { max_sweeps: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn diagonal_input_converges_at_once() {
        let d = vec![
            vec![Complex64::new(1.0, 0.5), Complex64::new(-2.0, 0.1), Complex64::new(0.3, 1.0)],
            vec![Complex64::new(0.2, -1.0), Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)],
        ];
        let set = TargetSet::from_truth(CMatrix::identity(3), d).unwrap();
        let embedded = hermitian_split(&set).embed();
        let (v, report) = jdi_modified(&embedded, &SweepConfig::default()).unwrap();
        assert_eq!(report.sweeps, 1);
        assert!(report.converged);
        assert_eq!(v.v, RMatrix::identity(6));

        let (vc, report) = basic_generalized_jdi(&set, &SweepConfig::default()).unwrap();
        assert_eq!(report.sweeps, 1);
        assert!(report.final_pi().unwrap() < 1e-12);
        assert!(metrics::performance_index(&vc.v).unwrap() < 1e-12);
    }

    #[test]
    fn infinite_tau_runs_one_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_complex(3, &mut rng);
        let d = (0..3).map(|_| (0..3).map(|_| Complex64::new(rng.random(), rng.random())).collect()).collect();
        let set = TargetSet::from_truth(a, d).unwrap();
        let cfg = SweepConfig { tau: f64::INFINITY, ..Default::default() };
        let (_, report) = basic_generalized_jdi(&set, &cfg).unwrap();
        assert_eq!(report.sweeps, 1);
    }

    #[test]
    fn unscrambled_embedding_pairs_i_with_i_plus_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_complex(4, &mut rng);
        let pairing = pair_columns(&embed(&a)).unwrap();
        assert_eq!(pairing.pairs, vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
        assert!(!pairing.warning);
        assert!(pairing.residuals.iter().all(|&r| r < 1e-12));
        let g = a.inverse().unwrap().matmul(&pairing.mixing);
        assert!(metrics::performance_index(&g).unwrap() < 1e-20);
        assert_eq!(pairing.permutation(), vec![0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn zero_column_is_rejected() {
        let mut m = RMatrix::identity(4);
        m.set(2, 2, 0.0);
        assert_eq!(pair_columns(&m), Err(NojdError::ZeroLine { index: 2 }));
    }

    #[test]
    fn scale_fixing_is_deterministic() {
        let col = normalize_column(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -2.0), Complex64::new(1.0, 1.0)]);
        assert_eq!(col[0], Complex64::new(0.0, 0.0));
        assert!((col[1] - Complex64::new(2.0 / 6f64.sqrt(), 0.0)).norm() < 1e-15);
        let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-15);
    }
}
