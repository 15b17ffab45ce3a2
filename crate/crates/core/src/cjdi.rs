//! CJDi: Jacobi-like sweeps over complex index pairs with two
//! structure-preserving rotation families per pair, run directly on the
//! Hermitian split of the targets.

use crate::embedding::{hermitian_split, HermitianSet, TargetSet};
use crate::error::{NojdError, Result};
use crate::jdi::{run_sweeps, RunReport, SweepConfig, SweepStats, Sweeper};
use crate::linalg::CMatrix;
use crate::metrics;
use crate::rotations::{
    accumulate_complex, apply_rotation_complex, complex_accumulate_flops, complex_update_flops, solve_pair,
    Family, CRITERION_FLOPS_PER_MATRIX,
};

/// Accumulated complex transform `V`; `V M_k Vᴴ` is (nearly) diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDiagonalizer {
    pub v: CMatrix,
}

impl ComplexDiagonalizer {
    pub fn new(v: CMatrix) -> Self {
        Self { v }
    }

    pub fn det_modulus(&self) -> f64 {
        self.v.determinant().norm()
    }

    /// Fails when `|det V|` left `[1e-6, 1e6]`.
    pub fn check(&self) -> Result<()> {
        let d = self.det_modulus();
        if (1e-6..=1e6).contains(&d) {
            Ok(())
        } else {
            Err(NojdError::Singular)
        }
    }
}

/// `Â = V⁻¹`.
pub fn mixing_estimate(d: &ComplexDiagonalizer) -> Result<CMatrix> {
    d.v.inverse()
}

/// Stepping CJDi solver.
#[derive(Debug, Clone)]
pub struct CjdiSolver {
    set: HermitianSet,
    v: CMatrix,
    mixing: Option<CMatrix>,
    sweeps: usize,
}

impl CjdiSolver {
    pub fn new(target: &TargetSet) -> Result<Self> {
        if let Some(k) = target.matrices().iter().position(|m| !m.is_finite()) {
            return Err(NojdError::NonFinite { sweep: 0, i: k, j: k, family: None });
        }
        Ok(Self {
            set: hermitian_split(target),
            v: CMatrix::identity(target.n()),
            mixing: target.truth().map(|t| t.mixing.clone()),
            sweeps: 0,
        })
    }

    /// The working matrices `V M̃ Vᴴ`.
    pub fn working_set(&self) -> &HermitianSet {
        &self.set
    }

    pub fn diagonalizer(&self) -> ComplexDiagonalizer {
        ComplexDiagonalizer::new(self.v.clone())
    }
}

impl Sweeper for CjdiSolver {
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
                    apply_rotation_complex(&mut self.set, &sol);
                    accumulate_complex(&mut self.v, &sol);
                    stats.flops += count * complex_update_flops(n) + complex_accumulate_flops(n);
                    let ok = self.set.matrices().iter().all(|m| {
                        let (a, b) = (m.get(i, i), m.get(j, j));
                        a.re.is_finite() && b.re.is_finite()
                    });
                    if !ok {
                        return Err(NojdError::NonFinite { sweep: self.sweeps, i, j, family: Some(family) });
                    }
                }
            }
        }
        Ok(stats)
    }

    /// `Σ_k ‖off(V M_k Vᴴ)‖²`, read off the recombined working set.
    fn c_ils(&self) -> f64 {
        self.set.recombine().iter().map(CMatrix::off_diag_sqr).sum()
    }

    fn pi(&self) -> Option<f64> {
        let a = self.mixing.as_ref()?;
        metrics::global_performance(&self.v, a).ok()
    }

    fn sweeps_done(&self) -> usize {
        self.sweeps
    }
}

/// Run CJDi to the stopping rule.
pub fn cjdi(set: &TargetSet, cfg: &SweepConfig) -> Result<(ComplexDiagonalizer, RunReport)> {
    let mut solver = CjdiSolver::new(set)?;
    let report = run_sweeps(&mut solver, cfg)?;
    Ok((solver.diagonalizer(), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn diagonal_inputs_need_one_sweep() {
        let d = vec![
            vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 2.0)],
        ];
        let set = TargetSet::from_truth(CMatrix::identity(2), d).unwrap();
        let (v, report) = cjdi(&set, &SweepConfig::default()).unwrap();
        assert_eq!(report.sweeps, 1);
        assert!(report.converged);
        assert_eq!(v.v, CMatrix::identity(2));
    }

    #[test]
    fn mixing_estimate_inverts() {
        assert_eq!(mixing_estimate(&ComplexDiagonalizer::new(CMatrix::identity(3))).unwrap(), CMatrix::identity(3));
        let two = CMatrix::identity(3).scale(Complex64::new(2.0, 0.0));
        let half = mixing_estimate(&ComplexDiagonalizer::new(two)).unwrap();
        assert!(half.max_abs_diff(&CMatrix::identity(3).scale(Complex64::new(0.5, 0.0))) < 1e-15);
        assert_eq!(mixing_estimate(&ComplexDiagonalizer::new(CMatrix::zeros(2))), Err(NojdError::Singular));
    }

    #[test]
    fn two_by_two_real_mixing_is_recovered() {
        let a = CMatrix::from_fn(2, |r, c| Complex64::new([[1.0, 0.4], [-0.3, 0.9]][r][c], 0.2 * (r + c) as f64));
        let d = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0)],
            vec![Complex64::new(-1.0, 0.5), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(0.3, 0.0), Complex64::new(0.0, -1.0)],
        ];
        let set = TargetSet::from_truth(a, d).unwrap();
        let (v, report) = cjdi(&set, &SweepConfig::default()).unwrap();
        assert!(report.converged);
        assert!(report.final_pi().unwrap() < 1e-16);
        assert!((v.det_modulus() - 1.0).abs() < 1e-10);
    }
}
