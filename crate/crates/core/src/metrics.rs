//! Scoring and diagnostics.

use num_complex::Complex64;

use crate::embedding::TargetSet;
use crate::error::{NojdError, Result};
use crate::linalg::CMatrix;

/// Performance index of a global matrix `G = V·A`, with squared moduli:
///
/// `PI = 1/(2N(N−1)) · [Σ_n (Σ_m |G(n,m)|²/max_k |G(n,k)|² − 1) + Σ_n (Σ_m |G(m,n)|²/max_k |G(k,n)|² − 1)]`.
///
/// Zero exactly for generalized permutations.
pub fn performance_index(g: &CMatrix) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(NojdError::DimensionTooSmall { min: 2, actual: n });
    }
    let abs2 = |r: usize, c: usize| {
        let z = g.get(r, c);
        z.re * z.re + z.im * z.im
    };
    let mut total = 0.0;
    for r in 0..n {
        let (sum, max) = (0..n).map(|c| abs2(r, c)).fold((0.0, 0.0f64), |(s, m), x| (s + x, m.max(x)));
        if max == 0.0 {
            return Err(NojdError::ZeroLine { index: r });
        }
        total += sum / max - 1.0;
    }
    for c in 0..n {
        let (sum, max) = (0..n).map(|r| abs2(r, c)).fold((0.0, 0.0f64), |(s, m), x| (s + x, m.max(x)));
        if max == 0.0 {
            return Err(NojdError::ZeroLine { index: c });
        }
        total += sum / max - 1.0;
    }
    Ok(total / (2.0 * n as f64 * (n as f64 - 1.0)))
}

/// `PI(V·A)`.
pub fn global_performance(v: &CMatrix, mixing: &CMatrix) -> Result<f64> {
    performance_index(&v.matmul(mixing))
}

// rows d_i = [D_1(i,i), …, D_K(i,i)] from per-matrix diagonals
fn source_signatures(diagonals: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let k = diagonals.len();
    if k == 0 {
        return Err(NojdError::EmptySet);
    }
    let n = diagonals[0].len();
    if let Some(bad) = diagonals.iter().find(|d| d.len() != n) {
        return Err(NojdError::DimensionMismatch { expected: n, actual: bad.len() });
    }
    Ok((0..n).map(|i| diagonals.iter().map(|d| d[i]).collect()).collect())
}

fn max_correlation<T>(vectors: &[Vec<T>], dot: impl Fn(&[T], &[T]) -> f64, norm: impl Fn(&[T]) -> f64) -> Result<f64> {
    let norms: Vec<f64> = vectors.iter().map(|v| norm(v)).collect();
    if let Some(index) = norms.iter().position(|&x| x == 0.0) {
        return Err(NojdError::ZeroVector { index });
    }
    let mut best = 0.0f64;
    for a in 0..vectors.len() {
        for b in a + 1..vectors.len() {
            best = best.max(dot(&vectors[a], &vectors[b]) / (norms[a] * norms[b]));
        }
    }
    Ok(best.min(1.0))
}

/// Modulus of uniqueness: `max_{i<j} |d_iᴴ d_j| / (‖d_i‖‖d_j‖)`, with
/// `diagonals[k]` the diagonal of `D_k`.
pub fn mou(diagonals: &[Vec<Complex64>]) -> Result<f64> {
    let d = source_signatures(diagonals)?;
    max_correlation(
        &d,
        |a, b| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm(),
        |a| a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
    )
}

/// Same correlation on the real stacks `[Re d_i, Im d_i]`, which governs
/// whether the real-embedded problem can tell sources apart: values near 1
/// make column pairing unreliable.
pub fn pairing_mou(diagonals: &[Vec<Complex64>]) -> Result<f64> {
    let stacked: Vec<Vec<f64>> = source_signatures(diagonals)?
        .into_iter()
        .map(|d| d.iter().map(|z| z.re).chain(d.iter().map(|z| z.im)).collect())
        .collect();
    max_correlation(
        &stacked,
        |a, b| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs(),
        |a| a.iter().map(|x| x * x).sum::<f64>().sqrt(),
    )
}

/// Indirect least-squares criterion `Σ_k ‖off(V M_k Vᴴ)‖_F²`.
pub fn c_ils(v: &CMatrix, set: &TargetSet) -> f64 {
    set.matrices().iter().map(|m| v.congruence(m).off_diag_sqr()).sum()
}

/// Largest `‖off(V M_k Vᴴ)‖_F / ‖V M_k Vᴴ‖_F` over the set.
pub fn max_off_diagonal_ratio(v: &CMatrix, set: &TargetSet) -> f64 {
    set.matrices()
        .iter()
        .map(|m| {
            let t = v.congruence(m);
            let total = t.norm();
            if total == 0.0 {
                0.0
            } else {
                t.off_diag_sqr().sqrt() / total
            }
        })
        .fold(0.0, f64::max)
}

/// `10·log₁₀(‖A D_k Aᴴ‖_F / ‖Ξ_k‖_F)` per matrix. A zero noise matrix gives
/// `f64::INFINITY`.
pub fn perturbation_level(exact: &[CMatrix], noise: &[CMatrix]) -> Result<Vec<f64>> {
    if exact.len() != noise.len() {
        return Err(NojdError::DimensionMismatch { expected: exact.len(), actual: noise.len() });
    }
    Ok(exact
        .iter()
        .zip(noise)
        .map(|(s, xi)| {
            let nn = xi.norm();
            if nn == 0.0 {
                f64::INFINITY
            } else {
                10.0 * (s.norm() / nn).log10()
            }
        })
        .collect())
}

/// Condition number of a diagonal matrix given by its entries.
pub fn diagonal_condition(d: &[Complex64]) -> f64 {
    let (lo, hi) = d.iter().map(|z| z.norm()).fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        let mut s = 0;
        while s < idx.len() {
            let mut e = s;
            while e + 1 < idx.len() && v[idx[e + 1]] == v[idx[s]] {
                e += 1;
            }
            let r = 0.5 * (s + e) as f64 + 1.0;
            for &k in &idx[s..=e] {
                out[k] = r;
            }
            s = e + 1;
        }
        out
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

/// Scores of a diagonalizer on a target set. Truth-dependent fields are
/// `None` when the set carries no ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub pi: Option<f64>,
    pub c_ils: f64,
    pub mou: Option<f64>,
    pub cond_a: Option<f64>,
    pub cond_d: Vec<f64>,
    pub pl_db: Vec<f64>,
}

impl ScoreReport {
    pub fn new(v: &CMatrix, set: &TargetSet, pl_db: Vec<f64>) -> Result<Self> {
        let c = c_ils(v, set);
        let Some(truth) = set.truth() else {
            return Ok(Self { pi: None, c_ils: c, mou: None, cond_a: None, cond_d: Vec::new(), pl_db });
        };
        Ok(Self {
            pi: Some(global_performance(v, &truth.mixing)?),
            c_ils: c,
            mou: Some(mou(&truth.diagonals)?),
            cond_a: Some(truth.mixing.condition_number()),
            cond_d: truth.diagonals.iter().map(|d| diagonal_condition(d)).collect(),
            pl_db,
        })
    }
}

impl std::fmt::Display for ScoreReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let opt = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
        writeln!(f, "pi      {}", opt(self.pi))?;
        writeln!(f, "c_ils   {:.6e}", self.c_ils)?;
        writeln!(f, "mou     {}", opt(self.mou))?;
        writeln!(f, "cond_a  {}", opt(self.cond_a))?;
        if !self.cond_d.is_empty() {
            let worst = self.cond_d.iter().cloned().fold(0.0, f64::max);
            writeln!(f, "cond_d  {worst:.6e} (max over {})", self.cond_d.len())?;
        }
        if !self.pl_db.is_empty() {
            let list: Vec<String> = self.pl_db.iter().map(|x| format!("{x:.3}")).collect();
            writeln!(f, "pl_db   {}", list.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_generalized_permutation_score_zero() {
        assert_eq!(performance_index(&CMatrix::identity(4)).unwrap(), 0.0);
        let g = CMatrix::from_fn(3, |r, col| match (r, col) {
            (0, 2) => c(2.0, -1.0),
            (1, 0) => c(0.0, 0.3),
            (2, 1) => c(-5.0, 0.0),
            _ => c(0.0, 0.0),
        });
        assert_eq!(performance_index(&g).unwrap(), 0.0);
    }

    #[test]
    fn all_ones_two_by_two_scores_one() {
        let g = CMatrix::from_fn(2, |_, _| c(1.0, 0.0));
        assert!((performance_index(&g).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_row_is_rejected() {
        let g = CMatrix::from_fn(2, |r, _| if r == 1 { c(0.0, 0.0) } else { c(1.0, 0.0) });
        assert_eq!(performance_index(&g), Err(NojdError::ZeroLine { index: 1 }));
    }

    #[test]
    fn mou_examples() {
        // diagonals[k][i]: d_1 = [1, 0], d_2 = [0, 1]
        let orth = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert_eq!(mou(&orth).unwrap(), 0.0);
        let coll = vec![vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(2.0, 0.0), c(2.0, 2.0)]];
        assert!((mou(&coll).unwrap() - 1.0).abs() < 1e-15);
        let half = vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
        assert!((mou(&half).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let zero = vec![vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert_eq!(mou(&zero), Err(NojdError::ZeroVector { index: 0 }));
    }

    #[test]
    fn pairing_mou_sees_real_collinearity() {
        // d_2 = j·d_1 is complex-collinear but the real stacks are orthogonal
        let d = vec![vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.5, 0.5), c(-0.5, 0.5)]];
        assert!((mou(&d).unwrap() - 1.0).abs() < 1e-15);
        assert!(pairing_mou(&d).unwrap() < 1e-15);
    }

    #[test]
    fn c_ils_of_identity_on_diagonal_set() {
        let set = TargetSet::new(vec![CMatrix::diagonal(&[c(1.0, 2.0), c(3.0, 0.0)])]).unwrap();
        assert_eq!(c_ils(&CMatrix::identity(2), &set), 0.0);
        assert_eq!(c_ils(&CMatrix::zeros(2), &set), 0.0);
    }

    #[test]
    fn perturbation_level_examples() {
        let s = vec![CMatrix::identity(2).scale(c(10.0, 0.0)), CMatrix::identity(2)];
        let xi = vec![CMatrix::identity(2), CMatrix::identity(2)];
        let pl = perturbation_level(&s, &xi).unwrap();
        assert!((pl[0] - 10.0).abs() < 1e-12 && pl[1].abs() < 1e-12);
        let pl = perturbation_level(&s[..1], &[CMatrix::zeros(2)]).unwrap();
        assert!(pl[0].is_infinite());
    }

    #[test]
    fn rank_correlation_handles_order_and_ties() {
        assert!((rank_correlation(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-15);
        assert!((rank_correlation(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert!(rank_correlation(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]) > 0.8);
    }
}
