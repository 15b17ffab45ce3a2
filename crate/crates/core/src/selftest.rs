//! Quick numerical self-checks of the structural properties the solvers rely
//! on, sized to finish in a few seconds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cjdi::CjdiSolver;
use crate::embedding::{embed, hermitian_split, HermitianSet};
use crate::jdi::{pair_columns, PairedRealSolver, Sweeper};
use crate::linalg::{CMatrix, RMatrix};
use crate::metrics::performance_index;
use crate::problemgen::{generate_run, ScenarioSpec};
use crate::rotations::{
    apply_rotation_real, build_criterion, family_planes, rotate_symmetric_plane, solve_rotation, CriterionMatrix,
    Family, Rotation, RotationSolution,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_hermitian_set(rng: &mut impl Rng, n: usize, count: usize) -> HermitianSet {
    let mats = (0..count)
        .map(|_| {
            let g = CMatrix::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0))
        })
        .collect();
    HermitianSet::new(mats).expect("constructed Hermitian")
}

fn structure_preservation(rng: &mut impl Rng) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let count = rng.random_range(1..=4);
        let mut set = random_hermitian_set(rng, n, count).embed();
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        let rot = Rotation::from_angles(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        for family in [Family::RealPart, Family::ImagPart] {
            apply_rotation_real(&mut set, &RotationSolution { i, j, family, rotation: rot });
            worst = worst.max(set.structure_residual());
        }
    }
    Check {
        name: "paired rotations keep the real block structure",
        passed: worst <= 1e-12,
        detail: format!("worst relative residual {worst:.2e}"),
    }
}

fn criterion_equivalence(rng: &mut impl Rng) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(2..=5);
        let set = random_hermitian_set(rng, n, 3).embed();
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        for family in [Family::RealPart, Family::ImagPart] {
            let (p, q) = family_planes(n, i, j, family).0;
            let (mut diffs, mut fours) = (Vec::new(), Vec::new());
            for a in 0..11 {
                for b in 0..11 {
                    let theta = -std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * (a + 1) as f64 / 11.0;
                    let y = -1.0 + 2.0 * b as f64 / 10.0;
                    let rot = Rotation::from_angles(theta, y);
                    let mut paired = set.clone();
                    apply_rotation_real(&mut paired, &RotationSolution { i, j, family, rotation: rot });
                    let four: f64 = paired
                        .matrices()
                        .iter()
                        .map(|m| {
                            m.get(i, j).powi(2) + m.get(i + n, j + n).powi(2) + m.get(i, j + n).powi(2) + m.get(j, i + n).powi(2)
                        })
                        .sum();
                    let single: f64 = set
                        .matrices()
                        .iter()
                        .map(|m| {
                            let mut s = m.clone();
                            rotate_symmetric_plane(&mut s, p, q, &rot);
                            s.get(p, q).powi(2)
                        })
                        .sum();
                    diffs.push(four - 2.0 * single);
                    fours.push(four);
                }
            }
            let mean4 = fours.iter().sum::<f64>() / fours.len() as f64;
            let md = diffs.iter().sum::<f64>() / diffs.len() as f64;
            let sd = (diffs.iter().map(|d| (d - md).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
            worst = worst.max(sd / mean4.abs().max(f64::MIN_POSITIVE));
        }
    }
    Check {
        name: "four-entry criterion equals twice the single-entry one plus a constant",
        passed: worst <= 1e-10,
        detail: format!("worst relative spread {worst:.2e}"),
    }
}

fn solver_optimality(rng: &mut impl Rng) -> Check {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let cols: Vec<[f64; 3]> = (0..3)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let r = CriterionMatrix::from_columns(cols);
        let got = r.quadratic_form(&solve_rotation(&r).v);
        let mut best = f64::INFINITY;
        for a in 0..61 {
            for b in 0..61 {
                let theta = -std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * (a + 1) as f64 / 61.0;
                let y = -1.0 + 2.0 * b as f64 / 60.0;
                best = best.min(r.quadratic_form(&Rotation::from_angles(theta, y).v));
            }
        }
        worst = worst.max(got - best);
    }
    Check {
        name: "closed-form rotation beats a parameter grid",
        passed: worst <= 1e-8,
        detail: format!("largest excess over grid minimum {worst:.2e}"),
    }
}

fn pipeline_equivalence() -> Check {
    let spec = ScenarioSpec::new(4, 3).with_seed(17);
    let mut worst = 0.0f64;
    let mut failure = None;
    for run in 0..5 {
        let inst = match generate_run(&spec, run) {
            Ok(i) => i,
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        let mut complex = CjdiSolver::new(&inst.set).expect("finite input");
        let mut real = PairedRealSolver::new(hermitian_split(&inst.set).embed());
        for _ in 0..4 {
            if complex.sweep().is_err() || real.sweep().is_err() {
                failure = Some("solver error".into());
                break;
            }
            for (c, r) in complex.working_set().matrices().iter().zip(real.working_set().matrices()) {
                let e = embed(c);
                worst = worst.max(e.max_abs_diff(r) / e.norm().max(f64::MIN_POSITIVE));
            }
        }
    }
    Check {
        name: "complex and paired real pipelines agree sweep by sweep",
        passed: failure.is_none() && worst <= 1e-10,
        detail: failure.unwrap_or_else(|| format!("worst relative difference {worst:.2e}")),
    }
}

fn pairing_recovery(rng: &mut impl Rng) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(2..=6);
        let a = CMatrix::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let fa = embed(&a);
        // rotate within each column pair, then permute all 2N columns
        let mut mixed = RMatrix::zeros(2 * n);
        for k in 0..n {
            let (c, s) = rng.random_range(0.0..std::f64::consts::TAU).sin_cos();
            let scale = rng.random_range(0.5..2.0);
            for r in 0..2 * n {
                let (x, y) = (fa.get(r, k), fa.get(r, k + n));
                mixed.set(r, k, scale * (c * x - s * y));
                mixed.set(r, k + n, scale * (s * x + c * y));
            }
        }
        let mut perm: Vec<usize> = (0..2 * n).collect();
        for k in (1..perm.len()).rev() {
            perm.swap(k, rng.random_range(0..=k));
        }
        let scrambled = RMatrix::from_fn(2 * n, |r, c| mixed.get(r, perm[c]));
        let pi = pair_columns(&scrambled)
            .ok()
            .and_then(|p| p.mixing.inverse().ok())
            .and_then(|inv| performance_index(&inv.matmul(&a)).ok())
            .unwrap_or(f64::INFINITY);
        worst = worst.max(pi);
    }
    Check {
        name: "column pairing recovers scrambled embeddings",
        passed: worst < 1e-10,
        detail: format!("worst PI {worst:.2e}"),
    }
}

fn generation_determinism() -> Check {
    let spec = ScenarioSpec::preset("ref5").expect("preset").with_seed(5).with_pl(Some(20.0));
    let same = generate_run(&spec, 3).ok() == generate_run(&spec, 3).ok();
    Check {
        name: "instance generation is deterministic",
        passed: same,
        detail: if same { "identical" } else { "instances differ" }.into(),
    }
}

fn criterion_symmetry(rng: &mut impl Rng) -> Check {
    let set = random_hermitian_set(rng, 4, 3);
    let ok = [Family::RealPart, Family::ImagPart].iter().all(|&f| {
        let r = build_criterion(&set, 0, 2, f);
        (0..3).all(|a| (0..3).all(|b| r.r[a][b] == r.r[b][a]))
    });
    Check {
        name: "criterion matrices are symmetric",
        passed: ok,
        detail: String::new(),
    }
}

/// Run all checks with a fixed seed.
pub fn run_all() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    vec![
        criterion_symmetry(&mut rng),
        structure_preservation(&mut rng),
        criterion_equivalence(&mut rng),
        solver_optimality(&mut rng),
        pipeline_equivalence(),
        pairing_recovery(&mut rng),
        generation_determinism(),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_all() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
