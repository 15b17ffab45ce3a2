mod common;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nojd::rotations::{
    accumulate_real_pair, apply_rotation_complex, apply_rotation_real, build_plane_criterion, pencil_eigenvalues,
    rotate_symmetric_plane, solve_pair,
};
use nojd::{solve_rotation, CMatrix, CriterionMatrix, Family, RMatrix, Rotation, RotationSolution};

use common::*;

const FAMILIES: [Family; 2] = [Family::RealPart, Family::ImagPart];

fn random_symmetric(rng: &mut impl Rng, dim: usize) -> RMatrix {
    let g = RMatrix::from_fn(dim, |_, _| gauss(rng));
    RMatrix::from_fn(dim, |r, c| 0.5 * (g.get(r, c) + g.get(c, r)))
}

fn random_solution(rng: &mut impl Rng, n: usize, family: Family) -> RotationSolution {
    let i = rng.random_range(0..n - 1);
    RotationSolution {
        i,
        j: rng.random_range(i + 1..n),
        family,
        rotation: Rotation::from_angles(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)),
    }
}

fn angles(rot: &Rotation) -> (f64, f64) {
    (rot.sin_theta.atan2(rot.cos_theta), rot.sinh_y.asinh())
}

fn random_psd(rng: &mut impl Rng, cols: usize) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for _ in 0..cols {
        let w = [gauss(rng), gauss(rng), gauss(rng)];
        for a in 0..3 {
            for b in 0..3 {
                r[a][b] += w[a] * w[b];
            }
        }
    }
    r
}

#[test]
fn criterion_equals_brute_force_off_diagonal_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let dim = 4;
    let mats: Vec<RMatrix> = (0..6).map(|_| random_symmetric(&mut rng, dim)).collect();
    let dense: Vec<DMatrix<f64>> = mats.iter().map(dense_real).collect();
    let (p, q) = (1, 3);
    let r = build_plane_criterion(&mats, p, q);
    let mut worst = 0.0f64;
    for (theta, y) in grid(101) {
        let h = plane_dense(dim, p, q, theta, y);
        let brute: f64 = dense.iter().map(|m| (&h * m * h.transpose())[(p, q)].powi(2)).sum();
        worst = worst.max((quad(&r.r, &criterion_vector(theta, y)) - brute).abs() / brute.max(1.0));
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn real_updates_match_dense_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let n = rng.random_range(2..6);
        let mut set = random_hermitian_set(&mut rng, n, 3).embed();
        let before: Vec<DMatrix<f64>> = set.matrices().iter().map(dense_real).collect();
        let family = FAMILIES[rng.random_range(0..2)];
        let sol = random_solution(&mut rng, n, family);
        let (theta, y) = angles(&sol.rotation);
        let h = family_dense(n, sol.i, sol.j, family, theta, y);
        apply_rotation_real(&mut set, &sol);
        for (m, b) in set.matrices().iter().zip(&before) {
            let expected = &h * b * h.transpose();
            assert!((dense_real(m) - &expected).norm() <= 1e-12 * expected.norm());
        }
        let mut v = RMatrix::from_fn(2 * n, |_, _| gauss(&mut rng));
        let v0 = dense_real(&v);
        accumulate_real_pair(&mut v, &sol);
        assert!((dense_real(&v) - &h * &v0).norm() <= 1e-12 * v0.norm());
    }
}

#[test]
fn single_plane_update_is_a_congruence() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut m = random_symmetric(&mut rng, 5);
    let m0 = dense_real(&m);
    let rot = Rotation::from_angles(0.3, -0.4);
    rotate_symmetric_plane(&mut m, 1, 4, &rot);
    let h = plane_dense(5, 1, 4, 0.3, -0.4);
    assert!((dense_real(&m) - &h * &m0 * h.transpose()).norm() <= 1e-13 * m0.norm());
}

#[test]
fn complex_updates_match_embedded_dense_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..50 {
        let n = rng.random_range(2..6);
        let mut set = random_hermitian_set(&mut rng, n, 2);
        let before: Vec<DMatrix<f64>> = set.matrices().iter().map(embed_dense).collect();
        let family = FAMILIES[rng.random_range(0..2)];
        let sol = random_solution(&mut rng, n, family);
        let (theta, y) = angles(&sol.rotation);
        let h = family_dense(n, sol.i, sol.j, family, theta, y);
        apply_rotation_complex(&mut set, &sol);
        for (m, b) in set.matrices().iter().zip(&before) {
            let expected = &h * b * h.transpose();
            assert!((embed_dense(m) - &expected).norm() <= 1e-12 * expected.norm());
            assert!(m.hermitian_residual() <= 1e-12);
        }
    }
}

#[test]
fn each_family_moves_only_its_own_part_of_the_pair_entry() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for family in FAMILIES {
        let n = 4;
        let before = random_hermitian_set(&mut rng, n, 3);
        let mut set = before.clone();
        let sol = random_solution(&mut rng, n, family);
        apply_rotation_complex(&mut set, &sol);
        let v = sol.rotation.v;
        for (m, m0) in set.matrices().iter().zip(before.matrices()) {
            let (i, j) = (sol.i, sol.j);
            let (a, b, z) = (m0.get(i, i).re, m0.get(j, j).re, m0.get(i, j));
            let new = m.get(i, j);
            match family {
                Family::RealPart => {
                    assert!((new.re - (v[0] * (a + b) / 2.0 + v[1] * (a - b) / 2.0 + v[2] * z.re)).abs() <= 1e-12 * m0.norm());
                    assert!((new.im - z.im).abs() <= 1e-12 * m0.norm());
                }
                Family::ImagPart => {
                    assert!((new.re - z.re).abs() <= 1e-12 * m0.norm());
                    assert!((new.im - (v[0] * (a + b) / 2.0 + v[1] * (a - b) / 2.0 + v[2] * z.im)).abs() <= 1e-12 * m0.norm());
                }
            }
        }
    }
}

#[test]
fn eigenvalues_agree_with_dense_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let j = Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, 1.0, 1.0));
    for _ in 0..500 {
        let cols = rng.random_range(3..7);
        let r = random_psd(&mut rng, cols);
        let dense = Matrix3::from_fn(|a, b| r[a][b]);
        let mut reference: Vec<f64> = (j * dense).complex_eigenvalues().iter().map(|z| z.re).collect();
        reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ours = pencil_eigenvalues(&CriterionMatrix { r }).expect("PSD pencils have real spectra");
        let scale = dense.norm();
        for (x, y) in ours.iter().zip(&reference) {
            assert!((x - y).abs() <= 1e-10 * scale, "{ours:?} vs {reference:?}");
        }
    }
}

#[test]
fn extracted_parameters_reproduce_the_solution_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..500 {
        let cols = rng.random_range(1..7);
        let r = random_psd(&mut rng, cols);
        let rot = solve_rotation(&CriterionMatrix { r });
        let (theta, y) = angles(&rot);
        let rebuilt = criterion_vector(theta, y);
        for k in 0..3 {
            assert!((rebuilt[k] - rot.v[k]).abs() <= 1e-10 * rot.v[k].abs().max(1.0));
        }
        assert!((j_form(&rot.v) - 1.0).abs() <= 1e-12);
        assert!(rot.v[2] >= 0.0);
    }
}

#[test]
fn degenerate_and_trivial_criteria() {
    // only the diagonal-sum direction is penalized: the optimum zeroes it
    let r = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.5]];
    let rot = solve_rotation(&CriterionMatrix { r });
    assert!(!rot.skipped && quad(&r, &rot.v) <= 1e-12);

    let ones = [[1.0; 3]; 3];
    let best = grid(101).into_iter().map(|(t, y)| quad(&ones, &criterion_vector(t, y))).fold(f64::INFINITY, f64::min);
    let got = solve_rotation(&CriterionMatrix { r: ones });
    assert!(quad(&ones, &got.v) <= best + 1e-8);

    let nan = solve_rotation(&CriterionMatrix { r: [[f64::NAN; 3]; 3] });
    assert!(nan.skipped && nan.is_identity());
}

#[test]
fn diagonal_sets_need_no_rotation() {
    let d: Vec<CMatrix> = (0..3)
        .map(|k| CMatrix::diagonal(&[Complex64::new(1.0 + k as f64, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.5, 0.0)]))
        .collect();
    let set = nojd::HermitianSet::new(d).unwrap();
    for family in FAMILIES {
        let sol = solve_pair(&set, 0, 2, family);
        assert!(sol.rotation.is_identity());
    }
}
