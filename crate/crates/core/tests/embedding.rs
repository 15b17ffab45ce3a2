mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nojd::embedding::{block_structure_residual, embed};
use nojd::{hermitian_split, real_embed, real_unembed, CMatrix, RMatrix, TargetSet};

use common::*;

fn rel(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_matches_block_formula(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_complex(&mut rng, n);
        prop_assert_eq!(dense_real(&embed(&g)), embed_dense(&g));
    }

    #[test]
    fn embedding_is_multiplicative(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h) = (random_complex(&mut rng, n), random_complex(&mut rng, n));
        let product = embed_dense(&CMatrix::from_nalgebra(&(dense_complex(&g) * dense_complex(&h))));
        prop_assert!(rel(&product, &(embed_dense(&g) * embed_dense(&h))) <= 1e-13);
        prop_assert!(rel(&embed_dense(&g.adjoint()), &embed_dense(&g).transpose()) <= 1e-13);
    }

    #[test]
    fn hermitian_round_trip(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, n);
        let back = real_unembed(&real_embed(&h).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&h) <= 1e-14 * h.norm());
    }

    #[test]
    fn split_parts_are_hermitian_and_recombine(seed in any::<u64>(), n in 2usize..6, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<CMatrix> = (0..k).map(|_| random_complex(&mut rng, n)).collect();
        let split = hermitian_split(&TargetSet::new(mats.clone()).unwrap());
        for (idx, m) in mats.iter().enumerate() {
            let (re, im) = (split.real_part(idx), split.imag_part(idx));
            prop_assert!(re.hermitian_residual() <= 1e-14 && im.hermitian_residual() <= 1e-14);
            let rebuilt = dense_complex(re) + dense_complex(im) * Complex64::new(0.0, 1.0);
            prop_assert!((rebuilt - dense_complex(m)).norm() <= 1e-14 * m.norm());
        }
    }
}

#[test]
fn truth_embeds_with_block_diagonal_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 4;
    let a = random_complex(&mut rng, n);
    let diags: Vec<Vec<Complex64>> =
        (0..3).map(|_| (0..n).map(|_| Complex64::new(gauss(&mut rng), gauss(&mut rng))).collect()).collect();
    let split = hermitian_split(&TargetSet::from_truth(a.clone(), diags.clone()).unwrap());
    let fa = embed_dense(&a);
    for (k, d) in diags.iter().enumerate() {
        for (part, take) in [(split.real_part(k), 0), (split.imag_part(k), 1)] {
            let block = CMatrix::diagonal(&d.iter().map(|z| Complex64::new([z.re, z.im][take], 0.0)).collect::<Vec<_>>());
            let expected = &fa * embed_dense(&block) * fa.transpose();
            assert!(rel(&expected, &embed_dense(part)) <= 1e-12);
        }
    }
}

#[test]
fn embedded_pairs_start_with_zero_and_equal_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 5;
    let set = random_hermitian_set(&mut rng, n, 4).embed();
    for m in set.matrices() {
        for i in 0..n {
            assert_eq!(m.get(i, i + n), 0.0);
            for j in 0..n {
                assert_eq!(m.get(i + n, j + n), m.get(i, j));
                assert_eq!(m.get(i, j + n), -m.get(i + n, j));
            }
        }
    }
}

#[test]
fn structure_violation_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = random_hermitian(&mut rng, 3);
    let mut m = real_embed(&h).unwrap();
    assert!(block_structure_residual(&m) < 1e-15);
    m.set(0, 0, m.get(0, 0) + 1e-3 * h.norm());
    assert!(real_unembed(&m).is_err());
    assert_eq!(real_unembed(&RMatrix::identity(6)).unwrap(), CMatrix::identity(3));
}
