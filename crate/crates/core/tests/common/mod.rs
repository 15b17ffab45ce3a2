//! Independent reference computations for the integration tests. Nothing here
//! calls into the solver kernels; dense products go through nalgebra.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use nojd::{CMatrix, Family, HermitianSet, RMatrix};

pub fn gauss(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_complex(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |_, _| Complex64::new(gauss(rng), gauss(rng)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = random_complex(rng, n);
    g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0))
}

pub fn random_hermitian_set(rng: &mut impl Rng, n: usize, count: usize) -> HermitianSet {
    HermitianSet::new((0..count).map(|_| random_hermitian(rng, n)).collect()).unwrap()
}

/// `[[Re, Im], [−Im, Re]]`, written out entry by entry.
pub fn embed_dense(m: &CMatrix) -> DMatrix<f64> {
    let n = m.n();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = m.get(r % n, c % n);
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => z.im,
            (false, true) => -z.im,
        }
    })
}

pub fn dense_real(m: &RMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.n(), m.n(), |r, c| m.get(r, c))
}

pub fn dense_complex(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.n(), m.n(), |r, c| m.get(r, c))
}

/// `‖[TL − BR, TR + BL]‖ / ‖M‖`.
pub fn structure_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let mut bad = 0.0;
    for r in 0..n {
        for c in 0..n {
            bad += (m[(r, c)] - m[(r + n, c + n)]).powi(2) + (m[(r, c + n)] + m[(r + n, c)]).powi(2);
        }
    }
    bad.sqrt() / m.norm().max(f64::MIN_POSITIVE)
}

/// `S(y)·G(θ)` from its two factors.
pub fn elementary(theta: f64, y: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    let g = Matrix2::new(c, s, -s, c);
    let sh = Matrix2::new(y.cosh(), y.sinh(), y.sinh(), y.cosh());
    sh * g
}

fn embed_plane(h: &mut DMatrix<f64>, p: usize, q: usize, e: &Matrix2<f64>) {
    h[(p, p)] = e[(0, 0)];
    h[(p, q)] = e[(0, 1)];
    h[(q, p)] = e[(1, 0)];
    h[(q, q)] = e[(1, 1)];
}

pub fn plane_dense(dim: usize, p: usize, q: usize, theta: f64, y: f64) -> DMatrix<f64> {
    let mut h = DMatrix::identity(dim, dim);
    embed_plane(&mut h, p, q, &elementary(theta, y));
    h
}

/// Product of the two plane rotations of a family on the 2N-dimensional space.
pub fn family_dense(n: usize, i: usize, j: usize, family: Family, theta: f64, y: f64) -> DMatrix<f64> {
    let d = 2 * n;
    match family {
        Family::RealPart => plane_dense(d, i, j, theta, y) * plane_dense(d, i + n, j + n, theta, y),
        Family::ImagPart => plane_dense(d, i, j + n, theta, y) * plane_dense(d, j, i + n, theta, -y),
    }
}

/// Criterion vector `v(θ, y)`.
pub fn criterion_vector(theta: f64, y: f64) -> [f64; 3] {
    let ch = (2.0 * y).cosh();
    [(2.0 * y).sinh(), -(2.0 * theta).sin() * ch, (2.0 * theta).cos() * ch]
}

pub fn quad(r: &[[f64; 3]; 3], v: &[f64; 3]) -> f64 {
    (0..3).map(|a| (0..3).map(|b| v[a] * r[a][b] * v[b]).sum::<f64>()).sum()
}

pub fn j_form(v: &[f64; 3]) -> f64 {
    -v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

/// Grid points `θ ∈ (−π/4, π/4]`, `y ∈ [−1, 1]`.
pub fn grid(points: usize) -> Vec<(f64, f64)> {
    let q = std::f64::consts::FRAC_PI_4;
    let mut out = Vec::with_capacity(points * points);
    for a in 0..points {
        let theta = -q + 2.0 * q * (a + 1) as f64 / points as f64;
        for b in 0..points {
            out.push((theta, -1.0 + 2.0 * b as f64 / (points - 1) as f64));
        }
    }
    out
}

/// Performance index with squared moduli, straight from its definition.
pub fn pi_dense(g: &DMatrix<Complex64>) -> f64 {
    let n = g.nrows();
    let p = g.map(|z| z.norm_sqr());
    let mut total = 0.0;
    for r in 0..n {
        let row = p.row(r);
        total += row.sum() / row.max() - 1.0;
    }
    for c in 0..n {
        let col = p.column(c);
        total += col.sum() / col.max() - 1.0;
    }
    total / (2.0 * (n * (n - 1)) as f64)
}

pub fn global_pi(v: &CMatrix, a: &CMatrix) -> f64 {
    pi_dense(&(dense_complex(v) * dense_complex(a)))
}

/// Spearman correlation for samples without ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        for (rank, &i) in idx.iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    }
    let n = x.len() as f64;
    let d2: f64 = ranks(x).iter().zip(ranks(y)).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}
