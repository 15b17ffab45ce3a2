//! Elementary Givens/Shear rotation machinery shared by both pipelines.
//!
//! A generalized rotation `H(θ, y) = S(y)·G(θ)` acting on the index plane
//! `(p, q)` has the 2×2 active block
//!
//! ```text
//! [ α11 α12 ]   [ cosh y  sinh y ] [  cos θ  sin θ ]
//! [ α21 α22 ] = [ sinh y  cosh y ] [ −sin θ  cos θ ]
//! ```
//!
//! After `M ↦ H M Hᵀ` the `(p, q)` entry equals `vᵀ w` with
//! `v = [sinh 2y, −sin 2θ cosh 2y, cos 2θ cosh 2y]` and
//! `w = [(M(p,p)+M(q,q))/2, (M(p,p)−M(q,q))/2, M(p,q)]`, so the sum of its
//! squares over a matrix set is the quadratic form `vᵀ R v`, `R = Σ w wᵀ`.
//! It is minimized under `vᵀ J v = 1`, `J = diag(−1, 1, 1)`, by the
//! eigenvector of the median eigenvalue of the pencil `(R, J)`.
//!
//! For complex Hermitian sets two families act on the pair `i < j`:
//! [`Family::RealPart`] uses the real rotation `H₁ = S(0,y)G(0,θ)` and only
//! changes `Re M(i,j)`; [`Family::ImagPart`] uses
//! `H₂ = S(π/2,y)G(π/2,θ) = [[α11, jα12], [−jα21, α22]]` and only changes
//! `Im M(i,j)`. In the real embedding they correspond to the planes
//! `(i, j)` & `(i+N, j+N)` with equal parameters, and `(i, j+N)` &
//! `(j, i+N)` with the shear sign flipped on the second plane.

use num_complex::Complex64;

use crate::embedding::{HermitianSet, RealEmbeddedSet};
use crate::linalg::{CMatrix, RMatrix};

/// Largest accepted `|sinh y|`; bigger shears are treated as degenerate.
pub const MAX_SINH: f64 = 10.0;
/// Backward error (relative to `‖R‖`) above which a complex root pair of the
/// cubic is taken as genuinely complex. Moving a pair `a ± ib` onto a real
/// double root perturbs the coefficients by about `b²`, so a rounding-split
/// double root (`b ~ 1e-8`) still counts as real.
pub const COMPLEX_ROOT_TOL: f64 = 1e-10;
/// Rayleigh-quotient refinements of the median eigenvector.
pub const REFINE_STEPS: usize = 2;
/// Minimum `vᵀJv / ‖v‖²` for a usable eigenvector.
pub const FEASIBILITY_TOL: f64 = 1e-12;
/// Cross-product norm (normalized pencil) below which the median eigenspace
/// is treated as two-dimensional.
pub const CROSS_PRODUCT_TOL: f64 = 1e-14;

/// Criterion gain (relative to `trace R`) below which the identity is kept.
pub const IDENTITY_GAIN_TOL: f64 = 1e-20;

/// Multiply-add pairs spent accumulating one matrix into `R`.
pub const CRITERION_FLOPS_PER_MATRIX: u64 = 8;

/// Which of the two structure-preserving rotations is applied to a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `H₁`: planes `(i, j)` and `(i+N, j+N)`, acts on `Re M(i,j)`.
    RealPart,
    /// `H₂`: planes `(i, j+N)` and `(j, i+N)`, acts on `Im M(i,j)`.
    ImagPart,
}

/// `R = W Wᵀ` for one index pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionMatrix {
    pub r: [[f64; 3]; 3],
}

impl CriterionMatrix {
    pub fn zero() -> Self {
        Self { r: [[0.0; 3]; 3] }
    }

    /// Accumulate `R = Σ w wᵀ` over columns `w`.
    pub fn from_columns<I: IntoIterator<Item = [f64; 3]>>(columns: I) -> Self {
        let mut acc = Accumulator::default();
        for w in columns {
            acc.push(w);
        }
        acc.finish()
    }

    /// Column of `W` from the diagonal entries `M(p,p)`, `M(q,q)` and the
    /// addressed off-diagonal entry.
    #[inline]
    pub fn column(mpp: f64, mqq: f64, off: f64) -> [f64; 3] {
        [0.5 * (mpp + mqq), 0.5 * (mpp - mqq), off]
    }

    pub fn quadratic_form(&self, v: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += v[a] * self.r[a][b] * v[b];
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.r.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.r[0][0] + self.r[1][1] + self.r[2][2]
    }

    /// `J·R`: `R` with its first row negated.
    pub fn pencil(&self) -> [[f64; 3]; 3] {
        let mut m = self.r;
        for x in m[0].iter_mut() {
            *x = -*x;
        }
        m
    }
}

#[derive(Default)]
struct Accumulator {
    s: [f64; 6],
}

impl Accumulator {
    #[inline]
    fn push(&mut self, w: [f64; 3]) {
        self.s[0] += w[0] * w[0];
        self.s[1] += w[0] * w[1];
        self.s[2] += w[0] * w[2];
        self.s[3] += w[1] * w[1];
        self.s[4] += w[1] * w[2];
        self.s[5] += w[2] * w[2];
    }

    fn finish(self) -> CriterionMatrix {
        let s = self.s;
        CriterionMatrix {
            r: [[s[0], s[1], s[2]], [s[1], s[3], s[4]], [s[2], s[4], s[5]]],
        }
    }
}

/// Sets from which a criterion matrix can be assembled for a pair `i < j < N`.
pub trait CriterionSource {
    fn build_criterion(&self, i: usize, j: usize, family: Family) -> CriterionMatrix;
}

impl CriterionSource for HermitianSet {
    fn build_criterion(&self, i: usize, j: usize, family: Family) -> CriterionMatrix {
        let n = self.n();
        let (ii, jj, ij) = (i * n + i, j * n + j, i * n + j);
        let mut acc = Accumulator::default();
        for m in self.matrices() {
            let re = m.re();
            let off = match family {
                Family::RealPart => re[ij],
                Family::ImagPart => m.im()[ij],
            };
            acc.push(CriterionMatrix::column(re[ii], re[jj], off));
        }
        acc.finish()
    }
}

impl CriterionSource for RealEmbeddedSet {
    fn build_criterion(&self, i: usize, j: usize, family: Family) -> CriterionMatrix {
        let (p, q) = family_planes(self.n(), i, j, family).0;
        build_plane_criterion(self.matrices(), p, q)
    }
}

/// Criterion for the complex pair `(i, j)` under `family`.
pub fn build_criterion<S: CriterionSource + ?Sized>(
    set: &S,
    i: usize,
    j: usize,
    family: Family,
) -> CriterionMatrix {
    set.build_criterion(i, j, family)
}

/// Criterion for an arbitrary plane `p < q` of a set of real symmetric matrices.
pub fn build_plane_criterion(mats: &[RMatrix], p: usize, q: usize) -> CriterionMatrix {
    let mut acc = Accumulator::default();
    for m in mats {
        acc.push(CriterionMatrix::column(m.get(p, p), m.get(q, q), m.get(p, q)));
    }
    acc.finish()
}

/// The two real planes touched by a family, and whether the second one uses
/// the negated shear.
pub fn family_planes(n: usize, i: usize, j: usize, family: Family) -> ((usize, usize), (usize, usize), bool) {
    match family {
        Family::RealPart => ((i, j), (i + n, j + n), false),
        Family::ImagPart => ((i, j + n), (j, i + n), true),
    }
}

/// Parameters of one generalized rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    /// Normalized solution vector, `vᵀJv = 1`, `v[2] ≥ 0`.
    pub v: [f64; 3],
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub cosh_y: f64,
    pub sinh_y: f64,
    /// Set when the pencil was degenerate and the identity was substituted.
    pub skipped: bool,
}

impl Rotation {
    pub fn identity() -> Self {
        Self {
            v: [0.0, 0.0, 1.0],
            cos_theta: 1.0,
            sin_theta: 0.0,
            cosh_y: 1.0,
            sinh_y: 0.0,
            skipped: false,
        }
    }

    pub fn skipped() -> Self {
        Self {
            skipped: true,
            ..Self::identity()
        }
    }

    pub fn from_angles(theta: f64, y: f64) -> Self {
        let (s2, c2) = (2.0 * theta).sin_cos();
        let ch2 = (2.0 * y).cosh();
        Self {
            v: [(2.0 * y).sinh(), -s2 * ch2, c2 * ch2],
            cos_theta: theta.cos(),
            sin_theta: theta.sin(),
            cosh_y: y.cosh(),
            sinh_y: y.sinh(),
            skipped: false,
        }
    }

    /// Trig/hyperbolic parameters from a normalized `v` with `v[2] ≥ 0`.
    pub fn from_vector(v: [f64; 3]) -> Self {
        let ch2y = (1.0 + v[0] * v[0]).sqrt();
        let cosh_y = ((1.0 + ch2y) / 2.0).sqrt();
        let sinh_y = v[0] / (2.0 * cosh_y);
        let cos_theta = ((1.0 + v[2] / ch2y) / 2.0).max(0.0).sqrt();
        let sin_theta = -v[1] / (2.0 * cos_theta * ch2y);
        Self {
            v,
            cos_theta,
            sin_theta,
            cosh_y,
            sinh_y,
            skipped: false,
        }
    }

    /// `max(|sinh y|, |sin θ|)`, the stopping statistic.
    pub fn magnitude(&self) -> f64 {
        self.sinh_y.abs().max(self.sin_theta.abs())
    }

    pub fn is_identity(&self) -> bool {
        self.sin_theta == 0.0 && self.sinh_y == 0.0
    }

    /// Same rotation with `y ↦ −y`.
    pub fn with_negated_shear(&self) -> Self {
        Self {
            v: [-self.v[0], self.v[1], self.v[2]],
            sinh_y: -self.sinh_y,
            ..*self
        }
    }

    /// Active block `[α11, α12, α21, α22]` of `S(y)·G(θ)`.
    #[inline]
    pub fn alphas(&self) -> [f64; 4] {
        let (c, s, ch, sh) = (self.cos_theta, self.sin_theta, self.cosh_y, self.sinh_y);
        [ch * c - sh * s, ch * s + sh * c, sh * c - ch * s, ch * c + sh * s]
    }
}

/// A solved rotation for the complex pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSolution {
    pub i: usize,
    pub j: usize,
    pub family: Family,
    pub rotation: Rotation,
}

impl RotationSolution {
    pub fn identity(i: usize, j: usize, family: Family) -> Self {
        Self {
            i,
            j,
            family,
            rotation: Rotation::identity(),
        }
    }
}

/// Build and solve the criterion for `(i, j, family)` on any supported set.
pub fn solve_pair<S: CriterionSource + ?Sized>(set: &S, i: usize, j: usize, family: Family) -> RotationSolution {
    let r = set.build_criterion(i, j, family);
    RotationSolution {
        i,
        j,
        family,
        rotation: solve_rotation(&r),
    }
}

/// Minimize `vᵀRv` under `vᵀJv = 1` in closed form.
pub fn solve_rotation(r: &CriterionMatrix) -> Rotation {
    let norm = r.norm();
    if !norm.is_finite() {
        return Rotation::skipped();
    }
    if norm == 0.0 {
        return Rotation::identity();
    }
    let scaled = CriterionMatrix {
        r: r.r.map(|row| row.map(|x| x / norm)),
    };
    let Some(lambdas) = pencil_eigenvalues(&scaled) else {
        return Rotation::skipped();
    };
    let pencil = scaled.pencil();
    let Some(mut v) = median_eigenvector(&pencil, lambdas[1]) else {
        return Rotation::skipped();
    };
    // The cubic's roots carry coefficient rounding amplified by 1/p'(λ); the
    // pencil's Rayleigh quotient is stationary at eigenvectors, so re-solving
    // with it brings v down to the conditioning of the pencil itself.
    for _ in 0..REFINE_STEPS {
        let lambda = scaled.quadratic_form(&v) / j_form(&v);
        match median_eigenvector(&pencil, lambda) {
            Some(w) => v = if dot3(&w, &v) < 0.0 { w.map(|x| -x) } else { w },
            None => break,
        }
    }
    let q = j_form(&v);
    v = v.map(|x| x / q.sqrt());
    if v[2] < 0.0 {
        v = v.map(|x| -x);
    }
    let rot = Rotation::from_vector(v);
    if !(rot.sinh_y.abs() <= MAX_SINH) || !rot.sin_theta.is_finite() {
        return Rotation::skipped();
    }
    // nothing measurable to gain: keep the pair as is rather than turning
    // inside a (numerically) degenerate eigenplane
    if r.r[2][2] - r.quadratic_form(&rot.v) <= IDENTITY_GAIN_TOL * r.trace() {
        return Rotation::identity();
    }
    rot
}

#[inline]
fn j_form(v: &[f64; 3]) -> f64 {
    -v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

#[inline]
fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// The three generalized eigenvalues of `(R, J)` in ascending order, from the
/// characteristic cubic of `J·R`. `None` when the cubic has a complex pair
/// that is not real to within [`COMPLEX_ROOT_TOL`] in backward error.
pub fn pencil_eigenvalues(r: &CriterionMatrix) -> Option<[f64; 3]> {
    let norm = r.norm();
    if norm == 0.0 {
        return Some([0.0; 3]);
    }
    let m = r.pencil().map(|row| row.map(|x| x / norm));
    // λ³ − c2 λ² + c1 λ − c0
    let c2 = m[0][0] + m[1][1] + m[2][2];
    let c1 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let c0 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);

    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;

    let mut roots = if p < 0.0 {
        let x = (3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt();
        if x.abs() <= 1.0 {
            let amp = 2.0 * (-p / 3.0).sqrt();
            let phi = x.acos() / 3.0;
            let tau = 2.0 * std::f64::consts::PI / 3.0;
            [amp * phi.cos(), amp * (phi - tau).cos(), amp * (phi - 2.0 * tau).cos()]
        } else {
            cardano_nearly_real(p, q)?
        }
    } else {
        cardano_nearly_real(p, q)?
    };
    for t in roots.iter_mut() {
        *t = polish_root(*t + shift, c2, c1, c0);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    Some(roots.map(|x| x * norm))
}

// One real root plus a complex pair; accepted only if the pair is real to
// within tolerance, in which case its real part is returned twice.
fn cardano_nearly_real(p: f64, q: f64) -> Option<[f64; 3]> {
    let disc = (q * q / 4.0 + p * p * p / 27.0).max(0.0);
    let s = disc.sqrt();
    let u = (-q / 2.0 + s).cbrt();
    let w = (-q / 2.0 - s).cbrt();
    let imag = 0.5 * 3f64.sqrt() * (u - w).abs();
    let t1 = u + w;
    if imag * imag * t1.abs().max(1.0) > COMPLEX_ROOT_TOL {
        return None;
    }
    Some([t1, -t1 / 2.0, -t1 / 2.0])
}

fn polish_root(mut x: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    let f = |x: f64| ((x - c2) * x + c1) * x - c0;
    for _ in 0..2 {
        let fx = f(x);
        let d = (3.0 * x - 2.0 * c2) * x + c1;
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let next = x - fx / d;
        if f(next).abs() < fx.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Eigenvector of the (normalized) pencil matrix `m = J·R` for `lambda`,
/// scaled to unit Euclidean length and satisfying `vᵀJv > 0`.
fn median_eigenvector(m: &[[f64; 3]; 3], lambda: f64) -> Option<[f64; 3]> {
    let mut a = *m;
    for (k, row) in a.iter_mut().enumerate() {
        row[k] -= lambda;
    }
    let crosses = [cross3(&a[0], &a[1]), cross3(&a[0], &a[2]), cross3(&a[1], &a[2])];
    let (best, best_norm) = crosses
        .iter()
        .map(|c| (*c, dot3(c, c).sqrt()))
        .fold(([0.0; 3], -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if best_norm >= CROSS_PRODUCT_TOL {
        let v = best.map(|x| x / best_norm);
        if j_form(&v) > FEASIBILITY_TOL {
            return Some(v);
        }
    }
    eigenplane_vector(&a)
}

// `a = J·R − λI` has rank ≤ 1: its null space is the plane orthogonal to the
// dominant row. Pick the direction of that plane with the largest `vᵀJv/‖v‖²`,
// or the projection of `e₃` when the plane is J-isotropic.
fn eigenplane_vector(a: &[[f64; 3]; 3]) -> Option<[f64; 3]> {
    let (row, row_norm) = a
        .iter()
        .map(|r| (*r, dot3(r, r).sqrt()))
        .fold(([0.0; 3], -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if row_norm < CROSS_PRODUCT_TOL {
        return Some([0.0, 0.0, 1.0]);
    }
    let n = row.map(|x| x / row_norm);
    // orthonormal basis of the plane ⟂ n
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let b1 = {
        let c = cross3(&n, &seed);
        let l = dot3(&c, &c).sqrt();
        c.map(|x| x / l)
    };
    let b2 = cross3(&n, &b1);
    let jb = |b: &[f64; 3]| [-b[0], b[1], b[2]];
    let (g11, g12, g22) = (dot3(&b1, &jb(&b1)), dot3(&b1, &jb(&b2)), dot3(&b2, &jb(&b2)));
    let half_gap = (0.25 * (g11 - g22) * (g11 - g22) + g12 * g12).sqrt();
    let top = 0.5 * (g11 + g22) + half_gap;
    if top <= FEASIBILITY_TOL {
        return None;
    }
    let e3 = [0.0, 0.0, 1.0];
    let proj = [dot3(&e3, &b1), dot3(&e3, &b2)];
    let v = if half_gap < 1e-10 && proj[0].hypot(proj[1]) > 1e-8 {
        [
            proj[0] * b1[0] + proj[1] * b2[0],
            proj[0] * b1[1] + proj[1] * b2[1],
            proj[0] * b1[2] + proj[1] * b2[2],
        ]
    } else {
        // eigenvector of [[g11, g12], [g12, g22]] for `top`, from whichever
        // row of the shifted matrix is better conditioned
        let (c1, c2) = ((g12, top - g11), (top - g22, g12));
        let (x, y) = if c1.0.hypot(c1.1) >= c2.0.hypot(c2.1) { c1 } else { c2 };
        let (x, y) = if x.hypot(y) > 1e-300 {
            (x, y)
        } else if g11 >= g22 {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        [x * b1[0] + y * b2[0], x * b1[1] + y * b2[1], x * b1[2] + y * b2[2]]
    };
    let l = dot3(&v, &v).sqrt();
    let v = v.map(|x| x / l);
    (j_form(&v) > FEASIBILITY_TOL).then_some(v)
}

/// `M ↦ H M Hᵀ` on the plane `(p, q)` of a symmetric matrix.
pub fn rotate_symmetric_plane(m: &mut RMatrix, p: usize, q: usize, rot: &Rotation) {
    let [a11, a12, a21, a22] = rot.alphas();
    let dim = m.n();
    let data = m.data_mut();
    let (rp, rq) = (p * dim, q * dim);
    for c in 0..dim {
        let (x, y) = (data[rp + c], data[rq + c]);
        data[rp + c] = a11 * x + a12 * y;
        data[rq + c] = a21 * x + a22 * y;
    }
    for c in 0..dim {
        if c != p && c != q {
            data[c * dim + p] = data[rp + c];
            data[c * dim + q] = data[rq + c];
        }
    }
    let (tpp, tpq, tqp, tqq) = (data[rp + p], data[rp + q], data[rq + p], data[rq + q]);
    data[rp + p] = tpp * a11 + tpq * a12;
    let off = tpp * a21 + tpq * a22;
    data[rp + q] = off;
    data[rq + p] = off;
    data[rq + q] = tqp * a21 + tqq * a22;
}

/// `V ↦ H V` on rows `p`, `q` of a general real matrix.
pub fn rotate_rows_real(m: &mut RMatrix, p: usize, q: usize, rot: &Rotation) {
    let [a11, a12, a21, a22] = rot.alphas();
    let dim = m.n();
    let data = m.data_mut();
    for c in 0..dim {
        let (x, y) = (data[p * dim + c], data[q * dim + c]);
        data[p * dim + c] = a11 * x + a12 * y;
        data[q * dim + c] = a21 * x + a22 * y;
    }
}

/// Apply the structure-preserving pair of real rotations selected by
/// `sol.family` to every matrix of an embedded set.
pub fn apply_rotation_real(set: &mut RealEmbeddedSet, sol: &RotationSolution) {
    let n = set.n();
    let (first, second, negate) = family_planes(n, sol.i, sol.j, sol.family);
    let rot2 = if negate {
        sol.rotation.with_negated_shear()
    } else {
        sol.rotation
    };
    for m in set.matrices_mut() {
        rotate_symmetric_plane(m, first.0, first.1, &sol.rotation);
        rotate_symmetric_plane(m, second.0, second.1, &rot2);
        debug_assert!(paired_rows_consistent(m, n, sol), "block structure lost");
    }
}

/// `𝓥 ↦ 𝓗 𝓥` for the paired real rotations of `sol`.
pub fn accumulate_real_pair(v: &mut RMatrix, sol: &RotationSolution) {
    let (first, second, negate) = family_planes(v.n() / 2, sol.i, sol.j, sol.family);
    let rot2 = if negate {
        sol.rotation.with_negated_shear()
    } else {
        sol.rotation
    };
    rotate_rows_real(v, first.0, first.1, &sol.rotation);
    rotate_rows_real(v, second.0, second.1, &rot2);
}

// Only rows i, j, i+N, j+N change; check them against their block partners.
fn paired_rows_consistent(m: &RMatrix, n: usize, sol: &RotationSolution) -> bool {
    let scale = m.data().iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    let tol = 1e-9 * scale;
    [sol.i, sol.j].into_iter().all(|r| {
        (0..n).all(|c| {
            (m.get(r, c) - m.get(r + n, c + n)).abs() <= tol
                && (m.get(r, c + n) + m.get(r + n, c)).abs() <= tol
        })
    })
}

/// Multiply-add pairs charged for one plane rotation of one symmetric
/// `dim × dim` real matrix.
pub fn real_update_flops(dim: usize) -> u64 {
    4 * dim as u64 + 6
}

/// Multiply-add pairs charged for one row rotation of a real diagonalizer.
pub fn real_accumulate_flops(dim: usize) -> u64 {
    4 * dim as u64
}

/// Multiply-add pairs charged for one complex rotation of one Hermitian matrix.
pub fn complex_update_flops(n: usize) -> u64 {
    8 * n as u64 + 8
}

/// Multiply-add pairs charged for one row rotation of a complex N×N diagonalizer.
pub fn complex_accumulate_flops(n: usize) -> u64 {
    8 * n as u64
}

/// `M ↦ H M H^H` for every Hermitian matrix of the set, with `H = H₁` or
/// `H₂` according to `sol.family`. Works on the split planes; the new rows
/// `i`, `j` are mirrored into the columns.
pub fn apply_rotation_complex(set: &mut HermitianSet, sol: &RotationSolution) {
    for m in set.matrices_mut() {
        rotate_hermitian(m, sol);
    }
}

/// Single-matrix kernel behind [`apply_rotation_complex`].
pub fn rotate_hermitian(m: &mut CMatrix, sol: &RotationSolution) {
    let n = m.n();
    let (i, j) = (sol.i, sol.j);
    let [a11, a12, a21, a22] = sol.rotation.alphas();
    let (ri, rj) = (i * n, j * n);
    let (re, im) = m.planes_mut();
    match sol.family {
        Family::RealPart => {
            for c in 0..n {
                let (xr, yr) = (re[ri + c], re[rj + c]);
                let (xi, yi) = (im[ri + c], im[rj + c]);
                re[ri + c] = a11 * xr + a12 * yr;
                re[rj + c] = a21 * xr + a22 * yr;
                im[ri + c] = a11 * xi + a12 * yi;
                im[rj + c] = a21 * xi + a22 * yi;
            }
        }
        Family::ImagPart => {
            for c in 0..n {
                let (xr, yr) = (re[ri + c], re[rj + c]);
                let (xi, yi) = (im[ri + c], im[rj + c]);
                re[ri + c] = a11 * xr - a12 * yi;
                im[ri + c] = a11 * xi + a12 * yr;
                re[rj + c] = a21 * xi + a22 * yr;
                im[rj + c] = a22 * yi - a21 * xr;
            }
        }
    }
    for c in 0..n {
        if c != i && c != j {
            re[c * n + i] = re[ri + c];
            im[c * n + i] = -im[ri + c];
            re[c * n + j] = re[rj + c];
            im[c * n + j] = -im[rj + c];
        }
    }
    let t = |k: usize| Complex64::new(re[k], im[k]);
    let (tii, tij, tji, tjj) = (t(ri + i), t(ri + j), t(rj + i), t(rj + j));
    // right multiplication of the 2×2 block by H^H
    let (bii, bij, bjj) = match sol.family {
        Family::RealPart => (
            tii * a11 + tij * a12,
            tii * a21 + tij * a22,
            tji * a21 + tjj * a22,
        ),
        Family::ImagPart => {
            let jj = Complex64::new(0.0, 1.0);
            (
                tii * a11 - tij * jj * a12,
                tii * jj * a21 + tij * a22,
                tji * jj * a21 + tjj * a22,
            )
        }
    };
    re[ri + i] = bii.re;
    im[ri + i] = 0.0;
    re[rj + j] = bjj.re;
    im[rj + j] = 0.0;
    re[ri + j] = bij.re;
    im[ri + j] = bij.im;
    re[rj + i] = bij.re;
    im[rj + i] = -bij.im;
}

/// `V ↦ H V` on rows `i`, `j` of a complex diagonalizer.
pub fn accumulate_complex(v: &mut CMatrix, sol: &RotationSolution) {
    let n = v.n();
    let [a11, a12, a21, a22] = sol.rotation.alphas();
    let (ri, rj) = (sol.i * n, sol.j * n);
    let (re, im) = v.planes_mut();
    match sol.family {
        Family::RealPart => {
            for c in 0..n {
                let (xr, yr, xi, yi) = (re[ri + c], re[rj + c], im[ri + c], im[rj + c]);
                re[ri + c] = a11 * xr + a12 * yr;
                re[rj + c] = a21 * xr + a22 * yr;
                im[ri + c] = a11 * xi + a12 * yi;
                im[rj + c] = a21 * xi + a22 * yi;
            }
        }
        Family::ImagPart => {
            for c in 0..n {
                let (xr, yr, xi, yi) = (re[ri + c], re[rj + c], im[ri + c], im[rj + c]);
                re[ri + c] = a11 * xr - a12 * yi;
                im[ri + c] = a11 * xi + a12 * yr;
                re[rj + c] = a21 * xi + a22 * yr;
                im[rj + c] = a22 * yi - a21 * xr;
            }
        }
    }
}

/// Dense `dim × dim` matrix of `H(θ, y)` on the plane `(p, q)`.
pub fn plane_matrix(dim: usize, p: usize, q: usize, rot: &Rotation) -> RMatrix {
    let [a11, a12, a21, a22] = rot.alphas();
    let mut h = RMatrix::identity(dim);
    h.set(p, p, a11);
    h.set(p, q, a12);
    h.set(q, p, a21);
    h.set(q, q, a22);
    h
}

/// Dense complex `H₁` or `H₂` for the pair `(i, j)`.
pub fn complex_rotation_matrix(n: usize, sol: &RotationSolution) -> CMatrix {
    let [a11, a12, a21, a22] = sol.rotation.alphas();
    let mut h = CMatrix::identity(n);
    let (i, j) = (sol.i, sol.j);
    match sol.family {
        Family::RealPart => {
            h.set(i, i, Complex64::new(a11, 0.0));
            h.set(i, j, Complex64::new(a12, 0.0));
            h.set(j, i, Complex64::new(a21, 0.0));
            h.set(j, j, Complex64::new(a22, 0.0));
        }
        Family::ImagPart => {
            h.set(i, i, Complex64::new(a11, 0.0));
            h.set(i, j, Complex64::new(0.0, a12));
            h.set(j, i, Complex64::new(0.0, -a21));
            h.set(j, j, Complex64::new(a22, 0.0));
        }
    }
    h
}
