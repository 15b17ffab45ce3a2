//! Complex target sets, their Hermitian split and the 2N×2N real block
//! embedding `f(X) = [[Re X, Im X], [−Im X, Re X]]`.

use num_complex::Complex64;

use crate::error::{NojdError, Result};
use crate::linalg::{CMatrix, RMatrix};

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-13;
/// Relative tolerance on the block pattern accepted by [`real_unembed`].
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Ground truth of a generated problem: `M_k = A D_k A^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub mixing: CMatrix,
    pub diagonals: Vec<Vec<Complex64>>,
}

/// The K complex N×N matrices to be jointly diagonalized.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    n: usize,
    matrices: Vec<CMatrix>,
    truth: Option<Truth>,
}

impl TargetSet {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        let n = matrices.first().ok_or(NojdError::EmptySet)?.n();
        if n < 2 {
            return Err(NojdError::DimensionTooSmall { min: 2, actual: n });
        }
        for m in &matrices {
            if m.n() != n {
                return Err(NojdError::DimensionMismatch {
                    expected: n,
                    actual: m.n(),
                });
            }
        }
        Ok(Self {
            n,
            matrices,
            truth: None,
        })
    }

    pub fn with_truth(mut self, truth: Truth) -> Result<Self> {
        if truth.mixing.n() != self.n {
            return Err(NojdError::DimensionMismatch {
                expected: self.n,
                actual: truth.mixing.n(),
            });
        }
        if truth.diagonals.len() != self.k() {
            return Err(NojdError::DimensionMismatch {
                expected: self.k(),
                actual: truth.diagonals.len(),
            });
        }
        if let Some(d) = truth.diagonals.iter().find(|d| d.len() != self.n) {
            return Err(NojdError::DimensionMismatch {
                expected: self.n,
                actual: d.len(),
            });
        }
        if !truth.mixing.condition_number().is_finite() {
            return Err(NojdError::Singular);
        }
        self.truth = Some(truth);
        Ok(self)
    }

    /// Exact set `A D_k A^H` built from a mixing matrix and diagonals.
    pub fn from_truth(mixing: CMatrix, diagonals: Vec<Vec<Complex64>>) -> Result<Self> {
        let matrices = diagonals
            .iter()
            .map(|d| mixing.congruence_diag(d))
            .collect();
        Self::new(matrices)?.with_truth(Truth { mixing, diagonals })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn truth(&self) -> Option<&Truth> {
        self.truth.as_ref()
    }

    pub fn without_truth(&self) -> Self {
        Self {
            truth: None,
            ..self.clone()
        }
    }
}

/// The 2K Hermitian matrices of the split, in the order
/// `[Im-part(M_1), Re-part(M_1), Im-part(M_2), Re-part(M_2), …]`, i.e. the
/// one-based slot `2k` holds the real-part split of `M_k` and slot `2k−1` its
/// imaginary-part split.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSet {
    n: usize,
    matrices: Vec<CMatrix>,
}

impl HermitianSet {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        let n = matrices.first().ok_or(NojdError::EmptySet)?.n();
        for m in &matrices {
            if m.n() != n {
                return Err(NojdError::DimensionMismatch {
                    expected: n,
                    actual: m.n(),
                });
            }
            let residual = m.hermitian_residual();
            if residual > HERMITIAN_TOL {
                return Err(NojdError::NotHermitian { residual });
            }
        }
        Ok(Self { n, matrices })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub(crate) fn matrices_mut(&mut self) -> &mut [CMatrix] {
        &mut self.matrices
    }

    /// Real-part split of `M_k` (zero-based `k`).
    pub fn real_part(&self, k: usize) -> &CMatrix {
        &self.matrices[2 * k + 1]
    }

    /// Imaginary-part split of `M_k` (zero-based `k`).
    pub fn imag_part(&self, k: usize) -> &CMatrix {
        &self.matrices[2 * k]
    }

    /// Undo the split: `M_k = real_part(k) + j·imag_part(k)`.
    pub fn recombine(&self) -> Vec<CMatrix> {
        (0..self.matrices.len() / 2)
            .map(|k| {
                self.real_part(k)
                    .add(&self.imag_part(k).scale(Complex64::new(0.0, 1.0)))
            })
            .collect()
    }

    /// Apply `X ↦ V X V^H` to every matrix.
    pub fn transformed(&self, v: &CMatrix) -> HermitianSet {
        HermitianSet {
            n: self.n,
            matrices: self.matrices.iter().map(|m| v.congruence(m)).collect(),
        }
    }

    pub fn embed(&self) -> RealEmbeddedSet {
        RealEmbeddedSet {
            n: self.n,
            matrices: self.matrices.iter().map(embed).collect(),
        }
    }
}

/// The 2K real symmetric 2N×2N embedded matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealEmbeddedSet {
    n: usize,
    matrices: Vec<RMatrix>,
}

impl RealEmbeddedSet {
    /// Wrap arbitrary real symmetric matrices of even dimension 2N.
    pub fn new(matrices: Vec<RMatrix>) -> Result<Self> {
        let dim = matrices.first().ok_or(NojdError::EmptySet)?.n();
        if dim % 2 != 0 || dim < 4 {
            return Err(NojdError::InvalidConfig(format!(
                "embedded dimension must be even and at least 4, got {dim}"
            )));
        }
        for m in &matrices {
            if m.n() != dim {
                return Err(NojdError::DimensionMismatch {
                    expected: dim,
                    actual: m.n(),
                });
            }
        }
        Ok(Self {
            n: dim / 2,
            matrices,
        })
    }

    /// Complex dimension N (the matrices are 2N×2N).
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[RMatrix] {
        &self.matrices
    }

    pub(crate) fn matrices_mut(&mut self) -> &mut [RMatrix] {
        &mut self.matrices
    }

    /// Largest block-structure residual over the set.
    pub fn structure_residual(&self) -> f64 {
        self.matrices
            .iter()
            .map(block_structure_residual)
            .fold(0.0, f64::max)
    }

    pub fn unembed(&self) -> Result<HermitianSet> {
        let matrices = self
            .matrices
            .iter()
            .map(real_unembed)
            .collect::<Result<Vec<_>>>()?;
        Ok(HermitianSet {
            n: self.n,
            matrices,
        })
    }
}

/// Split every target into its two Hermitian parts.
pub fn hermitian_split(set: &TargetSet) -> HermitianSet {
    let mut matrices = Vec::with_capacity(2 * set.k());
    let half = Complex64::new(0.5, 0.0);
    // 1/(2j) = −j/2
    let minus_half_j = Complex64::new(0.0, -0.5);
    for m in set.matrices() {
        let mh = m.adjoint();
        let mut imag = m.sub(&mh).scale(minus_half_j);
        let mut real = m.add(&mh).scale(half);
        force_hermitian(&mut imag);
        force_hermitian(&mut real);
        matrices.push(imag);
        matrices.push(real);
    }
    HermitianSet {
        n: set.n(),
        matrices,
    }
}

// Symmetrize away the last-ulp asymmetry left by the complex scaling.
fn force_hermitian(m: &mut CMatrix) {
    let n = m.n();
    for i in 0..n {
        let d = m.get(i, i);
        m.set(i, i, Complex64::new(d.re, 0.0));
        for j in i + 1..n {
            let z = m.get(i, j);
            m.set(j, i, z.conj());
        }
    }
}

/// `f(X)` for any complex matrix.
pub fn embed(m: &CMatrix) -> RMatrix {
    let n = m.n();
    let (re, im) = (m.re(), m.im());
    let mut out = RMatrix::zeros(2 * n);
    let dim = 2 * n;
    let data = out.data_mut();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (re[i * n + j], im[i * n + j]);
            data[i * dim + j] = a;
            data[i * dim + j + n] = b;
            data[(i + n) * dim + j] = -b;
            data[(i + n) * dim + j + n] = a;
        }
    }
    out
}

/// `f(h)` for a Hermitian `h`; the result is symmetric.
pub fn real_embed(h: &CMatrix) -> Result<RMatrix> {
    let residual = h.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(NojdError::NotHermitian { residual });
    }
    Ok(embed(h))
}

/// Relative residual of the pattern `TL = BR`, `TR = −BL`.
pub fn block_structure_residual(m: &RMatrix) -> f64 {
    let dim = m.n();
    let n = dim / 2;
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d1 = m.get(i, j) - m.get(i + n, j + n);
            let d2 = m.get(i, j + n) + m.get(i + n, j);
            s += d1 * d1 + d2 * d2;
        }
    }
    s.sqrt() / norm
}

/// `f⁻¹`: top-left block plus `j` times top-right block.
pub fn real_unembed(m: &RMatrix) -> Result<CMatrix> {
    if m.n() % 2 != 0 {
        return Err(NojdError::DimensionMismatch {
            expected: m.n() + 1,
            actual: m.n(),
        });
    }
    let residual = block_structure_residual(m);
    if residual > STRUCTURE_TOL {
        return Err(NojdError::BlockStructure { residual });
    }
    let n = m.n() / 2;
    Ok(CMatrix::from_fn(n, |i, j| {
        Complex64::new(m.get(i, j), m.get(i, j + n))
    }))
}
