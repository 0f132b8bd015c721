//! Small dense complex linear algebra for Hermitian covariance computations.
//!
//! Everything the estimators need — complex Cholesky log-determinants, Schur
//! complements of covariance blocks, orthogonal-complement projections, and a
//! one-sided Jacobi SVD — implemented directly over `num_complex::Complex`.
//! Matrix dimensions in this crate are tiny (antenna counts, at most a few
//! dozen), so portability and determinism beat peak speed, and no external
//! linear-algebra backend is used.
//!
//! All operations are pure: no internal mutability, values freely shareable
//! across threads.

use num_complex::Complex;

use crate::RealScalar;

/// Convert an `f64` constant into the generic scalar.
#[inline]
fn cst<F: RealScalar>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in scalar type")
}

#[inline]
fn czero<F: RealScalar>() -> Complex<F> {
    Complex::new(F::zero(), F::zero())
}

#[inline]
fn creal<F: RealScalar>(x: F) -> Complex<F> {
    Complex::new(x, F::zero())
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failures of the numeric kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    /// A pivot fell below the positive-definiteness tolerance
    /// (`dim * machine_epsilon * max_diagonal`).
    NotPositiveDefinite { pivot: usize },
    /// Numerical rank lower than the operation requires.
    RankDeficient { rank: usize, required: usize },
    /// An iterative decomposition did not converge within its sweep cap.
    ConvergenceFailure { sweeps: usize },
}

impl std::fmt::Display for LinalgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinalgError::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            LinalgError::RankDeficient { rank, required } => {
                write!(f, "rank deficient: numerical rank {rank}, required {required}")
            }
            LinalgError::ConvergenceFailure { sweeps } => {
                write!(f, "iteration did not converge within {sweeps} sweeps")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

// ---------------------------------------------------------------------------
// Dense complex matrix
// ---------------------------------------------------------------------------

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<F>>,
}

impl<F: RealScalar> ComplexMatrix<F> {
    /// All-zero matrix. `rows == 0` or `cols == 0` is allowed and yields an
    /// empty matrix (used for the no-eavesdropper degenerate configuration).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![czero(); rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, creal(F::one()));
        }
        m
    }

    /// Build from an entry function.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<F>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Build from a flat row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<F>>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows x cols");
        ComplexMatrix { rows, cols, data }
    }

    /// Build from nested `(real, imag)` rows; convenience for tests and docs.
    pub fn from_rows(rows: &[Vec<(F, F)>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| {
            let (re, im) = rows[i][j];
            Complex::new(re, im)
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<F> {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<F>) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Flat row-major view of the entries.
    pub fn entries(&self) -> &[Complex<F>] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == czero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - rhs.get(i, j))
    }

    /// Scale by a real factor.
    pub fn scale_real(&self, c: F) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * creal(c))
    }

    /// Right-multiply by `diag(d)`, i.e. scale column `j` by `d[j]`.
    pub fn scale_cols(&self, d: &[F]) -> Self {
        assert_eq!(d.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * creal(d[j]))
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<Complex<F>> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Submatrix of whole columns, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> F {
        self.data.iter().map(|z| z.norm()).fold(F::zero(), F::max)
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> F {
        self.data.iter().map(|z| z.norm_sqr()).fold(F::zero(), |a, b| a + b)
    }

    /// Trace (square matrices).
    pub fn trace(&self) -> Complex<F> {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).fold(czero(), |a, b| a + b)
    }

    /// True when `self` equals its conjugate transpose within `rel_tol`
    /// relative to the largest entry modulus.
    pub fn is_hermitian_within(&self, rel_tol: F) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().max(F::one());
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = self.get(i, j) - self.get(j, i).conj();
                if d.norm() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// True when all entries are finite.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

// ---------------------------------------------------------------------------
// Hermitian matrix
// ---------------------------------------------------------------------------

/// Square matrix that equals its own conjugate transpose.
///
/// Construction either checks hermiticity against a relative tolerance
/// ([`HermitianMatrix::try_from_matrix`]) or produces it structurally (the
/// Gram builders). Stored entries are exactly Hermitian: constructors mirror
/// the upper triangle and zero the diagonal's imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<F> {
    m: ComplexMatrix<F>,
}

/// Relative hermiticity tolerance used by the `f64` estimators.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

impl<F: RealScalar> HermitianMatrix<F> {
    /// Validate hermiticity within `rel_tol` (relative to the largest entry),
    /// then store the exactly symmetrized matrix `(M + M^H)/2`.
    pub fn try_from_matrix(m: &ComplexMatrix<F>, rel_tol: F) -> Option<Self> {
        if m.is_hermitian_within(rel_tol) {
            Some(Self::symmetrize(m))
        } else {
            None
        }
    }

    /// Store `(M + M^H)/2` without checking. Callers use this to absorb
    /// round-off on matrices that are Hermitian by construction.
    pub fn symmetrize(m: &ComplexMatrix<F>) -> Self {
        assert_eq!(m.rows(), m.cols(), "Hermitian matrix must be square");
        let half = cst::<F>(0.5);
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            out.set(i, i, creal(m.get(i, i).re));
            for j in (i + 1)..m.cols() {
                let v = (m.get(i, j) + m.get(j, i).conj()) * creal(half);
                out.set(i, j, v);
                out.set(j, i, v.conj());
            }
        }
        HermitianMatrix { m: out }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix { m: ComplexMatrix::identity(n) }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix { m: ComplexMatrix::zeros(n, n) }
    }

    /// `A^H A` (exactly Hermitian by construction).
    pub fn gram_adjoint_times(a: &ComplexMatrix<F>) -> Self {
        let n = a.cols();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = czero();
                for k in 0..a.rows() {
                    s = s + a.get(k, i).conj() * a.get(k, j);
                }
                if i == j {
                    out.set(i, i, creal(s.re));
                } else {
                    out.set(i, j, s);
                    out.set(j, i, s.conj());
                }
            }
        }
        HermitianMatrix { m: out }
    }

    /// `A A^H` (exactly Hermitian by construction).
    pub fn gram_times_adjoint(a: &ComplexMatrix<F>) -> Self {
        Self::gram_adjoint_times(&a.adjoint())
    }

    /// `self + c * identity`, in place.
    pub fn add_real_diag(&mut self, c: F) {
        for i in 0..self.dim() {
            let v = self.m.get(i, i) + creal(c);
            self.m.set(i, i, v);
        }
    }

    /// `self + c * other` (result symmetrized exactly).
    pub fn add_scaled(&self, other: &Self, c: F) -> Self {
        Self::symmetrize(&self.m.add(&other.m.scale_real(c)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<F> {
        self.m.get(i, j)
    }

    /// View as a plain matrix.
    pub fn as_matrix(&self) -> &ComplexMatrix<F> {
        &self.m
    }

    /// Real trace.
    pub fn trace_real(&self) -> F {
        (0..self.dim()).map(|i| self.m.get(i, i).re).fold(F::zero(), |a, b| a + b)
    }
}

// ---------------------------------------------------------------------------
// Cholesky factorization and log-determinant
// ---------------------------------------------------------------------------

/// Lower-triangular Cholesky factor `L` with `L L^H = A`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor<F> {
    l: ComplexMatrix<F>,
}

/// Factor a Hermitian positive definite matrix.
///
/// Fails with [`LinalgError::NotPositiveDefinite`] when a pivot drops to or
/// below `dim * machine_epsilon * max_diagonal` — a scale-invariant test that
/// treats semidefinite and indefinite inputs alike.
pub fn cholesky<F: RealScalar>(a: &HermitianMatrix<F>) -> Result<CholeskyFactor<F>, LinalgError> {
    let n = a.dim();
    let max_diag = (0..n).map(|i| a.get(i, i).re).fold(F::zero(), F::max);
    let tol = cst::<F>(n as f64) * F::epsilon() * max_diag.max(F::one() * F::epsilon());
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d = d - l.get(j, k).norm_sqr();
        }
        if d <= tol {
            return Err(LinalgError::NotPositiveDefinite { pivot: j });
        }
        let dj = d.sqrt();
        l.set(j, j, creal(dj));
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s = s - l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / creal(dj));
        }
    }
    Ok(CholeskyFactor { l })
}

impl<F: RealScalar> CholeskyFactor<F> {
    /// `ln det A = 2 * sum ln L[j][j]`.
    pub fn logdet(&self) -> F {
        let two = cst::<F>(2.0);
        (0..self.l.rows())
            .map(|j| self.l.get(j, j).re.ln())
            .fold(F::zero(), |a, b| a + b)
            * two
    }

    /// Solve `A X = B` for `X` via forward then adjoint back substitution.
    pub fn solve(&self, b: &ComplexMatrix<F>) -> ComplexMatrix<F> {
        let n = self.l.rows();
        assert_eq!(b.rows(), n, "right-hand side height must match");
        let k = b.cols();
        let mut x = b.clone();
        // L y = b
        for col in 0..k {
            for i in 0..n {
                let mut s = x.get(i, col);
                for m in 0..i {
                    s = s - self.l.get(i, m) * x.get(m, col);
                }
                x.set(i, col, s / creal(self.l.get(i, i).re));
            }
        }
        // L^H x = y
        for col in 0..k {
            for i in (0..n).rev() {
                let mut s = x.get(i, col);
                for m in (i + 1)..n {
                    s = s - self.l.get(m, i).conj() * x.get(m, col);
                }
                x.set(i, col, s / creal(self.l.get(i, i).re));
            }
        }
        x
    }
}

/// `ln det A` of a Hermitian positive definite matrix via Cholesky.
///
/// The empty (0-dimensional) matrix has determinant 1 and log-determinant 0.
pub fn hermitian_logdet<F: RealScalar>(a: &HermitianMatrix<F>) -> Result<F, LinalgError> {
    if a.dim() == 0 {
        return Ok(F::zero());
    }
    Ok(cholesky(a)?.logdet())
}

// ---------------------------------------------------------------------------
// Schur complement of covariance blocks
// ---------------------------------------------------------------------------

/// Block covariance `[[K_U, K_UV], [K_UV^H, K_V]]` of a pair of jointly
/// Gaussian vectors; the Schur complement of `K_V` is the error covariance of
/// the linear MMSE estimate of `U` from `V`.
#[derive(Debug, Clone)]
pub struct CovarianceBlocks<F> {
    pub k_u: HermitianMatrix<F>,
    pub k_v: HermitianMatrix<F>,
    /// Cross-covariance, `dim(U) x dim(V)`.
    pub k_uv: ComplexMatrix<F>,
}

/// `K_U - K_UV K_V^{-1} K_UV^H`. Requires `K_V` positive definite.
pub fn schur_complement<F: RealScalar>(
    b: &CovarianceBlocks<F>,
) -> Result<HermitianMatrix<F>, LinalgError> {
    assert_eq!(b.k_uv.rows(), b.k_u.dim(), "cross block height must match K_U");
    assert_eq!(b.k_uv.cols(), b.k_v.dim(), "cross block width must match K_V");
    if b.k_v.dim() == 0 {
        return Ok(b.k_u.clone());
    }
    let chol = cholesky(&b.k_v)?;
    // X = K_V^{-1} K_UV^H, then S = K_U - K_UV X.
    let x = chol.solve(&b.k_uv.adjoint());
    let s = b.k_u.as_matrix().sub(&b.k_uv.mul(&x));
    Ok(HermitianMatrix::symmetrize(&s))
}

// ---------------------------------------------------------------------------
// Singular value decomposition (one-sided Jacobi)
// ---------------------------------------------------------------------------

/// Full SVD `H = U diag(s) V^H` with square unitary `U` (rows x rows) and
/// `V` (cols x cols); `s` has `min(rows, cols)` non-increasing entries.
#[derive(Debug, Clone)]
pub struct Svd<F> {
    pub u: ComplexMatrix<F>,
    pub singular_values: Vec<F>,
    pub v: ComplexMatrix<F>,
}

const SVD_MAX_SWEEPS: usize = 64;

/// One-sided Jacobi SVD.
///
/// Columns are orthogonalized by complex plane rotations until all pairwise
/// inner products vanish relative to the column norms; singular values are
/// the final column norms. Wide matrices are factored through their adjoint.
/// Missing `U` columns (rank deficiency, zero matrix, rows > cols) are
/// completed to an orthonormal basis by Gram-Schmidt against the identity.
pub fn svd<F: RealScalar>(h: &ComplexMatrix<F>) -> Result<Svd<F>, LinalgError> {
    assert!(h.all_finite(), "svd input must be finite");
    if h.rows() < h.cols() {
        // H = U S V^H  <=>  H^H = V S U^H.
        let t = svd(&h.adjoint())?;
        return Ok(Svd { u: t.v, singular_values: t.singular_values, v: t.u });
    }
    let m = h.rows();
    let n = h.cols();
    if n == 0 {
        return Ok(Svd {
            u: ComplexMatrix::identity(m),
            singular_values: vec![],
            v: ComplexMatrix::identity(0),
        });
    }

    let mut g = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let tol = F::epsilon() * cst::<F>(8.0);
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < SVD_MAX_SWEEPS {
        converged = true;
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = F::zero();
                let mut aqq = F::zero();
                let mut apq = czero();
                for i in 0..m {
                    let gp = g.get(i, p);
                    let gq = g.get(i, q);
                    app = app + gp.norm_sqr();
                    aqq = aqq + gq.norm_sqr();
                    apq = apq + gp.conj() * gq;
                }
                let b = apq.norm();
                if b <= tol * (app * aqq).sqrt() || b == F::zero() {
                    continue;
                }
                converged = false;
                // Phase that makes the off-diagonal Gram entry real, then a
                // real Jacobi rotation that annihilates it.
                let phase = apq / creal(b); // e^{i phi}
                let tau = (aqq - app) / (cst::<F>(2.0) * b);
                let t = if tau >= F::zero() {
                    F::one() / (tau + (F::one() + tau * tau).sqrt())
                } else {
                    -F::one() / (-tau + (F::one() + tau * tau).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                let cs = creal(c);
                let sn = creal(s);
                let ph = phase.conj(); // e^{-i phi}
                for i in 0..m {
                    let gp = g.get(i, p);
                    let gq = g.get(i, q);
                    g.set(i, p, gp * cs - gq * ph * sn);
                    g.set(i, q, gp * sn + gq * ph * cs);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, vp * cs - vq * ph * sn);
                    v.set(i, q, vp * sn + vq * ph * cs);
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::ConvergenceFailure { sweeps: SVD_MAX_SWEEPS });
    }

    // Column norms -> singular values, sorted non-increasing.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<F> = (0..n)
        .map(|j| (0..m).map(|i| g.get(i, j).norm_sqr()).fold(F::zero(), |a, b| a + b).sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("finite norms"));
    let singular_values: Vec<F> = order.iter().map(|&j| norms[j]).collect();
    let g = g.select_cols(&order);
    let v = v.select_cols(&order);

    // Normalize the well-scaled columns of G into U, complete the rest.
    let smax = singular_values.first().copied().unwrap_or(F::zero());
    let rank_tol = smax * cst::<F>(m.max(n) as f64) * F::epsilon();
    let mut u_cols: Vec<Vec<Complex<F>>> = Vec::with_capacity(m);
    for (j, &sv) in singular_values.iter().enumerate() {
        if sv > rank_tol && sv > F::zero() {
            u_cols.push((0..m).map(|i| g.get(i, j) / creal(sv)).collect());
        }
    }
    gram_schmidt_complete(&mut u_cols, m);
    let u = ComplexMatrix::from_fn(m, m, |i, j| u_cols[j][i]);
    Ok(Svd { u, singular_values, v })
}

/// Extend a set of orthonormal columns to a full orthonormal basis of C^m by
/// projecting identity vectors against the current set (two passes of
/// modified Gram-Schmidt for stability).
fn gram_schmidt_complete<F: RealScalar>(cols: &mut Vec<Vec<Complex<F>>>, m: usize) {
    let mut cand = 0;
    while cols.len() < m {
        assert!(cand < m, "basis completion exhausted candidates");
        let mut v: Vec<Complex<F>> = vec![czero(); m];
        v[cand] = creal(F::one());
        cand += 1;
        for _pass in 0..2 {
            for b in cols.iter() {
                let mut inner = czero();
                for i in 0..m {
                    inner = inner + b[i].conj() * v[i];
                }
                for i in 0..m {
                    v[i] = v[i] - b[i] * inner;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).fold(F::zero(), |a, b| a + b).sqrt();
        if norm > cst::<F>(0.5) {
            for z in v.iter_mut() {
                *z = *z / creal(norm);
            }
            cols.push(v);
        }
    }
}

// ---------------------------------------------------------------------------
// Orthogonal-complement projection
// ---------------------------------------------------------------------------

/// Projection onto the orthogonal complement of the row space of `H`:
/// `P = I - H^H (H H^H)^{-1} H`.
///
/// `H` must have full row rank (rows <= cols); rank is checked via the
/// singular values against `max_sv * dim * 1e-12`. A 0-row `H` is accepted
/// and yields the identity (nothing to project out).
pub fn projection_complement<F: RealScalar>(
    h: &ComplexMatrix<F>,
) -> Result<HermitianMatrix<F>, LinalgError> {
    let (r, c) = (h.rows(), h.cols());
    assert!(r <= c, "projection_complement requires rows <= cols");
    if r == 0 {
        return Ok(HermitianMatrix::identity(c));
    }
    let decomp = svd(h)?;
    let smax = decomp.singular_values[0];
    let tol = smax * cst::<F>(r.max(c) as f64) * cst::<F>(1e-12);
    let rank = decomp.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < r {
        return Err(LinalgError::RankDeficient { rank, required: r });
    }
    let gram = HermitianMatrix::gram_times_adjoint(h); // H H^H, r x r
    let x = cholesky(&gram)?.solve(h); // (H H^H)^{-1} H
    let p = ComplexMatrix::identity(c).sub(&h.adjoint().mul(&x));
    Ok(HermitianMatrix::symmetrize(&p))
}

// ---------------------------------------------------------------------------
// Hermitian eigenvalues (two-sided Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic two-sided Jacobi
/// rotations. Used by definiteness diagnostics; dimensions here are tiny.
pub fn hermitian_eigenvalues<F: RealScalar>(
    a: &HermitianMatrix<F>,
) -> Result<Vec<F>, LinalgError> {
    let n = a.dim();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut m = a.as_matrix().clone();
    let scale = m.max_abs().max(F::one());
    let tol = scale * F::epsilon() * cst::<F>(8.0);
    let mut sweeps = 0;
    loop {
        let mut off = F::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m.get(i, j).norm());
            }
        }
        if off <= tol {
            break;
        }
        sweeps += 1;
        if sweeps > SVD_MAX_SWEEPS {
            return Err(LinalgError::ConvergenceFailure { sweeps: SVD_MAX_SWEEPS });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let b = apq.norm();
                if b <= tol {
                    continue;
                }
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let phase = apq / creal(b); // e^{i phi}
                let tau = (aqq - app) / (cst::<F>(2.0) * b);
                let t = if tau >= F::zero() {
                    F::one() / (tau + (F::one() + tau * tau).sqrt())
                } else {
                    -F::one() / (-tau + (F::one() + tau * tau).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                // Unitary J: columns p,q mixed with phase-adjusted rotation;
                // apply as M <- J^H M J.
                let cs = creal(c);
                let sn = creal(s);
                let ph = phase.conj();
                // Column update: M <- M J.
                for i in 0..n {
                    let mp = m.get(i, p);
                    let mq = m.get(i, q);
                    m.set(i, p, mp * cs - mq * ph * sn);
                    m.set(i, q, mp * sn + mq * ph * cs);
                }
                // Row update: M <- J^H M.
                for i in 0..n {
                    let mp = m.get(p, i);
                    let mq = m.get(q, i);
                    m.set(p, i, mp * cs - mq * ph.conj() * sn);
                    m.set(q, i, mp * sn + mq * ph.conj() * cs);
                }
            }
        }
    }
    let mut eig: Vec<F> = (0..n).map(|i| m.get(i, i).re).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(eig)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{hash_label, CounterRng};
    use num_complex::Complex64;
    use proptest::prelude::*;

    type M = ComplexMatrix<f64>;
    type H = HermitianMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic random matrix with standard complex Gaussian entries.
    fn random_matrix(rows: usize, cols: usize, key: u64) -> M {
        let mut r = CounterRng::from_key(0x11C4_7E57, hash_label("linalg-test"), key);
        M::from_fn(rows, cols, |_, _| {
            let (a, b) = r.next_gaussian_pair();
            c(a, b) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0)
        })
    }

    /// Random Hermitian positive definite matrix `G^H G + n I`.
    fn random_pd(n: usize, key: u64) -> H {
        let g = random_matrix(n + 1, n, key);
        let mut a = H::gram_adjoint_times(&g);
        a.add_real_diag(n as f64);
        a
    }

    /// Brute-force determinant by cofactor expansion along the first row;
    /// test oracle for dimensions <= 5.
    fn cofactor_det(m: &M) -> Complex64 {
        let n = m.rows();
        assert_eq!(n, m.cols());
        assert!(n <= 5, "cofactor oracle is exponential");
        if n == 0 {
            return c(1.0, 0.0);
        }
        if n == 1 {
            return m.get(0, 0);
        }
        let mut det = c(0.0, 0.0);
        let mut sign = 1.0;
        for j in 0..n {
            let minor = M::from_fn(n - 1, n - 1, |r, cc| {
                let col = if cc < j { cc } else { cc + 1 };
                m.get(r + 1, col)
            });
            det += m.get(0, j) * cofactor_det(&minor) * c(sign, 0.0);
            sign = -sign;
        }
        det
    }

    // ---- hermitian_logdet -------------------------------------------------

    #[test]
    fn logdet_identity_is_zero() {
        assert_eq!(hermitian_logdet(&H::identity(3)).unwrap(), 0.0);
    }

    #[test]
    fn logdet_diagonal() {
        let d = M::from_rows(&[vec![(2.0, 0.0), (0.0, 0.0)], vec![(0.0, 0.0), (2.0, 0.0)]]);
        let h = H::try_from_matrix(&d, 1e-12).unwrap();
        let v = hermitian_logdet(&h).unwrap();
        assert!((v - 2.0 * 2.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn logdet_matches_cofactor_oracle() {
        for key in 0..20 {
            let n = 2 + (key as usize % 4); // 2..=5
            let a = random_pd(n, key);
            let ld = hermitian_logdet(&a).unwrap();
            let det = cofactor_det(a.as_matrix());
            assert!(det.im.abs() < 1e-9 * det.re.abs());
            assert!(
                (ld.exp() - det.re).abs() < 1e-8 * det.re.abs(),
                "dim {n} key {key}: {} vs {}",
                ld.exp(),
                det.re
            );
        }
    }

    #[test]
    fn logdet_rejects_indefinite_matrix() {
        let m = M::from_rows(&[vec![(1.0, 0.0), (0.0, 0.0)], vec![(0.0, 0.0), (-1.0, 0.0)]]);
        let h = H::try_from_matrix(&m, 1e-12).unwrap();
        assert!(matches!(
            hermitian_logdet(&h),
            Err(LinalgError::NotPositiveDefinite { pivot: 1 })
        ));
    }

    #[test]
    fn logdet_rejects_singular_matrix() {
        // Rank-1 Gram matrix of a single column.
        let g = random_matrix(1, 3, 9);
        let h = H::gram_adjoint_times(&g);
        assert!(matches!(hermitian_logdet(&h), Err(LinalgError::NotPositiveDefinite { .. })));
    }

    // ---- cholesky solve ---------------------------------------------------

    #[test]
    fn cholesky_solve_reconstructs_rhs() {
        let a = random_pd(4, 31);
        let b = random_matrix(4, 2, 32);
        let x = cholesky(&a).unwrap().solve(&b);
        let r = a.as_matrix().mul(&x).sub(&b);
        assert!(r.max_abs() < 1e-10, "residual {}", r.max_abs());
    }

    // ---- schur_complement -------------------------------------------------

    #[test]
    fn schur_zero_cross_returns_k_u() {
        let k_u = random_pd(3, 40);
        let k_v = random_pd(2, 41);
        let b = CovarianceBlocks { k_u: k_u.clone(), k_v, k_uv: M::zeros(3, 2) };
        let s = schur_complement(&b).unwrap();
        assert!(s.as_matrix().sub(k_u.as_matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn schur_scalar_formula() {
        let k_u = H::try_from_matrix(&M::from_rows(&[vec![(2.0, 0.0)]]), 1e-12).unwrap();
        let k_v = H::try_from_matrix(&M::from_rows(&[vec![(4.0, 0.0)]]), 1e-12).unwrap();
        let k_uv = M::from_rows(&[vec![(2.0, 0.0)]]);
        let s = schur_complement(&CovarianceBlocks { k_u, k_v, k_uv }).unwrap();
        assert!((s.get(0, 0).re - 1.0).abs() < 1e-14); // 2 - 2*2/4
    }

    #[test]
    fn schur_matches_adjugate_inverse_oracle() {
        // 3/2 blocks carved from a random PSD 5x5; K_V inverted directly via
        // the 2x2 adjugate.
        let g = random_matrix(6, 5, 50);
        let full = H::gram_adjoint_times(&g);
        let mut a = full.as_matrix().clone();
        for i in 0..5 {
            a.set(i, i, a.get(i, i) + c(0.5, 0.0)); // keep K_V comfortably PD
        }
        let k_u = H::symmetrize(&M::from_fn(3, 3, |i, j| a.get(i, j)));
        let k_v = H::symmetrize(&M::from_fn(2, 2, |i, j| a.get(3 + i, 3 + j)));
        let k_uv = M::from_fn(3, 2, |i, j| a.get(i, 3 + j));

        let det = k_v.get(0, 0) * k_v.get(1, 1) - k_v.get(0, 1) * k_v.get(1, 0);
        let mut inv = M::zeros(2, 2);
        inv.set(0, 0, k_v.get(1, 1) / det);
        inv.set(0, 1, -k_v.get(0, 1) / det);
        inv.set(1, 0, -k_v.get(1, 0) / det);
        inv.set(1, 1, k_v.get(0, 0) / det);
        let oracle = k_u.as_matrix().sub(&k_uv.mul(&inv).mul(&k_uv.adjoint()));

        let s = schur_complement(&CovarianceBlocks { k_u, k_v, k_uv }).unwrap();
        assert!(s.as_matrix().sub(&oracle).max_abs() < 1e-10);
    }

    #[test]
    fn schur_of_psd_block_is_psd() {
        for key in 0..10 {
            let g = random_matrix(6, 5, 600 + key);
            let full = H::gram_adjoint_times(&g);
            let mut a = full.as_matrix().clone();
            for i in 3..5 {
                a.set(i, i, a.get(i, i) + c(0.25, 0.0));
            }
            let b = CovarianceBlocks {
                k_u: H::symmetrize(&M::from_fn(3, 3, |i, j| a.get(i, j))),
                k_v: H::symmetrize(&M::from_fn(2, 2, |i, j| a.get(3 + i, 3 + j))),
                k_uv: M::from_fn(3, 2, |i, j| a.get(i, 3 + j)),
            };
            let s = schur_complement(&b).unwrap();
            let eig = hermitian_eigenvalues(&s).unwrap();
            let bound = -1e-10 * s.trace_real().abs();
            assert!(eig[0] >= bound, "smallest eigenvalue {} below {}", eig[0], bound);
        }
    }

    // ---- projection_complement ---------------------------------------------

    #[test]
    fn projection_single_axis_row() {
        let h = M::from_rows(&[vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]]);
        let p = projection_complement(&h).unwrap();
        let expect = M::from_rows(&[
            vec![(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            vec![(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
            vec![(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
        ]);
        assert!(p.as_matrix().sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn projection_properties_and_trace() {
        let h = random_matrix(2, 4, 70);
        let p = projection_complement(&h).unwrap();
        let pm = p.as_matrix();
        assert!(pm.sub(&pm.adjoint()).max_abs() < 1e-10);
        assert!(pm.mul(pm).sub(pm).max_abs() < 1e-10, "idempotence");
        assert!(pm.mul(&h.adjoint()).max_abs() < 1e-10, "annihilates H^H");
        let tr = p.trace_real();
        assert!((tr - 2.0).abs() < 1e-9, "trace {} vs cols - rows", tr);
    }

    #[test]
    fn projection_matches_svd_basis_oracle() {
        // Complement projector assembled from the last (cols - rows)
        // right-singular vectors.
        let h = random_matrix(2, 4, 71);
        let p = projection_complement(&h).unwrap();
        let d = svd(&h).unwrap();
        let mut oracle = M::zeros(4, 4);
        for k in 2..4 {
            let vk = d.v.col(k);
            for i in 0..4 {
                for j in 0..4 {
                    let v = oracle.get(i, j) + vk[i] * vk[j].conj();
                    oracle.set(i, j, v);
                }
            }
        }
        assert!(p.as_matrix().sub(&oracle).max_abs() < 1e-9);
    }

    #[test]
    fn projection_rejects_rank_deficient_rows() {
        let mut h = random_matrix(1, 3, 72);
        let row: Vec<Complex64> = (0..3).map(|j| h.get(0, j)).collect();
        let mut stacked = M::zeros(2, 3);
        for j in 0..3 {
            stacked.set(0, j, row[j]);
            stacked.set(1, j, row[j] * c(2.0, 1.0)); // linearly dependent row
        }
        h = stacked;
        assert!(matches!(
            projection_complement(&h),
            Err(LinalgError::RankDeficient { rank: 1, required: 2 })
        ));
    }

    #[test]
    fn projection_of_empty_row_set_is_identity() {
        let h = M::zeros(0, 3);
        let p = projection_complement(&h).unwrap();
        assert!(p.as_matrix().sub(&M::identity(3)).max_abs() == 0.0);
    }

    // ---- svd ----------------------------------------------------------------

    fn assert_svd_valid(h: &M, tol: f64) {
        let d = svd(h).unwrap();
        let (m, n) = (h.rows(), h.cols());
        let k = m.min(n);
        for w in d.singular_values.windows(2) {
            assert!(w[0] >= w[1], "singular values must be non-increasing");
        }
        assert!(d.singular_values.iter().all(|&s| s >= 0.0));
        // Reconstruction.
        let mut us = M::zeros(m, n);
        for j in 0..k {
            for i in 0..m {
                us.set(i, j, d.u.get(i, j) * c(d.singular_values[j], 0.0));
            }
        }
        let rec = us.mul(&d.v.adjoint());
        let scale = 1.0 + h.max_abs();
        assert!(rec.sub(h).max_abs() < tol * scale, "reconstruction residual");
        // Unitarity.
        assert!(d.u.adjoint().mul(&d.u).sub(&M::identity(m)).max_abs() < tol);
        assert!(d.v.adjoint().mul(&d.v).sub(&M::identity(n)).max_abs() < tol);
    }

    #[test]
    fn svd_diagonal_values() {
        let h = M::from_rows(&[vec![(3.0, 0.0), (0.0, 0.0)], vec![(0.0, 0.0), (1.0, 0.0)]]);
        let d = svd(&h).unwrap();
        assert!((d.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((d.singular_values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_zero_matrix() {
        let d = svd(&M::zeros(3, 2)).unwrap();
        assert_eq!(d.singular_values, vec![0.0, 0.0]);
        assert!(d.u.adjoint().mul(&d.u).sub(&M::identity(3)).max_abs() < 1e-12);
        assert_svd_valid(&M::zeros(3, 2), 1e-10);
    }

    #[test]
    fn svd_random_shapes_reconstruct() {
        for (key, (m, n)) in [(1, (3, 2)), (2, (2, 3)), (3, (4, 4)), (4, (5, 1)), (5, (1, 5))]
            .into_iter()
        {
            assert_svd_valid(&random_matrix(m, n, 100 + key), 1e-10);
        }
    }

    #[test]
    fn svd_rank_one_matrix() {
        let u = random_matrix(4, 1, 110);
        let v = random_matrix(1, 3, 111);
        let h = u.mul(&v);
        assert_svd_valid(&h, 1e-10);
        let d = svd(&h).unwrap();
        assert!(d.singular_values[1] < 1e-10 * d.singular_values[0]);
    }

    // ---- hermitian_eigenvalues ----------------------------------------------

    #[test]
    fn eigenvalues_closed_form_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = M::from_rows(&[vec![(2.0, 0.0), (0.0, 1.0)], vec![(0.0, -1.0), (2.0, 0.0)]]);
        let h = H::try_from_matrix(&m, 1e-12).unwrap();
        let e = hermitian_eigenvalues(&h).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_sum_to_trace_product_to_det() {
        let a = random_pd(4, 120);
        let e = hermitian_eigenvalues(&a).unwrap();
        let sum: f64 = e.iter().sum();
        assert!((sum - a.trace_real()).abs() < 1e-9 * a.trace_real().abs());
        let logdet: f64 = e.iter().map(|x| x.ln()).sum();
        assert!((logdet - hermitian_logdet(&a).unwrap()).abs() < 1e-9);
    }

    // ---- determinant identity (cross-op property) -----------------------------

    #[test]
    fn woodbury_logdet_identity() {
        // ln det(I_m + U V^{-1} U^H) = ln det(V + U^H U) - ln det(V).
        for key in 0..25 {
            let m = 1 + (key as usize % 3);
            let k = 1 + ((key as usize / 3) % 3);
            let u = random_matrix(m, k, 200 + key);
            let v = random_pd(k, 300 + key);
            let x = cholesky(&v).unwrap().solve(&u.adjoint());
            let mut lhs_m = M::identity(m).add(&u.mul(&x));
            lhs_m = HermitianMatrix::symmetrize(&lhs_m).as_matrix().clone();
            let lhs = hermitian_logdet(&H::symmetrize(&lhs_m)).unwrap();
            let mut vpu = v.clone();
            let uhu = H::gram_adjoint_times(&u);
            vpu = vpu.add_scaled(&uhu, 1.0);
            let rhs = hermitian_logdet(&vpu).unwrap() - hermitian_logdet(&v).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()), "key {key}");
        }
    }

    // ---- property tests --------------------------------------------------------

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// SVD contract holds on arbitrary small complex matrices.
        #[test]
        fn prop_svd_reconstructs(
            m in 1usize..5,
            n in 1usize..5,
            seed in 0u64..10_000,
        ) {
            let h = random_matrix(m, n, 0xABCD + seed);
            assert_svd_valid(&h, 1e-10);
        }

        /// Cholesky log-determinant agrees with the cofactor oracle on
        /// random PD matrices up to dimension 5.
        #[test]
        fn prop_logdet_vs_bruteforce(n in 1usize..6, seed in 0u64..10_000) {
            let a = random_pd(n, 0x5EED + seed);
            let ld = hermitian_logdet(&a).unwrap();
            let det = cofactor_det(a.as_matrix()).re;
            prop_assert!((ld.exp() - det).abs() < 1e-8 * det.abs());
        }
    }
}
