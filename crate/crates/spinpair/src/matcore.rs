//! Dense complex linear algebra for the fixed 4x4 (and 2x2) problems the
//! rest of the crate works with.
//!
//! Everything here is deterministic: no randomized pivoting, no
//! parallelism, identical input bits give identical output bits. The
//! eigensolver is a cyclic Jacobi iteration with complex plane rotations,
//! which for Hermitian matrices of this size is simple, accurate and free
//! of external dependencies.

use num_complex::Complex64;
use thiserror::Error;

pub type Complex = Complex64;

/// Admissible Hermitian asymmetry `max |m[i][j] - conj(m[j][i])|` on inputs.
pub const HERM_TOL: f64 = 1e-12;
/// Eigenvalues of a nominally PSD matrix may undershoot zero by this much.
pub const PSD_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius mass drops below this
/// fraction of the input Frobenius norm.
const JACOBI_REL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds {tol:.1e}")]
    NotHermitian { asymmetry: f64, tol: f64 },
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
}

const fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// 2x2 complex matrix, used for single-qubit operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix2 {
    pub e: [[Complex; 2]; 2],
}

impl CMatrix2 {
    pub const fn new(e: [[Complex; 2]; 2]) -> Self {
        Self { e }
    }

    pub const fn zero() -> Self {
        Self::new([[c(0.0, 0.0); 2]; 2])
    }

    pub const fn identity() -> Self {
        Self::new([
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0)],
        ])
    }

    /// Kronecker product; the left factor selects the 2x2 block.
    pub fn kron(&self, other: &CMatrix2) -> CMatrix4 {
        let mut out = CMatrix4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.e[2 * i + k][2 * j + l] = self.e[i][j] * other.e[k][l];
                    }
                }
            }
        }
        out
    }
}

/// 4x4 complex matrix in row-major layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix4 {
    pub e: [[Complex; 4]; 4],
}

impl CMatrix4 {
    pub const fn new(e: [[Complex; 4]; 4]) -> Self {
        Self { e }
    }

    pub const fn zero() -> Self {
        Self::new([[c(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diag(d: [f64; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = c(d[i], 0.0);
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.e[i][j] + other.e[i][j];
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.e[i][j] - other.e[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = c(0.0, 0.0);
                for k in 0..4 {
                    acc += self.e[i][k] * other.e[k][j];
                }
                m.e[i][j] = acc;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Complex; 4]) -> [Complex; 4] {
        let mut out = [c(0.0, 0.0); 4];
        for i in 0..4 {
            let mut acc = c(0.0, 0.0);
            for k in 0..4 {
                acc += self.e[i][k] * v[k];
            }
            out[i] = acc;
        }
        out
    }

    /// Rank-one projector `v v^dagger` (v need not be normalized).
    pub fn outer(v: &[Complex; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = v[i] * v[j].conj();
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.e[j][i].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for x in row.iter_mut() {
                *x = x.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex {
        self.e[0][0] + self.e[1][1] + self.e[2][2] + self.e[3][3]
    }

    pub fn det(&self) -> Complex {
        let m = &self.e;
        let det3 = |r: [usize; 3], c3: [usize; 3]| -> Complex {
            m[r[0]][c3[0]] * (m[r[1]][c3[1]] * m[r[2]][c3[2]] - m[r[1]][c3[2]] * m[r[2]][c3[1]])
                - m[r[0]][c3[1]]
                    * (m[r[1]][c3[0]] * m[r[2]][c3[2]] - m[r[1]][c3[2]] * m[r[2]][c3[0]])
                + m[r[0]][c3[2]]
                    * (m[r[1]][c3[0]] * m[r[2]][c3[1]] - m[r[1]][c3[1]] * m[r[2]][c3[0]])
        };
        let rows = [1, 2, 3];
        m[0][0] * det3(rows, [1, 2, 3]) - m[0][1] * det3(rows, [0, 2, 3])
            + m[0][2] * det3(rows, [0, 1, 3])
            - m[0][3] * det3(rows, [0, 1, 2])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// `max |m[i][j] - conj(m[j][i])|` over all entries.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.e[i][j] - self.e[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian part `(m + m^dagger)/2`. The result is exactly Hermitian:
    /// entry (j,i) is stored as the conjugate of entry (i,j), and the
    /// diagonal imaginary parts are exactly zero.
    pub fn hermitize(&self) -> Result<Self, MatError> {
        if !self.is_finite() {
            return Err(MatError::NonFinite);
        }
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = c(self.e[i][i].re, 0.0);
            for j in (i + 1)..4 {
                let avg = (self.e[i][j] + self.e[j][i].conj()) * 0.5;
                m.e[i][j] = avg;
                m.e[j][i] = avg.conj();
            }
        }
        Ok(m)
    }
}

/// Eigendecomposition of a Hermitian 4x4 matrix.
///
/// `eigenvalues` are sorted ascending; `vectors[k]` is the unit-norm
/// eigenvector paired with `eigenvalues[k]`. Eigenvector global phase is
/// whatever the rotation sequence produced; callers needing a fixed gauge
/// must canonicalize themselves.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: [f64; 4],
    pub vectors: [[Complex; 4]; 4],
}

impl SpectralDecomp {
    /// `sum_k f(e_k) v_k v_k^dagger`, hermitized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix4 {
        let mut m = CMatrix4::zero();
        for k in 0..4 {
            let w = f(self.eigenvalues[k]);
            let p = CMatrix4::outer(&self.vectors[k]);
            m = m.add(&p.scale(w));
        }
        // rank-one accumulation is Hermitian up to rounding; make it exact
        m.hermitize().expect("finite by construction")
    }

    pub fn reconstruct(&self) -> CMatrix4 {
        self.map(|e| e)
    }

    /// Unitary whose k-th column is the k-th eigenvector.
    pub fn basis_matrix(&self) -> CMatrix4 {
        let mut m = CMatrix4::zero();
        for (col, vec) in self.vectors.iter().enumerate() {
            for row in 0..4 {
                m.e[row][col] = vec[row];
            }
        }
        m
    }
}

/// Inner product, conjugate-linear in the first argument.
pub fn vdot(a: &[Complex; 4], b: &[Complex; 4]) -> Complex {
    let mut acc = c(0.0, 0.0);
    for k in 0..4 {
        acc += a[k].conj() * b[k];
    }
    acc
}

pub fn vnorm(v: &[Complex; 4]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Cyclic Jacobi eigensolver for Hermitian 4x4 matrices.
///
/// Each rotation annihilates one off-diagonal pair; sweeps run over the
/// pairs in the fixed order (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
/// Convergence is declared when the off-diagonal Frobenius mass falls
/// below `1e-13` times the Frobenius norm of the input; the iteration is
/// capped at 100 sweeps and reports failure instead of looping.
pub fn eig_hermitian(m: &CMatrix4) -> Result<SpectralDecomp, MatError> {
    if !m.is_finite() {
        return Err(MatError::NonFinite);
    }
    let asym = m.hermitian_asymmetry();
    if asym > HERM_TOL {
        return Err(MatError::NotHermitian {
            asymmetry: asym,
            tol: HERM_TOL,
        });
    }
    let mut a = m.hermitize()?.e;
    let mut v = CMatrix4::identity().e;

    let fro = m.frobenius_norm();
    let eps = JACOBI_REL_TOL * fro;
    let off = |a: &[[Complex; 4]; 4]| -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    s += a[i][j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off(&a) <= eps;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[p][q];
                let beta = apq.norm();
                if beta == 0.0 {
                    continue;
                }
                let phase = apq / beta;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let theta = (aqq - app) / (2.0 * beta);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + theta.hypot(1.0));
                let cc = 1.0 / (t * t + 1.0).sqrt();
                let ss = t * cc;

                // columns: a <- a U with U[p][p]=c, U[p][q]=s*phase,
                // U[q][p]=-s*conj(phase), U[q][q]=c
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp * cc - akq * ss * phase.conj();
                    a[k][q] = akp * ss * phase + akq * cc;
                }
                // rows: a <- U^dagger a
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = apk * cc - aqk * ss * phase;
                    a[q][k] = apk * ss * phase.conj() + aqk * cc;
                }
                a[p][q] = c(0.0, 0.0);
                a[q][p] = c(0.0, 0.0);
                a[p][p] = c(a[p][p].re, 0.0);
                a[q][q] = c(a[q][q].re, 0.0);

                for k in 0..4 {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = vkp * cc - vkq * ss * phase.conj();
                    v[k][q] = vkp * ss * phase + vkq * cc;
                }
            }
        }
        converged = off(&a) <= eps;
    }
    if !converged {
        return Err(MatError::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let raw = [a[0][0].re, a[1][1].re, a[2][2].re, a[3][3].re];
    let mut order = [0usize, 1, 2, 3];
    // stable: equal eigenvalues keep the order the rotations produced
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]).then(i.cmp(&j)));

    let mut eigenvalues = [0.0; 4];
    let mut vectors = [[c(0.0, 0.0); 4]; 4];
    for (slot, &src) in order.iter().enumerate() {
        eigenvalues[slot] = raw[src];
        let mut col = [c(0.0, 0.0); 4];
        for k in 0..4 {
            col[k] = v[k][src];
        }
        let n = vnorm(&col);
        for x in col.iter_mut() {
            *x /= n;
        }
        vectors[slot] = col;
    }
    Ok(SpectralDecomp {
        eigenvalues,
        vectors,
    })
}

/// Singular values of a complex 4x4 matrix, descending.
///
/// One-sided Jacobi: right rotations orthogonalize column pairs until every
/// pair is orthogonal, and the singular values are the final column norms.
/// Unlike taking eigenvalue square roots of `m^dagger m`, small singular
/// values come out with absolute accuracy near machine epsilon; the
/// concurrence machinery depends on that.
pub fn singular_values(m: &CMatrix4) -> Result<[f64; 4], MatError> {
    if !m.is_finite() {
        return Err(MatError::NonFinite);
    }
    let max_mag = m.e.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 {
        return Ok([0.0; 4]);
    }
    // Rescale by an exact power of two so the dominant entry sits near one.
    // This keeps every mantissa bit and makes the column norms below safe
    // to form even when the input lives deep in the subnormal range.
    let exp = (-max_mag.log2().floor()).clamp(-1000.0, 1000.0);
    let up = exp.exp2();
    let down = (-exp).exp2();
    let mut a = m.e;
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x *= up;
        }
    }
    // Columns this far below the dominant one shift each singular value by
    // less than their own norm, which is invisible at working precision.
    // Keeping them would let the pair tolerances underflow to zero and the
    // sweep would then rotate the same null pair forever.
    let mut colnorm = [0.0; 4];
    for (p, n) in colnorm.iter_mut().enumerate() {
        let col = [a[0][p], a[1][p], a[2][p], a[3][p]];
        *n = vnorm(&col);
    }
    let max_col = colnorm.iter().fold(0.0, |acc: f64, &n| acc.max(n));
    for (p, &n) in colnorm.iter().enumerate() {
        if n <= 1e-130 * max_col {
            for row in a.iter_mut() {
                row[p] = c(0.0, 0.0);
            }
        }
    }
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..3 {
            for q in (p + 1)..4 {
                // Gram data of the column pair
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = c(0.0, 0.0);
                for k in 0..4 {
                    app += a[k][p].norm_sqr();
                    aqq += a[k][q].norm_sqr();
                    apq += a[k][p].conj() * a[k][q];
                }
                let beta = apq.norm();
                if app == 0.0 || aqq == 0.0 || beta <= JACOBI_REL_TOL * app.sqrt() * aqq.sqrt() {
                    continue;
                }
                rotated = true;
                let phase = apq / beta;
                let theta = (aqq - app) / (2.0 * beta);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + theta.hypot(1.0));
                let cc = 1.0 / (t * t + 1.0).sqrt();
                let ss = t * cc;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp * cc - akq * ss * phase.conj();
                    a[k][q] = akp * ss * phase + akq * cc;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MatError::NoConvergence(JACOBI_MAX_SWEEPS));
    }
    let mut sv = [0.0; 4];
    for (p, slot) in sv.iter_mut().enumerate() {
        let mut col = [c(0.0, 0.0); 4];
        for k in 0..4 {
            col[k] = a[k][p];
        }
        *slot = vnorm(&col) * down;
    }
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// `V exp(diag(e_i - shift)) V^dagger`. The caller picks `shift` (usually
/// the largest eigenvalue) so the exponentials stay bounded by one.
pub fn mat_exp_hermitian(m: &CMatrix4, shift: f64) -> Result<CMatrix4, MatError> {
    let d = eig_hermitian(m)?;
    Ok(d.map(|e| (e - shift).exp()))
}

/// Principal square root of a PSD Hermitian matrix. Eigenvalues in
/// `[-PSD_TOL, 0)` are treated as exact zeros; anything lower is an error.
pub fn mat_sqrt_psd(m: &CMatrix4) -> Result<CMatrix4, MatError> {
    let d = eig_hermitian(m)?;
    let min_eigenvalue = d.eigenvalues[0];
    if min_eigenvalue < -PSD_TOL {
        return Err(MatError::NotPsd { min_eigenvalue });
    }
    Ok(d.map(|e| e.max(0.0).sqrt()))
}
