//! The two-qubit model: couplings, Hamiltonian builders and the quantities
//! that organize its spectrum.
//!
//! The exchange part couples only the x and y spin components. Writing the
//! coupling coefficients as a 2x2 matrix `a`, the diagonal carries the XY
//! anisotropy `(1 +/- gamma) J` and the off-diagonal carries the cross
//! terms `(1 +/- gamma') K` that mix x on one site with y on the other.
//! A uniform magnetic field acts symmetrically on both qubits.
//!
//! Basis order everywhere: `|uu>, |ud>, |du>, |dd>` with qubit 1 the left
//! tensor factor and `sigma_z |u> = +|u>`.

use crate::matcore::{CMatrix2, CMatrix4, Complex};
use thiserror::Error;

const fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("parameter {name} is not finite")]
    NonFinite { name: &'static str },
    #[error("anisotropy {name} = {value} outside [-1, 1]")]
    AnisotropyOutOfRange { name: &'static str, value: f64 },
    #[error("temperature {value} is negative")]
    NegativeTemperature { value: f64 },
    #[error("operation requires a purely axial field, but |B_inplane| = {b_par}")]
    FieldNotAxial { b_par: f64 },
}

/// Model parameters. `b` is the magnetic field as `[bx, by, bz]`; `t` is
/// the temperature in energy units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub j: f64,
    pub k: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub b: [f64; 3],
    pub t: f64,
}

impl ModelParams {
    /// Validating constructor: everything finite, both anisotropies in
    /// [-1, 1], temperature nonnegative.
    pub fn new(
        j: f64,
        k: f64,
        gamma: f64,
        gamma_prime: f64,
        b: [f64; 3],
        t: f64,
    ) -> Result<Self, ParamError> {
        let p = Self {
            j,
            k,
            gamma,
            gamma_prime,
            b,
            t,
        };
        p.validate()?;
        Ok(p)
    }

    /// Like `new` but without the anisotropy range check, for exploring
    /// outside the usual |gamma| <= 1 regime. Finiteness and t >= 0 are
    /// still required.
    pub fn unrestricted(
        j: f64,
        k: f64,
        gamma: f64,
        gamma_prime: f64,
        b: [f64; 3],
        t: f64,
    ) -> Result<Self, ParamError> {
        let p = Self {
            j,
            k,
            gamma,
            gamma_prime,
            b,
            t,
        };
        p.validate_base()?;
        Ok(p)
    }

    /// Finiteness and nonnegative temperature, without the anisotropy
    /// range check.
    pub fn validate_base(&self) -> Result<(), ParamError> {
        let fields: [(&'static str, f64); 8] = [
            ("j", self.j),
            ("k", self.k),
            ("gamma", self.gamma),
            ("gamma_prime", self.gamma_prime),
            ("bx", self.b[0]),
            ("by", self.b[1]),
            ("bz", self.b[2]),
            ("t", self.t),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ParamError::NonFinite { name });
            }
        }
        if self.t < 0.0 {
            return Err(ParamError::NegativeTemperature { value: self.t });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.validate_base()?;
        if self.gamma.abs() > 1.0 {
            return Err(ParamError::AnisotropyOutOfRange {
                name: "gamma",
                value: self.gamma,
            });
        }
        if self.gamma_prime.abs() > 1.0 {
            return Err(ParamError::AnisotropyOutOfRange {
                name: "gamma_prime",
                value: self.gamma_prime,
            });
        }
        Ok(())
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// In-plane field magnitude `hypot(bx, by)`.
    pub fn b_par(&self) -> f64 {
        self.b[0].hypot(self.b[1])
    }

    /// Axial field component (z).
    pub fn b_perp(&self) -> f64 {
        self.b[2]
    }
}

/// Magnetic field given either componentwise or as magnitude + tilt away
/// from the z axis (degrees). `Polar { bmag, theta_deg }` means
/// `bz = bmag cos(theta)`, in-plane `bmag sin(theta)` along x. Right
/// angles are exact: theta 90 produces bz = 0 bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Cartesian([f64; 3]),
    Polar { bmag: f64, theta_deg: f64 },
}

impl FieldSpec {
    pub fn to_cartesian(self) -> [f64; 3] {
        match self {
            FieldSpec::Cartesian(b) => b,
            FieldSpec::Polar { bmag, theta_deg } => {
                [bmag * sin_deg(theta_deg), 0.0, bmag * cos_deg(theta_deg)]
            }
        }
    }
}

/// cos of an angle in degrees, exact at multiples of 90.
pub fn cos_deg(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r == 0.0 {
        1.0
    } else if r == 90.0 {
        0.0
    } else if r == 180.0 {
        -1.0
    } else if r == 270.0 {
        0.0
    } else {
        deg.to_radians().cos()
    }
}

/// sin of an angle in degrees, exact at multiples of 90.
pub fn sin_deg(deg: f64) -> f64 {
    cos_deg(deg - 90.0)
}

pub fn sigma_x() -> CMatrix2 {
    CMatrix2::new([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn sigma_y() -> CMatrix2 {
    CMatrix2::new([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn sigma_z() -> CMatrix2 {
    CMatrix2::new([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

/// `(sigma_x + i sigma_y)/2`, the raising operator.
pub fn sigma_plus() -> CMatrix2 {
    CMatrix2::new([[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]])
}

/// `(sigma_x - i sigma_y)/2`, the lowering operator.
pub fn sigma_minus() -> CMatrix2 {
    CMatrix2::new([[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

/// Exchange coefficients as `[[a_xx, a_xy], [a_yx, a_yy]]`.
pub fn coupling_matrix(p: &ModelParams) -> [[f64; 2]; 2] {
    [
        [(1.0 + p.gamma) * p.j, (1.0 + p.gamma_prime) * p.k],
        [(1.0 - p.gamma_prime) * p.k, (1.0 - p.gamma) * p.j],
    ]
}

fn field_term(b: [f64; 3]) -> CMatrix4 {
    let id = CMatrix2::identity();
    let paulis = [sigma_x(), sigma_y(), sigma_z()];
    let mut h = CMatrix4::zero();
    for (i, s) in paulis.iter().enumerate() {
        if b[i] == 0.0 {
            continue;
        }
        let sym = s.kron(&id).add(&id.kron(s));
        h = h.add(&sym.scale(0.5 * b[i]));
    }
    h
}

/// Hamiltonian assembled from the Cartesian coupling matrix:
/// `1/2 sum_{i,j in {x,y}} a_ij sigma_i (x) sigma_j` plus the symmetric
/// field term `1/2 sum_i b_i (sigma_i (x) 1 + 1 (x) sigma_i)`.
pub fn hamiltonian(p: &ModelParams) -> CMatrix4 {
    let a = coupling_matrix(p);
    let paulis = [sigma_x(), sigma_y()];
    let mut h = CMatrix4::zero();
    for i in 0..2 {
        for j in 0..2 {
            if a[i][j] == 0.0 {
                continue;
            }
            h = h.add(&paulis[i].kron(&paulis[j]).scale(0.5 * a[i][j]));
        }
    }
    h = h.add(&field_term(p.b));
    h.hermitize().expect("finite parameters")
}

/// The same operator assembled independently in the raising/lowering
/// basis: `(gamma J - iK) s+s+ + (J + i gamma' K) s+s- + h.c.` plus the
/// identical field term. Used to cross-check `hamiltonian`; the two share
/// nothing beyond the Pauli constructors.
pub fn hamiltonian_pm(p: &ModelParams) -> CMatrix4 {
    let sp = sigma_plus();
    let sm = sigma_minus();
    let terms: [(Complex, CMatrix4); 4] = [
        (c(p.gamma * p.j, -p.k), sp.kron(&sp)),
        (c(p.j, p.gamma_prime * p.k), sp.kron(&sm)),
        (c(p.j, -p.gamma_prime * p.k), sm.kron(&sp)),
        (c(p.gamma * p.j, p.k), sm.kron(&sm)),
    ];
    let mut h = CMatrix4::zero();
    for (coeff, op) in terms {
        let mut scaled = op;
        for row in scaled.e.iter_mut() {
            for x in row.iter_mut() {
                *x *= coeff;
            }
        }
        h = h.add(&scaled);
    }
    h.add(&field_term(p.b))
}

/// The three energy scales of the spectrum.
///
/// `mu` governs the antiparallel (|ud>, |du>) sector, `nu` the parallel
/// (|uu>, |dd>) sector, and `lambda_phi` is `nu` dressed by the axial
/// field. For a purely axial field the spectrum is exactly
/// `{-lambda_phi, -mu, mu, lambda_phi}` as a multiset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralQuantities {
    pub mu: f64,
    pub nu: f64,
    pub lambda_phi: f64,
}

pub fn spectral_quantities(p: &ModelParams) -> SpectralQuantities {
    let mu = p.j.hypot(p.gamma_prime * p.k);
    let nu = (p.gamma * p.j).hypot(p.k);
    let lambda_phi = nu.hypot(p.b_perp());
    SpectralQuantities {
        mu,
        nu,
        lambda_phi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    pub state: [Complex; 4],
}

/// The four closed-form eigenpairs available when the field is purely
/// axial. `psi` states live in the antiparallel sector with energies
/// `+/- mu`; `phi` states live in the parallel sector with energies
/// `+/- lambda_phi`.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticEigenstates {
    pub psi_plus: EigenPair,
    pub psi_minus: EigenPair,
    pub phi_plus: EigenPair,
    pub phi_minus: EigenPair,
}

impl AnalyticEigenstates {
    pub fn pairs(&self) -> [EigenPair; 4] {
        [self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus]
    }
}

/// Fix the global phase so the largest-magnitude component is real and
/// nonnegative (ties broken by lowest index), then normalize.
fn canonicalize(mut v: [Complex; 4]) -> [Complex; 4] {
    let mut best = 0usize;
    for i in 1..4 {
        if v[i].norm_sqr() > v[best].norm_sqr() {
            best = i;
        }
    }
    let pivot = v[best];
    let mag = pivot.norm();
    if mag > 0.0 {
        let phase = pivot.conj() / mag;
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
    let n = crate::matcore::vnorm(&v);
    for x in v.iter_mut() {
        *x /= n;
    }
    v
}

/// Closed-form eigenpairs for an axial field.
///
/// In the antiparallel sector the eigenvectors are
/// `(J + i gamma' K) |ud> +/- mu |du>` (up to phase and normalization);
/// in the parallel sector `(gamma J - i K) |uu> + (+/-lambda - b_perp) |dd>`.
/// When one of those expressions degenerates to the zero vector (it can,
/// when the sector coupling vanishes), the equivalent formula obtained
/// from the other matrix row is used instead, picking whichever has the
/// larger norm. Fully decoupled sectors fall back to basis states.
///
/// Errors when the field has an in-plane component, which mixes the two
/// sectors and invalidates the closed forms.
pub fn analytic_eigenstates(p: &ModelParams) -> Result<AnalyticEigenstates, ParamError> {
    let b_par = p.b_par();
    if b_par != 0.0 {
        return Err(ParamError::FieldNotAxial { b_par });
    }
    let q = spectral_quantities(p);
    let b_perp = p.b_perp();
    let zero = c(0.0, 0.0);

    let (psi_plus, psi_minus) = if q.mu == 0.0 {
        (
            EigenPair {
                energy: 0.0,
                state: [zero, c(1.0, 0.0), zero, zero],
            },
            EigenPair {
                energy: 0.0,
                state: [zero, zero, c(1.0, 0.0), zero],
            },
        )
    } else {
        let amp = c(p.j, p.gamma_prime * p.k);
        let build = |sign: f64| EigenPair {
            energy: sign * q.mu,
            state: canonicalize([zero, amp, c(sign * q.mu, 0.0), zero]),
        };
        (build(1.0), build(-1.0))
    };

    let (phi_plus, phi_minus) = if q.lambda_phi == 0.0 {
        (
            EigenPair {
                energy: 0.0,
                state: [c(1.0, 0.0), zero, zero, zero],
            },
            EigenPair {
                energy: 0.0,
                state: [zero, zero, zero, c(1.0, 0.0)],
            },
        )
    } else {
        let amp = c(p.gamma * p.j, -p.k);
        let build = |sign: f64| {
            let energy = sign * q.lambda_phi;
            // two parametrizations of the same ray; the degenerate one has
            // norm zero, so take the larger
            let va = [amp, c(energy - b_perp, 0.0)];
            let vb = [c(energy + b_perp, 0.0), amp.conj()];
            let na = va[0].norm_sqr() + va[1].norm_sqr();
            let nb = vb[0].norm_sqr() + vb[1].norm_sqr();
            let pick = if na >= nb { va } else { vb };
            EigenPair {
                energy,
                state: canonicalize([pick[0], zero, zero, pick[1]]),
            }
        };
        (build(1.0), build(-1.0))
    };

    Ok(AnalyticEigenstates {
        psi_plus,
        psi_minus,
        phi_plus,
        phi_minus,
    })
}
