//! Thermal and ground states of the two-qubit model.
//!
//! States are built from the eigendecomposition of the Hamiltonian. All
//! Boltzmann factors are evaluated relative to the ground energy, so the
//! largest weight is exactly one and nothing overflows no matter how small
//! the temperature gets; weights that underflow to zero are already
//! negligible at that point.

use crate::matcore::{eig_hermitian, CMatrix4, MatError};
use crate::spinmodel::{hamiltonian, ModelParams};
use thiserror::Error;

/// Relative gap under which eigenvalues count as one degenerate level.
const DEGENERACY_REL_TOL: f64 = 1e-9;

/// Tolerances a density matrix must meet to count as a physical state.
pub const STATE_TRACE_TOL: f64 = 1e-12;
pub const STATE_HERM_TOL: f64 = 1e-13;
pub const STATE_PSD_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ThermalError {
    #[error("Gibbs state requires t > 0, got {t}")]
    NonPositiveTemperature { t: f64 },
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("state invariant violated: {0}")]
    InvalidState(String),
}

/// A density matrix together with the factorization it was formed from.
///
/// `basis` holds the Hamiltonian eigenvectors as columns and `weights` the
/// matching populations, so `rho = basis diag(weights) basis^dagger`. The
/// factorization carries more precision than `rho` itself: populations are
/// exact relative to one another even when they span hundreds of orders of
/// magnitude, which downstream concurrence evaluation exploits.
///
/// `log_z` is the log partition function. For Gibbs states it is the full
/// `log sum_i exp(-E_i/t)`, reconstructed from the shifted weights as
/// `log(sum_i w_i) - E_min/t`. For ground states the divergent `-E_min/t`
/// part is dropped and the field holds the zero temperature limit of the
/// shifted sum, which is `log(degeneracy)`.
///
/// `ground_degeneracy` is populated only on the zero temperature path.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub rho: CMatrix4,
    pub basis: CMatrix4,
    pub weights: [f64; 4],
    pub log_z: f64,
    pub t: f64,
    pub ground_degeneracy: Option<usize>,
}

impl ThermalState {
    /// Check the physical-state invariants: unit trace, Hermiticity,
    /// positive semidefiniteness.
    pub fn validate(&self) -> Result<(), ThermalError> {
        let tr = self.rho.trace();
        let dev = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
        if dev > STATE_TRACE_TOL {
            return Err(ThermalError::InvalidState(format!(
                "trace deviates from one by {dev:.3e}"
            )));
        }
        let asym = self.rho.hermitian_asymmetry();
        if asym > STATE_HERM_TOL {
            return Err(ThermalError::InvalidState(format!(
                "Hermitian asymmetry {asym:.3e}"
            )));
        }
        let d = eig_hermitian(&self.rho)?;
        if d.eigenvalues[0] < -STATE_PSD_TOL {
            return Err(ThermalError::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                d.eigenvalues[0]
            )));
        }
        if let Some(&w) = self.weights.iter().find(|&&w| !(0.0..=1.0).contains(&w)) {
            return Err(ThermalError::InvalidState(format!(
                "population {w:.3e} outside [0, 1]"
            )));
        }
        let wsum: f64 = self.weights.iter().sum();
        if (wsum - 1.0).abs() > STATE_TRACE_TOL {
            return Err(ThermalError::InvalidState(format!(
                "populations sum to 1{:+.3e}",
                wsum - 1.0
            )));
        }
        let mut rebuilt = CMatrix4::zero();
        for k in 0..4 {
            let col = [
                self.basis.e[0][k],
                self.basis.e[1][k],
                self.basis.e[2][k],
                self.basis.e[3][k],
            ];
            rebuilt = rebuilt.add(&CMatrix4::outer(&col).scale(self.weights[k]));
        }
        let drift = rebuilt.max_abs_diff(&self.rho);
        if drift > 1e-12 {
            return Err(ThermalError::InvalidState(format!(
                "factorization drifts from the density matrix by {drift:.3e}"
            )));
        }
        Ok(())
    }
}

/// Gibbs state `exp(-H/t) / Z` at temperature `t > 0`.
pub fn gibbs_state(p: &ModelParams) -> Result<ThermalState, ThermalError> {
    let t = p.t;
    if t <= 0.0 {
        return Err(ThermalError::NonPositiveTemperature { t });
    }
    let h = hamiltonian(p);
    let d = eig_hermitian(&h)?;
    let e_min = d.eigenvalues[0];
    // shifted weights: w in (0, 1], the ground level carries exactly 1
    let weight = |e: f64| (-(e - e_min) / t).exp();
    let z: f64 = d.eigenvalues.iter().map(|&e| weight(e)).sum();
    let rho = d.map(|e| weight(e) / z);
    let mut weights = [0.0; 4];
    for (w, &e) in weights.iter_mut().zip(&d.eigenvalues) {
        *w = weight(e) / z;
    }
    Ok(ThermalState {
        rho,
        basis: d.basis_matrix(),
        weights,
        log_z: z.ln() - e_min / t,
        t,
        ground_degeneracy: None,
    })
}

/// Zero temperature state: the uniform mixture over the ground eigenspace.
///
/// Levels within a relative gap of 1e-9 of the lowest eigenvalue are
/// grouped into one eigenspace; this matches the limit of `gibbs_state`
/// as t goes to zero whenever the degeneracy is exact. The temperature
/// stored in `p` is ignored.
pub fn ground_state(p: &ModelParams) -> Result<ThermalState, ThermalError> {
    let h = hamiltonian(p);
    let d = eig_hermitian(&h)?;
    let e_min = d.eigenvalues[0];
    let gap_tol = DEGENERACY_REL_TOL * e_min.abs().max(1.0);
    let degeneracy = d
        .eigenvalues
        .iter()
        .filter(|&&e| e - e_min <= gap_tol)
        .count();
    let mut rho = CMatrix4::zero();
    for k in 0..degeneracy {
        rho = rho.add(&CMatrix4::outer(&d.vectors[k]));
    }
    let rho = rho
        .scale(1.0 / degeneracy as f64)
        .hermitize()
        .expect("finite by construction");
    let mut weights = [0.0; 4];
    for w in weights.iter_mut().take(degeneracy) {
        *w = 1.0 / degeneracy as f64;
    }
    Ok(ThermalState {
        rho,
        basis: d.basis_matrix(),
        weights,
        log_z: (degeneracy as f64).ln(),
        t: 0.0,
        ground_degeneracy: Some(degeneracy),
    })
}
