//! Wootters concurrence of two-qubit states, with fast exact paths for the
//! parameter regions that admit closed forms.
//!
//! The numeric path works for any valid density matrix: with
//! `S = sigma_y (x) sigma_y`, the four characteristic roots are the
//! singular values of `sqrt(rho) S sqrt(rho)*` (equivalently, square roots
//! of the eigenvalues of `rho S rho* S`), and the concurrence is
//! `max(w1 - w2 - w3 - w4, 0)` with the roots sorted in descending order.
//! Computing them as singular values rather than as eigenvalue square
//! roots keeps near-zero roots accurate to machine precision instead of
//! the square root of it. States carrying their spectral factorization
//! get a sharper route still: with `rho = V diag(p) V^dagger` the roots
//! are the singular values of `diag(sqrt(p)) V^T S V diag(sqrt(p))`
//! (up to conjugation), in which the populations enter exactly.
//!
//! For a purely axial field the Gibbs state splits over the parallel and
//! antiparallel sectors and the roots come out in closed form; that path
//! is evaluated in a shifted representation that stays finite down to
//! arbitrarily small temperatures. At exactly t = 0 two closed-form
//! branches cover the axial-field case and the in-plane isotropic case.

use crate::matcore::{mat_sqrt_psd, singular_values, CMatrix4, Complex, MatError};
use crate::spinmodel::{spectral_quantities, ModelParams};
use crate::thermal::{
    gibbs_state, ground_state, ThermalError, ThermalState, STATE_HERM_TOL, STATE_TRACE_TOL,
};
use std::fmt;
use thiserror::Error;

/// C(t) below this is treated as exactly zero by the threshold machinery.
pub const CONCURRENCE_FLOOR: f64 = 1e-14;

/// Closed-form branch points are recognized within this absolute window.
const BRANCH_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EntangleError {
    #[error("density matrix trace deviates from one by {0:.3e}")]
    TraceNotOne(f64),
    #[error("density matrix Hermitian asymmetry {0:.3e}")]
    NotHermitian(f64),
    #[error("closed form requires {0}")]
    NotApplicable(&'static str),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
}

/// Which evaluation route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    /// Eigendecomposition of the state, any parameters.
    Numeric,
    /// Closed-form roots for an axial field at t > 0.
    AnalyticBz,
    /// Closed-form zero temperature branches.
    ClosedFormT0,
}

impl EvalPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvalPath::Numeric => "numeric",
            EvalPath::AnalyticBz => "analytic_bz",
            EvalPath::ClosedFormT0 => "closed_form_t0",
        }
    }
}

impl fmt::Display for EvalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Concurrence value, its four characteristic roots in descending order,
/// and the route that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    pub roots: [f64; 4],
    pub path: EvalPath,
}

fn spin_flip_matrix() -> CMatrix4 {
    // sigma_y (x) sigma_y is the real antidiagonal (-1, 1, 1, -1)
    let mut s = CMatrix4::zero();
    s.e[0][3] = Complex::new(-1.0, 0.0);
    s.e[1][2] = Complex::new(1.0, 0.0);
    s.e[2][1] = Complex::new(1.0, 0.0);
    s.e[3][0] = Complex::new(-1.0, 0.0);
    s
}

fn finish(mut roots: [f64; 4], path: EvalPath) -> ConcurrenceResult {
    roots.sort_by(|a, b| b.total_cmp(a));
    let value = (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0);
    ConcurrenceResult { value, roots, path }
}

/// Concurrence of an arbitrary two-qubit density matrix.
///
/// The state must satisfy the physical invariants (unit trace within
/// 1e-12, Hermitian within 1e-13, PSD within -1e-12); violations are
/// reported as errors rather than silently producing garbage.
pub fn concurrence_numeric(rho: &CMatrix4) -> Result<ConcurrenceResult, EntangleError> {
    let tr = rho.trace();
    let trace_dev = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
    if trace_dev > STATE_TRACE_TOL {
        return Err(EntangleError::TraceNotOne(trace_dev));
    }
    let asym = rho.hermitian_asymmetry();
    if asym > STATE_HERM_TOL {
        return Err(EntangleError::NotHermitian(asym));
    }
    let s = spin_flip_matrix();
    let sqrt_rho = mat_sqrt_psd(rho)?;
    let a = sqrt_rho.mul(&s).mul(&sqrt_rho.conj());
    let roots = singular_values(&a)?;
    Ok(finish(roots, EvalPath::Numeric))
}

/// Characteristic roots straight from a state's spectral factorization.
///
/// Scaling the flipped eigenvector overlap matrix by the square roots of
/// the populations reproduces the singular values of
/// `sqrt(rho) S sqrt(rho)*` without ever forming the density matrix, so
/// populations hundreds of orders of magnitude apart still contribute at
/// full precision. This is the route of choice for Gibbs and ground
/// states; the reported path is still [`EvalPath::Numeric`].
pub fn concurrence_state(state: &ThermalState) -> Result<ConcurrenceResult, EntangleError> {
    let s = spin_flip_matrix();
    let v = &state.basis;
    let overlap = v.adjoint().mul(&s).mul(&v.conj());
    let sp = state.weights.map(|w| w.max(0.0).sqrt());
    let mut a = CMatrix4::zero();
    for i in 0..4 {
        for j in 0..4 {
            a.e[i][j] = overlap.e[i][j] * (sp[i] * sp[j]);
        }
    }
    let roots = singular_values(&a)?;
    Ok(finish(roots, EvalPath::Numeric))
}

/// Closed-form characteristic roots for an axial field at t > 0.
///
/// With `a = mu/t` and `l = lambda_phi/t` the roots are
/// `exp(+/-a)/Z` and `exp(+/-arcsinh(x))/Z` where
/// `x = (nu/lambda_phi) sinh(l)` and `Z = 2 cosh(a) + 2 cosh(l)`.
/// Everything is evaluated relative to `m = max(a, l)` so the expression
/// stays finite for temperatures all the way down to the underflow range;
/// `arcsinh(x)` switches to its logarithmic expansion once `exp(l)` would
/// no longer be representable.
pub fn concurrence_analytic_bz(p: &ModelParams) -> Result<ConcurrenceResult, EntangleError> {
    if p.b_par() != 0.0 {
        return Err(EntangleError::NotApplicable("a purely axial field"));
    }
    if p.t <= 0.0 {
        return Err(EntangleError::NotApplicable("t > 0"));
    }
    let q = spectral_quantities(p);
    let t = p.t;
    let a = q.mu / t;
    let l = q.lambda_phi / t;
    let m = a.max(l);

    let zs = (a - m).exp() + (-a - m).exp() + (l - m).exp() + (-l - m).exp();

    // arcsinh(x) with x = (nu/lambda) sinh(l), stable for huge l;
    // nu > 0 implies lambda >= nu > 0 so the ratio is always defined
    let asinh_x = if q.nu == 0.0 {
        0.0
    } else if l < 30.0 {
        ((q.nu / q.lambda_phi) * l.sinh()).asinh()
    } else {
        // x = nu/(2 lambda) e^l (1 - e^{-2l}); arcsinh(x) ~ ln(2x)
        (q.nu / q.lambda_phi).ln() + l + (-(-(2.0 * l)).exp()).ln_1p()
    };

    let roots = [
        (a - m).exp() / zs,
        (-a - m).exp() / zs,
        (asinh_x - m).exp() / zs,
        (-asinh_x - m).exp() / zs,
    ];
    Ok(finish(roots, EvalPath::AnalyticBz))
}

/// Zero temperature closed forms.
///
/// Axial-field branch (`b_par = 0`): the ground state is fully entangled
/// when `mu > lambda_phi`, carries `nu/lambda_phi` when `mu < lambda_phi`,
/// and at the degeneracy `|mu - lambda_phi| <= 1e-12` the uniform ground
/// mixture gives `(1 - nu/lambda_phi)/2`.
///
/// In-plane branch (`b_perp = 0`, `gamma = 0`, `k = 0`; `gamma_prime` is
/// inert because it only enters multiplied by `k`): full entanglement
/// below `b_par = sqrt(2)|J|`, and `(1 - D^2)/(1 + D^2)` with
/// `D = (sqrt(1 + u^2) - 1)/u`, `u = 2 b_par/|J|` above it. At the level
/// crossing itself the tabulated value 2/3 is returned; it corresponds to
/// the symmetric superposition of the two crossing levels, not to the
/// uniform ground mixture (which gives 1/3, the one-sided limit from
/// above). See the crate README for the discussion of this convention.
pub fn concurrence_t0_closed(p: &ModelParams) -> Result<ConcurrenceResult, EntangleError> {
    if p.b_par() == 0.0 {
        let q = spectral_quantities(p);
        if q.mu == 0.0 && q.lambda_phi == 0.0 {
            // no couplings at all: the state is maximally mixed
            return Ok(finish([0.25; 4], EvalPath::ClosedFormT0));
        }
        let roots = if (q.mu - q.lambda_phi).abs() <= BRANCH_TOL {
            let r = q.nu / q.lambda_phi;
            [0.5, 0.5 * r, 0.0, 0.0]
        } else if q.mu > q.lambda_phi {
            [1.0, 0.0, 0.0, 0.0]
        } else {
            [q.nu / q.lambda_phi, 0.0, 0.0, 0.0]
        };
        return Ok(finish(roots, EvalPath::ClosedFormT0));
    }
    if p.b_perp() == 0.0 && p.gamma == 0.0 && p.k == 0.0 {
        let j = p.j.abs();
        let b = p.b_par();
        if j == 0.0 {
            // pure field: the ground state is a polarized product state
            return Ok(finish([0.0; 4], EvalPath::ClosedFormT0));
        }
        let crossing = 2f64.sqrt() * j;
        let roots = if (b - crossing).abs() <= BRANCH_TOL {
            [2.0 / 3.0, 0.0, 0.0, 0.0]
        } else if b < crossing {
            [1.0, 0.0, 0.0, 0.0]
        } else {
            let u = 2.0 * b / j;
            let d = ((1.0 + u * u).sqrt() - 1.0) / u;
            [(1.0 - d * d) / (1.0 + d * d), 0.0, 0.0, 0.0]
        };
        return Ok(finish(roots, EvalPath::ClosedFormT0));
    }
    Err(EntangleError::NotApplicable(
        "an axial field, or an in-plane field with gamma = 0 and k = 0",
    ))
}

/// Concurrence at the parameters' own temperature, routed to the cheapest
/// applicable path: closed forms at t = 0, sector closed forms for axial
/// fields at t > 0, and the numeric path otherwise.
pub fn concurrence(p: &ModelParams) -> Result<ConcurrenceResult, EntangleError> {
    if p.t == 0.0 {
        match concurrence_t0_closed(p) {
            Ok(r) => Ok(r),
            Err(EntangleError::NotApplicable(_)) => concurrence_state(&ground_state(p)?),
            Err(e) => Err(e),
        }
    } else if p.b_par() == 0.0 {
        concurrence_analytic_bz(p)
    } else {
        concurrence_state(&gibbs_state(p)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{CMatrix2, CMatrix4};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(j: f64, k: f64, gamma: f64, gamma_prime: f64, b: [f64; 3], t: f64) -> ModelParams {
        ModelParams::new(j, k, gamma, gamma_prime, b, t).unwrap()
    }

    fn bell_minus_rho() -> CMatrix4 {
        let r = 0.5f64.sqrt();
        let v = [
            Complex::new(0.0, 0.0),
            Complex::new(r, 0.0),
            Complex::new(-r, 0.0),
            Complex::new(0.0, 0.0),
        ];
        CMatrix4::outer(&v)
    }

    #[test]
    fn pure_bell_state_is_maximally_entangled() {
        let r = concurrence_numeric(&bell_minus_rho()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!((r.roots[0] - 1.0).abs() < 1e-12);
        assert!(r.roots[1] < 1e-7);
    }

    #[test]
    fn product_and_maximally_mixed_states_are_unentangled() {
        let v = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ];
        let r = concurrence_numeric(&CMatrix4::outer(&v)).unwrap();
        assert!(r.value < 1e-12);
        let mixed = CMatrix4::from_real_diag([0.25; 4]);
        let r = concurrence_numeric(&mixed).unwrap();
        assert_eq!(r.value, 0.0);
        for w in r.roots {
            assert!((w - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn gibbs_fixture_matches_closed_expression() {
        // isotropic exchange at unit temperature
        let p = params(1.0, 0.0, 0.0, 0.0, [0.0; 3], 1.0);
        let want = (1f64.sinh() - 1.0) / (1.0 + 1f64.cosh());
        let analytic = concurrence_analytic_bz(&p).unwrap();
        assert!(
            (analytic.value - want).abs() < 1e-14,
            "{} vs {want}",
            analytic.value
        );
        let numeric = concurrence_numeric(&gibbs_state(&p).unwrap().rho).unwrap();
        assert!((numeric.value - want).abs() < 1e-12);
        for k in 0..4 {
            assert!((analytic.roots[k] - numeric.roots[k]).abs() < 1e-11);
        }
        let dispatched = concurrence(&p).unwrap();
        assert_eq!(dispatched.path, EvalPath::AnalyticBz);
        assert_eq!(dispatched.value, analytic.value);
    }

    #[test]
    fn analytic_and_numeric_paths_agree_for_axial_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0301);
        for _ in 0..300 {
            let p = params(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                [0.0, 0.0, rng.gen_range(-2.0..2.0)],
                rng.gen_range(0.05..5.0),
            );
            let a = concurrence_analytic_bz(&p).unwrap();
            let n = concurrence_state(&gibbs_state(&p).unwrap()).unwrap();
            assert!(
                (a.value - n.value).abs() < 1e-11,
                "paths diverge by {} at {:?}",
                (a.value - n.value).abs(),
                p
            );
            for k in 0..4 {
                assert!((a.roots[k] - n.roots[k]).abs() < 1e-11, "root {k} at {p:?}");
            }
        }
    }

    #[test]
    fn analytic_path_is_stable_at_extreme_temperatures() {
        let p = params(1.0, 0.0, 0.0, 0.0, [0.0, 0.0, 0.5], 1e-7);
        let r = concurrence_analytic_bz(&p).unwrap();
        assert!(r.value.is_finite());
        // at t -> 0 with mu > lambda the state is the fully entangled pair
        assert!((r.value - 1.0).abs() < 1e-12);
        let hot = concurrence_analytic_bz(&p.with_t(1e6)).unwrap();
        assert_eq!(hot.value, 0.0);
    }

    #[test]
    fn zero_t_axial_branches() {
        // mu > lambda: fully entangled
        let r = concurrence_t0_closed(&params(1.0, 0.5, 0.0, 0.0, [0.0; 3], 0.0)).unwrap();
        assert_eq!(r.value, 1.0);
        // mu < lambda: nu/lambda
        let r =
            concurrence_t0_closed(&params(1.0, 0.0, 1.0, 0.0, [0.0, 0.0, 1.0], 0.0)).unwrap();
        assert!((r.value - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        // exact degeneracy: (1 - nu/lambda)/2
        let r =
            concurrence_t0_closed(&params(1.0, 0.0, 0.6, 0.0, [0.0, 0.0, 0.8], 0.0)).unwrap();
        assert!((r.value - 0.2).abs() < 1e-12, "{}", r.value);
        // no couplings: maximally mixed
        let r = concurrence_t0_closed(&params(0.0, 0.0, 0.0, 0.0, [0.0; 3], 0.0)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn zero_t_inplane_branch() {
        let at = |b: f64| {
            concurrence_t0_closed(&params(1.0, 0.0, 0.0, 0.0, [b, 0.0, 0.0], 0.0))
                .unwrap()
                .value
        };
        assert_eq!(at(1.0), 1.0);
        assert!((at(2f64.sqrt()) - 2.0 / 3.0).abs() < 1e-15);
        // above the crossing the value simplifies to 1/sqrt(17) at b = 2
        assert!((at(2.0) - 1.0 / 17f64.sqrt()).abs() < 1e-14);
        // right limit approaches 1/3
        assert!((at(2f64.sqrt() + 1e-6) - 1.0 / 3.0).abs() < 1e-4);
        // pure field means a product ground state
        let r = concurrence_t0_closed(&params(0.0, 0.0, 0.0, 0.0, [1.0, 0.0, 0.0], 0.0)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn zero_t_closed_form_rejects_mixed_orientation() {
        let p = params(1.0, 0.0, 0.0, 0.0, [1.0, 0.0, 1.0], 0.0);
        assert!(matches!(
            concurrence_t0_closed(&p),
            Err(EntangleError::NotApplicable(_))
        ));
        // the dispatcher falls back to the numeric ground-state route
        let r = concurrence(&p).unwrap();
        assert_eq!(r.path, EvalPath::Numeric);
        assert!(r.value.is_finite());
    }

    #[test]
    fn dispatcher_value_range_and_root_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0302);
        for _ in 0..400 {
            let t = if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.01..4.0)
            };
            let p = params(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ],
                t,
            );
            let r = concurrence(&p).unwrap();
            assert!(r.value >= 0.0 && r.value <= 1.0 + 1e-12, "{r:?} at {p:?}");
            for k in 0..3 {
                assert!(r.roots[k] >= r.roots[k + 1]);
            }
            let recomputed = (r.roots[0] - r.roots[1] - r.roots[2] - r.roots[3]).max(0.0);
            assert!((r.value - recomputed).abs() <= 1e-12);
        }
    }

    #[test]
    fn sign_flips_leave_concurrence_unchanged_for_axial_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0303);
        for _ in 0..200 {
            let p = params(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                [0.0, 0.0, rng.gen_range(-2.0..2.0)],
                rng.gen_range(0.05..3.0),
            );
            let c0 = concurrence(&p).unwrap().value;
            let mut flip_j = p;
            flip_j.j = -p.j;
            let mut flip_k = p;
            flip_k.k = -p.k;
            let mut flip_b = p;
            flip_b.b[2] = -p.b[2];
            for flipped in [flip_j, flip_k, flip_b] {
                let c1 = concurrence(&flipped).unwrap().value;
                assert!((c0 - c1).abs() < 1e-10, "{c0} vs {c1} at {p:?}");
            }
        }
    }

    #[test]
    fn inplane_rotation_leaves_concurrence_unchanged_without_cross_terms() {
        // only holds for gamma j = k = 0; otherwise the phase of the
        // double-flip coupling fixes a direction in the plane
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0304);
        for _ in 0..100 {
            let b_par: f64 = rng.gen_range(0.0..2.0);
            let bz = rng.gen_range(-2.0..2.0);
            let p = params(
                rng.gen_range(-2.0..2.0),
                0.0,
                0.0,
                rng.gen_range(-1.0..1.0),
                [b_par, 0.0, bz],
                rng.gen_range(0.05..3.0),
            );
            let c0 = concurrence(&p).unwrap().value;
            for i in 1..=4 {
                let alpha = i as f64 * 0.7;
                let mut q = p;
                q.b = [b_par * alpha.cos(), b_par * alpha.sin(), bz];
                let c1 = concurrence(&q).unwrap().value;
                assert!((c0 - c1).abs() < 1e-10, "{c0} vs {c1} at angle {alpha}");
            }
        }
    }

    #[test]
    fn field_rotation_matches_cross_coupling_rephasing() {
        // conjugating by exp(-i alpha sigma_z / 2) on both sites rotates
        // the in-plane field by alpha and multiplies the double-flip
        // coupling gamma j - i k by exp(-2 i alpha), so the two parameter
        // sets share one spectrum and one concurrence
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0306);
        for _ in 0..200 {
            let j = rng.gen_range(-2.0..2.0);
            let k = rng.gen_range(-2.0..2.0);
            let gamma = rng.gen_range(-1.0..1.0);
            let gamma_prime = rng.gen_range(-1.0..1.0);
            let b_par: f64 = rng.gen_range(0.0..2.0);
            let bz = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(0.05..3.0);
            let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
            let p = params(j, k, gamma, gamma_prime, [b_par, 0.0, bz], t);
            let c0 = concurrence(&p).unwrap().value;

            let w = Complex::new(gamma * j, -k) * Complex::from_polar(1.0, -2.0 * alpha);
            let z = Complex::new(j, gamma_prime * k);
            let q = match ModelParams::unrestricted(
                z.re,
                -w.im,
                w.re / z.re,
                z.im / -w.im,
                [b_par * alpha.cos(), b_par * alpha.sin(), bz],
                t,
            ) {
                Ok(q) => q,
                // repackaging the couplings divides by j and by the new k,
                // so a draw next to those zeros is skipped
                Err(_) => continue,
            };
            let c1 = concurrence(&q).unwrap().value;
            assert!((c0 - c1).abs() < 1e-10, "{c0} vs {c1} at {p:?}, alpha {alpha}");
        }
    }

    #[test]
    fn local_unitaries_leave_concurrence_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0307);
        let su2 = |rng: &mut ChaCha8Rng| {
            let theta = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
            let a = Complex::from_polar(theta.cos(), rng.gen_range(0.0..std::f64::consts::TAU));
            let b = Complex::from_polar(theta.sin(), rng.gen_range(0.0..std::f64::consts::TAU));
            CMatrix2::new([[a, b], [-b.conj(), a.conj()]])
        };
        for _ in 0..100 {
            let p = params(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ],
                rng.gen_range(0.05..3.0),
            );
            let state = gibbs_state(&p).unwrap();
            let u = su2(&mut rng).kron(&su2(&mut rng));
            let mut moved = state.clone();
            moved.basis = u.mul(&state.basis);
            moved.rho = u.mul(&state.rho).mul(&u.adjoint()).hermitize().unwrap();
            let c0 = concurrence_state(&state).unwrap().value;
            let c1 = concurrence_state(&moved).unwrap().value;
            assert!((c0 - c1).abs() < 1e-11, "{c0} vs {c1} at {p:?}");
            // the general route only sees the assembled density matrices,
            // so near-null populations carry square-root noise; its
            // agreement is correspondingly coarser
            let n0 = concurrence_numeric(&state.rho).unwrap().value;
            let n1 = concurrence_numeric(&moved.rho).unwrap().value;
            assert!((n0 - n1).abs() < 1e-7, "{n0} vs {n1} at {p:?}");
            assert!((c0 - n0).abs() < 1e-7, "{c0} vs {n0} at {p:?}");
        }
    }

    #[test]
    fn coupling_pair_swap_symmetry_at_zero_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0305);
        for _ in 0..200 {
            let (j, k) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (g, gp) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let t = rng.gen_range(0.05..3.0);
            let a = concurrence(&params(j, k, g, gp, [0.0; 3], t)).unwrap().value;
            let b = concurrence(&params(k, j, gp, g, [0.0; 3], t)).unwrap().value;
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn numeric_path_rejects_invalid_states() {
        let half = CMatrix4::from_real_diag([0.25, 0.25, 0.0, 0.0]);
        assert!(matches!(
            concurrence_numeric(&half),
            Err(EntangleError::TraceNotOne(_))
        ));
        let mut skew = CMatrix4::from_real_diag([0.25; 4]);
        skew.e[0][1] = Complex::new(0.1, 0.0);
        assert!(matches!(
            concurrence_numeric(&skew),
            Err(EntangleError::NotHermitian(_))
        ));
        let indefinite = CMatrix4::from_real_diag([0.6, 0.5, 0.0, -0.1]);
        assert!(matches!(
            concurrence_numeric(&indefinite),
            Err(EntangleError::Mat(MatError::NotPsd { .. }))
        ));
    }
}

