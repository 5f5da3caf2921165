//! Thermal entanglement of two coupled qubits.
//!
//! The model is an XY exchange Hamiltonian for a pair of spin-1/2 sites,
//! extended with cross product (x-y mixing) exchange terms and an external
//! magnetic field of arbitrary orientation. The library builds the 4x4
//! Hamiltonian, forms Gibbs or ground states, and quantifies two-qubit
//! entanglement through the Wootters concurrence. On top of that sit a
//! threshold-temperature solver, a jump-locus detector for the zero
//! temperature discontinuity of the concurrence, and a deterministic sweep
//! engine with ready-made parameter grids.
//!
//! Conventions used throughout:
//!
//! * basis order `|uu>, |ud>, |du>, |dd>` (qubit 1 is the left factor,
//!   `sigma_z |u> = +|u>`),
//! * field component along z is written `b_perp`, the in-plane magnitude
//!   `b_par = hypot(bx, by)`,
//! * temperatures are in energy units (k_B = 1).

// dense 4x4 kernels index rows and columns in lockstep; iterator rewrites
// of those loops obscure the pairing
#![allow(clippy::needless_range_loop)]

pub mod entangle;
pub mod explore;
pub mod matcore;
pub mod selftest;
pub mod spinmodel;
pub mod thermal;

pub use entangle::{
    concurrence, concurrence_analytic_bz, concurrence_numeric, concurrence_state,
    concurrence_t0_closed, ConcurrenceResult, EntangleError, EvalPath,
};
pub use explore::{
    figure_preset, jump_locus_t0, jump_locus_t0_numeric, render_rows, run_sweep,
    run_sweep_sequential, threshold_temperature, ExploreError, FigureName, Param, PresetOptions,
    Quantity, SweepAxis, SweepGrid, SweepRow, TableFormat, ThresholdResult,
};
pub use matcore::{CMatrix2, CMatrix4, Complex, MatError, SpectralDecomp};
pub use matcore::{eig_hermitian, mat_exp_hermitian, mat_sqrt_psd, singular_values};
pub use spinmodel::{
    analytic_eigenstates, coupling_matrix, hamiltonian, hamiltonian_pm, spectral_quantities,
    AnalyticEigenstates, EigenPair, FieldSpec, ModelParams, ParamError, SpectralQuantities,
};
pub use thermal::{gibbs_state, ground_state, ThermalError, ThermalState};
