//! Parameter exploration: threshold temperatures, zero temperature jump
//! loci, and rectangular parameter sweeps with tabular output.

use crate::entangle::{concurrence, EntangleError, CONCURRENCE_FLOOR};
use crate::spinmodel::{FieldSpec, ModelParams, ParamError};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Number of geometric scan samples used to bracket a threshold.
const SCAN_SAMPLES: usize = 200;

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("invalid scan window: {0}")]
    BadScan(&'static str),
    #[error("sweep axis {param} requires a {needs} field specification")]
    AxisFieldMismatch { param: Param, needs: &'static str },
    #[error("sweep axis {param} has no values")]
    EmptyAxis { param: Param },
    #[error("sweep has no quantities to evaluate")]
    NoQuantities,
    #[error("jump locus requires a nonzero exchange coupling")]
    ZeroCoupling,
    #[error("unknown figure name {0:?}")]
    UnknownFigure(String),
    #[error(transparent)]
    Entangle(#[from] EntangleError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Result of a threshold temperature search.
///
/// `t_star` is the temperature where the concurrence vanishes for good;
/// `None` means the state is unentangled over the whole window. When the
/// concurrence is still positive at the window ceiling, `t_star` reports
/// the ceiling itself and `bracket` stays `None` to flag the saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub t_star: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    pub evaluations: usize,
}

/// Locates the highest temperature below `t_max` at which the thermal
/// state is still entangled, to absolute width `tol`.
///
/// The window `[tol, t_max]` is scanned on a geometric grid; the interval
/// past the last entangled sample is then bisected. Scanning from the top
/// makes the search robust to entanglement revivals at intermediate
/// temperatures.
pub fn threshold_temperature(
    p: &ModelParams,
    t_max: f64,
    tol: f64,
) -> Result<ThresholdResult, ExploreError> {
    threshold_with_visitor(p, t_max, tol, &mut |_| ())
}

/// As [`threshold_temperature`] but reporting every temperature the solver
/// evaluates, so audit suites can revisit the exact states it touched.
pub(crate) fn threshold_with_visitor(
    p: &ModelParams,
    t_max: f64,
    tol: f64,
    visit: &mut dyn FnMut(f64),
) -> Result<ThresholdResult, ExploreError> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(ExploreError::BadScan("t_max must be positive and finite"));
    }
    if !(tol.is_finite() && tol > 0.0 && tol < t_max) {
        return Err(ExploreError::BadScan("tol must satisfy 0 < tol < t_max"));
    }
    p.validate_base()?;

    let mut evaluations = 0usize;
    let mut c_at = |t: f64| -> Result<f64, ExploreError> {
        visit(t);
        evaluations += 1;
        Ok(concurrence(&p.with_t(t))?.value)
    };

    let ratio = (t_max / tol).ln() / (SCAN_SAMPLES - 1) as f64;
    let grid_t = |i: usize| {
        if i == SCAN_SAMPLES - 1 {
            t_max
        } else {
            tol * (ratio * i as f64).exp()
        }
    };

    let mut values = [0.0f64; SCAN_SAMPLES];
    for (i, v) in values.iter_mut().enumerate() {
        *v = c_at(grid_t(i))?;
    }

    if values[SCAN_SAMPLES - 1] > CONCURRENCE_FLOOR {
        return Ok(ThresholdResult {
            t_star: Some(t_max),
            bracket: None,
            evaluations,
        });
    }
    let last_positive = match values.iter().rposition(|&c| c > CONCURRENCE_FLOOR) {
        Some(i) => i,
        None => {
            return Ok(ThresholdResult {
                t_star: None,
                bracket: None,
                evaluations,
            })
        }
    };

    let mut lo = grid_t(last_positive);
    let mut hi = grid_t(last_positive + 1);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if c_at(mid)? > CONCURRENCE_FLOOR {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        t_star: Some(0.5 * (lo + hi)),
        bracket: Some((lo, hi)),
        evaluations,
    })
}

/// Critical field magnitude of the zero temperature entanglement jump for
/// the isotropic exchange model (`gamma = 0`, `k = 0`) with the field
/// tilted by `theta_deg` from the axial direction:
/// `sqrt(2 j^2 / (2 cos^2 theta + sin^2 theta))`.
pub fn jump_locus_t0(j: f64, theta_deg: f64) -> Result<f64, ExploreError> {
    if j == 0.0 {
        return Err(ExploreError::ZeroCoupling);
    }
    let c = crate::spinmodel::cos_deg(theta_deg);
    let s = crate::spinmodel::sin_deg(theta_deg);
    Ok((2.0 * j * j / (2.0 * c * c + s * s)).sqrt())
}

/// Locates the same jump by scanning the zero temperature concurrence over
/// field magnitudes in `[0, 2|j|]` and repeatedly zooming into the
/// interval with the largest discontinuity, down to width 1e-6.
pub fn jump_locus_t0_numeric(j: f64, theta_deg: f64) -> Result<f64, ExploreError> {
    jump_locus_scan(j, theta_deg, &mut |_| ())
}

/// As [`jump_locus_t0_numeric`] but reporting every field magnitude the
/// detector evaluates.
pub(crate) fn jump_locus_scan(
    j: f64,
    theta_deg: f64,
    visit: &mut dyn FnMut(f64),
) -> Result<f64, ExploreError> {
    if j == 0.0 {
        return Err(ExploreError::ZeroCoupling);
    }
    const POINTS: usize = 101;
    let mut c_at = |bmag: f64| -> Result<f64, ExploreError> {
        visit(bmag);
        let field = FieldSpec::Polar {
            bmag,
            theta_deg,
        };
        let p = ModelParams::new(j, 0.0, 0.0, 0.0, field.to_cartesian(), 0.0)?;
        Ok(concurrence(&p)?.value)
    };
    let (mut lo, mut hi) = (0.0f64, 2.0 * j.abs());
    while hi - lo > 1e-6 {
        let step = (hi - lo) / (POINTS - 1) as f64;
        let mut prev = c_at(lo)?;
        let mut best = (0.0f64, lo, lo + step);
        for i in 1..POINTS {
            let x = lo + step * i as f64;
            let cur = c_at(x)?;
            let jump = (cur - prev).abs();
            if jump > best.0 {
                best = (jump, x - step, x);
            }
            prev = cur;
        }
        // widen by one step so a jump sitting exactly on a sample point
        // stays inside the next window
        (lo, hi) = ((best.1 - step).max(lo), (best.2 + step).min(hi));
    }
    Ok(0.5 * (lo + hi))
}

/// Model parameter selected by a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    J,
    K,
    Gamma,
    GammaPrime,
    Bx,
    By,
    Bz,
    BMag,
    Theta,
    T,
}

impl Param {
    pub fn as_str(&self) -> &'static str {
        match self {
            Param::J => "j",
            Param::K => "k",
            Param::Gamma => "gamma",
            Param::GammaPrime => "gamma_prime",
            Param::Bx => "bx",
            Param::By => "by",
            Param::Bz => "bz",
            Param::BMag => "bmag",
            Param::Theta => "theta_deg",
            Param::T => "t",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Param {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "j" => Param::J,
            "k" => Param::K,
            "gamma" => Param::Gamma,
            "gamma_prime" => Param::GammaPrime,
            "bx" => Param::Bx,
            "by" => Param::By,
            "bz" => Param::Bz,
            "bmag" => Param::BMag,
            "theta" | "theta_deg" => Param::Theta,
            "t" => Param::T,
            other => return Err(format!("unknown sweep parameter {other:?}")),
        })
    }
}

/// Quantity evaluated at every sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// Thermal concurrence at the point's own temperature.
    Concurrence,
    /// Ground state concurrence, ignoring the point's temperature.
    ConcurrenceT0,
    /// Threshold temperature search over `[tol, t_max]`.
    Threshold { t_max: f64, tol: f64 },
}

impl Quantity {
    pub fn column(&self) -> &'static str {
        match self {
            Quantity::Concurrence => "concurrence",
            Quantity::ConcurrenceT0 => "concurrence_t0",
            Quantity::Threshold { .. } => "threshold_t",
        }
    }
}

/// One axis of a rectangular sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn values(param: Param, values: Vec<f64>) -> Self {
        SweepAxis { param, values }
    }

    /// Uniform grid with both endpoints hit exactly.
    pub fn linspace(param: Param, start: f64, stop: f64, n: usize) -> Self {
        SweepAxis {
            param,
            values: linspace(start, stop, n),
        }
    }
}

pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Rectangular sweep: every combination of axis values, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub base: ModelParams,
    pub field: FieldSpec,
    pub axes: Vec<SweepAxis>,
    pub quantities: Vec<Quantity>,
}

/// One evaluated quantity at one sweep point. `value` is `None` when the
/// quantity has no answer there (no threshold, or evaluation failure);
/// `path` names the evaluation route or the failure kind.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub value: Option<f64>,
    pub path: &'static str,
}

/// One sweep point with its resolved parameters and evaluated cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: ModelParams,
    pub bmag: f64,
    pub theta_deg: f64,
    pub cells: Vec<SweepCell>,
}

fn validate_grid(grid: &SweepGrid) -> Result<(), ExploreError> {
    if grid.quantities.is_empty() {
        return Err(ExploreError::NoQuantities);
    }
    for axis in &grid.axes {
        if axis.values.is_empty() {
            return Err(ExploreError::EmptyAxis { param: axis.param });
        }
        let mismatch = match axis.param {
            Param::Bx | Param::By | Param::Bz
                if !matches!(grid.field, FieldSpec::Cartesian(_)) =>
            {
                Some("cartesian")
            }
            Param::BMag | Param::Theta if !matches!(grid.field, FieldSpec::Polar { .. }) => {
                Some("polar")
            }
            _ => None,
        };
        if let Some(needs) = mismatch {
            return Err(ExploreError::AxisFieldMismatch {
                param: axis.param,
                needs,
            });
        }
    }
    Ok(())
}

fn point_count(grid: &SweepGrid) -> usize {
    grid.axes.iter().map(|a| a.values.len()).product()
}

/// Resolves flat index `idx` (last axis fastest) into concrete parameters.
fn resolve_point(grid: &SweepGrid, idx: usize) -> (ModelParams, FieldSpec) {
    let mut rem = idx;
    let mut picks = vec![0usize; grid.axes.len()];
    for (slot, axis) in grid.axes.iter().enumerate().rev() {
        picks[slot] = rem % axis.values.len();
        rem /= axis.values.len();
    }
    let mut p = grid.base;
    let mut field = grid.field;
    for (axis, &pick) in grid.axes.iter().zip(&picks) {
        let v = axis.values[pick];
        match axis.param {
            Param::J => p.j = v,
            Param::K => p.k = v,
            Param::Gamma => p.gamma = v,
            Param::GammaPrime => p.gamma_prime = v,
            Param::T => p.t = v,
            Param::Bx | Param::By | Param::Bz => {
                if let FieldSpec::Cartesian(b) = &mut field {
                    b[match axis.param {
                        Param::Bx => 0,
                        Param::By => 1,
                        _ => 2,
                    }] = v;
                }
            }
            Param::BMag => {
                if let FieldSpec::Polar { bmag, .. } = &mut field {
                    *bmag = v;
                }
            }
            Param::Theta => {
                if let FieldSpec::Polar { theta_deg, .. } = &mut field {
                    *theta_deg = v;
                }
            }
        }
    }
    p.b = field.to_cartesian();
    (p, field)
}

fn eval_quantity(q: &Quantity, p: &ModelParams) -> SweepCell {
    let out: Result<(Option<f64>, &'static str), ()> = match q {
        Quantity::Concurrence => concurrence(p)
            .map(|r| (Some(r.value), r.path.as_str()))
            .map_err(|_| ()),
        Quantity::ConcurrenceT0 => concurrence(&p.with_t(0.0))
            .map(|r| (Some(r.value), r.path.as_str()))
            .map_err(|_| ()),
        Quantity::Threshold { t_max, tol } => threshold_temperature(p, *t_max, *tol)
            .map(|r| match r.t_star {
                Some(t) => (Some(t), "threshold"),
                None => (None, "no_threshold"),
            })
            .map_err(|_| ()),
    };
    match out {
        Ok((value, path)) => SweepCell { value, path },
        Err(()) => SweepCell {
            value: None,
            path: "error",
        },
    }
}

fn eval_point(grid: &SweepGrid, idx: usize) -> SweepRow {
    let (p, field) = resolve_point(grid, idx);
    let (bmag, theta_deg) = match field {
        FieldSpec::Polar { bmag, theta_deg } => (bmag, theta_deg),
        FieldSpec::Cartesian(b) => {
            let bmag = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            let theta = if bmag == 0.0 {
                0.0
            } else {
                (b[2] / bmag).clamp(-1.0, 1.0).acos().to_degrees()
            };
            (bmag, theta)
        }
    };
    let cells = if p.validate().is_err() {
        grid.quantities
            .iter()
            .map(|_| SweepCell {
                value: None,
                path: "error",
            })
            .collect()
    } else {
        grid.quantities.iter().map(|q| eval_quantity(q, &p)).collect()
    };
    SweepRow {
        params: p,
        bmag,
        theta_deg,
        cells,
    }
}

/// Evaluates the sweep over all points in parallel. Row order is the
/// lexicographic axis order regardless of scheduling; per point failures
/// are reported in the row cells and never abort the sweep.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>, ExploreError> {
    validate_grid(grid)?;
    Ok((0..point_count(grid))
        .into_par_iter()
        .map(|idx| eval_point(grid, idx))
        .collect())
}

/// Single threaded twin of [`run_sweep`], byte for byte identical output.
pub fn run_sweep_sequential(grid: &SweepGrid) -> Result<Vec<SweepRow>, ExploreError> {
    validate_grid(grid)?;
    Ok((0..point_count(grid)).map(|idx| eval_point(grid, idx)).collect())
}

/// Output encoding for [`render_rows`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Tsv,
}

impl TableFormat {
    fn sep(&self) -> char {
        match self {
            TableFormat::Csv => ',',
            TableFormat::Tsv => '\t',
        }
    }
}

/// Renders sweep rows as a delimited table. The fixed columns identify the
/// point, then each quantity contributes a value column and a path column;
/// missing values render as empty fields. Values carry 12 significant
/// digits.
pub fn render_rows(grid: &SweepGrid, rows: &[SweepRow], format: TableFormat) -> String {
    let sep = format.sep();
    let mut out = String::new();
    let fixed = [
        "j",
        "k",
        "gamma",
        "gamma_prime",
        "bx",
        "by",
        "bz",
        "bmag",
        "theta_deg",
        "t",
    ];
    out.push_str(&fixed.join(&sep.to_string()));
    for q in &grid.quantities {
        out.push(sep);
        out.push_str(q.column());
        out.push(sep);
        if grid.quantities.len() == 1 {
            out.push_str("path");
        } else {
            out.push_str(q.column());
            out.push_str("_path");
        }
    }
    out.push('\n');
    for row in rows {
        let p = &row.params;
        let nums = [
            p.j,
            p.k,
            p.gamma,
            p.gamma_prime,
            p.b[0],
            p.b[1],
            p.b[2],
            row.bmag,
            row.theta_deg,
            p.t,
        ];
        let mut first = true;
        for v in nums {
            if !first {
                out.push(sep);
            }
            first = false;
            out.push_str(&format!("{v:.11e}"));
        }
        for cell in &row.cells {
            out.push(sep);
            if let Some(v) = cell.value {
                out.push_str(&format!("{v:.11e}"));
            }
            out.push(sep);
            out.push_str(cell.path);
        }
        out.push('\n');
    }
    out
}

/// Named sweep presets reproducing the model's characteristic plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureName {
    /// Threshold temperature against the cross coupling anisotropy.
    Fig1,
    /// Threshold temperature against the axial field.
    Fig2,
    /// Thermal concurrence against temperature for several in-plane fields.
    Fig3a,
    /// Ground state and low temperature concurrence against field
    /// magnitude for several field tilts.
    Fig3b,
    /// Threshold temperature against field magnitude for several tilts.
    Fig4,
}

impl FromStr for FigureName {
    type Err = ExploreError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "fig1" | "1" => FigureName::Fig1,
            "fig2" | "2" => FigureName::Fig2,
            "fig3a" | "3a" => FigureName::Fig3a,
            "fig3b" | "3b" => FigureName::Fig3b,
            "fig4" | "4" => FigureName::Fig4,
            other => return Err(ExploreError::UnknownFigure(other.to_string())),
        })
    }
}

/// Overrides applied on top of a figure preset's defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetOptions {
    pub j: Option<f64>,
    pub k: Option<f64>,
    pub thetas_deg: Option<Vec<f64>>,
    pub bmags: Option<Vec<f64>>,
}

/// Builds the sweep grid for a named preset. Defaults follow the model's
/// characteristic parameter choices; `opts` overrides the couplings and,
/// where meaningful, the tilt and magnitude lists.
pub fn figure_preset(name: FigureName, opts: &PresetOptions) -> SweepGrid {
    let j = opts.j.unwrap_or(1.0);
    let threshold = Quantity::Threshold {
        t_max: 50.0,
        tol: 1e-9,
    };
    let zero_field = FieldSpec::Cartesian([0.0; 3]);
    // built literally so bad overrides surface as per-point errors in the
    // sweep instead of a construction failure here
    let base = |k: f64, t: f64| ModelParams {
        j,
        k,
        gamma: 0.0,
        gamma_prime: 0.0,
        b: [0.0; 3],
        t,
    };
    let thetas = |d: &[f64]| {
        opts.thetas_deg
            .clone()
            .unwrap_or_else(|| d.to_vec())
    };
    match name {
        FigureName::Fig1 => SweepGrid {
            base: base(opts.k.unwrap_or(2.0), 0.0),
            field: zero_field,
            axes: vec![SweepAxis::linspace(Param::GammaPrime, -1.0, 1.0, 201)],
            quantities: vec![threshold],
        },
        FigureName::Fig2 => SweepGrid {
            base: base(opts.k.unwrap_or(1.0), 0.0),
            field: zero_field,
            axes: vec![SweepAxis::linspace(Param::Bz, 0.0, 3.0, 121)],
            quantities: vec![threshold],
        },
        FigureName::Fig3a => SweepGrid {
            base: base(opts.k.unwrap_or(0.0), 0.0),
            field: FieldSpec::Polar {
                bmag: 0.0,
                theta_deg: 90.0,
            },
            axes: vec![
                SweepAxis::values(
                    Param::BMag,
                    opts.bmags.clone().unwrap_or_else(|| vec![0.5, 1.0, 1.5, 2.0]),
                ),
                SweepAxis::linspace(Param::T, 0.01, 3.0, 300),
            ],
            quantities: vec![Quantity::Concurrence],
        },
        FigureName::Fig3b => SweepGrid {
            base: base(opts.k.unwrap_or(0.0), 1e-4),
            field: FieldSpec::Polar {
                bmag: 0.0,
                theta_deg: 0.0,
            },
            axes: vec![
                SweepAxis::values(Param::Theta, thetas(&[0.0, 30.0, 45.0, 60.0, 90.0])),
                SweepAxis::linspace(Param::BMag, 0.0, 2.5, 251),
            ],
            quantities: vec![Quantity::ConcurrenceT0, Quantity::Concurrence],
        },
        FigureName::Fig4 => SweepGrid {
            base: base(opts.k.unwrap_or(0.0), 0.0),
            field: FieldSpec::Polar {
                bmag: 0.0,
                theta_deg: 0.0,
            },
            axes: vec![
                SweepAxis::values(Param::Theta, thetas(&[0.0, 30.0, 45.0, 60.0, 90.0])),
                SweepAxis::linspace(Param::BMag, 0.0, 4.0, 81),
            ],
            quantities: vec![threshold],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_field_params(j: f64, k: f64) -> ModelParams {
        ModelParams::new(j, k, 0.0, 0.0, [0.0; 3], 0.0).unwrap()
    }

    #[test]
    fn threshold_of_isotropic_exchange_matches_root_of_sinh() {
        // sinh(1/t*) = 1 so t* = 1/arcsinh(1)
        let want = 1.0 / 1f64.asinh();
        for p in [zero_field_params(1.0, 0.0), zero_field_params(0.0, 1.0)] {
            let r = threshold_temperature(&p, 50.0, 1e-9).unwrap();
            let t = r.t_star.unwrap();
            assert!((t - want).abs() < 1e-8, "{t} vs {want}");
            let (lo, hi) = r.bracket.unwrap();
            assert!(lo <= t && t <= hi && hi - lo <= 1e-9);
            assert!(r.evaluations >= SCAN_SAMPLES);
        }
    }

    #[test]
    fn threshold_absent_without_exchange() {
        let p = ModelParams::new(0.0, 0.0, 0.0, 0.0, [0.0, 0.0, 1.0], 0.0).unwrap();
        let r = threshold_temperature(&p, 50.0, 1e-9).unwrap();
        assert_eq!(r.t_star, None);
        assert_eq!(r.bracket, None);
        assert_eq!(r.evaluations, SCAN_SAMPLES);
    }

    #[test]
    fn threshold_saturates_at_window_ceiling() {
        let p = zero_field_params(1.0, 0.0);
        let r = threshold_temperature(&p, 0.5, 1e-9).unwrap();
        assert_eq!(r.t_star, Some(0.5));
        assert_eq!(r.bracket, None);
    }

    #[test]
    fn threshold_rejects_bad_windows() {
        let p = zero_field_params(1.0, 0.0);
        assert!(matches!(
            threshold_temperature(&p, 0.0, 1e-9),
            Err(ExploreError::BadScan(_))
        ));
        assert!(matches!(
            threshold_temperature(&p, 1.0, 2.0),
            Err(ExploreError::BadScan(_))
        ));
    }

    #[test]
    fn threshold_is_flat_in_the_axial_field_for_isotropic_exchange() {
        // the level populations that decide the vanishing point do not
        // involve the axial field when gamma = k = 0
        let reference = threshold_temperature(&zero_field_params(1.0, 0.0), 50.0, 1e-9)
            .unwrap()
            .t_star
            .unwrap();
        for bz in [0.5, 1.0, 2.0] {
            let p = ModelParams::new(1.0, 0.0, 0.0, 0.0, [0.0, 0.0, bz], 0.0).unwrap();
            let t = threshold_temperature(&p, 50.0, 1e-9)
                .unwrap()
                .t_star
                .unwrap();
            assert!((t - reference).abs() < 1e-8, "bz={bz}: {t} vs {reference}");
        }
    }

    #[test]
    fn jump_locus_formula_fixtures() {
        assert!((jump_locus_t0(1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((jump_locus_t0(1.0, 90.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((jump_locus_t0(1.0, 45.0).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            jump_locus_t0(0.0, 30.0),
            Err(ExploreError::ZeroCoupling)
        ));
    }

    #[test]
    fn jump_locus_numeric_agrees_with_formula() {
        for theta in [0.0, 45.0, 90.0] {
            let formula = jump_locus_t0(1.0, theta).unwrap();
            let numeric = jump_locus_t0_numeric(1.0, theta).unwrap();
            assert!(
                (formula - numeric).abs() < 1e-5,
                "theta={theta}: {numeric} vs {formula}"
            );
        }
    }

    #[test]
    fn linspace_hits_endpoints_exactly() {
        let v = linspace(0.1, 0.9, 17);
        assert_eq!(v.len(), 17);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[16], 0.9);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(linspace(3.0, 5.0, 1), vec![3.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn sweep_rows_are_deterministic_across_schedulers() {
        let grid = SweepGrid {
            base: zero_field_params(1.0, 0.0).with_t(1e-4),
            field: FieldSpec::Polar {
                bmag: 0.0,
                theta_deg: 0.0,
            },
            axes: vec![
                SweepAxis::values(Param::Theta, vec![0.0, 50.0, 90.0]),
                SweepAxis::linspace(Param::BMag, 0.0, 2.5, 11),
            ],
            quantities: vec![Quantity::ConcurrenceT0, Quantity::Concurrence],
        };
        let par = run_sweep(&grid).unwrap();
        let seq = run_sweep_sequential(&grid).unwrap();
        assert_eq!(par.len(), 33);
        assert_eq!(par, seq);
        // row order is lexicographic: theta outer, bmag inner
        assert_eq!(par[0].theta_deg, 0.0);
        assert_eq!(par[10].bmag, 2.5);
        assert_eq!(par[11].theta_deg, 50.0);
    }

    #[test]
    fn sweep_reports_per_point_failures_without_aborting() {
        let grid = SweepGrid {
            base: zero_field_params(1.0, 0.0).with_t(1.0),
            field: FieldSpec::Cartesian([0.0; 3]),
            axes: vec![SweepAxis::values(Param::Gamma, vec![0.5, 7.0])],
            quantities: vec![Quantity::Concurrence],
        };
        let rows = run_sweep(&grid).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].cells[0].value.is_some());
        assert_eq!(rows[1].cells[0].value, None);
        assert_eq!(rows[1].cells[0].path, "error");
    }

    #[test]
    fn grid_validation_catches_structural_mistakes() {
        let mut grid = SweepGrid {
            base: zero_field_params(1.0, 0.0),
            field: FieldSpec::Cartesian([0.0; 3]),
            axes: vec![SweepAxis::values(Param::BMag, vec![1.0])],
            quantities: vec![Quantity::Concurrence],
        };
        assert!(matches!(
            run_sweep(&grid),
            Err(ExploreError::AxisFieldMismatch { .. })
        ));
        grid.axes = vec![SweepAxis::values(Param::J, Vec::new())];
        assert!(matches!(
            run_sweep(&grid),
            Err(ExploreError::EmptyAxis { .. })
        ));
        grid.axes = vec![SweepAxis::values(Param::J, vec![1.0])];
        grid.quantities = Vec::new();
        assert!(matches!(run_sweep(&grid), Err(ExploreError::NoQuantities)));
    }

    #[test]
    fn rendered_table_round_trips_through_parsing() {
        let grid = SweepGrid {
            base: zero_field_params(1.0, 0.5).with_t(0.7),
            field: FieldSpec::Cartesian([0.0, 0.0, 0.3]),
            axes: vec![SweepAxis::linspace(Param::J, 0.5, 1.5, 5)],
            quantities: vec![Quantity::Concurrence],
        };
        let rows = run_sweep_sequential(&grid).unwrap();
        let table = render_rows(&grid, &rows, TableFormat::Csv);
        let mut lines = table.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header.len(), 12);
        assert_eq!(header[0], "j");
        assert_eq!(header[10], "concurrence");
        assert_eq!(header[11], "path");
        for (line, row) in lines.zip(&rows) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 12);
            let j: f64 = cols[0].parse().unwrap();
            assert!((j - row.params.j).abs() <= 1e-10 * j.abs().max(1.0));
            let value: f64 = cols[10].parse().unwrap();
            let want = row.cells[0].value.unwrap();
            assert!((value - want).abs() <= 1e-10 * want.abs().max(1.0));
            assert_eq!(cols[11], row.cells[0].path);
        }
        let tsv = render_rows(&grid, &rows, TableFormat::Tsv);
        assert_eq!(tsv.lines().next().unwrap().split('\t').count(), 12);
    }

    #[test]
    fn multi_quantity_tables_disambiguate_path_columns() {
        let grid = SweepGrid {
            base: zero_field_params(1.0, 0.0).with_t(0.5),
            field: FieldSpec::Cartesian([0.0; 3]),
            axes: vec![SweepAxis::values(Param::J, vec![1.0])],
            quantities: vec![Quantity::Concurrence, Quantity::ConcurrenceT0],
        };
        let rows = run_sweep_sequential(&grid).unwrap();
        let table = render_rows(&grid, &rows, TableFormat::Csv);
        let header = table.lines().next().unwrap();
        assert!(header.ends_with(
            "concurrence,concurrence_path,concurrence_t0,concurrence_t0_path"
        ));
    }

    #[test]
    fn presets_have_expected_shapes_and_honor_overrides() {
        let g = figure_preset(FigureName::Fig1, &PresetOptions::default());
        assert_eq!(g.base.k, 2.0);
        assert_eq!(g.axes.len(), 1);
        assert_eq!(g.axes[0].values.len(), 201);
        assert_eq!(g.axes[0].values[0], -1.0);
        assert_eq!(*g.axes[0].values.last().unwrap(), 1.0);
        assert!(matches!(g.quantities[0], Quantity::Threshold { .. }));

        let g = figure_preset(FigureName::Fig2, &PresetOptions::default());
        assert_eq!(g.axes[0].param, Param::Bz);
        assert_eq!(g.axes[0].values.len(), 121);

        let opts = PresetOptions {
            k: Some(3.0),
            thetas_deg: Some(vec![10.0, 20.0]),
            ..PresetOptions::default()
        };
        let g = figure_preset(FigureName::Fig4, &opts);
        assert_eq!(g.base.k, 3.0);
        assert_eq!(g.axes[0].values, vec![10.0, 20.0]);
        assert_eq!(g.axes[1].values.len(), 81);

        let g = figure_preset(FigureName::Fig3b, &PresetOptions::default());
        assert_eq!(g.quantities.len(), 2);
        assert_eq!(g.base.t, 1e-4);
        assert_eq!("fig3a".parse::<FigureName>().unwrap(), FigureName::Fig3a);
        assert!("fig9".parse::<FigureName>().is_err());
    }

    #[test]
    fn cross_anisotropy_raises_the_threshold_in_the_outer_region() {
        // for j = 1, k = 2 the threshold grows with the cross anisotropy
        // once it dominates: spot check monotonicity on [0.87, 1]
        let mut prev = None;
        for gp in [0.87, 0.9, 0.95, 1.0] {
            let p = ModelParams::new(1.0, 2.0, 0.0, gp, [0.0; 3], 0.0).unwrap();
            let t = threshold_temperature(&p, 50.0, 1e-9)
                .unwrap()
                .t_star
                .unwrap();
            if let Some(prev) = prev {
                assert!(t > prev, "threshold fell from {prev} to {t} at {gp}");
            }
            prev = Some(t);
        }
    }
}
