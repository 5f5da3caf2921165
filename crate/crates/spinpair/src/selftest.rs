//! Built-in acceptance suite.
//!
//! Each criterion is an independent function returning a
//! [`CriterionReport`]; [`run_all`] executes the whole suite. The same
//! functions back the library's acceptance tests and the CLI `selftest`
//! subcommand, so a shipped binary can revalidate itself.
//!
//! The parameter draws are deterministic (fixed-seed ChaCha8) and exposed
//! crate-internally so the state validity audit can revisit exactly the
//! states the other criteria produced.

use crate::entangle::{
    concurrence, concurrence_analytic_bz, concurrence_state, concurrence_t0_closed,
};
use crate::explore::{
    jump_locus_scan, jump_locus_t0, jump_locus_t0_numeric, linspace, threshold_temperature,
    threshold_with_visitor,
};
use crate::spinmodel::{spectral_quantities, ModelParams};
use crate::thermal::{gibbs_state, ground_state};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn report(
    id: usize,
    name: &'static str,
    problems: Vec<String>,
    summary: String,
) -> CriterionReport {
    let passed = problems.is_empty();
    let detail = if passed {
        summary
    } else {
        format!("{summary}; {}", problems.join("; "))
    };
    CriterionReport {
        id,
        name,
        passed,
        detail,
    }
}

fn rng_for(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_acce_0000 + tag)
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Ground state concurrence through the numeric route.
fn c_numeric_t0(p: &ModelParams) -> Result<f64, String> {
    let st = ground_state(p).map_err(|e| format!("ground state failed: {e}"))?;
    concurrence_state(&st)
        .map(|r| r.value)
        .map_err(|e| format!("numeric concurrence failed: {e}"))
}

/// Thermal concurrence through the numeric route.
fn c_numeric_gibbs(p: &ModelParams) -> Result<f64, String> {
    let st = gibbs_state(p).map_err(|e| format!("thermal state failed: {e}"))?;
    concurrence_state(&st)
        .map(|r| r.value)
        .map_err(|e| format!("numeric concurrence failed: {e}"))
}

fn inplane(bmag: f64) -> ModelParams {
    ModelParams::new(1.0, 0.0, 0.0, 0.0, [bmag, 0.0, 0.0], 0.0).expect("literal parameters")
}

/// 200 zero temperature axial-field draws: 120 sampled clear of the level
/// crossing, 40 constructed exactly on it, 40 pinned points covering every
/// closed-form branch.
pub(crate) fn draws_axial_t0() -> Vec<ModelParams> {
    let mut rng = rng_for(1);
    let mut out = Vec::with_capacity(200);
    while out.len() < 120 {
        let p = ModelParams::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            [0.0, 0.0, rng.gen_range(-2.5..2.5)],
            0.0,
        )
        .expect("draw within validated ranges");
        let q = spectral_quantities(&p);
        // stay clear of the crossing so the branch choice is unambiguous
        if (q.mu - q.lambda_phi).abs() < 1e-6 {
            continue;
        }
        out.push(p);
    }
    for _ in 0..40 {
        let j: f64 = rng.gen_range(0.8..2.0);
        let gamma: f64 = rng.gen_range(0.0..0.6);
        let k: f64 = rng.gen_range(0.0..0.5) * j;
        let gp: f64 = rng.gen_range(-1.0..1.0);
        // axial field chosen so the two lowest levels coincide exactly
        let bz = (j * j * (1.0 - gamma * gamma) - k * k * (1.0 - gp * gp)).sqrt();
        out.push(
            ModelParams::new(j, k, gamma, gp, [0.0, 0.0, bz], 0.0)
                .expect("constructed degeneracy within ranges"),
        );
    }
    out.extend(pinned_axial_t0());
    out
}

fn pinned_axial_t0() -> Vec<ModelParams> {
    let mut out = Vec::with_capacity(40);
    let fixed = |j, k, g, gp, bz| {
        ModelParams::new(j, k, g, gp, [0.0, 0.0, bz], 0.0).expect("literal parameters")
    };
    // crossing fixture with known value 0.2
    out.push(fixed(1.0, 0.0, 0.6, 0.0, 0.8));
    // decoupled corners
    out.push(fixed(0.0, 0.0, 0.0, 0.0, 0.0));
    out.push(fixed(0.0, 0.0, 0.0, 0.0, 1.0));
    for i in 0..13 {
        // exchange dominates the field: fully entangled ground state
        out.push(fixed(1.0 + 0.05 * i as f64, 0.3, 0.2, -0.4, 0.2));
    }
    for i in 0..12 {
        // field sector dominates: ratio-valued ground state
        out.push(fixed(0.4, 1.0 + 0.05 * i as f64, 0.5, 0.3, 0.6));
    }
    for i in 0..12 {
        let j = 1.0 + 0.04 * i as f64;
        let gamma = 0.1 + 0.02 * i as f64;
        let (k, gp) = (0.3, 0.2);
        let bz = (j * j * (1.0 - gamma * gamma) - k * k * (1.0 - gp * gp)).sqrt();
        out.push(fixed(j, k, gamma, gp, bz));
    }
    out
}

pub(crate) fn draws_path_equivalence() -> Vec<ModelParams> {
    let mut rng = rng_for(8);
    (0..1000)
        .map(|_| {
            ModelParams::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                [0.0, 0.0, rng.gen_range(-2.0..2.0)],
                rng.gen_range(0.05..5.0),
            )
            .expect("draw within validated ranges")
        })
        .collect()
}

pub(crate) fn draws_sign_flip() -> Vec<ModelParams> {
    let mut rng = rng_for(9);
    (0..1000)
        .map(|_| {
            ModelParams::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                [0.0, 0.0, rng.gen_range(-2.0..2.0)],
                rng.gen_range(0.05..5.0),
            )
            .expect("draw within validated ranges")
        })
        .collect()
}

pub(crate) const ROTATION_ANGLES: [f64; 4] = [0.9, 2.1, 3.9, 5.3];

/// Field-direction invariance holds only without cross terms (the phase
/// of the double-flip coupling otherwise picks a direction in the plane),
/// so this family fixes gamma = k = 0.
pub(crate) fn draws_rotation() -> Vec<ModelParams> {
    let mut rng = rng_for(10);
    (0..1000)
        .map(|_| {
            ModelParams::new(
                rng.gen_range(-2.0..2.0),
                0.0,
                0.0,
                rng.gen_range(-1.0..1.0),
                [rng.gen_range(0.0..2.0), 0.0, rng.gen_range(-2.0..2.0)],
                rng.gen_range(0.05..5.0),
            )
            .expect("draw within validated ranges")
        })
        .collect()
}

pub(crate) fn draws_swap() -> Vec<ModelParams> {
    let mut rng = rng_for(11);
    (0..1000)
        .map(|_| {
            ModelParams::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                [0.0; 3],
                rng.gen_range(0.05..5.0),
            )
            .expect("draw within validated ranges")
        })
        .collect()
}

/// In-plane field rotated by `alpha` radians about the z axis, preserving
/// the in-plane magnitude.
pub(crate) fn rotated(p: &ModelParams, alpha: f64) -> ModelParams {
    let b_par = p.b_par();
    let mut q = *p;
    q.b = [b_par * alpha.cos(), b_par * alpha.sin(), p.b[2]];
    q
}

/// Parameter sets whose threshold solves the suite exercises.
pub(crate) fn threshold_families() -> Vec<ModelParams> {
    let fixed = |j, k, b: [f64; 3]| {
        ModelParams::new(j, k, 0.0, 0.0, b, 0.0).expect("literal parameters")
    };
    let mut out = vec![fixed(1.0, 0.0, [0.0; 3]), fixed(0.0, 1.0, [0.0; 3])];
    for bz in linspace(0.0, 3.0, 20) {
        out.push(fixed(1.0, 0.0, [0.0, 0.0, bz]));
    }
    for bz in linspace(0.0, 3.0, 16) {
        out.push(fixed(1.0, 1.0, [0.0, 0.0, bz]));
    }
    out.push(fixed(1.0, 0.0, [4.0, 0.0, 0.0]));
    out
}

/// Temperature lattice for the revival scan.
pub(crate) fn revival_temperatures() -> Vec<f64> {
    (0..200).map(|i| 3.0 * (i + 1) as f64 / 200.0).collect()
}

pub fn criterion_1() -> CriterionReport {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut counts = [0usize; 3];
    let mut worst = 0.0f64;
    for p in draws_axial_t0() {
        let closed = match concurrence_t0_closed(&p) {
            Ok(r) => r.value,
            Err(e) => {
                problems.push(format!("closed form failed at {p:?}: {e}"));
                continue;
            }
        };
        let q = spectral_quantities(&p);
        let branch = if (q.mu - q.lambda_phi).abs() <= 1e-12 {
            2
        } else if q.mu > q.lambda_phi {
            0
        } else {
            1
        };
        counts[branch] += 1;
        match c_numeric_t0(&p) {
            Ok(numeric) => {
                let dev = (closed - numeric).abs();
                worst = worst.max(dev);
                if dev > 1e-9 {
                    problems.push(format!("closed {closed} vs numeric {numeric} at {p:?}"));
                }
            }
            Err(e) => problems.push(format!("{e} at {p:?}")),
        }
    }
    let fixture = ModelParams::new(1.0, 0.0, 0.6, 0.0, [0.0, 0.0, 0.8], 0.0).unwrap();
    match concurrence_t0_closed(&fixture) {
        Ok(r) if (r.value - 0.2).abs() <= 1e-12 => {}
        Ok(r) => problems.push(format!("crossing fixture gave {} instead of 0.2", r.value)),
        Err(e) => problems.push(format!("crossing fixture failed: {e}")),
    }
    for (label, count) in ["fully entangled", "ratio", "crossing"].iter().zip(counts) {
        if count == 0 {
            problems.push(format!("branch {label} never exercised"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1) {
        problems.push(format!("runtime {:.0} ms over the 1000 ms budget", ms(elapsed)));
    }
    report(
        1,
        "zero temperature closed form vs ground state",
        problems,
        format!(
            "200 draws, branch hits {}/{}/{}, max deviation {:.2e}, {:.0} ms",
            counts[0],
            counts[1],
            counts[2],
            worst,
            ms(elapsed)
        ),
    )
}

pub fn criterion_2() -> CriterionReport {
    let mut problems = Vec::new();
    let crossing = 2f64.sqrt();
    let closed = |b: f64| -> Result<f64, String> {
        concurrence_t0_closed(&inplane(b))
            .map(|r| r.value)
            .map_err(|e| format!("closed form failed at b={b}: {e}"))
    };
    let mut check = |label: &str, got: Result<f64, String>, want: f64, tol: f64| match got {
        Ok(v) if (v - want).abs() <= tol => {}
        Ok(v) => problems.push(format!("{label}: {v} differs from {want} beyond {tol:.0e}")),
        Err(e) => problems.push(e),
    };
    check("below the jump", closed(1.0), 1.0, 1e-12);
    check("at the crossing", closed(crossing), 2.0 / 3.0, 1e-12);
    check("above the jump", closed(2.0), 1.0 / 17f64.sqrt(), 1e-12);
    check("above the jump (tabulated)", closed(2.0), 0.242535, 1e-5);
    check(
        "right limit at the crossing",
        closed(crossing + 1e-6),
        1.0 / 3.0,
        1e-4,
    );
    check("numeric below the jump", c_numeric_t0(&inplane(1.0)), 1.0, 1e-9);
    check(
        "numeric above the jump",
        c_numeric_t0(&inplane(2.0)),
        1.0 / 17f64.sqrt(),
        1e-9,
    );
    // at the crossing the ground level is doubly degenerate and the
    // uniform ground mixture carries 1/3, matching the right limit; the
    // closed form instead tabulates the symmetric-superposition value 2/3
    check(
        "ground mixture at the crossing",
        c_numeric_t0(&inplane(crossing)),
        1.0 / 3.0,
        1e-9,
    );
    report(
        2,
        "in-plane field zero temperature trio",
        problems,
        "closed form 1, 2/3, 0.242535 at b = 1, sqrt(2), 2; right limit 1/3; \
         numeric agreement at 1e-9 off the crossing"
            .to_string(),
    )
}

pub fn criterion_3() -> CriterionReport {
    let mut problems = Vec::new();
    let mut worst = 0.0f64;
    for theta in [0.0, 30.0, 45.0, 60.0, 90.0] {
        match (jump_locus_t0(1.0, theta), jump_locus_t0_numeric(1.0, theta)) {
            (Ok(formula), Ok(numeric)) => {
                let dev = (formula - numeric).abs();
                worst = worst.max(dev);
                if dev > 1e-5 {
                    problems.push(format!(
                        "tilt {theta}: detector {numeric} vs formula {formula}"
                    ));
                }
            }
            (f, n) => problems.push(format!("tilt {theta}: {f:?} / {n:?}")),
        }
    }
    match jump_locus_t0(1.0, 90.0) {
        Ok(v) if (v - 2f64.sqrt()).abs() <= 1e-12 => {}
        other => problems.push(format!("in-plane locus is not sqrt(2): {other:?}")),
    }
    report(
        3,
        "zero temperature jump locus",
        problems,
        format!("five tilts, max |detector - formula| = {worst:.2e}"),
    )
}

pub fn criterion_4() -> CriterionReport {
    let mut problems = Vec::new();
    let want = 1.134593;
    let mut values = Vec::new();
    let mut slow = 0.0f64;
    for (j, k) in [(1.0, 0.0), (0.0, 1.0)] {
        let p = ModelParams::new(j, k, 0.0, 0.0, [0.0; 3], 0.0).unwrap();
        let clock = Instant::now();
        match threshold_temperature(&p, 50.0, 1e-9) {
            Ok(r) => match r.t_star {
                Some(t) => {
                    if (t - want).abs() > 1e-6 {
                        problems.push(format!("j={j}, k={k}: threshold {t} vs {want}"));
                    }
                    values.push(t);
                }
                None => problems.push(format!("j={j}, k={k}: no threshold found")),
            },
            Err(e) => problems.push(format!("j={j}, k={k}: solve failed: {e}")),
        }
        slow = slow.max(ms(clock.elapsed()));
        if clock.elapsed() > Duration::from_millis(100) {
            problems.push(format!(
                "solve for j={j}, k={k} took {:.0} ms, over the 100 ms budget",
                ms(clock.elapsed())
            ));
        }
    }
    if let [a, b] = values[..] {
        if (a - b).abs() > 2e-9 {
            problems.push(format!("swapped couplings disagree: {a} vs {b}"));
        }
    }
    report(
        4,
        "threshold fixture and coupling swap",
        problems,
        format!("both orientations at 1.134593 +/- 1e-6, slowest solve {slow:.1} ms"),
    )
}

pub fn criterion_5() -> CriterionReport {
    let mut problems = Vec::new();
    let mut ts = Vec::new();
    for bz in linspace(0.0, 3.0, 20) {
        let p = ModelParams::new(1.0, 0.0, 0.0, 0.0, [0.0, 0.0, bz], 0.0).unwrap();
        match threshold_temperature(&p, 50.0, 1e-9) {
            Ok(r) => match r.t_star {
                Some(t) => ts.push(t),
                None => problems.push(format!("bz={bz}: no threshold found")),
            },
            Err(e) => problems.push(format!("bz={bz}: solve failed: {e}")),
        }
    }
    let spread = match (
        ts.iter().cloned().reduce(f64::min),
        ts.iter().cloned().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => f64::NAN,
    };
    // negated so a NaN spread counts as a failure
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(spread < 1e-6) {
        problems.push(format!("threshold spread {spread:.2e} is not below 1e-6"));
    }
    report(
        5,
        "threshold flatness in the axial field",
        problems,
        format!("20 samples over bz in [0, 3], spread {spread:.2e}"),
    )
}

pub fn criterion_6() -> CriterionReport {
    let mut problems = Vec::new();
    // (a) axial field with a cross coupling: non-decreasing threshold
    let mut prev: Option<f64> = None;
    let mut last = 0.0f64;
    for bz in linspace(0.0, 3.0, 16) {
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0, [0.0, 0.0, bz], 0.0).unwrap();
        let t = match threshold_temperature(&p, 50.0, 1e-9) {
            // an unentangled family member contributes a zero threshold
            Ok(r) => r.t_star.unwrap_or(0.0),
            Err(e) => {
                problems.push(format!("bz={bz}: solve failed: {e}"));
                continue;
            }
        };
        if let Some(prev) = prev {
            if t < prev - 1e-8 {
                problems.push(format!("threshold fell from {prev} to {t} at bz={bz}"));
            }
        }
        prev = Some(t);
        last = t;
    }
    if last < 1.0 {
        problems.push(format!("no growth witnessed: threshold at bz=3 is only {last}"));
    }
    // (b) in-plane field: the threshold dips at moderate fields, turns
    // around near |b| = 3 and eventually climbs past its zero field value
    let solve = |bx: f64| -> Result<f64, String> {
        let p = ModelParams::new(1.0, 0.0, 0.0, 0.0, [bx, 0.0, 0.0], 0.0).unwrap();
        threshold_temperature(&p, 50.0, 1e-9)
            .map_err(|e| format!("solve failed: {e}"))?
            .t_star
            .ok_or_else(|| "no threshold found".to_string())
    };
    match [0.0, 3.0, 4.0, 5.0].map(solve) {
        [Ok(t0), Ok(t3), Ok(t4), Ok(t5)] => {
            if !(t3 < t4 && t4 < t5) {
                problems.push(format!(
                    "in-plane threshold is not rising past the turnaround: \
                     {t3} at |b|=3, {t4} at |b|=4, {t5} at |b|=5"
                ));
            }
            if t5 <= t0 + 0.05 {
                problems.push(format!(
                    "in-plane threshold {t5} at |b|=5 does not exceed {t0} + 0.05"
                ));
            }
        }
        solved => problems.push(format!("in-plane solves failed: {solved:?}")),
    }
    report(
        6,
        "threshold enhancement with field",
        problems,
        format!(
            "axial family non-decreasing to {last:.3}; in-plane threshold rises \
             through |b| = 3, 4, 5 and tops its zero field value"
        ),
    )
}

pub fn criterion_7() -> CriterionReport {
    let mut problems = Vec::new();
    let temps = revival_temperatures();
    let series = |bmag: f64| -> Result<Vec<f64>, String> {
        temps
            .iter()
            .map(|&t| {
                let p = ModelParams::new(1.0, 0.0, 0.0, 0.0, [bmag, 0.0, 0.0], t).unwrap();
                concurrence(&p)
                    .map(|r| r.value)
                    .map_err(|e| format!("b={bmag}, t={t}: {e}"))
            })
            .collect()
    };
    match series(2.0) {
        Ok(c) => {
            let limit = concurrence_t0_closed(&inplane(2.0)).map(|r| r.value).unwrap_or(f64::NAN);
            if (c[0] - limit).abs() > 2e-3 {
                problems.push(format!(
                    "coldest grid point {:.4} does not continue the {limit:.4} zero \
                     temperature value",
                    c[0]
                ));
            }
            // Above the critical field the curve dies on the way up in
            // temperature, revives into an interior bump, then dies for good.
            // The bump peak sits well below the zero temperature value, so
            // the test pins the death-revival-death shape, not the height.
            let death = c.iter().position(|&v| v <= 1e-9);
            match death {
                None => problems.push("the curve never dies on the grid".to_string()),
                Some(d) => {
                    let revived = (d.max(1)..c.len() - 1)
                        .filter(|&m| c[m] >= c[m - 1] && c[m] >= c[m + 1])
                        .map(|m| c[m])
                        .fold(0.0, f64::max);
                    if revived < 0.03 {
                        problems.push(format!(
                            "no revival bump after the first death (best {revived:.4})"
                        ));
                    }
                    if c[c.len() - 1] > 1e-9 {
                        problems.push(format!(
                            "the curve has not died again by t = {:.2}",
                            temps[temps.len() - 1]
                        ));
                    }
                }
            }
        }
        Err(e) => problems.push(e),
    }
    match series(1.0) {
        Ok(c) => {
            for i in 0..c.len() - 1 {
                if c[i + 1] > c[i] + 1e-10 {
                    problems.push(format!(
                        "below the critical field the curve rose at t={}",
                        temps[i + 1]
                    ));
                    break;
                }
            }
        }
        Err(e) => problems.push(e),
    }
    report(
        7,
        "entanglement revival in temperature",
        problems,
        "200-point temperature grid: death, revival bump and final death at b=2, \
         monotone decay at b=1"
            .to_string(),
    )
}

pub fn criterion_8() -> CriterionReport {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut devs = [0.0f64; 4];

    for p in draws_path_equivalence() {
        match (
            concurrence_analytic_bz(&p).map(|r| r.value),
            c_numeric_gibbs(&p),
        ) {
            (Ok(a), Ok(n)) => devs[0] = devs[0].max((a - n).abs()),
            (a, n) => problems.push(format!("path pair failed at {p:?}: {a:?} / {n:?}")),
        }
    }

    for p in draws_sign_flip() {
        let c0 = match concurrence(&p) {
            Ok(r) => r.value,
            Err(e) => {
                problems.push(format!("sign flip base failed at {p:?}: {e}"));
                continue;
            }
        };
        let mut flip_j = p;
        flip_j.j = -p.j;
        let mut flip_k = p;
        flip_k.k = -p.k;
        let mut flip_b = p;
        flip_b.b[2] = -p.b[2];
        for q in [flip_j, flip_k, flip_b] {
            match concurrence(&q) {
                Ok(r) => devs[1] = devs[1].max((r.value - c0).abs()),
                Err(e) => problems.push(format!("sign flip failed at {q:?}: {e}")),
            }
        }
    }

    for p in draws_rotation() {
        let c0 = match concurrence(&p) {
            Ok(r) => r.value,
            Err(e) => {
                problems.push(format!("rotation base failed at {p:?}: {e}"));
                continue;
            }
        };
        for alpha in ROTATION_ANGLES {
            match concurrence(&rotated(&p, alpha)) {
                Ok(r) => devs[2] = devs[2].max((r.value - c0).abs()),
                Err(e) => problems.push(format!("rotation failed at {p:?}, {alpha}: {e}")),
            }
        }
    }

    for p in draws_swap() {
        let swapped = ModelParams::new(p.k, p.j, p.gamma_prime, p.gamma, p.b, p.t)
            .expect("swap stays in range");
        match (concurrence(&p), concurrence(&swapped)) {
            (Ok(a), Ok(b)) => devs[3] = devs[3].max((a.value - b.value).abs()),
            (a, b) => problems.push(format!("swap pair failed at {p:?}: {a:?} / {b:?}")),
        }
    }

    for (label, dev) in ["path", "sign flip", "rotation", "swap"].iter().zip(devs) {
        if dev >= 1e-10 {
            problems.push(format!("{label} deviation {dev:.2e} reached 1e-10"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(5) {
        problems.push(format!("runtime {:.0} ms over the 5000 ms budget", ms(elapsed)));
    }
    report(
        8,
        "path equivalence and symmetry invariants",
        problems,
        format!(
            "4 suites x 1000 draws, max deviations {:.1e}/{:.1e}/{:.1e}/{:.1e}, {:.0} ms",
            devs[0], devs[1], devs[2], devs[3], ms(elapsed)
        ),
    )
}

#[derive(Default)]
struct StateAudit {
    checked: usize,
    problems: Vec<String>,
}

impl StateAudit {
    fn note(&mut self, msg: String) {
        // keep the report readable under systematic failures
        if self.problems.len() < 8 {
            self.problems.push(msg);
        }
    }

    fn ground(&mut self, p: &ModelParams) {
        self.checked += 1;
        match ground_state(p) {
            Ok(st) => {
                if let Err(e) = st.validate() {
                    self.note(format!("ground state invalid at {p:?}: {e}"));
                }
            }
            Err(e) => self.note(format!("ground state failed at {p:?}: {e}")),
        }
    }

    fn gibbs(&mut self, p: &ModelParams) {
        self.checked += 1;
        match gibbs_state(p) {
            Ok(st) => {
                if let Err(e) = st.validate() {
                    self.note(format!("thermal state invalid at {p:?}: {e}"));
                }
            }
            Err(e) => self.note(format!("thermal state failed at {p:?}: {e}")),
        }
    }
}

/// Revisits every state-producing parameter family from the other criteria
/// and checks the trace, Hermiticity, and positivity invariants on each
/// reconstructed state.
pub fn criterion_9() -> CriterionReport {
    let mut audit = StateAudit::default();

    for p in draws_axial_t0() {
        audit.ground(&p);
    }
    for b in [1.0, 2f64.sqrt(), 2.0] {
        audit.ground(&inplane(b));
    }
    for theta in [0.0, 30.0, 45.0, 60.0, 90.0] {
        let mut visited = Vec::new();
        let _ = jump_locus_scan(1.0, theta, &mut |b| visited.push(b));
        for bmag in visited {
            let field = crate::spinmodel::FieldSpec::Polar { bmag, theta_deg: theta };
            match ModelParams::new(1.0, 0.0, 0.0, 0.0, field.to_cartesian(), 0.0) {
                Ok(p) => audit.ground(&p),
                Err(e) => audit.note(format!("detector point rejected: {e}")),
            }
        }
    }
    for p in threshold_families() {
        let mut temps = Vec::new();
        let _ = threshold_with_visitor(&p, 50.0, 1e-9, &mut |t| temps.push(t));
        for t in temps {
            audit.gibbs(&p.with_t(t));
        }
    }
    for bmag in [1.0, 2.0] {
        for t in revival_temperatures() {
            audit.gibbs(&ModelParams::new(1.0, 0.0, 0.0, 0.0, [bmag, 0.0, 0.0], t).unwrap());
        }
    }
    for p in draws_path_equivalence() {
        audit.gibbs(&p);
    }
    for p in draws_rotation() {
        audit.gibbs(&p);
        for alpha in ROTATION_ANGLES {
            audit.gibbs(&rotated(&p, alpha));
        }
    }

    let checked = audit.checked;
    report(
        9,
        "thermal state validity",
        audit.problems,
        format!("{checked} reconstructed states satisfy trace, Hermiticity, and positivity"),
    )
}

/// Runs the whole suite in criterion order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}
