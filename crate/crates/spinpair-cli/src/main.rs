//! Command line front end: single point evaluations, threshold solves,
//! rectangular sweeps, named figure presets, and the built-in acceptance
//! suite.
//!
//! Exit status: 0 on success, 2 on usage errors, 1 on numerical failures.
//! `SPINPAIR_THREADS` caps the sweep worker pool.

use clap::{Args, Parser, Subcommand};
use spinpair::{
    concurrence, figure_preset, render_rows, run_sweep, threshold_temperature, ExploreError,
    FieldSpec, FigureName, ModelParams, Param, PresetOptions, Quantity, SweepAxis, SweepGrid,
    TableFormat,
};
use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

const THREADS_ENV: &str = "SPINPAIR_THREADS";

const CONFIG_KEYS: [&str; 13] = [
    "j", "k", "gamma", "gamma_prime", "bx", "by", "bz", "bmag", "theta", "t", "t_max", "tol",
    "format",
];

#[derive(Parser)]
#[command(
    name = "spinpair",
    version,
    about = "Thermal entanglement of a two-qubit XY exchange pair in a magnetic field"
)]
struct Cli {
    /// Key=value defaults file (one pair per line, # comments) merged
    /// under explicit flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Concurrence at one parameter point.
    Point(PointArgs),
    /// Threshold temperature for one parameter set.
    Threshold(ThresholdArgs),
    /// Rectangular parameter sweep written as a delimited table.
    Sweep(SweepArgs),
    /// Named preset sweep (fig1, fig2, fig3a, fig3b, fig4).
    Figure(FigureArgs),
    /// Run the built-in acceptance suite.
    Selftest,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// XY exchange coupling.
    #[arg(long, allow_negative_numbers = true)]
    j: Option<f64>,
    /// Cross coupling strength.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// XY anisotropy, in [-1, 1].
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Cross coupling anisotropy, in [-1, 1].
    #[arg(long, allow_negative_numbers = true)]
    gamma_prime: Option<f64>,
    /// Field x component (cartesian form).
    #[arg(long, allow_negative_numbers = true)]
    bx: Option<f64>,
    /// Field y component (cartesian form).
    #[arg(long, allow_negative_numbers = true)]
    by: Option<f64>,
    /// Field z component (cartesian form).
    #[arg(long, allow_negative_numbers = true)]
    bz: Option<f64>,
    /// Field magnitude (polar form, pairs with --theta).
    #[arg(long, allow_negative_numbers = true)]
    bmag: Option<f64>,
    /// Field tilt from the z axis in degrees (polar form).
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Temperature (required, here or in the config file).
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Search ceiling.
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Bisection width.
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Base temperature for points without a t axis.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Axis, repeatable: name=start:stop:n or name=v1,v2,v3.
    /// Names: j k gamma gamma_prime bx by bz bmag theta t.
    #[arg(long = "axis", value_name = "SPEC")]
    axes: Vec<String>,
    /// Quantity, repeatable: concurrence, concurrence_t0, threshold.
    #[arg(long = "quantity", value_name = "NAME")]
    quantities: Vec<String>,
    /// Threshold search ceiling (threshold quantity).
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Threshold bisection width (threshold quantity).
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Table format: csv or tsv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct FigureArgs {
    /// Preset name: fig1, fig2, fig3a, fig3b, fig4.
    #[arg(value_name = "NAME", required_unless_present = "name")]
    preset: Option<String>,
    /// Preset name (alternative to the positional form).
    #[arg(long, conflicts_with = "preset")]
    name: Option<String>,
    /// Exchange coupling override.
    #[arg(long, allow_negative_numbers = true)]
    j: Option<f64>,
    /// Cross coupling override.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Comma separated tilt list in degrees (fig3b, fig4).
    #[arg(long, alias = "theta")]
    thetas: Option<String>,
    /// Comma separated field magnitude list (fig3a).
    #[arg(long, alias = "bmag")]
    bmags: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Table format: csv or tsv.
    #[arg(long)]
    format: Option<String>,
}

enum AppError {
    Usage(String),
    Numeric(String),
    /// stdout consumer went away; finish quietly with success
    Pipe,
}

impl AppError {
    fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }
}

/// Single stdout write for a command's whole output. A broken pipe means
/// the reader stopped early (`spinpair ... | head`), not a failure.
fn stdout_block(text: &str) -> Result<(), AppError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::BrokenPipe => AppError::Pipe,
            _ => AppError::Numeric(format!("cannot write to stdout: {e}")),
        })
}

fn explore_err(e: ExploreError) -> AppError {
    match e {
        ExploreError::BadScan(_)
        | ExploreError::AxisFieldMismatch { .. }
        | ExploreError::EmptyAxis { .. }
        | ExploreError::NoQuantities
        | ExploreError::ZeroCoupling
        | ExploreError::UnknownFigure(_) => AppError::Usage(e.to_string()),
        other => AppError::Numeric(other.to_string()),
    }
}

/// Config file contents, consulted for keys the command line leaves unset.
struct Defaults {
    values: HashMap<String, String>,
}

impl Defaults {
    fn load(path: Option<&PathBuf>) -> Result<Self, AppError> {
        let mut values = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(|e| {
                AppError::usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    AppError::usage(format!(
                        "config line {} is not key=value: {raw:?}",
                        lineno + 1
                    ))
                })?;
                let key = key.trim().to_string();
                if !CONFIG_KEYS.contains(&key.as_str()) {
                    return Err(AppError::usage(format!(
                        "config line {} has unknown key {key:?}",
                        lineno + 1
                    )));
                }
                values.insert(key, value.trim().to_string());
            }
        }
        Ok(Defaults { values })
    }

    fn num(&self, key: &str) -> Result<Option<f64>, AppError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| {
                AppError::usage(format!("config key {key} has a non-numeric value {s:?}"))
            }),
        }
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Couplings with the command line taking precedence over the config file.
fn resolve_couplings(m: &ModelArgs, cfg: &Defaults) -> Result<(f64, f64, f64, f64), AppError> {
    Ok((
        m.j.or(cfg.num("j")?).unwrap_or(0.0),
        m.k.or(cfg.num("k")?).unwrap_or(0.0),
        m.gamma.or(cfg.num("gamma")?).unwrap_or(0.0),
        m.gamma_prime.or(cfg.num("gamma_prime")?).unwrap_or(0.0),
    ))
}

/// Field from flags if any field flag is present, otherwise from the
/// config file. Cartesian and polar forms are mutually exclusive within
/// whichever source wins.
fn resolve_field_spec(m: &ModelArgs, cfg: &Defaults) -> Result<Option<FieldSpec>, AppError> {
    let flag_cart = m.bx.is_some() || m.by.is_some() || m.bz.is_some();
    let flag_polar = m.bmag.is_some() || m.theta.is_some();
    if flag_cart && flag_polar {
        return Err(AppError::usage(
            "give the field either as --bx/--by/--bz or as --bmag/--theta, not both",
        ));
    }
    if flag_cart {
        return Ok(Some(FieldSpec::Cartesian([
            m.bx.unwrap_or(0.0),
            m.by.unwrap_or(0.0),
            m.bz.unwrap_or(0.0),
        ])));
    }
    if flag_polar {
        return Ok(Some(FieldSpec::Polar {
            bmag: m.bmag.unwrap_or(0.0),
            theta_deg: m.theta.unwrap_or(0.0),
        }));
    }
    let cfg_cart = [cfg.num("bx")?, cfg.num("by")?, cfg.num("bz")?];
    let cfg_polar = (cfg.num("bmag")?, cfg.num("theta")?);
    let has_cart = cfg_cart.iter().any(Option::is_some);
    let has_polar = cfg_polar.0.is_some() || cfg_polar.1.is_some();
    if has_cart && has_polar {
        return Err(AppError::usage(
            "config file mixes cartesian (bx/by/bz) and polar (bmag/theta) field keys",
        ));
    }
    if has_cart {
        return Ok(Some(FieldSpec::Cartesian([
            cfg_cart[0].unwrap_or(0.0),
            cfg_cart[1].unwrap_or(0.0),
            cfg_cart[2].unwrap_or(0.0),
        ])));
    }
    if has_polar {
        return Ok(Some(FieldSpec::Polar {
            bmag: cfg_polar.0.unwrap_or(0.0),
            theta_deg: cfg_polar.1.unwrap_or(0.0),
        }));
    }
    Ok(None)
}

fn resolve_params(
    m: &ModelArgs,
    cfg: &Defaults,
    t: f64,
) -> Result<ModelParams, AppError> {
    let (j, k, gamma, gamma_prime) = resolve_couplings(m, cfg)?;
    let field = resolve_field_spec(m, cfg)?
        .unwrap_or(FieldSpec::Cartesian([0.0; 3]))
        .to_cartesian();
    ModelParams::new(j, k, gamma, gamma_prime, field, t)
        .map_err(|e| AppError::usage(e.to_string()))
}

fn resolve_format(flag: Option<&str>, cfg: &Defaults) -> Result<TableFormat, AppError> {
    match flag.or_else(|| cfg.text("format")).unwrap_or("csv") {
        "csv" => Ok(TableFormat::Csv),
        "tsv" => Ok(TableFormat::Tsv),
        other => Err(AppError::usage(format!(
            "unknown format {other:?}, expected csv or tsv"
        ))),
    }
}

fn parse_axis(spec: &str) -> Result<SweepAxis, AppError> {
    let (name, rest) = spec
        .split_once('=')
        .ok_or_else(|| AppError::usage(format!("axis {spec:?} is not name=values")))?;
    let param: Param = name
        .trim()
        .parse()
        .map_err(|e: String| AppError::usage(e))?;
    let rest = rest.trim();
    if rest.contains(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(AppError::usage(format!(
                "axis range {rest:?} is not start:stop:count"
            )));
        }
        let start: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| AppError::usage(format!("axis start {:?} is not numeric", parts[0])))?;
        let stop: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| AppError::usage(format!("axis stop {:?} is not numeric", parts[1])))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| AppError::usage(format!("axis count {:?} is not a count", parts[2])))?;
        if count == 0 {
            return Err(AppError::usage("axis count must be at least 1".to_string()));
        }
        Ok(SweepAxis::linspace(param, start, stop, count))
    } else {
        let values = rest
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| AppError::usage(format!("axis value {v:?} is not numeric")))
            })
            .collect::<Result<Vec<f64>, AppError>>()?;
        Ok(SweepAxis::values(param, values))
    }
}

fn parse_quantity(name: &str, t_max: f64, tol: f64) -> Result<Quantity, AppError> {
    match name {
        "concurrence" => Ok(Quantity::Concurrence),
        "concurrence_t0" => Ok(Quantity::ConcurrenceT0),
        "threshold" => Ok(Quantity::Threshold { t_max, tol }),
        other => Err(AppError::usage(format!(
            "unknown quantity {other:?}, expected concurrence, concurrence_t0, or threshold"
        ))),
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, AppError> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| AppError::usage(format!("{what} entry {v:?} is not numeric")))
        })
        .collect()
}

fn emit(table: String, output: Option<&PathBuf>) -> Result<(), AppError> {
    match output {
        Some(path) => fs::write(path, table)
            .map_err(|e| AppError::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => stdout_block(&table),
    }
}

fn cap_worker_pool() -> Result<(), AppError> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw.parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            AppError::usage(format!(
                "{THREADS_ENV} must be a positive integer, got {raw:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Numeric(format!("worker pool setup failed: {e}")))?;
    }
    Ok(())
}

fn cmd_point(args: &PointArgs, cfg: &Defaults) -> Result<(), AppError> {
    let t = args
        .t
        .or(cfg.num("t")?)
        .ok_or_else(|| AppError::usage("point requires --t (or t in the config file)"))?;
    let p = resolve_params(&args.model, cfg, t)?;
    let r = concurrence(&p).map_err(|e| AppError::Numeric(e.to_string()))?;
    stdout_block(&format!(
        "concurrence {:.11e}\nroots {:.11e} {:.11e} {:.11e} {:.11e}\npath {}\n",
        r.value, r.roots[0], r.roots[1], r.roots[2], r.roots[3], r.path
    ))
}

fn cmd_threshold(args: &ThresholdArgs, cfg: &Defaults) -> Result<(), AppError> {
    let t_max = args.t_max.or(cfg.num("t_max")?).unwrap_or(50.0);
    let tol = args.tol.or(cfg.num("tol")?).unwrap_or(1e-9);
    let p = resolve_params(&args.model, cfg, 0.0)?;
    let r = threshold_temperature(&p, t_max, tol).map_err(explore_err)?;
    let mut text = match r.t_star {
        Some(t) => format!("t_star {t:.11e}\n"),
        None => "t_star none\n".to_string(),
    };
    match r.bracket {
        Some((lo, hi)) => text.push_str(&format!("bracket {lo:.11e} {hi:.11e}\n")),
        None => text.push_str("bracket none\n"),
    }
    text.push_str(&format!("evaluations {}\n", r.evaluations));
    stdout_block(&text)
}

fn cmd_sweep(args: &SweepArgs, cfg: &Defaults) -> Result<(), AppError> {
    let t = args.t.or(cfg.num("t")?).unwrap_or(0.0);
    let t_max = args.t_max.or(cfg.num("t_max")?).unwrap_or(50.0);
    let tol = args.tol.or(cfg.num("tol")?).unwrap_or(1e-9);
    let axes = args
        .axes
        .iter()
        .map(|s| parse_axis(s))
        .collect::<Result<Vec<_>, _>>()?;
    let quantity_names: Vec<&str> = if args.quantities.is_empty() {
        vec!["concurrence"]
    } else {
        args.quantities.iter().map(String::as_str).collect()
    };
    let quantities = quantity_names
        .into_iter()
        .map(|q| parse_quantity(q, t_max, tol))
        .collect::<Result<Vec<_>, _>>()?;

    let (j, k, gamma, gamma_prime) = resolve_couplings(&args.model, cfg)?;
    let any_polar_axis = axes
        .iter()
        .any(|a| matches!(a.param, Param::BMag | Param::Theta));
    let field = match resolve_field_spec(&args.model, cfg)? {
        Some(spec) => spec,
        None if any_polar_axis => FieldSpec::Polar {
            bmag: 0.0,
            theta_deg: 0.0,
        },
        None => FieldSpec::Cartesian([0.0; 3]),
    };
    let base = ModelParams::new(j, k, gamma, gamma_prime, field.to_cartesian(), t)
        .map_err(|e| AppError::usage(e.to_string()))?;
    let grid = SweepGrid {
        base,
        field,
        axes,
        quantities,
    };
    let rows = run_sweep(&grid).map_err(explore_err)?;
    let format = resolve_format(args.format.as_deref(), cfg)?;
    emit(render_rows(&grid, &rows, format), args.output.as_ref())
}

fn cmd_figure(args: &FigureArgs, cfg: &Defaults) -> Result<(), AppError> {
    let raw = args
        .preset
        .as_deref()
        .or(args.name.as_deref())
        .expect("clap enforces one of the two name forms");
    let name: FigureName = raw.parse().map_err(explore_err)?;
    let opts = PresetOptions {
        j: args.j,
        k: args.k,
        thetas_deg: args
            .thetas
            .as_deref()
            .map(|s| parse_list(s, "tilt"))
            .transpose()?,
        bmags: args
            .bmags
            .as_deref()
            .map(|s| parse_list(s, "field magnitude"))
            .transpose()?,
    };
    let grid = figure_preset(name, &opts);
    let rows = run_sweep(&grid).map_err(explore_err)?;
    let format = resolve_format(args.format.as_deref(), cfg)?;
    emit(render_rows(&grid, &rows, format), args.output.as_ref())
}

fn cmd_selftest() -> Result<(), AppError> {
    let reports = spinpair::selftest::run_all();
    let mut text = String::new();
    let mut failed = 0usize;
    for r in &reports {
        text.push_str(&format!("{r}\n"));
        if !r.passed {
            failed += 1;
        }
    }
    stdout_block(&text)?;
    if failed > 0 {
        return Err(AppError::Numeric(format!(
            "{failed} of {} criteria failed",
            reports.len()
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    cap_worker_pool()?;
    let cfg = Defaults::load(cli.config.as_ref())?;
    match &cli.cmd {
        Cmd::Point(args) => cmd_point(args, &cfg),
        Cmd::Threshold(args) => cmd_threshold(args, &cfg),
        Cmd::Sweep(args) => cmd_sweep(args, &cfg),
        Cmd::Figure(args) => cmd_figure(args, &cfg),
        Cmd::Selftest => cmd_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) | Err(AppError::Pipe) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
