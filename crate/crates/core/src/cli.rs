//! `pseudospin` command-line front end.
//!
//! Exit codes: 0 on success, 2 for argument errors (usage on stderr), 3 for
//! domain errors (JSON diagnostic on stderr).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    extract_a, frequency_annotations, ground_splitting, sweep_field, sweep_ua, to_frequency, zeeman_threshold_for,
    ExtractionMode,
};
use crate::error::Error;
use crate::format::fmt_f64;
use crate::model::{
    build_hamiltonian, eigensystem, moment_expectation, BasisState, FieldVector, ModelParams, Propagator, StateVector,
};
use crate::reference::{DY2S_C82, TB2SCN_C80};
use crate::relaxation::{
    fit, log_spaced, model_lifetime, synthesize, ArrheniusProcess, RelaxationDataset, RelaxationModel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pseudospin",
    version,
    about = "Four-state pseudospin model of 4f-ion pairs: spectra, tunneling parameters and Arrhenius fits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zero-field spectrum against U/A (A = 1, eigenvalues in units of A)
    SpectrumUa(SpectrumUaArgs),
    /// Spectrum and ground-state moment against a field along y, in units of B_Zt
    SpectrumField(SpectrumFieldArgs),
    /// Eigenvalues and eigenvectors at one parameter set and field
    Eigen(EigenArgs),
    /// Tunneling element, frequency and threshold field from a ground splitting
    Extract(ExtractArgs),
    /// Fit parallel Arrhenius channels to a lifetime dataset
    Fit(FitArgs),
    /// Write a synthetic lifetime dataset
    Synth(SynthArgs),
    /// Coherent time evolution from a basis state
    Evolve(EvolveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum JsonFormat {
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (default: standard output)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Exchange/dipolar splitting U/k_B in kelvin (negative: antiferromagnetic ground doublet)
    #[arg(long = "u", allow_negative_numbers = true)]
    u: f64,
    /// Tunneling matrix element A/k_B in kelvin (>= 0)
    #[arg(long = "a")]
    a: f64,
    /// Pseudospin-pair moment along x (TRD1 axis) in Bohr magnetons
    #[arg(long, default_value_t = 10.0)]
    mu_x: f64,
    /// Pseudospin-pair moment along y (TRD2 axis) in Bohr magnetons
    #[arg(long, default_value_t = 10.0)]
    mu_y: f64,
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// Field component along x in tesla
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    bx: f64,
    /// Field component along y in tesla
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    by: f64,
    /// Field component along z in tesla (no effect: moments lie in the x-y plane)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    bz: f64,
}

#[derive(Debug, Args)]
struct SpectrumUaArgs {
    /// Smallest U/A (dimensionless)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    min: f64,
    /// Largest U/A (dimensionless)
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    max: f64,
    /// Number of evenly spaced points (>= 2)
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SpectrumFieldArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Largest field By in units of the threshold field B_Zt = |U|/(2 mu_y) (dimensionless)
    #[arg(long, default_value_t = 2.0)]
    max: f64,
    /// Number of evenly spaced points from By = 0 (>= 2)
    #[arg(long, default_value_t = 401)]
    points: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct EigenArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// A = delta / 4 (large-U rule of thumb; U ignored)
    Paper,
    /// A = sqrt(delta (delta + U)) / 2 (exact inversion; needs --u)
    Exact,
}

impl From<ModeArg> for ExtractionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => ExtractionMode::Paper,
            ModeArg::Exact => ExtractionMode::Exact,
        }
    }
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Ground splitting (lambda2 - lambda1)/k_B in kelvin
    #[arg(long)]
    delta: f64,
    /// Exchange/dipolar splitting U/k_B in kelvin (required for --mode exact)
    #[arg(long = "u", required_if_eq("mode", "exact"), allow_negative_numbers = true)]
    u: Option<f64>,
    /// Pseudospin-pair moment along y in Bohr magnetons (enables the threshold field)
    #[arg(long)]
    mu_y: Option<f64>,
    /// Which extraction rule provides the headline A
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Dataset CSV with columns T_K,tau_s[,sigma_ln_tau][,mode] (kelvin, seconds)
    #[arg(long, short)]
    input: PathBuf,
    /// Number of parallel Arrhenius channels (1-4)
    #[arg(long, default_value_t = 2)]
    processes: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
    format: JsonFormat,
    /// Points in the dense log-spaced model curve
    #[arg(long, default_value_t = 200)]
    curve_points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// Published channels of Dy2S@C82
    Dy2s,
    /// Published channels of Tb2ScN@C80
    Tb2scn,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Use a published two-channel model
    #[arg(long, value_enum, conflicts_with_all = ["tau0", "delta"])]
    preset: Option<Preset>,
    /// Channel prefactors tau0 in seconds, comma separated
    #[arg(long, value_delimiter = ',', requires = "delta")]
    tau0: Vec<f64>,
    /// Channel barriers Delta/k_B in kelvin, comma separated
    #[arg(long, value_delimiter = ',', requires = "tau0")]
    delta: Vec<f64>,
    /// Lowest temperature in kelvin
    #[arg(long, default_value_t = 0.4)]
    t_min: f64,
    /// Highest temperature in kelvin
    #[arg(long, default_value_t = 30.0)]
    t_max: f64,
    /// Number of log-spaced temperatures (>= 2)
    #[arg(long, default_value_t = 30)]
    points: usize,
    /// Standard deviation of the Gaussian noise on ln tau (dimensionless)
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Seed of the noise generator
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    field: FieldArgs,
    /// Initial basis state: 1, 1bar, 2 or 2bar
    #[arg(long, default_value = "1")]
    initial: String,
    /// End of the time trace in nanoseconds
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    /// Number of evenly spaced time points from t = 0 (>= 2)
    #[arg(long, default_value_t = 1001)]
    points: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    /// Preconditions not met; reported like a parse error.
    Usage(String),
    Domain {
        error: String,
        message: String,
        detail: Option<serde_json::Value>,
    },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain { error: e.kind().to_string(), message: e.to_string(), detail: None }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parse `args` (including the program name) and run one subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };

    let name = subcommand_name(&cli.command);
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            let sub = cmd.find_subcommand_mut(name).cloned().unwrap_or_else(Cli::command);
            let mut sub = sub.bin_name(format!("pseudospin {name}"));
            let _ = write!(err, "{}", sub.error(ErrorKind::ValueValidation, msg).render());
            EXIT_USAGE
        }
        Err(Failure::Domain { error, message, detail }) => {
            let mut diag = json!({ "error": error, "message": message, "subcommand": name });
            if let Some(d) = detail {
                diag["detail"] = d;
            }
            let _ = writeln!(err, "{}", serde_json::to_string_pretty(&diag).expect("json"));
            EXIT_DOMAIN
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::SpectrumUa(_) => "spectrum-ua",
        Command::SpectrumField(_) => "spectrum-field",
        Command::Eigen(_) => "eigen",
        Command::Extract(_) => "extract",
        Command::Fit(_) => "fit",
        Command::Synth(_) => "synth",
        Command::Evolve(_) => "evolve",
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::SpectrumUa(a) => {
            let table = sweep_ua(a.min, a.max, a.points).map_err(usage)?;
            let text = match a.format {
                TableFormat::Csv => table.to_csv(),
                TableFormat::Json => table.to_json() + "\n",
            };
            emit(&a.out, out, &text)
        }
        Command::SpectrumField(a) => {
            let params = model_params(&a.model)?;
            if params.u() == 0.0 {
                return Err(Failure::Usage(
                    "--u must be non-zero: the field axis is scaled by B_Zt = |U|/(2 mu_y)".into(),
                ));
            }
            let table = sweep_field(&params, a.max, a.points).map_err(usage)?;
            let text = match a.format {
                TableFormat::Csv => table.to_csv(),
                TableFormat::Json => table.to_json() + "\n",
            };
            emit(&a.out, out, &text)
        }
        Command::Eigen(a) => emit(&a.out, out, &eigen_report(&a)?),
        Command::Extract(a) => emit(&a.out, out, &extract_report(&a)?),
        Command::Fit(a) => {
            let text = fit_report(&a)?;
            emit(&a.out, out, &text)
        }
        Command::Synth(a) => emit(&a.out, out, &synth_csv(&a)?),
        Command::Evolve(a) => emit(&a.out, out, &evolve_trace(&a)?),
    }
}

fn emit(args: &OutputArgs, out: &mut dyn Write, text: &str) -> CliResult<()> {
    let io = |e: std::io::Error| Failure::Domain { error: "io".into(), message: e.to_string(), detail: None };
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn model_params(m: &ModelArgs) -> CliResult<ModelParams> {
    ModelParams::new(m.u, m.a, m.mu_x, m.mu_y).map_err(usage)
}

fn field(f: &FieldArgs) -> CliResult<FieldVector> {
    let v = FieldVector::new(f.bx, f.by, f.bz);
    if ![v.bx, v.by, v.bz].iter().all(|x| x.is_finite()) {
        return Err(Failure::Usage("field components must be finite".into()));
    }
    Ok(v)
}

#[derive(Serialize)]
struct Quantity {
    value: f64,
    unit: &'static str,
}

fn q(value: f64, unit: &'static str) -> Quantity {
    Quantity { value, unit }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn eigen_report(a: &EigenArgs) -> CliResult<String> {
    let params = model_params(&a.model)?;
    let field = field(&a.field)?;
    let h = build_hamiltonian(&params, &field)?;
    let es = eigensystem(&h)?;
    let moments = (0..4).map(|i| moment_expectation(&es.state(i), &params)).collect::<crate::Result<Vec<_>>>()?;
    Ok(to_json(&json!({
        "params": {
            "U": q(params.u(), "K"),
            "A": q(params.a(), "K"),
            "mu_x": q(params.mu_x(), "mu_B"),
            "mu_y": q(params.mu_y(), "mu_B"),
        },
        "field": { "bx": q(field.bx, "T"), "by": q(field.by, "T"), "bz": q(field.bz, "T") },
        "basis": BasisState::ALL.map(|b| b.label()),
        "hamiltonian_K": h.rows(),
        "values": es.values,
        "value_unit": "K",
        "vectors": es.vectors,
        "moments_mu_B": moments,
        "convention": "eigenvalues ascending; vectors[i] holds amplitudes (a_1, a_1bar, a_2, a_2bar) \
                       of eigenvalue i; each vector is signed so its largest-magnitude component \
                       (first one on ties) is positive; degenerate eigenvectors are any orthonormal \
                       basis of their subspace",
    })))
}

fn extract_report(a: &ExtractArgs) -> CliResult<String> {
    let mode: ExtractionMode = a.mode.into();
    let a_paper = extract_a(a.delta, a.u.unwrap_or(0.0), ExtractionMode::Paper).map_err(usage)?;
    let a_exact = match a.u {
        Some(u) if u >= 0.0 => Some(extract_a(a.delta, u, ExtractionMode::Exact).map_err(usage)?),
        Some(u) if mode == ExtractionMode::Exact => {
            return Err(usage(Error::invalid("U", format!("exact extraction needs U >= 0, got {u}"))))
        }
        _ => None,
    };
    let headline = match mode {
        ExtractionMode::Paper => a_paper,
        ExtractionMode::Exact => a_exact.expect("clap requires --u for exact mode"),
    };
    let splitting = match a.u {
        Some(u) => Some(ground_splitting(&ModelParams::zero_field(u, headline).map_err(usage)?)),
        None => None,
    };
    let threshold = match (a.u, a.mu_y) {
        (Some(u), Some(mu_y)) => Some(zeeman_threshold_for(u, mu_y).map_err(usage)?),
        _ => None,
    };
    let mut annotations = frequency_annotations(a.delta);
    if mode == ExtractionMode::Paper {
        annotations.push(
            "paper mode uses delta ~ 4A, valid only as an order-of-magnitude rule; the exact \
             zero-field splitting tends to 4A^2/U for U >> A"
                .to_string(),
        );
    }
    Ok(to_json(&json!({
        "inputs": {
            "delta": q(a.delta, "K"),
            "U": a.u.map(|u| q(u, "K")),
            "mu_y": a.mu_y.map(|m| q(m, "mu_B")),
        },
        "mode": mode,
        "A": q(headline, "K"),
        "A_paper": q(a_paper, "K"),
        "A_exact": a_exact.map(|v| q(v, "K")),
        "ground_splitting": splitting.map(|v| q(v, "K")),
        "frequency": q(to_frequency(a.delta), "GHz"),
        "zeeman_threshold": threshold.map(|v| q(v, "T")),
        "annotations": annotations,
    })))
}

#[derive(Serialize)]
struct CurvePoint {
    #[serde(rename = "T_K")]
    t: f64,
    #[serde(rename = "tau_s")]
    tau: f64,
}

fn fit_report(a: &FitArgs) -> CliResult<String> {
    let JsonFormat::Json = a.format;
    if !(1..=4).contains(&a.processes) {
        return Err(Failure::Usage(format!("--processes must be in 1..=4, got {}", a.processes)));
    }
    if a.curve_points < 2 {
        return Err(Failure::Usage("--curve-points must be >= 2".into()));
    }
    let data = RelaxationDataset::from_csv_path(&a.input)?;
    let result = fit(&data, a.processes, None)?;

    let curve = |ts: &[f64]| -> crate::Result<Vec<CurvePoint>> {
        ts.iter().map(|&t| Ok(CurvePoint { t, tau: model_lifetime(&result.model, t)? })).collect()
    };
    let temps = data.temperatures();
    let (lo, hi) = temps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &t| (l.min(t), h.max(t)));
    let dense = if hi > lo { log_spaced(lo, hi, a.curve_points)? } else { vec![lo] };

    let report = json!({
        "source": data.source(),
        "n_points": data.len(),
        "model": result.model,
        "std_errors": result.std_errors,
        "parameter_names": result.parameter_names,
        "covariance": result.covariance,
        "residual_rms": result.residual_rms,
        "objective": result.objective,
        "converged": result.converged,
        "iterations": result.iterations,
        // 1-based, matching parameter_names
        "unresolved_channels": result.unresolved_channels().iter().map(|k| k + 1).collect::<Vec<_>>(),
        "units": { "tau0": "s", "delta": "K", "ln_tau0": "ln(s)" },
        "curve_data": curve(&temps)?,
        "curve_dense": curve(&dense)?,
    });
    if !result.converged {
        return Err(Failure::Domain {
            error: "no_convergence".into(),
            message: format!("fit did not converge within {} iterations", result.iterations),
            detail: Some(report),
        });
    }
    Ok(to_json(&report))
}

fn synth_csv(a: &SynthArgs) -> CliResult<String> {
    let model = match a.preset {
        Some(Preset::Dy2s) => DY2S_C82.relaxation_model(),
        Some(Preset::Tb2scn) => TB2SCN_C80.relaxation_model(),
        None => {
            if a.tau0.is_empty() {
                return Err(Failure::Usage("give --preset or both --tau0 and --delta".into()));
            }
            if a.tau0.len() != a.delta.len() {
                return Err(Failure::Usage(format!(
                    "--tau0 has {} values but --delta has {}",
                    a.tau0.len(),
                    a.delta.len()
                )));
            }
            let procs = a
                .tau0
                .iter()
                .zip(&a.delta)
                .map(|(&t, &d)| ArrheniusProcess::new(t, d))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(usage)?;
            RelaxationModel::new(procs).map_err(usage)?
        }
    };
    let temps = log_spaced(a.t_min, a.t_max, a.points).map_err(usage)?;
    if !(a.noise.is_finite() && a.noise >= 0.0) {
        return Err(Failure::Usage(format!("--noise must be >= 0, got {}", a.noise)));
    }
    Ok(synthesize(&model, &temps, a.noise, a.seed)?.to_csv())
}

fn evolve_trace(a: &EvolveArgs) -> CliResult<String> {
    let params = model_params(&a.model)?;
    let field = field(&a.field)?;
    let initial: BasisState = a.initial.parse().map_err(usage)?;
    if !(a.t_max.is_finite() && a.t_max > 0.0) {
        return Err(Failure::Usage(format!("--t-max must be > 0, got {}", a.t_max)));
    }
    if a.points < 2 {
        return Err(Failure::Usage("--points must be >= 2".into()));
    }
    let prop = Propagator::new(&build_hamiltonian(&params, &field)?)?;
    let psi0 = StateVector::basis(initial);
    let step = a.t_max / (a.points - 1) as f64;

    let mut rows = Vec::with_capacity(a.points);
    for i in 0..a.points {
        let t = if i == a.points - 1 { a.t_max } else { step * i as f64 };
        let psi = prop.evolve(&psi0, t);
        let m = moment_expectation(&psi, &params)?;
        rows.push((t, psi.populations(), m));
    }
    Ok(match a.format {
        TableFormat::Csv => {
            let mut s = String::from("t_ns,p1,p1bar,p2,p2bar,mx,my\n");
            for (t, p, m) in &rows {
                let cells: Vec<String> =
                    std::iter::once(*t).chain(p.iter().copied()).chain([m.mx, m.my]).map(fmt_f64).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        TableFormat::Json => to_json(
            &rows
                .iter()
                .map(|(t, p, m)| {
                    json!({
                        "t_ns": t, "p1": p[0], "p1bar": p[1], "p2": p[2], "p2bar": p[3],
                        "mx": m.mx, "my": m.my,
                    })
                })
                .collect::<Vec<_>>(),
        ),
    })
}
