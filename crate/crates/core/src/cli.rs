//! The `lindfrag` command-line tool.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dynamics::{self, DynamicsError, EchoOptions};
use crate::effective::{self, EffectiveError};
use crate::fragments::{self, FragmentError};
use crate::frustration::{build_graph, VertexKind};
use crate::linalg::{c, LinalgError, C64};
use crate::model::{builtin, BuiltinKind, LindbladModel, ModelError, TildeModel};
use crate::oracle::{self, OracleError};
use crate::pauli::PauliError;
use crate::spectra::{self, ComplexSpectrum, MeanEstimate, RatioOptions, SpectraError};
use crate::tfim::{self, TfimError, TfimSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) | CliError::Io(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

macro_rules! validation_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}
validation_errors!(ModelError, PauliError, FragmentError);

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotSquare { .. } | LinalgError::TooLarge { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<EffectiveError> for CliError {
    fn from(e: EffectiveError) -> Self {
        match e {
            EffectiveError::Linalg(l) => l.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<TfimError> for CliError {
    fn from(e: TfimError) -> Self {
        match e {
            TfimError::InvalidSpec(_) | TfimError::WrongEdgeCase => CliError::Validation(e.to_string()),
            TfimError::Linalg(l) => l.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Linalg(l) => l.into(),
            SpectraError::BadSize(_) | SpectraError::BadChi | SpectraError::TooFew { .. } | SpectraError::AllReal => {
                CliError::Validation(e.to_string())
            }
            SpectraError::NonFinite => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Linalg(l) => l.into(),
            DynamicsError::Effective(x) => x.into(),
            DynamicsError::Tfim(x) => x.into(),
            DynamicsError::NonFinite(_) | DynamicsError::ZeroState => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Linalg(l) => l.into(),
            OracleError::Effective(x) => x.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "lindfrag", version, about = "Fragmentation and spectral analysis of Pauli-Lindblad models")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (default 1).
    #[arg(long, global = true, env = "LINDFRAG_THREADS")]
    threads: Option<usize>,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

/// Model source shared by most subcommands.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// JSON model file.
    #[arg(long, conflicts_with = "builtin")]
    model: Option<PathBuf>,
    /// Builtin model name (cluster_y or cluster_ziz).
    #[arg(long)]
    builtin: Option<BuiltinKind>,
    /// Number of qubits for builtins.
    #[arg(long)]
    n: Option<usize>,
    /// Uniform Hamiltonian coupling.
    #[arg(long = "J")]
    j: Option<f64>,
    /// Uniform jump rate.
    #[arg(long)]
    kappa: Option<f64>,
    /// Sets J = cos(θπ/2) and kappa = sin(θπ/2).
    #[arg(long, conflicts_with_all = ["j", "kappa"])]
    theta: Option<f64>,
}

impl ModelArgs {
    fn load(&self) -> Result<LindbladModel, CliError> {
        let model = match (&self.model, self.builtin) {
            (Some(path), None) => LindbladModel::from_json(&fs::read_to_string(path)?)?,
            (None, Some(kind)) => {
                let n = self.n.ok_or_else(|| CliError::Usage("--builtin needs --n".into()))?;
                builtin(kind, n, 1.0, 1.0)?
            }
            _ => return Err(CliError::Usage("give either --model or --builtin".into())),
        };
        let couplings = match (self.theta, self.j, self.kappa) {
            (Some(t), _, _) => Some(theta_couplings(t)?),
            (None, None, None) => None,
            (None, j, k) => Some((j.unwrap_or(1.0), k.unwrap_or(1.0))),
        };
        Ok(match couplings {
            Some((j, k)) => model.with_uniform_couplings(j, k),
            None => model,
        })
    }

    fn load_tilde(&self) -> Result<TildeModel, CliError> {
        Ok(self.load()?.to_tilde()?)
    }
}

fn theta_couplings(theta: f64) -> Result<(f64, f64), CliError> {
    if !(theta.is_finite() && (0.0..=1.0).contains(&theta)) {
        return Err(CliError::Usage("--theta must lie in [0, 1]".into()));
    }
    let (s, c) = (theta * std::f64::consts::FRAC_PI_2).sin_cos();
    Ok((c, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleCheck {
    All,
    Fragmentation,
    Conservation,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a model is a valid Pauli-Lindblad generator.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// List fragments, or count them by number of active sites.
    Fragments {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        histogram: bool,
    },
    /// Frustration graph of the model, optionally inside one fragment.
    Graph {
        #[command(flatten)]
        model: ModelArgs,
        /// Tilde-basis string selecting the fragment ('.' marks X).
        #[arg(long)]
        seed: Option<String>,
        /// Write Graphviz instead of tables, to a file if one is given.
        #[arg(long, value_name = "PATH", num_args = 0..=1)]
        dot: Option<Option<PathBuf>>,
    },
    /// Effective generator of the fragment containing a seed string.
    Effective {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: String,
        /// Emit the dense matrix as (row, col, re, im) rows.
        #[arg(long)]
        matrix: bool,
    },
    /// Exact quasiparticle modes of the open Ising chain.
    Tfim {
        /// Chain has M + 1 sites.
        #[arg(long = "M")]
        m: usize,
        /// Edge fields on the left and right ends (0 or 1).
        #[arg(long, num_args = 2, value_names = ["L", "R"], default_values_t = [1u8, 1u8])]
        zeta: Vec<u8>,
        #[arg(long, conflicts_with_all = ["j", "kappa"])]
        theta: Option<f64>,
        #[arg(long = "J")]
        j: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Eigenvalues of an effective generator.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: String,
    },
    /// Spectral statistics of eigenvalues read from a CSV file (re,im).
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        /// Threshold on |Im λ| for real eigenvalues (default 1e-10·max|λ|).
        #[arg(long)]
        real_tol: Option<f64>,
        /// Fraction kept by the central ellipse filter.
        #[arg(long, default_value_t = 1.0 / 3.0)]
        keep: f64,
        /// Emit individual spacing ratios.
        #[arg(long)]
        ratios: bool,
    },
    /// Loschmidt echo of a tilde-basis operator.
    Echo {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "seed-op")]
        seed_op: String,
        /// Final time (default 20/J).
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long, default_value_t = 400)]
        steps: usize,
    },
    /// Samples of the pseudo-Hermitian random-matrix ensemble.
    Rmt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        chi: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit eigenvalues instead of per-sample statistics.
        #[arg(long)]
        eigenvalues: bool,
    },
    /// Brute-force superoperator checks for small systems.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = OracleCheck::All)]
        check: OracleCheck,
    },
}

/// 17 significant digits, locale independent.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.16e}")
}

fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

struct Output {
    format: Format,
    sink: Box<dyn Write>,
}

impl Output {
    fn row(&mut self, fields: &[String]) -> io::Result<()> {
        writeln!(self.sink, "{}", fields.join(","))
    }

    fn text(&mut self, s: &str) -> io::Result<()> {
        self.sink.write_all(s.as_bytes())
    }

    fn json(&mut self, v: &Value) -> io::Result<()> {
        writeln!(self.sink, "{}", serde_json::to_string_pretty(v).expect("values serialize"))
    }
}

macro_rules! row {
    ($out:expr, $($f:expr),* $(,)?) => { $out.row(&[$($f.to_string()),*]) };
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lindfrag: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let threads = cli.threads.unwrap_or(1);
    if threads == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    // a second build in the same process keeps the existing pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    let sink: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    };
    let mut out = Output { format: cli.format, sink };
    let code = dispatch(cli.command, &mut out)?;
    out.sink.flush()?;
    Ok(code)
}

fn dispatch(command: Command, out: &mut Output) -> Result<i32, CliError> {
    match command {
        Command::Validate { model } => cmd_validate(&model, out),
        Command::Fragments { model, histogram } => cmd_fragments(&model, histogram, out),
        Command::Graph { model, seed, dot } => cmd_graph(&model, seed.as_deref(), dot, out),
        Command::Effective { model, seed, matrix } => cmd_effective(&model, &seed, matrix, out),
        Command::Tfim { m, zeta, theta, j, kappa } => cmd_tfim(m, &zeta, theta, j, kappa, out),
        Command::Spectrum { model, seed } => cmd_spectrum(&model, &seed, out),
        Command::Stats { input, real_tol, keep, ratios } => cmd_stats(&input, real_tol, keep, ratios, out),
        Command::Echo { model, seed_op, tmax, steps } => cmd_echo(&model, &seed_op, tmax, steps, out),
        Command::Rmt { n, chi, samples, seed, eigenvalues } => cmd_rmt(n, chi, samples, seed, eigenvalues, out),
        Command::Oracle { model, check } => cmd_oracle(&model, check, out),
    }
}

fn cmd_validate(args: &ModelArgs, out: &mut Output) -> Result<i32, CliError> {
    let model = args.load()?;
    let report = model.validate();
    match out.format {
        Format::Json => out.json(&json!({
            "valid": report.is_valid(),
            "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "warnings": report.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }))?,
        Format::Csv => {
            row!(out, "severity", "message")?;
            for v in &report.violations {
                row!(out, "error", v)?;
            }
            for w in &report.warnings {
                row!(out, "warning", w)?;
            }
        }
    }
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_VALIDATION })
}

fn cmd_fragments(args: &ModelArgs, histogram: bool, out: &mut Output) -> Result<i32, CliError> {
    let model = args.load_tilde()?;
    if histogram {
        let counts = fragments::count_by_size(&model)?;
        let total: u128 = counts.values().sum();
        match out.format {
            Format::Json => {
                let h: serde_json::Map<String, Value> =
                    counts.iter().map(|(k, v)| (k.to_string(), json!(v.to_string()))).collect();
                out.json(&json!({ "total": total.to_string(), "histogram": h }))?
            }
            Format::Csv => {
                row!(out, "active_sites", "fragments")?;
                for (k, v) in &counts {
                    row!(out, k, v)?;
                }
            }
        }
        return Ok(EXIT_OK);
    }
    let iter = fragments::enumerate_fragments(&model)?;
    match out.format {
        Format::Json => {
            let list: Vec<Value> =
                iter.map(|f| json!({ "labels": f.label_string(), "dim": f.dim().to_string() })).collect();
            out.json(&Value::Array(list))?
        }
        Format::Csv => {
            row!(out, "labels", "dim")?;
            for f in iter {
                row!(out, f.label_string(), f.dim())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn seed_fragment(model: &TildeModel, seed: &str) -> Result<fragments::Fragment, CliError> {
    let p = fragments::parse_seed(seed)?;
    if p.n_qubits() != model.n_qubits() {
        return Err(CliError::Validation(format!(
            "seed has {} sites, model has {}",
            p.n_qubits(),
            model.n_qubits()
        )));
    }
    Ok(fragments::fragment_of(model, &p)?)
}

fn cmd_graph(args: &ModelArgs, seed: Option<&str>, dot: Option<Option<PathBuf>>, out: &mut Output) -> Result<i32, CliError> {
    let model = args.load_tilde()?;
    let fragment = seed.map(|s| seed_fragment(&model, s)).transpose()?;
    let graph = build_graph(&model, fragment.as_ref())?;
    match dot {
        Some(Some(path)) => {
            fs::write(path, graph.to_dot())?;
            return Ok(EXIT_OK);
        }
        Some(None) => {
            out.text(&graph.to_dot())?;
            return Ok(EXIT_OK);
        }
        None => {}
    }
    let comps = graph.subsystem_components();
    let component_of = |v: usize| comps.iter().position(|c| c.contains(&v));
    let claws = graph.find_claws();
    match out.format {
        Format::Json => {
            let vertices: Vec<Value> = graph
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    json!({
                        "name": v.name(),
                        "kind": if v.kind == VertexKind::Unitary { "unitary" } else { "dissipative" },
                        "pauli": v.pauli.to_string(),
                        "frozen": v.frozen,
                        "component": component_of(i),
                    })
                })
                .collect();
            let name = |i: usize| graph.vertices()[i].name();
            let edges: Vec<Value> = graph.edges().into_iter().map(|(a, b)| json!([name(a), name(b)])).collect();
            let claws: Vec<Value> = claws
                .iter()
                .map(|c| json!({ "center": name(c.center), "leaves": c.leaves.iter().map(|&l| name(l)).collect::<Vec<_>>() }))
                .collect();
            let components: Vec<Value> = comps
                .iter()
                .map(|c| json!({ "vertices": c.iter().map(|&v| name(v)).collect::<Vec<_>>(), "trivial": graph.is_trivial(c), "path": graph.path_order(c).is_some() }))
                .collect();
            out.json(&json!({ "vertices": vertices, "edges": edges, "claws": claws, "components": components, "claw_free": claws.is_empty() }))?
        }
        Format::Csv => {
            row!(out, "vertex", "kind", "pauli", "frozen", "component", "neighbors")?;
            for (i, v) in graph.vertices().iter().enumerate() {
                let kind = if v.kind == VertexKind::Unitary { "unitary" } else { "dissipative" };
                let comp = component_of(i).map(|c| c.to_string()).unwrap_or_default();
                let nb: Vec<String> = graph.neighbors(i).iter().map(|&w| graph.vertices()[w].name()).collect();
                row!(out, v.name(), kind, v.pauli, v.frozen, comp, nb.join(" "))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_effective(args: &ModelArgs, seed: &str, matrix: bool, out: &mut Output) -> Result<i32, CliError> {
    let model = args.load_tilde()?;
    let fragment = seed_fragment(&model, seed)?;
    let gen = effective::restrict(&model, &fragment)?;
    if matrix {
        let m = gen.matrix()?;
        match out.format {
            Format::Json => {
                let rows: Vec<Vec<Value>> =
                    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()).collect();
                out.json(&json!({ "dim": m.nrows(), "matrix": rows }))?
            }
            Format::Csv => {
                row!(out, "row", "col", "re", "im")?;
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        let v = m[(i, j)];
                        if v != c(0.0, 0.0) {
                            row!(out, i, j, fmt_float(v.re), fmt_float(v.im))?;
                        }
                    }
                }
            }
        }
        return Ok(EXIT_OK);
    }
    match (out.format, gen.terms()) {
        (Format::Json, Ok(terms)) => {
            let t: Vec<Value> =
                terms.iter().map(|(v, p)| json!({ "coeff": complex_json(*v), "pauli": p.to_string() })).collect();
            out.json(&json!({
                "fragment": gen.fragment().to_string(),
                "pseudospin_sites": gen.pseudospin_sites(),
                "terms": t,
            }))?
        }
        (Format::Csv, Ok(terms)) => {
            row!(out, "re", "im", "pauli")?;
            for (v, p) in terms {
                row!(out, fmt_float(v.re), fmt_float(v.im), p)?;
            }
        }
        (_, Err(_)) => out.text(&gen.to_string())?,
    }
    Ok(EXIT_OK)
}

fn cmd_tfim(
    m: usize,
    zeta: &[u8],
    theta: Option<f64>,
    j: Option<f64>,
    kappa: Option<f64>,
    out: &mut Output,
) -> Result<i32, CliError> {
    if zeta.iter().any(|&z| z > 1) {
        return Err(CliError::Usage("--zeta takes 0 or 1".into()));
    }
    let (j, kappa) = match theta {
        Some(t) => theta_couplings(t)?,
        None => (j.unwrap_or(1.0), kappa.unwrap_or(1.0)),
    };
    let spec = TfimSpec::new(m + 1, j, kappa, zeta[0] == 1, zeta[1] == 1);
    let sol = tfim::obc_spectrum(&spec)?;
    match out.format {
        Format::Json => {
            let modes: Vec<Value> = sol
                .modes
                .iter()
                .map(|md| {
                    json!({
                        "momentum": complex_json(md.momentum),
                        "energy": complex_json(md.energy),
                        "trivial": md.kind == tfim::ModeKind::TrivialZero,
                        "residual": md.residual,
                    })
                })
                .collect();
            let zm = sol.zero_mode.as_ref().map(|z| json!({ "momentum": complex_json(z.momentum), "limit": complex_json(z.limit), "energy": complex_json(z.energy) }));
            out.json(&json!({ "n_sites": spec.n_sites, "J": j, "kappa": kappa, "modes": modes, "zero_mode": zm }))?
        }
        Format::Csv => {
            row!(out, "re_k", "im_k", "re_eps", "im_eps")?;
            for md in &sol.modes {
                row!(out, fmt_float(md.momentum.re), fmt_float(md.momentum.im), fmt_float(md.energy.re), fmt_float(md.energy.im))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn cmd_spectrum(args: &ModelArgs, seed: &str, out: &mut Output) -> Result<i32, CliError> {
    let model = args.load_tilde()?;
    let fragment = seed_fragment(&model, seed)?;
    let gen = effective::restrict(&model, &fragment)?;
    let spec = spectra::eigendecompose(gen.matrix()?, false)?;
    let values = sorted(spec.eigenvalues().to_vec());
    match out.format {
        Format::Json => out.json(&json!({ "eigenvalues": values.iter().map(|z| complex_json(*z)).collect::<Vec<_>>() }))?,
        Format::Csv => {
            row!(out, "re", "im")?;
            for z in &values {
                row!(out, fmt_float(z.re), fmt_float(z.im))?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Reads `re,im` rows; a non-numeric first line is taken as a header.
pub fn read_spectrum_csv(text: &str) -> Result<Vec<C64>, CliError> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().take(2).map(|f| f.parse().ok()).collect();
        match parsed {
            Some(p) if p.len() == 2 => values.push(c(p[0], p[1])),
            Some(p) if p.len() == 1 => values.push(c(p[0], 0.0)),
            _ if lineno == 0 => continue,
            _ => return Err(CliError::Validation(format!("line {}: expected re,im", lineno + 1))),
        }
    }
    Ok(values)
}

fn cmd_stats(input: &PathBuf, real_tol: Option<f64>, keep: f64, ratios: bool, out: &mut Output) -> Result<i32, CliError> {
    if !(keep > 0.0 && keep <= 1.0) {
        return Err(CliError::Usage("--keep must lie in (0, 1]".into()));
    }
    if real_tol.is_some_and(|t| !(t >= 0.0)) {
        return Err(CliError::Usage("--real-tol must be nonnegative".into()));
    }
    let spec = ComplexSpectrum::new(read_spectrum_csv(&fs::read_to_string(input)?)?, input.display().to_string())?;
    let stats = spectra::spacing_ratios(&spec, RatioOptions { real_tol, keep_fraction: keep })?;
    let cmean = MeanEstimate::from_values(&stats.complex_ratios.iter().map(|z| z.norm()).collect::<Vec<_>>());
    let rmean = MeanEstimate::from_values(&stats.real_ratios.iter().map(|z| z.abs()).collect::<Vec<_>>());
    match out.format {
        Format::Json => {
            let mut v = json!({
                "count": spec.len(),
                "f_r": stats.f_r,
                "eccentricity": stats.eccentricity,
                "mean_abs_complex_ratio": cmean,
                "mean_abs_real_ratio": rmean,
                "filters": stats.filters,
            });
            if ratios {
                v["complex_ratios"] = json!(stats.complex_ratios.iter().map(|z| complex_json(*z)).collect::<Vec<_>>());
                v["real_ratios"] = json!(stats.real_ratios);
            }
            out.json(&v)?
        }
        Format::Csv if ratios => {
            row!(out, "subset", "re", "im")?;
            for z in &stats.complex_ratios {
                row!(out, "complex", fmt_float(z.re), fmt_float(z.im))?;
            }
            for r in &stats.real_ratios {
                row!(out, "real", fmt_float(*r), "0")?;
            }
        }
        Format::Csv => {
            row!(out, "quantity", "value")?;
            row!(out, "count", spec.len())?;
            row!(out, "f_r", fmt_float(stats.f_r))?;
            row!(out, "eccentricity", stats.eccentricity.map(fmt_float).unwrap_or_default())?;
            row!(out, "mean_abs_complex_ratio", fmt_float(cmean.mean))?;
            row!(out, "mean_abs_real_ratio", fmt_float(rmean.mean))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_echo(args: &ModelArgs, seed_op: &str, tmax: Option<f64>, steps: usize, out: &mut Output) -> Result<i32, CliError> {
    let model = args.load_tilde()?;
    let fragment = seed_fragment(&model, seed_op)?;
    let gen = effective::restrict(&model, &fragment)?;
    let p = fragments::parse_seed(seed_op)?;
    let index = fragment.index_of(&p).ok_or_else(|| CliError::Validation("seed operator not in its fragment".into()))?;
    let mut initial = vec![c(0.0, 0.0); gen.dim()];
    initial[index] = c(1.0, 0.0);
    let j = model.base().hamiltonian().iter().map(|t| t.coeff.abs()).fold(0.0, f64::max);
    let t_max = match tmax {
        Some(t) => t,
        None if j > 0.0 => 20.0 / j,
        None => 20.0,
    };
    if !(t_max > 0.0) || steps < 2 {
        return Err(CliError::Usage("need --tmax > 0 and --steps ≥ 2".into()));
    }
    let series = dynamics::evolve_effective(&gen, &initial, &dynamics::time_grid(t_max, steps), &EchoOptions::default())?;
    match out.format {
        Format::Json => out.json(&json!({
            "regime": series.regime,
            "extrema": series.extrema,
            "method": series.method,
            "t": series.times,
            "echo": series.values.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
            "norm": series.norms,
        }))?,
        Format::Csv => {
            row!(out, "t", "re", "im", "abs", "norm")?;
            for ((t, v), n) in series.times.iter().zip(&series.values).zip(&series.norms) {
                row!(out, fmt_float(*t), fmt_float(v.re), fmt_float(v.im), fmt_float(v.norm()), fmt_float(*n))?;
            }
            eprintln!("regime: {:?} ({} turning points)", series.regime, series.extrema);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_rmt(n: usize, chi: f64, samples: usize, seed: u64, eigenvalues: bool, out: &mut Output) -> Result<i32, CliError> {
    let draws = spectra::rmt_samples(n, chi, seed, samples)?;
    let spectra: Vec<ComplexSpectrum> = draws.iter().map(|d| d.spectrum()).collect::<Result<_, _>>()?;
    if eigenvalues {
        match out.format {
            Format::Json => {
                let v: Vec<Value> = draws
                    .iter()
                    .zip(&spectra)
                    .map(|(d, s)| json!({ "seed": d.seed, "eigenvalues": sorted(s.eigenvalues().to_vec()).into_iter().map(complex_json).collect::<Vec<_>>() }))
                    .collect();
                out.json(&Value::Array(v))?
            }
            Format::Csv => {
                row!(out, "sample", "re", "im")?;
                for (i, s) in spectra.iter().enumerate() {
                    for z in sorted(s.eigenvalues().to_vec()) {
                        row!(out, i, fmt_float(z.re), fmt_float(z.im))?;
                    }
                }
            }
        }
        return Ok(EXIT_OK);
    }
    let rows: Vec<(u64, f64, Option<f64>)> = draws
        .iter()
        .zip(&spectra)
        .map(|(d, s)| {
            let tol = s.default_real_tol();
            (d.seed, spectra::real_fraction(s, tol), spectra::eccentricity(s, tol).ok())
        })
        .collect();
    match out.format {
        Format::Json => {
            let v: Vec<Value> =
                rows.iter().map(|(s, f, e)| json!({ "seed": s, "f_r": f, "eccentricity": e })).collect();
            out.json(&json!({ "n": n, "chi": chi, "samples": v }))?
        }
        Format::Csv => {
            row!(out, "sample", "seed", "f_r", "eccentricity")?;
            for (i, (s, f, e)) in rows.iter().enumerate() {
                row!(out, i, s, fmt_float(*f), e.map(fmt_float).unwrap_or_default())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(args: &ModelArgs, check: OracleCheck, out: &mut Output) -> Result<i32, CliError> {
    let model = args.load_tilde()?;
    let sup = oracle::build_superoperator(&model)?;
    // (check, value, threshold, pass)
    let mut table: Vec<(String, f64, f64, bool)> = Vec::new();
    if matches!(check, OracleCheck::All | OracleCheck::Fragmentation) {
        let r = oracle::verify_fragmentation(&model, &sup)?;
        table.push(("off_block_norm".into(), r.off_block_norm, oracle::OFF_BLOCK_TOL, r.off_block_norm < oracle::OFF_BLOCK_TOL));
        let md = r.max_matrix_distance();
        table.push(("block_matrix_distance".into(), md, oracle::OFF_BLOCK_TOL, md < oracle::OFF_BLOCK_TOL));
        let sd = r.max_spectrum_distance();
        table.push(("block_spectrum_distance".into(), sd, oracle::BLOCK_SPECTRUM_TOL, r.passed));
    }
    if matches!(check, OracleCheck::All | OracleCheck::Conservation) && model.n_qubits() <= oracle::CONSERVATION_MAX_QUBITS {
        let r = oracle::verify_conservation(&model, &sup)?;
        for s in &r.sites {
            let fine = s.fine_residual < oracle::COMMUTATOR_TOL;
            let coarse = s.coarse_residual < oracle::COMMUTATOR_TOL;
            table.push((format!("fine_projectors_site_{}", s.site), s.fine_residual, oracle::COMMUTATOR_TOL, fine));
            table.push((format!("coarse_projector_site_{}", s.site), s.coarse_residual, oracle::COMMUTATOR_TOL, coarse));
        }
    }
    let all_pass = table.iter().all(|r| r.3);
    match out.format {
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|(n, v, t, p)| json!({ "check": n, "value": v, "threshold": t, "pass": p }))
                .collect();
            out.json(&json!({ "checks": rows, "pass": all_pass }))?
        }
        Format::Csv => {
            row!(out, "check", "value", "threshold", "result")?;
            for (n, v, t, p) in &table {
                row!(out, n, fmt_float(*v), fmt_float(*t), if *p { "pass" } else { "fail" })?;
            }
        }
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_VALIDATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(0.0), "0");
    }

    #[test]
    fn spectrum_csv_reader() {
        let v = read_spectrum_csv("re,im\n1,2\n\n3,-4\n5\n").unwrap();
        assert_eq!(v, vec![c(1.0, 2.0), c(3.0, -4.0), c(5.0, 0.0)]);
        assert!(read_spectrum_csv("1,2\nx,y\n").is_err());
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["lindfrag", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["lindfrag", "fragments", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["lindfrag", "tfim", "--M", "3", "--zeta", "2", "1"]), EXIT_USAGE);
    }
}
