//! Command-line front end for `sslab-core`.
//!
//! One command per process. Each run prints a [`RunManifest`] (JSON) to stdout, and
//! also writes it to `--manifest` when that flag is given. Command outputs go to the
//! paths given by `--out` and similar flags.
//!
//! Exit codes: 0 on success, 1 when a tolerance check or numerical certification
//! fails, 2 on usage errors (bad flags, bad files, parameters outside the domain).

pub mod cache;
pub mod commands;
pub mod config;
pub mod manifest;

pub use cache::{cache_lookup, Cache, CacheStatus};
pub use manifest::{RunManifest, ToleranceResult};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sslab_core::triplesum::Sign;
use sslab_core::{PrecisionConfig, C64};
use std::ffi::OsString;
use std::path::PathBuf;

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: tolerance or accuracy failure.
pub const EXIT_TOLERANCE: i32 = 1;
/// Exit status: usage error.
pub const EXIT_USAGE: i32 = 2;

/// Failure of a command.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unusable input (exit 2).
    Usage(String),
    /// A numerical error from the core library.
    Core(sslab_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<sslab_core::Error> for CliError {
    fn from(e: sslab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sslab_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(E::Domain(_) | E::Parse(_) | E::Io(_)) => EXIT_USAGE,
            CliError::Core(E::Accuracy { .. } | E::Method(_) | E::Validation(_)) => EXIT_TOLERANCE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parse a complex number: `1.5`, `1.5,0.2`, `0.4i`, `-i`, `0.3+0.2i`, `2-1e-3i`.
pub fn parse_complex(text: &str) -> std::result::Result<C64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("`{text}` is not a complex number (use `re`, `re,im`, `bi` or `a+bi`)");
    let num = |s: &str| -> std::result::Result<f64, String> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    if let Some(body) = t.strip_suffix('i') {
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        return match split {
            Some(i) => Ok(C64::new(body[..i].parse().map_err(|_| bad())?, num(&body[i..])?)),
            None => Ok(C64::new(0.0, num(body)?)),
        };
    }
    Ok(C64::new(t.parse().map_err(|_| bad())?, 0.0))
}

#[derive(Parser, Debug)]
#[command(name = "sslab", version, about = "Shifted-sum laboratory: automorphic special functions, M-functions, shifted convolution and triple sums")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` config file (precision settings, threads); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Target relative error.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Mellin–Barnes line truncation height.
    #[arg(long, global = true)]
    pub contour_height: Option<f64>,
    /// Initial quadrature points per unit length.
    #[arg(long, global = true)]
    pub quad_points: Option<usize>,
    /// Maximum number of series terms.
    #[arg(long, global = true)]
    pub series_max_terms: Option<usize>,
    /// Also write the run manifest to this file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Do not print the manifest on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate (or fetch from the cache) a validated coefficient table.
    Coeffs(CoeffsArgs),
    /// Evaluate a special function, or run the Whittaker–Bessel bridge check.
    Specfun(SpecfunArgs),
    /// M-function evaluations and checks.
    #[command(subcommand)]
    Mfun(MfunCmd),
    /// Shifted convolution Dirichlet series.
    #[command(subcommand)]
    Dseries(DseriesCmd),
    /// Chapter-3 identities for the double series Z⁺.
    #[command(subcommand)]
    Zcheck(ZcheckCmd),
    /// Smoothed triple shifted sums.
    Triple(TripleArgs),
    /// Maass form data files.
    #[command(subcommand)]
    Maass(MaassCmd),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CoeffsArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    #[arg(long)]
    pub n: usize,
    /// Copy the table here (cache CSV format).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SpecFunc {
    Gamma,
    LogGamma,
    Zeta,
    CompletedZeta,
    BesselK,
    WhittakerW,
    Hyp2f1,
    IncGamma,
    /// W_{0,it}(2y) against √(2y/π)·K_{it}(y) on the standard grid.
    Bridge,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpecfunArgs {
    #[arg(value_enum)]
    pub func: SpecFunc,
    /// Argument of gamma, log-gamma, zeta, completed-zeta.
    #[arg(long, value_parser = parse_complex)]
    pub z: Option<C64>,
    /// Order μ of bessel-k and whittaker-w.
    #[arg(long, value_parser = parse_complex)]
    pub mu: Option<C64>,
    /// κ of whittaker-w.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Real argument of bessel-k, whittaker-w, inc-gamma.
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long, value_parser = parse_complex)]
    pub a: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub b: Option<C64>,
    #[arg(long, value_parser = parse_complex)]
    pub c: Option<C64>,
    /// Real argument of hyp2f1.
    #[arg(long)]
    pub x: Option<f64>,
    /// Order r of inc-gamma Γ(r, y).
    #[arg(long, value_parser = parse_complex)]
    pub r: Option<C64>,
    /// Tolerance of the bridge check.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum MfunCmd {
    /// Evaluate M_k(s, z/i, δ) by every applicable representation.
    Eval(MfunEvalArgs),
    /// Three-way agreement (quadrature, closed form, contour) on a grid.
    CrossCheck(CrossCheckArgs),
    /// Exact residues against small-circle contour integrals.
    Residues(ResiduesArgs),
    /// Minimum of the Lemma 2.2.5 gap over random triples.
    Lemma225(LemmaArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MfunEvalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub k: f64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: C64,
    #[arg(long)]
    pub delta: f64,
    /// Truncation Y of the quadrature (with --h).
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub h: u64,
    /// Contour shift A (default: just right of the rightmost left pole).
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    /// Y values for a truncation-decay table, e.g. 5,10,20,40.
    #[arg(long, value_delimiter = ',')]
    pub decay: Option<Vec<f64>>,
    /// δ-ladder for the δ → 0 extrapolation, e.g. 1e-2,1e-3,1e-4.
    #[arg(long, value_delimiter = ',')]
    pub delta_ladder: Option<Vec<f64>>,
    /// Tolerance of the δ → 0 extrapolation.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Gnuplot two-column file for --decay (Y, relative error).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CrossCheckArgs {
    /// `default` for the built-in 40-tuple grid, or a grid file with lines
    /// `k s z delta` (complex values as `re,im`). A file named `default` takes precedence.
    #[arg(long, default_value = "default")]
    pub grid: String,
    /// Quadrature truncation Y.
    #[arg(long, default_value_t = sslab_core::mfunction::grid::GRID_Y)]
    pub y: f64,
    #[arg(long, default_value_t = sslab_core::mfunction::grid::GRID_TOL)]
    pub tol: f64,
    /// CSV of the per-tuple comparison.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gnuplot file of the truncation decay (Y = 5, 10, 20, 40) for the three decay tuples.
    #[arg(long)]
    pub decay_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ResiduesArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 10.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum DseriesCmd {
    /// D⁻_{f,f}(s; h).
    Minus(DMinusArgs),
    /// D⁺ with a Maass form (--maass) or divisor (--divisor u) right factor.
    Plus(DPlusArgs),
    /// δ-smoothed D⁺_{f,ℓ}(s; h, δ) over a δ-ladder.
    Smoothed(DSmoothedArgs),
    /// Spectral expansion of D⁻ against the series.
    Spectral(DSpectralArgs),
    /// Both sides of the unfolding identity.
    Unfold(DUnfoldArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DMinusArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    #[arg(long, default_value_t = 10000)]
    pub n: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: C64,
    #[arg(long, default_value_t = 1)]
    pub h: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DPlusArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: C64,
    #[arg(long, default_value_t = 1)]
    pub h: u64,
    #[arg(long, conflicts_with = "divisor")]
    pub maass: Option<PathBuf>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub divisor: Option<C64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DSmoothedArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: C64,
    #[arg(long, default_value_t = 1)]
    pub h: u64,
    #[arg(long)]
    pub maass: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
    pub delta: Vec<f64>,
    /// CSV of (δ, Re, Im).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DSpectralArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    /// Terms of the series side.
    #[arg(long, default_value_t = 200_000)]
    pub n: usize,
    #[arg(long, value_parser = parse_complex, default_value = "2")]
    pub s: C64,
    #[arg(long, default_value_t = 1)]
    pub h: u64,
    /// Directory of Maass data files (all `*.txt`); default `$SSLAB_MAASS_DIR`.
    #[arg(long)]
    pub maass_dir: Option<PathBuf>,
    /// The dataset holds every form with t ≤ this value.
    #[arg(long, default_value_t = 18.0)]
    pub t_complete: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DUnfoldArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    #[arg(long, value_parser = parse_complex, default_value = "3")]
    pub s: C64,
    #[arg(long, default_value_t = 1)]
    pub h: u64,
    #[arg(long, default_value_t = 4000)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum ZcheckCmd {
    /// Prop 3.2.1 rearrangements of Z⁺.
    Rearrange(RearrangeArgs),
    /// Finite-shift contour identity and the beta contour identity.
    Contour(ContourArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RearrangeArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    #[arg(long)]
    pub maass: PathBuf,
    #[arg(long, value_parser = parse_complex, default_value = "9")]
    pub s: C64,
    #[arg(long, value_parser = parse_complex, default_value = "2")]
    pub w: C64,
    /// Binomial truncation K.
    #[arg(long, default_value_t = 2)]
    pub kk: usize,
    #[arg(long, default_value_t = 600)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ContourArgs {
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    #[arg(long)]
    pub maass: PathBuf,
    #[arg(long, value_parser = parse_complex, default_value = "3")]
    pub s: C64,
    #[arg(long, value_parser = parse_complex, default_value = "3")]
    pub w: C64,
    /// The contour sits on Re z = −eps.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub beta_tol: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TripleAction {
    /// S(X) at one X (--x).
    Sum,
    /// S(X) over --ladder with the decay fit.
    Ladder,
    /// Fit a ladder CSV (--input).
    Fit,
    /// Factored evaluator against the literal triple loop at small X.
    Brute,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TripleArgs {
    /// Defaults to `ladder`, or `fit` when --input is given, or `sum` when --x is given.
    #[arg(value_enum)]
    pub action: Option<TripleAction>,
    #[arg(long, default_value = "plus")]
    pub sign: Sign,
    #[arg(long, default_value_t = 12)]
    pub weight: u32,
    /// X values (comma separated). `sum` uses the first; `brute` defaults to 1,2,4.
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<f64>>,
    /// Ladder CSV (`x,S` rows) for `fit`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON output: ladder, fit, and checks.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV output of the ladder (`x,S`).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = sslab_core::triplesum::DEFAULT_TAIL_EPS)]
    pub tail_eps: f64,
    /// Slope window of the decay fit.
    #[arg(long, default_value_t = -0.8, allow_hyphen_values = true)]
    pub slope_min: f64,
    #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
    pub slope_max: f64,
}

#[derive(Subcommand, Debug)]
pub enum MaassCmd {
    /// Parse, check Hecke relations and automorphy, and normalize a data file.
    Validate(MaassValidateArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MaassValidateArgs {
    pub file: PathBuf,
    /// Automorphy residual tolerance.
    #[arg(long, default_value_t = sslab_core::modforms::maass::VAL_TOL)]
    pub tol: f64,
}

/// Execution context handed to commands.
pub struct Ctx {
    pub cfg: PrecisionConfig,
    pub cache: Cache,
    pub manifest: RunManifest,
}

impl Ctx {
    pub fn check(&mut self, t: ToleranceResult) {
        self.manifest.tolerance_results.push(t);
    }
    pub fn output(&mut self, p: &std::path::Path) {
        self.manifest.outputs.push(p.display().to_string());
    }
    pub fn table(&mut self, weight: u32, n: usize) -> CliResult<sslab_core::modforms::CoefficientTable> {
        let (t, status) = self.cache.lookup(weight, n)?;
        let key = format!("cache weight{weight}_N{n}");
        self.manifest.parameters.insert(key, serde_json::to_value(&status).unwrap());
        Ok(t)
    }
}

pub(crate) fn insert_params<T: Serialize>(m: &mut RunManifest, args: &T) {
    if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(args) {
        for (k, v) in map {
            if !v.is_null() {
                m.parameters.insert(k, v);
            }
        }
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Coeffs(_) => "coeffs".into(),
        Command::Specfun(_) => "specfun".into(),
        Command::Mfun(m) => format!(
            "mfun {}",
            match m {
                MfunCmd::Eval(_) => "eval",
                MfunCmd::CrossCheck(_) => "cross-check",
                MfunCmd::Residues(_) => "residues",
                MfunCmd::Lemma225(_) => "lemma225",
            }
        ),
        Command::Dseries(d) => format!(
            "dseries {}",
            match d {
                DseriesCmd::Minus(_) => "minus",
                DseriesCmd::Plus(_) => "plus",
                DseriesCmd::Smoothed(_) => "smoothed",
                DseriesCmd::Spectral(_) => "spectral",
                DseriesCmd::Unfold(_) => "unfold",
            }
        ),
        Command::Zcheck(z) => format!(
            "zcheck {}",
            match z {
                ZcheckCmd::Rearrange(_) => "rearrange",
                ZcheckCmd::Contour(_) => "contour",
            }
        ),
        Command::Triple(_) => "triple".into(),
        Command::Maass(_) => "maass validate".into(),
    }
}

fn setup(global: &GlobalArgs) -> CliResult<PrecisionConfig> {
    let file = match &global.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("config file {}: {e}", p.display())))?;
            config::parse_config(&text).map_err(CliError::Usage)?
        }
        None => config::FileConfig::default(),
    };
    let flags = config::Overrides {
        rel_tol: global.rel_tol,
        contour_height: global.contour_height,
        quad_points: global.quad_points,
        series_max_terms: global.series_max_terms,
    };
    let cfg = config::resolve(PrecisionConfig::default(), &file, &flags).map_err(CliError::Usage)?;
    if let Some(n) = global.threads.or(file.threads) {
        if n == 0 {
            return Err(CliError::Usage("--threads must be ≥ 1".into()));
        }
        // a second initialization (library use within one process) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(cfg)
}

/// Run one command from argv (including the program name) and return the exit status.
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
    let start = std::time::Instant::now();
    let cfg = match setup(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sslab: {e}");
            return e.exit_code();
        }
    };
    let mut manifest = RunManifest::new(command_name(&cli.command));
    manifest.parameters.insert("precision".into(), serde_json::to_value(cfg).unwrap());
    manifest.parameters.insert("threads".into(), serde_json::json!(rayon::current_num_threads()));
    let mut ctx = Ctx { cfg, cache: Cache::from_env(), manifest };
    let outcome = commands::dispatch(&cli.command, &mut ctx);
    ctx.manifest.wall_time = start.elapsed().as_secs_f64();
    let code = match &outcome {
        Ok(()) if ctx.manifest.all_passed() => EXIT_OK,
        Ok(()) => {
            for t in ctx.manifest.tolerance_results.iter().filter(|t| !t.passed) {
                eprintln!("sslab: tolerance check `{}` failed: achieved {:?}, tolerance {:e}", t.name, t.achieved, t.tolerance);
            }
            EXIT_TOLERANCE
        }
        Err(e) => {
            eprintln!("sslab: {e}");
            ctx.manifest.results = serde_json::json!({ "error": e.to_string() });
            e.exit_code()
        }
    };
    if let Some(p) = &cli.global.manifest {
        if let Err(e) = ctx.manifest.save(p) {
            eprintln!("sslab: cannot write manifest {}: {e}", p.display());
            return EXIT_USAGE;
        }
    }
    if !cli.global.quiet {
        println!("{}", ctx.manifest.to_json());
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let c = |a, b| C64::new(a, b);
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_complex("1.5,-0.2").unwrap(), c(1.5, -0.2));
        assert_eq!(parse_complex("0.4i").unwrap(), c(0.0, 0.4));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.3+0.2i").unwrap(), c(0.3, 0.2));
        assert_eq!(parse_complex("2e-3-1e-3i").unwrap(), c(2e-3, -1e-3));
        assert_eq!(parse_complex("-2-i").unwrap(), c(-2.0, -1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
