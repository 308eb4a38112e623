//! Command-line front end: construct bases, analyze and synthesize functions,
//! run the verification suites, and exercise the group operations, with
//! deterministic JSON on both sides.
//!
//! Exit statuses: 0 success, 1 usage or parse error, 2 domain violation,
//! 3 verification failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use padic_wavelets::json as wire;
use padic_wavelets::sample::DEFAULT_SEED;
use padic_wavelets::step::StepFunction;
use padic_wavelets::wavelet::{analyze, enumerate_indices, make_wavelet, synthesize};
use padic_wavelets::{suites, CoreError, Ctx};

#[derive(Parser)]
#[command(
    name = "padic-wavelets",
    about = "Exact multidimensional p-adic wavelet analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Ambient {
    /// Ambient prime
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Ambient dimension
    #[arg(long, default_value_t = 1)]
    d: usize,
}

#[derive(Args, Clone)]
struct Window {
    #[arg(long = "gamma-min", default_value_t = -1, allow_hyphen_values = true)]
    gamma_min: i64,
    #[arg(long = "gamma-max", default_value_t = 1, allow_hyphen_values = true)]
    gamma_max: i64,
    /// Fractional digits allowed per coordinate of the translation index
    #[arg(long = "max-digits", default_value_t = 1)]
    max_digits: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Emit every basis wavelet in a window with its cell data
    Basis {
        #[command(flatten)]
        ambient: Ambient,
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact wavelet coefficients of a mean-zero function file
    Analyze {
        /// Function JSON (the ambient prime and dimension come from the file)
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a function from a coefficient file
    Synthesize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite
    Verify {
        #[command(flatten)]
        ambient: Ambient,
        #[command(flatten)]
        window: Window,
        /// One of: orthonormality, parseval, meanzero, group, orbit, mra, oracle
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Orbit exploration depth
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group operations
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
}

#[derive(Subcommand)]
enum GroupOp {
    /// Fold a generator word into its unique factored form
    Factorize {
        #[command(flatten)]
        ambient: Ambient,
        /// Word JSON: a list of {"kind": …} letters
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The norm-conserving matrix sending e₁ to a unit-sphere vector
    SphereMap {
        #[command(flatten)]
        ambient: Ambient,
        /// Comma-separated scalars, e.g. "2*p^0,5*p^0"
        #[arg(long)]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a function file is a root-of-unity multiple of a basis wavelet
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Verification(m) => m,
        }
    }
}

fn from_core(err: CoreError) -> Failure {
    match err {
        CoreError::InvalidConfig(_) | CoreError::Parse(_) => Failure::Usage(err.to_string()),
        CoreError::OrbitClassification { .. } => Failure::Verification(err.to_string()),
        _ => Failure::Domain(err.to_string()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => {}
        Err(f) => {
            eprintln!("error: {}", f.message());
            std::process::exit(f.code());
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Basis { ambient, window, out } => cmd_basis(ambient, window, out),
        Command::Analyze { input, out } => cmd_analyze(input, out),
        Command::Synthesize { input, out } => cmd_synthesize(input, out),
        Command::Verify { ambient, window, suite, seed, depth, out } => {
            cmd_verify(ambient, window, suite, seed, depth, out)
        }
        Command::Group { op } => match op {
            GroupOp::Factorize { ambient, input, out } => cmd_factorize(ambient, input, out),
            GroupOp::SphereMap { ambient, x, out } => cmd_sphere_map(ambient, x, out),
            GroupOp::Classify { input, out } => cmd_classify(input, out),
        },
    }
}

fn make_ctx(ambient: &Ambient) -> Result<Ctx, Failure> {
    Ctx::new(ambient.p, ambient.d).map_err(from_core)
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(value: &serde_json::Value, out: Option<PathBuf>) -> Result<(), Failure> {
    let text = format!("{}\n", serde_json::to_string_pretty(value).expect("serializable"));
    match out {
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
    }
}

fn parse_function_file(path: &PathBuf) -> Result<(Ctx, StepFunction), Failure> {
    let text = read_file(path)?;
    let parsed: wire::FunctionJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad function file: {e}")))?;
    wire::function_from_json(&parsed).map_err(from_core)
}

fn cmd_basis(ambient: Ambient, window: Window, out: Option<PathBuf>) -> Result<(), Failure> {
    let ctx = make_ctx(&ambient)?;
    if window.gamma_min > window.gamma_max {
        return Err(Failure::Usage("gamma-min exceeds gamma-max".into()));
    }
    let indices = enumerate_indices(&ctx, window.gamma_min..=window.gamma_max, window.max_digits);
    let entries: Vec<serde_json::Value> = indices
        .iter()
        .map(|idx| {
            let w = make_wavelet(&ctx, idx).expect("enumerated indices are valid");
            json!({
                "index": wire::index_to_json(idx),
                "function": wire::function_to_json(&w),
            })
        })
        .collect();
    emit(
        &json!({
            "p": ctx.p(),
            "d": ctx.d(),
            "count": entries.len(),
            "wavelets": entries,
        }),
        out,
    )
}

fn cmd_analyze(input: PathBuf, out: Option<PathBuf>) -> Result<(), Failure> {
    let (ctx, f) = parse_function_file(&input)?;
    let coeffs = analyze(&ctx, &f).map_err(from_core)?;
    let sum_sq = coeffs.parseval_sum(ctx.p());
    let norm_sq = f.inner(&f);
    let parseval = wire::ParsevalJson {
        sum_sq: wire::amp_to_json(&sum_sq, ctx.p()),
        norm_sq: wire::amp_to_json(&norm_sq, ctx.p()),
        equal: sum_sq == norm_sq,
    };
    let payload = wire::coefficients_to_json(&ctx, &coeffs, Some(parseval));
    emit(
        &serde_json::to_value(&payload).expect("serializable"),
        out,
    )
}

fn cmd_synthesize(input: PathBuf, out: Option<PathBuf>) -> Result<(), Failure> {
    let text = read_file(&input)?;
    let parsed: wire::CoefficientsJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad coefficient file: {e}")))?;
    let (ctx, coeffs) = wire::coefficients_from_json(&parsed).map_err(from_core)?;
    let f = synthesize(&ctx, &coeffs);
    emit(
        &serde_json::to_value(wire::function_to_json(&f)).expect("serializable"),
        out,
    )
}

fn cmd_verify(
    ambient: Ambient,
    window: Window,
    suite: String,
    seed: u64,
    depth: u32,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let ctx = make_ctx(&ambient)?;
    let report = match suite.as_str() {
        "orthonormality" => {
            suites::orthonormality(&ctx, window.gamma_min, window.gamma_max, window.max_digits)
        }
        "meanzero" => {
            suites::meanzero(&ctx, window.gamma_min, window.gamma_max, window.max_digits)
        }
        "parseval" => {
            let cap = window.gamma_max.max(1) as u32;
            suites::parseval(&ctx, cap, window.max_digits)
        }
        "group" => suites::group(&ctx, seed),
        "orbit" => match suites::orbit(&ctx, depth) {
            Ok((report, _)) => report,
            Err(e) => return Err(Failure::Verification(e.to_string())),
        },
        "mra" => suites::mra(&ctx),
        "oracle" => suites::oracle(&ctx, seed, 500),
        other => return Err(Failure::Usage(format!("unknown suite {other:?}"))),
    };
    let pass = report.pass;
    emit(&serde_json::to_value(&report).expect("serializable"), out)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("suite {suite} failed")))
    }
}

fn cmd_factorize(ambient: Ambient, input: PathBuf, out: Option<PathBuf>) -> Result<(), Failure> {
    let ctx = make_ctx(&ambient)?;
    let text = read_file(&input)?;
    let atoms: Vec<wire::WordAtomJson> = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad word file: {e}")))?;
    let word = wire::word_from_json(&atoms, &ctx).map_err(from_core)?;
    let folded = padic_wavelets::group::factorize(&ctx, &word);
    emit(
        &serde_json::to_value(wire::group_element_to_json(&folded)).expect("serializable"),
        out,
    )
}

fn cmd_sphere_map(ambient: Ambient, x: String, out: Option<PathBuf>) -> Result<(), Failure> {
    let ctx = make_ctx(&ambient)?;
    let coords: Vec<String> = x.split(',').map(|s| s.trim().to_string()).collect();
    let point = wire::pvec_from_json(&coords, &ctx).map_err(from_core)?;
    let m = padic_wavelets::group::e1_to_x(&ctx, &point).map_err(from_core)?;
    emit(
        &json!({ "m": wire::matrix_to_json(&m) }),
        out,
    )
}

fn cmd_classify(input: PathBuf, out: Option<PathBuf>) -> Result<(), Failure> {
    let (ctx, f) = parse_function_file(&input)?;
    let result = padic_wavelets::group::orbit_classify(&ctx, &f);
    let payload = match result {
        Some((ell, idx)) => wire::ClassificationJson {
            in_orbit: true,
            ell: Some(ell),
            index: Some(wire::index_to_json(&idx)),
        },
        None => wire::ClassificationJson { in_orbit: false, ell: None, index: None },
    };
    emit(&serde_json::to_value(&payload).expect("serializable"), out)
}
