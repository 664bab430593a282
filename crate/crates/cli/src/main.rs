//! `hcusp`: command-line access to cusp distances, reductions, volumes and
//! Monte Carlo estimates on Hilbert modular varieties.

mod literal;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hilbert_cusps::analytics::{
    estimate_hermite, integral_mu1_t, partial_volume_g, siegel_volume, McConfig,
};
use hilbert_cusps::cusp_metric::mu;
use hilbert_cusps::field_factory::{make_rationals, make_real_quadratic, QuadraticFieldRequest};
use hilbert_cusps::number_field::{load_field_spec, DEFAULT_PRECISION_BITS};
use hilbert_cusps::selftest::{random_tau, run_selftest, SelftestConfig};
use hilbert_cusps::{CuspSearch, Error, TotallyRealField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "hcusp", version, about = "Cusp distances on Hilbert modular varieties")]
struct Cli {
    /// builtin:Q, quadratic:<m> or file:<path to .json/.toml spec>
    #[arg(long, global = true, default_value = "builtin:Q")]
    field: String,
    /// Bits of the fixed-point embeddings.
    #[arg(long, global = true, env = "HC_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    precision: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo sample count; accepts forms like 1e5.
    #[arg(long, global = true, default_value = "1e5", value_parser = parse_count)]
    samples: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degree, discriminant, regulator, units and indices.
    FieldInfo,
    /// μ(τ, c).
    Mu {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, allow_hyphen_values = true)]
        cusp: String,
    },
    /// The two closest cusps to τ.
    Closest {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        /// Enumeration threshold on μ; defaults to the field's lower bound on μ₁.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Move τ into the fundamental domain.
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
    /// Check the bounds on μ₁μ₂ at one τ or at N random points.
    VerifyMinkowski {
        #[arg(long, conflicts_with = "tau")]
        random: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
    },
    /// Siegel volume, unit-ball volume and ζ_K(2).
    Volume {
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        prime_bound: u64,
    },
    /// ζ_K(2) by a truncated Euler product.
    Zeta2 {
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        prime_bound: u64,
    },
    /// Normalized integral of μ₁^t.
    Integral {
        #[arg(long)]
        t: f64,
    },
    /// Partial volume function g(x).
    G {
        #[arg(long)]
        x: f64,
    },
    /// Farthest point from the cusps and the Hermite-type constant estimate.
    Hermite {
        #[arg(long, default_value_t = 24)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
    /// Cross-module invariant suites.
    Selftest {
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v.fract() != 0.0 || !(0.0..=9.0e15).contains(&v) {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as u64)
}

/// Failure of a command: exit code 1 for bad input, 2 for a detected violation.
struct Failure {
    code: u8,
    message: String,
    doc: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::ViolationFound(_)) { 2 } else { 1 };
        Failure { code, message: e.to_string(), doc: None }
    }
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        Failure { code: 1, message, doc: None }
    }
}

fn load_field(selector: &str, bits: u32) -> Result<TotallyRealField, Failure> {
    let (kind, arg) = selector.split_once(':').ok_or_else(|| format!("field selector `{selector}` must be kind:value"))?;
    let field = match (kind, arg) {
        ("builtin", "Q") => make_rationals(bits)?,
        ("quadratic", m) => {
            let m: i64 = m.parse().map_err(|_| format!("quadratic field needs an integer, got `{m}`"))?;
            make_real_quadratic(&QuadraticFieldRequest { m, precision_bits: bits })?
        }
        ("file", path) => load_field_spec(path.as_ref(), Some(bits))?,
        _ => return Err(format!("unknown field selector `{selector}`").into()),
    };
    Ok(field)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn field_info(field: &TotallyRealField) -> Value {
    json!({
        "name": field.name(),
        "degree": field.degree(),
        "basis_labels": field.basis_labels(),
        "discriminant": field.discriminant().to_string(),
        "regulator": field.regulator(),
        "index_plus_sq": field.index_plus_sq(),
        "fundamental_units": field.fundamental_units().iter().map(|u| u.to_string()).collect::<Vec<_>>(),
        "hermite_upper_bound": field.hermite_upper_bound(),
        "precision_bits": field.precision_bits(),
    })
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let field = load_field(&cli.field, cli.precision)?;
    let mc = McConfig { samples: cli.samples, seed: cli.seed, workers: cli.workers };
    let search = CuspSearch::new(&field);
    let result = match &cli.command {
        Command::FieldInfo => field_info(&field),
        Command::Mu { tau, cusp } => {
            let tau = literal::parse_tau(&field, tau)?;
            let c = literal::parse_cusp(&field, cusp)?;
            json!({ "tau": to_value(&tau), "cusp": to_value(&c), "mu": mu(&field, &tau, &c) })
        }
        Command::Closest { tau, threshold } => {
            let tau = literal::parse_tau(&field, tau)?;
            let thr = threshold.unwrap_or_else(|| search.default_threshold());
            to_value(&search.closest_cusps(&tau, thr)?)
        }
        Command::Reduce { tau } => {
            let tau = literal::parse_tau(&field, tau)?;
            let (reduced, gamma) = search.reduce_to_fundamental_domain(&tau)?;
            let entries: Vec<String> = gamma.entries().iter().map(|e| e.to_string()).collect();
            json!({ "tau": to_value(&tau), "reduced": to_value(&reduced), "gamma": entries })
        }
        Command::VerifyMinkowski { random, tau } => verify_minkowski(&field, &search, *random, tau.as_deref(), cli.seed)?,
        Command::Volume { prime_bound } => to_value(&siegel_volume(&field, *prime_bound)?),
        Command::Zeta2 { prime_bound } => to_value(&field.zeta_k_2(*prime_bound)?),
        Command::Integral { t } => to_value(&integral_mu1_t(&field, *t, &mc)?),
        Command::G { x } => {
            let mut v = to_value(&partial_volume_g(&field, *x, &mc)?);
            v["x"] = json!(x);
            v
        }
        Command::Hermite { grid, iters } => {
            let pool = rayon_pool(cli.workers)?;
            to_value(&pool.install(|| estimate_hermite(&field, *grid, *iters, cli.seed))?)
        }
        Command::Selftest { cases } => {
            let cfg = SelftestConfig { seed: cli.seed, cases: *cases, ..Default::default() };
            let report = run_selftest(&field, &cfg)?;
            if !report.passed {
                let doc = to_value(&report);
                return Err(Failure { code: 2, message: "selftest failed".into(), doc: Some(doc) });
            }
            to_value(&report)
        }
    };
    Ok(result)
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Failure::from(format!("thread pool: {e}")))
}

fn verify_minkowski(
    field: &TotallyRealField,
    search: &CuspSearch<'_>,
    random: Option<u64>,
    tau: Option<&str>,
    seed: u64,
) -> Result<Value, Failure> {
    let upper = field.hermite_upper_bound();
    if let Some(t) = tau {
        let tau = literal::parse_tau(field, t)?;
        return Ok(to_value(&search.verify_minkowski(&tau, upper)?));
    }
    let count = random.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi, mut ties, mut violations) = (f64::INFINITY, 0.0f64, 0u64, Vec::new());
    for _ in 0..count {
        let tau = random_tau(field, &mut rng);
        match search.verify_minkowski(&tau, upper) {
            Ok(r) => {
                lo = lo.min(r.product);
                hi = hi.max(r.product);
                ties += u64::from(r.tie_flag);
            }
            Err(Error::ViolationFound(msg)) => violations.push(msg),
            Err(e) => return Err(e.into()),
        }
    }
    let doc = json!({
        "tested": count,
        "violations": violations.len(),
        "min_product": lo,
        "max_product": hi,
        "lower": upper.powi(-4 * field.degree() as i32),
        "upper": 1.0,
        "ties": ties,
        "details": violations,
    });
    if !violations.is_empty() {
        return Err(Failure { code: 2, message: format!("{} Minkowski violations", violations.len()), doc: Some(doc) });
    }
    Ok(doc)
}

fn emit(cli: &Cli, doc: &Value) -> Result<(), String> {
    let text = output::render(doc, cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::FieldInfo => "field-info",
        Command::Mu { .. } => "mu",
        Command::Closest { .. } => "closest",
        Command::Reduce { .. } => "reduce",
        Command::VerifyMinkowski { .. } => "verify-minkowski",
        Command::Volume { .. } => "volume",
        Command::Zeta2 { .. } => "zeta2",
        Command::Integral { .. } => "integral",
        Command::G { .. } => "g",
        Command::Hermite { .. } => "hermite",
        Command::Selftest { .. } => "selftest",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(result) => match emit(&cli, &output::envelope(name, &cli.field, result)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        },
        Err(f) => {
            if let Some(doc) = f.doc {
                let _ = emit(&cli, &output::envelope(name, &cli.field, doc));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
