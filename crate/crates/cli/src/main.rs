//! `prlb`: batch driver for prime race sweeps, kernel sums and limiting
//! densities.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Number, Value};

use prlb::density::{fm_symmetry_suite, unbiased_check, validate_tuple, DensityModel, DensityOptions};
use prlb::kernel::{BentzMode, KernelOptions, KernelSpec, KernelValue, Weight};
use prlb::race::{crossing_report, counts_csv, series_csv, CountingFunction, RaceSpec, Sweep, SweepOptions};
use prlb::residue::{CharacterTable, ResidueSystem};
use prlb::sieve::SieveConfig;
use prlb::zeros::{validate_zeros, ZeroArchive};
use prlb::Error;

#[derive(Parser, Debug)]
#[command(name = "prlb", version, about = "Prime race laboratory")]
struct Cli {
    /// Worker threads (default: all cores).  Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep a prime race up to T and report crossings.
    Race(RaceArgs),
    /// Evaluate a weighted prime sum over a parameter grid.
    Kernel(KernelArgs),
    /// Limiting logarithmic density of an ordering of residue classes.
    Density(DensityArgs),
    /// List, check and validate a zero archive.
    Zeros(ZerosArgs),
}

#[derive(Args, Debug)]
struct RaceArgs {
    #[arg(long)]
    k: u64,
    /// pi, theta, psi, Pi or pi2.
    #[arg(long = "f", alias = "F", default_value = "pi")]
    function: String,
    /// Two classes `a,b`: the race `f(x;k,a) - f(x;k,b)`.
    #[arg(long)]
    pair: Option<String>,
    /// Leading classes of a union race (with --trail).
    #[arg(long)]
    lead: Option<String>,
    #[arg(long)]
    trail: Option<String>,
    #[arg(long = "T")]
    t: u64,
    /// Ratio between stored sample points.
    #[arg(long, default_value_t = 1e-3)]
    ratio: f64,
    /// Save the sweep state here at the end (and every --checkpoint-every).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    checkpoint_every: Option<u64>,
    /// Continue from a saved state.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Write x,delta rows at the sample points.
    #[arg(long)]
    series_csv: Option<PathBuf>,
    /// Write per-class counts at the sample points.
    #[arg(long)]
    counts_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KernelKind {
    Abel,
    Kt,
    Bentz,
    Chebyshev,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightArg {
    Unit,
    Log,
    Lambda,
    LambdaOverLog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kind: KernelKind,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    pair: Option<String>,
    /// Counting function for Abel sums (and the KT weight default).
    #[arg(long = "F", alias = "f")]
    function: Option<String>,
    /// Rate or width: a value or a grid `a:b:step`.
    #[arg(long)]
    r: Option<String>,
    /// Centre or scale: a value or a grid `a:b:step`.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    weight: Option<WeightArg>,
    /// `s` in `exp(-log^2 p / (s x))`.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = prlb::kernel::DEFAULT_PRIME_CAP)]
    prime_cap: u64,
    /// Decay constant of the Chebyshev series `exp(-t/c)`.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long)]
    k: u64,
    /// Classes `a1,a2,...` in the order of the event `pi(a1) > pi(a2) > ...`.
    #[arg(long)]
    tuple: String,
    /// Zero archive directory.
    #[arg(long, env = "PRLB_ZERO_DIR")]
    zeros: Option<PathBuf>,
    /// Use only the first n zeros of each character.
    #[arg(long)]
    max_zeros: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, default_value_t = 5)]
    max_level: u32,
    /// Tail-sum scale for the uncertainty probe; 0 disables it.
    #[arg(long, default_value_t = 1.25)]
    tail_probe: f64,
    #[arg(long, default_value_t = 2_000_000_000)]
    max_evaluations: u64,
    /// Also evaluate the symmetric images of the tuple.
    #[arg(long)]
    symmetry: bool,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    #[arg(long, env = "PRLB_ZERO_DIR")]
    zeros: PathBuf,
    /// Report coverage of this modulus.
    #[arg(long)]
    k: Option<u64>,
    /// Evaluate |L(1/2 + i gamma)| for every loaded ordinate.
    #[arg(long)]
    validate: bool,
    #[arg(long, default_value_t = 10_000)]
    terms: usize,
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn parse_list(s: &str, what: &str) -> Vec<u64> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .unwrap_or_else(|_| usage(ErrorKind::ValueValidation, format!("bad {what} entry {t:?}")))
        })
        .collect()
}

fn parse_pair(s: &str) -> (u64, u64) {
    match parse_list(s, "--pair")[..] {
        [a, b] => (a, b),
        _ => usage(ErrorKind::ValueValidation, "--pair takes exactly two classes a,b"),
    }
}

/// A single value or an inclusive grid `a:b:step`.
fn parse_grid(s: &str, what: &str) -> Vec<f64> {
    let bad = || -> ! { usage(ErrorKind::ValueValidation, format!("bad {what} value {s:?}")) };
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().unwrap_or_else(|_| bad()))
        .collect();
    match parts[..] {
        [v] => vec![v],
        [a, b, step] => {
            if !(step > 0.0) || b < a {
                bad();
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| a + i as f64 * step).collect()
        }
        _ => bad(),
    }
}

fn function(s: &str) -> CountingFunction {
    s.parse()
        .unwrap_or_else(|_| usage(ErrorKind::InvalidValue, format!("unknown counting function {s:?}")))
}

/// Numbers that are not integers are printed with 17 significant digits.
fn fixed_digits(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => match n.as_f64() {
            Some(x) if x.is_finite() => format!("{x:.16e}")
                .parse::<Number>()
                .map(Value::Number)
                .unwrap_or(Value::Null),
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(fixed_digits).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, fixed_digits(v))).collect()),
        other => other,
    }
}

fn print_json(v: Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(&fixed_digits(v)).expect("serialisable");
    // a closed pipe (`prlb ... | head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MissingZeroData { .. } => 3,
        Error::BudgetExhausted(_) => 4,
        Error::InvalidModulus(_)
        | Error::InvalidResidue { .. }
        | Error::InvalidRace(_)
        | Error::EmptyRange { .. }
        | Error::RangeTooLarge(_)
        | Error::Unsupported(_)
        | Error::DuplicateClass(_)
        | Error::InvalidParameter(_) => 2,
        _ => 1,
    }
}

fn cmd_race(a: &RaceArgs, sieve: SieveConfig) -> prlb::Result<()> {
    let f = function(&a.function);
    let spec = match (&a.pair, &a.lead, &a.trail) {
        (Some(p), None, None) => {
            let (l1, l2) = parse_pair(p);
            RaceSpec::pair(f, l1, l2)
        }
        (None, Some(l), Some(t)) => RaceSpec::union(f, parse_list(l, "--lead"), parse_list(t, "--trail")),
        (None, None, None) => usage(
            ErrorKind::MissingRequiredArgument,
            "race needs --pair a,b (or --lead and --trail)",
        ),
        _ => usage(ErrorKind::ArgumentConflict, "use either --pair or both --lead and --trail"),
    };
    let options = SweepOptions {
        races: vec![spec],
        ratio: a.ratio,
        record_counts: a.counts_csv.is_some(),
        sieve,
        ..SweepOptions::default()
    };
    let mut sw = match &a.resume {
        Some(path) => {
            let mut s = Sweep::restore(path, &options)?;
            s.set_sieve(sieve);
            s
        }
        None => Sweep::new(a.k, &options)?,
    };
    if sw.modulus() != a.k {
        return Err(Error::InvalidParameter(format!(
            "checkpoint is for modulus {}, not {}",
            sw.modulus(),
            a.k
        )));
    }
    if a.t < 2 {
        return Err(Error::InvalidParameter(format!("T = {} is below 2", a.t)));
    }
    match (a.checkpoint_every, &a.checkpoint) {
        (Some(0), _) => return Err(Error::InvalidParameter("--checkpoint-every must be positive".into())),
        (Some(step), Some(path)) => {
            while sw.position() <= a.t {
                let next = sw.position().saturating_add(step - 1).min(a.t);
                sw.advance_to(next)?;
                sw.save(path)?;
            }
        }
        (Some(_), None) => usage(ErrorKind::MissingRequiredArgument, "--checkpoint-every needs --checkpoint"),
        _ => sw.advance_to(a.t)?,
    }
    if let Some(path) = &a.checkpoint {
        sw.save(path)?;
    }
    let result = sw.result();
    let series = &result.races[0];
    if let Some(path) = &a.series_csv {
        fs::write(path, series_csv(series))?;
    }
    if let Some(path) = &a.counts_csv {
        fs::write(path, counts_csv(&result.trajectory))?;
    }
    let report = crossing_report(series);
    let mut counts = Map::new();
    for l in series.spec.lead.iter().chain(&series.spec.trail) {
        let key = (l % a.k).to_string();
        let v = result.counts.value(f, *l).unwrap_or(f64::NAN);
        let val = if matches!(f, CountingFunction::Pi | CountingFunction::Pi2) {
            json!(v as u64)
        } else {
            json!(v)
        };
        counts.insert(key, val);
    }
    let lead = series.lead_density();
    let mut out = json!({
        "k": a.k,
        "function": f.name(),
        "race": report.race,
        "T": report.t,
        "first_negative": report.first_negative,
        "first_positive": series.first_positive,
        "w": report.w,
        "delta": series.delta,
        "counts": counts,
        "lead_density": {
            "numerator": lead.numerator,
            "denominator": lead.denominator,
            "value": lead.value(),
        },
        "crossings_stored": series.crossings.len(),
        "crossings_dropped": series.crossings_dropped,
    });
    if let Ok(ld) = series.log_density() {
        out["log_density"] = serde_json::to_value(ld)?;
    }
    print_json(out);
    Ok(())
}

fn weight_of(w: WeightArg) -> Weight {
    match w {
        WeightArg::Unit => Weight::Unit,
        WeightArg::Log => Weight::LogP,
        WeightArg::Lambda => Weight::Lambda,
        WeightArg::LambdaOverLog => Weight::LambdaOverLog,
    }
}

fn cmd_kernel(a: &KernelArgs, sieve: SieveConfig) -> prlb::Result<()> {
    let need = |o: &Option<String>, name: &str| -> Vec<f64> {
        match o {
            Some(s) => parse_grid(s, name),
            None => usage(ErrorKind::MissingRequiredArgument, format!("--kind needs --{name}")),
        }
    };
    let need_k = || a.k.unwrap_or_else(|| usage(ErrorKind::MissingRequiredArgument, "--k is required"));
    let need_pair = || match &a.pair {
        Some(p) => parse_pair(p),
        None => usage(ErrorKind::MissingRequiredArgument, "--pair a,b is required"),
    };
    let options = KernelOptions {
        prime_cap: a.prime_cap,
        scale: a.scale,
        sieve,
    };
    let mut rows: Vec<(String, f64, KernelSpec)> = Vec::new();
    match a.kind {
        KernelKind::Abel => {
            let f = function(a.function.as_deref().unwrap_or("pi"));
            let (k, (l1, l2)) = (need_k(), need_pair());
            for r in need(&a.r, "r") {
                rows.push(("r".into(), r, KernelSpec::Abel { function: f, r, k, l1, l2 }));
            }
        }
        KernelKind::Kt => {
            let (k, (l1, l2)) = (need_k(), need_pair());
            let weight = match (a.weight, &a.function) {
                (Some(w), _) => weight_of(w),
                (None, Some(f)) => Weight::for_function(function(f))?,
                (None, None) => Weight::LogP,
            };
            let (xs, rs) = (need(&a.x, "x"), need(&a.r, "r"));
            if xs.len() > 1 && rs.len() > 1 {
                usage(ErrorKind::ArgumentConflict, "grid either --x or --r, not both");
            }
            for &x in &xs {
                for &r in &rs {
                    let (name, p) = if rs.len() > 1 { ("r", r) } else { ("x", x) };
                    rows.push((name.into(), p, KernelSpec::KtGauss { k, l1, l2, x, r, weight }));
                }
            }
        }
        KernelKind::Bentz => {
            let alpha = a
                .alpha
                .unwrap_or_else(|| usage(ErrorKind::MissingRequiredArgument, "--kind bentz needs --alpha"));
            let mode = match (a.k, &a.pair) {
                (Some(k), Some(p)) => {
                    let (l1, l2) = parse_pair(p);
                    BentzMode::Classes { k, l1, l2 }
                }
                (Some(4), None) => BentzMode::ModFour,
                (Some(3), None) => BentzMode::Chi3,
                _ => usage(
                    ErrorKind::MissingRequiredArgument,
                    "--kind bentz needs --k 4, --k 3, or --k with --pair",
                ),
            };
            for x in need(&a.x, "x") {
                rows.push(("x".into(), x, KernelSpec::Bentz { mode, x, alpha }));
            }
        }
        KernelKind::Chebyshev => {
            let c = a
                .c
                .unwrap_or_else(|| usage(ErrorKind::MissingRequiredArgument, "--kind chebyshev needs --c"));
            for x in need(&a.x, "x") {
                if !(x >= 1.0) || x.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!("x = {x} must be a positive integer")));
                }
                rows.push(("x".into(), x, KernelSpec::ChebyshevExp { c, x: x as u64 }));
            }
        }
    }
    let values: Vec<KernelValue> = rows
        .iter()
        .map(|(_, _, spec)| spec.evaluate(&options))
        .collect::<prlb::Result<_>>()?;
    for v in &values {
        for w in &v.warnings {
            eprintln!("warning: {w}");
        }
    }
    match a.format {
        Format::Csv => {
            let mut text = String::from("parameter,value,tail_bound\n");
            for ((_, p, _), v) in rows.iter().zip(&values) {
                text += &format!("{},{:.16e},{:.16e}\n", num17(*p), v.value, v.tail_bound);
            }
            use std::io::Write;
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
        Format::Json => {
            let list: Vec<Value> = rows
                .iter()
                .zip(&values)
                .map(|((name, p, spec), v)| {
                    json!({
                        "parameter": name,
                        "at": p,
                        "spec": spec,
                        "value": v.value,
                        "tail_bound": v.tail_bound,
                        "cutoff": v.cutoff,
                        "truncated": v.truncated,
                        "warnings": v.warnings,
                    })
                })
                .collect();
            print_json(Value::Array(list));
        }
    }
    Ok(())
}

/// Integers plainly, everything else with 17 significant digits.
fn num17(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.16e}")
    }
}

fn cmd_density(a: &DensityArgs, threads: Option<usize>) -> prlb::Result<()> {
    let tuple = parse_list(&a.tuple, "--tuple");
    let sys = ResidueSystem::new(a.k)?;
    let tuple = validate_tuple(&sys, &tuple)?;
    let check = unbiased_check(&sys, &tuple)?;
    let archive = match &a.zeros {
        Some(dir) if dir.is_dir() => ZeroArchive::open(dir)?,
        _ => ZeroArchive::from_sets(Vec::new()),
    };
    let options = DensityOptions {
        max_zeros: a.max_zeros,
        tolerance: a.tolerance,
        max_level: a.max_level,
        tail_probe: (a.tail_probe > 0.0).then_some(a.tail_probe),
        max_evaluations: a.max_evaluations,
        threads,
        ..DensityOptions::default()
    };
    let model = match DensityModel::new(a.k, &archive, options) {
        Err(Error::MissingZeroData { modulus, characters }) => {
            let table = CharacterTable::new(modulus)?;
            for &c in &characters {
                eprintln!(
                    "missing zeros for character {c} modulo {modulus} (conductor {}, values {})",
                    table.character(c).conductor,
                    table.fingerprint(c)
                );
            }
            return Err(Error::MissingZeroData { modulus, characters });
        }
        other => other?,
    };
    let mut out = if a.symmetry {
        let report = fm_symmetry_suite(&model, &tuple)?;
        let mut v = serde_json::to_value(&report.base)?;
        v["symmetry"] = serde_json::to_value(&report.items)?;
        v["symmetry_max_deviation"] = json!(report.max_deviation);
        v
    } else {
        serde_json::to_value(model.density(&tuple)?)?
    };
    out["unbiased_reason"] = json!(check.reason);
    print_json(out);
    Ok(())
}

fn cmd_zeros(a: &ZerosArgs) -> prlb::Result<()> {
    let archive = ZeroArchive::open(&a.zeros)?;
    let mut files = Vec::new();
    for z in archive.sets() {
        let mut entry = json!({
            "file": z.path.as_ref().and_then(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()),
            "modulus": z.modulus,
            "character": z.character,
            "conductor": z.conductor,
            "zeros": z.len(),
            "max_height": z.max_height,
            "source": z.source,
        });
        if a.validate && z.conductor > 1 {
            let rep = validate_zeros(z, a.terms)?;
            let worst = rep.residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
            entry["max_residual"] = json!(worst);
            entry["all_ok"] = json!(rep.all_ok);
        }
        files.push(entry);
    }
    let mut out = json!({
        "root": a.zeros.display().to_string(),
        "manifest": archive.manifest.is_some(),
        "files": files,
    });
    if let Some(k) = a.k {
        out["coverage"] = serde_json::to_value(archive.coverage(&CharacterTable::new(k)?))?;
    }
    print_json(out);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sieve = match cli.threads {
        Some(n) => SieveConfig::default().with_threads(n.max(1)),
        None => SieveConfig::default(),
    };
    let result = match &cli.command {
        Command::Race(a) => cmd_race(a, sieve),
        Command::Kernel(a) => cmd_kernel(a, sieve),
        Command::Density(a) => cmd_density(a, cli.threads),
        Command::Zeros(a) => cmd_zeros(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
