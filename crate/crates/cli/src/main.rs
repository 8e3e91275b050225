mod cache;

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use huffcensus_core::asymptotics::{self, AsymptoticsError};
use huffcensus_core::counting::{self, big_json};
use huffcensus_core::{ReprKind, Representation};

use cache::Cache;

#[derive(Parser, Debug)]
#[command(name = "huffcensus", version, about = "Count canonical t-ary trees and Huffman codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of trees with n inner vertices, or of codes with r words.
    #[command(group(ArgGroup::new("size").required(true).args(["n", "r"])))]
    Count {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Counts for a range of alphabet sizes; column j holds c(j-1).
    Table {
        #[arg(long)]
        t_min: u32,
        #[arg(long)]
        t_max: u32,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Every equivalence class of codes with r words, one per line.
    Enumerate {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        r: u64,
        #[arg(long, default_value = "huffman")]
        repr: ReprKind,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Certified constants of the asymptotic expansion.
    Constants {
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = 15)]
        digits: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Evaluate the large-t closed forms instead of certifying.
        #[arg(long)]
        predict_only: bool,
        #[arg(long, env = "HUFFCENSUS_CACHE")]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare exact counts with the two-term approximation.
    Check {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 15)]
        digits: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Convert instances read from stdin, one per line.
    Convert {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        from: ReprKind,
        #[arg(long)]
        to: ReprKind,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

fn certification(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, error: error.into() }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

impl From<io::Error> for Failure {
    fn from(error: io::Error) -> Self {
        Failure { code: 1, error: error.into() }
    }
}

fn classify(e: AsymptoticsError) -> Failure {
    match e {
        AsymptoticsError::UnsupportedT(_) | AsymptoticsError::PredictionRange(_) | AsymptoticsError::NoDigits => usage(e),
        other => certification(other),
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Count { t, n, r, format } => cmd_count(t, n, r, format),
        Command::Table { t_min, t_max, n_max, format, output } => cmd_table(t_min, t_max, n_max, format, output),
        Command::Enumerate { t, r, repr, limit, format } => cmd_enumerate(t, r, repr, limit, format),
        Command::Constants { t, digits, format, predict_only, cache_dir, no_cache, output } => {
            let cache = if no_cache { None } else { cache_dir.or_else(Cache::default_dir).map(Cache::new) };
            cmd_constants(t, digits, format, predict_only, cache, output)
        }
        Command::Check { t, n_max, digits, format, output } => cmd_check(t, n_max, digits, format, output),
        Command::Convert { t, from, to, format } => cmd_convert(t, from, to, format),
    }
}

fn emit(output: Option<PathBuf>, text: &str) -> CmdResult {
    match output {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn no_csv(format: Format) -> CmdResult {
    if format == Format::Csv {
        return Err(usage(anyhow!("csv output is only available for `table`")));
    }
    Ok(())
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn cmd_count(t: u32, n: Option<usize>, r: Option<u64>, format: Format) -> CmdResult {
    no_csv(format)?;
    let count = match (n, r) {
        (Some(n), None) => counting::count_trees(t, n),
        (None, Some(r)) => counting::count_codes(t, r),
        _ => unreachable!("clap enforces exactly one of --n/--r"),
    }
    .map_err(usage)?;
    let text = match format {
        Format::Json => {
            let (key, size) = if let Some(n) = n { ("n", n as u64) } else { ("r", r.unwrap()) };
            pretty(&json!({ "t": t, key: size, "count": big_json(&count) }))
        }
        _ => format!("{count}\n"),
    };
    emit(None, &text)
}

fn cmd_table(t_min: u32, t_max: u32, n_max: usize, format: Format, output: Option<PathBuf>) -> CmdResult {
    let table = counting::build_table(t_min, t_max, n_max).map_err(usage)?;
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => pretty(&table.to_json()),
        Format::Text => table.to_text(),
    };
    emit(output, &text)
}

fn cmd_enumerate(t: u32, r: u64, repr: ReprKind, limit: Option<usize>, format: Format) -> CmdResult {
    no_csv(format)?;
    let classes = counting::enumerate_classes(t, r, repr).map_err(usage)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for class in classes.take(limit.unwrap_or(usize::MAX)) {
        let line = match format {
            Format::Json => class.to_json().to_string(),
            _ => class.to_text(),
        };
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

fn constants_text(doc: &Value) -> String {
    let mut out = format!("t = {}\n", doc["t"]);
    for key in ["rho", "rho2", "R", "R2", "r3", "R3"] {
        let entry = &doc[key];
        let decimal = entry.get("decimal").or_else(|| entry.get("center")).and_then(Value::as_str).unwrap_or_default();
        match entry.get("half_width") {
            Some(hw) => out.push_str(&format!("{key} = {decimal} ± {}\n", hw.as_str().unwrap_or_default())),
            None => out.push_str(&format!("{key} = {decimal}\n")),
        }
    }
    out
}

fn cmd_constants(
    t: u32,
    digits: u32,
    format: Format,
    predict_only: bool,
    cache: Option<Cache>,
    output: Option<PathBuf>,
) -> CmdResult {
    no_csv(format)?;
    let doc = if predict_only {
        asymptotics::closed_form_predictions(t).map_err(classify)?.to_json(digits)
    } else {
        let params = format!("t={t}\ndigits={digits}");
        match cache.as_ref().and_then(|c| c.load("constants", &params)) {
            Some(doc) => doc,
            None => {
                let doc = asymptotics::constants(t, digits).map_err(classify)?.to_json();
                if let Some(cache) = &cache {
                    // a cache that cannot be written only costs recomputation
                    if let Err(e) = cache.store("constants", &params, &doc) {
                        eprintln!("warning: cache not written: {e}");
                    }
                }
                doc
            }
        }
    };
    let text = match format {
        Format::Json => pretty(&doc),
        _ => constants_text(&doc),
    };
    emit(output, &text)
}

fn cmd_check(t: u32, n_max: usize, digits: u32, format: Format, output: Option<PathBuf>) -> CmdResult {
    no_csv(format)?;
    if n_max == 0 {
        return Err(usage(anyhow!("--n-max must be at least 1")));
    }
    let report = asymptotics::verify_error_bound(t, n_max, digits).map_err(classify)?;
    let text = match format {
        Format::Json => pretty(&report.to_json()),
        _ => report.to_text(),
    };
    emit(output, &text)?;
    if !report.passed() {
        return Err(certification(anyhow!("error envelope exceeded at n = {:?}", report.violations)));
    }
    Ok(())
}

/// A line is either JSON (a full `{"t","kind","data"}` object or a bare data
/// array) or the compact text form.
fn parse_instance(t: u32, from: ReprKind, line: &str) -> anyhow::Result<Representation> {
    let instance = match serde_json::from_str::<Value>(line) {
        Ok(value @ Value::Object(_)) => Representation::from_json(&value)?,
        Ok(value @ Value::Array(_)) => Representation::from_data(t, from, &value)?,
        _ => Representation::from_text(t, from, line)?,
    };
    if instance.kind() != from {
        return Err(anyhow!("expected {from}, got {}", instance.kind()));
    }
    instance.validate()?;
    Ok(instance)
}

fn cmd_convert(t: u32, from: ReprKind, to: ReprKind, format: Format) -> CmdResult {
    no_csv(format)?;
    if t < 2 {
        return Err(usage(anyhow!("t must be at least 2")));
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for (i, line) in io::stdin().lock().lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match parse_instance(t, from, line).and_then(|x| Ok(x.convert(to)?)) {
            Ok(converted) => {
                let text = match format {
                    Format::Json => converted.to_json().to_string(),
                    _ => converted.to_text(),
                };
                writeln!(out, "{text}")?;
            }
            Err(e) => {
                let record = json!({ "line": i + 1, "input": line, "error": e.to_string() });
                eprintln!("{record}");
            }
        }
    }
    out.flush()?;
    Ok(())
}
