use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thornlab::forking::SearchBudget;
use thornlab::report::{execute, recheck, Bounds, Command, Inputs, Report, Request};
use thornlab::Theory;

/// Thorn-forking, þ-ranks and their certificates over EQ, DLO and EREL.
///
/// Every command prints one JSON report. Exit status: 0 when the query was
/// decided, 2 when a search bound left it undecided, 1 on errors or
/// failed suites.
#[derive(Parser, Debug)]
#[command(name = "thornlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Quantifier elimination of --p.
    Qe,
    /// Truth of the sentence --p.
    Holds,
    /// Number of solutions of --p (in --vars, default all free variables).
    Count,
    /// Complete types of --vars over --base.
    Types,
    /// Strong dividing of --delta at parameters --a over --base.
    Sdivides,
    /// þ-dividing of --p (or --delta at --a) over --base.
    Divides,
    /// þ-forking of --p over --base.
    Forks,
    /// þ-independence of --a from --b over --base.
    Indep,
    /// Morley sequences for --p over --base.
    Morley,
    /// Local rank of --p (or of tp(--type-of / --base)) for --delta, --pi, --k.
    Rank,
    /// Uþ-rank of tp(--type-of / --base).
    Uth,
    /// Uþ*-rank of tp(--type-of / --base).
    Uthstar,
    /// Lascar's inequalities for --a, --b over --base.
    Lascar,
    /// Run a verification suite.
    Verify,
    /// Re-verify the certificate in a saved report and re-run it.
    Recheck,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// eq, dlo or erel.
    #[arg(long, global = true)]
    theory: Option<String>,
    /// A formula.
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<String>,
    /// Variables, comma separated, `name` or `name:class`.
    #[arg(long, global = true)]
    vars: Option<String>,
    /// A tuple of literals, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    /// A tuple of literals, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<String>,
    /// Base set of literals, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    base: Option<String>,
    /// Δ formula in x; y (repeatable).
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Vec<String>,
    /// Π formula in y; z (repeatable).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pi: Vec<String>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// A tuple whose type over --base is the subject.
    #[arg(long = "type-of", global = true, allow_hyphen_values = true)]
    type_of: Option<String>,
    /// Morley sequence length.
    #[arg(long, global = true)]
    length: Option<usize>,
    /// Suite name for `verify`.
    #[arg(long, global = true)]
    suite: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    count: Option<usize>,
    #[arg(long = "budget-witness-len", global = true)]
    witness_len: Option<usize>,
    #[arg(long = "budget-disjuncts", global = true)]
    disjuncts: Option<usize>,
    #[arg(long = "pool-depth", global = true)]
    pool_depth: Option<usize>,
    #[arg(long = "k-max", global = true)]
    k_max: Option<usize>,
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Report Unknown instead of No when a search pool is exhausted.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// key=value file with defaults for the bound flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Saved report for `recheck`.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

fn command_of(c: Cmd) -> Command {
    match c {
        Cmd::Qe => Command::Qe,
        Cmd::Holds => Command::Holds,
        Cmd::Count => Command::Count,
        Cmd::Types => Command::Types,
        Cmd::Sdivides => Command::Sdivides,
        Cmd::Divides => Command::Divides,
        Cmd::Forks => Command::Forks,
        Cmd::Indep => Command::Indep,
        Cmd::Morley => Command::Morley,
        Cmd::Rank => Command::Rank,
        Cmd::Uth => Command::Uth,
        Cmd::Uthstar => Command::Uthstar,
        Cmd::Lascar => Command::Lascar,
        Cmd::Verify => Command::Verify,
        Cmd::Recheck => Command::Recheck,
    }
}

const CONFIG_KEYS: [&str; 9] =
    ["budget-witness-len", "budget-disjuncts", "pool-depth", "k-max", "cap", "strict", "jobs", "seed", "count"];

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| format!("{}:{}: expected key=value", path.display(), n + 1))?;
        let key = key.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(format!("{}:{}: unknown key `{key}`", path.display(), n + 1));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn pick<T: std::str::FromStr>(flag: Option<T>, config: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match config.get(key) {
        Some(v) => v.parse().map(Some).map_err(|_| format!("config: bad value `{v}` for {key}")),
        None => Ok(None),
    }
}

fn build_request(cmd: Command, o: Opts) -> Result<Request, String> {
    let config = match &o.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let defaults = SearchBudget::default();
    let strict = o.strict || pick::<bool>(None, &config, "strict")?.unwrap_or(false);
    let budget = SearchBudget {
        witness_len: pick(o.witness_len, &config, "budget-witness-len")?.unwrap_or(defaults.witness_len),
        disjuncts: pick(o.disjuncts, &config, "budget-disjuncts")?.unwrap_or(defaults.disjuncts),
        pool_depth: pick(o.pool_depth, &config, "pool-depth")?.unwrap_or(defaults.pool_depth),
        k_max: pick(o.k_max, &config, "k-max")?.unwrap_or(defaults.k_max),
        strict,
    };
    let theory = o.theory.as_deref().map(str::parse::<Theory>).transpose().map_err(|e| e.to_string())?;
    Ok(Request {
        command: cmd,
        theory,
        inputs: Inputs {
            p: o.p,
            vars: o.vars,
            a: o.a,
            b: o.b,
            base: o.base,
            delta: o.delta,
            pi: o.pi,
            k: o.k,
            type_of: o.type_of,
            length: o.length,
            suite: o.suite,
        },
        bounds: Bounds {
            budget,
            cap: pick(o.cap, &config, "cap")?,
            seed: pick(o.seed, &config, "seed")?,
            count: pick(o.count, &config, "count")?,
        },
        jobs: pick(o.jobs, &config, "jobs")?.unwrap_or(1),
    })
}

fn run(cli: Cli) -> Result<Report, String> {
    let cmd = command_of(cli.command);
    if cmd == Command::Recheck {
        let path = cli.opts.report.ok_or("--report is required")?;
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let report: Report = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        return recheck(&report).map_err(|e| e.to_string());
    }
    let req = build_request(cmd, cli.opts)?;
    execute(&req).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(report) => {
            match serde_json::to_string_pretty(&report) {
                Ok(text) => {
                    // a closed pipe is not an error of ours
                    let _ = writeln!(std::io::stdout().lock(), "{text}");
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
