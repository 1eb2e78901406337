use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hpdirichlet::frequency::FamilyTag;
use hpdirichlet_cli::{execute, CliError, Command, JobSpec, Options};

/// Batch computations on Dirichlet polynomials and frequencies.
///
/// Jobs can be described in a spec file (JSON, or TOML by extension) with
/// fields `command`, `inputs`, `options`, `output`, `seed`, `threads` and
/// `tolerance`. Flags override the spec file, which overrides defaults.
#[derive(Parser, Debug)]
#[command(name = "hpd", version)]
struct Cli {
    /// Job spec file
    #[arg(long, global = true, value_name = "PATH")]
    spec: Option<PathBuf>,
    /// Random seed for suites [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (a directory for several suites) [default: stdout]
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override the suite tolerance (verify only)
    #[arg(long, global = true, allow_hyphen_values = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Bohr basis, lattice, type classification and gap report (JSON)
    FreqAnalyze(FrequencyArgs),
    /// Norm estimates as CSV rows
    Norm(SeriesArgs),
    /// Abscissa estimates as CSV rows
    Abscissa(AbscissaArgs),
    /// Torus lift with the ordinary index map for natural type (JSON)
    Lift(SeriesArgs),
    /// Run verification suites; writes CSV and prints PASS/FAIL lines
    Verify(VerifyArgs),
    /// Run the job described by --spec
    Run,
}

#[derive(Args, Debug, Default)]
struct FamilyArgs {
    /// Built-in family: ordinary, linear, padic_example, qli
    #[arg(long)]
    family: Option<FamilyTag>,
    /// Number of frequency terms
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args, Debug)]
struct FrequencyArgs {
    /// Frequency spec file
    input: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Bohr matrix rows to print [default: 8]
    #[arg(long)]
    head: Option<usize>,
    /// Prefix length to decompose [default: 256]
    #[arg(long)]
    decompose: Option<usize>,
    /// Slack in the gap conditions [default: 0.1]
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    /// Series spec files
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Inline terms `n:re[:im]`, comma separated
    #[arg(long)]
    terms: Option<String>,
    /// Series id for inline terms [default: inline]
    #[arg(long)]
    id: Option<String>,
    /// Exponents, comma separated; `inf` for the sup norm [default: 2]
    #[arg(long)]
    p: Option<String>,
    /// Methods, comma separated: auto, parseval, even_exact, besicovitch,
    /// periodic, torus, line_search [default: auto]
    #[arg(long)]
    methods: Option<String>,
}

#[derive(Args, Debug)]
struct AbscissaArgs {
    /// Frequency spec file
    input: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Coefficient rule: constant, alternating, exponential [default: constant]
    #[arg(long)]
    rule: Option<String>,
    /// Constant value or exponential rate [default: 1 for constant]
    #[arg(long, allow_hyphen_values = true)]
    value: Option<f64>,
    /// Extra factor e^{-u λ_n} [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    damping: Option<f64>,
    /// Terms used [default: frequency length]
    #[arg(long)]
    horizon: Option<usize>,
    /// Estimators: sigma_a, sigma_c, sigma_u, l, l_via_sigma_c
    /// [default: sigma_a,sigma_c,l,l_via_sigma_c]
    #[arg(long)]
    estimators: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suites, comma separated, or `all` [default: all]
    #[arg(long)]
    suites: Option<String>,
    /// Trials per suite [default: 5]
    #[arg(long)]
    trials: Option<usize>,
}

fn flag_job(cli: Cli) -> JobSpec {
    let fam = |f: FamilyArgs| Options { family: f.family, count: f.count, ..Options::default() };
    let (command, inputs, options) = match cli.command {
        Sub::FreqAnalyze(a) => (
            Some(Command::FreqAnalyze),
            a.input.into_iter().collect(),
            Options { head: a.head, decompose: a.decompose, delta: a.delta, ..fam(a.family) },
        ),
        Sub::Norm(a) => (
            Some(Command::Norm),
            a.inputs,
            Options { terms: a.terms, id: a.id, p: a.p, methods: a.methods, ..fam(a.family) },
        ),
        // lift rejects --p and --methods during validation
        Sub::Lift(a) => (
            Some(Command::Lift),
            a.inputs,
            Options { terms: a.terms, id: a.id, p: a.p, methods: a.methods, ..fam(a.family) },
        ),
        Sub::Abscissa(a) => (
            Some(Command::Abscissa),
            a.input.into_iter().collect(),
            Options {
                rule: a.rule,
                value: a.value,
                damping: a.damping,
                horizon: a.horizon,
                estimators: a.estimators,
                ..fam(a.family)
            },
        ),
        Sub::Verify(a) => {
            (Some(Command::Verify), Vec::new(), Options { suites: a.suites, trials: a.trials, ..Options::default() })
        }
        Sub::Run => (None, Vec::new(), Options::default()),
    };
    JobSpec {
        command,
        inputs,
        options,
        output: cli.out,
        seed: cli.seed,
        threads: cli.threads,
        tolerance: cli.tolerance,
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let spec_path = cli.spec.clone();
    let is_run = matches!(cli.command, Sub::Run);
    let flags = flag_job(cli);
    let job = match &spec_path {
        Some(path) => {
            let file = JobSpec::load(path)?;
            if let (Some(a), Some(b)) = (file.command, flags.command) {
                if a != b {
                    return Err(CliError::Spec(format!("spec file is for `{}`, not `{}`", a.as_str(), b.as_str())));
                }
            }
            file.overlay(flags)
        }
        None if is_run => return Err(CliError::Spec("`run` needs --spec".into())),
        None => flags,
    };
    if let Some(n) = job.threads.filter(|&n| n > 0) {
        // the pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = execute(&job)?;
    let mut stdout = std::io::stdout().lock();
    if job.output.is_none() {
        let _ = stdout.write_all(out.artifact.as_bytes());
    }
    for line in &out.summary {
        let _ = writeln!(stdout, "{line}");
    }
    if out.failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SuiteFailed(out.failed))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let message = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", serde_json::json!({ "error": "usage", "message": message }));
            return ExitCode::from(1);
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
