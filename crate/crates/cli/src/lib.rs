//! Job specs and dispatch for the `hpd` batch front end.
//!
//! A job is a command, input files, per-command options and an output
//! path. Jobs come from a spec file, from command-line flags, or both;
//! flags win over the file and the file wins over built-in defaults.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hpdirichlet::abscissa::{
    estimate_l_via_sigma_c, l_estimate, sigma_a_estimate, sigma_c_estimate, sigma_u_estimate, AbscissaEstimate,
    CoefficientRule,
};
use hpdirichlet::frequency::{check_bc, check_lc, FamilyTag, Frequency};
use hpdirichlet::io::{FrequencySpec, SeriesSpec, TermSpec};
use hpdirichlet::lattice::{classify_prefix_type, extract_basis, lattice_from_decomposition};
use hpdirichlet::norms::{
    default_schedule, lift, norm2, norm_besicovitch, norm_even_exact, norm_periodic, norm_sup, norm_torus, LiftBasis,
    NormEstimate, NormMethod, SupOptions,
};
use hpdirichlet::polynomial::DirichletPolynomial;
use hpdirichlet::rational::format_rational;
use hpdirichlet::tail::ExtrapolationPolicy;
use hpdirichlet::verify::{run_suite, SUITE_NAMES};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_P: &str = "2";
pub const DEFAULT_METHODS: &str = "auto";
pub const DEFAULT_HEAD: usize = 8;
pub const DEFAULT_DECOMPOSE: usize = 256;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_RULE: &str = "constant";
pub const DEFAULT_ESTIMATORS: &str = "sigma_a,sigma_c,l,l_via_sigma_c";
pub const DEFAULT_TRIALS: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hpdirichlet::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Spec(String),
    #[error("suite failure: {}", .0.join(", "))]
    SuiteFailed(Vec<String>),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(hpdirichlet::Error::Parse(_)) => "parse",
            CliError::Core(hpdirichlet::Error::Invariant(_)) => "invariant",
            CliError::Core(_) => "invalid_input",
            CliError::Io { .. } => "io",
            CliError::Spec(_) => "spec",
            CliError::SuiteFailed(_) => "suite_failure",
        }
    }

    /// One JSON object for standard error.
    pub fn json_line(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SuiteFailed(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn spec_err(msg: impl Into<String>) -> CliError {
    CliError::Spec(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    FreqAnalyze,
    Norm,
    Abscissa,
    Lift,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::FreqAnalyze => "freq-analyze",
            Command::Norm => "norm",
            Command::Abscissa => "abscissa",
            Command::Lift => "lift",
            Command::Verify => "verify",
        }
    }

    fn allowed_options(self) -> &'static [&'static str] {
        match self {
            Command::FreqAnalyze => &["frequency", "family", "count", "head", "decompose", "delta"],
            Command::Norm => &["frequency", "family", "count", "terms", "p", "methods", "id"],
            Command::Abscissa => &["frequency", "family", "count", "rule", "value", "damping", "horizon", "estimators"],
            Command::Lift => &["frequency", "family", "count", "terms", "id"],
            Command::Verify => &["suites", "trials"],
        }
    }

    fn takes_inputs(self) -> bool {
        !matches!(self, Command::Verify)
    }
}

/// Per-command options. Keys a command does not use are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Inline frequency description.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<FrequencySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Inline terms `n:re[:im]`, comma separated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    /// Exponents, comma separated; `inf` selects the sup norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decompose: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimators: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

impl Options {
    fn keys(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(Value::Object(map)) => map.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Field-wise overlay: values set in `top` replace those in `self`.
    fn overlay(self, top: Options) -> Options {
        macro_rules! pick {
            ($($f:ident),*) => { Options { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            frequency, family, count, terms, id, p, methods, head, decompose, delta, rule, value, damping, horizon,
            estimators, suites, trials
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Frequency specs (`freq-analyze`, `abscissa`) or series specs
    /// (`norm`, `lift`). Relative paths resolve against the spec file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Reads JSON, or TOML when the extension is `.toml`.
pub fn read_structured<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let parsed = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Core(hpdirichlet::Error::Parse(format!("{}: {e}", path.display()))))
}

fn resolve(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

impl JobSpec {
    /// Loads a spec file; relative input paths become relative to it.
    pub fn load(path: &Path) -> Result<Self> {
        let mut spec: JobSpec = read_structured(path)?;
        let dir = path.parent();
        spec.inputs = spec.inputs.iter().map(|p| resolve(dir, p)).collect();
        Ok(spec)
    }

    /// `top` (usually built from flags) wins field by field.
    pub fn overlay(self, top: JobSpec) -> JobSpec {
        JobSpec {
            command: top.command.or(self.command),
            inputs: if top.inputs.is_empty() { self.inputs } else { top.inputs },
            options: self.options.overlay(top.options),
            output: top.output.or(self.output),
            seed: top.seed.or(self.seed),
            threads: top.threads.or(self.threads),
            tolerance: top.tolerance.or(self.tolerance),
        }
    }

    pub fn validate(&self) -> Result<Command> {
        let command = self.command.ok_or_else(|| spec_err("no command given"))?;
        let allowed: BTreeSet<&str> = command.allowed_options().iter().copied().collect();
        if let Some(bad) = self.options.keys().into_iter().find(|k| !allowed.contains(k.as_str())) {
            return Err(spec_err(format!("option `{bad}` does not apply to `{}`", command.as_str())));
        }
        if !command.takes_inputs() && !self.inputs.is_empty() {
            return Err(spec_err(format!("`{}` takes no input files", command.as_str())));
        }
        if self.tolerance.is_some() && command != Command::Verify {
            return Err(spec_err("`tolerance` only applies to `verify`"));
        }
        if let Some(missing) = self.inputs.iter().find(|p| !p.is_file()) {
            return Err(spec_err(format!("input file {} does not exist", missing.display())));
        }
        if self.threads == Some(0) {
            return Err(spec_err("`threads` must be positive"));
        }
        Ok(command)
    }
}

/// Text produced by a job: the main artifact and summary lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JobOutput {
    /// Written to the output path, or standard output without one.
    pub artifact: String,
    /// Extra files written next to the artifact (`verify` with several suites).
    pub files: Vec<(String, String)>,
    /// Lines for standard output.
    pub summary: Vec<String>,
    /// Names of failed suites.
    pub failed: Vec<String>,
}

/// Runs a validated job and returns its output without touching files.
pub fn run(spec: &JobSpec) -> Result<JobOutput> {
    let command = spec.validate()?;
    match command {
        Command::FreqAnalyze => freq_analyze(spec),
        Command::Norm => norm(spec),
        Command::Abscissa => abscissa(spec),
        Command::Lift => lift_job(spec),
        Command::Verify => verify(spec),
    }
}

/// Runs the job and writes artifacts to the output path, if any. Suite
/// failures are reported in [`JobOutput::failed`].
pub fn execute(spec: &JobSpec) -> Result<JobOutput> {
    let out = run(spec)?;
    if let Some(path) = &spec.output {
        if out.files.is_empty() {
            write_file(path, &out.artifact)?;
        } else {
            fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            for (name, body) in &out.files {
                write_file(&path.join(name), body)?;
            }
        }
    }
    Ok(out)
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn inline_frequency(opts: &Options) -> Result<Option<FrequencySpec>> {
    match (&opts.frequency, opts.family) {
        (Some(_), Some(_)) => Err(spec_err("give either `frequency` or `family`, not both")),
        (Some(f), None) => {
            let mut f = f.clone();
            if opts.count.is_some() {
                f.count = opts.count;
            }
            Ok(Some(f))
        }
        (None, Some(tag)) => {
            let count = opts.count.ok_or_else(|| spec_err("`family` needs `count`"))?;
            Ok(Some(FrequencySpec::family(tag, count)))
        }
        (None, None) => Ok(None),
    }
}

/// The frequency of `freq-analyze` and `abscissa`: one input file or an
/// inline description.
fn job_frequency(spec: &JobSpec) -> Result<(String, Frequency)> {
    let inline = inline_frequency(&spec.options)?;
    match (spec.inputs.as_slice(), inline) {
        ([], Some(f)) => Ok((frequency_id(&f), f.build()?)),
        ([path], None) => {
            let mut f: FrequencySpec = read_structured(path)?;
            if spec.options.count.is_some() {
                f.count = spec.options.count;
            }
            let id = path.file_stem().map_or_else(|| frequency_id(&f), |s| s.to_string_lossy().into_owned());
            Ok((id, f.build()?))
        }
        ([], None) => Err(spec_err("no frequency: give an input file or `family` and `count`")),
        _ => Err(spec_err("expected exactly one frequency source")),
    }
}

fn frequency_id(f: &FrequencySpec) -> String {
    match (f.family, f.count) {
        (Some(tag), Some(n)) => format!("{tag}{n}"),
        (Some(tag), None) => tag.to_string(),
        _ => "custom".to_string(),
    }
}

fn parse_terms(text: &str) -> Result<Vec<TermSpec>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let parts: Vec<&str> = t.trim().split(':').collect();
            let bad = || CliError::Core(hpdirichlet::Error::Parse(format!("bad term `{t}`, expected n:re[:im]")));
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
            match parts.as_slice() {
                [n, re] => Ok(TermSpec { n: n.trim().parse().map_err(|_| bad())?, re: num(re)?, im: 0.0 }),
                [n, re, im] => Ok(TermSpec { n: n.trim().parse().map_err(|_| bad())?, re: num(re)?, im: num(im)? }),
                _ => Err(bad()),
            }
        })
        .collect()
}

/// Polynomials of `norm` and `lift`: series files or one inline series.
fn job_series(spec: &JobSpec) -> Result<Vec<(String, DirichletPolynomial)>> {
    let opts = &spec.options;
    if !spec.inputs.is_empty() {
        if opts.terms.is_some() || opts.frequency.is_some() || opts.family.is_some() || opts.id.is_some() {
            return Err(spec_err("inline series options cannot be combined with input files"));
        }
        return spec.inputs.iter().map(|path| load_series(path)).collect();
    }
    let terms = opts.terms.as_deref().ok_or_else(|| spec_err("no series: give input files or `terms`"))?;
    let freq = inline_frequency(opts)?.ok_or_else(|| spec_err("inline `terms` need `family` and `count`"))?;
    let series = SeriesSpec { terms: parse_terms(terms)?, ..SeriesSpec::default() };
    let d = series.build_on(Arc::new(freq.build()?))?;
    Ok(vec![(opts.id.clone().unwrap_or_else(|| "inline".to_string()), d)])
}

fn load_series(path: &Path) -> Result<(String, DirichletPolynomial)> {
    let series: SeriesSpec = read_structured(path)?;
    let freq = match (&series.frequency, &series.frequency_ref) {
        (Some(f), None) => f.build()?,
        (None, Some(r)) => {
            let fpath = resolve(path.parent(), Path::new(r));
            if !fpath.is_file() {
                return Err(spec_err(format!("frequency_ref {} does not exist", fpath.display())));
            }
            read_structured::<FrequencySpec>(&fpath)?.build()?
        }
        _ => return Err(spec_err(format!("{}: give exactly one of `frequency` and `frequency_ref`", path.display()))),
    };
    let id = series
        .id
        .clone()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "series".to_string());
    Ok((id, series.build_on(Arc::new(freq))?))
}

fn freq_analyze(spec: &JobSpec) -> Result<JobOutput> {
    let opts = &spec.options;
    let (id, freq) = job_frequency(spec)?;
    let head = opts.head.unwrap_or(DEFAULT_HEAD);
    let m = opts.decompose.unwrap_or(DEFAULT_DECOMPOSE).min(freq.len());
    let delta = opts.delta.unwrap_or(DEFAULT_DELTA);
    if m == 0 {
        return Err(spec_err("`decompose` must be positive"));
    }
    let dec = extract_basis(&freq, m)?;
    let lat = lattice_from_decomposition(&freq, &dec)?;
    let class = classify_prefix_type(&dec);
    let width = freq.symbols().len();
    let rows = |rs: &[hpdirichlet::rational::RationalRow], w: usize| -> Vec<Vec<String>> {
        rs.iter().map(|r| r.to_strings(w)).collect()
    };

    let policy = ExtrapolationPolicy::default();
    let l = l_estimate(&freq, freq.len(), &policy).ok();
    let l_value = l.as_ref().map_or(0.0, |e| e.value);
    let gap_count = freq.len().min(1_000_000);
    let report = json!({
        "id": id,
        "family": freq.family_tag(),
        "count": freq.len(),
        "symbols": freq.symbols().iter().map(|s| json!({ "name": s.name, "value": s.value.to_f64(), "class": s.class })).collect::<Vec<_>>(),
        "decomposed_prefix": m,
        "basis": {
            "indices": dec.basis_indices,
            "rows": rows(&dec.basis_rows, width),
        },
        "bohr_matrix_head": rows(&dec.matrix[..head.min(m)], dec.basis_len()),
        "lattice": {
            "rank": lat.rank(),
            "generators": rows(&lat.generators, width),
            "generator_values": lat.generator_values,
        },
        "type": {
            "kind": class.kind.as_str(),
            "prefix_only": class.prefix_only,
            "witness_basis": class.witness_basis.as_ref().map(|w| rows(w, dec.basis_len())),
        },
        "l": l.as_ref().map(|e| json!({ "value": e.value, "band": e.band, "flags": e.flags() })),
        "bc": check_bc(&freq, l_value, delta, gap_count).ok(),
        "lc": check_lc(&freq, delta, gap_count).ok(),
        "delta": delta,
    });
    let mut artifact = serde_json::to_string_pretty(&report).map_err(|e| spec_err(e.to_string()))?;
    artifact.push('\n');
    Ok(JobOutput { artifact, ..JobOutput::default() })
}

fn parse_p_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| match t.trim() {
            "inf" | "infinity" => Ok(f64::INFINITY),
            s => match s.parse::<f64>() {
                Ok(p) if p >= 1.0 => Ok(p),
                _ => Err(spec_err(format!("bad exponent `{s}`, expected p >= 1 or inf"))),
            },
        })
        .collect()
}

fn even_integer(p: f64) -> Option<u32> {
    (p.fract() == 0.0 && p >= 2.0 && p % 2.0 == 0.0 && p <= 64.0).then_some(p as u32)
}

fn norm_with(d: &DirichletPolynomial, p: f64, method: Option<NormMethod>) -> Result<NormEstimate> {
    let wrong = |m: NormMethod| spec_err(format!("method `{m}` does not compute p = {p}"));
    if p.is_infinite() {
        return match method {
            None | Some(NormMethod::TorusGrid | NormMethod::PeriodicExact | NormMethod::LineSearch) => {
                let strategy = match method {
                    Some(NormMethod::TorusGrid) => hpdirichlet::norms::SupStrategy::Torus,
                    Some(NormMethod::PeriodicExact) => hpdirichlet::norms::SupStrategy::Periodic,
                    Some(NormMethod::LineSearch) => hpdirichlet::norms::SupStrategy::LineSearch,
                    _ => hpdirichlet::norms::SupStrategy::Auto,
                };
                Ok(norm_sup(d, &SupOptions { strategy, ..SupOptions::default() })?)
            }
            Some(m) => Err(wrong(m)),
        };
    }
    let method = method.unwrap_or(if p == 2.0 {
        NormMethod::Parseval
    } else if even_integer(p).is_some() {
        NormMethod::EvenExact
    } else {
        NormMethod::BesicovitchQuadrature
    });
    Ok(match method {
        NormMethod::Parseval if p == 2.0 => norm2(d),
        NormMethod::EvenExact => norm_even_exact(d, even_integer(p).ok_or_else(|| wrong(method))?)?,
        NormMethod::BesicovitchQuadrature => norm_besicovitch(d, p, &default_schedule(d))?,
        NormMethod::PeriodicExact => norm_periodic(d, p)?,
        NormMethod::TorusGrid => {
            let dec = extract_basis(d.frequency(), d.max_index().max(1))?;
            norm_torus(d, p, &dec, None)?
        }
        m => return Err(wrong(m)),
    })
}

fn norm(spec: &JobSpec) -> Result<JobOutput> {
    let opts = &spec.options;
    let ps = parse_p_list(opts.p.as_deref().unwrap_or(DEFAULT_P))?;
    let methods: Vec<Option<NormMethod>> = opts
        .methods
        .as_deref()
        .unwrap_or(DEFAULT_METHODS)
        .split(',')
        .map(|m| match m.trim() {
            "auto" => Ok(None),
            other => other.parse().map(Some).map_err(CliError::Core),
        })
        .collect::<Result<_>>()?;
    let mut artifact = format!("{}\n", NormEstimate::CSV_HEADER);
    for (id, d) in job_series(spec)? {
        for &p in &ps {
            for &m in &methods {
                let est = norm_with(&d, p, m)?;
                writeln!(artifact, "{}", est.csv_row(&id, p)).expect("write to string");
            }
        }
    }
    Ok(JobOutput { artifact, ..JobOutput::default() })
}

fn coefficient_rule(opts: &Options, freq: Arc<Frequency>) -> Result<CoefficientRule> {
    let value = opts.value;
    let rule = match opts.rule.as_deref().unwrap_or(DEFAULT_RULE) {
        "constant" => CoefficientRule::constant(freq, Complex64::new(value.unwrap_or(1.0), 0.0)),
        "alternating" if value.is_none() => CoefficientRule::alternating(freq),
        "exponential" => {
            CoefficientRule::exponential(freq, value.ok_or_else(|| spec_err("`exponential` needs `value`"))?)
        }
        "alternating" => return Err(spec_err("`alternating` takes no `value`")),
        other => {
            return Err(spec_err(format!("unknown rule `{other}`; expected constant, alternating or exponential")))
        }
    };
    Ok(rule.damped(opts.damping.unwrap_or(0.0)))
}

fn abscissa(spec: &JobSpec) -> Result<JobOutput> {
    let opts = &spec.options;
    let (id, freq) = job_frequency(spec)?;
    let freq = Arc::new(freq);
    let horizon = opts.horizon.unwrap_or(freq.len());
    let rule = coefficient_rule(opts, freq.clone())?;
    let policy = ExtrapolationPolicy::default();
    let mut artifact = format!("{}\n", AbscissaEstimate::CSV_HEADER);
    for name in opts.estimators.as_deref().unwrap_or(DEFAULT_ESTIMATORS).split(',') {
        let est = match name.trim() {
            "sigma_a" => sigma_a_estimate(&rule, horizon, &policy)?,
            "sigma_c" => sigma_c_estimate(&rule, horizon, &policy)?,
            "sigma_u" => sigma_u_estimate(&rule, horizon, &policy, &SupOptions::default())?,
            "l" => l_estimate(&freq, horizon, &policy)?,
            "l_via_sigma_c" => estimate_l_via_sigma_c(&freq, horizon, &policy)?,
            other => return Err(spec_err(format!("unknown estimator `{other}`"))),
        };
        writeln!(artifact, "{}", est.csv_row(&id)).expect("write to string");
    }
    Ok(JobOutput { artifact, ..JobOutput::default() })
}

fn lift_job(spec: &JobSpec) -> Result<JobOutput> {
    let mut docs = Vec::new();
    for (id, d) in job_series(spec)? {
        let dec = extract_basis(d.frequency(), d.max_index().max(1))?;
        let tp = lift(&d, &dec)?;
        let names: Vec<String> = dec.basis_rows.iter().map(|r| symbol_expr(d.frequency(), r)).collect();
        let (basis, gens) = match &tp.basis {
            LiftBasis::Bohr => ("bohr", None),
            LiftBasis::Rescaled(g) => {
                ("rescaled", Some(g.iter().map(|r| r.to_strings(dec.basis_len())).collect::<Vec<_>>()))
            }
        };
        let natural = tp.exponents.iter().flatten().all(|&e| e >= 0);
        let embedding = if natural { tp.ordinary_embedding() } else { None };
        let terms: Vec<Value> = tp
            .indices
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let mut t = json!({
                    "n": n,
                    "exponents": tp.exponents[i],
                    "re": tp.coeffs[i].re,
                    "im": tp.coeffs[i].im,
                });
                if let Some(e) = &embedding {
                    t["ordinary_index"] = json!(e[i].to_string());
                }
                t
            })
            .collect();
        docs.push(json!({
            "id": id,
            "basis": basis,
            "basis_elements": names,
            "columns": tp.columns,
            "rescaled_generators": gens,
            "natural": natural,
            "terms": terms,
        }));
    }
    let doc = if docs.len() == 1 { docs.pop().expect("one document") } else { Value::Array(docs) };
    let mut artifact = serde_json::to_string_pretty(&doc).map_err(|e| spec_err(e.to_string()))?;
    artifact.push('\n');
    Ok(JobOutput { artifact, ..JobOutput::default() })
}

/// A basis element as a rational combination of symbol names.
fn symbol_expr(freq: &Frequency, row: &hpdirichlet::rational::RationalRow) -> String {
    if row.is_zero() {
        return "0".to_string();
    }
    row.entries()
        .iter()
        .map(|(c, q)| {
            let name = &freq.symbols()[*c].name;
            if q.is_integer() && q.numer() == &1.into() {
                name.clone()
            } else {
                format!("{}*{name}", format_rational(q))
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

fn verify(spec: &JobSpec) -> Result<JobOutput> {
    let opts = &spec.options;
    let seed = spec.seed.unwrap_or(DEFAULT_SEED);
    let trials = opts.trials.unwrap_or(DEFAULT_TRIALS);
    let names: Vec<&str> = match opts.suites.as_deref() {
        None | Some("all") => SUITE_NAMES.to_vec(),
        Some(list) => list.split(',').map(str::trim).collect(),
    };
    if let Some(bad) = names.iter().find(|n| !SUITE_NAMES.contains(n)) {
        return Err(spec_err(format!("unknown suite `{bad}`; expected one of {}", SUITE_NAMES.join(", "))));
    }
    let mut out = JobOutput::default();
    for name in &names {
        let mut report = run_suite(name, seed, trials)?;
        if let Some(tol) = spec.tolerance {
            report = report.with_tolerance(tol);
        }
        let csv = report.csv();
        if names.len() == 1 {
            out.artifact = csv;
        } else {
            out.files.push((format!("{name}.csv"), csv));
        }
        out.summary.push(report.summary());
        if !report.pass {
            out.failed.push(name.to_string());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(command: Command, options: Options) -> JobSpec {
        JobSpec { command: Some(command), options, ..JobSpec::default() }
    }

    #[test]
    fn flags_override_spec_fieldwise() {
        let file = JobSpec {
            command: Some(Command::Norm),
            seed: Some(3),
            options: Options { p: Some("4".into()), terms: Some("1:1".into()), ..Options::default() },
            ..JobSpec::default()
        };
        let flags = JobSpec {
            seed: Some(9),
            options: Options { p: Some("2".into()), ..Options::default() },
            ..JobSpec::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.command, Some(Command::Norm));
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.options.p.as_deref(), Some("2"));
        assert_eq!(merged.options.terms.as_deref(), Some("1:1"));
    }

    #[test]
    fn options_are_checked_per_command() {
        let bad = job(Command::Verify, Options { p: Some("2".into()), ..Options::default() });
        assert!(matches!(bad.validate(), Err(CliError::Spec(_))));
        let tol = JobSpec { tolerance: Some(1.0), ..job(Command::Norm, Options::default()) };
        assert!(tol.validate().is_err());
        let missing = JobSpec { inputs: vec!["/nonexistent/x.json".into()], ..job(Command::Lift, Options::default()) };
        assert!(missing.validate().is_err());
    }

    #[test]
    fn inline_norm_rows() {
        let spec = job(
            Command::Norm,
            Options {
                family: Some(FamilyTag::Linear),
                count: Some(2),
                terms: Some("1:1,2:1".into()),
                p: Some("2,4,inf".into()),
                ..Options::default()
            },
        );
        let out = run(&spec).unwrap();
        let lines: Vec<&str> = out.artifact.lines().collect();
        assert_eq!(lines[0], NormEstimate::CSV_HEADER);
        let value = |l: &str| l.split(',').nth(3).unwrap().parse::<f64>().unwrap();
        assert!(lines[1].starts_with("inline,2,parseval,"));
        assert!((value(lines[1]) - 2f64.sqrt()).abs() < 1e-15);
        assert!((value(lines[2]) - 6f64.powf(0.25)).abs() < 1e-14);
        assert!((value(lines[3]) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn method_and_exponent_mismatch() {
        let base = Options {
            family: Some(FamilyTag::Linear),
            count: Some(2),
            terms: Some("1:1".into()),
            ..Options::default()
        };
        let spec =
            job(Command::Norm, Options { p: Some("3".into()), methods: Some("even_exact".into()), ..base.clone() });
        assert!(run(&spec).is_err());
        let spec = job(Command::Norm, Options { p: Some("0.5".into()), ..base });
        assert!(run(&spec).is_err());
    }

    #[test]
    fn term_parsing() {
        let t = parse_terms("1:1, 3:0.5:-2").unwrap();
        assert_eq!(t[1], TermSpec { n: 3, re: 0.5, im: -2.0 });
        assert!(parse_terms("1").is_err());
        assert!(parse_terms("a:1").is_err());
    }

    #[test]
    fn error_lines_are_json() {
        let e = spec_err("oops");
        let v: Value = serde_json::from_str(&e.json_line()).unwrap();
        assert_eq!(v["error"], "spec");
        assert_eq!(v["message"], "oops");
        assert_eq!(CliError::SuiteFailed(vec!["x".into()]).exit_code(), 2);
    }

    #[test]
    fn abscissa_rows_on_ordinary() {
        let spec = job(
            Command::Abscissa,
            Options {
                family: Some(FamilyTag::Ordinary),
                count: Some(4000),
                estimators: Some("sigma_a,l".into()),
                ..Options::default()
            },
        );
        let out = run(&spec).unwrap();
        let lines: Vec<&str> = out.artifact.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("ordinary4000,sigma_a,4000,"));
        assert!(lines[2].starts_with("ordinary4000,l,4000,"));
    }
}
