//! Abscissa estimators from coefficient rules and the strip experiment.
//!
//! All estimators are Bohr–Cahen quotients `log(S_M)/λ_M` fed to the tail
//! limsup estimator. They equal the abscissa in the limit only when the
//! abscissa is nonnegative; negative or unstable estimates are flagged as
//! upper estimates.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{estimate_l, Frequency};
use crate::norms::{norm_sup, SupOptions};
use crate::polynomial::DirichletPolynomial;
use crate::tail::{limsup_estimate, ExtrapolationPolicy, TailEstimate, WindowMax};

/// Smallest horizon accepted by the estimators.
pub const MIN_HORIZON: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RuleKind {
    Constant {
        value: Complex64,
    },
    /// `(-1)^{n+1}`
    Alternating,
    /// Finitely supported; missing indices are zero.
    Table {
        entries: BTreeMap<usize, Complex64>,
    },
}

/// `a_n = base_n · e^{-damping·λ_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRule {
    freq: Arc<Frequency>,
    kind: RuleKind,
    damping: f64,
}

impl CoefficientRule {
    pub fn new(freq: Arc<Frequency>, kind: RuleKind) -> Result<Self> {
        if let RuleKind::Table { entries } = &kind {
            if let Some(&n) = entries.keys().find(|&&n| n == 0 || n > freq.len()) {
                return Err(Error::IndexOutOfRange { index: n, len: freq.len() });
            }
        }
        Ok(CoefficientRule { freq, kind, damping: 0.0 })
    }

    pub fn constant(freq: Arc<Frequency>, value: Complex64) -> Self {
        CoefficientRule { freq, kind: RuleKind::Constant { value }, damping: 0.0 }
    }

    /// `a_n = e^{-cλ_n}`.
    pub fn exponential(freq: Arc<Frequency>, c: f64) -> Self {
        Self::constant(freq, Complex64::new(1.0, 0.0)).damped(c)
    }

    pub fn alternating(freq: Arc<Frequency>) -> Self {
        CoefficientRule { freq, kind: RuleKind::Alternating, damping: 0.0 }
    }

    /// Multiplies every coefficient by `e^{-uλ_n}`.
    pub fn damped(mut self, u: f64) -> Self {
        self.damping += u;
        self
    }

    pub fn frequency(&self) -> &Arc<Frequency> {
        &self.freq
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// Declared horizon: the length of the frequency.
    pub fn horizon(&self) -> usize {
        self.freq.len()
    }

    pub fn is_finitely_supported(&self) -> bool {
        match &self.kind {
            RuleKind::Table { .. } => true,
            RuleKind::Constant { value } => *value == Complex64::new(0.0, 0.0),
            RuleKind::Alternating => false,
        }
    }

    pub fn coefficient(&self, n: usize) -> Complex64 {
        let base = match &self.kind {
            RuleKind::Constant { value } => *value,
            RuleKind::Alternating => Complex64::new(if n % 2 == 1 { 1.0 } else { -1.0 }, 0.0),
            RuleKind::Table { entries } => entries.get(&n).copied().unwrap_or_default(),
        };
        if self.damping == 0.0 {
            base
        } else {
            base * (-self.damping * self.freq.lambda(n)).exp()
        }
    }

    /// Partial sum `Σ_{n≤count} a_n e^{-λ_n s}` as a polynomial.
    pub fn partial_polynomial(&self, count: usize) -> Result<DirichletPolynomial> {
        self.freq.check_count(count)?;
        DirichletPolynomial::from_terms(self.freq.clone(), (1..=count).map(|n| (n, self.coefficient(n))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    SigmaA,
    SigmaC,
    SigmaU,
    LViaSigmaC,
    L,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::SigmaA => "sigma_a",
            Estimator::SigmaC => "sigma_c",
            Estimator::SigmaU => "sigma_u",
            Estimator::LViaSigmaC => "l_via_sigma_c",
            Estimator::L => "l",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbscissaEstimate {
    pub estimator: Estimator,
    pub horizon: usize,
    /// `-∞` for finitely supported or vanishing coefficients.
    pub value: f64,
    pub band: f64,
    /// The value only bounds the abscissa from above.
    pub upper_estimate: bool,
    pub experimental: bool,
    /// Window data; `None` for the `-∞` sentinel.
    pub tail: Option<TailEstimate>,
}

impl AbscissaEstimate {
    fn sentinel(estimator: Estimator, horizon: usize) -> Self {
        AbscissaEstimate {
            estimator,
            horizon,
            value: f64::NEG_INFINITY,
            band: 0.0,
            upper_estimate: false,
            experimental: false,
            tail: None,
        }
    }

    fn from_tail(estimator: Estimator, horizon: usize, tail: TailEstimate) -> Self {
        let upper_estimate = !tail.monotone_tail || tail.value < tail.band;
        AbscissaEstimate {
            estimator,
            horizon,
            value: tail.value,
            band: tail.band,
            upper_estimate,
            experimental: false,
            tail: Some(tail),
        }
    }

    pub fn is_sentinel(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }

    pub fn windows(&self) -> &[WindowMax] {
        self.tail.as_ref().map_or(&[], |t| &t.windows)
    }

    /// `value - band ..= value + band`, or `None` for the sentinel.
    pub fn interval(&self) -> Option<(f64, f64)> {
        (!self.is_sentinel()).then_some((self.value - self.band, self.value + self.band))
    }

    pub fn flags(&self) -> String {
        let mut flags = Vec::new();
        if self.is_sentinel() {
            flags.push("finite_support");
        }
        if self.upper_estimate {
            flags.push("upper_estimate");
        }
        if self.experimental {
            flags.push("experimental");
        }
        if self.tail.as_ref().is_some_and(|t| t.trend_applied) {
            flags.push("trend");
        }
        flags.join("|")
    }

    pub const CSV_HEADER: &'static str = "freq_id,estimator,N,value,band,flags";

    pub fn csv_row(&self, freq_id: &str) -> String {
        format!(
            "{},{},{},{:.10e},{:.3e},{}",
            freq_id,
            self.estimator.as_str(),
            self.horizon,
            self.value,
            self.band,
            self.flags()
        )
    }
}

fn check_horizon(rule: &CoefficientRule, count: usize) -> Result<()> {
    if count < MIN_HORIZON {
        return Err(Error::InvalidArgument(format!("horizon must be at least {MIN_HORIZON}, got {count}")));
    }
    rule.freq.check_count(count)
}

/// Runs the limsup estimator on `log(S_M)/λ_M` for a precomputed
/// sequence `S_1..S_N` (index 0 unused).
fn quotient_estimate(
    estimator: Estimator,
    freq: &Frequency,
    sums: &[f64],
    policy: &ExtrapolationPolicy,
) -> AbscissaEstimate {
    let count = sums.len() - 1;
    match limsup_estimate(count, policy, |m| {
        let lambda = freq.lambda(m);
        (lambda > 0.0 && sums[m] > 0.0).then(|| (lambda, sums[m].ln() / lambda))
    }) {
        Some(tail) => AbscissaEstimate::from_tail(estimator, count, tail),
        None => AbscissaEstimate::sentinel(estimator, count),
    }
}

/// `σ_a ≈ limsup log(Σ_{n≤M} |a_n|)/λ_M`.
pub fn sigma_a_estimate(
    rule: &CoefficientRule,
    count: usize,
    policy: &ExtrapolationPolicy,
) -> Result<AbscissaEstimate> {
    check_horizon(rule, count)?;
    if rule.is_finitely_supported() {
        return Ok(AbscissaEstimate::sentinel(Estimator::SigmaA, count));
    }
    let mut sums = vec![0.0; count + 1];
    for m in 1..=count {
        sums[m] = sums[m - 1] + rule.coefficient(m).norm();
    }
    Ok(quotient_estimate(Estimator::SigmaA, &rule.freq, &sums, policy))
}

/// `σ_c ≈ limsup log|Σ_{n≤M} a_n|/λ_M`.
pub fn sigma_c_estimate(
    rule: &CoefficientRule,
    count: usize,
    policy: &ExtrapolationPolicy,
) -> Result<AbscissaEstimate> {
    check_horizon(rule, count)?;
    if rule.is_finitely_supported() {
        return Ok(AbscissaEstimate::sentinel(Estimator::SigmaC, count));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let sums: Vec<f64> = std::iter::once(0.0)
        .chain((1..=count).map(|m| {
            acc += rule.coefficient(m);
            acc.norm()
        }))
        .collect();
    Ok(quotient_estimate(Estimator::SigmaC, &rule.freq, &sums, policy))
}

/// `L(λ)` from `log(n)/λ_n` over the first `count` terms, as a report row.
pub fn l_estimate(freq: &Frequency, count: usize, policy: &ExtrapolationPolicy) -> Result<AbscissaEstimate> {
    freq.check_count(count)?;
    let tail = estimate_l(&freq.prefix(count)?, policy)?;
    Ok(AbscissaEstimate::from_tail(Estimator::L, count, tail))
}

/// `L(λ)` as the convergence abscissa of `Σ e^{-λ_n s}`, clamped at 0.
pub fn estimate_l_via_sigma_c(
    freq: &Arc<Frequency>,
    count: usize,
    policy: &ExtrapolationPolicy,
) -> Result<AbscissaEstimate> {
    let rule = CoefficientRule::constant(freq.clone(), Complex64::new(1.0, 0.0));
    let mut est = sigma_c_estimate(&rule, count, policy)?;
    est.estimator = Estimator::LViaSigmaC;
    est.value = est.value.max(0.0);
    Ok(est)
}

/// `σ_u ≈ limsup log(sup_t |Σ_{n≤M} a_n e^{-iλ_n t}|)/λ_M` at the window
/// boundaries `N, N/r, N/r², …`. Sup norms beyond the torus limit are
/// line-search lower bounds, so the result is experimental.
pub fn sigma_u_estimate(
    rule: &CoefficientRule,
    count: usize,
    policy: &ExtrapolationPolicy,
    sup: &SupOptions,
) -> Result<AbscissaEstimate> {
    check_horizon(rule, count)?;
    if rule.is_finitely_supported() {
        return Ok(AbscissaEstimate::sentinel(Estimator::SigmaU, count));
    }
    let ratio = if policy.window_ratio > 1.0 { policy.window_ratio } else { 2.0 };
    let mut checkpoints = BTreeMap::new();
    let mut m = count as f64;
    for _ in 0..policy.max_windows.max(1) {
        let idx = m.floor() as usize;
        if idx < 1 {
            break;
        }
        let sup_norm = norm_sup(&rule.partial_polynomial(idx)?, sup)?.value;
        checkpoints.insert(idx, sup_norm);
        m /= ratio;
    }
    let tail = limsup_estimate(count, policy, |n| {
        let lambda = rule.freq.lambda(n);
        let s = *checkpoints.get(&n)?;
        (lambda > 0.0 && s > 0.0).then(|| (lambda, s.ln() / lambda))
    });
    Ok(match tail {
        Some(tail) => {
            let mut est = AbscissaEstimate::from_tail(Estimator::SigmaU, count, tail);
            est.experimental = true;
            est
        }
        None => AbscissaEstimate::sentinel(Estimator::SigmaU, count),
    })
}

/// Outcome of the strip experiment for `a_n = e^{-(L/2+ε)λ_n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripReport {
    pub epsilon: f64,
    pub l_estimate: f64,
    pub l_band: f64,
    /// Set when the experiment did not run.
    pub skipped: Option<String>,
    /// `L/2 + ε`
    pub exponent: f64,
    /// `L/2 - ε`
    pub target: f64,
    pub sigma_a: Option<AbscissaEstimate>,
    /// `Σ |a_n|²` over dyadic windows `(2^j, 2^{j+1}]`, first window first.
    pub square_window_sums: Vec<f64>,
    pub square_sum: f64,
    /// The trailing dyadic window sums decrease geometrically.
    pub square_summable: bool,
}

impl StripReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.skipped.is_none()
            && self.square_summable
            && self.sigma_a.as_ref().is_some_and(|s| (s.value - self.target).abs() <= tolerance)
    }
}

/// `L` below this counts as zero in the strip experiment.
const DEGENERATE_L: f64 = 0.05;

pub fn strip_experiment(
    freq: &Arc<Frequency>,
    epsilon: f64,
    count: usize,
    policy: &ExtrapolationPolicy,
) -> Result<StripReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let l_est = estimate_l(&freq.prefix(count)?, policy)?;
    let l = l_est.value;
    let mut report = StripReport {
        epsilon,
        l_estimate: l,
        l_band: l_est.band,
        skipped: None,
        exponent: l / 2.0 + epsilon,
        target: l / 2.0 - epsilon,
        sigma_a: None,
        square_window_sums: Vec::new(),
        square_sum: 0.0,
        square_summable: false,
    };
    if l < DEGENERATE_L {
        report.skipped = Some(format!("L estimate {l:.4} is degenerate"));
        return Ok(report);
    }
    if epsilon >= l / 2.0 {
        report.skipped = Some(format!("epsilon {epsilon} is not below L/2 = {:.4}", l / 2.0));
        return Ok(report);
    }
    let rule = CoefficientRule::exponential(freq.clone(), report.exponent);
    let mut windows = Vec::new();
    let mut lo = 0usize;
    let mut hi = 1usize;
    while lo < count {
        let top = hi.min(count);
        windows.push((lo + 1..=top).map(|n| rule.coefficient(n).norm_sqr()).sum::<f64>());
        lo = top;
        hi *= 2;
    }
    // drop a short final window
    if !count.is_power_of_two() && windows.len() > 1 {
        windows.pop();
    }
    let trailing: Vec<f64> = windows.iter().rev().take(4).copied().collect();
    report.square_summable = trailing.len() >= 3 && trailing.windows(2).all(|w| w[0] < w[1]);
    report.square_sum = (1..=count).map(|n| rule.coefficient(n).norm_sqr()).sum();
    report.square_window_sums = windows;
    report.sigma_a = Some(sigma_a_estimate(&rule, count, policy)?);
    Ok(report)
}
