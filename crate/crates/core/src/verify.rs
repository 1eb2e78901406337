//! Property suites over random polynomials.
//!
//! Each suite reports the largest deviation from the asserted identity or
//! inequality together with the tolerance it is held to, and one CSV row per
//! case. Everything is deterministic in the seed.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::Character;
use crate::error::{Error, Result};
use crate::frequency::{FamilyTag, Frequency};
use crate::lattice::{extract_basis, lattice_basis};
use crate::norms::{gauss_legendre, norm2, norm_besicovitch, norm_even_exact, norm_sup, scaled_schedule, SupOptions};
use crate::polynomial::DirichletPolynomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub header: String,
    pub rows: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str, header: &str, tolerance: f64) -> Self {
        SuiteReport {
            name: name.to_string(),
            cases: 0,
            max_deviation: 0.0,
            tolerance,
            pass: true,
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    fn record(&mut self, deviation: f64, row: String) {
        self.cases += 1;
        // NaN counts as a failure
        if !(deviation <= self.max_deviation) {
            self.max_deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
        self.rows.push(row);
    }

    fn finish(mut self) -> Self {
        self.pass = self.max_deviation <= self.tolerance;
        self
    }

    /// Same report judged against another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.finish()
    }

    /// Header and rows, LF-terminated.
    pub fn csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {} cases={} max_deviation={:.3e} tolerance={:.3e}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.cases,
            self.max_deviation,
            self.tolerance
        )
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

/// A named frequency used by the suites.
#[derive(Clone, Debug)]
pub struct NamedFrequency {
    pub name: String,
    pub freq: Arc<Frequency>,
}

impl NamedFrequency {
    pub fn new(name: impl Into<String>, freq: Frequency) -> Self {
        NamedFrequency { name: name.into(), freq: Arc::new(freq) }
    }
}

/// One prefix of every built-in family, short enough that every sup norm
/// stays on a torus of at most four dimensions.
pub fn default_families() -> Vec<NamedFrequency> {
    [(FamilyTag::Ordinary, 10), (FamilyTag::Linear, 12), (FamilyTag::PadicExample, 6), (FamilyTag::Qli, 4)]
        .into_iter()
        .map(|(tag, n)| NamedFrequency::new(tag.as_str(), Frequency::family(tag, n).expect("built-in family")))
        .collect()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `1..=max_terms` distinct indices with coefficients uniform in the unit
/// square.
pub fn random_polynomial(freq: &Arc<Frequency>, max_terms: usize, rng: &mut impl Rng) -> DirichletPolynomial {
    let len = freq.len();
    let k = rng.random_range(1..=max_terms.clamp(1, len));
    let indices = rand::seq::index::sample(rng, len, k);
    let mut terms: Vec<(usize, Complex64)> = Vec::with_capacity(k);
    for i in indices.iter() {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        terms.push((i + 1, c));
    }
    DirichletPolynomial::from_terms(freq.clone(), terms).expect("indices within the frequency")
}

fn exact_norm(d: &DirichletPolynomial, p: u32) -> Result<f64> {
    if p == 2 {
        Ok(norm2(d).value)
    } else {
        Ok(norm_even_exact(d, p)?.value)
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = b.abs().max(f64::MIN_POSITIVE);
    (a - b).abs() / scale
}

/// `‖D^ω‖_p = ‖D‖_p` for Haar-random characters, the identity and a
/// vertical translation, with exact norms (`p ∈ {2, 4, 6}`).
pub fn suite_vertical_isometry(
    freqs: &[NamedFrequency],
    trials: usize,
    characters: usize,
    p_list: &[u32],
    seed: u64,
) -> Result<SuiteReport> {
    if let Some(p) = p_list.iter().find(|p| ![2, 4, 6].contains(*p)) {
        return Err(Error::InvalidArgument(format!("p = {p} has no exact method")));
    }
    let mut report =
        SuiteReport::new("vertical_isometry", "family,trial,character,p,norm,twisted_norm,deviation", 1e-9);
    for (fi, nf) in freqs.iter().enumerate() {
        let mut rng = rng_for(seed, fi as u64);
        let lattice = Arc::new(lattice_basis(&nf.freq, nf.freq.len())?);
        for trial in 0..trials {
            let d = random_polynomial(&nf.freq, 8, &mut rng);
            let mut omegas = vec![
                ("identity".to_string(), Character::trivial(lattice.clone())),
                ("translation".to_string(), Character::from_real(lattice.clone(), rng.random_range(-100.0..100.0))),
            ];
            for j in 0..characters {
                omegas.push((format!("haar{j}"), Character::random_with(lattice.clone(), &mut rng)));
            }
            let base: Vec<f64> = p_list.iter().map(|&p| exact_norm(&d, p)).collect::<Result<_>>()?;
            for (label, omega) in &omegas {
                let twisted = d.vertical_limit(omega)?;
                for (&p, &b) in p_list.iter().zip(&base) {
                    let t = exact_norm(&twisted, p)?;
                    let dev = relative(t, b);
                    report.record(dev, format!("{},{trial},{label},{p},{b:.15e},{t:.15e},{dev:.3e}", nf.name));
                }
            }
        }
    }
    Ok(report.finish())
}

/// Translation grid `1, 1/2, …` down to `2^-10`, continued until
/// `u · max λ ≤ 10^-4` so that the limit check is meaningful for every
/// family.
pub fn translation_grid(max_lambda: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut u = 1.0f64;
    for k in 0.. {
        grid.push(u);
        if k >= 10 && u * max_lambda <= 1e-4 {
            break;
        }
        u /= 2.0;
    }
    grid
}

/// `‖D_u‖₂` is nondecreasing as `u ↓ 0`, equals `‖D‖₂` at `u = 0`, and is
/// within `10^-3 ‖D‖₂` at the end of the grid. The deviation is the worst
/// violation of these three statements relative to `‖D‖₂`.
pub fn suite_translation_sup(freqs: &[NamedFrequency], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("translation_sup", "family,trial,u,norm,deviation", 1e-9);
    for (fi, nf) in freqs.iter().enumerate() {
        let mut rng = rng_for(seed, 100 + fi as u64);
        for trial in 0..trials {
            let d = random_polynomial(&nf.freq, 8, &mut rng);
            let full = norm2(&d).value;
            let grid = translation_grid(d.max_lambda());
            let mut prev = 0.0;
            for (k, &u) in grid.iter().enumerate() {
                let v = norm2(&d.translate(Complex64::new(u, 0.0))).value;
                let mut dev = ((prev - v) / full).max(0.0);
                if k + 1 == grid.len() {
                    dev = dev.max(((full - v).abs() - 1e-3 * full).max(0.0) / full);
                }
                prev = v;
                report.record(dev, format!("{},{trial},{u:e},{v:.15e},{dev:.3e}", nf.name));
            }
            let v0 = norm2(&d.translate(Complex64::new(0.0, 0.0))).value;
            let dev = ((prev - v0) / full).max(0.0).max(relative(v0, full));
            report.record(dev, format!("{},{trial},0,{v0:.15e},{dev:.3e}", nf.name));
        }
    }
    Ok(report.finish())
}

/// `‖D‖₂ ≤ ‖D‖_∞` with the sup norm's certified error added.
pub fn suite_parseval_vs_sup(freqs: &[NamedFrequency], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("parseval_vs_sup", "family,trial,norm2,sup,sup_error,method,deviation", 1e-12);
    let opts = SupOptions::default();
    for (fi, nf) in freqs.iter().enumerate() {
        let mut rng = rng_for(seed, 200 + fi as u64);
        for trial in 0..trials {
            let d = random_polynomial(&nf.freq, 8, &mut rng);
            let l2 = norm2(&d).value;
            let sup = norm_sup(&d, &opts)?;
            let dev = ((l2 - sup.upper()) / l2).max(0.0);
            report.record(
                dev,
                format!("{},{trial},{l2:.15e},{:.15e},{:.3e},{},{dev:.3e}", nf.name, sup.value, sup.error, sup.method),
            );
        }
    }
    Ok(report.finish())
}

/// Kernel mass of the Poisson kernel `P_u` outside `[-W, W]`.
pub fn poisson_tail(u: f64, window: f64) -> f64 {
    1.0 - 2.0 / PI * (window / u).atan()
}

/// `∫_{-W}^{W} P_u(s) g(t - s) ds` by composite Gauss–Legendre with
/// panels no wider than `width`.
fn poisson_convolve(u: f64, window: f64, width: f64, g: impl Fn(f64) -> Complex64) -> Complex64 {
    let (xs, ws) = gauss_legendre(16);
    let panels = (2.0 * window / width).ceil() as usize;
    let h = 2.0 * window / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let a = -window + k as f64 * h;
        for (x, w) in xs.iter().zip(&ws) {
            let s = a + 0.5 * (x + 1.0) * h;
            let kernel = u / (PI * (u * u + s * s));
            acc += g(s) * (w * 0.5 * h * kernel);
        }
    }
    acc
}

/// Poisson smoothing of the boundary function of `D^ω` against `D^ω(u+it)`.
///
/// The deviation is `|P_u * f_ω(t) - D^ω(u+it)| / Σ|a_n|`; the tolerance is
/// the kernel tail outside the window plus the observed quadrature error
/// (difference to a half panel width), taken at the tightest case.
pub fn suite_helson_formula(
    polys: &[DirichletPolynomial],
    u_list: &[f64],
    t_list: &[f64],
    omega_samples: usize,
    window: f64,
    seed: u64,
) -> Result<SuiteReport> {
    if u_list.iter().any(|&u| !(u > 0.0)) || !(window > 0.0) {
        return Err(Error::InvalidArgument("u and the window must be positive".into()));
    }
    let mut report = SuiteReport::new(
        "helson_formula",
        "poly,character,u,t,convolution_re,convolution_im,value_re,value_im,deviation,allowed",
        f64::INFINITY,
    );
    let mut rng = rng_for(seed, 300);
    for (pi, d) in polys.iter().enumerate() {
        let lattice = Arc::new(lattice_basis(d.frequency(), d.max_index().max(1))?);
        let l1 = d.l1_coefficients();
        if l1 == 0.0 {
            continue;
        }
        let mut omegas = vec![Character::trivial(lattice.clone())];
        for _ in 0..omega_samples {
            omegas.push(Character::random_with(lattice.clone(), &mut rng));
        }
        for (oi, omega) in omegas.iter().enumerate() {
            let dw = d.vertical_limit(omega)?;
            for &u in u_list {
                let width = (0.5 * u).min(PI / (4.0 * dw.max_lambda().max(1e-9)));
                for &t in t_list {
                    let g = |s: f64| dw.boundary(t - s);
                    let fine = poisson_convolve(u, window, width, g);
                    let coarse = poisson_convolve(u, window, 2.0 * width, g);
                    let value = dw.evaluate(Complex64::new(u, t));
                    let dev = (fine - value).norm() / l1;
                    let allowed = poisson_tail(u, window) + (fine - coarse).norm() / l1;
                    report.tolerance = report.tolerance.min(allowed);
                    report.record(
                        dev,
                        format!(
                            "{pi},{oi},{u},{t},{:.15e},{:.15e},{:.15e},{:.15e},{dev:.3e},{allowed:.3e}",
                            fine.re, fine.im, value.re, value.im
                        ),
                    );
                }
            }
        }
    }
    if report.cases == 0 {
        report.tolerance = 0.0;
    }
    Ok(report.finish())
}

/// Diagnostic growth of the partial-sum projections `π_N`.
///
/// For `p = 1` random search gives lower bounds `L_N` on `‖π_N‖` from
/// quadrature norms; only finiteness is asserted. For `p = 2` the contraction
/// `‖π_N D‖₂ ≤ ‖D‖₂` is asserted exactly.
pub fn suite_projection_growth(
    freq: &NamedFrequency,
    n_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(
        "projection_growth",
        "family,N,lambda_N,lower_bound_p1,ratio_to_lambda,max_ratio_p2,deviation",
        1e-12,
    );
    let mut rng = rng_for(seed, 400);
    for &n in n_list {
        freq.freq.check_count(n)?;
        let support = (2 * n).min(freq.freq.len());
        let mut lower = 0.0f64;
        let mut ratio2 = 0.0f64;
        for _ in 0..samples {
            let coeffs: Vec<(usize, Complex64)> = (1..=support)
                .map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
                .collect();
            let d = DirichletPolynomial::from_terms(freq.freq.clone(), coeffs)?;
            let pd = d.partial_sum(n);
            let schedule = scaled_schedule(&d, 100.0);
            let full = norm_besicovitch(&d, 1.0, &schedule)?.value;
            let part = norm_besicovitch(&pd, 1.0, &schedule)?.value;
            if full > 0.0 {
                lower = lower.max(part / full);
            }
            ratio2 = ratio2.max(norm2(&pd).value / norm2(&d).value);
        }
        let lambda = freq.freq.lambda(n);
        let mut dev = (ratio2 - 1.0).max(0.0);
        if !lower.is_finite() {
            dev = f64::INFINITY;
        }
        let ratio = if lambda > 0.0 { lower / lambda } else { f64::NAN };
        report.record(dev, format!("{},{n},{lambda:.6e},{lower:.6e},{ratio:.6e},{ratio2:.15e},{dev:.3e}", freq.name));
    }
    Ok(report.finish())
}

/// `‖D|_N‖₂` is nondecreasing in `N`, bounded by `‖D‖₂`, and equal to it
/// once `N` covers the support.
pub fn suite_abschnitt(freqs: &[NamedFrequency], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("abschnitt", "family,trial,N,norm,full_norm,deviation", 1e-9);
    for (fi, nf) in freqs.iter().enumerate() {
        let mut rng = rng_for(seed, 500 + fi as u64);
        let dec = extract_basis(&nf.freq, nf.freq.len())?;
        for trial in 0..trials {
            let d = random_polynomial(&nf.freq, 8, &mut rng);
            let full = norm2(&d).value;
            let cover = d.support().iter().map(|&n| dec.row(n).map(|r| r.width())).collect::<Result<Vec<_>>>()?;
            let cover = cover.into_iter().max().unwrap_or(0);
            let mut prev = 0.0;
            for n in 0..=dec.basis_len() {
                let v = norm2(&d.abschnitt(n, &dec)?).value;
                let mut dev = ((prev - v).max(0.0) + (v - full).max(0.0)) / full;
                if n >= cover {
                    dev = dev.max(relative(v, full));
                }
                prev = v;
                report.record(dev, format!("{},{trial},{n},{v:.15e},{full:.15e},{dev:.3e}", nf.name));
            }
        }
    }
    Ok(report.finish())
}

/// Sup norms of `translate(R_x(D) - D, ε)` along `x_list`. The deviation is
/// infinite when the values fail to decrease strictly, and otherwise the
/// relative excess over the bound `Σ |a_n| min(1, λ_n/x) e^{-λ_n ε}`.
pub fn suite_riesz_mean(d: &DirichletPolynomial, eps: f64, x_list: &[f64]) -> Result<SuiteReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut report = SuiteReport::new("riesz_mean", "x,sup_deviation,sup_error,bound,deviation", 1e-9);
    let opts = SupOptions::default();
    let mut prev = f64::INFINITY;
    for &x in x_list {
        let diff = d.riesz_mean(x)?.checked_sub(d)?.translate(Complex64::new(eps, 0.0));
        let sup = norm_sup(&diff, &opts)?;
        let bound: f64 = d
            .terms()
            .iter()
            .map(|(&n, a)| {
                let l = d.frequency().lambda(n);
                a.norm() * (l / x).min(1.0) * (-l * eps).exp()
            })
            .sum();
        let mut dev = ((sup.value - bound) / d.l1_coefficients().max(f64::MIN_POSITIVE)).max(0.0);
        if !(sup.value < prev) {
            dev = f64::INFINITY;
        }
        prev = sup.value;
        report.record(dev, format!("{x},{:.15e},{:.3e},{bound:.15e},{dev:.3e}", sup.value, sup.error));
    }
    Ok(report.finish())
}

/// Names accepted by [`run_suite`].
pub const SUITE_NAMES: [&str; 7] = [
    "vertical_isometry",
    "translation_sup",
    "parseval_vs_sup",
    "helson_formula",
    "projection_growth",
    "abschnitt",
    "riesz_mean",
];

/// Runs a suite by name with its standard workload.
pub fn run_suite(name: &str, seed: u64, trials: usize) -> Result<SuiteReport> {
    let families = default_families();
    match name {
        "vertical_isometry" => suite_vertical_isometry(&families, trials, 20, &[2, 4, 6], seed),
        "translation_sup" => suite_translation_sup(&families, trials, seed),
        "parseval_vs_sup" => suite_parseval_vs_sup(&families, trials, seed),
        "helson_formula" => {
            let mut rng = rng_for(seed, 600);
            let polys: Vec<DirichletPolynomial> = families
                .iter()
                .map(|nf| loop {
                    let d = random_polynomial(&nf.freq, 3, &mut rng);
                    if d.len() == 3 {
                        break d;
                    }
                })
                .collect();
            suite_helson_formula(&polys, &[1.0], &[0.0, 1.5], trials.min(10), 1e3, seed)
        }
        "projection_growth" => {
            let f = NamedFrequency::new("ordinary", Frequency::ordinary(64)?);
            suite_projection_growth(&f, &[4, 8, 16, 32], trials.clamp(1, 4), seed)
        }
        "abschnitt" => suite_abschnitt(&families, trials, seed),
        "riesz_mean" => {
            let f = Arc::new(Frequency::ordinary(10)?);
            let mut rng = rng_for(seed, 700);
            let d = random_polynomial(&f, 5, &mut rng);
            suite_riesz_mean(&d, 0.1, &[10.0, 1e2, 1e3, 1e4])
        }
        other => {
            Err(Error::InvalidArgument(format!("unknown suite `{other}`; expected one of {}", SUITE_NAMES.join(", "))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn report_pass_tracks_tolerance() {
        let mut r = SuiteReport::new("x", "a", 1e-3);
        r.record(1e-4, "1".into());
        r.record(2e-4, "2".into());
        let r = r.finish();
        assert!(r.pass && r.cases == 2 && r.max_deviation == 2e-4);
        assert_eq!(r.csv(), "a\n1\n2\n");
        assert!(!r.clone().with_tolerance(1e-5).pass);
        let mut bad = SuiteReport::new("y", "a", 1.0);
        bad.record(f64::NAN, "nan".into());
        assert!(!bad.finish().pass);
    }

    #[test]
    fn random_polynomials_are_seeded() {
        let f = Arc::new(Frequency::ordinary(10).unwrap());
        let a = random_polynomial(&f, 8, &mut rng_for(3, 0));
        let b = random_polynomial(&f, 8, &mut rng_for(3, 0));
        assert_eq!(a, b);
        assert!(!a.is_empty() && a.len() <= 8);
    }

    #[test]
    fn translation_grid_reaches_limit_accuracy() {
        let g = translation_grid(2.0);
        assert_eq!(g[10], 2f64.powi(-10));
        assert!(g.last().unwrap() * 2.0 <= 1e-4);
        assert_eq!(translation_grid(1e-3).len(), 11);
    }

    #[test]
    fn single_term_translation_curve() {
        let f = Arc::new(Frequency::family(FamilyTag::Linear, 3).unwrap());
        let d = DirichletPolynomial::from_terms(f, [(3, c(0.6, 0.8))]).unwrap();
        for u in [1.0, 0.25, 0.0] {
            let v = norm2(&d.translate(c(u, 0.0))).value;
            assert!((v - (-2.0 * u).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn small_suites_pass() {
        let fam = default_families();
        for r in [
            suite_vertical_isometry(&fam, 2, 3, &[2, 4], 1).unwrap(),
            suite_translation_sup(&fam, 3, 1).unwrap(),
            suite_parseval_vs_sup(&fam, 3, 1).unwrap(),
            suite_abschnitt(&fam, 3, 1).unwrap(),
        ] {
            assert!(r.pass, "{}", r.summary());
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn vertical_isometry_rejects_odd_p() {
        assert!(suite_vertical_isometry(&default_families(), 1, 1, &[3], 0).is_err());
    }

    #[test]
    fn helson_constant_and_single_term() {
        let f = Arc::new(Frequency::family(FamilyTag::Linear, 4).unwrap());
        let constant = DirichletPolynomial::from_terms(f.clone(), [(1, c(2.0, 0.0))]).unwrap();
        let r = suite_helson_formula(&[constant], &[1.0], &[0.0], 0, 1e3, 0).unwrap();
        // a constant loses exactly the kernel tail
        assert!((r.max_deviation - poisson_tail(1.0, 1e3)).abs() < 1e-9);
        let single = DirichletPolynomial::from_terms(f, [(2, c(1.0, 0.0))]).unwrap();
        let r = suite_helson_formula(&[single], &[0.5], &[0.0, 2.0], 2, 200.0, 0).unwrap();
        assert!(r.pass, "{}", r.summary());
    }

    #[test]
    fn riesz_single_term_closed_form() {
        let f = Arc::new(Frequency::ordinary(3).unwrap());
        let d = DirichletPolynomial::from_terms(f.clone(), [(3, c(2.0, 0.0))]).unwrap();
        let r = suite_riesz_mean(&d, 0.1, &[10.0, 100.0]).unwrap();
        assert!(r.pass);
        let l = f.lambda(3);
        let first: f64 = r.rows[0].split(',').nth(1).unwrap().parse().unwrap();
        assert!((first - 2.0 * l / 10.0 * (-l * 0.1).exp()).abs() < 1e-12);
    }

    #[test]
    fn riesz_trend_failure_is_infinite() {
        let f = Arc::new(Frequency::ordinary(3).unwrap());
        let d = DirichletPolynomial::from_terms(f, [(3, c(2.0, 0.0))]).unwrap();
        let r = suite_riesz_mean(&d, 0.1, &[100.0, 10.0]).unwrap();
        assert!(!r.pass && r.max_deviation.is_infinite());
    }

    #[test]
    fn projection_growth_small() {
        let f = NamedFrequency::new("ordinary", Frequency::ordinary(16).unwrap());
        let r = suite_projection_growth(&f, &[4, 8], 1, 5).unwrap();
        assert!(r.pass, "{}", r.summary());
        assert_eq!(r.rows.len(), 2);
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 1, 1).is_err());
    }
}
