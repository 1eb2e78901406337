use std::f64::consts::TAU;
use std::sync::Arc;

use hpdirichlet::abscissa::{sigma_a_estimate, sigma_c_estimate, sigma_u_estimate, CoefficientRule, RuleKind};
use hpdirichlet::characters::Character;
use hpdirichlet::frequency::{FamilyTag, Frequency, Symbol};
use hpdirichlet::lattice::{
    classify_prefix_type, equal_frequency_sum, extract_basis, lattice_basis, FrequencyLattice, PrefixType,
};
use hpdirichlet::norms::{lift, norm2, norm_even_exact, norm_sup, unlift, SupOptions};
use hpdirichlet::polynomial::DirichletPolynomial;
use hpdirichlet::precision::HighPrecision;
use hpdirichlet::rational::{Rational, RationalRow};
use hpdirichlet::tail::ExtrapolationPolicy;
use hpdirichlet::verify::{random_polynomial, suite_abschnitt, NamedFrequency};
use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FAMILIES: [FamilyTag; 4] = [FamilyTag::Ordinary, FamilyTag::Linear, FamilyTag::PadicExample, FamilyTag::Qli];

fn family(idx: usize, n: usize) -> Arc<Frequency> {
    Arc::new(Frequency::family(FAMILIES[idx % 4], n).unwrap())
}

fn poly(idx: usize, n: usize, terms: usize, seed: u64) -> DirichletPolynomial {
    random_polynomial(&family(idx, n), terms, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Exponents of `n` by trial division.
fn trial_division(mut n: u64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Random increasing frequency over `sqrt 2, sqrt 3, sqrt 5` from small
/// nonnegative rational rows.
fn custom_frequency(raw: &[(u8, u8, u8, u8)]) -> Option<Frequency> {
    let symbols: Vec<Symbol> =
        [2u64, 3, 5].iter().map(|&m| Symbol::new(format!("sqrt{m}"), HighPrecision::sqrt_of(m), "roots")).collect();
    let values: Vec<HighPrecision> = symbols.iter().map(|s| s.value.clone()).collect();
    let mut rows: Vec<RationalRow> = raw
        .iter()
        .map(|&(a, b, c, d)| {
            let den = BigInt::from(d % 4 + 1);
            RationalRow::from_dense(&[
                Rational::new(BigInt::from(a % 5), den.clone()),
                Rational::new(BigInt::from(b % 5), den.clone()),
                Rational::new(BigInt::from(c % 5), den),
            ])
        })
        .collect();
    rows.sort_by_key(|r| r.eval(&values));
    rows.dedup();
    (!rows.is_empty()).then(|| Frequency::new(symbols, rows, FamilyTag::Custom).unwrap())
}

/// Angles are stored as `f64`, so a value at `n` carries an error that grows
/// with the size of its lattice coordinates.
fn angle_tolerance(lat: &FrequencyLattice, n: usize) -> f64 {
    let k: f64 = lat.coords_i64(n).unwrap().iter().map(|c| c.unsigned_abs() as f64).sum();
    64.0 * f64::EPSILON * TAU * k
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn prefixes_are_increasing_and_nonnegative(idx in 0usize..4, n in 1usize..400, m in 1usize..400) {
        let f = family(idx, n);
        let p = f.prefix(m.min(n)).unwrap();
        prop_assert!(p.lambda(1) >= 0.0);
        for k in 1..p.len() {
            prop_assert!(!(p.exact_value(k + 1) - p.exact_value(k)).is_negative());
            prop_assert!(p.lambda(k + 1) > p.lambda(k));
        }
    }

    #[test]
    fn ordinary_rows_are_factorizations(n in 1usize..5000) {
        let f = Frequency::ordinary(n).unwrap();
        let row = f.row(n);
        let expected = trial_division(n as u64);
        prop_assert_eq!(row.entries().len(), expected.len());
        for ((col, e), (p, k)) in row.entries().iter().zip(&expected) {
            prop_assert_eq!(&f.symbols()[*col].name, &format!("log{p}"));
            prop_assert_eq!(e, &Rational::from_integer(BigInt::from(*k)));
        }
    }

    #[test]
    fn decomposition_and_lattice_are_exact(raw in prop::collection::vec(any::<(u8, u8, u8, u8)>(), 1..12)) {
        let Some(f) = custom_frequency(&raw) else { return Ok(()) };
        let dec = extract_basis(&f, f.len()).unwrap();
        prop_assert!(dec.verify(&f));
        for n in 1..=f.len() {
            prop_assert_eq!(&dec.reconstruct(n).unwrap(), f.row(n));
        }
        let lat = lattice_basis(&f, f.len()).unwrap();
        prop_assert!(lat.verify(&f));
        // ℤ-rank of the generated group equals its ℚ-rank
        prop_assert_eq!(lat.rank(), dec.basis_len());
        let class = classify_prefix_type(&dec);
        if class.kind == PrefixType::Natural {
            prop_assert!(class.kind.is_integer());
        }
        if dec.matrix.iter().all(RationalRow::is_natural) {
            prop_assert_eq!(class.kind, PrefixType::Natural);
        }
        prop_assert!(class.prefix_only);
    }

    #[test]
    fn equal_sums_match_high_precision(a in prop::collection::vec(1usize..=30, 1..5), b in prop::collection::vec(1usize..=30, 1..5)) {
        let f = Frequency::ordinary(30).unwrap();
        let lat = lattice_basis(&f, 30).unwrap();
        let sum = |s: &[usize]| s.iter().map(|&n| f.exact_value(n).clone()).sum::<HighPrecision>();
        let numeric_equal = (&sum(&a) - &sum(&b)).is_below_pow2(100);
        prop_assert_eq!(equal_frequency_sum(&lat, &a, &b).unwrap(), numeric_equal);
        // products give genuine relations: log a + log b = log ab
        let (x, y) = (a[0], b[0]);
        if x * y <= 30 {
            prop_assert!(equal_frequency_sum(&lat, &[x, y], &[x * y]).unwrap());
        }
    }

    #[test]
    fn characters_respect_relations(x in 1usize..=12, y in 1usize..=12, seed in any::<u64>()) {
        let f = Frequency::ordinary(144).unwrap();
        let lat = Arc::new(lattice_basis(&f, 144).unwrap());
        let w = Character::random(lat, seed);
        let lhs = w.apply(x).unwrap() * w.apply(y).unwrap();
        prop_assert!((lhs - w.apply(x * y).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn from_real_is_a_group(t1 in -50.0f64..50.0, t2 in -50.0f64..50.0, idx in 0usize..4) {
        let f = family(idx, 12);
        let lat = Arc::new(lattice_basis(&f, 12).unwrap());
        let w = Character::from_real(lat.clone(), t1).compose(&Character::from_real(lat.clone(), t2)).unwrap();
        let direct = Character::from_real(lat.clone(), t1 + t2);
        for n in 1..=12 {
            let tol = 1e-9 + angle_tolerance(&lat, n);
            prop_assert!((w.apply(n).unwrap() - direct.apply(n).unwrap()).norm() < tol);
        }
    }

    #[test]
    fn translation_composes(idx in 0usize..4, seed in any::<u64>(),
                            z in (-1.0f64..1.0, -5.0f64..5.0), w in (-1.0f64..1.0, -5.0f64..5.0)) {
        let d = poly(idx, 10, 6, seed);
        let (z, w) = (Complex64::new(z.0, z.1), Complex64::new(w.0, w.1));
        let twice = d.translate(z).translate(w);
        let once = d.translate(z + w);
        for (n, a) in once.terms() {
            let b = twice.coefficient(*n);
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
        }
        let s = Complex64::new(0.3, 1.7);
        prop_assert!((d.evaluate(Complex64::new(s.re, 0.0) + s) - d.translate(Complex64::new(s.re, 0.0)).evaluate(s)).norm() < 1e-12);
    }

    #[test]
    fn vertical_limits_compose_and_preserve_norms(idx in 0usize..4, seed in any::<u64>()) {
        let d = poly(idx, 10, 6, seed);
        let lat = Arc::new(lattice_basis(d.frequency(), 10).unwrap());
        let w1 = Character::random(lat.clone(), seed ^ 1);
        let w2 = Character::random(lat.clone(), seed ^ 2);
        let seq = d.vertical_limit(&w1).unwrap().vertical_limit(&w2).unwrap();
        let joint = d.vertical_limit(&w1.compose(&w2).unwrap()).unwrap();
        for (n, a) in joint.terms() {
            let tol = (1e-12 + angle_tolerance(&lat, *n)) * a.norm().max(1.0);
            prop_assert!((a - seq.coefficient(*n)).norm() < tol);
        }
        for p in [2u32, 4, 6] {
            let a = norm_even_exact(&d, p).unwrap().value;
            let b = norm_even_exact(&joint, p).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0), "p={} {} {}", p, a, b);
        }
    }

    #[test]
    fn abschnitt_idempotent_and_commuting(idx in 0usize..4, seed in any::<u64>(), n in 0usize..6, m in 0usize..12, u in 0.0f64..2.0) {
        let d = poly(idx, 12, 8, seed);
        let dec = extract_basis(d.frequency(), 12).unwrap();
        let a = d.abschnitt(n, &dec).unwrap();
        prop_assert_eq!(&a.abschnitt(n, &dec).unwrap(), &a);
        prop_assert_eq!(a.partial_sum(m), d.partial_sum(m).abschnitt(n, &dec).unwrap());
        let z = Complex64::new(u, 0.0);
        prop_assert_eq!(a.translate(z), d.translate(z).abschnitt(n, &dec).unwrap());
        prop_assert!(norm2(&a).value <= norm2(&d).value);
    }

    #[test]
    fn riesz_factors(idx in 0usize..4, seed in any::<u64>(), x in 0.01f64..40.0) {
        let d = poly(idx, 12, 8, seed);
        let r = d.riesz_mean(x).unwrap();
        for (&n, &a) in d.terms() {
            let l = d.frequency().lambda(n);
            let expected = if l < x { a * (1.0 - l / x) } else { Complex64::new(0.0, 0.0) };
            prop_assert!((r.coefficient(n) - expected).norm() <= 1e-15 * a.norm());
        }
    }

    #[test]
    fn even_norms_match_torus_trapezoid(seed in any::<u64>(), terms in 1usize..=4) {
        // oracle: product trapezoid over the torus of the prime-exponent lift,
        // exact for trigonometric polynomials of degree below the resolution
        let f = Arc::new(Frequency::ordinary(12).unwrap());
        let d = random_polynomial(&f, terms, &mut ChaCha8Rng::seed_from_u64(seed));
        let primes = [2usize, 3, 5, 7, 11];
        let exps: Vec<Vec<usize>> = d.terms().keys().map(|&n| primes.iter().map(|&p| {
            let (mut m, mut e) = (n, 0);
            while m % p == 0 { m /= p; e += 1; }
            e
        }).collect()).collect();
        let res = 8usize;
        for p in [2i32, 4] {
            let mut total = 0.0;
            for idx in 0..res.pow(5) {
                let theta: Vec<f64> = (0..5).map(|j| TAU * ((idx / res.pow(j)) % res) as f64 / res as f64).collect();
                let v: Complex64 = exps.iter().zip(d.terms().values()).map(|(e, a)| {
                    let phase: f64 = e.iter().zip(&theta).map(|(&k, t)| k as f64 * t).sum();
                    a * Complex64::from_polar(1.0, phase)
                }).sum();
                total += v.norm().powi(p);
            }
            let oracle = (total / res.pow(5) as f64).powf(1.0 / p as f64);
            let exact = norm_even_exact(&d, p as u32).unwrap().value;
            prop_assert!((oracle - exact).abs() < 1e-8, "p={} {} {}", p, oracle, exact);
        }
    }

    #[test]
    fn lift_round_trip(idx in 0usize..4, seed in any::<u64>()) {
        let d = poly(idx, 12, 8, seed);
        let dec = extract_basis(d.frequency(), 12).unwrap();
        let tp = lift(&d, &dec).unwrap();
        let back = unlift(&tp, d.frequency(), &dec).unwrap();
        prop_assert_eq!(&back, &d);
        for (i, &n) in tp.indices.iter().enumerate() {
            prop_assert_eq!(&tp.bohr_row(i), dec.row(n).unwrap());
            prop_assert_eq!(tp.coeffs[i].re.to_bits(), d.coefficient(n).re.to_bits());
            prop_assert_eq!(tp.coeffs[i].im.to_bits(), d.coefficient(n).im.to_bits());
        }
    }

    #[test]
    fn l2_below_certified_sup(idx in 0usize..4, seed in any::<u64>()) {
        let d = poly(idx, 8, 6, seed);
        let s = norm_sup(&d, &SupOptions { torus_budget: 1 << 14, periodic_budget: 1 << 16, ..SupOptions::default() }).unwrap();
        prop_assert!(norm2(&d).value <= s.upper());
        prop_assert!(s.value <= d.l1_coefficients() * (1.0 + 1e-12));
        prop_assert!(d.boundary(1.234).norm() <= s.upper());
    }

    #[test]
    fn suites_are_deterministic(seed in any::<u64>()) {
        let fam = vec![NamedFrequency::new("ordinary", Frequency::ordinary(10).unwrap())];
        let a = suite_abschnitt(&fam, 2, seed).unwrap();
        let b = suite_abschnitt(&fam, 2, seed).unwrap();
        prop_assert_eq!(a.csv(), b.csv());
        prop_assert_eq!(a.pass, a.max_deviation <= a.tolerance);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn sigma_a_is_translation_covariant(c in 0.05f64..0.4, u in 0.05f64..0.4) {
        let f = Arc::new(Frequency::ordinary(20_000).unwrap());
        let policy = ExtrapolationPolicy::default();
        let base = sigma_a_estimate(&CoefficientRule::exponential(f.clone(), c), 20_000, &policy).unwrap();
        let shifted = sigma_a_estimate(&CoefficientRule::exponential(f, c).damped(u), 20_000, &policy).unwrap();
        prop_assert!((shifted.value - (base.value - u)).abs() <= base.band + shifted.band + 0.02,
            "{} {} {}", base.value, shifted.value, u);
    }

    #[test]
    fn absolute_dominates_windowwise(idx in 0usize..4, re in -1.0f64..1.0, im in -1.0f64..1.0, damping in 0.0f64..0.5, alternating in any::<bool>()) {
        let f = family(idx, 4000);
        let rule = if alternating {
            CoefficientRule::alternating(f).damped(damping)
        } else {
            CoefficientRule::constant(f, Complex64::new(re, im)).damped(damping)
        };
        let policy = ExtrapolationPolicy::plain();
        let a = sigma_a_estimate(&rule, 4000, &policy).unwrap();
        let c = sigma_c_estimate(&rule, 4000, &policy).unwrap();
        if a.is_sentinel() {
            prop_assert!(c.is_sentinel());
        } else {
            for (wa, wc) in a.windows().iter().zip(c.windows()) {
                prop_assert_eq!((wa.lo, wa.hi), (wc.lo, wc.hi));
                prop_assert!(wc.value <= wa.value + 1e-12);
            }
        }
    }

    #[test]
    fn finite_support_is_minus_infinity(entries in prop::collection::btree_map(1usize..=150, (-1.0f64..1.0, -1.0f64..1.0), 0..6)) {
        let f = Arc::new(Frequency::ordinary(150).unwrap());
        let entries = entries.into_iter().map(|(n, (re, im))| (n, Complex64::new(re, im))).collect();
        let rule = CoefficientRule::new(f, RuleKind::Table { entries }).unwrap();
        let policy = ExtrapolationPolicy::default();
        prop_assert!(sigma_a_estimate(&rule, 150, &policy).unwrap().is_sentinel());
        prop_assert!(sigma_c_estimate(&rule, 150, &policy).unwrap().is_sentinel());
        prop_assert!(sigma_u_estimate(&rule, 150, &policy, &SupOptions::default()).unwrap().is_sentinel());
    }
}
