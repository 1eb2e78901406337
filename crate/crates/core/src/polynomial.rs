//! λ-Dirichlet polynomials `D(s) = Σ a_n e^{-λ_n s}` bound to one frequency.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::characters::Character;
use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::lattice::BohrDecomposition;

#[derive(Clone, Debug)]
pub struct DirichletPolynomial {
    freq: Arc<Frequency>,
    terms: BTreeMap<usize, Complex64>,
}

impl PartialEq for DirichletPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_frequency(&self.freq, &other.freq) && self.terms == other.terms
    }
}

fn same_frequency(a: &Arc<Frequency>, b: &Arc<Frequency>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl DirichletPolynomial {
    pub fn zero(freq: Arc<Frequency>) -> Self {
        DirichletPolynomial { freq, terms: BTreeMap::new() }
    }

    /// Builds from `(n, a_n)` pairs, 1-based; repeated indices are summed.
    pub fn from_terms(freq: Arc<Frequency>, terms: impl IntoIterator<Item = (usize, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, a) in terms {
            freq.check_index(n)?;
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient {n} is not finite")));
            }
            *map.entry(n).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        Ok(Self::from_map(freq, map))
    }

    /// Real coefficients `a_1, a_2, ...` for the first terms.
    pub fn from_real_coefficients(freq: Arc<Frequency>, coeffs: &[f64]) -> Result<Self> {
        Self::from_terms(freq, coeffs.iter().enumerate().map(|(i, &a)| (i + 1, Complex64::new(a, 0.0))))
    }

    fn from_map(freq: Arc<Frequency>, mut terms: BTreeMap<usize, Complex64>) -> Self {
        terms.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        DirichletPolynomial { freq, terms }
    }

    fn map_terms(&self, mut f: impl FnMut(usize, Complex64) -> Option<Complex64>) -> Self {
        let terms = self.terms.iter().filter_map(|(&n, &a)| f(n, a).map(|b| (n, b))).collect();
        Self::from_map(self.freq.clone(), terms)
    }

    pub fn frequency(&self) -> &Arc<Frequency> {
        &self.freq
    }

    pub fn terms(&self) -> &BTreeMap<usize, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, n: usize) -> Complex64 {
        self.terms.get(&n).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Largest index carrying a term (0 for the zero polynomial).
    pub fn max_index(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.terms.keys().copied().collect()
    }

    /// `Σ |a_n|`.
    pub fn l1_coefficients(&self) -> f64 {
        self.terms.values().map(|a| a.norm()).sum()
    }

    pub fn max_lambda(&self) -> f64 {
        self.terms.keys().map(|&n| self.freq.lambda(n)).fold(0.0, f64::max)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_frequency(&self.freq, &other.freq) {
            return Err(Error::FrequencyMismatch);
        }
        let mut terms = self.terms.clone();
        for (&n, &a) in &other.terms {
            *terms.entry(n).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        Ok(Self::from_map(self.freq.clone(), terms))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_terms(|_, a| Some(a * c))
    }

    /// Translation `D_z`: `a_n ↦ a_n e^{-λ_n z}`. For real `u > 0` this is
    /// the Poisson smoothing of the boundary function.
    pub fn translate(&self, z: Complex64) -> Self {
        self.map_terms(|n, a| Some(a * (-self.freq.lambda(n) * z).exp()))
    }

    /// Vertical limit `D^ω`: `a_n ↦ a_n ω(λ_n)`.
    pub fn vertical_limit(&self, omega: &Character) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (&n, &a) in &self.terms {
            terms.insert(n, a * omega.apply(n)?);
        }
        Ok(Self::from_map(self.freq.clone(), terms))
    }

    /// Typical (Riesz) mean `R_x(D) = Σ_{λ_n < x} a_n (1 - λ_n/x) e^{-λ_n s}`.
    pub fn riesz_mean(&self, x: f64) -> Result<Self> {
        if !(x > 0.0) {
            return Err(Error::InvalidArgument("Riesz mean needs x > 0".into()));
        }
        Ok(self.map_terms(|n, a| {
            let l = self.freq.lambda(n);
            (l < x).then(|| a * (1.0 - l / x))
        }))
    }

    /// `N`-th Abschnitt: terms whose Bohr row only uses basis columns `0..N`.
    pub fn abschnitt(&self, count: usize, dec: &BohrDecomposition) -> Result<Self> {
        if self.max_index() > dec.prefix_len() {
            return Err(Error::IndexOutOfRange { index: self.max_index(), len: dec.prefix_len() });
        }
        let mut terms = BTreeMap::new();
        for (&n, &a) in &self.terms {
            if dec.row(n)?.width() <= count {
                terms.insert(n, a);
            }
        }
        Ok(Self::from_map(self.freq.clone(), terms))
    }

    /// Partial sum `π_N(D)`: terms with `n <= N`.
    pub fn partial_sum(&self, count: usize) -> Self {
        self.map_terms(|n, a| (n <= count).then_some(a))
    }

    /// `D(s)` by direct summation.
    pub fn evaluate(&self, s: Complex64) -> Complex64 {
        self.terms.iter().map(|(&n, &a)| a * (-self.freq.lambda(n) * s).exp()).sum()
    }

    /// Boundary function `f(t) = D(it) = Σ a_n e^{-iλ_n t}`.
    pub fn boundary(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|(&n, &a)| a * Complex64::from_polar(1.0, -self.freq.lambda(n) * t)).sum()
    }

    /// Smallest gap between distinct frequencies in the support.
    pub fn min_gap(&self) -> Option<f64> {
        let ls: Vec<f64> = self.terms.keys().map(|&n| self.freq.lambda(n)).collect();
        ls.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::FamilyTag;
    use crate::lattice::{extract_basis, lattice_basis};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn linear(n: usize) -> Arc<Frequency> {
        Arc::new(Frequency::family(FamilyTag::Linear, n).unwrap())
    }

    #[test]
    fn translate_examples() {
        let f = linear(3);
        let d = DirichletPolynomial::from_terms(f.clone(), [(1, c(1.0, 0.0)), (2, c(0.5, -1.0))]).unwrap();
        assert_eq!(d.translate(c(0.0, 0.0)), d);
        let e = DirichletPolynomial::from_terms(f, [(2, c(1.0, 0.0))]).unwrap();
        let t = e.translate(c(2f64.ln(), 0.0));
        assert!((t.coefficient(2) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn translate_composes() {
        let f = Arc::new(Frequency::ordinary(8).unwrap());
        let d = DirichletPolynomial::from_terms(f, (1..=8).map(|n| (n, c(n as f64, 1.0)))).unwrap();
        let (z, w) = (c(0.3, 1.2), c(-0.1, 0.7));
        let a = d.translate(z).translate(w);
        let b = d.translate(z + w);
        for n in 1..=8 {
            assert!((a.coefficient(n) - b.coefficient(n)).norm() <= 1e-14 * b.coefficient(n).norm());
        }
    }

    #[test]
    fn vertical_limit_real_is_translation() {
        let f = Arc::new(Frequency::ordinary(10).unwrap());
        let lat = Arc::new(lattice_basis(&f, 10).unwrap());
        let d = DirichletPolynomial::from_terms(f, (1..=10).map(|n| (n, c(1.0, -(n as f64))))).unwrap();
        let tau = 2.75;
        let v = d.vertical_limit(&Character::from_real(lat.clone(), tau)).unwrap();
        let t = d.translate(c(0.0, tau));
        for n in 1..=10 {
            assert!((v.coefficient(n) - t.coefficient(n)).norm() < 1e-9);
            assert!((v.coefficient(n).norm() - d.coefficient(n).norm()).abs() < 1e-12);
        }
        assert_eq!(d.vertical_limit(&Character::trivial(lat)).unwrap(), d);
    }

    #[test]
    fn vertical_limit_outside_prefix() {
        let f = Arc::new(Frequency::ordinary(10).unwrap());
        let lat = Arc::new(lattice_basis(&f, 5).unwrap());
        let d = DirichletPolynomial::from_terms(f, [(7, c(1.0, 0.0))]).unwrap();
        assert!(d.vertical_limit(&Character::trivial(lat)).is_err());
    }

    #[test]
    fn riesz_examples() {
        let f = linear(3);
        let d = DirichletPolynomial::from_real_coefficients(f.clone(), &[1.0, 1.0, 1.0]).unwrap();
        let r = d.riesz_mean(1.5).unwrap();
        assert_eq!(r.coefficient(1), c(1.0, 0.0));
        assert!((r.coefficient(2) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.coefficient(3), c(0.0, 0.0));
        assert!(d.riesz_mean(0.0).is_err());
        let pad = Arc::new(Frequency::family(FamilyTag::PadicExample, 3).unwrap());
        let p = DirichletPolynomial::from_real_coefficients(pad, &[1.0, 2.0]).unwrap();
        assert!(p.riesz_mean(0.9).unwrap().is_zero());
        let big = d.riesz_mean(1e12).unwrap();
        assert!((big.coefficient(3) - c(1.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn abschnitt_powers_of_two() {
        let f = Arc::new(Frequency::ordinary(20).unwrap());
        let dec = extract_basis(&f, 20).unwrap();
        let d = DirichletPolynomial::from_terms(f, (1..=20).map(|n| (n, c(1.0, 0.0)))).unwrap();
        assert_eq!(d.abschnitt(1, &dec).unwrap().support(), vec![1, 2, 4, 8, 16]);
        assert_eq!(d.abschnitt(8, &dec).unwrap(), d);
        assert_eq!(d.abschnitt(0, &dec).unwrap().support(), vec![1]);
    }

    #[test]
    fn partial_sum_and_evaluate() {
        let f = linear(2);
        let d = DirichletPolynomial::from_real_coefficients(f.clone(), &[1.0, 1.0]).unwrap();
        assert!(d.partial_sum(0).is_zero());
        assert_eq!(d.partial_sum(1).support(), vec![1]);
        assert_eq!(d.evaluate(c(0.0, 0.0)), c(2.0, 0.0));
        let u = 0.7;
        assert!((d.evaluate(c(u, 0.0)) - d.translate(c(u, 0.0)).evaluate(c(0.0, 0.0))).norm() < 1e-15);
    }

    #[test]
    fn rejects_cross_frequency() {
        let a = DirichletPolynomial::from_real_coefficients(linear(2), &[1.0]).unwrap();
        let b = DirichletPolynomial::from_real_coefficients(Arc::new(Frequency::ordinary(2).unwrap()), &[1.0]).unwrap();
        assert_eq!(a.checked_add(&b), Err(Error::FrequencyMismatch));
        let d = a.checked_sub(&a).unwrap();
        assert!(d.is_zero());
        assert!(DirichletPolynomial::from_terms(linear(2), [(3, c(1.0, 0.0))]).is_err());
        assert!(DirichletPolynomial::from_terms(linear(2), [(0, c(1.0, 0.0))]).is_err());
    }
}
