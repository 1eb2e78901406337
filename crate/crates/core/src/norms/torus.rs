use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{NormEstimate, NormMethod};
use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::lattice::{classify_prefix_type, BohrDecomposition, PrefixType};
use crate::number_theory::first_primes;
use crate::polynomial::DirichletPolynomial;
use crate::rational::{Rational, RationalRow};

/// Largest torus dimension handled by [`norm_torus`].
pub const MAX_TORUS_DIMS: usize = 6;

/// Points per grid or low-discrepancy set at the fine resolution.
const GRID_BUDGET: usize = 1 << 22;
const QMC_POINTS: usize = 1 << 18;
const QMC_SEED: u64 = 0x7f4a_7c15;

/// Basis the torus exponents refer to.
#[derive(Clone, Debug, PartialEq)]
pub enum LiftBasis {
    /// Exponents are the Bohr matrix rows themselves.
    Bohr,
    /// Exponents are integer coordinates over these rows (given over the
    /// Bohr basis), used when the Bohr matrix has fractional entries.
    Rescaled(Vec<RationalRow>),
}

/// `F(z) = Σ a_n z^{R_n}` restricted to the basis columns the support uses.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPolynomial {
    pub basis: LiftBasis,
    /// Basis positions kept, ascending; exponent `j` refers to `columns[j]`.
    pub columns: Vec<usize>,
    pub indices: Vec<usize>,
    pub exponents: Vec<Vec<i64>>,
    pub coeffs: Vec<Complex64>,
}

impl TorusPolynomial {
    pub fn dims(&self) -> usize {
        self.columns.len()
    }

    /// Exact Bohr row of term `i` rebuilt from its exponents.
    pub fn bohr_row(&self, i: usize) -> RationalRow {
        let pairs = self.columns.iter().zip(&self.exponents[i]).map(|(&c, &e)| (c, Rational::from_integer(e.into())));
        let row = RationalRow::from_pairs(pairs);
        match &self.basis {
            LiftBasis::Bohr => row,
            LiftBasis::Rescaled(gens) => row.combine(gens),
        }
    }

    /// `F` at `z_j = e^{iθ_j}`.
    pub fn eval_angles(&self, theta: &[f64]) -> Complex64 {
        self.exponents
            .iter()
            .zip(&self.coeffs)
            .map(|(e, a)| {
                let phase: f64 = e.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
                a * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// For natural exponents: the ordinary index `Π p_j^{e_j}` (`p_j` the
    /// `j`-th prime over the kept columns) of each term. `None` when an
    /// exponent is negative or the product overflows.
    pub fn ordinary_embedding(&self) -> Option<Vec<u128>> {
        let primes = first_primes(self.dims());
        self.exponents
            .iter()
            .map(|e| {
                e.iter().zip(&primes).try_fold(1u128, |acc, (&k, &p)| {
                    let k = u32::try_from(k).ok()?;
                    acc.checked_mul((p as u128).checked_pow(k)?)
                })
            })
            .collect()
    }
}

/// Lifts `d` to the torus through an integer-type decomposition.
pub fn lift(d: &DirichletPolynomial, dec: &BohrDecomposition) -> Result<TorusPolynomial> {
    if d.max_index() > dec.prefix_len() {
        return Err(Error::IndexOutOfRange { index: d.max_index(), len: dec.prefix_len() });
    }
    let class = classify_prefix_type(dec);
    if class.kind == PrefixType::StrictlyRational {
        return Err(Error::NonIntegerRows("decomposition is not of integer type".into()));
    }
    let (basis, full): (LiftBasis, Vec<Vec<i64>>) = match (class.witness_basis, class.witness_coords) {
        (Some(gens), Some(coords)) => {
            let rows = d
                .terms()
                .keys()
                .map(|&n| coords[n - 1].iter().map(big_to_i64).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            (LiftBasis::Rescaled(gens), rows)
        }
        _ => {
            let width = dec.basis_len();
            let rows = d
                .terms()
                .keys()
                .map(|&n| {
                    dec.row(n)?
                        .to_i64_dense(width)
                        .ok_or_else(|| Error::NonIntegerRows(format!("row {n} has fractional or oversized entries")))
                })
                .collect::<Result<Vec<_>>>()?;
            (LiftBasis::Bohr, rows)
        }
    };
    let width = full.first().map_or(0, Vec::len);
    let columns: Vec<usize> = (0..width).filter(|&j| full.iter().any(|r| r[j] != 0)).collect();
    let exponents = full.iter().map(|r| columns.iter().map(|&j| r[j]).collect()).collect();
    Ok(TorusPolynomial {
        basis,
        columns,
        indices: d.terms().keys().copied().collect(),
        exponents,
        coeffs: d.terms().values().copied().collect(),
    })
}

fn big_to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::NonIntegerRows("lattice coordinate exceeds i64".into()))
}

/// Inverse of [`lift`]: every exponent row must reproduce the Bohr row of
/// its index exactly.
pub fn unlift(tp: &TorusPolynomial, freq: &Arc<Frequency>, dec: &BohrDecomposition) -> Result<DirichletPolynomial> {
    if tp.indices.len() != tp.exponents.len() || tp.indices.len() != tp.coeffs.len() {
        return Err(Error::Invariant("torus polynomial parts differ in length".into()));
    }
    let mut by_row: BTreeMap<&RationalRow, usize> = BTreeMap::new();
    for n in 1..=dec.prefix_len() {
        by_row.entry(dec.row(n)?).or_insert(n);
    }
    let mut terms = Vec::with_capacity(tp.coeffs.len());
    for (i, (&n, &a)) in tp.indices.iter().zip(&tp.coeffs).enumerate() {
        let row = tp.bohr_row(i);
        match by_row.get(&row) {
            Some(&m) if m == n => terms.push((n, a)),
            _ => return Err(Error::Invariant(format!("exponent row of term {n} does not match its Bohr row"))),
        }
    }
    DirichletPolynomial::from_terms(freq.clone(), terms)
}

/// Mean of `|F|^p` over the torus at `resolution` points per dimension
/// (automatic when `None`). Product grids up to three dimensions or while
/// within budget; a shifted Halton set otherwise. The error is the
/// difference to the half resolution.
pub fn norm_torus(
    d: &DirichletPolynomial,
    p: f64,
    dec: &BohrDecomposition,
    resolution: Option<usize>,
) -> Result<NormEstimate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    let tp = lift(d, dec)?;
    torus_norm_of(&tp, p, resolution)
}

pub(crate) fn torus_norm_of(tp: &TorusPolynomial, p: f64, resolution: Option<usize>) -> Result<NormEstimate> {
    let dims = tp.dims();
    if dims > MAX_TORUS_DIMS {
        return Err(Error::DimensionTooLarge { dims, limit: MAX_TORUS_DIMS });
    }
    if tp.coeffs.is_empty() {
        return Ok(NormEstimate::exact(0.0, NormMethod::TorusGrid));
    }
    if dims == 0 {
        let v: Complex64 = tp.coeffs.iter().sum();
        return Ok(NormEstimate::exact(v.norm(), NormMethod::TorusGrid));
    }
    let span = (0..dims)
        .map(|j| {
            let lo = tp.exponents.iter().map(|e| e[j]).min().unwrap();
            let hi = tp.exponents.iter().map(|e| e[j]).max().unwrap();
            (hi - lo) as usize
        })
        .max()
        .unwrap();
    let res = resolution.unwrap_or_else(|| (2 * ((p / 2.0).ceil() as usize * span + 1)).max(8));
    if res < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    let grid_fits = (res as f64).powi(dims as i32) <= GRID_BUDGET as f64;
    let (fine, coarse) = if dims <= 3 || grid_fits {
        if !grid_fits {
            return Err(Error::BudgetExceeded { needed: (res as u128).pow(dims as u32), budget: GRID_BUDGET as u128 });
        }
        (grid_mean(tp, p, res), grid_mean(tp, p, (res / 2).max(1)))
    } else {
        let shift = qmc_shift(dims);
        (halton_mean(tp, p, QMC_POINTS, &shift), halton_mean(tp, p, QMC_POINTS / 2, &shift))
    };
    let (vf, vc) = (fine.max(0.0).powf(1.0 / p), coarse.max(0.0).powf(1.0 / p));
    Ok(NormEstimate {
        value: vf,
        method: NormMethod::TorusGrid,
        error: (vf - vc).abs(),
        lower_bound: false,
        converged: true,
    })
}

fn abs_pow(v: Complex64, p: f64) -> f64 {
    if p == 2.0 {
        v.norm_sqr()
    } else {
        v.norm().powf(p)
    }
}

/// Mean of `|F|^p` on the product grid `(2π m_j / res)`; phases are looked
/// up from a table of `res`-th roots of unity.
fn grid_mean(tp: &TorusPolynomial, p: f64, res: usize) -> f64 {
    let dims = tp.dims();
    let roots: Vec<Complex64> = (0..res).map(|m| Complex64::from_polar(1.0, TAU * m as f64 / res as f64)).collect();
    let exps: Vec<Vec<usize>> =
        tp.exponents.iter().map(|e| e.iter().map(|&k| k.rem_euclid(res as i64) as usize).collect()).collect();
    let inner = res.pow(dims as u32 - 1);
    let total: f64 = (0..res)
        .into_par_iter()
        .map(|m0| {
            let mut acc = 0.0;
            let mut digits = vec![0usize; dims];
            digits[0] = m0;
            for step in 0..inner {
                let mut s = step;
                for d in digits.iter_mut().skip(1) {
                    *d = s % res;
                    s /= res;
                }
                let v: Complex64 = exps
                    .iter()
                    .zip(&tp.coeffs)
                    .map(|(e, a)| {
                        let idx = e.iter().zip(&digits).map(|(k, m)| k * m).sum::<usize>() % res;
                        a * roots[idx]
                    })
                    .sum();
                acc += abs_pow(v, p);
            }
            acc
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total / (res as f64).powi(dims as i32)
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn qmc_shift(dims: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(QMC_SEED);
    (0..dims).map(|_| rng.random::<f64>()).collect()
}

/// Halton points with a Cranley–Patterson rotation.
fn halton_mean(tp: &TorusPolynomial, p: f64, count: usize, shift: &[f64]) -> f64 {
    let bases = first_primes(tp.dims());
    let total: f64 = (0..count)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| {
            let theta: Vec<f64> =
                bases.iter().zip(shift).map(|(&b, s)| TAU * (radical_inverse(i + 1, b as usize) + s).fract()).collect();
            abs_pow(tp.eval_angles(&theta), p)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total / count as f64
}
