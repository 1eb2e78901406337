//! Exact rational linear algebra on frequency rows: Bohr decompositions,
//! integer/natural type classification and Hermite-normal-form bases of
//! the subgroup `Σ ℤ λ_n` generated by a prefix.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::precision::HighPrecision;
use crate::rational::{Rational, RationalRow};

/// `λ_n = Σ_k R[n][k] b_k` for `n <= prefix_len`, with the basis `b_k`
/// chosen greedily as a subsequence of `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BohrDecomposition {
    /// 1-based indices `n` with `b_k = λ_n`, in extraction order.
    pub basis_indices: Vec<usize>,
    /// Symbol rows of the basis elements.
    pub basis_rows: Vec<RationalRow>,
    /// One row per `n = 1..=prefix_len`, over basis positions.
    pub matrix: Vec<RationalRow>,
}

impl BohrDecomposition {
    pub fn prefix_len(&self) -> usize {
        self.matrix.len()
    }

    pub fn basis_len(&self) -> usize {
        self.basis_indices.len()
    }

    /// Row of `λ_n` over the basis.
    pub fn row(&self, n: usize) -> Result<&RationalRow> {
        if n == 0 || n > self.matrix.len() {
            return Err(Error::IndexOutOfRange { index: n, len: self.matrix.len() });
        }
        Ok(&self.matrix[n - 1])
    }

    /// Symbol row reconstructed from the Bohr row: `Σ_k R[n][k] row(b_k)`.
    pub fn reconstruct(&self, n: usize) -> Result<RationalRow> {
        Ok(self.row(n)?.combine(&self.basis_rows))
    }

    /// Re-runs elimination on the basis rows and checks every reconstruction.
    pub fn verify(&self, freq: &Frequency) -> bool {
        let mut ech = Echelon::default();
        for row in &self.basis_rows {
            if ech.reduce(row).0.is_zero() {
                return false;
            }
            ech.insert(row.clone(), RationalRow::zero());
        }
        (1..=self.prefix_len()).all(|n| self.reconstruct(n).map(|r| &r == freq.row(n)).unwrap_or(false))
    }
}

/// Row-echelon store over ℚ keyed by pivot column. Each stored row keeps
/// its expression over basis positions.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<usize, (RationalRow, RationalRow)>,
}

impl Echelon {
    /// Returns `(residual, expression)` with `v = residual + Σ expression_k b_k`.
    fn reduce(&self, v: &RationalRow) -> (RationalRow, RationalRow) {
        let mut residual = v.clone();
        let mut expr = RationalRow::zero();
        let mut cursor = 0usize;
        loop {
            let next = residual
                .entries()
                .iter()
                .find(|(c, _)| *c >= cursor && self.rows.contains_key(c))
                .map(|(c, r)| (*c, r.clone()));
            let Some((col, val)) = next else { break };
            let (erow, eexpr) = &self.rows[&col];
            let factor = &val / erow.get(col);
            residual = residual.add_scaled(erow, &-&factor);
            expr = expr.add_scaled(eexpr, &factor);
            cursor = col + 1;
        }
        (residual, expr)
    }

    fn insert(&mut self, residual: RationalRow, expr: RationalRow) {
        let pivot = residual.leading().expect("nonzero residual");
        self.rows.insert(pivot, (residual, expr));
    }
}

/// Greedy left-to-right basis extraction over the first `m` terms.
pub fn extract_basis(freq: &Frequency, m: usize) -> Result<BohrDecomposition> {
    if m > freq.len() {
        return Err(Error::IndexOutOfRange { index: m, len: freq.len() });
    }
    let mut ech = Echelon::default();
    let mut basis_indices = Vec::new();
    let mut basis_rows = Vec::new();
    let mut matrix = Vec::with_capacity(m);
    for n in 1..=m {
        let v = freq.row(n);
        let (residual, expr) = ech.reduce(v);
        if residual.is_zero() {
            matrix.push(expr);
        } else {
            let q = basis_indices.len();
            let unit = RationalRow::unit(q);
            // residual = b_q - Σ expr_k b_k
            let new_expr = unit.add_scaled(&expr, &-Rational::one());
            ech.insert(residual, new_expr);
            basis_indices.push(n);
            basis_rows.push(v.clone());
            matrix.push(unit);
        }
    }
    Ok(BohrDecomposition { basis_indices, basis_rows, matrix })
}

/// ℤ-basis of the subgroup generated by the first `prefix_len` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyLattice {
    pub prefix_len: usize,
    /// Generators `g_j` as rows over the Bohr basis.
    pub generators_over_basis: Vec<RationalRow>,
    /// Generators `g_j` as rows over the frequency symbols.
    pub generators: Vec<RationalRow>,
    pub generator_exact: Vec<HighPrecision>,
    pub generator_values: Vec<f64>,
    /// `λ_n = Σ_j coords[n-1][j] g_j`.
    pub coords: Vec<Vec<BigInt>>,
    /// Same coordinates as doubles (for phases).
    pub coords_f64: Vec<Vec<f64>>,
}

impl FrequencyLattice {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn coords_of(&self, n: usize) -> Result<&[BigInt]> {
        if n == 0 || n > self.prefix_len {
            return Err(Error::IndexOutOfRange { index: n, len: self.prefix_len });
        }
        Ok(&self.coords[n - 1])
    }

    /// Integer coordinates as `i64`, failing only for astronomically large entries.
    pub fn coords_i64(&self, n: usize) -> Result<Vec<i64>> {
        self.coords_of(n)?
            .iter()
            .map(|c| c.to_i64().ok_or_else(|| Error::Invariant("lattice coordinate exceeds i64".into())))
            .collect()
    }

    /// Exact check that `Σ_j coords[n][j] g_j` equals `row(λ_n)` for every `n`.
    pub fn verify(&self, freq: &Frequency) -> bool {
        (1..=self.prefix_len).all(|n| {
            let combo = self.coords[n - 1].iter().enumerate().fold(RationalRow::zero(), |acc, (j, c)| {
                acc.add_scaled(&self.generators[j], &BigRational::from_integer(c.clone()))
            });
            &combo == freq.row(n)
        })
    }
}

/// Integer-lattice basis for a set of rational rows over `ncols` columns.
///
/// Columns are scaled by the LCM of their denominators, the integer rows are
/// put in Hermite normal form, and the HNF rows are scaled back.
pub fn lattice_from_rows(rows: &[RationalRow], ncols: usize) -> Result<(Vec<RationalRow>, Vec<Vec<BigInt>>)> {
    let mut scale = vec![BigInt::one(); ncols];
    for row in rows {
        for (c, r) in row.entries() {
            if *c >= ncols {
                return Err(Error::InvalidArgument(format!("column {c} outside {ncols}")));
            }
            scale[*c] = scale[*c].lcm(r.denom());
        }
    }
    let int_rows: Vec<SparseInt> = rows
        .iter()
        .map(|row| row.entries().iter().map(|(c, r)| (*c, r.numer() * (&scale[*c] / r.denom()))).collect())
        .collect();
    let mut hnf = Hnf::default();
    for row in &int_rows {
        hnf.insert(row.clone());
    }
    hnf.reduce_above_pivots();
    let pivots: Vec<usize> = hnf.rows.keys().copied().collect();
    let generators = hnf
        .rows
        .values()
        .map(|h| RationalRow::from_pairs(h.iter().map(|(c, v)| (*c, BigRational::new(v.clone(), scale[*c].clone())))))
        .collect();
    let coords = int_rows.iter().map(|row| hnf.solve(row, &pivots)).collect::<Result<Vec<_>>>()?;
    Ok((generators, coords))
}

/// HNF lattice of the subgroup `Σ_{n<=m} ℤ λ_n`.
pub fn lattice_basis(freq: &Frequency, m: usize) -> Result<FrequencyLattice> {
    if m == 0 {
        return Err(Error::InvalidArgument("lattice prefix must be nonempty".into()));
    }
    let dec = extract_basis(freq, m)?;
    lattice_from_decomposition(freq, &dec)
}

pub fn lattice_from_decomposition(freq: &Frequency, dec: &BohrDecomposition) -> Result<FrequencyLattice> {
    let (over_basis, coords) = lattice_from_rows(&dec.matrix, dec.basis_len())?;
    let generators: Vec<RationalRow> = over_basis.iter().map(|g| g.combine(&dec.basis_rows)).collect();
    let values = freq.symbol_values();
    let generator_exact: Vec<HighPrecision> = generators.iter().map(|g| g.eval(&values)).collect();
    let generator_values = generator_exact.iter().map(HighPrecision::to_f64).collect();
    let coords_f64 = coords.iter().map(|c| c.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    Ok(FrequencyLattice {
        prefix_len: dec.prefix_len(),
        generators_over_basis: over_basis,
        generators,
        generator_exact,
        generator_values,
        coords,
        coords_f64,
    })
}

type SparseInt = BTreeMap<usize, BigInt>;

/// Incremental row-style Hermite normal form over sparse integer rows.
#[derive(Default)]
struct Hnf {
    rows: BTreeMap<usize, SparseInt>,
}

fn combine(a: &SparseInt, ca: &BigInt, b: &SparseInt, cb: &BigInt) -> SparseInt {
    let mut out = SparseInt::new();
    for (c, v) in a {
        out.insert(*c, v * ca);
    }
    for (c, v) in b {
        let e = out.entry(*c).or_insert_with(BigInt::zero);
        *e += v * cb;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

impl Hnf {
    fn insert(&mut self, mut v: SparseInt) {
        loop {
            let Some((&col, lead)) = v.iter().next() else { return };
            let lead = lead.clone();
            match self.rows.get_mut(&col) {
                None => {
                    if lead.is_negative() {
                        v.values_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows.insert(col, v);
                    return;
                }
                Some(h) => {
                    let a = h[&col].clone();
                    let ext = a.extended_gcd(&lead);
                    let (g, s, t) = (ext.gcd, ext.x, ext.y);
                    // [s t; -lead/g a/g] is unimodular
                    let mut new_h = combine(h, &s, &v, &t);
                    let new_v = combine(&v, &(&a / &g), h, &-(&lead / &g));
                    if new_h.get(&col).is_some_and(|x| x.is_negative()) {
                        new_h.values_mut().for_each(|x| *x = -&*x);
                    }
                    *h = new_h;
                    v = new_v;
                }
            }
        }
    }

    /// Reduces entries above each pivot into `[0, pivot)`.
    fn reduce_above_pivots(&mut self) {
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        for (i, &pi) in pivots.iter().enumerate() {
            for &pj in &pivots[i + 1..] {
                let hj = self.rows[&pj].clone();
                let hi = self.rows.get_mut(&pi).unwrap();
                let Some(x) = hi.get(&pj).cloned() else { continue };
                let q = x.div_floor(&hj[&pj]);
                if !q.is_zero() {
                    *hi = combine(hi, &BigInt::one(), &hj, &-q);
                }
            }
        }
    }

    /// Integer coordinates of `v` in the pivot rows.
    fn solve(&self, v: &SparseInt, pivots: &[usize]) -> Result<Vec<BigInt>> {
        let mut rest = v.clone();
        let mut out = vec![BigInt::zero(); pivots.len()];
        for (j, p) in pivots.iter().enumerate() {
            let Some(x) = rest.get(p).cloned() else { continue };
            let h = &self.rows[p];
            let (q, r) = x.div_rem(&h[p]);
            if !r.is_zero() {
                return Err(Error::Invariant("row not in the HNF lattice".into()));
            }
            rest = combine(&rest, &BigInt::one(), h, &-&q);
            out[j] = q;
        }
        if !rest.is_empty() {
            return Err(Error::Invariant("nonzero remainder after lattice solve".into()));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefixType {
    Natural,
    Integer,
    StrictlyRational,
}

impl PrefixType {
    pub fn is_integer(self) -> bool {
        matches!(self, PrefixType::Natural | PrefixType::Integer)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PrefixType::Natural => "natural",
            PrefixType::Integer => "integer",
            PrefixType::StrictlyRational => "strictly_rational",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrefixClassification {
    pub kind: PrefixType,
    /// Rescaled basis over the Bohr basis, present when the Bohr matrix
    /// itself was not integral.
    pub witness_basis: Option<Vec<RationalRow>>,
    /// Integer rows over the witness basis (when rescaled).
    pub witness_coords: Option<Vec<Vec<BigInt>>>,
    /// Always true: only the prefix was examined.
    pub prefix_only: bool,
}

/// Integer/natural type of the decomposed prefix.
pub fn classify_prefix_type(dec: &BohrDecomposition) -> PrefixClassification {
    let kind = if dec.matrix.iter().all(RationalRow::is_natural) {
        Some(PrefixType::Natural)
    } else if dec.matrix.iter().all(RationalRow::is_integral) {
        Some(PrefixType::Integer)
    } else {
        None
    };
    if let Some(kind) = kind {
        return PrefixClassification { kind, witness_basis: None, witness_coords: None, prefix_only: true };
    }
    match lattice_from_rows(&dec.matrix, dec.basis_len()) {
        Ok((gens, coords)) if gens.len() == dec.basis_len() => PrefixClassification {
            kind: PrefixType::Integer,
            witness_basis: Some(gens),
            witness_coords: Some(coords),
            prefix_only: true,
        },
        _ => PrefixClassification {
            kind: PrefixType::StrictlyRational,
            witness_basis: None,
            witness_coords: None,
            prefix_only: true,
        },
    }
}

/// Decides `Σ_{n∈A} λ_n = Σ_{n∈B} λ_n` exactly through lattice coordinates.
pub fn equal_frequency_sum(lat: &FrequencyLattice, a: &[usize], b: &[usize]) -> Result<bool> {
    let mut acc = vec![BigInt::zero(); lat.rank()];
    for &n in a {
        for (x, c) in acc.iter_mut().zip(lat.coords_of(n)?) {
            *x += c;
        }
    }
    for &n in b {
        for (x, c) in acc.iter_mut().zip(lat.coords_of(n)?) {
            *x -= c;
        }
    }
    Ok(acc.iter().all(Zero::is_zero))
}
