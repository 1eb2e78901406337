use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{support_lattice, NormEstimate, NormMethod, SupportLattice};
use crate::error::Result;
use crate::polynomial::DirichletPolynomial;

/// Hard limit on torus dimensions whatever the options say.
const TORUS_DIMS_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupStrategy {
    /// Periodic for rank one, torus up to `max_torus_dims`, line search beyond.
    Auto,
    Periodic,
    Torus,
    LineSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupOptions {
    pub strategy: SupStrategy,
    /// Minimum grid points on one period (rank one).
    pub grid: usize,
    /// Maximum grid points on one period (rank one). Wide exponent spans
    /// hit this cap and get a looser certificate.
    pub periodic_budget: usize,
    pub max_torus_dims: usize,
    /// Total grid points allowed on the torus.
    pub torus_budget: usize,
    /// Sample points for the line search.
    pub line_points: usize,
    /// Golden-section refinement around the best grid points.
    pub refine: bool,
}

impl Default for SupOptions {
    fn default() -> Self {
        SupOptions {
            strategy: SupStrategy::Auto,
            grid: 4096,
            periodic_budget: 1 << 22,
            max_torus_dims: 4,
            torus_budget: 1 << 20,
            line_points: 200_000,
            refine: true,
        }
    }
}

/// `sup_t |Σ a_n e^{-iλ_n t}|`, which equals the sup over the right half
/// plane.
///
/// The support frequencies are written over a ℤ-basis `g` of the group they
/// generate, `λ_n = Σ c_nj g_j`; since the `g_j` are ℚ-independent the line
/// `t ↦ (-t g_j)` is dense in the torus and the sup equals the maximum of
/// `F(θ) = Σ a_n e^{i c_n·θ}`. Grid maxima are certified with the Lipschitz
/// constant `Σ |a_n| ‖c_n‖₁` in the max-norm on angles; in rank one the
/// tighter cosine bound for sums of bounded type is used when it applies. Past the torus
/// dimension limit only a line-search lower bound is returned (with an
/// infinite error).
pub fn norm_sup(d: &DirichletPolynomial, opts: &SupOptions) -> Result<NormEstimate> {
    if d.is_zero() {
        return Ok(NormEstimate::exact(0.0, NormMethod::PeriodicExact));
    }
    let sl = support_lattice(d)?;
    if sl.rank == 0 {
        let v: Complex64 = sl.coeffs.iter().sum();
        return Ok(certified(v.norm(), v.norm(), rounding(&sl), NormMethod::PeriodicExact));
    }
    let strategy = match opts.strategy {
        SupStrategy::Auto if sl.rank == 1 => SupStrategy::Periodic,
        SupStrategy::Auto if sl.rank <= opts.max_torus_dims.min(TORUS_DIMS_CAP) => SupStrategy::Torus,
        SupStrategy::Auto => SupStrategy::LineSearch,
        SupStrategy::Periodic | SupStrategy::Torus if sl.rank > TORUS_DIMS_CAP => SupStrategy::LineSearch,
        SupStrategy::Periodic if sl.rank > 1 => SupStrategy::Torus,
        s => s,
    };
    Ok(match strategy {
        SupStrategy::Periodic => periodic_sup(&sl, opts),
        SupStrategy::Torus => torus_sup(&sl, opts),
        _ => line_search(&sl, opts),
    })
}

fn eval(sl: &SupportLattice, theta: &[f64]) -> f64 {
    sl.coords
        .iter()
        .zip(&sl.coeffs)
        .map(|(c, a)| {
            let phase: f64 = c.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
            a * Complex64::from_polar(1.0, phase)
        })
        .sum::<Complex64>()
        .norm()
}

/// Lipschitz constant of `|F|` in the max norm of the angles. Exponents are
/// centred per axis first, which leaves `|F|` unchanged.
fn lipschitz(sl: &SupportLattice) -> f64 {
    let centre: Vec<f64> = (0..sl.rank)
        .map(|j| {
            let (lo, hi) = sl.coords.iter().fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c[j]), hi.max(c[j])));
            (lo as f64 + hi as f64) / 2.0
        })
        .collect();
    sl.coords
        .iter()
        .zip(&sl.coeffs)
        .map(|(c, a)| a.norm() * c.iter().zip(&centre).map(|(&k, m)| (k as f64 - m).abs()).sum::<f64>())
        .sum()
}

/// Maximizes `g` on `[lo, hi]` by golden-section search, assuming one peak.
fn golden_max(lo: f64, hi: f64, mut g: impl FnMut(f64) -> f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Coordinate-wise golden-section ascent in a box of half-width `h`.
fn refine(sl: &SupportLattice, start: &[f64], h: f64) -> f64 {
    let mut theta = start.to_vec();
    let mut best = eval(sl, &theta);
    for _ in 0..4 {
        for j in 0..theta.len() {
            let centre = theta[j];
            let (x, v) = golden_max(centre - h, centre + h, |x| {
                let mut t = theta.clone();
                t[j] = x;
                eval(sl, &t)
            });
            if v > best {
                best = v;
                theta[j] = x;
            }
        }
    }
    best
}

/// Bound on the floating-point error of one evaluation of `|F|`.
fn rounding(sl: &SupportLattice) -> f64 {
    let l1: f64 = sl.coeffs.iter().map(|a| a.norm()).sum();
    8.0 * f64::EPSILON * (sl.coeffs.len() as f64 + 2.0) * l1
}

fn certified(value: f64, grid_max: f64, bound: f64, method: NormMethod) -> NormEstimate {
    NormEstimate { value, method, error: (grid_max + bound - value).max(0.0), lower_bound: false, converged: true }
}

fn periodic_sup(sl: &SupportLattice, opts: &SupOptions) -> NormEstimate {
    let ks: Vec<i64> = sl.coords.iter().map(|c| c[0]).collect();
    let span = (ks.iter().max().unwrap() - ks.iter().min().unwrap()) as usize;
    let m = opts.grid.max(64 * span.max(1)).min(opts.periodic_budget.max(opts.grid));
    let h = TAU / m as f64;
    let values: Vec<f64> = (0..m).into_par_iter().with_min_len(4096).map(|j| eval(sl, &[j as f64 * h])).collect();
    let (arg, grid_max) = top(&values, 1)[0];
    let mut value = grid_max;
    if opts.refine {
        value = value.max(refine(sl, &[arg as f64 * h], h));
    }
    let r = rounding(sl);
    // a real exponential sum of type σ peaking at M stays above M cos(σt)
    // within distance t of the peak; here σ = span/2 and t ≤ h/2
    let x = span as f64 * h / 4.0;
    let cosine = if x < FRAC_PI_2 { (grid_max + r) / x.cos() - grid_max } else { f64::INFINITY };
    let bound = (lipschitz(sl) * h / 2.0 + r).min(cosine);
    certified(value, grid_max, bound, NormMethod::PeriodicExact)
}

fn torus_sup(sl: &SupportLattice, opts: &SupOptions) -> NormEstimate {
    let dims = sl.rank;
    let res = ((opts.torus_budget as f64).powf(1.0 / dims as f64).floor() as usize).max(4);
    let h = TAU / res as f64;
    let inner = res.pow(dims as u32 - 1);
    // grid phases are multiples of h, looked up from the res-th roots of unity
    let roots: Vec<Complex64> = (0..res).map(|m| Complex64::from_polar(1.0, m as f64 * h)).collect();
    let coords: Vec<Vec<usize>> =
        sl.coords.iter().map(|c| c.iter().map(|&k| k.rem_euclid(res as i64) as usize).collect()).collect();
    let values: Vec<f64> = (0..res * inner)
        .into_par_iter()
        .with_min_len(1024)
        .map(|mut idx| {
            let mut digits = [0usize; TORUS_DIMS_CAP];
            for d in digits.iter_mut().take(dims) {
                *d = idx % res;
                idx /= res;
            }
            coords
                .iter()
                .zip(&sl.coeffs)
                .map(|(c, a)| a * roots[c.iter().zip(&digits).map(|(k, m)| k * m).sum::<usize>() % res])
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    let best = top(&values, 4);
    let grid_max = best[0].1;
    let mut value = grid_max;
    if opts.refine {
        for &(idx, _) in &best {
            value = value.max(refine(sl, &grid_point(idx, res, dims, h), h));
        }
    }
    certified(value, grid_max, lipschitz(sl) * h / 2.0 + rounding(sl), NormMethod::TorusGrid)
}

fn grid_point(mut idx: usize, res: usize, dims: usize, h: f64) -> Vec<f64> {
    (0..dims)
        .map(|_| {
            let m = idx % res;
            idx /= res;
            m as f64 * h
        })
        .collect()
}

/// Indices and values of the `k` largest entries, largest first.
fn top(values: &[f64], k: usize) -> Vec<(usize, f64)> {
    let order = |a: &usize, b: &usize| values[*b].total_cmp(&values[*a]).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let k = k.clamp(1, idx.len());
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, order);
        idx.truncate(k);
    }
    idx.sort_by(order);
    idx.into_iter().map(|i| (i, values[i])).collect()
}

/// Samples `|f(t)|` on `t ∈ [0, T]` with a step resolving the widest
/// frequency, then refines the best samples.
fn line_search(sl: &SupportLattice, opts: &SupOptions) -> NormEstimate {
    let lo = sl.lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sl.lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let centre = 0.5 * (lo + hi);
    let shifted: Vec<f64> = sl.lambdas.iter().map(|l| l - centre).collect();
    let width = (hi - lo).max(1e-12);
    let step = 0.25 / width;
    let f = |t: f64| -> f64 {
        shifted.iter().zip(&sl.coeffs).map(|(l, a)| a * Complex64::from_polar(1.0, -l * t)).sum::<Complex64>().norm()
    };
    let values: Vec<f64> =
        (0..opts.line_points.max(2)).into_par_iter().with_min_len(4096).map(|j| f(j as f64 * step)).collect();
    let best = top(&values, 8);
    let mut value = best[0].1;
    if opts.refine {
        for &(j, _) in &best {
            let t = j as f64 * step;
            value = value.max(golden_max(t - step, t + step, f).1);
        }
    }
    NormEstimate { value, method: NormMethod::LineSearch, error: f64::INFINITY, lower_bound: true, converged: false }
}
