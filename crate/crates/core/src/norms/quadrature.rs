use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{support_lattice, NormEstimate, NormMethod};
use crate::error::{Error, Result};
use crate::polynomial::DirichletPolynomial;

const GL_ORDER: usize = 16;
const PANELS_PER_CHUNK: usize = 512;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if order == 0 { 1.0 } else { p1 };
            let pn1 = if order == 1 { 1.0 } else { p0 };
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

#[inline]
fn abs_pow(v: Complex64, p: f64) -> f64 {
    if p == 2.0 {
        v.norm_sqr()
    } else if p == 4.0 {
        let s = v.norm_sqr();
        s * s
    } else {
        v.norm().powf(p)
    }
}

/// `(1/2T) ∫_{-T}^{T} |Σ a_n e^{-iλ_n t}|^p dt` by composite Gauss–Legendre.
///
/// Panels are one period of the widest frequency difference of `|f|^p`
/// long, so their number grows like `T·spread/π`. Phases advance from
/// panel to panel by multiplication and are re-synchronized per chunk.
pub fn besicovitch_mean(lambdas: &[f64], coeffs: &[Complex64], p: f64, t_half: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let shifted: Vec<f64> = lambdas.iter().map(|l| l - center).collect();
    let spread = (hi - lo) * (p / 2.0).max(1.0);
    if spread == 0.0 {
        return abs_pow(coeffs.iter().sum(), p);
    }
    let panels = ((t_half * spread / PI).ceil() as usize).max(4);
    let width = 2.0 * t_half / panels as f64;
    let (xs, ws) = gauss_legendre(GL_ORDER);
    let node_rot: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|x| {
            let off = 0.5 * (x + 1.0) * width;
            shifted.iter().map(|l| Complex64::from_polar(1.0, -l * off)).collect()
        })
        .collect();
    let panel_rot: Vec<Complex64> = shifted.iter().map(|l| Complex64::from_polar(1.0, -l * width)).collect();
    let chunks = panels.div_ceil(PANELS_PER_CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let first = chunk * PANELS_PER_CHUNK;
            let last = (first + PANELS_PER_CHUNK).min(panels);
            let t0 = -t_half + first as f64 * width;
            let mut z: Vec<Complex64> =
                coeffs.iter().zip(&shifted).map(|(a, l)| a * Complex64::from_polar(1.0, -l * t0)).collect();
            let mut acc = 0.0;
            for _ in first..last {
                let mut panel = 0.0;
                for (rot, w) in node_rot.iter().zip(&ws) {
                    let v: Complex64 = z.iter().zip(rot).map(|(a, r)| a * r).sum();
                    panel += w * abs_pow(v, p);
                }
                acc += panel;
                for (a, r) in z.iter_mut().zip(&panel_rot) {
                    *a *= r;
                }
            }
            acc
        })
        .collect();
    let total: f64 = partial.iter().sum();
    total * 0.5 * width / (2.0 * t_half)
}

/// Schedule `T/4, T/2, T` with `T = 10^4 / (smallest support gap)`.
pub fn default_schedule(d: &DirichletPolynomial) -> Vec<f64> {
    scaled_schedule(d, 1e4)
}

pub fn scaled_schedule(d: &DirichletPolynomial, factor: f64) -> Vec<f64> {
    let gap = d.min_gap().unwrap_or(1.0).max(1e-12);
    let t = factor / gap;
    vec![t / 4.0, t / 2.0, t]
}

/// Besicovitch `p`-norm from truncated means over a schedule of `T`.
///
/// When the support frequencies are integer multiples of one generator the
/// boundary function is periodic and the single-period rule of
/// [`norm_periodic`] is used instead.
pub fn norm_besicovitch(d: &DirichletPolynomial, p: f64, schedule: &[f64]) -> Result<NormEstimate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    if d.is_zero() {
        return Ok(NormEstimate::exact(0.0, NormMethod::BesicovitchQuadrature));
    }
    if let Some(est) = periodic(d, p)? {
        return Ok(est);
    }
    if schedule.len() < 3 || schedule.windows(2).any(|w| !(w[1] > w[0])) || !(schedule[0] > 0.0) {
        return Err(Error::InvalidArgument("schedule must be increasing with at least 3 positive entries".into()));
    }
    let lambdas: Vec<f64> = d.terms().keys().map(|&n| d.frequency().lambda(n)).collect();
    let coeffs: Vec<Complex64> = d.terms().values().copied().collect();
    let roots: Vec<f64> =
        schedule.iter().map(|&t| besicovitch_mean(&lambdas, &coeffs, p, t).max(0.0).powf(1.0 / p)).collect();
    let diffs: Vec<f64> = roots.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let error = *diffs.last().unwrap();
    let converged = diffs.windows(2).all(|w| w[1] <= w[0]);
    Ok(NormEstimate {
        value: *roots.last().unwrap(),
        method: NormMethod::BesicovitchQuadrature,
        error,
        lower_bound: false,
        converged,
    })
}

/// Single-period quadrature for supports generating a rank ≤ 1 group.
pub fn norm_periodic(d: &DirichletPolynomial, p: f64) -> Result<NormEstimate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    if d.is_zero() {
        return Ok(NormEstimate::exact(0.0, NormMethod::PeriodicExact));
    }
    periodic(d, p)?.ok_or_else(|| Error::InvalidArgument("support frequencies are not commensurable".into()))
}

fn periodic(d: &DirichletPolynomial, p: f64) -> Result<Option<NormEstimate>> {
    let sl = support_lattice(d)?;
    if sl.rank > 1 {
        return Ok(None);
    }
    let ks: Vec<i64> = sl.coords.iter().map(|c| c.first().copied().unwrap_or(0)).collect();
    let spread = (ks.iter().max().unwrap() - ks.iter().min().unwrap()) as usize;
    // trapezoid on a period is exact for trigonometric polynomials of degree < m
    let need = (p.ceil() as usize) * spread + 1;
    let m = (4 * need).max(64).next_power_of_two();
    let mean = |m: usize| -> f64 {
        (0..m)
            .map(|j| {
                let theta = TAU * j as f64 / m as f64;
                let v: Complex64 =
                    sl.coeffs.iter().zip(&ks).map(|(a, &k)| a * Complex64::from_polar(1.0, -(k as f64) * theta)).sum();
                abs_pow(v, p)
            })
            .sum::<f64>()
            / m as f64
    };
    let fine = mean(2 * m).powf(1.0 / p);
    let coarse = mean(m).powf(1.0 / p);
    Ok(Some(NormEstimate {
        value: fine,
        method: NormMethod::PeriodicExact,
        error: (fine - coarse).abs(),
        lower_bound: false,
        converged: true,
    }))
}
