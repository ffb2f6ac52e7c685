//! Sobolev norms of densities and the wave-field norms ||u||_alpha,
//! ||u||_A and ||u||_L. Spectral paths reduce every norm to per-degree
//! energies times radial Bessel integrals; the direct path integrates
//! |L^{alpha+1} u|^2 <x>^{-3} over R^d by quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::multipliers::{apply, l_alpha_seq, sobolev_weight};
use crate::quadrature::gauss_legendre;
use crate::radial::RadialIntegralCache;
use crate::sphere::{degree_offset, mu_order, HarmonicSpectrum, SphereQuadrature};
use crate::wavefield::{c_d, extend, WaveField};

/// ||f||_{H^alpha}.
pub fn sobolev_norm(f: &HarmonicSpectrum, alpha: f64) -> f64 {
    sobolev_norm_sq(f, alpha).sqrt()
}

pub fn sobolev_norm_sq(f: &HarmonicSpectrum, alpha: f64) -> f64 {
    let d = f.dim();
    f.degree_energies()
        .iter()
        .enumerate()
        .map(|(l, e)| sobolev_weight(d, l).powf(2.0 * alpha) * e)
        .sum()
}

/// (1/R) int_0^R J_mu^2 r (1 + r^2)^{-s} dr.
pub fn bessel_avg(mu: f64, s: f64, r_max: f64) -> Result<f64> {
    if !(mu >= 0.0 && s >= 0.0 && r_max > 0.0) || !(mu.is_finite() && s.is_finite() && r_max.is_finite()) {
        return domain(format!("bessel_avg needs mu >= 0, s >= 0, R > 0; got ({mu}, {s}, {r_max})"));
    }
    Ok(RadialIntegralCache::global().average(mu, s, r_max))
}

/// int_0^inf J_mu^2 r <r>^{-3} dr.
pub fn bessel_i3(mu: f64) -> Result<f64> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return domain(format!("bessel_I3 needs mu >= 0, got {mu}"));
    }
    Ok(RadialIntegralCache::global().i3(mu).value)
}

/// int_{mu/a}^{2 mu} J_mu^2 dr on half-unit GL panels.
pub fn bessel_band_integral(mu: f64, a: f64) -> Result<f64> {
    if !(mu > 0.0 && a >= 1.0 && mu.is_finite() && a.is_finite()) {
        return domain(format!("band integral needs mu > 0 and a >= 1, got ({mu}, {a})"));
    }
    let (lo, hi) = (mu / a, 2.0 * mu);
    let panels = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let g = gauss_legendre(40);
    Ok((0..panels)
        .map(|k| g.integrate(lo + k as f64 * h, lo + (k + 1) as f64 * h, |r| crate::special::bessel_j_unchecked(mu, r).powi(2)))
        .sum())
}

/// Maximizer and maximum of `f` over a log grid on [lo, hi], refined by
/// golden-section search around the best grid point.
pub fn sup_log_grid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (points - 1) as f64;
    let vals: Vec<f64> = (0..points).map(|i| f((llo + step * i as f64).exp())).collect();
    let (imax, &vmax) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let mut best = ((llo + step * imax as f64).exp(), vmax);
    let a0 = llo + step * imax.saturating_sub(1) as f64;
    let b0 = llo + step * (imax + 1).min(points - 1) as f64;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a0, b0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1.exp());
    let mut f2 = f(x2.exp());
    for _ in 0..40 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1.exp());
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2.exp());
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x.exp(), v);
        }
    }
    best
}

const SUP_GRID_POINTS: usize = 240;
const SUP_R_MIN: f64 = 1e-2;

/// sup_R bessel_avg(mu, s, R) / ((1 + mu)^{2-2s} I3(mu)).
pub fn lema_ratio(mu: f64, s: f64) -> Result<f64> {
    if !(mu >= 0.5 && s >= 0.0) {
        return domain(format!("lema_ratio needs mu >= 1/2 and s >= 0, got ({mu}, {s})"));
    }
    let cache = RadialIntegralCache::global();
    let (_, sup) = sup_log_grid(|r| cache.average(mu, s, r), SUP_R_MIN, 50.0 * (1.0 + mu), SUP_GRID_POINTS);
    Ok(sup / ((1.0 + mu).powf(2.0 - 2.0 * s) * cache.i3(mu).value))
}

/// ||u||_alpha by the spectral formula.
pub fn norm_alpha_spectral(u: &WaveField, alpha: f64) -> f64 {
    norm_alpha_spectral_sq(u, alpha).sqrt()
}

pub fn norm_alpha_spectral_sq(u: &WaveField, alpha: f64) -> f64 {
    let d = u.dim();
    let cache = RadialIntegralCache::global();
    let sum: f64 = u
        .spectrum
        .degree_energies()
        .iter()
        .enumerate()
        .map(|(l, e)| {
            if *e == 0.0 {
                return 0.0;
            }
            sobolev_weight(d, l).powf(2.0 * (alpha + 1.0)) * e * cache.i3(mu_order(d, l)).value
        })
        .sum();
    c_d(d) * sum
}

/// Composite Gauss-Legendre rule on [0, r_max].
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub r_max: f64,
}

impl RadialRule {
    pub fn panels(r_max: f64, width: f64, nodes_per_panel: usize) -> Self {
        let n = (r_max / width).ceil() as usize;
        let h = r_max / n as f64;
        let g = gauss_legendre(nodes_per_panel);
        let mut nodes = Vec::with_capacity(n * nodes_per_panel);
        let mut weights = Vec::with_capacity(n * nodes_per_panel);
        for k in 0..n {
            for (x, w) in g.mapped(k as f64 * h, (k + 1) as f64 * h) {
                nodes.push(x);
                weights.push(w);
            }
        }
        RadialRule { nodes, weights, r_max }
    }
}

impl Default for RadialRule {
    fn default() -> Self {
        RadialRule::panels(100.0, 1.0, 16)
    }
}

/// ||u||_alpha by quadrature of int |L^{alpha+1} u|^2 <x>^{-3} dx over the
/// ball of radius r_max, plus the spectral tail beyond it.
pub fn norm_alpha_direct(u: &WaveField, alpha: f64, radial: &RadialRule, q: &SphereQuadrature) -> Result<f64> {
    let d = u.dim();
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if q.dim != d {
        return Err(Error::Mismatch(format!("quadrature in d = {}, field in d = {d}", q.dim)));
    }
    let n = u.max_degree();
    if q.exactness_degree < 2 * n {
        return Err(Error::InsufficientQuadrature { have: q.exactness_degree, need: 2 * n });
    }
    let v = extend(&apply(&l_alpha_seq(d, alpha + 1.0), &u.spectrum));
    let table = q.basis_table(n)?;
    let offsets: Vec<usize> = (0..=n).map(|l| degree_offset(d, l)).collect();
    let mut body = 0.0;
    let mut a = vec![Complex64::new(0.0, 0.0); v.spectrum.len()];
    for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let rad = v.radial_factors(r);
        for (l, fac) in rad.iter().enumerate() {
            let coeffs = v.spectrum.degree(l);
            for (k, c) in coeffs.iter().enumerate() {
                a[offsets[l] + k] = fac * c;
            }
        }
        let mut shell = 0.0;
        for (row, &wq) in table.iter().zip(&q.weights) {
            let val: Complex64 = a.iter().zip(row).map(|(c, y)| c * y).sum();
            shell += wq * val.norm_sqr();
        }
        body += wr * r.powi(d as i32 - 1) * (1.0 + r * r).powf(-1.5) * shell;
    }
    let cache = RadialIntegralCache::global();
    let tail: f64 = v
        .spectrum
        .degree_energies()
        .iter()
        .enumerate()
        .map(|(l, e)| {
            let mu = mu_order(d, l);
            e * (cache.i3(mu).value - cache.integral(mu, 1.5, radial.r_max))
        })
        .sum::<f64>()
        * c_d(d);
    Ok((body + tail).sqrt())
}

/// c_d sum_l E_l (1/R) int_0^R J_mu^2 r (1 + r^2)^{-s} dr: the weighted
/// ball average (1/R) int_{|x|<R} |u|^2 (1+|x|^2)^{-s} dx. Any real s.
pub fn weighted_average_sq(u: &WaveField, s: f64, r_max: f64) -> f64 {
    energy_average_sq(u.dim(), &u.spectrum.degree_energies(), s, r_max)
}

/// The weighted ball average for a field whose degree-l part carries
/// energy `energies[l]`.
pub fn energy_average_sq(d: usize, energies: &[f64], s: f64, r_max: f64) -> f64 {
    let cache = RadialIntegralCache::global();
    let sum: f64 = energies
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0.0)
        .map(|(l, e)| e * cache.average(mu_order(d, l), s, r_max))
        .sum();
    c_d(d) * sum
}

/// sup over R of [`energy_average_sq`]; for s = 0 the large-R limit also
/// enters the supremum.
pub fn energy_a_norm_sq(d: usize, energies: &[f64], s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return domain(format!("A-norm needs s >= 0, got {s}"));
    }
    if energies.iter().all(|e| *e == 0.0) {
        return Ok(0.0);
    }
    let top = energies.iter().rposition(|e| *e > 0.0).unwrap_or(0);
    let hi = (50.0 * (1.0 + mu_order(d, top))).max(2000.0);
    let (_, sup) = sup_log_grid(|r| energy_average_sq(d, energies, s, r), SUP_R_MIN, hi, SUP_GRID_POINTS);
    if s == 0.0 {
        return Ok(sup.max(energy_limit_sq(d, energies)));
    }
    Ok(sup)
}

/// ||u||_A^2 with weight (1 + |x|^2)^{-s}: sup over R of the weighted average.
pub fn hw_a_norm_sq(u: &WaveField, s: f64) -> Result<f64> {
    energy_a_norm_sq(u.dim(), &u.spectrum.degree_energies(), s)
}

pub fn hw_a_norm(u: &WaveField, s: f64) -> Result<f64> {
    Ok(hw_a_norm_sq(u, s)?.sqrt())
}

/// lim_R (1/R) int_0^R J_mu^2 r dr, extrapolated from period-averaged
/// values at R = 500, 1000, 2000 with a fit L + a/R + b/R^2.
pub fn bessel_avg_limit(mu: f64) -> f64 {
    let cache = RadialIntegralCache::global();
    let g = gauss_legendre(24);
    let smoothed = |r: f64| {
        let mean = g.integrate(r, r + PI, |x| cache.integral(mu, 0.0, x)) / PI;
        mean / (r + 0.5 * PI)
    };
    let (f1, f2, f3) = (smoothed(500.0), smoothed(1000.0), smoothed(2000.0));
    // Richardson in h = 1/R with ratio 2 removes a/R, then b/R^2.
    let g12 = 2.0 * f2 - f1;
    let g23 = 2.0 * f3 - f2;
    (4.0 * g23 - g12) / 3.0
}

pub fn hw_l_limit_sq(u: &WaveField) -> f64 {
    energy_limit_sq(u.dim(), &u.spectrum.degree_energies())
}

pub fn energy_limit_sq(d: usize, energies: &[f64]) -> f64 {
    let sum: f64 = energies
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0.0)
        .map(|(l, e)| e * bessel_avg_limit(mu_order(d, l)))
        .sum();
    c_d(d) * sum
}

/// ||u||_L.
pub fn hw_l_limit(u: &WaveField) -> f64 {
    hw_l_limit_sq(u).sqrt()
}
