//! Special functions: d-dimensional Legendre polynomials, Bessel functions of
//! the first kind of real order, gamma/beta, and the Bessel envelope bounds.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Order of a Bessel function. Produced from a harmonic degree by
/// [`BesselOrder::from_degree`], or standalone for envelope sweeps.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder {
    pub mu: f64,
}

impl BesselOrder {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return domain(format!("Bessel order must be finite and >= 0, got {mu}"));
        }
        Ok(BesselOrder { mu })
    }

    /// mu(l) = l + (d - 2)/2.
    pub fn from_degree(d: usize, ell: usize) -> Self {
        BesselOrder { mu: ell as f64 + 0.5 * (d as f64 - 2.0) }
    }

    pub fn eval(self, r: f64) -> Result<f64> {
        bessel_j(self.mu, r)
    }
}

// ---------------------------------------------------------------------------
// Gamma and beta
// ---------------------------------------------------------------------------

#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];
const LANCZOS_G: f64 = 7.0;

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Gamma function for real x (poles at non-positive integers return NaN).
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    if x >= 10.0 {
        // Stirling with an exact base keeps pow() at ulp accuracy.
        let half = x.powf(0.5 * (x - 0.5));
        return (2.0 * PI).sqrt() * half * ((-x).exp() * half) * stirling_correction(x).exp();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // t^(z+1/2) split in halves so large x does not overflow early.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * ((-t).exp() * half) * lanczos_sum(z)
}

// Stirling remainder 1/(12x) - 1/(360x^3) + ... , accurate for x >= 10.
fn stirling_correction(x: f64) -> f64 {
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
    ];
    let x2 = 1.0 / (x * x);
    let mut acc = 0.0;
    for &c in C.iter().rev() {
        acc = acc * x2 + c;
    }
    acc / x
}

/// ln Gamma(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x >= 10.0 {
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_correction(x)
    } else if x >= 0.5 {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    } else {
        (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x)
    }
}

/// ln(Gamma(b) / Gamma(a + b)) for a > 0, b >= 10 without cancellation.
fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    let ab = a + b;
    -(b - 0.5) * (a / b).ln_1p() - a * ab.ln() + a + stirling_correction(b) - stirling_correction(ab)
}

/// Euler beta function B(x, y) = Gamma(x)Gamma(y)/Gamma(x+y).
pub fn beta_fn(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return domain(format!("beta needs positive finite arguments, got ({x}, {y})"));
    }
    Ok(ln_beta(x, y).exp())
}

/// ln B(x, y) for x, y > 0.
pub fn ln_beta(x: f64, y: f64) -> f64 {
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    if a + b < 150.0 {
        return (gamma(a) * gamma(b) / gamma(a + b)).ln();
    }
    if b >= 10.0 {
        ln_gamma(a) + ln_gamma_ratio(a, b)
    } else {
        ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
    }
}

// ---------------------------------------------------------------------------
// Legendre polynomials P_{l,d}
// ---------------------------------------------------------------------------

/// P_{l,d}(s), normalized to P_{l,d}(1) = 1.
pub fn legendre_pld(d: usize, ell: usize, s: f64) -> Result<f64> {
    if d < 2 {
        return domain(format!("dimension must be >= 2, got {d}"));
    }
    if !(-1.0..=1.0).contains(&s) {
        return domain(format!("argument must lie in [-1, 1], got {s}"));
    }
    Ok(*legendre_pld_all(d, ell, s).last().unwrap())
}

/// [P_{0,d}(s), ..., P_{n,d}(s)] by the three-term recurrence.
pub fn legendre_pld_all(d: usize, n: usize, s: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n == 0 {
        return p;
    }
    p.push(s);
    let dm2 = d as f64 - 2.0;
    for ell in 1..n {
        let l = ell as f64;
        let next = ((2.0 * l + dm2) * s * p[ell] - l * p[ell - 1]) / (l + dm2);
        p.push(next);
    }
    p
}

/// [P_{l,d}(1 - w) - 1] for l = 0..=n, accurate when w = 1 - cos(tau) is tiny.
pub fn legendre_pld_minus_one_all(d: usize, n: usize, w: f64) -> Vec<f64> {
    let mut q = Vec::with_capacity(n + 1);
    legendre_pld_minus_one_into(d, n, w, &mut q);
    q
}

pub(crate) fn legendre_pld_minus_one_into(d: usize, n: usize, w: f64, q: &mut Vec<f64>) {
    q.clear();
    q.push(0.0);
    if n == 0 {
        return;
    }
    q.push(-w);
    let dm2 = d as f64 - 2.0;
    let s = 1.0 - w;
    for ell in 1..n {
        let l = ell as f64;
        let a = 2.0 * l + dm2;
        let next = (a * (s * q[ell] - w) - l * q[ell - 1]) / (l + dm2);
        q.push(next);
    }
}

// ---------------------------------------------------------------------------
// Bessel functions
// ---------------------------------------------------------------------------

/// Radius below which the ascending series is always used.
pub const SERIES_RADIUS: f64 = 8.0;
/// Radius above which the Hankel expansion anchors the recurrences.
pub const HANKEL_RADIUS: f64 = 25.0;

/// J_mu(r) for real mu >= 0 and r >= 0.
pub fn bessel_j(mu: f64, r: f64) -> Result<f64> {
    if mu.is_nan() || r.is_nan() {
        return domain("NaN argument to bessel_j");
    }
    if !(mu.is_finite() && r.is_finite()) || mu < 0.0 || r < 0.0 {
        return domain(format!("bessel_j needs finite mu >= 0 and r >= 0, got ({mu}, {r})"));
    }
    Ok(bessel_j_unchecked(mu, r))
}

/// [`bessel_j`] without argument validation, for hot loops.
pub fn bessel_j_unchecked(mu: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if mu == 0.0 { 1.0 } else { 0.0 };
    }
    if r <= SERIES_RADIUS || 0.25 * r * r <= 0.5 * (mu + 1.0) {
        return bessel_series(mu, r);
    }
    if r >= HANKEL_RADIUS {
        return bessel_large_argument(mu, r);
    }
    bessel_miller_neumann(mu, r)
}

/// (r/2)^mu / Gamma(mu + 1).
fn series_lead(mu: f64, r: f64) -> f64 {
    let h = 0.5 * r;
    if mu < 140.0 {
        let v = h.powf(mu) / gamma(mu + 1.0);
        if v.is_finite() && v > 1e-290 {
            return v;
        }
    }
    (mu * h.ln() - ln_gamma(mu + 1.0)).exp()
}

/// Ascending power series; exposed for branch-overlap checks.
pub fn bessel_series(mu: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if mu == 0.0 { 1.0 } else { 0.0 };
    }
    let lead = series_lead(mu, r);
    if lead == 0.0 {
        return 0.0;
    }
    let q = -0.25 * r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..1000 {
        let k = k as f64;
        term *= q / (k * (k + mu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Hankel's asymptotic P, Q for order nu at argument x.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let m4 = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (m4 - odd * odd) / (k as f64 * 8.0 * x);
        if next == 0.0 || (next.abs() > prev && k > 2) {
            break;
        }
        prev = next.abs();
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn bessel_hankel(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    // chi = x - (nu/2 + 1/4) pi, expanded so the large x carries no phase loss.
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Downward-recurrence start offset past order `x`.
fn miller_margin(x: f64) -> usize {
    20 + (60.0 * (0.5 * x.max(1.0)).sqrt()).powf(2.0 / 3.0).ceil() as usize
}

struct MillerRun {
    target: f64,
    f0: f64,
    f1: f64,
    neumann: f64,
}

/// Miller's downward recurrence for orders nu0 + k, k = 0..=start.
fn miller(nu0: f64, n_target: usize, r: f64, start: usize, with_neumann: bool) -> MillerRun {
    let coeffs = if with_neumann { neumann_coefficients(nu0, start / 2 + 1) } else { Vec::new() };
    let mut f_next = 0.0; // f_{k+1}
    let mut f_k = 1e-30; // f_k, k = start
    let mut target = if start == n_target { f_k } else { 0.0 };
    let mut f1 = if start == 1 { f_k } else { 0.0 };
    let mut neumann = if with_neumann && start.is_multiple_of(2) { coeffs[start / 2] * f_k } else { 0.0 };
    for k in (1..=start).rev() {
        let f_prev = 2.0 * (nu0 + k as f64) / r * f_k - f_next;
        f_next = f_k;
        f_k = f_prev;
        let idx = k - 1;
        if idx == n_target {
            target = f_k;
        }
        if idx == 1 {
            f1 = f_k;
        }
        if with_neumann && idx % 2 == 0 {
            neumann += coeffs[idx / 2] * f_k;
        }
        if f_k.abs() > 1e200 {
            let s = 1e-200;
            f_k *= s;
            f_next *= s;
            target *= s;
            f1 *= s;
            neumann *= s;
        }
    }
    MillerRun { target, f0: f_k, f1, neumann }
}

/// Coefficients of (r/2)^nu = sum_k c_k J_{nu+2k}(r).
fn neumann_coefficients(nu0: f64, count: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(count);
    let g0 = gamma(nu0 + 1.0);
    c.push(g0);
    let mut g = g0;
    for k in 1..count {
        let kf = k as f64;
        if k > 1 {
            g *= (nu0 + kf - 1.0) / kf;
        }
        c.push((nu0 + 2.0 * kf) * g);
    }
    c
}

fn split_order(mu: f64) -> (f64, usize) {
    let n = mu.floor();
    (mu - n, n as usize)
}

fn bessel_miller_neumann(mu: f64, r: f64) -> f64 {
    let (nu0, n) = split_order(mu);
    let start = n.max(r.ceil() as usize) + miller_margin(mu.max(r));
    let run = miller(nu0, n, r, start, true);
    run.target * (0.5 * r).powf(nu0) / run.neumann
}

fn bessel_large_argument(mu: f64, r: f64) -> f64 {
    let (nu0, n) = split_order(mu);
    let j0 = bessel_hankel(nu0, r);
    if n == 0 {
        return j0;
    }
    let j1 = bessel_hankel(nu0 + 1.0, r);
    if mu <= r {
        let (mut a, mut b) = (j0, j1);
        for k in 1..n {
            let c = 2.0 * (nu0 + k as f64) / r * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    let start = n + miller_margin(mu);
    let run = miller(nu0, n, r, start, false);
    let scale = (run.f0 * j0 + run.f1 * j1) / (run.f0 * run.f0 + run.f1 * run.f1);
    run.target * scale
}

/// Regime envelope for |J_mu(r)| without implied constants; the band
/// mu/4 < r < 2mu uses the transition bound mu^{-1/3}.
pub fn bessel_envelope(mu: f64, r: f64) -> f64 {
    if r < 1.0 {
        series_lead(mu, r)
    } else if r <= 0.25 * mu {
        let root = (mu * mu - r * r).sqrt();
        (root - 0.5 * mu.ln() - mu * ((mu + root) / r).ln()).exp()
    } else if r >= 2.0 * mu {
        r.powf(-0.5)
    } else {
        mu.powf(-1.0 / 3.0)
    }
}
