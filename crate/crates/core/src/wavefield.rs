//! The extension operator E and entire Helmholtz solutions given by their
//! spectra:
//!
//! u(r theta) = sum_{l,j} (2 pi)^{d/2} (-i)^l f_{lj} J_{mu(l)}(r) r^{-(d-2)/2} Y_l^j(theta).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multipliers::{apply, ZonalMultiplier};
use crate::special::{bessel_j_unchecked, gamma};
use crate::sphere::{basis_values_into, mu_order, Direction, HarmonicSpectrum, SphereQuadrature};

/// Radius below which the radial profile uses its own power series.
const SMALL_RADIUS: f64 = 1e-2;

/// (2 pi)^{d/2}: modulus of the series constant.
pub fn kappa(d: usize) -> f64 {
    (2.0 * PI).powf(0.5 * d as f64)
}

/// c_d = kappa(d)^2 = (2 pi)^d.
pub fn c_d(d: usize) -> f64 {
    (2.0 * PI).powi(d as i32)
}

/// (-i)^l.
pub fn phase(ell: usize) -> Complex64 {
    match ell % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// J_{mu(l)}(r) r^{-(d-2)/2}, finite at r = 0.
pub fn radial_profile(d: usize, ell: usize, r: f64) -> f64 {
    let mu = mu_order(d, ell);
    if r < SMALL_RADIUS {
        // 2^{-mu}/Gamma(mu+1) r^l sum_k (-r^2/4)^k / (k! (mu+1)_k)
        let q = -0.25 * r * r;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let k = k as f64;
            term *= q / (k * (mu + k));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return 2f64.powf(-mu) / gamma(mu + 1.0) * r.powi(ell as i32) * sum;
    }
    bessel_j_unchecked(mu, r) * r.powf(-0.5 * (d as f64 - 2.0))
}

/// Entire solution of the Helmholtz equation represented by its density spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub spectrum: HarmonicSpectrum,
}

/// u = E phi.
pub fn extend(phi: &HarmonicSpectrum) -> WaveField {
    WaveField { spectrum: phi.clone() }
}

impl WaveField {
    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn max_degree(&self) -> usize {
        self.spectrum.max_degree()
    }

    /// E(m phi), which equals m applied to u in the angular variable.
    pub fn apply_multiplier(&self, m: &ZonalMultiplier) -> WaveField {
        WaveField { spectrum: apply(m, &self.spectrum) }
    }

    /// Per-degree factors (2 pi)^{d/2} (-i)^l J_mu(r) r^{-(d-2)/2}.
    pub fn radial_factors(&self, r: f64) -> Vec<Complex64> {
        let d = self.dim();
        let k = kappa(d);
        (0..=self.max_degree()).map(|l| phase(l) * (k * radial_profile(d, l, r))).collect()
    }

    /// u at a point of R^d, d in {2, 3}.
    pub fn eval_point(&self, x: &[f64]) -> Result<Complex64> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::Mismatch(format!("point in R^{} for d = {d}", x.len())));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let theta = if r > 0.0 {
            Direction::normalized(x)?
        } else {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            Direction::new(e)?
        };
        eval_field(self, r, &theta)
    }
}

/// Truncated series value u(r theta).
pub fn eval_field(u: &WaveField, r: f64, theta: &Direction) -> Result<Complex64> {
    let d = u.dim();
    let n = u.max_degree();
    let mut y = Vec::new();
    basis_values_into(d, n, theta, &mut y)?;
    let radial = u.radial_factors(r);
    let mut acc = Complex64::new(0.0, 0.0);
    for (ell, rad) in radial.iter().enumerate() {
        let (coeffs, start) = (u.spectrum.degree(ell), crate::sphere::degree_offset(d, ell));
        let s: Complex64 = coeffs.iter().zip(&y[start..start + coeffs.len()]).map(|(c, v)| c * v).sum();
        acc += rad * s;
    }
    Ok(acc)
}

/// Smallest product-rule degree that integrates e^{-i x.xi} phi(xi) to
/// near machine precision for |x| <= radius.
pub fn direct_quadrature_degree(max_degree: usize, radius: f64) -> usize {
    (2 * max_degree).max(max_degree + radius.ceil() as usize + 24)
}

/// Direct quadrature of int e^{-i x.xi} phi(xi) d sigma(xi).
pub fn eval_direct(phi: &HarmonicSpectrum, x: &[f64], q: &SphereQuadrature) -> Result<Complex64> {
    let d = phi.dim();
    if x.len() != d || q.dim != d {
        return Err(Error::Mismatch(format!("point in R^{}, quadrature in d = {}, spectrum in d = {d}", x.len(), q.dim)));
    }
    let radius = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let need = direct_quadrature_degree(phi.max_degree(), radius);
    if q.exactness_degree < need {
        return Err(Error::InsufficientQuadrature { have: q.exactness_degree, need });
    }
    let n = phi.max_degree();
    let mut y = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, &w) in q.nodes.iter().zip(&q.weights) {
        basis_values_into(d, n, xi, &mut y)?;
        let f: Complex64 = phi.coeffs().iter().zip(&y).map(|(c, v)| c * v).sum();
        let dot: f64 = x.iter().zip(xi.as_slice()).map(|(a, b)| a * b).sum();
        acc += Complex64::from_polar(w, -dot) * f;
    }
    Ok(acc)
}

/// |Delta_h u(x) + u(x)| with the central second-difference Laplacian.
pub fn helmholtz_residual(u: &WaveField, x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return crate::error::domain("step h must be positive");
    }
    let d = u.dim();
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let u0 = u.eval_point(x)?;
    let mut lap = Complex64::new(0.0, 0.0);
    let mut p = x.to_vec();
    for i in 0..d {
        p[i] = x[i] + h;
        let up = u.eval_point(&p)?;
        p[i] = x[i] - h;
        let um = u.eval_point(&p)?;
        p[i] = x[i];
        lap += (up - 2.0 * u0 + um) / (h * h);
    }
    Ok((lap + u0).norm())
}
