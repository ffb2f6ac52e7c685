//! Spherical-harmonic spectra on S^{d-1}, real orthonormal bases for d = 2, 3,
//! product quadrature rules, and sphere/cap geometry.
//!
//! Basis convention (1-based j within degree l):
//! - d = 2: l = 0 is 1/sqrt(2 pi); for l >= 1, j = 1 is cos(l phi)/sqrt(pi)
//!   and j = 2 is sin(l phi)/sqrt(pi).
//! - d = 3: j = 1 is the zonal m = 0 harmonic; j = 2m is the cos(m phi)
//!   harmonic and j = 2m + 1 the sin(m phi) one. The associated Legendre
//!   functions carry no Condon-Shortley phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive, gauss_legendre};
use crate::special::gamma;

/// Dimension nu(l) of degree-l spherical harmonics on S^{d-1}.
pub fn nu_dim(d: usize, ell: usize) -> usize {
    if ell == 0 {
        return 1;
    }
    binomial(ell + d - 1, d - 1) - if ell >= 2 { binomial(ell + d - 3, d - 1) } else { 0 }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// mu(l) = l + (d - 2)/2.
pub fn mu_order(d: usize, ell: usize) -> f64 {
    ell as f64 + 0.5 * (d as f64 - 2.0)
}

/// Flattened index of the first coefficient of degree `ell`.
pub fn degree_offset(d: usize, ell: usize) -> usize {
    (0..ell).map(|l| nu_dim(d, l)).sum()
}

/// |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(0.5 * d as f64) / gamma(0.5 * d as f64)
}

/// Measure of the geodesic cap of angular radius t.
pub fn cap_measure(d: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= PI) {
        return domain(format!("cap radius must lie in (0, pi], got {t}"));
    }
    Ok(sphere_area(d - 1) * sin_power_integral(d, t))
}

/// int_0^t sin^{d-2} tau d tau.
pub(crate) fn sin_power_integral(d: usize, t: f64) -> f64 {
    match d {
        2 => t,
        3 => 2.0 * (0.5 * t).sin().powi(2),
        4 => {
            // (x - sin x)/4 with x = 2t, by series where it cancels.
            let x = 2.0 * t;
            if x < 0.5 {
                let x2 = x * x;
                let mut term = x * x2 / 6.0;
                let mut sum = term;
                for k in 2..12 {
                    term *= -x2 / ((2 * k) * (2 * k + 1)) as f64;
                    sum += term;
                }
                0.25 * sum
            } else {
                0.25 * (x - x.sin())
            }
        }
        _ => adaptive(|tau: f64| tau.sin().powi(d as i32 - 2), 0.0, t, 1e-16, 1e-14).value,
    }
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// Coefficient table f_{lj}, 0 <= l <= N, 1 <= j <= nu(l), stored by degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct HarmonicSpectrum {
    dim: usize,
    max_degree: usize,
    offsets: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl HarmonicSpectrum {
    pub fn zeros(dim: usize, max_degree: usize) -> Self {
        assert!(dim >= 2, "dimension must be >= 2");
        let mut offsets = Vec::with_capacity(max_degree + 2);
        let mut acc = 0;
        for ell in 0..=max_degree {
            offsets.push(acc);
            acc += nu_dim(dim, ell);
        }
        offsets.push(acc);
        HarmonicSpectrum { dim, max_degree, offsets, coeffs: vec![Complex64::new(0.0, 0.0); acc] }
    }

    pub fn from_fn(dim: usize, max_degree: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut s = Self::zeros(dim, max_degree);
        for ell in 0..=max_degree {
            let base = s.offsets[ell];
            for j in 1..=nu_dim(dim, ell) {
                s.coeffs[base + j - 1] = f(ell, j);
            }
        }
        s
    }

    /// Unit coefficient at (ell, j).
    pub fn single_mode(dim: usize, max_degree: usize, ell: usize, j: usize, c: Complex64) -> Result<Self> {
        let mut s = Self::zeros(dim, max_degree.max(ell));
        s.set(ell, j, c)?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficients of degree `ell`, j = 1..=nu(ell) in order.
    pub fn degree(&self, ell: usize) -> &[Complex64] {
        &self.coeffs[self.offsets[ell]..self.offsets[ell + 1]]
    }

    pub fn degree_mut(&mut self, ell: usize) -> &mut [Complex64] {
        let (a, b) = (self.offsets[ell], self.offsets[ell + 1]);
        &mut self.coeffs[a..b]
    }

    fn index(&self, ell: usize, j: usize) -> Result<usize> {
        if ell > self.max_degree || j == 0 || j > nu_dim(self.dim, ell) {
            return domain(format!(
                "index (l={ell}, j={j}) outside spectrum of degree {} in d={}",
                self.max_degree, self.dim
            ));
        }
        Ok(self.offsets[ell] + j - 1)
    }

    pub fn get(&self, ell: usize, j: usize) -> Result<Complex64> {
        Ok(self.coeffs[self.index(ell, j)?])
    }

    pub fn set(&mut self, ell: usize, j: usize, c: Complex64) -> Result<()> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return domain("spectrum coefficients must be finite");
        }
        let i = self.index(ell, j)?;
        self.coeffs[i] = c;
        Ok(())
    }

    /// Iterate (l, j, coefficient) in (l, j) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.max_degree).flat_map(move |ell| {
            self.degree(ell).iter().enumerate().map(move |(i, &c)| (ell, i + 1, c))
        })
    }

    /// sum_j |f_{lj}|^2 for each degree.
    pub fn degree_energies(&self) -> Vec<f64> {
        (0..=self.max_degree).map(|ell| self.degree(ell).iter().map(|c| c.norm_sqr()).sum()).collect()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Same coefficients padded with zeros or truncated to degree `n`.
    pub fn with_max_degree(&self, n: usize) -> Self {
        let mut out = Self::zeros(self.dim, n);
        let keep = self.offsets[self.max_degree.min(n) + 1];
        out.coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        out
    }

    /// True when only the l = 0 coefficient can be nonzero.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("spectrum JSON: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serializes")
    }
}

/// Interchange form: {dim, max_degree, coeffs: [[l, j, re, im], ...]}.
/// Missing entries read as zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub dim: usize,
    pub max_degree: usize,
    pub coeffs: Vec<(usize, usize, f64, f64)>,
}

impl TryFrom<SpectrumJson> for HarmonicSpectrum {
    type Error = Error;

    fn try_from(j: SpectrumJson) -> Result<Self> {
        if j.dim < 2 {
            return Err(Error::Config(format!("dim must be >= 2, got {}", j.dim)));
        }
        let mut s = HarmonicSpectrum::zeros(j.dim, j.max_degree);
        for (ell, jj, re, im) in j.coeffs {
            s.set(ell, jj, Complex64::new(re, im)).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(s)
    }
}

impl From<HarmonicSpectrum> for SpectrumJson {
    fn from(s: HarmonicSpectrum) -> Self {
        let coeffs = s.iter().map(|(l, j, c)| (l, j, c.re, c.im)).collect();
        SpectrumJson { dim: s.dim, max_degree: s.max_degree, coeffs }
    }
}

// ---------------------------------------------------------------------------
// Directions and pointwise bases
// ---------------------------------------------------------------------------

/// Unit vector in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Validates |v| = 1 within 1e-12.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v.len() < 2 || (n - 1.0).abs() > 1e-12 {
            return domain(format!("direction must be a unit vector in R^d, d >= 2 (norm {n})"));
        }
        Ok(Direction(v))
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v.len() < 2 || !(n > 0.0 && n.is_finite()) {
            return domain("cannot normalize a zero or non-finite vector");
        }
        Ok(Direction(v.iter().map(|x| x / n).collect()))
    }

    pub fn from_angle(phi: f64) -> Self {
        Direction(vec![phi.cos(), phi.sin()])
    }

    /// Polar angle theta from the last axis, azimuth phi.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let st = theta.sin();
        Direction(vec![st * phi.cos(), st * phi.sin(), theta.cos()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Geodesic distance, accurate for nearly coincident points.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let diff: f64 = self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let sum: f64 = self.0.iter().zip(&other.0).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
        2.0 * diff.atan2(sum)
    }
}

fn check_pointwise_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Fills `out` with every basis value Y_l^j(theta), l <= n, in spectrum order.
pub fn basis_values_into(d: usize, n: usize, theta: &Direction, out: &mut Vec<f64>) -> Result<()> {
    check_pointwise_dim(d)?;
    if theta.dim() != d {
        return Err(Error::Mismatch(format!("direction in R^{} for d = {d}", theta.dim())));
    }
    out.clear();
    let x = theta.as_slice();
    if d == 2 {
        let phi = x[1].atan2(x[0]);
        out.push(1.0 / (2.0 * PI).sqrt());
        let c = 1.0 / PI.sqrt();
        for ell in 1..=n {
            let (s, co) = (ell as f64 * phi).sin_cos();
            out.push(c * co);
            out.push(c * s);
        }
        return Ok(());
    }
    out.resize((n + 1) * (n + 1), 0.0);
    let (cx, cy, z) = (x[0], x[1], x[2].clamp(-1.0, 1.0));
    let rho = (cx * cx + cy * cy).sqrt();
    let (c1, s1) = if rho > 0.0 { (cx / rho, cy / rho) } else { (1.0, 0.0) };
    let inv_sqrt_2pi = 1.0 / (2.0 * PI).sqrt();
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    // P^m_m normalized on [-1, 1], walked up in m.
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    let (mut cm, mut sm) = (1.0, 0.0);
    for m in 0..=n {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * rho;
            let (c, s) = (cm * c1 - sm * s1, sm * c1 + cm * s1);
            cm = c;
            sm = s;
        }
        let mf = m as f64;
        let emit = |ell: usize, p: f64, out: &mut Vec<f64>| {
            let base = ell * ell;
            if m == 0 {
                out[base] = p * inv_sqrt_2pi;
            } else {
                out[base + 2 * m - 1] = p * inv_sqrt_pi * cm;
                out[base + 2 * m] = p * inv_sqrt_pi * sm;
            }
        };
        emit(m, pmm, out);
        if m == n {
            break;
        }
        let mut p_prev = pmm;
        let mut p = (2.0 * mf + 3.0).sqrt() * z * pmm;
        emit(m + 1, p, out);
        for ell in (m + 2)..=n {
            let l = ell as f64;
            let a = ((4.0 * l * l - 1.0) / (l * l - mf * mf)).sqrt();
            let b = (((l - 1.0) * (l - 1.0) - mf * mf) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0)).sqrt();
            let next = a * (z * p - b * p_prev);
            p_prev = p;
            p = next;
            emit(ell, p, out);
        }
    }
    Ok(())
}

pub fn basis_values(d: usize, n: usize, theta: &Direction) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    basis_values_into(d, n, theta, &mut out)?;
    Ok(out)
}

/// Y_l^j(theta) for d in {2, 3}.
pub fn sph_harm_eval(d: usize, ell: usize, j: usize, theta: &Direction) -> Result<f64> {
    check_pointwise_dim(d)?;
    if j == 0 || j > nu_dim(d, ell) {
        return domain(format!("j = {j} outside 1..={} for l = {ell}", nu_dim(d, ell)));
    }
    let vals = basis_values(d, ell, theta)?;
    Ok(vals[degree_offset(d, ell) + j - 1])
}

/// sum_{l,j} f_{lj} Y_l^j(theta).
pub fn synthesize(f: &HarmonicSpectrum, theta: &Direction) -> Result<Complex64> {
    let vals = basis_values(f.dim(), f.max_degree(), theta)?;
    Ok(f.coeffs().iter().zip(&vals).map(|(c, y)| c * y).sum())
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Product rule on S^{d-1}, d in {2, 3}, exact for polynomials of degree
/// <= exactness_degree.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub dim: usize,
    pub nodes: Vec<Direction>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl SphereQuadrature {
    pub fn new(d: usize, exactness_degree: usize) -> Result<Self> {
        check_pointwise_dim(d)?;
        let m = exactness_degree + 1;
        let dphi = 2.0 * PI / m as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        if d == 2 {
            for k in 0..m {
                nodes.push(Direction::from_angle(k as f64 * dphi));
                weights.push(dphi);
            }
        } else {
            let g = gauss_legendre(exactness_degree / 2 + 1);
            for (&z, &w) in g.nodes.iter().zip(&g.weights) {
                let theta = z.acos();
                for k in 0..m {
                    nodes.push(Direction::from_spherical(theta, k as f64 * dphi));
                    weights.push(w * dphi);
                }
            }
        }
        Ok(SphereQuadrature { dim: d, nodes, weights, exactness_degree })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(&Direction) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(x, &w)| f(x) * w).sum()
    }

    /// Basis values at every node, row-major by node.
    pub fn basis_table(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        self.nodes.iter().map(|x| basis_values(self.dim, n, x)).collect()
    }
}

/// f_{lj} = sum_k w_k f(theta_k) Y_l^j(theta_k).
pub fn analyze<F>(sampler: F, n: usize, q: &SphereQuadrature) -> Result<HarmonicSpectrum>
where
    F: Fn(&Direction) -> Complex64,
{
    if q.exactness_degree < 2 * n {
        return Err(Error::InsufficientQuadrature { have: q.exactness_degree, need: 2 * n });
    }
    let mut out = HarmonicSpectrum::zeros(q.dim, n);
    let mut vals = Vec::new();
    for (x, &w) in q.nodes.iter().zip(&q.weights) {
        basis_values_into(q.dim, n, x, &mut vals)?;
        let fx = sampler(x) * w;
        for (c, y) in out.coeffs_mut().iter_mut().zip(&vals) {
            *c += fx * y;
        }
    }
    Ok(out)
}
