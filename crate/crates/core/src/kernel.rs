//! The integral operator K_alpha with kernel
//! (1/|S^{d-1}|) int_0^1 (1-r)^alpha (1+r) |r xi - eta|^{-d} dr,
//! the Poisson transform P_r in kernel form, and the comparison of K_alpha
//! against the multiplier M_alpha.
//!
//! Sphere integrals are taken in polar coordinates about xi: geodesic
//! radius tau in [0, pi] on panels graded toward tau = 0, where both
//! kernels concentrate, and an equispaced azimuthal rule (d = 3) or the
//! two points at angle +-tau (d = 2).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::multipliers::{apply, m_alpha_seq};
use crate::quadrature::{adaptive, gauss_legendre};
use crate::sphere::{sphere_area, synthesize, Direction, HarmonicSpectrum};

const KERNEL_REL_TOL: f64 = 1e-10;
/// Coincidence threshold for the kernel.
pub const MIN_ANGLE: f64 = 1e-8;

/// Layout of the polar quadrature about xi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuadratureSpec {
    /// Uniform panels in tau on [threshold, pi]; each octave of the graded
    /// patch gets radial_panels / 16 panels.
    pub radial_panels: usize,
    /// Azimuthal nodes (d = 3); must exceed the spectrum's degree.
    pub angular_panels: usize,
    /// Geometric halvings of [0, threshold] toward tau = 0.
    pub graded_levels: usize,
    pub nodes_per_panel: usize,
    /// Angle below which eta is in the graded near-diagonal patch.
    pub threshold: f64,
}

impl KernelQuadratureSpec {
    pub fn new(radial_panels: usize, angular_panels: usize, graded_levels: usize, nodes_per_panel: usize, threshold: f64) -> Result<Self> {
        let s = KernelQuadratureSpec { radial_panels, angular_panels, graded_levels, nodes_per_panel, threshold };
        s.validate()?;
        Ok(s)
    }

    /// Default layout for spectra of degree <= n.
    pub fn for_degree(n: usize) -> Self {
        KernelQuadratureSpec { radial_panels: 16, angular_panels: 2 * n + 2, graded_levels: 24, nodes_per_panel: 10, threshold: 0.4 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_panels < 16 {
            return Err(Error::Config(format!("radial panel count must be >= 16, got {}", self.radial_panels)));
        }
        if !(self.threshold > 0.0 && self.threshold < 0.5) {
            return Err(Error::Config(format!("near-diagonal threshold must lie in (0, 0.5), got {}", self.threshold)));
        }
        if self.nodes_per_panel == 0 || self.angular_panels == 0 {
            return Err(Error::Config("node counts must be positive".into()));
        }
        Ok(())
    }

    /// Every panel count doubled.
    pub fn refined(&self) -> Self {
        KernelQuadratureSpec {
            radial_panels: 2 * self.radial_panels,
            angular_panels: 2 * self.angular_panels,
            graded_levels: 2 * self.graded_levels,
            ..*self
        }
    }
}

/// The kernel as a function of the geodesic angle tau between xi and eta.
pub fn k_alpha_profile(d: usize, alpha: f64, tau: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("K_alpha needs alpha > 0, got {alpha}"));
    }
    if !(tau >= MIN_ANGLE) {
        return Err(Error::SingularKernel(format!("angle {tau:e} below {MIN_ANGLE:e}")));
    }
    Ok(profile(d, alpha, tau))
}

/// Kernel profile for any tau > 0; quadrature nodes may sit below MIN_ANGLE.
fn profile(d: usize, alpha: f64, tau: f64) -> f64 {
    let h = (0.5 * tau).sin();
    let gap = 4.0 * h * h;
    let half_d = 0.5 * d as f64;
    // |r xi - eta|^2 = s^2 + 4 (1 - s) sin^2(tau/2) with s = 1 - r.
    let body = |s: f64| (2.0 - s) * (s * s + (1.0 - s) * gap).powf(-half_d);
    // First piece with s = a u^2, which smooths s^alpha ds at s = 0.
    let a = (0.25 * tau).min(0.5);
    let first = adaptive(
        |u: f64| {
            let s = a * u * u;
            2.0 * a * u * s.powf(alpha) * body(s)
        },
        0.0,
        1.0,
        0.0,
        KERNEL_REL_TOL,
    )
    .value;
    let mut total = first;
    let mut lo = a;
    while lo < 1.0 {
        let hi = (2.0 * lo).min(1.0);
        total += adaptive(|s: f64| s.powf(alpha) * body(s), lo, hi, 0.0, KERNEL_REL_TOL).value;
        lo = hi;
    }
    total / sphere_area(d)
}

/// K_alpha(xi, eta).
pub fn k_alpha_kernel(xi: &Direction, eta: &Direction, alpha: f64) -> Result<f64> {
    if xi.dim() != eta.dim() {
        return Err(Error::Mismatch("directions live in different dimensions".into()));
    }
    k_alpha_profile(xi.dim(), alpha, xi.angle_to(eta))
}

/// p_r(xi, eta) as a function of tau, with s = 1 - r passed directly.
fn poisson_profile(d: usize, s: f64, tau: f64) -> f64 {
    let h = (0.5 * tau).sin();
    let dist2 = s * s + 4.0 * (1.0 - s) * h * h;
    s * (2.0 - s) * dist2.powf(-0.5 * d as f64) / sphere_area(d)
}

/// Nodes and weights in tau for the polar rule.
fn tau_rule(spec: &KernelQuadratureSpec, beta: f64, levels: usize) -> Vec<(f64, f64)> {
    let g = gauss_legendre(spec.nodes_per_panel);
    let mut out = Vec::new();
    let th = spec.threshold;
    let inner = th * 0.5f64.powi(levels as i32);
    // Innermost panel: tau = inner v^{1/beta}.
    for (v, w) in g.mapped(0.0, 1.0) {
        let tau = inner * v.powf(1.0 / beta);
        let jac = inner / beta * v.powf(1.0 / beta - 1.0);
        out.push((tau, w * jac));
    }
    // Each octave of the patch gets radial_panels / 16 geometric panels.
    let per_octave = (spec.radial_panels / 16).max(1);
    let ratio = 2f64.powf(1.0 / per_octave as f64);
    for k in 0..levels * per_octave {
        let lo = inner * ratio.powi(k as i32);
        out.extend(g.mapped(lo, lo * ratio));
    }
    let h = (PI - th) / spec.radial_panels as f64;
    for k in 0..spec.radial_panels {
        out.extend(g.mapped(th + k as f64 * h, th + (k + 1) as f64 * h));
    }
    out
}

/// Orthonormal frame completing xi (d = 3).
fn frame(xi: &[f64]) -> ([f64; 3], [f64; 3]) {
    let a = if xi[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2];
    let mut e1 = [a[0] - dot * xi[0], a[1] - dot * xi[1], a[2] - dot * xi[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|v| *v /= n);
    let e2 = [xi[1] * e1[2] - xi[2] * e1[1], xi[2] * e1[0] - xi[0] * e1[2], xi[0] * e1[1] - xi[1] * e1[0]];
    (e1, e2)
}

/// Integral over the circle (d = 3) or point pair (d = 2) at angle tau
/// from xi, including the sin^{d-2} tau factor.
fn shell(f: &HarmonicSpectrum, xi: &Direction, tau: f64, angular: usize) -> Result<Complex64> {
    let x = xi.as_slice();
    let (c, s) = (tau.cos(), tau.sin());
    match f.dim() {
        2 => {
            let p = Direction::normalized(&[c * x[0] - s * x[1], s * x[0] + c * x[1]])?;
            let m = Direction::normalized(&[c * x[0] + s * x[1], -s * x[0] + c * x[1]])?;
            Ok(synthesize(f, &p)? + synthesize(f, &m)?)
        }
        3 => {
            let (e1, e2) = frame(x);
            let dphi = 2.0 * PI / angular as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..angular {
                let (cp, sp) = ((k as f64 * dphi).cos(), (k as f64 * dphi).sin());
                let v: Vec<f64> = (0..3).map(|i| c * x[i] + s * (cp * e1[i] + sp * e2[i])).collect();
                acc += synthesize(f, &Direction::normalized(&v)?)?;
            }
            Ok(acc * (dphi * s))
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

fn check_inputs(f: &HarmonicSpectrum, xi: &Direction, spec: &KernelQuadratureSpec) -> Result<()> {
    let d = f.dim();
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if xi.dim() != d {
        return Err(Error::Mismatch(format!("direction in R^{} for d = {d}", xi.dim())));
    }
    spec.validate()?;
    if d == 3 && spec.angular_panels <= f.max_degree() {
        return Err(Error::InsufficientQuadrature { have: spec.angular_panels - 1, need: f.max_degree() });
    }
    Ok(())
}

/// Tabulated kernel profile on the polar tau rule, reusable across xi.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub dim: usize,
    pub alpha: f64,
    pub spec: KernelQuadratureSpec,
    /// (tau, quadrature weight times kernel).
    pub entries: Vec<(f64, f64)>,
}

impl KernelTable {
    pub fn new(d: usize, alpha: f64, spec: &KernelQuadratureSpec) -> Result<Self> {
        spec.validate()?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("K_alpha needs alpha > 0, got {alpha}"));
        }
        let beta = alpha.min(1.0);
        let rule = tau_rule(spec, beta, spec.graded_levels);
        let entries = rule
            .par_iter()
            .map(|&(tau, w)| (tau, w * profile(d, alpha, tau)))
            .collect();
        Ok(KernelTable { dim: d, alpha, spec: *spec, entries })
    }

    pub fn apply(&self, f: &HarmonicSpectrum, xi: &Direction) -> Result<Complex64> {
        check_inputs(f, xi, &self.spec)?;
        if f.dim() != self.dim {
            return Err(Error::Mismatch("kernel table built for another dimension".into()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(tau, wk) in &self.entries {
            acc += shell(f, xi, tau, self.spec.angular_panels)? * wk;
        }
        Ok(acc)
    }
}

/// K_alpha f(xi) by polar kernel quadrature.
pub fn k_alpha_apply(f: &HarmonicSpectrum, alpha: f64, xi: &Direction, spec: &KernelQuadratureSpec) -> Result<Complex64> {
    check_inputs(f, xi, spec)?;
    KernelTable::new(f.dim(), alpha, spec)?.apply(f, xi)
}

fn poisson_apply_gap(f: &HarmonicSpectrum, s: f64, xi: &Direction, spec: &KernelQuadratureSpec) -> Result<Complex64> {
    if s == 1.0 {
        // p_0 is the uniform density.
        let mut acc = Complex64::new(0.0, 0.0);
        for (tau, w) in tau_rule(spec, 1.0, 0) {
            acc += shell(f, xi, tau, spec.angular_panels)? * w;
        }
        return Ok(acc / sphere_area(f.dim()));
    }
    // Grade the patch down to a fraction of the kernel width s.
    let need = ((8.0 * spec.threshold / s).log2().ceil().max(0.0)) as usize;
    let levels = spec.graded_levels.max(need).min(80);
    let mut acc = Complex64::new(0.0, 0.0);
    for (tau, w) in tau_rule(spec, 1.0, levels) {
        acc += shell(f, xi, tau, spec.angular_panels)? * (w * poisson_profile(f.dim(), s, tau));
    }
    Ok(acc)
}

/// P_r f(xi) by kernel quadrature.
pub fn poisson_apply(f: &HarmonicSpectrum, r: f64, xi: &Direction, spec: &KernelQuadratureSpec) -> Result<Complex64> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("Poisson parameter must lie in [0, 1), got {r}"));
    }
    check_inputs(f, xi, spec)?;
    poisson_apply_gap(f, 1.0 - r, xi, spec)
}

/// int_0^1 (1-r)^{alpha-1} P_r f(xi) dr with r = 1 - w^{1/alpha}, on
/// panels graded toward w = 0. Below w_min, where 1 - r < 1e-12, P_r f is
/// replaced by f(xi). The shell integrals do not depend on r, so one tau
/// rule graded for the smallest 1 - r serves every node.
pub fn poisson_weighted_integral(f: &HarmonicSpectrum, alpha: f64, xi: &Direction, spec: &KernelQuadratureSpec) -> Result<Complex64> {
    check_inputs(f, xi, spec)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let s_min: f64 = 1e-12;
    let w_min = s_min.powf(alpha).max(1e-300);
    let levels = spec.graded_levels.max(((8.0 * spec.threshold / s_min).log2().ceil()) as usize);
    let shells = tau_rule(spec, 1.0, levels)
        .into_iter()
        .map(|(tau, w)| Ok((tau, shell(f, xi, tau, spec.angular_panels)? * w)))
        .collect::<Result<Vec<_>>>()?;
    let d = f.dim();
    let g = gauss_legendre(spec.nodes_per_panel);
    let mut acc = synthesize(f, xi)? * w_min;
    let mut lo = w_min;
    while lo < 1.0 {
        let hi = (4.0 * lo).min(1.0);
        for (w, wt) in g.mapped(lo, hi) {
            let s = w.powf(1.0 / alpha);
            let p: Complex64 = shells.iter().map(|(tau, sh)| sh * poisson_profile(d, s, *tau)).sum();
            acc += p * wt;
        }
        lo = hi;
    }
    Ok(acc / alpha)
}

/// Deterministic direction sample: equispaced angles (d = 2) or a
/// Fibonacci lattice (d = 3).
pub fn direction_sample(d: usize, count: usize) -> Result<Vec<Direction>> {
    match d {
        2 => Ok((0..count).map(|k| Direction::from_angle(0.37 + 2.0 * PI * k as f64 / count as f64)).collect()),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            Ok((0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    Direction::from_spherical(z.acos(), 0.21 + golden * k as f64)
                })
                .collect())
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Deviations of the two quadrature paths from M_alpha f, relative to
/// max |M_alpha f| over the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SillaCheck {
    pub kernel_deviation: f64,
    pub poisson_deviation: f64,
    pub scale: f64,
    pub directions: usize,
}

pub const SILLA_DIRECTIONS: usize = 10;

/// Compares K_alpha f (kernel quadrature) and the Poisson-integral identity
/// against synthesize(M_alpha f) on a direction sample.
pub fn verify_silla(f: &HarmonicSpectrum, alpha: f64, spec: &KernelQuadratureSpec) -> Result<SillaCheck> {
    verify_silla_at(f, alpha, spec, &direction_sample(f.dim(), SILLA_DIRECTIONS)?, true)
}

/// [`verify_silla`] on given directions; the Poisson path is optional
/// because it costs a kernel quadrature per r node.
pub fn verify_silla_at(f: &HarmonicSpectrum, alpha: f64, spec: &KernelQuadratureSpec, dirs: &[Direction], with_poisson: bool) -> Result<SillaCheck> {
    let m = apply(&m_alpha_seq(alpha)?, f);
    let table = KernelTable::new(f.dim(), alpha, spec)?;
    let rows = dirs
        .par_iter()
        .map(|xi| {
            let want = synthesize(&m, xi)?;
            let k = table.apply(f, xi)?;
            let p = if with_poisson { poisson_weighted_integral(f, alpha, xi, spec)? } else { want };
            Ok((want.norm(), (k - want).norm(), (p - want).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    Ok(SillaCheck {
        kernel_deviation: rows.iter().map(|r| r.1).fold(0.0, f64::max) / scale,
        poisson_deviation: rows.iter().map(|r| r.2).fold(0.0, f64::max) / scale,
        scale,
        directions: dirs.len(),
    })
}
