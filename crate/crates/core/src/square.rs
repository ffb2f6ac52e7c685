//! Square functions S_alpha built from cap-average deviations
//! A_t f - f, the companion coefficients c_k(t), least-squares companions
//! for alpha >= 2, and the A-norm of S_alpha(u, v_1, ..., v_n).
//!
//! Every t-integral runs over a graded grid on [t_min, pi] with weight
//! t^{-2 alpha - 1}. For alpha < 2 the piece [0, t_min] is added from the
//! small-t expansion m_{l,t} - 1 = -A_l t^2 + O(t^4).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::norms::energy_a_norm_sq;
use crate::quadrature::{adaptive, gauss_legendre};
use crate::special::legendre_pld_minus_one_into;
use crate::sphere::{basis_values_into, degree_offset, Direction, HarmonicSpectrum};
use crate::wavefield::WaveField;

pub const T_MIN: f64 = 1e-5;
pub const GRID_RATIO: f64 = 1.15;
pub const MAX_PANEL: f64 = 0.05;
pub const PANEL_NODES: usize = 8;
/// Lower limit of the adaptive mode-weight integral.
pub const ADAPTIVE_T_MIN: f64 = 1e-6;

/// Quadrature on [t_min, pi], geometric toward 0 and capped in panel width.
#[derive(Debug, Clone)]
pub struct TGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub t_min: f64,
}

impl TGrid {
    pub fn graded(t_min: f64, ratio: f64, max_panel: f64, nodes_per_panel: usize) -> Self {
        let mut breaks = vec![t_min];
        let mut t = t_min;
        while t < PI {
            let next = (t * ratio).min(t + max_panel).min(PI);
            breaks.push(next);
            t = next;
        }
        let g = gauss_legendre(nodes_per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            for (x, wt) in g.mapped(w[0], w[1]) {
                nodes.push(x);
                weights.push(wt);
            }
        }
        TGrid { nodes, weights, t_min }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weights times t^{-2 alpha - 1}.
    pub fn weighted(&self, alpha: f64) -> Vec<f64> {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * t.powf(-2.0 * alpha - 1.0)).collect()
    }
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid::graded(T_MIN, GRID_RATIO, MAX_PANEL, PANEL_NODES)
    }
}

/// m_{l,t} - 1 for l = 0..=n and c_1(t)..c_kmax(t), all from one
/// Gauss-Legendre rule on [0, t]; the normalization uses the same rule.
pub fn cap_values(d: usize, n: usize, kmax: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let nodes = 16 + (0.7 * (n + 2 * kmax + d) as f64 * t).ceil() as usize;
    let g = gauss_legendre(nodes);
    let p = d as i32 - 2;
    let mut q_acc = vec![0.0; n + 1];
    let mut c_acc = vec![0.0; kmax];
    let mut den = 0.0;
    let mut q = Vec::with_capacity(n + 1);
    for (tau, w) in g.mapped(0.0, t) {
        let half = (0.5 * tau).sin();
        let one_minus_cos = 2.0 * half * half;
        let wt = w * tau.sin().powi(p);
        den += wt;
        legendre_pld_minus_one_into(d, n, one_minus_cos, &mut q);
        for (acc, v) in q_acc.iter_mut().zip(&q) {
            *acc += wt * v;
        }
        let chord = 2.0 * one_minus_cos;
        let mut pow = 1.0;
        for acc in c_acc.iter_mut() {
            pow *= chord;
            *acc += wt * pow;
        }
    }
    q_acc.iter_mut().for_each(|v| *v /= den);
    c_acc.iter_mut().for_each(|v| *v /= den);
    (q_acc, c_acc)
}

/// c_k(t) = A_t(|theta - .|^{2k})(theta), the cap mean of (2 - 2 cos tau)^k.
pub fn c_k_coeff(d: usize, t: f64, k: usize) -> Result<f64> {
    if !(t > 0.0 && t <= PI) {
        return domain(format!("cap radius must lie in (0, pi], got {t}"));
    }
    if k == 0 {
        return domain("c_k needs k >= 1");
    }
    Ok(cap_values(d, 0, k, t).1[k - 1])
}

/// l(l+d-2) / (2(d+1)): leading coefficient of 1 - m_{l,t} in t^2.
pub fn small_t_coefficient(d: usize, ell: usize) -> f64 {
    (ell * (ell + d - 2)) as f64 / (2.0 * (d + 1) as f64)
}

/// -l(l+d-2) / (2(d-1)): the n = 1 companion coefficient that cancels the
/// t^2 term of m_{l,t} - 1 - gamma c_1(t).
pub fn limiting_companion_coefficient(d: usize, ell: usize) -> f64 {
    -((ell * (ell + d - 2)) as f64) / (2.0 * (d - 1) as f64)
}

type TableMap = HashMap<(usize, usize, usize), Arc<CapTable>>;

/// Tabulated m_{l,t} - 1 and c_k(t) on a [`TGrid`].
#[derive(Debug)]
pub struct CapTable {
    pub dim: usize,
    pub max_degree: usize,
    pub kmax: usize,
    pub grid: TGrid,
    /// q[i][l] = m_{l,t_i} - 1.
    pub q: Vec<Vec<f64>>,
    /// c[i][k-1] = c_k(t_i).
    pub c: Vec<Vec<f64>>,
}

impl CapTable {
    pub fn new(d: usize, n: usize, kmax: usize, grid: TGrid) -> Self {
        let rows: Vec<(Vec<f64>, Vec<f64>)> = grid.nodes.par_iter().map(|&t| cap_values(d, n, kmax, t)).collect();
        let (q, c) = rows.into_iter().unzip();
        CapTable { dim: d, max_degree: n, kmax, grid, q, c }
    }

    /// Shared table on the default grid covering degree n and k <= kmax.
    pub fn shared(d: usize, n: usize, kmax: usize) -> Arc<CapTable> {
        static TABLES: OnceLock<RwLock<TableMap>> = OnceLock::new();
        let tables = TABLES.get_or_init(Default::default);
        let key = (d, n, kmax.max(1));
        if let Some(t) = tables.read().unwrap().get(&key) {
            return t.clone();
        }
        let table = Arc::new(CapTable::new(d, n, key.2, TGrid::default()));
        tables.write().unwrap().entry(key).or_insert(table).clone()
    }

    /// Basis function b_k(l, t_i): c_k(t_i), or m_{l,t_i} c_n(t_i) when k = n
    /// and alpha = 2n.
    fn basis(&self, i: usize, ell: usize, k: usize, n: usize, even: bool) -> f64 {
        let c = self.c[i][k - 1];
        if even && k == n {
            (1.0 + self.q[i][ell]) * c
        } else {
            c
        }
    }
}

/// Number of companions for alpha: floor(alpha / 2).
pub fn companion_count(alpha: f64) -> usize {
    (alpha / 2.0).floor().max(0.0) as usize
}

fn is_even_case(alpha: f64, n: usize) -> bool {
    n >= 1 && alpha == 2.0 * n as f64
}

fn check_alpha_lt2(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return domain(format!("S_alpha needs alpha in (0, 2), got {alpha}"));
    }
    Ok(())
}

/// Contribution of [0, t_min] for alpha < 2: A_l^2 t_min^{4-2a}/(4-2a).
fn small_t_tail(d: usize, ell: usize, alpha: f64, t_min: f64) -> f64 {
    let a = small_t_coefficient(d, ell);
    a * a * t_min.powf(4.0 - 2.0 * alpha) / (4.0 - 2.0 * alpha)
}

/// int_0^pi |m_{l,t} - 1|^2 t^{-2 alpha - 1} dt by adaptive quadrature in
/// log t, independent of the tabulated grid.
pub fn s_alpha_mode_weight(d: usize, alpha: f64, ell: usize) -> Result<f64> {
    check_alpha_lt2(alpha)?;
    if ell == 0 {
        return Ok(0.0);
    }
    let f = |y: f64| {
        let t = y.exp();
        let q = cap_values(d, ell, 0, t).0[ell];
        q * q * t.powf(-2.0 * alpha)
    };
    let body = adaptive(f, ADAPTIVE_T_MIN.ln(), PI.ln(), 0.0, 1e-11).value;
    Ok(body + small_t_tail(d, ell, alpha, ADAPTIVE_T_MIN))
}

/// Per-degree |m_{l,t} - 1|^2 t^{-2 alpha - 1} at one t, for slope checks.
pub fn s_alpha_integrand(d: usize, alpha: f64, ell: usize, t: f64) -> f64 {
    let q = cap_values(d, ell, 0, t).0[ell];
    q * q * t.powf(-2.0 * alpha - 1.0)
}

/// Mode weights for l = 0..=n on the tabulated grid, tail included.
pub fn grid_mode_weights(d: usize, n: usize, alpha: f64) -> Result<Vec<f64>> {
    check_alpha_lt2(alpha)?;
    let table = CapTable::shared(d, n, 1);
    let w = table.grid.weighted(alpha);
    Ok((0..=n)
        .map(|l| {
            if l == 0 {
                return 0.0;
            }
            let body: f64 = table.q.iter().zip(&w).map(|(q, w)| w * q[l] * q[l]).sum();
            body + small_t_tail(d, l, alpha, table.grid.t_min)
        })
        .collect())
}

/// Degree-l parts f_l(theta) = sum_j f_{lj} Y_l^j(theta).
fn degree_parts(f: &HarmonicSpectrum, theta: &Direction) -> Result<Vec<Complex64>> {
    let d = f.dim();
    let n = f.max_degree();
    let mut y = Vec::new();
    basis_values_into(d, n, theta, &mut y)?;
    Ok((0..=n)
        .map(|l| {
            let off = degree_offset(d, l);
            f.degree(l).iter().zip(&y[off..]).map(|(c, v)| c * v).sum()
        })
        .collect())
}

fn check_pointwise_dim(d: usize) -> Result<()> {
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    Ok(())
}

/// S_alpha f(theta) for alpha in (0, 2).
pub fn s_alpha_pointwise(f: &HarmonicSpectrum, alpha: f64, theta: &Direction) -> Result<f64> {
    check_alpha_lt2(alpha)?;
    let d = f.dim();
    check_pointwise_dim(d)?;
    let n = f.max_degree();
    let parts = degree_parts(f, theta)?;
    let table = CapTable::shared(d, n, 1);
    let w = table.grid.weighted(alpha);
    let mut total = 0.0;
    for (q, wi) in table.q.iter().zip(&w) {
        let h: Complex64 = parts.iter().zip(q).map(|(p, qv)| p * *qv).sum();
        total += wi * h.norm_sqr();
    }
    let lead: Complex64 = parts.iter().enumerate().map(|(l, p)| p * small_t_coefficient(d, l)).sum();
    let t_min = table.grid.t_min;
    total += lead.norm_sqr() * t_min.powf(4.0 - 2.0 * alpha) / (4.0 - 2.0 * alpha);
    Ok(total.sqrt())
}

/// Companion spectra g_1..g_n with g_{k,lj} = gamma_{k,l} f_{lj}.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionSet {
    pub n: usize,
    pub alpha: f64,
    pub companions: Vec<HarmonicSpectrum>,
    /// gammas[k-1][l].
    pub gammas: Vec<Vec<f64>>,
}

impl CompanionSet {
    /// n zero companions shaped like f.
    pub fn zeros(f: &HarmonicSpectrum, alpha: f64) -> Self {
        let n = companion_count(alpha);
        let z = HarmonicSpectrum::zeros(f.dim(), f.max_degree());
        CompanionSet { n, alpha, companions: vec![z; n], gammas: vec![vec![0.0; f.max_degree() + 1]; n] }
    }

    pub fn wavefields(&self) -> Vec<WaveField> {
        self.companions.iter().map(crate::wavefield::extend).collect()
    }

    fn check(&self, f: &HarmonicSpectrum, alpha: f64) -> Result<()> {
        let n = companion_count(alpha);
        if self.companions.len() != n {
            return Err(Error::CompanionMismatch { expected: n, got: self.companions.len() });
        }
        for g in &self.companions {
            if g.dim() != f.dim() || g.max_degree() != f.max_degree() {
                return Err(Error::Mismatch("companions must share the base spectrum's shape".into()));
            }
        }
        Ok(())
    }
}

/// Per-degree least-squares coefficients gamma_{1..n, l} on the grid.
pub fn companion_coefficients(d: usize, ell: usize, alpha: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if ell == 0 {
        return Ok(vec![0.0; n]);
    }
    let table = CapTable::shared(d, ell, n);
    least_squares(&table, ell, alpha, n)
}

fn least_squares(table: &CapTable, ell: usize, alpha: f64, n: usize) -> Result<Vec<f64>> {
    let even = is_even_case(alpha, n);
    let w = table.grid.weighted(alpha);
    let rows = w.len();
    let mut a = DMatrix::<f64>::zeros(rows, n);
    let mut b = DVector::<f64>::zeros(rows);
    for i in 0..rows {
        let s = w[i].sqrt();
        b[i] = s * table.q[i][ell];
        for k in 1..=n {
            a[(i, k - 1)] = s * table.basis(i, ell, k, n, even);
        }
    }
    // Column scaling keeps R well conditioned across the t^{2k} basis.
    let scales: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::SingularSystem(ell));
    }
    for (k, s) in scales.iter().enumerate() {
        a.column_mut(k).scale_mut(1.0 / s);
    }
    let qr = a.qr();
    let r = qr.r();
    for k in 0..n {
        if r[(k, k)].abs() < 1e-12 {
            return Err(Error::SingularSystem(ell));
        }
    }
    let qtb = qr.q().transpose() * b;
    let x = r.solve_upper_triangular(&qtb).ok_or(Error::SingularSystem(ell))?;
    Ok((0..n).map(|k| x[k] / scales[k]).collect())
}

/// Least-squares companions for f at alpha >= 2 with n = floor(alpha/2).
pub fn build_companions(f: &HarmonicSpectrum, alpha: f64, n: usize) -> Result<CompanionSet> {
    if !(alpha >= 2.0 && alpha.is_finite()) {
        return domain(format!("companions need alpha >= 2, got {alpha}"));
    }
    if n != companion_count(alpha) {
        return Err(Error::CompanionMismatch { expected: companion_count(alpha), got: n });
    }
    let d = f.dim();
    let big_n = f.max_degree();
    let table = CapTable::shared(d, big_n, n);
    let per_degree: Vec<Vec<f64>> = (0..=big_n)
        .into_par_iter()
        .map(|l| if l == 0 { Ok(vec![0.0; n]) } else { least_squares(&table, l, alpha, n) })
        .collect::<Result<_>>()?;
    let gammas: Vec<Vec<f64>> = (0..n).map(|k| per_degree.iter().map(|g| g[k]).collect()).collect();
    let companions = gammas
        .iter()
        .map(|gk| {
            let mut g = f.clone();
            for (l, gamma) in gk.iter().enumerate() {
                g.degree_mut(l).iter_mut().for_each(|c| *c *= *gamma);
            }
            g
        })
        .collect();
    Ok(CompanionSet { n, alpha, companions, gammas })
}

/// Per-degree objective int |m_{l,t} - 1 - sum_k gamma_k b_k(t)|^2 w(t) dt.
pub fn companion_objective(d: usize, ell: usize, alpha: f64, gammas: &[f64]) -> f64 {
    let n = gammas.len();
    let even = is_even_case(alpha, n);
    let table = CapTable::shared(d, ell, n);
    let w = table.grid.weighted(alpha);
    (0..w.len())
        .map(|i| {
            let mut h = table.q[i][ell];
            for (k, g) in gammas.iter().enumerate() {
                h -= g * table.basis(i, ell, k + 1, n, even);
            }
            w[i] * h * h
        })
        .sum()
}

/// S_alpha(f, g_1..g_n)(theta) for alpha >= 2.
pub fn s_alpha_general(f: &HarmonicSpectrum, companions: &CompanionSet, alpha: f64, theta: &Direction) -> Result<f64> {
    if !(alpha >= 2.0) {
        return domain(format!("general square function needs alpha >= 2, got {alpha}"));
    }
    let d = f.dim();
    check_pointwise_dim(d)?;
    companions.check(f, alpha)?;
    let n = companions.n;
    let even = is_even_case(alpha, n);
    let parts = degree_parts(f, theta)?;
    let gparts: Vec<Vec<Complex64>> = companions.companions.iter().map(|g| degree_parts(g, theta)).collect::<Result<_>>()?;
    let table = CapTable::shared(d, f.max_degree(), n);
    let w = table.grid.weighted(alpha);
    let mut total = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let mut h = Complex64::new(0.0, 0.0);
        for (l, p) in parts.iter().enumerate() {
            h += p * table.q[i][l];
            for (k, gp) in gparts.iter().enumerate() {
                h -= gp[l] * table.basis(i, l, k + 1, n, even);
            }
        }
        total += wi * h.norm_sqr();
    }
    Ok(total.sqrt())
}

/// Per-degree energies sum_j int |h_{lj}(t)|^2 t^{-2 alpha - 1} dt of the
/// square function, with h_{lj} = (m_{l,t} - 1) f_{lj} - sum_k g_{k,lj} b_k(t).
pub fn s_alpha_energies(f: &HarmonicSpectrum, companions: &[HarmonicSpectrum], alpha: f64) -> Result<Vec<f64>> {
    let n = companion_count(alpha);
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("square function needs alpha > 0, got {alpha}"));
    }
    if companions.len() != n {
        return Err(Error::CompanionMismatch { expected: n, got: companions.len() });
    }
    let d = f.dim();
    let big_n = f.max_degree();
    if n == 0 {
        let w = grid_mode_weights(d, big_n, alpha)?;
        return Ok(f.degree_energies().iter().zip(&w).map(|(e, w)| e * w).collect());
    }
    for g in companions {
        if g.dim() != d || g.max_degree() != big_n {
            return Err(Error::Mismatch("companions must share the base spectrum's shape".into()));
        }
    }
    let even = is_even_case(alpha, n);
    let table = CapTable::shared(d, big_n, n);
    let w = table.grid.weighted(alpha);
    Ok((0..=big_n)
        .into_par_iter()
        .map(|l| {
            let fl = f.degree(l);
            let mut total = 0.0;
            for (i, wi) in w.iter().enumerate() {
                let q = table.q[i][l];
                let b: Vec<f64> = (1..=n).map(|k| table.basis(i, l, k, n, even)).collect();
                let s: f64 = fl
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let mut h = c * q;
                        for (k, g) in companions.iter().enumerate() {
                            h -= g.degree(l)[j] * b[k];
                        }
                        h.norm_sqr()
                    })
                    .sum();
                total += wi * s;
            }
            total
        })
        .collect())
}

/// ||S_alpha(u, v_1, ..., v_n)||_A by the spectral path.
pub fn s_alpha_a_norm(u: &WaveField, companions: &[WaveField], alpha: f64) -> Result<f64> {
    let specs: Vec<HarmonicSpectrum> = companions.iter().map(|v| v.spectrum.clone()).collect();
    let energies = s_alpha_energies(&u.spectrum, &specs, alpha)?;
    Ok(energy_a_norm_sq(u.dim(), &energies, 0.0)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipliers::sobolev_weight;
    use crate::special::legendre_pld_minus_one_all;
    use crate::sphere::{sph_harm_eval, SphereQuadrature};
    use crate::wavefield::extend;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// m_{l,t} - 1 by adaptive quadrature of P_{l,d}(cos tau) - 1.
    fn q_oracle(d: usize, l: usize, t: f64) -> f64 {
        let p = d as i32 - 2;
        let f = |tau: f64| legendre_pld_minus_one_all(d, l, 2.0 * (0.5 * tau).sin().powi(2))[l] * tau.sin().powi(p);
        let num = adaptive(f, 0.0, t, 0.0, 1e-13).value;
        let den = adaptive(|tau: f64| tau.sin().powi(p), 0.0, t, 0.0, 1e-13).value;
        num / den
    }

    fn test_spectrum(d: usize, n: usize) -> HarmonicSpectrum {
        HarmonicSpectrum::from_fn(d, n, |l, j| c(((3 * l + j) as f64).sin() / (1.0 + l as f64), ((l * j) as f64).cos() * 0.4))
    }

    #[test]
    fn c_k_anchors() {
        assert!(c_k_coeff(3, 1e-3, 1).unwrap() <= 1e-6);
        assert!((c_k_coeff(3, PI / 2.0, 1).unwrap() - 1.0).abs() < 1e-11);
        assert!((c_k_coeff(3, PI, 1).unwrap() - 2.0).abs() < 1e-11);
        for &t in &[1e-4, 0.1, 1.0, 2.5] {
            assert!((c_k_coeff(3, t, 1).unwrap() - (1.0 - t.cos())).abs() < 1e-11);
            // d = 3, k = 2: mean of 4(1 - cos)^2 over the cap is (4/3)(1 - cos t)^2.
            let w = 1.0 - t.cos();
            assert!((c_k_coeff(3, t, 2).unwrap() - 4.0 / 3.0 * w * w).abs() < 1e-11);
            // d = 2: (1/t) int_0^t (2 - 2 cos) = 2 - 2 sin t / t.
            assert!((c_k_coeff(2, t, 1).unwrap() - (2.0 - 2.0 * t.sin() / t)).abs() < 1e-11);
        }
        assert!(c_k_coeff(3, 0.0, 1).is_err());
        assert!(c_k_coeff(3, 4.0, 1).is_err());
    }

    #[test]
    fn cap_values_match_adaptive_eigenvalues() {
        for d in [2usize, 3] {
            for &t in &[1e-3, 0.3, 1.7, PI] {
                let (q, _) = cap_values(d, 20, 1, t);
                for l in [1usize, 5, 20] {
                    let want = q_oracle(d, l, t);
                    assert!((q[l] - want).abs() < 1e-11, "d={d} t={t} l={l}: {} vs {want}", q[l]);
                }
            }
        }
    }

    #[test]
    fn mode_weight_basics() {
        assert_eq!(s_alpha_mode_weight(3, 1.0, 0).unwrap(), 0.0);
        for l in 1..5 {
            assert!(s_alpha_mode_weight(3, 1.0, l).unwrap() > 0.0);
        }
        assert!(s_alpha_mode_weight(3, 2.0, 1).is_err());
        assert!(s_alpha_mode_weight(3, 0.0, 1).is_err());
    }

    #[test]
    fn grid_matches_adaptive_mode_weight() {
        for d in [2usize, 3] {
            for &alpha in &[0.5, 1.0, 1.5, 1.9] {
                let grid = grid_mode_weights(d, 16, alpha).unwrap();
                for l in [1usize, 4, 16] {
                    let a = s_alpha_mode_weight(d, alpha, l).unwrap();
                    assert!((grid[l] / a - 1.0).abs() < 1e-8, "d={d} a={alpha} l={l}: {} vs {a}", grid[l]);
                }
            }
        }
    }

    #[test]
    fn mode_weight_tracks_sobolev_weight() {
        let ratios: Vec<f64> = (1..=32)
            .map(|l| s_alpha_mode_weight(3, 1.0, l).unwrap() / sobolev_weight(3, l).powi(2))
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.0 && hi / lo < 10.0, "{lo} {hi}");
    }

    #[test]
    fn small_t_slope() {
        for &alpha in &[0.5, 1.0, 1.5] {
            for l in [1usize, 3, 8] {
                let (a, b) = (1e-4, 1e-2);
                let slope = (s_alpha_integrand(3, alpha, l, b) / s_alpha_integrand(3, alpha, l, a)).ln() / (b / a).ln();
                assert!(slope >= 3.0 - 2.0 * alpha - 0.1, "a={alpha} l={l}: {slope}");
            }
        }
    }

    #[test]
    fn pointwise_single_mode_and_constant() {
        let dir = Direction::from_spherical(0.7, 1.9);
        let k = HarmonicSpectrum::single_mode(3, 4, 0, 1, c(2.0, 1.0)).unwrap();
        assert_eq!(s_alpha_pointwise(&k, 1.0, &dir).unwrap(), 0.0);
        for (l, j) in [(1usize, 2usize), (3, 5), (4, 1)] {
            let f = HarmonicSpectrum::single_mode(3, 4, l, j, c(1.0, 0.0)).unwrap();
            let w = grid_mode_weights(3, 4, 1.0).unwrap()[l];
            let want = w.sqrt() * sph_harm_eval(3, l, j, &dir).unwrap().abs();
            assert_relative_eq!(s_alpha_pointwise(&f, 1.0, &dir).unwrap(), want, max_relative = 1e-12);
        }
        let f4 = HarmonicSpectrum::zeros(4, 2);
        assert!(matches!(s_alpha_pointwise(&f4, 1.0, &Direction::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap()), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn spectral_identity_n0() {
        for d in [2usize, 3] {
            let f = test_spectrum(d, 8);
            let q = SphereQuadrature::new(d, 16).unwrap();
            let alpha = 1.3;
            let pointwise: f64 = q.nodes.iter().zip(&q.weights).map(|(x, w)| w * s_alpha_pointwise(&f, alpha, x).unwrap().powi(2)).sum();
            let spectral: f64 = s_alpha_energies(&f, &[], alpha).unwrap().iter().sum();
            assert!((pointwise / spectral - 1.0).abs() < 1e-8, "d={d}: {pointwise} vs {spectral}");
        }
    }

    #[test]
    fn spectral_identity_general() {
        let f = test_spectrum(3, 8);
        let q = SphereQuadrature::new(3, 16).unwrap();
        for alpha in [2.0, 2.5] {
            let comp = build_companions(&f, alpha, 1).unwrap();
            let pointwise: f64 =
                q.nodes.iter().zip(&q.weights).map(|(x, w)| w * s_alpha_general(&f, &comp, alpha, x).unwrap().powi(2)).sum();
            let spectral: f64 = s_alpha_energies(&f, &comp.companions, alpha).unwrap().iter().sum();
            assert!((pointwise / spectral - 1.0).abs() < 1e-8, "alpha={alpha}: {pointwise} vs {spectral}");
            assert!(spectral.is_finite());
        }
    }

    #[test]
    fn n1_closed_form_and_dense_oracle() {
        let (d, alpha) = (3usize, 2.5);
        for l in [1usize, 2, 6] {
            let gamma = companion_coefficients(d, l, alpha, 1).unwrap()[0];
            // Normal-equation ratio on the same grid.
            let table = CapTable::shared(d, l, 1);
            let w = table.grid.weighted(alpha);
            let num: f64 = (0..w.len()).map(|i| w[i] * table.q[i][l] * table.c[i][0]).sum();
            let den: f64 = (0..w.len()).map(|i| w[i] * table.c[i][0].powi(2)).sum();
            assert_relative_eq!(gamma, num / den, max_relative = 1e-10);
            // Dense independent grid, closed-form d = 3 ingredients.
            let dense = TGrid::graded(T_MIN, 1.08, 0.02, 10);
            let (mut nn, mut dd) = (0.0, 0.0);
            for (t, wt) in dense.nodes.iter().zip(dense.weighted(alpha)) {
                let q = q_oracle(d, l, *t);
                let c1 = 2.0 * (0.5 * t).sin().powi(2);
                nn += wt * q * c1;
                dd += wt * c1 * c1;
            }
            assert_relative_eq!(gamma, nn / dd, max_relative = 1e-6);
            let lim = limiting_companion_coefficient(d, l);
            assert!((gamma / lim - 1.0).abs() < 1e-3, "l={l}: {gamma} vs {lim}");
        }
        assert_eq!(companion_coefficients(3, 0, 2.5, 1).unwrap(), vec![0.0]);
    }

    #[test]
    fn companions_are_locally_optimal() {
        for alpha in [2.0, 2.5, 3.5, 4.5] {
            let n = companion_count(alpha);
            for l in [1usize, 3, 7] {
                let g = companion_coefficients(3, l, alpha, n).unwrap();
                let base = companion_objective(3, l, alpha, &g);
                for k in 0..n {
                    for eps in [1e-3, -1e-3] {
                        let mut p = g.clone();
                        p[k] += eps;
                        assert!(companion_objective(3, l, alpha, &p) >= base, "a={alpha} l={l} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn optimal_companion_beats_zero() {
        let f = HarmonicSpectrum::single_mode(3, 3, 1, 2, c(1.0, 0.0)).unwrap();
        let alpha = 2.1;
        let comp = build_companions(&f, alpha, 1).unwrap();
        let zero = CompanionSet::zeros(&f, alpha);
        let dir = Direction::from_spherical(1.1, 0.4);
        let a = s_alpha_general(&f, &comp, alpha, &dir).unwrap();
        let b = s_alpha_general(&f, &zero, alpha, &dir).unwrap();
        assert!(a < b, "{a} vs {b}");
        let k = HarmonicSpectrum::single_mode(3, 3, 0, 1, c(1.0, 0.0)).unwrap();
        assert_eq!(s_alpha_general(&k, &CompanionSet::zeros(&k, 2.5), 2.5, &dir).unwrap(), 0.0);
    }

    #[test]
    fn companion_count_checked() {
        let f = test_spectrum(3, 4);
        assert!(matches!(build_companions(&f, 2.5, 2), Err(Error::CompanionMismatch { .. })));
        let comp = build_companions(&f, 2.5, 1).unwrap();
        let dir = Direction::from_spherical(0.3, 0.3);
        assert!(matches!(s_alpha_general(&f, &comp, 4.5, &dir), Err(Error::CompanionMismatch { .. })));
        assert!(build_companions(&f, 1.5, 0).is_err());
    }

    #[test]
    fn a_norm_constant_and_scaling() {
        let k = HarmonicSpectrum::single_mode(3, 6, 0, 1, c(3.0, 0.0)).unwrap();
        assert_eq!(s_alpha_a_norm(&extend(&k), &[], 1.0).unwrap(), 0.0);
        let f = test_spectrum(3, 6);
        let a = s_alpha_a_norm(&extend(&f), &[], 1.0).unwrap();
        let b = s_alpha_a_norm(&extend(&f.scaled(c(0.0, 2.0))), &[], 1.0).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-12);
        let comp = build_companions(&f, 2.5, 1).unwrap();
        let v = s_alpha_a_norm(&extend(&f), &comp.wavefields(), 2.5).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
