//! Zonal multipliers: operators acting on spectra by l -> lambda_l.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::adaptive;
use crate::special::{beta_fn, legendre_pld_all, ln_beta};
use crate::sphere::{sin_power_integral, HarmonicSpectrum};

type Rule = dyn Fn(usize) -> Complex64 + Send + Sync;

/// Diagonal operator on spectra. Values are memoized per degree; clones
/// share the memo table.
#[derive(Clone)]
pub struct ZonalMultiplier {
    rule: Arc<Rule>,
    pub label: String,
    pub growth_note: String,
    memo: Arc<RwLock<Vec<Complex64>>>,
}

impl fmt::Debug for ZonalMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZonalMultiplier")
            .field("label", &self.label)
            .field("growth_note", &self.growth_note)
            .finish()
    }
}

impl ZonalMultiplier {
    pub fn new<F>(label: impl Into<String>, growth_note: impl Into<String>, rule: F) -> Self
    where
        F: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        ZonalMultiplier {
            rule: Arc::new(rule),
            label: label.into(),
            growth_note: growth_note.into(),
            memo: Arc::new(RwLock::new(Vec::new())),
        }
    }

    pub fn real<F>(label: impl Into<String>, growth_note: impl Into<String>, rule: F) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, growth_note, move |l| Complex64::new(rule(l), 0.0))
    }

    pub fn identity() -> Self {
        Self::real("identity", "bounded", |_| 1.0)
    }

    /// lambda_0, ..., lambda_n.
    pub fn values(&self, n: usize) -> Vec<Complex64> {
        {
            let memo = self.memo.read().unwrap();
            if memo.len() > n {
                return memo[..=n].to_vec();
            }
        }
        let mut memo = self.memo.write().unwrap();
        while memo.len() <= n {
            let l = memo.len();
            memo.push((self.rule)(l));
        }
        memo[..=n].to_vec()
    }

    pub fn lambda(&self, ell: usize) -> Complex64 {
        if let Some(&v) = self.memo.read().unwrap().get(ell) {
            return v;
        }
        (self.rule)(ell)
    }

    /// Real parts of lambda_0..=lambda_n (for the real sequences of this crate).
    pub fn real_values(&self, n: usize) -> Vec<f64> {
        self.values(n).into_iter().map(|c| c.re).collect()
    }

    /// The multiplier with sequence (self * other)_l.
    pub fn compose(&self, other: &ZonalMultiplier) -> ZonalMultiplier {
        let (a, b) = (self.clone(), other.clone());
        ZonalMultiplier::new(
            format!("{} * {}", self.label, other.label),
            format!("{}; {}", self.growth_note, other.growth_note),
            move |l| a.lambda(l) * b.lambda(l),
        )
    }

    /// Reciprocal sequence, checked on degrees 0..=n.
    pub fn inverse(&self, n: usize) -> Result<ZonalMultiplier> {
        for (ell, v) in self.values(n).into_iter().enumerate() {
            if v.norm() < 1e-300 || !v.norm().is_finite() {
                return Err(Error::NotInvertible { label: self.label.clone(), ell });
            }
        }
        let a = self.clone();
        Ok(ZonalMultiplier::new(format!("({})^-1", self.label), "reciprocal", move |l| 1.0 / a.lambda(l)))
    }
}

/// lambda_l * f_{lj}.
pub fn apply(m: &ZonalMultiplier, f: &HarmonicSpectrum) -> HarmonicSpectrum {
    let vals = m.values(f.max_degree());
    let mut out = f.clone();
    for (ell, lam) in vals.into_iter().enumerate() {
        out.degree_mut(ell).iter_mut().for_each(|c| *c *= lam);
    }
    out
}

/// Eigenvalue sqrt(l(l+d-2)) of (-Laplace-Beltrami)^{1/2}.
pub fn sqrt_eigenvalue(d: usize, ell: usize) -> f64 {
    ((ell * (ell + d - 2)) as f64).sqrt()
}

/// 1 + sqrt(l(l+d-2)).
pub fn sobolev_weight(d: usize, ell: usize) -> f64 {
    1.0 + sqrt_eigenvalue(d, ell)
}

/// L^alpha: l -> (1 + sqrt(l(l+d-2)))^alpha.
pub fn l_alpha_seq(d: usize, alpha: f64) -> ZonalMultiplier {
    ZonalMultiplier::real(format!("L^{alpha} (d={d})"), format!("~ l^{alpha}"), move |l| {
        sobolev_weight(d, l).powf(alpha)
    })
}

/// M_alpha: l -> B(alpha, l+1).
pub fn m_alpha_seq(alpha: f64) -> Result<ZonalMultiplier> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("M_alpha needs alpha > 0, got {alpha}"));
    }
    Ok(ZonalMultiplier::real(format!("M_{alpha}"), format!("~ Gamma({alpha}) l^-{alpha}"), move |l| {
        ln_beta(alpha, l as f64 + 1.0).exp()
    }))
}

/// m_{l,t}: the cap-average eigenvalue, by adaptive quadrature in tau.
pub fn cap_average_eigenvalue(d: usize, ell: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= PI) {
        return domain(format!("cap radius must lie in (0, pi], got {t}"));
    }
    if ell == 0 {
        return Ok(1.0);
    }
    let den = sin_power_integral(d, t);
    let p = d as i32 - 2;
    let num = adaptive(
        |tau: f64| legendre_pld_all(d, ell, tau.cos())[ell] * tau.sin().powi(p),
        0.0,
        t,
        1e-12 * den,
        0.0,
    );
    Ok(num.value / den)
}

/// A_t: l -> m_{l,t}.
pub fn a_t_seq(d: usize, t: f64) -> Result<ZonalMultiplier> {
    if !(t > 0.0 && t <= PI) {
        return domain(format!("cap radius must lie in (0, pi], got {t}"));
    }
    Ok(ZonalMultiplier::real(format!("A_{t} (d={d})"), "bounded by 1", move |l| {
        cap_average_eigenvalue(d, l, t).expect("t validated")
    }))
}

/// P_r: l -> r^l.
pub fn poisson_seq(r: f64) -> Result<ZonalMultiplier> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("Poisson parameter must lie in [0, 1), got {r}"));
    }
    Ok(ZonalMultiplier::real(format!("P_{r}"), "geometric decay", move |l| r.powi(l as i32)))
}

/// pi_N: orthogonal projection onto degrees <= n.
pub fn project_n(n: usize) -> ZonalMultiplier {
    ZonalMultiplier::real(format!("pi_{n}"), "finite support", move |l| if l <= n { 1.0 } else { 0.0 })
}

/// Eigenvalue of M_alpha at degree l, with validation.
pub fn m_alpha_eigenvalue(alpha: f64, ell: usize) -> Result<f64> {
    beta_fn(alpha, ell as f64 + 1.0)
}
