//! Memoized radial Bessel integrals
//! G(mu, s, R) = int_0^R J_mu(r)^2 r (1 + r^2)^{-s} dr.
//!
//! Each (mu, s) pair owns a cumulative table over panels of width pi/4, so
//! any R costs one lookup plus one partial panel. Tables grow on demand and
//! the accumulation order never depends on how they were grown.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::quadrature::{gauss_legendre, GaussRule};
use crate::special::bessel_j_unchecked;

pub const PANEL_WIDTH: f64 = PI / 4.0;
pub const PANEL_NODES: usize = 12;
/// Truncation radius for the infinite integral with s = 3/2.
pub const I3_CUTOFF: f64 = 31_623.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteIntegral {
    pub value: f64,
    pub cutoff: f64,
    /// Bound on the neglected tail after the leading-order correction.
    pub tail_bound: f64,
}

type Key = (u64, u64);

#[derive(Default)]
pub struct RadialIntegralCache {
    tables: RwLock<HashMap<Key, Arc<Vec<f64>>>>,
    infinite: RwLock<HashMap<u64, InfiniteIntegral>>,
}

fn integrand(mu: f64, s: f64, r: f64) -> f64 {
    let j = bessel_j_unchecked(mu, r);
    let w = if s == 0.0 { 1.0 } else { (1.0 + r * r).powf(-s) };
    j * j * r * w
}

fn panel_integral(rule: &GaussRule, mu: f64, s: f64, a: f64, b: f64) -> f64 {
    if a == 0.0 {
        // Graded split of the first panel for non-integer powers at r = 0.
        let mut total = 0.0;
        let mut hi = b;
        for _ in 0..6 {
            let lo = hi / 4.0;
            total += rule.integrate(lo, hi, |r| integrand(mu, s, r));
            hi = lo;
        }
        return total + rule.integrate(0.0, hi, |r| integrand(mu, s, r));
    }
    rule.integrate(a, b, |r| integrand(mu, s, r))
}

impl RadialIntegralCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide shared cache.
    pub fn global() -> &'static RadialIntegralCache {
        static CACHE: OnceLock<RadialIntegralCache> = OnceLock::new();
        CACHE.get_or_init(RadialIntegralCache::new)
    }

    fn table(&self, mu: f64, s: f64, panels: usize) -> Arc<Vec<f64>> {
        let key = (mu.to_bits(), s.to_bits());
        if let Some(t) = self.tables.read().unwrap().get(&key) {
            if t.len() > panels {
                return t.clone();
            }
        }
        let existing = self.tables.read().unwrap().get(&key).cloned();
        let mut cum: Vec<f64> = match existing {
            Some(t) => t.as_ref().clone(),
            None => vec![0.0],
        };
        let target = panels.max(2 * (cum.len() - 1)).max(64);
        let rule = gauss_legendre(PANEL_NODES);
        while cum.len() <= target {
            let k = cum.len() - 1;
            let a = k as f64 * PANEL_WIDTH;
            let v = panel_integral(&rule, mu, s, a, a + PANEL_WIDTH);
            cum.push(cum[k] + v);
        }
        let cum = Arc::new(cum);
        let mut w = self.tables.write().unwrap();
        let entry = w.entry(key).or_insert_with(|| cum.clone());
        if entry.len() < cum.len() {
            *entry = cum.clone();
        }
        entry.clone()
    }

    /// int_0^R J_mu^2 r (1 + r^2)^{-s} dr.
    pub fn integral(&self, mu: f64, s: f64, r_max: f64) -> f64 {
        if r_max <= 0.0 {
            return 0.0;
        }
        let k = (r_max / PANEL_WIDTH).floor() as usize;
        let t = self.table(mu, s, k + 1);
        let a = k as f64 * PANEL_WIDTH;
        if r_max == a {
            return t[k];
        }
        let rule = gauss_legendre(PANEL_NODES);
        t[k] + panel_integral(&rule, mu, s, a, r_max)
    }

    /// (1/R) int_0^R J_mu^2 r (1 + r^2)^{-s} dr; s may be negative.
    pub fn average(&self, mu: f64, s: f64, r_max: f64) -> f64 {
        if r_max <= 0.0 {
            return 0.0;
        }
        self.integral(mu, s, r_max) / r_max
    }

    /// int_0^inf J_mu^2 r <r>^{-3} dr, truncated at [`I3_CUTOFF`] with the
    /// leading tail (1/pi) int_R^inf <r>^{-3} dr added back.
    pub fn i3(&self, mu: f64) -> InfiniteIntegral {
        if let Some(v) = self.infinite.read().unwrap().get(&mu.to_bits()) {
            return *v;
        }
        let r = I3_CUTOFF;
        let body = self.integral(mu, 1.5, r);
        let tail = (1.0 - r / (1.0 + r * r).sqrt()) / PI;
        let v = InfiniteIntegral { value: body + tail, cutoff: r, tail_bound: 1.0 / (r * r) };
        self.infinite.write().unwrap().insert(mu.to_bits(), v);
        v
    }

    /// Number of cached (mu, s) tables.
    pub fn len(&self) -> usize {
        self.tables.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
