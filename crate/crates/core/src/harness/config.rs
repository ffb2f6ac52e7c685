use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Suites the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteId {
    TheoremL,
    TheoremS,
    TheoremSGeneral,
    TheoremK,
    PropGrowth,
    PropRecovery,
    Appendix,
}

impl SuiteId {
    pub const ALL: [SuiteId; 7] = [
        SuiteId::TheoremL,
        SuiteId::TheoremS,
        SuiteId::TheoremSGeneral,
        SuiteId::TheoremK,
        SuiteId::PropGrowth,
        SuiteId::PropRecovery,
        SuiteId::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::TheoremL => "theorem_l",
            SuiteId::TheoremS => "theorem_s",
            SuiteId::TheoremSGeneral => "theorem_s_general",
            SuiteId::TheoremK => "theorem_k",
            SuiteId::PropGrowth => "prop_growth",
            SuiteId::PropRecovery => "prop_recovery",
            SuiteId::Appendix => "appendix",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }

    /// Alphas this suite accepts.
    pub fn accepts(self, alpha: f64) -> bool {
        match self {
            SuiteId::TheoremL => alpha.is_finite(),
            SuiteId::TheoremS => alpha > 0.0 && alpha < 2.0,
            SuiteId::TheoremSGeneral => (2.0..4.0).contains(&alpha),
            SuiteId::TheoremK | SuiteId::PropGrowth => alpha > 0.0 && alpha.is_finite(),
            SuiteId::PropRecovery => alpha >= 0.0 && alpha.is_finite(),
            SuiteId::Appendix => true,
        }
    }
}

/// Per-suite alpha grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlphaGrids {
    pub theorem_l: Vec<f64>,
    pub theorem_s: Vec<f64>,
    pub theorem_s_general: Vec<f64>,
    pub theorem_k: Vec<f64>,
    pub prop_growth: Vec<f64>,
    pub prop_recovery: Vec<f64>,
}

impl Default for AlphaGrids {
    fn default() -> Self {
        AlphaGrids {
            theorem_l: vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
            theorem_s: vec![0.5, 1.0, 1.5],
            theorem_s_general: vec![2.0, 2.5, 3.0],
            theorem_k: vec![0.5, 1.0],
            prop_growth: vec![0.5, 1.0],
            prop_recovery: vec![0.0, 0.5, 1.0],
        }
    }
}

/// Bounds frozen after the calibration run (seed 7, N = 16, 20 samples,
/// gamma = 1); observed spreads are recorded beside each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// max/min of ||E phi||_alpha / ||phi||_{H^alpha}.
    pub theorem_l_spread: f64,
    /// max/min of ||S_alpha u||_A / ||phi||_{H^alpha}.
    pub theorem_s_spread: f64,
    pub theorem_s_general_spread: f64,
    /// max/min of ||K_alpha u||_A / ||phi||_{H^-alpha}.
    pub theorem_k_spread: f64,
    /// Kernel path vs multiplier path, relative.
    pub kernel_agreement: f64,
    /// max/min of the weighted A-functional over ||phi||^2_{H^-alpha}.
    pub growth_spread: f64,
    /// Required growth of the (1+|x|^2)^alpha average from R = 10 to 1000.
    pub divergence_factor: f64,
    /// Largest dyadic block ratio accepted as geometric decay.
    pub block_decay: f64,
    pub lema_spread: f64,
    pub lema_spread_per_s: f64,
    /// Floor for (1 + mu)^2 I3(mu) on [0.5, 50].
    pub i3_floor: f64,
    pub band_integral_min: f64,
    pub band_integral_max: f64,
    pub envelope_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            theorem_l_spread: 10.0, // observed 1.38
            theorem_s_spread: 10.0, // observed 1.42
            theorem_s_general_spread: 20.0, // observed 1.08
            theorem_k_spread: 10.0, // observed 1.20
            kernel_agreement: 1e-4, // observed 2.5e-10
            growth_spread: 10.0, // observed 1.77
            divergence_factor: 10.0, // observed >= 94
            block_decay: 0.95,
            lema_spread: 50.0, // observed 1.88
            lema_spread_per_s: 25.0, // observed 1.74
            i3_floor: 0.3, // observed min 0.331 at mu = 50
            band_integral_min: 0.1,
            band_integral_max: 10.0,
            envelope_max: 3.0, // observed 1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub dims: Vec<usize>,
    /// Overrides every suite grid when set; each suite keeps the values it accepts.
    pub alphas: Option<Vec<f64>>,
    pub grids: AlphaGrids,
    pub max_degree: usize,
    pub samples: usize,
    pub seed: u64,
    /// Coefficient decay (1 + l)^{-gamma} of sampled densities.
    pub gamma: f64,
    pub tolerances: Tolerances,
    pub suites: Vec<SuiteId>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dims: vec![2, 3],
            alphas: None,
            grids: AlphaGrids::default(),
            max_degree: 16,
            samples: 20,
            seed: 7,
            gamma: 1.0,
            tolerances: Tolerances::default(),
            suites: SuiteId::ALL.to_vec(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_degree < 1 {
            return Err(Error::Config("max_degree must be >= 1".into()));
        }
        if self.samples < 1 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(Error::Config(format!("dims must be >= 2, got {:?}", self.dims)));
        }
        if !self.gamma.is_finite() {
            return Err(Error::Config("gamma must be finite".into()));
        }
        if let Some(a) = &self.alphas {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config("alphas must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Alpha grid for a suite after the override filter.
    pub fn alpha_grid(&self, suite: SuiteId) -> Vec<f64> {
        let base = match &self.alphas {
            Some(a) => a.clone(),
            None => match suite {
                SuiteId::TheoremL => self.grids.theorem_l.clone(),
                SuiteId::TheoremS => self.grids.theorem_s.clone(),
                SuiteId::TheoremSGeneral => self.grids.theorem_s_general.clone(),
                SuiteId::TheoremK => self.grids.theorem_k.clone(),
                SuiteId::PropGrowth => self.grids.prop_growth.clone(),
                SuiteId::PropRecovery => self.grids.prop_recovery.clone(),
                SuiteId::Appendix => Vec::new(),
            },
        };
        base.into_iter().filter(|a| suite.accepts(*a)).collect()
    }

    /// Dimensions where pointwise and kernel paths exist.
    pub fn pointwise_dims(&self) -> Vec<usize> {
        self.dims.iter().copied().filter(|d| *d == 2 || *d == 3).collect()
    }
}
