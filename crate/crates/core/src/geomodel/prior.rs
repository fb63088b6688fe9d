//! Metaparameter priors and sampling.

use super::GeomodelError;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const N_META: usize = 11;

/// Canonical metaparameter order used everywhere a flat vector appears
/// (archives, chain traces, proposal covariances).
pub const META_NAMES: [&str; N_META] = [
    "mu_logk", "sigma_logk", "log10_ar", "d", "e", "k_m", "k_u", "log10_kf1_tm", "log10_kf1_mu",
    "log10_kf2_tm", "log10_kf2_mu",
];

/// The eleven scenario-level uncertain parameters. Log10-parameterized
/// quantities (anisotropy ratio, fault permeabilities) store the log10
/// value, never the raw one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metaparameters {
    /// Mean of natural-log permeability in the target aquifer (log-md).
    pub mu_logk: f64,
    /// Standard deviation of log-permeability.
    pub sigma_logk: f64,
    /// log10 of the vertical/horizontal anisotropy ratio.
    pub log10_ar: f64,
    /// Porosity–log-permeability slope.
    pub d: f64,
    /// Porosity–log-permeability intercept.
    pub e: f64,
    /// Middle-aquifer permeability (md).
    pub k_m: f64,
    /// Upper-aquifer permeability (md).
    pub k_u: f64,
    /// log10 fault-1 permeability, target–middle segment (md).
    pub log10_kf1_tm: f64,
    /// log10 fault-1 permeability, middle–upper segment (md).
    pub log10_kf1_mu: f64,
    /// log10 fault-2 permeability, target–middle segment (md).
    pub log10_kf2_tm: f64,
    /// log10 fault-2 permeability, middle–upper segment (md).
    pub log10_kf2_mu: f64,
}

impl Metaparameters {
    pub fn to_array(&self) -> [f64; N_META] {
        [
            self.mu_logk,
            self.sigma_logk,
            self.log10_ar,
            self.d,
            self.e,
            self.k_m,
            self.k_u,
            self.log10_kf1_tm,
            self.log10_kf1_mu,
            self.log10_kf2_tm,
            self.log10_kf2_mu,
        ]
    }

    pub fn from_array(a: &[f64; N_META]) -> Self {
        Self {
            mu_logk: a[0],
            sigma_logk: a[1],
            log10_ar: a[2],
            d: a[3],
            e: a[4],
            k_m: a[5],
            k_u: a[6],
            log10_kf1_tm: a[7],
            log10_kf1_mu: a[8],
            log10_kf2_tm: a[9],
            log10_kf2_mu: a[10],
        }
    }

    pub fn anisotropy_ratio(&self) -> f64 {
        10f64.powf(self.log10_ar)
    }
}

/// Whether a stored parameter value is the physical value or its log10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorScale {
    Linear,
    Log10,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPrior {
    pub lo: f64,
    pub hi: f64,
    pub scale: PriorScale,
}

impl ParamPrior {
    pub fn range(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

/// Uniform prior intervals for the eleven metaparameters, in canonical
/// order. Point-mass entries (lo == hi) are permitted so that degenerate
/// priors can pin individual parameters in tests and toy problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub params: [ParamPrior; N_META],
}

impl PriorSpec {
    /// The production prior: the intervals used throughout the study.
    pub fn standard() -> Self {
        let lin = |lo, hi| ParamPrior { lo, hi, scale: PriorScale::Linear };
        let log = |lo, hi| ParamPrior { lo, hi, scale: PriorScale::Log10 };
        Self {
            params: [
                lin(4.0, 6.0),     // mu_logk
                lin(1.0, 1.5),     // sigma_logk
                log(-1.3, -0.7),   // log10_ar
                lin(0.02, 0.04),   // d
                lin(0.06, 0.08),   // e
                lin(50.0, 500.0),  // k_m
                lin(50.0, 500.0),  // k_u
                log(-1.0, 2.5),    // log10_kf1_tm
                log(-1.0, 2.5),    // log10_kf1_mu
                log(-1.0, 2.5),    // log10_kf2_tm
                log(-1.0, 2.5),    // log10_kf2_mu
            ],
        }
    }

    pub fn validate(&self) -> Result<(), GeomodelError> {
        for (p, name) in self.params.iter().zip(META_NAMES) {
            if !(p.lo <= p.hi) || !p.lo.is_finite() || !p.hi.is_finite() {
                return Err(GeomodelError::InvalidPrior { name, lo: p.lo, hi: p.hi });
            }
        }
        Ok(())
    }

    pub fn contains(&self, meta: &Metaparameters) -> bool {
        self.params.iter().zip(meta.to_array()).all(|(p, v)| p.contains(v))
    }
}

/// Draws each parameter uniformly on its interval, in the stored scale.
pub fn sample_metaparameters<R: Rng>(prior: &PriorSpec, rng: &mut R) -> Metaparameters {
    let mut vals = [0.0; N_META];
    for (v, p) in vals.iter_mut().zip(prior.params.iter()) {
        let u: f64 = rng.gen();
        *v = p.lo + u * (p.hi - p.lo);
    }
    Metaparameters::from_array(&vals)
}
