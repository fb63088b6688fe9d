//! Corey drainage relative permeability for the CO₂/brine pair.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreyParams {
    /// Brine Corey exponent.
    pub n_brine: f64,
    /// CO₂ Corey exponent.
    pub n_co2: f64,
    /// Residual (irreducible) brine saturation.
    pub s_wr: f64,
    /// Residual CO₂ saturation.
    pub s_gr: f64,
    pub kr_brine_max: f64,
    pub kr_co2_max: f64,
}

impl Default for CoreyParams {
    fn default() -> Self {
        Self { n_brine: 2.0, n_co2: 2.0, s_wr: 0.2, s_gr: 0.0, kr_brine_max: 1.0, kr_co2_max: 1.0 }
    }
}

impl CoreyParams {
    pub fn validate(&self) -> bool {
        (0.0..0.5).contains(&self.s_wr)
            && (0.0..0.5).contains(&self.s_gr)
            && self.n_brine > 0.0
            && self.n_co2 > 0.0
            && self.kr_brine_max > 0.0
            && self.kr_co2_max > 0.0
    }

    #[inline]
    fn movable_span(&self) -> f64 {
        1.0 - self.s_wr - self.s_gr
    }

    /// CO₂ relative permeability as a function of CO₂ saturation.
    #[inline]
    pub fn kr_co2(&self, s: f64) -> f64 {
        let se = ((s - self.s_gr) / self.movable_span()).clamp(0.0, 1.0);
        self.kr_co2_max * powf_fast(se, self.n_co2)
    }

    /// Brine relative permeability as a function of CO₂ saturation.
    #[inline]
    pub fn kr_brine(&self, s: f64) -> f64 {
        let se = ((1.0 - s - self.s_wr) / self.movable_span()).clamp(0.0, 1.0);
        self.kr_brine_max * powf_fast(se, self.n_brine)
    }

    /// CO₂ fractional flow at equal pressure gradients (no gravity):
    /// λ_g / (λ_g + λ_w).
    pub fn fractional_flow(&self, s: f64, mu_brine: f64, mu_co2: f64) -> f64 {
        let lg = self.kr_co2(s) / mu_co2;
        let lw = self.kr_brine(s) / mu_brine;
        if lg + lw == 0.0 {
            0.0
        } else {
            lg / (lg + lw)
        }
    }
}

/// powf with a fast path for the common integer exponents.
#[inline]
fn powf_fast(base: f64, exp: f64) -> f64 {
    if exp == 2.0 {
        base * base
    } else if exp == 1.0 {
        base
    } else if exp == 3.0 {
        base * base * base
    } else {
        base.powf(exp)
    }
}
