//! Effective rock compressibility from volumetric-average geomechanical
//! properties, used by the flow simulator in place of coupled
//! flow-geomechanics.

pub const PA_PER_PSI: f64 = 6894.757293168;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomechConstants {
    /// Volumetric average porosity (fraction).
    pub phi_bar: f64,
    /// Biot coefficient.
    pub b: f64,
    /// Young's modulus (Pa).
    pub e_young: f64,
    /// Poisson's ratio.
    pub v: f64,
}

impl GeomechConstants {
    /// Averages over the three aquifers plus the surrounding region.
    pub fn standard() -> Self {
        Self { phi_bar: 0.19, b: 1.0, e_young: 7.74e9, v: 0.23 }
    }

    pub fn validate(&self) -> bool {
        self.phi_bar > 0.0 && self.phi_bar < 1.0 && self.v > 0.0 && self.v < 0.5 && self.e_young > 0.0
    }
}

/// c = (1 − 2v)/(φ̄ E) · [ b²(1 + v)/(1 − v) + 3(b − φ̄)(1 − b) ], in Pa⁻¹.
pub fn effective_compressibility(g: &GeomechConstants) -> f64 {
    let bracket = g.b * g.b * (1.0 + g.v) / (1.0 - g.v) + 3.0 * (g.b - g.phi_bar) * (1.0 - g.b);
    (1.0 - 2.0 * g.v) / (g.phi_bar * g.e_young) * bracket
}
