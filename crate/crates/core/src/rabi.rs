//! Two-photon Rabi frequency of the red/blue Raman pair.

use crate::error::Result;
use crate::scattering::{BeamConfig, Engine, ModelVariant};
use crate::species::{Encoding, SpeciesData};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiResult {
    /// Signed, rad/s
    pub omega_r: f64,
    /// |Ω_R|/g²_Pi, s
    pub r_of_delta: f64,
}

impl Engine {
    pub fn rabi(&self, delta: f64) -> Result<RabiResult> {
        let omega_r = self.rabi_omega(delta)?;
        let g2 = self.g_pi_squared();
        let r_of_delta = if g2 > 0.0 {
            omega_r.abs() / g2
        } else {
            // Zero field: r(Δ) is still defined as the Ω/g² ratio at unit power.
            let unit = Engine::with_qubit(
                &self.species,
                self.qubit.clone(),
                &self.beams.scaled(0.0).with_unit_power(),
                self.model,
            )?;
            unit.rabi_omega(delta)?.abs() / unit.g_pi_squared()
        };
        Ok(RabiResult {
            omega_r,
            r_of_delta,
        })
    }
}

impl BeamConfig {
    fn with_unit_power(mut self) -> Self {
        for b in &mut self.beams {
            b.power = 1.0;
        }
        self
    }
}

pub fn rabi_frequency(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    delta: f64,
    model: ModelVariant,
) -> Result<RabiResult> {
    Engine::new(species, encoding, beams, model)?.rabi(delta)
}
