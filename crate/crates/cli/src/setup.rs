use std::f64::consts::PI;

use ionscatter_core::constants::{rad_to_thz, thz_to_rad};
use ionscatter_core::gates::{EtaConvention, Gate, Side, TrapConfig};
use ionscatter_core::scattering::{BeamConfig, Engine, ModelVariant};
use ionscatter_core::species::{resolve, Encoding, SpeciesData};
use ionscatter_core::{Error, Result};

use crate::{Common, EncodingArg, EtaArg, GateArg, ModelArg, OnOff, RelativeTo, SideArg};

pub fn encoding(e: EncodingArg) -> Encoding {
    match e {
        EncodingArg::G => Encoding::G,
        EncodingArg::M => Encoding::M,
    }
}

pub fn gate(g: GateArg) -> Gate {
    match g {
        GateArg::One => Gate::OneQubit,
        GateArg::Two => Gate::TwoQubit,
    }
}

pub fn side(s: SideArg) -> Side {
    match s {
        SideArg::Red => Side::Red,
        SideArg::Blue => Side::Blue,
    }
}

pub fn eta_convention(e: EtaArg) -> EtaConvention {
    match e {
        EtaArg::Eq => EtaConvention::Eq,
        EtaArg::Table2 => EtaConvention::Table2,
    }
}

pub fn model(m: ModelArg, higher: OnOff) -> ModelVariant {
    match m {
        ModelArg::Simplified => ModelVariant::simplified(),
        ModelArg::Full => ModelVariant::full().with_higher_levels(higher == OnOff::On),
    }
}

pub fn model_name(m: &ModelVariant) -> &'static str {
    if m.is_simplified() {
        "simplified"
    } else {
        "full"
    }
}

pub fn positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} must be positive, got {x}"
        )))
    }
}

pub fn trap(mhz: f64, eta: EtaArg) -> Result<TrapConfig> {
    let t = TrapConfig::new(2.0 * PI * positive(mhz, "--trap-mhz")? * 1e6)
        .with_convention(eta_convention(eta));
    t.validate()?;
    Ok(t)
}

/// Species, engine and trap for the shared flags; beams of `power_each` W.
pub struct Setup {
    pub species: SpeciesData,
    pub engine: Engine,
    pub trap: TrapConfig,
    pub waist: f64,
    pub gate_time: f64,
}

impl Setup {
    pub fn new(c: &Common, power_each: f64) -> Result<Self> {
        let species = resolve(&c.species)?;
        let waist = positive(c.waist_um, "--waist-um")? * 1e-6;
        let gate_time = positive(c.gate_time_us, "--gate-time-us")? * 1e-6;
        let enc = encoding(c.encoding);
        let beams = BeamConfig::for_encoding(enc, power_each, waist);
        let engine = Engine::new(&species, enc, &beams, model(c.model, c.higher_levels))?;
        Ok(Setup {
            trap: trap(c.trap_mhz, c.eta_convention)?,
            species,
            engine,
            waist,
            gate_time,
        })
    }
}

/// Detunings as printed: g-qubit red detunings from P1/2, everything else from P3/2.
#[derive(Clone, Copy)]
pub struct Reporting {
    /// Offset of P1/2 below P3/2 (rad/s), zero when no P1/2 convention applies.
    fine: f64,
}

impl Reporting {
    pub fn new(engine: &Engine, rel: RelativeTo) -> Result<Self> {
        let fine = match (engine.encoding(), rel) {
            (Encoding::G, RelativeTo::Auto) => engine.species.fine_structure()?,
            _ => 0.0,
        };
        Ok(Reporting { fine })
    }

    /// Printed value (THz) → Δ from P3/2 (rad/s).
    pub fn delta_of(self, x_thz: f64) -> f64 {
        if self.fine > 0.0 && x_thz < 0.0 {
            thz_to_rad(x_thz) - self.fine
        } else {
            thz_to_rad(x_thz)
        }
    }

    /// Δ from P3/2 → (printed value in THz, reference line).
    pub fn printed(self, delta: f64) -> (f64, &'static str) {
        if self.fine > 0.0 && delta < -self.fine {
            (rad_to_thz(delta + self.fine), "P1/2")
        } else {
            (rad_to_thz(delta), "P3/2")
        }
    }
}

pub fn species_list(names: &[String]) -> Vec<String> {
    if names.is_empty() {
        ionscatter_core::species::BUILTIN_NAMES
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        names.to_vec()
    }
}
