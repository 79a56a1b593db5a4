//! Elastic light scattering off one manifold and its classical limits:
//! Thomson scattering far above all resonances, Rayleigh's ω⁴ law far below.
//!
//! |⟨i|r|k⟩|² here is one Cartesian component of the line strength per
//! initial sublevel, (1/3)Σ_{k,q}|⟨i|r_q|k⟩|², which makes the oscillator sum
//! Σ ω_ki|⟨i|r|k⟩|² equal ħ/2mₑ for one electron.

use std::f64::consts::PI;

use crate::constants::{BOHR_RADIUS, C_LIGHT, ELECTRON_MASS, EPS0, E_CHARGE, FINE_STRUCTURE, HBAR};
use crate::couplings::reduced_j_species;
use crate::error::{Error, Result};
use crate::species::{HyperfineState, SpeciesData};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossSectionResult {
    /// m²
    pub sigma: f64,
    /// rad/s
    pub omega_l: f64,
    /// (8π/3)α⁴a₀², m²
    pub thomson_sigma: f64,
    pub trk_fraction: f64,
}

/// (8π/3)α⁴a₀².
pub fn thomson_cross_section() -> f64 {
    8.0 * PI / 3.0 * FINE_STRUCTURE.powi(4) * BOHR_RADIUS * BOHR_RADIUS
}

/// (ω_ki, |⟨i|r|k⟩|² in m²) for every manifold with a listed transition to `i`.
fn couplings(species: &SpeciesData, i: &HyperfineState) -> Result<Vec<(f64, f64)>> {
    let ii = species
        .level_index(&i.level)
        .ok_or_else(|| Error::InvalidArgument(format!("no level {:?}", i.level)))?;
    let li = &species.levels[ii];
    let mut out = Vec::new();
    for (k, lk) in species.levels.iter().enumerate() {
        if k == ii || species.transition(&li.label, &lk.label).is_none() {
            continue;
        }
        let red = reduced_j_species(species, ii, k)? * BOHR_RADIUS;
        let strength = red * red / (li.j.twice() + 1) as f64 / 3.0;
        out.push((lk.energy() - li.energy(), strength));
    }
    Ok(out)
}

/// σ(ω_L) for elastic scattering off `i`; `with_v` keeps the counter-rotating
/// (V) term, without which neither classical limit is recovered.
pub fn elastic_cross_section_with(
    species: &SpeciesData,
    i: &HyperfineState,
    omega_l: f64,
    with_v: bool,
) -> Result<CrossSectionResult> {
    if !(omega_l > 0.0) {
        return Err(Error::Domain(format!(
            "laser frequency {omega_l:e} is not positive"
        )));
    }
    let mut sum = 0.0;
    for (w, s) in couplings(species, i)? {
        if (w - omega_l).abs() <= 1e-9 * w.abs() {
            return Err(Error::Pole {
                delta: omega_l,
                what: "laser resonant with a dipole transition".into(),
            });
        }
        sum += s / (w - omega_l);
        if with_v {
            sum += s / (w + omega_l);
        }
    }
    let sigma =
        FINE_STRUCTURE.powi(2) * 8.0 * PI / 3.0 * omega_l.powi(4) / (C_LIGHT * C_LIGHT) * sum * sum;
    Ok(CrossSectionResult {
        sigma,
        omega_l,
        thomson_sigma: thomson_cross_section(),
        trk_fraction: trk_partial_sum(species, i)?,
    })
}

pub fn elastic_cross_section(
    species: &SpeciesData,
    i: &HyperfineState,
    omega_l: f64,
) -> Result<CrossSectionResult> {
    elastic_cross_section_with(species, i, omega_l, true)
}

/// Σ_k ω_ki|⟨i|r|k⟩|² over the file's levels, as a fraction of ħ/2mₑ.
pub fn trk_partial_sum(species: &SpeciesData, i: &HyperfineState) -> Result<f64> {
    let s: f64 = couplings(species, i)?.iter().map(|(w, s)| w * s).sum();
    Ok(s / (HBAR / (2.0 * ELECTRON_MASS)))
}

/// σ(ω_large)/σ_Thomson; tends to the square of the TRK fraction.
pub fn thomson_limit_check(
    species: &SpeciesData,
    i: &HyperfineState,
    omega_large: f64,
) -> Result<f64> {
    let r = elastic_cross_section(species, i, omega_large)?;
    Ok(r.sigma / r.thomson_sigma)
}

/// Static scalar polarizability 2e²Σ_k|⟨i|r|k⟩|²/(ħω_ki), C·m²/V.
pub fn dc_polarizability(species: &SpeciesData, i: &HyperfineState) -> Result<f64> {
    let s: f64 = couplings(species, i)?.iter().map(|(w, s)| s / w).sum();
    Ok(2.0 * E_CHARGE * E_CHARGE * s / HBAR)
}

/// Low-frequency limit (8π/3)k⁴(α⁽⁰⁾/4πε₀)².
pub fn red_limit_cross_section(
    species: &SpeciesData,
    i: &HyperfineState,
    omega_l: f64,
) -> Result<f64> {
    let a = dc_polarizability(species, i)? / (4.0 * PI * EPS0);
    let k = omega_l / C_LIGHT;
    Ok(8.0 * PI / 3.0 * k.powi(4) * a * a)
}

/// Smallest |ω_ki| among transitions out of `i`.
pub fn lowest_transition(species: &SpeciesData, i: &HyperfineState) -> Result<f64> {
    couplings(species, i)?
        .iter()
        .map(|(w, _)| w.abs())
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::DataMissing(format!("no transitions out of {}", i.level)))
}

pub fn highest_transition(species: &SpeciesData, i: &HyperfineState) -> Result<f64> {
    couplings(species, i)?
        .iter()
        .map(|(w, _)| w.abs())
        .max_by(f64::total_cmp)
        .ok_or_else(|| Error::DataMissing(format!("no transitions out of {}", i.level)))
}
