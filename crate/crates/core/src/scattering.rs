//! Two-photon spontaneous scattering during a Raman drive: ΛV and ladder
//! rates summed over intermediate and final hyperfine sublevels.
//!
//! All detunings are measured from the P3/2 manifold mean; the laser angular
//! frequency is ω_L = ω_Pi + Δ. Sublevel energy spreads are ignored inside
//! the optical denominators.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::{dipole_matrix, Manifold};
use crate::constants::{BOHR_RADIUS, E_CHARGE, HBAR};
use crate::couplings::{decay_prefactor, decay_rate, field_from_power, Polarization};
use crate::error::{Error, Result};
use crate::species::{Encoding, HyperfineState, SpeciesData};
use crate::zeeman::{resolve_qubit, ResolvedQubit};

/// Denominators closer to zero than this fraction of ω_KQ count as resonant.
const POLE_FRACTION: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamRole {
    Red,
    Blue,
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beam {
    pub polarization: Polarization,
    /// W
    pub power: f64,
    pub role: BeamRole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// Two co-propagating beams plus a counter-propagating one at twice the power (MS gate).
    CoPropagatingPairPlusCounter,
    CounterPropagatingPair,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamConfig {
    pub beams: Vec<Beam>,
    /// 1/e² intensity radius, m
    pub waist: f64,
    pub geometry: Geometry,
}

impl BeamConfig {
    /// Default (red, blue) polarizations: both π for m qubits; for g qubits
    /// orthogonal linear polarizations perpendicular to the field, so each beam
    /// has equal σ⁺ and σ⁻ parts. Parallel polarizations cannot drive the
    /// hyperfine-changing transition.
    pub fn default_polarizations(encoding: Encoding) -> (Polarization, Polarization) {
        match encoding {
            Encoding::M => (Polarization::pi(), Polarization::pi()),
            Encoding::G => (
                Polarization::linear_transverse(0.0),
                Polarization::linear_transverse(std::f64::consts::FRAC_PI_2),
            ),
        }
    }

    /// Red/blue pair of equal power `power_each` (single-qubit drive).
    pub fn pair(red: Polarization, blue: Polarization, power_each: f64, waist: f64) -> Self {
        BeamConfig {
            beams: vec![
                Beam {
                    polarization: red,
                    power: power_each,
                    role: BeamRole::Red,
                },
                Beam {
                    polarization: blue,
                    power: power_each,
                    role: BeamRole::Blue,
                },
            ],
            waist,
            geometry: Geometry::CounterPropagatingPair,
        }
    }

    /// MS beams: red and blue at `power_each`, counter-propagating third beam at twice that.
    pub fn ms_triplet(red: Polarization, blue: Polarization, power_each: f64, waist: f64) -> Self {
        let mut c = Self::pair(red, blue, power_each, waist);
        c.beams.push(Beam {
            polarization: blue,
            power: 2.0 * power_each,
            role: BeamRole::Third,
        });
        c.geometry = Geometry::CoPropagatingPairPlusCounter;
        c
    }

    pub fn for_encoding(encoding: Encoding, power_each: f64, waist: f64) -> Self {
        let (r, b) = Self::default_polarizations(encoding);
        Self::pair(r, b, power_each, waist)
    }

    pub fn ms_for_encoding(encoding: Encoding, power_each: f64, waist: f64) -> Self {
        let (r, b) = Self::default_polarizations(encoding);
        Self::ms_triplet(r, b, power_each, waist)
    }

    pub fn total_power(&self) -> f64 {
        self.beams.iter().map(|b| b.power).sum()
    }

    /// Same beams with every power multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut c = self.clone();
        for b in &mut c.beams {
            b.power *= k;
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beam waist {} m is not positive",
                self.waist
            )));
        }
        if self.beams.is_empty() {
            return Err(Error::InvalidArgument("no beams".into()));
        }
        for b in &self.beams {
            if !(b.power >= 0.0) || !b.power.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "beam power {} W is invalid",
                    b.power
                )));
            }
            if (b.polarization.norm_sqr() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(
                    "beam polarization is not normalized".into(),
                ));
            }
        }
        if self.geometry == Geometry::CoPropagatingPairPlusCounter {
            let p = |r| self.beams.iter().find(|b| b.role == r).map(|b| b.power);
            match (p(BeamRole::Red), p(BeamRole::Blue), p(BeamRole::Third)) {
                (Some(r), Some(b), Some(t))
                    if (t - 2.0 * r).abs() <= 1e-12 * t.max(1e-300) && r == b => {}
                _ => {
                    return Err(Error::InvalidArgument(
                        "MS geometry needs red = blue power and a third beam at twice that".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    pub(crate) fn role(&self, role: BeamRole) -> Result<&Beam> {
        self.beams
            .iter()
            .find(|b| b.role == role)
            .ok_or_else(|| Error::InvalidArgument(format!("no {role:?} beam")))
    }
}

/// eE/2ħ for a beam of this configuration (rad/s per metre of dipole length).
pub fn field_rate(power: f64, waist: f64) -> f64 {
    E_CHARGE * field_from_power(power, waist) / (2.0 * HBAR)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Full,
    Simplified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelVariant {
    pub kind: ModelKind,
    pub include_higher_levels: bool,
    pub include_counter_rotating: bool,
    pub include_frequency_cubed: bool,
}

impl ModelVariant {
    pub fn full() -> Self {
        ModelVariant {
            kind: ModelKind::Full,
            include_higher_levels: true,
            include_counter_rotating: true,
            include_frequency_cubed: true,
        }
    }

    pub fn simplified() -> Self {
        ModelVariant {
            kind: ModelKind::Simplified,
            include_higher_levels: false,
            include_counter_rotating: false,
            include_frequency_cubed: false,
        }
    }

    pub fn with_higher_levels(mut self, on: bool) -> Self {
        self.include_higher_levels = on;
        self
    }

    pub fn is_simplified(&self) -> bool {
        self.kind == ModelKind::Simplified
    }

    /// Ladder scattering is part of the full model only.
    pub fn ladder(&self) -> bool {
        self.kind == ModelKind::Full
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_simplified()
            && (self.include_higher_levels
                || self.include_counter_rotating
                || self.include_frequency_cubed)
        {
            return Err(Error::InvalidArgument(
                "the simplified model has no higher levels, counter-rotating or ω³ terms".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Raman,
    Rayleigh,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRate {
    /// Qubit state index (0 or 1) the scattering starts from.
    pub initial: usize,
    pub final_state: HyperfineState,
    /// rad/s, already weighted by ξ_i = ½
    pub rate_lambda_v: f64,
    pub rate_ladder: f64,
    pub classification: Classification,
}

impl ChannelRate {
    pub fn total(&self) -> f64 {
        self.rate_lambda_v + self.rate_ladder
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringBreakdown {
    pub delta: f64,
    pub channels: Vec<ChannelRate>,
}

impl ScatteringBreakdown {
    pub fn raman_total(&self) -> f64 {
        self.sum(|c| c.classification == Classification::Raman)
    }

    pub fn rayleigh_total(&self) -> f64 {
        self.sum(|c| c.classification == Classification::Rayleigh)
    }

    pub fn total(&self) -> f64 {
        self.sum(|_| true)
    }

    /// Total rate into final states of one manifold.
    pub fn into_level(&self, label: &str) -> f64 {
        self.sum(|c| c.final_state.level == label)
    }

    pub fn sum(&self, keep: impl Fn(&ChannelRate) -> bool) -> f64 {
        self.channels
            .iter()
            .filter(|c| keep(c))
            .map(ChannelRate::total)
            .sum()
    }
}

#[derive(Clone, Debug)]
struct Intermediate {
    level: usize,
    /// E_K − E_Q, rad/s
    omega_kq: f64,
}

#[derive(Clone, Debug)]
struct FinalLevel {
    level: usize,
    /// E_Q − E_f, rad/s
    omega_qf: f64,
    /// E_P3/2 − E_f, rad/s
    omega_pf: f64,
}

#[derive(Clone, Debug)]
struct FinalState {
    final_level: usize,
    label: HyperfineState,
    /// Index of the qubit state this final state coincides with.
    qubit: Option<usize>,
}

/// Two-photon numerators for one intermediate manifold, in a0².
#[derive(Clone, Copy, Debug, Default)]
struct Numerators {
    lambda: Complex64,
    vee: Complex64,
    ladder_first: Complex64,
    ladder_second: Complex64,
}

/// Precomputed scattering and Rabi tensors for one species, qubit, beam set and model.
///
/// Construction does all of the angular algebra; evaluating a detuning is a
/// contraction over intermediate manifolds only.
#[derive(Clone, Debug)]
pub struct Engine {
    pub species: SpeciesData,
    pub qubit: ResolvedQubit,
    pub model: ModelVariant,
    pub beams: BeamConfig,
    /// E_P3/2 − E_Q, rad/s
    pub omega_pi: f64,
    /// μ of the P3/2 ↔ qubit manifold pair, a0
    pub mu_pi: f64,
    /// Total P3/2 decay rate from the reduced elements, rad/s
    pub gamma_p32: f64,
    /// P3/2 → qubit manifold branching ratio from the reduced elements
    pub alpha_q: f64,
    inter: Vec<Intermediate>,
    finals: Vec<FinalLevel>,
    states: Vec<FinalState>,
    /// (eE_j/2ħ)² a0⁴ per beam
    beam_scale: Vec<f64>,
    /// Indexed by [((i·nb + j)·ns + s)·3 + (q+1)]·nk + k
    numerators: Vec<Numerators>,
    /// Per intermediate: ⟨1|r·ε_r*|k⟩⟨k|r·ε_b|0⟩ and ⟨1|r·ε_r|k⟩⟨k|r·ε_b*|0⟩, a0²
    rabi: Vec<(Complex64, Complex64)>,
    rabi_phase: Complex64,
    rabi_scale: f64,
    rho: OnceLock<f64>,
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

fn polarized(d: &[DMatrix<f64>; 3], pol: &Polarization) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(d[0].nrows(), d[0].ncols());
    for q in -1..=1 {
        let c = pol.component(q);
        if c.norm_sqr() != 0.0 {
            out += d[(q + 1) as usize].map(|x| c * x);
        }
    }
    out
}

fn dipoles(species: &SpeciesData, a: &Manifold, b: &Manifold) -> Result<[DMatrix<f64>; 3]> {
    Ok([
        dipole_matrix(species, a, b, -1)?,
        dipole_matrix(species, a, b, 0)?,
        dipole_matrix(species, a, b, 1)?,
    ])
}

fn braket(bra: &DVector<f64>, m: &DMatrix<Complex64>, ket: &DVector<Complex64>) -> Complex64 {
    let v = m * ket;
    bra.iter().zip(v.iter()).map(|(a, b)| b * *a).sum()
}

impl Engine {
    pub fn new(
        species: &SpeciesData,
        encoding: Encoding,
        beams: &BeamConfig,
        model: ModelVariant,
    ) -> Result<Self> {
        let qubit = resolve_qubit(species, encoding)?;
        Self::with_qubit(species, qubit, beams, model)
    }

    pub fn with_qubit(
        species: &SpeciesData,
        qubit: ResolvedQubit,
        beams: &BeamConfig,
        model: ModelVariant,
    ) -> Result<Self> {
        model.validate()?;
        beams.validate()?;
        let q_idx = qubit.level;
        let levels = &species.levels;
        let p32 = species.p32_index()?;
        let p12 = species.p12_index()?;
        let e_q = levels[q_idx].energy();
        let omega_pi = levels[p32].energy() - e_q;
        let mu_pi = species.mu_between(p32, q_idx)?;
        if mu_pi == 0.0 {
            return Err(Error::DataMissing(format!(
                "{}: no P3/2 transition to the qubit manifold",
                species.name
            )));
        }

        // P3/2 decay budget from the reduced elements.
        let mut gamma_p32 = 0.0;
        let mut gamma_q = 0.0;
        for (k, lv) in levels.iter().enumerate() {
            if lv.energy() < levels[p32].energy()
                && species.transition(&levels[p32].label, &lv.label).is_some()
            {
                let g = decay_rate(
                    species.mu_between(p32, k)?,
                    levels[p32].energy() - lv.energy(),
                )?;
                gamma_p32 += g;
                if k == q_idx {
                    gamma_q = g;
                }
            }
        }

        let inter: Vec<Intermediate> = levels
            .iter()
            .enumerate()
            .filter(|(k, lv)| {
                let core = *k == p12 || *k == p32;
                let allowed = match model.kind {
                    ModelKind::Simplified => core,
                    ModelKind::Full => core || model.include_higher_levels,
                };
                allowed
                    && lv.is_odd() != levels[q_idx].is_odd()
                    && species
                        .transition(&lv.label, &levels[q_idx].label)
                        .is_some()
            })
            .map(|(k, lv)| Intermediate {
                level: k,
                omega_kq: lv.energy() - e_q,
            })
            .collect();
        if inter.iter().any(|k| k.omega_kq <= 0.0) {
            return Err(Error::Domain(
                "an intermediate manifold lies below the qubit manifold".into(),
            ));
        }

        let finals: Vec<FinalLevel> = levels
            .iter()
            .enumerate()
            .filter(|(_, lv)| {
                lv.is_odd() == levels[q_idx].is_odd()
                    && inter.iter().any(|k| {
                        species
                            .transition(&levels[k.level].label, &lv.label)
                            .is_some()
                    })
            })
            .map(|(f, lv)| FinalLevel {
                level: f,
                omega_qf: e_q - lv.energy(),
                omega_pf: levels[p32].energy() - lv.energy(),
            })
            .collect();

        // Final-state bases: dressed states in the qubit manifold, |F, mF⟩ elsewhere.
        let q_man = Manifold::new(species, q_idx);
        let mut states = Vec::new();
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for (fi, fl) in finals.iter().enumerate() {
            let lv = &levels[fl.level];
            if fl.level == q_idx {
                for (s, &(f, mf)) in qubit.spectrum.labels.iter().enumerate() {
                    let label = HyperfineState::new(&lv.label, f, mf);
                    let which = [&qubit.spec.state0, &qubit.spec.state1]
                        .iter()
                        .position(|st| st.f == f && st.mf == mf);
                    states.push(FinalState {
                        final_level: fi,
                        label,
                        qubit: which,
                    });
                    basis.push(qubit.spectrum.vectors[s].clone());
                }
            } else {
                let man = Manifold::new(species, fl.level);
                for (f, mf) in man.coupled_labels() {
                    states.push(FinalState {
                        final_level: fi,
                        label: HyperfineState::new(&lv.label, f, mf),
                        qubit: None,
                    });
                    basis.push(man.coupled_vector(f, mf)?);
                }
            }
        }

        let beam_scale: Vec<f64> = beams
            .beams
            .iter()
            .map(|b| (field_rate(b.power, beams.waist) * BOHR_RADIUS * BOHR_RADIUS).powi(2))
            .collect();

        let nb = beams.beams.len();
        let ns = states.len();
        let nk = inter.len();
        let mut numerators = vec![Numerators::default(); 2 * nb * ns * 3 * nk];
        let mut rabi = vec![(Complex64::default(), Complex64::default()); nk];
        let kets: Vec<DVector<Complex64>> = qubit
            .vectors
            .iter()
            .map(|v| v.map(|x| Complex64::new(x, 0.0)))
            .collect();

        let red = beams.role(BeamRole::Red).ok().map(|b| b.polarization);
        let blue = beams.role(BeamRole::Blue).ok().map(|b| b.polarization);

        for (ki, k) in inter.iter().enumerate() {
            let k_man = Manifold::new(species, k.level);
            let d_kq = dipoles(species, &k_man, &q_man)?;
            let d_qk = dipoles(species, &q_man, &k_man)?;
            let d_kq_c = [
                complexify(&d_kq[0]),
                complexify(&d_kq[1]),
                complexify(&d_kq[2]),
            ];

            if let (Some(r), Some(b)) = (red, blue) {
                let lam = polarized(&d_qk, &r.conj()) * polarized(&d_kq, &b);
                let cr = polarized(&d_qk, &r) * polarized(&d_kq, &b.conj());
                rabi[ki] = (
                    braket(&qubit.vectors[1], &lam, &kets[0]),
                    braket(&qubit.vectors[1], &cr, &kets[0]),
                );
            }

            for (fi, fl) in finals.iter().enumerate() {
                if species
                    .transition(&levels[k.level].label, &levels[fl.level].label)
                    .is_none()
                {
                    continue;
                }
                let f_man = Manifold::new(species, fl.level);
                let d_fk = dipoles(species, &f_man, &k_man)?;
                let d_fk_c = [
                    complexify(&d_fk[0]),
                    complexify(&d_fk[1]),
                    complexify(&d_fk[2]),
                ];
                for (j, beam) in beams.beams.iter().enumerate() {
                    let pol = beam.polarization;
                    let pol_c = pol.conj();
                    let p_kq = polarized(&d_kq, &pol);
                    let p_fk = polarized(&d_fk, &pol);
                    let pc_kq = polarized(&d_kq, &pol_c);
                    let pc_fk = polarized(&d_fk, &pol_c);
                    for (i, ket) in kets.iter().enumerate() {
                        let absorbed = &p_kq * ket;
                        let emitted_laser = &pc_kq * ket;
                        for q in -1..=1 {
                            let qi = (q + 1) as usize;
                            let scattered_first = &d_kq_c[qi] * ket;
                            // Vectors over the final manifold, projected onto each final state below.
                            let lam = &d_fk_c[qi] * &absorbed;
                            let vee = &p_fk * &scattered_first;
                            let lad1 = &d_fk_c[qi] * &emitted_laser;
                            let lad2 = &pc_fk * &scattered_first;
                            for (s, st) in states.iter().enumerate() {
                                if st.final_level != fi {
                                    continue;
                                }
                                let phi = &basis[s];
                                let proj = |v: &DVector<Complex64>| -> Complex64 {
                                    phi.iter().zip(v.iter()).map(|(a, b)| b * *a).sum()
                                };
                                let idx = ((((i * nb + j) * ns + s) * 3 + qi) * nk) + ki;
                                numerators[idx] = Numerators {
                                    lambda: proj(&lam),
                                    vee: proj(&vee),
                                    ladder_first: proj(&lad1),
                                    ladder_second: proj(&lad2),
                                };
                            }
                        }
                    }
                }
            }
        }

        let p32_pos = inter.iter().position(|k| k.level == p32);
        let rabi_phase = match p32_pos.map(|p| rabi[p].0) {
            Some(z) if z.norm() > 0.0 => z.conj() / z.norm(),
            _ => Complex64::new(1.0, 0.0),
        };
        let rabi_scale = match (beams.role(BeamRole::Red), beams.role(BeamRole::Blue)) {
            (Ok(r), Ok(b)) => {
                field_rate(r.power, beams.waist)
                    * field_rate(b.power, beams.waist)
                    * BOHR_RADIUS
                    * BOHR_RADIUS
            }
            _ => 0.0,
        };

        Ok(Engine {
            species: species.clone(),
            qubit,
            model,
            beams: beams.clone(),
            omega_pi,
            mu_pi,
            gamma_p32,
            alpha_q: gamma_q / gamma_p32,
            inter,
            finals,
            states,
            beam_scale,
            numerators,
            rabi,
            rabi_phase,
            rabi_scale,
            rho: OnceLock::new(),
        })
    }

    pub fn encoding(&self) -> Encoding {
        self.qubit.spec.encoding
    }

    /// Laser angular frequency at detuning Δ.
    pub fn laser_frequency(&self, delta: f64) -> f64 {
        self.omega_pi + delta
    }

    /// Intermediate-manifold detunings ω_KQ − ω_Pi at which the drive is resonant.
    pub fn resonances(&self) -> Vec<f64> {
        self.inter
            .iter()
            .map(|k| k.omega_kq - self.omega_pi)
            .collect()
    }

    /// Levels of the included intermediate manifolds.
    pub fn intermediate_levels(&self) -> Vec<&str> {
        self.inter
            .iter()
            .map(|k| self.species.levels[k.level].label.as_str())
            .collect()
    }

    pub fn final_levels(&self) -> Vec<&str> {
        self.finals
            .iter()
            .map(|f| self.species.levels[f.level].label.as_str())
            .collect()
    }

    /// ω_Pf for a final manifold, if it is reachable.
    pub fn omega_pf(&self, label: &str) -> Option<f64> {
        self.finals
            .iter()
            .find(|f| self.species.levels[f.level].label == label)
            .map(|f| f.omega_pf)
    }

    fn check_detuning(&self, delta: f64) -> Result<f64> {
        let wl = self.laser_frequency(delta);
        if !delta.is_finite() || !(wl > 0.0) {
            return Err(Error::Domain(format!(
                "detuning {:.6e} rad/s gives a non-positive laser frequency",
                delta
            )));
        }
        for k in &self.inter {
            if (k.omega_kq - wl).abs() <= POLE_FRACTION * k.omega_kq {
                return Err(Error::Pole {
                    delta,
                    what: format!("resonant with {}", self.species.levels[k.level].label),
                });
            }
        }
        Ok(wl)
    }

    /// Emission-rate prefactor e²ω³/(3πε₀ħc³) for a scattered photon at ω_sc
    /// into a manifold with P3/2 frequency ω_Pf; zero if the photon cannot exist.
    fn emission(&self, omega_sc: f64, omega_pf: f64) -> f64 {
        if omega_sc <= 0.0 {
            0.0
        } else if self.model.include_frequency_cubed {
            decay_prefactor(omega_sc)
        } else {
            decay_prefactor(omega_pf)
        }
    }

    /// Per-channel rates at detuning Δ.
    pub fn breakdown(&self, delta: f64) -> Result<ScatteringBreakdown> {
        let wl = self.check_detuning(delta)?;
        let nb = self.beam_scale.len();
        let ns = self.states.len();
        let nk = self.inter.len();
        let cr = self.model.include_counter_rotating;
        let ladder = self.model.ladder() && self.encoding() == Encoding::M;

        let d1: Vec<f64> = self.inter.iter().map(|k| 1.0 / (k.omega_kq - wl)).collect();
        let e1: Vec<f64> = self.inter.iter().map(|k| 1.0 / (k.omega_kq + wl)).collect();
        // Per final manifold: scattered frequencies and second denominators.
        let per_final: Vec<(Vec<f64>, Vec<f64>, f64, f64)> = self
            .finals
            .iter()
            .map(|f| {
                let w_sc = wl + f.omega_qf;
                let w_lad = f.omega_qf - wl;
                let d2 = self
                    .inter
                    .iter()
                    .map(|k| 1.0 / (k.omega_kq + w_sc))
                    .collect();
                let e2 = self
                    .inter
                    .iter()
                    .map(|k| 1.0 / (k.omega_kq + w_lad))
                    .collect();
                (
                    d2,
                    e2,
                    self.emission(w_sc, f.omega_pf),
                    self.emission(w_lad, f.omega_pf),
                )
            })
            .collect();

        let mut channels = Vec::with_capacity(2 * ns);
        for i in 0..2 {
            for (s, st) in self.states.iter().enumerate() {
                let (d2, e2, kap, kap_lad) = &per_final[st.final_level];
                let mut lv = 0.0;
                let mut lad = 0.0;
                for j in 0..nb {
                    // ξ_i = ½
                    let scale = 0.5 * self.beam_scale[j];
                    for qi in 0..3 {
                        let base = (((i * nb + j) * ns + s) * 3 + qi) * nk;
                        let nums = &self.numerators[base..base + nk];
                        if *kap > 0.0 {
                            let mut a = Complex64::default();
                            for (k, n) in nums.iter().enumerate() {
                                a += n.lambda * d1[k];
                                if cr {
                                    a += n.vee * d2[k];
                                }
                            }
                            lv += scale * kap * a.norm_sqr();
                        }
                        if ladder && *kap_lad > 0.0 {
                            let mut a = Complex64::default();
                            for (k, n) in nums.iter().enumerate() {
                                a += n.ladder_first * e1[k] + n.ladder_second * e2[k];
                            }
                            lad += scale * kap_lad * a.norm_sqr();
                        }
                    }
                }
                let classification = if st.qubit == Some(i) {
                    Classification::Rayleigh
                } else {
                    Classification::Raman
                };
                channels.push(ChannelRate {
                    initial: i,
                    final_state: st.label.clone(),
                    rate_lambda_v: lv,
                    rate_ladder: lad,
                    classification,
                });
            }
        }
        Ok(ScatteringBreakdown { delta, channels })
    }

    pub fn raman_total(&self, delta: f64) -> Result<f64> {
        Ok(self.breakdown(delta)?.raman_total())
    }

    pub fn rayleigh_total(&self, delta: f64) -> Result<f64> {
        Ok(self.breakdown(delta)?.rayleigh_total())
    }

    /// Raman share of all scattering at the fixed reference detuning
    /// −√(0.01·0.1)·ω_f (red of P3/2, between the fine-structure resonances).
    pub fn raman_fraction_rho(&self) -> Result<f64> {
        if let Some(&r) = self.rho.get() {
            return Ok(r);
        }
        let r = self.raman_fraction_at(self.rho_reference_detuning()?)?;
        Ok(*self.rho.get_or_init(|| r))
    }

    pub fn rho_reference_detuning(&self) -> Result<f64> {
        Ok(-(0.01f64 * 0.1).sqrt() * self.species.fine_structure()?)
    }

    pub fn raman_fraction_at(&self, delta: f64) -> Result<f64> {
        let b = self.breakdown(delta)?;
        let total = b.total();
        if total == 0.0 {
            return Err(Error::Domain(
                "no scattering at the reference detuning".into(),
            ));
        }
        Ok(b.raman_total() / total)
    }

    /// Signed two-photon Rabi frequency (rad/s); the phase of |1⟩ is chosen so
    /// that the P3/2 co-rotating path is real and positive.
    pub fn rabi_omega(&self, delta: f64) -> Result<f64> {
        let wl = self.check_detuning(delta)?;
        let mut a = Complex64::default();
        for (k, (lam, cr)) in self.inter.iter().zip(&self.rabi) {
            a += lam / (k.omega_kq - wl);
            if self.model.include_counter_rotating {
                a += cr / (k.omega_kq + wl);
            }
        }
        Ok(self.rabi_scale * (a * self.rabi_phase).re)
    }

    /// g²_Pi for the red/blue pair (geometric mean of the two beam couplings).
    pub fn g_pi_squared(&self) -> f64 {
        self.rabi_scale / (BOHR_RADIUS * BOHR_RADIUS) * (self.mu_pi * BOHR_RADIUS).powi(2)
    }

    /// Final states as (label, qubit index it coincides with).
    pub fn final_states(&self) -> impl Iterator<Item = (&HyperfineState, Option<usize>)> {
        self.states.iter().map(|s| (&s.label, s.qubit))
    }
}

fn engine_for(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    model: ModelVariant,
) -> Result<Engine> {
    Engine::new(species, encoding, beams, model)
}

/// ΛV rate (rad/s) into one final sublevel, summed over qubit states and beams.
pub fn rate_lambda_v(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    delta: f64,
    f: &HyperfineState,
    model: ModelVariant,
) -> Result<f64> {
    let b = engine_for(species, encoding, beams, model)?.breakdown(delta)?;
    Ok(b.channels
        .iter()
        .filter(|c| &c.final_state == f)
        .map(|c| c.rate_lambda_v)
        .sum())
}

/// Ladder rate (rad/s) into one final sublevel; zero for g qubits.
pub fn rate_ladder(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    delta: f64,
    f: &HyperfineState,
    model: ModelVariant,
) -> Result<f64> {
    let b = engine_for(species, encoding, beams, model)?.breakdown(delta)?;
    Ok(b.channels
        .iter()
        .filter(|c| &c.final_state == f)
        .map(|c| c.rate_ladder)
        .sum())
}

pub fn raman_total(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    delta: f64,
    model: ModelVariant,
) -> Result<f64> {
    engine_for(species, encoding, beams, model)?.raman_total(delta)
}

pub fn rayleigh_total(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    delta: f64,
    model: ModelVariant,
) -> Result<f64> {
    engine_for(species, encoding, beams, model)?.rayleigh_total(delta)
}

pub fn raman_fraction_rho(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    model: ModelVariant,
) -> Result<f64> {
    engine_for(species, encoding, beams, model)?.raman_fraction_rho()
}
