//! Fine-structure coupling strengths, decay rates, field couplings and the
//! geometric dipole factors between hyperfine sublevels.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::angular::{phase, wigner3j, wigner6j, HalfInt};
use crate::constants::{BOHR_RADIUS, C_LIGHT, EPS0, E_CHARGE, HBAR};
use crate::error::{Error, Result};
use crate::species::{HyperfineState, LevelSpec, SpeciesData};

/// Spherical components of a unit polarization vector, ε = Σ_q c_q ê_q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polarization {
    pub c_minus: Complex64,
    pub c_zero: Complex64,
    pub c_plus: Complex64,
}

impl Polarization {
    pub fn new(c_minus: Complex64, c_zero: Complex64, c_plus: Complex64) -> Result<Self> {
        let p = Polarization {
            c_minus,
            c_zero,
            c_plus,
        };
        let n = p.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "polarization is not normalized (|c|^2 = {n})"
            )));
        }
        Ok(p)
    }

    pub fn pi() -> Self {
        Polarization {
            c_minus: Complex64::new(0.0, 0.0),
            c_zero: Complex64::new(1.0, 0.0),
            c_plus: Complex64::new(0.0, 0.0),
        }
    }

    pub fn sigma_plus() -> Self {
        Polarization {
            c_minus: Complex64::new(0.0, 0.0),
            c_zero: Complex64::new(0.0, 0.0),
            c_plus: Complex64::new(1.0, 0.0),
        }
    }

    pub fn sigma_minus() -> Self {
        Polarization {
            c_minus: Complex64::new(1.0, 0.0),
            c_zero: Complex64::new(0.0, 0.0),
            c_plus: Complex64::new(0.0, 0.0),
        }
    }

    /// Equal σ⁺ and σ⁻ parts (linear polarization perpendicular to the field).
    pub fn sigma_balanced() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Polarization {
            c_minus: Complex64::new(s, 0.0),
            c_zero: Complex64::new(0.0, 0.0),
            c_plus: Complex64::new(s, 0.0),
        }
    }

    /// Linear polarization perpendicular to the quantization axis, at angle `phi`
    /// from x: equal-magnitude σ⁺ and σ⁻ parts with relative phase set by `phi`.
    pub fn linear_transverse(phi: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Polarization {
            c_minus: Complex64::from_polar(s, phi),
            c_zero: Complex64::new(0.0, 0.0),
            c_plus: -Complex64::from_polar(s, -phi),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_minus.norm_sqr() + self.c_zero.norm_sqr() + self.c_plus.norm_sqr()
    }

    /// Component c_q for q ∈ {-1, 0, 1}.
    pub fn component(&self, q: i32) -> Complex64 {
        match q {
            -1 => self.c_minus,
            0 => self.c_zero,
            1 => self.c_plus,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Components of ε*, so that r·ε* = Σ_q d_q r_q with d_q = (-1)^q c*_{-q}.
    pub fn conj(&self) -> Self {
        Polarization {
            c_minus: -self.c_plus.conj(),
            c_zero: self.c_zero.conj(),
            c_plus: -self.c_minus.conj(),
        }
    }
}

/// Field coupling g = eEμ/2ħ of one beam on one manifold pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldCoupling {
    /// rad/s
    pub g: f64,
    /// V/m
    pub e_field: f64,
    /// Bohr radii
    pub mu: f64,
}

impl FieldCoupling {
    pub fn new(e_field: f64, mu: f64) -> Self {
        FieldCoupling {
            g: coupling_g(e_field, mu),
            e_field,
            mu,
        }
    }
}

/// μ_ul = |⟨L_l‖r‖L_u⟩ √((2J_l+1)(2L_l+1)) {L_l L_u 1; J_u J_l S}| in Bohr radii.
pub fn mu(upper: &LevelSpec, lower: &LevelSpec, reduced_element: f64) -> Result<f64> {
    if (upper.l - lower.l).abs() != HalfInt::ONE {
        return Err(Error::Domain(format!(
            "{} -> {} is not dipole-allowed (ΔL = {})",
            upper.label,
            lower.label,
            upper.l - lower.l
        )));
    }
    let six = wigner6j(lower.l, upper.l, HalfInt::ONE, upper.j, lower.j, lower.s)?;
    let pre = ((lower.j.twice() + 1) as f64 * (lower.l.twice() + 1) as f64).sqrt();
    Ok((reduced_element * pre * six).abs())
}

/// Spontaneous decay rate γ = e²ω³μ²/(3πε₀ħc³), μ in Bohr radii.
pub fn decay_rate(mu: f64, omega_ul: f64) -> Result<f64> {
    if !(omega_ul > 0.0) {
        return Err(Error::Domain(format!(
            "transition frequency {omega_ul:e} rad/s is not positive"
        )));
    }
    Ok(decay_prefactor(omega_ul) * (mu * BOHR_RADIUS).powi(2))
}

/// e²ω³/(3πε₀ħc³); multiply by a squared dipole length in m².
pub fn decay_prefactor(omega: f64) -> f64 {
    E_CHARGE * E_CHARGE * omega.powi(3) / (3.0 * PI * EPS0 * HBAR * C_LIGHT.powi(3))
}

/// g = eEμ/2ħ with μ in Bohr radii.
pub fn coupling_g(e_field: f64, mu: f64) -> f64 {
    E_CHARGE * e_field * mu * BOHR_RADIUS / (2.0 * HBAR)
}

/// Peak field of a Gaussian beam, E² = 4𝒫/(πw₀²cε₀).
pub fn field_from_power(power: f64, waist: f64) -> f64 {
    (4.0 * power / (PI * waist * waist * C_LIGHT * EPS0)).sqrt()
}

pub fn power_from_field(e_field: f64, waist: f64) -> f64 {
    e_field * e_field * PI * waist * waist * C_LIGHT * EPS0 / 4.0
}

/// ⟨L_a‖r‖L_b⟩ (Edmonds normalization) for a unit stored element, given that
/// `a` is the lower (true) or upper (false) manifold of the pair.
fn reduced_l_unit(la: HalfInt, lb: HalfInt, a_is_lower: bool) -> f64 {
    let lower = if a_is_lower { la } else { lb };
    let mag = ((lower.twice() + 1) as f64).sqrt();
    if a_is_lower {
        mag
    } else {
        phase(lb.twice() - la.twice()) * mag
    }
}

/// ⟨J_a‖r‖J_b⟩ (Edmonds) for a stored element `r`; sign carried from the L→J reduction.
pub fn reduced_j(a: &LevelSpec, b: &LevelSpec, r: f64) -> Result<f64> {
    if (a.l - b.l).abs() != HalfInt::ONE {
        return Ok(0.0);
    }
    let a_is_lower = a.energy_thz < b.energy_thz;
    let six = wigner6j(a.l, a.j, a.s, b.j, b.l, HalfInt::ONE)?;
    let ph = phase(a.l.twice() + a.s.twice() + b.j.twice() + 2);
    let pre = ((a.j.twice() + 1) as f64 * (b.j.twice() + 1) as f64).sqrt();
    Ok(ph * pre * six * reduced_l_unit(a.l, b.l, a_is_lower) * r)
}

/// ⟨J_a‖r‖J_b⟩ in Bohr radii from the species' transition list (0 if none).
pub fn reduced_j_species(species: &SpeciesData, a: usize, b: usize) -> Result<f64> {
    let (la, lb) = (&species.levels[a], &species.levels[b]);
    match species.transition(&la.label, &lb.label) {
        None => Ok(0.0),
        Some(t) => reduced_j(la, lb, t.reduced_element),
    }
}

/// Geometric factor ⟨f|r_q|i⟩/μ(level_f, level_i) between hyperfine sublevels.
///
/// Depends only on quantum numbers: zero unless the two manifolds are
/// dipole-connected, |ΔF| ≤ 1 and mF(f) = mF(i) + q.
pub fn dipole_factor(
    species: &SpeciesData,
    f: &HyperfineState,
    q: i32,
    i: &HyperfineState,
) -> Result<f64> {
    let lf = species.level_checked(&f.level)?;
    let li = species.level_checked(&i.level)?;
    let nuc = species.nuclear_spin;
    for (st, lv) in [(f, lf), (i, li)] {
        if !HalfInt::couplings(lv.j, nuc).any(|x| x == st.f) || !st.f.admits(st.mf) {
            return Err(Error::InvalidArgument(format!(
                "|F={}, mF={}> is not a sublevel of {}",
                st.f, st.mf, st.level
            )));
        }
    }
    if (lf.l - li.l).abs() != HalfInt::ONE {
        return Ok(0.0);
    }
    let qh = HalfInt::int(q);
    if f.mf != i.mf + qh || q.abs() > 1 {
        return Ok(0.0);
    }
    let (upper, lower) = if lf.energy_thz > li.energy_thz {
        (lf, li)
    } else {
        (li, lf)
    };
    let mu_unit = mu(upper, lower, 1.0)?;
    if mu_unit == 0.0 {
        return Ok(0.0);
    }
    let rj = reduced_j(lf, li, 1.0)?;
    let rf = phase(lf.j.twice() + nuc.twice() + i.f.twice() + 2)
        * ((f.f.twice() + 1) as f64 * (i.f.twice() + 1) as f64).sqrt()
        * wigner6j(lf.j, f.f, nuc, i.f, li.j, HalfInt::ONE)?
        * rj;
    let w = phase(f.f.twice() - f.mf.twice()) * wigner3j(f.f, HalfInt::ONE, i.f, -f.mf, qh, i.mf)?;
    Ok(w * rf / mu_unit)
}
