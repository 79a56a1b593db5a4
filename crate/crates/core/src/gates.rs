//! Gate durations, Lamb-Dicke factors, scattering error probabilities and
//! the detuning at which a gate reaches a target error.

use std::f64::consts::{PI, SQRT_2};

use crate::constants::{thz_to_rad, C_LIGHT, HBAR};
use crate::error::{Error, Result};
use crate::scattering::Engine;
use crate::species::Encoding;

/// Recoil displacement factor 3/8 + 1/(2√2) of the Rayleigh bound.
pub const RECOIL_FACTOR: f64 = 0.375 + 1.0 / (2.0 * SQRT_2);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaConvention {
    /// η = Δk z₀ b_p with Δk = 2k_L.
    Eq,
    /// η/√2, i.e. k_L z₀ for b_p = 1/√2.
    Table2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapConfig {
    /// rad/s
    pub omega_trap: f64,
    /// Mode participation factor b_p.
    pub b_p: f64,
    /// Number of phase-space loops.
    pub k: u32,
    pub eta_convention: EtaConvention,
}

impl TrapConfig {
    pub fn new(omega_trap: f64) -> Self {
        TrapConfig {
            omega_trap,
            b_p: std::f64::consts::FRAC_1_SQRT_2,
            k: 1,
            eta_convention: EtaConvention::Eq,
        }
    }

    pub fn with_convention(mut self, c: EtaConvention) -> Self {
        self.eta_convention = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_trap > 0.0) || !self.omega_trap.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "trap frequency {} is not positive",
                self.omega_trap
            )));
        }
        if !(self.b_p > 0.0 && self.b_p <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mode participation {} not in (0, 1]",
                self.b_p
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument(
                "loop count K must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for TrapConfig {
    fn default() -> Self {
        TrapConfig::new(2.0 * PI * 5e6)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    OneQubit,
    TwoQubit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Red,
    Blue,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateErrorReport {
    pub delta: f64,
    /// s
    pub tau: f64,
    /// Zero for single-qubit gates.
    pub eta: f64,
    pub p_raman: f64,
    /// Zero for single-qubit gates.
    pub p_rayleigh_recoil_bound: f64,
    pub rho: f64,
    pub omega_r: f64,
    pub gamma_raman: f64,
    pub gamma_rayleigh: f64,
    /// Set when a probability exceeds 1 and the perturbative picture no longer holds.
    pub regime_invalid: bool,
}

/// z₀ = √(ħ/2Mω).
pub fn ground_state_spread(mass: f64, omega_trap: f64) -> Result<f64> {
    if !(mass > 0.0) || !(omega_trap > 0.0) {
        return Err(Error::InvalidArgument(
            "mass and trap frequency must be positive".into(),
        ));
    }
    Ok((HBAR / (2.0 * mass * omega_trap)).sqrt())
}

pub fn lamb_dicke(
    omega_l: f64,
    z0: f64,
    trap: &TrapConfig,
    convention: EtaConvention,
) -> Result<f64> {
    if !(omega_l > 0.0) {
        return Err(Error::Domain(format!(
            "laser frequency {omega_l:e} is not positive"
        )));
    }
    let eq = 2.0 * omega_l / C_LIGHT * z0 * trap.b_p;
    Ok(match convention {
        EtaConvention::Eq => eq,
        EtaConvention::Table2 => eq / SQRT_2,
    })
}

pub fn gate_time_1q(omega_r: f64) -> Result<f64> {
    if omega_r == 0.0 || !omega_r.is_finite() {
        return Err(Error::Domain("Rabi frequency is zero".into()));
    }
    Ok(PI / (2.0 * omega_r.abs()))
}

pub fn gate_time_2q(omega_r: f64, eta: f64, k: u32) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Domain(
            "Lamb-Dicke parameter must be positive".into(),
        ));
    }
    Ok(gate_time_1q(omega_r)? * (k as f64).sqrt() / (SQRT_2 * eta))
}

impl Engine {
    /// Lamb-Dicke parameter at Δ: the actual laser frequency in the full
    /// model, the P3/2 resonance in the simplified one.
    pub fn eta(&self, delta: f64, trap: &TrapConfig) -> Result<f64> {
        let z0 = ground_state_spread(self.species.mass(), trap.omega_trap)?;
        let wl = if self.model.is_simplified() {
            self.omega_pi
        } else {
            self.laser_frequency(delta)
        };
        lamb_dicke(wl, z0, trap, trap.eta_convention)
    }

    pub fn error_1q(&self, delta: f64) -> Result<GateErrorReport> {
        let b = self.breakdown(delta)?;
        let omega_r = self.rabi_omega(delta)?;
        let tau = gate_time_1q(omega_r)?;
        let gamma_raman = b.raman_total();
        let p_raman = tau * gamma_raman;
        Ok(GateErrorReport {
            delta,
            tau,
            eta: 0.0,
            p_raman,
            p_rayleigh_recoil_bound: 0.0,
            rho: self.raman_fraction_rho()?,
            omega_r,
            gamma_raman,
            gamma_rayleigh: b.rayleigh_total(),
            regime_invalid: p_raman > 1.0,
        })
    }

    /// MS-gate error: the single-pair rates scaled by the literal factor 4
    /// (two ions, and the extra beam power of the three-beam geometry).
    pub fn error_2q(&self, delta: f64, trap: &TrapConfig) -> Result<GateErrorReport> {
        trap.validate()?;
        let b = self.breakdown(delta)?;
        let omega_r = self.rabi_omega(delta)?;
        let eta = self.eta(delta, trap)?;
        let tau = gate_time_2q(omega_r, eta, trap.k)?;
        let gamma_raman = b.raman_total();
        let gamma_rayleigh = b.rayleigh_total();
        let p_raman = 4.0 * gamma_raman * tau;
        let bound = rayleigh_bound(4.0 * gamma_rayleigh * tau, eta);
        Ok(GateErrorReport {
            delta,
            tau,
            eta,
            p_raman,
            p_rayleigh_recoil_bound: bound,
            rho: self.raman_fraction_rho()?,
            omega_r,
            gamma_raman,
            gamma_rayleigh,
            regime_invalid: p_raman > 1.0 || bound > 1.0,
        })
    }

    pub fn gate_error(&self, gate: Gate, delta: f64, trap: &TrapConfig) -> Result<GateErrorReport> {
        match gate {
            Gate::OneQubit => self.error_1q(delta),
            Gate::TwoQubit => self.error_2q(delta, trap),
        }
    }

    /// Upper bound on the infidelity from Rayleigh recoil during an MS gate.
    pub fn rayleigh_recoil_bound(&self, delta: f64, trap: &TrapConfig) -> Result<f64> {
        Ok(self.error_2q(delta, trap)?.p_rayleigh_recoil_bound)
    }

    /// Resonance the detuning is measured from when searching on a side: P1/2
    /// for the red side of g qubits, P3/2 otherwise.
    pub fn side_origin(&self, side: Side) -> Result<f64> {
        Ok(match (self.encoding(), side) {
            (Encoding::G, Side::Red) => -self.species.fine_structure()?,
            _ => 0.0,
        })
    }

    /// Detuning where the gate's Raman error first falls to `target`, moving
    /// outward from the resonance on the chosen side.
    pub fn threshold_detuning(
        &self,
        trap: &TrapConfig,
        target: f64,
        side: Side,
        gate: Gate,
    ) -> Result<Threshold> {
        if !(target > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "target error {target} is not positive"
            )));
        }
        let origin = self.side_origin(side)?;
        let sign = match side {
            Side::Red => -1.0,
            Side::Blue => 1.0,
        };
        // Furthest offset searched: laser frequency → 0 on the red side,
        // twice the highest included resonance on the blue side.
        let limit = match side {
            Side::Red => (self.omega_pi + origin) * (1.0 - 1e-6),
            Side::Blue => self
                .resonances()
                .into_iter()
                .fold(self.omega_pi, |a, r| a.max(r + self.omega_pi)),
        };
        let err = |x: f64| -> Result<(f64, f64)> {
            let d = origin + sign * x;
            let r = self.gate_error(gate, d, trap)?;
            Ok((r.p_raman, r.omega_r))
        };

        let mut x = thz_to_rad(0.1);
        let step = 1.05;
        let mut prev: Option<(f64, f64, f64)> = None;
        let mut best = (f64::INFINITY, f64::NAN);
        let mut rabi_zeros = Vec::new();
        while x <= limit {
            let (e, om) = match err(x) {
                Ok(v) => v,
                Err(Error::Pole { .. }) | Err(Error::Domain(_)) => {
                    x *= step;
                    prev = None;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if e < best.0 {
                best = (e, origin + sign * x);
            }
            if let Some((xp, ep, omp)) = prev {
                if omp.signum() != om.signum() {
                    if let Some(z) = self.bisect_zero(&err, xp, x)? {
                        rabi_zeros.push(origin + sign * z);
                    }
                }
                if ep > target && e <= target {
                    let xs = self.bisect_target(&err, xp, x, target)?;
                    let delta = origin + sign * xs;
                    let report = self.gate_error(gate, delta, trap)?;
                    return Ok(Threshold {
                        delta,
                        offset: sign * xs,
                        side,
                        laser_wavelength: 2.0 * PI * C_LIGHT / self.laser_frequency(delta),
                        report,
                        rabi_zeros,
                    });
                }
            } else if e <= target {
                // Already below target at the innermost point.
                let delta = origin + sign * x;
                return Ok(Threshold {
                    delta,
                    offset: sign * x,
                    side,
                    laser_wavelength: 2.0 * PI * C_LIGHT / self.laser_frequency(delta),
                    report: self.gate_error(gate, delta, trap)?,
                    rabi_zeros,
                });
            }
            prev = Some((x, e, om));
            x *= step;
        }
        Err(Error::NoSolution {
            reason: format!(
                "error {target:e} not reached on the {side:?} side (best {:.3e} at Δ/2π = {:.3} THz)",
                best.0,
                best.1 / (2.0 * PI * 1e12)
            ),
            achievable_min: best.0,
        })
    }

    fn bisect_target(
        &self,
        err: &dyn Fn(f64) -> Result<(f64, f64)>,
        mut hi_err_x: f64,
        mut lo_err_x: f64,
        target: f64,
    ) -> Result<f64> {
        for _ in 0..200 {
            let m = 0.5 * (hi_err_x + lo_err_x);
            let (e, _) = err(m)?;
            if ((e - target) / target).abs() <= 1e-12 {
                return Ok(m);
            }
            if e > target {
                hi_err_x = m;
            } else {
                lo_err_x = m;
            }
            if (hi_err_x - lo_err_x).abs() <= 1e-15 * m {
                return Ok(m);
            }
        }
        Ok(0.5 * (hi_err_x + lo_err_x))
    }

    /// Sign change of Ω between `a` and `b`: a zero, or None when the bracket
    /// closes on a resonance instead.
    fn bisect_zero(
        &self,
        err: &dyn Fn(f64) -> Result<(f64, f64)>,
        mut a: f64,
        mut b: f64,
    ) -> Result<Option<f64>> {
        let sa = err(a)?.1.signum();
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            let om = match err(m) {
                Ok((_, om)) => om,
                Err(Error::Pole { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            if om.signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        // Across a pole |Ω| grows without bound instead of vanishing.
        let m = 0.5 * (a + b);
        let (_, om) = err(m)?;
        let (_, oa) = err(a)?;
        Ok((om.abs() <= oa.abs()).then_some(m))
    }
}

/// ε_Ray ≤ P_E2q η² (3/8 + 1/(2√2)).
pub fn rayleigh_bound(p_elastic: f64, eta: f64) -> f64 {
    p_elastic * eta * eta * RECOIL_FACTOR
}

#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    /// From the P3/2 mean, rad/s
    pub delta: f64,
    /// From the side's reference resonance, rad/s
    pub offset: f64,
    pub side: Side,
    /// m
    pub laser_wavelength: f64,
    pub report: GateErrorReport,
    /// Detunings of Rabi-frequency sign changes passed on the way out.
    pub rabi_zeros: Vec<f64>,
}
