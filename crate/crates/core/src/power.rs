//! Laser power needed to reach a gate time at a detuning, and the simplified
//! closed forms giving power as a function of target error.

use std::f64::consts::{PI, SQRT_2};

use crate::constants::{BOHR_RADIUS, C_LIGHT, EPS0, E_CHARGE, HBAR};
use crate::error::{Error, Result};
use crate::gates::{Gate, TrapConfig};
use crate::scattering::Engine;
use crate::species::Encoding;

#[derive(Clone, Debug, PartialEq)]
pub struct PowerReport {
    /// W, sum of `per_beam`
    pub total_power: f64,
    pub per_beam: Vec<f64>,
    pub detuning: f64,
    pub error: f64,
    pub gate_time: f64,
}

/// Beam power (W) whose P3/2 coupling satisfies g² = `g2` at waist `w0`.
fn power_for_g2(g2: f64, mu_pi: f64, w0: f64) -> f64 {
    let mu = mu_pi * BOHR_RADIUS;
    g2 * (2.0 * HBAR).powi(2) * PI * w0 * w0 * C_LIGHT * EPS0
        / (4.0 * E_CHARGE * E_CHARGE * mu * mu)
}

fn report(per_beam: Vec<f64>, detuning: f64, error: f64, gate_time: f64) -> PowerReport {
    PowerReport {
        total_power: per_beam.iter().sum(),
        per_beam,
        detuning,
        error,
        gate_time,
    }
}

impl Engine {
    fn r_nonzero(&self, delta: f64) -> Result<f64> {
        let r = self.rabi(delta)?.r_of_delta;
        if !(r > 0.0) {
            return Err(Error::NoSolution {
                reason: format!("Rabi frequency vanishes at Δ = {delta:e} rad/s"),
                achievable_min: f64::INFINITY,
            });
        }
        Ok(r)
    }

    /// Two equal beams driving a π rotation in `tau` at waist `w0`.
    pub fn power_1q(&self, delta: f64, tau: f64, w0: f64) -> Result<PowerReport> {
        positive(tau, "gate time")?;
        positive(w0, "waist")?;
        let g2 = PI / (2.0 * tau * self.r_nonzero(delta)?);
        let p = power_for_g2(g2, self.mu_pi, w0);
        Ok(report(
            vec![p, p],
            delta,
            self.error_1q(delta)?.p_raman,
            tau,
        ))
    }

    /// Three MS beams (1:1:2) completing the gate in `tau`.
    pub fn power_2q(
        &self,
        delta: f64,
        tau: f64,
        w0: f64,
        trap: &TrapConfig,
    ) -> Result<PowerReport> {
        positive(tau, "gate time")?;
        positive(w0, "waist")?;
        let eta = self.eta(delta, trap)?;
        let g2 =
            PI * (trap.k as f64).sqrt() / (2.0 * SQRT_2 * tau * eta * self.r_nonzero(delta)?);
        let p = power_for_g2(g2, self.mu_pi, w0);
        Ok(report(
            vec![p, p, 2.0 * p],
            delta,
            self.error_2q(delta, trap)?.p_raman,
            tau,
        ))
    }

    /// Simplified-model power for an m qubit at target error `epsilon`, with no
    /// detuning solve: Δ is eliminated through P = ρπγ/|Δ|. The reported
    /// detuning is the matching red-side value.
    pub fn power_of_error_simplified(
        &self,
        epsilon: f64,
        tau: f64,
        w0: f64,
        trap: &TrapConfig,
        gate: Gate,
    ) -> Result<PowerReport> {
        positive(epsilon, "target error")?;
        positive(tau, "gate time")?;
        positive(w0, "waist")?;
        if self.encoding() != Encoding::M {
            return Err(Error::InvalidArgument(
                "the closed-form power law holds for m qubits only".into(),
            ));
        }
        let rho = self.raman_fraction_rho()?;
        let w3 = self.omega_pi.powi(3);
        let base = rho * PI * HBAR * w3 * w0 * w0 / (C_LIGHT * C_LIGHT * epsilon * self.alpha_q)
            * PI
            / tau;
        match gate {
            Gate::OneQubit => {
                let total = 2.5 * base;
                let delta = -rho * PI * self.gamma_p32 / epsilon;
                Ok(report(vec![total / 2.0; 2], delta, epsilon, tau))
            }
            Gate::TwoQubit => {
                let z0 = crate::gates::ground_state_spread(self.species.mass(), trap.omega_trap)?;
                let eta = crate::gates::lamb_dicke(self.omega_pi, z0, trap, trap.eta_convention)?;
                let total = 10.0 * base * trap.k as f64 / (eta * eta);
                let p = total / 4.0;
                let delta = -rho * PI * self.gamma_p32 * 4.0 * (trap.k as f64).sqrt()
                    / (SQRT_2 * eta * epsilon);
                Ok(report(vec![p, p, 2.0 * p], delta, epsilon, tau))
            }
        }
    }
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} {x} must be positive"
        )))
    }
}
