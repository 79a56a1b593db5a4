//! Physical constants (CODATA 2018, SI).

use std::f64::consts::PI;

pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const H_PLANCK: f64 = 6.626_070_15e-34;
pub const C_LIGHT: f64 = 299_792_458.0;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const AMU: f64 = 1.660_539_066_60e-27;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
pub const ELECTRON_G: f64 = 2.002_319_304_36;

pub const GAUSS: f64 = 1e-4;

/// Ordinary frequency in THz to angular frequency in rad/s.
pub fn thz_to_rad(f: f64) -> f64 {
    2.0 * PI * f * 1e12
}

pub fn rad_to_thz(w: f64) -> f64 {
    w / (2.0 * PI * 1e12)
}

/// Vacuum wavelength (m) of light at angular frequency `w`.
pub fn wavelength(w: f64) -> f64 {
    2.0 * PI * C_LIGHT / w
}
