use std::f64::consts::PI;

use ionscatter_core::angular::HalfInt;
use ionscatter_core::constants::{BOHR_RADIUS, EPS0};
use ionscatter_core::limits::{
    dc_polarizability, elastic_cross_section, elastic_cross_section_with, highest_transition,
    lowest_transition, red_limit_cross_section, thomson_limit_check, trk_partial_sum,
};
use ionscatter_core::species::{resolve, HyperfineState};
use ionscatter_core::Result;

use crate::setup::species_list;

pub fn run(names: &[String]) -> Result<()> {
    println!(
        "{:<8} {:>8} {:>14} {:>12} {:>12} {:>12} {:>12}",
        "species", "trk", "blue/trk^2", "red/alpha0", "blue no-V", "red no-V", "alpha0 (au)"
    );
    for n in species_list(names) {
        let sp = resolve(&n)?;
        let f = sp.nuclear_spin + HalfInt::from_twice(1);
        let mf = if f.twice() % 2 == 0 {
            HalfInt::ZERO
        } else {
            HalfInt::from_twice(1)
        };
        let i = HyperfineState::new("S1/2", f, mf);
        let trk = trk_partial_sum(&sp, &i)?;
        let top = 1e3 * highest_transition(&sp, &i)?;
        let low = 1e-3 * lowest_transition(&sp, &i)?;
        let blue = thomson_limit_check(&sp, &i, top)? / (trk * trk);
        let red_sigma = red_limit_cross_section(&sp, &i, low)?;
        let red = elastic_cross_section(&sp, &i, low)?.sigma / red_sigma;
        let b = elastic_cross_section_with(&sp, &i, top, false)?;
        let blue_nv = b.sigma / b.thomson_sigma / (trk * trk);
        let red_nv = elastic_cross_section_with(&sp, &i, low, false)?.sigma / red_sigma;
        let au = dc_polarizability(&sp, &i)? / (4.0 * PI * EPS0 * BOHR_RADIUS.powi(3));
        println!(
            "{:<8} {:>8.4} {:>14.6} {:>12.6} {:>12.4} {:>12.4} {:>12.2}",
            sp.name, trk, blue, red, blue_nv, red_nv, au
        );
    }
    Ok(())
}
