use ionscatter_core::constants::rad_to_thz;
use ionscatter_core::gates::Gate;
use ionscatter_core::Result;

use crate::setup::{gate, model_name, side, Reporting, Setup};
use crate::{Common, RelativeTo, SideArg};

pub fn run(c: &Common, target: f64, side_arg: SideArg) -> Result<()> {
    let s = Setup::new(c, 1.0)?;
    let sel = gate(c.gate);
    let th = s
        .engine
        .threshold_detuning(&s.trap, target, side(side_arg), sel)?;
    let rep = Reporting::new(&s.engine, RelativeTo::Auto)?;
    let (x, reference) = rep.printed(th.delta);
    let power = match sel {
        Gate::OneQubit => s.engine.power_1q(th.delta, s.gate_time, s.waist)?,
        Gate::TwoQubit => s.engine.power_2q(th.delta, s.gate_time, s.waist, &s.trap)?,
    };
    let r = &th.report;
    println!(
        "{} {:?} qubit, {} gate, {:?} side, {} model",
        s.species.name,
        s.engine.encoding(),
        if sel == Gate::OneQubit { "1q" } else { "2q" },
        side_arg,
        model_name(&s.engine.model)
    );
    println!("target error       {target:e}");
    println!("detuning/2π        {x:.4} THz from {reference}");
    println!("laser wavelength   {:.2} nm", th.laser_wavelength * 1e9);
    println!("Raman error        {:.6e}", r.p_raman);
    if sel == Gate::TwoQubit {
        println!("Lamb-Dicke η       {:.5}", r.eta);
        println!("Rayleigh bound     {:.3e}", r.p_rayleigh_recoil_bound);
    }
    println!("gate time          {:.3} µs", s.gate_time * 1e6);
    println!("total power        {:.4} W", power.total_power);
    let per: Vec<String> = power.per_beam.iter().map(|p| format!("{p:.4}")).collect();
    println!("per-beam power     {} W", per.join(" / "));
    for z in &th.rabi_zeros {
        let (zx, zr) = rep.printed(*z);
        println!(
            "Rabi zero crossed  {zx:.4} THz from {zr} ({:.4} THz from P3/2)",
            rad_to_thz(*z)
        );
    }
    Ok(())
}
