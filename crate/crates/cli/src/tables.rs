use std::io::Write;
use std::path::Path;

use ionscatter_core::constants::{wavelength, GAUSS};
use ionscatter_core::gates::{EtaConvention, Gate, Side};
use ionscatter_core::scattering::{BeamConfig, Engine, ModelVariant};
use ionscatter_core::species::{resolve, Encoding, SpeciesData};
use ionscatter_core::zeeman::{clock_point, curvature, qubit_frequency};
use ionscatter_core::{Error, Result};

use crate::setup::{positive, species_list, trap};
use crate::{EtaArg, TableArg};

pub struct Settings {
    pub eta: EtaArg,
    pub trap_mhz: f64,
    pub waist_um: f64,
    pub gate_time_us: f64,
}

/// Published comparison values, keyed by (species, qubit, quantity).
const REFERENCE: &[(&str, &str, &str, f64)] = &[
    ("Be9", "", "gamma", 19.4),
    ("Mg25", "", "gamma", 41.8),
    ("Ca43", "", "gamma", 23.2),
    ("Sr87", "", "gamma", 24.0),
    ("Ba133", "", "gamma", 25.2),
    ("Ba135", "", "gamma", 25.2),
    ("Ba137", "", "gamma", 25.2),
    ("Yb171", "", "gamma", 25.9),
    ("Yb173", "", "gamma", 25.9),
    ("Be9", "g", "freq", 1.3),
    ("Mg25", "g", "freq", 1.8),
    ("Ca43", "g", "freq", 3.2),
    ("Sr87", "g", "freq", 5.0),
    ("Ba133", "g", "freq", 9.9),
    ("Ba135", "g", "freq", 7.2),
    ("Ba137", "g", "freq", 8.0),
    ("Yb171", "g", "freq", 12.6),
    ("Yb173", "g", "freq", 10.5),
    ("Ca43", "m", "freq", 25.0),
    ("Ca43", "g", "curvature", 1.21),
    ("Ba133", "m", "clock", 33.0),
    ("Ca43", "m", "eta", 0.036),
    ("Sr87", "m", "eta", 0.021),
    ("Ba133", "m", "eta", 0.028),
    ("Ba135", "m", "eta", 0.028),
    ("Ba137", "m", "eta", 0.028),
    ("Be9", "g", "eta", 0.213),
    ("Mg25", "g", "eta", 0.143),
    ("Ca43", "g", "eta", 0.077),
    ("Sr87", "g", "eta", 0.053),
    ("Ba133", "g", "eta", 0.038),
    ("Ba135", "g", "eta", 0.038),
    ("Ba137", "g", "eta", 0.038),
    ("Yb171", "g", "eta", 0.046),
    ("Yb173", "g", "eta", 0.047),
    ("Ca43", "g", "delta", -9.05),
    ("Ca43", "m", "delta", -40.0),
    ("Sr87", "m", "delta", -66.0),
    ("Ba133", "m", "delta", -45.3),
    ("Yb171", "g", "delta", -15.3),
    ("Ca43", "g", "wavelength", 402.0),
    ("Ca43", "m", "wavelength", 963.0),
    ("Sr87", "m", "wavelength", 1335.0),
    ("Ba133", "m", "wavelength", 676.0),
    ("Ca43", "g", "power", 0.30),
    ("Ca43", "m", "power", 4.9),
    ("Be9", "g", "power", 0.067),
];

fn reference(species: &str, qubit: &str, quantity: &str) -> Option<f64> {
    REFERENCE
        .iter()
        .find(|r| r.0 == species && r.1 == qubit && r.2 == quantity)
        .map(|r| r.3)
}

struct Entry {
    species: String,
    qubit: &'static str,
    quantity: &'static str,
    unit: &'static str,
    /// None when the quantity has no solution for this species.
    value: Option<f64>,
}

fn qubit_tag(e: Encoding) -> &'static str {
    match e {
        Encoding::G => "g",
        Encoding::M => "m",
    }
}

fn table1_rows(sp: &SpeciesData, out: &mut Vec<Entry>) -> Result<()> {
    let name = sp.name.clone();
    let g_enc = if sp.qubit(Encoding::G).is_ok() {
        Encoding::G
    } else {
        Encoding::M
    };
    let beams = BeamConfig::for_encoding(g_enc, 1.0, 20e-6);
    let gamma = Engine::new(sp, g_enc, &beams, ModelVariant::full())?.gamma_p32;
    out.push(Entry {
        species: name.clone(),
        qubit: "",
        quantity: "gamma",
        unit: "MHz",
        value: Some(gamma / (2.0 * std::f64::consts::PI * 1e6)),
    });
    for enc in [Encoding::G, Encoding::M] {
        let Ok(q) = sp.qubit(enc) else { continue };
        let tag = qubit_tag(enc);
        let b = match q.clock_field() {
            Some(b) => b,
            None => clock_point(sp, q)?,
        };
        let f = qubit_frequency(sp, q, b)?;
        let (unit, scale) = if enc == Encoding::G {
            ("GHz", 1e9)
        } else {
            ("MHz", 1e6)
        };
        out.push(Entry {
            species: name.clone(),
            qubit: tag,
            quantity: "freq",
            unit,
            value: Some(f / scale),
        });
        out.push(Entry {
            species: name.clone(),
            qubit: tag,
            quantity: "clock",
            unit: "G",
            value: Some(b / GAUSS),
        });
        out.push(Entry {
            species: name.clone(),
            qubit: tag,
            quantity: "curvature",
            unit: "kHz/G^2",
            value: Some(curvature(sp, q)? * GAUSS * GAUSS / 1e3),
        });
    }
    Ok(())
}

fn table2_rows(sp: &SpeciesData, s: &Settings, out: &mut Vec<Entry>) -> Result<()> {
    let t_err = trap(s.trap_mhz, s.eta)?;
    // Power is quoted with the k_L z₀ Lamb-Dicke factor.
    let t_pow = t_err.with_convention(EtaConvention::Table2);
    let waist = positive(s.waist_um, "--waist-um")? * 1e-6;
    let tau = positive(s.gate_time_us, "--gate-time-us")? * 1e-6;
    for enc in [Encoding::M, Encoding::G] {
        if sp.qubit(enc).is_err() {
            continue;
        }
        let tag = qubit_tag(enc);
        let e = Engine::new(
            sp,
            enc,
            &BeamConfig::for_encoding(enc, 1.0, waist),
            ModelVariant::full(),
        )?;
        let name = sp.name.clone();
        out.push(Entry {
            species: name.clone(),
            qubit: tag,
            quantity: "eta",
            unit: "",
            value: Some(e.eta(0.0, &t_pow)?),
        });
        let (delta, wl, power) = match e.threshold_detuning(&t_err, 1e-4, Side::Red, Gate::TwoQubit)
        {
            Ok(th) => {
                let p = e.power_2q(th.delta, tau, waist, &t_pow)?.total_power;
                (
                    Some(ionscatter_core::constants::rad_to_thz(th.offset)),
                    Some(wavelength(e.laser_frequency(th.delta)) * 1e9),
                    Some(p),
                )
            }
            Err(Error::NoSolution { .. }) => (None, None, None),
            Err(x) => return Err(x),
        };
        out.push(Entry {
            species: name.clone(),
            qubit: tag,
            quantity: "delta",
            unit: "THz",
            value: delta,
        });
        out.push(Entry {
            species: name.clone(),
            qubit: tag,
            quantity: "wavelength",
            unit: "nm",
            value: wl,
        });
        out.push(Entry {
            species: name,
            qubit: tag,
            quantity: "power",
            unit: "W",
            value: power,
        });
    }
    Ok(())
}

fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.4}"),
        None => String::new(),
    }
}

pub fn run(which: TableArg, names: &[String], s: &Settings, out: Option<&Path>) -> Result<()> {
    let mut rows = Vec::new();
    for n in species_list(names) {
        let sp = resolve(&n)?;
        match which {
            TableArg::Table1 => table1_rows(&sp, &mut rows)?,
            TableArg::Table2 => table2_rows(&sp, s, &mut rows)?,
        }
    }
    let header = [
        "species",
        "qubit",
        "quantity",
        "unit",
        "value",
        "reference",
        "deviation_pct",
    ];
    let records: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            let refv = reference(&r.species, r.qubit, r.quantity);
            let dev = match (r.value, refv) {
                (Some(v), Some(w)) => format!("{:.1}", 100.0 * (v / w - 1.0)),
                _ => String::new(),
            };
            let value = if r.value.is_none() {
                "none".to_string()
            } else {
                cell(r.value)
            };
            [
                r.species.clone(),
                r.qubit.to_string(),
                r.quantity.to_string(),
                r.unit.to_string(),
                value,
                cell(refv),
                dev,
            ]
        })
        .collect();

    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "{:<8} {:<5} {:<11} {:<8} {:>12} {:>11} {:>8}",
        "species", "qubit", "quantity", "unit", "value", "reference", "dev %"
    )?;
    for r in &records {
        writeln!(
            stdout,
            "{:<8} {:<5} {:<11} {:<8} {:>12} {:>11} {:>8}",
            r[0], r[1], r[2], r[3], r[4], r[5], r[6]
        )?;
    }
    if which == TableArg::Table2 {
        writeln!(stdout, "delta: 2q error 1e-4 on the red side (g qubits from P1/2); power at that detuning with the k_L z0 Lamb-Dicke factor")?;
    }
    if let Some(p) = out {
        let mut w = csv::Writer::from_path(p).map_err(|e| Error::Io(e.into()))?;
        w.write_record(header).map_err(|e| Error::Io(e.into()))?;
        for r in &records {
            w.write_record(r).map_err(|e| Error::Io(e.into()))?;
        }
        w.flush()?;
    }
    Ok(())
}
