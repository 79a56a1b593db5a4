use std::io::Write;
use std::path::Path;

use ionscatter_core::constants::wavelength;
use ionscatter_core::gates::Gate;
use ionscatter_core::{Error, Result};
use rayon::prelude::*;

use crate::setup::{gate, model_name, positive, Reporting, Setup};
use crate::{Common, RelativeTo};

pub const HEADER: [&str; 11] = [
    "delta_THz",
    "delta_ref",
    "laser_wavelength_nm",
    "error_1q",
    "error_2q",
    "eta",
    "tau_2q_us",
    "power_2q_W",
    "rayleigh_bound",
    "model",
    "flag",
];

#[derive(Clone, Debug, Default)]
struct Values {
    error_1q: f64,
    error_2q: f64,
    eta: f64,
    tau_2q_us: f64,
    power_2q: Option<f64>,
    /// Power for the selected gate, used to detect backbending.
    power_gate: Option<f64>,
    rayleigh_bound: f64,
}

#[derive(Clone, Debug)]
struct Row {
    x_thz: f64,
    reference: &'static str,
    wavelength_nm: Option<f64>,
    values: Option<Values>,
    flag: &'static str,
}

pub fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() || from > to {
        return Err(Error::InvalidArgument(format!(
            "invalid detuning range {from} .. {to}"
        )));
    }
    if from == to {
        return Ok(vec![from]);
    }
    if points < 2 {
        return Err(Error::InvalidArgument(
            "a non-empty range needs at least 2 points".into(),
        ));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|k| from + (to - from) * k as f64 / n)
        .collect())
}

fn evaluate(s: &Setup, sel: Gate, delta: f64) -> Result<(Option<Values>, &'static str)> {
    let e = &s.engine;
    let one = e.error_1q(delta);
    let two = e.error_2q(delta, &s.trap);
    let (one, two) = match (one, two) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::Pole { .. }), _) | (_, Err(Error::Pole { .. })) => return Ok((None, "gap")),
        (Err(Error::Domain(_)), _) | (_, Err(Error::Domain(_))) => return Ok((None, "invalid")),
        (Err(x), _) | (_, Err(x)) => return Err(x),
    };
    let no_solution = |r: Result<f64>| match r {
        Ok(p) => Ok(Some(p)),
        Err(Error::NoSolution { .. }) => Ok(None),
        Err(x) => Err(x),
    };
    let power_2q = no_solution(
        e.power_2q(delta, s.gate_time, s.waist, &s.trap)
            .map(|r| r.total_power),
    )?;
    let power_gate = match sel {
        Gate::TwoQubit => power_2q,
        Gate::OneQubit => no_solution(
            e.power_1q(delta, s.gate_time, s.waist)
                .map(|r| r.total_power),
        )?,
    };
    let sel_invalid = match sel {
        Gate::OneQubit => one.regime_invalid,
        Gate::TwoQubit => two.regime_invalid,
    };
    let flag = if sel_invalid || power_gate.is_none() {
        "invalid"
    } else {
        ""
    };
    Ok((
        Some(Values {
            error_1q: one.p_raman,
            error_2q: two.p_raman,
            eta: two.eta,
            tau_2q_us: two.tau * 1e6,
            power_2q,
            power_gate,
            rayleigh_bound: two.p_rayleigh_recoil_bound,
        }),
        flag,
    ))
}

/// Marks rows past an error minimum: moving away from the resonance, both the
/// error and the power needed for the gate rise.
fn mark_backbend(rows: &mut [Row], sel: Gate) {
    let key = |r: &Row| -> Option<(f64, f64)> {
        let v = r.values.as_ref()?;
        let err = match sel {
            Gate::OneQubit => v.error_1q,
            Gate::TwoQubit => v.error_2q,
        };
        Some((err, v.power_gate?))
    };
    let mut marks = vec![false; rows.len()];
    for i in 0..rows.len() {
        let x = rows[i].x_thz;
        let inward = if x < 0.0 {
            i + 1
        } else if x > 0.0 && i > 0 {
            i - 1
        } else {
            continue;
        };
        if inward >= rows.len()
            || rows[inward].x_thz.signum() != x.signum()
            || rows[i].reference != rows[inward].reference
        {
            continue;
        }
        if let (Some((e, p)), Some((ei, pi))) = (key(&rows[i]), key(&rows[inward])) {
            marks[i] = e > ei && p > pi;
        }
    }
    for (r, m) in rows.iter_mut().zip(marks) {
        if m && r.flag.is_empty() {
            r.flag = "backbend";
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.10e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn run(
    c: &Common,
    from: f64,
    to: f64,
    points: usize,
    rel: RelativeTo,
    beam_power_w: f64,
    out: Option<&Path>,
) -> Result<()> {
    let xs = grid(from, to, points)?;
    let s = Setup::new(c, positive(beam_power_w, "--beam-power-w")?)?;
    let rep = Reporting::new(&s.engine, rel)?;
    let sel = gate(c.gate);
    let model = model_name(&s.engine.model);

    let rows: Vec<Row> = xs
        .par_iter()
        .map(|&x| -> Result<Row> {
            let delta = rep.delta_of(x);
            let (x_out, reference) = rep.printed(delta);
            let wl = s.engine.laser_frequency(delta);
            let (values, flag) = evaluate(&s, sel, delta)?;
            Ok(Row {
                x_thz: x_out,
                reference,
                wavelength_nm: (wl > 0.0).then(|| wavelength(wl) * 1e9),
                values,
                flag,
            })
        })
        .collect::<Result<_>>()?;
    let mut rows = rows;
    mark_backbend(&mut rows, sel);

    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(HEADER).map_err(io)?;
    for r in &rows {
        let mut rec = vec![
            format!("{:.9}", r.x_thz),
            r.reference.to_string(),
            opt(r.wavelength_nm),
        ];
        match &r.values {
            Some(v) => rec.extend([
                num(v.error_1q),
                num(v.error_2q),
                num(v.eta),
                num(v.tau_2q_us),
                opt(v.power_2q),
                num(v.rayleigh_bound),
            ]),
            None => rec.extend(std::iter::repeat_n(String::new(), 6)),
        }
        rec.push(model.to_string());
        rec.push(r.flag.to_string());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
