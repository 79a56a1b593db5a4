//! Straightforward reference sums over (i, j, q, k, f) in the coupled |F, mF⟩
//! basis, written directly from the rate formulas with γ_Pf/μ_Pf² prefactors.
//! Deliberately unoptimized and independent of the engine's decoupled-basis
//! matrices.
#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use ionscatter_core::angular::HalfInt;
use ionscatter_core::basis::Manifold;
use ionscatter_core::couplings::{decay_rate, dipole_factor, Polarization};
use ionscatter_core::scattering::{BeamConfig, BeamRole, ModelKind, ModelVariant};
use ionscatter_core::species::{Encoding, HyperfineState, SpeciesData};
use ionscatter_core::zeeman::resolve_qubit;
use num_complex::Complex64;

const E: f64 = 1.602_176_634e-19;
const HBAR: f64 = 1.054_571_817e-34;
const C: f64 = 299_792_458.0;
const EPS0: f64 = 8.854_187_812_8e-12;
const A0: f64 = 5.291_772_109_03e-11;

/// A state as a superposition of |F, mF⟩ of one level.
#[derive(Clone, Debug)]
pub struct Coupled {
    pub label: HyperfineState,
    pub terms: Vec<(HyperfineState, f64)>,
}

fn rad(thz: f64) -> f64 {
    2.0 * PI * thz * 1e12
}

fn g_of(power: f64, waist: f64, mu_a0: f64) -> f64 {
    let e_field = (4.0 * power / (PI * waist * waist * C * EPS0)).sqrt();
    E * e_field * mu_a0 * A0 / (2.0 * HBAR)
}

pub fn coupled_states(species: &SpeciesData, level: &str) -> Vec<HyperfineState> {
    let lv = species.level(level).unwrap();
    let mut out = Vec::new();
    for f in HalfInt::couplings(lv.j, species.nuclear_spin) {
        for mf in f.projections() {
            out.push(HyperfineState::new(level, f, mf));
        }
    }
    out
}

/// Expand a |mJ, mI⟩ vector of `level` over |F, mF⟩.
fn to_coupled(
    species: &SpeciesData,
    level: usize,
    label: HyperfineState,
    v: &nalgebra::DVector<f64>,
) -> Coupled {
    let man = Manifold::new(species, level);
    let mut terms = Vec::new();
    for (f, mf) in man.coupled_labels() {
        let c = man.coupled_vector(f, mf).unwrap().dot(v);
        if c.abs() > 1e-15 {
            terms.push((HyperfineState::new(&label.level, f, mf), c));
        }
    }
    Coupled { label, terms }
}

struct Ctx<'a> {
    sp: &'a SpeciesData,
    cache: HashMap<[i32; 7], f64>,
}

impl<'a> Ctx<'a> {
    /// ⟨a|r_q|b⟩ in Bohr radii.
    fn rq(&mut self, a: &HyperfineState, q: i32, b: &HyperfineState) -> f64 {
        // r_q raises mF by q
        if a.mf.twice() != b.mf.twice() + 2 * q {
            return 0.0;
        }
        let ia = self.sp.level_index(&a.level).unwrap();
        let ib = self.sp.level_index(&b.level).unwrap();
        let key = [
            ia as i32,
            a.f.twice(),
            a.mf.twice(),
            q,
            ib as i32,
            b.f.twice(),
            b.mf.twice(),
        ];
        if let Some(v) = self.cache.get(&key) {
            return *v;
        }
        let v = if self.sp.transition(&a.level, &b.level).is_none() {
            0.0
        } else {
            dipole_factor(self.sp, a, q, b).unwrap() * self.sp.mu_between(ia, ib).unwrap()
        };
        self.cache.insert(key, v);
        v
    }

    fn r_eps(&mut self, a: &HyperfineState, pol: &Polarization, b: &HyperfineState) -> Complex64 {
        let mut s = Complex64::default();
        for q in -1..=1 {
            let c = pol.component(q);
            if c.norm_sqr() > 0.0 {
                s += c * self.rq(a, q, b);
            }
        }
        s
    }

    fn bracket_eps(&mut self, a: &Coupled, pol: &Polarization, k: &HyperfineState) -> Complex64 {
        a.terms
            .iter()
            .map(|(s, c)| self.r_eps(s, pol, k) * *c)
            .sum()
    }

    fn ket_eps(&mut self, k: &HyperfineState, pol: &Polarization, b: &Coupled) -> Complex64 {
        b.terms
            .iter()
            .map(|(s, c)| self.r_eps(k, pol, s) * *c)
            .sum()
    }

    fn bra_q(&mut self, a: &Coupled, q: i32, k: &HyperfineState) -> f64 {
        a.terms.iter().map(|(s, c)| self.rq(s, q, k) * c).sum()
    }

    fn ket_q(&mut self, k: &HyperfineState, q: i32, b: &Coupled) -> f64 {
        b.terms.iter().map(|(s, c)| self.rq(k, q, s) * c).sum()
    }
}

pub struct Setup {
    pub qubit_states: [Coupled; 2],
    pub qubit_level: String,
    pub intermediates: Vec<String>,
    pub finals: Vec<Coupled>,
}

pub fn setup(species: &SpeciesData, encoding: Encoding, model: ModelVariant) -> Setup {
    let q = resolve_qubit(species, encoding).unwrap();
    let qlabel = species.levels[q.level].label.clone();
    let q0 = to_coupled(species, q.level, q.spec.state0.clone(), &q.vectors[0]);
    let q1 = to_coupled(species, q.level, q.spec.state1.clone(), &q.vectors[1]);
    let qlv = &species.levels[q.level];
    let p12 = species.p12_index().unwrap();
    let p32 = species.p32_index().unwrap();
    let mut intermediates = Vec::new();
    for (k, lv) in species.levels.iter().enumerate() {
        let core = k == p12 || k == p32;
        let take = core || (model.kind == ModelKind::Full && model.include_higher_levels);
        if take
            && lv.l.twice() % 4 != qlv.l.twice() % 4
            && species.transition(&lv.label, &qlabel).is_some()
        {
            intermediates.push(lv.label.clone());
        }
    }
    let mut finals = Vec::new();
    for (f, lv) in species.levels.iter().enumerate() {
        if lv.l.twice() % 4 != qlv.l.twice() % 4 {
            continue;
        }
        if !intermediates
            .iter()
            .any(|k| species.transition(k, &lv.label).is_some())
        {
            continue;
        }
        if f == q.level {
            for (s, &(ff, mf)) in q.spectrum.labels.iter().enumerate() {
                finals.push(to_coupled(
                    species,
                    f,
                    HyperfineState::new(&lv.label, ff, mf),
                    &q.spectrum.vectors[s],
                ));
            }
        } else {
            for st in coupled_states(species, &lv.label) {
                finals.push(Coupled {
                    label: st.clone(),
                    terms: vec![(st, 1.0)],
                });
            }
        }
    }
    Setup {
        qubit_states: [q0, q1],
        qubit_level: qlabel,
        intermediates,
        finals,
    }
}

/// (initial index, final label, ΛV rate, ladder rate), all in rad/s.
pub fn reference_rates(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    model: ModelVariant,
    delta: f64,
) -> Vec<(usize, HyperfineState, f64, f64)> {
    let st = setup(species, encoding, model);
    let mut cx = Ctx {
        sp: species,
        cache: HashMap::new(),
    };
    let energy = |l: &str| rad(species.level(l).unwrap().energy_thz);
    let p32 = species.levels[species.p32_index().unwrap()].label.clone();
    let e_p = energy(&p32);
    let e_q = energy(&st.qubit_level);
    let mu_pi = species
        .mu_between(
            species.p32_index().unwrap(),
            species.level_index(&st.qubit_level).unwrap(),
        )
        .unwrap();
    let kstates: Vec<(String, Vec<HyperfineState>)> = st
        .intermediates
        .iter()
        .map(|k| (k.clone(), coupled_states(species, k)))
        .collect();
    let mut out = Vec::new();
    for (i, init) in st.qubit_states.iter().enumerate() {
        for fin in &st.finals {
            let flevel = fin.label.level.clone();
            let w_pf = e_p - energy(&flevel);
            let mu_pf = species
                .mu_between(
                    species.p32_index().unwrap(),
                    species.level_index(&flevel).unwrap(),
                )
                .unwrap();
            let gamma_pf = decay_rate(mu_pf, w_pf).unwrap();
            let lv_factor = {
                let x = 1.0 + delta / w_pf;
                if x <= 0.0 {
                    0.0
                } else if model.include_frequency_cubed {
                    x.powi(3)
                } else {
                    1.0
                }
            };
            let w_pd = e_p - e_q;
            let w_df = e_q - energy(&flevel);
            let lad_factor = {
                let x = 1.0 - (2.0 * w_pd + delta) / w_pf;
                if x <= 0.0 {
                    0.0
                } else if model.include_frequency_cubed {
                    x.powi(3)
                } else {
                    1.0
                }
            };
            let mut lv = 0.0;
            let mut lad = 0.0;
            for beam in &beams.beams {
                let g = g_of(beam.power, beams.waist, mu_pi);
                let eps = beam.polarization;
                let eps_c = eps.conj();
                for q in -1..=1 {
                    let mut a = Complex64::default();
                    let mut b = Complex64::default();
                    for (klev, ks) in &kstates {
                        let w_kp = energy(klev) - e_p;
                        let w_ki = energy(klev) - e_q;
                        for k in ks {
                            let n_lambda = cx.bra_q(fin, q, k) * cx.ket_eps(k, &eps, init);
                            a += n_lambda / (mu_pf * mu_pi * (w_kp - delta));
                            if model.include_counter_rotating {
                                let n_v = cx.bracket_eps(fin, &eps, k) * cx.ket_q(k, q, init);
                                a += n_v / (mu_pf * mu_pi * (w_ki + w_pf + delta));
                            }
                            if model.kind == ModelKind::Full && encoding == Encoding::M {
                                let n1 = cx.bra_q(fin, q, k) * cx.ket_eps(k, &eps_c, init);
                                let n2 = cx.bracket_eps(fin, &eps_c, k) * cx.ket_q(k, q, init);
                                b += n1 / (mu_pf * mu_pi * (w_kp + delta + 2.0 * w_pd))
                                    + n2 / (mu_pf * mu_pi * (w_kp - delta + w_df));
                            }
                        }
                    }
                    lv += 0.5 * gamma_pf * g * g * a.norm_sqr() * lv_factor;
                    lad += 0.5 * gamma_pf * g * g * b.norm_sqr() * lad_factor;
                }
            }
            out.push((i, fin.label.clone(), lv, lad));
        }
    }
    out
}

/// Signed Ω_R with |1⟩'s phase chosen so the P3/2 co-rotating path is positive.
pub fn reference_rabi(
    species: &SpeciesData,
    encoding: Encoding,
    beams: &BeamConfig,
    model: ModelVariant,
    delta: f64,
) -> f64 {
    let st = setup(species, encoding, model);
    let mut cx = Ctx {
        sp: species,
        cache: HashMap::new(),
    };
    let energy = |l: &str| rad(species.level(l).unwrap().energy_thz);
    let p32 = species.levels[species.p32_index().unwrap()].label.clone();
    let e_p = energy(&p32);
    let e_q = energy(&st.qubit_level);
    let w_pi = e_p - e_q;
    let mu_pi = species
        .mu_between(
            species.p32_index().unwrap(),
            species.level_index(&st.qubit_level).unwrap(),
        )
        .unwrap();
    let red = beams
        .beams
        .iter()
        .find(|b| b.role == BeamRole::Red)
        .unwrap();
    let blue = beams
        .beams
        .iter()
        .find(|b| b.role == BeamRole::Blue)
        .unwrap();
    let g2 = g_of(red.power, beams.waist, mu_pi) * g_of(blue.power, beams.waist, mu_pi);
    let (s0, s1) = (&st.qubit_states[0], &st.qubit_states[1]);
    let mut total = Complex64::default();
    let mut reference = Complex64::default();
    for klev in &st.intermediates {
        let w_kp = energy(klev) - e_p;
        let w_ki = energy(klev) - e_q;
        for k in coupled_states(species, klev) {
            let lam = cx.bracket_eps(s1, &red.polarization.conj(), &k)
                * cx.ket_eps(&k, &blue.polarization, s0);
            total += lam / (mu_pi * mu_pi * (w_kp - delta));
            if *klev == p32 {
                reference += lam;
            }
            if model.include_counter_rotating {
                let cr = cx.bracket_eps(s1, &red.polarization, &k)
                    * cx.ket_eps(&k, &blue.polarization.conj(), s0);
                total += cr / (mu_pi * mu_pi * (w_ki + w_pi + delta));
            }
        }
    }
    g2 * (total * reference.conj() / reference.norm()).re
}

fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Racah's single-sum 6j formula in plain floating point, arguments doubled.
pub fn racah6j(a: [i32; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = a;
    let tri = |x: i32, y: i32, z: i32| -> Option<f64> {
        if (x + y + z) % 2 != 0 || z > x + y || z < (x - y).abs() {
            return None;
        }
        Some(
            fact((x + y - z) / 2) * fact((x - y + z) / 2) * fact((-x + y + z) / 2)
                / fact((x + y + z) / 2 + 1),
        )
    };
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    let mut pre = 1.0;
    for (x, y, z) in triads {
        match tri(x, y, z) {
            Some(d) => pre *= d.sqrt(),
            None => return 0.0,
        }
    }
    let a1 = (j1 + j2 + j3) / 2;
    let a2 = (j1 + j5 + j6) / 2;
    let a3 = (j4 + j2 + j6) / 2;
    let a4 = (j4 + j5 + j3) / 2;
    let b1 = (j1 + j2 + j4 + j5) / 2;
    let b2 = (j2 + j3 + j5 + j6) / 2;
    let b3 = (j3 + j1 + j6 + j4) / 2;
    let lo = a1.max(a2).max(a3).max(a4);
    let hi = b1.min(b2).min(b3);
    let mut s = 0.0;
    for t in lo..=hi {
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * fact(t + 1)
            / (fact(t - a1)
                * fact(t - a2)
                * fact(t - a3)
                * fact(t - a4)
                * fact(b1 - t)
                * fact(b2 - t)
                * fact(b3 - t));
    }
    pre * s
}

/// Size of the largest single-intermediate term in Ω_R, g²/min_K|ω_KQ − ω_L|.
/// Ω_R itself can be a near-cancellation (g qubits), so agreement is judged
/// against this scale.
pub fn rabi_scale(e: &ionscatter_core::scattering::Engine, delta: f64) -> f64 {
    let d = e
        .resonances()
        .iter()
        .map(|r| (r - delta).abs())
        .fold(f64::INFINITY, f64::min);
    e.g_pi_squared() / d
}
