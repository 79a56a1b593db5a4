//! Ion species data: fine-structure levels, dipole transitions, hyperfine
//! constants and qubit definitions, plus JSON ingestion and validation.

use std::collections::HashSet;
use std::path::Path;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::constants::{thz_to_rad, AMU, ELECTRON_G, GAUSS};
use crate::couplings;
use crate::error::{Error, Result};

/// A fine-structure manifold (L, S, J) of the valence electron.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSpec {
    pub label: String,
    pub l: HalfInt,
    pub j: HalfInt,
    pub s: HalfInt,
    /// Manifold mean above the S1/2 mean, ordinary frequency in THz.
    pub energy_thz: f64,
    pub hyperfine_a_mhz: Option<f64>,
    pub hyperfine_b_mhz: Option<f64>,
    pub lifetime: Option<f64>,
    pub lande_gj: Option<f64>,
}

impl LevelSpec {
    /// Manifold energy as an angular frequency (rad/s).
    pub fn energy(&self) -> f64 {
        thz_to_rad(self.energy_thz)
    }

    /// Magnetic-dipole hyperfine constant A in Hz.
    pub fn hyperfine_a(&self) -> Option<f64> {
        self.hyperfine_a_mhz.map(|a| a * 1e6)
    }

    /// Electric-quadrupole hyperfine constant B in Hz (0 when absent).
    pub fn hyperfine_b(&self) -> f64 {
        self.hyperfine_b_mhz.unwrap_or(0.0) * 1e6
    }

    /// Landé g_J, from the file when given, otherwise from L, S, J.
    pub fn g_j(&self) -> f64 {
        if let Some(g) = self.lande_gj {
            return g;
        }
        let (l, s, j) = (self.l.value(), self.s.value(), self.j.value());
        let jj = j * (j + 1.0);
        let ll = l * (l + 1.0);
        let ss = s * (s + 1.0);
        ((jj + ll - ss) + ELECTRON_G * (jj - ll + ss)) / (2.0 * jj)
    }

    pub fn is_odd(&self) -> bool {
        self.l.twice() % 4 == 2
    }

    pub fn is_term(&self, l: i32, j_2x: i32) -> bool {
        self.l == HalfInt::int(l) && self.j.twice() == j_2x
    }

    /// Number of |mJ, mI⟩ sublevels for nuclear spin `i`.
    pub fn sublevel_count(&self, i: HalfInt) -> usize {
        self.j.multiplicity() * i.multiplicity()
    }
}

/// An electric-dipole transition between two manifolds.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSpec {
    pub upper: String,
    pub lower: String,
    /// ⟨L_l‖r‖L_u⟩ in Bohr radii (magnitude).
    pub reduced_element: f64,
    /// Partial decay rate γ_ul in s⁻¹.
    pub decay_rate: Option<f64>,
    pub branching_ratio: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// Ground-state S1/2 qubit.
    G,
    /// Metastable D5/2 qubit.
    M,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::G => "g",
            Encoding::M => "m",
        }
    }
}

/// |level; F, mF⟩
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperfineState {
    pub level: String,
    pub f: HalfInt,
    pub mf: HalfInt,
}

impl HyperfineState {
    pub fn new(level: &str, f: HalfInt, mf: HalfInt) -> Self {
        HyperfineState {
            level: level.to_string(),
            f,
            mf,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitSpec {
    pub encoding: Encoding,
    pub state0: HyperfineState,
    pub state1: HyperfineState,
    pub clock_field_gauss: Option<f64>,
}

impl QubitSpec {
    /// Clock field in Tesla, when fixed by the file.
    pub fn clock_field(&self) -> Option<f64> {
        self.clock_field_gauss.map(|b| b * GAUSS)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesData {
    pub name: String,
    pub mass_amu: f64,
    pub nuclear_spin: HalfInt,
    pub nuclear_g: Option<f64>,
    pub levels: Vec<LevelSpec>,
    pub transitions: Vec<TransitionSpec>,
    pub qubits: Vec<QubitSpec>,
}

impl SpeciesData {
    pub fn mass(&self) -> f64 {
        self.mass_amu * AMU
    }

    pub fn level(&self, label: &str) -> Option<&LevelSpec> {
        self.levels.iter().find(|l| l.label == label)
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.label == label)
    }

    pub fn level_checked(&self, label: &str) -> Result<&LevelSpec> {
        self.level(label)
            .ok_or_else(|| Error::InvalidArgument(format!("{}: no level {label:?}", self.name)))
    }

    /// Index of the lowest manifold with the given L and 2J.
    pub fn lowest(&self, l: i32, j_2x: i32) -> Option<usize> {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, lv)| lv.is_term(l, j_2x))
            .min_by(|a, b| a.1.energy_thz.total_cmp(&b.1.energy_thz))
            .map(|(i, _)| i)
    }

    fn required(&self, l: i32, j_2x: i32, what: &str) -> Result<usize> {
        self.lowest(l, j_2x)
            .ok_or_else(|| Error::DataMissing(format!("{} has no {what} level", self.name)))
    }

    pub fn ground_index(&self) -> Result<usize> {
        self.required(0, 1, "S1/2")
    }

    pub fn p12_index(&self) -> Result<usize> {
        self.required(1, 1, "P1/2")
    }

    pub fn p32_index(&self) -> Result<usize> {
        self.required(1, 3, "P3/2")
    }

    pub fn d52_index(&self) -> Result<usize> {
        self.required(2, 5, "D5/2")
    }

    /// P fine-structure splitting ω_f (rad/s).
    pub fn fine_structure(&self) -> Result<f64> {
        Ok(self.levels[self.p32_index()?].energy() - self.levels[self.p12_index()?].energy())
    }

    /// True when the file lists manifolds beyond S, D, and the lowest P doublet.
    pub fn includes_higher_levels(&self) -> bool {
        let core: Vec<usize> = [(0, 1), (2, 3), (2, 5), (1, 1), (1, 3)]
            .iter()
            .filter_map(|&(l, j)| self.lowest(l, j))
            .collect();
        (0..self.levels.len()).any(|i| !core.contains(&i))
    }

    /// Transition joining two labels, in either order.
    pub fn transition(&self, a: &str, b: &str) -> Option<&TransitionSpec> {
        self.transitions
            .iter()
            .find(|t| (t.upper == a && t.lower == b) || (t.upper == b && t.lower == a))
    }

    pub fn qubit(&self, encoding: Encoding) -> Result<&QubitSpec> {
        self.qubits
            .iter()
            .find(|q| q.encoding == encoding)
            .ok_or_else(|| {
                Error::DataMissing(format!(
                    "{} defines no {} qubit",
                    self.name,
                    encoding.name()
                ))
            })
    }

    /// μ_ul (Bohr radii) between two manifolds; 0 when no transition is listed.
    pub fn mu_between(&self, a: usize, b: usize) -> Result<f64> {
        let (la, lb) = (&self.levels[a], &self.levels[b]);
        match self.transition(&la.label, &lb.label) {
            None => Ok(0.0),
            Some(t) => {
                let (u, l) = if la.label == t.upper {
                    (la, lb)
                } else {
                    (lb, la)
                };
                couplings::mu(u, l, t.reduced_element)
            }
        }
    }

    /// Parse and validate a species document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: SpeciesFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Parse(format!("{} (field `{path}`)", e.into_inner()))
        })?;
        let data = file.into_data()?;
        let diags = validate_species(&data);
        if diags.is_empty() {
            Ok(data)
        } else {
            Err(Error::Validation(diags))
        }
    }

    pub fn to_json(&self) -> String {
        let file = SpeciesFile::from_data(self);
        serde_json::to_string_pretty(&file).expect("species serialization cannot fail")
    }
}

/// Load and validate a species JSON file.
pub fn load_species(path: impl AsRef<Path>) -> Result<SpeciesData> {
    let text = std::fs::read_to_string(path.as_ref())?;
    SpeciesData::from_json_str(&text)
}

pub const BUILTIN_NAMES: [&str; 9] = [
    "Be9", "Mg25", "Ca43", "Sr87", "Ba133", "Ba135", "Ba137", "Yb171", "Yb173",
];

const BUILTIN_DOCS: [&str; 9] = [
    include_str!("../data/Be9.json"),
    include_str!("../data/Mg25.json"),
    include_str!("../data/Ca43.json"),
    include_str!("../data/Sr87.json"),
    include_str!("../data/Ba133.json"),
    include_str!("../data/Ba135.json"),
    include_str!("../data/Ba137.json"),
    include_str!("../data/Yb171.json"),
    include_str!("../data/Yb173.json"),
];

static BUILTINS: Lazy<Vec<SpeciesData>> = Lazy::new(|| {
    BUILTIN_DOCS
        .iter()
        .map(|doc| SpeciesData::from_json_str(doc).expect("builtin dataset is valid"))
        .collect()
});

/// Builtin dataset by name (case-insensitive, e.g. "Ca43" or "43Ca").
pub fn builtin(name: &str) -> Result<SpeciesData> {
    let norm = |s: &str| {
        let mut letters: String = s.chars().filter(|c| c.is_alphabetic()).collect();
        letters.push_str(&s.chars().filter(|c| c.is_ascii_digit()).collect::<String>());
        letters.to_ascii_lowercase()
    };
    let key = norm(name);
    BUILTINS
        .iter()
        .find(|s| norm(&s.name) == key)
        .cloned()
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown species {name:?}; builtins: {}",
                BUILTIN_NAMES.join(", ")
            ))
        })
}

/// A builtin name or a path to a species JSON file.
pub fn resolve(name_or_path: &str) -> Result<SpeciesData> {
    let p = Path::new(name_or_path);
    if p.extension().is_some_and(|e| e == "json") || p.is_file() {
        load_species(p)
    } else {
        builtin(name_or_path)
    }
}

/// All invariant violations of a dataset; empty when it is usable.
pub fn validate_species(data: &SpeciesData) -> Vec<String> {
    let mut out = Vec::new();
    let i = data.nuclear_spin;
    if i.twice() < 0 {
        out.push(format!("nuclear spin {i} is negative"));
    }
    if !(data.mass_amu > 0.0) {
        out.push(format!("mass {} amu is not positive", data.mass_amu));
    }

    let mut seen = HashSet::new();
    for lv in &data.levels {
        if !seen.insert(lv.label.as_str()) {
            out.push(format!("duplicate level label {:?}", lv.label));
        }
        if !lv.l.is_integer() || lv.l.twice() < 0 {
            out.push(format!(
                "{}: L = {} is not a non-negative integer",
                lv.label, lv.l
            ));
        }
        if lv.j.twice() < (lv.l - lv.s).abs().twice() || lv.j > lv.l + lv.s {
            out.push(format!(
                "{}: J = {} incompatible with L = {}, S = {}",
                lv.label, lv.j, lv.l, lv.s
            ));
        }
        if !(lv.energy_thz >= 0.0) {
            out.push(format!(
                "{}: energy {} THz is negative",
                lv.label, lv.energy_thz
            ));
        }
        if let Some(t) = lv.lifetime {
            if !(t > 0.0) {
                out.push(format!("{}: lifetime {t} s is not positive", lv.label));
            }
        }
    }
    for (l, j, what) in [(0, 1, "S1/2"), (1, 1, "P1/2"), (1, 3, "P3/2")] {
        if data.lowest(l, j).is_none() {
            out.push(format!("required level {what} is missing"));
        }
    }
    if data.qubits.iter().any(|q| q.encoding == Encoding::M) {
        for (l, j, what) in [(2, 3, "D3/2"), (2, 5, "D5/2")] {
            if data.lowest(l, j).is_none() {
                out.push(format!("m qubit requires level {what}, which is missing"));
            }
        }
    }

    if data.transitions.is_empty() {
        out.push("transition list is empty".to_string());
    }
    for t in &data.transitions {
        let name = format!("{} -> {}", t.upper, t.lower);
        let (u, l) = match (data.level(&t.upper), data.level(&t.lower)) {
            (Some(u), Some(l)) => (u, l),
            _ => {
                out.push(format!("{name}: references an unknown level"));
                continue;
            }
        };
        if !(t.reduced_element >= 0.0) {
            out.push(format!(
                "{name}: reduced element {} is negative",
                t.reduced_element
            ));
        }
        if u.energy_thz <= l.energy_thz {
            out.push(format!("{name}: upper level is not above the lower level"));
        }
        if (u.l - l.l).abs() != HalfInt::ONE || (u.j - l.j).abs() > HalfInt::ONE {
            out.push(format!("{name}: not an electric-dipole transition"));
            continue;
        }
        if let Some(b) = t.branching_ratio {
            if !(0.0..=1.0).contains(&b) {
                out.push(format!("{name}: branching ratio {b} outside [0, 1]"));
            }
        }
        if let Some(g_file) = t.decay_rate {
            let w = u.energy() - l.energy();
            let g =
                couplings::mu(u, l, t.reduced_element).and_then(|mu| couplings::decay_rate(mu, w));
            match g {
                Ok(g) if (g - g_file).abs() <= 0.02 * g_file.abs() => {}
                Ok(g) => out.push(format!(
                    "{name}: decay rate {g_file:e} s^-1 disagrees with {g:e} s^-1 from the reduced element (> 2%)"
                )),
                Err(e) => out.push(format!("{name}: {e}")),
            }
        }
    }
    if let Some(p) = data.lowest(1, 3) {
        let label = &data.levels[p].label;
        let ratios: Vec<f64> = data
            .transitions
            .iter()
            .filter(|t| &t.upper == label)
            .filter_map(|t| t.branching_ratio)
            .collect();
        if !ratios.is_empty() {
            let sum: f64 = ratios.iter().sum();
            if (sum - 1.0).abs() > 1e-3 {
                out.push(format!(
                    "branching ratios out of {label} sum to {sum}, not 1"
                ));
            }
        }
    }

    let mut encodings = HashSet::new();
    for q in &data.qubits {
        let tag = q.encoding.name();
        if !encodings.insert(q.encoding) {
            out.push(format!("{tag} qubit defined twice"));
        }
        let (l, j) = match q.encoding {
            Encoding::G => (0, 1),
            Encoding::M => (2, 5),
        };
        let home = data.lowest(l, j).map(|k| data.levels[k].label.clone());
        for (k, st) in [(0, &q.state0), (1, &q.state1)] {
            if Some(&st.level) != home.as_ref() {
                out.push(format!(
                    "{tag} qubit state |{k}> lies in {:?}, expected the {} manifold",
                    st.level,
                    if q.encoding == Encoding::G {
                        "S1/2"
                    } else {
                        "D5/2"
                    }
                ));
                continue;
            }
            let lv = data.level(&st.level).expect("home level exists");
            let ok_f = HalfInt::couplings(lv.j, i).any(|f| f == st.f);
            if !ok_f || !st.f.admits(st.mf) {
                out.push(format!(
                    "{tag} qubit state |{k}> = |F={}, mF={}> is not a sublevel of {} with I = {i}",
                    st.f, st.mf, st.level
                ));
            }
        }
        if q.state0 == q.state1 {
            out.push(format!("{tag} qubit states are identical"));
        }
        if let Some(b) = q.clock_field_gauss {
            if !(b >= 0.0) {
                out.push(format!("{tag} qubit clock field {b} G is negative"));
            }
        }
    }
    out
}

// File schema.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesFile {
    name: String,
    mass_amu: f64,
    nuclear_spin_2x: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nuclear_g: Option<f64>,
    levels: Vec<LevelRecord>,
    transitions: Vec<TransitionRecord>,
    #[serde(default)]
    qubits: QubitRecords,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelRecord {
    label: String,
    l: i32,
    j_2x: i32,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    s_2x: i32,
    energy_thz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hyperfine_a_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hyperfine_b_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lifetime_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g_j: Option<f64>,
}

fn one() -> i32 {
    1
}

fn is_one(x: &i32) -> bool {
    *x == 1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionRecord {
    upper: String,
    lower: String,
    reduced_element: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decay_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branching_ratio: Option<f64>,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QubitRecords {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<QubitRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<QubitRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QubitRecord {
    state0: StateRecord,
    state1: StateRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clock_field_gauss: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    level: String,
    f_2x: i32,
    mf_2x: i32,
}

impl SpeciesFile {
    fn into_data(self) -> Result<SpeciesData> {
        let levels = self
            .levels
            .into_iter()
            .map(|r| LevelSpec {
                label: r.label,
                l: HalfInt::int(r.l),
                j: HalfInt::from_twice(r.j_2x),
                s: HalfInt::from_twice(r.s_2x),
                energy_thz: r.energy_thz,
                hyperfine_a_mhz: r.hyperfine_a_mhz,
                hyperfine_b_mhz: r.hyperfine_b_mhz,
                lifetime: r.lifetime_s,
                lande_gj: r.g_j,
            })
            .collect();
        let transitions = self
            .transitions
            .into_iter()
            .map(|t| TransitionSpec {
                upper: t.upper,
                lower: t.lower,
                reduced_element: t.reduced_element,
                decay_rate: t.decay_rate,
                branching_ratio: t.branching_ratio,
            })
            .collect();
        let state = |s: StateRecord| HyperfineState {
            level: s.level,
            f: HalfInt::from_twice(s.f_2x),
            mf: HalfInt::from_twice(s.mf_2x),
        };
        let mut qubits = Vec::new();
        for (enc, rec) in [(Encoding::G, self.qubits.g), (Encoding::M, self.qubits.m)] {
            if let Some(r) = rec {
                qubits.push(QubitSpec {
                    encoding: enc,
                    state0: state(r.state0),
                    state1: state(r.state1),
                    clock_field_gauss: r.clock_field_gauss,
                });
            }
        }
        Ok(SpeciesData {
            name: self.name,
            mass_amu: self.mass_amu,
            nuclear_spin: HalfInt::from_twice(self.nuclear_spin_2x),
            nuclear_g: self.nuclear_g,
            levels,
            transitions,
            qubits,
        })
    }

    fn from_data(d: &SpeciesData) -> Self {
        let state = |s: &HyperfineState| StateRecord {
            level: s.level.clone(),
            f_2x: s.f.twice(),
            mf_2x: s.mf.twice(),
        };
        let qrec = |enc: Encoding| {
            d.qubits
                .iter()
                .find(|q| q.encoding == enc)
                .map(|q| QubitRecord {
                    state0: state(&q.state0),
                    state1: state(&q.state1),
                    clock_field_gauss: q.clock_field_gauss,
                })
        };
        SpeciesFile {
            name: d.name.clone(),
            mass_amu: d.mass_amu,
            nuclear_spin_2x: d.nuclear_spin.twice(),
            nuclear_g: d.nuclear_g,
            levels: d
                .levels
                .iter()
                .map(|l| LevelRecord {
                    label: l.label.clone(),
                    l: l.l.twice() / 2,
                    j_2x: l.j.twice(),
                    s_2x: l.s.twice(),
                    energy_thz: l.energy_thz,
                    hyperfine_a_mhz: l.hyperfine_a_mhz,
                    hyperfine_b_mhz: l.hyperfine_b_mhz,
                    lifetime_s: l.lifetime,
                    g_j: l.lande_gj,
                })
                .collect(),
            transitions: d
                .transitions
                .iter()
                .map(|t| TransitionRecord {
                    upper: t.upper.clone(),
                    lower: t.lower.clone(),
                    reduced_element: t.reduced_element,
                    decay_rate: t.decay_rate,
                    branching_ratio: t.branching_ratio,
                })
                .collect(),
            qubits: QubitRecords {
                g: qrec(Encoding::G),
                m: qrec(Encoding::M),
            },
        }
    }
}
