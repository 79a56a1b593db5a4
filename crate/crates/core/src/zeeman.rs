//! Hyperfine and Zeeman structure of a single manifold: dressed sublevels,
//! qubit frequencies, clock points and second-order field sensitivity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::angular::HalfInt;
use crate::basis::Manifold;
use crate::constants::{BOHR_MAGNETON, GAUSS, H_PLANCK};
use crate::error::{Error, Result};
use crate::species::{HyperfineState, LevelSpec, QubitSpec, SpeciesData};

/// Upper end of the clock-point search window (Tesla).
pub const CLOCK_WINDOW: f64 = 200.0 * GAUSS;

/// Dressed sublevels of one manifold at field `b`.
#[derive(Clone, Debug)]
pub struct ZeemanSpectrum {
    /// Tesla
    pub b: f64,
    /// Hz, relative to the manifold mean.
    pub energies: Vec<f64>,
    /// Zero-field |F, mF⟩ each dressed state connects to adiabatically.
    pub labels: Vec<(HalfInt, HalfInt)>,
    /// Eigenvectors in the |mJ, mI⟩ basis of [`Manifold`].
    pub vectors: Vec<DVector<f64>>,
}

impl ZeemanSpectrum {
    pub fn find(&self, f: HalfInt, mf: HalfInt) -> Option<usize> {
        self.labels.iter().position(|&l| l == (f, mf))
    }
}

fn ij(mj: HalfInt, mi: HalfInt) -> (f64, f64) {
    (mj.value(), mi.value())
}

fn ladder(j: f64, m: f64, up: bool) -> f64 {
    let mp = if up { m + 1.0 } else { m - 1.0 };
    (j * (j + 1.0) - m * mp).max(0.0).sqrt()
}

/// I·J restricted to the states of one mF block.
fn i_dot_j(j: HalfInt, i: HalfInt, states: &[(HalfInt, HalfInt)]) -> DMatrix<f64> {
    let n = states.len();
    let (jv, iv) = (j.value(), i.value());
    let mut k = DMatrix::zeros(n, n);
    for (r, &(mj, mi)) in states.iter().enumerate() {
        let (a, b) = ij(mj, mi);
        k[(r, r)] = a * b;
        for (c, &(mj2, mi2)) in states.iter().enumerate() {
            let (a2, b2) = ij(mj2, mi2);
            // ½(J₊I₋ + J₋I₊)
            if mj == mj2 + HalfInt::ONE && mi + HalfInt::ONE == mi2 {
                k[(r, c)] += 0.5 * ladder(jv, a2, true) * ladder(iv, b2, false);
            }
            if mj + HalfInt::ONE == mj2 && mi == mi2 + HalfInt::ONE {
                k[(r, c)] += 0.5 * ladder(jv, a2, false) * ladder(iv, b2, true);
            }
        }
    }
    k
}

fn quadrupole_norm(j: HalfInt, i: HalfInt) -> Option<f64> {
    let (jv, iv) = (j.value(), i.value());
    if j.twice() >= 2 && i.twice() >= 2 {
        Some(2.0 * iv * (2.0 * iv - 1.0) * jv * (2.0 * jv - 1.0))
    } else {
        None
    }
}

/// Zero-field energy (Hz) of hyperfine level F.
fn zero_field_energy(a: f64, bq: f64, j: HalfInt, i: HalfInt, f: HalfInt) -> f64 {
    let (jv, iv, fv) = (j.value(), i.value(), f.value());
    let k = 0.5 * (fv * (fv + 1.0) - iv * (iv + 1.0) - jv * (jv + 1.0));
    let mut e = a * k;
    if let Some(n) = quadrupole_norm(j, i) {
        e += bq * (3.0 * k * k + 1.5 * k - iv * (iv + 1.0) * jv * (jv + 1.0)) / n;
    }
    e
}

struct Hamiltonian {
    a: f64,
    bq: f64,
    g_j: f64,
    g_i: f64,
    j: HalfInt,
    i: HalfInt,
}

impl Hamiltonian {
    fn new(level: &LevelSpec, i: HalfInt, g_i: f64) -> Result<Self> {
        let a = level.hyperfine_a().ok_or_else(|| {
            Error::DataMissing(format!("{}: no hyperfine A constant", level.label))
        })?;
        if quadrupole_norm(level.j, i).is_some() && level.hyperfine_b_mhz.is_none() {
            return Err(Error::DataMissing(format!(
                "{}: no hyperfine B constant",
                level.label
            )));
        }
        Ok(Hamiltonian {
            a,
            bq: level.hyperfine_b(),
            g_j: level.g_j(),
            g_i,
            j: level.j,
            i,
        })
    }

    /// Block matrix in Hz and its ∂/∂B (Hz/T).
    fn block(&self, states: &[(HalfInt, HalfInt)], b: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let k = i_dot_j(self.j, self.i, states);
        let mut h = &k * self.a;
        if let Some(n) = quadrupole_norm(self.j, self.i) {
            let (jv, iv) = (self.j.value(), self.i.value());
            let id = DMatrix::<f64>::identity(states.len(), states.len());
            let q = (&k * &k) * 3.0 + &k * 1.5 - id * (iv * (iv + 1.0) * jv * (jv + 1.0));
            h += q * (self.bq / n);
        }
        let mub = BOHR_MAGNETON / H_PLANCK;
        let mut dh = DMatrix::zeros(states.len(), states.len());
        for (r, &(mj, mi)) in states.iter().enumerate() {
            dh[(r, r)] = mub * (self.g_j * mj.value() + self.g_i * mi.value());
        }
        h += &dh * b;
        (h, dh)
    }
}

/// Block states of a given mF and their positions in the manifold basis.
fn block_states(m: &Manifold, mf: HalfInt) -> (Vec<usize>, Vec<(HalfInt, HalfInt)>) {
    m.states
        .iter()
        .enumerate()
        .filter(|(_, &(mj, mi))| mj + mi == mf)
        .map(|(k, &s)| (k, s))
        .unzip()
}

struct BlockSolution {
    energies: Vec<f64>,
    slopes: Vec<f64>,
    labels: Vec<HalfInt>,
    vectors: Vec<DVector<f64>>,
}

fn solve_block(
    ham: &Hamiltonian,
    manifold: &Manifold,
    mf: HalfInt,
    b: f64,
) -> Result<(Vec<usize>, BlockSolution)> {
    let (pos, states) = block_states(manifold, mf);
    let (h, dh) = ham.block(&states, b);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));

    // States of equal mF never cross, so the energy order at any field is the
    // zero-field F order.
    let mut fs: Vec<HalfInt> = HalfInt::couplings(ham.j, ham.i)
        .filter(|f| f.admits(mf))
        .collect();
    fs.sort_by(|x, y| {
        zero_field_energy(ham.a, ham.bq, ham.j, ham.i, *x)
            .total_cmp(&zero_field_energy(ham.a, ham.bq, ham.j, ham.i, *y))
            .then(x.cmp(y))
    });
    debug_assert_eq!(fs.len(), states.len());

    let mut sol = BlockSolution {
        energies: Vec::new(),
        slopes: Vec::new(),
        labels: Vec::new(),
        vectors: Vec::new(),
    };
    for (rank, &col) in order.iter().enumerate() {
        let f = fs[rank];
        let mut v: DVector<f64> = eig.eigenvectors.column(col).into_owned();
        // Sign fixed by overlap with the zero-field state it connects to.
        let zero = manifold.coupled_vector(f, mf)?;
        let overlap: f64 = pos.iter().enumerate().map(|(r, &p)| v[r] * zero[p]).sum();
        let lead = v
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if overlap < -1e-9 || (overlap.abs() <= 1e-9 && lead < 0.0) {
            v = -v;
        }
        sol.energies.push(eig.eigenvalues[col]);
        sol.slopes.push(v.dot(&(&dh * &v)));
        sol.labels.push(f);
        sol.vectors.push(v);
    }
    Ok((pos, sol))
}

fn embed(dim: usize, pos: &[usize], v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(dim);
    for (r, &p) in pos.iter().enumerate() {
        out[p] = v[r];
    }
    out
}

/// Full dressed spectrum of a manifold with nuclear spin `i` and nuclear g-factor `g_i`.
pub fn zeeman_spectrum(level: &LevelSpec, i: HalfInt, g_i: f64, b: f64) -> Result<ZeemanSpectrum> {
    let ham = Hamiltonian::new(level, i, g_i)?;
    let manifold = Manifold {
        level: usize::MAX,
        j: level.j,
        i,
        states: level
            .j
            .projections()
            .flat_map(|mj| i.projections().map(move |mi| (mj, mi)))
            .collect(),
    };
    let mut spec = ZeemanSpectrum {
        b,
        energies: Vec::new(),
        labels: Vec::new(),
        vectors: Vec::new(),
    };
    for mf in (level.j + i).projections() {
        let (pos, sol) = solve_block(&ham, &manifold, mf, b)?;
        for k in 0..sol.labels.len() {
            spec.energies.push(sol.energies[k]);
            spec.labels.push((sol.labels[k], mf));
            spec.vectors
                .push(embed(manifold.dim(), &pos, &sol.vectors[k]));
        }
    }
    Ok(spec)
}

/// Energy (Hz), dE/dB (Hz/T) and eigenvector of one dressed sublevel.
pub fn dressed_state(
    species: &SpeciesData,
    state: &HyperfineState,
    b: f64,
) -> Result<(f64, f64, DVector<f64>)> {
    let idx = species
        .level_index(&state.level)
        .ok_or_else(|| Error::InvalidArgument(format!("no level {:?}", state.level)))?;
    let level = &species.levels[idx];
    let ham = Hamiltonian::new(
        level,
        species.nuclear_spin,
        species.nuclear_g.unwrap_or(0.0),
    )?;
    let manifold = Manifold::new(species, idx);
    let (pos, sol) = solve_block(&ham, &manifold, state.mf, b)?;
    let k = sol
        .labels
        .iter()
        .position(|&f| f == state.f)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "|F={}, mF={}> is not a sublevel of {}",
                state.f, state.mf, state.level
            ))
        })?;
    Ok((
        sol.energies[k],
        sol.slopes[k],
        embed(manifold.dim(), &pos, &sol.vectors[k]),
    ))
}

/// Qubit frequency |E0 − E1| in Hz at field `b` (Tesla).
pub fn qubit_frequency(species: &SpeciesData, qubit: &QubitSpec, b: f64) -> Result<f64> {
    let (e0, _, _) = dressed_state(species, &qubit.state0, b)?;
    let (e1, _, _) = dressed_state(species, &qubit.state1, b)?;
    Ok((e0 - e1).abs())
}

/// dω₀/dB in Hz/T (Hellmann–Feynman).
pub fn qubit_frequency_slope(species: &SpeciesData, qubit: &QubitSpec, b: f64) -> Result<f64> {
    let (e0, s0, _) = dressed_state(species, &qubit.state0, b)?;
    let (e1, s1, _) = dressed_state(species, &qubit.state1, b)?;
    Ok((s0 - s1) * (e0 - e1).signum())
}

/// Field (Tesla) in [0, 200 G] where the qubit frequency is stationary.
pub fn clock_point(species: &SpeciesData, qubit: &QubitSpec) -> Result<f64> {
    let tol = 1.0 / GAUSS; // 1 Hz/G
    let slope = |b: f64| qubit_frequency_slope(species, qubit, b);
    let d0 = slope(0.0)?;
    if d0.abs() < tol {
        return Ok(0.0);
    }
    let n = 600;
    let (lo, hi) = (1e-5 * GAUSS, CLOCK_WINDOW);
    let mut prev = (0.0, d0);
    for k in 0..=n {
        let b = lo * (hi / lo).powf(k as f64 / n as f64);
        let d = slope(b)?;
        if d.signum() != prev.1.signum() {
            let (mut a, mut c) = (prev.0, b);
            let mut da = prev.1;
            for _ in 0..200 {
                let m = 0.5 * (a + c);
                let dm = slope(m)?;
                if dm.signum() == da.signum() {
                    a = m;
                    da = dm;
                } else {
                    c = m;
                }
                if c - a <= 1e-13 * c.max(1e-12) {
                    break;
                }
            }
            let b_star = 0.5 * (a + c);
            let d_star = slope(b_star)?;
            if d_star.abs() > tol {
                return Err(Error::NoSolution {
                    reason: format!("clock-point refinement stalled at {:.6} G", b_star / GAUSS),
                    achievable_min: d_star.abs() * GAUSS,
                });
            }
            return Ok(b_star);
        }
        prev = (b, d);
    }
    Err(Error::NoSolution {
        reason: "no stationary qubit frequency within 0-200 G".to_string(),
        achievable_min: prev.1.abs() * GAUSS,
    })
}

/// Central second difference of ω₀ at `b`, returned as ½ω₀'' (Hz/T²).
pub fn curvature_at(species: &SpeciesData, qubit: &QubitSpec, b: f64, step: f64) -> Result<f64> {
    let f = |x: f64| qubit_frequency(species, qubit, x);
    let d = |h: f64| -> Result<f64> { Ok((f(b + h)? - 2.0 * f(b)? + f(b - h)?) / (h * h)) };
    let coarse = d(step)?;
    let fine = d(0.5 * step)?;
    Ok(0.5 * (4.0 * fine - coarse) / 3.0)
}

/// Default finite-difference step: a small fraction of the field over which
/// the Zeeman shift equals the qubit splitting.
pub fn curvature_step(species: &SpeciesData, qubit: &QubitSpec, b: f64) -> Result<f64> {
    let level = species.level_checked(&qubit.state0.level)?;
    let scale = BOHR_MAGNETON / H_PLANCK * level.g_j().abs();
    Ok(1e-2 * qubit_frequency(species, qubit, b)? / scale)
}

/// Quadratic field sensitivity ½ d²ω₀/dB² (Hz/T²) at the clock point.
pub fn curvature(species: &SpeciesData, qubit: &QubitSpec) -> Result<f64> {
    let b = match qubit.clock_field() {
        Some(b) => b,
        None => clock_point(species, qubit)?,
    };
    let step = curvature_step(species, qubit, b)?;
    curvature_at(species, qubit, b, step)
}

/// Qubit states as dressed eigenvectors of their manifold at the operating field.
#[derive(Clone, Debug)]
pub struct ResolvedQubit {
    pub spec: QubitSpec,
    pub level: usize,
    /// Operating (clock) field, Tesla.
    pub field: f64,
    /// Qubit frequency at `field`, Hz.
    pub frequency: f64,
    /// |0⟩ and |1⟩ in the |mJ, mI⟩ basis of the qubit manifold.
    pub vectors: [DVector<f64>; 2],
    /// Dressed basis of the whole manifold at `field`.
    pub spectrum: ZeemanSpectrum,
}

/// Resolve a qubit at its clock field (from the file, else searched).
pub fn resolve_qubit(
    species: &SpeciesData,
    encoding: crate::species::Encoding,
) -> Result<ResolvedQubit> {
    let spec = species.qubit(encoding)?.clone();
    let field = match spec.clock_field() {
        Some(b) => b,
        None => clock_point(species, &spec)?,
    };
    let level = species.level_checked(&spec.state0.level)?;
    let idx = species.level_index(&level.label).expect("level exists");
    let (e0, _, v0) = dressed_state(species, &spec.state0, field)?;
    let (e1, _, v1) = dressed_state(species, &spec.state1, field)?;
    let spectrum = zeeman_spectrum(
        level,
        species.nuclear_spin,
        species.nuclear_g.unwrap_or(0.0),
        field,
    )?;
    Ok(ResolvedQubit {
        spec,
        level: idx,
        field,
        frequency: (e0 - e1).abs(),
        vectors: [v0, v1],
        spectrum,
    })
}
