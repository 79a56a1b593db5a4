//! Decoupled |mJ, mI⟩ sublevel bases of single manifolds and dipole operator
//! matrices between them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::angular::{clebsch_gordan, phase, wigner3j, HalfInt};
use crate::couplings::{reduced_j_species, Polarization};
use crate::error::{Error, Result};
use crate::species::SpeciesData;

/// Sublevels of one fine-structure manifold in the |mJ, mI⟩ basis.
#[derive(Clone, Debug)]
pub struct Manifold {
    pub level: usize,
    pub j: HalfInt,
    pub i: HalfInt,
    pub states: Vec<(HalfInt, HalfInt)>,
}

impl Manifold {
    pub fn new(species: &SpeciesData, level: usize) -> Self {
        let j = species.levels[level].j;
        let i = species.nuclear_spin;
        let states = j
            .projections()
            .flat_map(|mj| i.projections().map(move |mi| (mj, mi)))
            .collect();
        Manifold {
            level,
            j,
            i,
            states,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, mj: HalfInt, mi: HalfInt) -> Option<usize> {
        self.states.iter().position(|&s| s == (mj, mi))
    }

    /// |F, mF⟩ expanded over |mJ, mI⟩ with Condon–Shortley CG coefficients.
    pub fn coupled_vector(&self, f: HalfInt, mf: HalfInt) -> Result<DVector<f64>> {
        if !HalfInt::couplings(self.j, self.i).any(|x| x == f) || !f.admits(mf) {
            return Err(Error::InvalidArgument(format!(
                "|F={f}, mF={mf}> does not exist for J = {}, I = {}",
                self.j, self.i
            )));
        }
        let mut v = DVector::zeros(self.dim());
        for (k, &(mj, mi)) in self.states.iter().enumerate() {
            if mj + mi == mf {
                v[k] = clebsch_gordan(self.j, mj, self.i, mi, f, mf)?;
            }
        }
        Ok(v)
    }

    /// All |F, mF⟩ states of the manifold, ordered by F then mF.
    pub fn coupled_labels(&self) -> Vec<(HalfInt, HalfInt)> {
        HalfInt::couplings(self.j, self.i)
            .flat_map(|f| f.projections().map(move |mf| (f, mf)))
            .collect()
    }
}

/// Matrix of ⟨a, mJ, mI| r_q |b, mJ', mI'⟩ in Bohr radii.
pub fn dipole_matrix(
    species: &SpeciesData,
    a: &Manifold,
    b: &Manifold,
    q: i32,
) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(a.dim(), b.dim());
    let red = reduced_j_species(species, a.level, b.level)?;
    if red == 0.0 {
        return Ok(m);
    }
    let qh = HalfInt::int(q);
    for (r, &(mja, mia)) in a.states.iter().enumerate() {
        for (c, &(mjb, mib)) in b.states.iter().enumerate() {
            if mia != mib || mja != mjb + qh {
                continue;
            }
            let w = wigner3j(a.j, HalfInt::ONE, b.j, -mja, qh, mjb)?;
            m[(r, c)] = phase(a.j.twice() - mja.twice()) * w * red;
        }
    }
    Ok(m)
}

/// Matrix of ⟨a| r·ε |b⟩ = Σ_q c_q ⟨a| r_q |b⟩.
pub fn polarized_matrix(
    species: &SpeciesData,
    a: &Manifold,
    b: &Manifold,
    pol: &Polarization,
) -> Result<DMatrix<Complex64>> {
    let mut m = DMatrix::zeros(a.dim(), b.dim());
    for q in -1..=1 {
        let c = pol.component(q);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let d = dipole_matrix(species, a, b, q)?;
        m += d.map(|x| c * x);
    }
    Ok(m)
}
