//! Molecular structures and the feature representations fed to the kernels.
//!
//! [`coulomb_feature`] produces one global vector per structure, [`soap_features`]
//! one vector per atom. Both only depend on interatomic geometry, so rigid
//! translations leave them unchanged; SOAP is additionally rotation invariant.

mod coulomb;
mod soap;
mod special;

pub use coulomb::{coulomb_feature, ANGSTROM_TO_BOHR, MIN_SEPARATION};
pub use soap::{soap_features, SoapCalculator, SoapConfig};

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// One molecular configuration. Positions in Å, energy in eV.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    atomic_numbers: Vec<u32>,
    positions: Vec<[f64; 3]>,
    energy: Option<f64>,
}

impl Structure {
    pub fn new(atomic_numbers: Vec<u32>, positions: Vec<[f64; 3]>, energy: Option<f64>) -> Result<Self> {
        if atomic_numbers.is_empty() {
            return Err(Error::InvalidStructure("structure has no atoms".into()));
        }
        if atomic_numbers.len() != positions.len() {
            return Err(Error::InvalidStructure(format!(
                "{} atomic numbers but {} positions",
                atomic_numbers.len(),
                positions.len()
            )));
        }
        if let Some(i) = atomic_numbers.iter().position(|&z| z == 0) {
            return Err(Error::InvalidStructure(format!("atom {i} has atomic number 0")));
        }
        if let Some(i) = positions.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidStructure(format!("atom {i} has a non-finite coordinate")));
        }
        if let Some(e) = energy {
            if !e.is_finite() {
                return Err(Error::InvalidStructure("energy is not finite".into()));
            }
        }
        Ok(Self {
            atomic_numbers,
            positions,
            energy,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.atomic_numbers.len()
    }

    pub fn atomic_numbers(&self) -> &[u32] {
        &self.atomic_numbers
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn energy(&self) -> Option<f64> {
        self.energy
    }

    pub fn with_energy(mut self, energy: Option<f64>) -> Self {
        self.energy = energy;
        self
    }

    pub fn translated(&self, shift: [f64; 3]) -> Self {
        let positions = self
            .positions
            .iter()
            .map(|p| [p[0] + shift[0], p[1] + shift[1], p[2] + shift[2]])
            .collect();
        Self {
            positions,
            ..self.clone()
        }
    }

    /// Applies `r ↦ R r` with `rotation` given row-major.
    pub fn rotated(&self, rotation: &[[f64; 3]; 3]) -> Self {
        let positions = self
            .positions
            .iter()
            .map(|p| {
                let mut out = [0.0; 3];
                for (o, row) in out.iter_mut().zip(rotation) {
                    *o = row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
                }
                out
            })
            .collect();
        Self {
            positions,
            ..self.clone()
        }
    }

    /// Reorders atoms so that atom `i` of the result is atom `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            atomic_numbers: order.iter().map(|&i| self.atomic_numbers[i]).collect(),
            positions: order.iter().map(|&i| self.positions[i]).collect(),
            energy: self.energy,
        }
    }
}

/// Fixed-length descriptor of a whole structure.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalFeature(Vec<f64>);

impl GlobalFeature {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("global feature entry".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<GlobalFeature> for Vec<f64> {
    fn from(f: GlobalFeature) -> Self {
        f.0
    }
}

/// One descriptor vector per atomic environment, all of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomisticFeatureSet {
    dim: usize,
    data: Vec<f64>,
}

impl AtomisticFeatureSet {
    pub fn new(per_atom: Vec<Vec<f64>>) -> Result<Self> {
        let dim = per_atom.first().map(Vec::len).ok_or(Error::Empty("atomistic feature set"))?;
        let mut data = Vec::with_capacity(dim * per_atom.len());
        for v in &per_atom {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            data.extend_from_slice(v);
        }
        Self::from_flat(dim, data)
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.is_empty() {
            return Err(Error::Empty("atomistic feature set"));
        }
        if data.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.len() % dim,
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("atomistic feature entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_atoms(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}
