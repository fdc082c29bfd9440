use alloc::vec::Vec;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use super::{GlobalFeature, Structure};
use crate::{Error, Result};

pub const ANGSTROM_TO_BOHR: f64 = 1.889_725_988_6;

/// Atom pairs closer than this (Å) are treated as coincident.
pub const MIN_SEPARATION: f64 = 1e-10;

/// Unsorted Coulomb matrix, flattened as its row-major upper triangle
/// (diagonal included), so `D = n(n+1)/2`.
///
/// `M_ii = 0.5 Z_i^2.4` and `M_ij = Z_i Z_j / |R_i - R_j|` with distances in Bohr.
/// The atom order of the input is kept as is.
pub fn coulomb_feature(s: &Structure) -> Result<GlobalFeature> {
    let n = s.n_atoms();
    let z = s.atomic_numbers();
    let r = s.positions();
    let mut values = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let zi = z[i] as f64;
        values.push(0.5 * zi.powf(2.4));
        for j in (i + 1)..n {
            let d = distance(&r[i], &r[j]);
            if d < MIN_SEPARATION {
                return Err(Error::DegenerateGeometry {
                    first: i,
                    second: j,
                    distance: d,
                });
            }
            values.push(zi * z[j] as f64 / (d * ANGSTROM_TO_BOHR));
        }
    }
    GlobalFeature::new(values)
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}
