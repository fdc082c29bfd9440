//! Reliability-diagram bin widths used for the benchmark molecules.

use crate::Error;

/// `(name, bin width in meV)`.
pub const MOLECULE_BIN_WIDTHS_MEV: [(&str, f64); 5] = [
    ("benzene", 1.0),
    ("aspirin", 15.0),
    ("sma", 20.0),
    ("o-hbdi", 100.0),
    ("porphyrin", 2.0),
];

/// Bin width in eV. Names are case-insensitive; `ohbdi` is accepted for `o-hbdi`.
pub fn bin_width_for(molecule: &str) -> Result<f64, Error> {
    let key = molecule.to_ascii_lowercase();
    let key = if key == "ohbdi" { "o-hbdi".to_string() } else { key };
    MOLECULE_BIN_WIDTHS_MEV
        .iter()
        .find(|(name, _)| *name == key)
        .map(|(_, mev)| mev / 1000.0)
        .ok_or_else(|| {
            let known: Vec<&str> = MOLECULE_BIN_WIDTHS_MEV.iter().map(|(n, _)| *n).collect();
            Error::Config(format!("no bin-width preset for `{molecule}` (known: {})", known.join(", ")))
        })
}
