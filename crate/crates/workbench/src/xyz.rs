//! Multi-frame XYZ trajectories with one energy per frame.
//!
//! ```text
//! 3
//! energy=-2079.86 pbc="F F F"
//! O 0.000 0.000 0.117
//! H 0.000 0.757 -0.469
//! H 0.000 -0.757 -0.469
//! ```
//!
//! The comment line carries the energy either as an extended-XYZ `energy=`
//! key or as a bare number. Columns after `x y z` (forces, charges) are ignored.

use std::fmt::Write as _;
use std::path::Path;

use mlip_uq_core::data::{Dataset, EnergyUnit};
use mlip_uq_core::repcore::Structure;

use crate::elements::{atomic_number, symbol};
use crate::Error;

/// Parse failure located by 0-based frame index and 1-based line number.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("frame {frame}, line {line}: {message}")]
pub struct XyzError {
    pub frame: usize,
    pub line: usize,
    pub message: String,
}

fn energy_from_comment(comment: &str) -> Option<f64> {
    for token in comment.split_whitespace() {
        if let Some((key, value)) = token.split_once('=') {
            if key.eq_ignore_ascii_case("energy") {
                return value.trim_matches('"').parse().ok();
            }
        }
    }
    let first = comment.split_whitespace().next()?;
    first.parse().ok()
}

pub fn parse_xyz_str(content: &str, name: &str, unit: EnergyUnit) -> Result<Dataset, Error> {
    let lines: Vec<&str> = content.lines().collect();
    let mut structures = Vec::new();
    let mut pos = 0;
    let err = |frame: usize, line: usize, message: String| XyzError { frame, line, message };

    while pos < lines.len() {
        if lines[pos].trim().is_empty() {
            pos += 1;
            continue;
        }
        let frame = structures.len();
        let header = pos + 1;
        let n: usize = lines[pos]
            .trim()
            .parse()
            .map_err(|_| err(frame, header, format!("expected an atom count, got `{}`", lines[pos].trim())))?;
        if n == 0 {
            return Err(err(frame, header, "frame has no atoms".into()).into());
        }
        let comment = lines
            .get(pos + 1)
            .ok_or_else(|| err(frame, header + 1, "missing comment line".into()))?;
        let energy = energy_from_comment(comment)
            .ok_or_else(|| err(frame, header + 1, "comment line holds no energy".into()))?;

        let mut z = Vec::with_capacity(n);
        let mut r = Vec::with_capacity(n);
        for k in 0..n {
            let idx = pos + 2 + k;
            let line = match lines.get(idx) {
                Some(l) if !l.trim().is_empty() => l,
                _ => {
                    return Err(err(frame, idx + 1, format!("expected {n} atom lines, found {k}")).into());
                }
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() < 4 {
                return Err(err(frame, idx + 1, format!("expected `symbol x y z`, got `{}`", line.trim())).into());
            }
            let zi = atomic_number(parts[0])
                .ok_or_else(|| err(frame, idx + 1, format!("unknown element `{}`", parts[0])))?;
            let mut xyz = [0.0; 3];
            for (c, v) in xyz.iter_mut().enumerate() {
                *v = parts[c + 1]
                    .parse()
                    .map_err(|_| err(frame, idx + 1, format!("bad coordinate `{}`", parts[c + 1])))?;
            }
            z.push(zi);
            r.push(xyz);
        }
        let s = Structure::new(z, r, Some(unit.to_ev(energy))).map_err(|e| err(frame, header, e.to_string()))?;
        if let Some(first) = structures.first() {
            let first: &Structure = first;
            if first.atomic_numbers() != s.atomic_numbers() {
                return Err(err(
                    frame,
                    header,
                    format!(
                        "atoms differ from frame 0 ({} atoms there, {} here, order must match)",
                        first.n_atoms(),
                        s.n_atoms()
                    ),
                )
                .into());
            }
        }
        structures.push(s);
        pos += 2 + n;
    }
    if structures.is_empty() {
        return Err(err(0, 1, "no frames".into()).into());
    }
    Ok(Dataset::new(name, structures)?)
}

pub fn parse_xyz_trajectory(path: &Path, unit: EnergyUnit) -> Result<Dataset, Error> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    parse_xyz_str(&content, name, unit)
}

/// Serialises a dataset with energies in eV. Values use Rust's shortest
/// round-trip formatting, so parsing the output restores them exactly.
pub fn write_xyz(ds: &Dataset) -> String {
    let mut out = String::new();
    for s in ds.structures() {
        let _ = writeln!(out, "{}", s.n_atoms());
        let _ = writeln!(out, "energy={}", s.energy().unwrap_or(f64::NAN));
        for (z, p) in s.atomic_numbers().iter().zip(s.positions()) {
            let _ = writeln!(out, "{} {} {} {}", symbol(*z).unwrap_or("X"), p[0], p[1], p[2]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hydrogen_molecule() {
        let ds = parse_xyz_str("2\nenergy=-1.5\nH 0 0 0\nH 0 0 0.74\n", "h2", EnergyUnit::ElectronVolt).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.structures()[0].energy(), Some(-1.5));
        assert_eq!(ds.structures()[0].atomic_numbers(), &[1, 1]);
    }

    #[test]
    fn bare_energy_and_units() {
        let ds = parse_xyz_str("1\n-2.0\nO 0 0 0\n", "o", EnergyUnit::Hartree).unwrap();
        assert_eq!(ds.structures()[0].energy(), Some(-2.0 * 27.211386));
    }

    #[test]
    fn short_frame_names_frame_and_line() {
        let text = "2\nenergy=1\nH 0 0 0\nH 0 0 1\n3\nenergy=2\nH 0 0 0\nH 0 0 1\n";
        let e = parse_xyz_str(text, "x", EnergyUnit::ElectronVolt).unwrap_err();
        match e {
            Error::Xyz(x) => {
                assert_eq!(x.frame, 1);
                assert_eq!(x.line, 9);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn inconsistent_atoms_rejected() {
        let text = "1\n1.0\nH 0 0 0\n2\n2.0\nH 0 0 0\nH 1 0 0\n";
        let e = parse_xyz_str(text, "x", EnergyUnit::ElectronVolt).unwrap_err();
        assert!(matches!(e, Error::Xyz(XyzError { frame: 1, line: 4, .. })), "{e}");
    }

    #[test]
    fn extra_columns_and_quoted_keys() {
        let text = "1\nProperties=species:S:1:pos:R:3 energy=\"-3.25\" pbc=\"F F F\"\nC 1 2 3 0.1 0.2 0.3\n";
        let ds = parse_xyz_str(text, "c", EnergyUnit::ElectronVolt).unwrap();
        assert_eq!(ds.structures()[0].energy(), Some(-3.25));
        assert_eq!(ds.structures()[0].positions()[0], [1.0, 2.0, 3.0]);
    }

    #[test]
    fn missing_energy_is_an_error() {
        let e = parse_xyz_str("1\nno energy here\nH 0 0 0\n", "x", EnergyUnit::ElectronVolt).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }
}
