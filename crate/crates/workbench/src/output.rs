//! CSV tables, key-value summaries and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use mlip_uq_core::al::AlTrace;
use mlip_uq_core::calib::{CalibrationCurve, ReliabilityBin};

use crate::config::{render_pairs, RunConfig};
use crate::Error;

pub fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, Error> {
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Error> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_curve(path: &Path, curve: &CalibrationCurve) -> Result<(), Error> {
    write_rows(
        path,
        &["alpha_predicted", "alpha_observed"],
        curve.points.iter().map(|(a, o)| vec![a.to_string(), o.to_string()]),
    )
}

pub fn write_reliability(path: &Path, bins: &[ReliabilityBin]) -> Result<(), Error> {
    write_rows(
        path,
        &["bin_index", "center", "count", "suppressed", "error_mean", "error_std"],
        bins.iter().map(|b| {
            vec![
                b.index.to_string(),
                b.center.to_string(),
                b.count.to_string(),
                b.suppressed.to_string(),
                b.error_mean.to_string(),
                b.error_std.to_string(),
            ]
        }),
    )
}

pub fn write_trace(path: &Path, trace: &AlTrace) -> Result<(), Error> {
    write_rows(
        path,
        &["iteration", "selected_index", "mae", "max_abs_error", "abs_error_variance"],
        trace.rows.iter().map(|r| {
            vec![
                r.iteration.to_string(),
                r.selected_index.map(|i| i.to_string()).unwrap_or_default(),
                r.metrics.mae.to_string(),
                r.metrics.max_abs_error.to_string(),
                r.metrics.abs_error_variance.to_string(),
            ]
        }),
    )
}

pub fn write_energies(path: &Path, energies: &[f64]) -> Result<(), Error> {
    write_rows(
        path,
        &["index", "energy"],
        energies.iter().enumerate().map(|(i, e)| vec![i.to_string(), e.to_string()]),
    )
}

/// `index, truth, mean, std` per evaluated structure.
pub fn write_predictions(path: &Path, rows: &[(usize, f64, f64, f64)]) -> Result<(), Error> {
    write_rows(
        path,
        &["index", "truth", "mean", "std"],
        rows.iter()
            .map(|(i, t, m, s)| vec![i.to_string(), t.to_string(), m.to_string(), s.to_string()]),
    )
}

/// Feature rows: `index, f0..` for global features, `index, atom, f0..` per atom otherwise.
pub fn write_features(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Error> {
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_rows(path, &header, rows)
}

/// Output directory of a run, refusing to write over any input file.
pub struct OutDir {
    root: PathBuf,
    inputs: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path, inputs: &[&Path]) -> Result<Self, Error> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        let inputs = inputs.iter().filter_map(|p| fs::canonicalize(p).ok()).collect();
        Ok(Self {
            root: root.to_path_buf(),
            inputs,
        })
    }

    /// Path of an output file, checked against the inputs.
    pub fn file(&self, name: &str) -> Result<PathBuf, Error> {
        let path = self.root.join(name);
        if let Ok(canon) = fs::canonicalize(&path) {
            if self.inputs.contains(&canon) {
                return Err(Error::Config(format!(
                    "output {} would overwrite an input file",
                    path.display()
                )));
            }
        }
        Ok(path)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

/// Writes `manifest.txt`: the resolved configuration (loadable with
/// `--config`) preceded by comment lines with the command, version and seeds.
pub fn write_manifest(out: &OutDir, command: &str, cfg: &RunConfig, notes: &[String]) -> Result<(), Error> {
    let mut header = vec![
        format!("{} {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"), command),
        format!(
            "seeds: split {} cv {} estimator {} al {}",
            cfg.seed,
            cfg.cv_seed(),
            cfg.estimator_seed(),
            cfg.al_seed()
        ),
    ];
    header.extend_from_slice(notes);
    write_text(&out.file("manifest.txt")?, &render_pairs(&header, cfg.to_pairs()))
}

pub fn write_summary<'a>(out: &OutDir, pairs: impl IntoIterator<Item = (&'a str, String)>) -> Result<(), Error> {
    write_text(&out.file("summary.txt")?, &render_pairs(&[], pairs))
}
