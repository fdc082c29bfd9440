//! File formats and pipeline commands around `mlip-uq-core`: XYZ trajectories,
//! key-value configuration, CSV outputs and the `mlip-uq` command-line tool.

pub mod commands;
pub mod config;
pub mod elements;
pub mod features;
pub mod hyperfile;
pub mod output;
pub mod presets;
pub mod svg;
pub mod xyz;

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] mlip_uq_core::Error),
    #[error(transparent)]
    Xyz(#[from] xyz::XyzError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{0}")]
    Config(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        Self::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}
