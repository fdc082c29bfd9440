//! Dataset featurisation for the two representations.

use mlip_uq_core::data::Dataset;
use mlip_uq_core::repcore::{coulomb_feature, AtomisticFeatureSet, GlobalFeature, SoapCalculator};
use rayon::prelude::*;

use crate::config::{Representation, RunConfig};
use crate::Error;

/// One feature entry per structure, in dataset order.
#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    Global(Vec<GlobalFeature>),
    Atomistic(Vec<AtomisticFeatureSet>),
}

impl Features {
    pub fn len(&self) -> usize {
        match self {
            Self::Global(v) => v.len(),
            Self::Atomistic(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Kernel input dimension (per atom for SOAP).
    pub fn dim(&self) -> usize {
        match self {
            Self::Global(v) => v.first().map_or(0, |f| f.dim()),
            Self::Atomistic(v) => v.first().map_or(0, |f| f.dim()),
        }
    }
}

/// Runs `$body` with `$xs` bound to the feature vector of either kind.
#[macro_export]
macro_rules! with_features {
    ($features:expr, $xs:ident => $body:expr) => {
        match $features {
            $crate::features::Features::Global($xs) => $body,
            $crate::features::Features::Atomistic($xs) => $body,
        }
    };
}

pub fn featurize(ds: &Dataset, cfg: &RunConfig) -> Result<Features, Error> {
    let structures = ds.structures();
    Ok(match cfg.repr {
        Representation::Coulomb => Features::Global(
            structures
                .par_iter()
                .map(coulomb_feature)
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Representation::Soap => {
            let calc = SoapCalculator::new(cfg.soap_config(ds.species()))?;
            Features::Atomistic(
                structures
                    .par_iter()
                    .map(|s| calc.compute(s))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
    })
}

pub fn select<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}
