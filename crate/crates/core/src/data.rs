//! Datasets, train/test/pool splits and synthetic fixtures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::str::FromStr;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::gpr::{GprModel, KernelInput};
use crate::repcore::Structure;
use crate::rng::seeded;
use crate::{Error, Result};

/// Energy units accepted at ingestion; everything downstream is eV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyUnit {
    #[default]
    ElectronVolt,
    KcalPerMol,
    Hartree,
}

impl EnergyUnit {
    pub fn to_ev_factor(self) -> f64 {
        match self {
            Self::ElectronVolt => 1.0,
            Self::KcalPerMol => 0.043_364_1,
            Self::Hartree => 27.211_386,
        }
    }

    pub fn to_ev(self, value: f64) -> f64 {
        value * self.to_ev_factor()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ElectronVolt => "eV",
            Self::KcalPerMol => "kcal/mol",
            Self::Hartree => "hartree",
        }
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ev" => Ok(Self::ElectronVolt),
            "kcal/mol" | "kcal_mol" | "kcalmol" => Ok(Self::KcalPerMol),
            "hartree" | "ha" | "eh" => Ok(Self::Hartree),
            other => Err(Error::Config(format!("unknown energy unit `{other}`"))),
        }
    }
}

/// Labelled structures sharing one atom count and atom ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    structures: Vec<Structure>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, structures: Vec<Structure>) -> Result<Self> {
        let first = structures.first().ok_or(Error::Empty("dataset"))?;
        for (i, s) in structures.iter().enumerate() {
            if s.atomic_numbers() != first.atomic_numbers() {
                return Err(Error::InvalidStructure(format!(
                    "structure {i} differs in atom count or ordering from structure 0"
                )));
            }
            if s.energy().is_none() {
                return Err(Error::InvalidStructure(format!("structure {i} has no energy")));
            }
        }
        Ok(Self {
            name: name.into(),
            structures,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.structures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.structures.is_empty()
    }

    pub fn structures(&self) -> &[Structure] {
        &self.structures
    }

    /// Energies in eV, in dataset order.
    pub fn energies(&self) -> Vec<f64> {
        self.structures.iter().map(|s| s.energy().unwrap_or(f64::NAN)).collect()
    }

    /// Sorted distinct atomic numbers.
    pub fn species(&self) -> Vec<u32> {
        let mut z = self.structures[0].atomic_numbers().to_vec();
        z.sort_unstable();
        z.dedup();
        z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            n_train: 1000,
            n_test: 2000,
            seed: 0,
        }
    }
}

/// Disjoint index sets covering `0..n`, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub pool: Vec<usize>,
}

/// Seeded uniform sampling without replacement of train and test indices; the
/// remainder forms the pool.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<Split> {
    let needed = spec.n_train + spec.n_test;
    if needed > n {
        return Err(Error::InsufficientSamples { needed, available: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(spec.seed));
    let mut train = order[..spec.n_train].to_vec();
    let mut test = order[spec.n_train..needed].to_vec();
    let mut pool = order[needed..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    pool.sort_unstable();
    Ok(Split { train, test, pool })
}

pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<Split> {
    split_indices(ds.len(), spec)
}

/// Noisy samples of `sin(x)` on `[0, 2π]` plus noise-free test inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SineFixture {
    pub train_x: Vec<f64>,
    pub train_y: Vec<f64>,
    pub test_x: Vec<f64>,
}

impl SineFixture {
    pub fn train_inputs(&self) -> Vec<Vec<f64>> {
        self.train_x.iter().map(|&x| alloc::vec![x]).collect()
    }

    pub fn test_inputs(&self) -> Vec<Vec<f64>> {
        self.test_x.iter().map(|&x| alloc::vec![x]).collect()
    }
}

pub const DEFAULT_SINE_TRAIN: usize = 30;
pub const DEFAULT_SINE_NOISE: f64 = 0.1;

pub fn synth_sine(n_train: usize, n_test: usize, noise_std: f64, seed: u64) -> Result<SineFixture> {
    if n_train < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            available: n_train,
        });
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::Config(format!("noise_std must be non-negative, got {noise_std}")));
    }
    let mut rng = seeded(seed);
    let train_x: Vec<f64> = (0..n_train).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    let train_y = train_x
        .iter()
        .map(|x| {
            let eps: f64 = StandardNormal.sample(&mut rng);
            x.sin() + noise_std * eps
        })
        .collect();
    let test_x = (0..n_test).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    Ok(SineFixture {
        train_x,
        train_y,
        test_x,
    })
}

/// Whether synthetic targets include the model's observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetNoise {
    /// `N(m(x), u(x)² + σ_n²)`.
    #[default]
    WithObservationNoise,
    /// `N(m(x), u(x)²)`: errors then follow exactly the GPR predictive distribution.
    PredictiveOnly,
}

/// One draw per input from the model's predictive distribution.
pub fn draw_synthetic_targets<T: KernelInput>(
    model: &GprModel<T>,
    inputs: &[T],
    seed: u64,
    noise: TargetNoise,
) -> Result<Vec<f64>> {
    let mut rng = seeded(seed);
    inputs
        .iter()
        .map(|x| {
            let (m, s) = model.predict(x)?;
            let var = match noise {
                TargetNoise::WithObservationNoise => s * s + model.noise(),
                TargetNoise::PredictiveOnly => s * s,
            };
            let z: f64 = StandardNormal.sample(&mut rng);
            Ok(m + var.sqrt() * z)
        })
        .collect()
}
