//! Run configuration: a flat `key = value` file, overridden by command-line flags.
//!
//! Every key has a default, so an empty file is a valid configuration. The
//! same format is written back as `manifest.txt`, which makes any finished run
//! repeatable with `--config <out>/manifest.txt`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mlip_uq_core::al::Strategy;
use mlip_uq_core::data::{EnergyUnit, SplitSpec, TargetNoise};
use mlip_uq_core::gpr::{CvConfig, HyperInit, HyperInitGrid, OptimizerConfig};
use mlip_uq_core::repcore::SoapConfig;
use mlip_uq_core::rng::derive_seed;
use mlip_uq_core::uq::{EstimatorKind, DEFAULT_ENSEMBLE_SIZE};

use crate::presets::bin_width_for;
use crate::Error;

/// Key/value pairs in file order; later duplicates win when applied.
pub fn parse_key_values(text: &str, origin: &str) -> Result<Vec<(String, String)>, Error> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{origin}:{}: expected `key = value`, got `{line}`", i + 1)))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

pub fn read_key_values(path: &Path) -> Result<Vec<(String, String)>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_key_values(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Coulomb,
    Soap,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Coulomb => "coulomb",
            Self::Soap => "soap",
        })
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "coulomb" => Ok(Self::Coulomb),
            "soap" => Ok(Self::Soap),
            _ => Err(Error::Config(format!("unknown representation `{s}` (coulomb, soap)"))),
        }
    }
}

/// Source of the initial guesses for hyperparameter tuning.
#[derive(Debug, Clone, PartialEq)]
pub enum GridChoice {
    Standard,
    Single(HyperInit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub unit: EnergyUnit,
    pub repr: Representation,
    pub soap_r_cut: f64,
    pub soap_n_max: usize,
    pub soap_l_max: usize,
    pub soap_sigma: f64,
    pub estimator: EstimatorKind,
    pub ensemble_size: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    pub hyper: Option<PathBuf>,
    pub out: PathBuf,
    /// eV.
    pub bin_width: Option<f64>,
    pub molecule: Option<String>,
    pub min_count: usize,
    pub n_alphas: usize,
    pub grid: GridChoice,
    pub cv_folds: usize,
    pub cv_repetitions: usize,
    pub opt_steps: usize,
    pub n_init: usize,
    pub n_iter: usize,
    pub strategies: Vec<Strategy>,
    pub refit_ensembles: bool,
    pub incremental: bool,
    /// Run active learning on the built-in sine benchmark instead of a dataset.
    pub benchmark: bool,
    pub n_pool: usize,
    pub noise_std: f64,
    pub synth_n_train: usize,
    pub synth_n_test: usize,
    pub target_noise: TargetNoise,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            unit: EnergyUnit::ElectronVolt,
            repr: Representation::Coulomb,
            soap_r_cut: 5.0,
            soap_n_max: 3,
            soap_l_max: 1,
            soap_sigma: 1.0,
            estimator: EstimatorKind::GprStd,
            ensemble_size: DEFAULT_ENSEMBLE_SIZE,
            n_train: 1000,
            n_test: 2000,
            seed: 0,
            hyper: None,
            out: PathBuf::from("out"),
            bin_width: None,
            molecule: None,
            min_count: mlip_uq_core::calib::DEFAULT_MIN_COUNT,
            n_alphas: mlip_uq_core::calib::DEFAULT_N_ALPHAS,
            grid: GridChoice::Standard,
            cv_folds: 5,
            cv_repetitions: 5,
            opt_steps: 200,
            n_init: 200,
            n_iter: 100,
            strategies: vec![Strategy::GprStd],
            refit_ensembles: true,
            incremental: false,
            benchmark: false,
            n_pool: 200,
            noise_std: 0.1,
            synth_n_train: 30,
            synth_n_test: 2000,
            target_noise: TargetNoise::PredictiveOnly,
            svg: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, Error> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, Error> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid value `{value}` for `{key}` (true/false)"))),
    }
}

fn target_noise_name(t: TargetNoise) -> &'static str {
    match t {
        TargetNoise::WithObservationNoise => "with_noise",
        TargetNoise::PredictiveOnly => "predictive",
    }
}

impl RunConfig {
    /// Applies pairs in order; unknown keys are rejected.
    pub fn apply(&mut self, pairs: &[(String, String)]) -> Result<(), Error> {
        let mut single: Option<HyperInit> = None;
        let mut grid_single = matches!(self.grid, GridChoice::Single(_));
        if let GridChoice::Single(h) = &self.grid {
            single = Some(h.clone());
        }
        let init = |s: &mut Option<HyperInit>| {
            s.get_or_insert(HyperInit {
                lengthscale: 2.0,
                output_scale: 1.0,
                noise: 1e-4,
            })
            .clone()
        };
        for (k, v) in pairs {
            let v = v.as_str();
            match k.as_str() {
                "dataset" => self.dataset = Some(PathBuf::from(v)),
                "unit" => self.unit = v.parse().map_err(|e: mlip_uq_core::Error| Error::Config(e.to_string()))?,
                "repr" => self.repr = v.parse()?,
                "soap_r_cut" => self.soap_r_cut = parse(k, v)?,
                "soap_n_max" => self.soap_n_max = parse(k, v)?,
                "soap_l_max" => self.soap_l_max = parse(k, v)?,
                "soap_sigma" => self.soap_sigma = parse(k, v)?,
                "estimator" => {
                    self.estimator = v.parse().map_err(|e: mlip_uq_core::Error| Error::Config(e.to_string()))?
                }
                "ensemble_size" => self.ensemble_size = parse(k, v)?,
                "n_train" => self.n_train = parse(k, v)?,
                "n_test" => self.n_test = parse(k, v)?,
                "seed" => self.seed = parse(k, v)?,
                "hyper" => self.hyper = Some(PathBuf::from(v)),
                "out" => self.out = PathBuf::from(v),
                "bin_width" => self.bin_width = Some(parse(k, v)?),
                "molecule" => self.molecule = Some(v.to_string()),
                "min_count" => self.min_count = parse(k, v)?,
                "n_alphas" => self.n_alphas = parse(k, v)?,
                "grid" => match v {
                    "standard" => grid_single = false,
                    "single" => grid_single = true,
                    _ => return Err(Error::Config(format!("unknown grid `{v}` (standard, single)"))),
                },
                "init_lengthscale" => {
                    let mut h = init(&mut single);
                    h.lengthscale = parse(k, v)?;
                    single = Some(h);
                }
                "init_output_scale" => {
                    let mut h = init(&mut single);
                    h.output_scale = parse(k, v)?;
                    single = Some(h);
                }
                "init_noise" => {
                    let mut h = init(&mut single);
                    h.noise = parse(k, v)?;
                    single = Some(h);
                }
                "cv_folds" => self.cv_folds = parse(k, v)?,
                "cv_repetitions" => self.cv_repetitions = parse(k, v)?,
                "opt_steps" => self.opt_steps = parse(k, v)?,
                "n_init" => self.n_init = parse(k, v)?,
                "n_iter" => self.n_iter = parse(k, v)?,
                "strategy" => {
                    self.strategies = v
                        .split(',')
                        .map(|s| s.trim().parse::<Strategy>().map_err(|e| Error::Config(e.to_string())))
                        .collect::<Result<_, _>>()?
                }
                "refit_ensembles" => self.refit_ensembles = parse_bool(k, v)?,
                "incremental" => self.incremental = parse_bool(k, v)?,
                "benchmark" => {
                    self.benchmark = match v {
                        "sine" => true,
                        "none" => false,
                        _ => return Err(Error::Config(format!("unknown benchmark `{v}` (sine, none)"))),
                    }
                }
                "n_pool" => self.n_pool = parse(k, v)?,
                "noise_std" => self.noise_std = parse(k, v)?,
                "synth_n_train" => self.synth_n_train = parse(k, v)?,
                "synth_n_test" => self.synth_n_test = parse(k, v)?,
                "target_noise" => {
                    self.target_noise = match v {
                        "predictive" => TargetNoise::PredictiveOnly,
                        "with_noise" => TargetNoise::WithObservationNoise,
                        _ => return Err(Error::Config(format!("unknown target_noise `{v}` (predictive, with_noise)"))),
                    }
                }
                "svg" => self.svg = parse_bool(k, v)?,
                _ => return Err(Error::Config(format!("unknown configuration key `{k}`"))),
            }
        }
        self.grid = match (grid_single, single) {
            (true, h) => GridChoice::Single(h.unwrap_or_else(|| init(&mut None))),
            (false, _) => GridChoice::Standard,
        };
        Ok(())
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, Error> {
        let mut cfg = Self::default();
        cfg.apply(pairs)?;
        Ok(cfg)
    }

    /// Every key with its resolved value, in the order written to manifests.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut v: Vec<(&'static str, Option<String>)> = vec![
            ("dataset", opt(&self.dataset)),
            ("unit", Some(self.unit.name().to_string())),
            ("repr", Some(self.repr.to_string())),
            ("soap_r_cut", Some(self.soap_r_cut.to_string())),
            ("soap_n_max", Some(self.soap_n_max.to_string())),
            ("soap_l_max", Some(self.soap_l_max.to_string())),
            ("soap_sigma", Some(self.soap_sigma.to_string())),
            ("estimator", Some(self.estimator.to_string())),
            ("ensemble_size", Some(self.ensemble_size.to_string())),
            ("n_train", Some(self.n_train.to_string())),
            ("n_test", Some(self.n_test.to_string())),
            ("seed", Some(self.seed.to_string())),
            ("hyper", opt(&self.hyper)),
            ("out", Some(self.out.display().to_string())),
            ("bin_width", self.bin_width.map(|b| b.to_string())),
            ("molecule", self.molecule.clone()),
            ("min_count", Some(self.min_count.to_string())),
            ("n_alphas", Some(self.n_alphas.to_string())),
        ];
        match &self.grid {
            GridChoice::Standard => v.push(("grid", Some("standard".into()))),
            GridChoice::Single(h) => {
                v.push(("grid", Some("single".into())));
                v.push(("init_lengthscale", Some(h.lengthscale.to_string())));
                v.push(("init_output_scale", Some(h.output_scale.to_string())));
                v.push(("init_noise", Some(h.noise.to_string())));
            }
        }
        v.extend([
            ("cv_folds", Some(self.cv_folds.to_string())),
            ("cv_repetitions", Some(self.cv_repetitions.to_string())),
            ("opt_steps", Some(self.opt_steps.to_string())),
            ("n_init", Some(self.n_init.to_string())),
            ("n_iter", Some(self.n_iter.to_string())),
            (
                "strategy",
                Some(self.strategies.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")),
            ),
            ("refit_ensembles", Some(self.refit_ensembles.to_string())),
            ("incremental", Some(self.incremental.to_string())),
            ("benchmark", Some(if self.benchmark { "sine" } else { "none" }.into())),
            ("n_pool", Some(self.n_pool.to_string())),
            ("noise_std", Some(self.noise_std.to_string())),
            ("synth_n_train", Some(self.synth_n_train.to_string())),
            ("synth_n_test", Some(self.synth_n_test.to_string())),
            ("target_noise", Some(target_noise_name(self.target_noise).into())),
            ("svg", Some(self.svg.to_string())),
        ]);
        v.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }

    pub fn dataset_path(&self) -> Result<&Path, Error> {
        self.dataset
            .as_deref()
            .ok_or_else(|| Error::Config("no dataset given (--dataset or `dataset =`)".into()))
    }

    pub fn hyper_path(&self) -> Result<&Path, Error> {
        self.hyper
            .as_deref()
            .ok_or_else(|| Error::Config("no hyperparameter file given (--hyper or `hyper =`)".into()))
    }

    /// Explicit width first, then the molecule preset.
    pub fn resolved_bin_width(&self) -> Result<f64, Error> {
        let width = match (self.bin_width, &self.molecule) {
            (Some(w), _) => w,
            (None, Some(m)) => bin_width_for(m)?,
            (None, None) => {
                return Err(Error::Config(
                    "no bin width given (--bin-width in eV, or --molecule for a preset)".into(),
                ))
            }
        };
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Config(format!("bin width must be positive, got {width}")));
        }
        Ok(width)
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            n_train: self.n_train,
            n_test: self.n_test,
            seed: self.seed,
        }
    }

    pub fn soap_config(&self, species: Vec<u32>) -> SoapConfig {
        SoapConfig {
            r_cut: self.soap_r_cut,
            n_max: self.soap_n_max,
            l_max: self.soap_l_max,
            sigma_atom: self.soap_sigma,
            ..SoapConfig::new(species)
        }
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            steps: self.opt_steps,
            ..OptimizerConfig::default()
        }
    }

    pub fn cv_config(&self) -> CvConfig {
        CvConfig {
            folds: self.cv_folds,
            repetitions: self.cv_repetitions,
            seed: self.cv_seed(),
            optimizer: self.optimizer(),
        }
    }

    pub fn hyper_grid(&self) -> HyperInitGrid {
        match &self.grid {
            GridChoice::Standard => HyperInitGrid::standard(),
            GridChoice::Single(h) => HyperInitGrid::single(h.clone()),
        }
    }

    pub fn cv_seed(&self) -> u64 {
        derive_seed(self.seed, 1)
    }

    pub fn estimator_seed(&self) -> u64 {
        derive_seed(self.seed, 2)
    }

    pub fn al_seed(&self) -> u64 {
        derive_seed(self.seed, 3)
    }
}

/// Config file (if any) followed by flag overrides.
pub fn resolve(config_file: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig, Error> {
    let mut pairs = match config_file {
        Some(p) => read_key_values(p)?,
        None => Vec::new(),
    };
    pairs.extend_from_slice(overrides);
    RunConfig::from_pairs(&pairs)
}

/// Renders pairs as a `key = value` file.
pub fn render_pairs<'a>(header: &[String], pairs: impl IntoIterator<Item = (&'a str, String)>) -> String {
    let mut out = String::new();
    for h in header {
        out.push_str("# ");
        out.push_str(h);
        out.push('\n');
    }
    for (k, v) in pairs {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    }
    out
}
