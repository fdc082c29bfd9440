use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mlip_uq::commands::{self, Verdict};
use mlip_uq::config::{resolve, RunConfig};
use mlip_uq::Error;

#[derive(Parser)]
#[command(name = "mlip-uq", version, about = "GPR uncertainty workbench for molecular energy surrogates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write per-structure features and the energy manifest as CSV
    Featurize(Flags),
    /// Pick an initial guess by cross validation and optimise hyperparameters
    Tune(Flags),
    /// Fit on the training split and predict the test split
    Train(Flags),
    /// Calibration curve and reliability diagram on the candidate pool
    Calibrate(Flags),
    /// Uncertainty-sampling active learning, one trace per strategy
    Al(Flags),
    /// Self-calibration check on synthetic sine data
    Synthcheck(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// key = value configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// XYZ trajectory
    #[arg(long)]
    dataset: Option<String>,
    /// coulomb or soap
    #[arg(long)]
    repr: Option<String>,
    /// gpr_std, two_set or bootstrap
    #[arg(long)]
    estimator: Option<String>,
    /// reliability bin width in eV
    #[arg(long)]
    bin_width: Option<String>,
    /// bin-width preset: benzene, aspirin, sma, o-hbdi, porphyrin
    #[arg(long)]
    molecule: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// output directory
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    n_iter: Option<String>,
    /// repeatable: gpr_std, two_set, bootstrap, random, oracle_max_error
    #[arg(long)]
    strategy: Vec<String>,
    /// energy unit of the dataset: ev, kcal/mol, hartree
    #[arg(long)]
    unit: Option<String>,
    /// hyperparameter file written by `tune`
    #[arg(long)]
    hyper: Option<String>,
    #[arg(long)]
    n_train: Option<String>,
    #[arg(long)]
    n_test: Option<String>,
    #[arg(long)]
    n_init: Option<String>,
    #[arg(long)]
    ensemble_size: Option<String>,
    #[arg(long)]
    cv_folds: Option<String>,
    #[arg(long)]
    cv_repetitions: Option<String>,
    #[arg(long)]
    opt_steps: Option<String>,
    /// standard (3x1x3 initial-guess grid) or single (init_* keys)
    #[arg(long)]
    grid: Option<String>,
    /// reliability bins with at most this many samples are not judged
    #[arg(long)]
    min_count: Option<String>,
    #[arg(long)]
    n_pool: Option<String>,
    /// `sine` runs active learning on the built-in 1-D benchmark
    #[arg(long)]
    benchmark: Option<String>,
    #[arg(long)]
    noise_std: Option<String>,
    /// also write SVG plots
    #[arg(long)]
    svg: bool,
    /// any configuration key, as KEY=VALUE (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Flags {
    fn overrides(&self) -> Result<Vec<(String, String)>, Error> {
        let mut v = Vec::new();
        let named = [
            ("dataset", &self.dataset),
            ("repr", &self.repr),
            ("estimator", &self.estimator),
            ("bin_width", &self.bin_width),
            ("molecule", &self.molecule),
            ("seed", &self.seed),
            ("out", &self.out),
            ("n_iter", &self.n_iter),
            ("unit", &self.unit),
            ("hyper", &self.hyper),
            ("n_train", &self.n_train),
            ("n_test", &self.n_test),
            ("n_init", &self.n_init),
            ("ensemble_size", &self.ensemble_size),
            ("cv_folds", &self.cv_folds),
            ("cv_repetitions", &self.cv_repetitions),
            ("opt_steps", &self.opt_steps),
            ("grid", &self.grid),
            ("min_count", &self.min_count),
            ("n_pool", &self.n_pool),
            ("benchmark", &self.benchmark),
            ("noise_std", &self.noise_std),
        ];
        for (k, val) in named {
            if let Some(val) = val {
                v.push((k.to_string(), val.clone()));
            }
        }
        if !self.strategy.is_empty() {
            v.push(("strategy".into(), self.strategy.join(",")));
        }
        if self.svg {
            v.push(("svg".into(), "true".into()));
        }
        for kv in &self.set {
            let (k, val) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            v.push((k.trim().to_string(), val.trim().to_string()));
        }
        Ok(v)
    }

    fn resolve(&self) -> Result<RunConfig, Error> {
        resolve(self.config.as_deref(), &self.overrides()?)
    }
}

fn run(command: Command) -> Result<Verdict, Error> {
    match command {
        Command::Featurize(f) => commands::featurize_cmd(&f.resolve()?).map(|_| Verdict::Pass),
        Command::Tune(f) => {
            let file = commands::tune(&f.resolve()?)?;
            print!("{}", file.render());
            Ok(Verdict::Pass)
        }
        Command::Train(f) => commands::train(&f.resolve()?).map(|_| Verdict::Pass),
        Command::Calibrate(f) => {
            let s = commands::calibrate(&f.resolve()?)?;
            println!(
                "miscalibration area {:.4} over {} pool samples (bin width {} eV)",
                s.miscalibration_area, s.n_pool, s.bin_width
            );
            Ok(Verdict::Pass)
        }
        Command::Al(f) => {
            for t in commands::active_learning(&f.resolve()?)? {
                let m = t.final_metrics();
                println!(
                    "{:<17} {} iterations, final MAE {:.6}, max {:.6}",
                    t.strategy.name(),
                    t.rows.len() - 1,
                    m.mae,
                    m.max_abs_error
                );
            }
            Ok(Verdict::Pass)
        }
        Command::Synthcheck(f) => {
            let (report, verdict) = commands::synthcheck(&f.resolve()?)?;
            print!("{}", commands::render_selfcheck(&report, verdict));
            Ok(verdict)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
