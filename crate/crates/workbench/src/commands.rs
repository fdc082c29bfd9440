//! The pipeline steps behind each subcommand.

use std::path::Path;

use mlip_uq_core::al::{run_uncertainty_sampling, AlConfig, AlTrace, SineBenchmark};
use mlip_uq_core::calib::{calibration_curve, extended_reliability, EvaluationRecord};
use mlip_uq_core::data::{split, Dataset, Split};
use mlip_uq_core::gpr::{optimize_hyperparameters, select_initial_guess, Hyperparameters, KernelInput};
use mlip_uq_core::selfcheck::{run_self_check, SelfCheckConfig, SelfCheckReport};
use mlip_uq_core::uq::Estimator;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::features::{featurize, select, Features};
use crate::hyperfile::HyperFile;
use crate::output::{self, OutDir};
use crate::xyz::parse_xyz_trajectory;
use crate::{with_features, Error};

/// Outcome of a command that passes judgement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

fn inputs(cfg: &RunConfig) -> Vec<&Path> {
    [cfg.dataset.as_deref(), cfg.hyper.as_deref()].into_iter().flatten().collect()
}

fn load(cfg: &RunConfig) -> Result<(Dataset, Features), Error> {
    let ds = parse_xyz_trajectory(cfg.dataset_path()?, cfg.unit)?;
    let features = featurize(&ds, cfg)?;
    Ok((ds, features))
}

fn load_hyper(cfg: &RunConfig, features: &Features) -> Result<Hyperparameters, Error> {
    let file = HyperFile::read(cfg.hyper_path()?)?;
    if file.hyper.dim() != features.dim() {
        return Err(Error::Config(format!(
            "hyperparameters have {} lengthscales but {} features have dimension {}",
            file.hyper.dim(),
            cfg.repr,
            features.dim()
        )));
    }
    Ok(file.hyper)
}

pub fn featurize_cmd(cfg: &RunConfig) -> Result<(), Error> {
    let (ds, features) = load(cfg)?;
    let out = OutDir::create(&cfg.out, &inputs(cfg))?;
    output::write_energies(&out.file("energies.csv")?, &ds.energies())?;
    let dim = features.dim();
    let cols = |fixed: &[&str]| {
        fixed
            .iter()
            .map(|s| s.to_string())
            .chain((0..dim).map(|d| format!("f{d}")))
            .collect::<Vec<_>>()
    };
    let path = out.file("features.csv")?;
    match &features {
        Features::Global(v) => output::write_features(
            &path,
            &cols(&["index"]),
            v.iter().enumerate().map(|(i, f)| {
                std::iter::once(i.to_string())
                    .chain(f.values().iter().map(|x| x.to_string()))
                    .collect()
            }),
        )?,
        Features::Atomistic(v) => output::write_features(
            &path,
            &cols(&["index", "atom"]),
            v.iter().enumerate().flat_map(|(i, set)| {
                (0..set.n_atoms()).map(move |a| {
                    [i.to_string(), a.to_string()]
                        .into_iter()
                        .chain(set.atom(a).iter().map(|x| x.to_string()))
                        .collect()
                })
            }),
        )?,
    }
    output::write_manifest(&out, "featurize", cfg, &[format!("{} structures, dimension {dim}", ds.len())])
}

pub fn tune(cfg: &RunConfig) -> Result<HyperFile, Error> {
    let (ds, features) = load(cfg)?;
    let parts = split(&ds, &cfg.split_spec())?;
    let energies = ds.energies();
    let ty = select(&energies, &parts.train);
    let dim = features.dim();
    let (report, outcome) = with_features!(&features, xs => {
        let tx = select(xs, &parts.train);
        let report = select_initial_guess(&tx, &ty, &cfg.hyper_grid(), &cfg.cv_config())?;
        let init = report.best.to_hyperparameters(dim)?;
        let outcome = optimize_hyperparameters(&tx, &ty, &init, &cfg.optimizer())?;
        (report, outcome)
    });
    let out = OutDir::create(&cfg.out, &inputs(cfg))?;
    let file = HyperFile {
        hyper: outcome.hyper.clone(),
        mll: Some(outcome.mll),
        init: Some(report.best.clone()),
    };
    output::write_text(&out.file("hyperparameters.txt")?, &file.render())?;
    let cv_path = out.file("cv.csv")?;
    let mut w = csv::Writer::from_path(&cv_path).map_err(|e| Error::csv(&cv_path, e))?;
    w.write_record(["init_lengthscale", "init_output_scale", "init_noise", "mean_loss", "folds_completed"])
        .map_err(|e| Error::csv(&cv_path, e))?;
    for e in &report.entries {
        if !e.mean_loss.is_finite() {
            eprintln!(
                "grid combination l={} σ_f²={} σ_n²={} failed after {} folds",
                e.init.lengthscale,
                e.init.output_scale,
                e.init.noise,
                e.fold_losses.len()
            );
        }
        w.write_record([
            e.init.lengthscale.to_string(),
            e.init.output_scale.to_string(),
            e.init.noise.to_string(),
            e.mean_loss.to_string(),
            e.fold_losses.len().to_string(),
        ])
        .map_err(|e| Error::csv(&cv_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&cv_path, e))?;
    let mut notes = vec![format!("final mll {}", outcome.mll)];
    if let Some(why) = &outcome.aborted {
        notes.push(format!("optimisation stopped early: {why}"));
        eprintln!("optimisation stopped early: {why}");
    }
    output::write_manifest(&out, "tune", cfg, &notes)?;
    Ok(file)
}

fn predict_all<T: KernelInput>(est: &Estimator<T>, xs: &[T]) -> Result<Vec<(f64, f64)>, Error> {
    xs.par_iter()
        .map(|x| est.predict(x).map(|d| (d.mean, d.std)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Error::from)
}

/// Trains the configured estimator on the training split and predicts `eval`.
fn fit_and_predict(
    cfg: &RunConfig,
    features: &Features,
    energies: &[f64],
    parts: &Split,
    eval: &[usize],
) -> Result<Vec<EvaluationRecord>, Error> {
    let hyper = load_hyper(cfg, features)?;
    let ty = select(energies, &parts.train);
    let preds = with_features!(features, xs => {
        let tx = select(xs, &parts.train);
        let est = Estimator::build(cfg.estimator, &tx, &ty, &hyper, cfg.ensemble_size, cfg.estimator_seed())?;
        predict_all(&est, &select(xs, eval))?
    });
    Ok(preds
        .into_iter()
        .zip(eval)
        .map(|((m, s), &i)| EvaluationRecord::new(m, s, energies[i]))
        .collect())
}

pub fn train(cfg: &RunConfig) -> Result<(), Error> {
    let (ds, features) = load(cfg)?;
    let parts = split(&ds, &cfg.split_spec())?;
    let energies = ds.energies();
    let records = fit_and_predict(cfg, &features, &energies, &parts, &parts.test)?;
    let out = OutDir::create(&cfg.out, &inputs(cfg))?;
    let rows: Vec<_> = parts
        .test
        .iter()
        .zip(&records)
        .map(|(&i, r)| (i, r.truth, r.mean, r.uncertainty))
        .collect();
    output::write_predictions(&out.file("predictions.csv")?, &rows)?;
    let means: Vec<f64> = records.iter().map(|r| r.mean).collect();
    let truths: Vec<f64> = records.iter().map(|r| r.truth).collect();
    let m = mlip_uq_core::al::evaluate_metrics(&means, &truths)?;
    output::write_summary(
        &out,
        [
            ("n_train", parts.train.len().to_string()),
            ("n_test", parts.test.len().to_string()),
            ("mae", m.mae.to_string()),
            ("max_abs_error", m.max_abs_error.to_string()),
            ("abs_error_variance", m.abs_error_variance.to_string()),
        ],
    )?;
    output::write_manifest(&out, "train", cfg, &[])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSummary {
    pub miscalibration_area: f64,
    pub bin_width: f64,
    pub n_pool: usize,
}

pub fn calibrate(cfg: &RunConfig) -> Result<CalibrationSummary, Error> {
    let bin_width = cfg.resolved_bin_width()?;
    let (ds, features) = load(cfg)?;
    let parts = split(&ds, &cfg.split_spec())?;
    if parts.pool.is_empty() {
        return Err(Error::Config(format!(
            "candidate pool is empty: {} structures, {} train + {} test",
            ds.len(),
            cfg.n_train,
            cfg.n_test
        )));
    }
    let energies = ds.energies();
    let records = fit_and_predict(cfg, &features, &energies, &parts, &parts.pool)?;
    let curve = calibration_curve(&records, cfg.n_alphas)?;
    let bins = extended_reliability(&records, bin_width, cfg.min_count)?;

    let out = OutDir::create(&cfg.out, &inputs(cfg))?;
    output::write_curve(&out.file("curve.csv")?, &curve)?;
    output::write_reliability(&out.file("reliability.csv")?, &bins)?;
    if cfg.svg {
        output::write_text(&out.file("curve.svg")?, &crate::svg::calibration_curve_svg(&curve))?;
        output::write_text(&out.file("reliability.svg")?, &crate::svg::reliability_svg(&records, &bins))?;
    }
    let summary = CalibrationSummary {
        miscalibration_area: curve.miscalibration_area,
        bin_width,
        n_pool: records.len(),
    };
    output::write_summary(
        &out,
        [
            ("estimator", cfg.estimator.to_string()),
            ("miscalibration_area", summary.miscalibration_area.to_string()),
            ("bin_width", bin_width.to_string()),
            ("n_pool", summary.n_pool.to_string()),
        ],
    )?;
    output::write_manifest(&out, "calibrate", cfg, &[])?;
    Ok(summary)
}

fn al_config(cfg: &RunConfig, strategy: mlip_uq_core::al::Strategy) -> AlConfig {
    AlConfig {
        n_init: cfg.n_init,
        n_iter: cfg.n_iter,
        strategy,
        seed: cfg.al_seed(),
        refit_ensembles: cfg.refit_ensembles,
        ensemble_size: cfg.ensemble_size,
        incremental: cfg.incremental,
    }
}

/// Runs every configured strategy from the same initial set. Selected indices
/// in the traces refer to dataset rows (benchmark pool rows for `--benchmark sine`).
pub fn active_learning(cfg: &RunConfig) -> Result<Vec<AlTrace>, Error> {
    if cfg.strategies.is_empty() {
        return Err(Error::Config("no strategy given".into()));
    }
    let traces: Vec<AlTrace> = if cfg.benchmark {
        let bench = SineBenchmark::generate(cfg.n_pool, cfg.n_test, cfg.noise_std, cfg.seed)?;
        let hyper = match &cfg.hyper {
            Some(p) => HyperFile::read(p)?.hyper,
            None => SineBenchmark::hyperparameters(),
        };
        cfg.strategies
            .iter()
            .map(|&s| {
                run_uncertainty_sampling(&bench.pool, &bench.pool_labels, &bench.test, &bench.test_labels, &hyper, &al_config(cfg, s))
            })
            .collect::<Result<_, _>>()?
    } else {
        let (ds, features) = load(cfg)?;
        let hyper = load_hyper(cfg, &features)?;
        let parts = split(&ds, &cfg.split_spec())?;
        let mut pool_idx: Vec<usize> = parts.train.iter().chain(&parts.pool).copied().collect();
        pool_idx.sort_unstable();
        let energies = ds.energies();
        let (pool_y, test_y) = (select(&energies, &pool_idx), select(&energies, &parts.test));
        let runs: Vec<AlTrace> = with_features!(&features, xs => {
            let (pool, test) = (select(xs, &pool_idx), select(xs, &parts.test));
            cfg.strategies
                .iter()
                .map(|&s| run_uncertainty_sampling(&pool, &pool_y, &test, &test_y, &hyper, &al_config(cfg, s)))
                .collect::<Result<_, _>>()?
        });
        runs.into_iter()
            .map(|mut t| {
                for r in &mut t.rows {
                    r.selected_index = r.selected_index.map(|i| pool_idx[i]);
                }
                t.initial_indices = t.initial_indices.iter().map(|&i| pool_idx[i]).collect();
                t
            })
            .collect()
    };
    let out = OutDir::create(&cfg.out, &inputs(cfg))?;
    let mut summary = Vec::new();
    for t in &traces {
        output::write_trace(&out.file(&format!("trace_{}.csv", t.strategy))?, t)?;
        if t.truncated {
            eprintln!("{}: pool exhausted after {} iterations", t.strategy, t.rows.len() - 1);
        }
        summary.push((t.strategy.name(), t.final_metrics().mae.to_string()));
    }
    output::write_summary(&out, summary)?;
    let notes = vec![format!(
        "initial samples: {}",
        traces[0].initial_indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    )];
    output::write_manifest(&out, "al", cfg, &notes)?;
    Ok(traces)
}

pub fn synthcheck(cfg: &RunConfig) -> Result<(SelfCheckReport, Verdict), Error> {
    let sc = SelfCheckConfig {
        n_train: cfg.synth_n_train,
        n_test: cfg.synth_n_test,
        noise_std: cfg.noise_std,
        seed: cfg.seed,
        delta_u: cfg.bin_width,
        min_count: cfg.min_count,
        n_alphas: cfg.n_alphas,
        target_noise: cfg.target_noise,
        optimizer: cfg.optimizer(),
        ..SelfCheckConfig::default()
    };
    let report = run_self_check(&sc)?;
    let out = OutDir::create(&cfg.out, &inputs(cfg))?;
    output::write_curve(&out.file("curve.csv")?, &report.curve)?;
    output::write_reliability(&out.file("reliability.csv")?, &report.bins)?;
    if cfg.svg {
        output::write_text(&out.file("curve.svg")?, &crate::svg::calibration_curve_svg(&report.curve))?;
        output::write_text(
            &out.file("reliability.svg")?,
            &crate::svg::reliability_svg(&report.records, &report.bins),
        )?;
    }
    let verdict = if report.passed() { Verdict::Pass } else { Verdict::Fail };
    output::write_summary(
        &out,
        [
            ("verdict", format!("{verdict:?}").to_lowercase()),
            ("miscalibration_area", report.curve.miscalibration_area.to_string()),
            ("bin_width", report.delta_u.to_string()),
        ],
    )?;
    output::write_manifest(&out, "synthcheck", cfg, &[])?;
    Ok((report, verdict))
}

/// Per-bin table and verdict line as printed by `synthcheck`.
pub fn render_selfcheck(report: &SelfCheckReport, verdict: Verdict) -> String {
    let mut s = format!(
        "bin width {:.5}, fitted l = {:.4}, σ_f² = {:.4}, σ_n² = {:.3e}\n",
        report.delta_u,
        report.hyper.kernel.lengthscales()[0],
        report.hyper.kernel.output_scale(),
        report.hyper.noise
    );
    s.push_str(" bin   centre  count   err_mean  bound     err_std   |std-u|/u  ok\n");
    for v in &report.verdicts {
        let b = &v.bin;
        s.push_str(&format!(
            "{:>4} {:>8.5} {:>6} {:>+10.5} {:>8.5} {:>9.5} {:>9.3}  {}\n",
            b.index,
            b.center,
            b.count,
            b.error_mean,
            v.mean_bound,
            b.error_std,
            (b.error_std - b.center).abs() / b.center,
            if v.passed() { "yes" } else { "NO" }
        ));
    }
    let hidden = report.bins.iter().filter(|b| b.suppressed).count();
    if hidden > 0 {
        s.push_str(&format!("({hidden} bins with too few samples not shown)\n"));
    }
    s.push_str(&format!(
        "miscalibration area {:.4}{}\n",
        report.curve.miscalibration_area,
        if report.area_ok { "" } else { " (too large)" }
    ));
    s.push_str(match verdict {
        Verdict::Pass => "PASS\n",
        Verdict::Fail => "FAIL\n",
    });
    s
}
