//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use common::{random_molecule, random_problem, random_rotation, rel_err, DenseGp};
use mlip_uq_core::al::{AlConfig, SineBenchmark, Strategy};
use mlip_uq_core::calib::{calibration_curve, EvaluationRecord};
use mlip_uq_core::gpr::{log_marginal_likelihood, log_marginal_likelihood_with_gradient, GprModel, Hyperparameters, KernelParams};
use mlip_uq_core::repcore::{coulomb_feature, soap_features, SoapCalculator, SoapConfig, Structure};
use mlip_uq_core::selfcheck::{run_self_check, SelfCheckConfig};
use mlip_uq_core::uq::{gpr_predict, BootstrapEstimator, TwoSetEstimator};
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gpr_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let mut r = common::rng(10_000 + seed);
        let n = r.random_range(1..=50);
        let d = r.random_range(1..=10);
        let p = random_problem(seed, n, d);
        let model = GprModel::fit(p.x.clone(), &p.y, &p.hyper).map_err(|e| e.to_string())?;
        let oracle = DenseGp::new(&p);
        for _ in 0..5 {
            let q: Vec<f64> = (0..d).map(|_| r.random_range(-2.5..2.5)).collect();
            let (m, s) = model.predict(&q).map_err(|e| e.to_string())?;
            let err = rel_err(m, oracle.mean(&q)).max(rel_err(s, oracle.std(&q)));
            worst = worst.max(err);
            ensure(err <= 1e-8, || format!("problem {seed}: relative error {err:.2e}"))?;
        }
    }
    Ok(format!("50 problems, worst relative error {worst:.1e}"))
}

fn gradient_check() -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut r = common::rng(20_000 + seed);
        let p = random_problem(500 + seed, r.random_range(5..=30), r.random_range(1..=5));
        let (_, g) = log_marginal_likelihood_with_gradient(&p.x, &p.y, &p.hyper).map_err(|e| e.to_string())?;
        let mut theta = vec![p.hyper.kernel.output_scale().ln()];
        theta.extend(p.hyper.kernel.lengthscales().iter().map(|l| l.ln()));
        theta.push(p.hyper.noise.ln());
        let eval = |t: &[f64]| {
            let d = t.len() - 2;
            let k = KernelParams::new(t[0].exp(), t[1..=d].iter().map(|v| v.exp()).collect()).unwrap();
            log_marginal_likelihood(&p.x, &p.y, &Hyperparameters::new(k, t[d + 1].exp()).unwrap()).unwrap()
        };
        for i in 0..theta.len() {
            let (mut up, mut down) = (theta.clone(), theta.clone());
            up[i] += h;
            down[i] -= h;
            let fd = (eval(&up) - eval(&down)) / (2.0 * h);
            // components below 1e-2 are compared on an absolute scale of 1e-2
            let err = (g[i] - fd).abs() / g[i].abs().max(fd.abs()).max(1e-2);
            worst = worst.max(err);
            ensure(err <= 1e-4, || format!("problem {seed}, parameter {i}: {} vs {fd}", g[i]))?;
        }
    }
    Ok(format!("20 problems, worst relative deviation {worst:.1e}"))
}

fn self_calibration() -> Outcome {
    let mut passed = 0;
    let mut worst_area: f64 = 0.0;
    let mut failures = Vec::new();
    for seed in 0..10 {
        let report = run_self_check(&SelfCheckConfig {
            seed,
            ..SelfCheckConfig::default()
        })
        .map_err(|e| e.to_string())?;
        worst_area = worst_area.max(report.curve.miscalibration_area);
        if report.passed() {
            passed += 1;
        } else {
            failures.push(seed);
        }
    }
    ensure(passed >= 9, || format!("{passed}/10 seeds passed, failing seeds {failures:?}"))?;
    Ok(format!("{passed}/10 seeds pass, largest miscalibration area {worst_area:.4}"))
}

fn calibration_oracle() -> Outcome {
    let mut r = common::rng(4);
    let records: Vec<EvaluationRecord> = (0..10_000)
        .map(|_| EvaluationRecord::new(0.0, 1.0, r.sample(StandardNormal)))
        .collect();
    let curve = calibration_curve(&records, 101).map_err(|e| e.to_string())?;
    let dev = curve.points.iter().map(|(a, o)| (a - o).abs()).fold(0.0, f64::max);
    ensure(dev <= 0.02, || format!("largest deviation from the diagonal {dev}"))?;
    Ok(format!("largest deviation {dev:.4}, area {:.4}", curve.miscalibration_area))
}

fn ensemble_contracts() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let p = random_problem(900 + seed, 30, 3);
        let full = GprModel::fit(p.x.clone(), &p.y, &p.hyper).map_err(|e| e.to_string())?;
        let two = TwoSetEstimator::build(&p.x, &p.y, &p.hyper, seed).map_err(|e| e.to_string())?;
        let boot = BootstrapEstimator::build(&p.x, &p.y, &p.hyper, 10, seed).map_err(|e| e.to_string())?;
        let mut r = common::rng(seed);
        for _ in 0..10 {
            let q: Vec<f64> = (0..3).map(|_| r.random_range(-2.5..2.5)).collect();
            let g = gpr_predict(&full, &q).map_err(|e| e.to_string())?;
            let t = two.predict(&q).map_err(|e| e.to_string())?;
            let b = boot.predict(&q).map_err(|e| e.to_string())?;
            let (ha, hb) = two.halves();
            let diff = (ha.predict_mean(&q).unwrap() - hb.predict_mean(&q).unwrap()).abs();
            ensure(t.std == diff, || format!("two-set std {} vs member difference {diff}", t.std))?;
            let preds: Vec<f64> = boot.members().iter().map(|m| m.predict_mean(&q).unwrap()).collect();
            let mean = preds.iter().sum::<f64>() / 10.0;
            let sd = (preds.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 9.0).sqrt();
            let err = rel_err(b.std, sd);
            worst = worst.max(err);
            ensure(err <= 1e-12, || format!("bootstrap std {} vs {sd}", b.std))?;
            ensure(g.mean == t.mean && g.mean == b.mean, || {
                format!("means differ: {} {} {}", g.mean, t.mean, b.mean)
            })?;
        }
    }
    Ok(format!("100 queries, bootstrap worst relative error {worst:.1e}, means identical"))
}

fn representation_invariance() -> Outcome {
    let mut r = common::rng(6);
    let cfg = SoapConfig {
        l_max: 3,
        n_max: 4,
        ..SoapConfig::new(vec![1, 6, 8])
    };
    let calc = SoapCalculator::new(cfg.clone()).map_err(|e| e.to_string())?;
    let mut worst_rot: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for _ in 0..12 {
        let mol = random_molecule(&mut r, &[6, 8, 1, 1], 6);
        let base = calc.compute(&mol).map_err(|e| e.to_string())?;
        let cm = coulomb_feature(&mol).map_err(|e| e.to_string())?;
        let rot = random_rotation(&mut r);
        let shift = [r.random_range(-20.0..20.0), r.random_range(-20.0..20.0), r.random_range(-20.0..20.0)];
        for (moved, rotation) in [(mol.rotated(&rot), true), (mol.translated(shift), false)] {
            let f = calc.compute(&moved).map_err(|e| e.to_string())?;
            for i in 0..base.n_atoms() {
                let scale = base.atom(i).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                for (a, b) in base.atom(i).iter().zip(f.atom(i)) {
                    if rotation {
                        worst_rot = worst_rot.max((a - b).abs() / scale);
                    } else {
                        worst_shift = worst_shift.max((a - b).abs());
                    }
                }
            }
            let c = coulomb_feature(&moved).map_err(|e| e.to_string())?;
            for (a, b) in cm.values().iter().zip(c.values()) {
                worst_shift = worst_shift.max(if rotation { 0.0 } else { (a - b).abs() });
                worst_rot = worst_rot.max(if rotation { (a - b).abs() / a.abs() } else { 0.0 });
            }
        }
    }
    ensure(worst_rot <= 1e-8, || format!("rotation deviation {worst_rot:.2e}"))?;
    ensure(worst_shift <= 1e-10, || format!("translation deviation {worst_shift:.2e}"))?;

    let alone = soap_features(&Structure::new(vec![8], vec![[0.0; 3]], None).unwrap(), &cfg).unwrap();
    let gap = |d: f64| {
        let s = Structure::new(vec![8, 1], vec![[0.0; 3], [0.0, d, 0.0]], None).unwrap();
        let f = soap_features(&s, &cfg).unwrap();
        f.atom(0).iter().zip(alone.atom(0)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let sweep: Vec<f64> = (1..=8).map(|k| gap(cfg.r_cut - 10f64.powi(-k))).collect();
    ensure(sweep.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0), || format!("cutoff sweep not shrinking: {sweep:?}"))?;
    ensure(sweep[7] < 1e-10 && gap(cfg.r_cut) == 0.0, || format!("gap at the cutoff {:.2e}", sweep[7]))?;
    Ok(format!(
        "12 rotations/translations: rotation {worst_rot:.1e} rel, translation {worst_shift:.1e} abs, cutoff gap {:.1e}",
        sweep[7]
    ))
}

fn al_contracts() -> Outcome {
    let bench = SineBenchmark::generate(200, 200, 0.05, 7).map_err(|e| e.to_string())?;
    for strategy in Strategy::ALL {
        let cfg = AlConfig {
            n_init: 20,
            n_iter: 100,
            strategy,
            seed: 1,
            ensemble_size: 5,
            ..AlConfig::default()
        };
        let trace = bench.run(&cfg).map_err(|e| e.to_string())?;
        ensure(trace.rows.len() == 101 && !trace.truncated, || format!("{strategy}: {} rows", trace.rows.len()))?;
        let mut seen: HashSet<usize> = trace.initial_indices.iter().copied().collect();
        for s in trace.selected() {
            ensure(seen.insert(s), || format!("{strategy}: sample {s} selected twice"))?;
        }
        let oracle = strategy == Strategy::OracleMaxError;
        ensure((trace.oracle_reads > 0) == oracle, || {
            format!("{strategy}: {} unlabelled reads", trace.oracle_reads)
        })?;
    }
    let (mut oracle, mut random) = (0.0, 0.0);
    for seed in 0..10 {
        let bench = SineBenchmark::generate(200, 200, 0.05, 1000 + seed).map_err(|e| e.to_string())?;
        for (strategy, acc) in [(Strategy::OracleMaxError, &mut oracle), (Strategy::Random, &mut random)] {
            let cfg = AlConfig {
                n_init: 20,
                n_iter: 50,
                strategy,
                seed,
                ..AlConfig::default()
            };
            *acc += bench.run(&cfg).map_err(|e| e.to_string())?.final_metrics().mae / 10.0;
        }
    }
    ensure(oracle <= random, || format!("oracle MAE {oracle:.4} above random {random:.4}"))?;
    Ok(format!("bookkeeping holds for 5 strategies; mean final MAE oracle {oracle:.4} vs random {random:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 7] = [
        ("1 GPR exactness", gpr_exactness, Duration::from_secs(10)),
        ("2 MLL gradient check", gradient_check, Duration::from_secs(30)),
        ("3 self-calibration fixture", self_calibration, Duration::from_secs(60)),
        ("4 calibration-curve oracle", calibration_oracle, Duration::from_secs(5)),
        ("5 ensemble estimator contracts", ensemble_contracts, Duration::MAX),
        ("6 representation invariances", representation_invariance, Duration::MAX),
        ("7 active-learning contracts", al_contracts, Duration::MAX),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {name}: PASS ({elapsed:.2?}) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({elapsed:.2?}) {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
