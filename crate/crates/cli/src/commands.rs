use std::fs::{self, File};
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use vrm_core::experiments::{self, run_regret_sim, Experiment, ExperimentConfig, RunResult};
use vrm_core::simplex::{proj_restricted, restricted_kkt_residual};
use vrm_core::{seeded_rng, Points, RestrictedSimplexSpec};

use crate::error::CliError;
use crate::settings::{self, parse_seeds, Settings};
use crate::stats::{checkpoints, mean_ci95};

pub const OUT_DIR_ENV: &str = "VRM_OUT_DIR";

pub fn out_dir(s: &Settings) -> PathBuf {
    s.get("out")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("vrm-out"))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    use std::io::Write;
    writeln!(f)?;
    Ok(())
}

/// Runs `f` on every item over `jobs` threads; results keep the item order.
/// A panic in one item is returned as its error.
fn run_parallel<T, F>(items: &[u64], jobs: usize, f: F) -> Vec<Result<T, String>>
where
    T: Send,
    F: Fn(u64) -> Result<T, String> + Sync,
{
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T, String>>>> =
        Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let out = catch_unwind(AssertUnwindSafe(|| f(items[i])))
                    .unwrap_or_else(|_| Err("run panicked".into()));
                slots.lock().expect("no poisoned slots")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("no poisoned slots")
        .into_iter()
        .map(|r| r.expect("every item ran"))
        .collect()
}

pub fn regret_sim(s: &Settings) -> Result<(), CliError> {
    let cfg = settings::regret_config(s)?;
    let jobs = settings::jobs(s)?;
    let dir = out_dir(s);
    create_dir(&dir)?;

    let res = run_regret_sim(&cfg, jobs)?;
    res.ledger.write_csv(BufWriter::new(File::create(dir.join("ledger.csv"))?))?;

    for &seed in &cfg.seeds {
        let mut w = BufWriter::new(File::create(dir.join(format!("result_{seed}.csv")))?);
        use std::io::Write;
        writeln!(w, "horizon,t,regret,seed")?;
        for h in &res.horizons {
            for run in h.runs.iter().filter(|r| r.seed == seed) {
                for (t, r) in &run.curve {
                    writeln!(w, "{},{t},{r},{seed}", h.horizon)?;
                }
            }
        }
    }

    let ci: Vec<_> = res
        .horizons
        .iter()
        .map(|h| {
            let regrets: Vec<f64> = h.runs.iter().map(|r| r.regret()).collect();
            let (mean, ci95) = mean_ci95(&regrets);
            json!({ "horizon": h.horizon, "mean_regret": mean, "ci95": ci95 })
        })
        .collect();
    let summary = json!({
        "command": "regret-sim",
        "config": cfg,
        "slope": res.slope,
        "regret": ci,
        "horizons": res.horizons,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    for h in &res.horizons {
        eprintln!(
            "T = {:>8}: mean regret {:.4}, oracle {:.4}",
            h.horizon, h.mean_regret, h.mean_oracle
        );
    }
    if let Some(slope) = res.slope {
        eprintln!("log-log slope {slope:.3}");
    }
    println!("{}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct RunSummary<'a> {
    seed: u64,
    final_metric: Option<f64>,
    final_weights: &'a Option<Vec<f64>>,
    wall_time_secs: f64,
    sampler_time_secs: f64,
    clipped: u64,
    rejected: u64,
    extras: &'a std::collections::BTreeMap<String, f64>,
}

pub fn experiment(experiment: Experiment, s: &Settings) -> Result<(), CliError> {
    let cfg = settings::experiment_config(ExperimentConfig::defaults_for(experiment), s)?;
    let seeds = match s.get("seeds") {
        Some(v) => parse_seeds(v)?,
        None => vec![cfg.seed],
    };
    let jobs = settings::jobs(s)?;
    let data_path = s.get("data").map(PathBuf::from);
    if data_path.is_some() && experiment != Experiment::Kmeans {
        return Err(CliError::Usage(format!("{experiment} does not accept --data")));
    }
    let dir = out_dir(s);
    let points = match &data_path {
        Some(p) => Some(Points::load_csv(p).map_err(|e| {
            CliError::Runtime(format!("cannot load {}: {e}", p.display()))
        })?),
        None => None,
    };
    create_dir(&dir)?;

    let outcomes = run_parallel(&seeds, jobs, |seed| {
        let cfg = ExperimentConfig { seed, ..cfg.clone() };
        let result = match &points {
            Some(p) => experiments::run_kmeans(&cfg, p),
            None => experiments::run(&cfg),
        }
        .map_err(|e| e.to_string())?;
        let path = dir.join(format!("result_{seed}.csv"));
        let file = File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        result.write_csv(BufWriter::new(file)).map_err(|e| e.to_string())?;
        Ok(result)
    });

    let mut ok: Vec<&RunResult> = Vec::new();
    let mut failures = Vec::new();
    for (seed, out) in seeds.iter().zip(&outcomes) {
        match out {
            Ok(r) => ok.push(r),
            Err(e) => {
                eprintln!("seed {seed} failed: {e}");
                failures.push(json!({ "seed": seed, "error": e }));
            }
        }
    }
    let runs: Vec<RunSummary> = ok
        .iter()
        .map(|r| RunSummary {
            seed: r.seed,
            final_metric: r.final_metric(),
            final_weights: &r.final_weights,
            wall_time_secs: r.wall_time_secs,
            sampler_time_secs: r.sampler_time_secs,
            clipped: r.clipped,
            rejected: r.rejected,
            extras: &r.extras,
        })
        .collect();
    let series: Vec<(&[u64], &[f64])> = ok.iter().map(|r| (&r.iters[..], &r.metric[..])).collect();
    let summary = json!({
        "command": experiment.to_string(),
        "config": cfg,
        "seeds": seeds,
        "data": data_path,
        "unbiased": cfg.unbiased(),
        "runs": runs,
        "failures": failures,
        "checkpoints": checkpoints(&series),
    });
    write_json(&dir.join("summary.json"), &summary)?;
    for r in &runs {
        eprintln!(
            "seed {:>4}: final metric {:.5}",
            r.seed,
            r.final_metric.unwrap_or(f64::NAN)
        );
    }
    println!("{}", dir.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("{} of {} seeds failed", failures.len(), seeds.len())))
    }
}

/// Projects a given vector, or checks the projection on random inputs.
pub fn project_test(s: &Settings) -> Result<(), CliError> {
    let get = |key: &str| s.get(key).map(String::as_str);
    let parse_f = |key: &str, v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Usage(format!("invalid value '{v}' for {key}: {e}")))
    };
    let parse_u = |key: &str, v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| CliError::Usage(format!("invalid value '{v}' for {key}: {e}")))
    };
    for key in s.keys() {
        if !["k", "gamma", "cases", "w", "seeds", "jobs", "out"].contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown setting '{key}'")));
        }
    }
    let gamma = get("gamma").map(|v| parse_f("gamma", v)).transpose()?.unwrap_or(0.1);
    let w: Option<Vec<f64>> = get("w")
        .map(|v| v.split(',').map(|x| parse_f("w", x)).collect())
        .transpose()?;
    let k = match (&w, get("k")) {
        (Some(w), _) => w.len(),
        (None, Some(v)) => parse_u("k", v)?,
        (None, None) => 4,
    };
    let cases = get("cases").map(|v| parse_u("cases", v)).transpose()?.unwrap_or(1000);
    let seed = match get("seeds") {
        Some(v) => parse_seeds(v)?[0],
        None => 0,
    };
    let spec = RestrictedSimplexSpec::new(k, gamma).map_err(|e| CliError::Usage(e.to_string()))?;
    let dir = out_dir(s);
    create_dir(&dir)?;

    if let Some(w) = w {
        let x = proj_restricted(&w, &spec)?;
        let residual = restricted_kkt_residual(&w, &x, &spec);
        let summary = json!({
            "command": "project-test",
            "config": { "k": k, "gamma": gamma, "w": w },
            "projection": x,
            "kkt_residual": residual,
        });
        write_json(&dir.join("summary.json"), &summary)?;
        println!(
            "{}",
            x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        return Ok(());
    }

    let mut rng = seeded_rng(seed);
    let mut worst_residual: f64 = 0.0;
    let mut infeasible = 0;
    let mut non_idempotent = 0;
    for _ in 0..cases {
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x = proj_restricted(&w, &spec)?;
        worst_residual = worst_residual.max(restricted_kkt_residual(&w, &x, &spec));
        if !spec.contains(&x) {
            infeasible += 1;
        }
        if proj_restricted(&x, &spec)? != x {
            non_idempotent += 1;
        }
    }
    let passed = worst_residual <= 1e-8 && infeasible == 0 && non_idempotent == 0;
    let summary = json!({
        "command": "project-test",
        "config": { "k": k, "gamma": gamma, "cases": cases, "seed": seed },
        "max_kkt_residual": worst_residual,
        "infeasible": infeasible,
        "non_idempotent": non_idempotent,
        "passed": passed,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    eprintln!(
        "{cases} projections: max KKT residual {worst_residual:.2e}, {infeasible} infeasible, {non_idempotent} not idempotent"
    );
    println!("{}", dir.display());
    if passed {
        Ok(())
    } else {
        Err(CliError::Runtime("projection checks failed".into()))
    }
}
