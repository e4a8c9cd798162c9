//! Experiment configuration, deterministic orchestration, result
//! persistence, and report aggregation.
//!
//! Determinism contract: (config, master seed) fixes every result CSV
//! body byte-for-byte across reruns and worker counts. Wall-clock
//! columns (`runtime_s`) and manifest timestamps are the only excluded
//! fields. Parallelism is task-level only; each task owns an RNG stream
//! derived from the master seed and its own identity, never from
//! scheduling order.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::mub::{build_prime_mub, build_qubit_mub, verify_unbiasedness, MubSystem};
use crate::numcore::SeededRng;
use crate::problems::{encode, gen_er_graph, gen_instance, ProblemFamily};
use crate::qaoa::{
    paired_stats, run_adaptive_mub_xrot, run_standard, MethodRecord, MethodTag, PairedComparison,
    QaoaRunConfig,
};
use crate::qrao::{strategy_suite, QraoConfig, StrategyRecord, StrategyTag, SuiteResult};
use crate::tol;
use crate::width::{
    asymptotic_gap, dominance_check, estimate_width, max_cdf, octahedron_one, paired_width,
    radial_width, CdfCurve, Ensemble, RadialSpec,
};

const STREAM_WIDTH: u64 = 0x77696474;
const STREAM_BOOTSTRAP: u64 = 0x626f6f74;

/// Grid of a benchmark run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub sizes: Vec<usize>,
    pub depths: Vec<usize>,
    pub seeds: u64,
    pub seed_start: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            sizes: vec![6, 8],
            depths: vec![1, 2],
            seeds: 5,
            seed_start: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    pub restarts: usize,
    pub fd_step: f64,
    pub angle_init_max: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 400,
            restarts: 2,
            fd_step: 1e-3,
            angle_init_max: 0.6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScreeningConfig {
    pub budget: usize,
    pub top_k: usize,
    pub max_rounds: usize,
    pub switch_threshold: f64,
}

impl Default for ScreeningConfig {
    fn default() -> Self {
        Self {
            budget: 30,
            top_k: 2,
            max_rounds: 5,
            switch_threshold: tol::FAMILY_SWITCH,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WidthConfig {
    pub dims: Vec<usize>,
    pub n_samples: usize,
    pub n_unions: usize,
    pub n_dominance_unions: usize,
    pub octahedron_ensembles: usize,
    pub octahedron_samples: usize,
    pub gap_samples: usize,
    pub gap_dense_samples: usize,
    pub grid_max: f64,
    pub grid_step: f64,
}

impl Default for WidthConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4],
            n_samples: 100_000,
            n_unions: 50,
            n_dominance_unions: 20,
            octahedron_ensembles: 200,
            octahedron_samples: 100_000,
            gap_samples: 1_000_000,
            gap_dense_samples: 30_000,
            grid_max: 4.0,
            grid_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MubConfig {
    pub primes: Vec<usize>,
    pub n_max: u32,
}

impl Default for MubConfig {
    fn default() -> Self {
        Self {
            primes: vec![2, 3, 5, 7],
            n_max: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsConfig {
    pub law: String,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        Self {
            law: "uniform_1_10".to_string(),
        }
    }
}

/// One validated configuration document; unknown keys are rejected at
/// parse time by serde.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub grid: GridConfig,
    pub families: Vec<String>,
    pub optimizer: OptimizerConfig,
    pub screening: ScreeningConfig,
    pub width: WidthConfig,
    pub mub: MubConfig,
    pub weights: WeightsConfig,
    pub out_dir: String,
    pub workers: usize,
    pub master_seed: u64,
    pub full: bool,
    pub exhaustive: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            grid: GridConfig::default(),
            families: ProblemFamily::ALL.iter().map(|f| f.as_str().into()).collect(),
            optimizer: OptimizerConfig::default(),
            screening: ScreeningConfig::default(),
            width: WidthConfig::default(),
            mub: MubConfig::default(),
            weights: WeightsConfig::default(),
            out_dir: "results".to_string(),
            workers: 4,
            master_seed: 20_240_901,
            full: false,
            exhaustive: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        for f in &self.families {
            ProblemFamily::parse(f)?;
        }
        for &p in &self.grid.depths {
            if !(1..=3).contains(&p) {
                return Err(Error::Config(format!("depth {p} outside 1..=3")));
            }
        }
        for &n in &self.grid.sizes {
            if !(2..=14).contains(&n) {
                return Err(Error::Config(format!("size {n} outside 2..=14")));
            }
        }
        if self.grid.seeds == 0 {
            return Err(Error::Config("grid.seeds must be >= 1".into()));
        }
        Ok(())
    }

    pub fn parsed_families(&self) -> Vec<ProblemFamily> {
        self.families
            .iter()
            .map(|f| ProblemFamily::parse(f).expect("validated"))
            .collect()
    }

    /// Paper-scale grids behind --full.
    pub fn effective_qaoa_grid(&self) -> GridConfig {
        if self.full {
            GridConfig {
                sizes: vec![8, 10, 12, 14],
                depths: vec![1, 2, 3],
                seeds: 25,
                seed_start: self.grid.seed_start,
            }
        } else {
            self.grid.clone()
        }
    }

    pub fn effective_qrao_grid(&self) -> GridConfig {
        if self.full {
            GridConfig {
                sizes: vec![6, 8, 10, 12],
                depths: vec![1, 2, 3],
                seeds: 30,
                seed_start: self.grid.seed_start,
            }
        } else {
            self.grid.clone()
        }
    }

    pub fn qaoa_run_config(&self) -> QaoaRunConfig {
        QaoaRunConfig {
            max_evals: self.optimizer.max_evals,
            restarts: self.optimizer.restarts,
            fd_step: self.optimizer.fd_step,
            screen_budget: self.screening.budget,
            top_k: self.screening.top_k,
            max_rounds: self.screening.max_rounds,
            switch_threshold: self.screening.switch_threshold,
            angle_init_max: self.optimizer.angle_init_max,
        }
    }

    pub fn qrao_config(&self) -> QraoConfig {
        QraoConfig {
            max_evals: self.optimizer.max_evals,
            restarts: self.optimizer.restarts,
            fd_step: self.optimizer.fd_step,
            angle_init_max: self.optimizer.angle_init_max,
        }
    }

    /// FNV-1a over the canonical JSON form, with fields that cannot
    /// change results (output location, worker count, command label)
    /// neutralized first.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out_dir = String::new();
        canon.workers = 1;
        canon.command = None;
        let text = serde_json::to_string(&canon).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn master_rng(&self) -> SeededRng {
        SeededRng::new(self.master_seed, 0)
    }
}

/// Provenance of one command invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub artifact_version: String,
    pub command: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub task_seeds: Vec<(String, u64, u64)>,
    pub outputs: Vec<String>,
    pub weight_law: String,
    pub config: ExperimentConfig,
}

impl RunManifest {
    fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            config_hash: config.hash(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            started_unix: unix_now(),
            finished_unix: 0,
            task_seeds: Vec::new(),
            outputs: Vec::new(),
            weight_law: config.weights.law.clone(),
            config: config.clone(),
        }
    }

    fn finish(&mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_unix = unix_now();
        let path = dir.join(format!("manifest_{}.json", self.command));
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-task method seed: a stable mix of the master seed and the task's
/// identity. Instances stay keyed by the grid seed alone, so the same
/// instance set is re-optimized under a different master seed.
fn task_seed(master: u64, parts: &[u64]) -> u64 {
    let mut acc = splitmix64(master);
    for &p in parts {
        acc = splitmix64(acc ^ splitmix64(p));
    }
    acc
}

/// Deterministic parallel map: results land in task order, and every
/// task's randomness comes from its own identity, so the worker count
/// never changes any output.
pub fn run_parallel<T: Sync, R: Send>(
    tasks: &[T],
    workers: usize,
    f: impl Fn(usize, &T) -> R + Sync,
) -> Vec<R> {
    let n = tasks.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = workers.max(1).min(n);
    if workers == 1 {
        return tasks.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let counter = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = counter.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = f(i, &tasks[i]);
                *slots[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("no poisoned slot").expect("task ran"))
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------
// mub-verify
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct MubVerifyOutcome {
    pub pass: bool,
    pub systems: Vec<serde_json::Value>,
    pub report_path: String,
}

/// Builds and verifies every supported MUB system; exports each system
/// as JSON for cross-implementation golden tests.
pub fn cmd_mub_verify(config: &ExperimentConfig) -> Result<MubVerifyOutcome> {
    config.validate()?;
    let dir = PathBuf::from(&config.out_dir);
    ensure_dir(&dir)?;
    let mut manifest = RunManifest::new("mub-verify", config);
    let mut systems = Vec::new();
    let mut all_pass = true;

    let check = |sys: &MubSystem, label: String, dir: &Path| -> Result<serde_json::Value> {
        let report = verify_unbiasedness(sys, tol::UNBIASED);
        let export = dir.join(format!("mub_{label}.json"));
        write_text(&export, &serde_json::to_string(&sys.to_json())?)?;
        Ok(json!({
            "system": label,
            "d": sys.dim(),
            "max_overlap_deviation": report.max_overlap_deviation,
            "max_orthonormality_deviation": report.max_orthonormality_deviation,
            "pass": report.pass,
            "export": export.display().to_string(),
        }))
    };

    for &d in &config.mub.primes {
        let sys = build_prime_mub(d)?;
        let entry = check(&sys, format!("prime_d{d}"), &dir)?;
        all_pass &= entry["pass"].as_bool().unwrap_or(false);
        systems.push(entry);
    }
    for n in 1..=config.mub.n_max {
        let sys = build_qubit_mub(n)?;
        let entry = check(&sys, format!("qubit_n{n}"), &dir)?;
        all_pass &= entry["pass"].as_bool().unwrap_or(false);
        systems.push(entry);
    }

    let report_path = dir.join("mub_verify_report.json");
    write_text(
        &report_path,
        &serde_json::to_string_pretty(&json!({
            "pass": all_pass,
            "tolerance": tol::UNBIASED,
            "systems": systems,
            "config_hash": config.hash(),
        }))?,
    )?;
    manifest.outputs.push(report_path.display().to_string());
    manifest.finish(&dir)?;
    Ok(MubVerifyOutcome {
        pass: all_pass,
        systems,
        report_path: report_path.display().to_string(),
    })
}

// ---------------------------------------------------------------------
// width subcommands
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthSub {
    Compare,
    Dominance,
    Octahedron,
    Radial,
    Gap,
}

impl WidthSub {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "compare" => Ok(WidthSub::Compare),
            "dominance" => Ok(WidthSub::Dominance),
            "octahedron" => Ok(WidthSub::Octahedron),
            "radial" => Ok(WidthSub::Radial),
            "gap" => Ok(WidthSub::Gap),
            other => Err(Error::Config(format!("unknown width subcommand `{other}`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            WidthSub::Compare => "compare",
            WidthSub::Dominance => "dominance",
            WidthSub::Octahedron => "octahedron",
            WidthSub::Radial => "radial",
            WidthSub::Gap => "gap",
        }
    }
}

fn mub_for_dim(d: usize) -> Result<Ensemble> {
    let sys = match d {
        2 | 3 | 5 | 7 => build_prime_mub(d)?,
        4 => build_qubit_mub(2)?,
        8 => build_qubit_mub(3)?,
        16 => build_qubit_mub(4)?,
        other => {
            return Err(Error::UnsupportedDimension(
                other,
                "complete MUB systems are built for primes <= 31 and d = 2^n, n <= 4",
            ))
        }
    };
    Ok(Ensemble::from_mub(&sys))
}

/// One width subcommand run; `pass` encodes the invariant suite.
pub fn cmd_width(sub: WidthSub, config: &ExperimentConfig) -> Result<(bool, serde_json::Value)> {
    config.validate()?;
    let dir = PathBuf::from(&config.out_dir);
    ensure_dir(&dir)?;
    let mut manifest = RunManifest::new(&format!("width-{}", sub.as_str()), config);
    let wc = &config.width;
    let base = SeededRng::new(config.master_seed, STREAM_WIDTH);

    let (pass, report) = match sub {
        WidthSub::Compare => {
            let mut per_dim = Vec::new();
            let mut all_pass = true;
            let mut csv = String::from("d,union,w_union,w_union_stderr,w_mub,w_mub_stderr,delta,delta_stderr,z\n");
            for &d in &wc.dims {
                let mub = mub_for_dim(d)?;
                let tasks: Vec<usize> = (0..wc.n_unions).collect();
                let outcomes = run_parallel(&tasks, config.workers, |_, &k| -> Result<_> {
                    let mut gen_rng = base.substream(d as u64).substream(2 * k as u64);
                    let union = crate::mub::random_basis_union(d, &mut gen_rng)?;
                    let ens = Ensemble::from_union(&union);
                    let mut mc_rng = base.substream(d as u64).substream(2 * k as u64 + 1);
                    paired_width(&ens, &mub, wc.n_samples, &mut mc_rng)
                });
                let mut violations = 0usize;
                let mut worst_z = f64::NEG_INFINITY;
                for (k, out) in outcomes.into_iter().enumerate() {
                    let p = out?;
                    let z = p.delta.mean / p.delta.stderr;
                    worst_z = worst_z.max(z);
                    if z > tol::MC_SIGMA {
                        violations += 1;
                    }
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{}\n",
                        d, k, p.w_a.mean, p.w_a.stderr, p.w_b.mean, p.w_b.stderr,
                        p.delta.mean, p.delta.stderr, z
                    ));
                }
                all_pass &= violations == 0;
                per_dim.push(json!({
                    "d": d,
                    "n_unions": wc.n_unions,
                    "n_samples": wc.n_samples,
                    "violations": violations,
                    "worst_z": worst_z,
                }));
            }
            let csv_path = dir.join("width_compare.csv");
            write_text(&csv_path, &csv)?;
            manifest.outputs.push(csv_path.display().to_string());
            (all_pass, json!({ "per_dim": per_dim }))
        }
        WidthSub::Dominance => {
            let grid: Vec<f64> = {
                let steps = (wc.grid_max / wc.grid_step).round() as usize;
                (0..=steps).map(|i| i as f64 * wc.grid_step).collect()
            };
            let mut per_dim = Vec::new();
            let mut all_pass = true;
            for &d in &wc.dims {
                let mub = mub_for_dim(d)?;
                let mut mub_rng = base.substream(1000 + d as u64);
                let curve_m = max_cdf(&mub, &grid, wc.n_samples, &mut mub_rng)?;
                write_curve_csv(&dir.join(format!("width_dominance_d{d}_mub.csv")), &curve_m)?;
                let tasks: Vec<usize> = (0..wc.n_dominance_unions).collect();
                let reports = run_parallel(&tasks, config.workers, |_, &k| -> Result<_> {
                    let mut gen_rng = base.substream(2000 + d as u64).substream(2 * k as u64);
                    let union = crate::mub::random_basis_union(d, &mut gen_rng)?;
                    let ens = Ensemble::from_union(&union);
                    let mut mc_rng = base.substream(2000 + d as u64).substream(2 * k as u64 + 1);
                    let curve_s = max_cdf(&ens, &grid, wc.n_samples, &mut mc_rng)?;
                    Ok((k, curve_s))
                });
                let mut failures = 0usize;
                for r in reports {
                    let (k, curve_s) = r?;
                    write_curve_csv(
                        &dir.join(format!("width_dominance_d{d}_union{k}.csv")),
                        &curve_s,
                    )?;
                    let check = dominance_check(&curve_s, &curve_m, None)?;
                    if !check.pass {
                        failures += 1;
                    }
                }
                all_pass &= failures == 0;
                per_dim.push(json!({
                    "d": d,
                    "n_unions": wc.n_dominance_unions,
                    "failures": failures,
                }));
            }
            (all_pass, json!({ "per_dim": per_dim, "grid_step": wc.grid_step }))
        }
        WidthSub::Octahedron => {
            let oct_base = base.substream(3000);
            let tasks: Vec<usize> = (0..wc.octahedron_ensembles).collect();
            let outcomes = run_parallel(&tasks, config.workers, |_, &trial| {
                octahedron_one(&oct_base, trial, wc.octahedron_samples)
            });
            let mut violations = 0usize;
            let mut worst_z = f64::NEG_INFINITY;
            let mut mub_width = None;
            for out in outcomes {
                let p = out?;
                let z = p.delta.mean / p.delta.stderr;
                worst_z = worst_z.max(z);
                if z > tol::MC_SIGMA {
                    violations += 1;
                }
                mub_width.get_or_insert(p.w_b);
            }
            (
                violations == 0,
                json!({
                    "n_ensembles": wc.octahedron_ensembles,
                    "n_samples": wc.octahedron_samples,
                    "violations": violations,
                    "worst_z": worst_z,
                    "mub_width": mub_width,
                }),
            )
        }
        WidthSub::Radial => {
            let mub = mub_for_dim(2)?;
            let mut union_rng = base.substream(4000);
            let union = crate::mub::random_basis_union(2, &mut union_rng)?;
            let other = Ensemble::from_union(&union);
            let specs = [
                RadialSpec::Constant(2.0),
                RadialSpec::HalfNormal,
                RadialSpec::Uniform01,
            ];
            let mut rows = Vec::new();
            let mut all_pass = true;
            for (ei, ens) in [&mub, &other].into_iter().enumerate() {
                for (si, spec) in specs.iter().enumerate() {
                    let mut rng = base.substream(5000 + (ei * 10 + si) as u64);
                    let rep = radial_width(ens, *spec, wc.n_samples, &mut rng)?;
                    all_pass &= rep.pass;
                    rows.push(json!({
                        "ensemble": ens.descriptor(),
                        "radial": format!("{spec:?}"),
                        "lhs": rep.lhs,
                        "rhs": rep.rhs,
                        "pass": rep.pass,
                    }));
                }
            }
            (all_pass, json!({ "cases": rows }))
        }
        WidthSub::Gap => {
            let mut rows = Vec::new();
            let mut gaps = Vec::new();
            let mut all_pass = true;
            for n in 1..=4u32 {
                let mut block_rng = base.substream(6000 + n as u64);
                let gap = asymptotic_gap(n, wc.gap_samples, &mut block_rng)?;
                let ens = Ensemble::from_mub(&build_qubit_mub(n)?)
                ;
                let mut dense_rng = base.substream(6100 + n as u64);
                let dense = estimate_width(&ens, wc.gap_dense_samples, &mut dense_rng)?;
                let joint =
                    (gap.w_m_hat.stderr.powi(2) + dense.estimate.stderr.powi(2)).sqrt();
                let samplers_agree =
                    (gap.w_m_hat.mean - dense.estimate.mean).abs() <= tol::MC_SIGMA * joint;
                let positive = gap.gap.mean > -tol::MC_SIGMA * gap.gap.stderr;
                all_pass &= samplers_agree && positive;
                gaps.push(gap.gap.mean);
                rows.push(json!({
                    "n_qubits": n,
                    "m_n_hat": gap.m_n_hat,
                    "w_m_block": gap.w_m_hat,
                    "w_m_dense": dense.estimate,
                    "gap": gap.gap,
                    "reference_sqrt_logd_over_d": gap.reference,
                    "samplers_agree": samplers_agree,
                }));
            }
            let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
            all_pass &= decreasing;
            (
                all_pass,
                json!({ "per_n": rows, "gap_strictly_decreasing": decreasing }),
            )
        }
    };

    let mut body = report;
    body["pass"] = json!(pass);
    body["config_hash"] = json!(config.hash());
    let path = dir.join(format!("width_{}_report.json", sub.as_str()));
    write_text(&path, &serde_json::to_string_pretty(&body)?)?;
    manifest.outputs.push(path.display().to_string());
    manifest.finish(&dir)?;
    Ok((pass, body))
}

fn write_curve_csv(path: &Path, curve: &CdfCurve) -> Result<()> {
    let mut body = String::from("t,prob,stderr\n");
    for i in 0..curve.grid.len() {
        body.push_str(&format!(
            "{},{},{}\n",
            curve.grid[i],
            curve.probs[i],
            curve.stderr(i)
        ));
    }
    write_text(path, &body)
}

// ---------------------------------------------------------------------
// qaoa-bench
// ---------------------------------------------------------------------

const QAOA_HEADER: &str = "family,instance_seed,n,p,method,decoded_ratio,postselected_ratio,energy,runtime_s,n_cost_evals,final_family_r,config_hash";

fn qaoa_row(rec: &MethodRecord, hash: &str) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{:.6},{},{},{}\n",
        rec.family.as_str(),
        rec.instance_seed,
        rec.n_qubits,
        rec.p,
        rec.method.as_str(),
        rec.metrics.decoded_ratio,
        rec.metrics.postselected_expected_ratio,
        rec.metrics.energy,
        rec.runtime_seconds,
        rec.n_cost_evals,
        rec.final_family_r.map_or(String::new(), |r| r.to_string()),
        hash
    )
}

/// A minimal row view shared by the benchmark writer and the report
/// reader.
#[derive(Debug, Clone)]
pub struct QaoaRow {
    pub family: String,
    pub instance_seed: u64,
    pub n: u32,
    pub p: usize,
    pub method: String,
    pub decoded_ratio: f64,
    pub postselected_ratio: f64,
    pub energy: f64,
    pub runtime_s: f64,
    pub n_cost_evals: usize,
    pub final_family_r: Option<u64>,
    pub config_hash: String,
}

pub fn parse_qaoa_csv(text: &str) -> Result<Vec<QaoaRow>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Schema("empty results file".into()))?;
    if header != QAOA_HEADER {
        return Err(Error::Schema(format!(
            "unexpected QAOA header; missing columns relative to `{QAOA_HEADER}`"
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(Error::Schema(format!("row {i} has {} fields", f.len())));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Schema(format!("bad float `{s}`")))
        };
        rows.push(QaoaRow {
            family: f[0].to_string(),
            instance_seed: f[1].parse().map_err(|_| Error::Schema("bad seed".into()))?,
            n: f[2].parse().map_err(|_| Error::Schema("bad n".into()))?,
            p: f[3].parse().map_err(|_| Error::Schema("bad p".into()))?,
            method: f[4].to_string(),
            decoded_ratio: parse_f(f[5])?,
            postselected_ratio: parse_f(f[6])?,
            energy: parse_f(f[7])?,
            runtime_s: parse_f(f[8])?,
            n_cost_evals: f[9].parse().map_err(|_| Error::Schema("bad evals".into()))?,
            final_family_r: if f[10].is_empty() {
                None
            } else {
                Some(f[10].parse().map_err(|_| Error::Schema("bad r".into()))?)
            },
            config_hash: f[11].to_string(),
        });
    }
    Ok(rows)
}

/// Bootstrap percentile interval of the mean at the given confidence.
pub fn bootstrap_mean_ci(
    values: &[f64],
    confidence: f64,
    resamples: usize,
    rng: &mut SeededRng,
) -> (f64, f64) {
    assert!(!values.is_empty());
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| {
            let mut acc = 0.0;
            for _ in 0..values.len() {
                acc += values[rng.below(values.len() as u64) as usize];
            }
            acc / values.len() as f64
        })
        .collect();
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = (1.0 - confidence) / 2.0;
    let lo = means[((resamples as f64 * alpha) as usize).min(resamples - 1)];
    let hi = means[((resamples as f64 * (1.0 - alpha)) as usize).min(resamples - 1)];
    (lo, hi)
}

#[derive(Debug, Clone, Serialize)]
pub struct QaoaBenchOutcome {
    pub comparison: PairedComparison,
    pub results_path: String,
    pub summary_path: String,
    pub mis_mean_delta: Option<f64>,
    pub mis_red_flag: Option<bool>,
}

/// Runs standard and adaptive MUB-XRot QAOA over the grid, paired per
/// (family, size, depth, seed) cell; resumable from a partial results
/// file with a matching config hash.
pub fn cmd_qaoa_bench(config: &ExperimentConfig) -> Result<QaoaBenchOutcome> {
    config.validate()?;
    let dir = PathBuf::from(&config.out_dir);
    ensure_dir(&dir)?;
    let mut manifest = RunManifest::new("qaoa-bench", config);
    let hash = config.hash();
    let grid = config.effective_qaoa_grid();
    let run_cfg = config.qaoa_run_config();
    let families = config.parsed_families();

    // Cells in deterministic order.
    let mut cells = Vec::new();
    for &family in &families {
        for &n in &grid.sizes {
            for &p in &grid.depths {
                for s in 0..grid.seeds {
                    cells.push((family, n, p, grid.seed_start + s));
                }
            }
        }
    }

    // Resume: keep rows from a previous identical-config run.
    let results_path = dir.join("qaoa_results.csv");
    let mut done: BTreeMap<String, Vec<String>> = BTreeMap::new();
    if results_path.exists() {
        if let Ok(existing) = std::fs::read_to_string(&results_path) {
            if let Ok(rows) = parse_qaoa_csv(&existing) {
                if rows.iter().all(|r| r.config_hash == hash) {
                    for (row, line) in rows.iter().zip(existing.lines().skip(1)) {
                        let key = format!("{}_{}_{}_{}", row.family, row.n, row.p, row.instance_seed);
                        done.entry(key).or_default().push(format!("{line}\n"));
                    }
                    done.retain(|_, v| v.len() == 2);
                }
            }
        }
    }

    let pending: Vec<_> = cells
        .iter()
        .filter(|(f, n, p, s)| !done.contains_key(&format!("{}_{}_{}_{}", f.as_str(), n, p, s)))
        .cloned()
        .collect();

    let master = config.master_seed;
    let outcomes = run_parallel(&pending, config.workers, |_, &(family, n, p, seed)| {
        let inst = gen_instance(family, n, seed)?;
        let enc = encode(&inst)?;
        let method_seed = task_seed(
            master,
            &[family as u64, n as u64, p as u64, seed],
        );
        let std_rec = run_standard(&enc, p, method_seed, &run_cfg)?;
        let adp_rec = run_adaptive_mub_xrot(&enc, p, method_seed, &run_cfg)?;
        Ok::<_, Error>((std_rec, adp_rec, inst.to_json()))
    });

    let mut std_records = Vec::new();
    let mut adp_records = Vec::new();
    let mut instances = Vec::new();
    for out in outcomes {
        let (s, a, inst) = out?;
        let key = format!("{}_{}_{}_{}", s.family.as_str(), s.n_qubits, s.p, s.instance_seed);
        done.insert(key, vec![qaoa_row(&s, &hash), qaoa_row(&a, &hash)]);
        std_records.push(s);
        adp_records.push(a);
        instances.push(inst);
    }

    // Rewrite the whole file in cell order so reruns are byte-stable.
    let mut body = String::from(QAOA_HEADER);
    body.push('\n');
    for (family, n, p, s) in &cells {
        let key = format!("{}_{}_{}_{}", family.as_str(), n, p, s);
        if let Some(rows) = done.get(&key) {
            for r in rows {
                body.push_str(r);
            }
        }
    }
    write_text(&results_path, &body)?;

    let inst_path = dir.join("qaoa_instances.jsonl");
    let mut inst_body = String::new();
    for i in &instances {
        inst_body.push_str(&serde_json::to_string(i)?);
        inst_body.push('\n');
    }
    write_text(&inst_path, &inst_body)?;

    // Paired statistics recomputed from the full row set on disk so that
    // resumed runs aggregate everything.
    let all_rows = parse_qaoa_csv(&std::fs::read_to_string(&results_path)?)?;
    let (all_std, all_adp) = rows_to_records(&all_rows)?;
    let comparison = paired_stats(&all_std, &all_adp)?;

    // Per-family aggregation and the MIS directional check.
    let mut per_family = serde_json::Map::new();
    let mut mis_mean_delta = None;
    let mut mis_red_flag = None;
    let mut mis_ci = None;
    for family in &families {
        let fs: Vec<MethodRecord> = all_std
            .iter()
            .filter(|r| r.family == *family)
            .cloned()
            .collect();
        let fa: Vec<MethodRecord> = all_adp
            .iter()
            .filter(|r| r.family == *family)
            .cloned()
            .collect();
        if fs.is_empty() {
            continue;
        }
        let cmp = paired_stats(&fs, &fa)?;
        if *family == ProblemFamily::Mis {
            let deltas: Vec<f64> = cmp.deltas.iter().map(|(_, d)| *d).collect();
            let mut boot_rng = SeededRng::new(config.master_seed, STREAM_BOOTSTRAP);
            let (lo, hi) = bootstrap_mean_ci(&deltas, 0.90, 2000, &mut boot_rng);
            mis_mean_delta = Some(cmp.mean_delta);
            mis_red_flag = Some(lo <= 0.0);
            mis_ci = Some((lo, hi));
        }
        per_family.insert(
            family.as_str().to_string(),
            json!({
                "cases": cmp.n_cases,
                "mean_delta": cmp.mean_delta,
                "win": cmp.wins, "tie": cmp.ties, "loss": cmp.losses,
                "non_worse_rate": cmp.non_worse_rate,
                "solved_rate_standard": cmp.solved_rate_baseline,
                "solved_rate_adaptive": cmp.solved_rate_adaptive,
            }),
        );
    }

    let summary = json!({
        "paired_cases": comparison.n_cases,
        "win": comparison.wins,
        "tie": comparison.ties,
        "loss": comparison.losses,
        "non_worse_rate": comparison.non_worse_rate,
        "win_rate_among_non_ties": comparison.win_rate_non_ties,
        "mean_decoded_ratio_delta": comparison.mean_delta,
        "solved_rate_standard": comparison.solved_rate_baseline,
        "solved_rate_adaptive": comparison.solved_rate_adaptive,
        "median_runtime_ratio": comparison.median_runtime_ratio,
        "tie_band": tol::TIE_BAND,
        "per_family": per_family,
        "mis_directional": mis_mean_delta.map(|m| json!({
            "mean_delta": m,
            "ci90_low": mis_ci.unwrap().0,
            "ci90_high": mis_ci.unwrap().1,
            "red_flag": mis_red_flag.unwrap(),
        })),
        "weight_law": config.weights.law,
        "config_hash": hash,
    });
    let summary_path = dir.join("qaoa_summary.json");
    write_text(&summary_path, &serde_json::to_string_pretty(&summary)?)?;

    manifest.outputs = vec![
        results_path.display().to_string(),
        inst_path.display().to_string(),
        summary_path.display().to_string(),
    ];
    for (family, n, p, s) in &cells {
        manifest
            .task_seeds
            .push((format!("{}_{}_{}_{}", family.as_str(), n, p, s), *s, 0));
    }
    manifest.finish(&dir)?;

    Ok(QaoaBenchOutcome {
        comparison,
        results_path: results_path.display().to_string(),
        summary_path: summary_path.display().to_string(),
        mis_mean_delta,
        mis_red_flag,
    })
}

/// Rebuilds minimal method records from CSV rows, split by method tag.
fn rows_to_records(rows: &[QaoaRow]) -> Result<(Vec<MethodRecord>, Vec<MethodRecord>)> {
    let mut std_records = Vec::new();
    let mut adp_records = Vec::new();
    for row in rows {
        let family = ProblemFamily::parse(&row.family)?;
        let rec = MethodRecord {
            method: if row.method == "standard" {
                MethodTag::Standard
            } else {
                MethodTag::AdaptiveMubXrot
            },
            instance_key: format!("{}_n{}_s{}", row.family, row.n, row.instance_seed),
            family,
            instance_seed: row.instance_seed,
            n_qubits: row.n,
            p: row.p,
            seed: row.instance_seed,
            metrics: crate::problems::DecodeMetrics {
                decoded_ratio: row.decoded_ratio,
                postselected_expected_ratio: row.postselected_ratio,
                energy: row.energy,
                decoded_bitstring: 0,
            },
            runtime_seconds: row.runtime_s,
            family_trace: Vec::new(),
            n_cost_evals: row.n_cost_evals,
            final_family_r: row.final_family_r,
        };
        if rec.method == MethodTag::Standard {
            std_records.push(rec);
        } else {
            adp_records.push(rec);
        }
    }
    Ok((std_records, adp_records))
}

// ---------------------------------------------------------------------
// qrao-bench
// ---------------------------------------------------------------------

const QRAO_HEADER: &str =
    "graph_seed,n,p,strategy,alpha_r,alpha_c,family_evals,chosen_r,chosen_b0,runtime_s,config_hash";

fn qrao_row(seed: u64, n: usize, p: usize, rec: &StrategyRecord, hash: &str) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{:.6},{}\n",
        seed,
        n,
        p,
        rec.strategy.as_str(),
        rec.alpha_r,
        rec.alpha_c,
        rec.family_evals,
        rec.chosen_r.map_or(String::new(), |r| r.to_string()),
        rec.chosen_b0.map_or(String::new(), |b| b.to_string()),
        rec.runtime_seconds,
        hash
    )
}

#[derive(Debug, Clone)]
pub struct QraoRow {
    pub graph_seed: u64,
    pub n: usize,
    pub p: usize,
    pub strategy: String,
    pub alpha_r: f64,
    pub alpha_c: f64,
    pub family_evals: usize,
    pub chosen_r: Option<u64>,
    pub chosen_b0: Option<u64>,
    pub runtime_s: f64,
    pub config_hash: String,
}

pub fn parse_qrao_csv(text: &str) -> Result<Vec<QraoRow>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Schema("empty results file".into()))?;
    if header != QRAO_HEADER {
        return Err(Error::Schema(format!(
            "unexpected QRAO header; missing columns relative to `{QRAO_HEADER}`"
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(Error::Schema(format!("row {i} has {} fields", f.len())));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Schema(format!("bad float `{s}`")))
        };
        let parse_opt = |s: &str| -> Result<Option<u64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::Schema("bad index".into()))
            }
        };
        rows.push(QraoRow {
            graph_seed: f[0].parse().map_err(|_| Error::Schema("bad seed".into()))?,
            n: f[1].parse().map_err(|_| Error::Schema("bad n".into()))?,
            p: f[2].parse().map_err(|_| Error::Schema("bad p".into()))?,
            strategy: f[3].to_string(),
            alpha_r: parse_f(f[4])?,
            alpha_c: parse_f(f[5])?,
            family_evals: f[6].parse().map_err(|_| Error::Schema("bad evals".into()))?,
            chosen_r: parse_opt(f[7])?,
            chosen_b0: parse_opt(f[8])?,
            runtime_s: parse_f(f[9])?,
            config_hash: f[10].to_string(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct QraoBenchOutcome {
    pub results_path: String,
    pub summary_path: String,
    pub cells: usize,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub mean_delta_vs_x: f64,
}

/// Runs the headline QRAO strategies (plus the exhaustive oracle behind
/// the flag) on unweighted ER MaxCut cells.
pub fn cmd_qrao_bench(config: &ExperimentConfig) -> Result<QraoBenchOutcome> {
    config.validate()?;
    let dir = PathBuf::from(&config.out_dir);
    ensure_dir(&dir)?;
    let mut manifest = RunManifest::new("qrao-bench", config);
    let hash = config.hash();
    let grid = config.effective_qrao_grid();
    let qcfg = config.qrao_config();

    let mut cells = Vec::new();
    for &n in &grid.sizes {
        for &p in &grid.depths {
            for s in 0..grid.seeds {
                cells.push((n, p, grid.seed_start + s));
            }
        }
    }

    let include_exhaustive = config.exhaustive;
    let master = config.master_seed;
    let outcomes = run_parallel(&cells, config.workers, |_, &(n, p, seed)| {
        let graph = gen_er_graph(n, 0.5, seed, false);
        let method_seed = task_seed(master, &[n as u64, p as u64, seed]);
        strategy_suite(&graph, p, method_seed, &qcfg, include_exhaustive)
    });

    let mut body = String::from(QRAO_HEADER);
    body.push('\n');
    let mut suites: Vec<(usize, usize, u64, SuiteResult)> = Vec::new();
    for ((n, p, seed), out) in cells.iter().zip(outcomes) {
        let suite = out?;
        for rec in &suite.records {
            body.push_str(&qrao_row(*seed, *n, *p, rec, &hash));
        }
        suites.push((*n, *p, *seed, suite));
    }
    let results_path = dir.join("qrao_results.csv");
    write_text(&results_path, &body)?;

    // Headline paired comparison: bit-flip multi-start 2POLE vs X.
    let (mut wins, mut ties, mut losses) = (0usize, 0usize, 0usize);
    let mut deltas = Vec::new();
    let mut alpha_bf = Vec::new();
    let (mut solved_x, mut solved_bf) = (0usize, 0usize);
    let mut delta_vs_r1 = Vec::new();
    let mut delta_vs_2pole = Vec::new();
    let mut evals_by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut exhaustive_by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut decomposition = Vec::new();
    for (n, _p, _seed, suite) in &suites {
        let find = |t: StrategyTag| suite.records.iter().find(|r| r.strategy == t);
        let x = find(StrategyTag::XVariational).expect("headline");
        let bf = find(StrategyTag::Bitflip2Pole).expect("headline");
        let r1 = find(StrategyTag::MubR1B0).expect("headline");
        let d = bf.alpha_r - x.alpha_r;
        if d > tol::TIE_BAND {
            wins += 1;
        } else if d < -tol::TIE_BAND {
            losses += 1;
        } else {
            ties += 1;
        }
        deltas.push(d);
        alpha_bf.push(bf.alpha_r);
        if x.alpha_c >= tol::SOLVED {
            solved_x += 1;
        }
        if bf.alpha_c >= tol::SOLVED {
            solved_bf += 1;
        }
        delta_vs_r1.push(bf.alpha_r - r1.alpha_r);
        if let Some((pre, poles, local)) = suite.gain_decomposition {
            decomposition.push((pre, poles, local));
            delta_vs_2pole.push(local);
        }
        evals_by_n.entry(*n).or_default().push(bf.family_evals as f64);
        if let Some(ex) = find(StrategyTag::ExhaustiveOracle) {
            exhaustive_by_n.entry(*n).or_default().push(ex.family_evals as f64);
        }
    }
    let n_cells = suites.len();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let mean_delta = mean(&deltas);
    let summary = json!({
        "method_evaluations": n_cells * suites.first().map_or(0, |(_, _, _, s)| s.records.len()),
        "paired_cells": n_cells,
        "win_vs_x": wins,
        "tie_vs_x": ties,
        "loss_vs_x": losses,
        "non_worse_rate_vs_x": (wins + ties) as f64 / n_cells.max(1) as f64,
        "mean_delta_alpha_r_vs_x": mean_delta,
        "mean_alpha_r_bitflip": mean(&alpha_bf),
        "mean_delta_alpha_r_vs_mub_r1": mean(&delta_vs_r1),
        "mean_delta_alpha_r_vs_two_pole": mean(&delta_vs_2pole),
        "solved_rate_x": solved_x as f64 / n_cells.max(1) as f64,
        "solved_rate_bitflip": solved_bf as f64 / n_cells.max(1) as f64,
        "solved_metric": "alpha_c",
        "tie_band": tol::TIE_BAND,
        "mean_family_evals_bitflip_by_n": evals_by_n
            .iter()
            .map(|(n, v)| (n.to_string(), mean(v)))
            .collect::<BTreeMap<_, _>>(),
        "mean_family_evals_exhaustive_by_n": exhaustive_by_n
            .iter()
            .map(|(n, v)| (n.to_string(), mean(v)))
            .collect::<BTreeMap<_, _>>(),
        "gain_decomposition": if decomposition.is_empty() { serde_json::Value::Null } else {
            json!({
                "prescreen": mean(&decomposition.iter().map(|d| d.0).collect::<Vec<_>>()),
                "poles": mean(&decomposition.iter().map(|d| d.1).collect::<Vec<_>>()),
                "local_search": mean(&decomposition.iter().map(|d| d.2).collect::<Vec<_>>()),
            })
        },
        "weight_law": config.weights.law,
        "config_hash": hash,
    });
    let summary_path = dir.join("qrao_summary.json");
    write_text(&summary_path, &serde_json::to_string_pretty(&summary)?)?;

    manifest.outputs = vec![
        results_path.display().to_string(),
        summary_path.display().to_string(),
    ];
    manifest.finish(&dir)?;

    Ok(QraoBenchOutcome {
        results_path: results_path.display().to_string(),
        summary_path: summary_path.display().to_string(),
        cells: n_cells,
        wins,
        ties,
        losses,
        mean_delta_vs_x: mean_delta,
    })
}

// ---------------------------------------------------------------------
// report
// ---------------------------------------------------------------------

/// Recomputes summary tables and per-facet plot CSVs from the raw result
/// files alone. Rejects mixed-config aggregation.
pub fn cmd_report(results_dir: &Path) -> Result<serde_json::Value> {
    let mut out = serde_json::Map::new();

    let qaoa_path = results_dir.join("qaoa_results.csv");
    if qaoa_path.exists() {
        let rows = parse_qaoa_csv(&std::fs::read_to_string(&qaoa_path)?)?;
        let hashes: std::collections::BTreeSet<&str> =
            rows.iter().map(|r| r.config_hash.as_str()).collect();
        if hashes.len() > 1 {
            return Err(Error::Schema(format!(
                "mixed config hashes in {}: {hashes:?}",
                qaoa_path.display()
            )));
        }
        let (std_records, adp_records) = rows_to_records(&rows)?;
        let cmp = paired_stats(&std_records, &adp_records)?;
        out.insert(
            "qaoa".into(),
            json!({
                "paired_cases": cmp.n_cases,
                "win": cmp.wins, "tie": cmp.ties, "loss": cmp.losses,
                "non_worse_rate": cmp.non_worse_rate,
                "mean_decoded_ratio_delta": cmp.mean_delta,
                "solved_rate_standard": cmp.solved_rate_baseline,
                "solved_rate_adaptive": cmp.solved_rate_adaptive,
                "median_runtime_ratio": cmp.median_runtime_ratio,
            }),
        );

        // Facet CSV: family × n × p × method.
        let mut facets: BTreeMap<(String, u32, usize, String), Vec<&QaoaRow>> = BTreeMap::new();
        for r in &rows {
            facets
                .entry((r.family.clone(), r.n, r.p, r.method.clone()))
                .or_default()
                .push(r);
        }
        let mut facet_csv =
            String::from("family,n,p,method,cases,mean_decoded,mean_postselected,solved_rate\n");
        for ((family, n, p, method), members) in &facets {
            let k = members.len() as f64;
            let mean_dec = members.iter().map(|r| r.decoded_ratio).sum::<f64>() / k;
            let mean_post = members.iter().map(|r| r.postselected_ratio).sum::<f64>() / k;
            let solved = members
                .iter()
                .filter(|r| r.decoded_ratio >= tol::SOLVED)
                .count() as f64
                / k;
            facet_csv.push_str(&format!(
                "{family},{n},{p},{method},{},{mean_dec},{mean_post},{solved}\n",
                members.len()
            ));
        }
        write_text(&results_dir.join("qaoa_facets.csv"), &facet_csv)?;
    }

    let qrao_path = results_dir.join("qrao_results.csv");
    if qrao_path.exists() {
        let rows = parse_qrao_csv(&std::fs::read_to_string(&qrao_path)?)?;
        let hashes: std::collections::BTreeSet<&str> =
            rows.iter().map(|r| r.config_hash.as_str()).collect();
        if hashes.len() > 1 {
            return Err(Error::Schema(format!(
                "mixed config hashes in {}: {hashes:?}",
                qrao_path.display()
            )));
        }
        // Pair bitflip vs x per (seed, n, p) cell.
        let mut cells: BTreeMap<(u64, usize, usize), (Option<f64>, Option<f64>)> = BTreeMap::new();
        for r in &rows {
            let e = cells.entry((r.graph_seed, r.n, r.p)).or_default();
            if r.strategy == "x_variational" {
                e.0 = Some(r.alpha_r);
            } else if r.strategy == "bitflip_2pole" {
                e.1 = Some(r.alpha_r);
            }
        }
        let (mut wins, mut ties, mut losses) = (0usize, 0usize, 0usize);
        let mut deltas = Vec::new();
        for (_, (x, bf)) in &cells {
            if let (Some(x), Some(bf)) = (x, bf) {
                let d = bf - x;
                deltas.push(d);
                if d > tol::TIE_BAND {
                    wins += 1;
                } else if d < -tol::TIE_BAND {
                    losses += 1;
                } else {
                    ties += 1;
                }
            }
        }
        out.insert(
            "qrao".into(),
            json!({
                "paired_cells": deltas.len(),
                "win_vs_x": wins, "tie_vs_x": ties, "loss_vs_x": losses,
                "mean_delta_alpha_r_vs_x": deltas.iter().sum::<f64>() / deltas.len().max(1) as f64,
            }),
        );

        let mut facets: BTreeMap<(usize, usize, String), Vec<&QraoRow>> = BTreeMap::new();
        for r in &rows {
            facets
                .entry((r.n, r.p, r.strategy.clone()))
                .or_default()
                .push(r);
        }
        let mut facet_csv = String::from(
            "n,p,strategy,cases,mean_alpha_r,mean_alpha_c,solved_rate,mean_family_evals\n",
        );
        for ((n, p, strategy), members) in &facets {
            let k = members.len() as f64;
            facet_csv.push_str(&format!(
                "{n},{p},{strategy},{},{},{},{},{}\n",
                members.len(),
                members.iter().map(|r| r.alpha_r).sum::<f64>() / k,
                members.iter().map(|r| r.alpha_c).sum::<f64>() / k,
                members.iter().filter(|r| r.alpha_c >= tol::SOLVED).count() as f64 / k,
                members.iter().map(|r| r.family_evals as f64).sum::<f64>() / k,
            ));
        }
        write_text(&results_dir.join("qrao_facets.csv"), &facet_csv)?;
    }

    if out.is_empty() {
        return Err(Error::Schema(format!(
            "no result files found under {}",
            results_dir.display()
        )));
    }
    let value = serde_json::Value::Object(out);
    write_text(
        &results_dir.join("report_summary.json"),
        &serde_json::to_string_pretty(&value)?,
    )?;
    Ok(value)
}

/// Strips wall-clock columns from a results CSV body for byte
/// comparison between reruns.
pub fn strip_runtime_column(csv: &str) -> String {
    let mut lines = csv.lines();
    let header = match lines.next() {
        Some(h) => h,
        None => return String::new(),
    };
    let cols: Vec<&str> = header.split(',').collect();
    let runtime_idx: Vec<usize> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == "runtime_s")
        .map(|(i, _)| i)
        .collect();
    let keep = |fields: &[&str]| -> String {
        fields
            .iter()
            .enumerate()
            .filter(|(i, _)| !runtime_idx.contains(i))
            .map(|(_, f)| *f)
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = keep(&cols);
    out.push('\n');
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        out.push_str(&keep(&fields));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            out_dir: dir.display().to_string(),
            grid: GridConfig {
                sizes: vec![4],
                depths: vec![1],
                seeds: 2,
                seed_start: 0,
            },
            families: vec!["maxcut".into(), "mis".into()],
            optimizer: OptimizerConfig {
                max_evals: 60,
                ..OptimizerConfig::default()
            },
            width: WidthConfig {
                dims: vec![2],
                n_samples: 4_000,
                n_unions: 4,
                n_dominance_unions: 2,
                octahedron_ensembles: 4,
                octahedron_samples: 4_000,
                gap_samples: 20_000,
                gap_dense_samples: 10_000,
                ..WidthConfig::default()
            },
            workers: 2,
            ..ExperimentConfig::default()
        }
    }

    fn tmpdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("mublab_test_{tag}_{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err: std::result::Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"master_seed": 3, "bogus_key": 1}"#);
        assert!(err.is_err());
        let ok: ExperimentConfig = serde_json::from_str(r#"{"master_seed": 3}"#).unwrap();
        assert_eq!(ok.master_seed, 3);
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::default();
        let mut b = ExperimentConfig::default();
        assert_eq!(a.hash(), b.hash());
        b.master_seed += 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn parallel_map_is_order_preserving() {
        let tasks: Vec<usize> = (0..37).collect();
        let out = run_parallel(&tasks, 4, |i, &t| {
            assert_eq!(i, t);
            t * t
        });
        assert_eq!(out, (0..37).map(|x| x * x).collect::<Vec<_>>());
        let single = run_parallel(&tasks, 1, |_, &t| t * t);
        assert_eq!(out, single);
    }

    #[test]
    fn mub_verify_passes_and_exports() {
        let dir = tmpdir("mubverify");
        let mut cfg = small_config(&dir);
        cfg.mub = MubConfig {
            primes: vec![2, 3],
            n_max: 2,
        };
        let out = cmd_mub_verify(&cfg).unwrap();
        assert!(out.pass);
        assert!(dir.join("mub_prime_d2.json").exists());
        assert!(dir.join("mub_verify_report.json").exists());
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn qaoa_bench_writes_deterministic_csv() {
        let dir_a = tmpdir("qaoa_a");
        let dir_b = tmpdir("qaoa_b");
        let out_a = cmd_qaoa_bench(&small_config(&dir_a)).unwrap();
        let _out_b = cmd_qaoa_bench(&small_config(&dir_b)).unwrap();
        // 2 families × 1 size × 1 depth × 2 seeds.
        assert_eq!(out_a.comparison.n_cases, 4);
        let a = std::fs::read_to_string(dir_a.join("qaoa_results.csv")).unwrap();
        let b = std::fs::read_to_string(dir_b.join("qaoa_results.csv")).unwrap();
        assert_ne!(strip_runtime_column(&a), "");
        assert_eq!(strip_runtime_column(&a), strip_runtime_column(&b));

        // Resume path: rerunning over the existing file is a no-op.
        let out_c = cmd_qaoa_bench(&small_config(&dir_a)).unwrap();
        assert_eq!(out_c.comparison.n_cases, 4);
        let c = std::fs::read_to_string(dir_a.join("qaoa_results.csv")).unwrap();
        assert_eq!(a, c, "resume must not recompute finished cells");

        let report = cmd_report(&dir_a).unwrap();
        assert_eq!(report["qaoa"]["paired_cases"], 4);
        assert!(dir_a.join("qaoa_facets.csv").exists());
        let _ = std::fs::remove_dir_all(&dir_a);
        let _ = std::fs::remove_dir_all(&dir_b);
    }

    #[test]
    fn qrao_bench_counts_records() {
        let dir = tmpdir("qrao");
        let mut cfg = small_config(&dir);
        cfg.grid.sizes = vec![6];
        cfg.grid.seeds = 2;
        let out = cmd_qrao_bench(&cfg).unwrap();
        assert_eq!(out.cells, 2);
        let text = std::fs::read_to_string(dir.join("qrao_results.csv")).unwrap();
        let rows = parse_qrao_csv(&text).unwrap();
        assert_eq!(rows.len(), 2 * 3); // three headline strategies
        let report = cmd_report(&dir).unwrap();
        assert_eq!(report["qrao"]["paired_cells"], 2);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn report_rejects_mixed_hashes() {
        let dir = tmpdir("mixed");
        let body = format!(
            "{QAOA_HEADER}\nmaxcut,0,4,1,standard,1,1,-2,0.1,10,,aaaa\nmaxcut,0,4,1,adaptive_mub_xrot,1,1,-2,0.1,10,1,bbbb\n"
        );
        std::fs::write(dir.join("qaoa_results.csv"), body).unwrap();
        assert!(matches!(cmd_report(&dir), Err(Error::Schema(_))));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn strip_runtime_column_removes_only_runtime() {
        let body = "a,runtime_s,b\n1,2.5,3\n";
        assert_eq!(strip_runtime_column(body), "a,b\n1,3\n");
    }

    #[test]
    fn bootstrap_ci_brackets_the_mean() {
        let mut rng = SeededRng::new(5, 0);
        let values: Vec<f64> = (0..200).map(|_| 1.0 + rng.normal() * 0.1).collect();
        let (lo, hi) = bootstrap_mean_ci(&values, 0.90, 1000, &mut rng);
        assert!(lo < hi);
        assert!(lo > 0.9 && hi < 1.1);
    }

    #[test]
    fn width_subcommand_parsing() {
        assert_eq!(WidthSub::parse("compare").unwrap(), WidthSub::Compare);
        assert!(WidthSub::parse("nope").is_err());
    }

    #[test]
    fn full_grids_match_paper_scale() {
        let cfg = ExperimentConfig {
            full: true,
            ..ExperimentConfig::default()
        };
        let qaoa = cfg.effective_qaoa_grid();
        let qaoa_cells = cfg.families.len()
            * qaoa.sizes.len()
            * qaoa.depths.len()
            * qaoa.seeds as usize;
        assert_eq!(qaoa_cells, 1500);
        assert_eq!(
            cfg.families.len() * qaoa.sizes.len() * qaoa.seeds as usize,
            500
        );
        let qrao = cfg.effective_qrao_grid();
        assert_eq!(
            qrao.sizes.len() * qrao.depths.len() * qrao.seeds as usize,
            360
        );

        let desk = ExperimentConfig::default();
        let grid = desk.effective_qaoa_grid();
        assert_eq!(
            desk.families.len() * grid.sizes.len() * grid.depths.len() * grid.seeds as usize,
            100
        );
    }
}
