//! Standard QAOA, the adaptive MUB-XRot warm-start method with family
//! screening, the projected quasi-Newton optimizer behind both, and
//! paired win/tie/loss statistics.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mub::DiagonalPhaseCircuit;
use crate::numcore::SeededRng;
use crate::problems::{decode_metrics, is_solved, DecodeMetrics, EncodedProblem, ProblemFamily};
use crate::simvec::{
    apply_family_circuit, apply_rx_all, evolve_cost, evolve_xmixer, expectation, prepare_basis,
    prepare_plus, probabilities, StateVector,
};
use crate::tol;

const STREAM_STANDARD: u64 = 0x71616f73;
const STREAM_ADAPTIVE: u64 = 0x71616f61;

/// Bounded quasi-Newton optimizer settings.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizerSpec {
    /// Objective-evaluation budget per restart.
    pub max_evals: usize,
    /// Central-difference step.
    pub fd_step: f64,
    pub restarts: usize,
    /// Box bounds per parameter.
    pub bounds: Vec<(f64, f64)>,
    /// Uniform init range per parameter.
    pub init_ranges: Vec<(f64, f64)>,
}

impl OptimizerSpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_evals < 1 {
            return Err(Error::Config("max_evals must be >= 1".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::Config("fd_step must be positive".into()));
        }
        if self.bounds.len() != self.init_ranges.len() {
            return Err(Error::LengthMismatch {
                expected: self.bounds.len(),
                got: self.init_ranges.len(),
            });
        }
        for &(lo, hi) in &self.bounds {
            if lo > hi {
                return Err(Error::Config(format!("bound [{lo}, {hi}] is inverted")));
            }
        }
        Ok(())
    }

    fn clamp(&self, x: &mut [f64]) {
        for (xi, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *xi = xi.clamp(lo, hi);
        }
    }

    fn draw_init(&self, rng: &mut SeededRng) -> Vec<f64> {
        let mut x: Vec<f64> = self
            .init_ranges
            .iter()
            .map(|&(lo, hi)| rng.uniform_range(lo, hi))
            .collect();
        self.clamp(&mut x);
        x
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeOutcome {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub n_evals: usize,
}

/// Projected BFGS with central-difference gradients over box bounds.
///
/// Each restart stops on projected-gradient norm < 1e-6, relative
/// improvement < 1e-10, or its evaluation budget. The reported best is
/// tracked across every objective evaluation, so the result is never
/// worse than the best sampled point.
pub fn minimize(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    spec: &OptimizerSpec,
    rng: &mut SeededRng,
) -> Result<MinimizeOutcome> {
    minimize_with_starts(objective, spec, Vec::new(), rng)
}

/// As [`minimize`], with explicit warm starts consumed before random
/// initialization fills the remaining restarts.
pub fn minimize_with_starts(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    spec: &OptimizerSpec,
    warm_starts: Vec<Vec<f64>>,
    rng: &mut SeededRng,
) -> Result<MinimizeOutcome> {
    spec.validate()?;
    let dim = spec.bounds.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut total_evals = 0usize;
    let mut warm = warm_starts.into_iter();

    for _restart in 0..spec.restarts.max(1) {
        let mut budget = spec.max_evals;
        let mut x = match warm.next() {
            Some(mut w) => {
                spec.clamp(&mut w);
                w
            }
            None => spec.draw_init(rng),
        };

        let mut eval = |pt: &[f64],
                        budget: &mut usize,
                        total: &mut usize,
                        best: &mut Option<(Vec<f64>, f64)>|
         -> Result<f64> {
            let v = objective(pt);
            if !v.is_finite() {
                return Err(Error::NonFiniteObjective { at: pt.to_vec() });
            }
            *budget = budget.saturating_sub(1);
            *total += 1;
            if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                *best = Some((pt.to_vec(), v));
            }
            Ok(v)
        };

        let mut fx = eval(&x, &mut budget, &mut total_evals, &mut best)?;
        // Inverse Hessian approximation.
        let mut b = vec![vec![0.0f64; dim]; dim];
        for (i, row) in b.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let mut pending: Option<(Vec<f64>, Vec<f64>)> = None; // (s, old gradient)
        let mut first_update = true;

        loop {
            if budget < 2 * dim + 1 {
                break;
            }
            // Central differences.
            let mut g = vec![0.0f64; dim];
            for i in 0..dim {
                let mut xp = x.clone();
                xp[i] += spec.fd_step;
                let mut xm = x.clone();
                xm[i] -= spec.fd_step;
                let fp = eval(&xp, &mut budget, &mut total_evals, &mut best)?;
                let fm = eval(&xm, &mut budget, &mut total_evals, &mut best)?;
                g[i] = (fp - fm) / (2.0 * spec.fd_step);
            }
            if let Some((s, g_old)) = pending.take() {
                let y: Vec<f64> = g.iter().zip(&g_old).map(|(a, b)| a - b).collect();
                let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
                if sy > 1e-12 {
                    if first_update {
                        // Scale the identity seed to the curvature of the
                        // first accepted pair.
                        let yy: f64 = y.iter().map(|v| v * v).sum();
                        if yy > 1e-16 {
                            let scale = sy / yy;
                            for (i, row) in b.iter_mut().enumerate() {
                                for (j, v) in row.iter_mut().enumerate() {
                                    *v = if i == j { scale } else { 0.0 };
                                }
                            }
                        }
                        first_update = false;
                    }
                    bfgs_update(&mut b, &s, &y, sy);
                }
            }
            // Projected gradient norm.
            let pg_norm: f64 = {
                let mut proj = x.clone();
                for (p, gi) in proj.iter_mut().zip(&g) {
                    *p -= gi;
                }
                spec.clamp(&mut proj);
                proj.iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            };
            if pg_norm < 1e-6 {
                break;
            }
            let mut dir: Vec<f64> = (0..dim)
                .map(|i| -(0..dim).map(|j| b[i][j] * g[j]).sum::<f64>())
                .collect();
            let descent: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
            if descent >= 0.0 {
                for (d, gi) in dir.iter_mut().zip(&g) {
                    *d = -gi;
                }
                for (i, row) in b.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = if i == j { 1.0 } else { 0.0 };
                    }
                }
            }
            // Backtracking with projection onto the box; on failure fall
            // back once to steepest descent before giving up the cycle.
            let mut accepted: Option<(Vec<f64>, f64)> = None;
            'outer: for attempt in 0..2 {
                if attempt == 1 {
                    for (d, gi) in dir.iter_mut().zip(&g) {
                        *d = -gi;
                    }
                    for (i, row) in b.iter_mut().enumerate() {
                        for (j, v) in row.iter_mut().enumerate() {
                            *v = if i == j { 1.0 } else { 0.0 };
                        }
                    }
                }
                let mut trial = |step: f64,
                                 budget: &mut usize,
                                 total: &mut usize,
                                 best: &mut Option<(Vec<f64>, f64)>|
                 -> Result<Option<(Vec<f64>, f64)>> {
                    let mut xt = x.clone();
                    for (t, d) in xt.iter_mut().zip(&dir) {
                        *t += step * d;
                    }
                    spec.clamp(&mut xt);
                    let moved: f64 = xt
                        .iter()
                        .zip(&x)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if moved < 1e-14 {
                        return Ok(None);
                    }
                    let ft = eval(&xt, budget, total, best)?;
                    let slope: f64 = g
                        .iter()
                        .zip(xt.iter().zip(&x))
                        .map(|(gi, (a, b))| gi * (a - b))
                        .sum();
                    if ft <= fx + 1e-4 * slope.min(0.0) && ft < fx {
                        Ok(Some((xt, ft)))
                    } else {
                        Ok(None)
                    }
                };
                let mut step = 1.0f64;
                for k in 0..30 {
                    if budget == 0 {
                        break 'outer;
                    }
                    match trial(step, &mut budget, &mut total_evals, &mut best)? {
                        Some(hit) => {
                            accepted = Some(hit);
                            // A full step that worked may be timid: expand
                            // while the objective keeps dropping.
                            if k == 0 {
                                let mut grow = 2.0 * step;
                                for _ in 0..3 {
                                    if budget == 0 {
                                        break;
                                    }
                                    match trial(grow, &mut budget, &mut total_evals, &mut best)? {
                                        Some(hit2)
                                            if hit2.1
                                                < accepted.as_ref().expect("just set").1 =>
                                        {
                                            accepted = Some(hit2);
                                            grow *= 2.0;
                                        }
                                        _ => break,
                                    }
                                }
                            }
                            break 'outer;
                        }
                        None => step *= 0.5,
                    }
                }
            }
            let Some((xt, ft)) = accepted else { break };
            let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
            pending = Some((s, g));
            let rel = (fx - ft) / fx.abs().max(1.0);
            x = xt;
            fx = ft;
            if rel < 1e-10 {
                break;
            }
        }
    }

    let (best_params, best_value) = best.expect("at least one evaluation ran");
    Ok(MinimizeOutcome {
        best_params,
        best_value,
        n_evals: total_evals,
    })
}

fn bfgs_update(b: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let dim = s.len();
    let rho = 1.0 / sy;
    // B ← (I − ρ s yᵀ) B (I − ρ y sᵀ) + ρ s sᵀ
    let mut by = vec![0.0f64; dim];
    for i in 0..dim {
        by[i] = (0..dim).map(|j| b[i][j] * y[j]).sum();
    }
    let yby: f64 = y.iter().zip(&by).map(|(a, c)| a * c).sum();
    let coeff = (1.0 + rho * yby) * rho;
    for i in 0..dim {
        for j in 0..dim {
            b[i][j] += coeff * s[i] * s[j] - rho * (by[i] * s[j] + s[i] * by[j]);
        }
    }
}

/// Which method produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    Standard,
    AdaptiveMubXrot,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::Standard => "standard",
            MethodTag::AdaptiveMubXrot => "adaptive_mub_xrot",
        }
    }
}

/// One screening/acceptance event in the adaptive family loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyTraceEntry {
    pub round: usize,
    pub r: u64,
    pub postselected: f64,
    pub decoded: f64,
    pub energy: f64,
    pub accepted: bool,
}

/// One optimization run's metrics and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct MethodRecord {
    pub method: MethodTag,
    pub instance_key: String,
    pub family: ProblemFamily,
    pub instance_seed: u64,
    pub n_qubits: u32,
    pub p: usize,
    pub seed: u64,
    pub metrics: DecodeMetrics,
    pub runtime_seconds: f64,
    pub family_trace: Vec<FamilyTraceEntry>,
    pub n_cost_evals: usize,
    pub final_family_r: Option<u64>,
}

/// Tunable constants of both QAOA methods; defaults follow the artifact
/// configuration (400 evals × 2 restarts, 30-eval screening, top-2
/// candidates, 5 rounds).
#[derive(Debug, Clone, Serialize)]
pub struct QaoaRunConfig {
    pub max_evals: usize,
    pub restarts: usize,
    pub fd_step: f64,
    pub screen_budget: usize,
    pub top_k: usize,
    pub max_rounds: usize,
    pub switch_threshold: f64,
    pub angle_init_max: f64,
}

impl Default for QaoaRunConfig {
    fn default() -> Self {
        Self {
            max_evals: 400,
            restarts: 2,
            fd_step: 1e-3,
            screen_budget: 30,
            top_k: 2,
            max_rounds: 5,
            switch_threshold: tol::FAMILY_SWITCH,
            angle_init_max: 0.6,
        }
    }
}

/// Per-restart budget scaled to the parameter count: `max_evals` is the
/// allowance of a 4-parameter problem, and central differences cost
/// 2·dim evaluations per iteration, so larger parameter vectors get a
/// proportionally larger evaluation budget for the same search depth.
pub(crate) fn scaled_budget(max_evals: usize, dim: usize) -> usize {
    max_evals * dim.div_ceil(4).max(1)
}

/// |+⟩^⊗n followed by p cost/mixer layers.
pub fn standard_state(enc: &EncodedProblem, gammas: &[f64], betas: &[f64]) -> Result<StateVector> {
    let mut state = prepare_plus(enc.n_qubits);
    for (g, b) in gammas.iter().zip(betas) {
        evolve_cost(&mut state, &enc.cost, *g)?;
        evolve_xmixer(&mut state, *b);
    }
    Ok(state)
}

/// `F_r · ∏ RX(μ_i) |0⟩^⊗n` followed by p cost/mixer layers.
pub fn mub_xrot_state(
    enc: &EncodedProblem,
    circuit: &DiagonalPhaseCircuit,
    mus: &[f64],
    gammas: &[f64],
    betas: &[f64],
) -> Result<StateVector> {
    let mut state = prepare_basis(enc.n_qubits, 0)?;
    apply_rx_all(&mut state, mus)?;
    apply_family_circuit(&mut state, circuit)?;
    for (g, b) in gammas.iter().zip(betas) {
        evolve_cost(&mut state, &enc.cost, *g)?;
        evolve_xmixer(&mut state, *b);
    }
    Ok(state)
}

fn check_qaoa_preconditions(enc: &EncodedProblem, p: usize) -> Result<()> {
    if !(1..=3).contains(&p) {
        return Err(Error::OutOfRange {
            what: "depth p",
            got: p as i64,
            lo: 1,
            hi: 3,
        });
    }
    if enc.n_qubits > 14 {
        return Err(Error::UnsupportedDimension(
            enc.n_qubits as usize,
            "QAOA statevectors are bounded to 14 qubits",
        ));
    }
    Ok(())
}

/// Standard QAOA baseline: optimize 2p angles from |+⟩^⊗n.
pub fn run_standard(
    enc: &EncodedProblem,
    p: usize,
    seed: u64,
    cfg: &QaoaRunConfig,
) -> Result<MethodRecord> {
    check_qaoa_preconditions(enc, p)?;
    let start = std::time::Instant::now();
    let mut rng = SeededRng::new(seed, STREAM_STANDARD).substream(p as u64);
    let two_pi = 2.0 * std::f64::consts::PI;
    let pi = std::f64::consts::PI;
    let mut bounds = vec![(0.0, two_pi); p];
    bounds.extend(vec![(0.0, pi); p]);
    let spec = OptimizerSpec {
        max_evals: scaled_budget(cfg.max_evals, 2 * p),
        fd_step: cfg.fd_step,
        restarts: cfg.restarts,
        bounds,
        init_ranges: vec![(0.0, cfg.angle_init_max); 2 * p],
    };
    let mut objective = |params: &[f64]| -> f64 {
        let (gammas, betas) = params.split_at(p);
        let state = standard_state(enc, gammas, betas).expect("sizes match");
        expectation(&state, &enc.cost).expect("sizes match")
    };
    let outcome = minimize(&mut objective, &spec, &mut rng)?;
    let (gammas, betas) = outcome.best_params.split_at(p);
    let state = standard_state(enc, gammas, betas)?;
    let metrics = decode_metrics(&probabilities(&state), enc)?;
    Ok(MethodRecord {
        method: MethodTag::Standard,
        instance_key: enc.instance_key(),
        family: enc.family,
        instance_seed: enc.instance.seed(),
        n_qubits: enc.n_qubits,
        p,
        seed,
        metrics,
        runtime_seconds: start.elapsed().as_secs_f64(),
        family_trace: Vec::new(),
        n_cost_evals: outcome.n_evals,
        final_family_r: None,
    })
}

/// Valid non-computational bit-flip neighbors of `r` on `n` qubits,
/// ascending.
pub fn family_neighbors(r: u64, n_qubits: u32) -> Vec<u64> {
    let max = (1u64 << n_qubits) - 1;
    let mut out: Vec<u64> = (0..n_qubits)
        .map(|b| r ^ (1u64 << b))
        .filter(|&x| x >= 1 && x <= max && x != r)
        .collect();
    out.sort_unstable();
    out
}

/// Adaptive MUB-XRot: jointly optimizes n local-rotation parameters and
/// 2p angles while hill-searching the family index over bit-flip
/// neighbors. The loop screens the current family and its neighbors at
/// the current parameters, reoptimizes the current family and the top
/// candidates under an equal small budget, and switches only when the
/// best candidate's postselected expected ratio improves on the current
/// one by at least the switch threshold. Parameters carry over on a
/// switch (warm continuation). A full-budget polish runs on the final
/// family.
pub fn run_adaptive_mub_xrot(
    enc: &EncodedProblem,
    p: usize,
    seed: u64,
    cfg: &QaoaRunConfig,
) -> Result<MethodRecord> {
    check_qaoa_preconditions(enc, p)?;
    let start = std::time::Instant::now();
    let n = enc.n_qubits;
    let mut rng = SeededRng::new(seed, STREAM_ADAPTIVE).substream(p as u64);
    let two_pi = 2.0 * std::f64::consts::PI;
    let pi = std::f64::consts::PI;

    let mut bounds = vec![(0.0, two_pi); n as usize];
    bounds.extend(vec![(0.0, two_pi); p]);
    bounds.extend(vec![(0.0, pi); p]);
    let mut init_ranges = vec![(0.0, pi); n as usize];
    init_ranges.extend(vec![(0.0, cfg.angle_init_max); 2 * p]);

    let full_spec = OptimizerSpec {
        max_evals: scaled_budget(cfg.max_evals, n as usize + 2 * p),
        fd_step: cfg.fd_step,
        restarts: cfg.restarts,
        bounds: bounds.clone(),
        init_ranges: init_ranges.clone(),
    };
    let screen_spec = OptimizerSpec {
        max_evals: cfg.screen_budget,
        fd_step: cfg.fd_step,
        restarts: 1,
        bounds,
        init_ranges,
    };

    let mut circuits: HashMap<u64, DiagonalPhaseCircuit> = HashMap::new();
    let mut circuit = |r: u64| -> DiagonalPhaseCircuit {
        circuits
            .entry(r)
            .or_insert_with(|| {
                DiagonalPhaseCircuit::for_family(n, r).expect("r stays in the valid range")
            })
            .clone()
    };

    let n_evals = std::cell::Cell::new(0usize);
    let simulate = |r_circuit: &DiagonalPhaseCircuit, params: &[f64]| -> StateVector {
        n_evals.set(n_evals.get() + 1);
        let (mus, angles) = params.split_at(n as usize);
        let (gammas, betas) = angles.split_at(p);
        mub_xrot_state(enc, r_circuit, mus, gammas, betas).expect("sizes match")
    };
    let metrics_at = |r_circuit: &DiagonalPhaseCircuit, params: &[f64]| -> DecodeMetrics {
        let state = simulate(r_circuit, params);
        decode_metrics(&probabilities(&state), enc).expect("exact distribution")
    };

    // The loop starts from the neutral local-rotation field μ = π/2 (the
    // midpoint of the init law); later restarts draw μ at random.
    let mut theta = full_spec.draw_init(&mut rng);
    for mu in theta.iter_mut().take(n as usize) {
        *mu = std::f64::consts::FRAC_PI_2;
    }
    let mut family = 1u64;
    let mut trace: Vec<FamilyTraceEntry> = Vec::new();

    for round in 0..cfg.max_rounds {
        let cur_circuit = circuit(family);
        let cur_screen = metrics_at(&cur_circuit, &theta);
        trace.push(FamilyTraceEntry {
            round,
            r: family,
            postselected: cur_screen.postselected_expected_ratio,
            decoded: cur_screen.decoded_ratio,
            energy: cur_screen.energy,
            accepted: false,
        });

        let mut scored: Vec<(u64, DecodeMetrics)> = Vec::new();
        for cand in family_neighbors(family, n) {
            let m = metrics_at(&circuit(cand), &theta);
            trace.push(FamilyTraceEntry {
                round,
                r: cand,
                postselected: m.postselected_expected_ratio,
                decoded: m.decoded_ratio,
                energy: m.energy,
                accepted: false,
            });
            scored.push((cand, m));
        }
        // Rank candidates lexicographically: postselected desc, decoded
        // desc, energy asc; ascending r as the final deterministic key.
        scored.sort_by(|(ra, ma), (rb, mb)| {
            mb.postselected_expected_ratio
                .partial_cmp(&ma.postselected_expected_ratio)
                .unwrap()
                .then(mb.decoded_ratio.partial_cmp(&ma.decoded_ratio).unwrap())
                .then(ma.energy.partial_cmp(&mb.energy).unwrap())
                .then(ra.cmp(rb))
        });
        let top: Vec<u64> = scored.iter().take(cfg.top_k).map(|&(r, _)| r).collect();

        // Reoptimize current + top candidates under the equal budget.
        let reopt = |_r: u64, c: &DiagonalPhaseCircuit, rng: &mut SeededRng| -> Result<(Vec<f64>, DecodeMetrics)> {
            let mut objective = |params: &[f64]| -> f64 {
                let state = simulate(c, params);
                expectation(&state, &enc.cost).expect("sizes match")
            };
            let out = minimize_with_starts(&mut objective, &screen_spec, vec![theta.clone()], rng)?;
            let m = metrics_at(c, &out.best_params);
            Ok((out.best_params, m))
        };
        let (cur_theta, cur_metrics) = reopt(family, &cur_circuit, &mut rng)?;
        let mut best_cand: Option<(u64, Vec<f64>, DecodeMetrics)> = None;
        for &cand in &top {
            let (ct, cm) = reopt(cand, &circuit(cand), &mut rng)?;
            let better = match &best_cand {
                None => true,
                Some((_, _, bm)) => {
                    cm.postselected_expected_ratio > bm.postselected_expected_ratio
                }
            };
            if better {
                best_cand = Some((cand, ct, cm));
            }
        }

        let mut switched = false;
        if let Some((cand, cand_theta, cand_metrics)) = best_cand {
            if cand_metrics.postselected_expected_ratio
                >= cur_metrics.postselected_expected_ratio + cfg.switch_threshold
            {
                family = cand;
                theta = cand_theta;
                switched = true;
                trace.push(FamilyTraceEntry {
                    round,
                    r: cand,
                    postselected: cand_metrics.postselected_expected_ratio,
                    decoded: cand_metrics.decoded_ratio,
                    energy: cand_metrics.energy,
                    accepted: true,
                });
            }
        }
        if !switched {
            theta = cur_theta;
            break;
        }
    }

    // Full-budget polish on the final family.
    let final_circuit = circuit(family);
    let mut objective = |params: &[f64]| -> f64 {
        let state = simulate(&final_circuit, params);
        expectation(&state, &enc.cost).expect("sizes match")
    };
    let outcome = minimize_with_starts(&mut objective, &full_spec, vec![theta], &mut rng)?;
    let state = simulate(&final_circuit, &outcome.best_params);
    let metrics = decode_metrics(&probabilities(&state), enc)?;

    Ok(MethodRecord {
        method: MethodTag::AdaptiveMubXrot,
        instance_key: enc.instance_key(),
        family: enc.family,
        instance_seed: enc.instance.seed(),
        n_qubits: enc.n_qubits,
        p,
        seed,
        metrics,
        runtime_seconds: start.elapsed().as_secs_f64(),
        family_trace: trace,
        n_cost_evals: n_evals.get(),
        final_family_r: Some(family),
    })
}

/// Paired Δ statistics between two record sets over identical case keys.
#[derive(Debug, Clone, Serialize)]
pub struct PairedComparison {
    pub n_cases: usize,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub mean_delta: f64,
    pub non_worse_rate: f64,
    pub win_rate_non_ties: f64,
    pub solved_rate_baseline: f64,
    pub solved_rate_adaptive: f64,
    pub median_runtime_ratio: f64,
    /// (case key, Δ) sorted by key.
    pub deltas: Vec<(String, f64)>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Δ = ρ_adaptive − ρ_standard per paired (instance, depth) case.
pub fn paired_stats(
    records_std: &[MethodRecord],
    records_adp: &[MethodRecord],
) -> Result<PairedComparison> {
    let key = |r: &MethodRecord| format!("{}_p{}_seed{}", r.instance_key, r.p, r.seed);
    let map_std: HashMap<String, &MethodRecord> =
        records_std.iter().map(|r| (key(r), r)).collect();
    let map_adp: HashMap<String, &MethodRecord> =
        records_adp.iter().map(|r| (key(r), r)).collect();

    let mut missing: Vec<String> = map_std
        .keys()
        .filter(|k| !map_adp.contains_key(*k))
        .cloned()
        .collect();
    missing.extend(
        map_adp
            .keys()
            .filter(|k| !map_std.contains_key(*k))
            .cloned(),
    );
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::CaseKeyMismatch(missing));
    }

    let mut keys: Vec<&String> = map_std.keys().collect();
    keys.sort();
    let (mut wins, mut ties, mut losses) = (0usize, 0usize, 0usize);
    let mut deltas = Vec::with_capacity(keys.len());
    let mut runtime_ratios = Vec::with_capacity(keys.len());
    let (mut solved_std, mut solved_adp) = (0usize, 0usize);
    for k in &keys {
        let s = map_std[*k];
        let a = map_adp[*k];
        let delta = a.metrics.decoded_ratio - s.metrics.decoded_ratio;
        if delta > tol::TIE_BAND {
            wins += 1;
        } else if delta < -tol::TIE_BAND {
            losses += 1;
        } else {
            ties += 1;
        }
        if is_solved(s.metrics.decoded_ratio) {
            solved_std += 1;
        }
        if is_solved(a.metrics.decoded_ratio) {
            solved_adp += 1;
        }
        if s.runtime_seconds > 0.0 {
            runtime_ratios.push(a.runtime_seconds / s.runtime_seconds);
        }
        deltas.push(((*k).clone(), delta));
    }
    let n = keys.len();
    Ok(PairedComparison {
        n_cases: n,
        wins,
        ties,
        losses,
        mean_delta: deltas.iter().map(|(_, d)| d).sum::<f64>() / n as f64,
        non_worse_rate: (wins + ties) as f64 / n as f64,
        win_rate_non_ties: if wins + losses > 0 {
            wins as f64 / (wins + losses) as f64
        } else {
            0.0
        },
        solved_rate_baseline: solved_std as f64 / n as f64,
        solved_rate_adaptive: solved_adp as f64 / n as f64,
        median_runtime_ratio: median(runtime_ratios),
        deltas,
    })
}
