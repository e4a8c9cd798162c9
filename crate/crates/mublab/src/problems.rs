//! Benchmark instances, their diagonal-cost encodings with feasibility
//! predicates, brute-force optima, and decoding metrics.
//!
//! Costs are oriented so that lower is better; the classical objective
//! `f(x) ≥ 0` on feasible strings is what ratios are measured against.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::numcore::SeededRng;
use crate::simvec::DiagonalCost;
use crate::tol;

const STREAM_GRAPH: u64 = 0x67726170;
const STREAM_KNAPSACK: u64 = 0x6b6e6170;

/// The five benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemFamily {
    MaxCut,
    WeightedMaxCut,
    Mis,
    WeightedMis,
    Knapsack,
}

impl ProblemFamily {
    pub const ALL: [ProblemFamily; 5] = [
        ProblemFamily::MaxCut,
        ProblemFamily::WeightedMaxCut,
        ProblemFamily::Mis,
        ProblemFamily::WeightedMis,
        ProblemFamily::Knapsack,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemFamily::MaxCut => "maxcut",
            ProblemFamily::WeightedMaxCut => "wmaxcut",
            ProblemFamily::Mis => "mis",
            ProblemFamily::WeightedMis => "wmis",
            ProblemFamily::Knapsack => "knapsack",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "maxcut" => Ok(ProblemFamily::MaxCut),
            "wmaxcut" => Ok(ProblemFamily::WeightedMaxCut),
            "mis" => Ok(ProblemFamily::Mis),
            "wmis" => Ok(ProblemFamily::WeightedMis),
            "knapsack" => Ok(ProblemFamily::Knapsack),
            other => Err(Error::Config(format!("unknown problem family `{other}`"))),
        }
    }
}

/// An undirected graph with positive edge weights and per-vertex weights
/// for the independent-set variants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphInstance {
    pub n_vertices: usize,
    /// (u, v, weight) with u < v, no self-loops.
    pub edges: Vec<(usize, usize, f64)>,
    pub seed: u64,
    pub family: ProblemFamily,
    pub vertex_weights: Vec<f64>,
}

impl GraphInstance {
    pub fn cut_value(&self, bits: usize) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v, w)| {
                if (bits >> u) & 1 != (bits >> v) & 1 {
                    w
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn is_independent(&self, bits: usize) -> bool {
        self.edges
            .iter()
            .all(|&(u, v, _)| (bits >> u) & 1 == 0 || (bits >> v) & 1 == 0)
    }

    pub fn selected_weight(&self, bits: usize) -> f64 {
        (0..self.n_vertices)
            .filter(|&i| (bits >> i) & 1 == 1)
            .map(|i| self.vertex_weights[i])
            .sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b, _)| a == v || b == v)
            .count()
    }
}

/// Erdős–Rényi G(n, p) with deterministic regeneration when the draw has
/// no edges. Edge weights are 1, or uniform integers in {1..10} when
/// `weighted`.
pub fn gen_er_graph(n: usize, edge_prob: f64, seed: u64, weighted: bool) -> GraphInstance {
    assert!(n >= 2, "graphs need at least two vertices");
    for attempt in 0u64.. {
        let mut rng = SeededRng::new(seed, STREAM_GRAPH).substream(attempt);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.uniform() < edge_prob {
                    let w = if weighted {
                        (rng.below(10) + 1) as f64
                    } else {
                        1.0
                    };
                    edges.push((u, v, w));
                }
            }
        }
        if !edges.is_empty() {
            return GraphInstance {
                n_vertices: n,
                edges,
                seed,
                family: if weighted {
                    ProblemFamily::WeightedMaxCut
                } else {
                    ProblemFamily::MaxCut
                },
                vertex_weights: vec![1.0; n],
            };
        }
    }
    unreachable!("regeneration loop always terminates for edge_prob > 0");
}

/// Knapsack with binary slack bits; total qubits = items + slack.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub values: Vec<u64>,
    pub weights: Vec<u64>,
    pub capacity: u64,
    pub n_slack_bits: u32,
    pub seed: u64,
}

impl KnapsackInstance {
    pub fn new(values: Vec<u64>, weights: Vec<u64>, capacity: u64, seed: u64) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                got: weights.len(),
            });
        }
        let n_slack_bits = slack_bits(capacity);
        Ok(Self {
            values,
            weights,
            capacity,
            n_slack_bits,
            seed,
        })
    }

    pub fn n_items(&self) -> usize {
        self.values.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.values.len() + self.n_slack_bits as usize
    }
}

fn slack_bits(capacity: u64) -> u32 {
    // ⌈log₂(capacity + 1)⌉
    64 - capacity.leading_zeros()
}

/// Deterministic knapsack generator hitting an exact total qubit count.
/// Values and weights are uniform in {1..10}; capacity is
/// max(min weight, ⌊Σw/2⌋) so at least one item always fits.
pub fn gen_knapsack(total_qubits: usize, seed: u64) -> Result<KnapsackInstance> {
    if total_qubits < 4 {
        return Err(Error::OutOfRange {
            what: "knapsack total qubits",
            got: total_qubits as i64,
            lo: 4,
            hi: i64::MAX,
        });
    }
    for attempt in 0u64..10_000 {
        let mut rng = SeededRng::new(seed, STREAM_KNAPSACK).substream(attempt);
        for k in (2..total_qubits).rev() {
            let weights: Vec<u64> = (0..k).map(|_| rng.below(10) + 1).collect();
            let values: Vec<u64> = (0..k).map(|_| rng.below(10) + 1).collect();
            let sum_w: u64 = weights.iter().sum();
            let min_w = *weights.iter().min().expect("k >= 2");
            let capacity = (sum_w / 2).max(min_w);
            if k + slack_bits(capacity) as usize == total_qubits {
                return KnapsackInstance::new(values, weights, capacity, seed);
            }
        }
    }
    Err(Error::Config(format!(
        "no knapsack layout found for {total_qubits} qubits"
    )))
}

/// A benchmark instance of any family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemInstance {
    Graph(GraphInstance),
    Knapsack(KnapsackInstance),
}

impl ProblemInstance {
    pub fn family(&self) -> ProblemFamily {
        match self {
            ProblemInstance::Graph(g) => g.family,
            ProblemInstance::Knapsack(_) => ProblemFamily::Knapsack,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ProblemInstance::Graph(g) => g.seed,
            ProblemInstance::Knapsack(k) => k.seed,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            ProblemInstance::Graph(g) => g.n_vertices,
            ProblemInstance::Knapsack(k) => k.total_qubits(),
        }
    }

    /// Stable JSON: {family, n, seed, edges/items, weights, capacity}.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ProblemInstance::Graph(g) => json!({
                "family": g.family.as_str(),
                "n": g.n_vertices,
                "seed": g.seed,
                "edges": g.edges,
                "weights": g.vertex_weights,
            }),
            ProblemInstance::Knapsack(k) => json!({
                "family": "knapsack",
                "n": k.total_qubits(),
                "seed": k.seed,
                "items": k.values,
                "weights": k.weights,
                "capacity": k.capacity,
            }),
        }
    }
}

/// Benchmark-grid generator: one instance of `family` on `n_qubits`
/// qubits from `seed`.
pub fn gen_instance(family: ProblemFamily, n_qubits: usize, seed: u64) -> Result<ProblemInstance> {
    match family {
        ProblemFamily::MaxCut => Ok(ProblemInstance::Graph(gen_er_graph(
            n_qubits, 0.5, seed, false,
        ))),
        ProblemFamily::WeightedMaxCut => Ok(ProblemInstance::Graph(gen_er_graph(
            n_qubits, 0.5, seed, true,
        ))),
        ProblemFamily::Mis => {
            let mut g = gen_er_graph(n_qubits, 0.5, seed, false);
            g.family = ProblemFamily::Mis;
            Ok(ProblemInstance::Graph(g))
        }
        ProblemFamily::WeightedMis => {
            let mut g = gen_er_graph(n_qubits, 0.5, seed, false);
            g.family = ProblemFamily::WeightedMis;
            let mut rng = SeededRng::new(seed, STREAM_GRAPH).substream(0xabcd);
            g.vertex_weights = (0..n_qubits).map(|_| (rng.below(10) + 1) as f64).collect();
            Ok(ProblemInstance::Graph(g))
        }
        ProblemFamily::Knapsack => Ok(ProblemInstance::Knapsack(gen_knapsack(n_qubits, seed)?)),
    }
}

/// A diagonal-cost encoding with feasibility predicate, objective, and
/// brute-force optimum.
#[derive(Debug, Clone)]
pub struct EncodedProblem {
    pub family: ProblemFamily,
    pub n_qubits: u32,
    pub cost: DiagonalCost,
    feasible: Vec<bool>,
    objective: Vec<f64>,
    pub opt_value: f64,
    pub opt_bitstring: usize,
    pub instance: ProblemInstance,
}

impl EncodedProblem {
    pub fn is_feasible(&self, bits: usize) -> bool {
        self.feasible[bits]
    }

    pub fn objective(&self, bits: usize) -> f64 {
        self.objective[bits]
    }

    pub fn instance_key(&self) -> String {
        format!(
            "{}_n{}_s{}",
            self.family.as_str(),
            self.n_qubits,
            self.instance.seed()
        )
    }
}

/// Exhaustive scan of feasible strings; ties broken by lowest index.
fn brute_force_scan(feasible: &[bool], objective: &[f64]) -> Result<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (x, (&ok, &f)) in feasible.iter().zip(objective).enumerate() {
        if !ok {
            continue;
        }
        match best {
            Some((bf, _)) if f <= bf => {}
            _ => best = Some((f, x)),
        }
    }
    best.ok_or(Error::NoFeasible)
}

/// Re-scan of an encoded problem's feasible strings (the stored optimum
/// is produced by the same scan at encode time).
pub fn brute_force(encoded: &EncodedProblem) -> Result<(f64, usize)> {
    if encoded.n_qubits > 20 {
        return Err(Error::UnsupportedDimension(
            encoded.n_qubits as usize,
            "brute force is bounded to 20 qubits",
        ));
    }
    brute_force_scan(&encoded.feasible, &encoded.objective)
}

/// Encodes an instance as a diagonal cost with penalties where needed.
pub fn encode(instance: &ProblemInstance) -> Result<EncodedProblem> {
    let n_qubits = instance.n_qubits();
    if n_qubits > 20 {
        return Err(Error::UnsupportedDimension(
            n_qubits,
            "dense encodings are bounded to 20 qubits",
        ));
    }
    let dim = 1usize << n_qubits;
    let mut cost = vec![0.0f64; dim];
    let mut feasible = vec![true; dim];
    let mut objective = vec![0.0f64; dim];

    match instance {
        ProblemInstance::Graph(g) => match g.family {
            ProblemFamily::MaxCut | ProblemFamily::WeightedMaxCut => {
                for x in 0..dim {
                    let f = g.cut_value(x);
                    objective[x] = f;
                    cost[x] = -f;
                }
            }
            ProblemFamily::Mis | ProblemFamily::WeightedMis => {
                let max_w = g
                    .vertex_weights
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let lambda = 1.0 + max_w;
                for x in 0..dim {
                    let sel = g.selected_weight(x);
                    let conflicts = g
                        .edges
                        .iter()
                        .filter(|&&(u, v, _)| (x >> u) & 1 == 1 && (x >> v) & 1 == 1)
                        .count() as f64;
                    cost[x] = -sel + lambda * conflicts;
                    if g.is_independent(x) {
                        objective[x] = sel;
                    } else {
                        feasible[x] = false;
                    }
                }
            }
            ProblemFamily::Knapsack => {
                return Err(Error::Config(
                    "graph instance tagged as knapsack".to_string(),
                ))
            }
        },
        ProblemInstance::Knapsack(k) => {
            let n_items = k.n_items();
            let lambda = 1.0 + k.values.iter().sum::<u64>() as f64;
            for x in 0..dim {
                let item_bits = x & ((1 << n_items) - 1);
                let slack = (x >> n_items) as u64;
                let value: u64 = (0..n_items)
                    .filter(|&i| (item_bits >> i) & 1 == 1)
                    .map(|i| k.values[i])
                    .sum();
                let weight: u64 = (0..n_items)
                    .filter(|&i| (item_bits >> i) & 1 == 1)
                    .map(|i| k.weights[i])
                    .sum();
                let residual = weight as f64 + slack as f64 - k.capacity as f64;
                cost[x] = -(value as f64) + lambda * residual * residual;
                // Feasibility lives on the item bits alone.
                if weight <= k.capacity {
                    objective[x] = value as f64;
                } else {
                    feasible[x] = false;
                }
            }
        }
    }

    let (opt_value, opt_bitstring) = brute_force_scan(&feasible, &objective)?;
    if opt_value <= 0.0 {
        return Err(Error::NoFeasible);
    }
    let cost = DiagonalCost::labelled(
        n_qubits as u32,
        cost,
        format!("{}_s{}", instance.family().as_str(), instance.seed()),
    )?;
    Ok(EncodedProblem {
        family: instance.family(),
        n_qubits: n_qubits as u32,
        cost,
        feasible,
        objective,
        opt_value,
        opt_bitstring,
        instance: instance.clone(),
    })
}

/// Scores of one output distribution against an encoded problem.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecodeMetrics {
    /// Objective of the globally most probable string over the optimum;
    /// zero when that string is infeasible.
    pub decoded_ratio: f64,
    /// Feasibility-conditioned expected objective over the optimum.
    pub postselected_expected_ratio: f64,
    /// Expected cost ⟨H_C⟩.
    pub energy: f64,
    pub decoded_bitstring: usize,
}

/// Decodes an exact probability vector.
pub fn decode_metrics(probs: &[f64], encoded: &EncodedProblem) -> Result<DecodeMetrics> {
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::ProbabilitySum(total, 1e-8));
    }
    if probs.len() != encoded.feasible.len() {
        return Err(Error::LengthMismatch {
            expected: encoded.feasible.len(),
            got: probs.len(),
        });
    }

    // Global argmax; ties resolve to the lowest index.
    let mut decoded = 0usize;
    let mut best_p = probs[0];
    for (x, &p) in probs.iter().enumerate().skip(1) {
        if p > best_p {
            best_p = p;
            decoded = x;
        }
    }
    let decoded_ratio = if encoded.feasible[decoded] {
        encoded.objective[decoded] / encoded.opt_value
    } else {
        0.0
    };

    let mut feasible_mass = 0.0f64;
    let mut feasible_value = 0.0f64;
    let mut energy = 0.0f64;
    for (x, &p) in probs.iter().enumerate() {
        energy += p * encoded.cost.values()[x];
        if encoded.feasible[x] {
            feasible_mass += p;
            feasible_value += p * encoded.objective[x];
        }
    }
    let postselected = if feasible_mass < 1e-12 {
        0.0
    } else {
        feasible_value / feasible_mass / encoded.opt_value
    };

    Ok(DecodeMetrics {
        decoded_ratio,
        postselected_expected_ratio: postselected,
        energy,
        decoded_bitstring: decoded,
    })
}

/// Fraction-of-optimum score used for solved-rate counting.
pub fn is_solved(ratio: f64) -> bool {
    ratio >= tol::SOLVED
}
