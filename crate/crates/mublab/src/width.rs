//! Monte Carlo estimation of the isotropic random-Hamiltonian Gaussian
//! width `W(S) = E_H max_ψ Tr(H·Q_ψ)` and the empirical checks built on it:
//! CDF dominance between ensembles, simplex block covariance, radial
//! mixtures, the unrestricted qubit sweep, and the asymptotic gap probe.
//!
//! Comparisons between two ensembles always share the Hamiltonian stream
//! (common random numbers), which shrinks the variance of the difference
//! without changing either marginal estimate.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mub::{BasisUnion, MubSystem};
use crate::numcore::{
    fill_gue, Accumulator, ComplexMatrix, EstimateWithError, PureState, SeededRng,
};
use crate::tol;

/// A list of pure states, optionally grouped into labelled orthonormal bases.
#[derive(Debug, Clone)]
pub struct Ensemble {
    dim: usize,
    states: Vec<PureState>,
    basis_labels: Option<Vec<usize>>,
    descriptor: String,
}

impl Ensemble {
    pub fn from_states(dim: usize, states: Vec<PureState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimMismatch(s.dim(), dim));
            }
        }
        let descriptor = format!("custom(d={},k={})", dim, states.len());
        Ok(Self {
            dim,
            states,
            basis_labels: None,
            descriptor,
        })
    }

    pub fn from_union(union: &BasisUnion) -> Self {
        let dim = union.dim();
        let states = union.states();
        let labels = union
            .labels()
            .iter()
            .flat_map(|&l| std::iter::repeat(l).take(dim))
            .collect();
        let out = Self {
            dim,
            states,
            basis_labels: Some(labels),
            descriptor: format!("union(d={dim})"),
        };
        out.check_labelled_groups()
            .expect("unitary bases give orthonormal label groups");
        out
    }

    pub fn from_mub(sys: &MubSystem) -> Self {
        let mut out = Self::from_union(&BasisUnion::from_mub(sys));
        out.descriptor = format!("mub(d={})", sys.dim());
        out
    }

    /// Basis-labelled groups must each hold exactly d pairwise-orthonormal
    /// states.
    fn check_labelled_groups(&self) -> Result<()> {
        let labels = self.basis_labels.as_ref().ok_or(Error::UnlabeledEnsemble)?;
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        for (label, members) in groups {
            if members.len() != self.dim {
                return Err(Error::BadBasisLabel {
                    label,
                    got: members.len(),
                    expected: self.dim,
                });
            }
            for (a, &i) in members.iter().enumerate() {
                for &j in members.iter().skip(a + 1) {
                    if self.states[i].overlap(&self.states[j]).norm() > tol::UNBIASED {
                        return Err(Error::BadBasisLabel {
                            label,
                            got: members.len(),
                            expected: self.dim,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn basis_labels(&self) -> Option<&[usize]> {
        self.basis_labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }
}

/// Flattened `Q_ψ` (transposed) per state, so that `Tr(HQ)` is a flat dot
/// product against the row-major entries of `H`. Precomputed once.
struct PreparedStates {
    q_flat: Vec<Vec<Complex64>>,
}

impl PreparedStates {
    fn new(dim: usize, states: &[PureState]) -> Self {
        let q_flat = states
            .iter()
            .map(|psi| {
                let q = crate::numcore::q_operator(psi);
                let m = q.entries();
                let mut flat = Vec::with_capacity(dim * dim);
                for i in 0..dim {
                    for j in 0..dim {
                        flat.push(m[(j, i)]);
                    }
                }
                flat
            })
            .collect();
        Self { q_flat }
    }

    /// Tr(H·Q_s) for one state; real by Hermiticity.
    #[inline]
    fn value(&self, h: &ComplexMatrix, s: usize) -> f64 {
        let hd = h.data();
        let qd = &self.q_flat[s];
        let mut acc = 0.0f64;
        for (a, b) in hd.iter().zip(qd) {
            acc += a.re * b.re - a.im * b.im;
        }
        acc
    }

    fn max_value(&self, h: &ComplexMatrix) -> f64 {
        (0..self.q_flat.len())
            .map(|s| self.value(h, s))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn min_value(&self, h: &ComplexMatrix) -> f64 {
        (0..self.q_flat.len())
            .map(|s| self.value(h, s))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Reusable buffer producing centered isotropic Hamiltonians.
struct HamiltonianStream {
    h: ComplexMatrix,
}

impl HamiltonianStream {
    fn new(dim: usize) -> Self {
        Self {
            h: ComplexMatrix::zeros(dim, dim),
        }
    }

    fn next(&mut self, rng: &mut SeededRng) -> &ComplexMatrix {
        fill_gue(&mut self.h, rng);
        let d = self.h.dim();
        let shift = self.h.trace().re / d as f64;
        for i in 0..d {
            let v = self.h[(i, i)].re - shift;
            self.h[(i, i)] = Complex64::new(v, 0.0);
        }
        &self.h
    }
}

/// A width estimate together with its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct WidthReport {
    pub estimate: EstimateWithError,
    pub descriptor: String,
    pub n_samples: usize,
    pub seed: u64,
    pub stream_id: u64,
}

fn check_sample_count(n_samples: usize) -> Result<()> {
    if n_samples < 100 {
        return Err(Error::OutOfRange {
            what: "n_samples",
            got: n_samples as i64,
            lo: 100,
            hi: i64::MAX,
        });
    }
    Ok(())
}

/// `W(S) = E_H max_ψ Tr(H·Q_ψ)` by Monte Carlo.
pub fn estimate_width(ens: &Ensemble, n_samples: usize, rng: &mut SeededRng) -> Result<WidthReport> {
    check_sample_count(n_samples)?;
    let prepared = PreparedStates::new(ens.dim, &ens.states);
    let mut stream = HamiltonianStream::new(ens.dim);
    let mut acc = Accumulator::new();
    for _ in 0..n_samples {
        acc.push(prepared.max_value(stream.next(rng)));
    }
    Ok(WidthReport {
        estimate: acc.finish(),
        descriptor: ens.descriptor.clone(),
        n_samples,
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    })
}

/// `E_H min_ψ Tr(H·Q_ψ)`; equals `−W(S)` in distribution by `H ≐ −H`.
pub fn estimate_min_expectation(
    ens: &Ensemble,
    n_samples: usize,
    rng: &mut SeededRng,
) -> Result<WidthReport> {
    check_sample_count(n_samples)?;
    let prepared = PreparedStates::new(ens.dim, &ens.states);
    let mut stream = HamiltonianStream::new(ens.dim);
    let mut acc = Accumulator::new();
    for _ in 0..n_samples {
        acc.push(prepared.min_value(stream.next(rng)));
    }
    Ok(WidthReport {
        estimate: acc.finish(),
        descriptor: ens.descriptor.clone(),
        n_samples,
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    })
}

/// Width estimates of two ensembles under a common Hamiltonian stream,
/// with the paired difference `a − b` and its own standard error.
#[derive(Debug, Clone, Serialize)]
pub struct PairedWidthReport {
    pub w_a: EstimateWithError,
    pub w_b: EstimateWithError,
    pub delta: EstimateWithError,
    pub n_samples: usize,
}

pub fn paired_width(
    ens_a: &Ensemble,
    ens_b: &Ensemble,
    n_samples: usize,
    rng: &mut SeededRng,
) -> Result<PairedWidthReport> {
    check_sample_count(n_samples)?;
    if ens_a.dim != ens_b.dim {
        return Err(Error::DimMismatch(ens_a.dim, ens_b.dim));
    }
    let pa = PreparedStates::new(ens_a.dim, &ens_a.states);
    let pb = PreparedStates::new(ens_b.dim, &ens_b.states);
    let mut stream = HamiltonianStream::new(ens_a.dim);
    let (mut acc_a, mut acc_b, mut acc_d) =
        (Accumulator::new(), Accumulator::new(), Accumulator::new());
    for _ in 0..n_samples {
        let h = stream.next(rng);
        let ma = pa.max_value(h);
        let mb = pb.max_value(h);
        acc_a.push(ma);
        acc_b.push(mb);
        acc_d.push(ma - mb);
    }
    Ok(PairedWidthReport {
        w_a: acc_a.finish(),
        w_b: acc_b.finish(),
        delta: acc_d.finish(),
        n_samples,
    })
}

/// Empirical CDF of the ensemble maximum on a fixed grid.
#[derive(Debug, Clone, Serialize)]
pub struct CdfCurve {
    pub grid: Vec<f64>,
    pub probs: Vec<f64>,
    pub n_samples: usize,
}

impl CdfCurve {
    /// Binomial standard error at grid point `i`.
    pub fn stderr(&self, i: usize) -> f64 {
        let p = self.probs[i];
        (p * (1.0 - p) / self.n_samples as f64).sqrt()
    }

    /// Default grid [0, 4] at step 0.1.
    pub fn default_grid() -> Vec<f64> {
        (0..=40).map(|i| i as f64 * 0.1).collect()
    }
}

/// Empirical `P(max ≤ t)` over the grid.
pub fn max_cdf(
    ens: &Ensemble,
    grid: &[f64],
    n_samples: usize,
    rng: &mut SeededRng,
) -> Result<CdfCurve> {
    check_sample_count(n_samples)?;
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedGrid);
    }
    let prepared = PreparedStates::new(ens.dim, &ens.states);
    let mut stream = HamiltonianStream::new(ens.dim);
    // counts[i] = samples with grid[i−1] < max ≤ grid[i]; prefix sums give
    // the CDF.
    let mut counts = vec![0usize; grid.len() + 1];
    for _ in 0..n_samples {
        let m = prepared.max_value(stream.next(rng));
        let idx = grid.partition_point(|&t| t < m);
        counts[idx] += 1;
    }
    let mut probs = Vec::with_capacity(grid.len());
    let mut cum = 0usize;
    for &c in counts.iter().take(grid.len()) {
        cum += c;
        probs.push(cum as f64 / n_samples as f64);
    }
    Ok(CdfCurve {
        grid: grid.to_vec(),
        probs,
        n_samples,
    })
}

/// One grid point where dominance failed.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceViolation {
    pub t: f64,
    pub p_s: f64,
    pub p_m: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub violations: Vec<DominanceViolation>,
    pub pass: bool,
    pub checked_points: usize,
}

/// Checks `P_S(t) ≥ P_M(t) − slack` pointwise. With `slack = None` the
/// slack is five joint binomial standard errors per point.
pub fn dominance_check(
    curve_s: &CdfCurve,
    curve_m: &CdfCurve,
    slack: Option<f64>,
) -> Result<DominanceReport> {
    if curve_s.grid != curve_m.grid {
        return Err(Error::GridMismatch);
    }
    let mut violations = Vec::new();
    for i in 0..curve_s.grid.len() {
        let eps = slack.unwrap_or_else(|| {
            tol::MC_SIGMA * (curve_s.stderr(i).powi(2) + curve_m.stderr(i).powi(2)).sqrt()
        });
        if curve_s.probs[i] < curve_m.probs[i] - eps {
            violations.push(DominanceViolation {
                t: curve_s.grid[i],
                p_s: curve_s.probs[i],
                p_m: curve_m.probs[i],
                slack: eps,
            });
        }
    }
    Ok(DominanceReport {
        pass: violations.is_empty(),
        checked_points: curve_s.grid.len(),
        violations,
    })
}

/// Centered regular-simplex vertices in R^(d−1):
/// `v_i · v_j = δ_ij − 1/d`, `Σ v_i = 0`.
#[derive(Debug, Clone)]
pub struct SimplexFrame {
    d: usize,
    vertices: Vec<Vec<f64>>,
}

impl SimplexFrame {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension {
                got: d,
                why: "simplex frames need d >= 2",
            });
        }
        // Columns of the Helmert submatrix: row k (1-based) has 1/√(k(k+1))
        // in the first k slots and −k/√(k(k+1)) at slot k.
        let mut vertices = vec![vec![0.0f64; d - 1]; d];
        for k in 1..d {
            let denom = 1.0 / ((k * (k + 1)) as f64).sqrt();
            for (i, vertex) in vertices.iter_mut().enumerate() {
                vertex[k - 1] = if i < k {
                    denom
                } else if i == k {
                    -(k as f64) * denom
                } else {
                    0.0
                };
            }
        }
        Ok(Self { d, vertices })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Support function `h(y) = max_i v_i · y`.
    pub fn support(&self, y: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Covariance structure of a basis-labelled union against the simplex
/// block prediction.
#[derive(Debug, Clone, Serialize)]
pub struct SimplexBlockReport {
    /// max |Ĉov(X_{a,i}, X_{a,j}) − (δ_ij − 1/d)| over within-block entries.
    pub within_block_cov_error: f64,
    /// max within-block |deviation| / stderr.
    pub within_block_max_z: f64,
    /// per basis pair (a, b): max |Ĉov| over the d×d cross-block entries.
    pub cross_block_cov_norms: Vec<CrossBlockEntry>,
    /// max cross-block |Ĉov| / stderr.
    pub cross_block_max_z: f64,
    /// Largest per-sample |Σ_i X_{a,i}| seen (exactly Tr H = 0 up to float).
    pub max_block_sum: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossBlockEntry {
    pub basis_a: usize,
    pub basis_b: usize,
    pub max_abs_cov: f64,
    pub max_z: f64,
}

/// Estimates all block covariances of the union's Gaussian process.
pub fn simplex_blocks(
    union: &BasisUnion,
    n_samples: usize,
    rng: &mut SeededRng,
) -> Result<SimplexBlockReport> {
    check_sample_count(n_samples)?;
    let ens = Ensemble::from_union(union);
    let d = ens.dim;
    let n_bases = union.bases().len();
    let m = ens.states.len();
    let prepared = PreparedStates::new(d, &ens.states);
    let mut stream = HamiltonianStream::new(d);

    let mut samples = vec![0.0f64; n_samples * m];
    let mut max_block_sum = 0.0f64;
    for row in 0..n_samples {
        let h = stream.next(rng);
        for s in 0..m {
            samples[row * m + s] = prepared.value(h, s);
        }
        for a in 0..n_bases {
            let sum: f64 = (0..d).map(|i| samples[row * m + a * d + i]).sum();
            max_block_sum = max_block_sum.max(sum.abs());
        }
    }

    let means: Vec<f64> = (0..m)
        .map(|s| (0..n_samples).map(|r| samples[r * m + s]).sum::<f64>() / n_samples as f64)
        .collect();

    let cov_and_se = |i: usize, j: usize| -> (f64, f64) {
        let mut acc = Accumulator::new();
        for r in 0..n_samples {
            acc.push((samples[r * m + i] - means[i]) * (samples[r * m + j] - means[j]));
        }
        let est = acc.finish();
        (est.mean, est.stderr)
    };

    let mut within_err = 0.0f64;
    let mut within_z = 0.0f64;
    for a in 0..n_bases {
        for i in 0..d {
            for j in i..d {
                let (cov, se) = cov_and_se(a * d + i, a * d + j);
                let target = if i == j {
                    1.0 - 1.0 / d as f64
                } else {
                    -1.0 / d as f64
                };
                let dev = (cov - target).abs();
                within_err = within_err.max(dev);
                within_z = within_z.max(dev / se);
            }
        }
    }

    let mut cross = Vec::new();
    let mut cross_z = 0.0f64;
    for a in 0..n_bases {
        for b in (a + 1)..n_bases {
            let mut worst = 0.0f64;
            let mut worst_z = 0.0f64;
            for i in 0..d {
                for j in 0..d {
                    let (cov, se) = cov_and_se(a * d + i, b * d + j);
                    worst = worst.max(cov.abs());
                    worst_z = worst_z.max(cov.abs() / se);
                }
            }
            cross_z = cross_z.max(worst_z);
            cross.push(CrossBlockEntry {
                basis_a: a,
                basis_b: b,
                max_abs_cov: worst,
                max_z: worst_z,
            });
        }
    }

    Ok(SimplexBlockReport {
        within_block_cov_error: within_err,
        within_block_max_z: within_z,
        cross_block_cov_norms: cross,
        cross_block_max_z: cross_z,
        max_block_sum,
        n_samples,
    })
}

/// Nonnegative radial mixing law for `H = R·G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RadialSpec {
    Constant(f64),
    HalfNormal,
    Uniform01,
}

impl RadialSpec {
    pub fn mean(&self) -> f64 {
        match self {
            RadialSpec::Constant(c) => *c,
            RadialSpec::HalfNormal => (2.0 / std::f64::consts::PI).sqrt(),
            RadialSpec::Uniform01 => 0.5,
        }
    }

    fn draw(&self, rng: &mut SeededRng) -> f64 {
        match self {
            RadialSpec::Constant(c) => *c,
            RadialSpec::HalfNormal => rng.normal().abs(),
            RadialSpec::Uniform01 => rng.uniform(),
        }
    }
}

/// Both sides of the radial factorization
/// `E max Tr(RG·Q) = E R · E max Tr(G·Q)`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialReport {
    pub lhs: EstimateWithError,
    pub rhs: EstimateWithError,
    pub radial_mean: f64,
    pub pass: bool,
}

pub fn radial_width(
    ens: &Ensemble,
    radial: RadialSpec,
    n_samples: usize,
    rng: &mut SeededRng,
) -> Result<RadialReport> {
    if let RadialSpec::Constant(c) = radial {
        if c < 0.0 {
            return Err(Error::NegativeRadial(c));
        }
    }
    check_sample_count(n_samples)?;
    // The Gaussian stream is shared between both sides so that R ≡ 1
    // reproduces the plain width estimate exactly; R draws come from a
    // separate stream and never shift the Gaussian sequence.
    let mut g_rng = rng.substream(0);
    let mut r_rng = rng.substream(1);

    let prepared = PreparedStates::new(ens.dim, &ens.states);
    let mut stream = HamiltonianStream::new(ens.dim);
    let mut acc_lhs = Accumulator::new();
    let mut acc_w = Accumulator::new();
    for _ in 0..n_samples {
        let h = stream.next(&mut g_rng);
        let m = prepared.max_value(h);
        let r = radial.draw(&mut r_rng);
        acc_lhs.push(r * m);
        acc_w.push(m);
    }
    let lhs = acc_lhs.finish();
    let w = acc_w.finish();
    let rhs = EstimateWithError {
        mean: radial.mean() * w.mean,
        stderr: radial.mean() * w.stderr,
        n_samples,
    };
    let joint = (lhs.stderr.powi(2) + rhs.stderr.powi(2)).sqrt();
    Ok(RadialReport {
        lhs,
        rhs,
        radial_mean: radial.mean(),
        pass: (lhs.mean - rhs.mean).abs() <= tol::MC_SIGMA * joint,
    })
}

/// Sweep of random six-state qubit ensembles against the complete qubit
/// MUB width.
#[derive(Debug, Clone, Serialize)]
pub struct OctahedronReport {
    pub n_ensembles: usize,
    pub n_samples: usize,
    pub n_violations: usize,
    /// Largest (W(ens) − W(MUB)) / stderr over the sweep.
    pub worst_z: f64,
    pub mub_width: EstimateWithError,
}

/// One octahedron trial: a Haar-random six-state qubit ensemble paired
/// against the complete MUB under common random numbers. Streams derive
/// from `(base, trial)` alone, so trials can run in any order or in
/// parallel without changing results.
pub fn octahedron_one(
    base: &SeededRng,
    trial: usize,
    n_samples: usize,
) -> Result<PairedWidthReport> {
    let mub = Ensemble::from_mub(&crate::mub::build_prime_mub(2)?);
    let mut state_rng = base.substream(2 * trial as u64);
    let states: Vec<PureState> = (0..6)
        .map(|_| {
            PureState::normalized(vec![
                Complex64::new(state_rng.normal(), state_rng.normal()),
                Complex64::new(state_rng.normal(), state_rng.normal()),
            ])
            .expect("Gaussian qubit state normalizes")
        })
        .collect();
    let ens = Ensemble::from_states(2, states)?;
    let mut mc_rng = base.substream(2 * trial as u64 + 1);
    paired_width(&ens, &mub, n_samples, &mut mc_rng)
}

/// Draws `n_ensembles` Haar-random six-state qubit ensembles and checks
/// that none has width exceeding the complete MUB width beyond five
/// paired standard errors.
pub fn octahedron_trial(
    n_ensembles: usize,
    n_samples: usize,
    rng: &mut SeededRng,
) -> Result<OctahedronReport> {
    check_sample_count(n_samples)?;
    let mut n_violations = 0usize;
    let mut worst_z = f64::NEG_INFINITY;
    let mut mub_width: Option<EstimateWithError> = None;
    for trial in 0..n_ensembles {
        let paired = octahedron_one(rng, trial, n_samples)?;
        let z = paired.delta.mean / paired.delta.stderr;
        worst_z = worst_z.max(z);
        if z > tol::MC_SIGMA {
            n_violations += 1;
        }
        if mub_width.is_none() {
            mub_width = Some(paired.w_b);
        }
    }
    Ok(OctahedronReport {
        n_ensembles,
        n_samples,
        n_violations,
        worst_z,
        mub_width: mub_width.expect("at least one trial"),
    })
}

/// Gap between the iid maximum and the complete-MUB maximum at dimension
/// `d = 2^n`, sampled through the proof's block representation
/// `X_{a,i} = Z_{a,i} − Z̄_a` rather than dense Hamiltonians.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub n_qubits: u32,
    pub m_n_hat: EstimateWithError,
    pub w_m_hat: EstimateWithError,
    /// Paired estimate of m_N − W(M).
    pub gap: EstimateWithError,
    /// √(log d)/d, the claimed asymptotic scale.
    pub reference: f64,
}

pub fn asymptotic_gap(n_qubits: u32, n_samples: usize, rng: &mut SeededRng) -> Result<GapReport> {
    if !(1..=4).contains(&n_qubits) {
        return Err(Error::OutOfRange {
            what: "n_qubits",
            got: n_qubits as i64,
            lo: 1,
            hi: 4,
        });
    }
    check_sample_count(n_samples)?;
    let d = 1usize << n_qubits;
    let n_blocks = d + 1;
    let mut z = vec![0.0f64; d];
    let (mut acc_m, mut acc_w, mut acc_gap) =
        (Accumulator::new(), Accumulator::new(), Accumulator::new());
    for _ in 0..n_samples {
        let mut m_iid = f64::NEG_INFINITY;
        let mut m_mub = f64::NEG_INFINITY;
        for _ in 0..n_blocks {
            let mut sum = 0.0f64;
            for zi in z.iter_mut() {
                *zi = rng.normal();
                sum += *zi;
            }
            let mean = sum / d as f64;
            for &zi in z.iter() {
                m_iid = m_iid.max(zi);
                m_mub = m_mub.max(zi - mean);
            }
        }
        acc_m.push(m_iid);
        acc_w.push(m_mub);
        acc_gap.push(m_iid - m_mub);
    }
    Ok(GapReport {
        n_qubits,
        m_n_hat: acc_m.finish(),
        w_m_hat: acc_w.finish(),
        gap: acc_gap.finish(),
        reference: ((d as f64).ln()).sqrt() / d as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{build_prime_mub, build_qubit_mub, random_basis_union};
    use crate::numcore::haar_unitary;

    fn phi(x: f64) -> f64 {
        0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
    }

    /// Oracle: W(qubit MUB) = (1/√2)·∫₀^∞ [1 − (2Φ(t)−1)³] dt by Simpson.
    fn qubit_mub_width_oracle() -> f64 {
        let (a, b, steps) = (0.0f64, 10.0f64, 20_000usize);
        let h = (b - a) / steps as f64;
        let f = |t: f64| 1.0 - (2.0 * phi(t) - 1.0).powi(3);
        let mut acc = f(a) + f(b);
        for k in 1..steps {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + k as f64 * h);
        }
        (acc * h / 3.0) * std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn single_state_width_is_zero() {
        let ens = Ensemble::from_states(3, vec![PureState::basis_state(3, 0)]).unwrap();
        let mut rng = SeededRng::new(1, 0);
        let r = estimate_width(&ens, 20_000, &mut rng).unwrap();
        assert!(r.estimate.mean.abs() <= tol::MC_SIGMA * r.estimate.stderr);
    }

    #[test]
    fn duplicate_states_change_nothing() {
        let psi = PureState::basis_state(2, 0);
        let single = Ensemble::from_states(2, vec![psi.clone()]).unwrap();
        let triple = Ensemble::from_states(2, vec![psi.clone(), psi.clone(), psi]).unwrap();
        let a = estimate_width(&single, 5_000, &mut SeededRng::new(7, 3)).unwrap();
        let b = estimate_width(&triple, 5_000, &mut SeededRng::new(7, 3)).unwrap();
        assert_eq!(a.estimate.mean, b.estimate.mean);
    }

    #[test]
    fn qubit_mub_width_matches_quadrature() {
        let oracle = qubit_mub_width_oracle();
        assert!((oracle - 0.938).abs() < 5e-3, "oracle sanity: {oracle}");
        let ens = Ensemble::from_mub(&build_prime_mub(2).unwrap());
        let mut rng = SeededRng::new(11, 0);
        let r = estimate_width(&ens, 100_000, &mut rng).unwrap();
        assert!(
            (r.estimate.mean - oracle).abs() <= tol::MC_SIGMA * r.estimate.stderr,
            "mc {} ± {} vs quadrature {}",
            r.estimate.mean,
            r.estimate.stderr,
            oracle
        );
    }

    #[test]
    fn min_expectation_mirrors_width() {
        let ens = Ensemble::from_mub(&build_prime_mub(2).unwrap());
        let w = estimate_width(&ens, 50_000, &mut SeededRng::new(3, 1)).unwrap();
        let m = estimate_min_expectation(&ens, 50_000, &mut SeededRng::new(3, 2)).unwrap();
        let joint = (w.estimate.stderr.powi(2) + m.estimate.stderr.powi(2)).sqrt();
        assert!((w.estimate.mean + m.estimate.mean).abs() <= tol::MC_SIGMA * joint);

        let single = Ensemble::from_states(2, vec![PureState::basis_state(2, 1)]).unwrap();
        let m0 = estimate_min_expectation(&single, 20_000, &mut SeededRng::new(3, 3)).unwrap();
        assert!(m0.estimate.mean.abs() <= tol::MC_SIGMA * m0.estimate.stderr);

        let oracle = qubit_mub_width_oracle();
        assert!((m.estimate.mean + oracle).abs() <= tol::MC_SIGMA * m.estimate.stderr);
    }

    #[test]
    fn cdf_tails_and_closed_form_point() {
        let ens = Ensemble::from_mub(&build_prime_mub(2).unwrap());
        let mut grid = vec![-0.5];
        grid.extend(CdfCurve::default_grid());
        grid.push(50.0);
        let curve = max_cdf(&ens, &grid, 100_000, &mut SeededRng::new(5, 0)).unwrap();
        // Full basis unions have nonnegative maxima: zero mass below 0.
        assert_eq!(curve.probs[0], 0.0);
        assert_eq!(*curve.probs.last().unwrap(), 1.0);
        for w in curve.probs.windows(2) {
            assert!(w[0] <= w[1]);
        }

        // Closed form at t = 1: P(M ≤ 1) = (2Φ(√2) − 1)³.
        let idx = curve
            .grid
            .iter()
            .position(|&t| (t - 1.0).abs() < 1e-12)
            .unwrap();
        let target = (2.0 * phi(std::f64::consts::SQRT_2) - 1.0).powi(3);
        let se = curve.stderr(idx);
        assert!(
            (curve.probs[idx] - target).abs() <= tol::MC_SIGMA * se,
            "p {} vs {}",
            curve.probs[idx],
            target
        );

        let unsorted = vec![0.0, -1.0, 1.0];
        assert!(max_cdf(&ens, &unsorted, 1_000, &mut SeededRng::new(5, 1)).is_err());
    }

    #[test]
    fn dominance_self_and_union_vs_mub() {
        let mub = Ensemble::from_mub(&build_prime_mub(3).unwrap());
        let grid = CdfCurve::default_grid();
        let curve_m = max_cdf(&mub, &grid, 40_000, &mut SeededRng::new(6, 0)).unwrap();
        assert!(dominance_check(&curve_m, &curve_m, None).unwrap().pass);

        let mut rng = SeededRng::new(6, 1);
        for k in 0..3 {
            let union = random_basis_union(3, &mut rng).unwrap();
            let ens = Ensemble::from_union(&union);
            let curve_s = max_cdf(&ens, &grid, 40_000, &mut rng.substream(100 + k)).unwrap();
            let rep = dominance_check(&curve_s, &curve_m, None).unwrap();
            assert!(rep.pass, "violations: {:?}", rep.violations);
        }
    }

    #[test]
    fn reversed_dominance_fails_for_correlated_union() {
        // Union with two identical bases: its maximum is stochastically
        // strictly below the MUB maximum somewhere, so the reversed check
        // must produce violations.
        let mut rng = SeededRng::new(8, 0);
        let b = haar_unitary(2, &mut rng).unwrap();
        let other = haar_unitary(2, &mut rng).unwrap();
        let union = BasisUnion::from_bases(2, vec![b.clone(), b, other]).unwrap();
        let ens_s = Ensemble::from_union(&union);
        let ens_m = Ensemble::from_mub(&build_prime_mub(2).unwrap());
        let grid = CdfCurve::default_grid();
        let curve_s = max_cdf(&ens_s, &grid, 60_000, &mut SeededRng::new(8, 1)).unwrap();
        let curve_m = max_cdf(&ens_m, &grid, 60_000, &mut SeededRng::new(8, 2)).unwrap();
        let reversed = dominance_check(&curve_m, &curve_s, None).unwrap();
        assert!(!reversed.pass, "expected violations in the reversed check");
    }

    #[test]
    fn simplex_blocks_mub_and_duplicate() {
        let mub = build_prime_mub(3).unwrap();
        let union = BasisUnion::from_mub(&mub);
        let rep = simplex_blocks(&union, 40_000, &mut SeededRng::new(9, 0)).unwrap();
        assert!(rep.cross_block_max_z <= tol::MC_SIGMA, "{rep:?}");
        assert!(rep.within_block_max_z <= tol::MC_SIGMA, "{rep:?}");
        assert!(rep.max_block_sum < 1e-10);

        // Duplicate basis: the (0,1) cross block reproduces the within
        // pattern, so its max |cov| is near 1 − 1/d.
        let mut rng = SeededRng::new(9, 1);
        let b = haar_unitary(3, &mut rng).unwrap();
        let c = haar_unitary(3, &mut rng).unwrap();
        let d = haar_unitary(3, &mut rng).unwrap();
        let dup = BasisUnion::from_bases(3, vec![b.clone(), b, c, d]).unwrap();
        let rep = simplex_blocks(&dup, 40_000, &mut SeededRng::new(9, 2)).unwrap();
        let pair01 = rep
            .cross_block_cov_norms
            .iter()
            .find(|e| e.basis_a == 0 && e.basis_b == 1)
            .unwrap();
        assert!((pair01.max_abs_cov - (1.0 - 1.0 / 3.0)).abs() < 0.05);
    }

    #[test]
    fn simplex_frame_gram_identity() {
        for d in 2..=6usize {
            let frame = SimplexFrame::new(d).unwrap();
            for (i, vi) in frame.vertices().iter().enumerate() {
                for (j, vj) in frame.vertices().iter().enumerate() {
                    let dot: f64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
                    let target = if i == j {
                        1.0 - 1.0 / d as f64
                    } else {
                        -1.0 / d as f64
                    };
                    assert!((dot - target).abs() < 1e-12, "d={d} i={i} j={j}");
                }
            }
            let mut sum = vec![0.0f64; d - 1];
            for v in frame.vertices() {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
            }
            assert!(sum.iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn simplex_sampler_agrees_with_centered_blocks() {
        // v_i·Y with Y ~ N(0, I_{d−1}) has the same law as Z_i − Z̄.
        let d = 3usize;
        let frame = SimplexFrame::new(d).unwrap();
        let mut rng = SeededRng::new(10, 0);
        let n = 200_000;
        let mut acc_frame = Accumulator::new();
        let mut acc_blocks = Accumulator::new();
        let mut y = vec![0.0f64; d - 1];
        let mut z = vec![0.0f64; d];
        for _ in 0..n {
            for yi in y.iter_mut() {
                *yi = rng.normal();
            }
            acc_frame.push(frame.support(&y));
            let mut sum = 0.0;
            for zi in z.iter_mut() {
                *zi = rng.normal();
                sum += *zi;
            }
            let mean = sum / d as f64;
            acc_blocks.push(
                z.iter()
                    .map(|zi| zi - mean)
                    .fold(f64::NEG_INFINITY, f64::max),
            );
        }
        let a = acc_frame.finish();
        let b = acc_blocks.finish();
        let joint = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() <= tol::MC_SIGMA * joint);
    }

    #[test]
    fn radial_factorization() {
        let ens = Ensemble::from_mub(&build_prime_mub(2).unwrap());
        let oracle = qubit_mub_width_oracle();

        // R ≡ 1 reproduces the width estimate exactly.
        let rep = radial_width(
            &ens,
            RadialSpec::Constant(1.0),
            20_000,
            &mut SeededRng::new(12, 0),
        )
        .unwrap();
        assert_eq!(rep.lhs.mean, rep.rhs.mean);

        let rep = radial_width(
            &ens,
            RadialSpec::Constant(2.0),
            50_000,
            &mut SeededRng::new(12, 1),
        )
        .unwrap();
        assert!(rep.pass);
        assert!((rep.lhs.mean - 2.0 * oracle).abs() <= tol::MC_SIGMA * rep.lhs.stderr * 2.0);

        let rep = radial_width(
            &ens,
            RadialSpec::HalfNormal,
            100_000,
            &mut SeededRng::new(12, 2),
        )
        .unwrap();
        assert!(rep.pass);
        let target = (2.0 / std::f64::consts::PI).sqrt() * oracle;
        assert!(
            (rep.lhs.mean - target).abs() <= tol::MC_SIGMA * rep.lhs.stderr,
            "lhs {} target {}",
            rep.lhs.mean,
            target
        );

        assert!(matches!(
            radial_width(
                &ens,
                RadialSpec::Constant(-1.0),
                1_000,
                &mut SeededRng::new(12, 3)
            ),
            Err(Error::NegativeRadial(_))
        ));
    }

    #[test]
    fn octahedron_small_sweep() {
        let rep = octahedron_trial(20, 20_000, &mut SeededRng::new(13, 0)).unwrap();
        assert_eq!(rep.n_violations, 0, "{rep:?}");

        // The MUB itself ties with itself: paired delta is exactly zero.
        let mub = Ensemble::from_mub(&build_prime_mub(2).unwrap());
        let paired = paired_width(&mub, &mub, 5_000, &mut SeededRng::new(13, 1)).unwrap();
        assert_eq!(paired.delta.mean, 0.0);

        // Six copies of one state have width ≈ 0 ≤ MUB width.
        let psi = PureState::basis_state(2, 0);
        let copies = Ensemble::from_states(2, vec![psi; 6]).unwrap();
        let paired = paired_width(&copies, &mub, 20_000, &mut SeededRng::new(13, 2)).unwrap();
        assert!(paired.delta.mean < 0.0);
    }

    #[test]
    fn gap_probe_block_sampler() {
        let rep = asymptotic_gap(1, 200_000, &mut SeededRng::new(14, 0)).unwrap();
        assert!(rep.gap.mean > tol::MC_SIGMA * rep.gap.stderr, "{rep:?}");

        // Cross-validation: block sampler against the dense estimator.
        for n in 1..=2u32 {
            let block = asymptotic_gap(n, 150_000, &mut SeededRng::new(14, n as u64)).unwrap();
            let ens = Ensemble::from_mub(&build_qubit_mub(n).unwrap());
            let dense =
                estimate_width(&ens, 100_000, &mut SeededRng::new(14, 10 + n as u64)).unwrap();
            let joint = (block.w_m_hat.stderr.powi(2) + dense.estimate.stderr.powi(2)).sqrt();
            assert!(
                (block.w_m_hat.mean - dense.estimate.mean).abs() <= tol::MC_SIGMA * joint,
                "n={n}: block {} vs dense {}",
                block.w_m_hat.mean,
                dense.estimate.mean
            );
        }

        // Sudakov–Fernique sanity: any ensemble of N states is bounded by
        // the iid maximum estimate.
        let mub = Ensemble::from_mub(&build_prime_mub(2).unwrap());
        let w = estimate_width(&mub, 100_000, &mut SeededRng::new(14, 20)).unwrap();
        let gap1 = asymptotic_gap(1, 200_000, &mut SeededRng::new(14, 21)).unwrap();
        let joint = (w.estimate.stderr.powi(2) + gap1.m_n_hat.stderr.powi(2)).sqrt();
        assert!(w.estimate.mean <= gap1.m_n_hat.mean + tol::MC_SIGMA * joint);

        assert!(asymptotic_gap(5, 1_000, &mut SeededRng::new(14, 30)).is_err());
    }

    #[test]
    fn empty_ensemble_rejected() {
        assert!(matches!(
            Ensemble::from_states(2, vec![]),
            Err(Error::EmptyEnsemble)
        ));
    }

    #[test]
    fn undersized_sample_counts_rejected() {
        let ens = Ensemble::from_states(2, vec![PureState::basis_state(2, 0)]).unwrap();
        assert!(matches!(
            estimate_width(&ens, 99, &mut SeededRng::new(0, 0)),
            Err(Error::OutOfRange { .. })
        ));
    }
}
