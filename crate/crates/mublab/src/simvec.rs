//! Dense statevector simulator.
//!
//! Qubit 0 is the least significant bit of the amplitude index. Rotation
//! conventions: `RX(θ) = exp(−iθX/2)` per qubit, transverse mixer
//! `exp(−iβ·ΣX_i)` (one `RX(2β)` per qubit). States are mutated in place;
//! a state is owned by exactly one worker at a time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::DiagonalPhaseCircuit;
use crate::numcore::{hermitian_eigen, ComplexMatrix, PureState};
use crate::tol;

/// Dense complex amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_pure_state(&self) -> Result<PureState> {
        PureState::new(self.amps.clone())
    }

    pub fn from_pure_state(n_qubits: u32, state: &PureState) -> Result<Self> {
        if state.dim() != 1usize << n_qubits {
            return Err(Error::DimMismatch(state.dim(), 1usize << n_qubits));
        }
        Ok(Self {
            n_qubits,
            amps: state.amplitudes().to_vec(),
        })
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Computational basis state |b⟩.
pub fn prepare_basis(n_qubits: u32, b: u64) -> Result<StateVector> {
    let dim = 1usize << n_qubits;
    if b >= dim as u64 {
        return Err(Error::OutOfRange {
            what: "basis label b",
            got: b as i64,
            lo: 0,
            hi: dim as i64 - 1,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[b as usize] = Complex64::new(1.0, 0.0);
    Ok(StateVector { n_qubits, amps })
}

/// Uniform superposition |+⟩^⊗n.
pub fn prepare_plus(n_qubits: u32) -> StateVector {
    let dim = 1usize << n_qubits;
    let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    StateVector {
        n_qubits,
        amps: vec![a; dim],
    }
}

/// `RX(θ) = exp(−iθX/2)` on one qubit.
pub fn apply_rx(state: &mut StateVector, qubit: u32, theta: f64) {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let mis = Complex64::new(0.0, -s);
    let mask = 1usize << qubit;
    let dim = state.amps.len();
    for x in 0..dim {
        if x & mask != 0 {
            continue;
        }
        let y = x | mask;
        let a = state.amps[x];
        let b = state.amps[y];
        state.amps[x] = a * c + b * mis;
        state.amps[y] = a * mis + b * c;
    }
}

/// One `RX(μ_i)` per qubit.
pub fn apply_rx_all(state: &mut StateVector, mus: &[f64]) -> Result<()> {
    if mus.len() != state.n_qubits as usize {
        return Err(Error::LengthMismatch {
            expected: state.n_qubits as usize,
            got: mus.len(),
        });
    }
    for (q, &mu) in mus.iter().enumerate() {
        apply_rx(state, q as u32, mu);
    }
    Ok(())
}

/// Hadamard on one qubit.
pub fn apply_hadamard(state: &mut StateVector, qubit: u32) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mask = 1usize << qubit;
    let dim = state.amps.len();
    for x in 0..dim {
        if x & mask != 0 {
            continue;
        }
        let y = x | mask;
        let a = state.amps[x];
        let b = state.amps[y];
        state.amps[x] = (a + b) * s;
        state.amps[y] = (a - b) * s;
    }
}

/// Applies the family circuit `C_r = D_r · H^⊗n`: Hadamards first, then
/// the diagonal phase layer.
pub fn apply_family_circuit(state: &mut StateVector, circuit: &DiagonalPhaseCircuit) -> Result<()> {
    if circuit.n_qubits() != state.n_qubits {
        return Err(Error::DimMismatch(
            circuit.n_qubits() as usize,
            state.n_qubits as usize,
        ));
    }
    for q in 0..state.n_qubits {
        apply_hadamard(state, q);
    }
    let phases = circuit.phases();
    for (a, p) in state.amps.iter_mut().zip(&phases) {
        *a *= p;
    }
    Ok(())
}

/// A diagonal cost function: value `c(x)` per computational index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagonalCost {
    n_qubits: u32,
    values: Vec<f64>,
    label: String,
}

impl DiagonalCost {
    pub fn new(n_qubits: u32, values: Vec<f64>) -> Result<Self> {
        Self::labelled(n_qubits, values, String::new())
    }

    pub fn labelled(n_qubits: u32, values: Vec<f64>, label: String) -> Result<Self> {
        if values.len() != 1usize << n_qubits {
            return Err(Error::LengthMismatch {
                expected: 1usize << n_qubits,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::EncodingInvariant(
                "diagonal cost entries must be finite".into(),
            ));
        }
        Ok(Self {
            n_qubits,
            values,
            label,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `exp(−iγH_C)` for diagonal `H_C`.
pub fn evolve_cost(state: &mut StateVector, cost: &DiagonalCost, gamma: f64) -> Result<()> {
    if cost.values.len() != state.amps.len() {
        return Err(Error::LengthMismatch {
            expected: state.amps.len(),
            got: cost.values.len(),
        });
    }
    for (a, &c) in state.amps.iter_mut().zip(&cost.values) {
        *a *= Complex64::from_polar(1.0, -gamma * c);
    }
    Ok(())
}

/// Transverse mixer `exp(−iβ·ΣX_i)`: one `RX(2β)` per qubit.
pub fn evolve_xmixer(state: &mut StateVector, beta: f64) {
    for q in 0..state.n_qubits {
        apply_rx(state, q, 2.0 * beta);
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// One weighted Pauli word.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub word: Vec<Pauli>,
}

impl PauliTerm {
    fn masks(&self) -> (usize, usize, u32) {
        let mut flip = 0usize;
        let mut zy = 0usize;
        let mut y_count = 0u32;
        for (q, p) in self.word.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    zy |= 1 << q;
                    y_count += 1;
                }
                Pauli::Z => zy |= 1 << q,
            }
        }
        (flip, zy, y_count)
    }
}

fn i_power(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Real-weighted sum of Pauli words; Hermitian by construction.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PauliSum {
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(terms: Vec<PauliTerm>) -> Self {
        Self { terms }
    }

    pub fn push(&mut self, coeff: f64, word: Vec<Pauli>) {
        self.terms.push(PauliTerm { coeff, word });
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coeff: t.coeff * c,
                    word: t.word.clone(),
                })
                .collect(),
        }
    }

    /// Dense matrix on `n_qubits` qubits.
    pub fn to_dense(&self, n_qubits: u32) -> Result<ComplexMatrix> {
        let dim = 1usize << n_qubits;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for term in &self.terms {
            if term.word.len() != n_qubits as usize {
                return Err(Error::LengthMismatch {
                    expected: n_qubits as usize,
                    got: term.word.len(),
                });
            }
            let (flip, zy, y_count) = term.masks();
            let phase0 = i_power(y_count);
            for x in 0..dim {
                let sign = if (x & zy).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                let y = x ^ flip;
                m[(y, x)] += phase0 * sign * term.coeff;
            }
        }
        Ok(m)
    }
}

fn pauli_expectation(state: &StateVector, h: &PauliSum) -> Result<f64> {
    let n = state.n_qubits as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for term in &h.terms {
        if term.word.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: term.word.len(),
            });
        }
        let (flip, zy, y_count) = term.masks();
        let phase0 = i_power(y_count);
        let mut term_acc = Complex64::new(0.0, 0.0);
        for x in 0..state.amps.len() {
            let sign = if (x & zy).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let y = x ^ flip;
            term_acc += state.amps[y].conj() * state.amps[x] * sign;
        }
        acc += term_acc * phase0 * term.coeff;
    }
    debug_assert!(acc.im.abs() <= tol::EXACT * (1.0 + acc.re.abs()));
    Ok(acc.re)
}

/// Precomputed eigendecomposition of a Pauli sum for repeated evolutions.
#[derive(Debug, Clone)]
pub struct PauliEvolver {
    n_qubits: u32,
    values: Vec<f64>,
    vectors: ComplexMatrix,
}

impl PauliEvolver {
    /// Dense eigendecomposition; bounded to n ≤ 8.
    pub fn new(h: &PauliSum, n_qubits: u32) -> Result<Self> {
        if n_qubits > 8 {
            return Err(Error::UnsupportedDimension(
                n_qubits as usize,
                "dense Pauli-sum exponentials are bounded to n <= 8",
            ));
        }
        let dense = h.to_dense(n_qubits)?;
        let (values, vectors) = hermitian_eigen(&dense)?;
        Ok(Self {
            n_qubits,
            values,
            vectors,
        })
    }

    /// `exp(−itH)|ψ⟩`.
    pub fn evolve(&self, state: &mut StateVector, t: f64) -> Result<()> {
        if state.n_qubits != self.n_qubits {
            return Err(Error::DimMismatch(
                state.n_qubits as usize,
                self.n_qubits as usize,
            ));
        }
        let w = self.vectors.adjoint().matvec(&state.amps);
        let rotated: Vec<Complex64> = w
            .iter()
            .zip(&self.values)
            .map(|(c, &l)| c * Complex64::from_polar(1.0, -t * l))
            .collect();
        state.amps = self.vectors.matvec(&rotated);
        Ok(())
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values[0]
    }
}

/// One-shot `exp(−itH)|ψ⟩` via dense eigendecomposition (n ≤ 8).
pub fn evolve_pauli_sum(state: &mut StateVector, h: &PauliSum, t: f64) -> Result<()> {
    let ev = PauliEvolver::new(h, state.n_qubits)?;
    ev.evolve(state, t)
}

/// Anything with a real expectation value on a state vector.
pub trait Observable {
    fn expectation_of(&self, state: &StateVector) -> Result<f64>;
}

impl Observable for DiagonalCost {
    fn expectation_of(&self, state: &StateVector) -> Result<f64> {
        if self.values.len() != state.amps.len() {
            return Err(Error::LengthMismatch {
                expected: state.amps.len(),
                got: self.values.len(),
            });
        }
        Ok(state
            .amps
            .iter()
            .zip(&self.values)
            .map(|(a, &c)| a.norm_sqr() * c)
            .sum())
    }
}

impl Observable for PauliSum {
    fn expectation_of(&self, state: &StateVector) -> Result<f64> {
        pauli_expectation(state, self)
    }
}

/// Real expectation ⟨ψ|H|ψ⟩.
pub fn expectation(state: &StateVector, observable: &impl Observable) -> Result<f64> {
    observable.expectation_of(state)
}

/// |amplitude|² per computational index; sums to 1.
pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.amps.iter().map(|a| a.norm_sqr()).collect()
}

/// QAOA angle set: `p` gammas, `p` betas, and optional per-qubit mus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleVector {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub mus: Option<Vec<f64>>,
}

impl AngleVector {
    pub fn validate(&self, depth: usize, n_qubits: u32) -> Result<()> {
        if self.gammas.len() != depth {
            return Err(Error::LengthMismatch {
                expected: depth,
                got: self.gammas.len(),
            });
        }
        if self.betas.len() != depth {
            return Err(Error::LengthMismatch {
                expected: depth,
                got: self.betas.len(),
            });
        }
        if let Some(mus) = &self.mus {
            if mus.len() != n_qubits as usize {
                return Err(Error::LengthMismatch {
                    expected: n_qubits as usize,
                    got: mus.len(),
                });
            }
        }
        Ok(())
    }
}
