//! Complete mutually unbiased basis systems.
//!
//! Two constructions are provided: Pauli eigenbases / Weyl–Heisenberg phases
//! for prime dimensions, and the finite-field quadratic-phase circuit form
//! `C_r = D_r · H^⊗n` for qubit registers. Construction validity is always
//! enforced by [`verify_unbiasedness`], never assumed.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::numcore::{haar_unitary, ComplexMatrix, PureState, SeededRng};
use crate::tol;

/// GF(2^n) arithmetic on bit-packed polynomials.
pub(crate) mod gf2 {
    /// Degree of a nonzero polynomial.
    fn degree(p: u64) -> u32 {
        63 - p.leading_zeros()
    }

    /// Remainder of `a` modulo `b` over GF(2).
    fn poly_rem(mut a: u64, b: u64) -> u64 {
        let db = degree(b);
        while a != 0 && degree(a) >= db {
            a ^= b << (degree(a) - db);
        }
        a
    }

    /// Carry-less product reduced modulo `f`.
    pub fn mul_mod(a: u64, b: u64, f: u64) -> u64 {
        let mut a = poly_rem(a, f);
        let mut b = poly_rem(b, f);
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> degree(f) != 0 {
                a ^= f;
            }
        }
        acc
    }

    fn pow_mod(base: u64, mut e: u128, f: u64) -> u64 {
        let mut base = poly_rem(base, f);
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, f);
            }
            base = mul_mod(base, base, f);
            e >>= 1;
        }
        acc
    }

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let r = poly_rem(a, b);
            a = b;
            b = r;
        }
        a
    }

    /// Irreducibility over GF(2): x^(2^n) ≡ x mod f, and
    /// gcd(x^(2^(n/q)) − x, f) = 1 for every prime divisor q of n.
    fn is_irreducible(f: u64, n: u32) -> bool {
        let x = 2u64;
        if pow_mod(x, 1u128 << n, f) != poly_rem(x, f) {
            return false;
        }
        let mut m = n;
        let mut q = 2;
        let mut primes = Vec::new();
        while q * q <= m {
            if m % q == 0 {
                primes.push(q);
                while m % q == 0 {
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        for q in primes {
            let xp = pow_mod(x, 1u128 << (n / q), f);
            if gcd(xp ^ x, f) != 1 {
                return false;
            }
        }
        true
    }

    /// Lexicographically smallest irreducible polynomial of degree `n`.
    ///
    /// For n = 1..4 this reproduces the published minimal polynomials
    /// x+1, x²+x+1, x³+x+1, x⁴+x+1.
    pub fn irreducible_poly(n: u32) -> u64 {
        assert!((1..=16).contains(&n));
        let lead = 1u64 << n;
        for tail in 1..lead {
            let f = lead | tail;
            if f & 1 == 0 {
                continue; // reducible: x divides
            }
            if is_irreducible(f, n) {
                return f;
            }
        }
        unreachable!("an irreducible polynomial of degree {n} exists")
    }

    /// Field trace Tr(z) = z + z² + z⁴ + … + z^(2^(n−1)), valued in {0, 1}.
    pub fn trace(z: u64, n: u32, f: u64) -> u64 {
        let mut acc = 0u64;
        let mut t = z;
        for _ in 0..n {
            acc ^= t;
            t = mul_mod(t, t, f);
        }
        debug_assert!(acc <= 1, "trace lands in the base field");
        acc
    }
}

/// Which construction produced a [`MubSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionTag {
    Prime,
    QubitRegister,
}

/// A complete system of d+1 orthonormal bases; columns are basis states.
#[derive(Debug, Clone)]
pub struct MubSystem {
    dim: usize,
    bases: Vec<ComplexMatrix>,
    tag: ConstructionTag,
}

impl MubSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases(&self) -> &[ComplexMatrix] {
        &self.bases
    }

    pub fn construction_tag(&self) -> ConstructionTag {
        self.tag
    }

    pub fn states(&self) -> Vec<PureState> {
        let mut out = Vec::with_capacity(self.bases.len() * self.dim);
        for b in &self.bases {
            for j in 0..self.dim {
                out.push(PureState::new(b.column(j)).expect("basis columns are unit norm"));
            }
        }
        out
    }

    /// JSON export for cross-implementation golden tests:
    /// `{ d, construction_tag, bases: [[[re,im],...],...] }`, one entry per
    /// basis, each basis a list of its states, each state a list of
    /// `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let bases: Vec<_> = self
            .bases
            .iter()
            .map(|b| {
                (0..self.dim)
                    .map(|j| {
                        b.column(j)
                            .iter()
                            .map(|z| json!([z.re, z.im]))
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        json!({
            "d": self.dim,
            "construction_tag": match self.tag {
                ConstructionTag::Prime => "prime",
                ConstructionTag::QubitRegister => "qubit_register",
            },
            "bases": bases,
        })
    }
}

/// Index of one state in the qubit-register family construction:
/// the state `C_r |b⟩` on `n_qubits` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyIndex {
    n_qubits: u32,
    r: u64,
    b: u64,
}

impl FamilyIndex {
    pub fn new(n_qubits: u32, r: u64, b: u64) -> Result<Self> {
        let max = 1u64 << n_qubits;
        if r >= max {
            return Err(Error::OutOfRange {
                what: "family index r",
                got: r as i64,
                lo: 0,
                hi: max as i64 - 1,
            });
        }
        if b >= max {
            return Err(Error::OutOfRange {
                what: "computational label b",
                got: b as i64,
                lo: 0,
                hi: max as i64 - 1,
            });
        }
        Ok(Self { n_qubits, r, b })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn b(&self) -> u64 {
        self.b
    }
}

/// The diagonal phase layer `D_r` of a family circuit: entry `x` is
/// `i^(exponent[x])` with exponents mod 4.
#[derive(Debug, Clone)]
pub struct DiagonalPhaseCircuit {
    n_qubits: u32,
    phase_exponents: Vec<u8>,
}

impl DiagonalPhaseCircuit {
    /// Phases of family `r`: the quadratic form `x^T M_r x` evaluated over
    /// the integers and reduced mod 4, where `M_r` is the symmetric binary
    /// matrix of the GF(2^n) multiplication-by-r map contracted with the
    /// field trace form.
    pub fn for_family(n_qubits: u32, r: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 16 {
            return Err(Error::OutOfRange {
                what: "n_qubits",
                got: n_qubits as i64,
                lo: 1,
                hi: 16,
            });
        }
        if r >= (1u64 << n_qubits) {
            return Err(Error::OutOfRange {
                what: "family index r",
                got: r as i64,
                lo: 0,
                hi: (1i64 << n_qubits) - 1,
            });
        }
        let n = n_qubits as usize;
        let f = gf2::irreducible_poly(n_qubits);
        // alpha^(j+k) for the polynomial basis 1, x, x², …
        let mut alpha_pows = vec![1u64; 2 * n];
        for i in 1..2 * n {
            alpha_pows[i] = gf2::mul_mod(alpha_pows[i - 1], 2, f);
        }
        let mut m = vec![vec![0u8; n]; n];
        for j in 0..n {
            for k in 0..n {
                m[j][k] = gf2::trace(gf2::mul_mod(r, alpha_pows[j + k], f), n_qubits, f) as u8;
            }
        }
        let size = 1usize << n;
        let mut exps = vec![0u8; size];
        for (x, e) in exps.iter_mut().enumerate() {
            let mut q = 0u32;
            for j in 0..n {
                if (x >> j) & 1 == 0 {
                    continue;
                }
                q += m[j][j] as u32;
                for k in (j + 1)..n {
                    if (x >> k) & 1 == 1 {
                        q += 2 * m[j][k] as u32;
                    }
                }
            }
            *e = (q % 4) as u8;
        }
        Ok(Self {
            n_qubits,
            phase_exponents: exps,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn phase_exponents(&self) -> &[u8] {
        &self.phase_exponents
    }

    /// i^exponent for every computational index.
    pub fn phases(&self) -> Vec<Complex64> {
        self.phase_exponents
            .iter()
            .map(|&e| match e {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            })
            .collect()
    }
}

fn is_prime(d: usize) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Complete MUB system in prime dimension: Z/X/Y eigenbases for d = 2,
/// the Weyl–Heisenberg phase construction `ω^(a·j² + i·j)/√d` for odd
/// primes. Supported for prime d ≤ 31.
pub fn build_prime_mub(d: usize) -> Result<MubSystem> {
    if !is_prime(d) || d > 31 {
        return Err(Error::UnsupportedDimension(
            d,
            "complete prime construction needs a prime d <= 31",
        ));
    }
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(ComplexMatrix::identity(d));
    if d == 2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        bases.push(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (1, 1) => Complex64::new(-s, 0.0),
            _ => Complex64::new(s, 0.0),
        }));
        bases.push(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, _) => Complex64::new(s, 0.0),
            (1, 0) => Complex64::new(0.0, s),
            _ => Complex64::new(0.0, -s),
        }));
    } else {
        let scale = 1.0 / (d as f64).sqrt();
        for a in 0..d {
            let basis = ComplexMatrix::from_fn(d, d, |j, i| {
                let exponent = (a * j * j + i * j) % d;
                let angle = 2.0 * std::f64::consts::PI * exponent as f64 / d as f64;
                Complex64::from_polar(scale, angle)
            });
            bases.push(basis);
        }
    }
    Ok(MubSystem {
        dim: d,
        bases,
        tag: ConstructionTag::Prime,
    })
}

/// Dense `H^⊗n`.
pub fn hadamard_n(n_qubits: u32) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h1 = ComplexMatrix::from_fn(2, 2, |i, j| {
        if i == 1 && j == 1 {
            Complex64::new(-s, 0.0)
        } else {
            Complex64::new(s, 0.0)
        }
    });
    let mut h = ComplexMatrix::identity(1);
    for _ in 0..n_qubits {
        h = h.kron(&h1);
    }
    h
}

/// Dense family basis matrix `C_r = D_r · H^⊗n`.
pub fn family_matrix(n_qubits: u32, r: u64) -> Result<ComplexMatrix> {
    let d = DiagonalPhaseCircuit::for_family(n_qubits, r)?;
    let phases = d.phases();
    let h = hadamard_n(n_qubits);
    let dim = 1usize << n_qubits;
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| phases[i] * h[(i, j)]))
}

/// Complete MUB system on `n` qubits: the computational basis plus the 2^n
/// families `D_r · H^⊗n`. Dense verification bounds this to n ≤ 4.
pub fn build_qubit_mub(n: u32) -> Result<MubSystem> {
    if !(1..=4).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n_qubits",
            got: n as i64,
            lo: 1,
            hi: 4,
        });
    }
    let dim = 1usize << n;
    let mut bases = Vec::with_capacity(dim + 1);
    bases.push(ComplexMatrix::identity(dim));
    for r in 0..dim as u64 {
        bases.push(family_matrix(n, r)?);
    }
    let sys = MubSystem {
        dim,
        bases,
        tag: ConstructionTag::QubitRegister,
    };
    let report = verify_unbiasedness(&sys, tol::UNBIASED);
    if !report.pass {
        return Err(Error::EncodingInvariant(format!(
            "qubit MUB construction failed verification: overlap dev {:.3e}, orthonormality dev {:.3e}",
            report.max_overlap_deviation, report.max_orthonormality_deviation
        )));
    }
    Ok(sys)
}

/// The state `D_r · H^⊗n |b⟩` as a dense amplitude vector.
pub fn family_state(fi: FamilyIndex) -> PureState {
    let circuit = DiagonalPhaseCircuit::for_family(fi.n_qubits, fi.r)
        .expect("FamilyIndex construction already validated the range");
    let dim = 1usize << fi.n_qubits;
    let scale = 1.0 / (dim as f64).sqrt();
    let phases = circuit.phases();
    let amps = (0..dim)
        .map(|x| {
            let sign = if ((x as u64) & fi.b).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            phases[x] * scale * sign
        })
        .collect();
    PureState::new(amps).expect("family states are unit norm by construction")
}

/// Deviations of a basis system from exact unbiasedness.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnbiasednessReport {
    pub max_overlap_deviation: f64,
    pub max_orthonormality_deviation: f64,
    pub pass: bool,
    pub tol: f64,
}

/// Scans every intra-basis pair for orthonormality and every cross-basis
/// pair for `|⟨ψ|φ⟩|² = 1/d`.
pub fn verify_unbiasedness(sys: &MubSystem, tol: f64) -> UnbiasednessReport {
    let (overlap, ortho) = scan_bases(sys.dim, &sys.bases);
    UnbiasednessReport {
        max_overlap_deviation: overlap,
        max_orthonormality_deviation: ortho,
        pass: overlap <= tol && ortho <= tol,
        tol,
    }
}

fn scan_bases(dim: usize, bases: &[ComplexMatrix]) -> (f64, f64) {
    let inv_d = 1.0 / dim as f64;
    let mut overlap_dev = 0.0f64;
    let mut ortho_dev = 0.0f64;
    let columns: Vec<Vec<Vec<Complex64>>> = bases
        .iter()
        .map(|b| (0..dim).map(|j| b.column(j)).collect())
        .collect();
    for (a, ca) in columns.iter().enumerate() {
        for (b, cb) in columns.iter().enumerate().skip(a) {
            for (i, vi) in ca.iter().enumerate() {
                for (j, vj) in cb.iter().enumerate() {
                    if a == b && j < i {
                        continue;
                    }
                    let ip: Complex64 = vi.iter().zip(vj).map(|(x, y)| x.conj() * y).sum();
                    if a == b {
                        let target = if i == j { 1.0 } else { 0.0 };
                        ortho_dev = ortho_dev.max((ip - Complex64::new(target, 0.0)).norm());
                    } else {
                        overlap_dev = overlap_dev.max((ip.norm_sqr() - inv_d).abs());
                    }
                }
            }
        }
    }
    (overlap_dev, ortho_dev)
}

/// A labelled union of exactly d+1 orthonormal bases, repetition allowed.
#[derive(Debug, Clone)]
pub struct BasisUnion {
    dim: usize,
    bases: Vec<ComplexMatrix>,
    labels: Vec<usize>,
}

impl BasisUnion {
    /// Explicit constructor; validates each matrix is unitary and that the
    /// union holds exactly d+1 bases.
    pub fn from_bases(dim: usize, bases: Vec<ComplexMatrix>) -> Result<Self> {
        if bases.len() != dim + 1 {
            return Err(Error::LengthMismatch {
                expected: dim + 1,
                got: bases.len(),
            });
        }
        for b in &bases {
            if b.dim() != dim {
                return Err(Error::DimMismatch(b.dim(), dim));
            }
            let dev = b.unitary_deviation();
            if dev > tol::EXACT {
                return Err(Error::EncodingInvariant(format!(
                    "basis not unitary, deviation {dev:.3e}"
                )));
            }
        }
        let labels = (0..bases.len()).collect();
        Ok(Self { dim, bases, labels })
    }

    pub fn from_mub(sys: &MubSystem) -> Self {
        Self {
            dim: sys.dim,
            bases: sys.bases.clone(),
            labels: (0..sys.bases.len()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases(&self) -> &[ComplexMatrix] {
        &self.bases
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn states(&self) -> Vec<PureState> {
        let mut out = Vec::with_capacity(self.bases.len() * self.dim);
        for b in &self.bases {
            for j in 0..self.dim {
                out.push(PureState::new(b.column(j)).expect("basis columns are unit norm"));
            }
        }
        out
    }
}

/// d+1 independent Haar-random orthonormal bases.
pub fn random_basis_union(d: usize, rng: &mut SeededRng) -> Result<BasisUnion> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            got: d,
            why: "basis unions need d >= 2",
        });
    }
    let bases = (0..=d)
        .map(|_| haar_unitary(d, rng))
        .collect::<Result<Vec<_>>>()?;
    BasisUnion::from_bases(d, bases)
}

/// Result of checking the diagonal-cost collapse identity
/// `C_r† H_C C_r = H^⊗n H_C H^⊗n` and the constant diagonal
/// `⟨b|C_r† H_C C_r|b⟩ = 2^−n Tr(H_C)`.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseReport {
    pub max_conjugation_deviation: f64,
    pub max_diag_expectation_deviation: f64,
    pub pass: bool,
    pub n_qubits: u32,
    pub r_checked: Vec<u64>,
}

/// Verifies the collapse identity densely for every r in `r_list`.
pub fn verify_diagonal_collapse(
    n_qubits: u32,
    cost: &crate::simvec::DiagonalCost,
    r_list: &[u64],
) -> Result<CollapseReport> {
    if n_qubits == 0 || n_qubits > 4 {
        return Err(Error::OutOfRange {
            what: "n_qubits",
            got: n_qubits as i64,
            lo: 1,
            hi: 4,
        });
    }
    let dim = 1usize << n_qubits;
    if cost.values().len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: cost.values().len(),
        });
    }
    let hc = ComplexMatrix::diagonal(
        &cost
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect::<Vec<_>>(),
    );
    let h = hadamard_n(n_qubits);
    let reference = h.mul(&hc).mul(&h);
    let mean = cost.values().iter().sum::<f64>() / dim as f64;

    let mut conj_dev = 0.0f64;
    let mut diag_dev = 0.0f64;
    for &r in r_list {
        let c = family_matrix(n_qubits, r)?;
        let rotated = c.adjoint().mul(&hc).mul(&c);
        conj_dev = conj_dev.max(rotated.max_abs_diff(&reference));
        for b in 0..dim {
            diag_dev = diag_dev.max((rotated[(b, b)].re - mean).abs());
            diag_dev = diag_dev.max(rotated[(b, b)].im.abs());
        }
    }
    Ok(CollapseReport {
        max_conjugation_deviation: conj_dev,
        max_diag_expectation_deviation: diag_dev,
        pass: conj_dev <= tol::EXACT && diag_dev <= tol::EXACT,
        n_qubits,
        r_checked: r_list.to_vec(),
    })
}
