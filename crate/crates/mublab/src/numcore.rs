//! Complex dense linear algebra, random-matrix sampling, and the seeded
//! randomness contract consumed by every other module.
//!
//! The Gaussian Hamiltonian ensemble is normalized so that for traceless
//! Hermitian `A`, `B` the sampled functionals satisfy
//! `Cov(Tr(HA), Tr(HB)) = Tr(AB)`. That normalization is verified by a
//! covariance property test, not assumed.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix from the given complex entries.
    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest entrywise deviation of `A†A` from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        let g = self.adjoint().mul(self);
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Unit-norm complex amplitude vector; both a Hilbert-space point and a
/// simulator state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts amplitudes whose squared norm is 1 within [`tol::STATE_NORM`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let dev = (norm_sq - 1.0).abs();
        if dev > tol::STATE_NORM {
            return Err(Error::InvalidState(dev));
        }
        Ok(Self {
            dim: amplitudes.len(),
            amplitudes,
        })
    }

    /// Normalizes the given amplitudes first.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidState(1.0));
        }
        let amps = amplitudes.into_iter().map(|a| a / norm).collect();
        Self::new(amps)
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self {
            dim,
            amplitudes: amps,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|².
    pub fn overlap_sq(&self, other: &Self) -> f64 {
        self.overlap(other).norm_sqr()
    }
}

/// A traceless Hermitian matrix: random-Hamiltonian samples and the
/// centered projectors `Q_ψ = |ψ⟩⟨ψ| − I/d` live here.
#[derive(Debug, Clone)]
pub struct TracelessHermitian {
    entries: ComplexMatrix,
}

impl TracelessHermitian {
    pub fn new(entries: ComplexMatrix) -> Result<Self> {
        let herm = entries.hermitian_deviation();
        if herm > tol::RESIDUE * 10.0 {
            return Err(Error::NotHermitian(herm));
        }
        let tr = entries.trace();
        if tr.norm() > tol::EXACT {
            return Err(Error::EncodingInvariant(format!(
                "trace magnitude {:.3e} exceeds {:.1e}",
                tr.norm(),
                tol::EXACT
            )));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.entries
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic counter-style generator with explicit stream splitting.
///
/// Identical `(seed, stream_id)` pairs yield identical sample sequences
/// regardless of run, platform, or how many sibling streams exist. Parallel
/// work must give each task its own stream via [`SeededRng::substream`];
/// there is no global RNG state anywhere in the crate.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    /// A fresh stream derived from this stream's identity and `k`.
    ///
    /// Independent of how much of `self` has been consumed.
    pub fn substream(&self, k: u64) -> Self {
        let sid = splitmix64(self.stream_id ^ splitmix64(k ^ 0x5851_f42d_4c95_7f2d));
        Self::new(self.seed, sid)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        self.inner.gen_range(0..n)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimateWithError {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl EstimateWithError {
    pub fn from_sums(sum: f64, sum_sq: f64, n: usize) -> Self {
        assert!(n >= 2, "need at least two samples for a standard error");
        let mean = sum / n as f64;
        let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
        Self {
            mean,
            stderr: (var.max(0.0) / n as f64).sqrt(),
            n_samples: n,
        }
    }
}

/// Streaming accumulator for [`EstimateWithError`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    sum_sq: f64,
    n: usize,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.n += 1;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.n += other.n;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    pub fn finish(&self) -> EstimateWithError {
        EstimateWithError::from_sums(self.sum, self.sum_sq, self.n)
    }
}

/// Draws a GUE matrix: iid standard-normal diagonal, off-diagonal
/// `(x + iy)/√2` with `x`, `y` iid standard normal, Hermitian by
/// construction. This normalization makes `Tr(H·)` isotropic on Hermitian
/// space: `Cov(Tr(HA), Tr(HB)) = Tr(AB)`.
pub fn sample_gue(d: usize, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            got: d,
            why: "GUE sampling needs d >= 2",
        });
    }
    let mut h = ComplexMatrix::zeros(d, d);
    fill_gue(&mut h, rng);
    Ok(h)
}

pub(crate) fn fill_gue(h: &mut ComplexMatrix, rng: &mut SeededRng) {
    let d = h.dim();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        h[(j, j)] = Complex64::new(rng.normal(), 0.0);
        for k in (j + 1)..d {
            let x = rng.normal();
            let y = rng.normal();
            let z = Complex64::new(x * inv_sqrt2, y * inv_sqrt2);
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
        }
    }
}

/// `A − (Tr A / d)·I` for Hermitian `A`.
pub fn project_traceless(a: &ComplexMatrix) -> Result<TracelessHermitian> {
    let herm = a.hermitian_deviation();
    if herm > tol::RESIDUE * 10.0 {
        return Err(Error::NotHermitian(herm));
    }
    let d = a.dim();
    let shift = a.trace().re / d as f64;
    let mut out = a.clone();
    for i in 0..d {
        out[(i, i)] -= Complex64::new(shift, 0.0);
        // Discard the Hermiticity residue on the diagonal.
        out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
    }
    TracelessHermitian::new(out)
}

/// A GUE draw centered to the traceless subspace.
pub fn sample_isotropic_traceless(d: usize, rng: &mut SeededRng) -> Result<TracelessHermitian> {
    let h = sample_gue(d, rng)?;
    project_traceless(&h)
}

/// `Q_ψ = |ψ⟩⟨ψ| − I/d`.
pub fn q_operator(psi: &PureState) -> TracelessHermitian {
    let d = psi.dim();
    let inv_d = 1.0 / d as f64;
    let amps = psi.amplitudes();
    let mut q = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            q[(i, j)] = amps[i] * amps[j].conj();
        }
        q[(i, i)] -= Complex64::new(inv_d, 0.0);
        q[(i, i)] = Complex64::new(q[(i, i)].re, 0.0);
    }
    TracelessHermitian::new(q).expect("Q_psi is traceless Hermitian by construction")
}

/// Hilbert–Schmidt inner product `Tr(AB)` of traceless Hermitian matrices.
pub fn hs_inner(a: &TracelessHermitian, b: &TracelessHermitian) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let d = a.dim();
    let (ma, mb) = (a.entries(), b.entries());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += ma[(i, j)] * mb[(j, i)];
        }
    }
    debug_assert!(acc.im.abs() <= tol::RESIDUE * d as f64);
    Ok(acc.re)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phase correction.
pub fn haar_unitary(d: usize, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    if d < 1 {
        return Err(Error::InvalidDimension {
            got: d,
            why: "unitary needs d >= 1",
        });
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = ComplexMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2)
    });
    // Modified Gram–Schmidt with a second orthogonalization pass. The R
    // diagonal comes out real positive, so the phase correction
    // r_jj/|r_jj| is exactly 1 and Q is already Haar.
    let mut q = ginibre;
    for j in 0..d {
        let mut v = q.column(j);
        for _pass in 0..2 {
            for k in 0..j {
                let qk = q.column(k);
                let r: Complex64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(&qk) {
                    *vi -= r * qi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        debug_assert!(norm > 1e-12, "Ginibre column degenerated");
        let phase = Complex64::new(norm, 0.0) / norm; // r_jj / |r_jj| = 1
        for (i, vi) in v.iter().enumerate() {
            q[(i, j)] = vi * phase / norm;
        }
    }
    Ok(q)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues ascending and the matching eigenvector
/// columns.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let herm = a.hermitian_deviation();
    if herm > 1e-9 {
        return Err(Error::NotHermitian(herm));
    }
    let n = a.dim();
    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);

    let frob: f64 = m.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let stop = (frob * 1e-14).max(1e-300);

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                let gn = g.norm();
                if gn <= stop * 1e-2 / (n as f64) {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = g / gn; // e^{iφ}
                let tau = (app - aqq) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns p, q of both m and v rotate by
                //   [c, -s·e^{iφ}; s·e^{-iφ}, c]
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * c + miq * s * phase.conj();
                    m[(i, q)] = miq * c - mip * s * phase;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * s * phase.conj();
                    v[(i, q)] = viq * c - vip * s * phase;
                }
                // Rows p, q by the adjoint rotation.
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = mpj * c + mqj * s * phase;
                    m[(q, j)] = mqj * c - mpj * s * phase.conj();
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gue_is_hermitian_by_construction() {
        let mut rng = SeededRng::new(7, 0);
        let h = sample_gue(2, &mut rng).unwrap();
        assert_eq!(h[(0, 1)], h[(1, 0)].conj());
        assert!(sample_gue(1, &mut rng).is_err());
    }

    #[test]
    fn gue_is_deterministic_per_stream() {
        let a = sample_gue(4, &mut SeededRng::new(123, 9)).unwrap();
        let b = sample_gue(4, &mut SeededRng::new(123, 9)).unwrap();
        assert_eq!(a, b);
        let c = sample_gue(4, &mut SeededRng::new(123, 10)).unwrap();
        assert!(a.max_abs_diff(&c) > 0.0);
    }

    #[test]
    fn substreams_are_position_independent() {
        let base = SeededRng::new(5, 1);
        let mut consumed = base.clone();
        for _ in 0..100 {
            consumed.normal();
        }
        let a: Vec<f64> = {
            let mut r = base.substream(3);
            (0..4).map(|_| r.normal()).collect()
        };
        let b: Vec<f64> = {
            let mut r = consumed.substream(3);
            (0..4).map(|_| r.normal()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn gue_variance_matches_isotropy_on_fixed_observable() {
        // Tr(H·A) for A = diag(1, -1) has variance Tr(A²) = 2.
        let mut rng = SeededRng::new(42, 0);
        let n = 100_000;
        let mut acc = Accumulator::new();
        for _ in 0..n {
            let h = sample_gue(2, &mut rng).unwrap();
            let x = h[(0, 0)].re - h[(1, 1)].re;
            acc.push(x * x);
        }
        let est = acc.finish();
        assert!(
            (est.mean - 2.0).abs() <= tol::MC_SIGMA * est.stderr,
            "variance {} ± {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn covariance_identity_against_hs_inner() {
        // Cov(Tr(HA), Tr(HB)) = Tr(AB) for fixed traceless Hermitian A, B.
        let a = TracelessHermitian::new(ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (1, 1) => c(-1.0, 0.0),
            (0, 2) => c(0.5, 0.3),
            (2, 0) => c(0.5, -0.3),
            _ => c(0.0, 0.0),
        }))
        .unwrap();
        let b = TracelessHermitian::new(ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => c(0.5, 0.0),
            (2, 2) => c(-0.5, 0.0),
            (0, 1) => c(0.2, -0.7),
            (1, 0) => c(0.2, 0.7),
            _ => c(0.0, 0.0),
        }))
        .unwrap();
        let target = hs_inner(&a, &b).unwrap();

        let mut rng = SeededRng::new(2024, 3);
        let n = 100_000;
        let (mut sx, mut sy, mut sxy, mut sxx_yy) = (0.0, 0.0, 0.0, Vec::with_capacity(n));
        for _ in 0..n {
            let h = sample_isotropic_traceless(3, &mut rng).unwrap();
            let x = hs_inner(&h, &a).unwrap();
            let y = hs_inner(&h, &b).unwrap();
            sx += x;
            sy += y;
            sxy += x * y;
            sxx_yy.push((x, y));
        }
        let (mx, my) = (sx / n as f64, sy / n as f64);
        let cov = sxy / n as f64 - mx * my;
        let mut acc = Accumulator::new();
        for (x, y) in sxx_yy {
            acc.push((x - mx) * (y - my));
        }
        let se = acc.finish().stderr;
        assert!(
            (cov - target).abs() <= tol::MC_SIGMA * se,
            "cov {} vs Tr(AB) {} (se {})",
            cov,
            target,
            se
        );
    }

    #[test]
    fn project_traceless_examples() {
        let id3 = ComplexMatrix::identity(3);
        let z = project_traceless(&id3).unwrap();
        assert!(z.entries().max_abs_diff(&ComplexMatrix::zeros(3, 3)) < tol::RESIDUE);

        let a = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(0.0, 0.0)]);
        let t = project_traceless(&a).unwrap();
        assert!((t.entries()[(0, 0)].re - 1.0).abs() < tol::RESIDUE);
        assert!((t.entries()[(1, 1)].re + 1.0).abs() < tol::RESIDUE);

        // Idempotence on an already-traceless input.
        let again = project_traceless(t.entries()).unwrap();
        assert!(again.entries().max_abs_diff(t.entries()) < tol::RESIDUE);

        let bad = ComplexMatrix::from_fn(2, 2, |i, j| if i < j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(project_traceless(&bad).is_err());
    }

    #[test]
    fn q_operator_examples() {
        let zero = PureState::basis_state(2, 0);
        let q = q_operator(&zero);
        assert!((q.entries()[(0, 0)].re - 0.5).abs() < tol::RESIDUE);
        assert!((q.entries()[(1, 1)].re + 0.5).abs() < tol::RESIDUE);

        // Tr(Q²) = 1 − 1/d for any state, d = 4.
        let psi = PureState::normalized(vec![c(1.0, 0.5), c(0.0, -1.0), c(2.0, 0.0), c(0.3, 0.3)])
            .unwrap();
        let q = q_operator(&psi);
        let self_inner = hs_inner(&q, &q).unwrap();
        assert!((self_inner - 0.75).abs() < tol::EXACT);

        // Global phase invariance.
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated =
            PureState::new(psi.amplitudes().iter().map(|a| a * phase).collect()).unwrap();
        let q2 = q_operator(&rotated);
        assert!(q.entries().max_abs_diff(q2.entries()) < tol::RESIDUE);
    }

    #[test]
    fn hs_inner_matches_overlap_identity() {
        // hs_inner(Q_ψ, Q_φ) = |⟨ψ|φ⟩|² − 1/d.
        let mut rng = SeededRng::new(11, 0);
        for d in [2usize, 3, 4] {
            for _ in 0..20 {
                let u = haar_unitary(d, &mut rng).unwrap();
                let v = haar_unitary(d, &mut rng).unwrap();
                let psi = PureState::new(u.column(0)).unwrap();
                let phi = PureState::new(v.column(0)).unwrap();
                let lhs = hs_inner(&q_operator(&psi), &q_operator(&phi)).unwrap();
                let rhs = psi.overlap_sq(&phi) - 1.0 / d as f64;
                assert!((lhs - rhs).abs() < tol::EXACT, "d={d} lhs={lhs} rhs={rhs}");
            }
        }
        // Orthonormal pair in the same basis: overlap² = 0 → inner = −1/d.
        let e0 = PureState::basis_state(3, 0);
        let e1 = PureState::basis_state(3, 1);
        let v = hs_inner(&q_operator(&e0), &q_operator(&e1)).unwrap();
        assert!((v + 1.0 / 3.0).abs() < tol::EXACT);

        let a = q_operator(&e0);
        let neg = TracelessHermitian::new(a.entries().scale(c(-1.0, 0.0))).unwrap();
        assert!(hs_inner(&a, &neg).unwrap() <= 0.0);

        let b2 = q_operator(&PureState::basis_state(2, 0));
        assert!(hs_inner(&a, &b2).is_err());
    }

    #[test]
    fn haar_unitary_columns_orthonormal() {
        let mut rng = SeededRng::new(1, 0);
        for d in [1usize, 2, 3, 5, 8, 16] {
            let u = haar_unitary(d, &mut rng).unwrap();
            assert!(u.unitary_deviation() < tol::EXACT, "d = {d}");
        }
        let u1 = haar_unitary(1, &mut rng).unwrap();
        assert!((u1[(0, 0)].norm() - 1.0).abs() < tol::RESIDUE);
    }

    #[test]
    fn haar_first_moment() {
        // E|U[0][0]|² = 1/d for Haar-distributed U; d = 2 here.
        let mut rng = SeededRng::new(99, 0);
        let mut acc = Accumulator::new();
        for _ in 0..100_000 {
            let u = haar_unitary(2, &mut rng).unwrap();
            acc.push(u[(0, 0)].norm_sqr());
        }
        let est = acc.finish();
        assert!(
            (est.mean - 0.5).abs() <= tol::MC_SIGMA * est.stderr,
            "E|U00|² = {} ± {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let mut rng = SeededRng::new(31, 4);
        for d in [2usize, 3, 5, 8] {
            let h = sample_gue(d, &mut rng).unwrap();
            let (vals, vecs) = hermitian_eigen(&h).unwrap();
            assert!(vecs.unitary_deviation() < 1e-10, "d={d}");
            let lambda = ComplexMatrix::diagonal(
                &vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
            );
            let rebuilt = vecs.mul(&lambda).mul(&vecs.adjoint());
            assert!(rebuilt.max_abs_diff(&h) < 1e-9, "d={d}");
            for w in vals.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn estimate_with_error_matches_definition() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let mut acc = Accumulator::new();
        for &x in &xs {
            acc.push(x);
        }
        let est = acc.finish();
        assert!((est.mean - 2.5).abs() < 1e-15);
        // sample stdev = sqrt(5/3), stderr = that / 2
        assert!((est.stderr - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
    }
}
