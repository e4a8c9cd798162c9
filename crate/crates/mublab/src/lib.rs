//! A numerical laboratory for complete mutually unbiased bases (MUBs).
//!
//! The crate builds complete MUB systems in prime and qubit-register
//! dimensions, estimates the Gaussian width of pure-state ensembles under
//! isotropic random Hamiltonians, and runs two desk-scale variational
//! benchmarks: an adaptive MUB warm-start QAOA comparison across five
//! combinatorial problem families, and a QRAO MaxCut study of bit-flip
//! local search over MUB family indices.
//!
//! Modules follow the pipeline bottom-up:
//!
//! - [`numcore`] — complex dense linear algebra, GUE/Haar sampling, and the
//!   seeded randomness contract every other module consumes.
//! - [`mub`] — MUB construction (Weyl–Heisenberg for odd primes, finite-field
//!   quadratic phases for qubit registers), unbiasedness verification, and
//!   the diagonal-cost collapse identity.
//! - [`width`] — Monte Carlo width estimation, CDF dominance checks, simplex
//!   block covariance, radial mixtures, and the asymptotic gap probe.
//! - [`simvec`] — dense statevector simulator (gates, cost/mixer evolutions,
//!   Pauli-sum Hamiltonians, expectations).
//! - [`problems`] — benchmark instance generation, QUBO-style encodings with
//!   penalties and slack, brute-force optima, decoding metrics.
//! - [`qaoa`] — standard QAOA, the adaptive MUB-XRot warm start with family
//!   screening, the bounded quasi-Newton optimizer, paired statistics.
//! - [`qrao`] — (3,1)-QRAC relaxation of MaxCut, `b0` prescreening, Pauli
//!   rounding, and the family-search strategy suite.
//! - [`harness`] — experiment configuration, deterministic parallel
//!   orchestration, CSV/JSON persistence, and report aggregation.
//!
//! Every capability has a runnable example under `examples/`; start with
//! `cargo run --release --example mub_verify`. The thin `mublab` binary
//! exposes the same entry points as subcommands (`mub-verify`, `width <sub>`,
//! `qaoa-bench`, `qrao-bench`, `report`).

pub mod error;
pub mod harness;
pub mod mub;
pub mod numcore;
pub mod problems;
pub mod qaoa;
pub mod qrao;
pub mod simvec;
pub mod tol;
pub mod width;

pub use error::{Error, Result};
