//! Centralized numeric tolerances.
//!
//! Two regimes only: exact identities are checked at machine-accumulation
//! scale, Monte Carlo estimates at a multiple of their standard error.

/// Exact-identity checks (trace projections, conjugation identities).
pub const EXACT: f64 = 1e-10;

/// Entrywise residue allowed on quantities that are real/zero by symmetry.
pub const RESIDUE: f64 = 1e-12;

/// Unbiasedness verification of constructed MUB systems.
pub const UNBIASED: f64 = 1e-9;

/// State-norm deviation accepted when taking a pure state as input.
pub const STATE_NORM: f64 = 1e-8;

/// Number of standard errors for every Monte Carlo acceptance check.
pub const MC_SIGMA: f64 = 5.0;

/// Tie band for paired win/tie/loss classification.
pub const TIE_BAND: f64 = 1e-9;

/// Minimum postselected-ratio improvement that accepts a family switch.
pub const FAMILY_SWITCH: f64 = 1e-4;

/// Strict-improvement threshold for bit-flip local search moves.
pub const LOCAL_SEARCH_IMPROVEMENT: f64 = 1e-9;

/// A decoded or rounded solution counts as solved above this ratio.
pub const SOLVED: f64 = 1.0 - 1e-9;
