//! Gaussian width of random basis unions against the complete MUB:
//! the MUB maximizes W(S) among unions of d+1 orthonormal bases.
//!
//! Run with: cargo run --release --example width_compare

use mublab::mub::{build_prime_mub, random_basis_union};
use mublab::numcore::SeededRng;
use mublab::width::{estimate_width, paired_width, Ensemble};

fn main() -> mublab::Result<()> {
    let n_samples = 50_000;
    let n_unions = 12;
    println!("W(union) vs W(MUB) under common random numbers ({n_samples} samples)\n");

    for d in [2usize, 3] {
        let mub = Ensemble::from_mub(&build_prime_mub(d)?);
        let w = estimate_width(&mub, n_samples, &mut SeededRng::new(1, 99))?;
        println!("d={d}: W(MUB) = {:.4} ± {:.4}", w.estimate.mean, w.estimate.stderr);
        let mut worst: f64 = f64::NEG_INFINITY;
        for k in 0..n_unions {
            let mut gen_rng = SeededRng::new(1, 2 * k);
            let union = random_basis_union(d, &mut gen_rng)?;
            let ens = Ensemble::from_union(&union);
            let mut mc_rng = SeededRng::new(1, 2 * k + 1);
            let paired = paired_width(&ens, &mub, n_samples, &mut mc_rng)?;
            let z = paired.delta.mean / paired.delta.stderr;
            worst = worst.max(z);
            println!(
                "  union {k:2}: W = {:.4}  delta = {:+.4} ± {:.4}  (z = {:+.1})",
                paired.w_a.mean, paired.delta.mean, paired.delta.stderr, z
            );
        }
        println!("  worst z over {n_unions} unions: {worst:+.2} (violations need z > 5)\n");
    }
    Ok(())
}
