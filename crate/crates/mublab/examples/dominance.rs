//! Stochastic dominance: the CDF of the maximum over a complete MUB lies
//! below the CDF of any other basis union at every threshold.
//!
//! Run with: cargo run --release --example dominance

use mublab::mub::{build_prime_mub, random_basis_union};
use mublab::numcore::SeededRng;
use mublab::width::{dominance_check, max_cdf, CdfCurve, Ensemble};

fn main() -> mublab::Result<()> {
    let d = 3;
    let n_samples = 60_000;
    let grid = CdfCurve::default_grid();

    let mub = Ensemble::from_mub(&build_prime_mub(d)?);
    let curve_m = max_cdf(&mub, &grid, n_samples, &mut SeededRng::new(3, 0))?;

    println!("P(M <= t) for d={d}, {n_samples} samples\n");
    println!("   t    MUB     union0  union1  union2");
    let mut curves = Vec::new();
    for k in 0..3u64 {
        let union = random_basis_union(d, &mut SeededRng::new(3, 10 + k))?;
        let ens = Ensemble::from_union(&union);
        curves.push(max_cdf(&ens, &grid, n_samples, &mut SeededRng::new(3, 20 + k))?);
    }
    for i in (0..grid.len()).step_by(5) {
        print!("  {:>4.1}  {:.4} ", grid[i], curve_m.probs[i]);
        for c in &curves {
            print!(" {:.4} ", c.probs[i]);
        }
        println!();
    }

    println!();
    for (k, c) in curves.iter().enumerate() {
        let rep = dominance_check(c, &curve_m, None)?;
        println!(
            "union {k}: dominance over MUB {} ({} grid points checked)",
            if rep.pass { "holds" } else { "VIOLATED" },
            rep.checked_points
        );
    }
    Ok(())
}
