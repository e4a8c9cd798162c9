//! The diagonal-cost collapse: conjugating a diagonal cost by any family
//! circuit C_r gives the same rotated matrix, with constant diagonal
//! 2^-n Tr(H_C) — so diagonal costs admit no family-dependent prescreen.
//!
//! Run with: cargo run --release --example diagonal_collapse

use mublab::mub::verify_diagonal_collapse;
use mublab::numcore::SeededRng;
use mublab::simvec::DiagonalCost;

fn main() -> mublab::Result<()> {
    println!("Diagonal-cost collapse across all family indices\n");

    // The two-qubit antiferromagnetic pair: diag(0, 1, 1, 2).
    let cost = DiagonalCost::new(2, vec![0.0, 1.0, 1.0, 2.0])?;
    let report = verify_diagonal_collapse(2, &cost, &[0, 1, 2, 3])?;
    println!(
        "n=2 pair cost: conjugation dev {:.2e}, diagonal dev {:.2e} (expect Tr/4 = {}) -> {}",
        report.max_conjugation_deviation,
        report.max_diag_expectation_deviation,
        cost.trace() / 4.0,
        if report.pass { "pass" } else { "FAIL" }
    );

    // Random diagonal costs at n = 3 and 4, all r.
    let mut rng = SeededRng::new(7, 0);
    for n in [3u32, 4] {
        let dim = 1usize << n;
        let values: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let cost = DiagonalCost::new(n, values)?;
        let r_list: Vec<u64> = (0..dim as u64).collect();
        let report = verify_diagonal_collapse(n, &cost, &r_list)?;
        println!(
            "n={n} random cost over {} families: conjugation dev {:.2e} -> {}",
            r_list.len(),
            report.max_conjugation_deviation,
            if report.pass { "pass" } else { "FAIL" }
        );
    }
    println!("\nThis is why the QAOA benchmark uses MUBs as warm starts, not matched mixers.");
    Ok(())
}
