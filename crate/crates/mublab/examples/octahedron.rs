//! The unrestricted qubit case: no six-state qubit ensemble has larger
//! Gaussian width than the complete qubit MUB (the regular octahedron on
//! the Bloch sphere).
//!
//! Run with: cargo run --release --example octahedron

use mublab::numcore::SeededRng;
use mublab::width::octahedron_trial;

fn main() -> mublab::Result<()> {
    let n_ensembles = 60;
    let n_samples = 40_000;
    println!("Sweeping {n_ensembles} random six-state qubit ensembles ({n_samples} samples each)\n");
    let rep = octahedron_trial(n_ensembles, n_samples, &mut SeededRng::new(13, 0))?;
    println!(
        "W(MUB) = {:.4} ± {:.4}",
        rep.mub_width.mean, rep.mub_width.stderr
    );
    println!(
        "violations beyond 5 paired stderr: {} / {}  (worst z = {:+.2})",
        rep.n_violations, rep.n_ensembles, rep.worst_z
    );
    Ok(())
}
