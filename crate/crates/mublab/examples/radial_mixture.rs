//! Radial extension: for H = R·G with R >= 0 independent of the Gaussian
//! part, E max Tr(H Q) factorizes as E R · E max Tr(G Q).
//!
//! Run with: cargo run --release --example radial_mixture

use mublab::mub::{build_prime_mub, random_basis_union};
use mublab::numcore::SeededRng;
use mublab::width::{radial_width, Ensemble, RadialSpec};

fn main() -> mublab::Result<()> {
    let n_samples = 80_000;
    let specs = [
        ("R = 2 (constant)", RadialSpec::Constant(2.0)),
        ("R half-normal   ", RadialSpec::HalfNormal),
        ("R uniform[0,1]  ", RadialSpec::Uniform01),
    ];

    let mub = Ensemble::from_mub(&build_prime_mub(2)?);
    let union = Ensemble::from_union(&random_basis_union(2, &mut SeededRng::new(12, 0))?);

    for (name, ens) in [("qubit MUB", &mub), ("random union", &union)] {
        println!("{name} ({n_samples} samples):");
        for (label, spec) in &specs {
            let rep = radial_width(ens, *spec, n_samples, &mut SeededRng::new(12, 1))?;
            println!(
                "  {label}: lhs {:.4} ± {:.4}   E[R]·W {:.4} ± {:.4}   {}",
                rep.lhs.mean,
                rep.lhs.stderr,
                rep.rhs.mean,
                rep.rhs.stderr,
                if rep.pass { "factorizes" } else { "MISMATCH" }
            );
        }
        println!();
    }
    Ok(())
}
