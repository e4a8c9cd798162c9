//! The covariance identity behind everything else: for the isotropic
//! Gaussian Hamiltonian ensemble, Cov(X_ψ, X_φ) = |⟨ψ|φ⟩|² − 1/d where
//! X_ψ = Tr(H·Q_ψ).
//!
//! Run with: cargo run --release --example covariance_identity

use mublab::numcore::{
    haar_unitary, hs_inner, q_operator, sample_isotropic_traceless, Accumulator, PureState,
    SeededRng,
};

fn main() -> mublab::Result<()> {
    println!("Covariance identity: Cov(X_psi, X_phi) = |<psi|phi>|^2 - 1/d\n");
    let n_samples = 100_000;
    let mut rng = SeededRng::new(41, 0);

    for d in [2usize, 3, 4] {
        let u = haar_unitary(d, &mut rng)?;
        let v = haar_unitary(d, &mut rng)?;
        let psi = PureState::new(u.column(0))?;
        let phi = PureState::new(v.column(0))?;
        let q_psi = q_operator(&psi);
        let q_phi = q_operator(&phi);
        let exact = psi.overlap_sq(&phi) - 1.0 / d as f64;

        // Monte Carlo covariance of the two linear functionals.
        let mut xs = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let h = sample_isotropic_traceless(d, &mut rng)?;
            xs.push((hs_inner(&h, &q_psi)?, hs_inner(&h, &q_phi)?));
        }
        let mx: f64 = xs.iter().map(|p| p.0).sum::<f64>() / n_samples as f64;
        let my: f64 = xs.iter().map(|p| p.1).sum::<f64>() / n_samples as f64;
        let mut acc = Accumulator::new();
        for (x, y) in &xs {
            acc.push((x - mx) * (y - my));
        }
        let est = acc.finish();
        println!(
            "d={d}: exact {exact:+.6}  mc {:+.6} ± {:.6}  ({:+.2} sigma)",
            est.mean,
            est.stderr,
            (est.mean - exact) / est.stderr
        );
    }
    println!("\nAlso exact through hs_inner: Tr(Q_psi Q_phi) equals the same identity.");
    Ok(())
}
