//! Build complete MUB systems (prime and qubit-register constructions)
//! and verify unbiasedness by scanning every state pair.
//!
//! Run with: cargo run --release --example mub_verify

use mublab::mub::{build_prime_mub, build_qubit_mub, verify_unbiasedness};

fn main() -> mublab::Result<()> {
    println!("Complete MUB systems and their verification\n");
    for d in [2usize, 3, 5, 7] {
        let sys = build_prime_mub(d)?;
        let report = verify_unbiasedness(&sys, 1e-9);
        println!(
            "prime d={d}: {} bases, overlap dev {:.2e}, orthonormality dev {:.2e} -> {}",
            sys.bases().len(),
            report.max_overlap_deviation,
            report.max_orthonormality_deviation,
            if report.pass { "pass" } else { "FAIL" }
        );
    }
    for n in 1..=4u32 {
        let sys = build_qubit_mub(n)?;
        let report = verify_unbiasedness(&sys, 1e-9);
        println!(
            "qubit n={n} (d={}): {} bases, overlap dev {:.2e} -> {}",
            sys.dim(),
            sys.bases().len(),
            report.max_overlap_deviation,
            if report.pass { "pass" } else { "FAIL" }
        );
    }

    // Unsupported dimensions fail cleanly.
    match build_prime_mub(6) {
        Err(e) => println!("\nd=6 request: {e}"),
        Ok(_) => unreachable!(),
    }

    // JSON export for cross-implementation golden tests.
    let sys = build_prime_mub(3)?;
    let json = sys.to_json();
    println!(
        "\nJSON export of d=3 (truncated): {{\"d\": {}, \"construction_tag\": {}, bases: {} entries}}",
        json["d"], json["construction_tag"], json["bases"].as_array().unwrap().len()
    );
    Ok(())
}
