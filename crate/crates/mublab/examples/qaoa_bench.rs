//! Standard QAOA against the adaptive MUB-XRot warm start on a small
//! paired grid, scored by decoded solution ratio.
//!
//! Run with: cargo run --release --example qaoa_bench

use mublab::problems::{encode, gen_instance, ProblemFamily};
use mublab::qaoa::{paired_stats, run_adaptive_mub_xrot, run_standard, QaoaRunConfig};

fn main() -> mublab::Result<()> {
    let cfg = QaoaRunConfig::default();
    let families = [ProblemFamily::Mis, ProblemFamily::MaxCut, ProblemFamily::Knapsack];
    let mut std_records = Vec::new();
    let mut adp_records = Vec::new();

    println!("family    n  p seed | standard  adaptive  (decoded ratio)");
    for family in families {
        for seed in 0..3u64 {
            let (n, p) = (6, 1);
            let inst = gen_instance(family, n, seed)?;
            let enc = encode(&inst)?;
            let s = run_standard(&enc, p, seed, &cfg)?;
            let a = run_adaptive_mub_xrot(&enc, p, seed, &cfg)?;
            println!(
                "{:<8} {n}  {p}  {seed}  |   {:.3}     {:.3}   (final family r = {:?})",
                family.as_str(),
                s.metrics.decoded_ratio,
                a.metrics.decoded_ratio,
                a.final_family_r
            );
            std_records.push(s);
            adp_records.push(a);
        }
    }

    let cmp = paired_stats(&std_records, &adp_records)?;
    println!(
        "\npaired cells: {}  W/T/L = {}/{}/{}  mean delta = {:+.4}  non-worse = {:.0}%",
        cmp.n_cases,
        cmp.wins,
        cmp.ties,
        cmp.losses,
        cmp.mean_delta,
        100.0 * cmp.non_worse_rate
    );
    println!("(The full grid with CSV output runs via `mublab qaoa-bench`.)");
    Ok(())
}
