//! QRAO MaxCut family-search strategies on one graph: the X-variational
//! baseline, fixed MUB r=1 with b0 prescreen, and bit-flip multi-start
//! 2POLE, with family-evaluation accounting against the exhaustive sweep.
//!
//! Run with: cargo run --release --example qrao_bench

use mublab::problems::gen_er_graph;
use mublab::qrao::{encode_31, strategy_suite, QraoConfig};

fn main() -> mublab::Result<()> {
    let graph = gen_er_graph(8, 0.5, 3, false);
    let enc = encode_31(&graph);
    println!(
        "G(8, 0.5) seed 3: {} edges, (3,1)-QRAC uses {} qubits\n",
        graph.edges.len(),
        enc.n_qubits
    );

    let suite = strategy_suite(&graph, 1, 3, &QraoConfig::default(), true)?;
    println!("strategy            alpha_r   alpha_c   family_evals  chosen_r");
    for rec in &suite.records {
        println!(
            "{:<18}  {:>7.4}  {:>7.4}   {:>5}        {}",
            rec.strategy.as_str(),
            rec.alpha_r,
            rec.alpha_c,
            rec.family_evals,
            rec.chosen_r.map_or("-".to_string(), |r| r.to_string()),
        );
    }
    if let Some((prescreen, poles, local)) = suite.gain_decomposition {
        println!(
            "\nX -> bitflip gain decomposition: prescreen {prescreen:+.4}, poles {poles:+.4}, local search {local:+.4}"
        );
    }
    println!("(The full paired grid with CSV output runs via `mublab qrao-bench --exhaustive`.)");
    Ok(())
}
