//! Splits a multigraph into at most `ceil(D/2)` subgraphs of maximum degree 2.
//!
//!     cargo run --example two_factor

use ecfs::graph::{two_factor_decomposition, MultiGraph};

fn main() {
    // Petersen graph plus a doubled spoke
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (i + 5, (i + 2) % 5 + 5));
    let edges: Vec<(usize, usize)> = outer.chain(spokes).chain(inner).chain([(0, 5)]).collect();
    let g = MultiGraph::new(edges.iter().enumerate().map(|(id, &(u, v))| (id, u, v))).unwrap();

    let set = two_factor_decomposition(&g);
    println!(
        "edges {} max degree {} factors {}",
        g.edges().len(),
        g.max_degree(),
        set.len()
    );
    for (i, f) in set.factors.iter().enumerate() {
        let pairs: Vec<String> = f
            .iter()
            .map(|&e| format!("{}-{}", edges[e].0, edges[e].1))
            .collect();
        println!("factor {i}: {}", pairs.join(" "));
    }
}
