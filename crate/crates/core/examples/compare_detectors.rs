//! Run every detector action on one graph and report its communities and
//! scores.
//!
//! ```text
//! cargo run --release --example compare_detectors -- 300 0.03
//! ```

use std::time::Instant;

use rlcomm::detectors::ActionSpace;
use rlcomm::graph::{erdos_renyi, ring_of_cliques};
use rlcomm::scoring::{modularity, modularity_density};

fn main() -> rlcomm::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let g = match args[..] {
        [n, p, ..] => erdos_renyi(n as usize, p, 7)?,
        _ => ring_of_cliques(8, 6),
    };
    println!("{} nodes, {} edges\n", g.node_count(), g.edge_count());

    let space = ActionSpace::default();
    println!("{:<36} {:>6} {:>9} {:>9} {:>9}", "action", "comms", "Q", "Q_ds", "ms");
    for action in space.allowed_actions(g.node_count()) {
        let start = Instant::now();
        let part = space.run(action, &g, 1)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        println!(
            "{:<36} {:>6} {:>9.5} {:>9.5} {:>9.2}",
            space.encode(action),
            part.community_count(),
            modularity(&g, &part)?,
            modularity_density(&g, &part)?,
            ms
        );
    }
    Ok(())
}
