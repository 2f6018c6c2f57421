//! Score partitions with modularity and modularity density, and compare
//! against the exhaustive optimum on a small graph.

use rlcomm::graph::Graph;
use rlcomm::scoring::{exact_best_partition, modularity, modularity_density, CommunityTally};
use rlcomm::{Metric, Partition};

fn main() -> rlcomm::Result<()> {
    // two triangles joined by a bridge
    let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])?;
    let candidates = [
        ("single", Partition::single(6)),
        ("singletons", Partition::singletons(6)),
        ("triangles", Partition::new(vec![0, 0, 0, 1, 1, 1])?),
        ("lopsided", Partition::new(vec![0, 0, 0, 0, 1, 1])?),
    ];
    println!("{:<12} {:>9} {:>9}", "partition", "Q", "Q_ds");
    for (name, p) in &candidates {
        println!(
            "{name:<12} {:>9.5} {:>9.5}",
            modularity(&g, p)?,
            modularity_density(&g, p)?
        );
    }

    let t = CommunityTally::new(&g, &candidates[2].1)?;
    println!(
        "\ntriangles: m_c {:?} e_c {:?} n_c {:?}",
        t.internal, t.external, t.nodes
    );

    for metric in [Metric::Modularity, Metric::ModularityDensity] {
        let (best, value) = exact_best_partition(&g, metric)?;
        println!("optimum under {metric}: {:?} = {value:.5}", best.assignment());
    }
    Ok(())
}
