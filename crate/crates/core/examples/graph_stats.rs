//! Load a SNAP edge list (or build a ring of cliques) and print its
//! statistics and a growing snapshot stream.
//!
//! ```text
//! cargo run --release --example graph_stats -- data/cit-HepTh.txt 5
//! ```

use std::fs::File;
use std::io::BufReader;

use rlcomm::graph::{build_snapshots, compute_stats, load_edge_list, ring_of_cliques, EdgeOrder};

fn main() -> rlcomm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let g = match args.first() {
        Some(path) => {
            let f = File::open(path).map_err(|e| rlcomm::Error::Io {
                path: path.into(),
                source: e,
            })?;
            load_edge_list(BufReader::new(f))?
        }
        None => ring_of_cliques(6, 5),
    };
    let k = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);

    let s = compute_stats(&g);
    println!("nodes            {}", s.nodes);
    println!("raw arcs         {}", s.raw_arcs);
    println!("undirected edges {}", s.edges);
    println!(
        "largest cc       {} nodes, {} edges",
        s.largest_cc_nodes, s.largest_cc_edges
    );
    println!("triangles        {}", s.triangles);
    println!("avg clustering   {:.4}", s.avg_clustering);

    let stream = build_snapshots(&g, k, EdgeOrder::AsRead, 0)?;
    for (i, snap) in stream.iter().enumerate() {
        println!("snapshot {i}: {} nodes, {} edges", snap.node_count(), snap.edge_count());
    }
    Ok(())
}
