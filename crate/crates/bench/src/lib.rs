//! Shared graph fixtures for the criterion benches.

use tricount::{generate, Edge, GenSpec};

/// A generated graph tagged with the label criterion reports.
pub struct Fixture {
    pub label: String,
    pub edges: Vec<Edge>,
}

/// Fixed-seed graphs at `nodes` vertices across sparse, medium and dense
/// densities.
pub fn density_sweep(nodes: u32) -> Vec<Fixture> {
    [0.1, 0.5, 0.9]
        .into_iter()
        .map(|d| {
            let spec = GenSpec::by_nodes(nodes, d, 7);
            Fixture {
                label: format!("n{nodes}-d{d}"),
                edges: generate(&spec).expect("fixture spec is feasible"),
            }
        })
        .collect()
}
