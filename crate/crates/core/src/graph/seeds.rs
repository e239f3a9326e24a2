//! Canonical enumeration of small loopless graphs, the seed sequence of
//! marked critical-edge graphs, and the chain obtained by repeated glueing.
//!
//! Isomorphism classes are represented by the minimal adjacency bit
//! string. Bits are ordered column-major over the upper triangle — pair
//! `(i, j)` with `i < j` at position `j(j-1)/2 + i` — so that extending a
//! vertex ordering by one vertex appends a contiguous block of bits,
//! which makes the branch-and-bound minimization prefix-prunable.

use std::collections::BTreeSet;

use super::{glue, three_colorable, Graph, GraphError, MarkedGraph};

fn code_bits(adj: &[Vec<bool>], place: &[usize]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(place.len() * (place.len() - 1) / 2);
    for j in 1..place.len() {
        for i in 0..j {
            bits.push(adj[place[i]][place[j]]);
        }
    }
    bits
}

/// Minimal adjacency bit string over all vertex orderings.
fn canonical_bits(adj: &[Vec<bool>]) -> Vec<bool> {
    let n = adj.len();
    if n <= 1 {
        return Vec::new();
    }
    let identity: Vec<usize> = (0..n).collect();
    let mut best = code_bits(adj, &identity);
    let mut place: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut bits: Vec<bool> = Vec::new();
    fn rec(
        adj: &[Vec<bool>],
        place: &mut Vec<usize>,
        used: &mut [bool],
        bits: &mut Vec<bool>,
        best: &mut Vec<bool>,
    ) {
        let n = adj.len();
        if place.len() == n {
            if bits.as_slice() < best.as_slice() {
                *best = bits.clone();
            }
            return;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            let depth = place.len();
            for i in 0..depth {
                bits.push(adj[place[i]][v]);
            }
            if bits.as_slice() <= &best[..bits.len()] {
                used[v] = true;
                place.push(v);
                rec(adj, place, used, bits, best);
                place.pop();
                used[v] = false;
            }
            bits.truncate(bits.len() - depth);
        }
    }
    rec(adj, &mut place, &mut used, &mut bits, &mut best);
    best
}

fn bits_to_code(bits: &[bool]) -> u64 {
    assert!(bits.len() <= 64);
    bits.iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

fn graph_to_adj(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

fn code_to_graph(n: usize, code: u64) -> Graph {
    let total = n * (n - 1) / 2;
    let mut g = Graph::new(n);
    let mut pos = 0;
    for j in 1..n {
        for i in 0..j {
            if (code >> (total - 1 - pos)) & 1 == 1 {
                g.add_edge(i, j);
            }
            pos += 1;
        }
    }
    g
}

pub(crate) fn canonical_code(g: &Graph) -> u64 {
    bits_to_code(&canonical_bits(&graph_to_adj(g)))
}

/// Canonical representatives of all isomorphism classes of loopless
/// graphs on exactly `n` vertices, built by augmenting the classes on
/// `n - 1` vertices with every possible neighborhood of a new vertex.
/// Sorted by (edge count, canonical code). Exact only for small `n`;
/// intended range is `n <= 8`.
pub fn enumerate_graphs(n: usize) -> Vec<Graph> {
    assert!(n >= 1 && n <= 10, "canonical enumeration is for small n");
    let mut codes: Vec<u64> = vec![0]; // the 1-vertex graph
    for level in 2..=n {
        let mut next: BTreeSet<u64> = BTreeSet::new();
        for &code in &codes {
            let base = code_to_graph(level - 1, code);
            for mask in 0..(1u64 << (level - 1)) {
                let mut g = Graph::new(level);
                for (u, v) in base.edges() {
                    g.add_edge(u, v);
                }
                for i in 0..(level - 1) {
                    if (mask >> i) & 1 == 1 {
                        g.add_edge(i, level - 1);
                    }
                }
                next.insert(canonical_code(&g));
            }
        }
        codes = next.into_iter().collect();
    }
    let mut graphs: Vec<Graph> = codes.into_iter().map(|c| code_to_graph(n, c)).collect();
    graphs.sort_by_key(|g| (g.edge_count(), canonical_code(g)));
    graphs
}

fn seeds_on_level(n: usize) -> Vec<MarkedGraph> {
    enumerate_graphs(n)
        .into_iter()
        .filter(|g| !three_colorable(g))
        .filter_map(|g| {
            // lexicographically least critical edge, if any
            let e = g
                .edges()
                .find(|&(u, v)| three_colorable(&g.without_edge(u, v)))?;
            Some(MarkedGraph::new(g, e).expect("edge is in the graph"))
        })
        .collect()
}

/// Deterministic sequence of marked seeds: loopless non-3-colorable
/// graphs with a critical edge, one canonical representative per
/// isomorphism class, ordered by (vertex count, edge count, canonical
/// adjacency code), each marked at its least critical edge.
pub fn enumerate_seeds(max_vertices: usize) -> Vec<MarkedGraph> {
    (1..=max_vertices).flat_map(seeds_on_level).collect()
}

/// The chain `H_1, H_2, ...`: the first seed, then each next element glued
/// from the previous one (at its marked edge) and the next seed. Every
/// element is re-verified loopless and non-3-colorable before it is
/// returned.
pub fn build_chain(n: usize, max_vertices: usize) -> Result<Vec<MarkedGraph>, GraphError> {
    assert!(n >= 1);
    let mut seeds: Vec<MarkedGraph> = Vec::new();
    for level in 1..=max_vertices {
        seeds.extend(seeds_on_level(level));
        if seeds.len() >= n {
            break;
        }
    }
    if seeds.len() < n {
        return Err(GraphError::SeedsExhausted);
    }
    let mut chain = Vec::with_capacity(n);
    let mut current = seeds[0].clone();
    verify_chain_element(&current)?;
    chain.push(current.clone());
    for seed in seeds.iter().take(n).skip(1) {
        current = glue(&current, seed)?;
        verify_chain_element(&current)?;
        chain.push(current.clone());
    }
    Ok(chain)
}

fn verify_chain_element(m: &MarkedGraph) -> Result<(), GraphError> {
    if m.graph.has_loop() {
        return Err(GraphError::LoopPresent);
    }
    if three_colorable(&m.graph) {
        return Err(GraphError::ThreeColorable);
    }
    Ok(())
}
