//! Quotient powers of a graph: the n-th tensor power factored by the
//! equivalence identifying every almost-constant tuple with its base
//! constant.

use crate::graph::Graph;
use crate::util::UnionFind;

use super::AlgebraError;

pub const DEFAULT_QUOTIENT_LIMIT: usize = 1 << 22;

fn tuple_index(d: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * d + a)
}

/// `quotient_power` with an explicit bound on both the number of tuples
/// and the number of componentwise-adjacent pairs visited.
pub fn quotient_power_with_limit(
    h: &Graph,
    n: usize,
    limit: usize,
) -> Result<Graph, AlgebraError> {
    assert!(n >= 2);
    let d = h.vertex_count();
    let tuple_count = (d as u128).checked_pow(n as u32);
    let ordered_edges = h.ordered_edges();
    let pair_count = (ordered_edges.len() as u128).checked_pow(n as u32);
    match (tuple_count, pair_count) {
        (Some(t), Some(p)) if t <= limit as u128 && p <= limit as u128 => {}
        _ => return Err(AlgebraError::SizeLimit),
    }
    let total = (d as usize).pow(n as u32);

    // identify {(x,…,x), (y,x,…,x), …, (x,…,x,y)} for every x, y
    let mut uf = UnionFind::new(total);
    for x in 0..d {
        let constant = tuple_index(d, &vec![x; n]);
        for y in 0..d {
            if y == x {
                continue;
            }
            let mut tuple = vec![x; n];
            for pos in 0..n {
                tuple[pos] = y;
                uf.union(constant as u32, tuple_index(d, &tuple) as u32);
                tuple[pos] = x;
            }
        }
    }
    let (class_of, members) = uf.freeze();

    // edges between classes with componentwise-adjacent representatives:
    // run through all selections of one ordered edge per coordinate
    let mut q = Graph::new(members.len());
    if !ordered_edges.is_empty() {
        let mut pick = vec![0usize; n];
        let mut u = vec![0usize; n];
        let mut v = vec![0usize; n];
        loop {
            for (i, &p) in pick.iter().enumerate() {
                let (a, b) = ordered_edges[p];
                u[i] = a;
                v[i] = b;
            }
            q.add_edge(
                class_of[tuple_index(d, &u)] as usize,
                class_of[tuple_index(d, &v)] as usize,
            );
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                pick[pos] += 1;
                if pick[pos] < ordered_edges.len() {
                    break;
                }
                pick[pos] = 0;
                if pos == 0 {
                    break;
                }
            }
            if pick.iter().all(|&p| p == 0) {
                break;
            }
        }
    }
    Ok(q)
}

/// Quotient of the n-th power of `h` by the almost-constant collapse.
pub fn quotient_power(h: &Graph, n: usize) -> Result<Graph, AlgebraError> {
    quotient_power_with_limit(h, n, DEFAULT_QUOTIENT_LIMIT)
}
