//! Finite undirected graphs with optional loops, homomorphism and
//! 3-coloring search, critical edges, the exclusive-or gadget and the
//! glue construction.

use std::collections::BTreeSet;
use std::rc::Rc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::limits::{Expired, Limits};
use crate::solver::{Csp, TupleSet};

mod gadget;
mod seeds;

pub use gadget::{build_gadget_n, glue, verify_gadget_n, GadgetN, GadgetReport};
pub(crate) use gadget::glue_layout;
pub use seeds::{build_chain, enumerate_graphs, enumerate_seeds};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph is 3-colorable")]
    ThreeColorable,
    #[error("graph has a loop")]
    LoopPresent,
    #[error("marked edge is not critical")]
    NotCritical,
    #[error("edge endpoints out of range or marked pair is not an edge")]
    BadEdge,
    #[error("gadget verification failed: {0}")]
    GadgetInvalid(String),
    #[error("seed enumeration exhausted under the vertex bound")]
    SeedsExhausted,
}

/// Undirected graph on vertices `0..n`; loops allowed. Each unordered
/// pair is stored once as `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Cycle `C_n`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut g = Graph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    /// Wheel: a cycle on `rim` vertices plus a hub adjacent to all of them.
    pub fn wheel(rim: usize) -> Self {
        let mut g = Graph::cycle(rim);
        g.n += 1;
        for u in 0..rim {
            g.add_edge(u, rim);
        }
        g
    }

    /// Single vertex carrying a loop.
    pub fn looped_vertex() -> Self {
        let mut g = Graph::new(1);
        g.add_edge(0, 0);
        g
    }

    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n || v >= self.n {
            return Err(GraphError::BadEdge);
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.try_add_edge(u, v).expect("edge endpoints in range");
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Edges as normalized `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Both orientations of every edge; a loop contributes one pair.
    pub fn ordered_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.edges.len());
        for &(u, v) in &self.edges {
            out.push((u, v));
            if u != v {
                out.push((v, u));
            }
        }
        out.sort();
        out
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|&(u, v)| u == v)
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn degree(&self, u: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == u) + usize::from(b == u))
            .sum()
    }

    /// Copy with one edge removed.
    pub fn without_edge(&self, u: usize, v: usize) -> Graph {
        let mut g = self.clone();
        g.edges.remove(&(u.min(v), u.max(v)));
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        Graph::from_edges(repr.n, repr.edges).map_err(serde::de::Error::custom)
    }
}

/// A graph with a distinguished edge; the pair order carries the
/// orientation used by the glue construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedGraph {
    pub graph: Graph,
    pub marked: (usize, usize),
}

impl MarkedGraph {
    pub fn new(graph: Graph, marked: (usize, usize)) -> Result<Self, GraphError> {
        if !graph.has_edge(marked.0, marked.1) {
            return Err(GraphError::BadEdge);
        }
        Ok(MarkedGraph { graph, marked })
    }
}

#[derive(Serialize, Deserialize)]
struct MarkedRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
    marked: (usize, usize),
}

impl Serialize for MarkedGraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MarkedRepr {
            n: self.graph.n,
            edges: self.graph.edges().collect(),
            marked: self.marked,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MarkedRepr::deserialize(d)?;
        let graph = Graph::from_edges(repr.n, repr.edges).map_err(serde::de::Error::custom)?;
        MarkedGraph::new(graph, repr.marked).map_err(serde::de::Error::custom)
    }
}

/// A vertex map between graphs. Validity is checked by
/// [`Hom::is_homomorphism`], a plain edge loop independent of any search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hom {
    pub map: Vec<usize>,
}

impl Hom {
    /// Edge preservation: every source edge, loops included, must land on
    /// an edge of the target.
    pub fn is_homomorphism(&self, source: &Graph, target: &Graph) -> bool {
        if self.map.len() != source.n {
            return false;
        }
        if self.map.iter().any(|&v| v >= target.n) {
            return false;
        }
        source
            .edges()
            .all(|(u, v)| target.has_edge(self.map[u], self.map[v]))
    }

    pub fn compose(&self, then: &Hom) -> Hom {
        Hom {
            map: self.map.iter().map(|&v| then.map[v]).collect(),
        }
    }
}

/// An assignment of the three colors to vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub assignment: Vec<u8>,
}

impl Coloring {
    /// No edge is monochromatic; a graph with a loop is never proper.
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.assignment.len() == g.vertex_count()
            && self.assignment.iter().all(|&c| c < 3)
            && g.edges()
                .all(|(u, v)| self.assignment[u] != self.assignment[v])
    }
}

impl From<&Hom> for Coloring {
    fn from(h: &Hom) -> Self {
        Coloring {
            assignment: h.map.iter().map(|&v| v as u8).collect(),
        }
    }
}

fn edge_relation(g: &Graph) -> Rc<TupleSet> {
    let mut tuples = Vec::with_capacity(2 * g.edge_count());
    for (u, v) in g.edges() {
        tuples.push(vec![u, v]);
        if u != v {
            tuples.push(vec![v, u]);
        }
    }
    Rc::new(TupleSet::new(2, tuples))
}

/// Homomorphism search with a deadline. Returns the lexicographically
/// least homomorphism under vertex order when one exists.
pub fn try_hom_search(
    source: &Graph,
    target: &Graph,
    limits: &Limits,
) -> Result<Option<Hom>, Expired> {
    let rel = edge_relation(target);
    let mut csp = Csp::new(vec![(0..target.n).collect(); source.n]);
    for (u, v) in source.edges() {
        csp.add_constraint(&[u, v], rel.clone());
    }
    Ok(csp.solve_lex_least(limits)?.map(|map| Hom { map }))
}

/// Unbounded [`try_hom_search`]. 3-colorability is the derived call
/// `hom_search(g, &Graph::complete(3))`.
pub fn hom_search(source: &Graph, target: &Graph) -> Option<Hom> {
    try_hom_search(source, target, &Limits::none()).expect("no deadline set")
}

pub fn three_colorable(g: &Graph) -> bool {
    hom_search(g, &Graph::complete(3)).is_some()
}

pub fn find_three_coloring(g: &Graph) -> Option<Coloring> {
    hom_search(g, &Graph::complete(3)).map(|h| Coloring::from(&h))
}

/// Whether removing `(u, v)` makes a non-3-colorable graph 3-colorable.
pub fn is_critical_edge(g: &Graph, (u, v): (usize, usize)) -> bool {
    g.has_edge(u, v) && !three_colorable(g) && three_colorable(&g.without_edge(u, v))
}

/// Removes edges in lexicographic order until the graph becomes
/// 3-colorable; returns the second-to-last graph together with the edge
/// whose removal finished the run. That edge is critical for the
/// returned graph.
pub fn trim_to_critical(g: &Graph) -> Result<(Graph, (usize, usize)), GraphError> {
    if g.has_loop() {
        return Err(GraphError::LoopPresent);
    }
    if three_colorable(g) {
        return Err(GraphError::ThreeColorable);
    }
    let mut current = g.clone();
    let order: Vec<(usize, usize)> = g.edges().collect();
    for e in order {
        let next = current.without_edge(e.0, e.1);
        if three_colorable(&next) {
            return Ok((current, e));
        }
        current = next;
    }
    unreachable!("an edgeless graph is 3-colorable");
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force 3-coloring oracle: tries all 3^n assignments.
    pub(crate) fn brute_three_colorable(g: &Graph) -> bool {
        let n = g.vertex_count();
        assert!(n <= 12);
        let mut assignment = vec![0u8; n];
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            for slot in assignment.iter_mut() {
                *slot = (c % 3) as u8;
                c /= 3;
            }
            if (Coloring {
                assignment: assignment.clone(),
            })
            .is_proper(g)
            {
                return true;
            }
        }
        false
    }

    #[test]
    fn hom_k3_to_k3_is_identity() {
        let k3 = Graph::complete(3);
        let h = hom_search(&k3, &k3).unwrap();
        assert_eq!(h.map, vec![0, 1, 2]);
        assert!(h.is_homomorphism(&k3, &k3));
    }

    #[test]
    fn k4_has_no_hom_to_k3() {
        assert!(hom_search(&Graph::complete(4), &Graph::complete(3)).is_none());
    }

    #[test]
    fn c5_is_three_colorable() {
        let c5 = Graph::cycle(5);
        assert!(brute_three_colorable(&c5));
        let h = hom_search(&c5, &Graph::complete(3)).unwrap();
        assert!(h.is_homomorphism(&c5, &Graph::complete(3)));
    }

    #[test]
    fn loops_must_map_to_loops() {
        let looped = Graph::looped_vertex();
        assert!(hom_search(&looped, &Graph::complete(3)).is_none());
        assert!(hom_search(&looped, &looped).is_some());
        // identifying adjacent vertices requires a loop in the target
        let k2 = Graph::complete(2);
        let bad = Hom { map: vec![0, 0] };
        assert!(!bad.is_homomorphism(&k2, &k2));
    }

    #[test]
    fn trim_k4_returns_first_edge() {
        let (g, e) = trim_to_critical(&Graph::complete(4)).unwrap();
        assert_eq!(g, Graph::complete(4));
        assert_eq!(e, (0, 1));
        // removing any single edge of K_4 yields a 3-colorable graph
        for edge in Graph::complete(4).edges() {
            assert!(brute_three_colorable(&Graph::complete(4).without_edge(edge.0, edge.1)));
        }
    }

    #[test]
    fn trim_rejects_colorable_and_looped() {
        assert_eq!(
            trim_to_critical(&Graph::complete(3)),
            Err(GraphError::ThreeColorable)
        );
        let mut g = Graph::complete(4);
        g.add_edge(0, 0);
        assert_eq!(trim_to_critical(&g), Err(GraphError::LoopPresent));
    }

    #[test]
    fn trim_wheel_gives_verified_critical_edge() {
        let w5 = Graph::wheel(5);
        assert!(!brute_three_colorable(&w5));
        let (g, e) = trim_to_critical(&w5).unwrap();
        assert!(!brute_three_colorable(&g));
        assert!(brute_three_colorable(&g.without_edge(e.0, e.1)));
        assert!(is_critical_edge(&g, e));
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u..n).map(move |v| (u, v)))
                .collect();
            proptest::collection::vec(proptest::bool::ANY, pairs.len()).prop_map(move |mask| {
                let mut g = Graph::new(n);
                for (keep, &(u, v)) in mask.iter().zip(&pairs) {
                    if *keep && u != v {
                        g.add_edge(u, v);
                    }
                }
                g
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hom_composition_preserves_edges(a in arb_graph(10), b in arb_graph(10), c in arb_graph(10)) {
            if let (Some(f), Some(g)) = (hom_search(&a, &b), hom_search(&b, &c)) {
                prop_assert!(f.compose(&g).is_homomorphism(&a, &c));
            }
        }

        #[test]
        fn search_agrees_with_brute_force_coloring(g in arb_graph(8)) {
            prop_assert_eq!(three_colorable(&g), brute_three_colorable(&g));
        }

        #[test]
        fn trim_output_is_critical(g in arb_graph(7)) {
            if !g.has_loop() && !three_colorable(&g) {
                let (trimmed, e) = trim_to_critical(&g).unwrap();
                prop_assert!(!three_colorable(&trimmed));
                prop_assert!(three_colorable(&trimmed.without_edge(e.0, e.1)));
            }
        }
    }
}
