//! The 18-vertex exclusive-or gadget and the glue construction built on it.
//!
//! Under any proper 3-coloring the gadget forces exactly one of its two
//! boundary pairs to receive distinct colors; dropping the apex edge `d`
//! additionally admits the both-pairs-equal case. Those three facts are
//! established by exhaustive enumeration in [`verify_gadget_n`], and the
//! builder refuses to hand out a gadget that fails them.

use std::sync::OnceLock;

use serde::Serialize;

use crate::limits::Limits;
use crate::solver::Csp;

use super::{
    edge_relation, is_critical_edge, three_colorable, Graph, GraphError, MarkedGraph,
};

/// Vertex layout: top path `0..=5` (boundary `x` = 0, `y` = 5), bottom
/// path `6..=11` (`x'` = 6, `y'` = 11), crossing vertices 12..=15 between
/// columns 0-1, 1-2, 3-4, 4-5, and the two apexes 16 (bottom) and 17
/// (top) joined by the distinguished edge `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetN {
    pub graph: Graph,
    pub x: usize,
    pub x_prime: usize,
    pub y: usize,
    pub y_prime: usize,
    pub d: (usize, usize),
}

/// Outcome of the exhaustive boundary enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetReport {
    /// Boundary assignments (out of 81) extending to a proper 3-coloring.
    pub extendable_count: usize,
    /// Both-pairs-equal assignments (out of 9) extending once `d` is removed.
    pub eq_eq_extendable_without_d: usize,
    /// Extendable set equals the exactly-one-pair-differs set.
    pub p1: bool,
    /// Every exactly-one-pair-differs assignment extends.
    pub p2: bool,
    /// Every both-pairs-equal assignment extends to the gadget minus `d`.
    pub p3: bool,
}

fn raw_gadget() -> GadgetN {
    let mut g = Graph::new(18);
    for i in 0..5 {
        g.add_edge(i, i + 1); // top path
        g.add_edge(6 + i, 6 + i + 1); // bottom path
    }
    // crossing vertices: column pairs (0,1), (1,2), (3,4), (4,5)
    for (m, col) in [(12, 0), (13, 1), (14, 3), (15, 4)] {
        g.add_edge(m, col);
        g.add_edge(m, col + 1);
        g.add_edge(m, 6 + col);
        g.add_edge(m, 6 + col + 1);
    }
    // direct diagonals between columns 2 and 3
    g.add_edge(8, 3);
    g.add_edge(9, 2);
    // apexes and the distinguished edge
    g.add_edge(16, 8);
    g.add_edge(16, 9);
    g.add_edge(17, 2);
    g.add_edge(17, 3);
    g.add_edge(16, 17);
    GadgetN {
        graph: g,
        x: 0,
        x_prime: 6,
        y: 5,
        y_prime: 11,
        d: (16, 17),
    }
}

fn extends(g: &Graph, pins: &[(usize, usize)]) -> bool {
    let rel = edge_relation(&Graph::complete(3));
    let mut domains = vec![vec![0, 1, 2]; g.vertex_count()];
    for &(v, c) in pins {
        domains[v] = vec![c];
    }
    let mut csp = Csp::new(domains);
    for (u, v) in g.edges() {
        csp.add_constraint(&[u, v], rel.clone());
    }
    csp.satisfiable(&Limits::none()).expect("no deadline set")
}

/// Enumerates all 81 boundary assignments and decides extendability to a
/// proper 3-coloring of the gadget and of the gadget minus `d`.
pub fn verify_gadget_n(n: &GadgetN) -> Result<GadgetReport, GraphError> {
    let without_d = n.graph.without_edge(n.d.0, n.d.1);
    let mut extendable_count = 0;
    let mut eq_eq_extendable = 0;
    let (mut p1, mut p2, mut p3) = (true, true, true);
    for code in 0..81usize {
        let colors = [
            code % 3,
            (code / 3) % 3,
            (code / 9) % 3,
            (code / 27) % 3,
        ];
        let pins = [
            (n.x, colors[0]),
            (n.x_prime, colors[1]),
            (n.y, colors[2]),
            (n.y_prime, colors[3]),
        ];
        let x_differs = colors[0] != colors[1];
        let y_differs = colors[2] != colors[3];
        let exactly_one = x_differs != y_differs;
        let ext = extends(&n.graph, &pins);
        if ext {
            extendable_count += 1;
        }
        if ext != exactly_one {
            p1 = false;
        }
        if exactly_one && !ext {
            p2 = false;
        }
        if !x_differs && !y_differs {
            if extends(&without_d, &pins) {
                eq_eq_extendable += 1;
            } else {
                p3 = false;
            }
        }
    }
    let report = GadgetReport {
        extendable_count,
        eq_eq_extendable_without_d: eq_eq_extendable,
        p1,
        p2,
        p3,
    };
    if !(p1 && p2 && p3) {
        return Err(GraphError::GadgetInvalid(format!(
            "p1={} p2={} p3={} extendable={} eq-eq={}",
            p1, p2, p3, extendable_count, eq_eq_extendable
        )));
    }
    Ok(report)
}

static GADGET: OnceLock<GadgetN> = OnceLock::new();

/// The fixed gadget; verified once, and construction hard-fails if any of
/// the three boundary properties does not hold.
pub fn build_gadget_n() -> GadgetN {
    GADGET
        .get_or_init(|| {
            let n = raw_gadget();
            verify_gadget_n(&n).expect("gadget construction must satisfy its boundary properties");
            n
        })
        .clone()
}

/// Vertex correspondence of a glue result, used to translate conditions.
#[derive(Debug, Clone)]
pub(crate) struct GlueLayout {
    pub result: MarkedGraph,
    /// left-graph vertex -> result vertex
    pub left_map: Vec<usize>,
    /// right-graph vertex -> result vertex
    pub right_map: Vec<usize>,
}

pub(crate) fn glue_layout(
    left: &MarkedGraph,
    right: &MarkedGraph,
) -> Result<GlueLayout, GraphError> {
    for part in [left, right] {
        if part.graph.has_loop() {
            return Err(GraphError::LoopPresent);
        }
        if three_colorable(&part.graph) {
            return Err(GraphError::ThreeColorable);
        }
        if !is_critical_edge(&part.graph, part.marked) {
            return Err(GraphError::NotCritical);
        }
    }
    let gadget = build_gadget_n();
    let ng = left.graph.vertex_count();
    let nh = right.graph.vertex_count();

    let left_map: Vec<usize> = (0..ng).collect();
    let right_map: Vec<usize> = (0..nh).map(|v| ng + 14 + v).collect();
    let mut gadget_map = [usize::MAX; 18];
    gadget_map[gadget.x] = left.marked.0;
    gadget_map[gadget.x_prime] = left.marked.1;
    gadget_map[gadget.y] = right_map[right.marked.0];
    gadget_map[gadget.y_prime] = right_map[right.marked.1];
    let mut next = ng;
    for v in 0..18 {
        if gadget_map[v] == usize::MAX {
            gadget_map[v] = next;
            next += 1;
        }
    }
    debug_assert_eq!(next, ng + 14);

    let mut w = Graph::new(ng + 14 + nh);
    for (u, v) in left.graph.without_edge(left.marked.0, left.marked.1).edges() {
        w.add_edge(u, v);
    }
    for (u, v) in right
        .graph
        .without_edge(right.marked.0, right.marked.1)
        .edges()
    {
        w.add_edge(right_map[u], right_map[v]);
    }
    for (u, v) in gadget.graph.edges() {
        w.add_edge(gadget_map[u], gadget_map[v]);
    }
    debug_assert!(!w.has_loop());
    let d = (gadget_map[gadget.d.0], gadget_map[gadget.d.1]);
    Ok(GlueLayout {
        result: MarkedGraph::new(w, d)?,
        left_map,
        right_map,
    })
}

/// Glues two marked graphs through a fresh gadget: the left marked edge is
/// replaced by the `(x, x')` boundary pair and the right one by `(y, y')`,
/// both pairs remaining non-edges. The result is marked at the gadget
/// edge `d`.
pub fn glue(left: &MarkedGraph, right: &MarkedGraph) -> Result<MarkedGraph, GraphError> {
    Ok(glue_layout(left, right)?.result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadget_shape() {
        let n = build_gadget_n();
        assert_eq!(n.graph.vertex_count(), 18);
        assert_eq!(n.graph.edge_count(), 33);
        // boundary vertex x touches only the top path and the first crossing
        assert_eq!(n.graph.neighbors(n.x), vec![1, 12]);
        assert_eq!(n.graph.degree(n.x), 2);
        // d joins the two apexes
        assert!(n.graph.has_edge(16, 17));
        // boundary pairs are non-edges
        assert!(!n.graph.has_edge(n.x, n.x_prime));
        assert!(!n.graph.has_edge(n.y, n.y_prime));
    }

    #[test]
    fn gadget_passes_all_three_properties() {
        let n = build_gadget_n();
        let report = verify_gadget_n(&n).unwrap();
        assert!(report.p1 && report.p2 && report.p3);
        assert_eq!(report.extendable_count, 36);
        assert_eq!(report.eq_eq_extendable_without_d, 9);
    }

    fn k4_marked() -> MarkedGraph {
        MarkedGraph::new(Graph::complete(4), (0, 1)).unwrap()
    }

    #[test]
    fn glue_of_two_k4() {
        let w = glue(&k4_marked(), &k4_marked()).unwrap();
        assert_eq!(w.graph.vertex_count(), 22);
        assert_eq!(w.graph.edge_count(), 43);
        assert!(!w.graph.has_loop());
        assert!(!three_colorable(&w.graph));
        assert!(is_critical_edge(&w.graph, w.marked));
    }

    #[test]
    fn glue_orientation_does_not_break_the_lemma() {
        let flipped = MarkedGraph::new(Graph::complete(4), (1, 0)).unwrap();
        let w = glue(&flipped, &k4_marked()).unwrap();
        assert!(!three_colorable(&w.graph));
        assert!(is_critical_edge(&w.graph, w.marked));
    }

    #[test]
    fn glue_rejects_bad_inputs() {
        let k3 = MarkedGraph::new(Graph::complete(3), (0, 1)).unwrap();
        assert_eq!(glue(&k3, &k4_marked()), Err(GraphError::ThreeColorable));
        let mut looped = Graph::complete(4);
        looped.add_edge(2, 2);
        let looped = MarkedGraph::new(looped, (0, 1)).unwrap();
        assert_eq!(glue(&looped, &k4_marked()), Err(GraphError::LoopPresent));
        // K_5 is not 3-colorable, but no single edge removal fixes that
        let k5 = MarkedGraph::new(Graph::complete(5), (0, 1)).unwrap();
        assert_eq!(glue(&k5, &k4_marked()), Err(GraphError::NotCritical));
    }
}
