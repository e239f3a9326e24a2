//! Tractable CSPs for forbidden-image templates, plus the tuple blow-up
//! encoding and the loop-like obstruction listings used by the growth
//! construction.

use crate::algebra::{FiniteStructure, Relation};
use crate::graph::{hom_search, try_hom_search, Graph};
use crate::limits::{Expired, Limits};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ForbError {
    #[error("graph has a loop")]
    LoopPresent,
    #[error("template graph must be connected with at least one edge")]
    NotConnected,
    #[error("malformed instance: {0}")]
    Malformed(String),
}

/// A template given by one forbidden connected loopless graph: an
/// instance is accepted when no homomorphic image of the forbidden graph
/// sits inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateForb {
    forbidden: Graph,
}

impl TemplateForb {
    pub fn new(forbidden: Graph) -> Result<Self, ForbError> {
        if forbidden.has_loop() {
            return Err(ForbError::LoopPresent);
        }
        if forbidden.edge_count() == 0 || !forbidden.is_connected() {
            return Err(ForbError::NotConnected);
        }
        Ok(TemplateForb { forbidden })
    }

    pub fn forbidden(&self) -> &Graph {
        &self.forbidden
    }
}

/// A conjunction of edge atoms over variables; repeated variables in an
/// atom produce loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    pub var_count: usize,
    pub atoms: Vec<(usize, usize)>,
}

impl CspInstance {
    pub fn new(var_count: usize, atoms: Vec<(usize, usize)>) -> Result<Self, ForbError> {
        if atoms
            .iter()
            .any(|&(u, v)| u >= var_count || v >= var_count)
        {
            return Err(ForbError::Malformed("atom variable out of range".into()));
        }
        Ok(CspInstance { var_count, atoms })
    }

    /// The instance graph: one vertex per variable, atoms as edges.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new(self.var_count);
        for &(u, v) in &self.atoms {
            g.add_edge(u, v);
        }
        g
    }
}

/// Decides the CSP of the template: accept exactly when the forbidden
/// graph has no homomorphism into the instance graph.
pub fn solve_css_csp(t: &TemplateForb, inst: &CspInstance) -> bool {
    hom_search(t.forbidden(), &inst.to_graph()).is_none()
}

pub fn try_solve_css_csp(
    t: &TemplateForb,
    inst: &CspInstance,
    limits: &Limits,
) -> Result<bool, Expired> {
    Ok(try_hom_search(t.forbidden(), &inst.to_graph(), limits)?.is_none())
}

/// Replaces every vertex of a loopless graph by a block of `n` fresh
/// elements and every ordered edge by one `2n`-ary tuple joining the two
/// blocks; all entries of every tuple are pairwise distinct.
pub fn encode_graph_tuples(g: &Graph, n: usize) -> Result<FiniteStructure, ForbError> {
    assert!(n >= 1);
    if g.has_loop() {
        return Err(ForbError::LoopPresent);
    }
    let mut tuples = std::collections::BTreeSet::new();
    for (x, y) in g.ordered_edges() {
        let tuple: Vec<usize> = (0..n)
            .map(|i| x * n + i)
            .chain((0..n).map(|i| y * n + i))
            .collect();
        tuples.insert(tuple);
    }
    Ok(FiniteStructure {
        size: n * g.vertex_count(),
        relations: vec![Relation {
            name: "R".into(),
            arity: 2 * n,
            tuples,
        }],
    })
}

/// One structure per set partition of the `2n` coordinate positions into
/// fewer than `2n` blocks: a single `R`-tuple with repeated entries,
/// automatically connected because a tuple's entries span a Gaifman
/// clique. Emitted in lexicographic order of the restricted-growth
/// strings describing the partitions.
pub fn loop_like_bounds(n: usize) -> Vec<FiniteStructure> {
    assert!(n >= 1);
    let positions = 2 * n;
    let mut out = Vec::new();
    let mut rgs = vec![0usize; positions];
    loop {
        let blocks = rgs.iter().copied().max().unwrap_or(0) + 1;
        if blocks < positions {
            out.push(FiniteStructure {
                size: blocks,
                relations: vec![Relation {
                    name: "R".into(),
                    arity: positions,
                    tuples: [rgs.clone()].into(),
                }],
            });
        }
        // next restricted-growth string in lexicographic order
        let mut pos = positions;
        loop {
            if pos <= 1 {
                return out;
            }
            pos -= 1;
            let cap = rgs[..pos].iter().copied().max().unwrap() + 1;
            if rgs[pos] < cap {
                rgs[pos] += 1;
                for slot in rgs[pos + 1..].iter_mut() {
                    *slot = 0;
                }
                break;
            }
            rgs[pos] = 0;
        }
    }
}
