//! Triviality of a height-1 condition: satisfiability by projections.
//!
//! Assign to each symbol one of its coordinates; an identity
//! `f(x_{π(1)},…) ≈ g(x_{ρ(1)},…)` holds under the assignment exactly
//! when the chosen coordinates pull back to the same variable,
//! `π(i) = ρ(j)`. This is the label cover problem over the symbol
//! constraint graph.

use std::collections::BTreeMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::limits::{Expired, Limits};
use crate::solver::{Csp, TupleSet};

use super::H1Condition;

/// Witness of triviality: a projection coordinate per symbol (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionAssignment {
    pub choice: BTreeMap<String, usize>,
}

impl ProjectionAssignment {
    /// Direct check, independent of the search: every identity must pull
    /// both chosen coordinates back to the same variable.
    pub fn satisfies(&self, cond: &H1Condition) -> bool {
        for sym in cond.symbols() {
            match self.choice.get(&sym.id) {
                Some(&c) if c < sym.arity => {}
                _ => return false,
            }
        }
        cond.identities().iter().all(|ident| {
            let i = self.choice[&cond.symbols()[ident.lhs.sym].id];
            let j = self.choice[&cond.symbols()[ident.rhs.sym].id];
            ident.lhs.map[i] == ident.rhs.map[j]
        })
    }
}

/// Searches for a projection assignment satisfying the condition;
/// backtracking with arc consistency over the symbol constraint graph,
/// returning the lexicographically least assignment in symbol order.
pub fn is_trivial(cond: &H1Condition) -> Option<ProjectionAssignment> {
    try_is_trivial(cond, &Limits::none()).expect("no deadline set")
}

pub fn try_is_trivial(
    cond: &H1Condition,
    limits: &Limits,
) -> Result<Option<ProjectionAssignment>, Expired> {
    let domains: Vec<Vec<usize>> = cond
        .symbols()
        .iter()
        .map(|s| (0..s.arity).collect())
        .collect();
    let mut csp = Csp::new(domains);
    for ident in cond.identities() {
        let mut allowed = Vec::new();
        for (i, &vi) in ident.lhs.map.iter().enumerate() {
            for (j, &vj) in ident.rhs.map.iter().enumerate() {
                if vi == vj {
                    allowed.push(vec![i, j]);
                }
            }
        }
        csp.add_constraint(
            &[ident.lhs.sym, ident.rhs.sym],
            Rc::new(TupleSet::new(2, allowed)),
        );
    }
    Ok(csp.solve_lex_least(limits)?.map(|solution| {
        let choice = cond
            .symbols()
            .iter()
            .zip(&solution)
            .map(|(s, &c)| (s.id.clone(), c))
            .collect();
        ProjectionAssignment { choice }
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{qnu_condition, sigma_of_graph, siggers_condition, vertex_symbol};
    use super::*;
    use crate::graph::Graph;

    /// Brute force over all coordinate assignments.
    fn brute_trivial(cond: &H1Condition) -> bool {
        let arities: Vec<usize> = cond.symbols().iter().map(|s| s.arity).collect();
        let mut choice = vec![0usize; arities.len()];
        loop {
            let assignment = ProjectionAssignment {
                choice: cond
                    .symbols()
                    .iter()
                    .zip(&choice)
                    .map(|(s, &c)| (s.id.clone(), c))
                    .collect(),
            };
            if assignment.satisfies(cond) {
                return true;
            }
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    return false;
                }
                choice[pos] += 1;
                if choice[pos] < arities[pos] {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn sigma_k3_is_trivial_with_coordinate_projections() {
        let sigma = sigma_of_graph(&Graph::complete(3));
        let assignment = is_trivial(&sigma).unwrap();
        assert!(assignment.satisfies(&sigma));
        for v in 0..3 {
            assert_eq!(assignment.choice[&vertex_symbol(v)], v);
        }
    }

    #[test]
    fn sigma_k4_is_nontrivial() {
        assert!(is_trivial(&sigma_of_graph(&Graph::complete(4))).is_none());
    }

    #[test]
    fn siggers_is_nontrivial_and_qnu_too() {
        assert!(is_trivial(&siggers_condition()).is_none());
        assert!(is_trivial(&qnu_condition(3).unwrap()).is_none());
    }

    #[test]
    fn agrees_with_brute_force_on_small_conditions() {
        let samples = [
            sigma_of_graph(&Graph::complete(2)),
            sigma_of_graph(&Graph::looped_vertex()),
            siggers_condition(),
            qnu_condition(4).unwrap(),
        ];
        for cond in samples {
            if cond.symbols().len() <= 4 {
                assert_eq!(is_trivial(&cond).is_some(), brute_trivial(&cond));
            }
        }
    }
}
