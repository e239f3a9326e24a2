//! The graph on ternary clone elements, the minion-homomorphism-to-
//! projections test, and the pseudo-Siggers probe.

use std::rc::Rc;

use crate::cond::{SIGGERS_LEFT, SIGGERS_RIGHT};
use crate::graph::{three_colorable, Graph};
use crate::limits::{Expired, Limits};
use crate::solver::{Csp, TupleSet};

use super::indicator::{build_indicator, enumerate_polymorphisms};
use super::{AlgebraError, FiniteStructure, OperationTable};

fn tuple_index(domain: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * domain + a)
}

/// Base CSP over the cells of a single 6-ary operation table with all
/// preservation constraints, propagated to its root fixpoint once;
/// callers pin cells by shrinking domains and re-propagate from there.
fn senary_csp(b: &FiniteStructure) -> Option<Csp> {
    use crate::cond::{H1Condition, Symbol};
    let free = H1Condition::new(
        vec![Symbol {
            id: "g".into(),
            arity: 6,
        }],
        vec![],
    )
    .expect("one free symbol is well-formed");
    let mut csp = build_indicator(b, &free, None).to_csp(b);
    csp.propagate_root().then_some(csp)
}

fn pin_minor(
    domains: &mut [Vec<usize>],
    pinned: &mut Vec<usize>,
    d: usize,
    pattern: &[usize; 6],
    table: &OperationTable,
) -> bool {
    let mut args = vec![0usize; 3];
    loop {
        let cell: Vec<usize> = pattern.iter().map(|&v| args[v]).collect();
        let idx = tuple_index(d, &cell);
        let value = table.eval(&args);
        if !domains[idx].contains(&value) {
            return false;
        }
        domains[idx] = vec![value];
        pinned.push(idx);
        let mut pos = 3;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            args[pos] += 1;
            if args[pos] < d {
                break;
            }
            args[pos] = 0;
            if pos == 0 {
                return true;
            }
        }
    }
}

fn edge_search(
    base: &Csp,
    b: &FiniteStructure,
    f1: &OperationTable,
    f2: &OperationTable,
    want_witness: bool,
    limits: &Limits,
) -> Result<Option<Option<OperationTable>>, Expired> {
    let mut domains = base.domains.clone();
    let mut pinned = Vec::new();
    if !pin_minor(&mut domains, &mut pinned, b.size, &SIGGERS_LEFT, f1)
        || !pin_minor(&mut domains, &mut pinned, b.size, &SIGGERS_RIGHT, f2)
    {
        return Ok(None);
    }
    if want_witness {
        match base.solve_lex_least_pinned(domains, &pinned, limits)? {
            Some(sol) => Ok(Some(Some(OperationTable {
                arity: 6,
                domain: b.size,
                values: sol,
            }))),
            None => Ok(None),
        }
    } else if base.satisfiable_pinned(domains, &pinned, limits)? {
        Ok(Some(None))
    } else {
        Ok(None)
    }
}

/// The 6-ary polymorphism linking two ternary ones through the two
/// Siggers patterns, when it exists.
pub fn fgraph_edge_witness(
    b: &FiniteStructure,
    f1: &OperationTable,
    f2: &OperationTable,
) -> Option<OperationTable> {
    let base = senary_csp(b)?;
    edge_search(&base, b, f1, f2, true, &Limits::none())
        .expect("no deadline set")
        .map(|w| w.expect("witness requested"))
}

/// The graph whose vertices are the ternary polymorphisms of `b`, with an
/// edge where a 6-ary polymorphism realizes the pair as its two Siggers
/// minors. The relation is symmetric: composing a realizing operation
/// with the coordinate swap (1 2)(3 4)(5 6) exchanges the two patterns.
pub fn build_fgraph(b: &FiniteStructure, cap: usize) -> Result<Graph, AlgebraError> {
    try_build_fgraph(b, cap, &Limits::none()).expect("no deadline set")
}

pub fn try_build_fgraph(
    b: &FiniteStructure,
    cap: usize,
    limits: &Limits,
) -> Result<Result<Graph, AlgebraError>, Expired> {
    let polys = super::indicator::try_enumerate_polymorphisms(b, 3, cap, limits)?;
    if polys.truncated {
        return Ok(Err(AlgebraError::CapExceeded));
    }
    let tables = polys.tables;
    let mut g = Graph::new(tables.len());
    let Some(base) = senary_csp(b) else {
        return Ok(Ok(g)); // no 6-ary polymorphism at all, hence no edges
    };
    for i in 0..tables.len() {
        for j in i..tables.len() {
            if edge_search(&base, b, &tables[i], &tables[j], false, limits)?.is_some() {
                g.add_edge(i, j);
            }
        }
    }
    Ok(Ok(g))
}

const FGRAPH_CROSSCHECK_CAP: usize = 256;
// bound on the per-pair preservation work (sum over relations of
// |tuples|^6) below which the cross-check is considered feasible
const FGRAPH_CROSSCHECK_WORK: u128 = 200_000;

fn fgraph_feasible(b: &FiniteStructure) -> bool {
    let work: Option<u128> = b
        .relations
        .iter()
        .try_fold(0u128, |acc, r| {
            (r.tuples.len() as u128)
                .checked_pow(6)
                .and_then(|w| acc.checked_add(w))
        });
    matches!(work, Some(w) if w <= FGRAPH_CROSSCHECK_WORK)
}

/// Whether the polymorphism clone maps into the projections: true exactly
/// when no Siggers operation exists. When the ternary clone part and the
/// per-pair search work are small enough, the answer is cross-checked
/// against 3-colorability of the clone graph; a disagreement is a bug
/// and aborts.
pub fn minion_hom_to_p(b: &FiniteStructure) -> bool {
    let answer = super::find_siggers(b).is_none();
    if fgraph_feasible(b) {
        let probe = enumerate_polymorphisms(b, 3, FGRAPH_CROSSCHECK_CAP);
        if !probe.truncated {
            let fg = build_fgraph(b, FGRAPH_CROSSCHECK_CAP).expect("cap checked above");
            assert_eq!(
                three_colorable(&fg),
                answer,
                "clone-graph colorability must agree with the Siggers search"
            );
        }
    }
    answer
}

/// Searches for a pseudo-Siggers polymorphism: endomorphism pairs
/// (e1, e2) in lexicographic table order, each solved as an indicator
/// with the linking constraints `e1(s[left]) = e2(s[right])` over all
/// pattern instantiations; the first success wins.
pub fn find_pseudo_siggers(
    b: &FiniteStructure,
    endo_cap: usize,
) -> Result<Option<(OperationTable, (OperationTable, OperationTable))>, AlgebraError> {
    try_find_pseudo_siggers(b, endo_cap, &Limits::none()).expect("no deadline set")
}

pub fn try_find_pseudo_siggers(
    b: &FiniteStructure,
    endo_cap: usize,
    limits: &Limits,
) -> Result<
    Result<Option<(OperationTable, (OperationTable, OperationTable))>, AlgebraError>,
    Expired,
> {
    let endos = super::indicator::try_enumerate_polymorphisms(b, 1, usize::MAX, limits)?.tables;
    let total_pairs = endos.len() * endos.len();
    let Some(base) = senary_csp(b) else {
        return Ok(Ok(None));
    };
    let d = b.size;
    let mut tried = 0usize;
    for e1 in &endos {
        for e2 in &endos {
            if tried == endo_cap {
                return Ok(Err(AlgebraError::CapExceeded));
            }
            tried += 1;
            let mut csp = base.clone();
            // linking constraints between the two pattern cells of every
            // variable instantiation
            let allowed: Vec<Vec<usize>> = (0..d)
                .flat_map(|u| {
                    (0..d)
                        .filter(move |&v| e1.values[u] == e2.values[v])
                        .map(move |v| vec![u, v])
                })
                .collect();
            let rel = Rc::new(TupleSet::new(2, allowed));
            let mut args = vec![0usize; 3];
            loop {
                let left: Vec<usize> = SIGGERS_LEFT.iter().map(|&v| args[v]).collect();
                let right: Vec<usize> = SIGGERS_RIGHT.iter().map(|&v| args[v]).collect();
                csp.add_constraint(
                    &[tuple_index(d, &left), tuple_index(d, &right)],
                    rel.clone(),
                );
                let mut pos = 3;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    args[pos] += 1;
                    if args[pos] < d {
                        break;
                    }
                    args[pos] = 0;
                    if pos == 0 {
                        break;
                    }
                }
                if args.iter().all(|&a| a == 0) {
                    break;
                }
            }
            if let Some(sol) = csp.solve_lex_least(limits)? {
                let table = OperationTable {
                    arity: 6,
                    domain: d,
                    values: sol,
                };
                assert!(table.is_polymorphism(b));
                return Ok(Ok(Some((table, (e1.clone(), e2.clone())))));
            }
        }
    }
    debug_assert!(tried == total_pairs);
    Ok(Ok(None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fgraph_of_k3_is_colorable_with_18_vertices() {
        let fg = build_fgraph(&FiniteStructure::k3(), 64).unwrap();
        assert_eq!(fg.vertex_count(), 18);
        assert!(!fg.has_loop());
        assert!(three_colorable(&fg));
    }

    #[test]
    fn fgraph_of_looped_vertex_is_a_loop() {
        let fg = build_fgraph(&FiniteStructure::looped_vertex(), 8).unwrap();
        assert_eq!(fg.vertex_count(), 1);
        assert!(fg.has_loop());
        assert!(!three_colorable(&fg));
    }

    #[test]
    fn fgraph_cap() {
        assert_eq!(
            build_fgraph(&FiniteStructure::k3(), 4),
            Err(AlgebraError::CapExceeded)
        );
    }

    #[test]
    fn fgraph_edges_carry_witnesses() {
        let b = FiniteStructure::k3();
        let polys = enumerate_polymorphisms(&b, 3, usize::MAX).tables;
        let fg = build_fgraph(&b, 64).unwrap();
        let some_edge = fg.edges().next().unwrap();
        let w = fgraph_edge_witness(&b, &polys[some_edge.0], &polys[some_edge.1]).unwrap();
        assert!(w.is_polymorphism(&b));
        // the two minors reproduce the endpoint tables
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    assert_eq!(w.eval(&[x, y, x, z, y, z]), polys[some_edge.0].eval(&[x, y, z]));
                    assert_eq!(w.eval(&[y, x, z, x, z, y]), polys[some_edge.1].eval(&[x, y, z]));
                }
            }
        }
    }

    #[test]
    fn fgraph_edges_witness_the_single_edge_condition() {
        use crate::algebra::WitnessAssignment;
        use crate::cond::sigma_of_graph;
        // the condition of the one-edge graph is satisfied with the very
        // tables attached to any clone-graph edge; the reversed edge
        // symbol is the witness composed with the pattern swap
        let b = FiniteStructure::k3();
        let polys = enumerate_polymorphisms(&b, 3, usize::MAX).tables;
        let fg = build_fgraph(&b, 64).unwrap();
        let single_edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        let sigma = sigma_of_graph(&single_edge);
        for (i, j) in fg.edges().take(5) {
            let w = fgraph_edge_witness(&b, &polys[i], &polys[j]).unwrap();
            let swapped = OperationTable {
                arity: 6,
                domain: 3,
                values: (0..729)
                    .map(|idx| {
                        let mut args = [0usize; 6];
                        let mut rem = idx;
                        for pos in (0..6).rev() {
                            args[pos] = rem % 3;
                            rem /= 3;
                        }
                        // swap (1 2)(3 4)(5 6) exchanges the two patterns
                        w.eval(&[args[1], args[0], args[3], args[2], args[5], args[4]])
                    })
                    .collect(),
            };
            let assignment = WitnessAssignment {
                tables: [
                    ("f0".to_string(), polys[i].clone()),
                    ("f1".to_string(), polys[j].clone()),
                    ("g0_1".to_string(), w),
                    ("g1_0".to_string(), swapped),
                ]
                .into(),
            };
            assert!(assignment.verify(&b, &sigma, None));
        }
    }

    #[test]
    fn minion_hom_answers() {
        assert!(minion_hom_to_p(&FiniteStructure::k3()));
        assert!(!minion_hom_to_p(&FiniteStructure::looped_vertex()));
        assert!(!minion_hom_to_p(&FiniteStructure::z3_affine()));
    }

    #[test]
    fn affine_clone_graph_has_a_loop() {
        // x + 2y + z is the common Siggers minor of x1 + x2 + x5 + x6, so
        // it carries a loop in the clone graph
        let affine = FiniteStructure::z3_affine();
        let values: Vec<usize> = (0..27)
            .map(|idx| {
                let (x, y, z) = (idx / 9, (idx / 3) % 3, idx % 3);
                (x + 2 * y + z) % 3
            })
            .collect();
        let f = OperationTable::new(3, 3, values).unwrap();
        assert!(f.is_polymorphism(&affine));
        let w = fgraph_edge_witness(&affine, &f, &f).unwrap();
        assert!(w.is_polymorphism(&affine));
    }

    #[test]
    fn pseudo_siggers_on_k3_is_exhaustively_absent() {
        // 36 endomorphism pairs, all refuted
        let result = find_pseudo_siggers(&FiniteStructure::k3(), 10_000).unwrap();
        assert!(result.is_none());
    }

    #[test]
    fn pseudo_siggers_specializes_to_siggers() {
        // the two-element no-equality graph has a Siggers polymorphism and
        // its identity endomorphism comes first in table order
        let k2 = FiniteStructure::from_graph(&Graph::complete(2));
        let (s, (e1, e2)) = find_pseudo_siggers(&k2, 10_000).unwrap().unwrap();
        assert_eq!(e1.values, vec![0, 1]);
        assert_eq!(e2.values, vec![0, 1]);
        assert!(s.is_polymorphism(&k2));
        let looped = FiniteStructure::looped_vertex();
        let (s, (e1, _)) = find_pseudo_siggers(&looped, 10).unwrap().unwrap();
        assert_eq!(s.values, vec![0]);
        assert_eq!(e1.values, vec![0]);
    }

    #[test]
    fn pseudo_siggers_cap_is_inconclusive() {
        assert_eq!(
            find_pseudo_siggers(&FiniteStructure::k3(), 2),
            Err(AlgebraError::CapExceeded)
        );
    }
}
