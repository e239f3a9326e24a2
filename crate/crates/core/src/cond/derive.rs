//! Minor-derivation certificates: implication proofs as data.
//!
//! A derivation maps every symbol of a target condition to a
//! variable-rearranged symbol of a source condition; it is valid when
//! every translated target identity is entailed by the source, which
//! [`check_derivation`] decides through the formal-minor closure.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{satisfies, FiniteStructure};
use crate::graph::{Graph, Hom, MarkedGraph};
use crate::limits::Limits;
use crate::solver::{Csp, TupleSet};

use super::closure::{entails_in, MinorClosure};
use super::{
    edge_symbol, sigma_of_graph, vertex_symbol, CondError, H1Condition, Term, SIGGERS_LEFT,
    SIGGERS_RIGHT, SPADE_ROWS,
};

/// Certificate that one condition implies another: each target symbol is
/// realized as a coordinate rearrangement of a source symbol. The entry
/// `F -> (s, τ)` reads `F(x_1,…,x_m) := s(x_{τ(1)},…,x_{τ(k)})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorDerivation {
    pub mapping: BTreeMap<String, (String, Vec<usize>)>,
}

#[derive(Serialize, Deserialize)]
struct DerivEntry {
    target: String,
    source: String,
    map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct DerivRepr {
    mapping: Vec<DerivEntry>,
}

impl Serialize for MinorDerivation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DerivRepr {
            mapping: self
                .mapping
                .iter()
                .map(|(t, (src, map))| DerivEntry {
                    target: t.clone(),
                    source: src.clone(),
                    map: map.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MinorDerivation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DerivRepr::deserialize(d)?;
        Ok(MinorDerivation {
            mapping: repr
                .mapping
                .into_iter()
                .map(|e| (e.target, (e.source, e.map)))
                .collect(),
        })
    }
}

/// Resolves the derivation into per-target-symbol (source index, map)
/// pairs, validating arities.
fn resolve(
    source: &H1Condition,
    target: &H1Condition,
    deriv: &MinorDerivation,
) -> Option<Vec<(usize, Vec<usize>)>> {
    let mut out = Vec::with_capacity(target.symbols().len());
    for tsym in target.symbols() {
        let (src_id, rearr) = deriv.mapping.get(&tsym.id)?;
        let s = source.symbol_index(src_id)?;
        if rearr.len() != source.symbols()[s].arity || rearr.iter().any(|&v| v >= tsym.arity) {
            return None;
        }
        out.push((s, rearr.clone()));
    }
    Some(out)
}

fn translate(term: &Term, resolved: &[(usize, Vec<usize>)]) -> Term {
    let (src, rearr) = &resolved[term.sym];
    Term {
        sym: *src,
        map: rearr.iter().map(|&c| term.map[c]).collect(),
    }
}

/// Whether every translated target identity is entailed by the source.
pub fn check_derivation(
    source: &H1Condition,
    target: &H1Condition,
    deriv: &MinorDerivation,
) -> bool {
    let Some(resolved) = resolve(source, target, deriv) else {
        return false;
    };
    let mut closures: BTreeMap<usize, MinorClosure> = BTreeMap::new();
    target.identities().iter().all(|ident| {
        let r = ident.vars.max(1);
        let closure = closures
            .entry(r)
            .or_insert_with(|| MinorClosure::build(source, r));
        entails_in(
            closure,
            &translate(&ident.lhs, &resolved),
            &translate(&ident.rhs, &resolved),
        )
    })
}

/// Certificate that the condition of the homomorphism's codomain implies
/// the condition of its domain: `f_v` maps to `f_{h(v)}` and
/// `g_(u,v)` to `g_(h(u),h(v))`, both with the identity rearrangement.
pub fn derive_from_hom(
    hom: &Hom,
    domain: &Graph,
    codomain: &Graph,
) -> Result<MinorDerivation, CondError> {
    if !hom.is_homomorphism(domain, codomain) {
        return Err(CondError::NotAHomomorphism);
    }
    let mut mapping = BTreeMap::new();
    for v in 0..domain.vertex_count() {
        mapping.insert(
            vertex_symbol(v),
            (vertex_symbol(hom.map[v]), vec![0, 1, 2]),
        );
    }
    for (u, v) in domain.ordered_edges() {
        mapping.insert(
            edge_symbol(u, v),
            (edge_symbol(hom.map[u], hom.map[v]), (0..6).collect()),
        );
    }
    Ok(MinorDerivation { mapping })
}

/// The permutation σ with `(left_pattern ∘ σ, right_pattern ∘ σ)` equal to
/// the given pair of minor rows; exists for any two distinct rows because
/// the pattern columns run through all ordered pairs of distinct
/// variables.
fn sigma_for_rows(row_u: &[usize; 6], row_v: &[usize; 6]) -> Vec<usize> {
    (0..6)
        .map(|j| {
            (0..6)
                .find(|&i| SIGGERS_LEFT[i] == row_u[j] && SIGGERS_RIGHT[i] == row_v[j])
                .expect("distinct rows cover all ordered pairs of distinct variables")
        })
        .collect()
}

/// One side of the glue translation: a derivation of the glued graph's
/// condition from the side's own condition.
fn glue_side(
    side: &MarkedGraph,
    w: &MarkedGraph,
    side_to_w: &[usize],
    anchor: (usize, usize),
) -> MinorDerivation {
    let nw = w.graph.vertex_count();
    let mut inverse: Vec<Option<usize>> = vec![None; nw];
    for (v, &wv) in side_to_w.iter().enumerate() {
        inverse[wv] = Some(v);
    }
    let side_internal =
        |wv: usize| inverse[wv].is_some() && wv != anchor.0 && wv != anchor.1;
    // does a result edge come from the side graph (minus its marked edge)?
    let from_side = |a: usize, b: usize| match (inverse[a], inverse[b]) {
        (Some(u), Some(v)) => {
            side.graph.has_edge(u, v)
                && (u.min(v), u.max(v)) != (side.marked.0.min(side.marked.1), side.marked.0.max(side.marked.1))
        }
        _ => false,
    };

    // proper 3-coloring of the complement part (gadget plus the other
    // side), pinned to 0/1 on the anchor pair; side-internal vertices are
    // fixed to a dummy value and excluded from the constraints
    let k3 = Graph::complete(3);
    let mut tuples = Vec::new();
    for (u, v) in k3.edges() {
        tuples.push(vec![u, v]);
        tuples.push(vec![v, u]);
    }
    let rel = std::rc::Rc::new(TupleSet::new(2, tuples));
    let mut domains = vec![vec![0usize, 1, 2]; nw];
    for wv in 0..nw {
        if side_internal(wv) {
            domains[wv] = vec![0];
        }
    }
    domains[anchor.0] = vec![0];
    domains[anchor.1] = vec![1];
    let mut csp = Csp::new(domains);
    for (a, b) in w.graph.edges() {
        if !from_side(a, b) {
            csp.add_constraint(&[a, b], rel.clone());
        }
    }
    let coloring = csp
        .solve_lex_least(&Limits::none())
        .expect("no deadline set")
        .expect("the glued complement part is 3-colorable with the anchor split");

    let ge = edge_symbol(side.marked.0, side.marked.1);
    let mut mapping = BTreeMap::new();
    for wv in 0..nw {
        if side_internal(wv) {
            let v = inverse[wv].unwrap();
            mapping.insert(vertex_symbol(wv), (vertex_symbol(v), vec![0, 1, 2]));
        } else {
            // gadget and other-side vertices take the minor row of their
            // color; the anchor pair gets rows 0 and 1, which the source
            // identities equate with its own vertex symbols
            mapping.insert(
                vertex_symbol(wv),
                (ge.clone(), SPADE_ROWS[coloring[wv]].to_vec()),
            );
        }
    }
    for (a, b) in w.graph.ordered_edges() {
        let entry = if from_side(a, b) {
            let (u, v) = (inverse[a].unwrap(), inverse[b].unwrap());
            (edge_symbol(u, v), (0..6).collect())
        } else {
            debug_assert!(!side_internal(a) && !side_internal(b));
            let sigma = sigma_for_rows(&SPADE_ROWS[coloring[a]], &SPADE_ROWS[coloring[b]]);
            (ge.clone(), sigma)
        };
        mapping.insert(edge_symbol(a, b), entry);
    }
    MinorDerivation { mapping }
}

/// Certificates that both sides' conditions imply the condition of their
/// glue: the marked-edge symbol of each side provides the three minor
/// rows, a 3-coloring of the rest of the glued graph selects a row per
/// vertex, and each new edge symbol is the row-matching coordinate
/// permutation of the marked-edge symbol. Both derivations are validated
/// against [`check_derivation`] before they are returned.
pub fn derive_glue(
    left: &MarkedGraph,
    right: &MarkedGraph,
) -> Result<(MinorDerivation, MinorDerivation), CondError> {
    let layout = crate::graph::glue_layout(left, right).map_err(CondError::GlueUndefined)?;
    let w = &layout.result;
    let left_deriv = glue_side(left, w, &layout.left_map, (left.marked.0, left.marked.1));
    let right_anchor = (
        layout.right_map[right.marked.0],
        layout.right_map[right.marked.1],
    );
    let right_deriv = glue_side(right, w, &layout.right_map, right_anchor);
    let sigma_w = sigma_of_graph(&w.graph);
    debug_assert!(check_derivation(&sigma_of_graph(&left.graph), &sigma_w, &left_deriv));
    debug_assert!(check_derivation(
        &sigma_of_graph(&right.graph),
        &sigma_w,
        &right_deriv
    ));
    Ok((left_deriv, right_deriv))
}

fn all_maps(len: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        // advance in lexicographic order: last coordinate fastest
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < bound {
                break;
            }
            cur[pos] = 0;
            if pos == 0 {
                return out;
            }
        }
    }
}

/// Sound, incomplete implication prover: searches for a minor derivation
/// of `target` from `source`, accepting when every translated identity
/// passes the closure check. Absence of a result proves nothing. The
/// budget counts candidate minors tried.
pub fn find_derivation(
    source: &H1Condition,
    target: &H1Condition,
    budget: u64,
) -> Result<Option<MinorDerivation>, CondError> {
    // fast path: the identity embedding, when target symbols are a subset
    if target.symbols().iter().all(|t| {
        source
            .symbol_index(&t.id)
            .is_some_and(|s| source.symbols()[s].arity == t.arity)
    }) {
        let deriv = MinorDerivation {
            mapping: target
                .symbols()
                .iter()
                .map(|t| (t.id.clone(), (t.id.clone(), (0..t.arity).collect())))
                .collect(),
        };
        if check_derivation(source, target, &deriv) {
            return Ok(Some(deriv));
        }
    }

    let mut closures: BTreeMap<usize, MinorClosure> = BTreeMap::new();
    for ident in target.identities() {
        let r = ident.vars.max(1);
        closures
            .entry(r)
            .or_insert_with(|| MinorClosure::build(source, r));
    }

    // process symbols by connectivity to already-processed ones
    let n = target.symbols().len();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut picked = vec![false; n];
    while order.len() < n {
        let mut best: Option<(usize, usize)> = None; // (links, symbol)
        for s in 0..n {
            if picked[s] {
                continue;
            }
            let links = target
                .identities()
                .iter()
                .filter(|i| {
                    (i.lhs.sym == s && picked[i.rhs.sym]) || (i.rhs.sym == s && picked[i.lhs.sym])
                })
                .count();
            if best.map_or(true, |(bl, bs)| links > bl || (links == bl && s < bs)) {
                best = Some((links, s));
            }
        }
        let (_, s) = best.unwrap();
        picked[s] = true;
        order.push(s);
    }

    let mut assignment: Vec<Option<(usize, Vec<usize>)>> = vec![None; n];
    let mut budget_left = budget;
    let found = search(
        source,
        target,
        &closures,
        &order,
        0,
        &mut assignment,
        &mut budget_left,
    )?;
    if !found {
        return Ok(None);
    }
    let mapping = target
        .symbols()
        .iter()
        .zip(&assignment)
        .map(|(t, a)| {
            let (s, map) = a.as_ref().unwrap();
            (t.id.clone(), (source.symbols()[*s].id.clone(), map.clone()))
        })
        .collect();
    let deriv = MinorDerivation { mapping };
    debug_assert!(check_derivation(source, target, &deriv));
    Ok(Some(deriv))
}

fn search(
    source: &H1Condition,
    target: &H1Condition,
    closures: &BTreeMap<usize, MinorClosure>,
    order: &[usize],
    depth: usize,
    assignment: &mut Vec<Option<(usize, Vec<usize>)>>,
    budget: &mut u64,
) -> Result<bool, CondError> {
    if depth == order.len() {
        return Ok(true);
    }
    let sym = order[depth];
    let arity = target.symbols()[sym].arity;

    // candidates either from a binding identity (one side assigned) or,
    // unconstrained, all rearrangements of all source symbols
    let binder = target.identities().iter().find_map(|i| {
        if i.lhs.sym == sym && i.rhs.sym != sym && assignment[i.rhs.sym].is_some() {
            Some((i, true))
        } else if i.rhs.sym == sym && i.lhs.sym != sym && assignment[i.lhs.sym].is_some() {
            Some((i, false))
        } else {
            None
        }
    });
    let candidates: Vec<(usize, Vec<usize>)> = match binder {
        Some((ident, sym_is_lhs)) => {
            let (own, other) = if sym_is_lhs {
                (&ident.lhs, &ident.rhs)
            } else {
                (&ident.rhs, &ident.lhs)
            };
            let closure = &closures[&ident.vars.max(1)];
            let (osrc, orear) = assignment[other.sym].as_ref().unwrap();
            let other_map: Vec<usize> = orear.iter().map(|&c| other.map[c]).collect();
            let class = closure.class_of(*osrc, &other_map);
            let mut set: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
            for (msym, mmap) in closure.class_members(class) {
                // solve own.map ∘ τ = mmap coordinatewise
                let choices: Vec<Vec<usize>> = mmap
                    .iter()
                    .map(|&want| {
                        (0..arity).filter(|&c| own.map[c] == want).collect::<Vec<_>>()
                    })
                    .collect();
                if choices.iter().any(|c| c.is_empty()) {
                    continue;
                }
                let mut tau = vec![0usize; choices.len()];
                let mut idx = vec![0usize; choices.len()];
                loop {
                    for (p, &i) in idx.iter().enumerate() {
                        tau[p] = choices[p][i];
                    }
                    set.insert((msym, tau.clone()));
                    let mut pos = choices.len();
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < choices[pos].len() {
                            break;
                        }
                        idx[pos] = 0;
                        if pos == 0 {
                            break;
                        }
                    }
                    if idx.iter().all(|&i| i == 0) {
                        break;
                    }
                }
            }
            set.into_iter().collect()
        }
        None => source
            .symbols()
            .iter()
            .enumerate()
            .flat_map(|(s, ssym)| {
                all_maps(ssym.arity, arity)
                    .into_iter()
                    .map(move |m| (s, m))
            })
            .collect(),
    };

    // a symbol is a leaf when every identity mentioning it touches only
    // already-assigned symbols (or itself): its choice cannot constrain
    // anything later, so the first passing candidate is as good as any
    let assigned_or_self = |s: usize| s == sym || assignment[s].is_some();
    let is_leaf = target
        .identities()
        .iter()
        .filter(|i| i.lhs.sym == sym || i.rhs.sym == sym)
        .all(|i| assigned_or_self(i.lhs.sym) && assigned_or_self(i.rhs.sym));

    for cand in candidates {
        if *budget == 0 {
            return Err(CondError::BudgetExceeded);
        }
        *budget -= 1;
        assignment[sym] = Some(cand);
        let consistent = target.identities().iter().all(|ident| {
            let (a, b) = (ident.lhs.sym, ident.rhs.sym);
            if (a != sym && b != sym)
                || assignment[a].is_none()
                || assignment[b].is_none()
            {
                return true;
            }
            let closure = &closures[&ident.vars.max(1)];
            let tr = |term: &Term| {
                let (s, rearr) = assignment[term.sym].as_ref().unwrap();
                (*s, rearr.iter().map(|&c| term.map[c]).collect::<Vec<_>>())
            };
            let (ls, lm) = tr(&ident.lhs);
            let (rs, rm) = tr(&ident.rhs);
            closure.same(ls, &lm, rs, &rm)
        });
        if consistent {
            if search(source, target, closures, order, depth + 1, assignment, budget)? {
                return Ok(true);
            }
            if is_leaf {
                // the failure lies elsewhere; other candidates for this
                // symbol cannot change it
                assignment[sym] = None;
                return Ok(false);
            }
        }
        assignment[sym] = None;
    }
    Ok(false)
}

/// Semantic non-implication: the first listed structure whose
/// polymorphisms satisfy the source condition but not the target.
/// Absence of a refuter is inconclusive.
pub fn refute_implication<'a>(
    source: &H1Condition,
    target: &H1Condition,
    witnesses: &'a [FiniteStructure],
) -> Option<&'a FiniteStructure> {
    witnesses
        .iter()
        .find(|b| satisfies(b, source, None).is_some() && satisfies(b, target, None).is_none())
}
