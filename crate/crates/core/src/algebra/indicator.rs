//! Indicator instances: the CSP whose solutions are the witnesses that a
//! structure's polymorphism clone satisfies a condition.
//!
//! Formal elements are pairs (symbol, argument tuple). Instantiating
//! every identity over the quantification range merges formal elements
//! into classes; the constraints assert that each symbol's class
//! function preserves every relation of the structure.

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use crate::cond::H1Condition;
use crate::limits::{Expired, Limits};
use crate::solver::{Csp, TupleSet};
use crate::util::UnionFind;

use super::{FiniteStructure, OperationTable, WitnessAssignment};

/// The quotiented CSP for one (structure, condition, range) triple.
#[derive(Debug, Clone)]
pub struct IndicatorInstance {
    cond: H1Condition,
    subset: Vec<usize>,
    pub domain_size: usize,
    offsets: Vec<usize>,
    /// provenance: formal element index -> class id
    pub class_of: Vec<u32>,
    pub class_count: usize,
    /// preservation scopes, per relation index of the structure
    constraints: BTreeSet<(usize, Vec<u32>)>,
}

fn tuple_index(domain: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * domain + a)
}

/// Builds the indicator instance of `cond` over `b`, with identity
/// variables ranging over `subset` (default: the whole domain).
pub fn build_indicator(
    b: &FiniteStructure,
    cond: &H1Condition,
    subset: Option<&[usize]>,
) -> IndicatorInstance {
    let d = b.size;
    let full: Vec<usize> = (0..d).collect();
    let range: Vec<usize> = subset.map(|s| s.to_vec()).unwrap_or(full);
    debug_assert!(range.iter().all(|&v| v < d));

    let mut offsets = Vec::with_capacity(cond.symbols().len() + 1);
    let mut total = 0usize;
    for sym in cond.symbols() {
        offsets.push(total);
        total += d.pow(sym.arity as u32);
    }
    offsets.push(total);

    let mut uf = UnionFind::new(total);
    if !range.is_empty() {
        for ident in cond.identities() {
            let mut pick = vec![0usize; ident.vars];
            loop {
                let inst = |map: &[usize]| -> usize {
                    tuple_index(d, &map.iter().map(|&v| range[pick[v]]).collect::<Vec<_>>())
                };
                let a = offsets[ident.lhs.sym] + inst(&ident.lhs.map);
                let bb = offsets[ident.rhs.sym] + inst(&ident.rhs.map);
                uf.union(a as u32, bb as u32);
                let mut pos = ident.vars;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    pick[pos] += 1;
                    if pick[pos] < range.len() {
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
    }
    let (class_of, members) = uf.freeze();
    let class_count = members.len();

    // preservation scopes: for every relation and every symbol, each
    // selection of `arity(symbol)` relation tuples constrains the classes
    // of the columnwise formal elements
    let mut constraints: BTreeSet<(usize, Vec<u32>)> = BTreeSet::new();
    for (ri, rel) in b.relations.iter().enumerate() {
        let tuples: Vec<&Vec<usize>> = rel.tuples.iter().collect();
        if tuples.is_empty() {
            continue;
        }
        for (si, sym) in cond.symbols().iter().enumerate() {
            let n = sym.arity;
            let mut pick = vec![0usize; n];
            let mut column = vec![0usize; n];
            loop {
                let mut scope = Vec::with_capacity(rel.arity);
                for j in 0..rel.arity {
                    for (i, &p) in pick.iter().enumerate() {
                        column[i] = tuples[p][j];
                    }
                    scope.push(class_of[offsets[si] + tuple_index(d, &column)]);
                }
                constraints.insert((ri, scope));
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    pick[pos] += 1;
                    if pick[pos] < tuples.len() {
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
    }

    IndicatorInstance {
        cond: cond.clone(),
        subset: range,
        domain_size: d,
        offsets,
        class_of,
        class_count,
        constraints,
    }
}

impl IndicatorInstance {
    /// The CSP over class variables, ready for solving or pinning.
    pub(crate) fn to_csp(&self, b: &FiniteStructure) -> Csp {
        let mut csp = Csp::new(vec![(0..self.domain_size).collect(); self.class_count]);
        let rels: Vec<Rc<TupleSet>> = b
            .relations
            .iter()
            .map(|r| {
                Rc::new(TupleSet::new(
                    r.arity,
                    r.tuples.iter().cloned().collect(),
                ))
            })
            .collect();
        for (ri, scope) in &self.constraints {
            let vars: Vec<usize> = scope.iter().map(|&c| c as usize).collect();
            csp.add_constraint(&vars, rels[*ri].clone());
        }
        csp
    }

    pub(crate) fn tables_from_solution(&self, solution: &[usize]) -> WitnessAssignment {
        let mut tables = BTreeMap::new();
        for (si, sym) in self.cond.symbols().iter().enumerate() {
            let width = self.domain_size.pow(sym.arity as u32);
            let values: Vec<usize> = (0..width)
                .map(|t| solution[self.class_of[self.offsets[si] + t] as usize])
                .collect();
            tables.insert(
                sym.id.clone(),
                OperationTable {
                    arity: sym.arity,
                    domain: self.domain_size,
                    values,
                },
            );
        }
        WitnessAssignment { tables }
    }
}

/// Solves an indicator instance: lexicographically least witness, or
/// nothing. The reconstructed tables are re-verified by the independent
/// checker before they are returned.
pub fn solve_indicator(
    inst: &IndicatorInstance,
    b: &FiniteStructure,
) -> Option<WitnessAssignment> {
    try_solve_indicator(inst, b, &Limits::none()).expect("no deadline set")
}

pub fn try_solve_indicator(
    inst: &IndicatorInstance,
    b: &FiniteStructure,
    limits: &Limits,
) -> Result<Option<WitnessAssignment>, Expired> {
    let csp = inst.to_csp(b);
    let Some(solution) = csp.solve_lex_least(limits)? else {
        return Ok(None);
    };
    let witness = inst.tables_from_solution(&solution);
    assert!(
        witness.verify(b, &inst.cond, Some(&inst.subset)),
        "solver output failed independent verification"
    );
    Ok(Some(witness))
}

pub fn try_satisfies(
    b: &FiniteStructure,
    cond: &H1Condition,
    subset: Option<&[usize]>,
    limits: &Limits,
) -> Result<Option<WitnessAssignment>, Expired> {
    let inst = build_indicator(b, cond, subset);
    try_solve_indicator(&inst, b, limits)
}

/// Result of a capped polymorphism enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymorphismList {
    pub tables: Vec<OperationTable>,
    pub truncated: bool,
}

/// All polymorphisms of the given arity in lexicographic table order,
/// stopping at `cap`.
pub fn enumerate_polymorphisms(
    b: &FiniteStructure,
    arity: usize,
    cap: usize,
) -> PolymorphismList {
    try_enumerate_polymorphisms(b, arity, cap, &Limits::none()).expect("no deadline set")
}

pub fn try_enumerate_polymorphisms(
    b: &FiniteStructure,
    arity: usize,
    cap: usize,
    limits: &Limits,
) -> Result<PolymorphismList, Expired> {
    use crate::cond::{H1Condition, Symbol};
    let free = H1Condition::new(
        vec![Symbol {
            id: "f".into(),
            arity,
        }],
        vec![],
    )
    .expect("one free symbol is well-formed");
    let inst = build_indicator(b, &free, None);
    let csp = inst.to_csp(b);
    let (solutions, truncated) = csp.enumerate_lex(cap, limits)?;
    let tables = solutions
        .into_iter()
        .map(|sol| {
            inst.tables_from_solution(&sol)
                .tables
                .remove("f")
                .expect("single symbol")
        })
        .collect();
    Ok(PolymorphismList { tables, truncated })
}
