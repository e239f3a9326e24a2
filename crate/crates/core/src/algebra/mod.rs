//! Finite relational structures and their polymorphism clones.
//!
//! Operations are explicit tables; witnesses for a height-1 condition are
//! assignments of tables to its symbols, found by solving the indicator
//! instance of the condition over a structure. Every witness that leaves
//! this module has been re-checked by [`WitnessAssignment::verify`],
//! a direct pointwise validator that shares no code with the solver.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize};

use crate::cond::{qnu_condition, siggers_condition, CondError, H1Condition};
use crate::graph::{Graph, Hom};

mod fgraph;
mod indicator;
mod pp;
mod quotient;
mod transport;

pub use fgraph::{build_fgraph, fgraph_edge_witness, find_pseudo_siggers, minion_hom_to_p};
pub use indicator::{
    build_indicator, enumerate_polymorphisms, solve_indicator, try_satisfies, IndicatorInstance,
    PolymorphismList,
};
pub use pp::{eval_pp, PpFormula};
pub use quotient::{quotient_power, quotient_power_with_limit, DEFAULT_QUOTIENT_LIMIT};
pub use transport::transport_witness;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("the three vertices do not span a triangle")]
    NotATriangle,
    #[error("the assignment is not a witness for the condition")]
    NotAWitness,
    #[error("enumeration cap exceeded")]
    CapExceeded,
    #[error("power size exceeds the configured bound")]
    SizeLimit,
    #[error("malformed pp-formula: {0}")]
    MalformedFormula(String),
    #[error("malformed structure: {0}")]
    Malformed(String),
}

/// A named relation: a set of tuples of fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A finite relational structure over the domain `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteStructure {
    pub size: usize,
    pub relations: Vec<Relation>,
}

impl FiniteStructure {
    pub fn new(size: usize, relations: Vec<Relation>) -> Result<Self, AlgebraError> {
        for rel in &relations {
            for t in &rel.tuples {
                if t.len() != rel.arity {
                    return Err(AlgebraError::Malformed(format!(
                        "tuple of length {} in relation {} of arity {}",
                        t.len(),
                        rel.name,
                        rel.arity
                    )));
                }
                if t.iter().any(|&v| v >= size) {
                    return Err(AlgebraError::Malformed(format!(
                        "tuple entry out of domain in relation {}",
                        rel.name
                    )));
                }
            }
        }
        Ok(FiniteStructure { size, relations })
    }

    /// A graph as a structure with one symmetric binary relation `E`.
    pub fn from_graph(g: &Graph) -> Self {
        let mut tuples = BTreeSet::new();
        for (u, v) in g.edges() {
            tuples.insert(vec![u, v]);
            tuples.insert(vec![v, u]);
        }
        FiniteStructure {
            size: g.vertex_count(),
            relations: vec![Relation {
                name: "E".into(),
                arity: 2,
                tuples,
            }],
        }
    }

    pub fn k3() -> Self {
        Self::from_graph(&Graph::complete(3))
    }

    pub fn looped_vertex() -> Self {
        Self::from_graph(&Graph::looped_vertex())
    }

    /// The affine template over three elements: the ternary relation
    /// `a + b + c ≡ 1 (mod 3)`. Its polymorphisms are exactly the affine
    /// maps with coefficient sum 1, so no constant and no quasi near
    /// unanimity operation preserves it, while Siggers operations do.
    pub fn z3_affine() -> Self {
        let mut tuples = BTreeSet::new();
        for a in 0..3usize {
            for b in 0..3usize {
                tuples.insert(vec![a, b, (1 + 6 - a - b) % 3]);
            }
        }
        FiniteStructure {
            size: 3,
            relations: vec![Relation {
                name: "R".into(),
                arity: 3,
                tuples,
            }],
        }
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }
}

#[derive(Deserialize)]
struct RelationRepr {
    name: String,
    arity: usize,
    tuples: BTreeSet<Vec<usize>>,
}

#[derive(Deserialize)]
struct StructureRepr {
    size: usize,
    relations: Vec<RelationRepr>,
}

impl<'de> Deserialize<'de> for FiniteStructure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = StructureRepr::deserialize(d)?;
        FiniteStructure::new(
            repr.size,
            repr.relations
                .into_iter()
                .map(|r| Relation {
                    name: r.name,
                    arity: r.arity,
                    tuples: r.tuples,
                })
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// An explicit finitary operation: a total map from argument tuples to
/// domain elements, stored flat in lexicographic argument order (first
/// argument most significant).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OperationTable {
    pub arity: usize,
    pub domain: usize,
    pub values: Vec<usize>,
}

impl OperationTable {
    pub fn new(arity: usize, domain: usize, values: Vec<usize>) -> Result<Self, AlgebraError> {
        if values.len() != domain.pow(arity as u32) || values.iter().any(|&v| v >= domain) {
            return Err(AlgebraError::Malformed("operation table shape".into()));
        }
        Ok(OperationTable {
            arity,
            domain,
            values,
        })
    }

    /// Index of an argument tuple in lexicographic order.
    pub fn index(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        args.iter().fold(0, |acc, &a| acc * self.domain + a)
    }

    pub fn eval(&self, args: &[usize]) -> usize {
        self.values[self.index(args)]
    }

    /// The i-th projection of the given arity.
    pub fn projection(arity: usize, domain: usize, coord: usize) -> Self {
        let mut values = vec![0; domain.pow(arity as u32)];
        let mut args = vec![0usize; arity];
        for (idx, slot) in values.iter_mut().enumerate() {
            let mut rem = idx;
            for i in (0..arity).rev() {
                args[i] = rem % domain;
                rem /= domain;
            }
            *slot = args[coord];
        }
        OperationTable {
            arity,
            domain,
            values,
        }
    }

    /// Direct polymorphism check: every componentwise application to
    /// tuples of each relation lands back in the relation.
    pub fn is_polymorphism(&self, b: &FiniteStructure) -> bool {
        if self.domain != b.size {
            return false;
        }
        for rel in &b.relations {
            let tuples: Vec<&Vec<usize>> = rel.tuples.iter().collect();
            if tuples.is_empty() {
                continue;
            }
            let mut pick = vec![0usize; self.arity];
            let mut args = vec![0usize; self.arity];
            loop {
                let mut result = Vec::with_capacity(rel.arity);
                for j in 0..rel.arity {
                    for (i, &p) in pick.iter().enumerate() {
                        args[i] = tuples[p][j];
                    }
                    result.push(self.eval(&args));
                }
                if !rel.tuples.contains(&result) {
                    return false;
                }
                let mut pos = self.arity;
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
        true
    }
}

/// Tables witnessing that a structure's polymorphism clone satisfies a
/// condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessAssignment {
    pub tables: BTreeMap<String, OperationTable>,
}

impl WitnessAssignment {
    /// Independent validator: each table is a polymorphism of the
    /// structure and every identity holds pointwise with variables
    /// ranging over `subset` (the full domain by default).
    pub fn verify(
        &self,
        b: &FiniteStructure,
        cond: &H1Condition,
        subset: Option<&[usize]>,
    ) -> bool {
        let full: Vec<usize> = (0..b.size).collect();
        let range = subset.unwrap_or(&full);
        if range.iter().any(|&v| v >= b.size) {
            return false;
        }
        for sym in cond.symbols() {
            match self.tables.get(&sym.id) {
                Some(t) if t.arity == sym.arity && t.domain == b.size => {
                    if !t.is_polymorphism(b) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        cond.identities().iter().all(|ident| {
            let lhs_table = &self.tables[&cond.symbols()[ident.lhs.sym].id];
            let rhs_table = &self.tables[&cond.symbols()[ident.rhs.sym].id];
            if ident.vars == 0 {
                return true;
            }
            let mut pick = vec![0usize; ident.vars];
            loop {
                let assign = |map: &[usize]| -> Vec<usize> {
                    map.iter().map(|&v| range[pick[v]]).collect()
                };
                if range.is_empty() {
                    return true;
                }
                if lhs_table.eval(&assign(&ident.lhs.map)) != rhs_table.eval(&assign(&ident.rhs.map))
                {
                    return false;
                }
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
                    return true;
                }
            }
        })
    }
}

/// Searches for tables satisfying the condition in the polymorphism
/// clone of `b`, quantified over `subset` when given.
pub fn satisfies(
    b: &FiniteStructure,
    cond: &H1Condition,
    subset: Option<&[usize]>,
) -> Option<WitnessAssignment> {
    try_satisfies(b, cond, subset, &crate::limits::Limits::none()).expect("no deadline set")
}

pub fn find_siggers(b: &FiniteStructure) -> Option<WitnessAssignment> {
    satisfies(b, &siggers_condition(), None)
}

pub fn find_qnu(b: &FiniteStructure, n: usize) -> Result<Option<WitnessAssignment>, CondError> {
    Ok(satisfies(b, &qnu_condition(n)?, None))
}

/// Reads a homomorphism off a witness for a graph condition: vertex `v`
/// maps to `f_v(t_0, t_1, t_2)` where the `t_i` span a triangle in the
/// target. The result is verified edge by edge before it is returned.
pub fn hom_from_sigma_witness(
    g: &Graph,
    h: &Graph,
    witness: &WitnessAssignment,
    triangle: [usize; 3],
) -> Result<Hom, AlgebraError> {
    let [a, b, c] = triangle;
    let spans = a != b
        && b != c
        && a != c
        && h.has_edge(a, b)
        && h.has_edge(b, c)
        && h.has_edge(a, c);
    if !spans {
        return Err(AlgebraError::NotATriangle);
    }
    let sigma = crate::cond::sigma_of_graph(g);
    let structure = FiniteStructure::from_graph(h);
    if !witness.verify(&structure, &sigma, None) {
        return Err(AlgebraError::NotAWitness);
    }
    let map = (0..g.vertex_count())
        .map(|v| witness.tables[&crate::cond::vertex_symbol(v)].eval(&[a, b, c]))
        .collect();
    let hom = Hom { map };
    assert!(
        hom.is_homomorphism(g, h),
        "a verified witness always induces a homomorphism"
    );
    Ok(hom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections_are_polymorphisms() {
        let k3 = FiniteStructure::k3();
        for coord in 0..3 {
            assert!(OperationTable::projection(3, 3, coord).is_polymorphism(&k3));
        }
    }

    #[test]
    fn constants_preserve_affine_only_if_sum_matches() {
        let affine = FiniteStructure::z3_affine();
        for c in 0..3 {
            let table = OperationTable::new(1, 3, vec![c; 3]).unwrap();
            assert!(!table.is_polymorphism(&affine));
        }
        // shifts x + d preserve it
        for d in 0..3 {
            let table = OperationTable::new(1, 3, (0..3).map(|x| (x + d) % 3).collect()).unwrap();
            assert!(table.is_polymorphism(&affine));
        }
    }

    #[test]
    fn structure_json_round_trip() {
        let affine = FiniteStructure::z3_affine();
        let text = serde_json::to_string(&affine).unwrap();
        let back: FiniteStructure = serde_json::from_str(&text).unwrap();
        assert_eq!(affine, back);
        // invalid entries are rejected on load
        let bad = r#"{"size":2,"relations":[{"name":"R","arity":1,"tuples":[[5]]}]}"#;
        assert!(serde_json::from_str::<FiniteStructure>(bad).is_err());
    }

    #[test]
    fn witness_verify_catches_broken_identity() {
        let looped = FiniteStructure::looped_vertex();
        let cond = siggers_condition();
        let good = WitnessAssignment {
            tables: [(
                "s".to_string(),
                OperationTable::new(6, 1, vec![0]).unwrap(),
            )]
            .into(),
        };
        assert!(good.verify(&looped, &cond, None));

        let k3 = FiniteStructure::k3();
        // a projection is a polymorphism of K_3 but breaks the identity
        let proj = WitnessAssignment {
            tables: [("s".to_string(), OperationTable::projection(6, 3, 0))].into(),
        };
        assert!(!proj.verify(&k3, &cond, None));
        // ... unless the quantification range is a single element
        assert!(proj.verify(&k3, &cond, Some(&[1])));
        assert!(proj.verify(&k3, &cond, Some(&[])));
    }

    #[test]
    fn hom_from_witness_constant_case() {
        // K_3 plus a looped apex adjacent to everything
        let mut h = Graph::complete(3);
        h = Graph::from_edges(4, h.edges().chain([(0, 3), (1, 3), (2, 3), (3, 3)])).unwrap();
        let g = Graph::complete(4);
        let sigma = crate::cond::sigma_of_graph(&g);
        let mut tables = BTreeMap::new();
        for sym in sigma.symbols() {
            tables.insert(
                sym.id.clone(),
                OperationTable::new(sym.arity, 4, vec![3; 4usize.pow(sym.arity as u32)]).unwrap(),
            );
        }
        let witness = WitnessAssignment { tables };
        let hom = hom_from_sigma_witness(&g, &h, &witness, [0, 1, 2]).unwrap();
        assert_eq!(hom.map, vec![3, 3, 3, 3]);
        assert!(hom.is_homomorphism(&g, &h));
        // degenerate triangle is rejected
        assert_eq!(
            hom_from_sigma_witness(&g, &h, &witness, [0, 1, 1]),
            Err(AlgebraError::NotATriangle)
        );
    }

    #[test]
    fn claimed_witness_over_k3_is_rejected() {
        // no assignment satisfies the K_4 condition over K_3, so any
        // claimed one fails re-verification
        let g = Graph::complete(4);
        let k3 = Graph::complete(3);
        let sigma = crate::cond::sigma_of_graph(&g);
        let mut tables = BTreeMap::new();
        for sym in sigma.symbols() {
            tables.insert(sym.id.clone(), OperationTable::projection(sym.arity, 3, 0));
        }
        let claimed = WitnessAssignment { tables };
        assert_eq!(
            hom_from_sigma_witness(&g, &k3, &claimed, [0, 1, 2]),
            Err(AlgebraError::NotAWitness)
        );
    }
}
