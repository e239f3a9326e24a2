//! Height-1 conditions as syntactic data.
//!
//! A condition is a finite set of identities `f(x_{π(1)},…,x_{π(n)}) ≈
//! g(x_{ρ(1)},…,x_{ρ(m)})` over arity-tagged function symbols, with no
//! nesting. Variables are 0-based indices below the identity's variable
//! count. The module provides the graph translation (one ternary symbol
//! per vertex, one 6-ary symbol per ordered edge), the named built-in
//! conditions, triviality via label cover, entailment via formal-minor
//! closure, and derivation certificates.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::{Graph, GraphError};

mod closure;
mod derive;
mod trivial;

pub use closure::{entails_identity, MinorClosure};
pub use derive::{
    check_derivation, derive_from_hom, derive_glue, find_derivation, refute_implication,
    MinorDerivation,
};
pub use trivial::{is_trivial, ProjectionAssignment};

/// Argument pattern of the left Siggers term `(x,y,x,z,y,z)`.
pub const SIGGERS_LEFT: [usize; 6] = [0, 1, 0, 2, 1, 2];
/// Argument pattern of the right Siggers term `(y,x,z,x,z,y)`.
pub const SIGGERS_RIGHT: [usize; 6] = [1, 0, 2, 0, 2, 1];
/// The three 6-ary minor rows used when translating a condition through
/// the glue construction: the two Siggers patterns and `(z,z,y,y,x,x)`.
pub const SPADE_ROWS: [[usize; 6]; 3] = [SIGGERS_LEFT, SIGGERS_RIGHT, [2, 2, 1, 1, 0, 0]];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CondError {
    #[error("unknown builtin condition name")]
    UnknownName,
    #[error("bad arity for builtin condition")]
    BadArity,
    #[error("map is not a homomorphism")]
    NotAHomomorphism,
    #[error("glue is undefined: {0}")]
    GlueUndefined(GraphError),
    #[error("derivation search budget exceeded")]
    BudgetExceeded,
    #[error("malformed condition: {0}")]
    Malformed(String),
}

/// A function symbol with its arity. Ids are unique within a condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub id: String,
    pub arity: usize,
}

/// One side of an identity: a symbol applied to variables, described by
/// the map coordinate -> variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub sym: usize,
    pub map: Vec<usize>,
}

/// `lhs ≈ rhs`, universally quantified over `vars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub vars: usize,
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct H1Condition {
    symbols: Vec<Symbol>,
    identities: Vec<Identity>,
}

impl H1Condition {
    pub fn new(symbols: Vec<Symbol>, identities: Vec<Identity>) -> Result<Self, CondError> {
        for (i, s) in symbols.iter().enumerate() {
            if s.arity == 0 {
                return Err(CondError::Malformed(format!("symbol {} has arity 0", s.id)));
            }
            if symbols[..i].iter().any(|t| t.id == s.id) {
                return Err(CondError::Malformed(format!("duplicate symbol {}", s.id)));
            }
        }
        for ident in &identities {
            for term in [&ident.lhs, &ident.rhs] {
                let sym = symbols
                    .get(term.sym)
                    .ok_or_else(|| CondError::Malformed("term symbol out of range".into()))?;
                if term.map.len() != sym.arity {
                    return Err(CondError::Malformed(format!(
                        "term for {} has {} coordinates, arity is {}",
                        sym.id,
                        term.map.len(),
                        sym.arity
                    )));
                }
                if term.map.iter().any(|&v| v >= ident.vars) {
                    return Err(CondError::Malformed(format!(
                        "term for {} references a variable >= {}",
                        sym.id, ident.vars
                    )));
                }
            }
        }
        Ok(H1Condition {
            symbols,
            identities,
        })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn symbol_index(&self, id: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.id == id)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    sym: String,
    map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct IdentityRepr {
    r: usize,
    lhs: TermRepr,
    rhs: TermRepr,
}

#[derive(Serialize, Deserialize)]
struct CondRepr {
    symbols: Vec<Symbol>,
    identities: Vec<IdentityRepr>,
}

impl Serialize for H1Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let term = |t: &Term| TermRepr {
            sym: self.symbols[t.sym].id.clone(),
            map: t.map.clone(),
        };
        CondRepr {
            symbols: self.symbols.clone(),
            identities: self
                .identities
                .iter()
                .map(|i| IdentityRepr {
                    r: i.vars,
                    lhs: term(&i.lhs),
                    rhs: term(&i.rhs),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for H1Condition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = CondRepr::deserialize(d)?;
        let index = |id: &str| {
            repr.symbols
                .iter()
                .position(|s| s.id == id)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown symbol {id}")))
        };
        let mut identities = Vec::with_capacity(repr.identities.len());
        for i in &repr.identities {
            identities.push(Identity {
                vars: i.r,
                lhs: Term {
                    sym: index(&i.lhs.sym)?,
                    map: i.lhs.map.clone(),
                },
                rhs: Term {
                    sym: index(&i.rhs.sym)?,
                    map: i.rhs.map.clone(),
                },
            });
        }
        H1Condition::new(repr.symbols, identities).map_err(serde::de::Error::custom)
    }
}

pub fn vertex_symbol(v: usize) -> String {
    format!("f{v}")
}

pub fn edge_symbol(u: usize, v: usize) -> String {
    format!("g{u}_{v}")
}

/// The condition of a graph: a ternary symbol per vertex, a 6-ary symbol
/// per ordered edge (one symbol for a loop), and per ordered edge the two
/// identities
///
/// ```text
/// f_u(x,y,z) ≈ g_(u,v)(x,y,x,z,y,z)
/// f_v(x,y,z) ≈ g_(u,v)(y,x,z,x,z,y)
/// ```
pub fn sigma_of_graph(g: &Graph) -> H1Condition {
    let mut symbols: Vec<Symbol> = (0..g.vertex_count())
        .map(|v| Symbol {
            id: vertex_symbol(v),
            arity: 3,
        })
        .collect();
    let ordered = g.ordered_edges();
    for &(u, v) in &ordered {
        symbols.push(Symbol {
            id: edge_symbol(u, v),
            arity: 6,
        });
    }
    let mut identities = Vec::with_capacity(2 * ordered.len());
    for (k, &(u, v)) in ordered.iter().enumerate() {
        let gsym = g.vertex_count() + k;
        identities.push(Identity {
            vars: 3,
            lhs: Term {
                sym: u,
                map: vec![0, 1, 2],
            },
            rhs: Term {
                sym: gsym,
                map: SIGGERS_LEFT.to_vec(),
            },
        });
        identities.push(Identity {
            vars: 3,
            lhs: Term {
                sym: v,
                map: vec![0, 1, 2],
            },
            rhs: Term {
                sym: gsym,
                map: SIGGERS_RIGHT.to_vec(),
            },
        });
    }
    H1Condition::new(symbols, identities).expect("construction is well-formed")
}

/// The single-identity Siggers condition `s(x,y,x,z,y,z) ≈ s(y,x,z,x,z,y)`.
pub fn siggers_condition() -> H1Condition {
    H1Condition::new(
        vec![Symbol {
            id: "s".into(),
            arity: 6,
        }],
        vec![Identity {
            vars: 3,
            lhs: Term {
                sym: 0,
                map: SIGGERS_LEFT.to_vec(),
            },
            rhs: Term {
                sym: 0,
                map: SIGGERS_RIGHT.to_vec(),
            },
        }],
    )
    .expect("construction is well-formed")
}

/// Quasi near unanimity in arity `n >= 3`: the chained identities
/// `f(y,x,…,x) ≈ f(x,y,…,x) ≈ … ≈ f(x,…,x,y) ≈ f(x,…,x)` stored as `n`
/// binary identities against `f(x,…,x)`.
pub fn qnu_condition(n: usize) -> Result<H1Condition, CondError> {
    if n < 3 {
        return Err(CondError::BadArity);
    }
    let constant = Term {
        sym: 0,
        map: vec![0; n],
    };
    let identities = (0..n)
        .map(|i| {
            let mut map = vec![0; n];
            map[i] = 1;
            Identity {
                vars: 2,
                lhs: Term { sym: 0, map },
                rhs: constant.clone(),
            }
        })
        .collect();
    H1Condition::new(
        vec![Symbol {
            id: "f".into(),
            arity: n,
        }],
        identities,
    )
}

/// Named built-in conditions: `siggers` and `qnu` (which takes the arity).
pub fn builtin_condition(name: &str, arity: Option<usize>) -> Result<H1Condition, CondError> {
    match name {
        "siggers" => Ok(siggers_condition()),
        "qnu" => qnu_condition(arity.ok_or(CondError::BadArity)?),
        _ => Err(CondError::UnknownName),
    }
}
