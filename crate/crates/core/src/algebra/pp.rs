//! Primitive-positive formulas: existentially quantified conjunctions of
//! atoms, written as s-expressions like
//! `(exists (y z) (and (E x y) (E y z)))`. Atoms are relation
//! applications or equalities `(= u v)`. Free variables are the unbound
//! ones, in order of first appearance.

use super::{AlgebraError, FiniteStructure};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Rel(String, Vec<String>),
    Eq(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpFormula {
    pub free: Vec<String>,
    pub bound: Vec<String>,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, PartialEq)]
enum SExpr {
    Sym(String),
    List(Vec<SExpr>),
}

fn tokenize(text: &str) -> Vec<String> {
    text.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn parse_sexpr(tokens: &[String], pos: &mut usize) -> Result<SExpr, AlgebraError> {
    let err = |m: &str| AlgebraError::MalformedFormula(m.to_string());
    let tok = tokens.get(*pos).ok_or_else(|| err("unexpected end"))?;
    *pos += 1;
    if tok == "(" {
        let mut items = Vec::new();
        loop {
            match tokens.get(*pos) {
                Some(t) if t == ")" => {
                    *pos += 1;
                    return Ok(SExpr::List(items));
                }
                Some(_) => items.push(parse_sexpr(tokens, pos)?),
                None => return Err(err("unbalanced parentheses")),
            }
        }
    } else if tok == ")" {
        Err(err("unexpected closing parenthesis"))
    } else {
        Ok(SExpr::Sym(tok.clone()))
    }
}

fn parse_atom(e: &SExpr) -> Result<Atom, AlgebraError> {
    let err = |m: &str| AlgebraError::MalformedFormula(m.to_string());
    let SExpr::List(items) = e else {
        return Err(err("atom must be a list"));
    };
    let mut syms = Vec::with_capacity(items.len());
    for item in items {
        match item {
            SExpr::Sym(s) => syms.push(s.clone()),
            SExpr::List(_) => return Err(err("atoms cannot be nested")),
        }
    }
    let (head, vars) = syms.split_first().ok_or_else(|| err("empty atom"))?;
    if head == "=" {
        if vars.len() != 2 {
            return Err(err("equality takes two variables"));
        }
        Ok(Atom::Eq(vars[0].clone(), vars[1].clone()))
    } else {
        Ok(Atom::Rel(head.clone(), vars.to_vec()))
    }
}

impl PpFormula {
    /// Parses the prenex shape: an optional `exists` binder around an
    /// `and` of atoms (or a single atom).
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let err = |m: &str| AlgebraError::MalformedFormula(m.to_string());
        let tokens = tokenize(text);
        let mut pos = 0;
        let root = parse_sexpr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(err("trailing tokens"));
        }
        let (bound, body) = match &root {
            SExpr::List(items)
                if items.first() == Some(&SExpr::Sym("exists".into())) =>
            {
                if items.len() != 3 {
                    return Err(err("exists takes a binder list and a body"));
                }
                let SExpr::List(binders) = &items[1] else {
                    return Err(err("exists binder must be a list"));
                };
                let mut bound = Vec::new();
                for b in binders {
                    match b {
                        SExpr::Sym(s) => bound.push(s.clone()),
                        SExpr::List(_) => return Err(err("binder must be a variable")),
                    }
                }
                (bound, &items[2])
            }
            _ => (Vec::new(), &root),
        };
        let atoms = match body {
            SExpr::List(items) if items.first() == Some(&SExpr::Sym("and".into())) => items[1..]
                .iter()
                .map(parse_atom)
                .collect::<Result<Vec<_>, _>>()?,
            other => vec![parse_atom(other)?],
        };
        let mut free = Vec::new();
        for atom in &atoms {
            let vars: Vec<&String> = match atom {
                Atom::Rel(_, vs) => vs.iter().collect(),
                Atom::Eq(a, b) => vec![a, b],
            };
            for v in vars {
                if !bound.contains(v) && !free.contains(v) {
                    free.push(v.clone());
                }
            }
        }
        Ok(PpFormula { free, bound, atoms })
    }
}

/// Evaluates the formula on `b` with the free variables bound to `args`,
/// by backtracking over the existential variables.
pub fn eval_pp(b: &FiniteStructure, formula: &PpFormula, args: &[usize]) -> Result<bool, AlgebraError> {
    let err = |m: String| AlgebraError::MalformedFormula(m);
    if args.len() != formula.free.len() {
        return Err(err(format!(
            "{} free variables, {} arguments",
            formula.free.len(),
            args.len()
        )));
    }
    if args.iter().any(|&a| a >= b.size) {
        return Err(err("argument out of domain".into()));
    }
    // resolve variables to slots: free first, then bound
    let slot_of = |v: &String| -> Result<usize, AlgebraError> {
        formula
            .free
            .iter()
            .chain(formula.bound.iter())
            .position(|w| w == v)
            .ok_or_else(|| err(format!("unknown variable {v}")))
    };
    struct ResolvedAtom {
        rel: Option<usize>,
        slots: Vec<usize>,
    }
    let mut resolved = Vec::with_capacity(formula.atoms.len());
    for atom in &formula.atoms {
        match atom {
            Atom::Rel(name, vars) => {
                let ri = b
                    .relations
                    .iter()
                    .position(|r| &r.name == name)
                    .ok_or_else(|| err(format!("unknown relation {name}")))?;
                if b.relations[ri].arity != vars.len() {
                    return Err(err(format!("arity mismatch for {name}")));
                }
                resolved.push(ResolvedAtom {
                    rel: Some(ri),
                    slots: vars.iter().map(slot_of).collect::<Result<_, _>>()?,
                });
            }
            Atom::Eq(a, bb) => resolved.push(ResolvedAtom {
                rel: None,
                slots: vec![slot_of(a)?, slot_of(bb)?],
            }),
        }
    }

    let n_free = formula.free.len();
    let n_bound = formula.bound.len();
    let mut values: Vec<usize> = args.to_vec();
    values.resize(n_free + n_bound, 0);

    fn holds(b: &FiniteStructure, atom: &ResolvedAtom, values: &[usize], known: usize) -> bool {
        if atom.slots.iter().any(|&s| s >= known) {
            return true; // not yet fully bound
        }
        match atom.rel {
            Some(ri) => {
                let tuple: Vec<usize> = atom.slots.iter().map(|&s| values[s]).collect();
                b.relations[ri].tuples.contains(&tuple)
            }
            None => values[atom.slots[0]] == values[atom.slots[1]],
        }
    }

    fn rec(
        b: &FiniteStructure,
        atoms: &[ResolvedAtom],
        values: &mut Vec<usize>,
        next: usize,
        total: usize,
    ) -> bool {
        if atoms.iter().any(|a| !holds(b, a, values, next)) {
            return false;
        }
        if next == total {
            return true;
        }
        for v in 0..b.size {
            values[next] = v;
            if rec(b, atoms, values, next + 1, total) {
                return true;
            }
        }
        false
    }

    Ok(rec(b, &resolved, &mut values, n_free, n_free + n_bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_vertex_of_k3_has_a_neighbor() {
        let k3 = FiniteStructure::k3();
        let f = PpFormula::parse("(exists (y) (E x y))").unwrap();
        assert_eq!(f.free, vec!["x"]);
        for x in 0..3 {
            assert!(eval_pp(&k3, &f, &[x]).unwrap());
        }
    }

    #[test]
    fn k3_has_no_loops_by_pp() {
        let k3 = FiniteStructure::k3();
        let f = PpFormula::parse("(E x x)").unwrap();
        for x in 0..3 {
            assert!(!eval_pp(&k3, &f, &[x]).unwrap());
        }
    }

    #[test]
    fn triangle_through_a_vertex() {
        let k3 = FiniteStructure::k3();
        let f = PpFormula::parse("(exists (y z) (and (E x y) (E y z) (E z x)))").unwrap();
        assert!(eval_pp(&k3, &f, &[0]).unwrap());
    }

    #[test]
    fn equality_atoms_work() {
        let k3 = FiniteStructure::k3();
        let f = PpFormula::parse("(exists (y) (and (E x y) (= y z)))").unwrap();
        assert_eq!(f.free, vec!["x", "z"]);
        assert!(eval_pp(&k3, &f, &[0, 1]).unwrap());
        assert!(!eval_pp(&k3, &f, &[0, 0]).unwrap());
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(PpFormula::parse("(exists (y) (and (E x y)").is_err());
        assert!(PpFormula::parse("(exists y (E x y))").is_err());
        let k3 = FiniteStructure::k3();
        let f = PpFormula::parse("(Q x x)").unwrap();
        assert!(matches!(
            eval_pp(&k3, &f, &[0]),
            Err(AlgebraError::MalformedFormula(_))
        ));
        let f = PpFormula::parse("(E x y)").unwrap();
        assert!(eval_pp(&k3, &f, &[0]).is_err());
    }
}
