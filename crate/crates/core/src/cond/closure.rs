//! Entailment of height-1 identities by formal-minor closure.
//!
//! For a fixed variable count `r`, the formal minors of a condition are
//! the pairs (symbol, coordinate map into `0..r`). Instantiating every
//! identity of the condition under every assignment of its variables
//! into `0..r` and merging the two resulting minors yields the coarsest
//! congruence; two terms denote equal operations in every clone
//! satisfying the condition exactly when their minors share a class.

use crate::util::UnionFind;

use super::{H1Condition, Identity, Term};

/// Union-find over the formal minors of a condition at a fixed variable
/// count. Class representatives are the least member, so lookups are
/// deterministic.
pub struct MinorClosure {
    r: usize,
    offsets: Vec<usize>,
    arities: Vec<usize>,
    class_of: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl MinorClosure {
    /// Builds the closure of `cond` over `r` variables.
    pub fn build(cond: &H1Condition, r: usize) -> Self {
        assert!(r >= 1, "closure needs at least one variable");
        let mut offsets = Vec::with_capacity(cond.symbols().len() + 1);
        let arities: Vec<usize> = cond.symbols().iter().map(|s| s.arity).collect();
        let mut total = 0usize;
        for s in cond.symbols() {
            offsets.push(total);
            total += r.pow(s.arity as u32);
        }
        offsets.push(total);
        let mut uf = UnionFind::new(total);
        let mut lhs_inst = Vec::new();
        let mut rhs_inst = Vec::new();
        for ident in cond.identities() {
            // every assignment of the identity's variables into 0..r
            let mut assignment = vec![0usize; ident.vars];
            loop {
                lhs_inst.clear();
                lhs_inst.extend(ident.lhs.map.iter().map(|&v| assignment[v]));
                rhs_inst.clear();
                rhs_inst.extend(ident.rhs.map.iter().map(|&v| assignment[v]));
                let a = Self::index_raw(&offsets, r, ident.lhs.sym, &lhs_inst);
                let b = Self::index_raw(&offsets, r, ident.rhs.sym, &rhs_inst);
                uf.union(a, b);
                // advance the odometer
                let mut pos = 0;
                loop {
                    if pos == assignment.len() {
                        break;
                    }
                    assignment[pos] += 1;
                    if assignment[pos] < r {
                        break;
                    }
                    assignment[pos] = 0;
                    pos += 1;
                }
                if pos == assignment.len() {
                    break;
                }
            }
        }
        let (class_of, members) = uf.freeze();
        MinorClosure {
            r,
            offsets,
            arities,
            class_of,
            members,
        }
    }

    fn index_raw(offsets: &[usize], r: usize, sym: usize, map: &[usize]) -> u32 {
        let mut idx = offsets[sym];
        let mut stride = 1;
        for &v in map {
            debug_assert!(v < r);
            idx += v * stride;
            stride *= r;
        }
        idx as u32
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    /// Class of the minor (symbol, coordinate map into 0..r).
    pub fn class_of(&self, sym: usize, map: &[usize]) -> u32 {
        self.class_of[Self::index_raw(&self.offsets, self.r, sym, map) as usize]
    }

    /// Whether two instantiated minors denote the same operation in every
    /// clone satisfying the condition.
    pub fn same(&self, a_sym: usize, a_map: &[usize], b_sym: usize, b_map: &[usize]) -> bool {
        self.class_of(a_sym, a_map) == self.class_of(b_sym, b_map)
    }

    /// All minors in a class, as (symbol, map) pairs in increasing index
    /// order.
    pub fn class_members(&self, class: u32) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
        self.members[class as usize].iter().map(move |&idx| {
            let sym = match self.offsets[..self.offsets.len() - 1].binary_search(&(idx as usize)) {
                Ok(s) => s,
                Err(s) => s - 1,
            };
            let mut rem = idx as usize - self.offsets[sym];
            let map: Vec<usize> = (0..self.arities[sym])
                .map(|_| {
                    let digit = rem % self.r;
                    rem /= self.r;
                    digit
                })
                .collect();
            (sym, map)
        })
    }
}

/// Decides whether `cond` implies `target`, an identity over the
/// condition's own symbols: sound and complete for consequence in all
/// clones.
pub fn entails_identity(cond: &H1Condition, target: &Identity) -> bool {
    let closure = MinorClosure::build(cond, target.vars.max(1));
    entails_in(&closure, &target.lhs, &target.rhs)
}

pub(crate) fn entails_in(closure: &MinorClosure, lhs: &Term, rhs: &Term) -> bool {
    closure.same(lhs.sym, &lhs.map, rhs.sym, &rhs.map)
}
