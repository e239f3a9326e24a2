//! Internal finite-domain CSP engine.
//!
//! All searches in the crate (graph homomorphisms, label cover, indicator
//! solving) reduce to the same shape: integer variables with finite
//! domains and positive table constraints. The engine does GAC-3
//! propagation inside a backtracking search. Two search modes exist:
//! a fail-first mode that decides satisfiability quickly, and a static
//! index-order mode that returns the lexicographically least solution,
//! which is the determinism contract all public operations promise.

use std::collections::HashMap;
use std::rc::Rc;

use crate::limits::{Expired, Limits};

/// An extensionally given relation: the allowed tuples of a constraint.
#[derive(Debug)]
pub(crate) struct TupleSet {
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
    // per position: value -> indices of tuples with that value there
    index: Vec<HashMap<usize, Vec<u32>>>,
}

impl TupleSet {
    pub fn new(arity: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        debug_assert!(tuples.iter().all(|t| t.len() == arity));
        tuples.sort();
        tuples.dedup();
        let mut index = vec![HashMap::new(); arity];
        for (ti, t) in tuples.iter().enumerate() {
            for (p, &v) in t.iter().enumerate() {
                index[p]
                    .entry(v)
                    .or_insert_with(Vec::new)
                    .push(ti as u32);
            }
        }
        TupleSet {
            arity,
            tuples,
            index,
        }
    }

    fn tuples_with(&self, pos: usize, value: usize) -> &[u32] {
        self.index[pos]
            .get(&value)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

#[derive(Clone, Debug)]
struct Constraint {
    scope: Vec<usize>,
    rel: Rc<TupleSet>,
}

#[derive(Clone, Debug)]
pub(crate) struct Csp {
    pub domains: Vec<Vec<usize>>,
    constraints: Vec<Constraint>,
    var_constraints: Vec<Vec<u32>>,
    // flat ids for (constraint, position) pairs, for queue dedup
    slot_offsets: Vec<u32>,
    total_slots: usize,
}

impl Csp {
    pub fn new(domains: Vec<Vec<usize>>) -> Self {
        let n = domains.len();
        Csp {
            domains,
            constraints: Vec::new(),
            var_constraints: vec![Vec::new(); n],
            slot_offsets: Vec::new(),
            total_slots: 0,
        }
    }

    /// Adds a positive table constraint. Scopes with repeated variables
    /// are normalized by restricting the relation to the matching
    /// diagonal and collapsing the duplicates.
    pub fn add_constraint(&mut self, scope: &[usize], rel: Rc<TupleSet>) {
        debug_assert_eq!(scope.len(), rel.arity);
        let has_dup = scope
            .iter()
            .enumerate()
            .any(|(i, v)| scope[..i].contains(v));
        let (scope, rel) = if has_dup {
            let mut dedup: Vec<usize> = Vec::new();
            let mut proj: Vec<usize> = Vec::new(); // original pos -> dedup pos
            for &v in scope {
                match dedup.iter().position(|&w| w == v) {
                    Some(p) => proj.push(p),
                    None => {
                        dedup.push(v);
                        proj.push(dedup.len() - 1);
                    }
                }
            }
            let filtered: Vec<Vec<usize>> = rel
                .tuples
                .iter()
                .filter(|t| {
                    (0..t.len()).all(|i| (0..t.len()).all(|j| proj[i] != proj[j] || t[i] == t[j]))
                })
                .map(|t| {
                    let mut out = vec![0; dedup.len()];
                    for (i, &v) in t.iter().enumerate() {
                        out[proj[i]] = v;
                    }
                    out
                })
                .collect();
            (dedup.clone(), Rc::new(TupleSet::new(dedup.len(), filtered)))
        } else {
            (scope.to_vec(), rel)
        };
        let id = self.constraints.len() as u32;
        for &v in &scope {
            self.var_constraints[v].push(id);
        }
        self.slot_offsets.push(self.total_slots as u32);
        self.total_slots += scope.len();
        self.constraints.push(Constraint { scope, rel });
    }

    /// One GAC revision of position `pos` of constraint `cid`; domains are
    /// sorted, membership checks use binary search. Returns whether the
    /// revised domain changed, or None on wipeout.
    fn revise(&self, domains: &mut [Vec<usize>], cid: u32, pos: usize) -> Option<bool> {
        let c = &self.constraints[cid as usize];
        let var = c.scope[pos];
        // when some other position is already decided, only that value's
        // tuples can support anything; scan them once instead of probing
        // every candidate value
        let axis = c
            .scope
            .iter()
            .enumerate()
            .find(|&(q, &w)| q != pos && domains[w].len() == 1);
        let kept = if let Some((q, &wvar)) = axis {
            let wval = domains[wvar][0];
            let mut reachable: Vec<usize> = c
                .rel
                .tuples_with(q, wval)
                .iter()
                .filter_map(|&ti| {
                    let t = &c.rel.tuples[ti as usize];
                    let ok = t.iter().enumerate().all(|(p, &w)| {
                        p == pos || domains[c.scope[p]].binary_search(&w).is_ok()
                    });
                    ok.then(|| t[pos])
                })
                .collect();
            reachable.sort_unstable();
            reachable.dedup();
            domains[var]
                .iter()
                .copied()
                .filter(|v| reachable.binary_search(v).is_ok())
                .collect::<Vec<usize>>()
        } else {
            let mut kept = Vec::with_capacity(domains[var].len());
            'values: for &v in &domains[var] {
                'tuples: for &ti in c.rel.tuples_with(pos, v) {
                    let t = &c.rel.tuples[ti as usize];
                    for (q, &w) in t.iter().enumerate() {
                        if q != pos && domains[c.scope[q]].binary_search(&w).is_err() {
                            continue 'tuples;
                        }
                    }
                    kept.push(v);
                    continue 'values;
                }
            }
            kept
        };
        if kept.is_empty() {
            return None;
        }
        let changed = kept.len() != domains[var].len();
        if changed {
            domains[var] = kept;
        }
        Some(changed)
    }

    /// Propagates to the GAC fixpoint starting from the given seed
    /// variables (all constraints if `seeds` is None). Returns false on
    /// domain wipeout. The queue holds flat (constraint, position) slot
    /// ids with an in-queue flag so no slot is enqueued twice.
    fn propagate(&self, domains: &mut [Vec<usize>], seeds: Option<&[usize]>) -> bool {
        let mut queue: Vec<(u32, u32)> = Vec::new();
        let mut queued = vec![false; self.total_slots];
        let enqueue_around =
            |queue: &mut Vec<(u32, u32)>, queued: &mut [bool], var: usize, csp: &Csp| {
                for &cid in &csp.var_constraints[var] {
                    let c = &csp.constraints[cid as usize];
                    let base = csp.slot_offsets[cid as usize];
                    for (p, &w) in c.scope.iter().enumerate() {
                        if w != var || c.scope.len() == 1 {
                            let slot = (base + p as u32) as usize;
                            if !queued[slot] {
                                queued[slot] = true;
                                queue.push((cid, p as u32));
                            }
                        }
                    }
                }
            };
        match seeds {
            Some(vars) => {
                for &v in vars {
                    enqueue_around(&mut queue, &mut queued, v, self);
                }
            }
            None => {
                for (cid, c) in self.constraints.iter().enumerate() {
                    for p in 0..c.scope.len() {
                        queued[self.slot_offsets[cid] as usize + p] = true;
                        queue.push((cid as u32, p as u32));
                    }
                }
            }
        }
        while let Some((cid, pos)) = queue.pop() {
            queued[self.slot_offsets[cid as usize] as usize + pos as usize] = false;
            match self.revise(domains, cid, pos as usize) {
                None => return false,
                Some(true) => {
                    let var = self.constraints[cid as usize].scope[pos as usize];
                    enqueue_around(&mut queue, &mut queued, var, self);
                }
                Some(false) => {}
            }
        }
        true
    }

    /// Propagates the stored domains to the GAC fixpoint. Callers that
    /// solve many pinned variants of one instance do this once and then
    /// use the `*_pinned` search entry points, which only re-propagate
    /// from the pinned variables.
    pub fn propagate_root(&mut self) -> bool {
        let mut domains = std::mem::take(&mut self.domains);
        let ok = !domains.iter().any(|d| d.is_empty()) && self.propagate(&mut domains, None);
        self.domains = domains;
        ok
    }

    /// Fail-first backtracking: smallest domain, then most-constrained,
    /// then least index. Decides satisfiability only.
    pub fn satisfiable(&self, limits: &Limits) -> Result<bool, Expired> {
        let mut domains = self.domains.clone();
        if domains.iter().any(|d| d.is_empty()) {
            return Ok(false);
        }
        if !self.propagate(&mut domains, None) {
            return Ok(false);
        }
        let mut counter = 0u32;
        self.sat_rec(&mut domains, limits, &mut counter)
    }

    /// [`Csp::satisfiable`] over externally pinned domains, propagating
    /// only from the pinned variables; the stored domains must already be
    /// at the GAC fixpoint.
    pub fn satisfiable_pinned(
        &self,
        mut domains: Vec<Vec<usize>>,
        pinned: &[usize],
        limits: &Limits,
    ) -> Result<bool, Expired> {
        if domains.iter().any(|d| d.is_empty()) || !self.propagate(&mut domains, Some(pinned)) {
            return Ok(false);
        }
        let mut counter = 0u32;
        self.sat_rec(&mut domains, limits, &mut counter)
    }

    /// [`Csp::solve_lex_least`] over externally pinned domains; see
    /// [`Csp::satisfiable_pinned`].
    pub fn solve_lex_least_pinned(
        &self,
        domains: Vec<Vec<usize>>,
        pinned: &[usize],
        limits: &Limits,
    ) -> Result<Option<Vec<usize>>, Expired> {
        if !self.satisfiable_pinned(domains.clone(), pinned, limits)? {
            return Ok(None);
        }
        let mut domains = domains;
        if !self.propagate(&mut domains, Some(pinned)) {
            return Ok(None);
        }
        let mut counter = 0u32;
        self.lex_rec(&mut domains, 0, limits, &mut counter)
    }

    fn sat_rec(
        &self,
        domains: &mut Vec<Vec<usize>>,
        limits: &Limits,
        counter: &mut u32,
    ) -> Result<bool, Expired> {
        *counter = counter.wrapping_add(1);
        if counter.is_multiple_of(256) {
            limits.check()?;
        }
        // pick the unassigned variable with the smallest domain
        let mut pick: Option<usize> = None;
        for (v, d) in domains.iter().enumerate() {
            if d.len() > 1 {
                pick = match pick {
                    None => Some(v),
                    Some(u) => {
                        let (du, dv) = (domains[u].len(), d.len());
                        if dv < du
                            || (dv == du
                                && self.var_constraints[v].len() > self.var_constraints[u].len())
                        {
                            Some(v)
                        } else {
                            Some(u)
                        }
                    }
                };
            }
        }
        let var = match pick {
            None => return Ok(true),
            Some(v) => v,
        };
        let values = domains[var].clone();
        for v in values {
            let mut child = domains.clone();
            child[var] = vec![v];
            if self.propagate(&mut child, Some(&[var])) && self.sat_rec(&mut child, limits, counter)?
            {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Lexicographically least solution: variables in index order, values
    /// ascending. A fail-first probe runs first so unsatisfiable instances
    /// are not refuted twice in the slower static order.
    pub fn solve_lex_least(&self, limits: &Limits) -> Result<Option<Vec<usize>>, Expired> {
        if !self.satisfiable(limits)? {
            return Ok(None);
        }
        let mut domains = self.domains.clone();
        if !self.propagate(&mut domains, None) {
            return Ok(None);
        }
        let mut counter = 0u32;
        Ok(self.lex_rec(&mut domains, 0, limits, &mut counter)?)
    }

    fn lex_rec(
        &self,
        domains: &mut Vec<Vec<usize>>,
        next: usize,
        limits: &Limits,
        counter: &mut u32,
    ) -> Result<Option<Vec<usize>>, Expired> {
        *counter = counter.wrapping_add(1);
        if counter.is_multiple_of(256) {
            limits.check()?;
        }
        let mut var = next;
        while var < domains.len() && domains[var].len() == 1 {
            var += 1;
        }
        if var == domains.len() {
            return Ok(Some(domains.iter().map(|d| d[0]).collect()));
        }
        let values = domains[var].clone();
        for v in values {
            let mut child = domains.clone();
            child[var] = vec![v];
            if self.propagate(&mut child, Some(&[var])) {
                if let Some(sol) = self.lex_rec(&mut child, var + 1, limits, counter)? {
                    return Ok(Some(sol));
                }
            }
        }
        Ok(None)
    }

    /// All solutions in lexicographic order, stopping after `cap`.
    /// The boolean reports whether the enumeration was truncated.
    pub fn enumerate_lex(
        &self,
        cap: usize,
        limits: &Limits,
    ) -> Result<(Vec<Vec<usize>>, bool), Expired> {
        let mut domains = self.domains.clone();
        let mut out = Vec::new();
        if domains.iter().any(|d| d.is_empty()) || !self.propagate(&mut domains, None) {
            return Ok((out, false));
        }
        let mut counter = 0u32;
        let truncated =
            self.enum_rec(&mut domains, 0, cap, limits, &mut counter, &mut out)?;
        Ok((out, truncated))
    }

    fn enum_rec(
        &self,
        domains: &mut Vec<Vec<usize>>,
        next: usize,
        cap: usize,
        limits: &Limits,
        counter: &mut u32,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<bool, Expired> {
        *counter = counter.wrapping_add(1);
        if counter.is_multiple_of(256) {
            limits.check()?;
        }
        let mut var = next;
        while var < domains.len() && domains[var].len() == 1 {
            var += 1;
        }
        if var == domains.len() {
            if out.len() == cap {
                return Ok(true);
            }
            out.push(domains.iter().map(|d| d[0]).collect());
            return Ok(false);
        }
        let values = domains[var].clone();
        for v in values {
            let mut child = domains.clone();
            child[var] = vec![v];
            if self.propagate(&mut child, Some(&[var]))
                && self.enum_rec(&mut child, var + 1, cap, limits, counter, out)?
            {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
