//! Transport of concrete witnesses along a minor derivation: the table
//! for a target symbol `F := s(x_{τ(1)},…,x_{τ(k)})` is the corresponding
//! minor of the source table. Transporting a valid source witness along a
//! valid derivation yields a witness of the target condition; tests use
//! this as the semantic check on derivations, independent of the
//! formal-minor closure.

use std::collections::BTreeMap;

use crate::cond::{H1Condition, MinorDerivation};

use super::{OperationTable, WitnessAssignment};

/// Builds the target-condition tables induced by a derivation from the
/// source tables. Returns nothing if shapes do not line up.
pub fn transport_witness(
    deriv: &MinorDerivation,
    source_witness: &WitnessAssignment,
    target: &H1Condition,
) -> Option<WitnessAssignment> {
    let mut tables = BTreeMap::new();
    for tsym in target.symbols() {
        let (src_id, rearr) = deriv.mapping.get(&tsym.id)?;
        let src = source_witness.tables.get(src_id)?;
        if rearr.len() != src.arity || rearr.iter().any(|&c| c >= tsym.arity) {
            return None;
        }
        let d = src.domain;
        let width = d.pow(tsym.arity as u32);
        let mut args = vec![0usize; tsym.arity];
        let mut values = Vec::with_capacity(width);
        for idx in 0..width {
            let mut rem = idx;
            for i in (0..tsym.arity).rev() {
                args[i] = rem % d;
                rem /= d;
            }
            let minor_args: Vec<usize> = rearr.iter().map(|&c| args[c]).collect();
            values.push(src.eval(&minor_args));
        }
        tables.insert(
            tsym.id.clone(),
            OperationTable {
                arity: tsym.arity,
                domain: d,
                values,
            },
        );
    }
    Some(WitnessAssignment { tables })
}
