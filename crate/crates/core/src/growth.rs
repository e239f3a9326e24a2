//! Exact-arithmetic growth recursion.
//!
//! For the fixed family `f(k) = 2^ceil(k^(1/m))` and a sequence of graph
//! sizes, the recursion picks thresholds `k_n` with
//! `sum_{i<=n} k^(alpha(i)*size_i) < f(k)` for every `k >= k_n`, and sets
//! `alpha(n+1) = k_n + 1`. "For every k" is discharged by a sufficient
//! condition specific to the family, entirely in integer arithmetic:
//!
//! - on the interval where `ceil(k^(1/m)) = t` the left side is largest
//!   at `k = t^m`, so it is enough to compare at interval ends;
//! - once `(t+1)^(m*E) <= 2*t^(m*E)` for the maximal exponent `E`, each
//!   term at most doubles from one interval end to the next while the
//!   right side exactly doubles, so a single interval-end comparison in
//!   that regime settles every larger `k`.
//!
//! Bounded spot checks of the raw inequality are run on top and recorded
//! in the plan.

use num_bigint::BigUint;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrowthError {
    #[error("no qualifying threshold within the bound: {0}")]
    BoundExceeded(String),
}

/// Descriptor of the growth function `f(k) = 2^ceil(k^(1/m))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrowthFn {
    pub m: u32,
}

/// Result of the recursion: the exponent sequence, the thresholds, and
/// the spot checks that were run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthPlan {
    pub f: GrowthFn,
    pub graph_sizes: Vec<u64>,
    /// alpha(1), alpha(2), ...
    pub alpha: Vec<BigUint>,
    /// k_1, k_2, ...; alpha(n+1) = k_n + 1
    pub thresholds: Vec<BigUint>,
    /// exponents alpha(i) * size_i in effect after the last step
    pub exponents: Vec<BigUint>,
    /// k values at which the defining inequality was verified directly
    pub spot_checks: Vec<BigUint>,
    /// per threshold: f(k_n) stays below 3^floor(sqrt(k_n)), so the orbit
    /// bound 3^f(k) sits under the double-exponential landmark
    pub below_triple_exponential: Vec<bool>,
}

impl Serialize for GrowthPlan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dec = |v: &Vec<BigUint>| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
        let mut st = s.serialize_struct("GrowthPlan", 7)?;
        st.serialize_field("f", &format!("2^ceil(k^(1/{}))", self.f.m))?;
        st.serialize_field("graph_sizes", &self.graph_sizes)?;
        st.serialize_field("alpha", &dec(&self.alpha))?;
        st.serialize_field("thresholds", &dec(&self.thresholds))?;
        st.serialize_field("exponents", &dec(&self.exponents))?;
        st.serialize_field("spot_checks", &dec(&self.spot_checks))?;
        st.serialize_field("below_triple_exponential", &self.below_triple_exponential)?;
        st.end()
    }
}

// keeps any single power comfortably inside memory
const MAX_RESULT_BITS: u64 = 1 << 24;

fn ceil_root(k: &BigUint, m: u32) -> BigUint {
    let r = k.nth_root(m);
    if &r.pow(m) < k {
        r + 1u32
    } else {
        r
    }
}

fn checked_pow(base: &BigUint, exp: &BigUint) -> Result<BigUint, GrowthError> {
    let exp32: u32 = exp
        .try_into()
        .map_err(|_| GrowthError::BoundExceeded("exponent exceeds u32".into()))?;
    let bits = base.bits().saturating_mul(exp32 as u64);
    if bits > MAX_RESULT_BITS {
        return Err(GrowthError::BoundExceeded(format!(
            "power of about {bits} bits exceeds the arithmetic budget"
        )));
    }
    Ok(base.pow(exp32))
}

/// `sum_i k^(e_i) < 2^ceil(k^(1/m))`, evaluated exactly.
fn inequality_holds(k: &BigUint, exponents: &[BigUint], m: u32) -> Result<bool, GrowthError> {
    let mut sum = BigUint::ZERO;
    for e in exponents {
        sum += checked_pow(k, e)?;
    }
    let shift: u64 = ceil_root(k, m)
        .try_into()
        .map_err(|_| GrowthError::BoundExceeded("growth-function exponent too large".into()))?;
    if shift > MAX_RESULT_BITS {
        return Err(GrowthError::BoundExceeded(
            "growth-function value exceeds the arithmetic budget".into(),
        ));
    }
    Ok(sum < (BigUint::one() << shift))
}

/// Interval-end condition: the inequality holds throughout the interval
/// of k with ceil(k^(1/m)) = t.
fn interval_holds(t: u64, exponents: &[BigUint], m: u32) -> Result<bool, GrowthError> {
    let k_end = checked_pow(&BigUint::from(t), &BigUint::from(m))?;
    let mut sum = BigUint::ZERO;
    for e in exponents {
        sum += checked_pow(&k_end, e)?;
    }
    if t > MAX_RESULT_BITS {
        return Err(GrowthError::BoundExceeded(
            "growth-function value exceeds the arithmetic budget".into(),
        ));
    }
    Ok(sum < (BigUint::one() << t))
}

/// Least `t` with `(t+1)^P <= 2*t^P`: beyond it every term at most
/// doubles between consecutive interval ends.
fn doubling_threshold(p: &BigUint) -> Result<u64, GrowthError> {
    let test = |t: u64| -> Result<bool, GrowthError> {
        let lhs = checked_pow(&BigUint::from(t + 1), p)?;
        let rhs = checked_pow(&BigUint::from(t), p)? << 1;
        Ok(lhs <= rhs)
    };
    let mut hi = 1u64;
    while !test(hi)? {
        hi = hi.checked_mul(2).ok_or_else(|| {
            GrowthError::BoundExceeded("doubling threshold out of range".into())
        })?;
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if test(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

const SPOT_WINDOW: u64 = 16;

/// Runs `steps` rounds of the recursion, starting from `alpha(1) = 1`,
/// over the given graph sizes. Fails with [`GrowthError::BoundExceeded`]
/// when a threshold would exceed `k_max` or the arithmetic budget.
pub fn compute_alpha(
    f: GrowthFn,
    graph_sizes: &[u64],
    steps: usize,
    k_max: u64,
) -> Result<GrowthPlan, GrowthError> {
    assert!(f.m >= 1);
    assert!(steps >= 1);
    assert!(
        graph_sizes.len() >= steps,
        "need a graph size per recursion step"
    );
    let m = f.m;
    let mut alpha: Vec<BigUint> = vec![BigUint::one()];
    let mut thresholds: Vec<BigUint> = Vec::new();
    let mut spot_checks: Vec<BigUint> = Vec::new();
    let mut below_triple: Vec<bool> = Vec::new();

    for n in 1..steps {
        let exponents: Vec<BigUint> = alpha
            .iter()
            .zip(graph_sizes)
            .map(|(a, &s)| a * BigUint::from(s))
            .collect();
        let max_exp = exponents.iter().max().expect("nonempty").clone();
        let p = &max_exp * BigUint::from(m);
        let t_hat = doubling_threshold(&p)?;
        // least admissible t: the interval holding alpha(n) + 1
        let lower = &alpha[n - 1] + BigUint::one();
        let t_lo: u64 = ceil_root(&lower, m)
            .try_into()
            .map_err(|_| GrowthError::BoundExceeded("interval index out of range".into()))?;
        let start = t_hat.max(t_lo).max(1);

        // in the doubling regime the interval-end condition is monotone:
        // exponential search for a true point (clamped to the k_max
        // interval), then binary search down
        let k_max_big = BigUint::from(k_max);
        let t_cap: u64 = ceil_root(&k_max_big, m).try_into().unwrap_or(u64::MAX);
        let mut hi = start;
        loop {
            if interval_holds(hi, &exponents, m)? {
                break;
            }
            if hi >= t_cap {
                return Err(GrowthError::BoundExceeded(format!(
                    "no threshold at or below k_max = {k_max}"
                )));
            }
            hi = hi.saturating_mul(2).min(t_cap);
        }
        let mut lo = start;
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if interval_holds(mid, &exponents, m)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t_star = hi;

        // least k > alpha(n) inside the certified region
        let region_start = checked_pow(&BigUint::from(t_star - 1), &BigUint::from(m))? + 1u32;
        let k_n = region_start.max(&alpha[n - 1] + BigUint::one());
        if k_n > k_max_big {
            return Err(GrowthError::BoundExceeded(format!(
                "threshold {k_n} exceeds k_max = {k_max}"
            )));
        }

        // bounded spot checks of the raw inequality: the window right of
        // the threshold plus the end of its interval, where the left side
        // is largest
        let mut spots: Vec<BigUint> = (0..SPOT_WINDOW)
            .map(|off| &k_n + BigUint::from(off))
            .filter(|k| *k <= k_max_big)
            .collect();
        let interval_end = checked_pow(&BigUint::from(t_star), &BigUint::from(m))?;
        if interval_end <= k_max_big && !spots.contains(&interval_end) {
            spots.push(interval_end);
        }
        for k in &spots {
            assert!(
                inequality_holds(k, &exponents, m)?,
                "spot check failed at k = {k}; the tail condition is unsound"
            );
        }
        spot_checks.extend(spots);

        // the orbit bound 3^f(k) against the double-exponential landmark
        let sqrt_k: u64 = k_n
            .sqrt()
            .try_into()
            .map_err(|_| GrowthError::BoundExceeded("square root out of range".into()))?;
        let f_value = BigUint::one() << {
            let e: u64 = ceil_root(&k_n, m).try_into().unwrap_or(u64::MAX);
            e.min(MAX_RESULT_BITS)
        };
        let triple = checked_pow(&BigUint::from(3u32), &BigUint::from(sqrt_k))?;
        below_triple.push(f_value < triple);

        alpha.push(&k_n + BigUint::one());
        thresholds.push(k_n);
    }

    // exponents in effect after the final step
    let exponents: Vec<BigUint> = alpha
        .iter()
        .zip(graph_sizes)
        .map(|(a, &s)| a * BigUint::from(s))
        .collect();

    Ok(GrowthPlan {
        f,
        graph_sizes: graph_sizes[..steps].to_vec(),
        alpha,
        thresholds,
        exponents,
        spot_checks,
        below_triple_exponential: below_triple,
    })
}

/// Independent re-verification of the plan's defining inequalities, with
/// a hand-rolled square-and-multiply power so no code is shared with the
/// search path.
pub fn verify_plan(plan: &GrowthPlan) -> bool {
    fn pow_sq(base: &BigUint, mut exp: u64) -> BigUint {
        let mut acc = BigUint::one();
        let mut sq = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &sq;
            }
            exp >>= 1;
            if exp > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }
    for (n, k) in plan.thresholds.iter().enumerate() {
        // sum over i = 1..=n+1 of k^(alpha(i) * size_i)
        let mut sum = BigUint::ZERO;
        for i in 0..=n {
            let e = &plan.alpha[i] * BigUint::from(plan.graph_sizes[i]);
            let Ok(e64): Result<u64, _> = (&e).try_into() else {
                return false;
            };
            sum += pow_sq(k, e64);
        }
        // ceil(k^(1/m)) via search on the hand-rolled power
        let m = plan.f.m as u64;
        let mut root = BigUint::one();
        while &pow_sq(&root, m) < k {
            root <<= 1;
        }
        let mut lo = &root >> 1;
        while &lo + BigUint::one() < root {
            let mid = (&lo + &root) >> 1;
            if &pow_sq(&mid, m) < k {
                lo = mid;
            } else {
                root = mid;
            }
        }
        let Ok(shift): Result<u64, _> = (&root).try_into() else {
            return false;
        };
        let f_value = BigUint::one() << shift;
        if sum >= f_value {
            return false;
        }
        // alpha must step by exactly k_n + 1 and stay increasing
        if plan.alpha[n + 1] != k + BigUint::one() || plan.alpha[n + 1] <= plan.alpha[n] {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_alpha_is_one() {
        let plan = compute_alpha(GrowthFn { m: 2 }, &[4], 1, 1 << 40).unwrap();
        assert_eq!(plan.alpha, vec![BigUint::one()]);
        assert!(plan.thresholds.is_empty());
    }

    #[test]
    fn square_root_family_with_chain_sizes() {
        let plan = compute_alpha(GrowthFn { m: 2 }, &[4, 23, 42], 3, 1 << 50).unwrap();
        assert_eq!(plan.alpha.len(), 3);
        // strictly increasing
        for w in plan.alpha.windows(2) {
            assert!(w[0] < w[1]);
        }
        // the first threshold is computable by hand: the least certified
        // crossover of k^4 against 2^ceil(sqrt k) is the interval of t=44
        assert_eq!(plan.thresholds[0], BigUint::from(1850u32));
        assert_eq!(plan.alpha[1], BigUint::from(1851u32));
        assert!(verify_plan(&plan));
    }

    #[test]
    fn k_max_bound_is_respected() {
        let err = compute_alpha(GrowthFn { m: 2 }, &[4, 23], 2, 100).unwrap_err();
        assert!(matches!(err, GrowthError::BoundExceeded(_)));
    }

    #[test]
    fn verifier_rejects_tampered_plans() {
        let mut plan = compute_alpha(GrowthFn { m: 2 }, &[4, 23], 2, 1 << 50).unwrap();
        assert!(verify_plan(&plan));
        plan.thresholds[0] -= BigUint::one();
        assert!(!verify_plan(&plan));
    }

    #[test]
    fn doubling_threshold_small_case() {
        // (t+1)^8 <= 2 t^8 first holds at t = 12
        assert_eq!(doubling_threshold(&BigUint::from(8u32)).unwrap(), 12);
    }
}
