use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::metric::rho;
use crate::scheme_core::{Ordinal, SchemeHandle};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OscRecord {
    pub alpha: Ordinal,
    pub beta: Ordinal,
    pub k: usize,
    /// `{s ≥ k : f_α(s) ≤ f_β(s), f_α(s+1) > f_β(s+1)}` with `f_α(l) = ‖α‖_l`.
    pub set: Vec<usize>,
    pub count: usize,
    /// The set is contained in `[window.0, window.1) = [k, ρ(α, β))`.
    pub window: (usize, usize),
}

/// `f_α` on `[0, len)`.
pub fn f_prefix(h: &SchemeHandle, alpha: Ordinal, len: usize) -> Result<Vec<u64>> {
    (0..len).map(|l| h.norm(alpha, l)).collect()
}

/// The `k`-oscillation of `f_α` to `f_β`. Crossings can only happen below
/// `ρ(α, β)`, so the result is exact.
pub fn osc(h: &SchemeHandle, a: Ordinal, b: Ordinal, k: usize) -> Result<OscRecord> {
    let r = rho(h, a, b)?;
    let mut set = Vec::new();
    if k < r {
        let f = f_prefix(h, a, r + 1)?;
        let g = f_prefix(h, b, r + 1)?;
        set.extend((k..r).filter(|&s| f[s] <= g[s] && f[s + 1] > g[s + 1]));
    }
    Ok(OscRecord {
        alpha: a,
        beta: b,
        k,
        count: set.len(),
        set,
        window: (k, r.max(k)),
    })
}

/// `osc_k[a, b] = {osc_k(α, β) : α ∈ a, β ∈ b}`.
pub fn osc_sets(h: &SchemeHandle, a: &[Ordinal], b: &[Ordinal], k: usize) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for &x in a {
        for &y in b {
            out.insert(osc(h, x, y, k)?.count);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    #[test]
    fn examples() {
        let h = SchemeHandle::omega(&tau2());
        let o = |i| Ordinal::fin(i);
        let r = osc(&h, o(2), o(4), 0).unwrap();
        assert_eq!((r.set.clone(), r.count), (vec![1], 1));
        assert_eq!(osc(&h, o(2), o(5), 0).unwrap().count, 0);
        assert_eq!(osc(&h, o(3), o(3), 2).unwrap().count, 0);
        assert_eq!(osc(&h, o(2), o(4), 2).unwrap().count, 0);
    }
}
