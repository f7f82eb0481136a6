use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{delta, rho, DeltaLevel};
use crate::scheme_core::{Ordinal, SchemeHandle};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SSpaceSets {
    pub beta: Ordinal,
    pub k: usize,
    pub h_set: BTreeSet<Ordinal>,
    pub c_set: BTreeSet<Ordinal>,
    pub c_k: BTreeSet<Ordinal>,
}

/// Memoized `H(β)` and `C(β)` over a finite window of `ω`.
pub struct SSpace {
    h: SchemeHandle,
    h_memo: HashMap<Ordinal, BTreeSet<Ordinal>>,
    c_memo: HashMap<Ordinal, BTreeSet<Ordinal>>,
}

impl SSpace {
    pub fn new(h: &SchemeHandle) -> Self {
        SSpace {
            h: h.clone(),
            h_memo: HashMap::new(),
            c_memo: HashMap::new(),
        }
    }

    fn finite(&self, beta: Ordinal) -> Result<u64> {
        self.h.check(beta)?;
        beta.as_fin().ok_or(Error::DomainExceeded(beta))
    }

    /// `H(β) = {α < β : ρ(α, β) = Δ(α, β)}`.
    pub fn h_set(&mut self, beta: Ordinal) -> Result<BTreeSet<Ordinal>> {
        if let Some(s) = self.h_memo.get(&beta) {
            return Ok(s.clone());
        }
        let top = self.finite(beta)?;
        let mut out = BTreeSet::new();
        for a in (0..top).map(Ordinal::fin) {
            if delta(&self.h, a, beta)? == DeltaLevel::Level(rho(&self.h, a, beta)?) {
                out.insert(a);
            }
        }
        self.h_memo.insert(beta, out.clone());
        Ok(out)
    }

    /// `C(β)`: `β` together with every `α ∈ C(γ)` for some `γ ∈ H(β)` such
    /// that `Δ(α, γ) > Δ(α, ξ)` for every other `ξ ∈ H(β) ∪ {β}`.
    pub fn c_set(&mut self, beta: Ordinal) -> Result<BTreeSet<Ordinal>> {
        if let Some(s) = self.c_memo.get(&beta) {
            return Ok(s.clone());
        }
        let hb = self.h_set(beta)?;
        let mut others: Vec<Ordinal> = hb.iter().copied().collect();
        others.push(beta);
        let mut out = BTreeSet::from([beta]);
        for &g in &hb {
            for a in self.c_set(g)? {
                let dg = delta(&self.h, a, g)?;
                let mut wins = true;
                for &x in others.iter().filter(|&&x| x != g) {
                    if dg <= delta(&self.h, a, x)? {
                        wins = false;
                        break;
                    }
                }
                if wins {
                    out.insert(a);
                }
            }
        }
        self.c_memo.insert(beta, out.clone());
        Ok(out)
    }

    /// `C_k(β) = {α ∈ C(β) : Δ(α, β) ≥ k}`.
    pub fn c_k(&mut self, beta: Ordinal, k: usize) -> Result<BTreeSet<Ordinal>> {
        let mut out = BTreeSet::new();
        for a in self.c_set(beta)? {
            if delta(&self.h, a, beta)? >= DeltaLevel::Level(k) {
                out.insert(a);
            }
        }
        Ok(out)
    }
}

pub fn s_space_sets(h: &SchemeHandle, beta: Ordinal, k: usize) -> Result<SSpaceSets> {
    let mut s = SSpace::new(h);
    Ok(SSpaceSets {
        beta,
        k,
        h_set: s.h_set(beta)?,
        c_set: s.c_set(beta)?,
        c_k: s.c_k(beta, k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    fn set(v: &[u64]) -> BTreeSet<Ordinal> {
        v.iter().map(|&i| Ordinal::fin(i)).collect()
    }

    #[test]
    fn examples() {
        let h = SchemeHandle::omega(&tau2());
        assert_eq!(s_space_sets(&h, Ordinal::fin(5), 0).unwrap().h_set, set(&[2, 3, 4]));
        let one = s_space_sets(&h, Ordinal::fin(1), 0).unwrap();
        assert_eq!((one.h_set, one.c_set), (set(&[0]), set(&[0, 1])));
    }

    #[test]
    fn c_k_decreases_in_k() {
        let h = SchemeHandle::omega(&tau2());
        let mut s = SSpace::new(&h);
        for b in 0..20 {
            let b = Ordinal::fin(b);
            for k in 0..6 {
                assert!(s.c_k(b, k + 1).unwrap().is_subset(&s.c_k(b, k).unwrap()));
            }
        }
    }
}
