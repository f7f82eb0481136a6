//! The ordinal metric `ρ`, the level `Δ`, `k`-closures and `Ξ`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scheme_core::{FinOrdSet, Ordinal, RunSet, SchemeHandle};

/// `Δ(α, β)`: a level, or `Infinity` when `α = β`. Orders above every level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeltaLevel {
    Level(usize),
    Infinity,
}

impl DeltaLevel {
    pub fn level(self) -> Option<usize> {
        match self {
            DeltaLevel::Level(k) => Some(k),
            DeltaLevel::Infinity => None,
        }
    }
}

impl fmt::Display for DeltaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaLevel::Level(k) => write!(f, "{k}"),
            DeltaLevel::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for DeltaLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DeltaLevel::Level(k) => s.serialize_u64(*k as u64),
            DeltaLevel::Infinity => s.serialize_str("inf"),
        }
    }
}

/// `ρ(α, β)`: the least level at which some member contains both.
pub fn rho(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<usize> {
    h.check(a)?;
    h.check(b)?;
    if a == b {
        return Ok(0);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let top = h.common_level(lo, hi)?;
    // Inside a common level-`top` member, `lo` leaves the member of `hi`
    // exactly at the levels where it sits in a different non-root piece.
    for j in (1..=top).rev() {
        let x = h.xi(lo, j)?;
        if x != -1 && x != h.xi(hi, j)? {
            return Ok(j);
        }
    }
    Err(Error::NotAMember(format!("no separating level for {lo} and {hi}")))
}

/// `Δ(α, β)`: the least `k` with `‖α‖_k ≠ ‖β‖_k`.
pub fn delta(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<DeltaLevel> {
    if a == b {
        h.check(a)?;
        return Ok(DeltaLevel::Infinity);
    }
    let r = rho(h, a, b)?;
    for k in 0..=r {
        if h.norm(a, k)? != h.norm(b, k)? {
            return Ok(DeltaLevel::Level(k));
        }
    }
    Err(Error::NotAMember(format!("norms of {a} and {b} agree up to rho")))
}

/// Finite `Δ` for distinct points.
pub fn delta_level(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<usize> {
    delta(h, a, b)?
        .level()
        .ok_or_else(|| Error::BadOrder(format!("{a} != {b}")))
}

/// `(α)_k` together with `‖α‖_k` and `Ξ_α(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallRecord {
    pub alpha: Ordinal,
    pub k: usize,
    pub set: RunSet,
    pub norm: u64,
    pub xi: i64,
}

impl BallRecord {
    /// `(α)_k(i)`.
    pub fn index(&self, i: u64) -> Option<Ordinal> {
        self.set.get(i)
    }
}

pub fn ball(h: &SchemeHandle, a: Ordinal, k: usize) -> Result<BallRecord> {
    let set = h.closure(a, k)?;
    let norm = set.len() - 1;
    Ok(BallRecord {
        alpha: a,
        k,
        set,
        norm,
        xi: h.xi(a, k)?,
    })
}

/// `ρ^A = max{ρ(α, max A) : α ∈ A}`.
pub fn diameter(h: &SchemeHandle, set: &FinOrdSet) -> Result<usize> {
    let Some(top) = set.max() else { return Ok(0) };
    set.iter().try_fold(0, |acc, &a| Ok(acc.max(rho(h, a, top)?)))
}

/// `(A)_k = ⋃_{α ∈ A} (α)_k`.
pub fn set_closure(h: &SchemeHandle, set: &FinOrdSet, k: usize) -> Result<RunSet> {
    let mut acc = FinOrdSet::new();
    for &a in set {
        acc = acc.union(&h.closure_set(a, k)?);
    }
    Ok(RunSet::from_set(&acc))
}

/// `Ξ_A(k) = Ξ_{max A}(k)`, defined for `k > ρ^A`.
pub fn xi_set(h: &SchemeHandle, set: &FinOrdSet, k: usize) -> Result<i64> {
    let d = diameter(h, set)?;
    if k <= d {
        return Err(Error::XiUndefined { k, diameter: d });
    }
    h.xi(set.max().ok_or_else(|| Error::NotAMember("empty set".into()))?, k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetProfile {
    pub set: FinOrdSet,
    pub diameter: usize,
    pub k: usize,
    pub closure: RunSet,
    pub xi: i64,
    pub is_closed: bool,
    pub is_maximally_closed: bool,
}

/// Profile of `A` at a level `k > ρ^A`.
pub fn set_profile(h: &SchemeHandle, set: &FinOrdSet, k: usize) -> Result<SetProfile> {
    let top = set.max().ok_or_else(|| Error::NotAMember("empty set".into()))?;
    let d = diameter(h, set)?;
    let xi = xi_set(h, set, k)?;
    let own = h.closure(top, d)?;
    let is_closed = own == RunSet::from_set(set);
    Ok(SetProfile {
        set: set.clone(),
        diameter: d,
        k,
        closure: h.closure(top, k)?,
        xi,
        is_closed,
        is_maximally_closed: is_closed && set.len() as u64 == h.ty().m(d)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    fn o(i: u64) -> Ordinal {
        Ordinal::fin(i)
    }

    #[test]
    fn rho_examples() {
        let h = SchemeHandle::omega(&tau2());
        assert_eq!(rho(&h, o(1), o(2)).unwrap(), 2);
        assert_eq!(rho(&h, o(2), o(3)).unwrap(), 3);
        assert_eq!(rho(&h, o(5), o(5)).unwrap(), 0);
    }

    #[test]
    fn delta_examples() {
        let h = SchemeHandle::omega(&tau2());
        assert_eq!(delta(&h, o(1), o(5)).unwrap(), DeltaLevel::Level(2));
        assert_eq!(delta(&h, o(2), o(5)).unwrap(), DeltaLevel::Level(3));
        assert_eq!(delta(&h, o(4), o(4)).unwrap(), DeltaLevel::Infinity);
        assert!(DeltaLevel::Infinity > DeltaLevel::Level(usize::MAX));
    }

    #[test]
    fn ball_examples() {
        let h = SchemeHandle::omega(&tau2());
        let b = ball(&h, o(5), 1).unwrap();
        assert_eq!((b.set.to_set(), b.norm, b.xi), (FinOrdSet::nat([3, 5]), 1, 1));
        let b = ball(&h, o(0), 1).unwrap();
        assert_eq!((b.set.to_set(), b.norm, b.xi), (FinOrdSet::nat([0]), 0, 0));
        let b = ball(&h, o(2), 3).unwrap();
        assert_eq!((b.set.to_set(), b.norm, b.xi), (FinOrdSet::nat([0, 1, 2]), 2, 0));
        assert_eq!(b.index(b.norm), Some(o(2)));
    }

    #[test]
    fn profile_examples() {
        let h = SchemeHandle::omega(&tau2());
        let p = set_profile(&h, &FinOrdSet::nat([3, 4]), 2).unwrap();
        assert_eq!(p.diameter, 1);
        assert_eq!(p.closure.to_set(), FinOrdSet::nat([3, 4]));
        assert!(p.is_closed);
        let a = FinOrdSet::nat([2, 5]);
        let p = set_profile(&h, &a, 4).unwrap();
        assert_eq!(p.diameter, 3);
        assert_eq!(p.xi, h.xi(o(5), 4).unwrap());
        assert_eq!(
            set_profile(&h, &FinOrdSet::nat([1, 2]), 2),
            Err(Error::XiUndefined { k: 2, diameter: 2 })
        );
    }
}
