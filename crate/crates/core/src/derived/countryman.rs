use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{delta_level, rho};
use crate::scheme_core::{Ordinal, SchemeHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CountrymanCase {
    /// `‖c^α_β‖_k = r_{k+1}`: decided by `Ξ_α(k+1)` against `Ξ_β(k+1)`.
    ByXi,
    /// `‖c^α_β‖_k < r_{k+1}`: decided by comparing `c^α_β` with `c^β_α`.
    Recurse,
}

/// One comparison on the recursion path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountrymanStep {
    pub alpha: Ordinal,
    pub beta: Ordinal,
    pub k: usize,
    pub c_alpha: Ordinal,
    pub c_beta: Ordinal,
    pub case: CountrymanCase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountrymanResult {
    #[serde(serialize_with = "ser_ordering")]
    pub ordering: Ordering,
    pub trace: Vec<CountrymanStep>,
    /// `(‖α‖_z, ‖β‖_z, z)` with `z = ρ(α, β)`, taken with `α < β` as
    /// ordinals. `None` when the arguments are equal.
    pub class: Option<(u64, u64, usize)>,
}

fn ser_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    })
}

/// `<_F` with a memo shared across calls.
pub struct CountrymanOrder {
    h: SchemeHandle,
    memo: HashMap<(Ordinal, Ordinal), Ordering>,
}

impl CountrymanOrder {
    pub fn new(h: &SchemeHandle) -> Self {
        CountrymanOrder {
            h: h.clone(),
            memo: HashMap::new(),
        }
    }

    pub fn cmp(&mut self, a: Ordinal, b: Ordinal) -> Result<Ordering> {
        self.run(a, b, None)
    }

    fn run(&mut self, a: Ordinal, b: Ordinal, mut trace: Option<&mut Vec<CountrymanStep>>) -> Result<Ordering> {
        self.h.check(a)?;
        self.h.check(b)?;
        if a == b {
            return Ok(Ordering::Equal);
        }
        if trace.is_none() {
            if let Some(&o) = self.memo.get(&(a, b)) {
                return Ok(o);
            }
        }
        let (mut x, mut y) = (a, b);
        let ord = loop {
            let k = delta_level(&self.h, x, y)? - 1;
            let bx = self.h.closure(x, k)?;
            let by = self.h.closure(y, k)?;
            let cx = bx
                .difference(&by)
                .min()
                .ok_or_else(|| Error::NotAMember(format!("({x})_{k} ⊆ ({y})_{k}")))?;
            let cy = by
                .difference(&bx)
                .min()
                .ok_or_else(|| Error::NotAMember(format!("({y})_{k} ⊆ ({x})_{k}")))?;
            let by_xi = self.h.norm(cx, k)? == self.h.ty().r(k + 1)?;
            if let Some(t) = trace.as_deref_mut() {
                let case = if by_xi {
                    CountrymanCase::ByXi
                } else {
                    CountrymanCase::Recurse
                };
                t.push(CountrymanStep {
                    alpha: x,
                    beta: y,
                    k,
                    c_alpha: cx,
                    c_beta: cy,
                    case,
                });
            }
            if by_xi {
                break self.h.xi(x, k + 1)?.cmp(&self.h.xi(y, k + 1)?);
            }
            if let (None, Some(&o)) = (&trace, self.memo.get(&(cx, cy))) {
                break o;
            }
            (x, y) = (cx, cy);
        };
        self.memo.insert((a, b), ord);
        self.memo.insert((b, a), ord.reverse());
        Ok(ord)
    }
}

/// Compares `α` and `β` under `<_F`, recording the recursion path and the
/// chain class of the pair.
pub fn countryman_cmp(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<CountrymanResult> {
    let mut trace = Vec::new();
    let ordering = CountrymanOrder::new(h).run(a, b, Some(&mut trace))?;
    let class = chain_class(h, a, b)?;
    Ok(CountrymanResult { ordering, trace, class })
}

/// The chain `P(x, y, z)` that the pair `{α, β}` belongs to.
pub fn chain_class(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<Option<(u64, u64, usize)>> {
    if a == b {
        return Ok(None);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let z = rho(h, lo, hi)?;
    Ok(Some((h.norm(lo, z)?, h.norm(hi, z)?, z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    fn o(i: u64) -> Ordinal {
        Ordinal::fin(i)
    }

    #[test]
    fn examples() {
        let h = SchemeHandle::omega(&tau2());
        let r = countryman_cmp(&h, o(4), o(5)).unwrap();
        assert_eq!(r.ordering, Ordering::Less);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.trace[0].case, CountrymanCase::ByXi);

        let r = countryman_cmp(&h, o(2), o(4)).unwrap();
        assert_eq!(r.ordering, Ordering::Less);
        let path: Vec<_> = r.trace.iter().map(|s| (s.alpha, s.beta, s.case)).collect();
        assert_eq!(
            path,
            vec![
                (o(2), o(4), CountrymanCase::Recurse),
                (o(0), o(3), CountrymanCase::ByXi)
            ]
        );
        assert_eq!(countryman_cmp(&h, o(3), o(3)).unwrap().ordering, Ordering::Equal);
    }

    #[test]
    fn memo_agrees_with_traced_comparison() {
        let h = SchemeHandle::omega(&tau2());
        let mut ord = CountrymanOrder::new(&h);
        for a in 0..10 {
            for b in 0..10 {
                let fresh = countryman_cmp(&h, o(a), o(b)).unwrap().ordering;
                assert_eq!(ord.cmp(o(a), o(b)).unwrap(), fresh);
            }
        }
    }
}
