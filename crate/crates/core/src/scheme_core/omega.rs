//! Arithmetic for the scheme over ω.
//!
//! Every `x < m_K` lies in the level-`K` member `[0, m_K)`, where its
//! `K`-cardinality is `x` itself. Walking down one level, `x` stays put when
//! it sits in the root and otherwise moves into piece
//! `i = (p − r_j) / (m_{j−1} − r_j)`, shifting its position by `i·(m_{j−1} − r_j)`.

use super::decomp::piece_runs;
use super::ord::Ordinal;
use super::runs::RunSet;
use crate::error::Result;
use crate::type_system::TypeSpec;

/// `‖x‖_j` for `j = 0..=K`, `K` least with `x < m_K`.
pub fn norms(t: &TypeSpec, x: u64) -> Result<Vec<u64>> {
    let top = t.level_above(x)?;
    let mut out = vec![0; top + 1];
    let mut p = x;
    out[top] = p;
    for j in (1..=top).rev() {
        let (r, w) = (t.r(j)?, t.m(j - 1)? - t.r(j)?);
        if p >= r {
            p -= (p - r) / w * w;
        }
        out[j - 1] = p;
    }
    Ok(out)
}

/// `‖x‖_k`.
pub fn norm(t: &TypeSpec, x: u64, k: usize) -> Result<u64> {
    let n = norms(t, x)?;
    Ok(n.get(k).copied().unwrap_or(x))
}

/// `Ξ` at level `k` of a point whose `k`-cardinality is `p`.
pub fn xi_from_norm(t: &TypeSpec, k: usize, p: u64) -> Result<i64> {
    if k == 0 {
        return Ok(0);
    }
    let r = t.r(k)?;
    if p < r {
        return Ok(-1);
    }
    Ok(match t.m_opt(k - 1)? {
        Some(m) => ((p - r) / (m - r)) as i64,
        None => 0,
    })
}

/// The level-`k` member containing `x` reached by descent from
/// `[0, m_max(K,k))`, with the piece at level `fault` rotated by one.
pub fn descent_member(t: &TypeSpec, x: u64, k: usize, fault: Option<usize>) -> Result<(RunSet, u64)> {
    let top = t.level_above(x)?.max(k);
    let mut member = RunSet::interval(Ordinal::ZERO, t.m(top)?);
    let mut p = x;
    for j in (k + 1..=top).rev() {
        let (r, w) = (t.r(j)?, t.m(j - 1)? - t.r(j)?);
        let i = if p < r { 0 } else { (p - r) / w };
        let used = if fault == Some(j) { (i + 1) % t.n(j)? } else { i };
        member = piece_runs(&member, t, j, used)?;
        if p >= r {
            p -= i * w;
        }
    }
    Ok((member, p))
}

/// `(x)_k`.
pub fn closure(t: &TypeSpec, x: u64, k: usize, fault: Option<usize>) -> Result<RunSet> {
    if k >= t.level_above(x)? {
        return Ok(RunSet::interval(Ordinal::ZERO, x + 1));
    }
    let (member, p) = descent_member(t, x, k, fault)?;
    Ok(member.take(p + 1))
}

/// `E(x, l) = (x)_l ∪ (x, x + m_l − ‖x‖_l)`, a level-`l` member whose part
/// above `x` is an interval.
pub fn interval_member(t: &TypeSpec, x: u64, l: usize) -> Result<RunSet> {
    let mut s = closure(t, x, l, None)?;
    let rest = t.m(l)? - (s.len() - 1) - 1;
    s.push_run(Ordinal::fin(x + 1), rest);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme_core::FinOrdSet;
    use crate::type_system::{tau2, tau4};

    #[test]
    fn norms_in_tau2() {
        let t = tau2();
        assert_eq!(norm(&t, 5, 1).unwrap(), 1);
        assert_eq!(norm(&t, 0, 1).unwrap(), 0);
        assert_eq!(norm(&t, 2, 3).unwrap(), 2);
        assert_eq!(norm(&t, 1, 2).unwrap(), 1);
        assert_eq!(norm(&t, 5, 2).unwrap(), 2);
    }

    #[test]
    fn closures_in_tau2() {
        let t = tau2();
        assert_eq!(closure(&t, 5, 1, None).unwrap().to_set(), FinOrdSet::nat([3, 5]));
        assert_eq!(closure(&t, 2, 3, None).unwrap().to_set(), FinOrdSet::nat([0, 1, 2]));
        assert_eq!(closure(&t, 7, 3, None).unwrap().to_set(), FinOrdSet::nat([0, 1, 6, 7]));
    }

    #[test]
    fn interval_members_are_members() {
        for t in [tau2(), tau4()] {
            for x in 0..60 {
                for l in 0..6 {
                    let e = interval_member(&t, x, l).unwrap();
                    let max = e.max().unwrap().i;
                    assert_eq!(e.len(), t.m(l).unwrap());
                    assert_eq!(closure(&t, max, l, None).unwrap(), e, "x={x} l={l}");
                }
            }
        }
    }
}
