//! Captured families and the projections defined from them.
//!
//! A family `𝒟` is captured at level `l` when `𝒟 = {F_i[S] : i < |𝒟|}` for
//! some `F ∈ F_l` and positions `S ⊆ m_{l−1}`. Since `d ∈ F_i` sits at
//! position `‖d‖_{l−1}` of `F_i`, the witness `S` is read off the norms and
//! no member has to be chosen.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{delta_level, diameter, rho};
use crate::scheme_core::{level_iter, piece_runs, FinOrdSet, Ordinal, RunSet, SchemeHandle};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaptureRecord {
    /// Members ordered by the piece that holds them.
    pub family: Vec<FinOrdSet>,
    pub level: usize,
    /// Positions `S ⊆ m_{l−1}`.
    pub witness: Vec<u64>,
    pub fully_captured: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CaptureOutcome {
    Captured(CaptureRecord),
    NotCaptured(String),
}

impl CaptureOutcome {
    pub fn is_captured(&self) -> bool {
        matches!(self, CaptureOutcome::Captured(_))
    }

    pub fn record(self) -> Option<CaptureRecord> {
        match self {
            CaptureOutcome::Captured(r) => Some(r),
            CaptureOutcome::NotCaptured(_) => None,
        }
    }
}

fn singletons(s: &[Ordinal]) -> Vec<FinOrdSet> {
    s.iter().map(|&a| FinOrdSet::from(vec![a])).collect()
}

/// Decides whether `family` is captured at level `l`.
pub fn is_captured(h: &SchemeHandle, family: &[FinOrdSet], l: usize) -> Result<CaptureOutcome> {
    use CaptureOutcome::NotCaptured;
    if family.len() < 2 || family.iter().any(FinOrdSet::is_empty) {
        return Ok(NotCaptured("need at least two nonempty sets".into()));
    }
    if l == 0 {
        return Ok(NotCaptured("level 0 has a single piece".into()));
    }
    let union = family.iter().fold(FinOrdSet::new(), |acc, d| acc.union(d));
    for &x in &union {
        h.check(x)?;
    }
    let d = diameter(h, &union)?;
    if d != l {
        return Ok(NotCaptured(format!("diameter of the union is {d}, not {l}")));
    }
    let mut slots: Vec<Option<(FinOrdSet, Vec<u64>)>> = vec![None; family.len()];
    for member in family {
        let dm = diameter(h, member)?;
        if dm >= l {
            return Ok(NotCaptured(format!("{member} has diameter {dm} >= {l}")));
        }
        let xi = h.xi(member.max().expect("nonempty"), l)?;
        if xi < 0 || xi as usize >= family.len() {
            return Ok(NotCaptured(format!("{member} sits in piece {xi}")));
        }
        let s = member.iter().map(|&x| h.norm(x, l - 1)).collect::<Result<Vec<_>>>()?;
        match &mut slots[xi as usize] {
            Some(_) => return Ok(NotCaptured(format!("two members in piece {xi}"))),
            slot => *slot = Some((member.clone(), s)),
        }
    }
    let slots: Vec<(FinOrdSet, Vec<u64>)> = slots.into_iter().map(|s| s.expect("all pieces filled")).collect();
    let witness = slots[0].1.clone();
    if slots.iter().any(|(_, s)| *s != witness) {
        return Ok(NotCaptured("members sit at different positions of their pieces".into()));
    }
    Ok(CaptureOutcome::Captured(CaptureRecord {
        family: slots.into_iter().map(|(m, _)| m).collect(),
        level: l,
        witness,
        fully_captured: family.len() as u64 == h.ty().n(l)?,
    }))
}

/// `{α}, {β}` captured iff `Δ(α, β) = l = ρ(α, β)` and the pair occupies
/// pieces `0` and `1`. Only meaningful for pairs of points.
pub fn pair_captured_level(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<Option<usize>> {
    if a == b {
        return Ok(None);
    }
    let r = rho(h, a, b)?;
    if delta_level(h, a, b)? != r {
        return Ok(None);
    }
    let mut xs = [h.xi(a, r)?, h.xi(b, r)?];
    xs.sort_unstable();
    Ok((xs == [0, 1]).then_some(r))
}

/// Families `{F_i[S] : i < size}` generated from members `F ∈ F_l` below
/// `bound` and positions `S ⊆ m_{l−1}` with `S ⊄ r_l`, optionally restricted
/// to `|S| = s_size`.
pub fn enumerate_captured(
    h: &SchemeHandle,
    l: usize,
    size: usize,
    bound: Ordinal,
    s_size: Option<usize>,
) -> Result<Vec<CaptureRecord>> {
    let t = h.ty();
    if l == 0 || size < 2 || size as u64 > t.n(l)? {
        return Ok(Vec::new());
    }
    let (width, r) = (t.m(l - 1)?, t.r(l)?);
    let sizes: Vec<usize> = match s_size {
        Some(s) => vec![s],
        None => (1..=width as usize).collect(),
    };
    let mut out = Vec::new();
    for f in level_iter(h, l, bound)? {
        let f = RunSet::from_set(&f?);
        let pieces = (0..size as u64)
            .map(|i| piece_runs(&f, t, l, i))
            .collect::<Result<Vec<_>>>()?;
        for &k in &sizes {
            for s in (0..width).combinations(k) {
                if s.iter().all(|&p| p < r) {
                    continue;
                }
                let family = pieces
                    .iter()
                    .map(|p| {
                        s.iter()
                            .map(|&j| p.get(j).expect("position inside the piece"))
                            .collect()
                    })
                    .collect();
                out.push(CaptureRecord {
                    family,
                    level: l,
                    witness: s,
                    fully_captured: size as u64 == t.n(l)?,
                });
            }
        }
    }
    Ok(out)
}

/// All `D ∈ [S]^n` (as singleton families) captured at a level in `window`,
/// ordered by level and then lexicographically.
pub fn captured_scan(
    h: &SchemeHandle,
    s: &FinOrdSet,
    n: usize,
    window: std::ops::RangeInclusive<usize>,
) -> Result<Vec<CaptureRecord>> {
    let mut out = Vec::new();
    if n < 2 {
        return Ok(out);
    }
    for d in s.iter().copied().combinations(n) {
        let set = FinOrdSet::from(d.clone());
        let l = diameter(h, &set)?;
        if !window.contains(&l) {
            continue;
        }
        if let CaptureOutcome::Captured(rec) = is_captured(h, &singletons(&d), l)? {
            out.push(rec);
        }
    }
    out.sort_by_key(|r| (r.level, flat(r)));
    Ok(out)
}

fn flat(r: &CaptureRecord) -> Vec<Ordinal> {
    let mut v: Vec<Ordinal> = r.family.iter().flat_map(|d| d.iter().copied()).collect();
    v.sort_unstable();
    v
}

/// `π_n(S) = {ρ^D : D ∈ [S]^n captured}`.
pub fn pi_n(h: &SchemeHandle, s: &FinOrdSet, n: usize) -> Result<BTreeSet<usize>> {
    Ok(captured_scan(h, s, n, 0..=usize::MAX)?
        .into_iter()
        .map(|r| r.level)
        .collect())
}

/// `⟦α, β⟧ = min((β)_{ρ(α,β)−1} ∖ α)` for `α < β`.
pub fn square_bracket(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<Ordinal> {
    if a >= b {
        return Err(Error::BadOrder(format!("{a} < {b}")));
    }
    let r = rho(h, a, b)?;
    h.closure(b, r - 1)?
        .at_or_above(a)
        .min()
        .ok_or_else(|| Error::NotAMember("empty closure".into()))
}

/// `⦇S⦈ = {⟦α, β⟧ : α < β in S, {α, β} captured}`.
pub fn bracket_projection(h: &SchemeHandle, s: &FinOrdSet) -> Result<BTreeSet<Ordinal>> {
    let mut out = BTreeSet::new();
    for (&a, &b) in s.iter().tuple_combinations() {
        if pair_captured_level(h, a, b)?.is_some() {
            out.insert(square_bracket(h, a, b)?);
        }
    }
    Ok(out)
}

/// True iff no `D ∈ [p]^n` is captured at a level in `levels`.
pub fn dn_condition(h: &SchemeHandle, p: &FinOrdSet, levels: &BTreeSet<usize>, n: usize) -> Result<bool> {
    Ok(pi_n(h, p, n)?.is_disjoint(levels))
}

/// Decides `ξ ∈ H_n(α)`: for all `m > n`, `Ξ_α(m) = −1` or `Ξ_ξ(m) ≤ Ξ_α(m)`.
/// Above `ρ(ξ, α)` the condition always holds, so only `(n, ρ]` is checked.
pub fn h_ideal_member(h: &SchemeHandle, xi: Ordinal, a: Ordinal, n: usize) -> Result<bool> {
    if xi >= a {
        return Err(Error::BadOrder(format!("{xi} < {a}")));
    }
    let r = rho(h, xi, a)?;
    for m in n + 1..=r {
        let xa = h.xi(a, m)?;
        if xa != -1 && h.xi(xi, m)? > xa {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    fn nat(v: &[u64]) -> FinOrdSet {
        FinOrdSet::nat(v.iter().copied())
    }

    fn o(i: u64) -> Ordinal {
        Ordinal::fin(i)
    }

    fn h() -> SchemeHandle {
        SchemeHandle::omega(&tau2())
    }

    #[test]
    fn captured_examples() {
        let h = h();
        let rec = is_captured(&h, &[nat(&[1]), nat(&[2])], 2).unwrap().record().unwrap();
        assert_eq!(rec.witness, vec![1]);
        assert!(is_captured(&h, &[nat(&[0, 1]), nat(&[0, 2])], 2).unwrap().is_captured());
        assert!(!is_captured(&h, &[nat(&[1]), nat(&[5])], 3).unwrap().is_captured());
        assert_eq!(pair_captured_level(&h, o(1), o(5)).unwrap(), None);
    }

    #[test]
    fn scan_examples() {
        let h = h();
        let got: Vec<(Vec<FinOrdSet>, usize)> = captured_scan(&h, &nat(&[1, 2, 4, 5]), 2, 0..=10)
            .unwrap()
            .into_iter()
            .map(|r| (r.family, r.level))
            .collect();
        let want = vec![
            (vec![nat(&[1]), nat(&[2])], 2),
            (vec![nat(&[4]), nat(&[5])], 2),
            (vec![nat(&[1]), nat(&[4])], 3),
            (vec![nat(&[2]), nat(&[5])], 3),
        ];
        assert_eq!(got, want);
        assert!(captured_scan(&h, &nat(&[1, 5]), 2, 0..=10).unwrap().is_empty());
        assert!(captured_scan(&h, &nat(&[1, 5]), 3, 0..=10).unwrap().is_empty());
    }

    #[test]
    fn enumeration_examples() {
        let h = h();
        let pairs = |l, bound| -> Vec<FinOrdSet> {
            enumerate_captured(&h, l, 2, o(bound), Some(1))
                .unwrap()
                .into_iter()
                .map(|r| r.family.iter().fold(FinOrdSet::new(), |a, d| a.union(d)))
                .collect()
        };
        assert_eq!(pairs(2, 6), vec![nat(&[1, 2]), nat(&[4, 5])]);
        assert_eq!(pairs(3, 6), vec![nat(&[0, 3]), nat(&[1, 4]), nat(&[2, 5])]);
        assert_eq!(pairs(1, 2), vec![nat(&[0, 1])]);
        let all = enumerate_captured(&h, 3, 2, o(6), None).unwrap();
        assert_eq!(all.len(), 7);
        assert!(all.iter().any(|r| r.family == vec![nat(&[0, 1, 2]), nat(&[3, 4, 5])]));
    }

    #[test]
    fn projection_examples() {
        let h = h();
        assert_eq!(pi_n(&h, &nat(&[1, 2, 4, 5]), 2).unwrap(), BTreeSet::from([2, 3]));
        assert_eq!(pi_n(&h, &nat(&[2, 5]), 2).unwrap(), BTreeSet::from([3]));
        assert!(pi_n(&h, &nat(&[7]), 2).unwrap().is_empty());
        assert_eq!(square_bracket(&h, o(2), o(5)).unwrap(), o(3));
        assert_eq!(square_bracket(&h, o(3), o(5)).unwrap(), o(5));
        assert_eq!(square_bracket(&h, o(1), o(2)).unwrap(), o(2));
        assert!(matches!(square_bracket(&h, o(5), o(2)), Err(Error::BadOrder(_))));
        assert_eq!(
            bracket_projection(&h, &nat(&[1, 2, 4, 5])).unwrap(),
            BTreeSet::from([o(2), o(3), o(5)])
        );
        assert!(bracket_projection(&h, &nat(&[1, 5])).unwrap().is_empty());
        assert!(bracket_projection(&h, &nat(&[4])).unwrap().is_empty());
    }

    #[test]
    fn dn_examples() {
        let h = h();
        assert!(dn_condition(&h, &nat(&[1, 5]), &BTreeSet::from([2]), 2).unwrap());
        assert!(!dn_condition(&h, &nat(&[1, 2]), &BTreeSet::from([2]), 2).unwrap());
        assert!(dn_condition(&h, &FinOrdSet::new(), &BTreeSet::from([2]), 2).unwrap());
    }

    #[test]
    fn ideal_examples() {
        let h = h();
        assert!(h_ideal_member(&h, o(1), o(5), 0).unwrap());
        assert!(!h_ideal_member(&h, o(2), o(4), 0).unwrap());
        let r = rho(&h, o(2), o(4)).unwrap();
        assert!(h_ideal_member(&h, o(2), o(4), r).unwrap());
        assert!(h_ideal_member(&h, o(2), o(4), r + 3).unwrap());
    }
}
