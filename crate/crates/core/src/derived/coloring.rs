//! Colorings of pairs built from `ρ`, `Δ`, `Ξ` and the oscillation of the
//! norm functions.
//!
//! Codes used here:
//!
//! * `pair(a, b) = (a + b)(a + b + 1)/2 + b` is the Cantor pairing.
//! * `ψ(β, ρ, a) = pair(pair(pair(q, i), ρ), a)` for `β = ω·q + i`.
//! * Finite lists of naturals: the set bits `p_0 < p_1 < …` of `n` give the
//!   list `x_0 = p_0`, `x_j = p_j − p_{j−1} − 1`. This is a bijection between
//!   ℕ and finite lists.
//! * `h_n` decodes `n` as the flat list
//!   `[d, |σ_0|, σ_0…, …, |σ_{d−1}|, σ_{d−1}…, v_0, …, v_{d²−1}]`.
//!   `X_n = {σ_j}` must be strictly increasing in lexicographic order and
//!   pairwise ⊆-incomparable, and `h_n(σ_i, σ_j) = v_{i·d+j}`. Any other `n`
//!   decodes to the empty map. Each finite map has exactly one code.
//! * `C^k_i` and `g^k_i` decode `i − 1`, reduced modulo `2^{|base|}`, in
//!   binary over the base `m_{k} ∖ r_{k+1}`: bit `j` stands for the element
//!   `r_{k+1} + j`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::rho;
use crate::scheme_core::{Ordinal, SchemeHandle};
use crate::type_system::{PartitionSpec, TypeSpec};

use super::osc::{f_prefix, osc};

/// The value returned by `o*` when no pair of domain elements is extended.
pub const O_STAR_DEFAULT: u64 = 17;

pub fn pair(a: u64, b: u64) -> Option<u64> {
    let s = a.checked_add(b)?;
    let t = (s as u128) * (s as u128 + 1) / 2 + b as u128;
    u64::try_from(t).ok()
}

pub fn pair_wide(a: u128, b: u128) -> Option<u128> {
    let s = a.checked_add(b)?;
    s.checked_mul(s.checked_add(1)?).map(|x| x / 2)?.checked_add(b)
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn unpair(n: u64) -> (u64, u64) {
    let w = (isqrt(8 * n as u128 + 1) - 1) / 2;
    let t = w * (w + 1) / 2;
    let b = n as u128 - t;
    ((w - b) as u64, b as u64)
}

pub fn decode_list(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut next = 0u64;
    for p in (0..64).filter(|&p| n >> p & 1 == 1) {
        out.push(p - next);
        next = p + 1;
    }
    out
}

pub fn encode_list(v: &[u64]) -> Option<u64> {
    let mut n = 0u64;
    let mut p = 0u64;
    for (j, &x) in v.iter().enumerate() {
        p = if j == 0 { x } else { p.checked_add(x)?.checked_add(1)? };
        n |= 1u64.checked_shl(u32::try_from(p).ok()?).filter(|_| p < 64)?;
    }
    Some(n)
}

/// A finite map `h : X × X → ω` on a set `X` of pairwise incomparable
/// finite sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteMap {
    pub domain: Vec<Vec<u64>>,
    pub values: Vec<Vec<u64>>,
}

impl FiniteMap {
    /// The `σ ∈ X` that `f` extends, where `f` is given on a long enough
    /// prefix. Unique because `X` is an antichain.
    pub fn extended_by(&self, f: &[u64]) -> Option<usize> {
        self.domain.iter().position(|s| f.starts_with(s))
    }

    fn longest(&self) -> usize {
        self.domain.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn is_prefix(a: &[u64], b: &[u64]) -> bool {
    b.starts_with(a)
}

pub fn decode_map(n: u64) -> Option<FiniteMap> {
    let list = decode_list(n);
    let mut it = list.iter().copied();
    let d = usize::try_from(it.next()?).ok()?;
    let mut domain = Vec::with_capacity(d);
    for _ in 0..d {
        let len = usize::try_from(it.next()?).ok()?;
        let s: Vec<u64> = it.by_ref().take(len).collect();
        if s.len() != len {
            return None;
        }
        domain.push(s);
    }
    let flat: Vec<u64> = it.collect();
    if flat.len() != d * d || domain.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    for (i, a) in domain.iter().enumerate() {
        if domain[i + 1..].iter().any(|b| is_prefix(a, b) || is_prefix(b, a)) {
            return None;
        }
    }
    let values = flat.chunks(d.max(1)).map(<[u64]>::to_vec).collect();
    Some(FiniteMap { domain, values })
}

/// The code of a finite map, when it fits in 64 bits.
pub fn encode_map(map: &FiniteMap) -> Option<u64> {
    let d = map.domain.len();
    let mut list = vec![d as u64];
    for s in &map.domain {
        list.push(s.len() as u64);
        list.extend(s);
    }
    for row in &map.values {
        list.extend(row);
    }
    if list.len() != 1 + d + map.domain.iter().map(Vec::len).sum::<usize>() + d * d {
        return None;
    }
    encode_list(&list)
}

/// The interval `[l, 2l + k]` allocated to block `n`, in allocation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionInterval {
    pub n: usize,
    pub k: usize,
    pub lo: u64,
    pub hi: u64,
}

/// Intervals of the partition `⟨P_n⟩`: pairs `(n, k)` are taken by `n + k`
/// and then by `n`, and each gets `[l, 2l + k]` at the current frontier `l`.
pub fn partition_intervals() -> impl Iterator<Item = Result<PartitionInterval>> {
    let mut frontier = Some(0u64);
    (0usize..)
        .flat_map(|d| (0..=d).map(move |n| (n, d - n)))
        .map_while(move |(n, k)| {
            let lo = frontier?;
            let hi = lo.checked_mul(2).and_then(|x| x.checked_add(k as u64));
            frontier = hi.and_then(|x| x.checked_add(1));
            Some(
                hi.map(|hi| PartitionInterval { n, k, lo, hi })
                    .ok_or_else(|| Error::Overflow(format!("partition interval at {lo}"))),
            )
        })
}

/// The block `n` with `t ∈ P_n`.
pub fn partition_lookup(t: u64) -> Result<usize> {
    for iv in partition_intervals() {
        let iv = iv?;
        if t <= iv.hi {
            return Ok(iv.n);
        }
    }
    Err(Error::Overflow(format!("partition lookup of {t}")))
}

fn distinct(a: Ordinal, b: Ordinal) -> Result<(Ordinal, Ordinal)> {
    if a == b {
        return Err(Error::BadOrder(format!("{a} != {b}")));
    }
    Ok((a.min(b), a.max(b)))
}

/// `o(α, β)`: the block of `osc(min, max)`.
pub fn color_o(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<usize> {
    let (lo, hi) = distinct(a, b)?;
    partition_lookup(osc(h, lo, hi, 0)?.count as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OStarValue {
    pub o: u64,
    pub sigma_alpha: Option<Vec<u64>>,
    pub sigma_beta: Option<Vec<u64>>,
    pub value: u64,
}

/// `o*` evaluated with the map `h_n` for an explicit index `n`.
pub fn o_star_with_index(h: &SchemeHandle, a: Ordinal, b: Ordinal, n: u64) -> Result<OStarValue> {
    distinct(a, b)?;
    let none = OStarValue {
        o: n,
        sigma_alpha: None,
        sigma_beta: None,
        value: O_STAR_DEFAULT,
    };
    let Some(map) = decode_map(n) else {
        return Ok(none);
    };
    let len = map.longest();
    let (fa, fb) = (f_prefix(h, a, len)?, f_prefix(h, b, len)?);
    match (map.extended_by(&fa), map.extended_by(&fb)) {
        (Some(i), Some(j)) => Ok(OStarValue {
            o: n,
            sigma_alpha: Some(map.domain[i].clone()),
            sigma_beta: Some(map.domain[j].clone()),
            value: map.values[i][j],
        }),
        _ => Ok(none),
    }
}

/// `o*(α, β) = h_{o(α,β)}(σ_α, σ_β)` when `f_α` and `f_β` extend elements
/// of `X_{o(α,β)}`, and 17 otherwise.
pub fn color_o_star(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<OStarValue> {
    let n = color_o(h, a, b)? as u64;
    o_star_with_index(h, a, b, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedColor {
    pub beta: Ordinal,
    pub rho: usize,
    pub a: u64,
    /// True when `Ξ_β(ρ) > 2`, so `a = ‖α‖_ρ`; otherwise `a = ‖α‖_{ρ−1}`.
    pub first_case: bool,
    pub code: u128,
}

pub fn psi(beta: Ordinal, rho: usize, a: u64) -> Result<u128> {
    let overflow = || Error::Overflow(format!("psi({beta}, {rho}, {a})"));
    let b = pair_wide(beta.q as u128, beta.i as u128).ok_or_else(overflow)?;
    let b = pair_wide(b, rho as u128).ok_or_else(overflow)?;
    pair_wide(b, a as u128).ok_or_else(overflow)
}

/// `c(α, β) = ψ(β, ρ(α, β), a)` for `α < β`.
pub fn bounded_color_c(h: &SchemeHandle, a: Ordinal, b: Ordinal) -> Result<BoundedColor> {
    if a >= b {
        return Err(Error::BadOrder(format!("{a} < {b}")));
    }
    let r = rho(h, a, b)?;
    let first_case = h.xi(b, r)? > 2;
    let norm = h.norm(a, if first_case { r } else { r - 1 })?;
    Ok(BoundedColor {
        beta: b,
        rho: r,
        a: norm,
        first_case,
        code: psi(b, r, norm)?,
    })
}

/// Requires `n_k ≥ 2^{e} + 1` with `e = m_{k−1}`, or `m_{k−1} − r_k` when
/// `above_root` is set.
fn require_power_fan(t: &TypeSpec, k: usize, above_root: bool) -> Result<()> {
    let prev = t.level(k - 1)?;
    let cur = t.level(k)?;
    let (Some(m), Some(n)) = (prev.m, cur.n) else {
        return Ok(());
    };
    let e = if above_root { m - cur.r } else { m };
    let need = 1u64
        .checked_shl(e as u32)
        .filter(|_| e < 64)
        .and_then(|p| p.checked_add(1));
    match need {
        Some(need) if n >= need => Ok(()),
        _ => Err(Error::TypeTooSmall(format!("n_{k} = {n} < 2^{e} + 1"))),
    }
}

/// Bit `pos − r` of `(i − 1) mod 2^{width}`; false below `r`.
fn decode_bit(i: i64, pos: u64, r: u64, width: u64) -> bool {
    if pos < r || i < 1 {
        return false;
    }
    let code = (i - 1) as u64;
    let code = if width < 64 { code % (1u64 << width) } else { code };
    let j = pos - r;
    j < 64 && (code >> j) & 1 == 1
}

/// `f_α(k)` of the entangled family.
pub fn entangled_eval(h: &SchemeHandle, a: Ordinal, k: usize) -> Result<i64> {
    if k == 0 {
        h.check(a)?;
        return Ok(0);
    }
    let t = h.ty();
    require_power_fan(t, k, false)?;
    let xi = h.xi(a, k)?;
    if xi <= 0 {
        return Ok(0);
    }
    let (m, r) = (t.m(k - 1)?, t.r(k)?);
    let inside = decode_bit(xi, h.norm(a, k - 1)?, r, m - r);
    Ok(if inside { xi } else { -xi })
}

pub fn entangled_vector(h: &SchemeHandle, a: Ordinal, len: usize) -> Result<Vec<i64>> {
    (0..len).map(|k| entangled_eval(h, a, k)).collect()
}

/// `f_β(ξ)` of the coherent tree, with `P_c` the block 0 of `partition`
/// and `P_a` everything else.
pub fn coherent_tree_eval(h: &SchemeHandle, beta: Ordinal, xi: Ordinal, partition: &PartitionSpec) -> Result<u8> {
    if xi >= beta {
        return Err(Error::BadOrder(format!("{xi} < {beta}")));
    }
    let l = rho(h, xi, beta)?;
    let t = h.ty();
    require_power_fan(t, l, true)?;
    let (x_xi, x_beta) = (h.xi(xi, l)?, h.xi(beta, l)?);
    if x_xi != 0 {
        return Ok(0);
    }
    if partition.block_of(l) == 0 {
        return Ok(u8::from(x_beta == 1));
    }
    let (m, r) = (t.m(l - 1)?, t.r(l)?);
    Ok(u8::from(decode_bit(x_beta, h.norm(xi, l)?, r, m - r)))
}

/// All codes of `c` on pairs below `bound` occurring three or more times.
pub fn bounded_color_collisions(h: &SchemeHandle, bound: u64) -> Result<Vec<u128>> {
    let mut counts = std::collections::BTreeMap::new();
    for b in 1..bound {
        for a in 0..b {
            let c = bounded_color_c(h, Ordinal::fin(a), Ordinal::fin(b))?;
            *counts.entry(c.code).or_insert(0u32) += 1;
        }
    }
    Ok(counts
        .into_iter()
        .filter(|&(_, n)| n > 2)
        .map(|(c, _)| c)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::{tau2, tau4, tau_e, tau_s};
    use proptest::prelude::*;

    fn o(i: u64) -> Ordinal {
        Ordinal::fin(i)
    }

    #[test]
    fn partition_frontier() {
        let got: Vec<(usize, u64, u64)> = partition_intervals()
            .take(6)
            .map(|iv| iv.unwrap())
            .map(|iv| (iv.n, iv.lo, iv.hi))
            .collect();
        assert_eq!(
            got,
            vec![(0, 0, 0), (0, 1, 3), (1, 4, 8), (0, 9, 20), (1, 21, 43), (2, 44, 88)]
        );
        assert_eq!(partition_lookup(1).unwrap(), 0);
        assert_eq!(partition_lookup(4).unwrap(), 1);
        assert_eq!(partition_lookup(44).unwrap(), 2);
    }

    #[test]
    fn coloring_examples() {
        let h = SchemeHandle::omega(&tau2());
        assert_eq!(color_o(&h, o(2), o(4)).unwrap(), 0);
        assert!(matches!(color_o(&h, o(4), o(4)), Err(Error::BadOrder(_))));
        let v = color_o_star(&h, o(2), o(4)).unwrap();
        assert_eq!(v.value, O_STAR_DEFAULT);
        assert!(v.sigma_alpha.is_none());
    }

    #[test]
    fn o_star_reads_the_map() {
        let h = SchemeHandle::omega(&tau2());
        // f_2 = (0, 1, 2, ..) and f_4 = (0, 1, 1, 4, ..).
        let map = FiniteMap {
            domain: vec![vec![0, 1, 1], vec![0, 1, 2]],
            values: vec![vec![3, 4], vec![5, 6]],
        };
        let n = encode_map(&map).unwrap();
        assert_eq!(decode_map(n).unwrap(), map);
        let v = o_star_with_index(&h, o(2), o(4), n).unwrap();
        assert_eq!((v.value, v.sigma_alpha), (5, Some(vec![0, 1, 2])));
        assert_eq!(o_star_with_index(&h, o(4), o(2), n).unwrap().value, 4);
        let bad = FiniteMap {
            domain: vec![vec![0], vec![0, 1]],
            values: vec![vec![0, 0], vec![0, 0]],
        };
        assert_eq!(decode_map(encode_map(&bad).unwrap()), None);
    }

    #[test]
    fn bounded_color_examples() {
        let h = SchemeHandle::omega(&tau4());
        let c = bounded_color_c(&h, o(1), o(10)).unwrap();
        assert_eq!((c.beta, c.rho, c.a, c.first_case), (o(10), 2, 1, true));
        let c = bounded_color_c(&h, o(1), o(7)).unwrap();
        assert_eq!((c.beta, c.rho, c.a, c.first_case), (o(7), 2, 1, false));
        assert!(bounded_color_collisions(&h, 13).unwrap().is_empty());
        assert!(bounded_color_c(&h, o(7), o(1)).is_err());
    }

    #[test]
    fn entangled_examples() {
        let h = SchemeHandle::omega(&tau_e());
        assert_eq!(entangled_eval(&h, o(2), 1).unwrap(), 2);
        assert_eq!(entangled_eval(&h, o(1), 1).unwrap(), -1);
        assert_eq!(entangled_eval(&h, o(0), 1).unwrap(), 0);
        assert_eq!(entangled_eval(&h, o(5), 0).unwrap(), 0);
        let small = SchemeHandle::omega(&tau2());
        assert!(matches!(entangled_eval(&small, o(1), 1), Err(Error::TypeTooSmall(_))));
    }

    #[test]
    fn coherent_tree_examples() {
        let h = SchemeHandle::omega(&tau_s());
        let p = PartitionSpec::parity();
        assert_eq!(coherent_tree_eval(&h, o(1), o(0), &p).unwrap(), 0);
        // Level 2 is in P_c: 0 sits in piece 0 and 3 in piece 1 of [0, 27).
        assert_eq!(rho(&h, o(0), o(3)).unwrap(), 2);
        assert_eq!(coherent_tree_eval(&h, o(3), o(0), &p).unwrap(), 1);
        assert!(coherent_tree_eval(&h, o(0), o(3), &p).is_err());
    }

    proptest! {
        #[test]
        fn list_code_round_trips(v in proptest::collection::vec(0u64..12, 0..5)) {
            let n = encode_list(&v).unwrap();
            prop_assert_eq!(decode_list(n), v);
        }

        #[test]
        fn every_code_is_a_list(n in any::<u64>()) {
            prop_assert_eq!(encode_list(&decode_list(n)), Some(n));
        }

        #[test]
        fn pairing_round_trips(a in 0u64..1_000_000, b in 0u64..1_000_000) {
            prop_assert_eq!(unpair(pair(a, b).unwrap()), (a, b));
        }
    }
}
