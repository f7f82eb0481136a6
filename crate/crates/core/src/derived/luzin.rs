use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme_core::{Ordinal, SchemeHandle};
use crate::type_system::TypeSpec;

/// The box `{k} × [a.0, a.1) × [b.0, b.1)` inside `N_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LuzinBlock {
    pub k: usize,
    pub a: (u64, u64),
    pub b: (u64, u64),
}

impl LuzinBlock {
    pub fn size(&self) -> u64 {
        self.a.1.saturating_sub(self.a.0) * self.b.1.saturating_sub(self.b.0)
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn contains(&self, k: usize, a: u64, b: u64) -> bool {
        k == self.k && (self.a.0..self.a.1).contains(&a) && (self.b.0..self.b.1).contains(&b)
    }

    pub fn intersect(&self, o: &LuzinBlock) -> Option<LuzinBlock> {
        let cut = |x: (u64, u64), y: (u64, u64)| (x.0.max(y.0), x.1.min(y.1));
        let blk = LuzinBlock {
            k: self.k,
            a: cut(self.a, o.a),
            b: cut(self.b, o.b),
        };
        (self.k == o.k && blk.a.0 < blk.a.1 && blk.b.0 < blk.b.1).then_some(blk)
    }

    pub fn is_subset(&self, o: &LuzinBlock) -> bool {
        self.is_empty() || self.intersect(o).as_ref() == Some(self)
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, u64, u64)> + '_ {
        (self.a.0..self.a.1).flat_map(move |a| (self.b.0..self.b.1).map(move |b| (self.k, a, b)))
    }
}

/// `N_k = {k} × (m_{k−1} ∖ r_k) × [k·m_{k−1}, k·m_k)` for `k ≥ 1`.
pub fn n_block(t: &TypeSpec, k: usize) -> Result<LuzinBlock> {
    let (lo, hi, r) = (t.m(k - 1)?, t.m(k)?, t.r(k)?);
    let kk = k as u64;
    Ok(LuzinBlock {
        k,
        a: (r, lo),
        b: (kk * lo, kk * hi),
    })
}

/// `A^k_α` for `k ≥ 1`, or `None` when `Ξ_α(k) = −1`.
pub fn a_block(h: &SchemeHandle, alpha: Ordinal, k: usize) -> Result<Option<LuzinBlock>> {
    let t = h.ty();
    let n = n_block(t, k)?;
    let norm = h.norm(alpha, k)?;
    let kk = k as u64;
    Ok(match h.xi(alpha, k)? {
        0 => Some(LuzinBlock {
            k,
            a: (norm, norm + 1),
            b: n.b,
        }),
        1 => Some(LuzinBlock {
            k,
            a: n.a,
            b: (kk * norm, kk * (norm + 1)),
        }),
        _ => None,
    })
}

/// `A_α ∩ N_{≤K}` as one box per level with `Ξ_α(k) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LuzinFragment {
    pub alpha: Ordinal,
    pub k_bound: usize,
    pub blocks: Vec<LuzinBlock>,
}

impl LuzinFragment {
    pub fn level(&self, k: usize) -> Option<&LuzinBlock> {
        self.blocks.iter().find(|b| b.k == k)
    }

    pub fn size(&self) -> u64 {
        self.blocks.iter().map(LuzinBlock::size).sum()
    }

    pub fn contains(&self, k: usize, a: u64, b: u64) -> bool {
        self.level(k).is_some_and(|blk| blk.contains(k, a, b))
    }

    /// `A_α ∩ A_β` restricted to the common window, one box per level.
    pub fn intersection(&self, other: &LuzinFragment) -> Vec<LuzinBlock> {
        self.blocks
            .iter()
            .filter_map(|x| other.level(x.k).and_then(|y| x.intersect(y)))
            .collect()
    }
}

fn require_two_type(h: &SchemeHandle) -> Result<()> {
    if h.ty().is_two_type() {
        Ok(())
    } else {
        Err(Error::NotATwoType)
    }
}

pub fn luzin_family(h: &SchemeHandle, alpha: Ordinal, k_bound: usize) -> Result<LuzinFragment> {
    require_two_type(h)?;
    let blocks = (1..=k_bound)
        .filter_map(|k| a_block(h, alpha, k).transpose())
        .collect::<Result<_>>()?;
    Ok(LuzinFragment { alpha, k_bound, blocks })
}

/// `C_β ∩ N_{≤K} = ⋃_{k<K} ⋃_{ξ ∈ (β)_k} A^{k+1}_ξ`. Boxes of one level are
/// pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatorFragment {
    pub beta: Ordinal,
    pub k_bound: usize,
    pub blocks: Vec<LuzinBlock>,
}

impl SeparatorFragment {
    pub fn level(&self, k: usize) -> impl Iterator<Item = &LuzinBlock> {
        self.blocks.iter().filter(move |b| b.k == k)
    }

    pub fn contains(&self, k: usize, a: u64, b: u64) -> bool {
        self.level(k).any(|blk| blk.contains(k, a, b))
    }

    /// `blk ⊆ C_β`, decided pointwise.
    pub fn covers(&self, blk: &LuzinBlock) -> bool {
        blk.points().all(|(k, a, b)| self.contains(k, a, b))
    }

    pub fn meets(&self, blk: &LuzinBlock) -> bool {
        self.level(blk.k).any(|x| x.intersect(blk).is_some())
    }
}

pub fn jones_separator(h: &SchemeHandle, beta: Ordinal, k_bound: usize) -> Result<SeparatorFragment> {
    require_two_type(h)?;
    let mut blocks = Vec::new();
    for k in 0..k_bound {
        for xi in h.closure(beta, k)?.iter() {
            blocks.extend(a_block(h, xi, k + 1)?);
        }
    }
    Ok(SeparatorFragment { beta, k_bound, blocks })
}

/// A finite partial order on `0..n`, stored as its reflexive closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    leq: Vec<Vec<bool>>,
}

impl FinitePoset {
    /// The order generated by the strict relations `a < b`.
    pub fn from_relations(n: usize, less: &[(usize, usize)]) -> Result<Self> {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in less {
            if a >= n || b >= n {
                return Err(Error::BadOrder(format!("elements below {n}")));
            }
            leq[a][b] = true;
        }
        for m in 0..n {
            let through = leq[m].clone();
            for row in leq.iter_mut() {
                if row[m] {
                    for (cell, &via) in row.iter_mut().zip(&through) {
                        *cell |= via;
                    }
                }
            }
        }
        if (0..n).any(|a| (0..n).any(|b| a != b && leq[a][b] && leq[b][a])) {
            return Err(Error::BadOrder("an acyclic relation".into()));
        }
        Ok(FinitePoset { leq })
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relations(n, &[]).expect("no relations")
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn compatible(&self, a: usize, b: usize) -> bool {
        (0..self.len()).any(|z| self.leq(z, a) && self.leq(z, b))
    }
}

/// `T^k_x` together with `M^k_x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepLevel {
    pub k: usize,
    pub m: Vec<usize>,
    pub blocks: Vec<LuzinBlock>,
}

impl RepLevel {
    pub fn is_subset(&self, other: &RepLevel) -> bool {
        self.blocks.iter().all(|b| other.blocks.iter().any(|o| b.is_subset(o)))
    }

    pub fn meets(&self, other: &RepLevel) -> bool {
        self.blocks
            .iter()
            .any(|b| other.blocks.iter().any(|o| b.intersect(o).is_some()))
    }
}

/// `T_x` cut to levels `k < K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepSet {
    pub x: usize,
    pub phi: Ordinal,
    pub levels: Vec<RepLevel>,
}

/// `T^k_x = ⋃ {A^{k+1}_{φ(z)} : z ∈ M^k_x}` with
/// `M^k_x = {z ≤ x : φ(z) ∈ (φ(x))_k}`.
pub fn luzin_representation(
    h: &SchemeHandle,
    poset: &FinitePoset,
    phi: &[Ordinal],
    k_bound: usize,
) -> Result<Vec<RepSet>> {
    require_two_type(h)?;
    let n = poset.len();
    if phi.len() != n {
        return Err(Error::NotAnEmbedding(format!("{} images for {n} elements", phi.len())));
    }
    for x in 0..n {
        h.check(phi[x])?;
        for y in 0..n {
            if x != y && phi[x] == phi[y] {
                return Err(Error::NotAnEmbedding(format!("{x} and {y} share an image")));
            }
            if x != y && poset.leq(x, y) && phi[x] > phi[y] {
                return Err(Error::NotAnEmbedding(format!("{x} < {y} but φ reverses them")));
            }
        }
    }
    (0..n)
        .map(|x| {
            let levels = (0..k_bound)
                .map(|k| {
                    let ball = h.closure(phi[x], k)?;
                    let m: Vec<usize> = (0..n).filter(|&z| poset.leq(z, x) && ball.contains(phi[z])).collect();
                    let blocks = m
                        .iter()
                        .filter_map(|&z| a_block(h, phi[z], k + 1).transpose())
                        .collect::<Result<Vec<_>>>()?;
                    Ok(RepLevel { k, m, blocks })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RepSet { x, phi: phi[x], levels })
        })
        .collect()
}

/// `f_α(k, s, i, j)` of the coherent family, defined for `α ≥ ω` on
/// `T_α = {(k, s, i, j) : Ξ_α(k) ≥ 0, s < k, i, j < r_k}`.
pub fn coherent_family_eval(h: &SchemeHandle, alpha: Ordinal, point: (usize, u64, u64, u64)) -> Result<Ordinal> {
    require_two_type(h)?;
    if alpha.is_finite() {
        return Err(Error::BadOrder(format!("{alpha} >= w")));
    }
    let (k, s, i, j) = point;
    if k == 0 {
        return Err(Error::OutOfDomain);
    }
    let r = h.ty().r(k)?;
    if s >= k as u64 || i >= r || j >= r {
        return Err(Error::OutOfDomain);
    }
    let pos = match h.xi(alpha, k)? {
        0 => i,
        1 => j,
        _ => return Err(Error::OutOfDomain),
    };
    h.closure(alpha, k)?.get(pos).ok_or(Error::OutOfDomain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::rho;
    use crate::type_system::tau2;

    fn h() -> SchemeHandle {
        SchemeHandle::omega(&tau2())
    }

    #[test]
    fn a_block_examples() {
        let h = h();
        let a35 = a_block(&h, Ordinal::fin(5), 3).unwrap().unwrap();
        assert_eq!(
            a35,
            LuzinBlock {
                k: 3,
                a: (0, 3),
                b: (15, 18)
            }
        );
        let a32 = a_block(&h, Ordinal::fin(2), 3).unwrap().unwrap();
        assert_eq!(
            a32,
            LuzinBlock {
                k: 3,
                a: (2, 3),
                b: (9, 18)
            }
        );
        assert!(a35.is_subset(&n_block(h.ty(), 3).unwrap()));
    }

    #[test]
    fn separator_contains_closure_blocks() {
        let h = h();
        let c5 = jones_separator(&h, Ordinal::fin(5), 6).unwrap();
        assert!(h.closure(Ordinal::fin(5), 3).unwrap().contains(Ordinal::fin(2)));
        let a42 = a_block(&h, Ordinal::fin(2), 4).unwrap().unwrap();
        assert!(c5.covers(&a42));
    }

    #[test]
    fn luzin_pair_meets_in_at_least_rho_points() {
        let h = h();
        for b in 1..10u64 {
            for a in 0..b {
                let (a, b) = (Ordinal::fin(a), Ordinal::fin(b));
                let fa = luzin_family(&h, a, 6).unwrap();
                let fb = luzin_family(&h, b, 6).unwrap();
                let common = fa.intersection(&fb);
                let r = rho(&h, a, b).unwrap();
                assert!(common.iter().map(LuzinBlock::size).sum::<u64>() >= r as u64);
                assert!(common.iter().all(|blk| blk.k <= r));
            }
        }
    }

    #[test]
    fn representation_of_an_antichain_uses_only_itself() {
        let h = h();
        let phi = [Ordinal::fin(2), Ordinal::fin(5)];
        let rep = luzin_representation(&h, &FinitePoset::antichain(2), &phi, 5).unwrap();
        for set in &rep {
            assert!(set.levels.iter().all(|l| l.m == vec![set.x]));
        }
    }

    #[test]
    fn representation_rejects_order_reversal() {
        let h = h();
        let poset = FinitePoset::from_relations(2, &[(0, 1)]).unwrap();
        let phi = [Ordinal::fin(5), Ordinal::fin(2)];
        assert!(matches!(
            luzin_representation(&h, &poset, &phi, 3),
            Err(Error::NotAnEmbedding(_))
        ));
        assert!(FinitePoset::from_relations(2, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn coherent_family_rejects_points_outside_the_tower() {
        let h = h();
        assert!(coherent_family_eval(&h, Ordinal::fin(3), (2, 0, 0, 0)).is_err());
    }
}
