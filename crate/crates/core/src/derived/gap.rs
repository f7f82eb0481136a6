use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::rho;
use crate::scheme_core::{Ordinal, SchemeHandle};

/// `L_α` and `R_α` cut to `[0, window)` with `window = 2K + 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapFragment {
    pub alpha: Ordinal,
    pub k_bound: usize,
    pub window: u64,
    pub left: BTreeSet<u64>,
    pub right: BTreeSet<u64>,
}

/// `L_α = {2k + Ξ_α(k)}` and `R_α = {2k + 1 − Ξ_α(k)}` over `1 ≤ k ≤ K`
/// with `Ξ_α(k) ≥ 0`. With a mask, only levels in the mask contribute.
pub fn hausdorff_gap(
    h: &SchemeHandle,
    alpha: Ordinal,
    k_bound: usize,
    mask: Option<&BTreeSet<usize>>,
) -> Result<GapFragment> {
    if !h.ty().is_two_type() {
        return Err(Error::NotATwoType);
    }
    h.check(alpha)?;
    let mut left = BTreeSet::new();
    let mut right = BTreeSet::new();
    for k in 1..=k_bound {
        if mask.is_some_and(|m| !m.contains(&k)) {
            continue;
        }
        let xi = h.xi(alpha, k)?;
        if xi >= 0 {
            let (k, xi) = (k as u64, xi as u64);
            left.insert(2 * k + xi);
            right.insert(2 * k + 1 - xi);
        }
    }
    Ok(GapFragment {
        alpha,
        k_bound,
        window: 2 * k_bound as u64 + 2,
        left,
        right,
    })
}

/// Intersections and differences of the gap sets of `α < β`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapPairData {
    pub alpha: Ordinal,
    pub beta: Ordinal,
    pub rho: usize,
    pub l_alpha_r_beta: BTreeSet<u64>,
    pub l_beta_r_alpha: BTreeSet<u64>,
    pub l_diff: BTreeSet<u64>,
    pub r_diff: BTreeSet<u64>,
    pub chi0: bool,
    pub chi1: bool,
    /// True when `K ≥ ρ(α, β)`, so all four sets are complete.
    pub exact: bool,
}

pub fn gap_pair_data(h: &SchemeHandle, a: Ordinal, b: Ordinal, k_bound: usize) -> Result<GapPairData> {
    if a >= b {
        return Err(Error::BadOrder(format!("{a} < {b}")));
    }
    let ga = hausdorff_gap(h, a, k_bound, None)?;
    let gb = hausdorff_gap(h, b, k_bound, None)?;
    let l_alpha_r_beta: BTreeSet<u64> = ga.left.intersection(&gb.right).copied().collect();
    let l_beta_r_alpha: BTreeSet<u64> = gb.left.intersection(&ga.right).copied().collect();
    let lefts: BTreeSet<u64> = ga.left.union(&gb.left).copied().collect();
    let rights: BTreeSet<u64> = ga.right.union(&gb.right).copied().collect();
    let rho = rho(h, a, b)?;
    Ok(GapPairData {
        alpha: a,
        beta: b,
        rho,
        chi0: lefts.is_disjoint(&rights),
        chi1: !l_alpha_r_beta.is_empty() || !l_beta_r_alpha.is_empty(),
        l_alpha_r_beta,
        l_beta_r_alpha,
        l_diff: ga.left.difference(&gb.left).copied().collect(),
        r_diff: ga.right.difference(&gb.right).copied().collect(),
        exact: k_bound >= rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::{tau2, tau4};

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn gap_examples() {
        let h = SchemeHandle::omega(&tau2());
        let g5 = hausdorff_gap(&h, Ordinal::fin(5), 3, None).unwrap();
        assert_eq!((g5.left.clone(), g5.right.clone()), (set(&[3, 5, 7]), set(&[2, 4, 6])));
        let g2 = hausdorff_gap(&h, Ordinal::fin(2), 3, None).unwrap();
        assert_eq!((g2.left, g2.right), (set(&[3, 5, 6]), set(&[2, 4, 7])));
        assert!(g5.left.is_disjoint(&g5.right));
        let masked = hausdorff_gap(&h, Ordinal::fin(5), 3, Some(&BTreeSet::from([2]))).unwrap();
        assert_eq!((masked.left, masked.right), (set(&[5]), set(&[4])));
    }

    #[test]
    fn pair_examples() {
        let h = SchemeHandle::omega(&tau2());
        let d = gap_pair_data(&h, Ordinal::fin(2), Ordinal::fin(5), 3).unwrap();
        assert_eq!(d.l_alpha_r_beta, set(&[6]));
        assert_eq!(d.l_beta_r_alpha, set(&[7]));
        assert!(d.l_beta_r_alpha.contains(&(2 * d.rho as u64 + 1)));
        assert!(d.chi1 && d.exact);
        assert!(!gap_pair_data(&h, Ordinal::fin(2), Ordinal::fin(5), 2).unwrap().exact);
        assert!(matches!(
            gap_pair_data(&h, Ordinal::fin(2), Ordinal::fin(2), 3),
            Err(Error::BadOrder(_))
        ));
    }

    #[test]
    fn four_type_is_rejected() {
        let h = SchemeHandle::omega(&tau4());
        assert_eq!(hausdorff_gap(&h, Ordinal::fin(1), 2, None), Err(Error::NotATwoType));
    }
}
