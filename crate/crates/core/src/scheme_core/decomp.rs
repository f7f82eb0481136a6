use std::cmp::Reverse;
use std::collections::BTreeSet;

use serde::Serialize;

use super::ord::{FinOrdSet, Ordinal};
use super::runs::RunSet;
use crate::error::{Error, Result};
use crate::type_system::TypeSpec;

/// Canonical decomposition `⟨F_i : i < n_k⟩` of a level-`k` set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompRecord {
    pub level: usize,
    pub pieces: Vec<FinOrdSet>,
    pub root: FinOrdSet,
}

/// Splits `F` with `|F| = m_k`, `k ≥ 1`, into its `n_k` pieces:
/// `F_i = F[r_k] ∪ F[[a_i, a_{i+1})]` with `a_i = r_k + i·(m_{k-1} − r_k)`.
pub fn canonical_decomposition(f: &FinOrdSet, t: &TypeSpec) -> Result<DecompRecord> {
    let card = f.len() as u64;
    let k = match t.level_of_card(card)? {
        Some(k) if k >= 1 => k,
        _ => return Err(Error::NotALevelCardinality(card)),
    };
    let runs = RunSet::from_set(f);
    let pieces = decompose_runs(&runs, t, k)?.iter().map(RunSet::to_set).collect();
    let root = FinOrdSet::from_sorted(f.as_slice()[..t.r(k)? as usize].to_vec());
    Ok(DecompRecord { level: k, pieces, root })
}

/// Pieces of a level-`k` set given as runs.
pub fn decompose_runs(f: &RunSet, t: &TypeSpec, k: usize) -> Result<Vec<RunSet>> {
    let n = t.n(k)?;
    (0..n).map(|i| piece_runs(f, t, k, i)).collect()
}

/// The `i`-th piece of a level-`k` set given as runs.
pub fn piece_runs(f: &RunSet, t: &TypeSpec, k: usize, i: u64) -> Result<RunSet> {
    let r = t.r(k)?;
    let width = t.m(k - 1)? - r;
    let a = r + i * width;
    let mut p = f.take(r);
    p.extend(&f.slice(a, a + width));
    Ok(p)
}

/// Enumerates `F(X)` for `|X| = m_k`: level-descending, then lexicographic.
pub fn unique_finite_scheme(x: &FinOrdSet, t: &TypeSpec) -> Result<std::vec::IntoIter<FinOrdSet>> {
    let card = x.len() as u64;
    let k = t.level_of_card(card)?.ok_or(Error::NotALevelCardinality(card))?;
    let mut acc = BTreeSet::new();
    collect(x, k, t, &mut acc)?;
    Ok(acc
        .into_iter()
        .map(|(_, s)| FinOrdSet::from_sorted(s))
        .collect::<Vec<_>>()
        .into_iter())
}

/// `F(X)` grouped as `(level, member)`, in the same order.
pub fn unique_finite_scheme_levels(x: &FinOrdSet, t: &TypeSpec) -> Result<Vec<(usize, FinOrdSet)>> {
    let card = x.len() as u64;
    let k = t.level_of_card(card)?.ok_or(Error::NotALevelCardinality(card))?;
    let mut acc = BTreeSet::new();
    collect(x, k, t, &mut acc)?;
    Ok(acc
        .into_iter()
        .map(|(Reverse(l), s)| (l, FinOrdSet::from_sorted(s)))
        .collect())
}

fn collect(x: &FinOrdSet, k: usize, t: &TypeSpec, acc: &mut BTreeSet<(Reverse<usize>, Vec<Ordinal>)>) -> Result<()> {
    if !acc.insert((Reverse(k), x.as_slice().to_vec())) || k == 0 {
        return Ok(());
    }
    let runs = RunSet::from_set(x);
    for piece in decompose_runs(&runs, t, k)? {
        collect(&piece.to_set(), k - 1, t, acc)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    fn nat(v: &[u64]) -> FinOrdSet {
        FinOrdSet::nat(v.iter().copied())
    }

    #[test]
    fn decomposition_of_level_three() {
        let d = canonical_decomposition(&nat(&[0, 1, 2, 3, 4, 5]), &tau2()).unwrap();
        assert_eq!(d.level, 3);
        assert_eq!(d.pieces, vec![nat(&[0, 1, 2]), nat(&[3, 4, 5])]);
        assert!(d.root.is_empty());
    }

    #[test]
    fn decomposition_of_level_two_has_root() {
        let d = canonical_decomposition(&nat(&[0, 1, 2]), &tau2()).unwrap();
        assert_eq!(d.pieces, vec![nat(&[0, 1]), nat(&[0, 2])]);
        assert_eq!(d.root, nat(&[0]));
    }

    #[test]
    fn four_elements_is_not_a_level() {
        assert_eq!(
            canonical_decomposition(&nat(&[0, 1, 2, 3]), &tau2()),
            Err(Error::NotALevelCardinality(4))
        );
        assert!(unique_finite_scheme(&nat(&[0, 1, 2, 3]), &tau2()).is_err());
    }

    #[test]
    fn finite_scheme_over_three_points() {
        let got: Vec<_> = unique_finite_scheme(&nat(&[0, 1, 2]), &tau2()).unwrap().collect();
        let want = vec![
            nat(&[0, 1, 2]),
            nat(&[0, 1]),
            nat(&[0, 2]),
            nat(&[0]),
            nat(&[1]),
            nat(&[2]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn finite_scheme_over_a_singleton() {
        let got: Vec<_> = unique_finite_scheme(&nat(&[7]), &tau2()).unwrap().collect();
        assert_eq!(got, vec![nat(&[7])]);
    }
}
