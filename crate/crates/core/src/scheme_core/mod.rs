//! Finite schemes, the scheme over ω, and the closure oracle.

mod decomp;
mod export;
mod handle;
pub mod omega;
mod ord;
mod runs;

pub use decomp::{
    canonical_decomposition, decompose_runs, piece_runs, unique_finite_scheme, unique_finite_scheme_levels,
    DecompRecord,
};
pub use export::{export_fragment, fragment_to_json, import_fragment, Fragment, FragmentFile};
pub use handle::{omega_scheme, Domain, SchemeHandle, IH1_SEARCH_CAP};
pub use ord::{FinOrdSet, Ordinal};
pub use runs::{Run, RunSet};

use crate::error::{Error, Result};

/// True iff `|F| = m_k` and `F = (max F)_k`.
pub fn is_member(h: &SchemeHandle, f: &FinOrdSet) -> Result<bool> {
    is_member_runs(h, &RunSet::from_set(f))
}

/// [`is_member`] for sets given as runs.
pub fn is_member_runs(h: &SchemeHandle, f: &RunSet) -> Result<bool> {
    let Some(max) = f.max() else { return Ok(false) };
    h.check(max)?;
    match h.ty().level_of_card(f.len())? {
        Some(k) => Ok(h.closure(max, k)? == *f),
        None => Ok(false),
    }
}

/// The level of a member, or `None` when `F` is not one.
pub fn member_level(h: &SchemeHandle, f: &RunSet) -> Result<Option<usize>> {
    if !is_member_runs(h, f)? {
        return Ok(None);
    }
    h.ty().level_of_card(f.len())
}

/// All `F ∈ F_k` with `F ⊆ [0, bound)`, ascending by max. The iterator is
/// infinite when `bound` exceeds ω.
pub fn level_iter(h: &SchemeHandle, k: usize, bound: Ordinal) -> Result<impl Iterator<Item = Result<FinOrdSet>> + '_> {
    if bound > h.limit() {
        return Err(Error::DomainExceeded(bound));
    }
    let m = h.ty().m_opt(k)?;
    let points = (0..=bound.q).flat_map(move |q| {
        let end = if q == bound.q { bound.i } else { u64::MAX };
        (0..end).map(move |i| Ordinal::new(q, i))
    });
    Ok(points.filter_map(move |a| {
        let m = m?;
        match h.norm(a, k) {
            Ok(p) if p + 1 == m => Some(h.closure_set(a, k)),
            Ok(_) | Err(Error::OutsideFragment { .. }) => None,
            Err(e) => Some(Err(e)),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    fn nat(v: &[u64]) -> FinOrdSet {
        FinOrdSet::nat(v.iter().copied())
    }

    #[test]
    fn membership_examples() {
        let h = SchemeHandle::omega(&tau2());
        assert!(is_member(&h, &nat(&[0, 1, 2])).unwrap());
        assert!(is_member(&h, &nat(&[3, 5])).unwrap());
        assert!(!is_member(&h, &nat(&[1, 2])).unwrap());
        assert!(is_member(&h, &nat(&[3, 4, 5])).unwrap());
        assert!(!is_member(&h, &nat(&[2, 3])).unwrap());
        assert!(is_member(&h, &nat(&[0])).unwrap());
        let far = FinOrdSet::from(vec![Ordinal::new(1, 0)]);
        assert!(matches!(is_member(&h, &far), Err(Error::DomainExceeded(_))));
    }

    #[test]
    fn level_iteration_examples() {
        let h = SchemeHandle::omega(&tau2());
        let six = Ordinal::fin(6);
        let l1: Vec<_> = level_iter(&h, 1, six).unwrap().map(Result::unwrap).collect();
        assert_eq!(l1, vec![nat(&[0, 1]), nat(&[0, 2]), nat(&[3, 4]), nat(&[3, 5])]);
        let l3: Vec<_> = level_iter(&h, 3, six).unwrap().map(Result::unwrap).collect();
        assert_eq!(l3, vec![nat(&[0, 1, 2, 3, 4, 5])]);
        assert_eq!(level_iter(&h, 5, six).unwrap().count(), 0);
    }
}
