use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::rho;
use crate::scheme_core::{Ordinal, SchemeHandle};

/// A function on `β + 1` that equals `ρ_β` outside a finite patch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub beta: Ordinal,
    pub patch: BTreeMap<Ordinal, u64>,
}

impl TreeNode {
    pub fn value(&self, h: &SchemeHandle, xi: Ordinal) -> Result<u64> {
        if xi > self.beta {
            return Err(Error::OutOfDomain);
        }
        match self.patch.get(&xi) {
            Some(&v) => Ok(v),
            None => Ok(rho(h, xi, self.beta)? as u64),
        }
    }

    /// `self ⊆ other` as functions. Both domains must be finite.
    pub fn is_subset(&self, h: &SchemeHandle, other: &TreeNode) -> Result<bool> {
        let Some(top) = self.beta.as_fin() else {
            return Err(Error::DomainExceeded(self.beta));
        };
        if self.beta > other.beta {
            return Ok(false);
        }
        for i in 0..=top {
            if self.value(h, Ordinal::fin(i))? != other.value(h, Ordinal::fin(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn comparable(&self, h: &SchemeHandle, other: &TreeNode) -> Result<bool> {
        Ok(self.is_subset(h, other)? || other.is_subset(h, self)?)
    }
}

/// A node of the tree; the patch support must lie in `β + 1`.
pub fn aronszajn_node(h: &SchemeHandle, beta: Ordinal, patch: BTreeMap<Ordinal, u64>) -> Result<TreeNode> {
    h.check(beta)?;
    if let Some((&xi, _)) = patch.iter().next_back().filter(|(&xi, _)| xi > beta) {
        return Err(Error::BadOrder(format!("patch point {xi} <= {beta}")));
    }
    Ok(TreeNode { beta, patch })
}

/// `(k_f, s)`: the least `k` such that the node agrees with `ρ_β` off
/// `(β)_k` and is bounded by `k` on `(β)_k`, and `s = ‖β‖_{k_f}`.
pub fn aronszajn_classify(h: &SchemeHandle, node: &TreeNode) -> Result<(usize, u64)> {
    let mut entries = Vec::with_capacity(node.patch.len());
    for (&xi, &v) in &node.patch {
        entries.push((rho(h, xi, node.beta)?, v));
    }
    let top = entries.iter().map(|&(r, v)| r.max(v as usize)).max().unwrap_or(0);
    let k = (0..=top)
        .find(|&k| {
            entries
                .iter()
                .all(|&(r, v)| if r <= k { v as usize <= k } else { v as usize == r })
        })
        .expect("the bound satisfies both conditions");
    Ok((k, h.norm(node.beta, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    #[test]
    fn examples() {
        let h = SchemeHandle::omega(&tau2());
        let plain = aronszajn_node(&h, Ordinal::fin(5), BTreeMap::new()).unwrap();
        assert_eq!(aronszajn_classify(&h, &plain).unwrap(), (0, 0));
        let patched = aronszajn_node(&h, Ordinal::fin(5), BTreeMap::from([(Ordinal::fin(0), 7)])).unwrap();
        assert_eq!(aronszajn_classify(&h, &patched).unwrap(), (7, 5));
        let other = aronszajn_node(&h, Ordinal::fin(4), BTreeMap::new()).unwrap();
        assert!(!plain.comparable(&h, &other).unwrap());
        assert!(aronszajn_node(&h, Ordinal::fin(2), BTreeMap::from([(Ordinal::fin(3), 1)])).is_err());
    }

    #[test]
    fn patch_equal_to_rho_changes_nothing() {
        let h = SchemeHandle::omega(&tau2());
        let r = rho(&h, Ordinal::fin(0), Ordinal::fin(5)).unwrap() as u64;
        let node = aronszajn_node(&h, Ordinal::fin(5), BTreeMap::from([(Ordinal::fin(0), r)])).unwrap();
        assert_eq!(aronszajn_classify(&h, &node).unwrap(), (0, 0));
    }
}
