use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::handle::SchemeHandle;
use super::level_iter;
use super::ord::{FinOrdSet, Ordinal};
use super::runs::RunSet;
use crate::error::{Error, Result};
use crate::type_system::{TypeDescriptor, TypeSpec};

/// On-disk form of a fragment: every member below `bound`, by level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentFile {
    #[serde(rename = "type")]
    pub ty: TypeDescriptor,
    pub bound: u64,
    pub levels: BTreeMap<usize, Vec<FinOrdSet>>,
}

/// A finite piece of a scheme over ω, queried by lookup.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub ty: TypeSpec,
    pub bound: u64,
    levels: Vec<Vec<RunSet>>,
    index: Vec<HashMap<Ordinal, usize>>,
}

impl Fragment {
    pub fn from_file(file: &FragmentFile) -> Result<Fragment> {
        let ty = TypeSpec::from_descriptor(&file.ty)?;
        let top = file.levels.keys().next_back().copied().unwrap_or(0);
        let mut levels = vec![Vec::new(); top + 1];
        let mut index = vec![HashMap::new(); top + 1];
        for (&k, members) in &file.levels {
            for (j, m) in members.iter().enumerate() {
                if m.len() as u64 != ty.m(k)? {
                    return Err(Error::Parse(format!("member {m} has the wrong size for level {k}")));
                }
                for &x in m {
                    index[k].entry(x).or_insert(j);
                }
                levels[k].push(RunSet::from_set(m));
            }
        }
        Ok(Fragment {
            ty,
            bound: file.bound,
            levels,
            index,
        })
    }

    fn member(&self, a: Ordinal, k: usize) -> Result<&RunSet> {
        self.index
            .get(k)
            .and_then(|ix| ix.get(&a))
            .map(|&j| &self.levels[k][j])
            .ok_or(Error::OutsideFragment { alpha: a, level: k })
    }

    pub fn norm(&self, a: Ordinal, k: usize) -> Result<u64> {
        Ok(self.member(a, k)?.rank(a))
    }

    pub fn closure(&self, a: Ordinal, k: usize) -> Result<RunSet> {
        let m = self.member(a, k)?;
        Ok(m.take(m.rank(a) + 1))
    }

    pub fn member_containing(&self, a: Ordinal, k: usize) -> Result<RunSet> {
        self.member(a, k).cloned()
    }

    pub fn common_level(&self, a: Ordinal, b: Ordinal) -> Result<usize> {
        (0..self.levels.len())
            .find(|&k| self.member(a, k).is_ok_and(|m| m.contains(b)))
            .ok_or(Error::OutsideFragment {
                alpha: a.max(b),
                level: self.levels.len(),
            })
    }

    pub fn top_level(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }
}

/// Collects every member contained in `[0, bound)` of an ω-handle.
pub fn export_fragment(h: &SchemeHandle, bound: u64) -> Result<FragmentFile> {
    let t = h.ty();
    let mut levels = BTreeMap::new();
    let mut k = 0;
    while t.m_opt(k)?.is_some_and(|m| m <= bound) {
        let members = level_iter(h, k, Ordinal::fin(bound))?.collect::<Result<Vec<_>>>()?;
        levels.insert(k, members);
        k += 1;
    }
    Ok(FragmentFile {
        ty: t.descriptor().clone(),
        bound,
        levels,
    })
}

pub fn fragment_to_json(f: &FragmentFile) -> Result<String> {
    Ok(serde_json::to_string(f)?)
}

pub fn import_fragment(json: &str) -> Result<SchemeHandle> {
    let file: FragmentFile = serde_json::from_str(json)?;
    Ok(SchemeHandle::from_fragment(Fragment::from_file(&file)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    #[test]
    fn round_trip_preserves_answers() {
        let h = SchemeHandle::omega(&tau2());
        let file = export_fragment(&h, 20).unwrap();
        let json = fragment_to_json(&file).unwrap();
        let g = import_fragment(&json).unwrap();
        for a in 0..20u64 {
            for k in 0..5 {
                if let Ok(c) = g.closure(Ordinal::fin(a), k) {
                    assert_eq!(c, h.closure(Ordinal::fin(a), k).unwrap());
                }
            }
        }
        assert_eq!(fragment_to_json(&export_fragment(&g, 20).unwrap()).unwrap(), json);
    }
}
