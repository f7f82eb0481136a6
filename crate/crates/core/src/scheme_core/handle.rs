use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;

use super::export::Fragment;
use super::omega;
use super::ord::{FinOrdSet, Ordinal};
use super::runs::RunSet;
use crate::error::{Error, Result};
use crate::extension::Extension;
use crate::type_system::TypeSpec;

/// Where a handle's ordinals live.
#[derive(Clone)]
pub enum Domain {
    /// The unique scheme over ω.
    Omega,
    /// A scheme over `γ + ω` grown by a deterministic chain of conditions.
    Extension(Arc<Extension>),
    /// Members imported from an exported fragment.
    Fragment(Arc<Fragment>),
}

struct Inner {
    ty: TypeSpec,
    domain: Domain,
    fault: Option<usize>,
    norms: RwLock<HashMap<u64, Arc<Vec<u64>>>>,
}

/// A scheme exposed as a closure oracle `(α, k) ↦ (α)_k`.
///
/// Cloning is cheap and clones share the memo store.
#[derive(Clone)]
pub struct SchemeHandle {
    inner: Arc<Inner>,
}

impl fmt::Debug for SchemeHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.inner.domain {
            Domain::Omega => "omega",
            Domain::Extension(_) => "extension",
            Domain::Fragment(_) => "fragment",
        };
        f.debug_struct("SchemeHandle")
            .field("type", &self.inner.ty)
            .field("domain", &kind)
            .finish()
    }
}

/// The scheme over ω for `t`.
pub fn omega_scheme(t: &TypeSpec) -> SchemeHandle {
    SchemeHandle::new(t.clone(), Domain::Omega, None)
}

impl SchemeHandle {
    pub(crate) fn new(ty: TypeSpec, domain: Domain, fault: Option<usize>) -> Self {
        SchemeHandle {
            inner: Arc::new(Inner {
                ty,
                domain,
                fault,
                norms: RwLock::new(HashMap::new()),
            }),
        }
    }

    pub fn omega(t: &TypeSpec) -> Self {
        omega_scheme(t)
    }

    /// A deliberately broken ω-oracle whose closures use the wrong piece at
    /// `level`. Only useful for exercising the check harness.
    pub fn omega_with_fault(t: &TypeSpec, level: usize) -> Self {
        SchemeHandle::new(t.clone(), Domain::Omega, Some(level))
    }

    pub fn from_fragment(fragment: Fragment) -> Self {
        let ty = fragment.ty.clone();
        SchemeHandle::new(ty, Domain::Fragment(Arc::new(fragment)), None)
    }

    pub fn ty(&self) -> &TypeSpec {
        &self.inner.ty
    }

    pub fn domain(&self) -> &Domain {
        &self.inner.domain
    }

    pub fn is_omega(&self) -> bool {
        matches!(self.inner.domain, Domain::Omega)
    }

    pub fn extension(&self) -> Option<&Arc<Extension>> {
        match &self.inner.domain {
            Domain::Extension(e) => Some(e),
            _ => None,
        }
    }

    /// The least ordinal outside the domain.
    pub fn limit(&self) -> Ordinal {
        match &self.inner.domain {
            Domain::Omega => Ordinal::omega_times(1),
            Domain::Extension(e) => Ordinal::omega_times(e.gamma().q + 1),
            Domain::Fragment(f) => Ordinal::fin(f.bound),
        }
    }

    pub fn in_domain(&self, a: Ordinal) -> bool {
        a < self.limit()
    }

    pub fn check(&self, a: Ordinal) -> Result<()> {
        if self.in_domain(a) {
            Ok(())
        } else {
            Err(Error::DomainExceeded(a))
        }
    }

    /// Memoized `(‖x‖_j)_{j ≤ K}` for a natural number `x` in the ω-scheme.
    fn omega_norms(&self, x: u64) -> Result<Arc<Vec<u64>>> {
        if let Some(v) = self.inner.norms.read().get(&x) {
            return Ok(v.clone());
        }
        let v = Arc::new(omega::norms(&self.inner.ty, x)?);
        self.inner.norms.write().insert(x, v.clone());
        Ok(v)
    }

    /// `‖α‖_k = |(α)_k| − 1`.
    pub fn norm(&self, a: Ordinal, k: usize) -> Result<u64> {
        self.check(a)?;
        match &self.inner.domain {
            Domain::Omega if self.inner.fault.is_some() => Ok(self.closure(a, k)?.len() - 1),
            Domain::Omega => Ok(self.omega_norms(a.i)?.get(k).copied().unwrap_or(a.i)),
            Domain::Extension(e) => e.norm(a, k),
            Domain::Fragment(f) => f.norm(a, k),
        }
    }

    /// `Ξ_α(k)`: `−1` when `α` is in the root of a level-`k` member, else
    /// the index of the piece holding it. `Ξ_α(0) = 0`.
    pub fn xi(&self, a: Ordinal, k: usize) -> Result<i64> {
        if k == 0 {
            self.check(a)?;
            return Ok(0);
        }
        omega::xi_from_norm(&self.inner.ty, k, self.norm(a, k)?)
    }

    /// `(α)_k` as runs.
    pub fn closure(&self, a: Ordinal, k: usize) -> Result<RunSet> {
        self.check(a)?;
        match &self.inner.domain {
            Domain::Omega => omega::closure(&self.inner.ty, a.i, k, self.inner.fault),
            Domain::Extension(e) => e.closure(a, k),
            Domain::Fragment(f) => f.closure(a, k),
        }
    }

    /// `(α)_k` materialized.
    pub fn closure_set(&self, a: Ordinal, k: usize) -> Result<FinOrdSet> {
        Ok(self.closure(a, k)?.to_set())
    }

    /// Some level-`l` member containing `α`.
    pub fn member_containing(&self, a: Ordinal, l: usize) -> Result<RunSet> {
        self.check(a)?;
        match &self.inner.domain {
            Domain::Omega => omega::interval_member(&self.inner.ty, a.i, l),
            Domain::Extension(e) => e.member_containing(a, l),
            Domain::Fragment(f) => f.member_containing(a, l),
        }
    }

    /// A level at which `α` and `β` lie in a common member.
    pub fn common_level(&self, a: Ordinal, b: Ordinal) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        match &self.inner.domain {
            Domain::Omega => self.inner.ty.level_above(a.i.max(b.i)),
            Domain::Extension(e) => e.common_level(a, b),
            Domain::Fragment(f) => f.common_level(a, b),
        }
    }

    /// A member `F` with `A ⊆ F_0` and `R(F) = F ∩ α`, found by search.
    pub fn ih1_search(&self, a: Ordinal, set: &RunSet) -> Result<RunSet> {
        match &self.inner.domain {
            Domain::Omega => omega_ih1_search(&self.inner.ty, a, set),
            Domain::Extension(e) => e.ih1_for_ground(a, set),
            Domain::Fragment(_) => Err(Error::NoWitnessInSchedule(0)),
        }
    }
}

/// Highest level tried when searching for IH₁ witnesses.
pub const IH1_SEARCH_CAP: usize = 256;

fn omega_ih1_search(t: &TypeSpec, a: Ordinal, set: &RunSet) -> Result<RunSet> {
    let x = set.max().map_or(a.i, |m| m.i.max(a.i));
    if a.q != 0 || set.max().is_some_and(|m| m.q != 0) {
        return Err(Error::DomainExceeded(a));
    }
    for l in 1..=IH1_SEARCH_CAP {
        if t.m_opt(l)?.is_none() {
            return Err(Error::NoWitnessInSchedule(l));
        }
        let g = omega::interval_member(t, x, l)?;
        let first = g.take(t.m(l - 1)?);
        if !set.is_subset(&first) {
            continue;
        }
        if g.rank(a) == t.r(l)? {
            return Ok(g);
        }
    }
    Err(Error::NoWitnessInSchedule(IH1_SEARCH_CAP))
}
