//! The forcing `P(F)` and deterministic extension of a scheme from `γ` to `γ + ω`.
//!
//! Conditions are finite `p ⊆ γ + ω` with `|p| = m_k`, `p ∩ γ` a `k`-closure
//! of the ground scheme and `p ∖ γ` an initial segment of `[γ, γ + ω)`.
//! `p ≤ q` iff `q ∈ F(p)`, where `F(p)` is the copy of `F(m_k)` carried by
//! the increasing enumeration of `p`.
//!
//! The chain never picks conditions generically. Every step has the shape
//! `Cut_c(G)` for a ground member `G ∋ c` whose level is at least that of the
//! current tip `q`, where the cut point `c` satisfies `(c)_{k_q} ∖ {c} = q ∩ γ`.
//! Such a cut is always below `q`. The cut point stays fixed while the chain
//! only needs ground points below it or new points; reaching a ground point
//! above it moves the cut through an IH₁ witness.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::rho;
use crate::scheme_core::{is_member_runs, member_level, omega, FinOrdSet, Ordinal, RunSet, SchemeHandle};
use crate::type_system::{TypeDescriptor, TypeSpec};

/// Default fuel: appended conditions per chain.
pub const DEFAULT_FUEL: u64 = 10_000;

/// Offset of the default initial cut point inside the last ground block.
pub const DEFAULT_CUT_OFFSET: u64 = 16;

/// A dense-set request served by the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Request {
    /// Meet `D′_α`: the tip contains `α`.
    Contain(Ordinal),
    /// Meet `D_F`: `F` becomes a member of `F(tip)`.
    IncludeF(FinOrdSet),
    /// Meet `E_{α,A}`: `α ∈ p`, `A ⊆ p_0` and `α ∩ p = R(p)`.
    Ih1 { alpha: Ordinal, set: FinOrdSet },
}

/// An element of `P(F)` with its level cached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub set: RunSet,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendOptions {
    pub fuel: u64,
    /// First cut point; ground points below it are reachable without moving it.
    pub initial_cut: Option<Ordinal>,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions {
            fuel: DEFAULT_FUEL,
            initial_cut: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct ChainState {
    conds: Vec<Condition>,
    cut: Option<Ordinal>,
    log: Vec<Request>,
}

/// Chain state of one extension, shared by all handles over it.
pub struct Extension {
    ground: SchemeHandle,
    gamma: Ordinal,
    initial_cut: Ordinal,
    fuel: u64,
    frozen: bool,
    ground_log: Option<ChainLog>,
    state: Mutex<ChainState>,
    norms: RwLock<HashMap<(Ordinal, usize), u64>>,
}

/// Replayable record of a chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLog {
    #[serde(rename = "type")]
    pub ty: TypeDescriptor,
    pub gamma: Ordinal,
    pub initial_cut: Ordinal,
    pub fuel: u64,
    /// The ground chain as it stood when this extension was created.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<Box<ChainLog>>,
    pub requests: Vec<Request>,
    pub conditions: Vec<Condition>,
}

/// `red_δ(p) = (p ∩ δ) ∪ [max(p ∩ δ) + 1, max(p ∩ δ) + 1 + |p ∖ δ|)`, or
/// `|p|` when `p ∩ δ = ∅`.
pub fn red(p: &FinOrdSet, delta: Ordinal) -> FinOrdSet {
    let low = p.below(delta);
    let extra = (p.len() - low.len()) as u64;
    match low.max() {
        None => FinOrdSet::interval(Ordinal::ZERO, p.len() as u64),
        Some(m) => low.union(&FinOrdSet::interval(m.succ(), extra)),
    }
}

/// `Cut_α(F) = (F ∩ α) ∪ [γ, γ + |F ∖ α|)` on runs.
pub fn cut_runs(f: &RunSet, a: Ordinal, gamma: Ordinal) -> RunSet {
    let mut out = f.below(a);
    out.push_run(gamma, f.len() - out.len());
    out
}

/// `Cut_α(F)` for a ground member `F`.
pub fn cut(ground: &SchemeHandle, f: &FinOrdSet, a: Ordinal, gamma: Ordinal) -> Result<FinOrdSet> {
    let runs = RunSet::from_set(f);
    if !is_member_runs(ground, &runs)? {
        return Err(Error::NotAMember(f.to_string()));
    }
    Ok(cut_runs(&runs, a, gamma).to_set())
}

/// Checks the three clauses defining conditions of `P(F)` over `γ`.
pub fn is_condition_runs(ground: &SchemeHandle, gamma: Ordinal, p: &RunSet) -> Result<bool> {
    if p.is_empty() {
        return Ok(true);
    }
    let t = ground.ty();
    let Some(k) = t.level_of_card(p.len())? else {
        return Ok(false);
    };
    let low = p.below(gamma);
    let high = p.slice(low.len(), p.len());
    if high.max().is_some_and(|m| m.q != gamma.q) {
        return Err(Error::DomainExceeded(high.max().unwrap_or(gamma)));
    }
    if !high.is_empty() && high != RunSet::interval(gamma, high.len()) {
        return Ok(false);
    }
    match low.max() {
        None => Ok(true),
        Some(a) => Ok(ground.closure(a, k)? == low),
    }
}

pub fn is_condition(ground: &SchemeHandle, gamma: Ordinal, p: &FinOrdSet) -> Result<bool> {
    is_condition_runs(ground, gamma, &RunSet::from_set(p))
}

/// `p ≤ q` iff `q = ∅` or `q ∈ F(p)`.
pub fn cond_leq_runs(t: &TypeSpec, p: &RunSet, q: &RunSet) -> Result<bool> {
    if q.is_empty() {
        return Ok(true);
    }
    if !q.is_subset(p) {
        return Ok(false);
    }
    let Some(k) = t.level_of_card(q.len())? else {
        return Ok(false);
    };
    let top = p.position(q.max().expect("nonempty")).expect("subset");
    Ok(omega::closure(t, top, k, None)?.compose(p) == *q)
}

pub fn cond_leq(t: &TypeSpec, p: &FinOrdSet, q: &FinOrdSet) -> Result<bool> {
    cond_leq_runs(t, &RunSet::from_set(p), &RunSet::from_set(q))
}

/// IH₁ witness in the ground: for F(ω) the member `m_{k+1}` for the least
/// `k > max A` with `r_{k+1} = α`; for an extension, the tip after an IH₁
/// request on its own chain.
pub fn ih1_witness(h: &SchemeHandle, a: Ordinal, set: &FinOrdSet) -> Result<FinOrdSet> {
    match h.extension() {
        Some(e) => {
            if a >= e.gamma || set.max().is_some_and(|m| m >= e.gamma) {
                return Err(Error::RequestOutOfDomain(format!(
                    "{a} or {set} is not below {}",
                    e.gamma
                )));
            }
            Ok(e.request(Request::Ih1 {
                alpha: a,
                set: set.clone(),
            })?
            .set
            .to_set())
        }
        None => {
            let (Some(alpha), true) = (a.as_fin(), set.iter().all(|x| x.is_finite())) else {
                return Err(Error::RequestOutOfDomain(format!("{a} or {set} is not below w")));
            };
            let t = h.ty();
            let start = set.max().map_or(0, |m| m.i as usize + 1);
            for k in start..crate::scheme_core::IH1_SEARCH_CAP {
                if t.r(k + 1)? == alpha {
                    let m = t.m_opt(k + 1)?.ok_or(Error::NoWitnessInSchedule(k + 1))?;
                    return Ok(FinOrdSet::interval(Ordinal::ZERO, m));
                }
            }
            Err(Error::NoWitnessInSchedule(crate::scheme_core::IH1_SEARCH_CAP))
        }
    }
}

/// Extends `h` (a scheme over `γ`) to a lazily grown scheme over `γ + ω`.
pub fn extend_scheme(h: &SchemeHandle, opts: ExtendOptions) -> Result<SchemeHandle> {
    let gamma = h.limit();
    if !gamma.is_limit() {
        return Err(Error::RequestOutOfDomain(format!("{gamma} is not a limit ordinal")));
    }
    let initial_cut = opts
        .initial_cut
        .unwrap_or(Ordinal::new(gamma.q - 1, DEFAULT_CUT_OFFSET));
    if initial_cut >= gamma {
        return Err(Error::RequestOutOfDomain(format!(
            "cut point {initial_cut} is not below {gamma}"
        )));
    }
    let ext = Extension {
        ground: h.clone(),
        gamma,
        initial_cut,
        fuel: opts.fuel,
        frozen: false,
        ground_log: h.extension().map(|e| e.log()),
        state: Mutex::new(ChainState::default()),
        norms: RwLock::new(HashMap::new()),
    };
    Ok(SchemeHandle::new(
        h.ty().clone(),
        crate::scheme_core::Domain::Extension(Arc::new(ext)),
        None,
    ))
}

/// Serves one request on an extension handle and returns the new tip.
pub fn chain_extend(h: &SchemeHandle, req: Request) -> Result<Condition> {
    h.extension()
        .ok_or_else(|| Error::RequestOutOfDomain("not an extension handle".into()))?
        .request(req)
}

/// Rebuilds an extension from a log by re-serving its requests.
pub fn replay(log: &ChainLog) -> Result<SchemeHandle> {
    let ground = match &log.ground {
        Some(g) => replay(g)?,
        None => SchemeHandle::omega(&TypeSpec::from_descriptor(&log.ty)?),
    };
    let h = extend_scheme(
        &ground,
        ExtendOptions {
            fuel: log.fuel,
            initial_cut: Some(log.initial_cut),
        },
    )?;
    for r in &log.requests {
        chain_extend(&h, r.clone())?;
    }
    Ok(h)
}

impl Extension {
    pub fn gamma(&self) -> Ordinal {
        self.gamma
    }

    pub fn ground(&self) -> &SchemeHandle {
        &self.ground
    }

    fn ty(&self) -> &TypeSpec {
        self.ground.ty()
    }

    pub fn tip(&self) -> Option<Condition> {
        self.state.lock().conds.last().cloned()
    }

    pub fn conditions(&self) -> Vec<Condition> {
        self.state.lock().conds.clone()
    }

    pub fn requests(&self) -> Vec<Request> {
        self.state.lock().log.clone()
    }

    /// The current cut point, once the chain has started.
    pub fn cut_point(&self) -> Option<Ordinal> {
        self.state.lock().cut
    }

    pub fn log(&self) -> ChainLog {
        let st = self.state.lock();
        ChainLog {
            ty: self.ty().descriptor().clone(),
            gamma: self.gamma,
            initial_cut: self.initial_cut,
            fuel: self.fuel,
            ground: self.ground_log.clone().map(Box::new),
            requests: st.log.clone(),
            conditions: st.conds.clone(),
        }
    }

    /// A frozen copy: queries answerable from the current tip succeed, any
    /// further growth fails with `FuelExhausted`.
    pub fn snapshot(&self) -> SchemeHandle {
        let st = self.state.lock().clone();
        let ext = Extension {
            ground: self.ground.clone(),
            gamma: self.gamma,
            initial_cut: self.initial_cut,
            fuel: st.conds.len() as u64,
            frozen: true,
            ground_log: self.ground_log.clone(),
            state: Mutex::new(st),
            norms: RwLock::new(self.norms.read().clone()),
        };
        SchemeHandle::new(
            self.ty().clone(),
            crate::scheme_core::Domain::Extension(Arc::new(ext)),
            None,
        )
    }

    pub fn request(&self, req: Request) -> Result<Condition> {
        let mut st = self.state.lock();
        self.serve(&mut st, req)?;
        Ok(st.conds.last().cloned().expect("chain started"))
    }

    fn serve(&self, st: &mut ChainState, req: Request) -> Result<()> {
        self.check_request(&req)?;
        st.log.push(req.clone());
        self.start(st)?;
        match req {
            Request::Contain(a) => self.contain(st, a),
            Request::IncludeF(f) => self.include(st, &f),
            Request::Ih1 { alpha, set } => self.ih1(st, alpha, &set),
        }
    }

    fn check_request(&self, req: &Request) -> Result<()> {
        let limit = Ordinal::omega_times(self.gamma.q + 1);
        let (pts, ground_only): (Vec<Ordinal>, bool) = match req {
            Request::Contain(a) => (vec![*a], false),
            Request::IncludeF(f) => (f.iter().copied().collect(), true),
            Request::Ih1 { alpha, set } => (set.iter().copied().chain([*alpha]).collect(), false),
        };
        let bound = if ground_only { self.gamma } else { limit };
        match pts.iter().find(|&&x| x >= bound) {
            Some(x) => Err(Error::RequestOutOfDomain(format!("{x} is not below {bound}"))),
            None if pts.is_empty() => Err(Error::RequestOutOfDomain("empty set".into())),
            None => Ok(()),
        }
    }

    fn append(&self, st: &mut ChainState, set: RunSet) -> Result<()> {
        if self.frozen || st.conds.len() as u64 >= self.fuel {
            return Err(Error::FuelExhausted(st.conds.len() as u64));
        }
        let level = self
            .ty()
            .level_of_card(set.len())?
            .ok_or_else(|| Error::NotAMember(format!("condition of size {}", set.len())))?;
        st.conds.push(Condition { set, level });
        Ok(())
    }

    fn start(&self, st: &mut ChainState) -> Result<()> {
        if st.conds.is_empty() {
            self.append(st, RunSet::interval(self.gamma, 1))?;
            st.cut = Some(self.initial_cut);
        }
        Ok(())
    }

    fn tip_ref<'a>(&self, st: &'a ChainState) -> &'a Condition {
        st.conds.last().expect("chain started")
    }

    /// Appends `Cut_c(G)` for a ground member `G ∋ c` of level `l`.
    fn raise(&self, st: &mut ChainState, l: usize) -> Result<()> {
        if self.tip_ref(st).level >= l {
            return Ok(());
        }
        let c = st.cut.expect("chain started");
        let g = self.ground.member_containing(c, l)?;
        self.append(st, cut_runs(&g, c, self.gamma))
    }

    fn contain(&self, st: &mut ChainState, a: Ordinal) -> Result<()> {
        if self.tip_ref(st).set.contains(a) {
            return Ok(());
        }
        let c = st.cut.expect("chain started");
        if a >= self.gamma {
            let mut l = self.tip_ref(st).level + 1;
            loop {
                let m = self.ty().m(l)?;
                if m - self.ground.norm(c, l)? > a.i {
                    return self.raise(st, l);
                }
                l += 1;
            }
        }
        if a < c {
            let l = rho(&self.ground, a, c)?;
            return self.raise(st, l);
        }
        self.move_cut(st, a)
    }

    /// `red_c(q) = (q ∩ γ) ∪ [c, c + |q ∖ γ|)`, a ground member whose cut at
    /// `c` is `q`.
    fn reduction(&self, st: &ChainState) -> RunSet {
        let q = &self.tip_ref(st).set;
        let c = st.cut.expect("chain started");
        let mut r = q.below(self.gamma);
        r.push_run(c, q.len() - r.len());
        r
    }

    /// Moves the cut point above a ground point `a ≥ c`: with `G` an IH₁
    /// witness for `(c, red_c(q) ∪ {a})`, the tip becomes `Cut_β(G)` for
    /// `β = min(G_1 ∖ R(G))`.
    fn move_cut(&self, st: &mut ChainState, a: Ordinal) -> Result<()> {
        let c = st.cut.expect("chain started");
        let mut set = self.reduction(st).to_set();
        set = set.union(&FinOrdSet::from(vec![a]));
        let g = self.ground.ih1_search(c, &RunSet::from_set(&set))?;
        let l = self.ty().level_of_card(g.len())?.ok_or(Error::NoWitnessInSchedule(0))?;
        let beta = g.get(self.ty().m(l - 1)?).ok_or(Error::NoWitnessInSchedule(l))?;
        self.append(st, cut_runs(&g, beta, self.gamma))?;
        st.cut = Some(beta);
        Ok(())
    }

    fn include(&self, st: &mut ChainState, f: &FinOrdSet) -> Result<()> {
        let runs = RunSet::from_set(f);
        let level = member_level(&self.ground, &runs)?.ok_or_else(|| Error::NotAMember(f.to_string()))?;
        let top = f.max().expect("nonempty");
        self.contain(st, top)?;
        let c = st.cut.expect("chain started");
        let l = level.max(rho(&self.ground, top, c)?);
        self.raise(st, l)
    }

    fn ih1(&self, st: &mut ChainState, a: Ordinal, set: &FinOrdSet) -> Result<()> {
        for &x in set.iter().chain([a].iter()) {
            self.contain(st, x)?;
        }
        let c = st.cut.expect("chain started");
        let q = self.tip_ref(st).set.clone();
        let red = self.reduction(st);
        let image = red.get(q.position(a).expect("contained")).expect("same size");
        let g = self.ground.ih1_search(image, &red)?;
        self.append(st, cut_runs(&g, c, self.gamma))
    }

    /// Grows the chain until the tip holds `a` at level at least `k`.
    fn ensure(&self, a: Ordinal, k: usize) -> Result<Condition> {
        let mut st = self.state.lock();
        self.start(&mut st)?;
        if !self.tip_ref(&st).set.contains(a) {
            self.serve(&mut st, Request::Contain(a))?;
        }
        if self.tip_ref(&st).level < k {
            let far = self.gamma.plus(self.ty().m(k)? - 1);
            self.serve(&mut st, Request::Contain(far))?;
        }
        Ok(self.tip_ref(&st).clone())
    }

    pub(crate) fn norm(&self, a: Ordinal, k: usize) -> Result<u64> {
        if a < self.gamma {
            return self.ground.norm(a, k);
        }
        if let Some(&n) = self.norms.read().get(&(a, k)) {
            return Ok(n);
        }
        let tip = self.ensure(a, k)?;
        let pos = tip.set.position(a).expect("contained");
        let n = omega::norm(self.ty(), pos, k)?;
        self.norms.write().insert((a, k), n);
        Ok(n)
    }

    pub(crate) fn closure(&self, a: Ordinal, k: usize) -> Result<RunSet> {
        if a < self.gamma {
            return self.ground.closure(a, k);
        }
        let tip = self.ensure(a, k)?;
        let pos = tip.set.position(a).expect("contained");
        Ok(omega::closure(self.ty(), pos, k, None)?.compose(&tip.set))
    }

    pub(crate) fn member_containing(&self, a: Ordinal, l: usize) -> Result<RunSet> {
        let tip = self.ensure(a, l)?;
        let pos = tip.set.position(a).expect("contained");
        Ok(omega::interval_member(self.ty(), pos, l)?.compose(&tip.set))
    }

    pub(crate) fn common_level(&self, a: Ordinal, b: Ordinal) -> Result<usize> {
        if a < self.gamma && b < self.gamma {
            return self.ground.common_level(a, b);
        }
        let mut st = self.state.lock();
        self.start(&mut st)?;
        for x in [a.min(b), a.max(b)] {
            if !self.tip_ref(&st).set.contains(x) {
                self.serve(&mut st, Request::Contain(x))?;
            }
        }
        Ok(self.tip_ref(&st).level)
    }

    pub(crate) fn ih1_for_ground(&self, a: Ordinal, set: &RunSet) -> Result<RunSet> {
        Ok(self
            .request(Request::Ih1 {
                alpha: a,
                set: set.to_set(),
            })?
            .set)
    }
}

/// Members of `F(tip)` of level at most `max_level`, grouped by level.
pub fn produced_members(ext: &Extension, max_level: usize) -> Result<Vec<(usize, Vec<RunSet>)>> {
    let Some(tip) = ext.tip() else { return Ok(Vec::new()) };
    let t = ext.ty();
    let omega_h = SchemeHandle::omega(t);
    let bound = Ordinal::fin(tip.set.len());
    let mut out = Vec::new();
    for k in 0..=max_level.min(tip.level) {
        let members = crate::scheme_core::level_iter(&omega_h, k, bound)?
            .map(|m| m.map(|m| RunSet::from_set(&m).compose(&tip.set)))
            .collect::<Result<Vec<_>>>()?;
        out.push((k, members));
    }
    Ok(out)
}

/// Deterministic JSON export of a chain: its log plus the low levels of the
/// produced family.
pub fn export_chain(h: &SchemeHandle, max_level: usize) -> Result<String> {
    let ext = h
        .extension()
        .ok_or_else(|| Error::RequestOutOfDomain("not an extension handle".into()))?;
    #[derive(Serialize)]
    struct Export {
        log: ChainLog,
        levels: Vec<(usize, Vec<FinOrdSet>)>,
    }
    let levels = produced_members(ext, max_level)?
        .into_iter()
        .map(|(k, ms)| (k, ms.iter().map(RunSet::to_set).collect()))
        .collect();
    Ok(serde_json::to_string(&Export { log: ext.log(), levels })?)
}
