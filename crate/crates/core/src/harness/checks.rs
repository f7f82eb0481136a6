//! Registry of executable invariants.
//!
//! Every check runs exhaustively over the ordinals below the suite bound
//! unless its statement says otherwise, and records each violated instance
//! as a counterexample that names its inputs.
//!
//! | name | module | statement |
//! |------|--------|-----------|
//! | `metric-axioms` | metric | `ρ = 0` iff equal, symmetry, `ρ(α,β) ≤ max(ρ(α,γ), ρ(β,γ))` for `α ≤ β, γ` |
//! | `closure-coherence` | scheme_core | `max (α)_k = α`, `|(α)_k| ≤ m_k`, `(α)_k ⊆ (α)_{k+1}`, `(β)_k = (α)_k ∩ (β+1)` for `β ∈ (α)_k` |
//! | `closure-laws` | metric | the six basic laws of set closures, for sets of size at most 3 |
//! | `xi-lemma` | metric | `Ξ` below `Δ`, at `ρ`, above `ρ` and at `Δ` |
//! | `delta-norms` | metric | `‖α‖_k = ‖β‖_k ⇒ k < Δ(α,β)` |
//! | `delta-transitivity` | metric | `Δ(α,β) < Δ(β,δ) ⇒ Δ(α,δ) = Δ(α,β)` |
//! | `oracle-equivalence` | metric | `ρ` equals the least level of a brute-force member of `F(m_3)` holding both points |
//! | `unique-scheme` | scheme_core | `F(m_K)` equals `{F ⊆ m_K : is_member(F)}` for `m_K ≤ 14` |
//! | `decomposition` | scheme_core | every member splits into `n_k` members forming a root-tail-tail Δ-system |
//! | `level-coherence` | scheme_core | `E ∩ F ⊑ E, F` for members of one level |
//! | `fragment-round-trip` | scheme_core | an exported and re-imported fragment answers like the oracle |
//! | `capture-criterion` | capture | the `Δ = ρ` criterion agrees with witness enumeration for `l ≤ 3` |
//! | `capture-sets` | capture | captured points carry captured set families `(α)_j[C]` |
//! | `bracket-constant` | capture | `⟦D_0(i), D_1(i)⟧` is constant for captured disjoint pairs |
//! | `gap-laws` | derived | `L ∩ R = ∅`, `2ρ+1 ∈ L_β ∩ R_α`, `L_α ∖ L_β ⊆ [0, 2ρ+2)`, one point per level |
//! | `luzin-laws` | derived | `|A_α ∩ A_β| ≥ ρ` and the intersection lives on levels `≤ ρ` |
//! | `jones-separation` | derived | `A^{k+1}_α ⊆ C_β` for `α ≤ β`, `A^{k+1}_δ` misses `C_β` for `δ > β`, `k ≥ ρ` |
//! | `countryman-order` | derived | `<_F` is a strict total order |
//! | `countryman-chains` | derived | pairs of one class `P(x, y, z)` form a chain in the product order |
//! | `tree-antichains` | derived | every bucket `T(k, s)` is an antichain, on full and seeded random nodes |
//! | `osc-window` | derived | `osc_k(α, β) ⊆ [k, ρ)` |
//! | `osc-base-step` | derived | `osc_{ρ^a}[a, b] = {0}` for captured disjoint pairs of equal diameter |
//! | `coloring-laws` | derived | partition layout, `o*` default, `c` is 2-bounded |
//! | `coherent-family` | derived | `f_α` and `f_β` agree on points with first coordinate `> ρ(α, β)` |
//! | `entangled-realization` | derived | both order types occur among level-1 captured singletons |
//! | `s-space` | derived | `C_{Δ(γ,β)+1}(γ) ⊆ C(β)` for `γ ∈ H(β)`, `C_k(β)` decreasing |
//! | `extension-chain` | extension | chain conditions, dense postconditions, red/Cut identities, axioms, replay |

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Debug;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::capture::{enumerate_captured, is_captured, pair_captured_level, square_bracket};
use crate::derived::coloring::{decode_map, partition_intervals, psi};
use crate::derived::luzin::{a_block, n_block};
use crate::derived::{
    aronszajn_classify, aronszajn_node, bounded_color_c, chain_class, coherent_family_eval, color_o, color_o_star,
    entangled_vector, hausdorff_gap, jones_separator, luzin_family, osc, osc_sets, CountrymanOrder, SSpace, TreeNode,
};
use crate::error::{Error, Result};
use crate::extension::{
    chain_extend, cond_leq_runs, cut, export_chain, extend_scheme, is_condition_runs, produced_members, red, replay,
    ExtendOptions, Request, DEFAULT_FUEL,
};
use crate::metric::{delta, diameter, rho, set_closure, DeltaLevel};
use crate::scheme_core::{
    canonical_decomposition, decompose_runs, export_fragment, fragment_to_json, import_fragment, is_member, level_iter,
    member_level, unique_finite_scheme, unique_finite_scheme_levels, FinOrdSet, Ordinal, RunSet, SchemeHandle,
};
use crate::type_system::{preset, TypeSpec};

/// Counterexamples kept per report; the failure count covers all of them.
pub const KEPT_COUNTEREXAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub preset: String,
    pub bound: u64,
    pub seed: u64,
    pub pass: bool,
    /// The check does not apply to the type; such reports pass.
    pub skipped: bool,
    pub cases: u64,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteParams {
    /// Exclusive bound on the ordinals checked; `None` picks [`default_bound`].
    pub bound: Option<u64>,
    pub fuel: u64,
    pub seed: u64,
    /// Random nodes added to the tree check.
    pub samples: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            bound: None,
            fuel: DEFAULT_FUEL,
            seed: 0,
            samples: 100,
        }
    }
}

/// `m_4` when it is at most 64, else the largest `m_k ≤ 64`.
pub fn default_bound(t: &TypeSpec) -> Result<u64> {
    let mut best = t.m(0)?;
    for k in 1..=4 {
        match t.m_opt(k)? {
            Some(m) if m <= 64 => best = m,
            _ => break,
        }
    }
    Ok(best)
}

type CheckFn = fn(&mut Ctx) -> Result<()>;

pub struct CheckInfo {
    pub name: &'static str,
    pub module: &'static str,
    applies: fn(&SchemeHandle) -> bool,
    run: CheckFn,
}

impl CheckInfo {
    pub fn applies_to(&self, h: &SchemeHandle) -> bool {
        (self.applies)(h)
    }
}

fn always(_: &SchemeHandle) -> bool {
    true
}

fn two_type(h: &SchemeHandle) -> bool {
    h.ty().is_two_type()
}

fn omega_two_type(h: &SchemeHandle) -> bool {
    h.is_omega() && h.ty().is_two_type()
}

fn omega_only(h: &SchemeHandle) -> bool {
    h.is_omega()
}

fn entangled_type(h: &SchemeHandle) -> bool {
    crate::derived::entangled_eval(h, Ordinal::ZERO, 1).is_ok()
}

pub static CHECKS: &[CheckInfo] = &[
    CheckInfo {
        name: "metric-axioms",
        module: "metric",
        applies: always,
        run: metric_axioms,
    },
    CheckInfo {
        name: "closure-coherence",
        module: "scheme_core",
        applies: always,
        run: closure_coherence,
    },
    CheckInfo {
        name: "closure-laws",
        module: "metric",
        applies: always,
        run: closure_laws,
    },
    CheckInfo {
        name: "xi-lemma",
        module: "metric",
        applies: always,
        run: xi_lemma,
    },
    CheckInfo {
        name: "delta-norms",
        module: "metric",
        applies: always,
        run: delta_norms,
    },
    CheckInfo {
        name: "delta-transitivity",
        module: "metric",
        applies: always,
        run: delta_transitivity,
    },
    CheckInfo {
        name: "oracle-equivalence",
        module: "metric",
        applies: omega_only,
        run: oracle_equivalence,
    },
    CheckInfo {
        name: "unique-scheme",
        module: "scheme_core",
        applies: omega_only,
        run: unique_scheme,
    },
    CheckInfo {
        name: "decomposition",
        module: "scheme_core",
        applies: always,
        run: decomposition,
    },
    CheckInfo {
        name: "level-coherence",
        module: "scheme_core",
        applies: always,
        run: level_coherence,
    },
    CheckInfo {
        name: "fragment-round-trip",
        module: "scheme_core",
        applies: omega_only,
        run: fragment_round_trip,
    },
    CheckInfo {
        name: "capture-criterion",
        module: "capture",
        applies: always,
        run: capture_criterion,
    },
    CheckInfo {
        name: "capture-sets",
        module: "capture",
        applies: always,
        run: capture_sets,
    },
    CheckInfo {
        name: "bracket-constant",
        module: "capture",
        applies: always,
        run: bracket_constant,
    },
    CheckInfo {
        name: "gap-laws",
        module: "derived",
        applies: two_type,
        run: gap_laws,
    },
    CheckInfo {
        name: "luzin-laws",
        module: "derived",
        applies: two_type,
        run: luzin_laws,
    },
    CheckInfo {
        name: "jones-separation",
        module: "derived",
        applies: two_type,
        run: jones_separation,
    },
    CheckInfo {
        name: "countryman-order",
        module: "derived",
        applies: always,
        run: countryman_order,
    },
    CheckInfo {
        name: "countryman-chains",
        module: "derived",
        applies: always,
        run: countryman_chains,
    },
    CheckInfo {
        name: "tree-antichains",
        module: "derived",
        applies: always,
        run: tree_antichains,
    },
    CheckInfo {
        name: "osc-window",
        module: "derived",
        applies: always,
        run: osc_window,
    },
    CheckInfo {
        name: "osc-base-step",
        module: "derived",
        applies: always,
        run: osc_base_step,
    },
    CheckInfo {
        name: "coloring-laws",
        module: "derived",
        applies: always,
        run: coloring_laws,
    },
    CheckInfo {
        name: "coherent-family",
        module: "derived",
        applies: omega_two_type,
        run: coherent_family,
    },
    CheckInfo {
        name: "entangled-realization",
        module: "derived",
        applies: entangled_type,
        run: entangled_realization,
    },
    CheckInfo {
        name: "s-space",
        module: "derived",
        applies: always,
        run: s_space,
    },
    CheckInfo {
        name: "extension-chain",
        module: "extension",
        applies: omega_two_type,
        run: extension_chain,
    },
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.name)
}

pub fn find_check(name: &str) -> Result<&'static CheckInfo> {
    CHECKS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownCheck(name.into()))
}

/// Runs the named checks, or every applicable one for `None`, on the
/// ω-scheme of a preset.
pub fn run_suite(names: Option<&[String]>, preset_name: &str, params: &SuiteParams) -> Result<Vec<CheckReport>> {
    let t = preset(preset_name)?;
    run_suite_on(&SchemeHandle::omega(&t), preset_name, names, params)
}

/// [`run_suite`] on an arbitrary handle. Checks run on separate threads and
/// the reports come back sorted by name.
pub fn run_suite_on(
    h: &SchemeHandle,
    label: &str,
    names: Option<&[String]>,
    params: &SuiteParams,
) -> Result<Vec<CheckReport>> {
    let selected: Vec<(&CheckInfo, bool)> = match names {
        None => CHECKS.iter().filter(|c| c.applies_to(h)).map(|c| (c, true)).collect(),
        Some(names) => {
            let mut out = Vec::new();
            for n in names.iter().unique() {
                let c = find_check(n)?;
                out.push((c, c.applies_to(h)));
            }
            out
        }
    };
    let bound = match params.bound {
        Some(b) => b,
        None => default_bound(h.ty())?,
    };
    let mut reports: Vec<CheckReport> = std::thread::scope(|s| {
        let jobs: Vec<_> = selected
            .iter()
            .map(|&(c, applies)| {
                let h = h.clone();
                s.spawn(move || run_one(c, applies, h, label, bound, params))
            })
            .collect();
        jobs.into_iter()
            .map(|j| j.join().expect("check thread panicked"))
            .collect()
    });
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}

fn run_one(c: &CheckInfo, applies: bool, h: SchemeHandle, label: &str, bound: u64, p: &SuiteParams) -> CheckReport {
    let mut report = CheckReport {
        name: c.name.into(),
        preset: label.into(),
        bound,
        seed: p.seed,
        pass: true,
        skipped: !applies,
        cases: 0,
        failures: 0,
        counterexamples: Vec::new(),
    };
    if !applies {
        return report;
    }
    let mut ctx = match Ctx::new(h, bound, p) {
        Ok(ctx) => ctx,
        Err(e) => {
            report.pass = false;
            report.failures = 1;
            report.counterexamples.push(aborted(c.name, &e));
            return report;
        }
    };
    if let Err(e) = (c.run)(&mut ctx) {
        ctx.failures += 1;
        ctx.found.push(aborted(c.name, &e));
    }
    report.cases = ctx.cases;
    report.failures = ctx.failures;
    report.pass = ctx.failures == 0;
    report.counterexamples = ctx.found;
    report
}

fn aborted(name: &str, e: &Error) -> Counterexample {
    Counterexample {
        input: format!("{name} (aborted)"),
        expected: "no error".into(),
        got: e.to_string(),
    }
}

pub(crate) struct Ctx {
    h: SchemeHandle,
    bound: u64,
    /// Least `k` with `m_k ≥ bound`: every pair below the bound meets there.
    top: usize,
    fuel: u64,
    seed: u64,
    samples: usize,
    cases: u64,
    failures: u64,
    found: Vec<Counterexample>,
}

impl Ctx {
    fn new(h: SchemeHandle, bound: u64, p: &SuiteParams) -> Result<Self> {
        let top = h.ty().level_above(bound.saturating_sub(1))?;
        Ok(Ctx {
            h,
            bound,
            top,
            fuel: p.fuel,
            seed: p.seed,
            samples: p.samples,
            cases: 0,
            failures: 0,
            found: Vec::new(),
        })
    }

    fn pts(&self) -> impl Iterator<Item = Ordinal> {
        (0..self.bound).map(Ordinal::fin)
    }

    fn fail(&mut self, input: String, expected: String, got: String) {
        self.failures += 1;
        if self.found.len() < KEPT_COUNTEREXAMPLES {
            self.found.push(Counterexample { input, expected, got });
        }
    }

    fn holds(&mut self, ok: bool, input: impl FnOnce() -> String, law: &str) {
        self.cases += 1;
        if !ok {
            self.fail(input(), law.into(), "violated".into());
        }
    }

    fn eq<T: PartialEq + Debug>(&mut self, input: impl FnOnce() -> String, expected: T, got: T) {
        self.cases += 1;
        if expected != got {
            self.fail(input(), format!("{expected:?}"), format!("{got:?}"));
        }
    }

    fn rho_table(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.bound;
        (0..n)
            .map(|a| (0..n).map(|b| rho(&self.h, o(a), o(b))).collect())
            .collect()
    }

    fn delta_table(&self) -> Result<Vec<Vec<DeltaLevel>>> {
        let n = self.bound;
        (0..n)
            .map(|a| (0..n).map(|b| delta(&self.h, o(a), o(b))).collect())
            .collect()
    }

    /// Every member of level `k` below the bound.
    fn members(&self, k: usize) -> Result<Vec<FinOrdSet>> {
        if self.h.ty().m_opt(k)?.is_none_or(|m| m > self.bound) {
            return Ok(Vec::new());
        }
        level_iter(&self.h, k, Ordinal::fin(self.bound))?.collect()
    }
}

fn o(i: u64) -> Ordinal {
    Ordinal::fin(i)
}

fn set(v: &[u64]) -> FinOrdSet {
    FinOrdSet::nat(v.iter().copied())
}

fn metric_axioms(c: &mut Ctx) -> Result<()> {
    let r = c.rho_table()?;
    let n = c.bound as usize;
    for a in 0..n {
        for b in 0..n {
            c.holds(
                (r[a][b] == 0) == (a == b),
                || format!("rho({a}, {b}) = {}", r[a][b]),
                "rho = 0 iff equal",
            );
            c.eq(|| format!("rho({a}, {b}) against rho({b}, {a})"), r[a][b], r[b][a]);
            if b < a {
                continue;
            }
            for g in a..n {
                c.holds(
                    r[a][b] <= r[a][g].max(r[b][g]),
                    || format!("alpha={a} beta={b} gamma={g}"),
                    "rho(a,b) <= max(rho(a,g), rho(b,g)) for a <= b, g",
                );
            }
        }
    }
    Ok(())
}

fn closure_coherence(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let t = h.ty().clone();
    for a in c.pts().collect::<Vec<_>>() {
        for k in 0..=c.top + 1 {
            let cl = h.closure(a, k)?;
            let next = h.closure(a, k + 1)?;
            c.eq(|| format!("max (alpha)_k, alpha={a} k={k}"), Some(a), cl.max());
            c.holds(cl.len() <= t.m(k)?, || format!("alpha={a} k={k}"), "|(alpha)_k| <= m_k");
            c.holds(
                cl.is_subset(&next),
                || format!("alpha={a} k={k}"),
                "(alpha)_k subset of (alpha)_{k+1}",
            );
            c.eq(|| format!("norm alpha={a} k={k}"), cl.len() - 1, h.norm(a, k)?);
            for b in cl.iter() {
                let expected = cl.below(b.succ());
                c.eq(
                    || format!("(beta)_k for beta={b} in (alpha)_k, alpha={a} k={k}"),
                    expected,
                    h.closure(b, k)?,
                );
            }
        }
    }
    Ok(())
}

/// `F` is closed when `(β)_{ρ^F} ⊆ F` for every `β ∈ F`.
fn is_closed(h: &SchemeHandle, f: &FinOrdSet, d: usize) -> Result<bool> {
    for &b in f {
        if !h.closure_set(b, d)?.is_subset(f) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn closure_laws(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let r = c.rho_table()?;
    let n = c.bound;
    let all: Vec<Ordinal> = c.pts().collect();
    for size in 1..=3usize {
        for f in (0..n).combinations(size) {
            let fs = set(&f);
            let top = *f.last().expect("nonempty");
            let pair_max = f
                .iter()
                .tuple_combinations()
                .map(|(&x, &y)| r[x as usize][y as usize])
                .max()
                .unwrap_or(0);
            let to_max = f.iter().map(|&x| r[x as usize][top as usize]).max().unwrap_or(0);
            let d = diameter(&h, &fs)?;
            c.eq(|| format!("diameter of {fs}"), pair_max, d);
            c.eq(|| format!("max rho to the top of {fs}"), pair_max, to_max);
            let closed = is_closed(&h, &fs, d)?;
            c.eq(
                || format!("closedness of {fs}"),
                closed,
                h.closure_set(o(top), d)? == fs,
            );
            for k in d..=c.top + 1 {
                let fk = set_closure(&h, &fs, k)?.to_set();
                let brute: FinOrdSet = (0..=top).filter(|&x| r[x as usize][top as usize] <= k).map(o).collect();
                c.eq(|| format!("(F)_k by rho, F={fs} k={k}"), brute, fk.clone());
                c.eq(
                    || format!("(F)_k = (max F)_k, F={fs} k={k}"),
                    h.closure_set(o(top), k)?,
                    fk.clone(),
                );
                for &b in &f {
                    let lhs = fk.below(o(b).succ());
                    let rhs = set_closure(&h, &fs.below(o(b).succ()), k)?.to_set();
                    c.eq(|| format!("(F)_k cut at beta={b}, F={fs} k={k}"), lhs, rhs);
                }
                let mut k_closed = true;
                for &b in &fk {
                    k_closed &= h.closure_set(b, k)?.is_subset(&fk);
                }
                c.holds(k_closed, || format!("F={fs} k={k}"), "(F)_k is k-closed");
                let dk = diameter(&h, &fk)?;
                c.holds(dk <= k, || format!("F={fs} k={k}"), "diameter of (F)_k <= k");
                if k == d {
                    c.eq(|| format!("diameter of (F)_k at k = diameter, F={fs}"), d, dk);
                }
                if size <= 2 {
                    for &g in &all {
                        let gk = h.closure_set(g, k)?;
                        c.holds(
                            fs.intersection(&gk).is_initial_segment_of(&fs),
                            || format!("F={fs} G=({g})_{k}"),
                            "F ∩ G is an initial segment of F for k-closed G",
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn xi_lemma(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let r = c.rho_table()?;
    let dt = c.delta_table()?;
    for b in 0..c.bound {
        for a in 0..b {
            let rho_ab = r[a as usize][b as usize];
            let Some(d) = dt[a as usize][b as usize].level() else {
                c.fail(format!("delta({a}, {b})"), "a level".into(), "inf".into());
                continue;
            };
            for k in 1..=c.top + 1 {
                let (xa, xb) = (h.xi(o(a), k)?, h.xi(o(b), k)?);
                let input = || format!("alpha={a} beta={b} k={k} xi=({xa}, {xb}) rho={rho_ab} delta={d}");
                if k < d {
                    c.holds(xa == xb, input, "k < delta implies equal xi");
                }
                if k == rho_ab {
                    c.holds(0 <= xa && xa < xb, input, "k = rho implies 0 <= xi_a < xi_b");
                }
                if k > rho_ab {
                    c.holds(xa == -1 || xa == xb, input, "k > rho implies xi_a = -1 or xi_a = xi_b");
                }
                if k == d {
                    c.holds(
                        xa >= 0 && xb >= 0 && xa != xb,
                        input,
                        "k = delta implies distinct nonnegative xi",
                    );
                }
            }
        }
    }
    Ok(())
}

fn delta_norms(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let dt = c.delta_table()?;
    for a in 0..c.bound {
        for b in 0..c.bound {
            if a == b {
                continue;
            }
            for k in 0..=c.top + 1 {
                if h.norm(o(a), k)? == h.norm(o(b), k)? {
                    let d = dt[a as usize][b as usize];
                    c.holds(
                        DeltaLevel::Level(k) < d,
                        || format!("alpha={a} beta={b} k={k} delta={d}"),
                        "equal norms at k imply k < delta",
                    );
                }
            }
        }
    }
    Ok(())
}

fn delta_transitivity(c: &mut Ctx) -> Result<()> {
    let dt = c.delta_table()?;
    let n = c.bound as usize;
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                if a == b || b == d || a == d || dt[a][b] >= dt[b][d] {
                    continue;
                }
                c.eq(
                    || format!("delta(alpha, delta) for alpha={a} beta={b} delta={d}"),
                    dt[a][b],
                    dt[a][d],
                );
            }
        }
    }
    Ok(())
}

/// Largest `K ≤ 3` with `m_K ≤ 4096`.
fn brute_level(t: &TypeSpec) -> Result<usize> {
    let mut k = 0;
    while k < 3 && t.m_opt(k + 1)?.is_some_and(|m| m <= 4096) {
        k += 1;
    }
    Ok(k)
}

fn oracle_equivalence(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let big = brute_level(h.ty())?;
    let m = h.ty().m(big)?;
    let family = unique_finite_scheme_levels(&FinOrdSet::interval(Ordinal::ZERO, m), h.ty())?;
    let mut least = vec![vec![usize::MAX; m as usize]; m as usize];
    for (l, f) in &family {
        for (x, y) in f.iter().tuple_combinations() {
            let cell = &mut least[x.i as usize][y.i as usize];
            *cell = (*cell).min(*l);
        }
    }
    for b in 0..m {
        for a in 0..b {
            c.eq(
                || format!("rho({a}, {b}) against F(m_{big})"),
                least[a as usize][b as usize],
                rho(&h, o(a), o(b))?,
            );
        }
    }
    Ok(())
}

fn unique_scheme(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    for k in 0..=3 {
        let Some(m) = h.ty().m_opt(k)?.filter(|&m| m <= 14) else {
            break;
        };
        let x = FinOrdSet::interval(Ordinal::ZERO, m);
        let expected: BTreeSet<Vec<Ordinal>> = unique_finite_scheme(&x, h.ty())?.map(Vec::from).collect();
        let mut got = BTreeSet::new();
        for mask in 1u32..(1 << m) {
            let s: FinOrdSet = (0..m).filter(|&i| mask >> i & 1 == 1).map(o).collect();
            if is_member(&h, &s)? {
                got.insert(Vec::from(s));
            }
        }
        c.eq(|| format!("members inside m_{k} = {m}"), expected, got);
    }
    Ok(())
}

/// Checks the Δ-system shape of `f`'s canonical decomposition; `is_piece`
/// decides membership of the pieces one level down.
fn check_decomposition(c: &mut Ctx, f: &FinOrdSet, is_piece: &mut dyn FnMut(&FinOrdSet) -> Result<bool>) -> Result<()> {
    let t = c.h.ty().clone();
    let d = canonical_decomposition(f, &t)?;
    let k = d.level;
    c.eq(|| format!("number of pieces of {f}"), t.n(k)? as usize, d.pieces.len());
    c.eq(|| format!("root size of {f}"), t.r(k)? as usize, d.root.len());
    let union = d.pieces.iter().fold(FinOrdSet::new(), |acc, p| acc.union(p));
    c.eq(|| format!("union of the pieces of {f}"), f.clone(), union);
    c.holds(
        d.root.is_initial_segment_of(&d.pieces[0]),
        || format!("F={f}"),
        "R(F) is an initial segment of F_0",
    );
    for p in &d.pieces {
        let ok = is_piece(p)?;
        c.holds(ok, || format!("piece {p} of {f}"), "pieces are members one level down");
    }
    for (i, j) in (0..d.pieces.len()).tuple_combinations() {
        c.eq(
            || format!("F_{i} ∩ F_{j} for F={f}"),
            d.root.clone(),
            d.pieces[i].intersection(&d.pieces[j]),
        );
    }
    let mut prev = d.root.max();
    for (i, p) in d.pieces.iter().enumerate() {
        let tail = p.difference(&d.root);
        c.holds(
            prev.is_none_or(|m| tail.min().is_none_or(|x| m < x)),
            || format!("piece {i} of {f}"),
            "R < F_0 ∖ R < F_1 ∖ R < …",
        );
        prev = tail.max().or(prev);
    }
    Ok(())
}

fn decomposition(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    for k in 1..=c.top {
        let below = k - 1;
        for f in c.members(k)? {
            let mut is_piece = |p: &FinOrdSet| Ok(member_level(&h, &RunSet::from_set(p))? == Some(below));
            check_decomposition(c, &f, &mut is_piece)?;
        }
    }
    Ok(())
}

fn level_coherence(c: &mut Ctx) -> Result<()> {
    for k in 0..=c.top {
        let ms = c.members(k)?;
        for (e, f) in ms.iter().tuple_combinations() {
            let i = e.intersection(f);
            c.holds(
                i.is_initial_segment_of(e) && i.is_initial_segment_of(f),
                || format!("E={e} F={f}"),
                "E ∩ F ⊑ E, F",
            );
        }
    }
    Ok(())
}

fn fragment_round_trip(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let t = h.ty().clone();
    let json = fragment_to_json(&export_fragment(&h, c.bound)?)?;
    let back = import_fragment(&json)?;
    let mut window = 0;
    while t.m_opt(window + 1)?.is_some_and(|m| m <= c.bound) {
        window += 1;
    }
    let m = t.m(window)?;
    for a in 0..m {
        for k in 0..=window {
            c.eq(
                || format!("norm({a}, {k}) after import"),
                h.norm(o(a), k)?,
                back.norm(o(a), k)?,
            );
            c.eq(
                || format!("closure({a}, {k}) after import"),
                h.closure(o(a), k)?,
                back.closure(o(a), k)?,
            );
        }
        for b in 0..a {
            c.eq(
                || format!("rho({b}, {a}) after import"),
                rho(&h, o(b), o(a))?,
                rho(&back, o(b), o(a))?,
            );
        }
    }
    Ok(())
}

fn capture_criterion(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let bound = Ordinal::fin(c.bound);
    for l in 1..=c.top.min(3) {
        let witnessed: BTreeSet<(Ordinal, Ordinal)> = enumerate_captured(&h, l, 2, bound, Some(1))?
            .iter()
            .filter_map(|r| Some((r.family[0].min()?, r.family[1].min()?)))
            .collect();
        let mut criterion = BTreeSet::new();
        for b in 0..c.bound {
            for a in 0..b {
                if is_captured(&h, &[set(&[a]), set(&[b])], l)?.is_captured() {
                    criterion.insert((o(a), o(b)));
                }
            }
        }
        c.eq(|| format!("captured pairs at level {l}"), witnessed, criterion);
        let n = h.ty().n(l)? as usize;
        for size in 2..=n.min(4) {
            let s_size = if size == 2 { None } else { Some(1) };
            for rec in enumerate_captured(&h, l, size, bound, s_size)? {
                let ok = is_captured(&h, &rec.family, l)?.is_captured();
                c.holds(
                    ok,
                    || format!("family {:?} at level {l}", rec.family),
                    "witnessed families satisfy the criterion",
                );
            }
        }
    }
    Ok(())
}

/// Pairs `α < β` below the bound captured at some level, with the level.
fn captured_pairs(c: &Ctx) -> Result<Vec<(Ordinal, Ordinal, usize)>> {
    let mut out = Vec::new();
    for b in 0..c.bound {
        for a in 0..b {
            if let Some(l) = pair_captured_level(&c.h, o(a), o(b))? {
                out.push((o(a), o(b), l));
            }
        }
    }
    Ok(out)
}

/// `(A, B, l)` with `A = (α)_j[C]`, `B = (β)_j[C]` for captured `{α, β}`,
/// `j < l`, `C ∋ ‖α‖_j` and `|C| ≤ 3`.
fn transported_pairs(c: &Ctx) -> Result<Vec<(FinOrdSet, FinOrdSet, usize)>> {
    let h = &c.h;
    let mut out = Vec::new();
    for (a, b, l) in captured_pairs(c)? {
        for j in 0..l {
            let (ca, cb) = (h.closure_set(a, j)?, h.closure_set(b, j)?);
            let top = h.norm(a, j)? as usize;
            for extra in 0..=2.min(top) {
                for rest in (0..top).combinations(extra) {
                    let mut pos = rest;
                    pos.push(top);
                    let (Some(x), Some(y)) = (ca.select(&pos), cb.select(&pos)) else {
                        continue;
                    };
                    out.push((x, y, l));
                }
            }
        }
    }
    Ok(out)
}

fn capture_sets(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    for (x, y, l) in transported_pairs(c)? {
        let ok = is_captured(&h, &[x.clone(), y.clone()], l)?.is_captured();
        c.holds(
            ok,
            || format!("A={x} B={y} l={l}"),
            "sets carried by a captured pair are captured at the same level",
        );
    }
    Ok(())
}

fn bracket_constant(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    for (x, y, l) in transported_pairs(c)? {
        if !x.intersection(&y).is_empty() {
            continue;
        }
        let mut values = BTreeSet::new();
        for (&p, &q) in x.iter().zip(y.iter()) {
            values.insert(square_bracket(&h, p.min(q), p.max(q))?);
        }
        c.eq(|| format!("brackets along A={x} B={y} l={l}"), 1, values.len());
    }
    Ok(())
}

fn gap_laws(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let kb = c.top + 1;
    let gaps = c
        .pts()
        .map(|a| hausdorff_gap(&h, a, kb, None))
        .collect::<Result<Vec<_>>>()?;
    let r = c.rho_table()?;
    for g in &gaps {
        c.holds(
            g.left.is_disjoint(&g.right),
            || format!("alpha={}", g.alpha),
            "L ∩ R = ∅",
        );
        for k in 1..=kb as u64 {
            let (l2, r2) = ([2 * k, 2 * k + 1], [2 * k, 2 * k + 1]);
            c.holds(
                l2.iter().filter(|x| g.left.contains(x)).count() <= 1,
                || format!("alpha={} k={k}", g.alpha),
                "one point of L per level",
            );
            c.holds(
                r2.iter().filter(|x| g.right.contains(x)).count() <= 1,
                || format!("alpha={} k={k}", g.alpha),
                "one point of R per level",
            );
        }
    }
    for b in 0..c.bound as usize {
        for a in 0..b {
            let rr = r[a][b] as u64;
            let (ga, gb) = (&gaps[a], &gaps[b]);
            let witness = 2 * rr + 1;
            c.holds(
                gb.left.contains(&witness) && ga.right.contains(&witness),
                || format!("alpha={a} beta={b} rho={rr}"),
                "2 rho + 1 ∈ L_beta ∩ R_alpha",
            );
            let stray: Vec<u64> = ga
                .left
                .difference(&gb.left)
                .copied()
                .filter(|&x| x >= 2 * rr + 2)
                .collect();
            c.eq(
                || format!("L_alpha ∖ L_beta above 2 rho + 2, alpha={a} beta={b}"),
                Vec::<u64>::new(),
                stray,
            );
        }
    }
    Ok(())
}

fn luzin_laws(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let kb = c.top + 1;
    let fams = c.pts().map(|a| luzin_family(&h, a, kb)).collect::<Result<Vec<_>>>()?;
    for f in &fams {
        for blk in &f.blocks {
            let n = n_block(h.ty(), blk.k)?;
            c.holds(
                blk.is_subset(&n),
                || format!("A^{}_{}", blk.k, f.alpha),
                "A^k_alpha ⊆ N_k",
            );
        }
    }
    let r = c.rho_table()?;
    for b in 0..c.bound as usize {
        for a in 0..b {
            let inter = fams[a].intersection(&fams[b]);
            let size: u64 = inter.iter().map(|x| x.size()).sum();
            let rr = r[a][b];
            c.holds(
                size >= rr as u64,
                || format!("alpha={a} beta={b} size={size} rho={rr}"),
                "|A_alpha ∩ A_beta| >= rho",
            );
            let high = inter.iter().filter(|x| x.k > rr).count();
            c.eq(
                || format!("levels of A_alpha ∩ A_beta above rho, alpha={a} beta={b}"),
                0,
                high,
            );
        }
    }
    Ok(())
}

fn jones_separation(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let kb = c.top + 1;
    let r = c.rho_table()?;
    for b in 0..c.bound {
        let sep = jones_separator(&h, o(b), kb)?;
        for x in 0..c.bound {
            for k in r[x as usize][b as usize]..kb {
                let Some(blk) = a_block(&h, o(x), k + 1)? else { continue };
                if x <= b {
                    c.holds(
                        sep.covers(&blk),
                        || format!("alpha={x} beta={b} k={k}"),
                        "A^{k+1}_alpha ⊆ C_beta",
                    );
                } else {
                    c.holds(
                        !sep.meets(&blk),
                        || format!("delta={x} beta={b} k={k}"),
                        "A^{k+1}_delta ∩ C_beta = ∅",
                    );
                }
            }
        }
    }
    Ok(())
}

fn countryman_order(c: &mut Ctx) -> Result<()> {
    let mut ord = CountrymanOrder::new(&c.h);
    let n = c.bound;
    let mut less = vec![vec![false; n as usize]; n as usize];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (x, y) = (ord.cmp(o(a), o(b))?, ord.cmp(o(b), o(a))?);
            c.holds(
                x != Ordering::Equal,
                || format!("alpha={a} beta={b}"),
                "distinct points are comparable",
            );
            c.eq(
                || format!("cmp({b}, {a}) against cmp({a}, {b}) reversed"),
                x.reverse(),
                y,
            );
            less[a as usize][b as usize] = x == Ordering::Less;
        }
    }
    for (a, b, d) in (0..n as usize).tuple_combinations() {
        for p in [[a, b, d], [a, d, b], [b, a, d], [b, d, a], [d, a, b], [d, b, a]] {
            if less[p[0]][p[1]] && less[p[1]][p[2]] {
                c.holds(
                    less[p[0]][p[2]],
                    || format!("{} < {} < {}", p[0], p[1], p[2]),
                    "<_F is transitive",
                );
            }
        }
    }
    Ok(())
}

fn countryman_chains(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let mut ord = CountrymanOrder::new(&h);
    let mut classes: BTreeMap<(u64, u64, usize), Vec<(Ordinal, Ordinal)>> = BTreeMap::new();
    for b in 0..c.bound {
        for a in 0..b {
            if let Some(cl) = chain_class(&h, o(a), o(b))? {
                classes.entry(cl).or_default().push((o(a), o(b)));
            }
        }
    }
    for (cl, pairs) in &classes {
        for (p, q) in pairs.iter().tuple_combinations() {
            let first = ord.cmp(p.0, q.0)?;
            let second = ord.cmp(p.1, q.1)?;
            c.holds(
                first != second.reverse() || first == Ordering::Equal,
                || {
                    format!(
                        "class {cl:?}: ({}, {}) is {first:?} than ({}, {}) but second coordinate {second:?}",
                        p.0, p.1, q.0, q.1
                    )
                },
                "pairs of one class are comparable in the product order",
            );
        }
    }
    Ok(())
}

/// `k_f` by the definition: least `k` with `f = ρ_β` off `(β)_k` and
/// `f ≤ k` on `(β)_k`.
fn classify_by_definition(h: &SchemeHandle, node: &TreeNode, limit: usize) -> Result<Option<(usize, u64)>> {
    let top = node.beta.as_fin().ok_or(Error::DomainExceeded(node.beta))?;
    for k in 0..=limit {
        let cl = h.closure(node.beta, k)?;
        let mut ok = true;
        for x in (0..=top).map(o) {
            let v = node.value(h, x)?;
            ok &= if cl.contains(x) {
                v as usize <= k
            } else {
                v as usize == rho(h, x, node.beta)?
            };
        }
        if ok {
            return Ok(Some((k, h.norm(node.beta, k)?)));
        }
    }
    Ok(None)
}

fn tree_antichains(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let mut nodes = Vec::new();
    for b in c.pts() {
        nodes.push(aronszajn_node(&h, b, BTreeMap::new())?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let max_value = c.top as u64 + 2;
    for _ in 0..c.samples {
        let b = rng.gen_range(0..c.bound);
        let size = rng.gen_range(1..=3usize).min(b as usize + 1);
        let mut patch = BTreeMap::new();
        for x in rand::seq::index::sample(&mut rng, b as usize + 1, size) {
            let x = o(x as u64);
            let v = rng.gen_range(0..=max_value);
            if v != rho(&h, x, o(b))? as u64 {
                patch.insert(x, v);
            }
        }
        nodes.push(aronszajn_node(&h, o(b), patch)?);
    }
    nodes.sort_by(|x, y| (x.beta, &x.patch).cmp(&(y.beta, &y.patch)));
    nodes.dedup();
    let limit = c.top + max_value as usize + 1;
    let mut buckets: BTreeMap<(usize, u64), Vec<&TreeNode>> = BTreeMap::new();
    for node in &nodes {
        let got = aronszajn_classify(&h, node)?;
        let expected = classify_by_definition(&h, node, limit)?;
        c.eq(
            || format!("classify node beta={} patch={:?}", node.beta, node.patch),
            expected,
            Some(got),
        );
        buckets.entry(got).or_default().push(node);
    }
    for (key, bucket) in &buckets {
        for (x, y) in bucket.iter().tuple_combinations() {
            let comparable = x.comparable(&h, y)?;
            c.holds(
                !comparable,
                || {
                    format!(
                        "T{key:?}: beta={} patch={:?} and beta={} patch={:?}",
                        x.beta, x.patch, y.beta, y.patch
                    )
                },
                "T(k, s) is an antichain",
            );
        }
    }
    Ok(())
}

fn osc_window(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let r = c.rho_table()?;
    for b in 0..c.bound {
        for a in 0..b {
            for k in 0..=c.top {
                let rec = osc(&h, o(a), o(b), k)?;
                let rr = r[a as usize][b as usize];
                c.holds(
                    rec.set.iter().all(|&s| k <= s && s < rr),
                    || format!("alpha={a} beta={b} k={k} set={:?}", rec.set),
                    "osc set ⊆ [k, rho)",
                );
                c.eq(
                    || format!("osc count alpha={a} beta={b} k={k}"),
                    rec.set.len(),
                    rec.count,
                );
            }
        }
    }
    Ok(())
}

fn osc_base_step(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let bound = Ordinal::fin(c.bound);
    for s in 1..=c.top {
        for rec in enumerate_captured(&h, s, 2, bound, None)? {
            let (x, y) = (&rec.family[0], &rec.family[1]);
            if !x.intersection(y).is_empty() {
                continue;
            }
            let (dx, dy) = (diameter(&h, x)?, diameter(&h, y)?);
            if dx != dy || s <= dx {
                continue;
            }
            let (xs, ys): (Vec<Ordinal>, Vec<Ordinal>) = (x.iter().copied().collect(), y.iter().copied().collect());
            c.eq(
                || format!("osc_{dx}[{x}, {y}] at level {s}"),
                BTreeSet::from([0]),
                osc_sets(&h, &xs, &ys, dx)?,
            );
        }
    }
    Ok(())
}

fn coloring_laws(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let mut frontier = 0;
    for iv in partition_intervals().take(40) {
        let iv = iv?;
        c.eq(
            || format!("interval of ({}, {}) starts at the frontier", iv.n, iv.k),
            frontier,
            iv.lo,
        );
        c.eq(
            || format!("interval of ({}, {}) has length l + k + 1", iv.n, iv.k),
            2 * iv.lo + iv.k as u64,
            iv.hi,
        );
        frontier = iv.hi + 1;
    }
    let mut codes: BTreeMap<u128, u32> = BTreeMap::new();
    for b in 0..c.bound {
        for a in 0..b {
            let (x, y) = (o(a), o(b));
            let n = color_o(&h, x, y)?;
            let count = osc(&h, x, y, 0)?.count as u64;
            let block = partition_intervals()
                .map_while(|iv| iv.ok())
                .find(|iv| iv.lo <= count && count <= iv.hi)
                .map(|iv| iv.n);
            c.eq(
                || format!("o({a}, {b}) against the block of osc = {count}"),
                block,
                Some(n),
            );
            let star = color_o_star(&h, x, y)?;
            let expected = match (&star.sigma_alpha, &star.sigma_beta, decode_map(star.o)) {
                (Some(sa), Some(sb), Some(map)) => {
                    let i = map.domain.iter().position(|s| s == sa);
                    let j = map.domain.iter().position(|s| s == sb);
                    i.zip(j).map(|(i, j)| map.values[i][j])
                }
                _ => Some(crate::derived::O_STAR_DEFAULT),
            };
            c.eq(|| format!("o*({a}, {b})"), expected, Some(star.value));
            let bc = bounded_color_c(&h, x, y)?;
            let m = h.ty().m(if bc.first_case { bc.rho } else { bc.rho - 1 })?;
            c.holds(
                bc.rho >= 1 && bc.a < m,
                || format!("c({a}, {b}) = {bc:?}"),
                "components of c in range",
            );
            c.eq(|| format!("code of c({a}, {b})"), psi(y, bc.rho, bc.a)?, bc.code);
            *codes.entry(bc.code).or_default() += 1;
        }
    }
    for (code, n) in codes {
        c.holds(n <= 2, || format!("color {code} used {n} times"), "c is 2-bounded");
    }
    Ok(())
}

fn coherent_family(c: &mut Ctx) -> Result<()> {
    let h = extend_scheme(
        &c.h,
        ExtendOptions {
            fuel: c.fuel,
            initial_cut: None,
        },
    )?;
    let w = |i| Ordinal::new(1, i);
    let span = 8;
    for i in 0..span {
        chain_extend(&h, Request::Contain(w(i)))?;
    }
    for (i, j) in (0..span).tuple_combinations() {
        let (a, b) = (w(i), w(j));
        let r = rho(&h, a, b)?;
        for k in r + 1..=r + 2 {
            let rk = h.ty().r(k)?;
            for s in 0..k as u64 {
                for x in 0..rk {
                    for y in 0..rk {
                        let p = (k, s, x, y);
                        match (coherent_family_eval(&h, a, p), coherent_family_eval(&h, b, p)) {
                            (Ok(u), Ok(v)) => c.eq(|| format!("f_{a} and f_{b} at {p:?}"), u, v),
                            (Err(Error::OutOfDomain), _) | (_, Err(Error::OutOfDomain)) => {}
                            (Err(e), _) | (_, Err(e)) => return Err(e),
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn entangled_realization(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    for f in c.members(1)? {
        let vs = f
            .iter()
            .map(|&x| entangled_vector(&h, x, 2))
            .collect::<Result<Vec<_>>>()?;
        let types: BTreeSet<Ordering> = vs[1..].iter().map(|v| vs[0].cmp(v)).collect();
        c.eq(
            || format!("order types over {f}"),
            BTreeSet::from([Ordering::Less, Ordering::Greater]),
            types,
        );
    }
    Ok(())
}

fn s_space(c: &mut Ctx) -> Result<()> {
    let h = c.h.clone();
    let mut s = SSpace::new(&h);
    for b in c.pts().collect::<Vec<_>>() {
        let cb = s.c_set(b)?;
        for g in s.h_set(b)? {
            let l = match delta(&h, g, b)? {
                DeltaLevel::Level(d) => d + 1,
                DeltaLevel::Infinity => continue,
            };
            let cg = s.c_k(g, l)?;
            c.holds(
                cg.is_subset(&cb),
                || format!("beta={b} gamma={g} l={l}"),
                "C_l(gamma) ⊆ C(beta)",
            );
        }
        for k in 0..=c.top {
            let (hi, lo) = (s.c_k(b, k + 1)?, s.c_k(b, k)?);
            c.holds(
                hi.is_subset(&lo),
                || format!("beta={b} k={k}"),
                "C_{k+1}(beta) ⊆ C_k(beta)",
            );
        }
    }
    Ok(())
}

/// The request log used by `extension-chain` and `extend run`: two IH₁
/// requests, every ground member of level at most 3 below the initial cut
/// point, then `count` new points and the ground points below the cut.
pub fn demo_requests(ground: &SchemeHandle, count: u64) -> Result<Vec<Request>> {
    let cut_at = crate::extension::DEFAULT_CUT_OFFSET;
    let mut reqs = vec![
        Request::Ih1 {
            alpha: o(2),
            set: set(&[0, 3]),
        },
        Request::Ih1 {
            alpha: o(1),
            set: set(&[0]),
        },
    ];
    for k in 0..=3 {
        if ground.ty().m_opt(k)?.is_none_or(|m| m > cut_at) {
            break;
        }
        for f in level_iter(ground, k, o(cut_at))? {
            reqs.push(Request::IncludeF(f?));
        }
    }
    reqs.extend((0..count).map(|i| Request::Contain(Ordinal::new(1, i))));
    reqs.extend((0..cut_at).map(|i| Request::Contain(o(i))));
    Ok(reqs)
}

/// Number of new points requested by [`demo_requests`] in the suite.
pub const DEMO_NEW_POINTS: u64 = 160;

fn extension_chain(c: &mut Ctx) -> Result<()> {
    let ground = c.h.clone();
    let t = ground.ty().clone();
    let h = extend_scheme(
        &ground,
        ExtendOptions {
            fuel: c.fuel,
            initial_cut: None,
        },
    )?;
    let ext = h.extension().expect("extension handle").clone();
    let gamma = ext.gamma();
    for req in demo_requests(&ground, DEMO_NEW_POINTS)? {
        let tip = match chain_extend(&h, req.clone()) {
            Ok(tip) => tip,
            Err(e) => {
                c.fail(format!("{req:?}"), "request served".into(), e.to_string());
                continue;
            }
        };
        match &req {
            Request::Contain(a) => c.holds(tip.set.contains(*a), || format!("{req:?}"), "alpha ∈ tip"),
            Request::IncludeF(f) => {
                let ok = cond_leq_runs(&t, &tip.set, &RunSet::from_set(f))?;
                c.holds(ok, || format!("{req:?}"), "F ∈ F(tip)");
            }
            Request::Ih1 { alpha, set } => {
                let p0 = decompose_runs(&tip.set, &t, tip.level)?.swap_remove(0);
                let root = tip.set.take(t.r(tip.level)?);
                c.holds(tip.set.contains(*alpha), || format!("{req:?}"), "alpha ∈ p");
                c.holds(set.iter().all(|&x| p0.contains(x)), || format!("{req:?}"), "A ⊆ p_0");
                c.eq(|| format!("alpha ∩ p for {req:?}"), root, tip.set.below(*alpha));
            }
        }
    }
    let conds = ext.conditions();
    for (i, p) in conds.iter().enumerate() {
        c.holds(
            is_condition_runs(&ground, gamma, &p.set)?,
            || format!("condition {i}: {:?}", p.set),
            "tips are conditions",
        );
        if i > 0 {
            let ok = cond_leq_runs(&t, &p.set, &conds[i - 1].set)?;
            c.holds(ok, || format!("conditions {} and {i}", i - 1), "p_{i+1} <= p_i");
        }
        let ps = p.set.to_set();
        let Some(top) = ps.below(gamma).max() else { continue };
        let f = red(&ps, gamma);
        let back = cut(&ground, &f, top.succ(), gamma)?;
        c.eq(|| format!("Cut(red(p)) for condition {i}"), ps.clone(), back.clone());
        c.eq(
            || format!("red(Cut(F)) for F = red(p), condition {i}"),
            f,
            red(&back, gamma),
        );
    }
    if let Some(tip) = ext.tip() {
        let levels = produced_members(&ext, tip.level)?;
        let sets: Vec<Vec<FinOrdSet>> = levels
            .iter()
            .map(|(_, ms)| ms.iter().map(RunSet::to_set).collect())
            .collect();
        for (k, ms) in sets.iter().enumerate() {
            let m = t.m(k)?;
            for f in ms {
                c.eq(|| format!("size of produced member {f}"), m, f.len() as u64);
            }
            for (e, f) in ms.iter().tuple_combinations() {
                let i = e.intersection(f);
                c.holds(
                    i.is_initial_segment_of(e) && i.is_initial_segment_of(f),
                    || format!("E={e} F={f}"),
                    "E ∩ F ⊑ E, F",
                );
            }
            if k > 0 {
                let lower: HashSet<&FinOrdSet> = sets[k - 1].iter().collect();
                for f in ms {
                    let mut is_piece = |p: &FinOrdSet| Ok(lower.contains(p));
                    check_decomposition(c, f, &mut is_piece)?;
                }
            }
        }
    }
    let original = export_chain(&h, 2)?;
    let replayed = export_chain(&replay(&ext.log())?, 2)?;
    c.holds(
        original == replayed,
        || "replay of the chain log".into(),
        "byte-identical export",
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::tau2;

    #[test]
    fn empty_selection_gives_empty_report() {
        assert!(run_suite(Some(&[]), "tau2", &SuiteParams::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unknown_check_is_rejected() {
        let names = vec!["no-such-check".to_string()];
        assert!(matches!(
            run_suite(Some(&names), "tau2", &SuiteParams::default()),
            Err(Error::UnknownCheck(_))
        ));
    }

    #[test]
    fn fault_breaks_closure_coherence() {
        let h = SchemeHandle::omega_with_fault(&tau2(), 2);
        let names = vec!["closure-coherence".to_string()];
        let reports = run_suite_on(&h, "tau2+fault", Some(&names), &SuiteParams::default()).unwrap();
        assert!(!reports[0].pass);
        assert!(!reports[0].counterexamples.is_empty());
    }

    #[test]
    fn default_bounds() {
        assert_eq!(default_bound(&tau2()).unwrap(), 10);
        assert_eq!(default_bound(&crate::type_system::tau4()).unwrap(), 52);
        assert_eq!(default_bound(&crate::type_system::tau_e()).unwrap(), 27);
    }

    fn assert_suite_passes(preset: &str, bound: Option<u64>) {
        let params = SuiteParams {
            bound,
            ..SuiteParams::default()
        };
        let reports = run_suite(None, preset, &params).unwrap();
        let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn tau2_suite_passes() {
        assert_suite_passes("tau2", Some(10));
    }

    #[test]
    fn tau4_suite_passes() {
        assert_suite_passes("tau4", None);
    }

    #[test]
    fn tau_e_suite_passes() {
        assert_suite_passes("tauE", None);
    }

    #[test]
    fn tau_s_suite_passes() {
        assert_suite_passes("tauS", None);
    }

    #[test]
    fn names_are_unique() {
        assert_eq!(check_names().unique().count(), CHECKS.len());
    }
}
