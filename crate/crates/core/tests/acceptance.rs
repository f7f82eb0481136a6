//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Every comparison below is exact; there are no numeric tolerances.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::process::ExitCode;

use itertools::Itertools;
use scheme_forge_core::capture::{bracket_projection, pi_n, square_bracket};
use scheme_forge_core::derived::luzin::a_block;
use scheme_forge_core::derived::{
    aronszajn_classify, aronszajn_node, color_o, color_o_star, entangled_eval, entangled_vector, hausdorff_gap, osc,
    CountrymanOrder, LuzinBlock, SSpace, O_STAR_DEFAULT,
};
use scheme_forge_core::harness::checks::{demo_requests, run_suite, CheckReport, SuiteParams, DEMO_NEW_POINTS};
use scheme_forge_core::type_system::{tau2, tau_e};
use scheme_forge_core::{FinOrdSet, Ordinal, SchemeHandle};

/// Seed of the random tree patches.
const SEED: u64 = 0;
/// Random tree patches on top of the exhaustive nodes.
const PATCHES: usize = 100;
/// Window of the bounded-coloring scan in τ₄.
const COLORING_WINDOW: u64 = 13;
/// Minimum number of requests served by the extension chain.
const MIN_REQUESTS: usize = 200;

fn o(i: u64) -> Ordinal {
    Ordinal::fin(i)
}

fn set(v: &[u64]) -> FinOrdSet {
    FinOrdSet::nat(v.iter().copied())
}

/// Collects the named facts of one criterion.
#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
}

impl Criterion {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn equal<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, expected: T, got: T) {
        if expected != got {
            self.failures
                .push(format!("{what}: expected {expected:?}, got {got:?}"));
        }
    }

    fn checks(&mut self, preset: &str, bound: u64, names: &[&str]) {
        self.checks_with(
            preset,
            SuiteParams {
                bound: Some(bound),
                ..SuiteParams::default()
            },
            names,
        );
    }

    fn checks_with(&mut self, preset: &str, params: SuiteParams, names: &[&str]) {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        match run_suite(Some(&names), preset, &params) {
            Ok(reports) => reports.iter().for_each(|r| self.report(r)),
            Err(e) => self.failures.push(format!("{preset}: suite error {e}")),
        }
    }

    fn report(&mut self, r: &CheckReport) {
        let label = format!("{} on {} below {}", r.name, r.preset, r.bound);
        self.expect(!r.skipped, format!("{label}: skipped"));
        self.expect(r.cases > 0, format!("{label}: no cases"));
        if !r.pass {
            let first = r
                .counterexamples
                .first()
                .map(|c| format!("{}: expected {}, got {}", c.input, c.expected, c.got));
            self.failures.push(format!(
                "{label}: {} failures, first {}",
                r.failures,
                first.unwrap_or_default()
            ));
        }
    }

    fn result<E: std::fmt::Display>(&mut self, what: &str, r: Result<(), E>) {
        if let Err(e) = r {
            self.failures.push(format!("{what}: {e}"));
        }
    }
}

type Outcome = scheme_forge_core::Result<()>;
type CriterionFn = fn(&mut Criterion);

fn metric_suite(c: &mut Criterion) {
    let names = [
        "metric-axioms",
        "closure-laws",
        "closure-coherence",
        "xi-lemma",
        "delta-norms",
        "delta-transitivity",
    ];
    c.checks("tau2", 10, &names);
    c.checks("tau4", 52, &names);
}

fn oracle_equivalence(c: &mut Criterion) {
    c.checks(
        "tau2",
        10,
        &[
            "oracle-equivalence",
            "unique-scheme",
            "decomposition",
            "level-coherence",
        ],
    );
    c.checks("tau4", 52, &["oracle-equivalence", "unique-scheme"]);
}

fn capturing(c: &mut Criterion) {
    c.checks("tau2", 10, &["capture-criterion", "capture-sets", "bracket-constant"]);
    let h = SchemeHandle::omega(&tau2());
    let r: Outcome = (|| {
        c.equal(
            "pi_2({1,2,4,5})",
            BTreeSet::from([2, 3]),
            pi_n(&h, &set(&[1, 2, 4, 5]), 2)?,
        );
        c.equal(
            "bracket projection of {1,2,4,5}",
            BTreeSet::from([o(2), o(3), o(5)]),
            bracket_projection(&h, &set(&[1, 2, 4, 5]))?,
        );
        c.equal("[[2, 5]]", o(3), square_bracket(&h, o(2), o(5))?);
        Ok(())
    })();
    c.result("capture values", r);
}

fn gap_suite(c: &mut Criterion) {
    c.checks("tau2", 10, &["gap-laws"]);
    let h = SchemeHandle::omega(&tau2());
    let r: Outcome = (|| {
        let (g2, g5) = (hausdorff_gap(&h, o(2), 6, None)?, hausdorff_gap(&h, o(5), 6, None)?);
        let below8 = |s: &BTreeSet<u64>| s.range(..8).copied().collect::<BTreeSet<_>>();
        c.equal("L_5 ∩ [0, 8)", BTreeSet::from([3, 5, 7]), below8(&g5.left));
        c.equal("R_5 ∩ [0, 8)", BTreeSet::from([2, 4, 6]), below8(&g5.right));
        c.equal(
            "L_2 ∩ R_5",
            BTreeSet::from([6]),
            g2.left.intersection(&g5.right).copied().collect(),
        );
        Ok(())
    })();
    c.result("gap values", r);
}

fn luzin_suite(c: &mut Criterion) {
    c.checks("tau2", 10, &["luzin-laws", "jones-separation"]);
    let h = SchemeHandle::omega(&tau2());
    match a_block(&h, o(5), 3) {
        Ok(b) => c.equal(
            "A^3_5",
            Some(LuzinBlock {
                k: 3,
                a: (0, 3),
                b: (15, 18),
            }),
            b,
        ),
        Err(e) => c.expect(false, format!("A^3_5: {e}")),
    }
}

fn countryman(c: &mut Criterion) {
    c.checks("tau2", 10, &["countryman-order", "countryman-chains"]);
    let h = SchemeHandle::omega(&tau2());
    let m3 = 6;
    let mut ord = CountrymanOrder::new(&h);
    let r: Outcome = (|| {
        let mut transitive = 0;
        for (a, b, d) in (0..m3).tuple_combinations() {
            let pts = [o(a), o(b), o(d)];
            let mut ok = true;
            for p in pts.iter().permutations(3) {
                let (x, y, z) = (*p[0], *p[1], *p[2]);
                if ord.cmp(x, y)? == Ordering::Less && ord.cmp(y, z)? == Ordering::Less {
                    ok &= ord.cmp(x, z)? == Ordering::Less;
                }
            }
            transitive += usize::from(ok);
        }
        c.equal("transitive triples below m_3", 20, transitive);
        c.equal("4 against 5", Ordering::Less, ord.cmp(o(4), o(5))?);
        c.equal("2 against 4", Ordering::Less, ord.cmp(o(2), o(4))?);
        Ok(())
    })();
    c.result("countryman values", r);
}

fn tree(c: &mut Criterion) {
    let params = SuiteParams {
        bound: Some(10),
        seed: SEED,
        samples: PATCHES,
        ..SuiteParams::default()
    };
    c.checks_with("tau2", params, &["tree-antichains"]);
    let h = SchemeHandle::omega(&tau2());
    let r: Outcome = (|| {
        let plain = aronszajn_node(&h, o(5), Default::default())?;
        c.equal("classify(rho_5)", (0, 0), aronszajn_classify(&h, &plain)?);
        let patched = aronszajn_node(&h, o(5), [(o(0), 7)].into())?;
        c.equal(
            "classify(rho_5 with f(0) = 7)",
            (7, 5),
            aronszajn_classify(&h, &patched)?,
        );
        Ok(())
    })();
    c.result("tree values", r);
}

fn oscillation(c: &mut Criterion) {
    c.checks("tau2", 10, &["osc-window", "osc-base-step", "coloring-laws"]);
    c.checks("tau4", COLORING_WINDOW, &["coloring-laws"]);
    let h = SchemeHandle::omega(&tau2());
    let r: Outcome = (|| {
        c.equal("osc(2, 4)", 1, osc(&h, o(2), o(4), 0)?.count);
        c.equal("o(2, 4)", 0, color_o(&h, o(2), o(4))?);
        for b in 0..10 {
            for a in 0..b {
                let v = color_o_star(&h, o(a), o(b))?;
                let no_extension = v.sigma_alpha.is_none() || v.sigma_beta.is_none();
                c.equal(
                    &format!("o*({a}, {b}) is 17 exactly without an extension"),
                    no_extension,
                    v.value == O_STAR_DEFAULT,
                );
            }
        }
        Ok(())
    })();
    c.result("oscillation values", r);
}

fn extension(c: &mut Criterion) {
    let h = SchemeHandle::omega(&tau2());
    match demo_requests(&h, DEMO_NEW_POINTS) {
        Ok(reqs) => c.expect(reqs.len() >= MIN_REQUESTS, format!("only {} requests", reqs.len())),
        Err(e) => c.expect(false, format!("request log: {e}")),
    }
    c.checks("tau2", 10, &["extension-chain", "coherent-family"]);
}

fn entangled(c: &mut Criterion) {
    c.checks("tauE", 27, &["entangled-realization"]);
    let h = SchemeHandle::omega(&tau_e());
    let r: Outcome = (|| {
        c.equal("f_2(1)", 2, entangled_eval(&h, o(2), 1)?);
        c.equal("f_1(1)", -1, entangled_eval(&h, o(1), 1)?);
        let (f0, f1, f2) = (
            entangled_vector(&h, o(0), 2)?,
            entangled_vector(&h, o(1), 2)?,
            entangled_vector(&h, o(2), 2)?,
        );
        c.expect(
            f1 < f0 && f0 < f2,
            format!("f_1 < f_0 < f_2 fails: {f1:?}, {f0:?}, {f2:?}"),
        );
        Ok(())
    })();
    c.result("entangled values", r);
}

fn s_space(c: &mut Criterion) {
    c.checks("tau2", 10, &["s-space"]);
    let h = SchemeHandle::omega(&tau2());
    let mut s = SSpace::new(&h);
    let r: Outcome = (|| {
        c.equal("H(5)", BTreeSet::from([o(2), o(3), o(4)]), s.h_set(o(5))?);
        c.equal("C(1)", BTreeSet::from([o(0), o(1)]), s.c_set(o(1))?);
        Ok(())
    })();
    c.result("s-space values", r);
}

fn main() -> ExitCode {
    let criteria: [(&str, CriterionFn); 11] = [
        ("metric and Xi laws, tau2 below 10 and tau4 below 52", metric_suite),
        ("rho agrees with brute-force membership", oracle_equivalence),
        ("capture criterion and bracket values", capturing),
        ("Hausdorff gap laws and values", gap_suite),
        ("Luzin and Jones laws, A^3_5", luzin_suite),
        ("Countryman order and chains", countryman),
        ("tree antichains with seeded patches", tree),
        ("oscillation and colorings", oscillation),
        ("extension chain of at least 200 requests", extension),
        ("entangled realization in tauE", entangled),
        ("S-space sets", s_space),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut c = Criterion::default();
        run(&mut c);
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {status} {name}", i + 1);
        for f in &c.failures {
            println!("    {f}");
        }
        failed += usize::from(!c.failures.is_empty());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
