//! The `scheme-forge` command line.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation errors,
//! 2 on usage errors (bad flags, unparsable ordinals, unknown presets).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::capture::{bracket_projection, captured_scan, is_captured, pi_n, square_bracket};
use crate::derived::luzin::FinitePoset;
use crate::derived::{
    aronszajn_classify, aronszajn_node, bounded_color_c, coherent_tree_eval, color_o, color_o_star, countryman_cmp,
    entangled_vector, gap_pair_data, hausdorff_gap, jones_separator, luzin_family, luzin_representation, osc,
    s_space_sets,
};
use crate::error::{Error, Result};
use crate::extension::{
    chain_extend, export_chain, extend_scheme, replay, ChainLog, ExtendOptions, Request, DEFAULT_FUEL,
};
use crate::harness::checks::{default_bound, demo_requests, run_suite_on, CheckReport, SuiteParams};
use crate::harness::io::{write_coloring_csv, write_norm_csv, write_pair_metric_csv, FragmentCache};
use crate::metric::{ball, delta, rho};
use crate::scheme_core::{
    export_fragment, fragment_to_json, import_fragment, is_member, member_level, FinOrdSet, Ordinal, RunSet,
    SchemeHandle,
};
use crate::type_system::{is_good, preset, PartitionSpec, TypeDescriptor, TypeSpec};

#[derive(Debug, Parser)]
#[command(name = "scheme-forge", version, about = "Construction schemes on finite fragments")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GlobalArgs {
    /// Preset name (tau2, tau4, tauE, tauS) or a JSON type descriptor file.
    #[arg(long = "type", global = true, value_name = "PRESET|FILE")]
    #[serde(rename = "type")]
    ty: Option<String>,
    /// Exclusive bound on the ordinals a command ranges over.
    #[arg(long, global = true)]
    bound: Option<u64>,
    #[arg(long, global = true)]
    fuel: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON file with defaults for the flags above.
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect a type.
    #[command(subcommand)]
    Type(TypeCmd),
    /// Membership, closures and fragments.
    #[command(subcommand)]
    Scheme(SchemeCmd),
    /// The ordinal metric.
    #[command(subcommand)]
    Metric(MetricCmd),
    /// Captured families.
    #[command(subcommand)]
    Capture(CaptureCmd),
    /// Extensions of the scheme over ω to ω·2.
    #[command(subcommand)]
    Extend(ExtendCmd),
    /// Derived structures.
    #[command(subcommand)]
    Derive(DeriveCmd),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
enum TypeCmd {
    /// Check that the type is well formed and report goodness.
    Validate {
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Table of `m_k`, `n_k`, `r_k`.
    Show {
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
}

#[derive(Debug, Subcommand)]
enum SchemeCmd {
    /// Is the set a member, and of which level.
    Member {
        #[arg(value_parser = parse_set)]
        set: FinOrdSet,
    },
    /// Norms, Ξ and closures of an ordinal.
    Levels {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        #[arg(long, default_value_t = 4)]
        max_level: usize,
    },
    /// Export every member below the bound as JSON.
    Export,
    /// Load an exported fragment and summarize it.
    Import { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum MetricCmd {
    Rho {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        #[arg(value_parser = parse_ordinal)]
        beta: Ordinal,
    },
    Delta {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        #[arg(value_parser = parse_ordinal)]
        beta: Ordinal,
    },
    /// The closure `(α)_k` with norm and Ξ.
    Ball {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        k: usize,
    },
    /// CSV table of all pairs (or all norms) below the bound.
    Table {
        #[arg(long, value_enum, default_value_t = TableKind::Pairs)]
        kind: TableKind,
        #[arg(long, default_value_t = 4)]
        max_level: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    Pairs,
    Norms,
}

#[derive(Debug, Subcommand)]
enum CaptureCmd {
    /// Captured `n`-subsets of a set.
    Scan {
        #[arg(value_parser = parse_set)]
        set: FinOrdSet,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        min_level: usize,
        #[arg(long, default_value_t = 6)]
        max_level: usize,
    },
    /// Check whether the given sets form a family captured at `level`.
    Family {
        level: usize,
        #[arg(value_parser = parse_set, required = true, num_args = 2..)]
        sets: Vec<FinOrdSet>,
    },
    /// Levels at which `n`-subsets of the set are captured.
    Pi {
        #[arg(value_parser = parse_set)]
        set: FinOrdSet,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// `⟦α, β⟧`, or with `--set` the projection of all pairs of a set.
    Bracket {
        #[arg(value_parser = parse_ordinal, num_args = 0..=2)]
        points: Vec<Ordinal>,
        #[arg(long, value_parser = parse_set, conflicts_with = "points")]
        set: Option<FinOrdSet>,
    },
}

#[derive(Debug, Subcommand)]
enum ExtendCmd {
    /// Grow a chain and print its log.
    Run {
        /// JSON array of requests; without it the demonstration log is used.
        #[arg(long)]
        requests: Option<PathBuf>,
        /// New points `ω + i` requested by the demonstration log.
        #[arg(long, default_value_t = 160)]
        points: u64,
    },
    /// Rebuild a chain from its log and export it.
    Replay {
        log: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_level: usize,
    },
}

#[derive(Debug, Subcommand)]
enum DeriveCmd {
    /// `L_α` and `R_α`, or pair data for two ordinals.
    Gap {
        #[arg(value_parser = parse_ordinal, num_args = 1..=2, required = true)]
        points: Vec<Ordinal>,
        #[arg(long, default_value_t = 6)]
        k: usize,
    },
    /// The blocks of `A_α`, or with `--separator` the set `C_β`.
    Luzin {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long)]
        separator: bool,
    },
    /// Representation of a finite poset on `0..n` through an embedding.
    Rep {
        /// Relations such as `0<1,1<2`.
        #[arg(long, default_value = "")]
        less: String,
        #[arg(long, value_parser = parse_set)]
        phi: FinOrdSet,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    Countryman {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        #[arg(value_parser = parse_ordinal)]
        beta: Ordinal,
    },
    /// Classify the node `ρ_β` modified by `--patch x=v,...`.
    Tree {
        #[arg(value_parser = parse_ordinal)]
        beta: Ordinal,
        #[arg(long, value_parser = parse_patch, default_value = "")]
        patch: BTreeMap<Ordinal, u64>,
    },
    Osc {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        #[arg(value_parser = parse_ordinal)]
        beta: Ordinal,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// `o`, `o*` and `c` of a pair, or with `--table` all pairs as CSV.
    Color {
        #[arg(value_parser = parse_ordinal, num_args = 0..=2)]
        points: Vec<Ordinal>,
        #[arg(long)]
        table: bool,
    },
    /// `(f_α(1), …, f_α(len))`.
    Entangled {
        #[arg(value_parser = parse_ordinal)]
        alpha: Ordinal,
        #[arg(long, default_value_t = 4)]
        len: usize,
    },
    /// `f_β(ξ)` of the coherent tree under the parity partition.
    SuslinFn {
        #[arg(value_parser = parse_ordinal)]
        beta: Ordinal,
        #[arg(value_parser = parse_ordinal)]
        xi: Ordinal,
    },
    Sspace {
        #[arg(value_parser = parse_ordinal)]
        beta: Ordinal,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run only these checks; repeatable.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Random tree nodes added to the exhaustive ones.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Rotate the pieces used at this level to exercise the failure path.
    #[arg(long, hide = true)]
    inject_fault: Option<usize>,
}

fn parse_ordinal(s: &str) -> std::result::Result<Ordinal, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_set(s: &str) -> std::result::Result<FinOrdSet, String> {
    let s = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut v: Vec<Ordinal> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_ordinal)
        .collect::<std::result::Result<_, _>>()?;
    v.sort();
    v.dedup();
    Ok(FinOrdSet::from(v))
}

fn parse_patch(s: &str) -> std::result::Result<BTreeMap<Ordinal, u64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (x, v) = p.split_once('=').ok_or_else(|| format!("expected x=v, got {p:?}"))?;
            Ok((
                parse_ordinal(x.trim())?,
                v.trim().parse::<u64>().map_err(|e| e.to_string())?,
            ))
        })
        .collect()
}

fn parse_relations(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once('<')
                .ok_or_else(|| Error::Parse(format!("expected a<b, got {p:?}")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{x:?}: {e}")))
            };
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

/// Settings after merging the config file under the command-line flags.
struct Settings {
    ty: TypeSpec,
    label: String,
    bound: Option<u64>,
    fuel: u64,
    seed: u64,
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl Settings {
    fn resolve(flags: GlobalArgs) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => serde_json::from_str::<GlobalArgs>(&std::fs::read_to_string(path)?)?,
            None => GlobalArgs::default(),
        };
        let ty_arg = flags.ty.or(file.ty).unwrap_or_else(|| "tau2".into());
        let (ty, label) = load_type(&ty_arg)?;
        Ok(Settings {
            ty,
            label,
            bound: flags.bound.or(file.bound),
            fuel: flags.fuel.or(file.fuel).unwrap_or(DEFAULT_FUEL),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            format: flags.format.or(file.format),
            out: flags.out.or(file.out),
        })
    }

    fn bound(&self) -> Result<u64> {
        match self.bound {
            Some(b) => Ok(b),
            None => default_bound(&self.ty),
        }
    }

    fn omega(&self) -> SchemeHandle {
        SchemeHandle::omega(&self.ty)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(std::fs::File::create(path)?),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    /// Prints `text` by default and the JSON form under `--format json`.
    fn emit<T: Serialize>(&self, value: &T, text: impl Display) -> Result<()> {
        let mut w = self.sink()?;
        match self.format {
            Some(Format::Json) => writeln!(w, "{}", serde_json::to_string_pretty(value)?)?,
            Some(Format::Csv) => return Err(Error::Parse("this command has no CSV form".into())),
            None => writeln!(w, "{text}")?,
        }
        Ok(())
    }

    /// Structured output with pretty JSON as the text form.
    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        self.emit(value, serde_json::to_string_pretty(value)?)
    }

    fn emit_raw(&self, text: &str) -> Result<()> {
        let mut w = self.sink()?;
        writeln!(w, "{text}")?;
        Ok(())
    }
}

fn load_type(arg: &str) -> Result<(TypeSpec, String)> {
    match preset(arg) {
        Ok(t) => Ok((t, arg.to_string())),
        Err(Error::UnknownPreset(_)) if Path::new(arg).is_file() => {
            let d: TypeDescriptor = serde_json::from_str(&std::fs::read_to_string(arg)?)?;
            let t = TypeSpec::from_descriptor(&d)?;
            let label = t.name().unwrap_or(arg).to_string();
            Ok((t, label))
        }
        Err(e) => Err(e),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::UnknownPreset(_) | Error::UnknownCheck(_) | Error::InvalidType(_) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let s = Settings::resolve(cli.global)?;
    match cli.command {
        Command::Type(cmd) => type_cmd(&s, cmd)?,
        Command::Scheme(cmd) => scheme_cmd(&s, cmd)?,
        Command::Metric(cmd) => metric_cmd(&s, cmd)?,
        Command::Capture(cmd) => capture_cmd(&s, cmd)?,
        Command::Extend(cmd) => extend_cmd(&s, cmd)?,
        Command::Derive(cmd) => derive_cmd(&s, cmd)?,
        Command::Verify(args) => return verify(&s, args),
    }
    Ok(0)
}

#[derive(Serialize)]
struct LevelRow {
    k: usize,
    m: Option<u64>,
    n: Option<u64>,
    r: u64,
}

fn level_rows(t: &TypeSpec, levels: usize) -> Result<Vec<LevelRow>> {
    (0..=levels)
        .map(|k| {
            let l = t.level(k)?;
            Ok(LevelRow {
                k,
                m: l.m,
                n: l.n,
                r: l.r,
            })
        })
        .collect()
}

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "overflow".into(), |x| x.to_string())
}

fn type_cmd(s: &Settings, cmd: TypeCmd) -> Result<()> {
    match cmd {
        TypeCmd::Validate { levels } => {
            let t = s.ty.validate()?;
            let good = is_good(&t, levels);
            #[derive(Serialize)]
            struct Out<'a> {
                name: &'a str,
                valid: bool,
                two_type: bool,
                goodness: crate::type_system::Goodness,
            }
            let out = Out {
                name: &s.label,
                valid: true,
                two_type: t.is_two_type(),
                goodness: good.clone(),
            };
            s.emit(&out, format!("{}: valid, {good:?}", s.label))
        }
        TypeCmd::Show { levels } => {
            let rows = level_rows(&s.ty, levels)?;
            if s.format == Some(Format::Csv) {
                let mut w = csv::Writer::from_writer(s.sink()?);
                w.write_record(["k", "m", "n", "r"])
                    .map_err(|e| Error::Io(e.to_string()))?;
                for r in &rows {
                    w.write_record([r.k.to_string(), opt(r.m), opt(r.n), r.r.to_string()])
                        .map_err(|e| Error::Io(e.to_string()))?;
                }
                w.flush()?;
                return Ok(());
            }
            let text = rows
                .iter()
                .map(|r| format!("k={} m={} n={} r={}", r.k, opt(r.m), opt(r.n), r.r))
                .collect::<Vec<_>>()
                .join("\n");
            s.emit(&rows, text)
        }
    }
}

fn scheme_cmd(s: &Settings, cmd: SchemeCmd) -> Result<()> {
    let h = s.omega();
    match cmd {
        SchemeCmd::Member { set } => {
            let member = is_member(&h, &set)?;
            let level = if member {
                member_level(&h, &RunSet::from_set(&set))?
            } else {
                None
            };
            #[derive(Serialize)]
            struct Out {
                member: bool,
                level: Option<usize>,
            }
            let text = match level {
                Some(l) => format!("member of level {l}"),
                None => "not a member".into(),
            };
            s.emit(&Out { member, level }, text)
        }
        SchemeCmd::Levels { alpha, max_level } => {
            #[derive(Serialize)]
            struct Row {
                k: usize,
                norm: u64,
                xi: i64,
                closure: FinOrdSet,
            }
            let rows = (0..=max_level)
                .map(|k| {
                    Ok(Row {
                        k,
                        norm: h.norm(alpha, k)?,
                        xi: h.xi(alpha, k)?,
                        closure: h.closure_set(alpha, k)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let text = rows
                .iter()
                .map(|r| format!("k={} norm={} xi={} closure={}", r.k, r.norm, r.xi, r.closure))
                .collect::<Vec<_>>()
                .join("\n");
            s.emit(&rows, text)
        }
        SchemeCmd::Export => {
            let bound = s.bound()?;
            let json = match FragmentCache::from_env() {
                Some(cache) => cache.fragment_json(&h, bound)?,
                None => fragment_to_json(&export_fragment(&h, bound)?)?,
            };
            s.emit_raw(&json)
        }
        SchemeCmd::Import { file } => {
            let json = std::fs::read_to_string(file)?;
            let back = import_fragment(&json)?;
            let file: crate::scheme_core::FragmentFile = serde_json::from_str(&json)?;
            #[derive(Serialize)]
            struct Out {
                name: Option<String>,
                bound: u64,
                levels: BTreeMap<usize, usize>,
            }
            let levels = file.levels.iter().map(|(k, ms)| (*k, ms.len())).collect();
            let out = Out {
                name: back.ty().name().map(str::to_string),
                bound: file.bound,
                levels,
            };
            s.emit_json(&out)
        }
    }
}

fn metric_cmd(s: &Settings, cmd: MetricCmd) -> Result<()> {
    let h = s.omega();
    match cmd {
        MetricCmd::Rho { alpha, beta } => {
            let r = rho(&h, alpha, beta)?;
            s.emit(&r, r)
        }
        MetricCmd::Delta { alpha, beta } => {
            let d = delta(&h, alpha, beta)?;
            let text = d.level().map_or_else(|| "inf".to_string(), |k| k.to_string());
            s.emit(&d, text)
        }
        MetricCmd::Ball { alpha, k } => {
            let b = ball(&h, alpha, k)?;
            let text = format!("{} norm={} xi={}", b.set.to_set(), b.norm, b.xi);
            s.emit(&b, text)
        }
        MetricCmd::Table { kind, max_level } => {
            let bound = s.bound()?;
            let w = s.sink()?;
            match kind {
                TableKind::Pairs => write_pair_metric_csv(&h, bound, w),
                TableKind::Norms => write_norm_csv(&h, bound, max_level, w),
            }
        }
    }
}

fn capture_cmd(s: &Settings, cmd: CaptureCmd) -> Result<()> {
    let h = s.omega();
    match cmd {
        CaptureCmd::Scan {
            set,
            n,
            min_level,
            max_level,
        } => {
            let recs = captured_scan(&h, &set, n, min_level..=max_level)?;
            s.emit_json(&recs)
        }
        CaptureCmd::Family { level, sets } => {
            let outcome = is_captured(&h, &sets, level)?;
            let text = if outcome.is_captured() {
                "captured"
            } else {
                "not captured"
            };
            s.emit(&outcome, text)
        }
        CaptureCmd::Pi { set, n } => {
            let levels = pi_n(&h, &set, n)?;
            let text = format!("{levels:?}");
            s.emit(&levels, text)
        }
        CaptureCmd::Bracket { points, set } => match (set, points.as_slice()) {
            (Some(set), _) => {
                let proj = bracket_projection(&h, &set)?;
                let text = FinOrdSet::from_iter(proj.iter().copied()).to_string();
                s.emit(&proj, text)
            }
            (None, &[a, b]) => {
                let v = square_bracket(&h, a.min(b), a.max(b))?;
                s.emit(&v, v)
            }
            _ => Err(Error::Parse("bracket takes two ordinals or --set".into())),
        },
    }
}

fn extend_cmd(s: &Settings, cmd: ExtendCmd) -> Result<()> {
    match cmd {
        ExtendCmd::Run { requests, points } => {
            let ground = s.omega();
            let reqs: Vec<Request> = match requests {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => demo_requests(&ground, points)?,
            };
            let h = extend_scheme(
                &ground,
                ExtendOptions {
                    fuel: s.fuel,
                    initial_cut: None,
                },
            )?;
            for req in reqs {
                chain_extend(&h, req)?;
            }
            let log = h.extension().expect("extension handle").log();
            s.emit_raw(&serde_json::to_string_pretty(&log)?)
        }
        ExtendCmd::Replay { log, max_level } => {
            let log: ChainLog = serde_json::from_str(&std::fs::read_to_string(log)?)?;
            s.emit_raw(&export_chain(&replay(&log)?, max_level)?)
        }
    }
}

fn derive_cmd(s: &Settings, cmd: DeriveCmd) -> Result<()> {
    let h = s.omega();
    match cmd {
        DeriveCmd::Gap { points, k } => match points.as_slice() {
            [a] => s.emit_json(&hausdorff_gap(&h, *a, k, None)?),
            [a, b] => s.emit_json(&gap_pair_data(&h, *a, *b, k)?),
            _ => unreachable!("clap enforces one or two points"),
        },
        DeriveCmd::Luzin { alpha, k, separator } => {
            if separator {
                s.emit_json(&jones_separator(&h, alpha, k)?)
            } else {
                s.emit_json(&luzin_family(&h, alpha, k)?)
            }
        }
        DeriveCmd::Rep { less, phi, k } => {
            let n = phi.len();
            let poset = FinitePoset::from_relations(n, &parse_relations(&less)?)?;
            s.emit_json(&luzin_representation(&h, &poset, phi.as_slice(), k)?)
        }
        DeriveCmd::Countryman { alpha, beta } => {
            let r = countryman_cmp(&h, alpha, beta)?;
            let sign = match r.ordering {
                std::cmp::Ordering::Less => "<",
                std::cmp::Ordering::Equal => "=",
                std::cmp::Ordering::Greater => ">",
            };
            let text = format!("{alpha} {sign} {beta}");
            s.emit(&r, text)
        }
        DeriveCmd::Tree { beta, patch } => {
            let node = aronszajn_node(&h, beta, patch)?;
            let (k, sv) = aronszajn_classify(&h, &node)?;
            #[derive(Serialize)]
            struct Out {
                node: crate::derived::TreeNode,
                k: usize,
                s: u64,
            }
            s.emit(&Out { node, k, s: sv }, format!("T({k}, {sv})"))
        }
        DeriveCmd::Osc { alpha, beta, k } => {
            let r = osc(&h, alpha, beta, k)?;
            let text = r.count.to_string();
            s.emit(&r, text)
        }
        DeriveCmd::Color { points, table } => {
            if table {
                return write_coloring_csv(&h, s.bound()?, s.sink()?);
            }
            let &[a, b] = points.as_slice() else {
                return Err(Error::Parse("color takes two ordinals or --table".into()));
            };
            let (a, b) = (a.min(b), a.max(b));
            #[derive(Serialize)]
            struct Out {
                o: usize,
                o_star: crate::derived::OStarValue,
                c: crate::derived::BoundedColor,
            }
            let out = Out {
                o: color_o(&h, a, b)?,
                o_star: color_o_star(&h, a, b)?,
                c: bounded_color_c(&h, a, b)?,
            };
            let text = format!("o={} o*={} c={}", out.o, out.o_star.value, out.c.code);
            s.emit(&out, text)
        }
        DeriveCmd::Entangled { alpha, len } => {
            let v = entangled_vector(&h, alpha, len)?;
            let text = format!("{v:?}");
            s.emit(&v, text)
        }
        DeriveCmd::SuslinFn { beta, xi } => {
            let v = coherent_tree_eval(&h, beta, xi, &PartitionSpec::parity())?;
            s.emit(&v, v)
        }
        DeriveCmd::Sspace { beta, k } => s.emit_json(&s_space_sets(&h, beta, k)?),
    }
}

fn verify(s: &Settings, args: VerifyArgs) -> Result<i32> {
    let h = match args.inject_fault {
        Some(level) => SchemeHandle::omega_with_fault(&s.ty, level),
        None => s.omega(),
    };
    let params = SuiteParams {
        bound: s.bound,
        fuel: s.fuel,
        seed: s.seed,
        samples: args.samples,
    };
    let names = (!args.checks.is_empty()).then_some(args.checks.as_slice());
    let reports = run_suite_on(&h, &s.label, names, &params)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    match s.format {
        Some(Format::Json) => s.emit_raw(&serde_json::to_string_pretty(&reports)?)?,
        Some(Format::Csv) => write_reports_csv(&reports, s.sink()?)?,
        None => {
            let mut w = s.sink()?;
            for r in &reports {
                let status = if r.skipped {
                    "skip"
                } else if r.pass {
                    "pass"
                } else {
                    "FAIL"
                };
                writeln!(w, "{status} {:<22} cases={} failures={}", r.name, r.cases, r.failures)?;
                for c in &r.counterexamples {
                    writeln!(w, "    {}: expected {}, got {}", c.input, c.expected, c.got)?;
                }
            }
            writeln!(w, "{} checks, {failed} failed", reports.len())?;
        }
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn write_reports_csv(reports: &[CheckReport], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "name", "preset", "bound", "seed", "pass", "skipped", "cases", "failures",
    ])
    .map_err(err)?;
    for r in reports {
        w.write_record([
            r.name.clone(),
            r.preset.clone(),
            r.bound.to_string(),
            r.seed.to_string(),
            r.pass.to_string(),
            r.skipped.to_string(),
            r.cases.to_string(),
            r.failures.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        run(std::iter::once("scheme-forge")
            .chain(args.iter().copied())
            .map(OsString::from))
    }

    fn output(args: &[&str]) -> (i32, String) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        let mut full: Vec<&str> = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        full.push("--out");
        full.push(&p);
        let c = code(&full);
        (c, std::fs::read_to_string(&path).unwrap_or_default())
    }

    #[test]
    fn metric_rho_prints_the_level() {
        assert_eq!(
            output(&["metric", "rho", "--type", "tau2", "2", "5"]),
            (0, "3\n".into())
        );
    }

    #[test]
    fn verify_tau2_exits_zero() {
        assert_eq!(output(&["verify", "--type", "tau2", "--bound", "10"]).0, 0);
    }

    #[test]
    fn verify_with_fault_exits_one() {
        assert_eq!(
            output(&["verify", "--inject-fault", "2", "--check", "closure-coherence"]).0,
            1
        );
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(code(&["metric", "rho", "--no-such-flag", "2", "5"]), 2);
        assert_eq!(code(&["metric", "rho", "two", "5"]), 2);
        assert_eq!(code(&["metric", "rho", "--type", "tau9", "2", "5"]), 2);
        assert_eq!(code(&["verify", "--check", "no-such-check"]), 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(code(&["--help"]), 0);
    }

    #[test]
    fn config_file_supplies_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"type": "tau4", "format": "json"}"#).unwrap();
        let (c, text) = output(&["--config", cfg.to_str().unwrap(), "metric", "rho", "0", "4"]);
        assert_eq!(c, 0);
        assert_eq!(text.trim(), "1");
        let (_, text) = output(&[
            "--config",
            cfg.to_str().unwrap(),
            "--type",
            "tau2",
            "metric",
            "rho",
            "0",
            "4",
        ]);
        assert_eq!(text.trim(), "3");
    }

    #[test]
    fn export_import_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let frag = dir.path().join("frag.json");
        let f = frag.to_str().unwrap();
        assert_eq!(code(&["scheme", "export", "--bound", "10", "--out", f]), 0);
        let (c, text) = output(&["scheme", "import", f]);
        assert_eq!(c, 0);
        assert!(text.contains("\"bound\": 10"));
    }

    #[test]
    fn extend_run_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("log.json");
        let l = log.to_str().unwrap();
        assert_eq!(code(&["extend", "run", "--points", "20", "--out", l]), 0);
        let (c, text) = output(&["extend", "replay", l]);
        assert_eq!(c, 0);
        assert!(text.starts_with('{'));
    }

    #[test]
    fn derived_commands_run() {
        assert_eq!(output(&["derive", "osc", "2", "4"]), (0, "1\n".into()));
        assert_eq!(output(&["capture", "bracket", "2", "5"]), (0, "3\n".into()));
        assert_eq!(output(&["capture", "pi", "1,2,4,5"]), (0, "{2, 3}\n".into()));
        assert_eq!(output(&["derive", "tree", "5"]), (0, "T(0, 0)\n".into()));
        assert_eq!(code(&["derive", "gap", "5", "--out", "/dev/null"]), 0);
        assert_eq!(
            code(&["--type", "tauE", "derive", "entangled", "1", "--out", "/dev/null"]),
            0
        );
    }
}
