//! Types `⟨m_k, n_{k+1}, r_{k+1}⟩` and partitions of the levels.
//!
//! A [`TypeSpec`] is an explicit prefix of `(n, r)` pairs followed by a tail
//! rule. Levels are generated lazily and cached; cardinalities are kept as
//! `u64` while they fit, and [`TypeSpec::level_cardinality`] falls back to
//! arbitrary precision.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How many levels a lazily generated tail may reach before we give up.
const MAX_LEVEL: usize = 4096;

/// Rule giving the fan-out `n_{k+1}` of a tail level from `m_k` and `r_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanRule {
    Fixed(u64),
    /// `n_{k+1} = 2^{m_k} + 1`.
    PowerOfCard,
    /// `n_{k+1} = 2^{m_k - r_{k+1}} + 1`.
    PowerAboveRoot,
}

/// Total classifier from levels to block ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classifier {
    /// Block of level `k` is `k mod modulus`.
    Residue { modulus: usize },
    /// Block 0 is the listed finite set of levels, block 1 is everything else.
    FiniteHead { levels: Vec<usize> },
}

/// A partition of ω (the levels) into named blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub classifier: Classifier,
    #[serde(default)]
    pub names: Vec<String>,
}

impl PartitionSpec {
    pub fn single() -> Self {
        Self::residue(1)
    }

    pub fn residue(modulus: usize) -> Self {
        let names = (0..modulus).map(|b| format!("P{b}")).collect();
        PartitionSpec {
            classifier: Classifier::Residue {
                modulus: modulus.max(1),
            },
            names,
        }
    }

    /// `{even, odd}` with block 0 named `P_c` and block 1 named `P_a`.
    pub fn parity() -> Self {
        PartitionSpec {
            classifier: Classifier::Residue { modulus: 2 },
            names: vec!["P_c".into(), "P_a".into()],
        }
    }

    pub fn finite_head(levels: Vec<usize>) -> Self {
        PartitionSpec {
            classifier: Classifier::FiniteHead { levels },
            names: vec!["head".into(), "rest".into()],
        }
    }

    pub fn block_of(&self, level: usize) -> usize {
        match &self.classifier {
            Classifier::Residue { modulus } => level % (*modulus).max(1),
            Classifier::FiniteHead { levels } => usize::from(!levels.contains(&level)),
        }
    }

    pub fn block_count(&self) -> usize {
        match &self.classifier {
            Classifier::Residue { modulus } => (*modulus).max(1),
            Classifier::FiniteHead { .. } => 2,
        }
    }

    /// The id of some block that contains only finitely many levels.
    pub fn finite_block(&self) -> Option<usize> {
        match &self.classifier {
            Classifier::Residue { .. } => None,
            Classifier::FiniteHead { .. } => Some(0),
        }
    }
}

/// Rule generating `(n_{k+1}, r_{k+1})` beyond the explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum TailRule {
    /// No tail: the type is only known on its prefix.
    Raw,
    Constant {
        fan: FanRule,
        r: u64,
    },
    /// Fair schedule of `(block, r)` pairs; see [`TypeSpec`].
    Fair {
        fan: FanRule,
        partition: PartitionSpec,
    },
}

/// Data of one level. For `k = 0` only `m` is meaningful (`n = 1`, `r = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelData {
    /// `m_k`, or `None` when it exceeds `u64`.
    pub m: Option<u64>,
    /// `n_k`, or `None` when it exceeds `u64`.
    pub n: Option<u64>,
    pub r: u64,
}

#[derive(Debug, Default)]
struct Cache {
    levels: Vec<LevelData>,
    round: u64,
    pending: Vec<VecDeque<u64>>,
    failure: Option<Error>,
}

/// Serializable description of a type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// `(n_{k+1}, r_{k+1})` for `k = 0, 1, …`.
    pub prefix: Vec<(u64, u64)>,
    pub tail: TailRule,
}

/// A validated type with lazily generated tail.
///
/// The fair tail keeps one FIFO of pending root sizes per block. Round
/// `t = 1, 2, …` appends `0..=t+1` to the queue of every block `b ≤ t`.
/// A tail level in block `b` takes the first pending `r` of that block with
/// `r < m_k`, generating further rounds when none qualifies.
#[derive(Clone)]
pub struct TypeSpec {
    desc: Arc<TypeDescriptor>,
    cache: Arc<RwLock<Cache>>,
}

impl fmt::Debug for TypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypeSpec")
            .field("name", &self.desc.name)
            .field("prefix", &self.desc.prefix)
            .field("tail", &self.desc.tail)
            .finish()
    }
}

impl PartialEq for TypeSpec {
    fn eq(&self, other: &Self) -> bool {
        self.desc.prefix == other.desc.prefix && self.desc.tail == other.desc.tail
    }
}

impl Eq for TypeSpec {}

/// Verdict of [`is_good`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Goodness {
    /// Every root size recurs; the certificate lists first occurrences seen.
    Good {
        rule: String,
        first_levels: Vec<(u64, usize)>,
    },
    /// Root size `missing` occurs only finitely often.
    NotGood { missing: u64 },
    /// Only a prefix is known; lists the root sizes seen.
    Undetermined { seen: Vec<u64> },
}

/// Verdict of [`partition_compatible`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Compatibility {
    Compatible,
    Undetermined,
    Incompatible { block: usize, reason: String },
}

fn pow2_plus_one(exp: u64) -> Option<u64> {
    if exp < 63 {
        Some((1u64 << exp) + 1)
    } else {
        None
    }
}

fn next_m(m: Option<u64>, n: Option<u64>, r: u64) -> Option<u64> {
    let (m, n) = (m?, n?);
    (m - r).checked_mul(n)?.checked_add(r)
}

/// Validates a prefix and tail rule and builds the type.
pub fn make_type(prefix: Vec<(u64, u64)>, tail: TailRule) -> Result<TypeSpec> {
    make_named_type(None, prefix, tail)
}

pub fn make_named_type(name: Option<String>, prefix: Vec<(u64, u64)>, tail: TailRule) -> Result<TypeSpec> {
    if prefix.is_empty() && matches!(tail, TailRule::Raw) {
        return Err(Error::InvalidType("empty prefix and no tail rule".into()));
    }
    match &tail {
        TailRule::Constant {
            fan: FanRule::Fixed(n), ..
        }
        | TailRule::Fair {
            fan: FanRule::Fixed(n), ..
        } if *n < 2 => {
            return Err(Error::InvalidType(format!("tail fan-out {n} < 2")));
        }
        _ => {}
    }
    let mut levels = vec![LevelData {
        m: Some(1),
        n: Some(1),
        r: 0,
    }];
    for (i, &(n, r)) in prefix.iter().enumerate() {
        let k = i; // producing level k+1 from level k
        let m = levels[k].m;
        if n < 2 {
            return Err(Error::InvalidType(format!("n_{} = {n} < 2", k + 1)));
        }
        if let Some(m) = m {
            if r >= m {
                return Err(Error::InvalidType(format!("r_{} = {r} >= m_{k} = {m}", k + 1)));
            }
        }
        levels.push(LevelData {
            m: next_m(m, Some(n), r),
            n: Some(n),
            r,
        });
    }
    let blocks = match &tail {
        TailRule::Fair { partition, .. } => partition.block_count(),
        _ => 0,
    };
    let cache = Cache {
        levels,
        round: 0,
        pending: vec![VecDeque::new(); blocks],
        failure: None,
    };
    Ok(TypeSpec {
        desc: Arc::new(TypeDescriptor { name, prefix, tail }),
        cache: Arc::new(RwLock::new(cache)),
    })
}

impl TypeSpec {
    pub fn from_descriptor(d: &TypeDescriptor) -> Result<TypeSpec> {
        make_named_type(d.name.clone(), d.prefix.clone(), d.tail.clone())
    }

    pub fn descriptor(&self) -> &TypeDescriptor {
        &self.desc
    }

    pub fn name(&self) -> Option<&str> {
        self.desc.name.as_deref()
    }

    pub fn prefix_len(&self) -> usize {
        self.desc.prefix.len()
    }

    pub fn tail(&self) -> &TailRule {
        &self.desc.tail
    }

    /// Re-runs validation on the descriptor.
    pub fn validate(&self) -> Result<TypeSpec> {
        Self::from_descriptor(&self.desc)
    }

    /// Level data for `k`, generating the tail as needed.
    pub fn level(&self, k: usize) -> Result<LevelData> {
        if let Some(l) = self.cache.read().levels.get(k) {
            return Ok(*l);
        }
        let mut cache = self.cache.write();
        while cache.levels.len() <= k {
            if let Some(e) = &cache.failure {
                return Err(e.clone());
            }
            let next = cache.levels.len();
            if next > MAX_LEVEL {
                return Err(Error::LevelUnavailable {
                    level: k,
                    reason: "level cap reached".into(),
                });
            }
            match self.tail_level(&mut cache, next) {
                Ok(l) => cache.levels.push(l),
                Err(e) => {
                    cache.failure = Some(e.clone());
                    return Err(e);
                }
            }
        }
        Ok(cache.levels[k])
    }

    fn tail_level(&self, cache: &mut Cache, level: usize) -> Result<LevelData> {
        let prev_m = cache.levels[level - 1].m;
        let fits = |r: u64| prev_m.is_none_or(|m| r < m);
        let (fan, r) = match &self.desc.tail {
            TailRule::Raw => {
                return Err(Error::LevelUnavailable {
                    level,
                    reason: "beyond the explicit prefix of a raw type".into(),
                })
            }
            TailRule::Constant { fan, r } => {
                if !fits(*r) {
                    return Err(Error::InvalidType(format!("tail r = {r} is not below m_{}", level - 1)));
                }
                (fan, *r)
            }
            TailRule::Fair { fan, partition } => {
                let b = partition.block_of(level);
                let r = loop {
                    if let Some(pos) = cache.pending[b].iter().position(|&r| fits(r)) {
                        break cache.pending[b].remove(pos).expect("position is in range");
                    }
                    cache.round += 1;
                    let t = cache.round;
                    let top = (partition.block_count() as u64 - 1).min(t);
                    for blk in 0..=top as usize {
                        cache.pending[blk].extend(0..=t + 1);
                    }
                };
                (fan, r)
            }
        };
        let n = match fan {
            FanRule::Fixed(n) => Some(*n),
            FanRule::PowerOfCard => prev_m.and_then(pow2_plus_one),
            FanRule::PowerAboveRoot => prev_m.and_then(|m| pow2_plus_one(m - r)),
        };
        Ok(LevelData {
            m: next_m(prev_m, n, r),
            n,
            r,
        })
    }

    /// `m_k` as `u64`, or [`Error::Overflow`].
    pub fn m(&self, k: usize) -> Result<u64> {
        self.level(k)?.m.ok_or_else(|| Error::Overflow(format!("m_{k}")))
    }

    /// `m_k` as `Option<u64>`, `None` meaning "larger than any u64".
    pub fn m_opt(&self, k: usize) -> Result<Option<u64>> {
        Ok(self.level(k)?.m)
    }

    /// `n_k` for `k ≥ 1`.
    pub fn n(&self, k: usize) -> Result<u64> {
        debug_assert!(k >= 1);
        self.level(k)?.n.ok_or_else(|| Error::Overflow(format!("n_{k}")))
    }

    /// `r_k` for `k ≥ 1`.
    pub fn r(&self, k: usize) -> Result<u64> {
        debug_assert!(k >= 1);
        Ok(self.level(k)?.r)
    }

    /// Least `K` with `x < m_K`.
    pub fn level_above(&self, x: u64) -> Result<usize> {
        let mut k = 0;
        loop {
            match self.level(k)?.m {
                Some(m) if m > x => return Ok(k),
                None => return Ok(k),
                _ => k += 1,
            }
        }
    }

    /// The `k` with `m_k = card`, if any.
    pub fn level_of_card(&self, card: u64) -> Result<Option<usize>> {
        let mut k = 0;
        loop {
            match self.level(k)?.m {
                Some(m) if m == card => return Ok(Some(k)),
                Some(m) if m < card => k += 1,
                _ => return Ok(None),
            }
        }
    }

    /// Exact `m_k` as an arbitrary-precision integer.
    pub fn level_cardinality(&self, k: usize) -> Result<BigUint> {
        if let Some(m) = self.level(k)?.m {
            return Ok(BigUint::from(m));
        }
        let mut m = BigUint::from(1u32);
        for j in 1..=k {
            let l = self.level(j)?;
            let n = match l.n {
                Some(n) => BigUint::from(n),
                None => {
                    let base = &m - BigUint::from(l.r);
                    let exp = match self.fan_rule() {
                        Some(FanRule::PowerOfCard) => m.clone(),
                        _ => base.clone(),
                    };
                    if exp.bits() > 24 {
                        return Err(Error::LevelUnavailable {
                            level: k,
                            reason: "fan-out 2^m + 1 is too large to materialize".into(),
                        });
                    }
                    let e = u64::try_from(&exp).expect("exponent fits");
                    (BigUint::from(1u32) << e) + BigUint::from(1u32)
                }
            };
            m = (&m - BigUint::from(l.r)) * n + BigUint::from(l.r);
        }
        Ok(m)
    }

    fn fan_rule(&self) -> Option<&FanRule> {
        match &self.desc.tail {
            TailRule::Raw => None,
            TailRule::Constant { fan, .. } | TailRule::Fair { fan, .. } => Some(fan),
        }
    }

    /// True when every `n_k` is 2.
    pub fn is_two_type(&self) -> bool {
        self.desc.prefix.iter().all(|&(n, _)| n == 2)
            && matches!(
                &self.desc.tail,
                TailRule::Raw
                    | TailRule::Constant {
                        fan: FanRule::Fixed(2),
                        ..
                    }
                    | TailRule::Fair {
                        fan: FanRule::Fixed(2),
                        ..
                    }
            )
    }

    /// Checks `n_{k+1} ≥ 2^{m_k} + 1` for `k < depth`, or the variant with
    /// `m_k - r_{k+1}` in the exponent.
    pub fn has_power_fan(&self, depth: usize, above_root: bool) -> Result<bool> {
        for k in 0..depth {
            let m = self.level(k)?.m;
            let next = self.level(k + 1)?;
            let exp = match m {
                Some(m) if above_root => m - next.r,
                Some(m) => m,
                None => continue,
            };
            let need = pow2_plus_one(exp);
            match (next.n, need) {
                (Some(n), Some(need)) if n < need => return Ok(false),
                (Some(_), None) => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }
}

/// `m_k`, exact.
pub fn level_cardinality(t: &TypeSpec, k: usize) -> Result<BigUint> {
    t.level_cardinality(k)
}

/// Decides goodness from the tail rule; raw prefixes stay undetermined.
pub fn is_good(t: &TypeSpec, evidence_depth: usize) -> Goodness {
    let seen_up_to = |depth: usize| -> Vec<u64> { (1..=depth).filter_map(|k| t.level(k).ok().map(|l| l.r)).collect() };
    match t.tail() {
        TailRule::Raw => Goodness::Undetermined {
            seen: seen_up_to(evidence_depth.min(t.prefix_len())),
        },
        TailRule::Constant { r, .. } => Goodness::NotGood {
            missing: if *r == 0 { 1 } else { 0 },
        },
        TailRule::Fair { partition, .. } => {
            let mut first: Vec<(u64, usize)> = Vec::new();
            for k in 1..=evidence_depth {
                if let Ok(l) = t.level(k) {
                    if !first.iter().any(|&(r, _)| r == l.r) {
                        first.push((l.r, k));
                    }
                }
            }
            first.sort();
            Goodness::Good {
                rule: format!("fair schedule over {} block(s)", partition.block_count()),
                first_levels: first,
            }
        }
    }
}

/// Decides compatibility of a partition with the type, per block.
pub fn partition_compatible(t: &TypeSpec, p: &PartitionSpec, _evidence_depth: usize) -> Compatibility {
    if let Some(block) = p.finite_block() {
        return Compatibility::Incompatible {
            block,
            reason: "finite block".into(),
        };
    }
    match t.tail() {
        TailRule::Raw => Compatibility::Undetermined,
        TailRule::Constant { r, .. } => Compatibility::Incompatible {
            block: 0,
            reason: format!("root size {} never recurs", if *r == 0 { 1 } else { 0 }),
        },
        TailRule::Fair { partition, .. } if partition.classifier == p.classifier => Compatibility::Compatible,
        TailRule::Fair { .. } => Compatibility::Undetermined,
    }
}

/// The 2-type with root schedule starting `0,1,0,2` and a fair tail.
pub fn tau2() -> TypeSpec {
    tau2_with_partition(PartitionSpec::single())
}

/// [`tau2`] whose tail is fair with respect to `partition`.
pub fn tau2_with_partition(partition: PartitionSpec) -> TypeSpec {
    make_named_type(
        Some("tau2".into()),
        vec![(2, 0), (2, 1), (2, 0), (2, 2)],
        TailRule::Fair {
            fan: FanRule::Fixed(2),
            partition,
        },
    )
    .expect("tau2 is valid")
}

/// `m = (1, 4, 13, …)`, `n = 4` throughout.
pub fn tau4() -> TypeSpec {
    make_named_type(
        Some("tau4".into()),
        vec![(4, 0), (4, 1)],
        TailRule::Fair {
            fan: FanRule::Fixed(4),
            partition: PartitionSpec::single(),
        },
    )
    .expect("tau4 is valid")
}

/// `m = (1, 3, 27, …)` with `n_{k+1} = 2^{m_k} + 1`.
pub fn tau_e() -> TypeSpec {
    make_named_type(
        Some("tauE".into()),
        vec![(3, 0), (9, 0)],
        TailRule::Fair {
            fan: FanRule::PowerOfCard,
            partition: PartitionSpec::single(),
        },
    )
    .expect("tauE is valid")
}

/// Same shape as [`tau_e`], with `n_{k+1} = 2^{m_k - r_{k+1}} + 1` and a tail
/// fair for the parity partition `{P_c, P_a}`.
pub fn tau_s() -> TypeSpec {
    make_named_type(
        Some("tauS".into()),
        vec![(3, 0), (9, 0)],
        TailRule::Fair {
            fan: FanRule::PowerAboveRoot,
            partition: PartitionSpec::parity(),
        },
    )
    .expect("tauS is valid")
}

pub const PRESETS: [&str; 4] = ["tau2", "tau4", "tauE", "tauS"];

pub fn preset(name: &str) -> Result<TypeSpec> {
    match name {
        "tau2" => Ok(tau2()),
        "tau4" => Ok(tau4()),
        "tauE" | "taue" => Ok(tau_e()),
        "tauS" | "taus" => Ok(tau_s()),
        other => Err(Error::UnknownPreset(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_level_from_a_single_triple() {
        let t = make_type(vec![(2, 0)], TailRule::Raw).unwrap();
        assert_eq!(t.m(1).unwrap(), 2);
    }

    #[test]
    fn recurrence_with_nonzero_root() {
        let t = make_type(vec![(5, 0), (3, 2)], TailRule::Raw).unwrap();
        assert_eq!(t.m(1).unwrap(), 5);
        assert_eq!(t.m(2).unwrap(), 11);
    }

    #[test]
    fn root_as_large_as_the_level_is_rejected() {
        assert!(matches!(
            make_type(vec![(5, 0), (3, 5)], TailRule::Raw),
            Err(Error::InvalidType(_))
        ));
        assert!(matches!(
            make_type(vec![(1, 0)], TailRule::Raw),
            Err(Error::InvalidType(_))
        ));
        assert!(make_type(vec![], TailRule::Raw).is_err());
    }

    #[test]
    fn tau2_cardinalities() {
        let t = tau2();
        let m: Vec<u64> = (0..=7).map(|k| t.m(k).unwrap()).collect();
        assert_eq!(m, vec![1, 2, 3, 6, 10, 20, 39, 76]);
        assert_eq!(level_cardinality(&t, 3).unwrap(), BigUint::from(6u32));
        assert_eq!(level_cardinality(&t, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(level_cardinality(&t, 4).unwrap(), BigUint::from(10u32));
        let r: Vec<u64> = (1..=7).map(|k| t.r(k).unwrap()).collect();
        assert_eq!(r, vec![0, 1, 0, 2, 0, 1, 2]);
        assert!(t.is_two_type());
    }

    #[test]
    fn other_presets() {
        let t = tau4();
        assert_eq!((0..=3).map(|k| t.m(k).unwrap()).collect::<Vec<_>>(), vec![1, 4, 13, 52]);
        let e = tau_e();
        assert_eq!(e.m(2).unwrap(), 27);
        assert_eq!(e.m(3).unwrap(), 27 * ((1 << 27) + 1));
        assert!(e.has_power_fan(3, false).unwrap());
        assert!(e.m_opt(4).unwrap().is_none());
        assert!(matches!(level_cardinality(&e, 4), Err(Error::LevelUnavailable { .. })));
        let s = tau_s();
        assert!(s.has_power_fan(3, true).unwrap());
        assert!(!tau2().has_power_fan(2, false).unwrap());
    }

    #[test]
    fn big_levels_fall_back_to_arbitrary_precision() {
        let t = tau2();
        let k = (0..).find(|&k| t.m_opt(k).unwrap().is_none()).unwrap();
        let big = level_cardinality(&t, k).unwrap();
        let prev = level_cardinality(&t, k - 1).unwrap();
        let r = BigUint::from(t.r(k).unwrap());
        assert_eq!(big, (&prev - &r) * 2u32 + r);
    }

    #[test]
    fn goodness() {
        assert!(matches!(is_good(&tau2(), 20), Goodness::Good { .. }));
        let constant = make_type(
            vec![(2, 0)],
            TailRule::Constant {
                fan: FanRule::Fixed(2),
                r: 0,
            },
        )
        .unwrap();
        assert_eq!(is_good(&constant, 20), Goodness::NotGood { missing: 1 });
        let raw = make_type(vec![(2, 0), (2, 1), (2, 0), (2, 2), (2, 1)], TailRule::Raw).unwrap();
        assert_eq!(
            is_good(&raw, 10),
            Goodness::Undetermined {
                seen: vec![0, 1, 0, 2, 1]
            }
        );
        assert!(matches!(raw.level(6), Err(Error::LevelUnavailable { .. })));
    }

    #[test]
    fn compatibility() {
        let t = tau2_with_partition(PartitionSpec::parity());
        assert_eq!(
            partition_compatible(&t, &PartitionSpec::parity(), 20),
            Compatibility::Compatible
        );
        let finite = PartitionSpec::finite_head(vec![0, 1, 2]);
        assert!(matches!(
            partition_compatible(&tau2(), &finite, 20),
            Compatibility::Incompatible { block: 0, .. }
        ));
        let raw = make_type(vec![(2, 0)], TailRule::Raw).unwrap();
        assert_eq!(
            partition_compatible(&raw, &PartitionSpec::parity(), 20),
            Compatibility::Undetermined
        );
    }

    #[test]
    fn parity_schedule_reaches_every_root_in_both_blocks() {
        let t = tau2_with_partition(PartitionSpec::parity());
        for block in 0..2 {
            for r in 0..5u64 {
                let hits = (5..60).filter(|k| k % 2 == block && t.r(*k).unwrap() == r).count();
                assert!(hits >= 2, "block {block} root {r}");
            }
        }
    }

    proptest! {
        #[test]
        fn valid_prefixes_satisfy_the_recurrence(raw in proptest::collection::vec((2u64..5, 0u64..1000), 1..8)) {
            let mut prefix = Vec::new();
            let mut m = 1u64;
            for (n, r) in raw {
                let r = r % m;
                prefix.push((n, r));
                m = r + (m - r) * n;
            }
            let t = make_type(prefix.clone(), TailRule::Raw).unwrap();
            for (k, &(n, r)) in prefix.iter().enumerate() {
                let (mk, mk1) = (t.m(k).unwrap(), t.m(k + 1).unwrap());
                prop_assert_eq!(mk1, r + (mk - r) * n);
                prop_assert!(mk1 > mk);
            }
            prop_assert_eq!(t.validate().unwrap(), t);
        }

        #[test]
        fn out_of_range_roots_are_rejected(n in 2u64..5, extra in 0u64..3) {
            let t = make_type(vec![(n, 0)], TailRule::Raw).unwrap();
            let m1 = t.m(1).unwrap();
            prop_assert!(make_type(vec![(n, 0), (2, m1 + extra)], TailRule::Raw).is_err());
        }
    }
}
