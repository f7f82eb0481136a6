use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Error;

/// The ordinal `ω·q + i`. Ordered lexicographically on `(q, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Ordinal {
    pub q: u64,
    pub i: u64,
}

impl Ordinal {
    pub const ZERO: Ordinal = Ordinal { q: 0, i: 0 };

    pub const fn new(q: u64, i: u64) -> Self {
        Ordinal { q, i }
    }

    pub const fn fin(i: u64) -> Self {
        Ordinal { q: 0, i }
    }

    /// `ω·q`.
    pub const fn omega_times(q: u64) -> Self {
        Ordinal { q, i: 0 }
    }

    pub fn is_finite(self) -> bool {
        self.q == 0
    }

    pub fn is_limit(self) -> bool {
        self.q > 0 && self.i == 0
    }

    /// `self + n` for a natural number `n`.
    pub fn plus(self, n: u64) -> Self {
        Ordinal {
            q: self.q,
            i: self.i + n,
        }
    }

    pub fn succ(self) -> Self {
        self.plus(1)
    }

    /// The natural number when `q = 0`.
    pub fn as_fin(self) -> Option<u64> {
        (self.q == 0).then_some(self.i)
    }
}

impl From<u64> for Ordinal {
    fn from(i: u64) -> Self {
        Ordinal::fin(i)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.q, self.i) {
            (0, i) => write!(f, "{i}"),
            (1, 0) => write!(f, "w"),
            (1, i) => write!(f, "w+{i}"),
            (q, 0) => write!(f, "w*{q}"),
            (q, i) => write!(f, "w*{q}+{i}"),
        }
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    /// Accepts `5`, `w`, `w+3`, `w*2`, `w*2+3` (`ω` may replace `w`).
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("bad ordinal: {s:?}"));
        let s = s.trim().replace('ω', "w");
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        let Some(rest) = s.strip_prefix('w') else {
            return Ok(Ordinal::fin(num(&s)?));
        };
        let (q_part, i_part) = match rest.split_once('+') {
            Some((a, b)) => (a, Some(b)),
            None => (rest, None),
        };
        let q = match q_part.trim() {
            "" => 1,
            t => num(t.strip_prefix('*').ok_or_else(bad)?)?,
        };
        let i = i_part.map(num).transpose()?.unwrap_or(0);
        Ok(Ordinal { q, i })
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.q == 0 {
            s.serialize_u64(self.i)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Ordinal;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a natural number or a string like \"w*2+3\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Ordinal, E> {
                Ok(Ordinal::fin(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ordinal, E> {
                u64::try_from(v).map(Ordinal::fin).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Ordinal, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// A finite set of ordinals, kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Ordinal>", into = "Vec<Ordinal>")]
pub struct FinOrdSet(Vec<Ordinal>);

impl From<Vec<Ordinal>> for FinOrdSet {
    fn from(mut v: Vec<Ordinal>) -> Self {
        v.sort_unstable();
        v.dedup();
        FinOrdSet(v)
    }
}

impl From<FinOrdSet> for Vec<Ordinal> {
    fn from(s: FinOrdSet) -> Self {
        s.0
    }
}

impl FromIterator<Ordinal> for FinOrdSet {
    fn from_iter<I: IntoIterator<Item = Ordinal>>(it: I) -> Self {
        FinOrdSet::from(it.into_iter().collect::<Vec<_>>())
    }
}

impl<'a> IntoIterator for &'a FinOrdSet {
    type Item = &'a Ordinal;
    type IntoIter = std::slice::Iter<'a, Ordinal>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl FinOrdSet {
    pub fn new() -> Self {
        FinOrdSet(Vec::new())
    }

    /// Natural numbers as a set.
    pub fn nat<I: IntoIterator<Item = u64>>(it: I) -> Self {
        it.into_iter().map(Ordinal::fin).collect()
    }

    /// `[from, from + len)`.
    pub fn interval(from: Ordinal, len: u64) -> Self {
        FinOrdSet((0..len).map(|j| from.plus(j)).collect())
    }

    /// Wraps an already strictly increasing vector.
    pub fn from_sorted(v: Vec<Ordinal>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        FinOrdSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Ordinal] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ordinal> {
        self.0.iter()
    }

    /// `A(i)`, the `i`-th element.
    pub fn get(&self, i: usize) -> Option<Ordinal> {
        self.0.get(i).copied()
    }

    pub fn min(&self) -> Option<Ordinal> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<Ordinal> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: Ordinal) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// `|A ∩ x|`, the number of elements below `x`.
    pub fn rank(&self, x: Ordinal) -> usize {
        self.0.partition_point(|&y| y < x)
    }

    pub fn is_subset(&self, other: &FinOrdSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    /// True when `self` is an initial segment of `other`.
    pub fn is_initial_segment_of(&self, other: &FinOrdSet) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn intersection(&self, other: &FinOrdSet) -> FinOrdSet {
        FinOrdSet(self.0.iter().copied().filter(|&x| other.contains(x)).collect())
    }

    pub fn union(&self, other: &FinOrdSet) -> FinOrdSet {
        self.0.iter().chain(other.0.iter()).copied().collect()
    }

    pub fn difference(&self, other: &FinOrdSet) -> FinOrdSet {
        FinOrdSet(self.0.iter().copied().filter(|&x| !other.contains(x)).collect())
    }

    /// Elements strictly below `x`.
    pub fn below(&self, x: Ordinal) -> FinOrdSet {
        FinOrdSet(self.0[..self.rank(x)].to_vec())
    }

    /// Elements at or above `x`.
    pub fn at_or_above(&self, x: Ordinal) -> FinOrdSet {
        FinOrdSet(self.0[self.rank(x)..].to_vec())
    }

    /// `A[S] = {A(s) : s ∈ S}` for positions `S`.
    pub fn select(&self, positions: &[usize]) -> Option<FinOrdSet> {
        positions
            .iter()
            .map(|&p| self.get(p))
            .collect::<Option<Vec<_>>>()
            .map(FinOrdSet::from)
    }

    /// The image of `self` under the increasing bijection onto `target`,
    /// assuming `self ⊆ domain` and `|domain| = |target|`.
    pub fn transport(&self, domain: &FinOrdSet, target: &FinOrdSet) -> Option<FinOrdSet> {
        self.0
            .iter()
            .map(|&x| domain.0.binary_search(&x).ok().and_then(|p| target.get(p)))
            .collect::<Option<Vec<_>>>()
            .map(FinOrdSet::from_sorted)
    }

    pub fn push_max(&mut self, x: Ordinal) {
        debug_assert!(self.max().is_none_or(|m| m < x));
        self.0.push(x);
    }
}

impl fmt::Display for FinOrdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (j, x) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordinal_text_round_trip() {
        for (s, o) in [
            ("5", Ordinal::fin(5)),
            ("w", Ordinal::new(1, 0)),
            ("w+3", Ordinal::new(1, 3)),
            ("w*2", Ordinal::new(2, 0)),
            ("w*2+3", Ordinal::new(2, 3)),
        ] {
            assert_eq!(s.parse::<Ordinal>().unwrap(), o);
            assert_eq!(o.to_string(), s);
        }
        assert_eq!("ω+1".parse::<Ordinal>().unwrap(), Ordinal::new(1, 1));
        assert!("w-1".parse::<Ordinal>().is_err());
        assert!("x".parse::<Ordinal>().is_err());
    }

    #[test]
    fn ordinal_order_is_lexicographic() {
        assert!(Ordinal::fin(1_000_000) < Ordinal::new(1, 0));
        assert!(Ordinal::new(1, 7) < Ordinal::new(2, 0));
    }

    #[test]
    fn ordinal_json_forms() {
        let v = vec![Ordinal::fin(3), Ordinal::new(1, 2)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[3,"w+2"]"#);
        let back: Vec<Ordinal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn set_is_sorted_and_deduplicated() {
        let s = FinOrdSet::nat([5, 1, 3, 1]);
        assert_eq!(s, FinOrdSet::nat([1, 3, 5]));
        assert_eq!(s.rank(Ordinal::fin(4)), 2);
        assert_eq!(s.select(&[0, 2]), Some(FinOrdSet::nat([1, 5])));
        assert_eq!(s.to_string(), "{1, 3, 5}");
    }
}
