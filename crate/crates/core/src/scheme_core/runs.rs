use serde::{Deserialize, Serialize};

use super::ord::{FinOrdSet, Ordinal};

/// A maximal interval `[start, start + len)` inside one ω-block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub start: Ordinal,
    pub len: u64,
}

impl Run {
    fn end(&self) -> Ordinal {
        self.start.plus(self.len)
    }
}

/// A finite ordinal set stored as sorted, non-adjacent runs.
///
/// Scheme members at high levels have sizes far beyond what can be listed,
/// but every closure is a union of few intervals, so positional slicing on
/// runs keeps descent cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RunSet {
    runs: Vec<Run>,
    total: u64,
}

impl RunSet {
    pub fn empty() -> Self {
        RunSet::default()
    }

    /// `[start, start + len)`.
    pub fn interval(start: Ordinal, len: u64) -> Self {
        let mut s = RunSet::empty();
        s.push_run(start, len);
        s
    }

    pub fn from_set(set: &FinOrdSet) -> Self {
        let mut s = RunSet::empty();
        for &x in set {
            s.push_run(x, 1);
        }
        s
    }

    /// Appends `[start, start+len)`, which must lie above the current max.
    pub fn push_run(&mut self, start: Ordinal, len: u64) {
        if len == 0 {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            debug_assert!(last.end() <= start);
            if last.end() == start {
                last.len += len;
                self.total += len;
                return;
            }
        }
        self.runs.push(Run { start, len });
        self.total += len;
    }

    /// Appends every run of `other`; `other` must lie above `self`.
    pub fn extend(&mut self, other: &RunSet) {
        for r in &other.runs {
            self.push_run(r.start, r.len);
        }
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn min(&self) -> Option<Ordinal> {
        self.runs.first().map(|r| r.start)
    }

    pub fn max(&self) -> Option<Ordinal> {
        self.runs.last().map(|r| r.start.plus(r.len - 1))
    }

    /// The element at position `pos`.
    pub fn get(&self, mut pos: u64) -> Option<Ordinal> {
        for r in &self.runs {
            if pos < r.len {
                return Some(r.start.plus(pos));
            }
            pos -= r.len;
        }
        None
    }

    /// Number of elements strictly below `x`.
    pub fn rank(&self, x: Ordinal) -> u64 {
        let mut acc = 0;
        for r in &self.runs {
            if x <= r.start {
                break;
            }
            if x < r.end() {
                return acc + (x.i - r.start.i);
            }
            acc += r.len;
        }
        acc
    }

    /// Position of `x` when it is a member.
    pub fn position(&self, x: Ordinal) -> Option<u64> {
        let mut acc = 0;
        for r in &self.runs {
            if x >= r.start && x < r.end() {
                return Some(acc + (x.i - r.start.i));
            }
            acc += r.len;
        }
        None
    }

    pub fn contains(&self, x: Ordinal) -> bool {
        self.position(x).is_some()
    }

    /// Elements at positions `[from, to)`.
    pub fn slice(&self, from: u64, to: u64) -> RunSet {
        let mut out = RunSet::empty();
        let mut base = 0;
        for r in &self.runs {
            let (lo, hi) = (from.max(base), to.min(base + r.len));
            if lo < hi {
                out.push_run(r.start.plus(lo - base), hi - lo);
            }
            base += r.len;
            if base >= to {
                break;
            }
        }
        out
    }

    /// The first `n` elements.
    pub fn take(&self, n: u64) -> RunSet {
        self.slice(0, n)
    }

    /// Elements strictly below `x`.
    pub fn below(&self, x: Ordinal) -> RunSet {
        self.take(self.rank(x))
    }

    /// Elements at or above `x`.
    pub fn at_or_above(&self, x: Ordinal) -> RunSet {
        self.slice(self.rank(x), self.total)
    }

    /// Reads `self` as a set of positions (natural numbers) and maps it
    /// through the increasing enumeration of `base`.
    pub fn compose(&self, base: &RunSet) -> RunSet {
        let mut out = RunSet::empty();
        for r in &self.runs {
            debug_assert!(r.start.q == 0);
            out.extend(&base.slice(r.start.i, r.start.i + r.len));
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Ordinal> + '_ {
        self.runs.iter().flat_map(|r| (0..r.len).map(move |j| r.start.plus(j)))
    }

    /// Materializes the set; callers must keep sizes reasonable.
    pub fn to_set(&self) -> FinOrdSet {
        FinOrdSet::from_sorted(self.iter().collect())
    }

    pub fn is_subset(&self, other: &RunSet) -> bool {
        self.runs.iter().all(|r| {
            other
                .position(r.start)
                .is_some_and(|p| other.get(p + r.len - 1) == Some(r.start.plus(r.len - 1)))
        })
    }

    /// `self ∩ other`.
    pub fn intersection(&self, other: &RunSet) -> RunSet {
        let mut out = RunSet::empty();
        let (mut a, mut b) = (0, 0);
        while a < self.runs.len() && b < other.runs.len() {
            let (x, y) = (self.runs[a], other.runs[b]);
            let lo = x.start.max(y.start);
            let hi = x.end().min(y.end());
            if lo < hi && lo.q == hi.q {
                out.push_run(lo, hi.i - lo.i);
            }
            if x.end() <= y.end() {
                a += 1;
            } else {
                b += 1;
            }
        }
        out
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &RunSet) -> RunSet {
        let mut out = RunSet::empty();
        for r in &self.runs {
            let mut cur = r.start;
            let end = r.end();
            for o in &other.runs {
                if o.end() <= cur || o.start.q != cur.q {
                    continue;
                }
                if o.start >= end {
                    break;
                }
                if o.start > cur {
                    out.push_run(cur, o.start.i - cur.i);
                }
                cur = cur.max(o.end());
                if cur >= end {
                    break;
                }
            }
            if cur < end {
                out.push_run(cur, end.i - cur.i);
            }
        }
        out
    }
}

impl From<&FinOrdSet> for RunSet {
    fn from(s: &FinOrdSet) -> Self {
        RunSet::from_set(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(v: &[u64]) -> FinOrdSet {
        FinOrdSet::nat(v.iter().copied())
    }

    #[test]
    fn adjacent_runs_merge() {
        let s = RunSet::from_set(&nat(&[0, 1, 2, 5, 6]));
        assert_eq!(s.runs().len(), 2);
        assert_eq!(s.len(), 5);
        assert_eq!(s.max(), Some(Ordinal::fin(6)));
    }

    #[test]
    fn runs_do_not_merge_across_blocks() {
        let mut s = RunSet::interval(Ordinal::fin(0), 3);
        s.push_run(Ordinal::new(1, 0), 2);
        assert_eq!(s.runs().len(), 2);
        assert_eq!(s.get(3), Some(Ordinal::new(1, 0)));
        assert_eq!(s.rank(Ordinal::new(1, 1)), 4);
    }

    proptest! {
        #[test]
        fn positional_ops_match_vectors(
            v in proptest::collection::btree_set(0u64..60, 0..25),
            w in proptest::collection::btree_set(0u64..60, 0..25),
            a in 0u64..30, b in 0u64..30, x in 0u64..70,
        ) {
            let vs: Vec<u64> = v.iter().copied().collect();
            let ws: Vec<u64> = w.iter().copied().collect();
            let s = RunSet::from_set(&nat(&vs));
            let t = RunSet::from_set(&nat(&ws));
            prop_assert_eq!(s.len() as usize, vs.len());
            let (lo, hi) = (a.min(b), a.max(b));
            let expect: Vec<u64> = vs.iter().copied().skip(lo as usize).take((hi - lo) as usize).collect();
            prop_assert_eq!(s.slice(lo, hi).to_set(), nat(&expect));
            prop_assert_eq!(s.rank(Ordinal::fin(x)) as usize, vs.iter().filter(|&&y| y < x).count());
            prop_assert_eq!(s.position(Ordinal::fin(x)).map(|p| p as usize), vs.iter().position(|&y| y == x));
            let inter: Vec<u64> = vs.iter().copied().filter(|y| w.contains(y)).collect();
            prop_assert_eq!(s.intersection(&t).to_set(), nat(&inter));
            let diff: Vec<u64> = vs.iter().copied().filter(|y| !w.contains(y)).collect();
            prop_assert_eq!(s.difference(&t).to_set(), nat(&diff));
            prop_assert_eq!(s.is_subset(&t), v.is_subset(&w));
            let pos: Vec<u64> = ws.iter().copied().filter(|&p| (p as usize) < vs.len()).collect();
            let image: Vec<u64> = pos.iter().map(|&p| vs[p as usize]).collect();
            prop_assert_eq!(RunSet::from_set(&nat(&pos)).compose(&s).to_set(), nat(&image));
        }
    }
}
