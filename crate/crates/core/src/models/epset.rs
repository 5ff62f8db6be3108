//! Eventually periodic subsets of ℕ.
//!
//! An [`EPSet`] is `prefix ∪ {n ≥ t : n mod p ∈ r}`. Every value is kept in
//! canonical form (minimal period, then minimal threshold), so structural
//! equality is set equality.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sizesets::Card;

/// Windows larger than this are refused; they only arise from pathological
/// chains of period-multiplying operations.
pub const WINDOW_CAP: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EPSet {
    prefix: Vec<u64>,
    t: u64,
    p: u64,
    r: Vec<u64>,
}

/// Wire form used by element descriptors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawEPSet {
    #[serde(default)]
    pub prefix: Vec<u64>,
    #[serde(default)]
    pub t: u64,
    #[serde(default = "one")]
    pub p: u64,
    #[serde(default)]
    pub r: Vec<u64>,
}

fn one() -> u64 {
    1
}

impl EPSet {
    pub fn empty() -> EPSet {
        EPSet {
            prefix: Vec::new(),
            t: 0,
            p: 1,
            r: Vec::new(),
        }
    }

    /// All of ℕ.
    pub fn full() -> EPSet {
        EPSet {
            prefix: Vec::new(),
            t: 0,
            p: 1,
            r: vec![0],
        }
    }

    pub fn finite(members: impl IntoIterator<Item = u64>) -> EPSet {
        let mut prefix: Vec<u64> = members.into_iter().collect();
        prefix.sort_unstable();
        prefix.dedup();
        let t = prefix.last().map_or(0, |m| m + 1);
        EPSet {
            prefix,
            t,
            p: 1,
            r: Vec::new(),
        }
    }

    /// `ℕ` minus finitely many exceptions.
    pub fn cofinite(missing: impl IntoIterator<Item = u64>) -> EPSet {
        EPSet::finite(missing).complement()
    }

    /// `{n ≥ start : n ≡ residue (mod period)}`.
    pub fn progression(start: u64, residue: u64, period: u64) -> EPSet {
        assert!(period >= 1, "period must be positive");
        EPSet::from_fn(start, period, |n| n >= start && n % period == residue % period)
    }

    /// Builds from arbitrary (possibly non-canonical) parts.
    pub fn from_parts(prefix: &[u64], t: u64, p: u64, r: &[u64]) -> Result<EPSet> {
        if p == 0 {
            return Err(Error::Descriptor("period must be at least 1".into()));
        }
        if let Some(&bad) = prefix.iter().find(|&&n| n >= t) {
            return Err(Error::Descriptor(format!(
                "prefix member {bad} is not below the threshold {t}"
            )));
        }
        if let Some(&bad) = r.iter().find(|&&x| x >= p) {
            return Err(Error::Descriptor(format!("residue {bad} is not below the period {p}")));
        }
        if t.saturating_add(p) > WINDOW_CAP {
            return Err(Error::ResourceCap(format!("window {t}+{p} too large")));
        }
        let mut pre = vec![false; t as usize];
        for &n in prefix {
            pre[n as usize] = true;
        }
        let mut res = vec![false; p as usize];
        for &x in r {
            res[x as usize] = true;
        }
        Ok(EPSet::from_fn(t, p, |n| {
            if n < t {
                pre[n as usize]
            } else {
                res[(n % p) as usize]
            }
        }))
    }

    /// Canonical set whose membership is `mem` on `[0, t0)` and periodic with
    /// period `p0` from `t0` on (only `mem` on `[0, t0 + p0)` is consulted).
    pub fn from_fn(t0: u64, p0: u64, mem: impl Fn(u64) -> bool) -> EPSet {
        assert!(p0 >= 1);
        let len = t0 + p0;
        assert!(len <= WINDOW_CAP, "eventually periodic window {len} exceeds cap");
        let bits: Vec<bool> = (0..len).map(&mem).collect();
        EPSet::from_window(t0, p0, &bits)
    }

    fn from_window(t0: u64, p0: u64, bits: &[bool]) -> EPSet {
        let (t0u, p0u) = (t0 as usize, p0 as usize);
        let tail = &bits[t0u..t0u + p0u];
        let mut p = p0u;
        for d in 1..=p0u {
            if p0u % d == 0 && (0..p0u).all(|i| tail[i] == tail[(i + d) % p0u]) {
                p = d;
                break;
            }
        }
        let at = |n: usize| -> bool {
            if n < t0u {
                bits[n]
            } else {
                tail[(n - t0u) % p0u]
            }
        };
        let mut t = t0u;
        while t > 0 && at(t - 1) == at(t - 1 + p) {
            t -= 1;
        }
        let prefix = (0..t).filter(|&n| at(n)).map(|n| n as u64).collect();
        let mut r: Vec<u64> = (t..t + p).filter(|&n| at(n)).map(|n| (n % p) as u64).collect();
        r.sort_unstable();
        EPSet {
            prefix,
            t: t as u64,
            p: p as u64,
            r,
        }
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn threshold(&self) -> u64 {
        self.t
    }

    pub fn period(&self) -> u64 {
        self.p
    }

    pub fn residues(&self) -> &[u64] {
        &self.r
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.t {
            self.prefix.binary_search(&n).is_ok()
        } else {
            self.r.binary_search(&(n % self.p)).is_ok()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty() && self.r.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == EPSet::full()
    }

    /// Complement is finite.
    pub fn is_cofinite(&self) -> bool {
        self.r.len() as u64 == self.p
    }

    pub fn size(&self) -> Card {
        if self.r.is_empty() {
            Card::Fin(self.prefix.len() as u64)
        } else {
            Card::Inf
        }
    }

    /// Members in increasing order (an infinite iterator for infinite sets).
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let tail = (!self.r.is_empty()).then(|| {
            let base = self.t - self.t % self.p;
            (0u64..).flat_map(move |k| {
                self.r
                    .iter()
                    .map(move |&x| base + k * self.p + x)
            })
            .filter(move |&n| n >= self.t)
        });
        self.prefix.iter().copied().chain(tail.into_iter().flatten())
    }

    /// The `k` least members, or `None` if there are fewer.
    pub fn first(&self, k: u64) -> Option<Vec<u64>> {
        let v: Vec<u64> = self.iter().take(k as usize).collect();
        (v.len() as u64 == k).then_some(v)
    }

    pub fn complement(&self) -> EPSet {
        EPSet::from_fn(self.t, self.p, |n| !self.contains(n))
    }

    fn combine(&self, other: &EPSet, f: impl Fn(bool, bool) -> bool) -> EPSet {
        if self.is_finite() && other.is_finite() {
            let mut all: Vec<u64> = self.prefix.iter().chain(&other.prefix).copied().collect();
            all.sort_unstable();
            all.dedup();
            return EPSet::finite(
                all.into_iter()
                    .filter(|&n| f(self.contains(n), other.contains(n))),
            );
        }
        let t = self.t.max(other.t);
        let p = self.p.lcm(&other.p);
        EPSet::from_fn(t, p, |n| f(self.contains(n), other.contains(n)))
    }

    pub fn union(&self, other: &EPSet) -> EPSet {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &EPSet) -> EPSet {
        if self.is_empty() || other.is_empty() {
            return EPSet::empty();
        }
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &EPSet) -> EPSet {
        if self.is_empty() || other.is_empty() {
            return self.clone();
        }
        self.combine(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &EPSet) -> bool {
        if self.is_empty() {
            return true;
        }
        if self.is_finite() {
            return self.prefix.iter().all(|&n| other.contains(n));
        }
        let t = self.t.max(other.t);
        let p = self.p.lcm(&other.p);
        (0..t + p).all(|n| !self.contains(n) || other.contains(n))
    }

    pub fn is_disjoint(&self, other: &EPSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Image under the involution `n ↦ n xor 1` (swapping `2m` and `2m+1`).
    pub fn swap_pairs(&self) -> EPSet {
        let t = (self.t + 1).next_multiple_of(2);
        let p = self.p.lcm(&2);
        EPSet::from_fn(t, p, |n| self.contains(n ^ 1))
    }

    /// Splits the periodic tail into two infinite halves; the finite prefix
    /// goes to the second half. Residue classes are dealt out in order; a
    /// single class is first refined modulo `2p`, which on the tail is the
    /// even/odd occurrence split.
    pub fn split_tail(&self) -> Option<(EPSet, EPSet)> {
        if self.is_finite() {
            return None;
        }
        let (p, r) = if self.r.len() >= 2 {
            (self.p, self.r.clone())
        } else {
            (2 * self.p, vec![self.r[0], self.r[0] + self.p])
        };
        let half: Vec<u64> = r[..r.len() / 2].to_vec();
        let t = self.t;
        let first = EPSet::from_fn(t, p, |n| n >= t && half.contains(&(n % p)));
        let second = self.difference(&first);
        Some((first, second))
    }

    pub fn to_raw(&self) -> RawEPSet {
        RawEPSet {
            prefix: self.prefix.clone(),
            t: self.t,
            p: self.p,
            r: self.r.clone(),
        }
    }

    pub fn from_raw(raw: &RawEPSet) -> Result<EPSet> {
        EPSet::from_parts(&raw.prefix, raw.t, raw.p, &raw.r)
    }
}

impl Serialize for EPSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

impl<'de> Deserialize<'de> for EPSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawEPSet::deserialize(d)?;
        EPSet::from_raw(&raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for EPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre: Vec<String> = self.prefix.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", pre.join(","))?;
        if !self.r.is_empty() {
            let res: Vec<String> = self.r.iter().map(u64::to_string).collect();
            write!(f, " + {{n>={} : n%{} in {{{}}}}}", self.t, self.p, res.join(","))?;
        }
        Ok(())
    }
}
