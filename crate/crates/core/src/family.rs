//! Index-set families describing diagonal projections `Q = ⊕_j p_{I_j}`.
//!
//! A [`ProjectionFamily`] is a finite explicit prefix followed by an optional
//! symbolic tail; a [`FiniteFamily`] is a materialized window of one. Positions
//! are 1-based throughout the public API.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A ground identifier. Explicit families use positive integers.
pub type Ground = u64;

/// A finite set of ground identifiers, the support of one tensor factor `p_I`.
///
/// The empty set is allowed and stands for the trivial rank-one projection.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(BTreeSet<Ground>);

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: Ground) -> bool {
        self.0.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = Ground> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<Ground> {
        self.0.last().copied()
    }

    pub fn insert(&mut self, e: Ground) -> bool {
        self.0.insert(e)
    }

    pub fn extend_from(&mut self, other: &IndexSet) {
        self.0.extend(other.iter());
    }

    pub fn map(&self, f: impl Fn(Ground) -> Ground) -> IndexSet {
        self.iter().map(f).collect()
    }

    pub fn to_vec(&self) -> Vec<Ground> {
        self.iter().collect()
    }

    /// Builds a set from a list, rejecting repeated identifiers.
    pub fn try_from_slice(elems: &[Ground]) -> Result<Self> {
        let mut set = IndexSet::new();
        for &e in elems {
            if !set.insert(e) {
                return Err(Error::InvalidFamily(format!("duplicate element {e} in set {elems:?}")));
            }
        }
        Ok(set)
    }
}

impl FromIterator<Ground> for IndexSet {
    fn from_iter<I: IntoIterator<Item = Ground>>(iter: I) -> Self {
        IndexSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[Ground; N]> for IndexSet {
    fn from(arr: [Ground; N]) -> Self {
        arr.into_iter().collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Affine block sizes `s(j) = a·j + b` for the j-th tail block (j ≥ 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockSizes {
    pub a: u64,
    pub b: u64,
}

impl BlockSizes {
    pub fn size(&self, j: u64) -> Option<u64> {
        self.a.checked_mul(j)?.checked_add(self.b)
    }

    /// Sum of `s(1) + … + s(j - 1)`.
    fn offset(&self, j: u64) -> Option<u64> {
        let tri = j.checked_sub(1)?.checked_mul(j)? / 2;
        self.a.checked_mul(tri)?.checked_add(self.b.checked_mul(j - 1)?)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// Rule generating the sets after the explicit prefix.
///
/// Tail positions are counted from 1 at the first position after the prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TailRule {
    None,
    Constant(IndexSet),
    /// Pairwise disjoint blocks; block j holds the identifiers
    /// `start + stride·(s(1) + … + s(j-1) + r)` for `0 ≤ r < s(j)`.
    DisjointBlocks { sizes: BlockSizes, start: Ground, stride: Ground },
}

/// The (possibly infinite) family `{I_j}` of a projection `Q = ⊕ p_{I_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectionFamily {
    prefix: Vec<IndexSet>,
    tail: TailRule,
}

impl ProjectionFamily {
    pub fn new(prefix: Vec<IndexSet>, tail: TailRule) -> Result<Self> {
        for set in prefix.iter().chain(match &tail {
            TailRule::Constant(s) => Some(s),
            _ => None,
        }) {
            if set.contains(0) {
                return Err(Error::InvalidFamily("ground identifiers must be positive".into()));
            }
        }
        if let TailRule::DisjointBlocks { start, stride, .. } = &tail {
            if *start == 0 || *stride == 0 {
                return Err(Error::InvalidFamily("block start and stride must be positive".into()));
            }
            let used = prefix.iter().filter_map(IndexSet::max).max().unwrap_or(0);
            if *start <= used {
                return Err(Error::InvalidFamily(format!(
                    "block start {start} must exceed every prefix element (max {used})"
                )));
            }
        }
        Ok(ProjectionFamily { prefix, tail })
    }

    pub fn finite(sets: Vec<IndexSet>) -> Result<Self> {
        Self::new(sets, TailRule::None)
    }

    /// `prefix` followed by disjoint blocks of sizes `a·j + b` starting at `start`.
    pub fn with_blocks(prefix: Vec<IndexSet>, a: u64, b: u64, start: Ground) -> Result<Self> {
        Self::new(prefix, TailRule::DisjointBlocks { sizes: BlockSizes { a, b }, start, stride: 1 })
    }

    /// Pairwise disjoint sets with `|I_j| = j`: `{1}, {2,3}, {4,5,6}, …`.
    pub fn triangular() -> Self {
        Self::with_blocks(Vec::new(), 1, 0, 1).expect("valid family")
    }

    pub fn prefix(&self) -> &[IndexSet] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.tail, TailRule::None)
    }

    pub fn eval_set(&self, j: usize) -> Result<IndexSet> {
        if j == 0 {
            return Err(Error::ZeroIndex);
        }
        if j <= self.prefix.len() {
            return Ok(self.prefix[j - 1].clone());
        }
        let tail_pos = (j - self.prefix.len()) as u64;
        match &self.tail {
            TailRule::None => Err(Error::IndexBeyondFamily { index: j, len: self.prefix.len() }),
            TailRule::Constant(set) => Ok(set.clone()),
            TailRule::DisjointBlocks { sizes, start, stride } => {
                let overflow = || Error::Overflow(j);
                let offset = sizes.offset(tail_pos).ok_or_else(overflow)?;
                let size = sizes.size(tail_pos).ok_or_else(overflow)?;
                let last = offset
                    .checked_add(size)
                    .and_then(|x| x.checked_mul(*stride))
                    .and_then(|x| x.checked_add(*start));
                last.ok_or_else(overflow)?;
                Ok((0..size).map(|r| start + stride * (offset + r)).collect())
            }
        }
    }

    /// The first `t` sets, order preserved.
    pub fn window(&self, t: usize) -> Result<FiniteFamily> {
        (1..=t).map(|j| self.eval_set(j)).collect::<Result<Vec<_>>>().map(FiniteFamily::new)
    }

    /// Relabels every ground identifier `i` as `2i - 1`, leaving the even
    /// identifiers unused.
    pub fn reindex_to_odd(&self) -> ProjectionFamily {
        let prefix = self.prefix.iter().map(odd_set).collect();
        let tail = match &self.tail {
            TailRule::None => TailRule::None,
            TailRule::Constant(s) => TailRule::Constant(odd_set(s)),
            TailRule::DisjointBlocks { sizes, start, stride } => TailRule::DisjointBlocks {
                sizes: *sizes,
                start: 2 * start - 1,
                stride: 2 * stride,
            },
        };
        ProjectionFamily { prefix, tail }
    }

    /// Same family with the prefix reordered by `perm` (a permutation of `0..prefix.len()`).
    pub fn permute_prefix(&self, perm: &[usize]) -> ProjectionFamily {
        assert_eq!(perm.len(), self.prefix.len());
        ProjectionFamily {
            prefix: perm.iter().map(|&i| self.prefix[i].clone()).collect(),
            tail: self.tail.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidFamily(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_doc(&self) -> FamilyDoc {
        FamilyDoc {
            prefix: self.prefix.iter().map(IndexSet::to_vec).collect(),
            tail: match &self.tail {
                TailRule::None => TailDoc::None,
                TailRule::Constant(s) => TailDoc::Constant { set: s.to_vec() },
                TailRule::DisjointBlocks { sizes, start, stride } => TailDoc::DisjointBlocks {
                    a: sizes.a,
                    b: sizes.b,
                    start: *start,
                    stride: *stride,
                },
            },
        }
    }
}

fn odd_set(s: &IndexSet) -> IndexSet {
    s.map(|i| 2 * i - 1)
}

/// On-disk family document.
///
/// ```json
/// { "prefix": [[1,2],[3]], "tail": {"kind":"disjoint_blocks","a":1,"b":0,"start":4} }
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    #[serde(default)]
    pub prefix: Vec<Vec<Ground>>,
    #[serde(default)]
    pub tail: TailDoc,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailDoc {
    #[default]
    None,
    Constant { set: Vec<Ground> },
    DisjointBlocks {
        a: u64,
        b: u64,
        start: Ground,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        stride: Ground,
    },
}

fn one() -> Ground {
    1
}

fn is_one(x: &Ground) -> bool {
    *x == 1
}

impl TryFrom<FamilyDoc> for ProjectionFamily {
    type Error = Error;

    fn try_from(doc: FamilyDoc) -> Result<Self> {
        let prefix = doc
            .prefix
            .iter()
            .map(|s| IndexSet::try_from_slice(s))
            .collect::<Result<Vec<_>>>()?;
        let tail = match doc.tail {
            TailDoc::None => TailRule::None,
            TailDoc::Constant { set } => TailRule::Constant(IndexSet::try_from_slice(&set)?),
            TailDoc::DisjointBlocks { a, b, start, stride } => {
                TailRule::DisjointBlocks { sizes: BlockSizes { a, b }, start, stride }
            }
        };
        ProjectionFamily::new(prefix, tail)
    }
}

/// A finite, ordered list of index sets together with their union.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteFamily {
    sets: Vec<IndexSet>,
    ground: IndexSet,
}

impl FiniteFamily {
    pub fn new(sets: Vec<IndexSet>) -> Self {
        let mut ground = IndexSet::new();
        for s in &sets {
            ground.extend_from(s);
        }
        FiniteFamily { sets, ground }
    }

    pub fn from_slices(sets: &[&[Ground]]) -> Self {
        Self::new(sets.iter().map(|s| s.iter().copied().collect()).collect())
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    /// Set at 1-based position `j`.
    pub fn get(&self, j: usize) -> Option<&IndexSet> {
        j.checked_sub(1).and_then(|i| self.sets.get(i))
    }

    pub fn ground(&self) -> &IndexSet {
        &self.ground
    }

    /// Union of the sets at the given 1-based positions.
    pub fn union_of(&self, positions: &[usize]) -> IndexSet {
        let mut u = IndexSet::new();
        for &j in positions {
            u.extend_from(&self.sets[j - 1]);
        }
        u
    }

    pub fn push(&mut self, set: IndexSet) {
        self.ground.extend_from(&set);
        self.sets.push(set);
    }

    /// Each set repeated `n` times in place, modelling `n·Q`.
    pub fn expand_multiplicity(&self, n: usize) -> FiniteFamily {
        assert!(n >= 1, "multiplicity must be positive");
        let sets = self.sets.iter().flat_map(|s| std::iter::repeat_n(s.clone(), n)).collect();
        FiniteFamily { sets, ground: self.ground.clone() }
    }

    pub fn reindex_to_odd(&self) -> FiniteFamily {
        FiniteFamily::new(self.sets.iter().map(odd_set).collect())
    }

    pub fn to_vecs(&self) -> Vec<Vec<Ground>> {
        self.sets.iter().map(IndexSet::to_vec).collect()
    }
}

impl FromIterator<IndexSet> for FiniteFamily {
    fn from_iter<I: IntoIterator<Item = IndexSet>>(iter: I) -> Self {
        FiniteFamily::new(iter.into_iter().collect())
    }
}

impl fmt::Display for FiniteFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}
