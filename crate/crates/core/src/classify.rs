//! Fullness and stable-finiteness classification of symbolic families.
//!
//! For every supported tail the surplus `n|F| - |⋃ I_j|` splits into a prefix
//! part and a sum of per-block increments `n - s(j)`, since tail blocks are
//! disjoint from each other and from the prefix. That makes the supremum over
//! all finite windows either provably infinite or attained on an explicit
//! finite window, which the matching engine then evaluates.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::{ProjectionFamily, TailRule};
use crate::hall::{self, SurplusReport};

/// A nonnegative integer or +∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(usize),
    Infinite,
}

impl Bound {
    pub fn finite(self) -> Option<usize> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Bound::Infinite
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_u64(*v as u64),
            Bound::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// `sup_F (n|F| - |⋃_{j∈F} I_j|)` over all finite position sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurplusSup {
    pub n: usize,
    pub bound: Bound,
    /// Window on which a finite supremum is attained.
    pub window: usize,
    pub report: Option<SurplusReport>,
}

/// Smallest multiplicity at which the surplus becomes unbounded, if any.
/// Beyond it every larger multiplicity is unbounded too.
pub fn unbounded_threshold(fam: &ProjectionFamily) -> Result<Option<usize>> {
    match fam.tail() {
        TailRule::None => Ok(None),
        // each extra copy adds n and no new elements
        TailRule::Constant(_) => Ok(Some(1)),
        TailRule::DisjointBlocks { sizes, .. } => {
            if sizes.is_degenerate() {
                Err(Error::UndecidableFamilyShape(
                    "disjoint blocks with a = b = 0 have no affine size bound".into(),
                ))
            } else if sizes.a == 0 {
                Ok(Some(sizes.b as usize + 1))
            } else {
                Ok(None)
            }
        }
    }
}

/// Window length past which no block can raise the surplus at multiplicity `n`.
fn cutoff_window(fam: &ProjectionFamily, n: usize) -> usize {
    let tail_len = match fam.tail() {
        TailRule::DisjointBlocks { sizes, .. } if sizes.a > 0 => {
            // blocks with s(j) ≤ n; s is strictly increasing
            let mut j = 0u64;
            while sizes.size(j + 1).is_some_and(|s| s <= n as u64) {
                j += 1;
            }
            j as usize
        }
        _ => 0,
    };
    fam.prefix().len() + tail_len
}

pub fn surplus_sup(fam: &ProjectionFamily, n: usize) -> Result<SurplusSup> {
    if let Some(threshold) = unbounded_threshold(fam)? {
        if n >= threshold {
            return Ok(SurplusSup { n, bound: Bound::Infinite, window: 0, report: None });
        }
    }
    let window = cutoff_window(fam, n);
    let report = hall::max_surplus(&fam.window(window)?, n);
    Ok(SurplusSup { n, bound: Bound::Finite(report.max_surplus), window, report: Some(report) })
}

/// Largest `k` with `k·g ≼ Q`.
pub fn max_trivial_multiplicity(fam: &ProjectionFamily) -> Result<Bound> {
    Ok(surplus_sup(fam, 1)?.bound)
}

/// Minimal `N(m)` with `m|F| < |⋃_{j∈F} I_j| + N(m)` for every finite `F`.
pub fn compute_n(fam: &ProjectionFamily, m: usize) -> Result<Bound> {
    if m == 0 {
        return Err(Error::InvalidFamily("m must be positive".into()));
    }
    Ok(match surplus_sup(fam, m)?.bound {
        Bound::Finite(v) => Bound::Finite(v + 1),
        Bound::Infinite => Bound::Infinite,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    FullStablyProperlyInfinite,
    NonFullStablyFinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Certificate {
    Unbounded {
        witness_m: usize,
        /// `(t, max surplus of window t)`, strictly increasing in both.
        surplus_samples: Vec<(usize, usize)>,
    },
    NTable {
        #[serde(rename = "N_table")]
        n_table: BTreeMap<usize, usize>,
        k: usize,
        #[serde(rename = "F0")]
        f0: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub label: Label,
    #[serde(flatten)]
    pub certificate: Certificate,
}

pub const DEFAULT_M_MAX: usize = 6;
const SAMPLE_COUNT: usize = 10;

pub fn classify(fam: &ProjectionFamily, m_max: usize) -> Result<Classification> {
    match unbounded_threshold(fam)? {
        Some(witness_m) => Ok(Classification {
            label: Label::FullStablyProperlyInfinite,
            certificate: Certificate::Unbounded {
                witness_m,
                surplus_samples: increasing_samples(fam, witness_m)?,
            },
        }),
        None => {
            let mut n_table = BTreeMap::new();
            for m in 1..=m_max {
                let n = compute_n(fam, m)?.finite().expect("bounded family");
                n_table.insert(m, n);
            }
            let tight = find_tight_set(fam)?;
            Ok(Classification {
                label: Label::NonFullStablyFinite,
                certificate: Certificate::NTable { n_table, k: tight.k, f0: tight.positions },
            })
        }
    }
}

/// Ten consecutive windows, starting right after the prefix, on which the
/// surplus at multiplicity `m` strictly increases. For constant tails the run
/// may need to start later, once the copies dominate the prefix.
fn increasing_samples(fam: &ProjectionFamily, m: usize) -> Result<Vec<(usize, usize)>> {
    let mut start = fam.prefix().len() + 1;
    let mut samples: Vec<(usize, usize)> = Vec::with_capacity(SAMPLE_COUNT);
    let mut t = start;
    loop {
        let s = hall::max_surplus(&fam.window(t)?, m).max_surplus;
        if samples.last().is_some_and(|&(_, prev)| s <= prev) {
            samples.clear();
            start = t;
        }
        samples.push((t, s));
        if samples.len() == SAMPLE_COUNT {
            return Ok(samples);
        }
        t += 1;
        assert!(t - start < 100_000, "surplus failed to grow on an unbounded family");
    }
}

/// Positions `F₀` with `|F₀| - |⋃_{j∈F₀} I_j| = k`, where `k` is the maximal
/// trivial multiplicity. Empty exactly when `k = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightSet {
    pub positions: Vec<usize>,
    pub k: usize,
}

pub fn find_tight_set(fam: &ProjectionFamily) -> Result<TightSet> {
    let sup = surplus_sup(fam, 1)?;
    match sup.report {
        Some(report) => Ok(TightSet { k: report.max_surplus, positions: report.witness_f }),
        None => Err(Error::FamilyIsFull),
    }
}

/// One row of the strict minorization gap `N(m)·g ⋠ m·Q` but `N(m)·g ≼ l·Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternRow {
    pub m: usize,
    #[serde(rename = "N")]
    pub n_of_m: usize,
    /// `N(m)·g ⋠ m·Q`, as decided by the engine.
    pub blocked_at_m: bool,
    /// Smallest `l > m` with `N(m)·g ≼ l·Q`.
    pub l: usize,
    pub witness: SurplusReport,
}

pub const DEFAULT_L_BOUND: usize = 64;

/// For each `m ≤ m_max`, exhibits the gap `p ≼ l·q` but `p ⋠ m·q` with
/// `p = N(m)·g` and `q = Q`.
pub fn minorization_pattern(fam: &ProjectionFamily, m_max: usize, l_bound: usize) -> Result<Vec<PatternRow>> {
    if unbounded_threshold(fam)?.is_some() {
        return Err(Error::FamilyIsFull);
    }
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let n_of_m = compute_n(fam, m)?.finite().expect("bounded family");
        let blocked_at_m = !hall::decide_trivial_minorization(fam, n_of_m, m)?.decision;
        let mut found = None;
        for l in m + 1..=l_bound {
            let d = hall::decide_trivial_minorization(fam, n_of_m, l)?;
            if d.decision {
                found = Some((l, d.report));
                break;
            }
        }
        let (l, witness) = found.ok_or(Error::PatternNotFound { m, bound: l_bound })?;
        rows.push(PatternRow { m, n_of_m, blocked_at_m, l, witness });
    }
    Ok(rows)
}
