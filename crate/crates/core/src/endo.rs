//! Index-set dynamics of the finiteness endomorphism.
//!
//! Ground elements live in a free term universe: `Base(i)` for the original
//! identifiers, `BAtom(j, r)` for the r-th element of the pool `B_j`, and
//! `Nu(j, t)` for the image of `t` under the injection `ν(j, ·)`. Injectivity
//! of `ν` and disjointness of the pools are structural.
//!
//! Families are relabelled `i ↦ 2i - 1` first; the even base identifiers are
//! reserved, and `Base(2l)` plays the role of the marker `l` in
//! `{ν(j,1), …, ν(j,j)}`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::classify::{self, Bound, TightSet};
use crate::error::{Error, Result};
use crate::family::{FiniteFamily, Ground, IndexSet, ProjectionFamily};
use crate::hall::{self, BipartiteIncidence};

/// Ordered `Base < BAtom < Nu`, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundTerm {
    Base(Ground),
    BAtom(i64, usize),
    Nu(i64, Arc<GroundTerm>),
}

impl GroundTerm {
    pub fn nu(j: i64, t: GroundTerm) -> Self {
        GroundTerm::Nu(j, Arc::new(t))
    }

    pub fn marker(l: Ground) -> Self {
        GroundTerm::Base(2 * l)
    }

    fn is_pool(&self) -> bool {
        matches!(self, GroundTerm::BAtom(..))
    }
}

/// Nested arrays: `["nu",1,["base",3]]`, `["batom",-2,1]`.
impl Serialize for GroundTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GroundTerm::Base(i) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element("base")?;
                seq.serialize_element(i)?;
                seq.end()
            }
            GroundTerm::BAtom(j, r) => {
                let mut seq = s.serialize_seq(Some(3))?;
                seq.serialize_element("batom")?;
                seq.serialize_element(j)?;
                seq.serialize_element(r)?;
                seq.end()
            }
            GroundTerm::Nu(j, t) => {
                let mut seq = s.serialize_seq(Some(3))?;
                seq.serialize_element("nu")?;
                seq.serialize_element(j)?;
                seq.serialize_element(t.as_ref())?;
                seq.end()
            }
        }
    }
}

pub type TermSet = BTreeSet<GroundTerm>;

pub fn embed(set: &IndexSet) -> TermSet {
    set.iter().map(GroundTerm::Base).collect()
}

/// `α_j(J) = ν(j, J) ∪ B_j ∪ {ν(j,1), …, ν(j,j)}`, the marker part being
/// empty for `j ≤ 0` and `B_j` having `k` elements.
pub fn alpha(j: i64, set: &TermSet, k: usize) -> TermSet {
    let mut out: TermSet = set.iter().map(|t| GroundTerm::nu(j, t.clone())).collect();
    out.extend((1..=k).map(|r| GroundTerm::BAtom(j, r)));
    if j > 0 {
        out.extend((1..=j as Ground).map(|l| GroundTerm::nu(j, GroundTerm::marker(l))));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaEntry {
    /// Dynamics indices, outermost application first.
    pub path: Vec<i64>,
    /// 1-based position of the original set.
    pub source: usize,
    pub set: TermSet,
}

/// Truncation of `Γ_m`: original positions `1..=prefix_len`, dynamics
/// indices in `[-window, window]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaFamily {
    pub depth: usize,
    pub prefix_len: usize,
    pub window: i64,
    /// Sorted by `(path, source)`.
    pub entries: Vec<GammaEntry>,
}

impl GammaFamily {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entries as an integer family, terms numbered in sorted order.
    pub fn relabel(&self) -> FiniteFamily {
        let universe: TermSet = self.entries.iter().flat_map(|e| e.set.iter().cloned()).collect();
        let index: BTreeMap<&GroundTerm, Ground> =
            universe.iter().enumerate().map(|(i, t)| (t, i as Ground + 1)).collect();
        self.entries.iter().map(|e| e.set.iter().map(|t| index[t]).collect()).collect()
    }
}

pub const DEFAULT_ENTRY_CAP: usize = 10_000;
pub const DEFAULT_WINDOW: i64 = 2;
pub const DEFAULT_DEPTH: usize = 3;

/// The window of original sets the dynamics start from, in the odd relabelling.
fn base_layer(fam: &ProjectionFamily, prefix_len: usize) -> Result<Vec<TermSet>> {
    Ok(fam.reindex_to_odd().window(prefix_len)?.sets().iter().map(embed).collect())
}

pub fn gamma_iterate(
    fam: &ProjectionFamily,
    prefix_len: usize,
    window: i64,
    depth: usize,
    k: usize,
    entry_cap: usize,
) -> Result<GammaFamily> {
    assert!(window >= 0, "window must be nonnegative");
    let width = 2 * window as usize + 1;
    let expected = u32::try_from(depth)
        .ok()
        .and_then(|d| width.checked_pow(d))
        .and_then(|x| x.checked_mul(prefix_len));
    match expected {
        Some(n) if n <= entry_cap => {}
        _ => {
            return Err(Error::WindowTooLarge { entries: expected.unwrap_or(usize::MAX), cap: entry_cap });
        }
    }

    let mut entries: Vec<GammaEntry> = base_layer(fam, prefix_len)?
        .into_iter()
        .enumerate()
        .map(|(i, set)| GammaEntry { path: Vec::new(), source: i + 1, set })
        .collect();
    for _ in 0..depth {
        entries = (-window..=window)
            .flat_map(|j| {
                entries.iter().map(move |e| {
                    let mut path = Vec::with_capacity(e.path.len() + 1);
                    path.push(j);
                    path.extend_from_slice(&e.path);
                    GammaEntry { path, source: e.source, set: alpha(j, &e.set, k) }
                })
            })
            .collect();
    }
    entries.sort_by(|a, b| (&a.path, a.source).cmp(&(&b.path, b.source)));
    Ok(GammaFamily { depth, prefix_len, window, entries })
}

/// Injective choice `(path, source) ↦ term` with each term inside its entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transversal {
    pub assignment: BTreeMap<(Vec<i64>, usize), GroundTerm>,
}

impl Transversal {
    pub fn get(&self, path: &[i64], source: usize) -> Option<&GroundTerm> {
        self.assignment.get(&(path.to_vec(), source))
    }
}

/// Builds `t_m` for `gamma`.
///
/// Depth one is solved per dynamics index `j` as a matching in which only
/// positions of the tight set may use pool atoms `B_j`; candidates are tried
/// ν-images first, pool atoms last. Deeper layers lift through
/// `t_{m+1}(α_j(I)) = ν(j, t_m(I))`.
pub fn build_transversal(
    gamma: &GammaFamily,
    fam: &ProjectionFamily,
    k: usize,
    tight: &TightSet,
) -> Result<Transversal> {
    let base = base_layer(fam, gamma.prefix_len)?;
    let mut assignment = BTreeMap::new();
    if gamma.depth == 0 {
        let layer: Vec<Vec<GroundTerm>> = base.iter().map(|s| s.iter().cloned().collect()).collect();
        for (s, term) in solve_layer(&layer).ok_or_else(|| Error::HallViolation("depth 0".into()))? {
            assignment.insert((Vec::new(), s + 1), term);
        }
        return Ok(Transversal { assignment });
    }

    let in_f0: HashSet<usize> = tight.positions.iter().copied().collect();
    let mut first: BTreeMap<(i64, usize), GroundTerm> = BTreeMap::new();
    for j in -gamma.window..=gamma.window {
        let layer: Vec<Vec<GroundTerm>> = base
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let image = alpha(j, set, k);
                let (pool, rest): (Vec<_>, Vec<_>) = image.into_iter().partition(GroundTerm::is_pool);
                let mut cands = rest;
                if in_f0.contains(&(i + 1)) {
                    cands.extend(pool);
                }
                cands
            })
            .collect();
        let solved = solve_layer(&layer).ok_or_else(|| Error::HallViolation(format!("dynamics index {j}")))?;
        for (s, term) in solved {
            first.insert((j, s + 1), term);
        }
    }

    for e in &gamma.entries {
        let (&innermost, outer) = e.path.split_last().expect("depth ≥ 1");
        let start = first[&(innermost, e.source)].clone();
        let term = outer.iter().rev().fold(start, |t, &j| GroundTerm::nu(j, t));
        assignment.insert((e.path.clone(), e.source), term);
    }
    Ok(Transversal { assignment })
}

/// Perfect matching of the rows onto distinct candidates, or `None`.
fn solve_layer(rows: &[Vec<GroundTerm>]) -> Option<Vec<(usize, GroundTerm)>> {
    let mut index: BTreeMap<&GroundTerm, usize> = BTreeMap::new();
    let mut labels: Vec<&GroundTerm> = Vec::new();
    let adj: Vec<Vec<usize>> = rows
        .iter()
        .map(|cands| {
            cands
                .iter()
                .map(|t| {
                    *index.entry(t).or_insert_with(|| {
                        labels.push(t);
                        labels.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    let g = BipartiteIncidence::from_adjacency(adj, labels.len());
    let m = hall::max_matching(&g);
    if !m.is_perfect_on_left() {
        return None;
    }
    Some(m.forward.iter().enumerate().map(|(s, r)| (s, labels[r.expect("perfect")].clone())).collect())
}

/// Injective over all entries, each value inside its entry, nothing extra.
pub fn verify_transversal(gamma: &GammaFamily, trans: &Transversal) -> bool {
    if trans.assignment.len() != gamma.len() {
        return false;
    }
    let mut seen = HashSet::with_capacity(gamma.len());
    gamma.entries.iter().all(|e| match trans.get(&e.path, e.source) {
        Some(t) => e.set.contains(t) && seen.insert(t),
        None => false,
    })
}

/// Hall's condition for the truncated `Γ_m`, checked by the matching engine
/// independently of any transversal construction.
pub fn hall_check_gamma(gamma: &GammaFamily) -> bool {
    hall::sdr_exists(&gamma.relabel())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssignmentDoc {
    pub path: Vec<i64>,
    pub source: usize,
    pub term: GroundTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndoReport {
    pub entries: usize,
    pub transversal_ok: bool,
    pub hall_ok: bool,
    pub k: usize,
    #[serde(rename = "F0")]
    pub f0: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<AssignmentDoc>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub depth: usize,
    pub window: i64,
    pub prefix_len: usize,
    /// Pool size; `None` uses the family's maximal trivial multiplicity.
    pub k: Option<usize>,
    pub entry_cap: usize,
    pub dump: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            depth: DEFAULT_DEPTH,
            window: DEFAULT_WINDOW,
            prefix_len: 6,
            k: None,
            entry_cap: DEFAULT_ENTRY_CAP,
            dump: false,
        }
    }
}

/// Runs iterate → transversal → both checks for a non-full family.
pub fn simulate(fam: &ProjectionFamily, cfg: &SimConfig) -> Result<EndoReport> {
    let k_true = match classify::max_trivial_multiplicity(fam)? {
        Bound::Finite(k) => k,
        Bound::Infinite => return Err(Error::FamilyIsFull),
    };
    let k = cfg.k.unwrap_or(k_true);
    let tight = classify::find_tight_set(fam)?;
    let gamma = gamma_iterate(fam, cfg.prefix_len, cfg.window, cfg.depth, k, cfg.entry_cap)?;
    let trans = build_transversal(&gamma, fam, k, &tight)?;
    let assignment = cfg.dump.then(|| {
        gamma
            .entries
            .iter()
            .map(|e| AssignmentDoc {
                path: e.path.clone(),
                source: e.source,
                term: trans.get(&e.path, e.source).expect("complete").clone(),
            })
            .collect()
    });
    Ok(EndoReport {
        entries: gamma.len(),
        transversal_ok: verify_transversal(&gamma, &trans),
        hall_ok: hall_check_gamma(&gamma),
        k,
        f0: tight.positions,
        assignment,
    })
}
