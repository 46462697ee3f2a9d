//! Matching engine behind the Hall-type criteria.
//!
//! `m·g ≼ n·Q` holds exactly when some finite position set `F` has
//! `n|F| - |⋃_{j∈F} I_j| ≥ m`. The largest such surplus is the deficiency of
//! the incidence graph of the `n`-fold expanded family, so everything here
//! reduces to one maximum matching plus the alternating-reachability set.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::classify::{self, Bound};
use crate::error::{Error, Result};
use crate::family::{FiniteFamily, Ground, ProjectionFamily};

/// Positions on the left, ground identifiers on the right, an edge `(j, e)`
/// whenever `e ∈ I_j`.
#[derive(Clone, Debug)]
pub struct BipartiteIncidence {
    adj: Vec<Vec<usize>>,
    right: Vec<Ground>,
}

impl BipartiteIncidence {
    pub fn from_family(fam: &FiniteFamily) -> Self {
        let right: Vec<Ground> = fam.ground().iter().collect();
        let index: BTreeMap<Ground, usize> = right.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let adj = fam.sets().iter().map(|s| s.iter().map(|e| index[&e]).collect()).collect();
        BipartiteIncidence { adj, right }
    }

    /// Raw adjacency lists over `0..right_len`; each list is tried in order.
    pub fn from_adjacency(adj: Vec<Vec<usize>>, right_len: usize) -> Self {
        debug_assert!(adj.iter().flatten().all(|&r| r < right_len));
        BipartiteIncidence { adj, right: (1..=right_len as Ground).collect() }
    }

    pub fn left_len(&self) -> usize {
        self.adj.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn right_label(&self, r: usize) -> Ground {
        self.right[r]
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }
}

/// A maximum matching together with the alternating-reachability structure
/// that certifies its optimality.
#[derive(Clone, Debug)]
pub struct Matching {
    pub size: usize,
    /// `forward[l] = Some(r)` when left vertex `l` is matched to right vertex `r`.
    pub forward: Vec<Option<usize>>,
    pub backward: Vec<Option<usize>>,
    /// Left vertices reachable from a free left vertex by alternating paths.
    pub reach_left: Vec<bool>,
    pub reach_right: Vec<bool>,
}

impl Matching {
    /// Matched pairs as (1-based position, ground identifier).
    pub fn pairs(&self, g: &BipartiteIncidence) -> Vec<(usize, Ground)> {
        self.forward
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l + 1, g.right_label(r))))
            .collect()
    }

    pub fn is_perfect_on_left(&self) -> bool {
        self.size == self.forward.len()
    }
}

/// Hopcroft–Karp. O(√V·E).
///
/// Panics if the König certificate computed afterwards does not match the
/// matching size, which would indicate a bug in the augmentation.
pub fn max_matching(g: &BipartiteIncidence) -> Matching {
    let h = g.left_len();
    let mut forward = vec![None; h];
    let mut backward = vec![None; g.right_len()];
    loop {
        let dist = bfs(g, &forward, &backward);
        if !augment_all(g, &dist, &mut forward, &mut backward) {
            break;
        }
    }
    let size = forward.iter().filter(|r| r.is_some()).count();
    let (reach_left, reach_right) = alternating_reach(g, &forward, &backward);

    // Deficiency certificate: every reachable right vertex is matched back into
    // the reachable left side, so |reach_left| - |N(reach_left)| = h - size.
    let nl = reach_left.iter().filter(|&&b| b).count();
    let nr = reach_right.iter().filter(|&&b| b).count();
    assert!(
        reach_right
            .iter()
            .enumerate()
            .all(|(r, &b)| !b || backward[r].is_some_and(|l| reach_left[l])),
        "augmenting path left in residual graph"
    );
    assert_eq!(nl - nr, h - size, "matching is not maximum");

    Matching { size, forward, backward, reach_left, reach_right }
}

fn bfs(g: &BipartiteIncidence, forward: &[Option<usize>], backward: &[Option<usize>]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; forward.len()];
    let mut queue = VecDeque::new();
    for (l, r) in forward.iter().enumerate() {
        if r.is_none() {
            dist[l] = 0;
            queue.push_back(l);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if let Some(z) = backward[y] {
                if dist[z] == u32::MAX {
                    dist[z] = dist[x] + 1;
                    queue.push_back(z);
                }
            }
        }
    }
    dist
}

fn augment_all(
    g: &BipartiteIncidence,
    dist: &[u32],
    forward: &mut [Option<usize>],
    backward: &mut [Option<usize>],
) -> bool {
    fn rec(
        x: usize,
        g: &BipartiteIncidence,
        dist: &[u32],
        used: &mut [bool],
        forward: &mut [Option<usize>],
        backward: &mut [Option<usize>],
    ) -> bool {
        used[x] = true;
        for &y in g.neighbors(x) {
            let found = match backward[y] {
                Some(z) => !used[z] && dist[x] + 1 == dist[z] && rec(z, g, dist, used, forward, backward),
                None => true,
            };
            if found {
                backward[y] = Some(x);
                forward[x] = Some(y);
                return true;
            }
        }
        false
    }
    let mut any = false;
    let mut used = vec![false; forward.len()];
    for x in 0..forward.len() {
        if forward[x].is_none() {
            any |= rec(x, g, dist, &mut used, forward, backward);
        }
    }
    any
}

fn alternating_reach(
    g: &BipartiteIncidence,
    forward: &[Option<usize>],
    backward: &[Option<usize>],
) -> (Vec<bool>, Vec<bool>) {
    let mut left = vec![false; forward.len()];
    let mut right = vec![false; backward.len()];
    let mut stack: Vec<usize> = (0..forward.len()).filter(|&l| forward[l].is_none()).collect();
    for &l in &stack {
        left[l] = true;
    }
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if !right[y] {
                right[y] = true;
                if let Some(z) = backward[y] {
                    if !left[z] {
                        left[z] = true;
                        stack.push(z);
                    }
                }
            }
        }
    }
    (left, right)
}

/// True iff every set can be given a distinct representative.
pub fn sdr_exists(fam: &FiniteFamily) -> bool {
    max_matching(&BipartiteIncidence::from_family(fam)).is_perfect_on_left()
}

/// `max_F (n|F| - |⋃_{j∈F} I_j|)` over all position subsets, `F = ∅` included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurplusReport {
    #[serde(skip)]
    pub multiplicity: usize,
    pub max_surplus: usize,
    /// The inclusion-minimal position set attaining the maximum (1-based).
    #[serde(rename = "witness_F")]
    pub witness_f: Vec<usize>,
    /// Maximum matching of the expanded family as `(position, element)` pairs;
    /// a position occurs at most `multiplicity` times.
    pub matching: Vec<(usize, Ground)>,
}

pub fn max_surplus(fam: &FiniteFamily, n: usize) -> SurplusReport {
    assert!(n >= 1, "multiplicity must be positive");
    let expanded = fam.expand_multiplicity(n);
    let g = BipartiteIncidence::from_family(&expanded);
    let m = max_matching(&g);

    // Copies of one position share a neighbourhood, so either all of them are
    // reachable or none is.
    let witness_f: Vec<usize> = (0..fam.len()).filter(|&j| m.reach_left[j * n]).map(|j| j + 1).collect();
    let matching = m.pairs(&g).into_iter().map(|(l, e)| ((l - 1) / n + 1, e)).collect();
    let max_surplus = expanded.len() - m.size;
    debug_assert_eq!(
        n * witness_f.len() - fam.union_of(&witness_f).len(),
        max_surplus,
        "witness does not attain the deficiency"
    );
    SurplusReport { multiplicity: n, max_surplus, witness_f, matching }
}

/// Outcome of `m·g ≼ n·Q`, with the window and certificate that decided it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorizationDecision {
    pub decision: bool,
    pub m: usize,
    pub n: usize,
    /// Supremum of the surplus over all finite windows.
    pub sup: Bound,
    /// Length of the window the certificate refers to.
    pub window: usize,
    #[serde(flatten)]
    pub report: SurplusReport,
}

/// Decides `m·g ≼ n·Q`.
///
/// For finite suprema the certificate is the report on the window attaining
/// it. When the surplus is unbounded the certificate is the shortest window
/// whose surplus already reaches `m`.
pub fn decide_trivial_minorization(fam: &ProjectionFamily, m: usize, n: usize) -> Result<MinorizationDecision> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidFamily("m and n must be positive".into()));
    }
    let sup = classify::surplus_sup(fam, n)?;
    match sup.bound {
        Bound::Finite(value) => {
            let report = sup.report.expect("finite supremum carries its report");
            Ok(MinorizationDecision { decision: value >= m, m, n, sup: sup.bound, window: sup.window, report })
        }
        Bound::Infinite => {
            let window = shortest_window_reaching(fam, n, m)?;
            let report = max_surplus(&fam.window(window)?, n);
            Ok(MinorizationDecision { decision: true, m, n, sup: Bound::Infinite, window, report })
        }
    }
}

/// Smallest `t` with `max_surplus(window(t), n) ≥ target`. Only called when
/// the surplus is unbounded, so the doubling phase terminates.
fn shortest_window_reaching(fam: &ProjectionFamily, n: usize, target: usize) -> Result<usize> {
    let reaches = |t: usize| -> Result<bool> { Ok(max_surplus(&fam.window(t)?, n).max_surplus >= target) };
    let mut hi = fam.prefix().len().max(1);
    while !reaches(hi)? {
        hi = hi.checked_mul(2).ok_or(Error::Overflow(hi))?;
    }
    let mut lo = 0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
