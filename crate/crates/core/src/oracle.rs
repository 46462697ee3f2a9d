//! Brute-force cross-validation of the matching engine against the algebraic
//! oracle.
//!
//! Nothing here goes through the matching code: surpluses come from subset
//! enumeration and permanents from enumerating injective choice functions.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohom;
use crate::error::{Error, Result};
use crate::family::{FiniteFamily, Ground, IndexSet};
use crate::hall::{self, BipartiteIncidence};

/// Largest family the exhaustive permanent is run on.
pub const MAX_PERMANENT_SETS: usize = 7;
/// Largest family subset enumeration is run on (2^20 subsets).
pub const MAX_BRUTE_SETS: usize = 20;

/// `max_F (n|F| - |⋃_{j∈F} I_j|)` by enumerating all `2^|fam|` subsets.
pub fn brute_max_surplus(fam: &FiniteFamily, n: usize) -> usize {
    assert!(fam.len() <= MAX_BRUTE_SETS, "family too large for subset enumeration");
    let ground: Vec<Ground> = fam.ground().iter().collect();
    assert!(ground.len() <= 64, "ground too large for bitmask enumeration");
    let masks: Vec<u64> = fam
        .sets()
        .iter()
        .map(|s| s.iter().fold(0, |acc, e| acc | 1 << ground.binary_search(&e).expect("element of ground")))
        .collect();
    let mut best = 0i64;
    for f in 0u32..1 << fam.len() {
        let mut union = 0u64;
        for (j, m) in masks.iter().enumerate() {
            if f >> j & 1 == 1 {
                union |= m;
            }
        }
        best = best.max(n as i64 * f.count_ones() as i64 - union.count_ones() as i64);
    }
    best as usize
}

/// Permanent of the incidence matrix by enumerating injective choices.
pub fn brute_permanent(fam: &FiniteFamily) -> BigUint {
    fn rec(sets: &[IndexSet], used: &mut Vec<Ground>) -> u64 {
        let Some((first, rest)) = sets.split_first() else { return 1 };
        let mut total = 0;
        for e in first.iter() {
            if !used.contains(&e) {
                used.push(e);
                total += rec(rest, used);
                used.pop();
            }
        }
        total
    }
    BigUint::from(rec(fam.sets(), &mut Vec::new()))
}

/// Everything the oracle compares on one family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseOutcome {
    pub sets: Vec<Vec<Ground>>,
    pub matching_size: usize,
    pub brute_surplus: usize,
    pub sdr_exists: bool,
    pub euler_nonzero: bool,
    #[serde(serialize_with = "as_decimal")]
    pub sdr_count: BigUint,
    #[serde(serialize_with = "opt_decimal")]
    pub permanent: Option<BigUint>,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn opt_decimal<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl CaseOutcome {
    pub fn evaluate(fam: &FiniteFamily) -> Self {
        let matching_size = hall::max_matching(&BipartiteIncidence::from_family(fam)).size;
        CaseOutcome {
            sets: fam.to_vecs(),
            matching_size,
            brute_surplus: brute_max_surplus(fam, 1),
            sdr_exists: hall::sdr_exists(fam),
            euler_nonzero: !cohom::euler_class(&cohom::family_bundles(fam)).is_zero(),
            sdr_count: cohom::sdr_count(fam),
            permanent: (fam.len() <= MAX_PERMANENT_SETS).then(|| brute_permanent(fam)),
        }
    }

    /// Defect identity holds.
    pub fn defect_ok(&self) -> bool {
        self.matching_size + self.brute_surplus == self.sets.len()
    }

    /// `sdr_exists ⇔ euler ≠ 0 ⇔ sdr_count > 0 ⇔ brute surplus ≤ 0`.
    pub fn equivalence_ok(&self) -> bool {
        let count_pos = !self.sdr_count.is_zero();
        let hall_ok = self.brute_surplus == 0;
        self.sdr_exists == self.euler_nonzero && self.sdr_exists == count_pos && self.sdr_exists == hall_ok
    }

    pub fn permanent_ok(&self) -> bool {
        self.permanent.as_ref().is_none_or(|p| *p == self.sdr_count)
    }

    pub fn agrees(&self) -> bool {
        self.defect_ok() && self.equivalence_ok() && self.permanent_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBounds {
    pub mode: Mode,
    pub max_sets: usize,
    pub max_ground: usize,
    /// Number of random cases; ignored for exhaustive runs.
    pub cases: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub mode: Mode,
    pub cases: usize,
    pub disagreements: usize,
    pub defect_disagreements: usize,
    pub equivalence_disagreements: usize,
    pub permanent_disagreements: usize,
    pub permanent_checked: usize,
    pub counterexample: Option<CaseOutcome>,
}

const MAX_EXHAUSTIVE_CASES: u128 = 5_000_000;
const MAX_RANDOM_SETS: usize = 12;
const MAX_RANDOM_GROUND: usize = 16;

impl OracleBounds {
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Exhaustive => {
                if self.max_sets > MAX_PERMANENT_SETS {
                    return Err(Error::BoundsTooLarge(format!(
                        "{} sets exceeds {MAX_PERMANENT_SETS}",
                        self.max_sets
                    )));
                }
                let count = exhaustive_count(self.max_sets, self.max_ground);
                if self.max_ground > 16 || count > MAX_EXHAUSTIVE_CASES {
                    return Err(Error::BoundsTooLarge(format!(
                        "{} sets over {} elements",
                        self.max_sets, self.max_ground
                    )));
                }
            }
            Mode::Random => {
                if self.max_sets > MAX_RANDOM_SETS || self.max_ground > MAX_RANDOM_GROUND {
                    return Err(Error::BoundsTooLarge(format!(
                        "random families are limited to {MAX_RANDOM_SETS} sets over {MAX_RANDOM_GROUND} elements"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn exhaustive_count(max_sets: usize, max_ground: usize) -> u128 {
    let subsets = 1u128.checked_shl(max_ground as u32).unwrap_or(u128::MAX);
    (0..=max_sets as u32).fold(0u128, |acc, s| acc.saturating_add(subsets.saturating_pow(s)))
}

/// Every list of `0..=max_sets` subsets (empty set included) of `{1..max_ground}`.
pub fn exhaustive_families(max_sets: usize, max_ground: usize) -> impl Iterator<Item = FiniteFamily> {
    let subsets = 1usize << max_ground;
    (0..=max_sets).flat_map(move |len| {
        let total = subsets.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut sets = Vec::with_capacity(len);
            for _ in 0..len {
                let mask = code % subsets;
                code /= subsets;
                sets.push((0..max_ground).filter(|b| mask >> b & 1 == 1).map(|b| b as Ground + 1).collect());
            }
            FiniteFamily::new(sets)
        })
    })
}

/// Seeded random families: 1..=max_sets sets, each element of
/// `{1..max_ground}` included with a per-family density.
pub fn random_families(cases: usize, max_sets: usize, max_ground: usize, seed: u64) -> Vec<FiniteFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|_| {
            let len = rng.gen_range(1..=max_sets.max(1));
            let ground = rng.gen_range(1..=max_ground.max(1));
            let density: f64 = rng.gen_range(0.1..0.7);
            (0..len)
                .map(|_| (1..=ground as Ground).filter(|_| rng.gen_bool(density)).collect::<IndexSet>())
                .collect()
        })
        .collect()
}

pub fn run(bounds: &OracleBounds) -> Result<OracleReport> {
    bounds.validate()?;
    let families: Box<dyn Iterator<Item = FiniteFamily>> = match bounds.mode {
        Mode::Exhaustive => Box::new(exhaustive_families(bounds.max_sets, bounds.max_ground)),
        Mode::Random => {
            Box::new(random_families(bounds.cases, bounds.max_sets, bounds.max_ground, bounds.seed).into_iter())
        }
    };
    Ok(check_all(bounds.mode, families))
}

pub fn check_all(mode: Mode, families: impl Iterator<Item = FiniteFamily>) -> OracleReport {
    let mut report = OracleReport {
        mode,
        cases: 0,
        disagreements: 0,
        defect_disagreements: 0,
        equivalence_disagreements: 0,
        permanent_disagreements: 0,
        permanent_checked: 0,
        counterexample: None,
    };
    for fam in families {
        let out = CaseOutcome::evaluate(&fam);
        report.cases += 1;
        report.permanent_checked += out.permanent.is_some() as usize;
        report.defect_disagreements += !out.defect_ok() as usize;
        report.equivalence_disagreements += !out.equivalence_ok() as usize;
        report.permanent_disagreements += !out.permanent_ok() as usize;
        if !out.agrees() {
            report.disagreements += 1;
            report.counterexample.get_or_insert(out);
        }
    }
    report
}
