//! Euler classes of sums of line bundles over a product of two-spheres.
//!
//! The cohomology ring is modelled as `Z[x_i] / (x_i²)`: a polynomial is a map
//! from square-free monomials (sorted identifier lists) to big integers. A line
//! bundle is given by its first Chern class, a linear form `Σ v(i)·x_i`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::family::{FiniteFamily, Ground, IndexSet};

/// Coefficients of the first Chern class on each generator `x_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ChernVector(BTreeMap<Ground, i64>);

impl ChernVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The bundle of `p_I`: coefficient 1 on every `i ∈ I`.
    pub fn from_support(set: &IndexSet) -> Self {
        ChernVector(set.iter().map(|i| (i, 1)).collect())
    }

    /// A single generator with the given coefficient (`+1` for the Bott
    /// projection, `-1` for its conjugate).
    pub fn unit(i: Ground, coeff: i64) -> Self {
        Self::from_pairs([(i, coeff)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Ground, i64)>) -> Self {
        pairs.into_iter().fold(Self::zero(), |acc, (i, c)| tensor_line_bundles(&acc, &ChernVector([(i, c)].into())))
    }

    pub fn coeff(&self, i: Ground) -> i64 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Ground, i64)> + '_ {
        self.0.iter().map(|(&i, &c)| (i, c))
    }
}

/// First Chern class of a tensor product of line bundles: coordinatewise sum.
pub fn tensor_line_bundles(v: &ChernVector, w: &ChernVector) -> ChernVector {
    let mut out = v.0.clone();
    for (i, c) in w.iter() {
        let e = out.entry(i).or_insert(0);
        *e += c;
        if *e == 0 {
            out.remove(&i);
        }
    }
    ChernVector(out)
}

/// Element of `Z[x_i] / (x_i²)`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultilinearPoly {
    terms: BTreeMap<Vec<Ground>, BigInt>,
}

impl MultilinearPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn linear(v: &ChernVector) -> Self {
        let mut p = Self::zero();
        for (i, c) in v.iter() {
            p.add_term(vec![i], BigInt::from(c));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, monomial: &[Ground]) -> BigInt {
        let mut key = monomial.to_vec();
        key.sort_unstable();
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Ground], &BigInt)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: Vec<Ground>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn mul(&self, other: &MultilinearPoly) -> MultilinearPoly {
        let mut out = MultilinearPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(key) = disjoint_merge(a, b) {
                    out.add_term(key, ca * cb);
                }
            }
        }
        out
    }

    pub fn mul_linear(&self, v: &ChernVector) -> MultilinearPoly {
        let mut out = MultilinearPoly::zero();
        for (mono, c) in &self.terms {
            for (i, a) in v.iter() {
                if let Err(pos) = mono.binary_search(&i) {
                    let mut key = mono.clone();
                    key.insert(pos, i);
                    out.add_term(key, c * a);
                }
            }
        }
        out
    }

    /// Sum of the coefficients of all terms of the given degree.
    pub fn degree_sum(&self, degree: usize) -> BigInt {
        self.terms.iter().filter(|(k, _)| k.len() == degree).map(|(_, c)| c).sum()
    }
}

/// Sorted union of two sorted lists, or `None` if they share an element
/// (the product then vanishes since `x_i² = 0`).
fn disjoint_merge(a: &[Ground], b: &[Ground]) -> Option<Vec<Ground>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some(out)
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (mono, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else {
                if !c.is_one() {
                    write!(f, "{c}·")?;
                }
                let vars: Vec<String> = mono.iter().map(|i| format!("x{i}")).collect();
                write!(f, "{}", vars.join("·"))?;
            }
        }
        Ok(())
    }
}

/// `{"monomial":[1,2],"coeff":"2"}` per term; big integers as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermDoc {
    pub monomial: Vec<Ground>,
    pub coeff: String,
}

impl Serialize for MultilinearPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(k, c)| TermDoc { monomial: k.clone(), coeff: c.to_string() }))
    }
}

/// Product of the first Chern classes; the empty product is 1.
pub fn euler_class(bundles: &[ChernVector]) -> MultilinearPoly {
    bundles.iter().fold(MultilinearPoly::one(), |acc, v| acc.mul_linear(v))
}

pub fn family_bundles(fam: &FiniteFamily) -> Vec<ChernVector> {
    fam.sets().iter().map(ChernVector::from_support).collect()
}

/// Number of injective choice functions `j ↦ e ∈ I_j`.
///
/// Dynamic programme over ground elements: the state is the set of positions
/// already served. Counts are exact big integers.
pub fn sdr_count(fam: &FiniteFamily) -> BigUint {
    let t = fam.len();
    let ground: Vec<Ground> = fam.ground().iter().collect();
    if t > ground.len() {
        return BigUint::zero();
    }
    let words = t.div_ceil(64).max(1);
    let holders: Vec<Vec<usize>> = ground
        .iter()
        .map(|&e| (0..t).filter(|&j| fam.sets()[j].contains(e)).collect())
        .collect();

    let mut states: HashMap<Vec<u64>, BigUint> = HashMap::new();
    states.insert(vec![0; words], BigUint::one());
    for (idx, users) in holders.iter().enumerate() {
        let remaining_after = ground.len() - idx - 1;
        let mut next: HashMap<Vec<u64>, BigUint> = HashMap::with_capacity(states.len());
        for (mask, count) in states {
            let served = mask.iter().map(|w| w.count_ones() as usize).sum::<usize>();
            for &j in users {
                if mask[j / 64] >> (j % 64) & 1 == 0 && t - served - 1 <= remaining_after {
                    let mut m = mask.clone();
                    m[j / 64] |= 1 << (j % 64);
                    *next.entry(m).or_default() += &count;
                }
            }
            if t - served <= remaining_after {
                *next.entry(mask).or_default() += count;
            }
        }
        states = next;
    }
    let mut full = vec![0u64; words];
    for j in 0..t {
        full[j / 64] |= 1 << (j % 64);
    }
    states.remove(&full).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(sets: &[&[Ground]]) -> FiniteFamily {
        FiniteFamily::from_slices(sets)
    }

    fn perm_brute(f: &FiniteFamily) -> u64 {
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
        rec(f.sets(), &mut Vec::new())
    }

    #[test]
    fn tensor_examples() {
        let plus = ChernVector::unit(1, 1);
        let minus = ChernVector::unit(1, -1);
        assert!(tensor_line_bundles(&plus, &minus).is_zero());
        assert_eq!(tensor_line_bundles(&plus, &ChernVector::zero()), plus);
        let both = tensor_line_bundles(&ChernVector::unit(1, 1), &ChernVector::unit(2, 1));
        assert_eq!(both, ChernVector::from_pairs([(1, 1), (2, 1)]));
    }

    #[test]
    fn euler_examples() {
        let x1 = ChernVector::unit(1, 1);
        assert!(euler_class(&[x1.clone(), x1]).is_zero());

        let x12 = ChernVector::from_pairs([(1, 1), (2, 1)]);
        let e = euler_class(&[x12.clone(), x12]);
        assert_eq!(e.len(), 1);
        assert_eq!(e.coefficient(&[2, 1]), BigInt::from(2));

        assert_eq!(euler_class(&[]), MultilinearPoly::one());
    }

    #[test]
    fn conjugate_bundles_cancel() {
        // (x1 + x2)(x1 - x2) = -x1x2 + x2x1 = 0
        let a = ChernVector::from_pairs([(1, 1), (2, 1)]);
        let b = ChernVector::from_pairs([(1, 1), (2, -1)]);
        assert!(euler_class(&[a, b]).is_zero());
        // tensor with the conjugate has vanishing Euler class
        let t = tensor_line_bundles(&ChernVector::unit(3, 1), &ChernVector::unit(3, -1));
        assert!(euler_class(&[t]).is_zero());
    }

    #[test]
    fn sdr_count_examples() {
        assert_eq!(sdr_count(&fam(&[&[1, 2], &[1, 2]])), BigUint::from(2u32));
        assert_eq!(sdr_count(&fam(&[&[1]])), BigUint::one());
        assert_eq!(sdr_count(&fam(&[&[1], &[1]])), BigUint::zero());
        assert_eq!(sdr_count(&FiniteFamily::default()), BigUint::one());
    }

    #[test]
    fn sdr_count_is_exact_beyond_u64() {
        // 22 copies of {1..22}: 22! > 2^64
        let set: IndexSet = (1..=22).collect();
        let f = FiniteFamily::new(vec![set; 22]);
        let fact: BigUint = (1u32..=22).map(BigUint::from).product();
        assert_eq!(sdr_count(&f), fact);
    }

    #[test]
    fn display() {
        let x12 = ChernVector::from_pairs([(1, 1), (2, 1)]);
        assert_eq!(euler_class(&[x12.clone(), x12]).to_string(), "2·x1·x2");
        assert_eq!(MultilinearPoly::zero().to_string(), "0");
        assert_eq!(
            serde_json::to_string(&euler_class(&vec![ChernVector::from_pairs([(1, 1), (2, 1)]); 2])).unwrap(),
            r#"[{"monomial":[1,2],"coeff":"2"}]"#
        );
    }

    fn small_family() -> impl Strategy<Value = FiniteFamily> {
        prop::collection::vec(prop::collection::btree_set(1u64..=6, 0..=4), 0..=6)
            .prop_map(|sets| sets.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    fn chern() -> impl Strategy<Value = ChernVector> {
        prop::collection::vec((1u64..=5, -2i64..=2), 0..=4).prop_map(ChernVector::from_pairs)
    }

    proptest! {
        #[test]
        fn count_matches_permanent_and_euler(f in small_family()) {
            let count = sdr_count(&f);
            prop_assert_eq!(count.clone(), BigUint::from(perm_brute(&f)));
            let e = euler_class(&family_bundles(&f));
            prop_assert!(e.terms().all(|(_, c)| *c > BigInt::zero()));
            prop_assert_eq!(e.degree_sum(f.len()), BigInt::from(count.clone()));
            prop_assert_eq!(!e.is_zero(), count > BigUint::zero());
        }

        #[test]
        fn euler_is_multiplicative(a in prop::collection::vec(chern(), 0..4), b in prop::collection::vec(chern(), 0..4)) {
            let joined: Vec<_> = a.iter().chain(b.iter()).cloned().collect();
            prop_assert_eq!(euler_class(&joined), euler_class(&a).mul(&euler_class(&b)));
        }

        #[test]
        fn tensor_laws(u in chern(), v in chern(), w in chern()) {
            prop_assert_eq!(tensor_line_bundles(&u, &v), tensor_line_bundles(&v, &u));
            prop_assert_eq!(
                tensor_line_bundles(&tensor_line_bundles(&u, &v), &w),
                tensor_line_bundles(&u, &tensor_line_bundles(&v, &w))
            );
            prop_assert_eq!(tensor_line_bundles(&u, &ChernVector::zero()), u);
        }
    }
}
