//! The poset of pairs `(i, j)` with `1 ≤ i ≤ |j| ≤ n`, its order ideals and
//! the marked chains defining polytope inequalities.
//!
//! Indices live in `N = {1, …, n, −n, …, −1}`, totally ordered in that
//! sequence. Elements are enumerated canonically (by `i`, then by `j` along
//! that sequence); subsets of the poset are bitmasks over this enumeration.

use std::collections::HashMap;

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("rank must be at least 1, got {0}")]
    BadRank(usize),
    #[error("rank {0} exceeds the supported maximum of 7")]
    RankTooLarge(usize),
    #[error("({0},{1}) is not an element of the poset")]
    NotAnElement(i32, i32),
    #[error("the marked set must not contain ({0},{1}) in type B")]
    ContainsB(i32, i32),
}

/// Position of `j` in the sequence `1, …, n, −n, …, −1` (0-based).
pub fn position(n: usize, j: i32) -> usize {
    debug_assert!(j != 0 && j.unsigned_abs() as usize <= n);
    if j > 0 {
        (j - 1) as usize
    } else {
        (2 * n as i32 + j) as usize
    }
}

/// Inverse of [`position`].
pub fn index_at(n: usize, p: usize) -> i32 {
    if p < n {
        p as i32 + 1
    } else {
        p as i32 - 2 * n as i32
    }
}

/// The index set `N` in increasing order.
pub fn index_set(n: usize) -> Vec<i32> {
    (0..2 * n).map(|p| index_at(n, p)).collect()
}

pub fn precedes(n: usize, a: i32, b: i32) -> bool {
    position(n, a) < position(n, b)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosetElement {
    pub i: i32,
    pub j: i32,
}

impl PosetElement {
    pub fn new(i: i32, j: i32) -> Self {
        PosetElement { i, j }
    }

    pub fn is_diagonal(&self) -> bool {
        self.i == self.j
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.i == -self.j
    }
}

impl Serialize for PosetElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.i)?;
        t.serialize_element(&self.j)?;
        t.end()
    }
}

impl std::fmt::Display for PosetElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Iterates the set bits of a mask in increasing order.
pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderIdeal {
    pub mask: u64,
    /// Number of diagonal elements `(i, i)` contained.
    pub stratum: usize,
}

#[derive(Clone, Debug)]
pub struct PosetP {
    n: usize,
    elements: Vec<PosetElement>,
    index: HashMap<PosetElement, usize>,
    below: Vec<u64>,
    above: Vec<u64>,
    covers: Vec<(usize, usize)>,
    diagonal: u64,
    antidiagonal: u64,
}

impl PosetP {
    pub fn build(n: usize) -> Result<Self, PosetError> {
        if n < 1 {
            return Err(PosetError::BadRank(n));
        }
        if n > 7 {
            return Err(PosetError::RankTooLarge(n));
        }
        let mut elements = Vec::new();
        for i in 1..=n as i32 {
            for j in index_set(n) {
                if j.abs() >= i {
                    elements.push(PosetElement::new(i, j));
                }
            }
        }
        let index: HashMap<_, _> = elements.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let leq =
            |a: &PosetElement, b: &PosetElement| a.i <= b.i && position(n, a.j) <= position(n, b.j);
        let m = elements.len();
        let mut below = vec![0u64; m];
        let mut above = vec![0u64; m];
        for (x, a) in elements.iter().enumerate() {
            for (y, b) in elements.iter().enumerate() {
                if leq(a, b) {
                    below[y] |= 1 << x;
                    above[x] |= 1 << y;
                }
            }
        }
        let mut covers = Vec::new();
        for x in 0..m {
            for y in 0..m {
                if x == y || below[y] & (1 << x) == 0 {
                    continue;
                }
                let between = above[x] & below[y] & !(1 << x) & !(1 << y);
                if between == 0 {
                    covers.push((x, y));
                }
            }
        }
        let mut diagonal = 0;
        let mut antidiagonal = 0;
        for (k, e) in elements.iter().enumerate() {
            if e.is_diagonal() {
                diagonal |= 1 << k;
            }
            if e.is_antidiagonal() {
                antidiagonal |= 1 << k;
            }
        }
        Ok(PosetP {
            n,
            elements,
            index,
            below,
            above,
            covers,
            diagonal,
            antidiagonal,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PosetElement] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> PosetElement {
        self.elements[k]
    }

    pub fn index_of(&self, e: PosetElement) -> Option<usize> {
        self.index.get(&e).copied()
    }

    pub fn idx(&self, i: i32, j: i32) -> usize {
        self.index[&PosetElement::new(i, j)]
    }

    pub fn contains(&self, i: i32, j: i32) -> bool {
        self.index.contains_key(&PosetElement::new(i, j))
    }

    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// `a ⪯ b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b] & (1 << a) != 0
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// Mask of the principal ideal generated by element `k`.
    pub fn principal(&self, k: usize) -> u64 {
        self.below[k]
    }

    pub fn up_set(&self, k: usize) -> u64 {
        self.above[k]
    }

    /// Cover relations `(lower, upper)`.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn diagonal_mask(&self) -> u64 {
        self.diagonal
    }

    pub fn antidiagonal_mask(&self) -> u64 {
        self.antidiagonal
    }

    /// Smallest ideal containing the given elements.
    pub fn ideal_generated(&self, mask: u64) -> u64 {
        bits(mask).fold(0, |acc, k| acc | self.below[k])
    }

    pub fn is_ideal(&self, mask: u64) -> bool {
        self.ideal_generated(mask) == mask
    }

    /// Maximal elements of a subset.
    pub fn maximal(&self, mask: u64) -> u64 {
        bits(mask)
            .filter(|&k| self.above[k] & mask == 1 << k)
            .fold(0, |acc, k| acc | (1 << k))
    }

    pub fn ideal(&self, mask: u64) -> OrderIdeal {
        debug_assert!(self.is_ideal(mask));
        OrderIdeal {
            mask,
            stratum: (mask & self.diagonal).count_ones() as usize,
        }
    }

    /// All order ideals, sorted by stratum and then by mask.
    pub fn enumerate_ideals(&self) -> Vec<OrderIdeal> {
        let mut out = Vec::new();
        // Canonical order is a linear extension, so deciding elements in
        // order only needs the lower covers of the current element.
        let lower: Vec<u64> = (0..self.len()).map(|k| self.below[k] & !(1 << k)).collect();
        fn rec(k: usize, mask: u64, lower: &[u64], out: &mut Vec<u64>) {
            if k == lower.len() {
                out.push(mask);
                return;
            }
            rec(k + 1, mask, lower, out);
            if lower[k] & mask == lower[k] {
                rec(k + 1, mask | (1 << k), lower, out);
            }
        }
        let mut masks = Vec::new();
        rec(0, 0, &lower, &mut masks);
        for m in masks {
            out.push(self.ideal(m));
        }
        out.sort_by_key(|j| (j.stratum, j.mask));
        out
    }

    pub fn ideals_in_stratum(&self, k: usize) -> Vec<OrderIdeal> {
        self.enumerate_ideals()
            .into_iter()
            .filter(|j| j.stratum == k)
            .collect()
    }

    pub fn mask_of(&self, elems: &[PosetElement]) -> Result<u64, PosetError> {
        let mut m = 0;
        for e in elems {
            let k = self
                .index_of(*e)
                .ok_or(PosetError::NotAnElement(e.i, e.j))?;
            m |= 1 << k;
        }
        Ok(m)
    }

    pub fn elements_of(&self, mask: u64) -> Vec<PosetElement> {
        bits(mask).map(|k| self.elements[k]).collect()
    }

    pub fn to_json(&self) -> Value {
        let covers: Vec<Value> = self
            .covers
            .iter()
            .map(|&(a, b)| json!([self.elements[a], self.elements[b]]))
            .collect();
        json!({"n": self.n, "elements": self.elements, "covers": covers})
    }

    pub fn ideals_json(&self, ideals: &[OrderIdeal]) -> Value {
        let list: Vec<Value> = ideals
            .iter()
            .map(|j| json!({"stratum": j.stratum, "elements": self.elements_of(j.mask)}))
            .collect();
        Value::Array(list)
    }
}

/// A marked subset `O ⊇ A`; in type B it must avoid the antidiagonal.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OSet {
    pub mask: u64,
    pub type_b: bool,
}

impl OSet {
    /// `O` from its elements; the diagonal is always added.
    pub fn new(p: &PosetP, elems: &[PosetElement], type_b: bool) -> Result<Self, PosetError> {
        let mask = p.mask_of(elems)? | p.diagonal_mask();
        Self::from_mask(p, mask, type_b)
    }

    pub fn from_mask(p: &PosetP, mask: u64, type_b: bool) -> Result<Self, PosetError> {
        let mask = mask | p.diagonal_mask();
        if type_b {
            if let Some(k) = bits(mask & p.antidiagonal_mask()).next() {
                let e = p.element(k);
                return Err(PosetError::ContainsB(e.i, e.j));
            }
        }
        Ok(OSet { mask, type_b })
    }

    /// The whole poset in type C, everything but the antidiagonal in type B.
    pub fn gt(p: &PosetP, type_b: bool) -> Self {
        let mask = if type_b {
            p.full_mask() & !p.antidiagonal_mask()
        } else {
            p.full_mask()
        };
        OSet { mask, type_b }
    }

    /// Only the diagonal.
    pub fn fflv(p: &PosetP, type_b: bool) -> Self {
        OSet {
            mask: p.diagonal_mask(),
            type_b,
        }
    }

    /// Every admissible marked set, in increasing mask order.
    pub fn all(p: &PosetP, type_b: bool) -> Vec<OSet> {
        let mut free = p.full_mask() & !p.diagonal_mask();
        if type_b {
            free &= !p.antidiagonal_mask();
        }
        let free_bits: Vec<usize> = bits(free).collect();
        let mut out: Vec<OSet> = (0u64..1 << free_bits.len())
            .map(|sel| {
                let mask = bits(sel).fold(p.diagonal_mask(), |acc, b| acc | (1 << free_bits[b]));
                OSet { mask, type_b }
            })
            .collect();
        out.sort();
        out
    }

    pub fn contains(&self, k: usize) -> bool {
        self.mask & (1 << k) != 0
    }

    pub fn to_json(&self, p: &PosetP) -> Value {
        json!(p.elements_of(self.mask))
    }
}

/// `M_O(J) = (J ∩ O) ∪ max(J)`.
pub fn m_o(p: &PosetP, o: &OSet, j: u64) -> u64 {
    (j & o.mask) | p.maximal(j)
}

/// A chain `start ≺ interior… ≺ end` with `start ∈ O` and interior outside `O`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedChain {
    pub start: usize,
    pub interior: Vec<usize>,
    pub end: usize,
}

pub fn enumerate_marked_chains(p: &PosetP, o: &OSet) -> Vec<MarkedChain> {
    fn extend(
        p: &PosetP,
        o: &OSet,
        start: usize,
        last: usize,
        interior: &mut Vec<usize>,
        out: &mut Vec<MarkedChain>,
    ) {
        for e in bits(p.up_set(last) & !(1 << last)) {
            out.push(MarkedChain {
                start,
                interior: interior.clone(),
                end: e,
            });
            if !o.contains(e) {
                interior.push(e);
                extend(p, o, start, e, interior, out);
                interior.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in bits(o.mask) {
        extend(p, o, s, s, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: i32, j: i32) -> PosetElement {
        PosetElement::new(i, j)
    }

    #[test]
    fn rank_two_hasse_diagram() {
        let p = PosetP::build(2).unwrap();
        assert_eq!(p.len(), 6);
        let mut covers: Vec<(PosetElement, PosetElement)> = p
            .covers()
            .iter()
            .map(|&(a, b)| (p.element(a), p.element(b)))
            .collect();
        covers.sort();
        let mut expect = vec![
            (e(1, 1), e(1, 2)),
            (e(1, 2), e(2, 2)),
            (e(1, 2), e(1, -2)),
            (e(1, -2), e(2, -2)),
            (e(2, 2), e(2, -2)),
            (e(1, -2), e(1, -1)),
        ];
        expect.sort();
        assert_eq!(covers, expect);
    }

    #[test]
    fn rank_one_poset() {
        let p = PosetP::build(1).unwrap();
        assert_eq!(p.elements(), &[e(1, 1), e(1, -1)]);
        assert!(p.lt(0, 1));
        assert_eq!(PosetP::build(0).unwrap_err(), PosetError::BadRank(0));
    }

    #[test]
    fn comparability_matches_definition_at_rank_three() {
        let p = PosetP::build(3).unwrap();
        assert_eq!(p.len(), 12);
        let order = index_set(3);
        let pos = |j: i32| order.iter().position(|&x| x == j).unwrap();
        for (a, x) in p.elements().iter().enumerate() {
            for (b, y) in p.elements().iter().enumerate() {
                let expect = x.i <= y.i && pos(x.j) <= pos(y.j);
                assert_eq!(p.leq(a, b), expect, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn ideal_counts_small() {
        let p1 = PosetP::build(1).unwrap();
        let ideals = p1.enumerate_ideals();
        assert_eq!(ideals.iter().filter(|j| j.stratum == 0).count(), 1);
        assert_eq!(ideals.iter().filter(|j| j.stratum == 1).count(), 2);
        let p2 = PosetP::build(2).unwrap();
        assert_eq!(p2.ideals_in_stratum(1).len(), 4);
        assert_eq!(p2.ideals_in_stratum(2).len(), 5);
        let p3 = PosetP::build(3).unwrap();
        let sizes: Vec<usize> = (1..=3).map(|k| p3.ideals_in_stratum(k).len()).collect();
        assert_eq!(sizes, vec![6, 14, 14]);
    }

    #[test]
    fn marked_set_extremes() {
        let p = PosetP::build(2).unwrap();
        for j in p.enumerate_ideals() {
            assert_eq!(m_o(&p, &OSet::gt(&p, false), j.mask), j.mask);
            let fflv = m_o(&p, &OSet::fflv(&p, false), j.mask);
            assert_eq!(fflv, p.maximal(j.mask) | (j.mask & p.diagonal_mask()));
        }
    }

    #[test]
    fn chains_rank_one() {
        let p = PosetP::build(1).unwrap();
        let chains = enumerate_marked_chains(&p, &OSet::fflv(&p, false));
        assert_eq!(
            chains,
            vec![MarkedChain {
                start: 0,
                interior: vec![],
                end: 1
            }]
        );
    }

    #[test]
    fn chains_with_full_marking_are_comparable_pairs() {
        let p = PosetP::build(2).unwrap();
        let chains = enumerate_marked_chains(&p, &OSet::gt(&p, false));
        assert!(chains.iter().all(|c| c.interior.is_empty()));
        let pairs = (0..6)
            .flat_map(|a| (0..6).map(move |b| (a, b)))
            .filter(|&(a, b)| p.lt(a, b))
            .count();
        assert_eq!(chains.len(), pairs);
    }

    #[test]
    fn chains_with_diagonal_marking_pass_through_unmarked() {
        let p = PosetP::build(2).unwrap();
        let chains = enumerate_marked_chains(&p, &OSet::fflv(&p, false));
        let want = MarkedChain {
            start: p.idx(1, 1),
            interior: vec![p.idx(1, 2)],
            end: p.idx(1, -2),
        };
        assert!(chains.contains(&want));
    }

    #[test]
    fn type_b_rejects_antidiagonal() {
        let p = PosetP::build(2).unwrap();
        assert_eq!(
            OSet::new(&p, &[e(1, -1)], true).unwrap_err(),
            PosetError::ContainsB(1, -1)
        );
        assert_eq!(OSet::all(&p, true).len(), 4);
        assert_eq!(OSet::all(&p, false).len(), 16);
    }
}
