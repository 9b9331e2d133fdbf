//! Pipe dreams on the poset: the permutation of a subset, explicit pipe
//! tracing, the twisted permutations attached to a marked set and its order
//! ideals, and admissible tuples.

use std::collections::HashMap;

use serde::Serialize;

use crate::poset::{
    bits, index_at, index_set, m_o, position, OSet, OrderIdeal, PosetElement, PosetP,
};

/// A bijection of `N = {1, …, n, −n, …, −1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    n: usize,
    images: Vec<i32>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        SignedPermutation {
            n,
            images: index_set(n),
        }
    }

    pub fn transposition(n: usize, a: i32, b: i32) -> Self {
        let mut w = Self::identity(n);
        w.images.swap(position(n, a), position(n, b));
        w
    }

    /// From the images of `1, …, n, −n, …, −1` in that order.
    pub fn from_images(n: usize, images: Vec<i32>) -> Option<Self> {
        let mut seen = vec![false; 2 * n];
        for &x in &images {
            if x == 0
                || x.unsigned_abs() as usize > n
                || std::mem::replace(&mut seen[position(n, x)], true)
            {
                return None;
            }
        }
        (images.len() == 2 * n).then_some(SignedPermutation { n, images })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: i32) -> i32 {
        self.images[position(self.n, x)]
    }

    /// `self ∘ other` (`other` acts first).
    pub fn compose(&self, other: &Self) -> Self {
        let images = other.images.iter().map(|&x| self.apply(x)).collect();
        SignedPermutation { n: self.n, images }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; 2 * self.n];
        for (p, &x) in self.images.iter().enumerate() {
            images[position(self.n, x)] = index_at(self.n, p);
        }
        SignedPermutation { n: self.n, images }
    }

    /// Images of `1, …, n, −n, …, −1`.
    pub fn image_list(&self) -> &[i32] {
        &self.images
    }
}

impl Serialize for SignedPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.images.serialize(s)
    }
}

/// Product of the transpositions `s_{i,j}`, `(i,j) ∈ M`, taken in canonical
/// element order, the rightmost factor acting first.
pub fn perm_of_subset(p: &PosetP, subset: u64) -> SignedPermutation {
    let n = p.n();
    bits(subset).fold(SignedPermutation::identity(n), |w, k| {
        let e = p.element(k);
        if e.i == e.j {
            w
        } else {
            w.compose(&SignedPermutation::transposition(n, e.i, e.j))
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pipe {
    pub owner: i32,
    pub elements: Vec<PosetElement>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Heading {
    /// Towards the previous `j`, same `i`.
    UpLeft,
    /// Towards the previous `i`, same `j`.
    DownLeft,
}

fn step(p: &PosetP, at: PosetElement, heading: Heading) -> Option<PosetElement> {
    let n = p.n();
    match heading {
        Heading::UpLeft => {
            let pos = position(n, at.j);
            if pos == 0 {
                return None;
            }
            let j = index_at(n, pos - 1);
            (j.abs() >= at.i).then_some(PosetElement::new(at.i, j))
        }
        Heading::DownLeft => (at.i > 1).then_some(PosetElement::new(at.i - 1, at.j)),
    }
}

/// Follows all `2n` pipes through the diagram of `M`. Pipes turn at every
/// element of `M ∪ A` and cross elsewhere.
pub fn trace_pipes(p: &PosetP, subset: u64) -> Vec<Pipe> {
    let turns = subset | p.diagonal_mask();
    index_set(p.n())
        .into_iter()
        .map(|owner| {
            let l = owner.abs();
            let mut at = PosetElement::new(l, -l);
            let mut heading = if owner > 0 {
                Heading::UpLeft
            } else {
                Heading::DownLeft
            };
            let mut elements = Vec::new();
            loop {
                elements.push(at);
                if turns & (1 << p.idx(at.i, at.j)) != 0 {
                    heading = match heading {
                        Heading::UpLeft => Heading::DownLeft,
                        Heading::DownLeft => Heading::UpLeft,
                    };
                }
                match step(p, at, heading) {
                    Some(next) => at = next,
                    None => break,
                }
            }
            Pipe { owner, elements }
        })
        .collect()
}

/// The permutation read off from pipe endpoints.
pub fn perm_from_pipes(n: usize, pipes: &[Pipe]) -> SignedPermutation {
    let mut images = vec![0; 2 * n];
    for pipe in pipes {
        let last = pipe.elements.last().expect("pipes are nonempty");
        images[position(n, pipe.owner)] = last.j;
    }
    SignedPermutation::from_images(n, images).expect("pipe endpoints form a bijection")
}

/// `w^{O,J} = w_O⁻¹ ∘ w_{M_O(J)}`.
pub fn twisted_perm(p: &PosetP, o: &OSet, ideal: u64) -> SignedPermutation {
    perm_of_subset(p, o.mask)
        .inverse()
        .compose(&perm_of_subset(p, m_o(p, o, ideal)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RTable {
    pub entries: Vec<(PosetElement, i32)>,
}

impl RTable {
    pub fn get(&self, i: i32, j: i32) -> Option<i32> {
        self.entries
            .iter()
            .find(|(e, _)| e.i == i && e.j == j)
            .map(|&(_, r)| r)
    }
}

pub fn r_table(p: &PosetP, o: &OSet) -> RTable {
    let entries = p
        .elements()
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, twisted_perm(p, o, p.principal(k)).apply(e.i)))
        .collect();
    RTable { entries }
}

/// Per-marked-set cache: `w_O`, the values `r(i,j)`, and `w^{O,J}` for every
/// order ideal `J`.
#[derive(Clone, Debug)]
pub struct Twist {
    o: OSet,
    n: usize,
    r: Vec<i32>,
    perms: HashMap<u64, SignedPermutation>,
}

impl Twist {
    pub fn new(p: &PosetP, o: OSet) -> Self {
        let w_o_inv = perm_of_subset(p, o.mask).inverse();
        let perms: HashMap<u64, SignedPermutation> = p
            .enumerate_ideals()
            .into_iter()
            .map(|j| {
                (
                    j.mask,
                    w_o_inv.compose(&perm_of_subset(p, m_o(p, &o, j.mask))),
                )
            })
            .collect();
        let r = (0..p.len())
            .map(|k| perms[&p.principal(k)].apply(p.element(k).i))
            .collect();
        Twist {
            o,
            n: p.n(),
            r,
            perms,
        }
    }

    pub fn o(&self) -> &OSet {
        &self.o
    }

    /// `r` at the element with canonical index `k`.
    pub fn r_at(&self, k: usize) -> i32 {
        self.r[k]
    }

    pub fn r(&self, p: &PosetP, i: i32, j: i32) -> i32 {
        self.r[p.idx(i, j)]
    }

    pub fn perm(&self, ideal: u64) -> &SignedPermutation {
        &self.perms[&ideal]
    }

    /// `(w^{O,J}(1), …, w^{O,J}(k))`.
    pub fn tuple(&self, ideal: &OrderIdeal) -> Vec<i32> {
        let w = self.perm(ideal.mask);
        let t: Vec<i32> = (1..=ideal.stratum as i32).map(|i| w.apply(i)).collect();
        assert!(is_admissible(self.n, &t), "non-admissible tuple {t:?}");
        t
    }
}

pub fn ideal_tuple(p: &PosetP, o: &OSet, ideal: &OrderIdeal) -> Vec<i32> {
    let w = twisted_perm(p, o, ideal.mask);
    let t: Vec<i32> = (1..=ideal.stratum as i32).map(|i| w.apply(i)).collect();
    assert!(is_admissible(p.n(), &t), "non-admissible tuple {t:?}");
    t
}

pub fn is_admissible(n: usize, t: &[i32]) -> bool {
    let mut seen = std::collections::HashSet::new();
    if !t.iter().all(|x| seen.insert(*x)) {
        return false;
    }
    (1..=n as i32).all(|l| t.iter().filter(|x| x.abs() <= l).count() as i32 <= l)
}

/// Sorts a tuple increasingly along `1, …, n, −n, …, −1`; returns the sign of
/// the sorting permutation, or `None` when an entry repeats.
pub fn sort_tuple(n: usize, t: &[i32]) -> Option<(i32, Vec<i32>)> {
    let mut v: Vec<i32> = t.to_vec();
    let mut sign = 1;
    for a in 0..v.len() {
        for b in 0..v.len() - 1 - a {
            match position(n, v[b]).cmp(&position(n, v[b + 1])) {
                std::cmp::Ordering::Greater => {
                    v.swap(b, b + 1);
                    sign = -sign;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Some((sign, v))
}

/// Increasing `k`-tuples split into admissible and non-admissible ones.
pub fn theta(n: usize, k: usize) -> (Vec<Vec<i32>>, Vec<Vec<i32>>) {
    let order = index_set(n);
    let mut admissible = Vec::new();
    let mut rest = Vec::new();
    fn rec(order: &[i32], start: usize, k: usize, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..order.len() {
            cur.push(order[s]);
            rec(order, s + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    rec(&order, 0, k, &mut Vec::new(), &mut all);
    for t in all {
        if is_admissible(n, &t) {
            admissible.push(t);
        } else {
            rest.push(t);
        }
    }
    (admissible, rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn mask(p: &PosetP, pairs: &[(i32, i32)]) -> u64 {
        pairs.iter().fold(0, |m, &(i, j)| m | (1 << p.idx(i, j)))
    }

    #[test]
    fn worked_subset_permutation() {
        let p = PosetP::build(3).unwrap();
        let m = mask(&p, &[(1, 1), (1, 3), (1, -2), (2, 2), (2, 3), (3, -3)]);
        assert_eq!(perm_of_subset(&p, m).image_list(), &[-2, 1, -3, 2, 3, -1]);
        assert_eq!(
            perm_from_pipes(3, &trace_pipes(&p, m)).image_list(),
            &[-2, 1, -3, 2, 3, -1]
        );
        assert_eq!(perm_of_subset(&p, 0), SignedPermutation::identity(3));
    }

    #[test]
    fn empty_subset_pipe_of_one_ends_at_diagonal() {
        let p = PosetP::build(3).unwrap();
        let pipes = trace_pipes(&p, 0);
        assert_eq!(*pipes[0].elements.last().unwrap(), PosetElement::new(1, 1));
    }

    #[test]
    fn tracing_agrees_with_products_exhaustively() {
        for n in 1..=3 {
            let p = PosetP::build(n).unwrap();
            for m in 0..=p.full_mask() {
                let pipes = trace_pipes(&p, m);
                assert_eq!(perm_from_pipes(n, &pipes), perm_of_subset(&p, m));
                for pipe in &pipes {
                    for w in pipe.elements.windows(2) {
                        let (a, b) = (p.idx(w[1].i, w[1].j), p.idx(w[0].i, w[0].j));
                        assert!(p.covers().contains(&(a, b)));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_two_permutation_census() {
        let p = PosetP::build(2).unwrap();
        let free = p.full_mask() & !p.diagonal_mask();
        let mut counts: BTreeMap<Vec<i32>, usize> = BTreeMap::new();
        for m in 0..=free {
            if m & !free == 0 {
                *counts
                    .entry(perm_of_subset(&p, m).image_list().to_vec())
                    .or_default() += 1;
            }
        }
        assert_eq!(counts.len(), 12);
        let twice = [
            [-2, 2, 1, -1],
            [-2, 1, 2, -1],
            [-1, 2, 1, -2],
            [-1, 1, 2, -2],
        ];
        let once = [
            [1, 2, -2, -1],
            [1, -2, 2, -1],
            [2, 1, -2, -1],
            [2, -2, 1, -1],
            [-1, 2, -2, 1],
            [-1, -2, 2, 1],
            [-1, -2, 1, 2],
            [-1, 1, -2, 2],
        ];
        for w in twice {
            assert_eq!(counts[&w.to_vec()], 2, "{w:?}");
        }
        for w in once {
            assert_eq!(counts[&w.to_vec()], 1, "{w:?}");
        }
    }

    #[test]
    fn r_table_examples() {
        let p = PosetP::build(3).unwrap();
        let o = OSet::from_mask(&p, mask(&p, &[(1, 3), (1, -2), (2, 3), (3, -3)]), false).unwrap();
        let r = r_table(&p, &o);
        let expect = [
            ((1, 1), 2),
            ((1, 2), -3),
            ((1, 3), -2),
            ((1, -3), 3),
            ((1, -2), 1),
            ((1, -1), -1),
            ((2, 2), -3),
            ((2, 3), 2),
            ((2, -3), 3),
            ((2, -2), -2),
            ((3, 3), -3),
            ((3, -3), 3),
        ];
        for ((i, j), v) in expect {
            assert_eq!(r.get(i, j), Some(v), "r({i},{j})");
        }
        let j = p.principal(p.idx(2, -3));
        assert_eq!(
            perm_of_subset(&p, m_o(&p, &o, j)).image_list(),
            &[3, -3, 2, 1, -2, -1]
        );
        assert_eq!(twisted_perm(&p, &o, j).image_list(), &[-2, 3, -3, 2, 1, -1]);
        assert_eq!(ideal_tuple(&p, &o, &p.ideal(j)), vec![-2, 3]);

        let p2 = PosetP::build(2).unwrap();
        let o2 = OSet::new(&p2, &[PosetElement::new(1, -2)], false).unwrap();
        let r2 = r_table(&p2, &o2);
        for ((i, j), v) in [
            ((1, 1), -2),
            ((1, 2), 2),
            ((1, -2), 1),
            ((1, -1), -1),
            ((2, 2), 2),
            ((2, -2), -2),
        ] {
            assert_eq!(r2.get(i, j), Some(v));
        }
        for n in 1..=3 {
            let p = PosetP::build(n).unwrap();
            let r = r_table(&p, &OSet::fflv(&p, false));
            assert!(r.entries.iter().all(|(e, v)| e.j == *v));
        }
    }

    #[test]
    fn theta_rank_two() {
        let (adm1, non1) = theta(2, 1);
        let (adm2, non2) = theta(2, 2);
        assert_eq!((adm1.len(), adm2.len()), (4, 5));
        assert!(non1.is_empty());
        assert_eq!(non2, vec![vec![1, -1]]);
        for n in 1..=4 {
            for k in 1..=n {
                assert!(is_admissible(n, &(1..=k as i32).collect::<Vec<_>>()));
            }
        }
    }

    #[test]
    fn sorting_tracks_sign() {
        assert_eq!(sort_tuple(2, &[-1, 1]), Some((-1, vec![1, -1])));
        assert_eq!(sort_tuple(3, &[2, -3, 1]), Some((1, vec![1, 2, -3])));
        assert_eq!(sort_tuple(3, &[2, 1, -3]), Some((-1, vec![1, 2, -3])));
        assert_eq!(sort_tuple(2, &[2, 2]), None);
    }
}
