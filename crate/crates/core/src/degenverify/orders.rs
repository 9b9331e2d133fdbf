//! Orders used by the verifications: `≪` via `wt_A`, the element order on `P`
//! for type C, the signature order for type B, and `<_A`.

use std::cmp::Ordering;

use crate::exactalg::{Monomial, MonomialOrder};
use crate::pipedream::Twist;
use crate::poset::{index_set, position, PosetP};

/// Index set in the order `−1, 1, −2, 2, …`.
pub fn primed_order(n: usize) -> Vec<i32> {
    (1..=n as i32).flat_map(|i| [-i, i]).collect()
}

/// Row sources `j` with `(i, j) ∈ P`, increasing along `⋖`.
pub fn row_sources(n: usize, i: i32) -> Vec<i32> {
    index_set(n).into_iter().filter(|j| j.abs() >= i).collect()
}

fn in_o(p: &PosetP, twist: &Twist, i: i32, j: i32) -> bool {
    twist.o().contains(p.idx(i, j))
}

/// `(i,a) ∈ O` and no `a ⋖ j′ ⊴ b` with `(i,j′) ∈ O`, for `a ⋖ b`.
fn exceptional(p: &PosetP, twist: &Twist, i: i32, a: i32, b: i32) -> bool {
    let n = p.n();
    in_o(p, twist, i, a)
        && !row_sources(n, i).into_iter().any(|j| {
            position(n, a) < position(n, j)
                && position(n, j) <= position(n, b)
                && in_o(p, twist, i, j)
        })
}

/// Comparison of `(i, r(i,j1))` and `(i, r(i,j2))` in the type C order.
pub fn cmp_sources_c(p: &PosetP, twist: &Twist, i: i32, j1: i32, j2: i32) -> Ordering {
    let n = p.n();
    match position(n, j1).cmp(&position(n, j2)) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Less if exceptional(p, twist, i, j1, j2) => Ordering::Greater,
        Ordering::Less => Ordering::Less,
        Ordering::Greater => cmp_sources_c(p, twist, i, j2, j1).reverse(),
    }
}

/// Comparison of `(i, r(i,j1))` and `(i, r(i,j2))` in the type B order.
pub fn cmp_sources_b(p: &PosetP, twist: &Twist, i: i32, j1: i32, j2: i32) -> Ordering {
    let n = p.n();
    match position(n, j1).cmp(&position(n, j2)) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater if exceptional(p, twist, i, j2, j1) => Ordering::Greater,
        Ordering::Greater => Ordering::Less,
        Ordering::Less => cmp_sources_b(p, twist, i, j2, j1).reverse(),
    }
}

/// Sorts by a comparator after checking it is a strict total order.
fn sort_checked<T: Copy>(items: &[T], cmp: impl Fn(T, T) -> Ordering) -> Result<Vec<T>, String> {
    let m = items.len();
    let mut ranked: Vec<(usize, T)> = items
        .iter()
        .map(|&x| {
            (
                items
                    .iter()
                    .filter(|&&y| cmp(y, x) == Ordering::Less)
                    .count(),
                x,
            )
        })
        .collect();
    ranked.sort_by_key(|r| r.0);
    if ranked.iter().enumerate().any(|(k, r)| r.0 != k) {
        return Err("comparator is not a strict total order".into());
    }
    for a in 0..m {
        for b in a + 1..m {
            if cmp(ranked[a].1, ranked[b].1) != Ordering::Less
                || cmp(ranked[b].1, ranked[a].1) != Ordering::Greater
            {
                return Err("comparator is not antisymmetric".into());
            }
        }
    }
    Ok(ranked.into_iter().map(|r| r.1).collect())
}

/// Canonical `P` indices increasing in the type C order.
pub fn element_order_c(p: &PosetP, twist: &Twist) -> Result<Vec<usize>, String> {
    let mut out = Vec::with_capacity(p.len());
    for i in 1..=p.n() as i32 {
        let srcs = sort_checked(&row_sources(p.n(), i), |a, b| {
            cmp_sources_c(p, twist, i, a, b)
        })?;
        out.extend(srcs.into_iter().map(|j| p.idx(i, twist.r(p, i, j))));
    }
    Ok(out)
}

/// Canonical `P∖A` indices increasing in the type B order, by row.
pub fn element_order_b(p: &PosetP, twist: &Twist) -> Result<Vec<Vec<usize>>, String> {
    let mut out = Vec::with_capacity(p.n());
    for i in 1..=p.n() as i32 {
        let srcs = sort_checked(&row_sources(p.n(), i), |a, b| {
            cmp_sources_b(p, twist, i, a, b)
        })?;
        out.push(
            srcs.into_iter()
                .map(|j| twist.r(p, i, j))
                .filter(|&t| t != i)
                .map(|t| p.idx(i, t))
                .collect(),
        );
    }
    Ok(out)
}

/// Lex order on `ℤ^P` from an increasing element list: smaller means larger
/// at the first differing element.
pub fn order_c(p: &PosetP, twist: &Twist) -> Result<MonomialOrder, String> {
    let elems = element_order_c(p, twist)?;
    let rows = elems
        .into_iter()
        .map(|e| {
            let mut r = vec![0; p.len()];
            r[e] = -1;
            r
        })
        .collect();
    Ok(MonomialOrder::from_rows(p.len(), rows))
}

/// Key of the type B signature order; `d` is indexed by position among the
/// `P∖A` elements in canonical order.
#[derive(Clone, Debug)]
pub struct SignatureOrder {
    rows: Vec<Vec<i64>>,
}

impl SignatureOrder {
    pub fn new(p: &PosetP, twist: &Twist) -> Result<Self, String> {
        let off: Vec<usize> = crate::polytope_b::off_diagonal(p);
        let slot = |k: usize| off.iter().position(|&x| x == k).expect("off-diagonal");
        let mut rows = Vec::new();
        for (i, row) in element_order_b(p, twist)?.into_iter().enumerate() {
            let i = i as i32 + 1;
            let mut weight = vec![0i64; off.len()];
            for (s, &k) in off.iter().enumerate() {
                let e = p.element(k);
                if e.i == i {
                    weight[s] = if e.j == -i { 1 } else { 2 };
                }
            }
            rows.push(weight);
            for k in row {
                let mut r = vec![0; off.len()];
                r[slot(k)] = -1;
                rows.push(r);
            }
        }
        Ok(SignatureOrder { rows })
    }

    pub fn key(&self, d: &[u32]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(d).map(|(a, &b)| a * b as i64).sum())
            .collect()
    }

    pub fn key_i64(&self, d: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(d).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `>` as a monomial order on `z` over `P∖A`, optionally followed by a
    /// variable `t` compared first.
    pub fn greater(&self, with_t: bool) -> MonomialOrder {
        let m = self.rows[0].len();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        if with_t {
            let mut r = vec![0; m + 1];
            r[m] = 1;
            rows.push(r);
        }
        for r in &self.rows {
            let mut neg: Vec<i64> = r.iter().map(|x| -x).collect();
            if with_t {
                neg.push(0);
            }
            rows.push(neg);
        }
        MonomialOrder::from_rows(m + with_t as usize, rows)
    }
}

/// The signature comparison read directly from the definition: at the
/// smallest differing element compare row sums, then the entry.
pub fn signature_less_direct(
    p: &PosetP,
    twist: &Twist,
    d1: &[i64],
    d2: &[i64],
) -> Result<bool, String> {
    let off = crate::polytope_b::off_diagonal(p);
    let rows = element_order_b(p, twist)?;
    let row_sum = |d: &[i64], i: i32| -> i64 {
        off.iter()
            .zip(d)
            .filter(|(&k, _)| p.element(k).i == i)
            .map(|(&k, &x)| if p.element(k).j == -i { x } else { 2 * x })
            .sum()
    };
    for (i, row) in rows.iter().enumerate() {
        for &k in row {
            let s = off.iter().position(|&x| x == k).unwrap();
            if d1[s] != d2[s] {
                let i = i as i32 + 1;
                let (a, b) = (row_sum(d1, i), row_sum(d2, i));
                return Ok(if a != b { a < b } else { d1[s] > d2[s] });
            }
        }
    }
    Ok(false)
}

/// Rows of `wt_A` over `S`-type tuple variables in `⋖′` order.
pub fn ll_order(n: usize, tuples: &[Vec<i32>]) -> MonomialOrder {
    let rows = primed_order(n)
        .into_iter()
        .map(|z| tuples.iter().map(|t| t.contains(&z) as i64).collect())
        .collect();
    MonomialOrder::from_rows(tuples.len(), rows)
}

/// `<_A`: `wt_A(z_{i,j}) = ζ_j − ζ_i` compared lexicographically along `⋖′`,
/// ties broken by the type C order.
pub fn order_a(p: &PosetP, twist: &Twist) -> Result<MonomialOrder, String> {
    let wt = MonomialOrder::from_rows(
        p.len(),
        primed_order(p.n())
            .into_iter()
            .map(|z| {
                p.elements()
                    .iter()
                    .map(|e| (e.j == z) as i64 - (e.i == z) as i64)
                    .collect()
            })
            .collect(),
    );
    Ok(wt.then(&order_c(p, twist)?))
}

/// Images `z^{ξ(…)}` define the pullback of an order along a monomial map.
pub fn pullback(order: &MonomialOrder, images: &[Monomial]) -> MonomialOrder {
    order.pullback(images)
}
