//! Marked chain-order polytopes of type C: inequality description, lattice
//! points (two independent enumerations), decomposition into fundamental
//! points, and the unimodular transformation `ξ`.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactalg::{determinant, rat, rational_string, Rational};
use crate::pipedream::Twist;
use crate::poset::{bits, enumerate_marked_chains, m_o, OSet, OrderIdeal, PosetP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("not a lattice point of the polytope: {0}")]
    NotALatticePoint(String),
    #[error("weight has {got} entries, expected {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("enumerations disagree: {decomposition} points by decomposition, {brute_force} by box search")]
    EnumerationMismatch {
        decomposition: usize,
        brute_force: usize,
    },
}

/// Dominant weight `a₁ω₁ + … + a_nω_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightC {
    pub a: Vec<u32>,
}

impl WeightC {
    pub fn new(a: Vec<u32>) -> Self {
        WeightC { a }
    }

    pub fn fundamental(n: usize, k: usize) -> Self {
        let mut a = vec![0; n];
        a[k - 1] = 1;
        WeightC { a }
    }

    pub fn zero(n: usize) -> Self {
        WeightC { a: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `λ(i) = a_i + … + a_n`, 1-based.
    pub fn lambda(&self, i: usize) -> i64 {
        self.a[i - 1..].iter().map(|&x| x as i64).sum()
    }

    pub fn total(&self) -> u32 {
        self.a.iter().sum()
    }

    pub fn plus(&self, other: &Self) -> Self {
        WeightC {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn check(&self, p: &PosetP) -> Result<(), PolytopeError> {
        if self.a.len() == p.n() {
            Ok(())
        } else {
            Err(PolytopeError::WeightLength {
                got: self.a.len(),
                expected: p.n(),
            })
        }
    }
}

/// All weights with `Σ a_i = total`, in lexicographic order.
pub fn weights_of_total(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in (0..=left).rev() {
            cur.push(x);
            rec(n, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

/// `Σ interior ≤ x_top − c·x_bottom`, with `c = 1/2` when `half` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub interior: Vec<usize>,
    pub top: usize,
    pub bottom: usize,
    pub half: bool,
}

/// Fixed diagonal coordinates, nonnegativity, and chain inequalities.
#[derive(Clone, Debug)]
pub struct HRep {
    pub fixed: Vec<(usize, Rational)>,
    pub inequalities: Vec<Inequality>,
    pub dim: usize,
}

impl HRep {
    pub(crate) fn build(
        p: &PosetP,
        o: &OSet,
        lambda: impl Fn(usize) -> Rational,
        halve_antidiagonal: bool,
    ) -> Self {
        let fixed = (1..=p.n())
            .map(|i| (p.idx(i as i32, i as i32), lambda(i)))
            .collect();
        let inequalities = enumerate_marked_chains(p, o)
            .into_iter()
            .map(|c| Inequality {
                half: halve_antidiagonal && p.element(c.end).is_antidiagonal(),
                interior: c.interior,
                top: c.start,
                bottom: c.end,
            })
            .collect();
        HRep {
            fixed,
            inequalities,
            dim: p.len(),
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        if x.len() != self.dim || x.iter().any(|v| v < &Rational::zero()) {
            return false;
        }
        if self.fixed.iter().any(|(k, v)| &x[*k] != v) {
            return false;
        }
        let half = Rational::new(1.into(), 2.into());
        self.inequalities.iter().all(|q| {
            let lhs: Rational = q.interior.iter().map(|&k| x[k].clone()).sum();
            let c = if q.half {
                half.clone()
            } else {
                Rational::one()
            };
            lhs <= &x[q.top] - c * &x[q.bottom]
        })
    }

    pub fn contains_int(&self, x: &[i64]) -> bool {
        let xr: Vec<Rational> = x.iter().map(|&v| rat(v)).collect();
        self.contains(&xr)
    }

    /// Rank of the normals of all constraints tight at `x` (equalities
    /// included); `x` is a vertex iff this equals the dimension.
    pub fn tight_rank(&self, x: &[Rational]) -> usize {
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        let unit = |k: usize| {
            let mut r = vec![Rational::zero(); self.dim];
            r[k] = Rational::one();
            r
        };
        for (k, _) in &self.fixed {
            rows.push(unit(*k));
        }
        for (k, v) in x.iter().enumerate() {
            if v.is_zero() {
                rows.push(unit(k));
            }
        }
        let half = Rational::new(1.into(), 2.into());
        for q in &self.inequalities {
            let c = if q.half {
                half.clone()
            } else {
                Rational::one()
            };
            let lhs: Rational = q.interior.iter().map(|&k| x[k].clone()).sum();
            if lhs == &x[q.top] - &c * &x[q.bottom] {
                let mut r = vec![Rational::zero(); self.dim];
                for &k in &q.interior {
                    r[k] += Rational::one();
                }
                r[q.top] -= Rational::one();
                r[q.bottom] += c;
                rows.push(r);
            }
        }
        crate::exactalg::rank(&rows)
    }

    /// All vertices, by solving every square subsystem of tight constraints.
    /// Exponential in the number of constraints; intended for rank ≤ 2.
    pub fn vertices_by_enumeration(&self) -> BTreeSet<Vec<Rational>> {
        let half = Rational::new(1.into(), 2.into());
        let mut fixed_rows = Vec::new();
        let mut fixed_rhs = Vec::new();
        let mut is_fixed = vec![false; self.dim];
        for (k, v) in &self.fixed {
            let mut r = vec![Rational::zero(); self.dim];
            r[*k] = Rational::one();
            fixed_rows.push(r);
            fixed_rhs.push(v.clone());
            is_fixed[*k] = true;
        }
        let mut candidates: Vec<Vec<Rational>> = (0..self.dim)
            .filter(|&k| !is_fixed[k])
            .map(|k| {
                let mut r = vec![Rational::zero(); self.dim];
                r[k] = Rational::one();
                r
            })
            .collect();
        for q in &self.inequalities {
            let mut r = vec![Rational::zero(); self.dim];
            for &k in &q.interior {
                r[k] += Rational::one();
            }
            r[q.top] -= Rational::one();
            r[q.bottom] += if q.half {
                half.clone()
            } else {
                Rational::one()
            };
            candidates.push(r);
        }
        let free = self.dim - fixed_rows.len();
        let mut out = BTreeSet::new();
        let mut chosen = Vec::with_capacity(free);
        self.vertex_rec(
            &candidates,
            0,
            free,
            &mut chosen,
            &fixed_rows,
            &fixed_rhs,
            &mut out,
        );
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn vertex_rec(
        &self,
        candidates: &[Vec<Rational>],
        start: usize,
        free: usize,
        chosen: &mut Vec<usize>,
        fixed_rows: &[Vec<Rational>],
        fixed_rhs: &[Rational],
        out: &mut BTreeSet<Vec<Rational>>,
    ) {
        if chosen.len() == free {
            let mut m = fixed_rows.to_vec();
            let mut b = fixed_rhs.to_vec();
            for &c in chosen.iter() {
                m.push(candidates[c].clone());
                b.push(Rational::zero());
            }
            if let Some(x) = crate::exactalg::solve(&m, &b) {
                if self.contains(&x) {
                    out.insert(x);
                }
            }
            return;
        }
        for c in start..candidates.len() {
            if candidates.len() - c < free - chosen.len() {
                break;
            }
            chosen.push(c);
            self.vertex_rec(candidates, c + 1, free, chosen, fixed_rows, fixed_rhs, out);
            chosen.pop();
        }
    }

    /// Lattice points `x` with `scale·x` integral, `scale·x_e ≡ parity[e]
    /// (mod 2)` when `scale = 2`, and `0 ≤ x_e ≤ bound`; depth-first search
    /// in canonical order, checking each inequality as soon as its variables
    /// are assigned.
    pub fn box_search(&self, scale: i64, parity: &[i64], bound: &Rational) -> BTreeSet<Vec<i64>> {
        assert!(scale == 1 || scale == 2);
        let dim = self.dim;
        let top = (bound * rat(scale)).floor().to_integer();
        let top: i64 = top.try_into().expect("small bound");
        let mut fixed: Vec<Option<i64>> = vec![None; dim];
        for (k, v) in &self.fixed {
            let s = v * rat(scale);
            if !s.is_integer() {
                return BTreeSet::new();
            }
            fixed[*k] = Some(s.to_integer().try_into().expect("small"));
        }
        // Checks triggered when a coordinate is assigned: (inequality, is_full).
        let mut triggers: Vec<Vec<(usize, bool)>> = vec![Vec::new(); dim];
        for (idx, q) in self.inequalities.iter().enumerate() {
            let partial = q.interior.iter().copied().chain([q.top]).max().unwrap();
            let full = partial.max(q.bottom);
            if partial < full {
                triggers[partial].push((idx, false));
            }
            triggers[full].push((idx, true));
        }
        let mut out = BTreeSet::new();
        let mut y = vec![0i64; dim];
        self.search(0, &mut y, &fixed, &triggers, scale, parity, top, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        k: usize,
        y: &mut Vec<i64>,
        fixed: &[Option<i64>],
        triggers: &[Vec<(usize, bool)>],
        scale: i64,
        parity: &[i64],
        top: i64,
        out: &mut BTreeSet<Vec<i64>>,
    ) {
        if k == self.dim {
            out.insert(y.clone());
            return;
        }
        let candidates: Vec<i64> = match fixed[k] {
            Some(v) => vec![v],
            None => (0..=top)
                .filter(|v| scale == 1 || v.rem_euclid(2) == parity[k])
                .collect(),
        };
        for v in candidates {
            if scale == 2 && v.rem_euclid(2) != parity[k] {
                continue;
            }
            y[k] = v;
            let ok = triggers[k].iter().all(|&(idx, full)| {
                let q = &self.inequalities[idx];
                let lhs: i64 = q.interior.iter().map(|&i| y[i]).sum();
                if full {
                    let c2 = if q.half { 1 } else { 2 };
                    2 * lhs <= 2 * y[q.top] - c2 * y[q.bottom]
                } else {
                    lhs <= y[q.top]
                }
            });
            if ok {
                self.search(k + 1, y, fixed, triggers, scale, parity, top, out);
            }
        }
    }

    pub fn to_json(&self, p: &PosetP) -> (Value, Value) {
        let eq: Vec<Value> = self
            .fixed
            .iter()
            .map(|(k, v)| json!({"element": p.element(*k), "value": rational_string(v)}))
            .collect();
        let ineq: Vec<Value> = self
            .inequalities
            .iter()
            .map(|q| {
                json!({
                    "interior": q.interior.iter().map(|&k| p.element(k)).collect::<Vec<_>>(),
                    "top": p.element(q.top),
                    "bottom": p.element(q.bottom),
                    "bottom_coeff": if q.half { "1/2" } else { "1" },
                })
            })
            .collect();
        (Value::Array(eq), Value::Array(ineq))
    }
}

pub fn hrep_c(p: &PosetP, o: &OSet, lambda: &WeightC) -> HRep {
    HRep::build(p, o, |i| rat(lambda.lambda(i)), false)
}

pub fn indicator(p: &PosetP, mask: u64) -> Vec<i64> {
    (0..p.len()).map(|k| ((mask >> k) & 1) as i64).collect()
}

/// `{1_{M_O(J)} : J ∈ 𝒥_k}`.
pub fn fundamental_vertices(p: &PosetP, o: &OSet, k: usize) -> BTreeSet<Vec<i64>> {
    p.ideals_in_stratum(k)
        .iter()
        .map(|j| indicator(p, m_o(p, o, j.mask)))
        .collect()
}

/// Nested sequences `J₁ ⊆ J₂ ⊆ …` with `counts[k−1]` ideals from stratum `k`.
pub fn multichains(p: &PosetP, counts: &[u32]) -> Vec<Vec<OrderIdeal>> {
    let ideals = p.enumerate_ideals();
    let strata: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat_n(k + 1, c as usize))
        .collect();
    fn rec(
        ideals: &[OrderIdeal],
        strata: &[usize],
        prev: u64,
        cur: &mut Vec<OrderIdeal>,
        out: &mut Vec<Vec<OrderIdeal>>,
    ) {
        let Some((&s, rest)) = strata.split_first() else {
            out.push(cur.clone());
            return;
        };
        for j in ideals
            .iter()
            .filter(|j| j.stratum == s && j.mask & prev == prev)
        {
            cur.push(*j);
            rec(ideals, rest, j.mask, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&ideals, &strata, 0, &mut Vec::new(), &mut out);
    out
}

pub fn chain_point(p: &PosetP, o: &OSet, chain: &[OrderIdeal]) -> Vec<i64> {
    let mut x = vec![0; p.len()];
    for j in chain {
        for k in bits(m_o(p, o, j.mask)) {
            x[k] += 1;
        }
    }
    x
}

/// Lattice points as sums along nested chains; also reports whether two
/// chains ever gave the same point.
pub fn lattice_points_by_decomposition(
    p: &PosetP,
    o: &OSet,
    lambda: &WeightC,
) -> (BTreeSet<Vec<i64>>, bool) {
    let chains = multichains(p, &lambda.a);
    let total = chains.len();
    let pts: BTreeSet<Vec<i64>> = chains.iter().map(|c| chain_point(p, o, c)).collect();
    let injective = pts.len() == total;
    (pts, injective)
}

pub fn lattice_points_brute_force(p: &PosetP, o: &OSet, lambda: &WeightC) -> BTreeSet<Vec<i64>> {
    let h = hrep_c(p, o, lambda);
    h.box_search(1, &vec![0; p.len()], &rat(lambda.lambda(1)))
}

/// Lattice points of `Q_O(λ)`, enumerated both ways and compared.
pub fn lattice_points_c(
    p: &PosetP,
    o: &OSet,
    lambda: &WeightC,
) -> Result<BTreeSet<Vec<i64>>, PolytopeError> {
    lambda.check(p)?;
    let (dec, _) = lattice_points_by_decomposition(p, o, lambda);
    let brute = lattice_points_brute_force(p, o, lambda);
    if dec != brute {
        return Err(PolytopeError::EnumerationMismatch {
            decomposition: dec.len(),
            brute_force: brute.len(),
        });
    }
    Ok(dec)
}

/// Greedy inverse of [`chain_point`]: peel off the ideal generated by the
/// support, largest first.
pub fn decompose_c(
    p: &PosetP,
    o: &OSet,
    lambda: &WeightC,
    x: &[i64],
) -> Result<Vec<OrderIdeal>, PolytopeError> {
    let fail = || PolytopeError::NotALatticePoint(format!("{x:?}"));
    let mut rest = x.to_vec();
    let mut chain = Vec::new();
    while rest.iter().any(|&v| v != 0) {
        if rest.iter().any(|&v| v < 0) {
            return Err(fail());
        }
        let support = rest
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .fold(0u64, |m, (k, _)| m | (1 << k));
        let j = p.ideal(p.ideal_generated(support));
        for k in bits(m_o(p, o, j.mask)) {
            rest[k] -= 1;
        }
        chain.push(j);
    }
    chain.reverse();
    let mut counts = vec![0u32; p.n()];
    for j in &chain {
        if j.stratum == 0 {
            return Err(fail());
        }
        counts[j.stratum - 1] += 1;
    }
    if counts != lambda.a || chain.windows(2).any(|w| w[0].mask & w[1].mask != w[0].mask) {
        return Err(fail());
    }
    Ok(chain)
}

/// Matrix of `ξ`: column `e` is the image of the basis vector `ε_e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiMap {
    pub columns: Vec<Vec<i64>>,
}

impl XiMap {
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0; x.len()];
        for (e, &v) in x.iter().enumerate() {
            if v != 0 {
                for (t, &c) in self.columns[e].iter().enumerate() {
                    out[t] += c * v;
                }
            }
        }
        out
    }

    pub fn apply_rational(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); x.len()];
        for (e, v) in x.iter().enumerate() {
            for (t, &c) in self.columns[e].iter().enumerate() {
                if c != 0 {
                    out[t] += v * rat(c);
                }
            }
        }
        out
    }

    pub fn determinant(&self) -> Rational {
        let dim = self.columns.len();
        let m: Vec<Vec<Rational>> = (0..dim)
            .map(|row| (0..dim).map(|col| rat(self.columns[col][row])).collect())
            .collect();
        determinant(&m)
    }
}

pub fn xi(p: &PosetP, twist: &Twist) -> XiMap {
    let o = twist.o();
    let columns = (0..p.len())
        .map(|k| {
            let e = p.element(k);
            let mut col = vec![0; p.len()];
            col[p.idx(e.i, twist.r_at(k))] += 1;
            if e.i != e.j {
                // Largest j' before j in the same row with (i, j') marked.
                let prev = (0..k)
                    .rev()
                    .find(|&q| p.element(q).i == e.i && o.contains(q))
                    .expect("the diagonal element is marked");
                col[p.idx(e.i, twist.r_at(prev))] -= 1;
            }
            col
        })
        .collect();
    XiMap { columns }
}

/// JSON export of `Q_O(λ)` and its lattice points.
pub fn polytope_json(p: &PosetP, o: &OSet, lambda: &WeightC, points: &BTreeSet<Vec<i64>>) -> Value {
    let (eq, ineq) = hrep_c(p, o, lambda).to_json(p);
    json!({
        "n": p.n(),
        "O": o.to_json(p),
        "lambda": lambda.a,
        "coordinates": p.elements(),
        "equalities": eq,
        "inequalities": ineq,
        "lattice_points": points.iter().collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::PosetElement;

    #[test]
    fn rank_one_system() {
        let p = PosetP::build(1).unwrap();
        for o in OSet::all(&p, false) {
            let h = hrep_c(&p, &o, &WeightC::new(vec![3]));
            assert_eq!(h.fixed, vec![(0, rat(3))]);
            assert_eq!(h.inequalities.len(), 1);
            let pts = lattice_points_c(&p, &o, &WeightC::new(vec![3])).unwrap();
            assert_eq!(pts.len(), 4);
        }
        let v = fundamental_vertices(&p, &OSet::fflv(&p, false), 1);
        assert_eq!(v, [vec![1, 0], vec![1, 1]].into_iter().collect());
    }

    #[test]
    fn full_marking_gives_monotone_system() {
        let p = PosetP::build(2).unwrap();
        let h = hrep_c(&p, &OSet::gt(&p, false), &WeightC::new(vec![1, 1]));
        assert!(h
            .inequalities
            .iter()
            .all(|q| q.interior.is_empty() && p.lt(q.top, q.bottom)));
    }

    #[test]
    fn small_counts() {
        let p = PosetP::build(2).unwrap();
        for o in OSet::all(&p, false) {
            assert_eq!(
                lattice_points_c(&p, &o, &WeightC::new(vec![1, 0]))
                    .unwrap()
                    .len(),
                4
            );
            assert_eq!(
                lattice_points_c(&p, &o, &WeightC::new(vec![1, 1]))
                    .unwrap()
                    .len(),
                16
            );
            assert_eq!(
                lattice_points_c(&p, &o, &WeightC::zero(2)).unwrap().len(),
                1
            );
            assert_eq!(fundamental_vertices(&p, &o, 2).len(), 5);
        }
    }

    #[test]
    fn decomposition_inverts_chain_sums() {
        let p = PosetP::build(2).unwrap();
        let o = OSet::new(&p, &[PosetElement::new(1, -2)], false).unwrap();
        let lam = WeightC::new(vec![1, 1]);
        for chain in multichains(&p, &lam.a) {
            let x = chain_point(&p, &o, &chain);
            assert_eq!(decompose_c(&p, &o, &lam, &x).unwrap(), chain);
        }
        assert!(decompose_c(&p, &o, &lam, &[1, 0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn xi_for_diagonal_marking_is_identity_off_diagonal() {
        let p = PosetP::build(3).unwrap();
        let t = Twist::new(&p, OSet::fflv(&p, false));
        let m = xi(&p, &t);
        for k in 0..p.len() {
            if !p.element(k).is_diagonal() {
                let x: Vec<i64> = (0..p.len()).map(|q| (q == k) as i64).collect();
                let y = m.apply(&x);
                assert_eq!(y[k], 1);
            }
        }
        assert!(crate::exactalg::is_unit(&m.determinant()));
    }

    #[test]
    fn weights_enumeration() {
        assert_eq!(
            weights_of_total(2, 2),
            vec![vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(weights_of_total(3, 0), vec![vec![0, 0, 0]]);
    }
}
