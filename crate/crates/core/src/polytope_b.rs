//! Type B poset polytopes with halved antidiagonal coefficients, the
//! points `x^{J,D}`, the half-integral lattice for odd `a_n`, and the
//! projected polytopes `πξ(Q)` over the off-diagonal coordinates.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::exactalg::{rat, rational_string, solve, Rational};
use crate::pipedream::Twist;
use crate::polytope_c::{decompose_c, multichains, HRep, PolytopeError, WeightC, XiMap};
use crate::poset::{bits, m_o, OSet, OrderIdeal, PosetP};

/// Dominant weight for `so_{2n+1}`; `λ(i) = a_i + … + a_{n−1} + a_n/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightB {
    pub a: Vec<u32>,
}

impl WeightB {
    pub fn new(a: Vec<u32>) -> Self {
        WeightB { a }
    }

    pub fn fundamental(n: usize, k: usize) -> Self {
        let mut a = vec![0; n];
        a[k - 1] = 1;
        WeightB { a }
    }

    pub fn zero(n: usize) -> Self {
        WeightB { a: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn lambda(&self, i: usize) -> Rational {
        let n = self.n();
        let whole: i64 = self.a[i - 1..n - 1].iter().map(|&x| x as i64).sum();
        rat(whole) + Rational::new(self.a[n - 1].into(), 2.into())
    }

    pub fn spin_parity(&self) -> bool {
        self.a[self.n() - 1] % 2 == 1
    }

    /// `(a₁, …, a_{n−1}, a_n/2)`; only meaningful for even `a_n`.
    pub fn halved(&self) -> WeightC {
        let mut a = self.a.clone();
        let n = a.len();
        a[n - 1] /= 2;
        WeightC::new(a)
    }

    pub fn minus_spin(&self) -> WeightB {
        let mut a = self.a.clone();
        let n = a.len();
        a[n - 1] -= 1;
        WeightB { a }
    }

    pub fn plus(&self, other: &Self) -> Self {
        WeightB {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn total(&self) -> u32 {
        self.a.iter().sum()
    }
}

fn check_o(p: &PosetP, o: &OSet) -> Result<(), PolytopeError> {
    if o.mask & p.antidiagonal_mask() != 0 {
        return Err(PolytopeError::NotALatticePoint(
            "marking meets the antidiagonal".into(),
        ));
    }
    Ok(())
}

pub fn hrep_b(p: &PosetP, o: &OSet, lambda: &WeightB) -> Result<HRep, PolytopeError> {
    check_o(p, o)?;
    if lambda.n() != p.n() {
        return Err(PolytopeError::WeightLength {
            got: lambda.n(),
            expected: p.n(),
        });
    }
    Ok(HRep::build(p, o, |i| lambda.lambda(i), true))
}

/// `i ∈ D` is bit `i − 1`.
pub fn legal_d(p: &PosetP, ideal: u64) -> u32 {
    (1..=p.n())
        .filter(|&i| ideal >> p.idx(i as i32, -(i as i32)) & 1 == 1)
        .fold(0, |m, i| m | 1 << (i - 1))
}

pub fn subsets(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some((cur.wrapping_sub(mask)) & mask)
        };
        Some(cur)
    })
}

pub fn point_xjd(
    p: &PosetP,
    o: &OSet,
    ideal: &OrderIdeal,
    d: u32,
) -> Result<Vec<i64>, PolytopeError> {
    if d & !legal_d(p, ideal.mask) != 0 {
        return Err(PolytopeError::NotALatticePoint(format!(
            "D = {d:#b} not contained in the ideal"
        )));
    }
    let mut x = vec![0; p.len()];
    for k in bits(m_o(p, o, ideal.mask)) {
        let e = p.element(k);
        x[k] = if e.is_antidiagonal() && d >> (e.i - 1) & 1 == 0 {
            2
        } else {
            1
        };
    }
    Ok(x)
}

fn to_rational(x: &[i64]) -> Vec<Rational> {
    x.iter().map(|&v| rat(v)).collect()
}

/// `x^D = 1_{(i,−i), i ∈ D} + 1_O/2`.
pub fn spin_shift(p: &PosetP, o: &OSet, d: u32) -> Vec<Rational> {
    let half = Rational::new(1.into(), 2.into());
    (0..p.len())
        .map(|k| {
            let e = p.element(k);
            let mut v = if o.contains(k) {
                half.clone()
            } else {
                Rational::zero()
            };
            if e.is_antidiagonal() && d >> (e.i - 1) & 1 == 1 {
                v += Rational::one();
            }
            v
        })
        .collect()
}

/// Points by decomposition; the flag reports whether every decomposition
/// produced a distinct point.
pub fn lattice_points_b_by_decomposition(
    p: &PosetP,
    o: &OSet,
    lambda: &WeightB,
) -> (BTreeSet<Vec<Rational>>, bool) {
    let mut pts = BTreeSet::new();
    let mut produced = 0usize;
    if !lambda.spin_parity() {
        for chain in multichains(p, &lambda.halved().a) {
            let Some((last, rest)) = chain.split_last() else {
                pts.insert(vec![Rational::zero(); p.len()]);
                produced += 1;
                continue;
            };
            let mut base = vec![0i64; p.len()];
            for j in rest {
                for (b, v) in base.iter_mut().zip(point_xjd(p, o, j, 0).unwrap()) {
                    *b += v;
                }
            }
            for d in subsets(legal_d(p, last.mask)) {
                let top = point_xjd(p, o, last, d).unwrap();
                let x: Vec<i64> = base.iter().zip(&top).map(|(a, b)| a + b).collect();
                pts.insert(to_rational(&x));
                produced += 1;
            }
        }
    } else {
        let hrep = hrep_b(p, o, lambda).expect("checked marking");
        let reduced = lambda.minus_spin().halved();
        for chain in multichains(p, &reduced.a) {
            let mut base = vec![0i64; p.len()];
            for j in &chain {
                for (b, v) in base.iter_mut().zip(point_xjd(p, o, j, 0).unwrap()) {
                    *b += v;
                }
            }
            for d in subsets((1u32 << p.n()) - 1) {
                let x: Vec<Rational> = spin_shift(p, o, d)
                    .into_iter()
                    .zip(&base)
                    .map(|(s, &b)| s + rat(b))
                    .collect();
                if hrep.contains(&x) {
                    pts.insert(x);
                    produced += 1;
                }
            }
        }
    }
    let injective = pts.len() == produced;
    (pts, injective)
}

/// Box search over `[0, 2λ(1)]` in the lattice matching the parity of `a_n`.
pub fn lattice_points_b_brute_force(
    p: &PosetP,
    o: &OSet,
    lambda: &WeightB,
) -> Result<BTreeSet<Vec<Rational>>, PolytopeError> {
    let hrep = hrep_b(p, o, lambda)?;
    let parity: Vec<i64> = (0..p.len())
        .map(|k| {
            if lambda.spin_parity() && o.contains(k) {
                1
            } else {
                0
            }
        })
        .collect();
    let bound = lambda.lambda(1) * rat(2);
    let half = Rational::new(1.into(), 2.into());
    Ok(hrep
        .box_search(2, &parity, &bound)
        .into_iter()
        .map(|y| y.into_iter().map(|v| rat(v) * &half).collect())
        .collect())
}

pub fn lattice_points_b(
    p: &PosetP,
    o: &OSet,
    lambda: &WeightB,
) -> Result<BTreeSet<Vec<Rational>>, PolytopeError> {
    let (dec, _) = lattice_points_b_by_decomposition(p, o, lambda);
    let brute = lattice_points_b_brute_force(p, o, lambda)?;
    if dec != brute {
        return Err(PolytopeError::EnumerationMismatch {
            decomposition: dec.len(),
            brute_force: brute.len(),
        });
    }
    Ok(dec)
}

/// Indices of `P∖A` in canonical order.
pub fn off_diagonal(p: &PosetP) -> Vec<usize> {
    (0..p.len())
        .filter(|&k| !p.element(k).is_diagonal())
        .collect()
}

/// `π∘ξ`, keeping only the off-diagonal coordinates.
pub fn project_pi_xi(p: &PosetP, xi: &XiMap, x: &[Rational]) -> Vec<Rational> {
    let full = xi.apply_rational(x);
    off_diagonal(p)
        .into_iter()
        .map(|k| full[k].clone())
        .collect()
}

pub fn project_pi_xi_int(p: &PosetP, xi: &XiMap, x: &[Rational]) -> Option<Vec<i64>> {
    project_pi_xi(p, xi, x)
        .into_iter()
        .map(|v| {
            if v.is_integer() {
                v.to_integer().try_into().ok()
            } else {
                None
            }
        })
        .collect()
}

/// Inverse of `π∘ξ` on the affine space `x_{i,i} = λ(i)`.
pub fn lift_pi_xi(p: &PosetP, xi: &XiMap, lambda: &WeightB, y: &[i64]) -> Vec<Rational> {
    let mut target = vec![Rational::zero(); p.len()];
    for (&k, &v) in off_diagonal(p).iter().zip(y) {
        target[k] = rat(v);
    }
    for i in 1..=p.n() {
        let row_rest: Rational = (0..p.len())
            .filter(|&k| p.element(k).i == i as i32 && !p.element(k).is_diagonal())
            .map(|k| target[k].clone())
            .sum();
        target[p.idx(i as i32, i as i32)] = lambda.lambda(i) - row_rest;
    }
    let dim = p.len();
    let m: Vec<Vec<Rational>> = (0..dim)
        .map(|row| (0..dim).map(|col| rat(xi.columns[col][row])).collect())
        .collect();
    solve(&m, &target).expect("unimodular")
}

/// `y^D` over `P∖A`.
pub fn y_d(p: &PosetP, d: u32) -> Vec<i64> {
    off_diagonal(p)
        .into_iter()
        .map(|k| {
            let e = p.element(k);
            (e.is_antidiagonal() && d >> (e.i - 1) & 1 == 1) as i64
        })
        .collect()
}

/// Lattice points of `Π^B_O(λ)`, as images of the source lattice points.
pub fn pi_lattice_points_b(
    p: &PosetP,
    twist: &Twist,
    xi: &XiMap,
    lambda: &WeightB,
) -> Result<BTreeSet<Vec<i64>>, PolytopeError> {
    let src = lattice_points_b(p, twist.o(), lambda)?;
    let count = src.len();
    let out: BTreeSet<Vec<i64>> = src
        .iter()
        .map(|x| {
            project_pi_xi_int(p, xi, x)
                .ok_or_else(|| PolytopeError::NotALatticePoint(format!("{x:?}")))
        })
        .collect::<Result<_, _>>()?;
    if out.len() != count {
        return Err(PolytopeError::EnumerationMismatch {
            decomposition: out.len(),
            brute_force: count,
        });
    }
    Ok(out)
}

/// Decomposition of a point of `Π^B_O(λ)`: the nested ideals and the set `D`.
pub fn decompose_pi_b(
    p: &PosetP,
    o: &OSet,
    xi: &XiMap,
    lambda: &WeightB,
    y: &[i64],
) -> Result<(Vec<OrderIdeal>, u32), PolytopeError> {
    let fail = || PolytopeError::NotALatticePoint(format!("{y:?}"));
    let cols = off_diagonal(p);
    if lambda.spin_parity() {
        let mut d = 0u32;
        let mut rest = y.to_vec();
        for (pos, &k) in cols.iter().enumerate() {
            let e = p.element(k);
            if e.is_antidiagonal() && y[pos].rem_euclid(2) == 1 {
                d |= 1 << (e.i - 1);
                rest[pos] -= 1;
            }
        }
        let (chain, inner) = decompose_pi_b(p, o, xi, &lambda.minus_spin(), &rest)?;
        if inner != 0 {
            return Err(fail());
        }
        return Ok((chain, d));
    }
    let x = lift_pi_xi(p, xi, lambda, y);
    if x.iter().any(|v| !v.is_integer()) || !hrep_b(p, o, lambda)?.contains(&x) {
        return Err(fail());
    }
    let mut d = 0u32;
    let mut halved: Vec<i64> = x
        .iter()
        .map(|v| v.to_integer().try_into().unwrap())
        .collect();
    for (k, v) in halved.iter_mut().enumerate() {
        let e = p.element(k);
        if e.is_antidiagonal() {
            if *v % 2 == 1 {
                d |= 1 << (e.i - 1);
                *v += 1;
            }
            *v /= 2;
        }
    }
    let chain = decompose_c(p, o, &lambda.halved(), &halved).map_err(|_| fail())?;
    if let Some(last) = chain.last() {
        if d & !legal_d(p, last.mask) != 0 {
            return Err(fail());
        }
    } else if d != 0 {
        return Err(fail());
    }
    Ok((chain, d))
}

/// Vertices of `Q^B_O(ω_k)`: `x^{J,∅}` for `k < n`, halved for `k = n`.
pub fn fundamental_vertices_b(p: &PosetP, o: &OSet, k: usize) -> BTreeSet<Vec<Rational>> {
    let scale = if k == p.n() {
        Rational::new(1.into(), 2.into())
    } else {
        Rational::one()
    };
    p.ideals_in_stratum(k)
        .iter()
        .map(|j| {
            point_xjd(p, o, j, 0)
                .unwrap()
                .into_iter()
                .map(|v| rat(v) * &scale)
                .collect()
        })
        .collect()
}

/// Membership plus full rank of the tight constraints.
pub fn is_vertex(hrep: &HRep, x: &[Rational]) -> bool {
    hrep.contains(x) && hrep.tight_rank(x) == hrep.dim
}

pub fn polytope_b_json(
    p: &PosetP,
    o: &OSet,
    lambda: &WeightB,
    points: &BTreeSet<Vec<Rational>>,
) -> Result<Value, PolytopeError> {
    let (eq, ineq) = hrep_b(p, o, lambda)?.to_json(p);
    Ok(json!({
        "n": p.n(),
        "O": o.to_json(p),
        "lambda": lambda.a,
        "coordinates": p.elements(),
        "equalities": eq,
        "inequalities": ineq,
        "lattice_points": points.iter().map(|x| x.iter().map(rational_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope_c::xi;
    use crate::poset::PosetElement;

    fn q(s: &str) -> Rational {
        match s.split_once('/') {
            Some((a, b)) => Rational::new(
                a.parse::<i64>().unwrap().into(),
                b.parse::<i64>().unwrap().into(),
            ),
            None => rat(s.parse().unwrap()),
        }
    }

    #[test]
    fn rank_one_half_bound() {
        let p = PosetP::build(1).unwrap();
        let o = OSet::fflv(&p, true);
        let h = hrep_b(&p, &o, &WeightB::new(vec![1])).unwrap();
        assert_eq!(h.fixed, vec![(0, q("1/2"))]);
        assert!(h.contains(&[q("1/2"), q("1")]));
        assert!(!h.contains(&[q("1/2"), q("3/2")]));
        assert_eq!(
            lattice_points_b(&p, &o, &WeightB::new(vec![1]))
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            lattice_points_b(&p, &o, &WeightB::new(vec![2]))
                .unwrap()
                .len(),
            3
        );
    }

    #[test]
    fn marking_on_antidiagonal_rejected() {
        let p = PosetP::build(2).unwrap();
        let o = OSet::gt(&p, false);
        assert!(hrep_b(&p, &o, &WeightB::fundamental(2, 1)).is_err());
    }

    #[test]
    fn subsets_enumerate_all() {
        let s: Vec<u32> = subsets(0b101).collect();
        assert_eq!(s, vec![0, 1, 4, 5]);
        assert_eq!(subsets(0).count(), 1);
    }

    #[test]
    fn projection_roundtrip() {
        let p = PosetP::build(2).unwrap();
        let o = OSet::new(&p, &[PosetElement::new(1, -2)], true).unwrap();
        let t = Twist::new(&p, o);
        let m = xi(&p, &t);
        for lam in [vec![1, 0], vec![0, 1], vec![1, 1], vec![0, 2]] {
            let lam = WeightB::new(lam);
            for x in lattice_points_b(&p, &o, &lam).unwrap() {
                let y = project_pi_xi_int(&p, &m, &x).unwrap();
                assert_eq!(lift_pi_xi(&p, &m, &lam, &y), x);
                let (chain, d) = decompose_pi_b(&p, &o, &m, &lam, &y).unwrap();
                let mut rebuilt = vec![0i64; y.len()];
                if lam.spin_parity() {
                    rebuilt = y_d(&p, d);
                }
                for (idx, j) in chain.iter().enumerate() {
                    let dd = if !lam.spin_parity() && idx + 1 == chain.len() {
                        d
                    } else {
                        0
                    };
                    let pt = point_xjd(&p, &o, j, dd).unwrap();
                    let img = project_pi_xi_int(&p, &m, &to_rational(&pt)).unwrap();
                    for (r, v) in rebuilt.iter_mut().zip(img) {
                        *r += v;
                    }
                }
                assert_eq!(rebuilt, y);
            }
        }
    }
}
