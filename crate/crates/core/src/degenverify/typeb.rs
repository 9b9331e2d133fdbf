//! Type B verifications: essential signatures, the `C_{J,D}` words, the
//! triangularity of fundamental bases, the polynomials `p_y` and the
//! associated degeneration, and characters.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use super::orders::SignatureOrder;
use super::typec::Outcome;
use crate::exactalg::{leading_monomial, rat, Echelon, Monomial, MonomialOrder, Poly, Rational};
use crate::grobner::{initial_ideal, kernel_of_map_weighted, sagbi_component_check, Grading};
use crate::liealg::{
    character_of_signatures, cjd_ejd, doubled_weight, drop_of, ejd_predicted, essential_greedy,
    factorial_weight, signatures_with_drop, to_row, wedge_coefficient, weyl_char, weyl_dim,
    LieType, Module, Realization, Tensor, SPIN_NORMALIZATION,
};
use crate::pipedream::Twist;
use crate::polytope_b::{
    legal_d, pi_lattice_points_b, point_xjd, project_pi_xi_int, subsets, WeightB,
};
use crate::polytope_c::{xi, XiMap};
use crate::poset::{OSet, PosetP};

fn fail(msg: impl Into<String>, extra: Value) -> Value {
    json!({"error": msg.into(), "detail": extra})
}

struct Setup {
    twist: Twist,
    xi: XiMap,
    order: SignatureOrder,
}

fn setup(p: &PosetP, o: &OSet) -> Result<Setup, Value> {
    let twist = Twist::new(p, *o);
    let xi = xi(p, &twist);
    let order = SignatureOrder::new(p, &twist).map_err(|e| fail(e, Value::Null))?;
    Ok(Setup { twist, xi, order })
}

fn to_sig(y: &[i64]) -> Vec<u32> {
    y.iter().map(|&v| v as u32).collect()
}

/// Lattice points of `Π^B_O(λ)` as signatures.
pub fn pi_signatures_b(p: &PosetP, o: &OSet, a: &[u32]) -> Result<BTreeSet<Vec<u32>>, Value> {
    let s = setup(p, o)?;
    let pts = pi_lattice_points_b(p, &s.twist, &s.xi, &WeightB::new(a.to_vec()))
        .map_err(|e| fail(e.to_string(), json!(a)))?;
    Ok(pts.iter().map(|y| to_sig(y)).collect())
}

/// Greedy essential signatures against the lattice points of `Π^B_O(λ)`.
pub fn verify_essential_b(real: &Realization, p: &PosetP, o: &OSet, a: &[u32]) -> Outcome {
    let s = setup(p, o)?;
    let tensor = Tensor::for_weight_b(real, a);
    let l2 = doubled_weight(LieType::B, a);
    let ess =
        essential_greedy(real, &tensor, &l2, |d| s.order.key(d)).map_err(|e| fail(e, json!(a)))?;
    let pts = pi_signatures_b(p, o, a)?;
    if ess == pts {
        let mut out = json!({"essential": ess.len()});
        if a[a.len() - 1] % 2 == 1 {
            out["spin_normalization"] = json!(SPIN_NORMALIZATION);
        }
        Ok(out)
    } else {
        let extra = ess.difference(&pts).next().cloned();
        let missing = pts.difference(&ess).next().cloned();
        Err(fail(
            "essential set differs from the lattice points",
            json!({"essential_only": extra, "points_only": missing}),
        ))
    }
}

/// Subscript sets of `e_{J,D}` against conditions (i)–(v), and the bijection
/// onto `k`-subsets of the `2n+1` vector labels, for every marking.
pub fn verify_ejd(n: usize) -> Outcome {
    let p = PosetP::build(n).map_err(|e| fail(e.to_string(), Value::Null))?;
    let mut pairs = 0usize;
    let markings = OSet::all(&p, true);
    for o in &markings {
        let twist = Twist::new(&p, *o);
        for k in 1..=n {
            let mut seen = BTreeSet::new();
            for ideal in p.ideals_in_stratum(k) {
                for d in subsets(legal_d(&p, ideal.mask)) {
                    let (_, subs) = cjd_ejd(&p, &twist, &ideal, d).map_err(|e| {
                        fail(
                            e.to_string(),
                            json!({"o": o.to_json(&p), "ideal": p.elements_of(ideal.mask), "d": d}),
                        )
                    })?;
                    let set: BTreeSet<i32> = subs.iter().copied().collect();
                    if set.len() != k || set != ejd_predicted(&twist, &ideal, d, n) {
                        return Err(fail(
                            "subscripts violate the conditions",
                            json!({"o": o.to_json(&p), "ideal": p.elements_of(ideal.mask), "d": d, "subs": subs}),
                        ));
                    }
                    if !seen.insert(set) {
                        return Err(fail(
                            "repeated multivector",
                            json!({"o": o.to_json(&p), "subs": subs}),
                        ));
                    }
                    pairs += 1;
                }
            }
            let binom = (0..k).fold(1usize, |acc, t| acc * (2 * n + 1 - t) / (t + 1));
            if seen.len() != binom {
                return Err(fail(
                    "not a bijection onto multivectors",
                    json!({"o": o.to_json(&p), "k": k, "count": seen.len()}),
                ));
            }
        }
    }
    Ok(json!({"markings": markings.len(), "pairs": pairs}))
}

/// For each `(J, D)`: `e_{J,D}` occurs in `f^{πξ(x^{J,D})} e_{1..k}` and in no
/// `f^{d'} e_{1..k}` with `d' < πξ(x^{J,D})`.
pub fn verify_base_b(real: &Realization, p: &PosetP, o: &OSet) -> Outcome {
    let s = setup(p, o)?;
    let mut checked = 0;
    for k in 1..=p.n() {
        let module = Arc::new(Module::exterior_power(real, k));
        let tensor = Tensor::new(vec![module.clone()]);
        for ideal in p.ideals_in_stratum(k) {
            for dset in subsets(legal_d(p, ideal.mask)) {
                let x =
                    point_xjd(p, o, &ideal, dset).map_err(|e| fail(e.to_string(), Value::Null))?;
                let xr: Vec<Rational> = x.iter().map(|&v| rat(v)).collect();
                let y = project_pi_xi_int(p, &s.xi, &xr)
                    .ok_or_else(|| fail("projection not integral", json!(x)))?;
                let sig = to_sig(&y);
                let (_, subs) = cjd_ejd(p, &s.twist, &ideal, dset)
                    .map_err(|e| fail(e.to_string(), Value::Null))?;
                let own = to_row(&tensor.apply_pbw(&sig, &tensor.highest()));
                if wedge_coefficient(real, &module, &own, &subs) == Rational::from_integer(0.into())
                {
                    return Err(fail(
                        "multivector missing from its own monomial",
                        json!({"sig": sig, "subs": subs}),
                    ));
                }
                let key = s.order.key(&sig);
                for (other, v) in signatures_with_drop(real, &tensor, &drop_of(real, &sig)) {
                    if s.order.key(&other) < key
                        && wedge_coefficient(real, &module, &to_row(&v), &subs)
                            != Rational::from_integer(0.into())
                    {
                        return Err(fail(
                            "multivector occurs in a smaller monomial",
                            json!({"sig": sig, "smaller": other, "subs": subs}),
                        ));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(json!({"pairs": checked}))
}

/// The polynomials `p_y` with their index signatures.
pub struct PyData {
    pub essential: Vec<Vec<u32>>,
    pub polys: Vec<Poly>,
    pub order: SignatureOrder,
}

/// Positive degree on the `z` variables: a height of the corresponding root.
pub fn z_weights(real: &Realization) -> Vec<i64> {
    let n = real.n as i64;
    (0..real.ops.len())
        .map(|op| {
            real.root(op)
                .iter()
                .enumerate()
                .map(|(c, r)| r * (n - c as i64))
                .sum()
        })
        .collect()
}

/// `θ(c)v_λ = Σ_y p_y v_y` with `v_y = f^y v_λ / K_y`; asserts
/// `in_>(p_y) = z^y`.
pub fn p_polynomials(real: &Realization, p: &PosetP, o: &OSet, a: &[u32]) -> Result<PyData, Value> {
    if a[p.n() - 1] % 2 == 1 {
        return Err(fail("last coefficient must be even", json!(a)));
    }
    let s = setup(p, o)?;
    let ys: Vec<Vec<u32>> = pi_signatures_b(p, o, a)?.into_iter().collect();
    let mut by_drop: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (k, y) in ys.iter().enumerate() {
        by_drop.entry(drop_of(real, y)).or_default().push(k);
    }
    let tensor = Tensor::for_weight_b(real, a);
    let l2 = doubled_weight(LieType::B, a);
    let mut polys = vec![Poly::zero(); ys.len()];
    let v0 = tensor.highest();
    for (mu, mult) in weyl_char(LieType::B, &l2) {
        let drop: Vec<i64> = l2.iter().zip(&mu).map(|(x, y)| x - y).collect();
        let here = by_drop.get(&drop).cloned().unwrap_or_default();
        if here.len() as i64 != mult {
            return Err(fail(
                "point count differs from multiplicity",
                json!({"weight_doubled": mu}),
            ));
        }
        let mut ech = Echelon::with_tracking();
        for &k in &here {
            if ech
                .insert_tracked(to_row(&tensor.apply_pbw(&ys[k], &v0)))
                .is_err()
            {
                return Err(fail("points do not give a basis", json!({"sig": ys[k]})));
            }
        }
        for (d, v) in signatures_with_drop(real, &tensor, &drop) {
            let comb = ech
                .express(to_row(&v))
                .ok_or_else(|| fail("vector outside the span", json!(d)))?;
            let kd = Rational::from_integer(factorial_weight(&d));
            let zd = Monomial::from_dense(&d);
            for (slot, c) in comb {
                let k = here[slot];
                let ky = Rational::from_integer(factorial_weight(&ys[k]));
                polys[k].add_term(zd.clone(), c * ky / &kd);
            }
        }
    }
    let greater = s.order.greater(false);
    for (y, poly) in ys.iter().zip(&polys) {
        let zy = Monomial::from_dense(y);
        if leading_monomial(poly, &greater).as_ref() != Some(&zy) || !poly.coeff(&zy).is_one() {
            return Err(fail(
                "leading term of p_y",
                json!({"y": y, "lead": leading_monomial(poly, &greater).map(|m| m.to_dense(y.len()))}),
            ));
        }
    }
    Ok(PyData {
        essential: ys,
        polys,
        order: s.order,
    })
}

/// Kernels of `X_y ↦ t p_y` and `X_y ↦ t z^y`, sagbi components for `m ≤ 2`,
/// and optionally the initial-ideal certificate up to degree 3.
pub fn verify_degenmain_b(
    real: &Realization,
    p: &PosetP,
    o: &OSet,
    a: &[u32],
    certify: bool,
) -> Outcome {
    let data = p_polynomials(real, p, o, a)?;
    let m = data.essential.first().map_or(0, Vec::len);
    let t = Monomial::var(m as u32);
    let one = Rational::one();
    let images: Vec<Poly> = data.polys.iter().map(|q| q.mul_term(&t, &one)).collect();
    let toric: Vec<Monomial> = data
        .essential
        .iter()
        .map(|y| Monomial::from_dense(y).mul(&t))
        .collect();
    let mut target_weights = z_weights(real);
    target_weights.push(1);
    let source_weights: Vec<i64> = data
        .essential
        .iter()
        .map(|y| {
            1 + y
                .iter()
                .zip(&target_weights)
                .map(|(&e, w)| e as i64 * w)
                .sum::<i64>()
        })
        .collect();
    let grading = Grading::new(vec![0; images.len()]);
    let greater_t = data.order.greater(true);
    let mut out = json!({"polys": images.len(), "spin_normalization": SPIN_NORMALIZATION});
    let mut sagbi = Vec::new();
    for mm in 1..=2u32 {
        let scaled: Vec<u32> = a.iter().map(|x| x * mm).collect();
        let expected: BTreeSet<Monomial> = pi_signatures_b(p, o, &scaled)?
            .into_iter()
            .map(|y| Monomial::from_dense(&y).mul(&t.pow(mm)))
            .collect();
        let dim = sagbi_component_check(&images, &grading, &[mm], &greater_t, &expected)
            .map_err(|e| fail(e.to_string(), json!(mm)))?;
        sagbi.push(dim);
    }
    out["sagbi"] = json!(sagbi);
    if certify {
        let ideal = kernel_of_map_weighted(&images, &target_weights, &source_weights);
        let toric_images: Vec<Poly> = toric
            .iter()
            .map(|mono| Poly::monomial(mono.clone(), one.clone()))
            .collect();
        let ideal_o = kernel_of_map_weighted(&toric_images, &target_weights, &source_weights);
        let weak = greater_t.pullback(&toric);
        let tiebreak = MonomialOrder::degrevlex(images.len());
        let degrees: Vec<Vec<u32>> = (1..=3).map(|d| vec![d]).collect();
        let (gb, cert) = initial_ideal(&ideal, &weak, &tiebreak, &ideal_o, &grading, &degrees)
            .map_err(|e| fail(e.to_string(), Value::Null))?;
        for d in 1..=3u32 {
            let scaled: Vec<u32> = a.iter().map(|x| x * d).collect();
            let want = weyl_dim(LieType::B, &doubled_weight(LieType::B, &scaled));
            let got = gb.graded_dim(&grading, &[d]);
            if want.to_usize() != Some(got) {
                return Err(fail(
                    "graded dimension differs from the Weyl dimension",
                    json!({"degree": d, "got": got}),
                ));
            }
        }
        out["generators"] = json!({"ideal": ideal.gens.len(), "toric": ideal_o.gens.len()});
        out["certificate"] = serde_json::to_value(cert).unwrap();
    }
    Ok(out)
}

/// Weights of `Π^B_O(λ)` points against the Weyl character.
pub fn character_check_b(real: &Realization, p: &PosetP, o: &OSet, a: &[u32]) -> Outcome {
    let sigs = pi_signatures_b(p, o, a)?;
    let l2 = doubled_weight(LieType::B, a);
    let got = character_of_signatures(real, &l2, &sigs);
    let want = weyl_char(LieType::B, &l2);
    if got == want {
        Ok(json!({"weights": got.len(), "points": sigs.len()}))
    } else {
        let w = want
            .iter()
            .find(|(k, v)| got.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .or_else(|| got.keys().find(|k| !want.contains_key(*k)).cloned());
        Err(fail("character mismatch", json!({"weight_doubled": w})))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::PosetElement;

    fn example_o(p: &PosetP) -> OSet {
        OSet::new(p, &[PosetElement::new(1, -2)], true).unwrap()
    }

    #[test]
    fn so3_leading_monomial() {
        let p = PosetP::build(1).unwrap();
        let real = Realization::new(LieType::B, 1).unwrap();
        let data = p_polynomials(&real, &p, &OSet::fflv(&p, true), &[2]).unwrap();
        assert_eq!(data.essential, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(data.polys[0], Poly::constant(Rational::one()));
        verify_degenmain_b(&real, &p, &OSet::fflv(&p, true), &[2], true).unwrap();
    }

    #[test]
    fn spin_essentials_are_subset_points() {
        let p = PosetP::build(2).unwrap();
        let real = Realization::new(LieType::B, 2).unwrap();
        let o = example_o(&p);
        verify_essential_b(&real, &p, &o, &[0, 1]).unwrap();
        let ys = pi_signatures_b(&p, &o, &[0, 1]).unwrap();
        let expected: BTreeSet<Vec<u32>> = (0..4u32)
            .map(|d| to_sig(&crate::polytope_b::y_d(&p, d)))
            .collect();
        assert_eq!(ys, expected);
        assert_eq!(pi_signatures_b(&p, &o, &[1, 0]).unwrap().len(), 5);
    }

    #[test]
    fn p_polynomials_for_doubled_spin_weight() {
        let p = PosetP::build(2).unwrap();
        let real = Realization::new(LieType::B, 2).unwrap();
        let data = p_polynomials(&real, &p, &example_o(&p), &[0, 2]).unwrap();
        assert_eq!(data.polys.len(), 10);
    }

    #[test]
    fn base_triangular_small() {
        let p = PosetP::build(2).unwrap();
        let real = Realization::new(LieType::B, 2).unwrap();
        for o in OSet::all(&p, true) {
            verify_base_b(&real, &p, &o).unwrap();
        }
    }
}
