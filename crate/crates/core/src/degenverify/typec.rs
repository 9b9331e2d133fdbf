//! Type C verifications: lattice point counts, leading terms of `D`, the
//! intermediate degeneration, toric initial ideals, sagbi components, PBW
//! monomial bases, standard monomials, and characters.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::orders::{ll_order, order_c};
use super::plucker::Plucker;
use crate::exactalg::{
    initial_form, initial_span_weak, Echelon, Monomial, MonomialOrder, Poly, Rational,
};
use crate::grobner::{
    buchberger, initial_ideal, kernel_of_map, sagbi_component_check, GroebnerBasis, Ideal,
};
use crate::liealg::{
    doubled_weight, drop_of, to_row, weyl_char, weyl_dim, LieType, Realization, Tensor,
};
use crate::pipedream::Twist;
use crate::polytope_b::off_diagonal;
use crate::polytope_c::{indicator, lattice_points_c, multichains, xi, WeightC};
use crate::poset::{m_o, OSet, PosetP};

pub type Outcome = Result<Value, Value>;

fn fail(msg: impl Into<String>, extra: Value) -> Value {
    json!({"error": msg.into(), "detail": extra})
}

/// Multidegrees `(a_1,…,a_n) ≠ 0` with total at most `max_total`.
pub fn degrees_up_to(n: usize, max_total: u32) -> Vec<Vec<u32>> {
    (1..=max_total)
        .flat_map(|t| crate::polytope_c::weights_of_total(n, t))
        .collect()
}

/// Shared per-rank data: the poset, the Plücker setup, `D`, and on request
/// `Ĩ`, with `I_A` and `I` added when `n ≤ 2`.
pub struct RankContext {
    pub p: PosetP,
    pub plucker: Plucker,
    pub d_images: Vec<Poly>,
    pub tilde_i: Option<Ideal>,
    pub i_sym: Option<Ideal>,
    pub i_a: Option<Ideal>,
}

impl RankContext {
    pub fn new(n: usize, with_ideals: bool) -> Result<Self, String> {
        let p = PosetP::build(n).map_err(|e| e.to_string())?;
        let plucker = Plucker::new(n);
        let d_images = plucker.d_images(&p);
        let tilde_i = with_ideals.then(|| plucker.tilde_i(&p));
        let (i_sym, i_a) = if with_ideals && n <= 2 {
            let i_a = plucker.i_a();
            (Some(plucker.i_symplectic(&i_a)?), Some(i_a))
        } else {
            (None, None)
        };
        Ok(RankContext {
            p,
            plucker,
            d_images,
            tilde_i,
            i_sym,
            i_a,
        })
    }
}

pub fn lattice_count(p: &PosetP, o: &OSet, a: &[u32]) -> Outcome {
    let lambda = WeightC::new(a.to_vec());
    let pts = lattice_points_c(p, o, &lambda).map_err(|e| fail(e.to_string(), Value::Null))?;
    let dim = weyl_dim(LieType::C, &doubled_weight(LieType::C, a));
    if dim.to_usize() == Some(pts.len()) {
        Ok(json!({"points": pts.len(), "weyl_dim": dim.to_string()}))
    } else {
        Err(fail(
            "count differs from the Weyl dimension",
            json!({"points": pts.len(), "weyl_dim": dim.to_string()}),
        ))
    }
}

/// Monomial `∏ z_{i, w(i)}` over `ℂ[P]`.
fn product_monomial(p: &PosetP, tuple: &[i32]) -> Monomial {
    Monomial::from_pairs(
        tuple
            .iter()
            .enumerate()
            .map(|(a, &b)| (p.idx(a as i32 + 1, b) as u32, 1)),
    )
}

/// `in_< D_{w(1..k)} = ± z^{ξ(1_{M_O(J)})} = ± ∏ z_{i,w(i)}` for every `J`.
pub fn verify_initial_d(ctx: &RankContext, o: &OSet) -> Outcome {
    let p = &ctx.p;
    let twist = Twist::new(p, *o);
    let ord = order_c(p, &twist).map_err(|e| fail(e, Value::Null))?;
    let xi_map = xi(p, &twist);
    let mut checked = 0;
    for j in p.enumerate_ideals().into_iter().filter(|j| j.stratum > 0) {
        let tuple = twist.tuple(&j);
        let d = ctx.plucker.minor_d(p, &tuple);
        let init = initial_form(&d, &ord).map_err(|e| fail(e.to_string(), json!(tuple)))?;
        let expected = product_monomial(p, &tuple);
        let via_xi = xi_map.apply(&indicator(p, m_o(p, o, j.mask)));
        let via_xi = Monomial::from_dense(&via_xi.iter().map(|&x| x as u32).collect::<Vec<_>>());
        let terms: Vec<(&Monomial, &Rational)> = init.terms().collect();
        let ok = terms.len() == 1
            && *terms[0].0 == expected
            && expected == via_xi
            && (terms[0].1.is_integer() && terms[0].1.numer().magnitude() == &1u32.into());
        if !ok {
            return Err(fail(
                "initial term of D",
                json!({"ideal": p.elements_of(j.mask), "tuple": tuple, "initial": format!("{init}")}),
            ));
        }
        checked += 1;
    }
    Ok(json!({"ideals": checked}))
}

/// Part (a): the `≪`-initial span of the linear forms is spanned by the
/// non-admissible variables. Part (b) at `n = 2` by certificate.
pub fn verify_intermediate(ctx: &RankContext) -> Outcome {
    let pl = &ctx.plucker;
    let n = pl.n;
    let ll = ll_order(n, &pl.tuples);
    let forms = pl.l_forms();
    let init = initial_span_weak(&forms, &ll);
    let mut vars = BTreeSet::new();
    for f in &init {
        let terms: Vec<_> = f.terms().collect();
        if terms.len() != 1 || terms[0].0.degree() != 1 {
            return Err(fail(
                "initial form is not a variable",
                json!(format!("{f}")),
            ));
        }
        vars.insert(terms[0].0.pairs()[0].0);
    }
    let primes: BTreeSet<u32> = (0..pl.s_len() as u32)
        .filter(|&v| !pl.admissible[v as usize])
        .collect();
    if vars != primes {
        return Err(fail(
            "initial span differs from non-admissible variables",
            json!({"got": vars.len(), "expected": primes.len()}),
        ));
    }
    let mut out = json!({"nonadmissible": primes.len()});
    if let Some(i_a) = &ctx.i_a {
        let ideal = Ideal::new(i_a.gens.iter().cloned().chain(forms.iter().cloned()));
        let candidate = Ideal::new(
            i_a.gens
                .iter()
                .cloned()
                .chain(primes.iter().map(|&v| Poly::var(v))),
        );
        let degrees = degrees_up_to(n, 3);
        let (_, cert) = initial_ideal(
            &ideal,
            &ll,
            &MonomialOrder::degrevlex(pl.s_len()),
            &candidate,
            &pl.grading_s(),
            &degrees,
        )
        .map_err(|e| fail(e.to_string(), Value::Null))?;
        out["part_b"] = serde_json::to_value(cert).unwrap();
    }
    Ok(out)
}

/// `in_≪(I) = Ĩ` by certificate.
pub fn verify_tilde_initial(ctx: &RankContext) -> Outcome {
    let (Some(i_sym), Some(tilde)) = (&ctx.i_sym, &ctx.tilde_i) else {
        return Err(fail("ideals not built at this rank", Value::Null));
    };
    let pl = &ctx.plucker;
    let theta_tuples: Vec<Vec<i32>> = (0..pl.theta_len() as u32)
        .map(|t| pl.theta_tuple(t).to_vec())
        .collect();
    let ll = ll_order(pl.n, &theta_tuples);
    let degrees = degrees_up_to(pl.n, 3);
    let (gb, cert) = initial_ideal(
        i_sym,
        &ll,
        &MonomialOrder::degrevlex(pl.theta_len()),
        tilde,
        &pl.grading_theta(),
        &degrees,
    )
    .map_err(|e| fail(e.to_string(), Value::Null))?;
    check_weyl_dims(&gb, ctx, &degrees)?;
    Ok(serde_json::to_value(cert).unwrap())
}

fn check_weyl_dims(
    gb: &GroebnerBasis,
    ctx: &RankContext,
    degrees: &[Vec<u32>],
) -> Result<(), Value> {
    for d in degrees {
        let got = gb.graded_dim(&ctx.plucker.grading_theta(), d);
        let want = weyl_dim(LieType::C, &doubled_weight(LieType::C, d));
        if want.to_usize() != Some(got) {
            return Err(fail(
                "graded dimension differs from the Weyl dimension",
                json!({"degree": d, "got": got}),
            ));
        }
    }
    Ok(())
}

/// Data attached to one marked set: `ψ` as signed variable images, `φ_O`
/// and the pullback order.
pub struct PsiData {
    pub twist: Twist,
    /// For each nonempty ideal (in enumeration order): its mask, `Θ` id, sign.
    pub psi: Vec<(u64, u32, Rational)>,
    pub phi_images: Vec<Monomial>,
    pub order: MonomialOrder,
}

pub fn psi_data(ctx: &RankContext, o: &OSet) -> Result<PsiData, Value> {
    let p = &ctx.p;
    let twist = Twist::new(p, *o);
    let order = order_c(p, &twist).map_err(|e| fail(e, Value::Null))?;
    let mut psi = Vec::new();
    let mut seen = BTreeSet::new();
    let mut theta_images = vec![None; ctx.plucker.theta_len()];
    for j in p.enumerate_ideals().into_iter().filter(|j| j.stratum > 0) {
        let tuple = twist.tuple(&j);
        let (sign, t) = ctx
            .plucker
            .signed_theta(&tuple)
            .ok_or_else(|| fail("tuple not admissible", json!(tuple)))?;
        if !seen.insert(t) {
            return Err(fail("ψ is not injective", json!(tuple)));
        }
        theta_images[t as usize] = Some(product_monomial(p, &tuple));
        psi.push((j.mask, t, sign));
    }
    if seen.len() != ctx.plucker.theta_len() {
        return Err(fail(
            "ψ is not surjective",
            json!({"hit": seen.len(), "theta": ctx.plucker.theta_len()}),
        ));
    }
    let phi_images: Vec<Monomial> = theta_images
        .into_iter()
        .map(|m| m.expect("surjective"))
        .collect();
    Ok(PsiData {
        twist,
        psi,
        phi_images,
        order,
    })
}

/// `ψ(I_O)` inside `ℂ[Θ]`, from the toric kernel on `ℂ[𝒥]`.
pub fn psi_of_toric(ctx: &RankContext, data: &PsiData) -> Ideal {
    let images: Vec<Poly> = data
        .psi
        .iter()
        .map(|&(_, t, _)| {
            Poly::monomial(
                data.phi_images[t as usize].clone(),
                Rational::from_integer(1.into()),
            )
        })
        .collect();
    let weights: Vec<i64> = data
        .psi
        .iter()
        .map(|&(_, t, _)| ctx.plucker.theta_tuple(t).len() as i64)
        .collect();
    let i_o = kernel_of_map(&images, ctx.p.len(), &weights);
    let subst: Vec<Poly> = data
        .psi
        .iter()
        .map(|(_, t, s)| Poly::monomial(Monomial::var(*t), s.clone()))
        .collect();
    i_o.map(|g| g.substitute(&subst))
}

/// Sagbi components of the `D` under `<` for every `λ` with `Σa ≤ max_total`.
pub fn verify_sagbi_c(ctx: &RankContext, o: &OSet, max_total: u32) -> Outcome {
    let p = &ctx.p;
    let twist = Twist::new(p, *o);
    let ord = order_c(p, &twist).map_err(|e| fail(e, Value::Null))?;
    let xi_map = xi(p, &twist);
    let mut comps = Vec::new();
    for a in degrees_up_to(p.n(), max_total) {
        let pts = lattice_points_c(p, o, &WeightC::new(a.clone()))
            .map_err(|e| fail(e.to_string(), Value::Null))?;
        let expected: BTreeSet<Monomial> = pts
            .iter()
            .map(|x| {
                Monomial::from_dense(
                    &xi_map
                        .apply(x)
                        .iter()
                        .map(|&v| v as u32)
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let got = sagbi_component_check(
            &ctx.d_images,
            &ctx.plucker.grading_theta(),
            &a,
            &ord,
            &expected,
        )
        .map_err(|e| fail(e.to_string(), json!(a)))?;
        comps.push(json!({"lambda": a, "dim": got}));
    }
    Ok(json!({"components": comps}))
}

/// The full type C degeneration check for one marked set.
pub fn verify_degenmain_c(ctx: &RankContext, o: &OSet, sagbi_total: u32, certify: bool) -> Outcome {
    let data = psi_data(ctx, o)?;
    let mut out = json!({"psi_bijective": true});
    out["sagbi"] = verify_sagbi_c(ctx, o, sagbi_total)?;
    let Some(tilde) = ctx.tilde_i.as_ref().filter(|_| certify) else {
        return Ok(out);
    };
    let pl = &ctx.plucker;
    let psi_io = psi_of_toric(ctx, &data);
    let pullback = data.order.pullback(&data.phi_images);
    let tiebreak = MonomialOrder::degrevlex(pl.theta_len());
    let degrees = degrees_up_to(pl.n, 3);
    let (gb_tilde, cert_tilde) = initial_ideal(
        tilde,
        &pullback,
        &tiebreak,
        &psi_io,
        &pl.grading_theta(),
        &degrees,
    )
    .map_err(|e| fail(format!("tilde: {e}"), Value::Null))?;
    check_weyl_dims(&gb_tilde, ctx, &degrees)?;
    out["tilde_certificate"] = serde_json::to_value(cert_tilde).unwrap();
    let Some(i_sym) = &ctx.i_sym else {
        return Ok(out);
    };
    let theta_tuples: Vec<Vec<i32>> = (0..pl.theta_len() as u32)
        .map(|t| pl.theta_tuple(t).to_vec())
        .collect();
    let composite = ll_order(pl.n, &theta_tuples).then(&pullback);
    let (_, cert_i) = initial_ideal(
        i_sym,
        &composite,
        &tiebreak,
        &psi_io,
        &pl.grading_theta(),
        &degrees,
    )
    .map_err(|e| fail(format!("I: {e}"), Value::Null))?;
    out["i_certificate"] = serde_json::to_value(cert_i).unwrap();
    Ok(out)
}

/// Products of `ψ(X_J)` over nested chains project to a basis of the `λ`
/// component of `ℂ[Θ]/I`; returns the column tableaux.
pub fn standard_tableaux(ctx: &RankContext, o: &OSet, a: &[u32], gb_i: &GroebnerBasis) -> Outcome {
    let p = &ctx.p;
    let data = psi_data(ctx, o)?;
    let by_mask: BTreeMap<u64, (u32, Rational)> = data
        .psi
        .iter()
        .map(|(m, t, s)| (*m, (*t, s.clone())))
        .collect();
    let chains = multichains(p, a);
    let mut ech = Echelon::new();
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut tableaux = Vec::new();
    for chain in &chains {
        let mut prod = Poly::constant(Rational::from_integer(1.into()));
        for j in chain {
            let (t, s) = &by_mask[&j.mask];
            prod = &prod * &Poly::monomial(Monomial::var(*t), s.clone());
        }
        let nf = gb_i.normal_form(&prod);
        let row = nf
            .terms()
            .map(|(m, c)| {
                let k = index.len();
                (*index.entry(m.clone()).or_insert(k), c.clone())
            })
            .collect();
        ech.insert(row);
        let columns: Vec<Vec<i32>> = chain.iter().rev().map(|j| data.twist.tuple(j)).collect();
        tableaux.push(columns);
    }
    let dim = weyl_dim(LieType::C, &doubled_weight(LieType::C, a))
        .to_usize()
        .unwrap();
    if chains.len() != dim || ech.rank() != dim {
        return Err(fail(
            "standard monomials are not a basis",
            json!({"count": chains.len(), "rank": ech.rank(), "dim": dim}),
        ));
    }
    Ok(json!({"count": dim, "tableaux": tableaux}))
}

/// Points of `Π_O(λ)` restricted to `P∖A`.
pub fn pi_signatures(p: &PosetP, o: &OSet, a: &[u32]) -> Result<Vec<Vec<u32>>, Value> {
    let twist = Twist::new(p, *o);
    let xi_map = xi(p, &twist);
    let off = off_diagonal(p);
    let pts = lattice_points_c(p, o, &WeightC::new(a.to_vec()))
        .map_err(|e| fail(e.to_string(), Value::Null))?;
    Ok(pts
        .iter()
        .map(|x| {
            let y = xi_map.apply(x);
            off.iter().map(|&k| y[k] as u32).collect()
        })
        .collect())
}

/// `{f^x v_λ : x ∈ Π_O(λ)}` has rank `dim V_λ`.
pub fn verify_mainbasis_c(real: &Realization, p: &PosetP, o: &OSet, a: &[u32]) -> Outcome {
    let sigs = pi_signatures(p, o, a)?;
    let tensor = Tensor::for_weight_c(real, a);
    let v = tensor.highest();
    let mut by_weight: BTreeMap<Vec<i64>, Echelon> = BTreeMap::new();
    for d in &sigs {
        let w = tensor.apply_pbw(d, &v);
        by_weight
            .entry(drop_of(real, d))
            .or_default()
            .insert(to_row(&w));
    }
    let rank: usize = by_weight.values().map(Echelon::rank).sum();
    let dim = weyl_dim(LieType::C, &doubled_weight(LieType::C, a))
        .to_usize()
        .unwrap();
    if rank == dim && sigs.len() == dim {
        Ok(json!({"rank": rank}))
    } else {
        Err(fail(
            "rank deficit",
            json!({"rank": rank, "points": sigs.len(), "dim": dim}),
        ))
    }
}

/// Weights of `Π_O(λ)` points against the Weyl character.
pub fn character_check_c(real: &Realization, p: &PosetP, o: &OSet, a: &[u32]) -> Outcome {
    let sigs = pi_signatures(p, o, a)?;
    let l2 = doubled_weight(LieType::C, a);
    let got = crate::liealg::character_of_signatures(real, &l2, &sigs);
    let want = weyl_char(LieType::C, &l2);
    if got == want {
        Ok(json!({"weights": got.len()}))
    } else {
        let w = want
            .iter()
            .find(|(k, v)| got.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .or_else(|| got.keys().find(|k| !want.contains_key(*k)).cloned());
        Err(fail("character mismatch", json!({"weight_doubled": w})))
    }
}

pub fn gb_of_i(ctx: &RankContext) -> Option<GroebnerBasis> {
    ctx.i_sym
        .as_ref()
        .map(|i| buchberger(&i.gens, &MonomialOrder::degrevlex(ctx.plucker.theta_len())))
}
