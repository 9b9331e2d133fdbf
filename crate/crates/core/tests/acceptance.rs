//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use flagdegen_core::degenverify::orders::{
    ll_order, order_a, order_c, signature_less_direct, SignatureOrder,
};
use flagdegen_core::degenverify::plucker::Plucker;
use flagdegen_core::degenverify::typeb::{
    character_check_b, p_polynomials, pi_signatures_b, verify_degenmain_b, verify_ejd,
    verify_essential_b,
};
use flagdegen_core::degenverify::typec::{
    character_check_c, degrees_up_to, lattice_count, psi_data, verify_degenmain_c,
    verify_initial_d, verify_intermediate, verify_mainbasis_c, verify_tilde_initial, RankContext,
};
use flagdegen_core::exactalg::{initial_form, is_unit, Monomial, MonomialOrder, Rational};
use flagdegen_core::liealg::{cjd_ejd, Module};
use flagdegen_core::pipedream::{perm_of_subset, r_table};
use flagdegen_core::polytope_b::{hrep_b, is_vertex, project_pi_xi};
use flagdegen_core::polytope_c::{indicator, lattice_points_c, xi, WeightC};
use flagdegen_core::poset::m_o;
use flagdegen_core::{LieType, OSet, PosetElement, PosetP, Realization, Twist, WeightB};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Check = fn() -> Result<String, String>;

fn pe(i: i32, j: i32) -> PosetElement {
    PosetElement::new(i, j)
}

fn q(s: &str) -> Rational {
    match s.split_once('/') {
        Some((a, b)) => Rational::new(
            a.parse::<i64>().unwrap().into(),
            b.parse::<i64>().unwrap().into(),
        ),
        None => Rational::from_integer(s.parse::<i64>().unwrap().into()),
    }
}

fn qs(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| q(s)).collect()
}

fn rex_marking(p: &PosetP) -> OSet {
    OSet::new(p, &[pe(1, 3), pe(1, -2), pe(2, 3), pe(3, -3)], false).unwrap()
}

fn all_ok(
    what: &str,
    results: impl IntoIterator<Item = Result<Value, Value>>,
) -> Result<usize, String> {
    let mut count = 0;
    for r in results {
        r.map_err(|e| format!("{what}: {e}"))?;
        count += 1;
    }
    Ok(count)
}

fn c1_pipe_dream() -> Result<String, String> {
    let start = Instant::now();
    let p = PosetP::build(3).map_err(|e| e.to_string())?;
    let mask = p
        .mask_of(&[pe(1, 1), pe(1, 3), pe(1, -2), pe(2, 2), pe(2, 3), pe(3, -3)])
        .map_err(|e| e.to_string())?;
    let w = perm_of_subset(&p, mask);
    let elapsed = start.elapsed();
    if w.image_list() != [-2, 1, -3, 2, 3, -1] {
        return Err(format!("got {:?}", w.image_list()));
    }
    if elapsed >= Duration::from_millis(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("w_M = {:?} in {elapsed:?}", w.image_list()))
}

fn c2_r_table_and_xi() -> Result<String, String> {
    let p = PosetP::build(3).unwrap();
    let o = rex_marking(&p);
    let table = r_table(&p, &o);
    let expected = [
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
    for ((i, j), r) in expected {
        if table.get(i, j) != Some(r) {
            return Err(format!("r({i},{j}) = {:?}, expected {r}", table.get(i, j)));
        }
    }
    let twist = Twist::new(&p, o);
    let ideal = p.ideal(p.principal(p.idx(2, -3)));
    let image = xi(&p, &twist).apply(&indicator(&p, m_o(&p, &o, ideal.mask)));
    let want = indicator(&p, p.mask_of(&[pe(1, -2), pe(2, 3)]).unwrap());
    if image != want {
        return Err(format!("xi image {image:?}"));
    }
    if twist.tuple(&ideal) != [-2, 3] {
        return Err(format!("tuple {:?}", twist.tuple(&ideal)));
    }
    Ok("12 r-values, xi image and tuple (-2,3) reproduced".into())
}

fn c3_counts() -> Result<String, String> {
    let mut cases = 0;
    for n in 1..=3 {
        let p = PosetP::build(n).unwrap();
        let markings = OSet::all(&p, false);
        if n == 3
            && !(markings.contains(&OSet::gt(&p, false))
                && markings.contains(&OSet::fflv(&p, false))
                && markings.contains(&rex_marking(&p)))
        {
            return Err("missing distinguished markings".into());
        }
        for o in &markings {
            for a in degrees_up_to(n, 3) {
                lattice_count(&p, o, &a).map_err(|e| format!("n={n} {a:?}: {e}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} (O, lambda) cases, all O exhaustive at n <= 3"
    ))
}

fn c4_type_b_example() -> Result<String, String> {
    let p = PosetP::build(2).unwrap();
    let o = OSet::new(&p, &[pe(1, -2)], true).unwrap();
    let xi_map = xi(&p, &Twist::new(&p, o));
    let q_w1: BTreeSet<Vec<Rational>> = [
        ["1", "0", "0", "0", "0", "0"],
        ["1", "1", "0", "0", "0", "0"],
        ["1", "0", "1", "0", "0", "0"],
        ["1", "0", "1", "2", "0", "0"],
    ]
    .iter()
    .map(|v| qs(v))
    .collect();
    let q_w2: BTreeSet<Vec<Rational>> = [
        ["1/2", "0", "0", "0", "1/2", "0"],
        ["1/2", "0", "1/2", "0", "1/2", "0"],
        ["1/2", "0", "1/2", "1", "1/2", "0"],
        ["1/2", "0", "1/2", "0", "1/2", "1"],
        ["1/2", "0", "1/2", "1", "1/2", "1"],
    ]
    .iter()
    .map(|v| qs(v))
    .collect();
    let pi_w1: BTreeSet<Vec<Rational>> = [
        ["0", "1", "0", "0"],
        ["1", "0", "0", "0"],
        ["0", "0", "0", "0"],
        ["0", "0", "2", "0"],
    ]
    .iter()
    .map(|v| qs(v))
    .collect();
    let pi_w2: BTreeSet<Vec<Rational>> = [
        ["0", "1/2", "0", "0"],
        ["0", "0", "0", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "0", "1"],
        ["0", "0", "1", "1"],
    ]
    .iter()
    .map(|v| qs(v))
    .collect();
    for (a, qv, piv) in [([1u32, 0], &q_w1, &pi_w1), ([0, 1], &q_w2, &pi_w2)] {
        let hrep = hrep_b(&p, &o, &WeightB::new(a.to_vec())).map_err(|e| e.to_string())?;
        let verts = hrep.vertices_by_enumeration();
        if &verts != qv || !qv.iter().all(|x| is_vertex(&hrep, x)) {
            return Err(format!("vertices of Q for {a:?}: {verts:?}"));
        }
        let projected: BTreeSet<Vec<Rational>> = verts
            .iter()
            .map(|x| project_pi_xi(&p, &xi_map, x))
            .collect();
        if &projected != piv {
            return Err(format!("vertices of Pi for {a:?}: {projected:?}"));
        }
    }
    let mut counts = Vec::new();
    for (a, want) in [([1u32, 0], 5usize), ([0, 1], 4), ([0, 2], 10), ([1, 1], 16)] {
        let got = pi_signatures_b(&p, &o, &a)
            .map_err(|e| e.to_string())?
            .len();
        if got != want {
            return Err(format!("{a:?}: {got} points, expected {want}"));
        }
        counts.push(got);
    }
    Ok(format!("vertex lists exact; point counts {counts:?}"))
}

fn c5_initial_d() -> Result<String, String> {
    let mut markings = 0;
    for n in 1..=3 {
        let ctx = RankContext::new(n, false)?;
        markings += all_ok(
            "initialD",
            OSet::all(&ctx.p, false)
                .iter()
                .map(|o| verify_initial_d(&ctx, o)),
        )?;
    }
    let ctx = RankContext::new(3, false)?;
    let twist = Twist::new(&ctx.p, rex_marking(&ctx.p));
    let ord = order_c(&ctx.p, &twist)?;
    let d = ctx.plucker.minor_d(&ctx.p, &[-2, 3]);
    let init = initial_form(&d, &ord).map_err(|e| e.to_string())?;
    let want = Monomial::from_pairs([(ctx.p.idx(1, -2) as u32, 1), (ctx.p.idx(2, 3) as u32, 1)]);
    if init.monomials().collect::<Vec<_>>() != [&want] {
        return Err(format!("initial form {init}"));
    }
    Ok(format!(
        "{markings} markings, every J; example monomial z(1,-2) z(2,3)"
    ))
}

fn c6_intermediate() -> Result<String, String> {
    let mut parts = Vec::new();
    for n in 1..=3 {
        let ctx = RankContext::new(n, n == 2)?;
        let v = verify_intermediate(&ctx).map_err(|e| e.to_string())?;
        parts.push(format!("n={n}: {} non-admissible", v["nonadmissible"]));
        if n == 2 && v.get("part_b").is_none() {
            return Err("part (b) not certified".into());
        }
        if n == 2 {
            verify_tilde_initial(&ctx).map_err(|e| e.to_string())?;
        }
    }
    Ok(parts.join("; ") + "; (b) and the Schubert initial ideal certified at n=2")
}

fn c7_degenmain_c() -> Result<String, String> {
    let ctx = RankContext::new(2, true)?;
    for o in OSet::all(&ctx.p, false) {
        let v = verify_degenmain_c(&ctx, &o, 3, true).map_err(|e| e.to_string())?;
        if v.get("i_certificate").is_none() || v.get("tilde_certificate").is_none() {
            return Err("missing certificate".into());
        }
    }
    let ctx3 = RankContext::new(3, false)?;
    let count = all_ok(
        "sagbi n=3",
        OSet::all(&ctx3.p, false)
            .iter()
            .map(|o| verify_degenmain_c(&ctx3, o, 2, false)),
    )?;
    Ok(format!(
        "16 markings certified at n=2; sagbi components for {count} markings at n=3"
    ))
}

fn c8_mainbasis() -> Result<String, String> {
    let mut cases = 0;
    for n in 1..=3 {
        let p = PosetP::build(n).unwrap();
        let real = Realization::new(LieType::C, n).map_err(|e| e.to_string())?;
        for o in OSet::all(&p, false) {
            for a in degrees_up_to(n, 2) {
                verify_mainbasis_c(&real, &p, &o, &a).map_err(|e| format!("n={n} {a:?}: {e}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases with full rank"))
}

fn c9_essential_b() -> Result<String, String> {
    let mut cases = 0;
    for n in 1..=3 {
        let p = PosetP::build(n).unwrap();
        let real = Realization::new(LieType::B, n).map_err(|e| e.to_string())?;
        let weights = if n <= 2 {
            degrees_up_to(n, 3)
        } else {
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 2]]
        };
        for o in OSet::all(&p, true) {
            for a in &weights {
                verify_essential_b(&real, &p, &o, a).map_err(|e| format!("n={n} {a:?}: {e}"))?;
                cases += 1;
            }
        }
    }
    let p = PosetP::build(4).unwrap();
    let o = OSet::new(&p, &[pe(1, -3), pe(2, -3)], true).unwrap();
    let twist = Twist::new(&p, o);
    let ideal = p.ideal(p.ideal_generated(1 << p.idx(1, -1) | 1 << p.idx(4, -4)));
    let pairs = [
        (
            0u32,
            vec![(-1, 0), (0, 1), (-3, 2), (-4, 0), (0, 4)],
            vec![-1, -3, 3, -4],
        ),
        (
            0b1,
            vec![(0, 1), (-3, 2), (-4, 0), (0, 4)],
            vec![0, -3, 3, -4],
        ),
        (
            0b1000,
            vec![(0, 1), (-1, 0), (-2, 3), (0, 4)],
            vec![0, 2, -2, -1],
        ),
        (0b1001, vec![(-1, 0), (-2, 3), (0, 4)], vec![1, 2, -2, -1]),
    ];
    for (d, word, subs) in pairs {
        let got = cjd_ejd(&p, &twist, &ideal, d).map_err(|e| e.to_string())?;
        if got != (word.clone(), subs.clone()) {
            return Err(format!("D={d:#b}: {got:?}"));
        }
    }
    let mut pair_total = 0;
    for n in 1..=4 {
        let v = verify_ejd(n).map_err(|e| e.to_string())?;
        pair_total += v["pairs"].as_u64().unwrap_or(0);
    }
    Ok(format!(
        "{cases} essential cases; 4 worked words; {pair_total} (O,J,D) triples at n <= 4"
    ))
}

fn c10_degenmain_b() -> Result<String, String> {
    let p1 = PosetP::build(1).unwrap();
    let r1 = Realization::new(LieType::B, 1).map_err(|e| e.to_string())?;
    let data = p_polynomials(&r1, &p1, &OSet::fflv(&p1, true), &[2]).map_err(|e| e.to_string())?;
    if data.essential != [vec![0], vec![1], vec![2]] {
        return Err(format!("so3 essential {:?}", data.essential));
    }
    verify_degenmain_b(&r1, &p1, &OSet::fflv(&p1, true), &[2], true).map_err(|e| e.to_string())?;
    let p = PosetP::build(2).unwrap();
    let real = Realization::new(LieType::B, 2).map_err(|e| e.to_string())?;
    let mut dims = Vec::new();
    for a in [[1u32, 0], [0, 2], [1, 2]] {
        for o in OSet::all(&p, true) {
            let v =
                verify_degenmain_b(&real, &p, &o, &a, true).map_err(|e| format!("{a:?}: {e}"))?;
            if v.get("certificate").is_none() {
                return Err("missing certificate".into());
            }
            if o == OSet::gt(&p, true) {
                dims.push(v["certificate"]["dims"].to_string());
            }
        }
    }
    Ok(format!(
        "leading terms and kernel certificates for n <= 2, graded dims {}",
        dims.join(" ")
    ))
}

fn c11_characters() -> Result<String, String> {
    let mut cases = 0;
    for n in 1..=3 {
        let p = PosetP::build(n).unwrap();
        let mut weights: Vec<Vec<u32>> = (0..n)
            .map(|k| (0..n).map(|c| (c == k) as u32).collect())
            .collect();
        let mut extra = vec![0; n];
        extra[0] += 1;
        extra[n - 1] += 1;
        weights.push(extra);
        for ty in [LieType::C, LieType::B] {
            let real = Realization::new(ty, n).map_err(|e| e.to_string())?;
            for o in OSet::all(&p, ty == LieType::B) {
                for a in &weights {
                    match ty {
                        LieType::C => character_check_c(&real, &p, &o, a),
                        LieType::B => character_check_b(&real, &p, &o, a),
                    }
                    .map_err(|e| format!("{ty:?} n={n} {a:?}: {e}"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} exact character identities"))
}

fn random_monomial(rng: &mut StdRng, nvars: usize) -> Monomial {
    let pairs: Vec<(u32, u32)> = (0..rng.gen_range(0..4))
        .map(|_| (rng.gen_range(0..nvars) as u32, rng.gen_range(1..3)))
        .collect();
    pairs
        .into_iter()
        .fold(Monomial::one(), |m, (v, e)| m.mul(&Monomial::var(v).pow(e)))
}

fn multiplicative(order: &MonomialOrder, rng: &mut StdRng, trials: usize) -> bool {
    let nv = order.nvars();
    (0..trials).all(|_| {
        let (a, b, s) = (
            random_monomial(rng, nv),
            random_monomial(rng, nv),
            random_monomial(rng, nv),
        );
        order.compare(&a, &b) == order.compare(&a.mul(&s), &b.mul(&s))
    })
}

fn c12_properties() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let trials = 10_000;
    let p3 = PosetP::build(3).unwrap();
    let rex = Twist::new(&p3, rex_marking(&p3));
    let b_marking = OSet::new(&p3, &[pe(1, 2), pe(2, -3)], true).unwrap();
    let b_twist = Twist::new(&p3, b_marking);
    let sig = SignatureOrder::new(&p3, &b_twist)?;
    let pl3 = Plucker::new(3);
    let ctx2 = RankContext::new(2, false)?;
    let phi = psi_data(&ctx2, &OSet::gt(&ctx2.p, false)).map_err(|e| e.to_string())?;
    let orders: Vec<(&str, MonomialOrder)> = vec![
        ("element order", order_c(&p3, &rex)?),
        ("signature order", sig.greater(true)),
        ("wt_A order", ll_order(3, &pl3.tuples)),
        ("order on Z^P", order_a(&p3, &rex)?),
        ("pullback", phi.order.pullback(&phi.phi_images)),
        ("degrevlex", MonomialOrder::degrevlex(8)),
    ];
    for (name, ord) in &orders {
        if !multiplicative(ord, &mut rng, trials) {
            return Err(format!("{name} is not multiplicative"));
        }
    }
    for _ in 0..trials {
        let d1: Vec<i64> = (0..9).map(|_| rng.gen_range(0..3)).collect();
        let d2: Vec<i64> = (0..9).map(|_| rng.gen_range(0..3)).collect();
        if signature_less_direct(&p3, &b_twist, &d1, &d2)? != (sig.key_i64(&d1) < sig.key_i64(&d2))
        {
            return Err(format!("signature order disagrees on {d1:?} {d2:?}"));
        }
    }
    let mut xi_count = 0;
    for n in 1..=4 {
        let p = PosetP::build(n).unwrap();
        for o in OSet::all(&p, false) {
            if !is_unit(&xi(&p, &Twist::new(&p, o)).determinant()) {
                return Err(format!("xi not unimodular at n={n}"));
            }
            xi_count += 1;
        }
    }
    for n in 1..=4 {
        for ty in [LieType::C, LieType::B] {
            let real = Realization::new(ty, n).map_err(|e| e.to_string())?;
            for a in 0..real.ops.len() {
                for b in 0..real.ops.len() {
                    let mut lhs = real.matrices[a].commutator(&real.matrices[b]);
                    for (c, v) in &real.brackets[a][b] {
                        lhs.add_scaled(&real.matrices[*c], &-v.clone());
                    }
                    if !lhs.is_zero() {
                        return Err(format!(
                            "{ty:?} n={n}: bracket of {} and {}",
                            real.ops[a], real.ops[b]
                        ));
                    }
                }
            }
            let mut modules: Vec<Module> =
                (1..=n).map(|k| Module::exterior_power(&real, k)).collect();
            if ty == LieType::B {
                modules.push(Module::spin(&real));
            }
            for module in &modules {
                module
                    .check(&real)
                    .map_err(|e| format!("{ty:?} n={n}: {e}"))?;
            }
        }
    }
    let mut sums = 0;
    for n in 1..=3 {
        let p = PosetP::build(n).unwrap();
        let small = degrees_up_to(n, 2);
        for o in OSet::all(&p, false) {
            for a in &small {
                for b in &small {
                    let ab: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    if ab.iter().sum::<u32>() > 3 || a > b {
                        continue;
                    }
                    let pa = lattice_points_c(&p, &o, &WeightC::new(a.clone()))
                        .map_err(|e| e.to_string())?;
                    let pb = lattice_points_c(&p, &o, &WeightC::new(b.clone()))
                        .map_err(|e| e.to_string())?;
                    let pab = lattice_points_c(&p, &o, &WeightC::new(ab.clone()))
                        .map_err(|e| e.to_string())?;
                    let sum: BTreeSet<Vec<i64>> = pa
                        .iter()
                        .flat_map(|x| {
                            pb.iter()
                                .map(move |y| x.iter().zip(y).map(|(u, v)| u + v).collect())
                        })
                        .collect();
                    if sum != pab {
                        return Err(format!("type C sum fails at n={n} {a:?}+{b:?}"));
                    }
                    sums += 1;
                }
            }
        }
        for o in OSet::all(&p, true) {
            for a in &small {
                for b in &small {
                    let ab: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    if ab.iter().sum::<u32>() > 3
                        || a > b
                        || (a[n - 1] % 2 == 1 && b[n - 1] % 2 == 1)
                    {
                        continue;
                    }
                    let pa = pi_signatures_b(&p, &o, a).map_err(|e| e.to_string())?;
                    let pb = pi_signatures_b(&p, &o, b).map_err(|e| e.to_string())?;
                    let pab = pi_signatures_b(&p, &o, &ab).map_err(|e| e.to_string())?;
                    let sum: BTreeSet<Vec<u32>> = pa
                        .iter()
                        .flat_map(|x| {
                            pb.iter()
                                .map(move |y| x.iter().zip(y).map(|(u, v)| u + v).collect())
                        })
                        .collect();
                    if sum != pab {
                        return Err(format!("type B sum fails at n={n} {a:?}+{b:?}"));
                    }
                    sums += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} orders x {trials} triples; signature order cross-check; {xi_count} unimodular maps; brackets n <= 4; {sums} Minkowski identities",
        orders.len()
    ))
}

fn main() {
    let criteria: [(u32, &str, Option<Duration>, Check); 12] = [
        (1, "pipe dream example", None, c1_pipe_dream),
        (2, "r-table and xi example", None, c2_r_table_and_xi),
        (
            3,
            "type C lattice point counts",
            Some(Duration::from_secs(300)),
            c3_counts,
        ),
        (4, "type B polytope example", None, c4_type_b_example),
        (5, "initial terms of D", None, c5_initial_d),
        (6, "intermediate degeneration", None, c6_intermediate),
        (
            7,
            "type C toric degeneration",
            Some(Duration::from_secs(900)),
            c7_degenmain_c,
        ),
        (
            8,
            "type C PBW monomial bases",
            Some(Duration::from_secs(600)),
            c8_mainbasis,
        ),
        (
            9,
            "type B essential signatures and words",
            None,
            c9_essential_b,
        ),
        (10, "type B degeneration", None, c10_degenmain_b),
        (11, "character identities", None, c11_characters),
        (12, "property suites", None, c12_properties),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(d), Some(l)) if elapsed > l => Err(format!("{d}; exceeded {l:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("acceptance {id:>2} PASS {name}: {detail} [{elapsed:.2?}]"),
            Err(e) => {
                failed += 1;
                println!("acceptance {id:>2} FAIL {name}: {e} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
