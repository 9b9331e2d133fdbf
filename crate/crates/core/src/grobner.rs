//! Gröbner bases over the rationals: Buchberger with the normal selection
//! strategy, normal forms, elimination kernels, graded dimensions through
//! standard monomials, initial-ideal certificates, and sagbi components.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactalg::{initial_form, initial_span, Monomial, MonomialOrder, Poly, Rational, Ring};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrobnerError {
    #[error("initial form {0} is not in the candidate ideal")]
    NotContained(String),
    #[error("graded dimension mismatch at {degree:?}: ideal {ideal}, candidate {candidate}")]
    DimensionMismatch {
        degree: Vec<u32>,
        ideal: usize,
        candidate: usize,
    },
    #[error("sagbi component {degree:?}: leading monomial {witness} {kind}")]
    Sagbi {
        degree: Vec<u32>,
        witness: String,
        kind: &'static str,
    },
}

#[derive(Clone, Debug, Default)]
pub struct Ideal {
    pub gens: Vec<Poly>,
}

impl Ideal {
    pub fn new(gens: impl IntoIterator<Item = Poly>) -> Self {
        Ideal {
            gens: gens.into_iter().filter(|p| !p.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Ideal {
        Ideal::new(self.gens.iter().map(f))
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        Value::Array(self.gens.iter().map(|p| ring.poly_json(p)).collect())
    }
}

/// Term with its order key cached; keys are additive under multiplication.
#[derive(Clone, Debug)]
struct Term {
    key: Box<[i64]>,
    mono: Monomial,
    coeff: Rational,
}

/// Terms sorted strictly decreasing by key.
#[derive(Clone, Debug, Default)]
struct KPoly {
    terms: Vec<Term>,
}

impl KPoly {
    fn from_poly(p: &Poly, ord: &MonomialOrder) -> Self {
        let mut terms: Vec<Term> = p
            .terms()
            .map(|(m, c)| Term {
                key: ord.key(m).into_boxed_slice(),
                mono: m.clone(),
                coeff: c.clone(),
            })
            .collect();
        terms.sort_by(|a, b| b.key.cmp(&a.key));
        KPoly { terms }
    }

    fn to_poly(&self) -> Poly {
        Poly::from_terms(self.terms.iter().map(|t| (t.mono.clone(), t.coeff.clone())))
    }

    fn lead(&self) -> &Term {
        &self.terms[0]
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn make_monic(&mut self) {
        if let Some(t) = self.terms.first() {
            let inv = t.coeff.recip();
            for t in &mut self.terms {
                t.coeff *= &inv;
            }
        }
    }

    /// `self − c·m·other` where `mkey` is the key of `m`, starting at term
    /// index `from` of `self`.
    fn sub_mul(
        &self,
        from: usize,
        c: &Rational,
        m: &Monomial,
        mkey: &[i64],
        other: &KPoly,
    ) -> Vec<Term> {
        let a = &self.terms[from..];
        let mut out = Vec::with_capacity(a.len() + other.terms.len());
        let shifted = other.terms.iter().map(|t| Term {
            key: t.key.iter().zip(mkey).map(|(x, y)| x + y).collect(),
            mono: t.mono.mul(m),
            coeff: -(c * &t.coeff),
        });
        let mut i = 0;
        for b in shifted {
            while i < a.len() && a[i].key > b.key {
                out.push(a[i].clone());
                i += 1;
            }
            if i < a.len() && a[i].key == b.key {
                let s = &a[i].coeff + &b.coeff;
                if !s.is_zero() {
                    out.push(Term { coeff: s, ..b });
                }
                i += 1;
            } else {
                out.push(b);
            }
        }
        out.extend_from_slice(&a[i..]);
        out
    }
}

fn find_divisor(basis: &[KPoly], m: &Monomial) -> Option<usize> {
    basis.iter().position(|g| g.lead().mono.divides(m))
}

/// Reduces `p` by `basis`; tail terms too when `full`.
fn reduce(p: KPoly, basis: &[KPoly], ord: &MonomialOrder, full: bool) -> KPoly {
    let mut done: Vec<Term> = Vec::new();
    let mut rest = p.terms;
    let mut cursor = 0;
    while cursor < rest.len() {
        let t = &rest[cursor];
        match find_divisor(basis, &t.mono) {
            Some(k) => {
                let g = &basis[k];
                let q = g.lead().mono.quotient_of(&t.mono).expect("divides");
                let c = &t.coeff / &g.lead().coeff;
                let qkey = ord.key(&q);
                let cur = KPoly { terms: rest };
                rest = cur.sub_mul(cursor, &c, &q, &qkey, g);
                done.extend_from_slice(&cur.terms[..cursor]);
                cursor = 0;
            }
            None if full => cursor += 1,
            None => break,
        }
    }
    done.extend(rest);
    KPoly { terms: done }
}

fn s_poly(a: &KPoly, b: &KPoly, ord: &MonomialOrder) -> KPoly {
    let lcm = a.lead().mono.lcm(&b.lead().mono);
    let qa = a.lead().mono.quotient_of(&lcm).expect("lcm");
    let qb = b.lead().mono.quotient_of(&lcm).expect("lcm");
    let ka = ord.key(&qa);
    let kb = ord.key(&qb);
    let ca = b.lead().coeff.clone();
    let left = KPoly {
        terms: a
            .terms
            .iter()
            .map(|t| Term {
                key: t.key.iter().zip(&ka).map(|(x, y)| x + y).collect(),
                mono: t.mono.mul(&qa),
                coeff: &t.coeff * &ca,
            })
            .collect(),
    };
    KPoly {
        terms: left.sub_mul(0, &a.lead().coeff, &qb, &kb, b),
    }
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub basis: Vec<Poly>,
    pub order: MonomialOrder,
    kbasis: Vec<KPoly>,
}

/// Reduced Gröbner basis. Inputs are expected homogeneous for some positive
/// grading whenever the order is not a well-order.
pub fn buchberger(gens: &[Poly], ord: &MonomialOrder) -> GroebnerBasis {
    assert!(ord.is_total(), "buchberger needs a total order");
    let mut g: Vec<KPoly> = Vec::new();
    let mut pairs: BTreeSet<(u64, Box<[i64]>, usize, usize)> = BTreeSet::new();
    let mut live: Vec<bool> = Vec::new();
    let push_pairs = |g: &Vec<KPoly>,
                      live: &Vec<bool>,
                      pairs: &mut BTreeSet<(u64, Box<[i64]>, usize, usize)>,
                      new: usize| {
        for old in 0..new {
            if !live[old] {
                continue;
            }
            let lcm = g[old].lead().mono.lcm(&g[new].lead().mono);
            pairs.insert((lcm.degree(), ord.key(&lcm).into_boxed_slice(), old, new));
        }
    };
    let add = |g: &mut Vec<KPoly>, live: &mut Vec<bool>, pairs: &mut BTreeSet<_>, mut p: KPoly| {
        p.make_monic();
        let lead = p.lead().mono.clone();
        g.push(p);
        live.push(true);
        let new = g.len() - 1;
        push_pairs(g, live, pairs, new);
        for old in 0..new {
            if live[old] && lead.divides(&g[old].lead().mono) {
                live[old] = false;
            }
        }
    };
    for p in gens {
        let kp = KPoly::from_poly(p, ord);
        let active: Vec<KPoly> = g
            .iter()
            .zip(&live)
            .filter(|(_, &l)| l)
            .map(|(x, _)| x.clone())
            .collect();
        let r = reduce(kp, &active, ord, false);
        if !r.is_zero() {
            add(&mut g, &mut live, &mut pairs, r);
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    while let Some(pair) = pairs.pop_first() {
        let (_, _, a, b) = pair;
        done.insert((a, b));
        let la = &g[a].lead().mono;
        let lb = &g[b].lead().mono;
        if la.coprime(lb) {
            continue;
        }
        let lcm = la.lcm(lb);
        let chain = (0..g.len()).any(|k| {
            k != a
                && k != b
                && g[k].lead().mono.divides(&lcm)
                && done.contains(&(a.min(k), a.max(k)))
                && done.contains(&(b.min(k), b.max(k)))
        });
        if chain {
            continue;
        }
        let s = s_poly(&g[a], &g[b], ord);
        let r = reduce(s, &g, ord, false);
        if !r.is_zero() {
            add(&mut g, &mut live, &mut pairs, r);
        }
    }
    let minimal: Vec<KPoly> = g
        .into_iter()
        .zip(live)
        .filter(|(_, l)| *l)
        .map(|(p, _)| p)
        .collect();
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<KPoly> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, p)| p.clone())
            .collect();
        let lead = minimal[k].terms[0].clone();
        let tail = KPoly {
            terms: minimal[k].terms[1..].to_vec(),
        };
        let mut r = reduce(tail, &others, ord, true);
        r.terms.insert(0, lead);
        r.make_monic();
        reduced.push(r);
    }
    reduced.sort_by(|a, b| a.lead().key.cmp(&b.lead().key));
    GroebnerBasis {
        basis: reduced.iter().map(KPoly::to_poly).collect(),
        order: ord.clone(),
        kbasis: reduced,
    }
}

impl GroebnerBasis {
    pub fn normal_form(&self, p: &Poly) -> Poly {
        reduce(
            KPoly::from_poly(p, &self.order),
            &self.kbasis,
            &self.order,
            true,
        )
        .to_poly()
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.kbasis.iter().map(|p| p.lead().mono.clone()).collect()
    }

    /// Every S-polynomial reduces to zero and leading monomials are
    /// pairwise non-divisible.
    pub fn verify(&self) -> bool {
        let leads = self.leading_monomials();
        for a in 0..leads.len() {
            for b in 0..leads.len() {
                if a != b && leads[a].divides(&leads[b]) {
                    return false;
                }
            }
        }
        for a in 0..self.kbasis.len() {
            for b in a + 1..self.kbasis.len() {
                let s = s_poly(&self.kbasis[a], &self.kbasis[b], &self.order);
                if !reduce(s, &self.kbasis, &self.order, false).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Number of standard monomials in the given multidegree.
    pub fn graded_dim(&self, grading: &Grading, degree: &[u32]) -> usize {
        let leads = self.leading_monomials();
        grading
            .monomials(degree)
            .into_iter()
            .filter(|m| !leads.iter().any(|l| l.divides(m)))
            .count()
    }

    pub fn ideal(&self) -> Ideal {
        Ideal::new(self.basis.iter().cloned())
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        json!({
            "order_rows": self.order.rows(),
            "basis": self.basis.iter().map(|p| ring.poly_json(p)).collect::<Vec<_>>(),
        })
    }
}

/// Multigrading in which every variable has a unit degree: `class[v]` is the
/// coordinate it raises.
#[derive(Clone, Debug)]
pub struct Grading {
    pub class: Vec<usize>,
    pub classes: usize,
}

impl Grading {
    pub fn new(class: Vec<usize>) -> Self {
        let classes = class.iter().max().map_or(0, |&c| c + 1);
        Grading { class, classes }
    }

    pub fn degree(&self, m: &Monomial) -> Vec<u32> {
        let mut d = vec![0; self.classes];
        for &(v, e) in m.pairs() {
            d[self.class[v as usize]] += e;
        }
        d
    }

    pub fn is_homogeneous(&self, p: &Poly) -> bool {
        let mut degs = p.monomials().map(|m| self.degree(m));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// All monomials of the given multidegree.
    pub fn monomials(&self, degree: &[u32]) -> Vec<Monomial> {
        let mut by_class: Vec<Vec<u32>> = vec![Vec::new(); self.classes];
        for (v, &c) in self.class.iter().enumerate() {
            by_class[c].push(v as u32);
        }
        let mut out = vec![Monomial::one()];
        for (c, vars) in by_class.iter().enumerate() {
            let want = degree.get(c).copied().unwrap_or(0);
            let parts = multisets(vars, want);
            out = out
                .iter()
                .flat_map(|m| parts.iter().map(move |q| m.mul(q)))
                .collect();
        }
        out
    }
}

fn multisets(vars: &[u32], size: u32) -> Vec<Monomial> {
    fn rec(
        vars: &[u32],
        start: usize,
        left: u32,
        cur: &mut Vec<(u32, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if left == 0 {
            out.push(Monomial::from_pairs(cur.iter().copied()));
            return;
        }
        for k in start..vars.len() {
            cur.push((vars[k], 1));
            rec(vars, k, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, 0, size, &mut Vec::new(), &mut out);
    out
}

/// Kernel of `x_v ↦ images[v]` (images over `target_vars` variables) by
/// eliminating the target from the graph ideal. The result lives in the
/// source ring. `weights` gives a positive degree to each source variable
/// making the graph ideal homogeneous when the images are.
pub fn kernel_of_map(images: &[Poly], target_vars: usize, weights: &[i64]) -> Ideal {
    kernel_of_map_weighted(images, &vec![1; target_vars], weights)
}

/// Same, with explicit positive degrees on the target variables.
pub fn kernel_of_map_weighted(images: &[Poly], target_weights: &[i64], weights: &[i64]) -> Ideal {
    let target_vars = target_weights.len();
    let src = images.len();
    let total = target_vars + src;
    // Target variables first, then the source shifted past them.
    let graph: Vec<Poly> = images
        .iter()
        .enumerate()
        .map(|(v, img)| {
            let mut p = Poly::var((target_vars + v) as u32);
            p.add_assign_scaled(img, &-Rational::one());
            p
        })
        .collect();
    let mut elim = vec![0i64; total];
    elim[..target_vars].iter_mut().for_each(|x| *x = 1);
    let mut deg = target_weights.to_vec();
    deg.extend_from_slice(weights);
    let ord = MonomialOrder::weight(&elim).then(&MonomialOrder::weighted_degrevlex(&deg));
    let gb = buchberger(&graph, &ord);
    Ideal::new(
        gb.basis
            .iter()
            .filter(|p| {
                p.monomials()
                    .all(|m| m.support().all(|v| v as usize >= target_vars))
            })
            .map(|p| p.map_vars(|v| v - target_vars as u32)),
    )
}

/// Kernel of a linear map restricted to the monomials of one multidegree,
/// by exact linear algebra.
pub fn kernel_in_degree(images: &[Poly], grading: &Grading, degree: &[u32]) -> Vec<Poly> {
    let sources = grading.monomials(degree);
    let values: Vec<Poly> = sources.iter().map(|m| monomial_image(m, images)).collect();
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut ech = crate::exactalg::Echelon::with_tracking();
    let mut out = Vec::new();
    for v in &values {
        let row = v
            .terms()
            .map(|(m, c)| {
                let n = index.len();
                (*index.entry(m.clone()).or_insert(n), c.clone())
            })
            .collect();
        if let Err(comb) = ech.insert_tracked(row) {
            out.push(Poly::from_terms(
                comb.into_iter().map(|(k, c)| (sources[k].clone(), c)),
            ));
        }
    }
    out
}

pub fn monomial_image(m: &Monomial, images: &[Poly]) -> Poly {
    let mut acc = Poly::constant(Rational::one());
    for &(v, e) in m.pairs() {
        acc = &acc * &images[v as usize].pow(e);
    }
    acc
}

/// Outcome of a certified initial-ideal equality.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Certificate {
    pub gb_size: usize,
    pub candidate_gb_size: usize,
    pub degrees_checked: Vec<Vec<u32>>,
    pub dims: Vec<usize>,
}

/// Certifies `in_weak(I) = C`: a Gröbner basis of `I` under `weak` refined
/// by `tiebreak`, membership of every weak initial form in `C`, and equal
/// graded dimensions on every listed multidegree.
pub fn initial_ideal(
    ideal: &Ideal,
    weak: &MonomialOrder,
    tiebreak: &MonomialOrder,
    candidate: &Ideal,
    grading: &Grading,
    degrees: &[Vec<u32>],
) -> Result<(GroebnerBasis, Certificate), GrobnerError> {
    let refined = weak.then(tiebreak);
    let gb = buchberger(&ideal.gens, &refined);
    let cgb = buchberger(&candidate.gens, &refined);
    for g in &gb.basis {
        let init = initial_form(g, weak).expect("nonzero");
        if !cgb.contains(&init) {
            return Err(GrobnerError::NotContained(format!("{init:?}")));
        }
    }
    let mut dims = Vec::new();
    for d in degrees {
        let a = gb.graded_dim(grading, d);
        let b = cgb.graded_dim(grading, d);
        if a != b {
            return Err(GrobnerError::DimensionMismatch {
                degree: d.clone(),
                ideal: a,
                candidate: b,
            });
        }
        dims.push(a);
    }
    let cert = Certificate {
        gb_size: gb.basis.len(),
        candidate_gb_size: cgb.basis.len(),
        degrees_checked: degrees.to_vec(),
        dims,
    };
    Ok((gb, cert))
}

/// Leading monomials of the span of all generator products of one
/// multidegree against an expected set.
pub fn sagbi_component_check(
    generators: &[Poly],
    grading: &Grading,
    degree: &[u32],
    ord: &MonomialOrder,
    expected: &BTreeSet<Monomial>,
) -> Result<usize, GrobnerError> {
    let products: Vec<Poly> = grading
        .monomials(degree)
        .iter()
        .map(|m| monomial_image(m, generators))
        .collect();
    let leads: BTreeSet<Monomial> = initial_span(&products, ord).into_iter().collect();
    if let Some(w) = leads.difference(expected).next() {
        return Err(GrobnerError::Sagbi {
            degree: degree.to_vec(),
            witness: format!("{w:?}"),
            kind: "unexpected",
        });
    }
    if let Some(w) = expected.difference(&leads).next() {
        return Err(GrobnerError::Sagbi {
            degree: degree.to_vec(),
            witness: format!("{w:?}"),
            kind: "missing",
        });
    }
    Ok(leads.len())
}

/// Compares leading terms of two polynomials under a total order.
pub fn compare_leads(a: &Poly, b: &Poly, ord: &MonomialOrder) -> Ordering {
    let la = crate::exactalg::leading_monomial(a, ord);
    let lb = crate::exactalg::leading_monomial(b, ord);
    match (la, lb) {
        (Some(x), Some(y)) => ord.compare(&x, &y),
        (x, y) => x.is_some().cmp(&y.is_some()),
    }
}
