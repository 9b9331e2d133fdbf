//! Exact arithmetic: rationals, sparse polynomials over interned variables,
//! monomial orders given by integer weight matrices, and sparse Gaussian
//! elimination.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("zero input")]
    ZeroInput,
    #[error("order has {order} variables but the ring has {ring}")]
    VariableCount { order: usize, ring: usize },
}

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p` or `p/q`.
pub fn rational_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Sparse exponent vector; entries sorted by variable id, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial(acc.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn from_dense(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| (v as u32, e))
                .collect(),
        )
    }

    pub fn to_dense(&self, nvars: usize) -> Vec<u32> {
        let mut out = vec![0; nvars];
        for &(v, e) in &self.0 {
            out[v as usize] = e;
        }
        out
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: u32) -> u32 {
        match self.0.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(pos) => self.0[pos].1,
            Err(_) => 0,
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn weighted_degree(&self, weights: &[i64]) -> i64 {
        self.0
            .iter()
            .map(|&(v, e)| weights[v as usize] * e as i64)
            .sum()
    }

    fn merge(&self, other: &Self, f: impl Fn(u32, u32) -> u32) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (v, e) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                (a[i - 1].0, f(a[i - 1].1, 0))
            } else if i == a.len() || b[j].0 < a[i].0 {
                j += 1;
                (b[j - 1].0, f(0, b[j - 1].1))
            } else {
                i += 1;
                j += 1;
                (a[i - 1].0, f(a[i - 1].1, b[j - 1].1))
            };
            if e > 0 {
                out.push((v, e));
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge(other, |x, y| x + y)
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    pub fn lcm(&self, other: &Self) -> Self {
        self.merge(other, |x, y| x.max(y))
    }

    pub fn divides(&self, other: &Self) -> bool {
        let mut j = 0;
        for &(v, e) in &self.0 {
            while j < other.0.len() && other.0[j].0 < v {
                j += 1;
            }
            if j == other.0.len() || other.0[j].0 != v || other.0[j].1 < e {
                return false;
            }
        }
        true
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Self) -> Option<Self> {
        if !self.divides(other) {
            return None;
        }
        Some(other.merge(self, |x, y| x - y))
    }

    pub fn coprime(&self, other: &Self) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn map_vars(&self, f: impl Fn(u32) -> u32) -> Self {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)))
    }
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn var(v: u32) -> Self {
        Poly::monomial(Monomial::var(v), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, x)| (n.mul(m), x * c)).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Poly, c: &Rational) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(Rational::one());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Ring homomorphism sending variable `v` to `images[v]`.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        let mut cache: HashMap<(u32, u32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for &(v, e) in m.pairs() {
                let power = cache
                    .entry((v, e))
                    .or_insert_with(|| images[v as usize].pow(e))
                    .clone();
                acc = &acc * &power;
            }
            out.add_assign_scaled(&acc, &Rational::one());
        }
        out
    }

    pub fn map_vars(&self, f: impl Fn(u32) -> u32 + Copy) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(f), c.clone())))
    }

    pub fn max_var(&self) -> Option<u32> {
        self.terms
            .keys()
            .filter_map(|m| m.pairs().last().map(|p| p.0))
            .max()
    }

    pub fn is_homogeneous(&self, weights: &[i64]) -> bool {
        let mut degs = self.terms.keys().map(|m| m.weighted_degree(weights));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rational_string(c))?;
            for &(v, e) in m.pairs() {
                if e == 1 {
                    write!(f, "*x{}", v)?;
                } else {
                    write!(f, "*x{}^{}", v, e)?;
                }
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Rational::one());
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &rhs.terms {
            for (n, d) in &self.terms {
                out.add_term(n.mul(m), c * d);
            }
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

/// Structured variable names carried by a ring's registry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VarName {
    /// Coordinate variable attached to a poset element `(i, j)`.
    Z(i32, i32),
    /// Variable attached to an order ideal, labelled by its bitmask.
    Ideal(u64),
    /// Plücker-type variable indexed by a tuple.
    Tuple(Vec<i32>),
    /// Variable indexed by an exponent vector (PBW signature).
    Signature(Vec<i64>),
    /// The homogenizing variable.
    T,
    Named(String),
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarName::Z(i, j) => write!(f, "z[{},{}]", i, j),
            VarName::Ideal(m) => write!(f, "X[J{:#x}]", m),
            VarName::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "X[{}]", parts.join(","))
            }
            VarName::Signature(s) => {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                write!(f, "X[{}]", parts.join(","))
            }
            VarName::T => write!(f, "t"),
            VarName::Named(s) => write!(f, "{}", s),
        }
    }
}

/// Registry mapping interned variable ids to structured names.
#[derive(Clone, Debug, Default)]
pub struct Ring {
    names: Vec<VarName>,
    lookup: HashMap<VarName, u32>,
}

impl Ring {
    pub fn new(names: impl IntoIterator<Item = VarName>) -> Self {
        let mut ring = Ring::default();
        for n in names {
            ring.push(n);
        }
        ring
    }

    pub fn push(&mut self, name: VarName) -> u32 {
        if let Some(&v) = self.lookup.get(&name) {
            return v;
        }
        let v = self.names.len() as u32;
        self.lookup.insert(name.clone(), v);
        self.names.push(name);
        v
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: u32) -> &VarName {
        &self.names[v as usize]
    }

    pub fn names(&self) -> &[VarName] {
        &self.names
    }

    pub fn id(&self, name: &VarName) -> Option<u32> {
        self.lookup.get(name).copied()
    }

    pub fn var(&self, name: &VarName) -> Poly {
        Poly::var(self.id(name).expect("unknown variable"))
    }

    /// JSON form of a polynomial: list of `{"coeff": "p/q", "monomial": {name: exp}}`.
    pub fn poly_json(&self, p: &Poly) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = p
            .terms()
            .map(|(m, c)| {
                let mono: serde_json::Map<String, serde_json::Value> = m
                    .pairs()
                    .iter()
                    .map(|&(v, e)| (self.name(v).to_string(), serde_json::Value::from(e)))
                    .collect();
                serde_json::json!({"coeff": rational_string(c), "monomial": mono})
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    pub fn display(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = p
            .terms()
            .map(|(m, c)| {
                let mut s = rational_string(c);
                for &(v, e) in m.pairs() {
                    s.push('*');
                    s.push_str(&self.name(v).to_string());
                    if e > 1 {
                        s.push_str(&format!("^{}", e));
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrderKind {
    Total,
    Weak,
}

/// Monomial order given by an integer matrix: monomials are compared by the
/// lexicographic order of `rows · exponent`. Equal keys mean TIED; the order
/// is total exactly when the rows have full column rank.
#[derive(Clone, Debug)]
pub struct MonomialOrder {
    nvars: usize,
    rows: Vec<Vec<i64>>,
    kind: OrderKind,
}

impl MonomialOrder {
    pub fn from_rows(nvars: usize, rows: Vec<Vec<i64>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == nvars), "row length mismatch");
        let rank = rank(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        let kind = if rank == nvars {
            OrderKind::Total
        } else {
            OrderKind::Weak
        };
        MonomialOrder { nvars, rows, kind }
    }

    fn unit(nvars: usize, v: usize, sign: i64) -> Vec<i64> {
        let mut r = vec![0; nvars];
        r[v] = sign;
        r
    }

    /// Lex with `priority[0]` the largest variable.
    pub fn lex_by(nvars: usize, priority: &[u32]) -> Self {
        let rows = priority
            .iter()
            .map(|&v| Self::unit(nvars, v as usize, 1))
            .collect();
        Self::from_rows(nvars, rows)
    }

    /// Lex with variable 0 largest.
    pub fn lex(nvars: usize) -> Self {
        let pr: Vec<u32> = (0..nvars as u32).collect();
        Self::lex_by(nvars, &pr)
    }

    /// Degree-reverse-lex with a positive degree weight per variable; the
    /// last variable is the smallest.
    pub fn weighted_degrevlex(weights: &[i64]) -> Self {
        let nvars = weights.len();
        let mut rows = vec![weights.to_vec()];
        for v in (0..nvars).rev() {
            rows.push(Self::unit(nvars, v, -1));
        }
        Self::from_rows(nvars, rows)
    }

    pub fn degrevlex(nvars: usize) -> Self {
        Self::weighted_degrevlex(&vec![1; nvars])
    }

    /// Weak order grading by a weight vector.
    pub fn weight(weights: &[i64]) -> Self {
        Self::from_rows(weights.len(), vec![weights.to_vec()])
    }

    /// Compare by `self`, break ties with `tiebreak`.
    pub fn then(&self, tiebreak: &MonomialOrder) -> Self {
        assert_eq!(self.nvars, tiebreak.nvars);
        let mut rows = self.rows.clone();
        rows.extend(tiebreak.rows.iter().cloned());
        Self::from_rows(self.nvars, rows)
    }

    /// Order on a source ring pulled back along the monomial map
    /// `x_v ↦ images[v]` into the ring of `self`.
    pub fn pullback(&self, images: &[Monomial]) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| images.iter().map(|m| dot(row, m)).collect())
            .collect();
        Self::from_rows(images.len(), rows)
    }

    pub fn reversed(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| -x).collect())
            .collect();
        MonomialOrder {
            nvars: self.nvars,
            rows,
            kind: self.kind,
        }
    }

    /// Same order on a larger ring; new variables do not affect comparisons.
    pub fn extend_vars(&self, nvars: usize) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.resize(nvars, 0);
                r
            })
            .collect();
        MonomialOrder {
            nvars,
            rows,
            kind: OrderKind::Weak,
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn is_total(&self) -> bool {
        self.kind == OrderKind::Total
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn key(&self, m: &Monomial) -> Vec<i64> {
        self.rows.iter().map(|r| dot(r, m)).collect()
    }

    /// `Equal` means TIED for weak orders.
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        for r in &self.rows {
            match dot(r, a).cmp(&dot(r, b)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    pub fn check_ring(&self, ring: &Ring) -> Result<(), AlgebraError> {
        if self.nvars == ring.nvars() {
            Ok(())
        } else {
            Err(AlgebraError::VariableCount {
                order: self.nvars,
                ring: ring.nvars(),
            })
        }
    }
}

fn dot(row: &[i64], m: &Monomial) -> i64 {
    m.pairs()
        .iter()
        .map(|&(v, e)| row[v as usize] * e as i64)
        .sum()
}

/// Sum of the terms of `p` whose monomials are maximal under `ord`.
pub fn initial_form(p: &Poly, ord: &MonomialOrder) -> Result<Poly, AlgebraError> {
    let mut best: Option<Vec<i64>> = None;
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let k = ord.key(m);
        match best.as_ref().map(|b| k.cmp(b)) {
            None | Some(Ordering::Greater) => {
                best = Some(k);
                out = Poly::monomial(m.clone(), c.clone());
            }
            Some(Ordering::Equal) => out.add_term(m.clone(), c.clone()),
            Some(Ordering::Less) => {}
        }
    }
    if best.is_none() {
        return Err(AlgebraError::ZeroInput);
    }
    Ok(out)
}

/// Leading monomial under a total order.
pub fn leading_monomial(p: &Poly, ord: &MonomialOrder) -> Option<Monomial> {
    p.monomials().max_by(|a, b| ord.compare(a, b)).cloned()
}

/// Columns of a family of polynomials sorted from the largest monomial down;
/// tied monomials of a weak order end up adjacent.
fn monomial_columns<'a>(
    polys: impl Iterator<Item = &'a Poly>,
    ord: &MonomialOrder,
) -> (Vec<Monomial>, HashMap<Monomial, usize>) {
    let distinct: std::collections::BTreeSet<&Monomial> =
        polys.flat_map(|p| p.monomials()).collect();
    let mut cols: Vec<(Vec<i64>, &Monomial)> =
        distinct.into_iter().map(|m| (ord.key(m), m)).collect();
    cols.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    let mons: Vec<Monomial> = cols.into_iter().map(|(_, m)| m.clone()).collect();
    let index = mons
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    (mons, index)
}

fn poly_row(p: &Poly, index: &HashMap<Monomial, usize>) -> SparseRow {
    p.terms().map(|(m, c)| (index[m], c.clone())).collect()
}

/// Leading monomials of an echelonized basis of the span of `vectors`.
pub fn initial_span(vectors: &[Poly], ord: &MonomialOrder) -> Vec<Monomial> {
    assert!(ord.is_total(), "initial_span needs a total order");
    let (mons, index) = monomial_columns(vectors.iter(), ord);
    let mut ech = Echelon::new();
    for p in vectors {
        ech.insert(poly_row(p, &index));
    }
    ech.pivot_columns().map(|c| mons[c].clone()).collect()
}

/// Initial forms (under a possibly weak order) spanning `in_ord(span(vectors))`.
pub fn initial_span_weak(vectors: &[Poly], ord: &MonomialOrder) -> Vec<Poly> {
    let (mons, index) = monomial_columns(vectors.iter(), ord);
    let mut ech = Echelon::new();
    for p in vectors {
        ech.insert(poly_row(p, &index));
    }
    ech.fully_reduce();
    ech.rows()
        .map(|(_, row)| {
            let p = Poly::from_terms(row.iter().map(|(&c, x)| (mons[c].clone(), x.clone())));
            initial_form(&p, ord).expect("nonzero row")
        })
        .collect()
}

/// Dimension of the span of a family of polynomials.
pub fn poly_rank(vectors: &[Poly]) -> usize {
    let mut index: HashMap<Monomial, usize> = HashMap::new();
    let mut ech = Echelon::new();
    for p in vectors {
        let row: SparseRow = p
            .terms()
            .map(|(m, c)| {
                let n = index.len();
                (*index.entry(m.clone()).or_insert(n), c.clone())
            })
            .collect();
        ech.insert(row);
    }
    ech.rank()
}

pub type SparseRow = BTreeMap<usize, Rational>;

fn axpy(row: &mut SparseRow, c: &Rational, other: &SparseRow) {
    for (&k, x) in other {
        let entry = row.entry(k).or_insert_with(Rational::zero);
        *entry -= c * x;
        if entry.is_zero() {
            row.remove(&k);
        }
    }
}

/// Incremental row echelon form over sparse rows. The pivot of a row is its
/// smallest column index; optionally tracks each row as a combination of the
/// inserted inputs.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, (SparseRow, SparseRow)>,
    tracking: bool,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn with_tracking() -> Self {
        Echelon {
            tracking: true,
            ..Echelon::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce_tracked(&self, mut row: SparseRow, mut comb: SparseRow) -> (SparseRow, SparseRow) {
        let mut cursor = 0usize;
        loop {
            let next = row
                .range(cursor..)
                .find(|(c, _)| self.pivots.contains_key(c));
            let Some((&col, x)) = next else { break };
            let x = x.clone();
            let (prow, pcomb) = &self.pivots[&col];
            axpy(&mut row, &x, prow);
            if self.tracking {
                axpy(&mut comb, &x, pcomb);
            }
            cursor = col + 1;
        }
        (row, comb)
    }

    /// Remainder of `row` after reduction against the stored pivots.
    pub fn reduce(&self, row: SparseRow) -> SparseRow {
        self.reduce_tracked(row, SparseRow::new()).0
    }

    /// Inserts a row; returns its pivot column when it is independent.
    pub fn insert(&mut self, row: SparseRow) -> Option<usize> {
        self.insert_tracked(row).ok()
    }

    /// Like `insert`, but on dependence returns the combination of inputs
    /// (by insertion index) that vanishes.
    pub fn insert_tracked(&mut self, row: SparseRow) -> Result<usize, SparseRow> {
        let label = self.inserted;
        self.inserted += 1;
        let mut comb = SparseRow::new();
        if self.tracking {
            comb.insert(label, Rational::one());
        }
        let (mut row, mut comb) = self.reduce_tracked(row, comb);
        let Some((&col, lead)) = row.iter().next() else {
            return Err(comb);
        };
        let inv = lead.recip();
        for x in row.values_mut() {
            *x *= &inv;
        }
        for x in comb.values_mut() {
            *x *= &inv;
        }
        self.pivots.insert(col, (row, comb));
        Ok(col)
    }

    /// Coefficients over inserted inputs expressing `row`, if it lies in the span.
    pub fn express(&self, row: SparseRow) -> Option<SparseRow> {
        assert!(self.tracking, "express needs tracking");
        let (rem, comb) = self.reduce_tracked(row, SparseRow::new());
        if rem.is_empty() {
            Some(comb.into_iter().map(|(k, x)| (k, -x)).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_empty()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseRow)> {
        self.pivots.iter().map(|(&c, (r, _))| (c, r))
    }

    /// Clears every pivot column from all other rows.
    pub fn fully_reduce(&mut self) {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for &col in &cols {
            let (prow, pcomb) = self.pivots[&col].clone();
            for (&other, (row, comb)) in self.pivots.range_mut(..col) {
                debug_assert!(other < col);
                if let Some(x) = row.get(&col).cloned() {
                    axpy(row, &x, &prow);
                    if self.tracking {
                        axpy(comb, &x, &pcomb);
                    }
                }
            }
        }
    }
}

/// Rank of dense rational vectors.
pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let mut ech = Echelon::new();
    for v in vectors {
        let row: SparseRow = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        ech.insert(row);
    }
    ech.rank()
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn determinant(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    let mut a: Vec<Vec<Rational>> = matrix.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Unique solution of a square system, or `None` when singular.
pub fn solve(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().cloned().chain([b.clone()]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col].clone();
        for c in col..=n {
            a[col][c] /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

pub fn is_unit(q: &Rational) -> bool {
    q.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn lex_initial_form_picks_single_term() {
        let p = &(&x() * &x()) + &(&x() * &y());
        let inf = initial_form(&p, &MonomialOrder::lex(2)).unwrap();
        assert_eq!(inf, &x() * &x());
    }

    #[test]
    fn weak_order_keeps_tied_terms() {
        let p = &x() + &y();
        let ord = MonomialOrder::weight(&[1, 1]);
        assert_eq!(ord.kind(), OrderKind::Weak);
        assert_eq!(initial_form(&p, &ord).unwrap(), p);
    }

    #[test]
    fn zero_polynomial_has_no_initial_form() {
        assert_eq!(
            initial_form(&Poly::zero(), &MonomialOrder::lex(1)),
            Err(AlgebraError::ZeroInput)
        );
    }

    #[test]
    fn initial_span_exposes_hidden_monomial() {
        let span = initial_span(&[x(), &x() + &y()], &MonomialOrder::lex(2));
        let mut got: Vec<Monomial> = span;
        got.sort();
        assert_eq!(got, vec![Monomial::var(0), Monomial::var(1)]);
        assert_eq!(
            initial_span(&[x()], &MonomialOrder::lex(2)),
            vec![Monomial::var(0)]
        );
        assert!(initial_span(&[], &MonomialOrder::lex(2)).is_empty());
    }

    #[test]
    fn dense_rank() {
        assert_eq!(rank(&[vec![rat(1), rat(0)], vec![rat(0), rat(1)]]), 2);
        assert_eq!(rank(&[vec![rat(1), rat(2)], vec![rat(2), rat(4)]]), 1);
    }

    #[test]
    fn degrevlex_matches_textbook() {
        let ord = MonomialOrder::degrevlex(3);
        // x*z^2 vs y^3: same degree, last variable exponent decides.
        let a = Monomial::from_dense(&[1, 0, 2]);
        let b = Monomial::from_dense(&[0, 3, 0]);
        assert_eq!(ord.compare(&a, &b), Ordering::Less);
        let c = Monomial::from_dense(&[2, 0, 0]);
        let d = Monomial::from_dense(&[0, 1, 1]);
        assert_eq!(ord.compare(&c, &d), Ordering::Greater);
        assert!(ord.is_total());
    }

    #[test]
    fn pullback_compares_images() {
        let target = MonomialOrder::lex(2);
        let images = vec![Monomial::var(1), Monomial::from_dense(&[1, 0])];
        let pulled = target.pullback(&images);
        assert_eq!(
            pulled.compare(&Monomial::var(0), &Monomial::var(1)),
            Ordering::Less
        );
    }

    #[test]
    fn echelon_tracks_kernel_and_expressions() {
        let mut e = Echelon::with_tracking();
        let r = |v: &[(usize, i64)]| v.iter().map(|&(c, x)| (c, rat(x))).collect::<SparseRow>();
        assert!(e.insert_tracked(r(&[(0, 1), (1, 1)])).is_ok());
        assert!(e.insert_tracked(r(&[(1, 2)])).is_ok());
        let kernel = e.insert_tracked(r(&[(0, 2), (1, 4)])).unwrap_err();
        // 2*v0 + 1*v1 - v2 = 0
        assert_eq!(kernel[&0], rat(-2));
        assert_eq!(kernel[&1], rat(-1));
        assert_eq!(kernel[&2], rat(1));
        let ex = e.express(r(&[(0, 3), (1, 5)])).unwrap();
        assert_eq!(ex[&0], rat(3));
        assert_eq!(ex[&1], rat(1));
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![rat(2), rat(1)], vec![rat(1), rat(1)]];
        assert_eq!(determinant(&m), rat(1));
        let s = vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]];
        assert_eq!(determinant(&s), rat(-1));
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let p = &(&x() * &y()) - &x();
        let images = vec![&y() + &Poly::constant(rat(1)), y()];
        let q = p.substitute(&images);
        let expect = &(&(&y() * &y()) + &y()) - &(&y() + &Poly::constant(rat(1)));
        assert_eq!(q, expect);
    }
}
