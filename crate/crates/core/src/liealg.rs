//! Representations of `sp_{2n}` and `so_{2n+1}` through explicit matrices:
//! exterior powers, the spin module, tensor products, PBW monomials, Weyl
//! oracles, essential signatures, and the distinguished words `C_{J,D}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactalg::{rat, Echelon, Rational, SparseRow};
use crate::pipedream::Twist;
use crate::poset::{OrderIdeal, PosetElement, PosetP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("bracket of {0} and {1} leaves the span of lowering operators")]
    NotClosed(PosetElement, PosetElement),
    #[error("module {module}: bracket check failed for {a} and {b}")]
    BracketMismatch {
        module: String,
        a: PosetElement,
        b: PosetElement,
    },
    #[error("module {0}: an operator does not shift weights by its root")]
    WeightMismatch(String),
    #[error("illegal set D for the ideal")]
    IllegalD,
    #[error("the word C_(J,D) annihilates the highest vector")]
    ZeroMultivector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum LieType {
    C,
    B,
}

/// Basis labels of the defining representation, in basis order.
pub fn vector_labels(ty: LieType, n: usize) -> Vec<i32> {
    let n = n as i32;
    let mut out: Vec<i32> = (1..=n).collect();
    if ty == LieType::B {
        out.push(0);
    }
    out.extend((1..=n).rev().map(|i| -i));
    out
}

/// Weight of `e_j` in doubled ε-coordinates.
fn label_weight(n: usize, j: i32) -> Vec<i64> {
    let mut w = vec![0; n];
    if j != 0 {
        w[j.unsigned_abs() as usize - 1] = if j > 0 { 2 } else { -2 };
    }
    w
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    pub entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseMatrix {
    pub fn unit(row: usize, col: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((row, col), Rational::one());
        SparseMatrix { entries }
    }

    pub fn add_scaled(&mut self, other: &SparseMatrix, c: &Rational) {
        for (k, v) in &other.entries {
            let e = self.entries.entry(*k).or_insert_with(Rational::zero);
            *e += v * c;
            if e.is_zero() {
                self.entries.remove(k);
            }
        }
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut by_row: HashMap<usize, Vec<(usize, &Rational)>> = HashMap::new();
        for ((r, c), v) in &other.entries {
            by_row.entry(*r).or_default().push((*c, v));
        }
        let mut out = SparseMatrix::default();
        for ((r, k), a) in &self.entries {
            if let Some(row) = by_row.get(k) {
                for (c, b) in row {
                    let e = out.entries.entry((*r, *c)).or_insert_with(Rational::zero);
                    *e += a * *b;
                }
            }
        }
        out.entries.retain(|_, v| !v.is_zero());
        out
    }

    pub fn commutator(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut out = self.mul(other);
        out.add_scaled(&other.mul(self), &rat(-1));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn flatten(&self, dim: usize) -> SparseRow {
        self.entries
            .iter()
            .map(|((r, c), v)| (r * dim + c, v.clone()))
            .collect()
    }
}

/// Lowering operators `f_{i,j}`, `(i,j) ∈ P∖A`, as matrices on the defining
/// representation, with their structure constants.
#[derive(Clone, Debug)]
pub struct Realization {
    pub ty: LieType,
    pub n: usize,
    pub labels: Vec<i32>,
    pub ops: Vec<PosetElement>,
    pub matrices: Vec<SparseMatrix>,
    /// `[f_a, f_b] = Σ c·f_c`.
    pub brackets: Vec<Vec<Vec<(usize, Rational)>>>,
    roots: Vec<Vec<i64>>,
}

impl Realization {
    pub fn new(ty: LieType, n: usize) -> Result<Self, LieError> {
        let labels = vector_labels(ty, n);
        let pos: HashMap<i32, usize> = labels.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let e = |a: i32, b: i32| SparseMatrix::unit(pos[&a], pos[&b]);
        let p = PosetP::build(n).expect("rank in range");
        let ops: Vec<PosetElement> = p
            .elements()
            .iter()
            .copied()
            .filter(|x| !x.is_diagonal())
            .collect();
        let matrices: Vec<SparseMatrix> = ops
            .iter()
            .map(|x| {
                let (i, j) = (x.i, x.j);
                let mut m = SparseMatrix::default();
                match ty {
                    LieType::C => {
                        m.add_scaled(&e(j, i), &rat(1));
                        m.add_scaled(&e(-i, -j), &rat(if j > 0 { -1 } else { 1 }));
                    }
                    LieType::B if j == -i => {
                        m.add_scaled(&e(0, i), &rat(1));
                        m.add_scaled(&e(-i, 0), &rat(-2));
                    }
                    LieType::B => {
                        m.add_scaled(&e(j, i), &rat(1));
                        m.add_scaled(&e(-i, -j), &rat(-1));
                    }
                }
                m
            })
            .collect();
        let roots = ops.iter().map(|x| root_of(ty, n, *x)).collect();
        let dim = labels.len();
        let mut span = Echelon::with_tracking();
        for m in &matrices {
            span.insert(m.flatten(dim))
                .expect("lowering operators are independent");
        }
        let mut brackets = vec![vec![Vec::new(); ops.len()]; ops.len()];
        for a in 0..ops.len() {
            for b in 0..ops.len() {
                let c = matrices[a].commutator(&matrices[b]);
                if c.is_zero() {
                    continue;
                }
                let coeffs = span
                    .express(c.flatten(dim))
                    .ok_or(LieError::NotClosed(ops[a], ops[b]))?;
                brackets[a][b] = coeffs.into_iter().collect();
            }
        }
        Ok(Realization {
            ty,
            n,
            labels,
            ops,
            matrices,
            brackets,
            roots,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn position(&self, label: i32) -> usize {
        self.labels
            .iter()
            .position(|&j| j == label)
            .expect("label in range")
    }

    pub fn op_index(&self, i: i32, j: i32) -> Option<usize> {
        self.ops.iter().position(|x| x.i == i && x.j == j)
    }

    /// Positive root of `f_{i,j}` in doubled ε-coordinates.
    pub fn root(&self, op: usize) -> &[i64] {
        &self.roots[op]
    }

    pub fn gl_unit(&self, a: i32, b: i32) -> SparseMatrix {
        SparseMatrix::unit(self.position(a), self.position(b))
    }
}

fn root_of(ty: LieType, n: usize, x: PosetElement) -> Vec<i64> {
    let mut w = vec![0; n];
    let i = x.i as usize - 1;
    if x.j == -x.i {
        w[i] = if ty == LieType::C { 4 } else { 2 };
    } else {
        w[i] += 2;
        let k = x.j.unsigned_abs() as usize - 1;
        w[k] += if x.j > 0 { -2 } else { 2 };
    }
    w
}

/// Structure constants used for the spin module, as reported in witnesses.
pub const SPIN_NORMALIZATION: &str = "clifford: x acts as half the sum of x[b][a] g(b) g(-a), with g(j) removing e_j for j > 0, g(-j) adding e_j, g(0) the parity operator and g(-0) replaced by half the parity";

/// A finite-dimensional module: action of every lowering operator as
/// columns of `(row, coefficient)` lists.
#[derive(Clone, Debug)]
pub struct Module {
    pub name: String,
    pub labels: Vec<String>,
    pub weights: Vec<Vec<i64>>,
    pub actions: Vec<Vec<Vec<(usize, Rational)>>>,
    pub highest: usize,
}

fn columns_of(m: &SparseMatrix, dim: usize) -> Vec<Vec<(usize, Rational)>> {
    let mut cols = vec![Vec::new(); dim];
    for ((r, c), v) in &m.entries {
        cols[*c].push((*r, v.clone()));
    }
    cols
}

/// Action of a matrix on `∧^k` of the defining representation; basis are
/// sorted index subsets.
fn wedge_action(
    m: &SparseMatrix,
    basis: &[Vec<usize>],
    index: &HashMap<Vec<usize>, usize>,
) -> SparseMatrix {
    let mut cols: HashMap<usize, Vec<(usize, &Rational)>> = HashMap::new();
    for ((r, c), v) in &m.entries {
        cols.entry(*c).or_default().push((*r, v));
    }
    let mut out = SparseMatrix::default();
    for (b, subset) in basis.iter().enumerate() {
        for (t, s) in subset.iter().enumerate() {
            let Some(col) = cols.get(s) else { continue };
            for (r, v) in col {
                if subset.iter().enumerate().any(|(u, x)| u != t && x == r) {
                    continue;
                }
                let mut img = subset.clone();
                img[t] = *r;
                let sign = sort_with_sign(&mut img);
                let e = out
                    .entries
                    .entry((index[&img], b))
                    .or_insert_with(Rational::zero);
                *e += *v * rat(sign);
            }
        }
    }
    out.entries.retain(|_, v| !v.is_zero());
    out
}

fn sort_with_sign(v: &mut [usize]) -> i64 {
    let mut sign = 1;
    for a in 0..v.len() {
        for b in 0..v.len() - 1 - a {
            if v[b] > v[b + 1] {
                v.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    sign
}

fn k_subsets(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, dim: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..dim {
            cur.push(s);
            rec(s + 1, dim, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, dim, k, &mut Vec::new(), &mut out);
    out
}

impl Module {
    /// `∧^k V`, highest vector `e_1 ∧ … ∧ e_k`.
    pub fn exterior_power(real: &Realization, k: usize) -> Module {
        let basis = k_subsets(real.dim(), k);
        let index: HashMap<Vec<usize>, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(a, b)| (b, a))
            .collect();
        let labels = basis
            .iter()
            .map(|s| {
                format!(
                    "e({})",
                    s.iter()
                        .map(|&x| real.labels[x].to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        let weights = basis
            .iter()
            .map(|s| {
                s.iter().fold(vec![0; real.n], |acc, &x| {
                    acc.iter()
                        .zip(label_weight(real.n, real.labels[x]))
                        .map(|(a, b)| a + b)
                        .collect()
                })
            })
            .collect();
        let actions = real
            .matrices
            .iter()
            .map(|m| columns_of(&wedge_action(m, &basis, &index), basis.len()))
            .collect();
        Module {
            name: format!("wedge{k}"),
            labels,
            weights,
            actions,
            highest: index[&(0..k).collect::<Vec<_>>()],
        }
    }

    /// Spin module of `so_{2n+1}` on `∧ℂ^n` via Clifford generators
    /// (see [`SPIN_NORMALIZATION`]);
    /// basis `v_D` with `D` a bitmask.
    pub fn spin(real: &Realization) -> Module {
        assert_eq!(real.ty, LieType::B);
        let n = real.n;
        let dim = 1usize << n;
        let below = |s: usize, i: usize| (s & ((1 << i) - 1)).count_ones() as i64;
        let creation = |i: usize| {
            let mut m = SparseMatrix::default();
            for s in 0..dim {
                if s >> i & 1 == 0 {
                    m.entries.insert(
                        (s | 1 << i, s),
                        rat(if below(s, i) % 2 == 0 { 1 } else { -1 }),
                    );
                }
            }
            m
        };
        let annihilation = |i: usize| {
            let mut m = SparseMatrix::default();
            for s in 0..dim {
                if s >> i & 1 == 1 {
                    m.entries.insert(
                        (s & !(1 << i), s),
                        rat(if below(s, i) % 2 == 0 { 1 } else { -1 }),
                    );
                }
            }
            m
        };
        let parity = {
            let mut m = SparseMatrix::default();
            for s in 0..dim {
                m.entries
                    .insert((s, s), rat(if s.count_ones() % 2 == 0 { 1 } else { -1 }));
            }
            m
        };
        let gamma = |label: i32| -> SparseMatrix {
            match label {
                0 => parity.clone(),
                j if j > 0 => annihilation(j as usize - 1),
                j => creation(j.unsigned_abs() as usize - 1),
            }
        };
        // Dual basis for the form with B(e_a, e_{-a}) = 1 and B(e_0, e_0) = 2.
        let dual = |label: i32| -> SparseMatrix {
            let mut g = gamma(-label);
            if label == 0 {
                g = SparseMatrix::default();
                g.add_scaled(&parity, &Rational::new(1.into(), 2.into()));
            }
            g
        };
        let half = Rational::new(1.into(), 2.into());
        let actions = real
            .matrices
            .iter()
            .map(|x| {
                let mut rho = SparseMatrix::default();
                for ((b, a), v) in &x.entries {
                    let term = gamma(real.labels[*b]).mul(&dual(real.labels[*a]));
                    rho.add_scaled(&term, &(v * &half));
                }
                columns_of(&rho, dim)
            })
            .collect();
        let weights = (0..dim)
            .map(|s| {
                (0..n)
                    .map(|i| if s >> i & 1 == 1 { -1 } else { 1 })
                    .collect()
            })
            .collect();
        let labels = (0..dim)
            .map(|s| {
                format!(
                    "v{{{}}}",
                    (0..n)
                        .filter(|i| s >> i & 1 == 1)
                        .map(|i| (i + 1).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        Module {
            name: "spin".into(),
            labels,
            weights,
            actions,
            highest: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn action_matrix(&self, op: usize) -> SparseMatrix {
        let mut m = SparseMatrix::default();
        for (c, col) in self.actions[op].iter().enumerate() {
            for (r, v) in col {
                m.entries.insert((*r, c), v.clone());
            }
        }
        m
    }

    /// Commutators of action matrices against the realization's structure
    /// constants, and weight compatibility of every operator.
    pub fn check(&self, real: &Realization) -> Result<(), LieError> {
        for (op, cols) in self.actions.iter().enumerate() {
            for (c, col) in cols.iter().enumerate() {
                for (r, _) in col {
                    let expect: Vec<i64> = self.weights[c]
                        .iter()
                        .zip(real.root(op))
                        .map(|(a, b)| a - b)
                        .collect();
                    if self.weights[*r] != expect {
                        return Err(LieError::WeightMismatch(self.name.clone()));
                    }
                }
            }
        }
        let mats: Vec<SparseMatrix> = (0..self.actions.len())
            .map(|op| self.action_matrix(op))
            .collect();
        for a in 0..mats.len() {
            for b in a + 1..mats.len() {
                let mut lhs = mats[a].commutator(&mats[b]);
                for (c, v) in &real.brackets[a][b] {
                    lhs.add_scaled(&mats[*c], &-v.clone());
                }
                if !lhs.is_zero() {
                    return Err(LieError::BracketMismatch {
                        module: self.name.clone(),
                        a: real.ops[a],
                        b: real.ops[b],
                    });
                }
            }
        }
        Ok(())
    }

    /// Dimension of the span of all lowering words applied to the highest
    /// vector.
    pub fn generated_dimension(&self) -> usize {
        let mut ech = Echelon::new();
        let mut queue: Vec<SparseRow> =
            vec![[(self.highest, Rational::one())].into_iter().collect()];
        ech.insert(queue[0].clone());
        while let Some(v) = queue.pop() {
            for op in 0..self.actions.len() {
                let w = apply_sparse(&self.actions[op], &v);
                if !w.is_empty() && ech.insert(w.clone()).is_some() {
                    queue.push(w);
                }
            }
        }
        ech.rank()
    }
}

fn apply_sparse(cols: &[Vec<(usize, Rational)>], v: &SparseRow) -> SparseRow {
    let mut out = SparseRow::new();
    for (c, x) in v {
        for (r, a) in &cols[*c] {
            *out.entry(*r).or_insert_with(Rational::zero) += a * x;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Vector in a tensor product, keyed by mixed-radix basis index.
pub type TensorVector = BTreeMap<u64, Rational>;

/// Tensor product of modules; operators act through the coproduct.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub factors: Vec<Arc<Module>>,
    radix: Vec<u64>,
}

impl Tensor {
    pub fn new(factors: Vec<Arc<Module>>) -> Self {
        let mut radix = Vec::with_capacity(factors.len());
        let mut r = 1u64;
        for f in &factors {
            radix.push(r);
            r *= f.dim() as u64;
        }
        Tensor { factors, radix }
    }

    /// `⊗ V_{ω_k}^{⊗a_k}` inside exterior powers.
    pub fn for_weight_c(real: &Realization, a: &[u32]) -> Self {
        let mut factors = Vec::new();
        for (k, &count) in a.iter().enumerate() {
            if count > 0 {
                let m = Arc::new(Module::exterior_power(real, k + 1));
                factors.extend(std::iter::repeat_n(m, count as usize));
            }
        }
        Tensor::new(factors)
    }

    /// Exterior powers for `ω_k` (`k < n`) and `2ω_n`, one spin factor when
    /// `a_n` is odd.
    pub fn for_weight_b(real: &Realization, a: &[u32]) -> Self {
        let n = real.n;
        let mut factors = Vec::new();
        for (k, &count) in a[..n - 1].iter().enumerate() {
            if count > 0 {
                let m = Arc::new(Module::exterior_power(real, k + 1));
                factors.extend(std::iter::repeat_n(m, count as usize));
            }
        }
        let an = a[n - 1] as usize;
        if an >= 2 {
            let m = Arc::new(Module::exterior_power(real, n));
            factors.extend(std::iter::repeat_n(m, an / 2));
        }
        if an % 2 == 1 {
            factors.push(Arc::new(Module::spin(real)));
        }
        Tensor::new(factors)
    }

    pub fn highest(&self) -> TensorVector {
        let key = self
            .factors
            .iter()
            .zip(&self.radix)
            .map(|(f, r)| f.highest as u64 * r)
            .sum();
        [(key, Rational::one())].into_iter().collect()
    }

    pub fn digits(&self, key: u64) -> Vec<usize> {
        self.factors
            .iter()
            .zip(&self.radix)
            .map(|(f, r)| ((key / r) % f.dim() as u64) as usize)
            .collect()
    }

    pub fn apply(&self, op: usize, v: &TensorVector) -> TensorVector {
        let mut out = TensorVector::new();
        for (key, x) in v {
            for (s, (f, r)) in self.factors.iter().zip(&self.radix).enumerate() {
                let _ = s;
                let digit = (key / r) % f.dim() as u64;
                let base = key - digit * r;
                for (row, a) in &f.actions[op][digit as usize] {
                    *out.entry(base + *row as u64 * r)
                        .or_insert_with(Rational::zero) += a * x;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// `f^d v`, factors ordered as the operators, rightmost acting first.
    pub fn apply_pbw(&self, d: &[u32], v: &TensorVector) -> TensorVector {
        let mut cur = v.clone();
        for op in (0..d.len()).rev() {
            for _ in 0..d[op] {
                if cur.is_empty() {
                    return cur;
                }
                cur = self.apply(op, &cur);
            }
        }
        cur
    }
}

pub fn to_row(v: &TensorVector) -> SparseRow {
    v.iter().map(|(k, x)| (*k as usize, x.clone())).collect()
}

/// Highest weight in doubled ε-coordinates from `(a_1, …, a_n)`.
pub fn doubled_weight(ty: LieType, a: &[u32]) -> Vec<i64> {
    let n = a.len();
    (0..n)
        .map(|i| {
            let whole: i64 = a[i..n - 1].iter().map(|&x| x as i64).sum();
            let last = a[n - 1] as i64;
            match ty {
                LieType::C => 2 * (whole + last),
                LieType::B => 2 * whole + last,
            }
        })
        .collect()
}

/// Positive roots in doubled ε-coordinates.
pub fn positive_roots(ty: LieType, n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for s in [-2, 2] {
                let mut r = vec![0; n];
                r[i] = 2;
                r[j] = s;
                out.push(r);
            }
        }
        let mut r = vec![0; n];
        r[i] = if ty == LieType::C { 4 } else { 2 };
        out.push(r);
    }
    out
}

fn rho_doubled(ty: LieType, n: usize) -> Vec<i64> {
    (0..n as i64)
        .map(|i| match ty {
            LieType::C => 2 * (n as i64 - i),
            LieType::B => 2 * (n as i64 - i) - 1,
        })
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `∏ ⟨λ+ρ, α⟩ / ⟨ρ, α⟩` over positive roots.
pub fn weyl_dim(ty: LieType, lambda2: &[i64]) -> BigInt {
    let n = lambda2.len();
    let rho = rho_doubled(ty, n);
    let shifted: Vec<i64> = lambda2.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let mut q = Rational::one();
    for alpha in positive_roots(ty, n) {
        q *= Rational::new(dot(&shifted, &alpha).into(), dot(&rho, &alpha).into());
    }
    assert!(q.is_integer());
    q.to_integer()
}

fn signed_permutations(n: usize) -> Vec<(Vec<usize>, Vec<i64>, i64)> {
    fn perms(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for t in k..items.len() {
            items.swap(k, t);
            perms(items, k + 1, out);
            items.swap(k, t);
        }
    }
    let mut ps = Vec::new();
    perms(&mut (0..n).collect(), 0, &mut ps);
    let mut out = Vec::new();
    for p in ps {
        let mut sign = 1;
        for a in 0..n {
            for b in a + 1..n {
                if p[a] > p[b] {
                    sign = -sign;
                }
            }
        }
        for mask in 0..1u32 << n {
            let signs: Vec<i64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            let flips = mask.count_ones() as i64;
            out.push((p.clone(), signs, if flips % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}

/// Weight multiplicities (doubled ε-coordinates) from the alternating sum
/// over the Weyl group divided by `∏ (1 − e^{−α})`.
pub fn weyl_char(ty: LieType, lambda2: &[i64]) -> BTreeMap<Vec<i64>, i64> {
    let n = lambda2.len();
    let rho = rho_doubled(ty, n);
    let shifted: Vec<i64> = lambda2.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let mut poly: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for (perm, signs, sign) in signed_permutations(n) {
        let w: Vec<i64> = (0..n).map(|i| signs[i] * shifted[perm[i]]).collect();
        *poly.entry(w).or_insert(0) += sign;
    }
    poly.retain(|_, v| *v != 0);
    for alpha in positive_roots(ty, n) {
        poly = divide_by_root(&poly, &alpha);
    }
    poly.into_iter()
        .map(|(w, m)| (w.iter().zip(&rho).map(|(a, b)| a - b).collect(), m))
        .collect()
}

fn divide_by_root(p: &BTreeMap<Vec<i64>, i64>, alpha: &[i64]) -> BTreeMap<Vec<i64>, i64> {
    let n = alpha.len();
    let lo: Vec<i64> = (0..n)
        .map(|c| p.keys().map(|w| w[c]).min().unwrap())
        .collect();
    let hi: Vec<i64> = (0..n)
        .map(|c| p.keys().map(|w| w[c]).max().unwrap())
        .collect();
    let inside = |w: &[i64]| (0..n).all(|c| lo[c] <= w[c] && w[c] <= hi[c]);
    let mut candidates: BTreeSet<Vec<i64>> = BTreeSet::new();
    for w in p.keys() {
        let mut cur = w.clone();
        while inside(&cur) {
            candidates.insert(cur.clone());
            cur = cur.iter().zip(alpha).map(|(a, b)| a - b).collect();
        }
    }
    let mut q = BTreeMap::new();
    for mu in candidates {
        let mut total = 0;
        let mut cur = mu.clone();
        while inside(&cur) {
            total += p.get(&cur).copied().unwrap_or(0);
            cur = cur.iter().zip(alpha).map(|(a, b)| a + b).collect();
        }
        if total != 0 {
            q.insert(mu, total);
        }
    }
    let mut back: BTreeMap<Vec<i64>, i64> = q.clone();
    for (w, c) in &q {
        let shifted: Vec<i64> = w.iter().zip(alpha).map(|(a, b)| a - b).collect();
        *back.entry(shifted).or_insert(0) -= c;
    }
    back.retain(|_, v| *v != 0);
    assert_eq!(&back, p, "division by 1 - e^(-alpha) is not exact");
    q
}

/// Dominance pruning: every positive root has nonnegative prefix sums.
fn prefix_nonnegative(w: &[i64]) -> bool {
    let mut s = 0;
    w.iter().all(|x| {
        s += x;
        s >= 0
    })
}

/// All signatures `d` with `Σ d_a α_a = drop` and `f^d v ≠ 0`, with their
/// images; depth-first from the rightmost operator, sharing suffixes.
pub fn signatures_with_drop(
    real: &Realization,
    tensor: &Tensor,
    drop: &[i64],
) -> Vec<(Vec<u32>, TensorVector)> {
    fn rec(
        real: &Realization,
        tensor: &Tensor,
        t: usize,
        drop: Vec<i64>,
        v: TensorVector,
        d: &mut Vec<u32>,
        out: &mut Vec<(Vec<u32>, TensorVector)>,
    ) {
        if t == 0 {
            if drop.iter().all(|&x| x == 0) {
                out.push((d.clone(), v));
            }
            return;
        }
        let op = t - 1;
        let mut cur_drop = drop;
        let mut cur = v;
        let mut e = 0;
        loop {
            d[op] = e;
            rec(real, tensor, op, cur_drop.clone(), cur.clone(), d, out);
            cur_drop = cur_drop
                .iter()
                .zip(real.root(op))
                .map(|(a, b)| a - b)
                .collect();
            if !prefix_nonnegative(&cur_drop) {
                break;
            }
            cur = tensor.apply(op, &cur);
            if cur.is_empty() {
                break;
            }
            e += 1;
        }
        d[op] = 0;
    }
    let mut out = Vec::new();
    let mut d = vec![0; real.ops.len()];
    if prefix_nonnegative(drop) {
        rec(
            real,
            tensor,
            real.ops.len(),
            drop.to_vec(),
            tensor.highest(),
            &mut d,
            &mut out,
        );
    }
    out
}

/// Weight drop `Σ d_a α_a`.
pub fn drop_of(real: &Realization, d: &[u32]) -> Vec<i64> {
    let mut w = vec![0; real.n];
    for (op, &e) in d.iter().enumerate() {
        for (x, r) in w.iter_mut().zip(real.root(op)) {
            *x += e as i64 * r;
        }
    }
    w
}

/// Essential signatures: per weight space, signatures sorted ascending by
/// `key`, kept when they raise the rank.
pub fn essential_greedy<K: Ord>(
    real: &Realization,
    tensor: &Tensor,
    lambda2: &[i64],
    key: impl Fn(&[u32]) -> K,
) -> Result<BTreeSet<Vec<u32>>, String> {
    let mut out = BTreeSet::new();
    for (mu, mult) in weyl_char(real.ty, lambda2) {
        let drop: Vec<i64> = lambda2.iter().zip(&mu).map(|(a, b)| a - b).collect();
        let mut sigs = signatures_with_drop(real, tensor, &drop);
        sigs.sort_by_cached_key(|(d, _)| key(d));
        let mut ech = Echelon::new();
        for (d, v) in sigs {
            if ech.insert(to_row(&v)).is_some() {
                out.insert(d);
            }
        }
        if ech.rank() as i64 != mult {
            return Err(format!(
                "weight {mu:?}: rank {} but multiplicity {mult}",
                ech.rank()
            ));
        }
    }
    Ok(out)
}

/// One factor of `C_{J,D}`: `E_{a,b}` pairs, leftmost first.
pub type GlWord = Vec<(i32, i32)>;

/// `C_{J,D}` and the in-place image of `(1, …, k)` under it.
pub fn cjd_ejd(
    p: &PosetP,
    twist: &Twist,
    ideal: &OrderIdeal,
    d: u32,
) -> Result<(GlWord, Vec<i32>), LieError> {
    let k = ideal.stratum;
    let w = twist.perm(ideal.mask);
    let legal = (1..=p.n())
        .filter(|&i| ideal.mask >> p.idx(i as i32, -(i as i32)) & 1 == 1)
        .fold(0u32, |m, i| m | 1 << (i - 1));
    if d & !legal != 0 || d >> k != 0 {
        return Err(LieError::IllegalD);
    }
    let mut word = GlWord::new();
    for i in 1..=k as i32 {
        let j = w.apply(i);
        let r = (i + 1..=p.n() as i32)
            .filter(|&x| d >> (x - 1) & 1 == 1)
            .count();
        let even = r % 2 == 0;
        let in_d = d >> (i - 1) & 1 == 1;
        if j == i {
            continue;
        }
        if j.abs() > i {
            word.push(if even { (j, i) } else { (-i, -j) });
        } else if in_d {
            word.push(if even { (0, i) } else { (-i, 0) });
        } else if even {
            word.extend([(-i, 0), (0, i)]);
        } else {
            word.extend([(0, i), (-i, 0)]);
        }
    }
    let mut subs: Vec<i32> = (1..=k as i32).collect();
    for &(a, b) in word.iter().rev() {
        let Some(slot) = subs.iter().position(|&x| x == b) else {
            return Err(LieError::ZeroMultivector);
        };
        if subs.contains(&a) {
            return Err(LieError::ZeroMultivector);
        }
        subs[slot] = a;
    }
    Ok((word, subs))
}

/// Subscript set predicted by conditions (i)–(v), with the exclusion in
/// (iii) taken over the same gap.
pub fn ejd_predicted(twist: &Twist, ideal: &OrderIdeal, d: u32, n: usize) -> BTreeSet<i32> {
    let k = ideal.stratum as i32;
    let w = twist.perm(ideal.mask);
    let mut ds: Vec<i32> = (1..=n as i32)
        .rev()
        .filter(|&i| d >> (i - 1) & 1 == 1)
        .collect();
    let l = ds.len();
    ds.push(0);
    // ds[t] is i_{t+1}.
    let at = |t: usize| ds[t - 1];
    let mut out = BTreeSet::new();
    let w_range = |lo: i32, hi: i32| (lo + 1..hi).map(|i| w.apply(i)).collect::<Vec<_>>();
    out.extend(w_range(at(1), k + 1));
    for r in 1..=l / 2 {
        out.extend(w_range(at(2 * r + 1), at(2 * r)));
        out.insert(at(2 * r));
        out.insert(-at(2 * r));
    }
    for r in 1..=l.div_ceil(2) {
        let (lo, hi) = (at(2 * r), at(2 * r - 1));
        let excluded: BTreeSet<i32> = w_range(lo, hi).into_iter().map(|x| -x).collect();
        for j in (lo + 1..hi).flat_map(|m| [m, -m]) {
            if !excluded.contains(&j) {
                out.insert(j);
            }
        }
    }
    if l % 2 == 1 {
        out.insert(0);
    }
    out
}

/// Coefficient of `e_S` (subscripts in any order) in `v ∈ ∧^k V`.
pub fn wedge_coefficient(
    real: &Realization,
    module: &Module,
    v: &SparseRow,
    subscripts: &[i32],
) -> Rational {
    let mut idx: Vec<usize> = subscripts.iter().map(|&j| real.position(j)).collect();
    let sign = sort_with_sign(&mut idx);
    let label = format!(
        "e({})",
        idx.iter()
            .map(|&x| real.labels[x].to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    match module.labels.iter().position(|s| *s == label) {
        Some(b) => v.get(&b).cloned().unwrap_or_else(Rational::zero) * rat(sign),
        None => Rational::zero(),
    }
}

/// Multiplicities of `λ − Σ d_a α_a` over a set of signatures.
pub fn character_of_signatures<'a>(
    real: &Realization,
    lambda2: &[i64],
    sigs: impl IntoIterator<Item = &'a Vec<u32>>,
) -> BTreeMap<Vec<i64>, i64> {
    let mut out = BTreeMap::new();
    for d in sigs {
        let w: Vec<i64> = lambda2
            .iter()
            .zip(drop_of(real, d))
            .map(|(a, b)| a - b)
            .collect();
        *out.entry(w).or_insert(0) += 1;
    }
    out
}

/// Factorial product `∏ d_a!`.
pub fn factorial_weight(d: &[u32]) -> BigInt {
    d.iter().fold(BigInt::one(), |acc, &e| {
        acc * (1..=e as u64).fold(BigInt::one(), |f, x| f * x)
    })
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_matrices() {
        let c = Realization::new(LieType::C, 1).unwrap();
        let m = &c.matrices[0];
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.entries[&(c.position(-1), c.position(1))], rat(2));
        let b = Realization::new(LieType::B, 1).unwrap();
        let m = &b.matrices[0];
        assert_eq!(m.entries[&(b.position(0), b.position(1))], rat(1));
        assert_eq!(m.entries[&(b.position(-1), b.position(0))], rat(-2));
    }

    #[test]
    fn bracket_lands_on_long_root() {
        let c = Realization::new(LieType::C, 2).unwrap();
        let a = c.op_index(1, 2).unwrap();
        let b = c.op_index(2, -2).unwrap();
        let target = c.op_index(1, -2).unwrap();
        let br = &c.brackets[a][b];
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].0, target);
        assert!(!br[0].1.is_zero());
    }

    #[test]
    fn small_dimensions() {
        assert_eq!(
            weyl_dim(LieType::C, &doubled_weight(LieType::C, &[1, 0])),
            4.into()
        );
        assert_eq!(
            weyl_dim(LieType::C, &doubled_weight(LieType::C, &[0, 1])),
            5.into()
        );
        assert_eq!(
            weyl_dim(LieType::B, &doubled_weight(LieType::B, &[1, 0])),
            5.into()
        );
        assert_eq!(
            weyl_dim(LieType::B, &doubled_weight(LieType::B, &[0, 1])),
            4.into()
        );
        assert_eq!(
            weyl_dim(LieType::B, &doubled_weight(LieType::B, &[1, 1])),
            16.into()
        );
        assert_eq!(
            weyl_dim(LieType::B, &doubled_weight(LieType::B, &[0, 2])),
            10.into()
        );
        assert_eq!(weyl_dim(LieType::C, &[0, 0, 0]), 1.into());
    }

    #[test]
    fn characters_sum_to_dimension() {
        for ty in [LieType::C, LieType::B] {
            for a in [[1u32, 0], [0, 1], [1, 1], [2, 1]] {
                let l = doubled_weight(ty, &a);
                let ch = weyl_char(ty, &l);
                let total: i64 = ch.values().sum();
                assert_eq!(BigInt::from(total), weyl_dim(ty, &l));
                assert_eq!(ch[&l], 1);
            }
        }
        let spin = weyl_char(LieType::B, &[1, 1]);
        assert_eq!(
            spin.keys().cloned().collect::<Vec<_>>(),
            vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]
        );
    }

    #[test]
    fn modules_respect_brackets() {
        for n in 1..=3 {
            let c = Realization::new(LieType::C, n).unwrap();
            let b = Realization::new(LieType::B, n).unwrap();
            for k in 1..=n {
                Module::exterior_power(&c, k).check(&c).unwrap();
                Module::exterior_power(&b, k).check(&b).unwrap();
            }
            Module::spin(&b).check(&b).unwrap();
        }
    }

    #[test]
    fn spin_lowering_adds_index() {
        let b = Realization::new(LieType::B, 2).unwrap();
        let s = Module::spin(&b);
        for i in 1..=2 {
            let op = b.op_index(i, -i).unwrap();
            for d in 0..4usize {
                let col = &s.actions[op][d];
                if d >> (i - 1) & 1 == 0 {
                    assert_eq!(col.len(), 1);
                    assert_eq!(col[0].0, d | 1 << (i - 1));
                } else {
                    assert!(col.is_empty());
                }
            }
        }
    }

    #[test]
    fn symplectic_fundamental_dimensions() {
        let c = Realization::new(LieType::C, 3).unwrap();
        assert_eq!(Module::exterior_power(&c, 3).generated_dimension(), 14);
        assert_eq!(Module::exterior_power(&c, 2).generated_dimension(), 14);
        let c2 = Realization::new(LieType::C, 2).unwrap();
        assert_eq!(Module::exterior_power(&c2, 2).generated_dimension(), 5);
    }

    #[test]
    fn pbw_on_vector_rep() {
        let c = Realization::new(LieType::C, 1).unwrap();
        let t = Tensor::for_weight_c(&c, &[1]);
        let v = t.apply_pbw(&[1], &t.highest());
        assert_eq!(v.len(), 1);
        let (&key, coeff) = v.iter().next().unwrap();
        assert_eq!(t.factors[0].labels[key as usize], "e(-1)");
        assert_eq!(*coeff, rat(2));
        assert_eq!(t.apply_pbw(&[0], &t.highest()), t.highest());
    }

    fn pe(i: i32, j: i32) -> PosetElement {
        PosetElement::new(i, j)
    }

    #[test]
    fn worked_word_example() {
        let p = PosetP::build(4).unwrap();
        let o = crate::poset::OSet::new(
            &p,
            &[pe(1, 1), pe(1, -3), pe(2, 2), pe(2, -3), pe(3, 3), pe(4, 4)],
            true,
        )
        .unwrap();
        let twist = Twist::new(&p, o);
        let ideal = p.ideal(p.ideal_generated(1 << p.idx(1, -1) | 1 << p.idx(4, -4)));
        assert_eq!(ideal.stratum, 4);
        assert_eq!(twist.tuple(&ideal), vec![-1, -3, 3, -4]);
        let cases: [(u32, GlWord, Vec<i32>); 4] = [
            (
                0,
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
        for (d, word, subs) in cases {
            assert_eq!(cjd_ejd(&p, &twist, &ideal, d).unwrap(), (word, subs));
        }
    }

    #[test]
    fn words_biject_onto_multivectors() {
        for n in 1..=3 {
            let p = PosetP::build(n).unwrap();
            for o in crate::poset::OSet::all(&p, true) {
                let twist = Twist::new(&p, o);
                for k in 1..=n {
                    let mut seen = BTreeSet::new();
                    for ideal in p.ideals_in_stratum(k) {
                        for d in
                            crate::polytope_b::subsets(crate::polytope_b::legal_d(&p, ideal.mask))
                        {
                            let (_, subs) = cjd_ejd(&p, &twist, &ideal, d).unwrap();
                            let set: BTreeSet<i32> = subs.iter().copied().collect();
                            assert_eq!(set, ejd_predicted(&twist, &ideal, d, n));
                            assert!(seen.insert(set));
                        }
                    }
                    let total = (0..k).fold(1usize, |acc, t| acc * (2 * n + 1 - t) / (t + 1));
                    assert_eq!(seen.len(), total);
                }
            }
        }
    }

    #[test]
    fn monomial_basis_rank_small() {
        let p = PosetP::build(2).unwrap();
        let c = Realization::new(LieType::C, 2).unwrap();
        let o = crate::poset::OSet::fflv(&p, false);
        let xi = crate::polytope_c::xi(&p, &Twist::new(&p, o));
        let lambda = crate::polytope_c::WeightC::fundamental(2, 2);
        let pts = crate::polytope_c::lattice_points_c(&p, &o, &lambda).unwrap();
        let t = Tensor::for_weight_c(&c, &lambda.a);
        let off = crate::polytope_b::off_diagonal(&p);
        let mut ech = Echelon::new();
        for x in &pts {
            let y = xi.apply(x);
            let d: Vec<u32> = off.iter().map(|&k| y[k] as u32).collect();
            ech.insert(to_row(&t.apply_pbw(&d, &t.highest())));
        }
        assert_eq!(pts.len(), 5);
        assert_eq!(ech.rank(), 5);
    }
}
