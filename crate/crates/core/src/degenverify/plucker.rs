//! The type C Plücker setup: the ring `S` on ⋖-increasing tuples, the
//! linear forms `L`, admissible tuples `Θ`, the maps `ρ₀`, `ρ₁`, and the
//! minors `C` and `D`.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::exactalg::{rat, Echelon, Monomial, Poly, Rational, Ring, SparseRow, VarName};
use crate::grobner::{kernel_of_map, Grading, Ideal};
use crate::pipedream::{is_admissible, sort_tuple};
use crate::poset::{index_set, position, PosetP};

#[derive(Clone, Debug)]
pub struct Plucker {
    pub n: usize,
    /// Variables of `S`, by size and then lexicographically in `⋖`.
    pub tuples: Vec<Vec<i32>>,
    pub index: HashMap<Vec<i32>, u32>,
    pub admissible: Vec<bool>,
    /// `S` ids of the admissible tuples, in order; these are the `Θ` ids.
    pub theta: Vec<u32>,
    pub theta_of: Vec<Option<u32>>,
}

fn subsets_of(items: &[i32], k: usize) -> Vec<Vec<i32>> {
    fn rec(items: &[i32], start: usize, k: usize, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..items.len() {
            cur.push(items[s]);
            rec(items, s + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant by permutation expansion.
fn det(m: &[Vec<Poly>]) -> Poly {
    let k = m.len();
    if k == 0 {
        return Poly::constant(Rational::one());
    }
    let mut out = Poly::zero();
    for col in 0..k {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let sign = if col % 2 == 0 { rat(1) } else { rat(-1) };
        out.add_assign_scaled(&(&m[0][col] * &det(&minor)), &sign);
    }
    out
}

impl Plucker {
    pub fn new(n: usize) -> Self {
        let idx = index_set(n);
        let mut tuples = Vec::new();
        for k in 1..=n {
            tuples.extend(subsets_of(&idx, k));
        }
        let index: HashMap<Vec<i32>, u32> = tuples
            .iter()
            .cloned()
            .enumerate()
            .map(|(a, t)| (t, a as u32))
            .collect();
        let admissible: Vec<bool> = tuples.iter().map(|t| is_admissible(n, t)).collect();
        let theta: Vec<u32> = (0..tuples.len() as u32)
            .filter(|&v| admissible[v as usize])
            .collect();
        let mut theta_of = vec![None; tuples.len()];
        for (t, &v) in theta.iter().enumerate() {
            theta_of[v as usize] = Some(t as u32);
        }
        Plucker {
            n,
            tuples,
            index,
            admissible,
            theta,
            theta_of,
        }
    }

    pub fn s_len(&self) -> usize {
        self.tuples.len()
    }

    pub fn theta_len(&self) -> usize {
        self.theta.len()
    }

    pub fn theta_tuple(&self, t: u32) -> &[i32] {
        &self.tuples[self.theta[t as usize] as usize]
    }

    pub fn ring_s(&self) -> Ring {
        Ring::new(self.tuples.iter().map(|t| VarName::Tuple(t.clone())))
    }

    pub fn ring_theta(&self) -> Ring {
        Ring::new(
            self.theta
                .iter()
                .map(|&v| VarName::Tuple(self.tuples[v as usize].clone())),
        )
    }

    /// `X_tuple = sign · X_sorted` as an `S` id; `None` on repeats.
    pub fn signed_var(&self, tuple: &[i32]) -> Option<(Rational, u32)> {
        let (sign, sorted) = sort_tuple(self.n, tuple)?;
        Some((rat(sign as i64), self.index[&sorted]))
    }

    /// Same in `ℂ[Θ]`; `None` on repeats or non-admissible sets.
    pub fn signed_theta(&self, tuple: &[i32]) -> Option<(Rational, u32)> {
        let (s, v) = self.signed_var(tuple)?;
        Some((s, self.theta_of[v as usize]?))
    }

    pub fn grading_s(&self) -> Grading {
        Grading::new(self.tuples.iter().map(|t| t.len() - 1).collect())
    }

    pub fn grading_theta(&self) -> Grading {
        Grading::new(
            self.theta
                .iter()
                .map(|&v| self.tuples[v as usize].len() - 1)
                .collect(),
        )
    }

    /// `L_{i₁…i_k} = Σ_j X_{i₁…i_k,j,−j}` for `k ≤ n−2`, nonzero ones only.
    pub fn l_forms(&self) -> Vec<Poly> {
        let n = self.n;
        let idx = index_set(n);
        let mut out = Vec::new();
        for k in 0..=n.saturating_sub(2) {
            if n < 2 {
                break;
            }
            for head in subsets_of(&idx, k) {
                let mut form = Poly::zero();
                for j in 1..=n as i32 {
                    let mut t = head.clone();
                    t.extend([j, -j]);
                    if let Some((s, v)) = self.signed_var(&t) {
                        form.add_term(Monomial::var(v), s);
                    }
                }
                if !form.is_zero() {
                    out.push(form);
                }
            }
        }
        out
    }

    /// `ρ₁` on `S` variables as polynomials in `ℂ[Θ]`.
    pub fn rho1(&self) -> Result<Vec<Poly>, String> {
        // Columns: non-admissible variables first so that pivots land there.
        let order: Vec<u32> = (0..self.s_len() as u32)
            .filter(|&v| !self.admissible[v as usize])
            .chain(self.theta.iter().copied())
            .collect();
        let col_of: HashMap<u32, usize> = order.iter().enumerate().map(|(c, &v)| (v, c)).collect();
        let primes = self.s_len() - self.theta_len();
        let mut ech = Echelon::new();
        for l in self.l_forms() {
            let row: SparseRow = l
                .terms()
                .map(|(m, c)| (col_of[&m.pairs()[0].0], c.clone()))
                .collect();
            ech.insert(row);
        }
        ech.fully_reduce();
        let mut images: Vec<Option<Poly>> = (0..self.s_len())
            .map(|v| self.theta_of[v].map(Poly::var))
            .collect();
        for (pivot, row) in ech.rows() {
            if pivot >= primes || row.keys().any(|&c| c < primes && c != pivot) {
                return Err("linear forms do not single out the non-admissible variables".into());
            }
            let mut r = Poly::zero();
            for (&c, x) in row {
                if c >= primes {
                    let t = self.theta_of[order[c] as usize].expect("admissible");
                    r.add_term(Monomial::var(t), -x.clone());
                }
            }
            images[order[pivot] as usize] = Some(r);
        }
        images
            .into_iter()
            .enumerate()
            .map(|(v, p)| p.ok_or(format!("no image for {:?}", self.tuples[v])))
            .collect()
    }

    /// `ρ₀`: admissible variables to themselves, the rest to zero.
    pub fn rho0(&self) -> Vec<Poly> {
        (0..self.s_len())
            .map(|v| self.theta_of[v].map_or_else(Poly::zero, Poly::var))
            .collect()
    }

    /// `z_{i,j}` for `i ∈ [1,n]`, `j ∈ N`.
    pub fn full_z(&self, i: i32, j: i32) -> u32 {
        ((i - 1) as usize * 2 * self.n + position(self.n, j)) as u32
    }

    /// `C_{tuple}`: minor on rows `1..k`, columns as given.
    pub fn minor_c(&self, tuple: &[i32]) -> Poly {
        let m: Vec<Vec<Poly>> = (1..=tuple.len() as i32)
            .map(|a| {
                tuple
                    .iter()
                    .map(|&b| Poly::var(self.full_z(a, b)))
                    .collect()
            })
            .collect();
        det(&m)
    }

    /// `D_{tuple}` over `ℂ[P]`, columns as given.
    pub fn minor_d(&self, p: &PosetP, tuple: &[i32]) -> Poly {
        let m: Vec<Vec<Poly>> = (1..=tuple.len() as i32)
            .map(|a| {
                tuple
                    .iter()
                    .map(|&b| {
                        if b.abs() >= a {
                            Poly::var(p.idx(a, b) as u32)
                        } else {
                            Poly::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        det(&m)
    }

    /// `I_A`: kernel of `X ↦ C` by elimination.
    pub fn i_a(&self) -> Ideal {
        let images: Vec<Poly> = self.tuples.iter().map(|t| self.minor_c(t)).collect();
        let weights: Vec<i64> = self.tuples.iter().map(|t| t.len() as i64).collect();
        kernel_of_map(&images, 2 * self.n * self.n, &weights)
    }

    /// `D` for every `Θ` variable.
    pub fn d_images(&self, p: &PosetP) -> Vec<Poly> {
        self.theta
            .iter()
            .map(|&v| self.minor_d(p, &self.tuples[v as usize]))
            .collect()
    }

    /// `Ĩ`: kernel of `X ↦ D`.
    pub fn tilde_i(&self, p: &PosetP) -> Ideal {
        let weights: Vec<i64> = self
            .theta
            .iter()
            .map(|&v| self.tuples[v as usize].len() as i64)
            .collect();
        kernel_of_map(&self.d_images(p), p.len(), &weights)
    }

    /// `I = ρ₁(I_A)` from generators of `I_A`.
    pub fn i_symplectic(&self, i_a: &Ideal) -> Result<Ideal, String> {
        let rho = self.rho1()?;
        Ok(i_a.map(|g| g.substitute(&rho)))
    }

    pub fn admissible_count(&self, k: usize) -> usize {
        self.theta
            .iter()
            .filter(|&&v| self.tuples[v as usize].len() == k)
            .count()
    }

    pub fn is_sorted_admissible(&self, tuple: &[i32]) -> bool {
        self.index
            .get(tuple)
            .is_some_and(|&v| self.admissible[v as usize])
    }

    pub fn zero_coeff() -> Rational {
        Rational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_admissible_tuples() {
        let pl = Plucker::new(2);
        assert_eq!(pl.s_len(), 10);
        assert_eq!(pl.admissible_count(1), 4);
        assert_eq!(pl.admissible_count(2), 5);
        let pl3 = Plucker::new(3);
        assert_eq!(pl3.admissible_count(2), 14);
        assert_eq!(pl3.admissible_count(3), 14);
    }

    #[test]
    fn rank_two_rho1() {
        let pl = Plucker::new(2);
        let rho = pl.rho1().unwrap();
        let v = pl.index[&vec![1, -1]];
        let t = pl.theta_of[pl.index[&vec![2, -2]] as usize].unwrap();
        assert_eq!(rho[v as usize], Poly::monomial(Monomial::var(t), rat(-1)));
        assert_eq!(pl.l_forms().len(), 1);
    }

    #[test]
    fn rank_one_is_trivial() {
        let pl = Plucker::new(1);
        assert!(pl.l_forms().is_empty());
        assert!(pl.i_a().is_zero());
        let p = PosetP::build(1).unwrap();
        assert!(pl.tilde_i(&p).is_zero());
    }
}
