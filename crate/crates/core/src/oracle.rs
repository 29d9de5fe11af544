//! Ground truth from matrices: nilpotent operators over the prime field and
//! their Jordan types read off the ranks of their powers.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::jordan::JordanType;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Square matrix over `F_p`, entries kept in `0..p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    n: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, n: usize) -> Self {
        FpMatrix {
            p,
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Sparse `(row, col, value)` triplets; values are reduced mod `p`.
    pub fn from_entries(p: u64, n: usize, entries: &[(usize, usize, i64)]) -> Result<Self> {
        let mut m = Self::zeros(p, n);
        for &(r, c, v) in entries {
            if r >= n || c >= n {
                return Err(Error::Invalid(format!("entry ({r},{c}) outside a {n}x{n} matrix")));
            }
            m.set(r, c, v.rem_euclid(p as i64) as u64);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.n + c] = v % self.p;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn entries(&self) -> Vec<(usize, usize, u64)> {
        (0..self.n)
            .flat_map(|r| (0..self.n).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let v = self.get(r, c);
                (v != 0).then_some((r, c, v))
            })
            .collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        let (n, p) = (self.n, self.p);
        let mut out = FpMatrix::zeros(p, n);
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &y) in dst.iter_mut().zip(row) {
                    *d = (*d + x * y) % p;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> FpMatrix {
        let mut acc = FpMatrix::identity(self.p, self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let (n, p) = (self.n, self.p);
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            let inv = inverse_mod(m.get(rank, col), p);
            for r in rank + 1..n {
                let factor = m.get(r, col) * inv % p;
                if factor != 0 {
                    for c in col..n {
                        let v = (m.get(r, c) + p - factor * m.get(rank, c) % p) % p;
                        m.set(r, c, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Gauss-Jordan inverse, `None` when singular.
    pub fn inverse(&self) -> Option<FpMatrix> {
        let (n, p) = (self.n, self.p);
        let mut m = self.clone();
        let mut inv = FpMatrix::identity(p, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| m.get(r, col) != 0)?;
            m.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let s = inverse_mod(m.get(col, col), p);
            for c in 0..n {
                m.set(col, c, m.get(col, c) * s);
                inv.set(col, c, inv.get(col, c) * s);
            }
            for r in 0..n {
                let factor = m.get(r, col);
                if r == col || factor == 0 {
                    continue;
                }
                for c in 0..n {
                    m.set(r, c, m.get(r, c) + p - factor * m.get(col, c) % p);
                    inv.set(r, c, inv.get(r, c) + p - factor * inv.get(col, c) % p);
                }
            }
        }
        Some(inv)
    }

    pub fn random_invertible(rng: &mut impl Rng, p: u64, n: usize) -> FpMatrix {
        loop {
            let mut m = FpMatrix::zeros(p, n);
            for v in m.data.iter_mut() {
                *v = rng.gen_range(0..p);
            }
            if m.rank() == n {
                return m;
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.n {
                self.data.swap(a * self.n + c, b * self.n + c);
            }
        }
    }
}

fn inverse_mod(x: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (x % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// A nilpotent operator `N` over `F_p` with `N^order = 0`; `order` is `p`
/// unless the model is a power of another one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotentModel {
    order: usize,
    matrix: FpMatrix,
}

impl NilpotentModel {
    pub fn new(p: u64, matrix: FpMatrix) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidModulus(p));
        }
        if matrix.p != p {
            return Err(Error::Invalid("matrix is over a different field".into()));
        }
        Self::with_order(p as usize, matrix)
    }

    fn with_order(order: usize, matrix: FpMatrix) -> Result<Self> {
        if !matrix.pow(order).is_zero() {
            return Err(Error::Invalid(format!("N^{order} is not zero")));
        }
        Ok(NilpotentModel { order, matrix })
    }

    pub fn from_entries(p: u64, dim: usize, entries: &[(usize, usize, i64)]) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidModulus(p));
        }
        Self::new(p, FpMatrix::from_entries(p, dim, entries)?)
    }

    pub fn p(&self) -> u64 {
        self.matrix.p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    /// `N^j`, nilpotent of order `ceil(order / j)`.
    pub fn power(&self, j: usize) -> Result<NilpotentModel> {
        check_range("j", j, 1, self.order)?;
        Ok(NilpotentModel {
            order: self.order.div_ceil(j),
            matrix: self.matrix.pow(j),
        })
    }

    pub fn conjugate(&self, g: &FpMatrix) -> Result<NilpotentModel> {
        let inv = g
            .inverse()
            .ok_or_else(|| Error::Invalid("conjugating matrix is singular".into()))?;
        Ok(NilpotentModel {
            order: self.order,
            matrix: g.mul(&self.matrix).mul(&inv),
        })
    }

    /// `r_m = rank N^m` for `m = 0..=order + 1`.
    pub fn rank_sequence(&self) -> Vec<usize> {
        let mut ranks = vec![self.dim()];
        let mut power = FpMatrix::identity(self.p(), self.dim());
        for _ in 0..=self.order {
            power = power.mul(&self.matrix);
            ranks.push(power.rank());
        }
        ranks
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            p: self.p(),
            dim: self.dim(),
            entries: self
                .matrix
                .entries()
                .into_iter()
                .map(|(r, c, v)| (r, c, v as i64))
                .collect(),
        }
    }
}

/// Jordan type from ranks: `a_i = r_{i-1} - 2 r_i + r_{i+1}`.
pub fn jordan_type_of(model: &NilpotentModel) -> JordanType {
    let r = model.rank_sequence();
    let mult = (1..=model.order)
        .map(|i| BigUint::from(r[i - 1] + r[i + 1] - 2 * r[i]))
        .collect();
    JordanType::new(model.order, mult).expect("rank sequence has order entries")
}

/// Model import/export shape: `{"p":5,"dim":25,"entries":[[r,c,v],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub p: u64,
    pub dim: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<NilpotentModel> {
        NilpotentModel::from_entries(self.p, self.dim, &self.entries)
    }
}

fn field(p: usize) -> Result<u64> {
    let q = p as u64;
    if is_prime(q) && q <= u32::MAX as u64 {
        Ok(q)
    } else {
        Err(Error::InvalidModulus(q))
    }
}

fn odd_field(p: usize) -> Result<u64> {
    match field(p)? {
        2 => Err(Error::InvalidModulus(2)),
        q => Ok(q),
    }
}

/// Shift `e_k -> e_{k+1}` on an `i`-dimensional space.
pub fn jordan_block(p: usize, i: usize) -> Result<NilpotentModel> {
    let q = field(p)?;
    check_range("i", i, 1, p)?;
    let entries: Vec<_> = (1..i).map(|k| (k, k - 1, 1)).collect();
    NilpotentModel::from_entries(q, i, &entries)
}

pub fn zero_model(p: usize, n: usize) -> Result<NilpotentModel> {
    NilpotentModel::from_entries(field(p)?, n, &[])
}

/// `x` on `k[y, z]/(y^p, z^p)`: `y^a z^b -> a y^{a-1} z^{b+1}`, basis index `a p + b`.
pub fn heisenberg_model(p: usize) -> Result<NilpotentModel> {
    let q = odd_field(p)?;
    let mut entries = Vec::new();
    for a in 1..p {
        for b in 0..p - 1 {
            let from = a * p + b;
            let to = (a - 1) * p + b + 1;
            entries.push((to, from, a as i64));
        }
    }
    NilpotentModel::from_entries(q, p * p, &entries)
}

/// The two pi-points of the rank-2 abelian example on `k[y]/(y^p)`: the
/// first acts by zero, the second sends `1` to `y^{p-1}`.
pub fn abelian_rank2_models(p: usize) -> Result<(NilpotentModel, NilpotentModel)> {
    let q = odd_field(p)?;
    let alpha = NilpotentModel::from_entries(q, p, &[])?;
    let beta = NilpotentModel::from_entries(q, p, &[(p - 1, 0, 1)])?;
    Ok((alpha, beta))
}

/// On `k[u]/(u^p)`: zero, and multiplication by `u^2`.
pub fn ga2_model(p: usize) -> Result<(NilpotentModel, NilpotentModel)> {
    let q = odd_field(p)?;
    let alpha = NilpotentModel::from_entries(q, p, &[])?;
    let entries: Vec<_> = (2..p).map(|k| (k, k - 2, 1)).collect();
    let beta = NilpotentModel::from_entries(q, p, &entries)?;
    Ok((alpha, beta))
}

/// `(e, f)` on a weight basis `v_0, ..., v_{n-1}` with highest weight `lambda`:
/// `f v_k = v_{k+1}`, `e v_k = k (lambda - k + 1) v_{k-1}`.
fn sl2_pair(q: u64, n: usize, lambda: i64) -> Result<(NilpotentModel, NilpotentModel)> {
    let f: Vec<_> = (1..n).map(|k| (k, k - 1, 1)).collect();
    let e: Vec<_> = (1..n)
        .map(|k| {
            let k = k as i64;
            (k as usize - 1, k as usize, k * (lambda - k + 1))
        })
        .collect();
    Ok((
        NilpotentModel::from_entries(q, n, &e)?,
        NilpotentModel::from_entries(q, n, &f)?,
    ))
}

/// Baby Verma module of highest weight `i - 1`: `f` is a full shift, `e`
/// splits into chains of lengths `i` and `p - i`.
pub fn sl2s_models(p: usize, i: usize) -> Result<(NilpotentModel, NilpotentModel)> {
    let q = odd_field(p)?;
    check_range("i", i, 1, p - 1)?;
    sl2_pair(q, p, i as i64 - 1)
}

/// Simple module of dimension `n`, a cyclic space for both `e` and `f`.
pub fn sl2_simple_models(p: usize, n: usize) -> Result<(NilpotentModel, NilpotentModel)> {
    let q = field(p)?;
    check_range("n", n, 1, p)?;
    sl2_pair(q, n, n as i64 - 1)
}

/// Stable types of `N^j` for `j = 1..=order`, read with the original bound.
pub fn pi_point_sweep(base: &NilpotentModel) -> Result<BTreeSet<JordanType>> {
    (1..=base.order)
        .map(|j| Ok(jordan_type_of(&base.power(j)?).with_modulus(base.order)?.stable_part()))
        .collect()
}

/// Formula counterpart of [`pi_point_sweep`].
pub fn pi_point_sweep_type(base: &JordanType) -> Result<BTreeSet<JordanType>> {
    let p = base.modulus();
    (1..=p)
        .map(|j| Ok(base.restrict_type(j)?.with_modulus(p)?.stable_part()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub trials: usize,
    pub failures: usize,
}

/// Conjugates by random invertible matrices and compares Jordan types.
pub fn conjugation_fuzz(model: &NilpotentModel, trials: usize, seed: u64) -> Result<FuzzReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected = jordan_type_of(model);
    let mut failures = 0;
    for _ in 0..trials {
        let g = FpMatrix::random_invertible(&mut rng, model.p(), model.dim());
        if jordan_type_of(&model.conjugate(&g)?) != expected {
            failures += 1;
        }
    }
    Ok(FuzzReport { trials, failures })
}
