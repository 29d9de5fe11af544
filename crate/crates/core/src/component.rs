//! Jordan types along a component: d-vectors on locally split components,
//! affine slope/intercept laws on tubes, and the inverse problem recovering
//! the multiplicities `n` of the relative projectives.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::jordan::{compare_vectors, DominanceResult, JordanType};
use crate::quiver::TreeClass;

/// `A` is tridiagonal with 2 on the diagonal (1 in the bottom-right corner)
/// and -1 beside it; `B[i][l] = min(i, l)` is its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanPair {
    p: usize,
    a: Vec<Vec<i64>>,
    b: Vec<Vec<i64>>,
}

impl CartanPair {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn a_times_b(&self) -> Vec<Vec<i64>> {
        mat_mul(&self.a, &self.b)
    }

    pub fn b_times_a(&self) -> Vec<Vec<i64>> {
        mat_mul(&self.b, &self.a)
    }

    pub fn is_inverse_pair(&self) -> bool {
        let id = identity(self.p);
        self.a_times_b() == id && self.b_times_a() == id
    }

    /// `sum_{j<p} a_{ij} n_j` for `i = 1..=p`.
    fn a_apply(&self, n: &[BigUint]) -> Vec<BigInt> {
        (0..self.p)
            .map(|i| {
                n.iter()
                    .enumerate()
                    .map(|(j, nj)| BigInt::from(self.a[i][j]) * BigInt::from(nj.clone()))
                    .sum()
            })
            .collect()
    }

    fn b_apply(&self, t: &[BigInt]) -> Vec<BigInt> {
        (0..self.p)
            .map(|i| {
                t.iter()
                    .enumerate()
                    .map(|(l, tl)| BigInt::from(self.b[i][l]) * tl)
                    .sum()
            })
            .collect()
    }
}

fn identity(p: usize) -> Vec<Vec<i64>> {
    (0..p).map(|i| (0..p).map(|j| i64::from(i == j)).collect()).collect()
}

fn mat_mul(x: &[Vec<i64>], y: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect())
        .collect()
}

pub fn build_cartan_pair(p: usize) -> Result<CartanPair> {
    if p < 2 {
        return Err(Error::InvalidModulus(p as u64));
    }
    let a = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| match (i, j) {
                    _ if i == j && i == p - 1 => 1,
                    _ if i == j => 2,
                    _ if i.abs_diff(j) == 1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    let b = (0..p)
        .map(|i| (0..p).map(|l| (i.min(l) + 1) as i64).collect())
        .collect();
    let pair = CartanPair { p, a, b };
    if !pair.is_inverse_pair() {
        return Err(Error::Invalid(format!("A and B fail to be inverse for p = {p}")));
    }
    Ok(pair)
}

/// `alpha_i(ql) = s_i ql + t_i` for `ql >= start`. Without `include_p` the
/// row `i = p` is not asserted and evaluations carry no `[p]` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubeProfile {
    pub p: usize,
    pub slopes: Vec<BigInt>,
    pub intercepts: Vec<BigInt>,
    pub start: usize,
    pub include_p: bool,
}

impl TubeProfile {
    pub fn new(p: usize, slopes: Vec<BigInt>, intercepts: Vec<BigInt>, start: usize, include_p: bool) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidModulus(p as u64));
        }
        if slopes.len() != p || intercepts.len() != p {
            return Err(Error::Invalid(format!("profile rows must have length {p}")));
        }
        if start == 0 {
            return Err(Error::out_of_range("start", 0, 1, i64::MAX));
        }
        Ok(TubeProfile {
            p,
            slopes,
            intercepts,
            start,
            include_p,
        })
    }

    fn rows(&self) -> usize {
        if self.include_p {
            self.p
        } else {
            self.p - 1
        }
    }

    pub fn value(&self, i: usize, ql: u64) -> BigInt {
        &self.slopes[i - 1] * BigInt::from(ql) + &self.intercepts[i - 1]
    }

    /// Fails with the first quasi-length at which some asserted row goes negative.
    pub fn validate(&self) -> Result<()> {
        let start = BigInt::from(self.start);
        let mut worst: Option<(BigInt, usize)> = None;
        for i in 1..=self.rows() {
            let (s, t) = (&self.slopes[i - 1], &self.intercepts[i - 1]);
            let at_start = s * &start + t;
            let first = if at_start.is_negative() {
                start.clone()
            } else if s.is_negative() {
                // s * ql + t < 0  <=>  ql > t / (-s)
                t.div_floor(&-s) + 1
            } else {
                continue;
            };
            if worst.as_ref().is_none_or(|(q, _)| first < *q) {
                worst = Some((first, i));
            }
        }
        match worst {
            None => Ok(()),
            Some((ql, i)) => {
                let value = &self.slopes[i - 1] * &ql + &self.intercepts[i - 1];
                Err(Error::NegativeMultiplicity {
                    i,
                    ql: ql.to_biguint().expect("positive quasi-length"),
                    value,
                })
            }
        }
    }

    pub fn at(&self, ql: u64) -> Result<JordanType> {
        if (ql as u128) < self.start as u128 {
            return Err(Error::out_of_range("ql", ql as i128, self.start as i128, i64::MAX));
        }
        self.validate()?;
        let mut mult = vec![BigUint::zero(); self.p];
        for (i, slot) in mult.iter_mut().enumerate().take(self.rows()) {
            *slot = self.value(i + 1, ql).to_biguint().expect("validated");
        }
        JordanType::new(self.p, mult)
    }
}

/// The law on the tube through a quasi-simple `seed` whose relative
/// projectives occur with multiplicities `n_1, ..., n_{p-1}`:
/// `s_i = a_i(seed) - c_i`, `t_i = c_i` with `c = A n`.
pub fn tube_profile(seed: &JordanType, n: &[BigUint], cartan: &CartanPair, include_p: bool) -> Result<TubeProfile> {
    let p = seed.modulus();
    if cartan.p() != p {
        return Err(Error::ModulusMismatch(p, cartan.p()));
    }
    if n.len() != p - 1 {
        return Err(Error::Invalid(format!(
            "expected {} multiplicities, got {}",
            p - 1,
            n.len()
        )));
    }
    let c = cartan.a_apply(n);
    let slopes = seed
        .mult()
        .iter()
        .zip(&c)
        .map(|(a, ci)| BigInt::from(a.clone()) - ci)
        .collect();
    let profile = TubeProfile::new(p, slopes, c, 1, include_p)?;
    profile.validate()?;
    Ok(profile)
}

pub fn tube_forward(
    seed: &JordanType,
    n: &[BigUint],
    cartan: &CartanPair,
    ql: u64,
    include_p: bool,
) -> Result<JordanType> {
    tube_profile(seed, n, cartan, include_p)?.at(ql)
}

/// Trigonalizable and central cases: `n e_j` on a seed `m[j]`.
/// Row `j` reads `(m - 2n) ql + 2n`, rows `j +- 1` read `n (ql - 1)`;
/// the `[p]` row is left out.
pub fn tube_central(p: usize, j: usize, m: &BigUint, n: &BigUint, ql: u64) -> Result<JordanType> {
    if p < 2 {
        return Err(Error::InvalidModulus(p as u64));
    }
    check_range("j", j, 1, p - 1)?;
    if n.is_zero() {
        return Err(Error::Invalid("n must be positive".into()));
    }
    if ql == 0 {
        return Err(Error::out_of_range("ql", 0, 1, i64::MAX));
    }
    let two_n = n * 2u32;
    if *m < two_n {
        return Err(Error::Invalid(format!("m = {m} is smaller than 2n = {two_n}")));
    }
    let q = BigUint::from(ql);
    let mut mult = vec![BigUint::zero(); p];
    mult[j - 1] = (m - &two_n) * &q + &two_n;
    let side = n * (&q - 1u32);
    if j >= 2 {
        mult[j - 2] = side.clone();
    }
    if j < p - 1 {
        mult[j] = side;
    }
    JordanType::new(p, mult)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved {
    /// `n_1, ..., n_{p-1}`.
    pub n: Vec<BigUint>,
    /// All intercepts vanish: no relative projectives in the tube.
    pub locally_split: bool,
    /// `t_p` was not asserted and was recovered from `n_p = 0`.
    pub inferred_tp: bool,
}

/// Recovers `n = B t` from the intercepts. When the `[p]` row is not
/// asserted, `t_p` is the unique value making `n_p = 0`.
pub fn solve_multiplicities(profile: &TubeProfile, cartan: &CartanPair) -> Result<Solved> {
    let p = profile.p;
    if cartan.p() != p {
        return Err(Error::ModulusMismatch(p, cartan.p()));
    }
    let mut t = profile.intercepts.clone();
    if !profile.include_p {
        let weighted: BigInt = t[..p - 1]
            .iter()
            .enumerate()
            .map(|(l, tl)| BigInt::from(l + 1) * tl)
            .sum();
        let (q, r) = weighted.div_rem(&BigInt::from(p));
        if !r.is_zero() {
            return Err(Error::Divisibility(format!(
                "sum of l*t_l = {weighted} is not divisible by {p}; no integral t_p gives n_p = 0"
            )));
        }
        t[p - 1] = -q;
    }
    let n = cartan.b_apply(&t);
    if !n[p - 1].is_zero() {
        return Err(Error::Invalid(format!("n_p = {} is nonzero", n[p - 1])));
    }
    let n = n[..p - 1]
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.to_biguint().ok_or_else(|| {
                Error::Invalid(format!(
                    "n_{} = {v} is negative; no quasi-simple relative projective fits",
                    i + 1
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Solved {
        locally_split: profile.intercepts.iter().all(Zero::is_zero),
        inferred_tp: !profile.include_p,
        n,
    })
}

/// d-vector of a locally split component at one pi-point: `alpha_i = d_i f`
/// for `i < p`, and `d_p = sum_{i<p} i d_i` is the slope of `alpha_{<p}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitProfile {
    p: usize,
    d: Vec<BigUint>,
    d_p: BigUint,
    tree_class: TreeClass,
}

impl SplitProfile {
    pub fn new(p: usize, d: Vec<BigUint>, d_p: BigUint, tree_class: TreeClass) -> Result<Self> {
        let profile = Self::from_d(p, d, tree_class)?;
        if profile.d_p != d_p {
            return Err(Error::Invalid(format!(
                "d_p = {d_p} but sum of i*d_i is {}",
                profile.d_p
            )));
        }
        Ok(profile)
    }

    pub fn from_d(p: usize, d: Vec<BigUint>, tree_class: TreeClass) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidModulus(p as u64));
        }
        if d.len() != p - 1 {
            return Err(Error::Invalid(format!("d-vector must have length {}", p - 1)));
        }
        let d_p = d.iter().enumerate().map(|(i, di)| di * BigUint::from(i + 1)).sum();
        Ok(SplitProfile { p, d, d_p, tree_class })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> &[BigUint] {
        &self.d
    }

    pub fn d_p(&self) -> &BigUint {
        &self.d_p
    }

    pub fn tree_class(&self) -> &TreeClass {
        &self.tree_class
    }

    /// `L_j = p sum_{j<=i<p} (i - j) d_i - (p - j) d_p`, the dominance sums
    /// at any vertex up to the positive factor and a shared offset.
    fn dominance_levels(&self) -> Vec<BigInt> {
        let p = self.p;
        (1..=p)
            .map(|j| {
                let inner: BigInt = (j..p)
                    .map(|i| BigInt::from(i - j) * BigInt::from(self.d[i - 1].clone()))
                    .sum();
                BigInt::from(p) * inner - BigInt::from(p - j) * BigInt::from(self.d_p.clone())
            })
            .collect()
    }
}

/// Stable part at a vertex, with the `[p]` count when a dimension fixes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitValue {
    pub stable: JordanType,
    pub projective: Option<BigUint>,
}

impl SplitValue {
    pub fn full(&self) -> Option<JordanType> {
        self.projective.as_ref().map(|m| self.stable.with_projectives(m))
    }
}

pub fn split_propagate(profile: &SplitProfile, f_value: &BigUint, dimension: Option<&BigUint>) -> Result<SplitValue> {
    if f_value.is_zero() {
        return Err(Error::Invalid("f must be positive".into()));
    }
    let p = profile.p;
    let mut mult: Vec<BigUint> = profile.d.iter().map(|di| di * f_value).collect();
    mult.push(BigUint::zero());
    let stable = JordanType::new(p, mult)?;
    let projective = dimension
        .map(|dim| {
            let used = &profile.d_p * f_value;
            if *dim < used {
                return Err(Error::Divisibility(format!(
                    "dimension {dim} is below the stable part {used}"
                )));
            }
            let (q, r) = (dim - &used).div_rem(&BigUint::from(p));
            if !r.is_zero() {
                return Err(Error::Divisibility(format!("{dim} - {used} is not divisible by {p}")));
            }
            Ok(q)
        })
        .transpose()?;
    Ok(SplitValue { stable, projective })
}

pub fn seed_to_split_profile(seed: &JordanType, f_seed: &BigUint, tree_class: TreeClass) -> Result<SplitProfile> {
    if f_seed.is_zero() {
        return Err(Error::Invalid("f must be positive".into()));
    }
    let p = seed.modulus();
    let d = seed.mult()[..p.saturating_sub(1)]
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (q, r) = a.div_rem(f_seed);
            if r.is_zero() {
                Ok(q)
            } else {
                Err(Error::Divisibility(format!(
                    "a_{} = {a} is not divisible by f = {f_seed}",
                    i + 1
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SplitProfile::from_d(p, d, tree_class)
}

/// Number of distinct Jordan types on a component: distinct d-vectors.
pub fn jordan_type_count(profiles: &[SplitProfile]) -> usize {
    profiles
        .iter()
        .map(|pr| (&pr.d, &pr.d_p))
        .collect::<BTreeSet<_>>()
        .len()
}

/// `{ i < p : d_i != 0 }`.
pub fn support_indices(profile: &SplitProfile) -> BTreeSet<usize> {
    profile
        .d
        .iter()
        .enumerate()
        .filter(|(_, di)| !di.is_zero())
        .map(|(i, _)| i + 1)
        .collect()
}

/// Dominance between two pi-points, valid at every vertex of the component.
pub fn dominance_on_component(pa: &SplitProfile, pb: &SplitProfile) -> Result<DominanceResult> {
    if pa.p != pb.p {
        return Err(Error::ModulusMismatch(pa.p, pb.p));
    }
    Ok(compare_vectors(&pa.dominance_levels(), &pb.dominance_levels()))
}

/// Multiplicity of a simple module in the top of its relative projective cover.
pub fn top_multiplicity(simple: &JordanType, j: usize) -> Result<BigUint> {
    simple.ker_dim(j)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Obstruction {
    NotRelativelyProjective,
    Inconclusive { caveat: Option<String> },
}

pub const SL2_CAVEAT: &str =
    "without trigonalizability, stable multiplicities <= 1 do not exclude relative projectivity (SL(2)_1 Verma modules)";

/// Stable multiplicities all at most 1 rule out relative projectivity for
/// trigonalizable groups.
pub fn obstruction_check(seed: &JordanType, trigonalizable: bool) -> Obstruction {
    let stable = seed.stable_part();
    let small = !stable.is_zero() && stable.mult().iter().all(|a| *a <= BigUint::from(1u32));
    match (small, trigonalizable) {
        (true, true) => Obstruction::NotRelativelyProjective,
        (true, false) => Obstruction::Inconclusive {
            caveat: Some(SL2_CAVEAT.to_string()),
        },
        (false, _) => Obstruction::Inconclusive { caveat: None },
    }
}

/// Seed given either as a JSON Jordan type or in text form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    Json(JordanType),
    Text(String),
}

impl SeedSpec {
    pub fn resolve(&self, p: usize) -> Result<JordanType> {
        match self {
            SeedSpec::Json(jt) if jt.modulus() == p => Ok(jt.clone()),
            SeedSpec::Json(jt) => Err(Error::ModulusMismatch(jt.modulus(), p)),
            SeedSpec::Text(s) => JordanType::parse(p, s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Tube,
    Split,
    Profile,
}

/// Component description read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub p: usize,
    pub kind: ComponentKind,
    #[serde(default)]
    pub tree_class: Option<TreeClass>,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub seed: Option<SeedSpec>,
    #[serde(default)]
    pub multiplicities: Option<Vec<u64>>,
    #[serde(default)]
    pub include_p: Option<bool>,
    #[serde(default)]
    pub f_seed: Option<u64>,
    #[serde(default)]
    pub slopes: Option<Vec<i64>>,
    #[serde(default)]
    pub intercepts: Option<Vec<i64>>,
}

/// A component ready for evaluation.
#[derive(Debug, Clone)]
pub enum Component {
    Tube(TubeProfile),
    Split { profile: SplitProfile, f_seed: BigUint },
}

impl ComponentSpec {
    fn include_p(&self) -> bool {
        self.include_p.unwrap_or(self.rank.unwrap_or(1) == 1)
    }

    fn seed(&self) -> Result<JordanType> {
        self.seed
            .as_ref()
            .ok_or_else(|| Error::Invalid("component spec needs a seed".into()))?
            .resolve(self.p)
    }

    pub fn build(&self) -> Result<Component> {
        match self.kind {
            ComponentKind::Tube => {
                let cartan = build_cartan_pair(self.p)?;
                let n: Vec<BigUint> = self
                    .multiplicities
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("tube spec needs multiplicities".into()))?
                    .iter()
                    .map(|&x| BigUint::from(x))
                    .collect();
                Ok(Component::Tube(tube_profile(
                    &self.seed()?,
                    &n,
                    &cartan,
                    self.include_p(),
                )?))
            }
            ComponentKind::Profile => {
                let row = |v: &Option<Vec<i64>>, name: &str| {
                    v.as_ref()
                        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
                        .ok_or_else(|| Error::Invalid(format!("profile spec needs {name}")))
                };
                let profile = TubeProfile::new(
                    self.p,
                    row(&self.slopes, "slopes")?,
                    row(&self.intercepts, "intercepts")?,
                    1,
                    self.include_p(),
                )?;
                Ok(Component::Tube(profile))
            }
            ComponentKind::Split => {
                let f_seed = BigUint::from(self.f_seed.unwrap_or(1));
                let tc = self.tree_class.clone().unwrap_or(TreeClass::AInf);
                let profile = seed_to_split_profile(&self.seed()?, &f_seed, tc)?;
                Ok(Component::Split { profile, f_seed })
            }
        }
    }
}

impl Component {
    /// Type at quasi-length `ql`. On split components of class `A_inf` the
    /// additive function is `ql`; on the other classes it is constant.
    pub fn at(&self, ql: u64) -> Result<JordanType> {
        match self {
            Component::Tube(profile) => profile.at(ql),
            Component::Split { profile, f_seed } => {
                let f = match profile.tree_class {
                    TreeClass::AInf => BigUint::from(ql),
                    _ => f_seed.clone(),
                };
                Ok(split_propagate(profile, &f, None)?.stable)
            }
        }
    }

    pub fn solve(&self) -> Result<Solved> {
        match self {
            Component::Tube(profile) => solve_multiplicities(profile, &build_cartan_pair(profile.p)?),
            Component::Split { profile, .. } => Ok(Solved {
                n: vec![BigUint::zero(); profile.p - 1],
                locally_split: true,
                inferred_tp: false,
            }),
        }
    }

    /// Rows `i` reported in tables.
    pub fn rows(&self) -> usize {
        match self {
            Component::Tube(profile) => profile.rows(),
            Component::Split { profile, .. } => profile.p - 1,
        }
    }
}
