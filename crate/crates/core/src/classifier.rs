//! Rule engine for Carlson modules and endo-trivial modules: predicted
//! Jordan-type sets and indecomposability verdicts from numeric descriptors.
//!
//! Geometric inputs (variety dimensions, equidimensionality, saturation rank)
//! are trusted as given.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::JordanType;
use crate::oracle::is_prime;

/// How the odd-degree class pulls back along pi-points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddPullback {
    /// Vanishes at some pi-points and not at others.
    Mixed,
    AllVanish,
    NoneVanish,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ambient {
    pub pi_dim: Option<u64>,
    pub equidim: bool,
    pub variety_dim: Option<u64>,
    pub ambient_dim: Option<u64>,
    /// Smallest dimension of an irreducible component, an alternative to
    /// `variety_dim` when the variety is not equidimensional.
    pub min_component_dim: Option<u64>,
    pub srk: Option<u64>,
    pub srk_quotient: Option<u64>,
    pub is_finite_group: bool,
    pub trigonalizable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub p: u64,
    pub degree: u64,
    pub nilpotent: bool,
    #[serde(
        default,
        with = "crate::serde_big::opt_biguint",
        skip_serializing_if = "Option::is_none"
    )]
    pub dim_l: Option<BigUint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_full: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odd_pullback: Option<OddPullback>,
    #[serde(default)]
    pub ambient: Ambient,
}

impl Descriptor {
    pub fn is_even(&self) -> bool {
        self.degree.is_multiple_of(2)
    }

    fn validate(&self) -> Result<usize> {
        if !is_prime(self.p) || self.p < 3 {
            return Err(Error::InvalidModulus(self.p));
        }
        if self.degree == 0 {
            return Err(Error::Invalid("degree must be at least 1".into()));
        }
        if !self.is_even() && self.odd_pullback.is_none() {
            return Err(Error::Invalid("odd degree needs odd_pullback".into()));
        }
        usize::try_from(self.p).map_err(|_| Error::InvalidModulus(self.p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectiveCount {
    Known(BigUint),
    /// Unknown count named by a symbol such as `n` or `m`.
    Symbolic(&'static str),
}

/// A stable Jordan type plus a possibly symbolic number of `[p]` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedType {
    pub stable: JordanType,
    pub projectives: ProjectiveCount,
}

impl PredictedType {
    pub fn known(&self) -> Option<JordanType> {
        match &self.projectives {
            ProjectiveCount::Known(n) => Some(self.stable.with_projectives(n)),
            ProjectiveCount::Symbolic(_) => None,
        }
    }
}

impl fmt::Display for PredictedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.stable.modulus();
        match &self.projectives {
            ProjectiveCount::Known(n) => write!(f, "{}", self.stable.with_projectives(n)),
            ProjectiveCount::Symbolic(sym) if self.stable.is_zero() => write!(f, "{sym}[{p}]"),
            ProjectiveCount::Symbolic(sym) => write!(f, "{}+{sym}[{p}]", self.stable),
        }
    }
}

pub fn format_type_set(types: &[PredictedType]) -> String {
    let items: Vec<_> = types.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn count_blocks(p: usize, dim: &Option<BigUint>, stable: &JordanType, sym: &'static str) -> Result<PredictedType> {
    let projectives = match dim {
        None => ProjectiveCount::Symbolic(sym),
        Some(d) => {
            let s = stable.dimension();
            if *d < s {
                return Err(Error::Divisibility(format!(
                    "dimension {d} is smaller than the stable part {stable}"
                )));
            }
            let (q, r) = (d - &s).div_rem(&BigUint::from(p));
            if !r.is_zero() {
                return Err(Error::Divisibility(format!("{d} - {s} is not divisible by {p}")));
            }
            ProjectiveCount::Known(q)
        }
    };
    Ok(PredictedType {
        stable: stable.clone(),
        projectives,
    })
}

fn stable_of(p: usize, blocks: &[usize]) -> JordanType {
    let mut jt = JordanType::zero(p).expect("p is valid");
    for &i in blocks {
        jt = jt
            .direct_sum(&JordanType::block(p, i).expect("block in range"))
            .expect("same modulus");
    }
    jt
}

/// Predicted Jordan types of the Carlson module of the class.
pub fn carlson_type_set(desc: &Descriptor) -> Result<Vec<PredictedType>> {
    let p = desc.validate()?;
    let dim = &desc.dim_l;
    let hook = stable_of(p, &[1, p - 1]);
    if desc.is_even() {
        let mut out = Vec::new();
        if !desc.nilpotent {
            out.push(count_blocks(p, dim, &stable_of(p, &[]), "d/p")?);
        }
        out.push(count_blocks(p, dim, &hook, "n")?);
        return Ok(out);
    }
    let double = stable_of(p, &[p - 1, p - 1]);
    let short = stable_of(p, &[p - 2]);
    match desc.odd_pullback.expect("validated") {
        OddPullback::Mixed => Ok(vec![
            count_blocks(p, dim, &double, "m")?,
            count_blocks(p, dim, &short, "n")?,
        ]),
        OddPullback::AllVanish => Ok(vec![count_blocks(p, dim, &double, "m")?]),
        OddPullback::NoneVanish => Ok(vec![count_blocks(p, dim, &short, "n")?]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Indecomposable,
    TwoEndotrivialSummands,
    Decomposable,
    Unknown,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Machine-readable rule tag, absent exactly when the kind is `Unknown`.
    pub rule: Option<String>,
    pub citation: String,
}

impl Verdict {
    fn fired(rule: &str, citation: impl Into<String>) -> Self {
        Verdict {
            kind: VerdictKind::Indecomposable,
            rule: Some(rule.to_string()),
            citation: citation.into(),
        }
    }
}

/// Applies the rules in a fixed order and reports the first that fires.
pub fn carlson_indecomposability(desc: &Descriptor) -> Result<Verdict> {
    desc.validate()?;
    let amb = &desc.ambient;
    if desc.is_even() && desc.nilpotent {
        return Ok(Verdict::fired("CNED1", "even-degree nilpotent class"));
    }
    if !desc.is_even() {
        if desc.odd_pullback == Some(OddPullback::Mixed) {
            return Ok(Verdict::fired("COD1.2", "odd degree with two Jordan types"));
        }
        let srk = amb
            .srk_quotient
            .map(|s| (s, "quotient by the largest linearly reductive normal subgroup"))
            .or(amb.srk.map(|s| (s, "whole group")));
        if let Some((s, which)) = srk {
            if s >= 2 {
                return Ok(Verdict::fired(
                    "COD3",
                    format!("odd degree, saturation rank {s} >= 2 ({which})"),
                ));
            }
        }
        if amb.is_finite_group {
            return Ok(Verdict::fired("COD5", "odd degree on a finite group"));
        }
    } else if let Some(m) = amb.ambient_dim {
        let bound = |n: u64| 2 * n >= m + 3;
        if amb.equidim && amb.variety_dim.is_some_and(bound) {
            return Ok(Verdict::fired(
                "CNN1",
                "even degree, equidimensional support variety of dimension >= (m+3)/2",
            ));
        }
        if amb.min_component_dim.is_some_and(bound) {
            return Ok(Verdict::fired(
                "CNN1",
                "even degree, every irreducible component of dimension >= (m+3)/2",
            ));
        }
    }
    Ok(Verdict {
        kind: VerdictKind::Unknown,
        rule: None,
        citation: "no rule applies".into(),
    })
}

/// True iff every member has the same stable part, equal to `[1]` or `[p-1]`.
pub fn endo_trivial(types: &[JordanType]) -> Result<bool> {
    let first = types.first().ok_or_else(|| Error::Invalid("empty type set".into()))?;
    let p = first.modulus();
    let stable = first.stable_part();
    if types.iter().any(|t| t.modulus() != p || t.stable_part() != stable) {
        return Ok(false);
    }
    let is_block = |i: usize| i >= 1 && stable == JordanType::block(p, i).expect("in range");
    Ok(p >= 2 && (is_block(1) || is_block(p - 1)))
}

pub const SL2_EXCEPTION: &str =
    "without an abelian unipotent subgroup of complexity 2, constant types [2],...,[p-2] occur for the first Frobenius kernel of SL(2)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BensonCheck {
    Ok,
    Violation { i: usize },
    OkWithCaveat { i: usize, caveat: &'static str },
}

/// Checks a constant type `[i] + n[p]` against the constraint `i in {1, p-1}`.
pub fn benson_constraint(jt: &JordanType, has_abelian_unipotent_cx2: bool) -> Result<BensonCheck> {
    let p = jt.modulus();
    let stable = jt.stable_part();
    let mut blocks = stable.blocks();
    let i = match (blocks.next(), blocks.next()) {
        (Some((i, c)), None) if *c == BigUint::from(1u8) => i,
        _ => return Err(Error::Invalid(format!("stable part of {jt} is not a single block"))),
    };
    Ok(if i == 1 || i + 1 == p {
        BensonCheck::Ok
    } else if has_abelian_unipotent_cx2 {
        BensonCheck::Violation { i }
    } else {
        BensonCheck::OkWithCaveat {
            i,
            caveat: SL2_EXCEPTION,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sl2Family {
    /// First Frobenius kernel of SL(2).
    #[serde(rename = "SL2_1")]
    Sl2,
    /// Its product with the Borel-type torus factor.
    #[serde(rename = "SL2_1_Tr")]
    Sl2Tr,
}

impl std::str::FromStr for Sl2Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SL2_1" => Ok(Sl2Family::Sl2),
            "SL2_1_Tr" => Ok(Sl2Family::Sl2Tr),
            _ => Err(Error::Invalid(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleSize {
    Dim(BigUint),
    Ql(BigUint),
}

fn exact_div(d: &BigUint, p: usize) -> Result<BigUint> {
    let (q, r) = d.div_rem(&BigUint::from(p));
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::Divisibility(format!("{d} is not divisible by {p}")))
    }
}

/// Jordan types along components for the SL(2) families.
///
/// With `pi_dim = 1` the block index is the stable block size of a constant
/// type; with `pi_dim = 0` it indexes the tube, `1 <= i <= (p-1)/2`.
pub fn sl2_family_types(
    p: usize,
    family: Sl2Family,
    i: usize,
    pi_dim: u64,
    size: &ModuleSize,
) -> Result<Vec<JordanType>> {
    if !is_prime(p as u64) || p < 3 {
        return Err(Error::InvalidModulus(p as u64));
    }
    match (family, pi_dim) {
        (Sl2Family::Sl2, 1) => {
            crate::error::check_range("i", i, 1, p - 1)?;
            let ModuleSize::Dim(d) = size else {
                return Err(Error::Invalid("constant type needs the module dimension".into()));
            };
            let stable = JordanType::block(p, i)?;
            Ok(vec![count_blocks(p, &Some(d.clone()), &stable, "")?
                .known()
                .expect("known")])
        }
        (_, 0) => {
            crate::error::check_range("i", i, 1, (p - 1) / 2)?;
            let q = match (family, size) {
                (Sl2Family::Sl2, ModuleSize::Ql(q)) => q.clone(),
                (_, ModuleSize::Dim(d)) => exact_div(d, p)?,
                (Sl2Family::Sl2Tr, ModuleSize::Ql(_)) => {
                    return Err(Error::Invalid("this family takes the module dimension".into()))
                }
            };
            if q.is_zero() {
                return Err(Error::Invalid("module must be nonzero".into()));
            }
            let full = JordanType::blocks_of(p, p, q.clone())?;
            let split = stable_of(p, &[i, p - i]).with_projectives(&(q - 1u8));
            Ok(vec![full, split])
        }
        _ => Err(Error::Invalid(format!(
            "no prediction for pi_dim = {pi_dim} in this family"
        ))),
    }
}
