//! Jordan types of nilpotent operators `t` with `t^p = 0`.
//!
//! A [`JordanType`] stores the multiplicities `a_1, ..., a_p` of the blocks
//! `[1], ..., [p]`. The bound `p` is usually the prime of the base field, but
//! restriction to `k[t^j]` lowers it to `ceil(p / j)`, so any `p >= 1` is
//! accepted here.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::serde_big;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawJordanType", into = "RawJordanType")]
pub struct JordanType {
    p: usize,
    mult: Vec<BigUint>,
}

#[derive(Serialize, Deserialize)]
struct RawJordanType {
    p: usize,
    #[serde(with = "serde_big::vec_biguint")]
    mult: Vec<BigUint>,
}

impl TryFrom<RawJordanType> for JordanType {
    type Error = Error;

    fn try_from(raw: RawJordanType) -> Result<Self> {
        JordanType::new(raw.p, raw.mult)
    }
}

impl From<JordanType> for RawJordanType {
    fn from(jt: JordanType) -> Self {
        RawJordanType { p: jt.p, mult: jt.mult }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DominanceResult {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl DominanceResult {
    pub fn reversed(self) -> Self {
        match self {
            DominanceResult::Less => DominanceResult::Greater,
            DominanceResult::Greater => DominanceResult::Less,
            other => other,
        }
    }
}

impl fmt::Display for DominanceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DominanceResult::Less => "Less",
            DominanceResult::Equal => "Equal",
            DominanceResult::Greater => "Greater",
            DominanceResult::Incomparable => "Incomparable",
        };
        f.write_str(s)
    }
}

/// Which partial sums are compared by [`dominance_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DominanceConvention {
    /// `S_j = sum_{i >= j} (i - j) a_i`, the image dimension of `t^j`.
    PaperOrder,
    /// `S_j = sum_{i >= j} i a_i`.
    CfpOrder,
}

impl JordanType {
    pub fn new(p: usize, mult: Vec<BigUint>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidModulus(0));
        }
        if mult.len() != p {
            return Err(Error::Invalid(format!(
                "multiplicity vector has length {}, expected {p}",
                mult.len()
            )));
        }
        Ok(JordanType { p, mult })
    }

    /// The zero module.
    pub fn zero(p: usize) -> Result<Self> {
        Self::new(p, vec![BigUint::zero(); p])
    }

    pub fn from_counts(p: usize, counts: &[u64]) -> Result<Self> {
        Self::new(p, counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    /// `count` copies of the block `[i]`.
    pub fn blocks_of(p: usize, i: usize, count: impl Into<BigUint>) -> Result<Self> {
        let mut jt = Self::zero(p)?;
        check_range("block size", i, 1, p)?;
        jt.mult[i - 1] = count.into();
        Ok(jt)
    }

    pub fn block(p: usize, i: usize) -> Result<Self> {
        Self::blocks_of(p, i, 1u32)
    }

    pub fn modulus(&self) -> usize {
        self.p
    }

    /// Multiplicities, index 0 holding `a_1`.
    pub fn mult(&self) -> &[BigUint] {
        &self.mult
    }

    /// `a_i`, zero outside `1..=p`.
    pub fn multiplicity(&self, i: usize) -> BigUint {
        if (1..=self.p).contains(&i) {
            self.mult[i - 1].clone()
        } else {
            BigUint::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mult.iter().all(Zero::is_zero)
    }

    /// Only blocks of the maximal size `[p]` occur.
    pub fn is_projective(&self) -> bool {
        self.mult[..self.p - 1].iter().all(Zero::is_zero)
    }

    /// Nonzero blocks in descending size.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.mult
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, m)| (i + 1, m))
    }

    pub fn dimension(&self) -> BigUint {
        self.weighted(|i| i)
    }

    /// `dim ker t^m = sum_i min(i, m) a_i` for `1 <= m <= p`.
    pub fn ker_dim(&self, m: usize) -> Result<BigUint> {
        check_range("m", m, 1, self.p)?;
        Ok(self.weighted(|i| i.min(m)))
    }

    /// `dim im t^m = sum_i max(i - m, 0) a_i` for `0 <= m <= p`.
    pub fn image_dim(&self, m: usize) -> Result<BigUint> {
        check_range("m", m, 0, self.p)?;
        Ok(self.weighted(|i| i.saturating_sub(m)))
    }

    /// `psi_m = sum_{i<m} i a_i + m sum_{m<=i<p} a_i` for `1 <= m <= p - 1`.
    pub fn psi(&self, m: usize) -> Result<BigUint> {
        check_range("m", m, 1, self.p.saturating_sub(1))?;
        let p = self.p;
        Ok(self.weighted(|i| if i == p { 0 } else { i.min(m) }))
    }

    pub fn stable_part(&self) -> JordanType {
        let mut mult = self.mult.clone();
        mult[self.p - 1] = BigUint::zero();
        JordanType { p: self.p, mult }
    }

    /// `sum_{i<p} i a_i`.
    pub fn stable_dimension(&self) -> BigUint {
        let p = self.p;
        self.weighted(|i| if i == p { 0 } else { i })
    }

    /// Kernel of a projective cover: `[i] -> [p - i]`, projective blocks vanish.
    pub fn syzygy(&self) -> JordanType {
        let p = self.p;
        let mut mult = vec![BigUint::zero(); p];
        for i in 1..p {
            mult[p - i - 1] = self.mult[i - 1].clone();
        }
        JordanType { p, mult }
    }

    /// Jordan type of `t^j`, a type with bound `ceil(p / j)`.
    pub fn restrict_type(&self, j: usize) -> Result<JordanType> {
        check_range("j", j, 1, self.p)?;
        let mut out = JordanType::zero(self.p.div_ceil(j))?;
        for (i, m) in self.mult.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let r = restrict(i + 1, j, self.p)?;
            for (slot, c) in out.mult.iter_mut().zip(r.mult) {
                *slot += c * m;
            }
        }
        Ok(out)
    }

    pub fn direct_sum(&self, other: &JordanType) -> Result<JordanType> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        let mult = self.mult.iter().zip(&other.mult).map(|(a, b)| a + b).collect();
        Ok(JordanType { p: self.p, mult })
    }

    /// Adds `count` projective blocks `[p]`.
    pub fn with_projectives(&self, count: &BigUint) -> JordanType {
        let mut out = self.clone();
        out.mult[self.p - 1] += count;
        out
    }

    /// The same blocks read with another bound `q`; fails if a block exceeds `q`.
    pub fn with_modulus(&self, q: usize) -> Result<JordanType> {
        if q == 0 {
            return Err(Error::InvalidModulus(0));
        }
        if let Some((i, _)) = self.blocks().next() {
            if i > q {
                return Err(Error::Invalid(format!("block [{i}] does not fit bound {q}")));
            }
        }
        let mut mult = vec![BigUint::zero(); q];
        for (i, m) in self.blocks() {
            mult[i - 1] = m.clone();
        }
        Ok(JordanType { p: q, mult })
    }

    /// Equal block multisets, ignoring the bound.
    pub fn same_blocks(&self, other: &JordanType) -> bool {
        self.blocks().eq(other.blocks())
    }

    /// Parses `"2[3]+[1]"`; the empty string and `"0"` denote the zero module.
    pub fn parse(p: usize, text: &str) -> Result<JordanType> {
        Parser::new(text, p)?.run()
    }

    /// Partial sums `S_1, ..., S_p` used for dominance.
    pub fn dominance_sums(&self, convention: DominanceConvention) -> Vec<BigUint> {
        (1..=self.p)
            .map(|j| match convention {
                DominanceConvention::PaperOrder => self.weighted(|i| i.saturating_sub(j)),
                DominanceConvention::CfpOrder => self.weighted(|i| if i >= j { i } else { 0 }),
            })
            .collect()
    }

    fn weighted(&self, w: impl Fn(usize) -> usize) -> BigUint {
        self.mult
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, m)| m * BigUint::from(w(i + 1)))
            .sum()
    }
}

/// Ascending block sizes; the alternate form `{:#}` lists them in partition order.
impl fmt::Display for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut blocks: Vec<_> = self.blocks().collect();
        if !f.alternate() {
            blocks.reverse();
        }
        for (k, (i, m)) in blocks.into_iter().enumerate() {
            if k > 0 {
                f.write_str("+")?;
            }
            if m.is_one() {
                write!(f, "[{i}]")?;
            } else {
                write!(f, "{m}[{i}]")?;
            }
        }
        Ok(())
    }
}

/// Jordan type of `t^j` on the block `[i]`: writing `i = aj + r` with
/// `0 <= r < j`, this is `(j - r)[a] + r[a + 1]` when `j <= i` and `i[1]`
/// otherwise. The result has bound `ceil(p / j)`.
pub fn restrict(i: usize, j: usize, p: usize) -> Result<JordanType> {
    if p == 0 {
        return Err(Error::InvalidModulus(0));
    }
    check_range("i", i, 1, p)?;
    check_range("j", j, 1, p)?;
    let mut out = JordanType::zero(p.div_ceil(j))?;
    if j <= i {
        let (a, r) = (i / j, i % j);
        out.mult[a - 1] += BigUint::from(j - r);
        if r > 0 {
            out.mult[a] += BigUint::from(r);
        }
    } else {
        out.mult[0] = BigUint::from(i);
    }
    Ok(out)
}

/// Compares `a` and `b` through their partial sums; `Greater` means `a`
/// dominates `b`.
pub fn dominance_compare(a: &JordanType, b: &JordanType, convention: DominanceConvention) -> Result<DominanceResult> {
    if a.p != b.p {
        return Err(Error::ModulusMismatch(a.p, b.p));
    }
    let (da, db) = (a.dimension(), b.dimension());
    if da != db {
        return Err(Error::DimensionMismatch(da, db));
    }
    Ok(compare_vectors(
        &a.dominance_sums(convention),
        &b.dominance_sums(convention),
    ))
}

/// Componentwise comparison of two sequences of equal length.
pub(crate) fn compare_vectors<T: Ord>(a: &[T], b: &[T]) -> DominanceResult {
    let ge = a.iter().zip(b).all(|(x, y)| x >= y);
    let le = a.iter().zip(b).all(|(x, y)| x <= y);
    match (ge, le) {
        (true, true) => DominanceResult::Equal,
        (true, false) => DominanceResult::Greater,
        (false, true) => DominanceResult::Less,
        (false, false) => DominanceResult::Incomparable,
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    acc: JordanType,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, p: usize) -> Result<Self> {
        Ok(Parser {
            bytes: text.as_bytes(),
            pos: 0,
            acc: JordanType::zero(p)?,
        })
    }

    fn run(mut self) -> Result<JordanType> {
        self.skip_ws();
        if self.pos == self.bytes.len() {
            return Ok(self.acc);
        }
        if self.peek() == Some(b'0') {
            let save = self.pos;
            self.pos += 1;
            self.skip_ws();
            if self.pos == self.bytes.len() {
                return Ok(self.acc);
            }
            self.pos = save;
        }
        loop {
            self.term()?;
            self.skip_ws();
            match self.peek() {
                None => return Ok(self.acc),
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                }
                Some(_) => return Err(self.error("expected '+' or end of input")),
            }
        }
    }

    fn term(&mut self) -> Result<()> {
        let count = match self.peek() {
            Some(c) if c.is_ascii_digit() => self.number()?,
            _ => BigUint::one(),
        };
        self.skip_ws();
        self.expect(b'[')?;
        self.skip_ws();
        let at = self.pos;
        let size = self.number()?;
        let p = self.acc.p;
        let i = usize::try_from(&size)
            .ok()
            .filter(|i| (1..=p).contains(i))
            .ok_or_else(|| Error::Parse {
                pos: at,
                msg: format!("block size {size} outside 1..={p}"),
            })?;
        self.skip_ws();
        self.expect(b']')?;
        self.acc.mult[i - 1] += count;
        Ok(())
    }

    fn number(&mut self) -> Result<BigUint> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("decimal digits"))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jt(p: usize, counts: &[u64]) -> JordanType {
        JordanType::from_counts(p, counts).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn dimensions() {
        assert_eq!(jt(5, &[1, 0, 0, 1, 0]).dimension(), big(5));
        assert_eq!(jt(5, &[0, 0, 2, 0, 1]).dimension(), big(11));
        assert_eq!(JordanType::zero(3).unwrap().dimension(), big(0));
    }

    #[test]
    fn kernel_and_image() {
        assert_eq!(JordanType::block(3, 3).unwrap().ker_dim(2).unwrap(), big(2));
        assert_eq!(jt(3, &[0, 2, 1]).ker_dim(1).unwrap(), big(3));
        assert_eq!(jt(3, &[1, 0, 1]).image_dim(1).unwrap(), big(2));
        assert_eq!(jt(5, &[0, 0, 0, 0, 3]).image_dim(2).unwrap(), big(9));
        let t = jt(5, &[1, 2, 0, 1, 4]);
        assert_eq!(t.ker_dim(5).unwrap(), t.dimension());
        assert_eq!(t.image_dim(5).unwrap(), big(0));
        assert_eq!(t.image_dim(0).unwrap(), t.dimension());
        assert!(t.ker_dim(0).is_err());
        assert!(t.image_dim(6).is_err());
    }

    #[test]
    fn psi_values() {
        assert_eq!(jt(5, &[1, 0, 0, 1, 3]).psi(4).unwrap(), big(5));
        assert_eq!(jt(5, &[1, 0, 0, 1, 0]).psi(4).unwrap(), big(5));
        let proj = jt(5, &[0, 0, 0, 0, 7]);
        for m in 1..5 {
            assert_eq!(proj.psi(m).unwrap(), big(0));
        }
        assert!(proj.psi(5).is_err());
    }

    #[test]
    fn stable_and_syzygy() {
        let t = jt(5, &[1, 0, 0, 1, 7]);
        assert_eq!(t.stable_part(), jt(5, &[1, 0, 0, 1, 0]));
        assert_eq!(t.stable_part().stable_part(), t.stable_part());
        assert!(jt(5, &[0, 0, 0, 0, 3]).stable_part().is_zero());
        assert_eq!(
            JordanType::block(5, 2).unwrap().syzygy(),
            JordanType::block(5, 3).unwrap()
        );
        assert!(JordanType::block(3, 3).unwrap().syzygy().is_zero());
        assert_eq!(t.syzygy().syzygy(), t.stable_part());
    }

    #[test]
    fn restriction_formula() {
        let r = restrict(5, 2, 5).unwrap();
        assert_eq!(r.modulus(), 3);
        assert_eq!(r, jt(3, &[0, 1, 1]));
        assert_eq!(restrict(3, 5, 7).unwrap(), jt(2, &[3, 0]));
        assert_eq!(restrict(4, 2, 5).unwrap(), jt(3, &[0, 2, 0]));
        assert_eq!(restrict(5, 5, 5).unwrap(), jt(1, &[5]));
        assert!(restrict(6, 2, 5).is_err());
        for i in 1..=7 {
            assert!(restrict(i, 1, 7)
                .unwrap()
                .same_blocks(&JordanType::block(7, i).unwrap()));
        }
    }

    #[test]
    fn restrict_type_is_additive() {
        let t = jt(7, &[2, 0, 1, 0, 3, 0, 1]);
        let r = t.restrict_type(3).unwrap();
        assert_eq!(r.dimension(), t.dimension());
        let parts = [jt(7, &[2, 0, 0, 0, 0, 0, 0]), jt(7, &[0, 0, 1, 0, 3, 0, 1])];
        let sum = parts[0]
            .restrict_type(3)
            .unwrap()
            .direct_sum(&parts[1].restrict_type(3).unwrap())
            .unwrap();
        assert_eq!(r, sum);
    }

    #[test]
    fn text_round_trip() {
        let t = JordanType::parse(5, "[5]+2[3]+[1]").unwrap();
        assert_eq!(t, jt(5, &[1, 0, 2, 0, 1]));
        assert_eq!(t.to_string(), "[1]+2[3]+[5]");
        assert_eq!(format!("{t:#}"), "[5]+2[3]+[1]");
        assert_eq!(JordanType::parse(5, "[1] + [3] + [3] + [5]").unwrap(), t);
        assert!(JordanType::parse(5, "").unwrap().is_zero());
        assert!(JordanType::parse(5, " 0 ").unwrap().is_zero());
        assert_eq!(JordanType::zero(5).unwrap().to_string(), "0");
        let big_mult = JordanType::parse(3, "123456789012345678901234567890[2]").unwrap();
        assert_eq!(big_mult.to_string(), "123456789012345678901234567890[2]");
    }

    #[test]
    fn parse_errors_carry_positions() {
        match JordanType::parse(5, "[2]+[7]") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        match JordanType::parse(5, "2[3]x") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        match JordanType::parse(5, "2[3]+") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_shape() {
        let t = jt(5, &[1, 0, 0, 1, 0]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"p":5,"mult":[1,0,0,1,0]}"#);
        let back: JordanType = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let wide: JordanType = serde_json::from_str(r#"{"p":2,"mult":["99999999999999999999999",1]}"#).unwrap();
        assert_eq!(wide.to_string(), "99999999999999999999999[1]+[2]");
        assert!(serde_json::from_str::<JordanType>(r#"{"p":3,"mult":[1,0]}"#).is_err());
    }

    #[test]
    fn dominance_examples() {
        use DominanceConvention::*;
        let a = jt(3, &[1, 0, 2]);
        let b = jt(3, &[0, 2, 1]);
        assert_eq!(dominance_compare(&a, &b, PaperOrder).unwrap(), DominanceResult::Greater);
        assert_eq!(dominance_compare(&b, &a, PaperOrder).unwrap(), DominanceResult::Less);
        assert_eq!(
            dominance_compare(&a, &b, CfpOrder).unwrap(),
            DominanceResult::Incomparable
        );
        let c = jt(7, &[0, 0, 2, 0, 0, 0, 0]);
        let d = jt(7, &[2, 0, 0, 1, 0, 0, 0]);
        assert_eq!(
            dominance_compare(&c, &d, PaperOrder).unwrap(),
            DominanceResult::Incomparable
        );
        assert_eq!(dominance_compare(&a, &a, PaperOrder).unwrap(), DominanceResult::Equal);
        assert!(matches!(
            dominance_compare(&a, &jt(3, &[1, 0, 0]), PaperOrder),
            Err(Error::DimensionMismatch(..))
        ));
    }
}
