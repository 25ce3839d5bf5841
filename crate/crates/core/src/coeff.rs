//! Exact Laurent polynomials in `q^(1/2)` with rational coefficients.
//!
//! A [`QScalar`] stores its terms keyed by the *half-exponent*: the key `h`
//! stands for the monomial `q^(h/2)`. Keeping the key integral means exponent
//! arithmetic never leaves `i64`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not divisible: nonzero remainder")]
    NotDivisible,
}

/// Element of `Q[q^(±1/2)]`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct QScalar {
    terms: BTreeMap<i64, BigRational>,
}

impl QScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(BigRational::from_integer(BigInt::from(c)), 0)
    }

    /// `c * q^(half_exp/2)`.
    pub fn monomial(c: BigRational, half_exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(half_exp, c);
        }
        Self { terms }
    }

    /// `q^(half_exp/2)`.
    pub fn q_pow(half_exp: i64) -> Self {
        Self::monomial(BigRational::one(), half_exp)
    }

    /// Builds from `(half_exp, coefficient)` pairs, merging repeated exponents.
    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(iter: I) -> Self {
        let mut s = Self::zero();
        for (h, c) in iter {
            s.add_term(h, &c);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(h, c)| (*h, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, half_exp: i64) -> BigRational {
        self.terms.get(&half_exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_half_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_half_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Returns the single `(half_exp, coeff)` pair if this is a monomial.
    pub fn as_monomial(&self) -> Option<(i64, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(h, c)| (*h, c))
        } else {
            None
        }
    }

    fn add_term(&mut self, h: i64, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(h).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&h);
        }
    }

    /// Multiplies by `q^(half_exp/2)`.
    pub fn shift(&self, half_exp: i64) -> Self {
        if half_exp == 0 {
            return self.clone();
        }
        Self { terms: self.terms.iter().map(|(h, c)| (h + half_exp, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(h, v)| (*h, v * c)).collect() }
    }

    /// Negates when `negative` is set; used for `(-1)^tau` factors.
    pub fn signed(&self, negative: bool) -> Self {
        if negative {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact quotient `c` with `c * b == self`.
    ///
    /// Univariate long division from the top degree. The quotient of an exact
    /// division has lowest half-exponent `min(a) - min(b)`, so the loop stops
    /// with [`CoeffError::NotDivisible`] as soon as it would go below that.
    pub fn div_exact(&self, b: &QScalar) -> Result<QScalar, CoeffError> {
        let (b_lo, b_hi) = match (b.min_half_exp(), b.max_half_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(CoeffError::DivisionByZero),
        };
        let a_lo = match self.min_half_exp() {
            Some(lo) => lo,
            None => return Ok(QScalar::zero()),
        };
        let lead = &b.terms[&b_hi];
        let floor = a_lo - b_lo;
        let mut rem = self.clone();
        let mut quot = QScalar::zero();
        while let Some(top) = rem.max_half_exp() {
            let t = top - b_hi;
            if t < floor {
                return Err(CoeffError::NotDivisible);
            }
            let c = &rem.terms[&top] / lead;
            for (h, v) in &b.terms {
                rem.add_term(h + t, &-(v * &c));
            }
            quot.add_term(t, &c);
        }
        Ok(quot)
    }

    /// True iff every coefficient is an integer, i.e. the value lies in `Z[q^(±1/2)]`.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Specialization `q^(1/2) -> 1`.
    pub fn at_one(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    /// Content check helper: true if exactly `±1 * q^h`.
    pub fn is_unit_monomial(&self) -> bool {
        self.as_monomial().is_some_and(|(_, c)| c.abs().is_one())
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QScalar({self})")
    }
}

/// Renders the half-exponent `h` as a `q` power, e.g. `q`, `q^{-1}`, `q^{3/2}`.
pub fn fmt_q_power(h: i64) -> Option<String> {
    match h {
        0 => None,
        2 => Some("q".to_string()),
        h if h % 2 == 0 => Some(format!("q^{{{}}}", h / 2)),
        h => Some(format!("q^{{{}/2}}", h)),
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (h, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            match fmt_q_power(*h) {
                None => write!(f, "{mag}")?,
                Some(qp) if mag.is_one() => write!(f, "{qp}")?,
                Some(qp) => write!(f, "{mag}{qp}")?,
            }
        }
        Ok(())
    }
}

impl Add<&QScalar> for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for QScalar {
    type Output = QScalar;
    fn add(mut self, rhs: QScalar) -> QScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, rhs: &QScalar) {
        for (h, c) in &rhs.terms {
            self.add_term(*h, c);
        }
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, rhs: &QScalar) {
        for (h, c) in &rhs.terms {
            self.add_term(*h, &-c);
        }
    }
}

impl Sub<&QScalar> for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for QScalar {
    type Output = QScalar;
    fn sub(mut self, rhs: QScalar) -> QScalar {
        self -= &rhs;
        self
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { terms: self.terms.iter().map(|(h, c)| (*h, -c)).collect() }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl Mul<&QScalar> for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        let mut out = QScalar::zero();
        for (h1, c1) in &self.terms {
            for (h2, c2) in &rhs.terms {
                out.add_term(h1 + h2, &(c1 * c2));
            }
        }
        out
    }
}

impl Mul for QScalar {
    type Output = QScalar;
    fn mul(self, rhs: QScalar) -> QScalar {
        &self * &rhs
    }
}

impl Serialize for QScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (h, c) in &self.terms {
            map.serialize_entry(&h.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct QScalarVisitor;

        impl<'de> Visitor<'de> for QScalarVisitor {
            type Value = QScalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from half-exponent strings to rational strings")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut access: M) -> Result<QScalar, M::Error> {
                let mut terms = BTreeMap::new();
                while let Some((k, v)) = access.next_entry::<String, String>()? {
                    let h: i64 = k.parse().map_err(|_| de::Error::custom(format!("bad half-exponent key {k:?}")))?;
                    let c: BigRational = v.parse().map_err(|_| de::Error::custom(format!("bad rational {v:?}")))?;
                    if c.is_zero() {
                        return Err(de::Error::custom("zero coefficient stored"));
                    }
                    if terms.insert(h, c).is_some() {
                        return Err(de::Error::custom(format!("duplicate half-exponent {h}")));
                    }
                }
                Ok(QScalar { terms })
            }
        }

        deserializer.deserialize_map(QScalarVisitor)
    }
}
