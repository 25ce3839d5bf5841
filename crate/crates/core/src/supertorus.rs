//! The based quantum supertorus `T(Λ)`.
//!
//! Basis monomials `X^e` are indexed by lattice vectors `e ∈ Z^(n|m)` whose odd
//! components are 0 or 1. Multiplication follows
//!
//! ```text
//! X^e X^f = (-1)^τ(e,f) q^(Λ(e,f)/2) X^(e+f)
//! ```
//!
//! with `X^(e+f) = 0` as soon as an odd component reaches 2.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{CoeffError, QScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("graded shape needs at least one even direction")]
    EmptyShape,
    #[error("form is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector {0} is not a basis monomial (odd components must be 0 or 1)")]
    NotBasisMonomial(LatticeVec),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivisionError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor has no pure-even part; cannot guarantee a regular leading term")]
    ZeroDivisor,
    #[error("not divisible")]
    NotDivisible,
}

impl From<CoeffError> for DivisionError {
    fn from(e: CoeffError) -> Self {
        match e {
            CoeffError::DivisionByZero => DivisionError::DivisionByZero,
            CoeffError::NotDivisible => DivisionError::NotDivisible,
        }
    }
}

/// `n` even and `m` odd directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedShape {
    pub n: usize,
    pub m: usize,
}

impl GradedShape {
    pub fn new(n: usize, m: usize) -> Result<Self, TorusError> {
        if n == 0 {
            return Err(TorusError::EmptyShape);
        }
        Ok(Self { n, m })
    }

    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    pub fn is_odd(&self, i: usize) -> bool {
        i >= self.n
    }

    pub fn odd_range(&self) -> std::ops::Range<usize> {
        self.n..self.n + self.m
    }
}

/// Integer vector in `Z^(n|m)`; coordinates `0..n` are even, `n..n+m` odd.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVec(Vec<i64>);

impl LatticeVec {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        Self(v)
    }

    pub fn from_vec(v: Vec<i64>) -> Self {
        Self(v)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn with(mut self, i: usize, value: i64) -> Self {
        self.0[i] = value;
        self
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    /// Indices `j >= n` with a nonzero component.
    pub fn odd_support(&self, shape: GradedShape) -> impl Iterator<Item = usize> + '_ {
        shape.odd_range().filter(move |&j| self.0[j] != 0)
    }

    pub fn odd_degree(&self, shape: GradedShape) -> usize {
        self.odd_support(shape).count()
    }

    /// Odd components as a bit pattern, lowest odd index in bit 0.
    pub fn odd_mask(&self, shape: GradedShape) -> u64 {
        self.odd_support(shape).fold(0u64, |acc, j| acc | (1 << (j - shape.n)))
    }

    pub fn is_pure_even(&self, shape: GradedShape) -> bool {
        self.odd_support(shape).next().is_none()
    }

    pub fn is_basis_monomial(&self, shape: GradedShape) -> bool {
        self.0.len() == shape.dim() && shape.odd_range().all(|j| self.0[j] == 0 || self.0[j] == 1)
    }

    pub fn even_part(&self, shape: GradedShape) -> &[i64] {
        &self.0[..shape.n]
    }
}

impl Index<usize> for LatticeVec {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add<&LatticeVec> for &LatticeVec {
    type Output = LatticeVec;
    fn add(self, rhs: &LatticeVec) -> LatticeVec {
        LatticeVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&LatticeVec> for &LatticeVec {
    type Output = LatticeVec;
    fn sub(self, rhs: &LatticeVec) -> LatticeVec {
        LatticeVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVec {
    type Output = LatticeVec;
    fn neg(self) -> LatticeVec {
        LatticeVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Number of pairs `(j1, j2)` with `j1 > j2`, `j1` in the odd support of `e`
/// and `j2` in the odd support of `f`.
pub fn tau(e: &LatticeVec, f: &LatticeVec, shape: GradedShape) -> u32 {
    let mut count = 0;
    for j1 in e.odd_support(shape) {
        count += f.odd_support(shape).filter(|&j2| j1 > j2).count() as u32;
    }
    count
}

/// Skew-symmetric integer form on `Z^(n|m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SkewForm {
    mat: DMatrix<i64>,
}

impl SkewForm {
    pub fn new(mat: DMatrix<i64>) -> Result<Self, TorusError> {
        if mat.nrows() != mat.ncols() {
            return Err(TorusError::DimensionMismatch { expected: mat.nrows(), got: mat.ncols() });
        }
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                if mat[(i, j)] != -mat[(j, i)] {
                    return Err(TorusError::NotSkew(i, j));
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, TorusError> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(TorusError::DimensionMismatch { expected: dim, got: r.len() });
            }
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
    }

    pub fn zero(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.mat
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.dim()).map(|i| self.mat.row(i).iter().copied().collect()).collect()
    }

    /// `Λ(e, f) = eᵀ Λ f`.
    pub fn eval(&self, e: &LatticeVec, f: &LatticeVec) -> i64 {
        let mut acc = 0;
        for (i, &ei) in e.as_slice().iter().enumerate() {
            if ei == 0 {
                continue;
            }
            for (j, &fj) in f.as_slice().iter().enumerate() {
                acc += ei * self.mat[(i, j)] * fj;
            }
        }
        acc
    }

    /// The vector `Λ f`, so that `Λ(e, f) = e · (Λ f)`.
    pub fn apply_right(&self, f: &LatticeVec) -> Vec<i64> {
        (0..self.dim()).map(|i| f.as_slice().iter().enumerate().map(|(j, &fj)| self.mat[(i, j)] * fj).sum()).collect()
    }
}

impl fmt::Debug for SkewForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewForm({:?})", self.rows())
    }
}

impl Serialize for SkewForm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SkewForm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        SkewForm::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Half-exponent `h` such that `X^e = q^(h/2) X_1^(a_1) ⋯ X_(n+m)^(a_(n+m))`,
/// i.e. `h = Σ_{l<k} a_k a_l λ_kl`.
pub fn factor_ordered(form: &SkewForm, e: &LatticeVec) -> i64 {
    let a = e.as_slice();
    let mut h = 0;
    for k in 0..a.len() {
        if a[k] == 0 {
            continue;
        }
        for l in 0..k {
            h += a[k] * a[l] * form.entry(k, l);
        }
    }
    h
}

/// Sparse element of the supertorus: basis monomials with nonzero [`QScalar`] coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SuperPoly {
    shape: GradedShape,
    terms: BTreeMap<LatticeVec, QScalar>,
}

impl SuperPoly {
    pub fn zero(shape: GradedShape) -> Self {
        Self { shape, terms: BTreeMap::new() }
    }

    pub fn one(shape: GradedShape) -> Self {
        Self::constant(shape, QScalar::one())
    }

    pub fn constant(shape: GradedShape, c: QScalar) -> Self {
        Self::term(shape, LatticeVec::zero(shape.dim()), c)
    }

    /// `c * X^e`. Panics if `e` is not a basis monomial for `shape`.
    pub fn term(shape: GradedShape, e: LatticeVec, c: QScalar) -> Self {
        assert!(e.is_basis_monomial(shape), "{e} is not a basis monomial");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { shape, terms }
    }

    /// The basis monomial `X^e`.
    pub fn monomial(shape: GradedShape, e: LatticeVec) -> Self {
        Self::term(shape, e, QScalar::one())
    }

    pub fn generator(shape: GradedShape, i: usize) -> Self {
        Self::monomial(shape, LatticeVec::basis(shape.dim(), i))
    }

    pub fn try_from_terms<I>(shape: GradedShape, iter: I) -> Result<Self, TorusError>
    where
        I: IntoIterator<Item = (LatticeVec, QScalar)>,
    {
        let mut p = Self::zero(shape);
        for (e, c) in iter {
            if !e.is_basis_monomial(shape) {
                return Err(TorusError::NotBasisMonomial(e));
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    pub fn shape(&self) -> GradedShape {
        self.shape
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

    pub fn terms(&self) -> impl Iterator<Item = (&LatticeVec, &QScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &LatticeVec) -> QScalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// If this is a single term `c X^e`, returns it.
    pub fn as_term(&self) -> Option<(&LatticeVec, &QScalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub(crate) fn add_term(&mut self, e: LatticeVec, c: &QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        let mut out = Self::zero(self.shape);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), &(v * c));
        }
        out
    }

    /// Multiplies every coefficient by `q^(half_exp/2)`.
    pub fn shift_q(&self, half_exp: i64) -> Self {
        Self { shape: self.shape, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.shift(half_exp))).collect() }
    }

    pub fn signed(&self, negative: bool) -> Self {
        if negative {
            -self
        } else {
            self.clone()
        }
    }

    /// Terms whose odd part is zero.
    pub fn pure_even_part(&self) -> Self {
        self.filter(|e| e.is_pure_even(self.shape))
    }

    pub fn filter(&self, mut keep: impl FnMut(&LatticeVec) -> bool) -> Self {
        Self {
            shape: self.shape,
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(QScalar::is_integral)
    }

    /// Specialization `q^(1/2) -> 1` (coefficients become constants).
    pub fn at_q_one(&self) -> Self {
        let mut out = Self::zero(self.shape);
        for (e, c) in &self.terms {
            let v = c.at_one();
            out.add_term(e.clone(), &QScalar::monomial(v, 0));
        }
        out
    }

    /// Componentwise `(min, max)` of even exponents over all terms.
    pub fn even_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let n = self.shape.n;
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.even_part(self.shape).to_vec();
        let mut hi = lo.clone();
        for e in it {
            for i in 0..n {
                lo[i] = lo[i].min(e[i]);
                hi[i] = hi[i].max(e[i]);
            }
        }
        Some((lo, hi))
    }
}

impl fmt::Debug for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(e, c)| (e, c.to_string()))).finish()
    }
}

impl Add<&SuperPoly> for &SuperPoly {
    type Output = SuperPoly;
    fn add(self, rhs: &SuperPoly) -> SuperPoly {
        assert_eq!(self.shape, rhs.shape, "shape mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub<&SuperPoly> for &SuperPoly {
    type Output = SuperPoly;
    fn sub(self, rhs: &SuperPoly) -> SuperPoly {
        assert_eq!(self.shape, rhs.shape, "shape mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl Neg for &SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        SuperPoly { shape: self.shape, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: LatticeVec,
    coeff: QScalar,
}

impl Serialize for SuperPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&TermJson { exp: e.clone(), coeff: c.clone() })?;
        }
        seq.end()
    }
}

/// Term list as read from JSON, before the shape is known.
#[derive(Debug, Clone, Deserialize)]
#[serde(transparent)]
pub struct RawPoly(Vec<RawTerm>);

#[derive(Debug, Clone, Deserialize)]
struct RawTerm {
    exp: Vec<i64>,
    coeff: QScalar,
}

impl RawPoly {
    /// Validates dimensions, odd components, zero coefficients and duplicate keys.
    pub fn into_poly(self, shape: GradedShape) -> Result<SuperPoly, String> {
        let mut out = SuperPoly::zero(shape);
        for t in self.0 {
            if t.exp.len() != shape.dim() {
                return Err(format!("exponent {:?} has length {}, expected {}", t.exp, t.exp.len(), shape.dim()));
            }
            let e = LatticeVec(t.exp);
            if !e.is_basis_monomial(shape) {
                return Err(format!("exponent {e} has odd component outside {{0,1}}"));
            }
            if t.coeff.is_zero() {
                return Err(format!("zero coefficient at {e}"));
            }
            if out.terms.contains_key(&e) {
                return Err(format!("duplicate exponent {e}"));
            }
            out.terms.insert(e, t.coeff);
        }
        Ok(out)
    }
}

/// `T(Λ)` for a fixed shape and form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumTorus {
    shape: GradedShape,
    form: SkewForm,
}

/// Result of multiplying two basis monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoProduct {
    pub exp: LatticeVec,
    pub negative: bool,
    pub half_exp: i64,
}

fn graded_lex_key(e: &[i64]) -> (i64, &[i64]) {
    (e.iter().sum(), e)
}

impl QuantumTorus {
    pub fn new(shape: GradedShape, form: SkewForm) -> Result<Self, TorusError> {
        if form.dim() != shape.dim() {
            return Err(TorusError::DimensionMismatch { expected: shape.dim(), got: form.dim() });
        }
        Ok(Self { shape, form })
    }

    pub fn shape(&self) -> GradedShape {
        self.shape
    }

    pub fn form(&self) -> &SkewForm {
        &self.form
    }

    /// `X^e X^f`, or `None` when an odd component of `e + f` reaches 2.
    pub fn mono_product(&self, e: &LatticeVec, f: &LatticeVec) -> Option<MonoProduct> {
        let exp = e + f;
        if self.shape.odd_range().any(|j| exp[j] >= 2) {
            return None;
        }
        Some(MonoProduct { exp, negative: tau(e, f, self.shape) % 2 == 1, half_exp: self.form.eval(e, f) })
    }

    /// `X^e X^f` as a [`SuperPoly`] (zero when odd components collide).
    pub fn mono_mul(&self, e: &LatticeVec, f: &LatticeVec) -> SuperPoly {
        match self.mono_product(e, f) {
            None => SuperPoly::zero(self.shape),
            Some(p) => {
                let c = QScalar::q_pow(p.half_exp).signed(p.negative);
                SuperPoly::term(self.shape, p.exp, c)
            }
        }
    }

    pub fn mul(&self, a: &SuperPoly, b: &SuperPoly) -> SuperPoly {
        debug_assert_eq!(a.shape, self.shape);
        debug_assert_eq!(b.shape, self.shape);
        let shape = self.shape;
        // Precompute Λf and the odd mask of every right factor.
        let right: Vec<(&LatticeVec, &QScalar, Vec<i64>, u64)> =
            b.terms.iter().map(|(f, c)| (f, c, self.form.apply_right(f), f.odd_mask(shape))).collect();
        let mut acc: BTreeMap<LatticeVec, QScalar> = BTreeMap::new();
        for (e, ca) in &a.terms {
            let e_mask = e.odd_mask(shape);
            for (f, cb, lam_f, f_mask) in &right {
                if e_mask & f_mask != 0 {
                    continue;
                }
                let half: i64 = e.as_slice().iter().zip(lam_f).map(|(x, y)| x * y).sum();
                let negative = tau_masks(e_mask, *f_mask) % 2 == 1;
                let c = (ca * *cb).shift(half).signed(negative);
                let g = e + *f;
                match acc.get_mut(&g) {
                    Some(slot) => {
                        *slot += &c;
                        if slot.is_zero() {
                            acc.remove(&g);
                        }
                    }
                    None => {
                        acc.insert(g, c);
                    }
                }
            }
        }
        SuperPoly { shape, terms: acc }
    }

    /// `a^k` for `k >= 0`.
    pub fn pow(&self, a: &SuperPoly, k: u32) -> SuperPoly {
        let mut out = SuperPoly::one(self.shape);
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        out
    }

    /// `a b - b a`.
    pub fn commutator(&self, a: &SuperPoly, b: &SuperPoly) -> SuperPoly {
        &self.mul(a, b) - &self.mul(b, a)
    }

    /// Inverse of a single even monomial term `c X^e` when `c` is `±q^h`.
    pub fn invert_even_monomial(&self, p: &SuperPoly) -> Option<SuperPoly> {
        let (e, c) = p.as_term()?;
        if !e.is_pure_even(self.shape) {
            return None;
        }
        let (h, v) = c.as_monomial()?;
        let inv_c = QScalar::monomial(v.recip(), -h);
        // X^e X^-e = q^(Λ(e,-e)/2) = 1
        Some(SuperPoly::term(self.shape, -e, inv_c))
    }

    /// Returns `Q` with `Q · b = a` exactly.
    ///
    /// Let `b₀` be the pure-even part of `b`. Splitting `a`, `b` and the quotient
    /// by odd pattern, the layer of `Q` with odd pattern `S` satisfies
    /// `Q_S · b₀ = (layer S of a − Σ lower-degree contributions)`, a division
    /// by a pure-even element in a twisted Laurent ring with no zero divisors.
    /// Layers are processed by increasing odd degree. Inside a layer the
    /// greedy step divides graded-lex leading terms, and the quotient's even
    /// exponents are confined to `[min(layer) − min(b₀), max(layer) − max(b₀)]`;
    /// leaving that box means no Laurent quotient exists.
    pub fn exact_div_right(&self, a: &SuperPoly, b: &SuperPoly) -> Result<SuperPoly, DivisionError> {
        if b.is_zero() {
            return Err(DivisionError::DivisionByZero);
        }
        let shape = self.shape;
        let n = shape.n;
        let b0 = b.pure_even_part();
        if b0.is_zero() {
            return Err(DivisionError::ZeroDivisor);
        }
        let (lead_exp, lead_coeff) = b0
            .terms
            .iter()
            .max_by(|x, y| graded_lex_key(x.0.even_part(shape)).cmp(&graded_lex_key(y.0.even_part(shape))))
            .map(|(e, c)| (e.clone(), c.clone()))
            .expect("nonempty");
        let (b_lo, b_hi) = b0.even_box().expect("nonempty");

        let mut rem = a.clone();
        let mut quot = SuperPoly::zero(shape);
        let layer_key = |e: &LatticeVec| (e.odd_degree(shape), e.odd_mask(shape));

        while let Some(pattern) = rem.terms.keys().map(layer_key).min() {
            let mut layer = rem.filter(|e| layer_key(e) == pattern);
            let (a_lo, a_hi) = layer.even_box().expect("nonempty layer");
            let lo: Vec<i64> = (0..n).map(|i| a_lo[i] - b_lo[i]).collect();
            let hi: Vec<i64> = (0..n).map(|i| a_hi[i] - b_hi[i]).collect();
            let mut layer_quot = SuperPoly::zero(shape);
            while let Some((lt_exp, lt_coeff)) = layer
                .terms
                .iter()
                .max_by(|x, y| graded_lex_key(x.0.even_part(shape)).cmp(&graded_lex_key(y.0.even_part(shape))))
                .map(|(e, c)| (e.clone(), c.clone()))
            {
                let mut t = lt_exp.clone();
                for i in 0..n {
                    t.0[i] -= lead_exp[i];
                    if t[i] < lo[i] || t[i] > hi[i] {
                        return Err(DivisionError::NotDivisible);
                    }
                }
                let p = self.mono_product(&t, &lead_exp).expect("pure-even right factor");
                let denom = lead_coeff.shift(p.half_exp).signed(p.negative);
                let c = lt_coeff.div_exact(&denom)?;
                let step = SuperPoly::term(shape, t, c);
                layer = &layer - &self.mul(&step, &b0);
                layer_quot = &layer_quot + &step;
            }
            rem = &rem - &self.mul(&layer_quot, b);
            debug_assert!(rem.terms.keys().all(|e| layer_key(e) != pattern));
            quot = &quot + &layer_quot;
        }
        Ok(quot)
    }
}

fn tau_masks(e_mask: u64, f_mask: u64) -> u32 {
    // pairs (j1, j2), j1 in e, j2 in f, j1 > j2
    let mut count = 0;
    let mut bits = e_mask;
    while bits != 0 {
        let j1 = bits.trailing_zeros();
        let below = if j1 == 0 { 0 } else { f_mask & ((1u64 << j1) - 1) };
        count += below.count_ones();
        bits &= bits - 1;
    }
    count
}
