//! Quantum super-seeds and their mutation.
//!
//! A seed stores its current quiver and form together with the cluster
//! variables written as [`SuperPoly`] elements of the initial torus. The
//! exchange numerator is assembled from frame monomials with nonnegative
//! exponents and the new variable is obtained by one exact right division by
//! the old one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::QScalar;
use crate::compat::{check_compatible, mutate_lambda, CompatError, CompatReport, Conjugation, Mode};
use crate::quiver::{Allowedness, ExtQuiver};
use crate::supertorus::{factor_ordered, tau, DivisionError, LatticeVec, QuantumTorus, RawPoly, SkewForm, SuperPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error("pair is not compatible in {:?} mode", .0.mode)]
    Incompatible(Box<CompatReport>),
    #[error(transparent)]
    Dimension(#[from] CompatError),
    #[error("vertex {vertex} is frozen")]
    Frozen { vertex: usize },
    #[error("mutation at vertex {} is not allowed", .0.vertex)]
    NotAllowed(Box<Allowedness>),
    #[error("exchange at vertex {vertex} is not an exact division: {source}")]
    NotDivisible { vertex: usize, source: DivisionError },
    #[error("frame exponent {exponent} at index {index} needs the inverse of a non-monomial variable")]
    NegativePower { index: usize, exponent: i64 },
    #[error("mutated pair at vertex {vertex} is no longer compatible")]
    CompatibilityLost { vertex: usize, report: Box<CompatReport> },
    #[error("malformed seed: {0}")]
    Malformed(String),
}

/// One applied mutation. `vertex` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub vertex: usize,
    pub allowed: bool,
    pub divisible: bool,
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumSeed {
    quiver: ExtQuiver,
    lambda: SkewForm,
    torus: QuantumTorus,
    mode: Mode,
    vars: Vec<SuperPoly>,
    trace: Vec<TraceStep>,
}

/// Input file format: a quiver and a form, optionally with the check mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedInput {
    pub quiver: ExtQuiver,
    pub lambda: SkewForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
}

impl QuantumSeed {
    pub fn initial(quiver: ExtQuiver, lambda: SkewForm, mode: Mode) -> Result<Self, SeedError> {
        let report = check_compatible(&quiver, &lambda, mode)?;
        if !report.ok {
            return Err(SeedError::Incompatible(Box::new(report)));
        }
        Ok(Self::initial_unchecked(quiver, lambda, mode))
    }

    /// Skips the compatibility check; the form must still have dimension `n + m`.
    pub fn initial_unchecked(quiver: ExtQuiver, lambda: SkewForm, mode: Mode) -> Self {
        let shape = quiver.shape();
        let torus = QuantumTorus::new(shape, lambda.clone()).expect("dimension checked by caller");
        let vars = (0..shape.dim()).map(|i| SuperPoly::generator(shape, i)).collect();
        Self { quiver, lambda, torus, mode, vars, trace: Vec::new() }
    }

    pub fn from_input(input: SeedInput, default_mode: Mode) -> Result<Self, SeedError> {
        Self::initial(input.quiver, input.lambda, input.mode.unwrap_or(default_mode))
    }

    pub fn quiver(&self) -> &ExtQuiver {
        &self.quiver
    }

    /// The current form `Λ_M`.
    pub fn lambda(&self) -> &SkewForm {
        &self.lambda
    }

    pub fn lambda_init(&self) -> &SkewForm {
        self.torus.form()
    }

    pub fn torus(&self) -> &QuantumTorus {
        &self.torus
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn vars(&self) -> &[SuperPoly] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &SuperPoly {
        &self.vars[i]
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    /// Frozen even vertices and every odd index.
    pub fn is_frozen(&self, i: usize) -> bool {
        !self.quiver.is_mutable(i)
    }

    fn dim(&self) -> usize {
        self.vars.len()
    }

    /// `M(c) = q^(h/2) X_1^(c_1) ⋯ X_(n+m)^(c_(n+m))` with the product taken in
    /// the initial torus and `h` the ordering exponent of the current form.
    pub fn frame_monomial(&self, c: &LatticeVec) -> Result<SuperPoly, SeedError> {
        let shape = self.torus.shape();
        let mut out = SuperPoly::one(shape);
        for (i, &ci) in c.as_slice().iter().enumerate() {
            if shape.is_odd(i) && !(ci == 0 || ci == 1) {
                return Err(SeedError::NegativePower { index: i + 1, exponent: ci });
            }
            let base = if ci < 0 {
                self.torus
                    .invert_even_monomial(&self.vars[i])
                    .ok_or(SeedError::NegativePower { index: i + 1, exponent: ci })?
            } else {
                self.vars[i].clone()
            };
            for _ in 0..ci.unsigned_abs() {
                out = self.torus.mul(&out, &base);
            }
        }
        Ok(out.shift_q(factor_ordered(&self.lambda, c)))
    }

    /// The exponent vectors `v` of the exchange relation at `k` with their signs,
    /// each standing for `M(−e_k + v)`.
    pub fn exchange_terms(&self, k: usize) -> Vec<(bool, LatticeVec)> {
        let shape = self.torus.shape();
        let n = shape.n;
        let b = self.quiver.skew_matrix();
        let mut v_in = LatticeVec::zero(shape.dim());
        let mut v_out = LatticeVec::zero(shape.dim());
        for i in 0..n {
            let bik = b[(i, k)];
            if bik > 0 {
                v_in = v_in.with(i, bik);
            } else if bik < 0 {
                v_out = v_out.with(i, -bik);
            }
        }
        let mut terms = vec![(false, v_in.clone()), (false, v_out)];
        for p in self.quiver.two_paths_at(k) {
            let (a, c) = (n + p.odd_src, n + p.odd_dst);
            let ea = LatticeVec::basis(shape.dim(), a);
            let ec = LatticeVec::basis(shape.dim(), c);
            let v = v_in.clone().with(a, 1).with(c, 1);
            terms.push((tau(&ea, &ec, shape) % 2 == 1, v));
        }
        terms
    }

    /// `R` with `X_k' · X_k = R`: each `M(−e_k + v)` is rewritten as
    /// `q^(Λ(v, e_k)/2) M(v) X_k^(-1)`.
    pub fn exchange_numerator(&self, k: usize) -> Result<SuperPoly, SeedError> {
        let shape = self.torus.shape();
        let ek = LatticeVec::basis(shape.dim(), k);
        let mut r = SuperPoly::zero(shape);
        for (negative, v) in self.exchange_terms(k) {
            let term = self.frame_monomial(&v)?.shift_q(self.lambda.eval(&v, &ek)).signed(negative);
            r = &r + &term;
        }
        Ok(r)
    }

    /// Mutation at the even vertex `k` (0-based).
    pub fn mutate(&self, k: usize) -> Result<Self, SeedError> {
        if k >= self.dim() || self.is_frozen(k) {
            return Err(SeedError::Frozen { vertex: k + 1 });
        }
        if !self.quiver.is_allowed_def(k) {
            return Err(SeedError::NotAllowed(Box::new(self.quiver.allowedness(k))));
        }
        self.mutate_unchecked(k)
    }

    /// Mutation without the allowedness test.
    pub fn mutate_unchecked(&self, k: usize) -> Result<Self, SeedError> {
        if k >= self.dim() || self.is_frozen(k) {
            return Err(SeedError::Frozen { vertex: k + 1 });
        }
        let allowed = self.quiver.is_allowed_def(k);
        let numerator = self.exchange_numerator(k)?;
        let new_var = self
            .torus
            .exact_div_right(&numerator, &self.vars[k])
            .map_err(|source| SeedError::NotDivisible { vertex: k + 1, source })?;
        let quiver = self.quiver.mutate(k).map_err(|_| SeedError::Frozen { vertex: k + 1 })?;
        let lambda = mutate_lambda(&self.lambda, &self.quiver.b_matrix(), k, 1, Conjugation::TransposeLeft);
        let report = check_compatible(&quiver, &lambda, self.mode)?;
        if !report.ok {
            return Err(SeedError::CompatibilityLost { vertex: k + 1, report: Box::new(report) });
        }
        let mut vars = self.vars.clone();
        let integral = new_var.is_integral();
        vars[k] = new_var;
        let mut trace = self.trace.clone();
        trace.push(TraceStep { vertex: k + 1, allowed, divisible: true, integral });
        Ok(Self { quiver, lambda, torus: self.torus.clone(), mode: self.mode, vars, trace })
    }

    /// Applies a 0-based sequence of mutations.
    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self, SeedError> {
        let mut s = self.clone();
        for &k in seq {
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    /// Compares `μ_k μ_k` against the closed forms for the second mutation.
    pub fn double_mutation_check(&self, k: usize) -> Result<DoubleMutationReport, SeedError> {
        let once = self.mutate(k)?;
        let twice = once.mutate(k)?;
        let shape = self.torus.shape();
        let n = shape.n;
        let ek = LatticeVec::basis(shape.dim(), k);
        let mut correction = SuperPoly::zero(shape);
        let mut nilpotent = SuperPoly::zero(shape);
        for p in once.quiver.two_paths_at(k) {
            let (a, c) = (n + p.odd_src, n + p.odd_dst);
            let ea = LatticeVec::basis(shape.dim(), a);
            let ec = LatticeVec::basis(shape.dim(), c);
            let negative = tau(&ea, &ec, shape) % 2 == 1;
            let odd = &ea + &ec;
            correction = &correction + &self.frame_monomial(&(&ek + &odd))?.signed(negative);
            nilpotent = &nilpotent + &self.frame_monomial(&odd)?.signed(negative);
        }
        let xk = &self.vars[k];
        let xk2 = &twice.vars[k];
        let one_plus = &SuperPoly::one(shape) + &nilpotent;
        Ok(DoubleMutationReport {
            vertex: k + 1,
            difference_identity: (xk2 - xk) == correction,
            recovery_as_printed: &self.torus.mul(xk2, &one_plus) == xk,
            recovery_inverse: &self.torus.mul(xk, &one_plus) == xk2,
            lambda_restored: twice.lambda == self.lambda,
        })
    }

    /// The exchange relation with `q^(1/2) = 1` and `Λ = 0`, evaluated on the
    /// current variables specialized the same way.
    pub fn classical_exchange(&self, k: usize) -> Result<SuperPoly, SeedError> {
        if k >= self.dim() || self.is_frozen(k) {
            return Err(SeedError::Frozen { vertex: k + 1 });
        }
        let shape = self.torus.shape();
        let flat = QuantumTorus::new(shape, SkewForm::zero(shape.dim())).expect("matching dimension");
        let x: Vec<SuperPoly> = self.vars.iter().map(SuperPoly::at_q_one).collect();
        let b = self.quiver.skew_matrix();
        let mut prod_in = SuperPoly::one(shape);
        let mut prod_out = SuperPoly::one(shape);
        for i in 0..shape.n {
            let bik = b[(i, k)];
            if bik > 0 {
                prod_in = flat.mul(&prod_in, &flat.pow(&x[i], bik as u32));
            } else if bik < 0 {
                prod_out = flat.mul(&prod_out, &flat.pow(&x[i], (-bik) as u32));
            }
        }
        let sum_of = |odds: &std::collections::BTreeSet<usize>| {
            odds.iter().fold(SuperPoly::zero(shape), |acc, &o| &acc + &x[shape.n + o])
        };
        let xi_in = sum_of(self.quiver.odd_in(k));
        let xi_out = sum_of(self.quiver.odd_out(k));
        let odd_term = flat.mul(&flat.mul(&xi_in, &xi_out), &prod_in);
        let numerator = &(&prod_in + &prod_out) + &odd_term;
        flat.exact_div_right(&numerator, &x[k]).map_err(|source| SeedError::NotDivisible { vertex: k + 1, source })
    }

    /// Pretty or LaTeX rendering of every variable.
    pub fn render_vars(&self, style: crate::render::Style) -> Vec<String> {
        self.vars.iter().map(|v| crate::render::render(&self.torus, v, style)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleMutationReport {
    pub vertex: usize,
    /// `X_k'' − X_k` equals the signed sum of `M(e_k + e_a + e_b)` over the
    /// 2-paths at `k` after one mutation.
    pub difference_identity: bool,
    /// `X_k'' (1 + N) = X_k` with `N` the signed sum of `M(e_a + e_b)`.
    pub recovery_as_printed: bool,
    /// `X_k (1 + N) = X_k''`, i.e. `X_k = X_k'' (1 + N)^(-1)`.
    pub recovery_inverse: bool,
    pub lambda_restored: bool,
}

#[derive(Serialize)]
struct SeedJsonOut<'a> {
    quiver: &'a ExtQuiver,
    lambda: &'a SkewForm,
    lambda_init: &'a SkewForm,
    mode: Mode,
    vars: &'a [SuperPoly],
    trace: &'a [TraceStep],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedJsonIn {
    quiver: ExtQuiver,
    lambda: SkewForm,
    lambda_init: SkewForm,
    mode: Mode,
    vars: Vec<RawPoly>,
    #[serde(default)]
    trace: Vec<TraceStep>,
}

impl Serialize for QuantumSeed {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeedJsonOut {
            quiver: &self.quiver,
            lambda: &self.lambda,
            lambda_init: self.torus.form(),
            mode: self.mode,
            vars: &self.vars,
            trace: &self.trace,
        }
        .serialize(serializer)
    }
}

impl TryFrom<SeedJsonIn> for QuantumSeed {
    type Error = SeedError;

    fn try_from(j: SeedJsonIn) -> Result<Self, SeedError> {
        let shape = j.quiver.shape();
        if j.lambda_init.dim() != shape.dim() {
            return Err(SeedError::Malformed(format!("lambda_init has dimension {}", j.lambda_init.dim())));
        }
        let report = check_compatible(&j.quiver, &j.lambda, j.mode)?;
        if !report.ok {
            return Err(SeedError::Incompatible(Box::new(report)));
        }
        if j.vars.len() != shape.dim() {
            return Err(SeedError::Malformed(format!("expected {} variables, got {}", shape.dim(), j.vars.len())));
        }
        let vars = j
            .vars
            .into_iter()
            .map(|p| p.into_poly(shape))
            .collect::<Result<Vec<_>, _>>()
            .map_err(SeedError::Malformed)?;
        for (i, v) in vars.iter().enumerate() {
            if !j.quiver.is_mutable(i) && v != &SuperPoly::generator(shape, i) {
                return Err(SeedError::Malformed(format!("frozen variable {} is not its generator", i + 1)));
            }
        }
        let torus = QuantumTorus::new(shape, j.lambda_init).map_err(|e| SeedError::Malformed(e.to_string()))?;
        Ok(Self { quiver: j.quiver, lambda: j.lambda, torus, mode: j.mode, vars, trace: j.trace })
    }
}

impl<'de> Deserialize<'de> for QuantumSeed {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = SeedJsonIn::deserialize(deserializer)?;
        QuantumSeed::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Helper for tests and examples: `c X^e` with an integer coefficient.
pub fn int_term(seed: &QuantumSeed, exp: &[i64], c: i64) -> SuperPoly {
    SuperPoly::term(seed.torus.shape(), LatticeVec::from_vec(exp.to_vec()), QScalar::from_int(c))
}
