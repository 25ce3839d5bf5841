//! Laurent certification.
//!
//! Direction expansions `Y = Σ c_r X_j^r`, the central elements `P_{b^j}^r`
//! and the divisibility criterion for membership in the adjacent cluster
//! ring, together with a runner that certifies whole mutation sequences.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::quiver::ExtQuiver;
use crate::seed::{QuantumSeed, SeedError};
use crate::supertorus::{tau, LatticeVec, QuantumTorus, SkewForm, SuperPoly};

/// `Y = Σ_r c_r X_j^r` with each `c_r` free of `X_j` and written on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionExpansion {
    pub direction: usize,
    pub coeffs: BTreeMap<i64, SuperPoly>,
}

impl DirectionExpansion {
    /// `Σ c_r X^(r e_j)`.
    pub fn reassemble(&self, torus: &QuantumTorus) -> SuperPoly {
        let shape = torus.shape();
        let mut out = SuperPoly::zero(shape);
        for (&r, c) in &self.coeffs {
            let xr = SuperPoly::monomial(shape, LatticeVec::basis(shape.dim(), self.direction).scaled(r));
            out = &out + &torus.mul(c, &xr);
        }
        out
    }
}

pub fn expand_in_direction(torus: &QuantumTorus, y: &SuperPoly, j: usize) -> DirectionExpansion {
    let shape = torus.shape();
    let form = torus.form();
    let mut coeffs: BTreeMap<i64, SuperPoly> = BTreeMap::new();
    for (e, c) in y.terms() {
        let r = e[j];
        let rest = e.clone().with(j, 0);
        let xr = LatticeVec::basis(shape.dim(), j).scaled(r);
        // X^rest X^(r e_j) = q^(Λ(rest, r e_j)/2) X^e
        let term = SuperPoly::term(shape, rest.clone(), c.shift(-form.eval(&rest, &xr)));
        let slot = coeffs.entry(r).or_insert_with(|| SuperPoly::zero(shape));
        *slot = &*slot + &term;
    }
    DirectionExpansion { direction: j, coeffs }
}

/// gcd of the entries of `Λ b` (0 when that vector vanishes).
pub fn d_min(form: &SkewForm, b: &LatticeVec) -> u64 {
    form.apply_right(b).into_iter().fold(0i64, |g, x| g.gcd(&x)).unsigned_abs()
}

/// Even part of column `j` of the exchange matrix embedded in `Z^(n|m)`.
pub fn even_column(q: &ExtQuiver, j: usize) -> LatticeVec {
    let (col, _) = q.extended_b_column(j);
    let n = q.n();
    let v: Vec<i64> = col.as_slice().iter().enumerate().map(|(i, &x)| if i < n { x } else { 0 }).collect();
    LatticeVec::from_vec(v)
}

/// `P_{b^j}^r = Π_{p=1..r} (1 + q^((1−2p)d/2) X^(−b) + Σ_S (−1)^τ(e_k, e_k') X^(e_k + e_k'))`,
/// with `b` the even part of column `j` and the product ordered by increasing `p`.
pub fn p_element(torus: &QuantumTorus, q: &ExtQuiver, j: usize, r: u32) -> SuperPoly {
    let shape = torus.shape();
    let b = even_column(q, j);
    let d = d_min(torus.form(), &b) as i64;
    let (_, s) = q.extended_b_column(j);
    let mut odd_sum = SuperPoly::zero(shape);
    for (k, k2) in s {
        let (ek, ek2) = (LatticeVec::basis(shape.dim(), k), LatticeVec::basis(shape.dim(), k2));
        let negative = tau(&ek, &ek2, shape) % 2 == 1;
        odd_sum = &odd_sum + &SuperPoly::monomial(shape, &ek + &ek2).signed(negative);
    }
    let base = &SuperPoly::one(shape) + &odd_sum;
    let xb = SuperPoly::monomial(shape, -&b);
    let mut out = SuperPoly::one(shape);
    for p in 1..=r as i64 {
        let factor = &base + &xb.shift_q((1 - 2 * p) * d);
        out = torus.mul(&out, &factor);
    }
    out
}

/// `e_j' = −e_j + Σ_{b_ij > 0} b_ij e_i`.
pub fn exchange_exponent(q: &ExtQuiver, j: usize) -> LatticeVec {
    let b = even_column(q, j);
    let v: Vec<i64> = b.as_slice().iter().map(|&x| x.max(0)).collect();
    let v = LatticeVec::from_vec(v);
    let ej = LatticeVec::basis(v.len(), j);
    &v - &ej
}

/// Whether every `c_(−r)`, `r > 0`, is a multiple `Q · P^r` with `Q` having
/// coefficients in `Z[q^(±1/2)]`.
pub fn divisibility_check(torus: &QuantumTorus, q: &ExtQuiver, y: &SuperPoly, j: usize) -> bool {
    let exp = expand_in_direction(torus, y, j);
    exp.coeffs.range(..0).all(|(&r, c)| {
        let p = p_element(torus, q, j, (-r) as u32);
        matches!(torus.exact_div_right(c, &p), Ok(quot) if quot.is_integral())
    })
}

/// Per mutable direction `k`: whether `y` passes the divisibility criterion,
/// i.e. lies in the ring of the cluster adjacent in direction `k`. The
/// cluster is the one of `torus` with exchange data `q`.
pub fn adjacent_membership(torus: &QuantumTorus, q: &ExtQuiver, y: &SuperPoly) -> Vec<bool> {
    (0..q.mutable()).map(|k| y.is_integral() && divisibility_check(torus, q, y, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStep {
    pub vertex: usize,
    pub allowed: bool,
    pub divisible: bool,
    pub coefficients_integral: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentCertificate {
    pub sequence: Vec<usize>,
    pub steps: Vec<CertStep>,
    pub overall: bool,
}

impl LaurentCertificate {
    pub fn refused(&self) -> bool {
        self.steps.iter().any(|s| !s.allowed)
    }

    pub fn all_integral(&self) -> bool {
        self.steps.iter().all(|s| s.coefficients_integral)
    }
}

/// Runs a 0-based sequence; the first refusal or failed division ends the run.
pub fn laurent_certify(seed: &QuantumSeed, seq: &[usize]) -> (LaurentCertificate, QuantumSeed) {
    let mut cur = seed.clone();
    let mut steps = Vec::new();
    let mut overall = true;
    for &k in seq {
        match cur.mutate(k) {
            Ok(next) => {
                steps.push(CertStep {
                    vertex: k + 1,
                    allowed: true,
                    divisible: true,
                    coefficients_integral: next.var(k).is_integral(),
                    error: None,
                });
                cur = next;
            }
            Err(err) => {
                let allowed = !matches!(err, SeedError::NotAllowed(_) | SeedError::Frozen { .. });
                steps.push(CertStep {
                    vertex: k + 1,
                    allowed,
                    divisible: false,
                    coefficients_integral: false,
                    error: Some(err.to_string()),
                });
                overall = false;
                break;
            }
        }
    }
    let cert = LaurentCertificate { sequence: seq.iter().map(|k| k + 1).collect(), steps, overall };
    (cert, cur)
}

/// Outcome of walking every allowed sequence up to a fixed length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceScan {
    /// Mutations attempted, one per tree edge.
    pub mutations: usize,
    /// 1-based sequences whose last step failed; the subtree below is pruned.
    pub failures: Vec<Vec<usize>>,
    /// Failures other than a non-exact division.
    pub other_errors: usize,
}

/// Depth-first search over every allowed sequence of length at most `depth`.
pub fn scan_allowed_sequences(seed: &QuantumSeed, depth: usize) -> SequenceScan {
    fn go(s: &QuantumSeed, depth: usize, path: &mut Vec<usize>, out: &mut SequenceScan) {
        if depth == 0 {
            return;
        }
        for k in 0..s.quiver().mutable() {
            if !s.quiver().is_allowed_def(k) {
                continue;
            }
            out.mutations += 1;
            path.push(k + 1);
            match s.mutate(k) {
                Ok(next) => go(&next, depth - 1, path, out),
                Err(err) => {
                    if !matches!(err, SeedError::NotDivisible { .. }) {
                        out.other_errors += 1;
                    }
                    out.failures.push(path.clone());
                }
            }
            path.pop();
        }
    }
    let mut out = SequenceScan::default();
    go(seed, depth, &mut Vec::new(), &mut out);
    out
}

/// Rank-2 check for an arrow `x_i → x_j` of multiplicity `r`: the difference
/// `X_j'' − q^(−d/2) (X_i')^r X_j'` with `d = r λ_ij` must be a polynomial
/// in `X_j` with no `X_i` and integral coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rank2Report {
    pub i: usize,
    pub j: usize,
    pub r: u32,
    pub d: i64,
    pub no_xi: bool,
    pub nonnegative_xj: bool,
    pub integral: bool,
}

impl Rank2Report {
    pub fn holds(&self) -> bool {
        self.no_xi && self.nonnegative_xj && self.integral
    }
}

pub fn rank2_check(seed: &QuantumSeed, i: usize, j: usize) -> Result<Rank2Report, SeedError> {
    let r = seed.quiver().arrows(i, j);
    let d = r as i64 * seed.lambda().entry(i, j);
    let torus = seed.torus();
    let xi1 = seed.mutate(i)?.var(i).clone();
    let xj1 = seed.mutate(j)?.var(j).clone();
    let xj2 = seed.mutate(i)?.mutate(j)?.var(j).clone();
    let s1 = torus.mul(&torus.pow(&xi1, r), &xj1).shift_q(-d);
    let diff = &xj2 - &s1;
    let no_xi = diff.terms().all(|(e, _)| e[i] == 0);
    let nonnegative_xj = diff.terms().all(|(e, _)| e[j] >= 0);
    Ok(Rank2Report { i: i + 1, j: j + 1, r, d, no_xi, nonnegative_xj, integral: diff.is_integral() })
}
