//! Compatible pairs `(Λ, Q)` and the mutation of `Λ`.
//!
//! Condition A asks that `Bᵀ (Λ₁₁ Λ₁₂)` be a diagonal block `D₁₁` followed by
//! zeros. Condition B asks that for every 2-path `ξ_a → x_k → ξ_b` the columns
//! of `a` and `b` be opposite away from those two rows.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quiver::ExtQuiver;
use crate::supertorus::SkewForm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatError {
    #[error("form has dimension {got}, quiver needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Strict,
    /// Additionally accepts `d_j = 0` when column `j` of `B` is zero.
    Permissive,
}

/// One failed condition. Indices are 1-based lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Entry `(row, col)` of `Bᵀ (Λ₁₁ Λ₁₂)` off the diagonal is nonzero.
    OffDiagonal { row: usize, col: usize, value: i64 },
    /// Diagonal entry `d_column` is not accepted in this mode.
    NonPositiveD { column: usize, value: i64 },
    /// `λ_{i,a} ≠ −λ_{i,b}` for the 2-path `a → x_mid → b`.
    TwoPath { i: usize, a: usize, b: usize, mid: usize, lambda_ia: i64, lambda_ib: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatReport {
    pub ok: bool,
    pub mode: Mode,
    pub d_entries: Vec<i64>,
    pub violations: Vec<Violation>,
}

pub fn check_compatible(q: &ExtQuiver, form: &SkewForm, mode: Mode) -> Result<CompatReport, CompatError> {
    let (n, m, l) = (q.n(), q.m(), q.mutable());
    if form.dim() != n + m {
        return Err(CompatError::DimensionMismatch { expected: n + m, got: form.dim() });
    }
    let b = q.b_matrix();
    let top = form.matrix().rows(0, n).into_owned();
    let prod = b.transpose() * top;
    let mut violations = Vec::new();
    let mut d_entries = Vec::with_capacity(l);
    for j in 0..l {
        for c in 0..n + m {
            if c != j && prod[(j, c)] != 0 {
                violations.push(Violation::OffDiagonal { row: j + 1, col: c + 1, value: prod[(j, c)] });
            }
        }
        let d = prod[(j, j)];
        d_entries.push(d);
        let zero_column = b.column(j).iter().all(|&x| x == 0);
        let accepted = d > 0 || (mode == Mode::Permissive && d == 0 && zero_column);
        if !accepted {
            violations.push(Violation::NonPositiveD { column: j + 1, value: d });
        }
    }
    for p in q.two_paths() {
        let (a, bb) = (n + p.odd_src, n + p.odd_dst);
        for i in (0..n + m).filter(|&i| i != a && i != bb) {
            let (lia, lib) = (form.entry(i, a), form.entry(i, bb));
            if lia != -lib {
                violations.push(Violation::TwoPath {
                    i: i + 1,
                    a: a + 1,
                    b: bb + 1,
                    mid: p.mid + 1,
                    lambda_ia: lia,
                    lambda_ib: lib,
                });
            }
        }
    }
    Ok(CompatReport { ok: violations.is_empty(), mode, d_entries, violations })
}

/// `n × n` matrix: identity except column `k`, where `e_kk = −1` and
/// `e_ik = max(0, −ε b_ik)`.
pub fn e_matrix(b: &DMatrix<i64>, k: usize, eps: i64) -> DMatrix<i64> {
    let n = b.nrows();
    let mut e = DMatrix::identity(n, n);
    for i in 0..n {
        e[(i, k)] = if i == k { -1 } else { (-eps * b[(i, k)]).max(0) };
    }
    e
}

/// `l × l` matrix: identity except row `k`, where `f_kk = −1` and
/// `f_kj = max(0, ε b_kj)`.
pub fn f_matrix(b: &DMatrix<i64>, k: usize, eps: i64) -> DMatrix<i64> {
    let l = b.ncols();
    let mut f = DMatrix::identity(l, l);
    for j in 0..l {
        f[(k, j)] = if j == k { -1 } else { (eps * b[(k, j)]).max(0) };
    }
    f
}

/// Which side carries the transpose when conjugating `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conjugation {
    /// `Λ' = Êᵀ Λ Ê`.
    #[default]
    TransposeLeft,
    /// `Λ' = Ê Λ Êᵀ`, kept for comparison only.
    TransposeRight,
}

/// `Ê` is `E_ε` extended by the identity on the odd coordinates.
pub fn mutate_lambda(form: &SkewForm, b: &DMatrix<i64>, k: usize, eps: i64, order: Conjugation) -> SkewForm {
    let n = b.nrows();
    let dim = form.dim();
    let e = e_matrix(b, k, eps);
    let mut ext = DMatrix::<i64>::identity(dim, dim);
    ext.view_mut((0, 0), (n, n)).copy_from(&e);
    let lam = form.matrix();
    let out = match order {
        Conjugation::TransposeLeft => ext.transpose() * lam * &ext,
        Conjugation::TransposeRight => &ext * lam * ext.transpose(),
    };
    SkewForm::new(out).expect("congruence preserves skew-symmetry")
}
