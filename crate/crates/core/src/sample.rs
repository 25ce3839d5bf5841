//! Random compatible seeds for property testing.
//!
//! The compatibility conditions are linear in the upper-triangular entries of
//! `Λ` once the diagonal values `d_j` are left free, so a compatible form is a
//! point of a rational nullspace that additionally has `d_j > 0`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::compat::{check_compatible, Mode};
use crate::quiver::ExtQuiver;
use crate::seed::QuantumSeed;
use crate::supertorus::SkewForm;

/// Random quiver with `n` even, `m` odd and `l` mutable vertices.
pub fn random_quiver<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, l: usize, max_mult: i64) -> ExtQuiver {
    let mut b = DMatrix::<i64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(-max_mult..=max_mult);
            b[(i, j)] = v;
            b[(j, i)] = -v;
        }
    }
    let mut odd_in = vec![BTreeSet::new(); n];
    let mut odd_out = vec![BTreeSet::new(); n];
    for k in 0..n {
        for o in 0..m {
            match rng.gen_range(0..3) {
                0 => {
                    odd_in[k].insert(o);
                }
                1 => {
                    odd_out[k].insert(o);
                }
                _ => {}
            }
        }
    }
    ExtQuiver::from_skew(&b, m, l, odd_in, odd_out).expect("valid by construction")
}

fn upper_index(dim: usize) -> Vec<(usize, usize)> {
    (0..dim).flat_map(|i| (i + 1..dim).map(move |j| (i, j))).collect()
}

/// Linear constraints on the upper-triangular entries of `Λ`.
fn constraints(q: &ExtQuiver) -> Vec<Vec<i64>> {
    let dim = q.n() + q.m();
    let idx = upper_index(dim);
    let pos = |i: usize, j: usize| -> (usize, i64) {
        if i < j {
            (idx.iter().position(|&p| p == (i, j)).expect("upper"), 1)
        } else {
            (idx.iter().position(|&p| p == (j, i)).expect("upper"), -1)
        }
    };
    let b = q.b_matrix();
    let mut rows = Vec::new();
    for j in 0..q.mutable() {
        for c in (0..dim).filter(|&c| c != j) {
            let mut row = vec![0i64; idx.len()];
            for i in (0..q.n()).filter(|&i| i != c) {
                let (p, s) = pos(i, c);
                row[p] += b[(i, j)] * s;
            }
            rows.push(row);
        }
    }
    let n = q.n();
    for p in q.two_paths() {
        let (a, c) = (n + p.odd_src, n + p.odd_dst);
        for i in (0..dim).filter(|&i| i != a && i != c) {
            let mut row = vec![0i64; idx.len()];
            let (pa, sa) = pos(i, a);
            let (pc, sc) = pos(i, c);
            row[pa] += sa;
            row[pc] += sc;
            rows.push(row);
        }
    }
    rows
}

/// Integer basis of the rational nullspace of `rows` (each row has `cols` entries).
pub fn integer_nullspace(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..cols {
                    let sub = &f * &a[row][c];
                    a[r][c] = &a[r][c] - &sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][f].clone();
            }
            let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            v.iter().map(|x| (x * &lcm).to_integer().to_i64().expect("small entries")).collect()
        })
        .collect()
}

fn form_from_upper(dim: usize, upper: &[i64]) -> SkewForm {
    let mut mat = DMatrix::<i64>::zeros(dim, dim);
    for (&(i, j), &v) in upper_index(dim).iter().zip(upper) {
        mat[(i, j)] = v;
        mat[(j, i)] = -v;
    }
    SkewForm::new(mat).expect("skew by construction")
}

/// Mode that can admit `q`: strict unless some mutable column of `B` vanishes.
pub fn natural_mode(q: &ExtQuiver) -> Mode {
    let b = q.b_matrix();
    if (0..q.mutable()).all(|j| b.column(j).iter().any(|&x| x != 0)) {
        Mode::Strict
    } else {
        Mode::Permissive
    }
}

/// Tries to find a compatible form for `q` by random small combinations of
/// the nullspace basis.
pub fn random_compatible_form<R: Rng + ?Sized>(rng: &mut R, q: &ExtQuiver, tries: usize) -> Option<SkewForm> {
    let dim = q.n() + q.m();
    let cols = dim * (dim - 1) / 2;
    let basis = integer_nullspace(&constraints(q), cols);
    if basis.is_empty() {
        return None;
    }
    let mode = natural_mode(q);
    for _ in 0..tries {
        let mut upper = vec![0i64; cols];
        for v in &basis {
            let c: i64 = rng.gen_range(-2..=2);
            for (u, x) in upper.iter_mut().zip(v) {
                *u += c * x;
            }
        }
        if upper.iter().any(|x| x.abs() > 1_000) {
            continue;
        }
        for sign in [1, -1] {
            let scaled: Vec<i64> = upper.iter().map(|x| x * sign).collect();
            let form = form_from_upper(dim, &scaled);
            if check_compatible(q, &form, mode).is_ok_and(|r| r.ok) {
                return Some(form);
            }
        }
    }
    None
}

/// Random compatible initial seed with `n ≤ max_n`, `m ≤ max_m`, `l ≤ n`.
pub fn random_seed<R: Rng + ?Sized>(rng: &mut R, max_n: usize, max_m: usize) -> QuantumSeed {
    loop {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(0..=max_m);
        let l = rng.gen_range(1..=n);
        let q = random_quiver(rng, n, m, l, 2);
        if let Some(form) = random_compatible_form(rng, &q, 20) {
            let mode = natural_mode(&q);
            return QuantumSeed::initial(q, form, mode).expect("checked compatible");
        }
    }
}

/// Random walk of at most `len` mutations, each chosen among the currently
/// allowed vertices. Returns the 0-based sequence; stops early when no vertex
/// is allowed.
pub fn random_allowed_walk<R: Rng + ?Sized>(rng: &mut R, seed: &QuantumSeed, len: usize) -> Vec<usize> {
    let mut q = seed.quiver().clone();
    let mut seq = Vec::new();
    for _ in 0..len {
        let allowed: Vec<usize> = (0..q.mutable()).filter(|&k| q.is_allowed_def(k)).collect();
        let Some(&k) = allowed.choose(rng) else {
            break;
        };
        q = q.mutate(k).expect("mutable");
        seq.push(k);
    }
    seq
}
