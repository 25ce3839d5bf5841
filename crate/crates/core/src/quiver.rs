//! Extended quivers: `n` even vertices with arrow multiplicities plus `m` odd
//! vertices attached through the incidence sets `I_k` (odd → `x_k`) and `J_k`
//! (`x_k` → odd).
//!
//! Indices are 0-based in this module; the JSON form is 1-based.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::supertorus::{GradedShape, LatticeVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("quiver needs at least one even vertex")]
    NoEvenVertex,
    #[error("mutable count {l} exceeds even vertex count {n}")]
    TooManyMutable { l: usize, n: usize },
    #[error("{what} index {index} out of range 1..={max}")]
    IndexOutOfRange { what: &'static str, index: usize, max: usize },
    #[error("loop at even vertex {0}")]
    Loop(usize),
    #[error("2-cycle between even vertices {0} and {1}")]
    TwoCycle(usize, usize),
    #[error("duplicate arrow entry {0} -> {1}")]
    DuplicateArrow(usize, usize),
    #[error("odd vertex {odd} is both in I_{vertex} and J_{vertex}")]
    OddOverlap { vertex: usize, odd: usize },
    #[error("vertex {0} is frozen")]
    MutationOnFrozen(usize),
}

/// `ξ_odd_src → x_mid → ξ_odd_dst`, all 0-based (odd indices within `0..m`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TwoPath {
    pub odd_src: usize,
    pub mid: usize,
    pub odd_dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtQuiver {
    n: usize,
    m: usize,
    l: usize,
    arrows: Vec<Vec<u32>>,
    odd_in: Vec<BTreeSet<usize>>,
    odd_out: Vec<BTreeSet<usize>>,
}

impl ExtQuiver {
    /// Empty quiver with `n` even, `m` odd and `l` mutable vertices.
    pub fn new(n: usize, m: usize, l: usize) -> Result<Self, QuiverError> {
        if n == 0 {
            return Err(QuiverError::NoEvenVertex);
        }
        if l > n {
            return Err(QuiverError::TooManyMutable { l, n });
        }
        Ok(Self {
            n,
            m,
            l,
            arrows: vec![vec![0; n]; n],
            odd_in: vec![BTreeSet::new(); n],
            odd_out: vec![BTreeSet::new(); n],
        })
    }

    /// Builds a quiver from a skew-symmetric exchange matrix (`a_ij = max(b_ij, 0)`).
    pub fn from_skew(
        b: &DMatrix<i64>,
        m: usize,
        l: usize,
        odd_in: Vec<BTreeSet<usize>>,
        odd_out: Vec<BTreeSet<usize>>,
    ) -> Result<Self, QuiverError> {
        let n = b.nrows();
        let mut q = Self::new(n, m, l)?;
        for i in 0..n {
            for j in 0..n {
                if b[(i, j)] != -b[(j, i)] {
                    return Err(QuiverError::TwoCycle(i + 1, j + 1));
                }
                q.arrows[i][j] = b[(i, j)].max(0) as u32;
            }
        }
        if odd_in.len() != n || odd_out.len() != n {
            return Err(QuiverError::IndexOutOfRange {
                what: "vertex",
                index: odd_in.len().max(odd_out.len()),
                max: n,
            });
        }
        q.odd_in = odd_in;
        q.odd_out = odd_out;
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), QuiverError> {
        for i in 0..self.n {
            if self.arrows[i][i] != 0 {
                return Err(QuiverError::Loop(i + 1));
            }
            for j in 0..self.n {
                if self.arrows[i][j] > 0 && self.arrows[j][i] > 0 {
                    return Err(QuiverError::TwoCycle(i + 1, j + 1));
                }
            }
            for &o in self.odd_in[i].iter().chain(&self.odd_out[i]) {
                if o >= self.m {
                    return Err(QuiverError::IndexOutOfRange { what: "odd vertex", index: o + 1, max: self.m });
                }
            }
            if let Some(&o) = self.odd_in[i].intersection(&self.odd_out[i]).next() {
                return Err(QuiverError::OddOverlap { vertex: i + 1, odd: o + 1 });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mutable(&self) -> usize {
        self.l
    }

    pub fn shape(&self) -> GradedShape {
        GradedShape { n: self.n, m: self.m }
    }

    pub fn is_mutable(&self, k: usize) -> bool {
        k < self.l
    }

    pub fn arrows(&self, i: usize, j: usize) -> u32 {
        self.arrows[i][j]
    }

    pub fn set_arrows(&mut self, i: usize, j: usize, mult: u32) {
        self.arrows[i][j] = mult;
    }

    pub fn odd_in(&self, k: usize) -> &BTreeSet<usize> {
        &self.odd_in[k]
    }

    pub fn odd_out(&self, k: usize) -> &BTreeSet<usize> {
        &self.odd_out[k]
    }

    pub fn odd_in_mut(&mut self, k: usize) -> &mut BTreeSet<usize> {
        &mut self.odd_in[k]
    }

    pub fn odd_out_mut(&mut self, k: usize) -> &mut BTreeSet<usize> {
        &mut self.odd_out[k]
    }

    /// Full skew-symmetric `n × n` matrix `b_ij = a_ij − a_ji`.
    pub fn skew_matrix(&self) -> DMatrix<i64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.arrows[i][j] as i64 - self.arrows[j][i] as i64)
    }

    /// The `n × l` exchange matrix.
    pub fn b_matrix(&self) -> DMatrix<i64> {
        self.skew_matrix().columns(0, self.l).into_owned()
    }

    /// Column `j` over all `n + m` rows: odd rows are `+1` for `ξ → x_j` and
    /// `−1` for `x_j → ξ`. Also returns the set `S` of lattice index pairs
    /// `(k, k')` with row `k` equal to `+1` and row `k'` equal to `−1`.
    pub fn extended_b_column(&self, j: usize) -> (LatticeVec, Vec<(usize, usize)>) {
        let mut v = vec![0i64; self.n + self.m];
        for i in 0..self.n {
            v[i] = self.arrows[i][j] as i64 - self.arrows[j][i] as i64;
        }
        for &o in &self.odd_in[j] {
            v[self.n + o] = 1;
        }
        for &o in &self.odd_out[j] {
            v[self.n + o] = -1;
        }
        let s = self.odd_in[j]
            .iter()
            .flat_map(|&a| self.odd_out[j].iter().map(move |&b| (a, b)))
            .map(|(a, b)| (self.n + a, self.n + b))
            .collect();
        (LatticeVec::from_vec(v), s)
    }

    /// All odd–even–odd 2-paths ordered by `(mid, src, dst)`.
    pub fn two_paths(&self) -> Vec<TwoPath> {
        (0..self.n).flat_map(|k| self.two_paths_at(k)).collect()
    }

    pub fn two_paths_at(&self, k: usize) -> Vec<TwoPath> {
        self.odd_in[k]
            .iter()
            .flat_map(|&i| self.odd_out[k].iter().map(move |&j| TwoPath { odd_src: i, mid: k, odd_dst: j }))
            .collect()
    }

    /// Even vertices `ℓ` with an arrow `x_k → x_ℓ`.
    pub fn successors(&self, k: usize) -> Vec<usize> {
        (0..self.n).filter(|&l| self.arrows[k][l] > 0).collect()
    }

    /// Mutation at the even vertex `k`.
    ///
    /// Odd data is propagated along the arrows `x_k → x_ℓ` of the input quiver,
    /// then the incidences at `k` are reversed and odd vertices that end up
    /// both in `I_ℓ` and `J_ℓ` lose both incidences.
    pub fn mutate(&self, k: usize) -> Result<Self, QuiverError> {
        if !self.is_mutable(k) {
            return Err(QuiverError::MutationOnFrozen(k + 1));
        }
        let n = self.n;
        let b = self.skew_matrix();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let bij = if i == k || j == k {
                    -b[(i, j)]
                } else {
                    let (bik, bkj) = (b[(i, k)], b[(k, j)]);
                    b[(i, j)] + bik.signum() * (bik * bkj).max(0)
                };
                out.arrows[i][j] = bij.max(0) as u32;
            }
        }
        if !self.odd_in[k].is_empty() && !self.odd_out[k].is_empty() {
            for l in self.successors(k) {
                out.odd_in[l].extend(self.odd_in[k].iter().copied());
                out.odd_out[l].extend(self.odd_out[k].iter().copied());
            }
        }
        std::mem::swap(&mut out.odd_in[k], &mut out.odd_out[k]);
        for l in 0..n {
            let both: Vec<usize> = out.odd_in[l].intersection(&out.odd_out[l]).copied().collect();
            for o in both {
                out.odd_in[l].remove(&o);
                out.odd_out[l].remove(&o);
            }
        }
        Ok(out)
    }

    /// Allowedness read directly off the mutated quiver.
    ///
    /// For every `ℓ` with `x_k → x_ℓ`, each `ξ_i` in `I_ℓ ∪ I_k` must reach each
    /// `ξ_j` in `J_ℓ ∪ J_k` through `x_ℓ` in `μ_k(Q)`. Pairs whose two opposite
    /// 2-paths both exist at `x_ℓ` after rule 1 are removed by rule 3 and so
    /// are not required.
    pub fn is_allowed_def(&self, k: usize) -> bool {
        let Ok(mutated) = self.mutate(k) else {
            return false;
        };
        let (ik, jk) = (&self.odd_in[k], &self.odd_out[k]);
        let propagate = !ik.is_empty() && !jk.is_empty();
        self.successors(k).into_iter().all(|l| {
            let ui: BTreeSet<usize> = self.odd_in[l].union(ik).copied().collect();
            let uj: BTreeSet<usize> = self.odd_out[l].union(jk).copied().collect();
            let cancelled: BTreeSet<usize> = if propagate {
                ui.intersection(&uj).copied().collect()
            } else {
                self.odd_in[l].intersection(&self.odd_out[l]).copied().collect()
            };
            ui.iter().all(|&i| {
                uj.iter().all(|&j| {
                    (cancelled.contains(&i) && cancelled.contains(&j))
                        || (mutated.odd_in[l].contains(&i) && mutated.odd_out[l].contains(&j))
                })
            })
        })
    }

    /// Allowedness via the five combinatorial conditions.
    pub fn is_allowed_lemma(&self, k: usize) -> bool {
        self.is_mutable(k) && self.lemma_checks(k).iter().all(|c| c.satisfied)
    }

    pub fn lemma_checks(&self, k: usize) -> Vec<LemmaCheck> {
        let (ik, jk) = (&self.odd_in[k], &self.odd_out[k]);
        self.successors(k)
            .into_iter()
            .map(|l| {
                let (il, jl) = (&self.odd_in[l], &self.odd_out[l]);
                let a = ik == il;
                let b = jk == jl;
                let c = ik.is_empty() && jk.is_empty();
                let d = ik == jl && jk == il;
                let e = il.is_empty() && jl.is_empty();
                LemmaCheck { target: l + 1, a, b, c, d, e, satisfied: a || b || c || d || e }
            })
            .collect()
    }

    /// Both allowedness verdicts with the per-target condition table (1-based).
    pub fn allowedness(&self, k: usize) -> Allowedness {
        let frozen = !self.is_mutable(k);
        Allowedness {
            vertex: k + 1,
            frozen,
            allowed_def: !frozen && self.is_allowed_def(k),
            allowed_lemma: !frozen && self.is_allowed_lemma(k),
            checks: if frozen { Vec::new() } else { self.lemma_checks(k) },
        }
    }
}

/// Lemma conditions for one target `x_ℓ` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub target: usize,
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allowedness {
    pub vertex: usize,
    pub frozen: bool,
    pub allowed_def: bool,
    pub allowed_lemma: bool,
    pub checks: Vec<LemmaCheck>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuiverJson {
    n: usize,
    m: usize,
    mutable: usize,
    #[serde(default)]
    even_arrows: Vec<[usize; 3]>,
    #[serde(default)]
    odd_in: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    odd_out: BTreeMap<String, Vec<usize>>,
}

fn check_index(what: &'static str, index: usize, max: usize) -> Result<usize, QuiverError> {
    if index == 0 || index > max {
        Err(QuiverError::IndexOutOfRange { what, index, max })
    } else {
        Ok(index - 1)
    }
}

fn parse_incidence(map: &BTreeMap<String, Vec<usize>>, n: usize, m: usize) -> Result<Vec<BTreeSet<usize>>, String> {
    let mut sets = vec![BTreeSet::new(); n];
    for (key, odds) in map {
        let k: usize = key.parse().map_err(|_| format!("vertex key {key:?} is not an integer"))?;
        let k = check_index("vertex", k, n).map_err(|e| e.to_string())?;
        for &o in odds {
            let o = check_index("odd vertex", o, m).map_err(|e| e.to_string())?;
            sets[k].insert(o);
        }
    }
    Ok(sets)
}

impl TryFrom<QuiverJson> for ExtQuiver {
    type Error = String;

    fn try_from(j: QuiverJson) -> Result<Self, String> {
        let mut q = ExtQuiver::new(j.n, j.m, j.mutable).map_err(|e| e.to_string())?;
        for [from, to, mult] in j.even_arrows {
            let a = check_index("vertex", from, j.n).map_err(|e| e.to_string())?;
            let b = check_index("vertex", to, j.n).map_err(|e| e.to_string())?;
            if q.arrows[a][b] != 0 {
                return Err(QuiverError::DuplicateArrow(from, to).to_string());
            }
            q.arrows[a][b] = u32::try_from(mult).map_err(|_| format!("multiplicity {mult} too large"))?;
        }
        q.odd_in = parse_incidence(&j.odd_in, j.n, j.m)?;
        q.odd_out = parse_incidence(&j.odd_out, j.n, j.m)?;
        q.validate().map_err(|e| e.to_string())?;
        Ok(q)
    }
}

impl From<&ExtQuiver> for QuiverJson {
    fn from(q: &ExtQuiver) -> Self {
        let mut even_arrows = Vec::new();
        for i in 0..q.n {
            for j in 0..q.n {
                if q.arrows[i][j] > 0 {
                    even_arrows.push([i + 1, j + 1, q.arrows[i][j] as usize]);
                }
            }
        }
        let incidence = |sets: &[BTreeSet<usize>]| {
            sets.iter()
                .enumerate()
                .filter(|(_, s)| !s.is_empty())
                .map(|(k, s)| ((k + 1).to_string(), s.iter().map(|o| o + 1).collect()))
                .collect()
        };
        QuiverJson {
            n: q.n,
            m: q.m,
            mutable: q.l,
            even_arrows,
            odd_in: incidence(&q.odd_in),
            odd_out: incidence(&q.odd_out),
        }
    }
}

impl Serialize for ExtQuiver {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuiverJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtQuiver {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = QuiverJson::deserialize(deserializer)?;
        ExtQuiver::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// A `(quiver, vertex)` case where the two allowedness tests disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub quiver: ExtQuiver,
    pub analysis: Allowedness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialReport {
    pub max_n: usize,
    pub max_m: usize,
    pub max_mult: u32,
    pub cases: usize,
    pub agree: usize,
    /// Allowed by the definition only.
    pub def_only: usize,
    /// Allowed by the lemma only.
    pub lemma_only: usize,
    /// The first `sample_limit` discrepancies in enumeration order.
    pub sample: Vec<Discrepancy>,
}

/// Compares [`ExtQuiver::is_allowed_def`] with [`ExtQuiver::is_allowed_lemma`]
/// on every quiver of [`enumerate_family`] with `1 ≤ n ≤ max_n`, `m ≤ max_m`.
pub fn differential_report(max_n: usize, max_m: usize, max_mult: u32, sample_limit: usize) -> DifferentialReport {
    let mut r = DifferentialReport {
        max_n,
        max_m,
        max_mult,
        cases: 0,
        agree: 0,
        def_only: 0,
        lemma_only: 0,
        sample: Vec::new(),
    };
    for n in 1..=max_n {
        for m in 0..=max_m {
            for q in enumerate_family(n, m, max_mult) {
                for k in 0..n {
                    r.cases += 1;
                    let a = q.allowedness(k);
                    match (a.allowed_def, a.allowed_lemma) {
                        (true, false) => r.def_only += 1,
                        (false, true) => r.lemma_only += 1,
                        _ => {
                            r.agree += 1;
                            continue;
                        }
                    }
                    if r.sample.len() < sample_limit {
                        r.sample.push(Discrepancy { quiver: q.clone(), analysis: a });
                    }
                }
            }
        }
    }
    r
}

/// Every quiver with `n` even (all mutable) and `m` odd vertices, arrow
/// multiplicities up to `max_mult`, and every assignment of each odd vertex
/// to `I_k`, `J_k` or neither at each even vertex.
pub fn enumerate_family(n: usize, m: usize, max_mult: u32) -> impl Iterator<Item = ExtQuiver> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let arrow_choices = (2 * max_mult as u64 + 1).pow(pairs.len() as u32);
    let odd_choices = 3u64.pow((n * m) as u32);
    (0..arrow_choices).flat_map(move |a| {
        let pairs = pairs.clone();
        (0..odd_choices).map(move |o| {
            let mut q = ExtQuiver::new(n, m, n).expect("n >= 1");
            let mut code = a;
            for &(i, j) in &pairs {
                let v = (code % (2 * max_mult as u64 + 1)) as i64 - max_mult as i64;
                code /= 2 * max_mult as u64 + 1;
                if v > 0 {
                    q.arrows[i][j] = v as u32;
                } else {
                    q.arrows[j][i] = (-v) as u32;
                }
            }
            let mut code = o;
            for k in 0..n {
                for odd in 0..m {
                    match code % 3 {
                        1 => {
                            q.odd_in[k].insert(odd);
                        }
                        2 => {
                            q.odd_out[k].insert(odd);
                        }
                        _ => {}
                    }
                    code /= 3;
                }
            }
            q
        })
    })
}
