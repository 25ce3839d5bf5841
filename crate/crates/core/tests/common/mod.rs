#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use supercluster::coeff::QScalar;
use supercluster::compat::Mode;
use supercluster::seed::{QuantumSeed, SeedInput};
use supercluster::supertorus::{GradedShape, LatticeVec, QuantumTorus, SkewForm, SuperPoly};

pub fn seed(text: &str, mode: Mode) -> QuantumSeed {
    let input: SeedInput = serde_json::from_str(text).unwrap();
    QuantumSeed::from_input(input, mode).unwrap()
}

pub fn ex1() -> QuantumSeed {
    seed(
        r#"{"quiver":{"n":1,"m":2,"mutable":1,"odd_in":{"1":[1]},"odd_out":{"1":[2]}},
            "lambda":[[0,1,-1],[-1,0,2],[1,-2,0]]}"#,
        Mode::Permissive,
    )
}

pub fn ex2() -> QuantumSeed {
    seed(
        r#"{"quiver":{"n":2,"m":2,"mutable":2,"even_arrows":[[1,2,1]],"odd_in":{"1":[1]},"odd_out":{"1":[2]}},
            "lambda":[[0,1,0,0],[-1,0,0,0],[0,0,0,2],[0,0,-2,0]]}"#,
        Mode::Strict,
    )
}

/// EX2 with the even arrow doubled.
pub fn ex2_doubled() -> QuantumSeed {
    seed(
        r#"{"quiver":{"n":2,"m":2,"mutable":2,"even_arrows":[[1,2,2]],"odd_in":{"1":[1]},"odd_out":{"1":[2]}},
            "lambda":[[0,2,0,0],[-2,0,0,0],[0,0,0,1],[0,0,-1,0]]}"#,
        Mode::Strict,
    )
}

/// EX2 with the even arrow reversed.
pub fn ex2_reversed() -> QuantumSeed {
    seed(
        r#"{"quiver":{"n":2,"m":2,"mutable":2,"even_arrows":[[2,1,1]],"odd_in":{"1":[1]},"odd_out":{"1":[2]}},
            "lambda":[[0,-1,0,0],[1,0,0,0],[0,0,0,-2],[0,0,2,0]]}"#,
        Mode::Strict,
    )
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qscalar() -> impl Strategy<Value = QScalar> {
    prop::collection::vec((-4i64..=4, -3i64..=3), 0..4)
        .prop_map(|ts| QScalar::from_terms(ts.into_iter().map(|(h, c)| (h, rat(c)))))
}

pub fn nonzero_qscalar() -> impl Strategy<Value = QScalar> {
    qscalar().prop_filter("nonzero", |c| !c.is_zero())
}

pub fn lattice(shape: GradedShape, even: i64) -> impl Strategy<Value = LatticeVec> {
    (prop::collection::vec(-even..=even, shape.n), prop::collection::vec(0i64..=1, shape.m)).prop_map(|(mut a, b)| {
        a.extend(b);
        LatticeVec::from_vec(a)
    })
}

pub fn poly(shape: GradedShape, max_terms: usize) -> impl Strategy<Value = SuperPoly> {
    prop::collection::vec((lattice(shape, 2), -3i64..=3, -2i64..=2), 0..=max_terms).prop_map(move |ts| {
        ts.into_iter().fold(SuperPoly::zero(shape), |acc, (e, c, h)| {
            &acc + &SuperPoly::term(shape, e, QScalar::monomial(rat(c), h))
        })
    })
}

pub fn skew(dim: usize) -> impl Strategy<Value = SkewForm> {
    prop::collection::vec(-3i64..=3, dim * (dim - 1) / 2).prop_map(move |up| {
        let mut rows = vec![vec![0i64; dim]; dim];
        let mut it = up.into_iter();
        for i in 0..dim {
            for j in i + 1..dim {
                let v = it.next().unwrap();
                rows[i][j] = v;
                rows[j][i] = -v;
            }
        }
        SkewForm::from_rows(&rows).unwrap()
    })
}

/// Torus with `1 ≤ n ≤ 2`, `m ≤ 2` and a random skew form.
pub fn torus() -> impl Strategy<Value = QuantumTorus> {
    (1usize..=2, 0usize..=2).prop_flat_map(|(n, m)| {
        skew(n + m).prop_map(move |f| QuantumTorus::new(GradedShape::new(n, m).unwrap(), f).unwrap())
    })
}
