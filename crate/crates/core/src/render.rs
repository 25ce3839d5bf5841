//! Human-readable rendering of supertorus elements as ordered generator words.
//!
//! A common even monomial is pulled out on the left, so Example-style output
//! such as `x1 (1 - q^{-1} ξ1 ξ2)` is produced. Coefficients absorb the
//! ordering factor `q^(h/2)` of each word.

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::coeff::{fmt_q_power, QScalar};
use crate::supertorus::{factor_ordered, LatticeVec, QuantumTorus, SuperPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    #[default]
    Pretty,
    Latex,
}

fn rational(r: &BigRational, style: Style) -> String {
    match style {
        Style::Latex if !r.is_integer() => format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom()),
        _ => r.to_string(),
    }
}

fn scalar(c: &QScalar, style: Style) -> String {
    match style {
        Style::Pretty => c.to_string(),
        Style::Latex => {
            let mut out = String::new();
            for (idx, (h, r)) in c.terms().enumerate() {
                let sign = if r.is_negative() { "-" } else { "+" };
                if idx == 0 {
                    if r.is_negative() {
                        out.push('-');
                    }
                } else {
                    out.push_str(&format!(" {sign} "));
                }
                let mag = r.abs();
                match fmt_q_power(h) {
                    None => out.push_str(&rational(&mag, style)),
                    Some(qp) if mag.is_one() => out.push_str(&qp),
                    Some(qp) => out.push_str(&format!("{}{qp}", rational(&mag, style))),
                }
            }
            out
        }
    }
}

/// Ordered generator word `x1^{a1} ⋯ ξj ⋯` for the exponent vector `e`.
pub fn word(e: &LatticeVec, n: usize, style: Style) -> String {
    let mut parts = Vec::new();
    for (i, &a) in e.as_slice().iter().enumerate() {
        if a == 0 {
            continue;
        }
        let (sym, idx) = if i < n { ("x", i + 1) } else { ("ξ", i + 1 - n) };
        let base = match style {
            Style::Pretty => format!("{sym}{idx}"),
            Style::Latex if i < n => format!("x_{{{idx}}}"),
            Style::Latex => format!("\\xi_{{{idx}}}"),
        };
        if a == 1 {
            parts.push(base);
        } else {
            parts.push(format!("{base}^{{{a}}}"));
        }
    }
    parts.join(" ")
}

fn push_term(out: &mut String, first: bool, c: &QScalar, w: &str, style: Style) {
    let (negative, body) = match c.as_monomial() {
        Some((h, r)) => {
            let mag = r.abs();
            let mut s = String::new();
            let q = fmt_q_power(h);
            if !mag.is_one() || (q.is_none() && w.is_empty()) {
                s.push_str(&rational(&mag, style));
            }
            if let Some(q) = q {
                s.push_str(&q);
            }
            (r.is_negative(), s)
        }
        None => {
            let (l, r) = match style {
                Style::Pretty => ("(", ")"),
                Style::Latex => ("\\left(", "\\right)"),
            };
            (false, format!("{l}{}{r}", scalar(c, style)))
        }
    };
    match (first, negative) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    out.push_str(&body);
    if !body.is_empty() && !w.is_empty() {
        out.push(' ');
    }
    out.push_str(w);
}

fn render_sum(torus: &QuantumTorus, terms: &[(LatticeVec, QScalar)], style: Style) -> String {
    let n = torus.shape().n;
    let mut out = String::new();
    for (idx, (e, c)) in terms.iter().enumerate() {
        push_term(&mut out, idx == 0, c, &word(e, n, style), style);
    }
    out
}

fn term_key(e: &LatticeVec, n: usize) -> (i64, usize, LatticeVec) {
    let even: i64 = e.as_slice()[..n].iter().map(|a| a.abs()).sum();
    let odd = e.as_slice()[n..].iter().filter(|&&a| a != 0).count();
    (even, odd, e.clone())
}

/// Renders `p` as words in the generators of the torus.
pub fn render(torus: &QuantumTorus, p: &SuperPoly, style: Style) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let shape = torus.shape();
    let n = shape.n;
    let form = torus.form();
    let mut g = vec![0i64; shape.dim()];
    if p.len() >= 2 {
        for i in 0..n {
            g[i] = p.terms().map(|(e, _)| e[i]).min().expect("nonempty");
        }
    }
    let g = LatticeVec::from_vec(g);
    // c X^e = c q^((h(g) + h(f) − Λ(g, f))/2) W(g) W(f) with f = e − g
    let mut inner: Vec<(LatticeVec, QScalar)> = p
        .terms()
        .map(|(e, c)| {
            let f = e - &g;
            let shift = factor_ordered(form, &g) + factor_ordered(form, &f) - form.eval(&g, &f);
            (f, c.shift(shift))
        })
        .collect();
    inner.sort_by_key(|(f, _)| term_key(f, n));
    let body = render_sum(torus, &inner, style);
    if g.is_zero() {
        return body;
    }
    let (l, r) = match style {
        Style::Pretty => ("(", ")"),
        Style::Latex => ("\\left(", "\\right)"),
    };
    format!("{} {l}{body}{r}", word(&g, n, style))
}
