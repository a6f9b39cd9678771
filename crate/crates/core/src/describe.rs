//! Measure description files and canonical output tables.
//!
//! A description is line based; `#` starts a comment.
//!
//! ```text
//! prime 3
//! precision 4
//! orders 8 8
//! ring poly-q 4
//! label D=2 (a,b)=(0,1)
//! dirac 1 2 0,1
//! ```
//!
//! `dirac x c` or `dirac x y c` adds a weighted point mass; `coeff i c` or
//! `coeff i j c` sets one coefficient of a raw series instead. A coefficient
//! is an integer, or in a poly-q ring a comma separated q-expansion. The
//! header fields may be left out and supplied by the caller.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::measure::{amice, DiracCombination, MeasureSeries};
use crate::polylog::MomentGrid;
use crate::ring::{Ring, RingElement, RingKind};
use crate::scalar::factorial_valuation;
use crate::series::{Series, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    /// `(x, y, q-expansion)`
    Dirac(Vec<(i128, Option<i128>, Vec<i128>)>),
    /// `(i, j, q-expansion)`
    Coeffs(Vec<(usize, Option<usize>, Vec<i128>)>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Description {
    pub prime: Option<u64>,
    pub precision: Option<u32>,
    pub orders: Option<Vec<usize>>,
    pub ring: Option<RingKind>,
    pub label: Option<String>,
    pub body: Option<Body>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("{what}: expected an integer, got {tok:?}")))
}

fn q_expansion(line: usize, tok: &str) -> Result<Vec<i128>> {
    tok.split(',').map(|t| int(line, t, "coefficient")).collect()
}

/// Parses `"plain"` or `"poly-q B"` (also `"poly-q:B"`).
pub fn parse_ring_kind(words: &[&str]) -> std::result::Result<RingKind, String> {
    match words {
        ["plain"] => Ok(RingKind::Plain),
        ["poly-q", b] => b.parse().map(|bound| RingKind::PolyQ { bound }).map_err(|_| format!("bad degree bound {b:?}")),
        [one] if one.starts_with("poly-q:") => {
            let b = &one["poly-q:".len()..];
            b.parse().map(|bound| RingKind::PolyQ { bound }).map_err(|_| format!("bad degree bound {b:?}"))
        }
        _ => Err(format!("expected plain or poly-q B, got {:?}", words.join(" "))),
    }
}

impl Description {
    pub fn parse(text: &str) -> Result<Description> {
        let mut d = Description::default();
        let mut dirac = Vec::new();
        let mut coeffs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let args = &words[1..];
            match words[0] {
                "prime" => match args {
                    [v] => d.prime = Some(int(line, v, "prime")?),
                    _ => return Err(parse_err(line, "prime takes one value")),
                },
                "precision" => match args {
                    [v] => d.precision = Some(int(line, v, "precision")?),
                    _ => return Err(parse_err(line, "precision takes one value")),
                },
                "orders" => {
                    if args.is_empty() || args.len() > 2 {
                        return Err(parse_err(line, "orders takes one or two values"));
                    }
                    d.orders = Some(args.iter().map(|v| int(line, v, "orders")).collect::<Result<_>>()?);
                }
                "ring" => d.ring = Some(parse_ring_kind(args).map_err(|m| parse_err(line, m))?),
                "label" => d.label = Some(args.join(" ")),
                "dirac" => match args {
                    [x, c] => dirac.push((int(line, x, "x")?, None, q_expansion(line, c)?)),
                    [x, y, c] => dirac.push((int(line, x, "x")?, Some(int(line, y, "y")?), q_expansion(line, c)?)),
                    _ => return Err(parse_err(line, "dirac takes x [y] c")),
                },
                "coeff" => match args {
                    [i, c] => coeffs.push((int(line, i, "i")?, None, q_expansion(line, c)?)),
                    [i, j, c] => coeffs.push((int(line, i, "i")?, Some(int(line, j, "j")?), q_expansion(line, c)?)),
                    _ => return Err(parse_err(line, "coeff takes i [j] c")),
                },
                other => return Err(parse_err(line, format!("unknown field {other:?}"))),
            }
        }
        d.body = match (dirac.is_empty(), coeffs.is_empty()) {
            (true, true) => None,
            (false, true) => Some(Body::Dirac(dirac)),
            (true, false) => Some(Body::Coeffs(coeffs)),
            (false, false) => return Err(parse_err(0, "dirac and coeff lines cannot be mixed")),
        };
        Ok(d)
    }

    /// Builds the measure at `orders`; Dirac points get the guard digits of
    /// the largest order.
    pub fn measure(&self, ring: Ring, orders: &[usize]) -> Result<MeasureSeries> {
        let arity = orders.len();
        let element = |c: &[i128]| -> Result<RingElement> {
            if ring.kind() == RingKind::Plain && c.iter().skip(1).any(|&v| v != 0) {
                return Err(Error::RingMismatch);
            }
            Ok(ring.from_q_coeffs(c))
        };
        match &self.body {
            None => Err(Error::Config { field: "input", msg: "no dirac or coeff lines".into() }),
            Some(Body::Dirac(terms)) => {
                let max = *orders.iter().max().unwrap();
                let mut d = DiracCombination::new(ring, arity, ring.precision() + factorial_valuation(ring.prime(), max))?;
                if let Some(l) = &self.label {
                    d.set_label(l.clone());
                }
                for (x, y, c) in terms {
                    d.push(*x, *y, element(c)?)?;
                }
                amice(&d, orders)
            }
            Some(Body::Coeffs(entries)) => {
                let mut s = if arity == 1 { Series::zero(ring, orders[0]) } else { Series::zero2(ring, orders[0], orders[1]) };
                for (i, j, c) in entries {
                    if j.is_some() != (arity == 2) {
                        return Err(Error::Arity { expected: arity });
                    }
                    let j = j.unwrap_or(0);
                    if *i > orders[0] || (arity == 2 && j > orders[1]) {
                        return Err(Error::Config { field: "orders", msg: format!("coefficient ({i},{j}) lies past the truncation orders") });
                    }
                    let cur = s.coeff2(*i, j).clone();
                    s.set_coeff2(*i, j, &cur + &element(c)?);
                }
                Ok(MeasureSeries::raw(s))
            }
        }
    }
}

/// `# p=.. M=.. M_eff=.. N=..`
pub fn header(ring: Ring, eff: u32, orders: &[usize]) -> String {
    let n: Vec<String> = orders.iter().map(|o| o.to_string()).collect();
    format!("# p={} M={} M_eff={} N={}\n", ring.prime(), ring.precision(), eff, n.join(","))
}

fn push_element(out: &mut String, prefix: &str, c: &RingElement, poly_q: bool, skip_zero: bool) {
    if poly_q {
        for (d, x) in c.coefficients().iter().enumerate() {
            if skip_zero && x.is_zero() {
                continue;
            }
            let _ = writeln!(out, "{prefix} {d} {}", x.residue());
        }
    } else if !(skip_zero && c.is_zero()) {
        let _ = writeln!(out, "{prefix} {}", c.constant().residue());
    }
}

fn is_poly_q(ring: Ring) -> bool {
    matches!(ring.kind(), RingKind::PolyQ { .. })
}

/// One line per nonzero monomial: `i [j] [q-degree] residue`.
pub fn series_table(s: &Series) -> String {
    let orders: Vec<usize> = if s.arity() == 1 { vec![s.order(Var::S)] } else { vec![s.order(Var::S), s.order(Var::T)] };
    let mut out = header(s.ring(), s.effective_precision(), &orders);
    let pq = is_poly_q(s.ring());
    for i in 0..=s.order(Var::S) {
        for j in 0..=s.order(Var::T) {
            let prefix = if s.arity() == 1 { format!("{i}") } else { format!("{i} {j}") };
            push_element(&mut out, &prefix, s.coeff2(i, j), pq, true);
        }
    }
    out
}

/// Every moment with `k, l <= level`: `k l [q-degree] residue`.
pub fn moments_table(m: &MeasureSeries, level: usize) -> Result<String> {
    let s = &m.series;
    let orders: Vec<usize> = if s.arity() == 1 { vec![s.order(Var::S)] } else { vec![s.order(Var::S), s.order(Var::T)] };
    let pq = is_poly_q(s.ring());
    let mut body = String::new();
    let mut eff = s.effective_precision();
    let l_max = if s.arity() == 1 { 0 } else { level };
    for k in 0..=level {
        for l in 0..=l_max {
            let c = m.moment(k, l)?;
            eff = eff.min(c.effective_precision());
            push_element(&mut body, &format!("{k} {l}"), &c, pq, false);
        }
    }
    Ok(header(s.ring(), eff, &orders) + &body)
}

/// Nonzero coefficients of every grid entry: `k l i [q-degree] residue`.
pub fn grid_table(g: &MomentGrid) -> String {
    let first = g.get(0, 0);
    let pq = is_poly_q(first.ring());
    let mut out = header(first.ring(), g.effective_precision(), &[first.order(Var::S)]);
    let _ = writeln!(out, "# level={} source={}", g.level(), g.source());
    for (k, l, s) in g.iter() {
        for i in 0..=s.order(Var::S) {
            push_element(&mut out, &format!("{k} {l} {i}"), s.coeff(i), pq, true);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dirac_description() {
        let d = Description::parse("prime 3\nprecision 4 # digits\norders 8 8\nring poly-q 4\ndirac 1 2 0,1\n").unwrap();
        assert_eq!(d.prime, Some(3));
        assert_eq!(d.orders, Some(vec![8, 8]));
        assert_eq!(d.ring, Some(RingKind::PolyQ { bound: 4 }));
        assert_eq!(d.body, Some(Body::Dirac(vec![(1, Some(2), vec![0, 1])])));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(Description::parse("prime x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Description::parse("\nfoo 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Description::parse("dirac 1 1\ncoeff 0 1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn restrict_table() {
        let d = Description::parse("dirac 1 1\ndirac 3 1").unwrap();
        let ring = Ring::plain(3, 4).unwrap();
        let m = d.measure(ring, &[4]).unwrap();
        assert_eq!(series_table(&m.restrict_units().series), "# p=3 M=4 M_eff=4 N=4\n0 1\n1 1\n");
    }
}
