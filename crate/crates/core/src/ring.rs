//! Coefficient rings with a Frobenius endomorphism.
//!
//! Two rings are available: `Z/p^M` itself, where Frobenius is the identity,
//! and the truncated polynomial ring `(Z/p^M)[q]/(q^{B+1})`, where Frobenius
//! fixes scalars and sends `q` to `q^p`. The second one is a small stand-in
//! for a ring of q-expansions on which Frobenius acts nontrivially.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{checked_modulus, is_prime, PadicScalar, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    Plain,
    /// Polynomials in `q` of degree at most `bound`.
    PolyQ { bound: usize },
}

/// Prime, capacity and ring shape shared by all values of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ring {
    p: u64,
    prec: u32,
    modulus: u128,
    kind: RingKind,
}

impl Ring {
    pub fn new(p: u64, prec: u32, kind: RingKind) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if prec == 0 {
            return Err(Error::ZeroPrecision);
        }
        let modulus = checked_modulus(p, prec).ok_or(Error::PrecisionTooLarge { p, precision: prec })?;
        Ok(Ring { p, prec, modulus, kind })
    }

    pub fn plain(p: u64, prec: u32) -> Result<Self> {
        Self::new(p, prec, RingKind::Plain)
    }

    pub fn poly_q(p: u64, prec: u32, bound: usize) -> Result<Self> {
        Self::new(p, prec, RingKind::PolyQ { bound })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn with_precision(&self, prec: u32) -> Result<Ring> {
        Ring::new(self.p, prec, self.kind)
    }

    pub fn scalar(&self, n: i128) -> PadicScalar {
        PadicScalar::from_i128(self.p, self.prec, self.modulus, n)
    }

    pub(crate) fn scalar_from_residue(&self, r: u128) -> PadicScalar {
        PadicScalar::from_residue(self.p, self.prec, self.modulus, r)
    }

    pub fn zero(&self) -> RingElement {
        self.from_int(0)
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i128) -> RingElement {
        self.from_scalar(self.scalar(n))
    }

    pub fn from_scalar(&self, s: PadicScalar) -> RingElement {
        match self.kind {
            RingKind::Plain => RingElement::Plain(s),
            RingKind::PolyQ { bound } => {
                let mut c = vec![s.zero_like(); bound + 1];
                c[0] = s;
                RingElement::PolyQ(c)
            }
        }
    }

    /// Element with the given q-expansion; extra terms past the bound are dropped.
    /// In the plain ring only the constant term is used.
    pub fn from_q_coeffs(&self, coeffs: &[i128]) -> RingElement {
        match self.kind {
            RingKind::Plain => self.from_int(coeffs.first().copied().unwrap_or(0)),
            RingKind::PolyQ { bound } => {
                let mut c: Vec<PadicScalar> = (0..=bound).map(|_| self.scalar(0)).collect();
                for (i, &v) in coeffs.iter().enumerate().take(bound + 1) {
                    c[i] = self.scalar(v);
                }
                RingElement::PolyQ(c)
            }
        }
    }

    /// `q^j`, or 1 in the plain ring.
    pub fn q_power(&self, j: usize) -> RingElement {
        match self.kind {
            RingKind::Plain => self.one(),
            RingKind::PolyQ { bound } => {
                let mut c: Vec<i128> = vec![0; bound + 1];
                if j <= bound {
                    c[j] = 1;
                }
                self.from_q_coeffs(&c)
            }
        }
    }
}

/// Element of a [`Ring`].
#[derive(Clone, Debug)]
pub enum RingElement {
    Plain(PadicScalar),
    PolyQ(Vec<PadicScalar>),
}

impl RingElement {
    /// q-expansion coefficients; a plain element has exactly one.
    pub fn coefficients(&self) -> &[PadicScalar] {
        match self {
            RingElement::Plain(s) => std::slice::from_ref(s),
            RingElement::PolyQ(c) => c,
        }
    }

    pub fn constant(&self) -> PadicScalar {
        self.coefficients()[0]
    }

    pub fn prime(&self) -> u64 {
        self.constant().prime()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_zero())
    }

    pub fn effective_precision(&self) -> u32 {
        self.coefficients().iter().map(|c| c.effective_precision()).min().unwrap_or(0)
    }

    pub fn valuation(&self) -> Valuation {
        self.coefficients()
            .iter()
            .map(|c| c.valuation())
            .reduce(Valuation::min)
            .expect("ring elements have at least one coefficient")
    }

    pub fn map(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> RingElement {
        match self {
            RingElement::Plain(s) => RingElement::Plain(f(s)),
            RingElement::PolyQ(c) => RingElement::PolyQ(c.iter().map(f).collect()),
        }
    }

    pub fn try_map(&self, f: impl Fn(&PadicScalar) -> Result<PadicScalar>) -> Result<RingElement> {
        Ok(match self {
            RingElement::Plain(s) => RingElement::Plain(f(s)?),
            RingElement::PolyQ(c) => RingElement::PolyQ(c.iter().map(f).collect::<Result<_>>()?),
        })
    }

    pub fn scale(&self, s: PadicScalar) -> RingElement {
        self.map(|c| *c * s)
    }

    pub fn mul_int(&self, n: i128) -> RingElement {
        self.map(|c| c.mul_int(n))
    }

    pub fn div_p_pow(&self, v: u32) -> Result<RingElement> {
        self.try_map(|c| c.div_p_pow(v))
    }

    pub fn mul_p_pow(&self, v: u32) -> RingElement {
        self.map(|c| c.mul_p_pow(v))
    }

    pub fn with_effective_precision(&self, eff: u32) -> RingElement {
        self.map(|c| c.with_effective_precision(eff))
    }

    pub fn reduce(&self, prec: u32) -> RingElement {
        self.map(|c| c.reduce(prec))
    }

    pub fn lift(&self, prec: u32) -> Result<RingElement> {
        self.try_map(|c| c.lift(prec))
    }

    /// The Frobenius endomorphism: identity on plain elements, `q^j -> q^{pj}`
    /// on q-expansions (terms past the bound vanish).
    pub fn frobenius(&self) -> RingElement {
        match self {
            RingElement::Plain(s) => RingElement::Plain(*s),
            RingElement::PolyQ(c) => {
                let p = c[0].prime() as usize;
                let mut out = vec![c[0].zero_like(); c.len()];
                for (j, v) in c.iter().enumerate() {
                    if j * p < c.len() {
                        out[j * p] = *v;
                    }
                }
                RingElement::PolyQ(out)
            }
        }
    }

    /// An element whose Frobenius image is `self`, if there is one; terms
    /// that Frobenius would push past the bound are taken to be zero.
    pub fn frobenius_preimage(&self) -> Option<RingElement> {
        match self {
            RingElement::Plain(s) => Some(RingElement::Plain(*s)),
            RingElement::PolyQ(c) => {
                let p = c[0].prime() as usize;
                let mut out = vec![c[0].zero_like(); c.len()];
                for (j, v) in c.iter().enumerate() {
                    if j % p == 0 {
                        out[j / p] = *v;
                    } else if !v.is_zero() {
                        return None;
                    }
                }
                Some(RingElement::PolyQ(out))
            }
        }
    }

    fn promote(&self, len: usize) -> Vec<PadicScalar> {
        match self {
            RingElement::PolyQ(c) => c.clone(),
            RingElement::Plain(s) => {
                let mut c = vec![s.zero_like(); len];
                c[0] = *s;
                c
            }
        }
    }

    fn zip_with(&self, rhs: &RingElement, f: impl Fn(PadicScalar, PadicScalar) -> PadicScalar) -> RingElement {
        match (self, rhs) {
            (RingElement::Plain(a), RingElement::Plain(b)) => RingElement::Plain(f(*a, *b)),
            _ => {
                let len = self.coefficients().len().max(rhs.coefficients().len());
                let a = self.promote(len);
                let b = rhs.promote(len);
                assert_eq!(a.len(), b.len(), "q-expansions of different lengths");
                RingElement::PolyQ(a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect())
            }
        }
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.map(|c| -*c)
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        match (self, rhs) {
            (RingElement::Plain(a), RingElement::Plain(b)) => RingElement::Plain(*a * *b),
            (RingElement::Plain(a), b) => b.scale(*a),
            (a, RingElement::Plain(b)) => a.scale(*b),
            (RingElement::PolyQ(a), RingElement::PolyQ(b)) => {
                assert_eq!(a.len(), b.len(), "q-expansions of different lengths");
                let n = a.len();
                let zero = a[0].zero_like().reduce(b[0].precision());
                let mut out = vec![zero; n];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate().take(n - i) {
                        out[i + j] = out[i + j] + *x * *y;
                    }
                }
                RingElement::PolyQ(out)
            }
        }
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElement::Plain(s) => write!(f, "{s}"),
            RingElement::PolyQ(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}
