//! Fixed-precision p-adic integers.
//!
//! A [`PadicScalar`] is a residue modulo `p^M` together with the number of
//! digits that are actually known. The capacity `M` bounds the modulus at
//! 2^64 so that every product fits in a `u128`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Trial-division primality test; primes here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^e`, or `None` when it exceeds 2^64.
pub fn checked_modulus(p: u64, e: u32) -> Option<u128> {
    let mut m: u128 = 1;
    for _ in 0..e {
        m = m.checked_mul(p as u128)?;
        if m > 1u128 << 64 {
            return None;
        }
    }
    Some(m)
}

pub(crate) fn pow_u128(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// `v_p(n!)` by Legendre's formula.
pub fn factorial_valuation(p: u64, n: usize) -> u32 {
    let mut v = 0u64;
    let mut q = p as u64;
    let n = n as u64;
    while q <= n {
        v += n / q;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    v as u32
}

/// Euler's totient of `p^e`.
pub fn totient(p: u64, e: u32) -> u128 {
    if e == 0 {
        return 1;
    }
    (p as u128 - 1) * pow_u128(p, e - 1)
}

/// p-adic valuation of a residue at effective precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    /// The residue vanishes at the known precision.
    AtLeast(u32),
}

impl Valuation {
    /// Lower bound on the valuation.
    pub fn lower_bound(&self) -> u32 {
        match *self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn min(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a.min(b)),
            (Valuation::Finite(a), Valuation::AtLeast(b)) | (Valuation::AtLeast(b), Valuation::Finite(a)) => {
                if a < b {
                    Valuation::Finite(a)
                } else {
                    Valuation::AtLeast(b)
                }
            }
            (Valuation::AtLeast(a), Valuation::AtLeast(b)) => Valuation::AtLeast(a.min(b)),
        }
    }

    /// True when the value is known to be divisible by `p^target`.
    pub fn reaches(&self, target: u32) -> bool {
        match *self {
            Valuation::Finite(v) => v >= target,
            Valuation::AtLeast(v) => v >= target,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Residue modulo `p^M` with a tracked number of correct digits.
///
/// Equality compares residues modulo `p^min(eff)`, so two values agree
/// whenever they are indistinguishable at the digits both of them know.
#[derive(Clone, Copy, Debug)]
pub struct PadicScalar {
    p: u64,
    prec: u32,
    eff: u32,
    modulus: u128,
    r: u128,
}

impl PadicScalar {
    /// Reduces `n` modulo `p^prec`.
    pub fn new(p: u64, prec: u32, n: i128) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if prec == 0 {
            return Err(Error::ZeroPrecision);
        }
        let modulus = checked_modulus(p, prec).ok_or(Error::PrecisionTooLarge { p, precision: prec })?;
        Ok(Self::from_i128(p, prec, modulus, n))
    }

    pub(crate) fn from_i128(p: u64, prec: u32, modulus: u128, n: i128) -> Self {
        let m = modulus as i128;
        // modulus <= 2^64 so it fits in i128
        let r = n.rem_euclid(m) as u128;
        PadicScalar { p, prec, eff: prec, modulus, r }
    }

    pub(crate) fn from_residue(p: u64, prec: u32, modulus: u128, r: u128) -> Self {
        PadicScalar { p, prec, eff: prec, modulus, r: r % modulus }
    }

    pub fn zero(p: u64, prec: u32) -> Result<Self> {
        Self::new(p, prec, 0)
    }

    /// Exact zero with the same prime and capacity.
    pub fn zero_like(&self) -> Self {
        PadicScalar { r: 0, eff: self.prec, ..*self }
    }

    /// Exact integer with the same prime and capacity.
    pub fn int_like(&self, n: i128) -> Self {
        Self::from_i128(self.p, self.prec, self.modulus, n)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn effective_precision(&self) -> u32 {
        self.eff
    }

    /// Canonical residue in `[0, p^M)`.
    pub fn residue(&self) -> u128 {
        self.r
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// Residue reduced to the known digits.
    pub fn known_residue(&self) -> u128 {
        self.r % pow_u128(self.p, self.eff)
    }

    pub fn is_zero(&self) -> bool {
        self.known_residue() == 0
    }

    pub fn is_unit(&self) -> bool {
        self.eff >= 1 && self.r % self.p as u128 != 0
    }

    pub fn valuation(&self) -> Valuation {
        let r = self.known_residue();
        if r == 0 {
            return Valuation::AtLeast(self.eff);
        }
        let p = self.p as u128;
        let mut v = 0;
        let mut r = r;
        while r % p == 0 {
            r /= p;
            v += 1;
        }
        Valuation::Finite(v)
    }

    /// Caps the effective precision at `eff`.
    pub fn with_effective_precision(mut self, eff: u32) -> Self {
        self.eff = self.eff.min(eff);
        self
    }

    /// Reduces to a smaller capacity.
    pub fn reduce(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return *self;
        }
        let modulus = pow_u128(self.p, prec);
        PadicScalar { p: self.p, prec, eff: self.eff.min(prec), modulus, r: self.r % modulus }
    }

    /// Raises the capacity, keeping the residue and the known digits.
    pub fn lift(&self, prec: u32) -> Result<Self> {
        if prec <= self.prec {
            return Ok(*self);
        }
        let modulus = checked_modulus(self.p, prec).ok_or(Error::PrecisionTooLarge { p: self.p, precision: prec })?;
        Ok(PadicScalar { p: self.p, prec, eff: self.eff, modulus, r: self.r })
    }

    pub fn mul_int(&self, n: i128) -> Self {
        let k = Self::from_i128(self.p, self.prec, self.modulus, n);
        *self * k
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = *self;
        let mut acc = PadicScalar { r: 1 % self.modulus, ..*self };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit modulo `p^M`.
    pub fn unit_inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit(self.r));
        }
        let inv = inverse_mod(self.r, self.modulus).ok_or(Error::NotUnit(self.r))?;
        Ok(PadicScalar { r: inv, ..*self })
    }

    /// Exact division by `p^v`; the quotient knows `v` fewer digits.
    pub fn div_p_pow(&self, v: u32) -> Result<Self> {
        if v == 0 {
            return Ok(*self);
        }
        if self.eff < v {
            return Err(Error::PrecisionExhausted);
        }
        let pv = pow_u128(self.p, v);
        // digits above `eff` are noise; only the known part is divided
        let known = self.known_residue();
        if known % pv != 0 {
            return Err(Error::NotDivisible(v));
        }
        Ok(PadicScalar { r: known / pv, eff: self.eff - v, ..*self })
    }

    /// Multiplication by `p^v`; the product knows `v` more digits.
    pub fn mul_p_pow(&self, v: u32) -> Self {
        let pv = pow_u128(self.p, v.min(self.prec)) % self.modulus;
        let r = (self.r % self.modulus) * pv % self.modulus;
        PadicScalar { r, eff: (self.eff + v).min(self.prec), ..*self }
    }

    fn combine(&self, other: &Self) -> (u32, u128, u32) {
        assert_eq!(self.p, other.p, "mixed primes");
        let prec = self.prec.min(other.prec);
        let modulus = self.modulus.min(other.modulus);
        (prec, modulus, self.eff.min(other.eff))
    }
}

/// Inverse of `a` modulo `m`, or `None` if not coprime.
pub(crate) fn inverse_mod(a: u128, m: u128) -> Option<u128> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

impl Add for PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: Self) -> Self {
        let (prec, modulus, eff) = self.combine(&rhs);
        let r = (self.r % modulus + rhs.r % modulus) % modulus;
        PadicScalar { p: self.p, prec, eff, modulus, r }
    }
}

impl Sub for PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: Self) -> Self {
        let (prec, modulus, eff) = self.combine(&rhs);
        let r = (self.r % modulus + modulus - rhs.r % modulus) % modulus;
        PadicScalar { p: self.p, prec, eff, modulus, r }
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: Self) -> Self {
        let (prec, modulus, eff) = self.combine(&rhs);
        let r = (self.r % modulus) * (rhs.r % modulus) % modulus;
        PadicScalar { p: self.p, prec, eff, modulus, r }
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> Self {
        PadicScalar { r: (self.modulus - self.r) % self.modulus, ..self }
    }
}

impl PartialEq for PadicScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let m = pow_u128(self.p, self.eff.min(other.eff));
        self.r % m == other.r % m
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.r)
    }
}
