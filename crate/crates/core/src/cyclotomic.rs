//! Sums over the `p`-th roots of unity, done in `R[z]/Φ_p(z)`.
//!
//! This is the direct form of the trace-zero condition; it exists to check
//! that `psi(f) = 0` says the same thing.

use std::ops::Add;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement};
use crate::scalar::PadicScalar;
use crate::series::{Series, Var};

/// Element of `R[z]/(1 + z + ... + z^(p-1))` in the basis `1, z, ..., z^(p-2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclotomicElement {
    coeffs: Vec<RingElement>,
}

impl CyclotomicElement {
    pub fn zero(ring: Ring) -> Self {
        CyclotomicElement { coeffs: vec![ring.zero(); ring.prime() as usize - 1] }
    }

    pub fn constant(ring: Ring, c: RingElement) -> Self {
        let mut out = Self::zero(ring);
        out.coeffs[0] = c;
        out
    }

    pub fn coefficients(&self) -> &[RingElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: PadicScalar) -> Self {
        CyclotomicElement { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Multiplication by `z`, using `z^(p-1) = -(1 + ... + z^(p-2))`.
    pub fn mul_z(&self) -> Self {
        let d = self.coeffs.len();
        let top = self.coeffs[d - 1].clone();
        let mut out = Vec::with_capacity(d);
        out.push(-&top);
        for i in 1..d {
            out.push(&self.coeffs[i - 1] - &top);
        }
        CyclotomicElement { coeffs: out }
    }

    /// Sum of the conjugates: `Tr(z^0) = p - 1`, `Tr(z^i) = -1` otherwise.
    pub fn trace(&self) -> RingElement {
        let d = self.coeffs.len() as i128;
        let mut acc = self.coeffs[0].mul_int(d);
        for c in &self.coeffs[1..] {
            acc = &acc - c;
        }
        acc
    }
}

impl Add for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn add(self, rhs: &CyclotomicElement) -> CyclotomicElement {
        CyclotomicElement { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

/// `sum_(ζ^p = 1) f(ζ(1 + s0) - 1)` for a one-variable `f` and `v_p(s0) >= 1`.
///
/// The valid order of `f` must reach `M(p-1)`, where `M` is the ring
/// capacity, so that dropped terms vanish at `p^M` near the roots of unity.
pub fn cyclotomic_trace(f: &Series, s0: &PadicScalar) -> Result<CyclotomicElement> {
    if f.arity() != 1 {
        return Err(Error::Arity { expected: 1 });
    }
    let ring = f.ring();
    let p = ring.prime();
    let need = ring.precision() as usize * (p as usize - 1);
    let have = f.valid_order(Var::S).max(0) as usize;
    if have < need {
        return Err(Error::InsufficientOrder { have, need });
    }
    if s0.is_unit() {
        return Err(Error::PointNotInDisc);
    }
    let s0 = s0.reduce(ring.precision());
    let one_plus = s0 + s0.int_like(1);
    let n = f.order(Var::S);
    let mut at_one = ring.zero();
    let mut at_z = CyclotomicElement::zero(ring);
    for m in (0..=n).rev() {
        // Horner step with α = z(1 + s0) - 1 and with s0 itself at ζ = 1
        at_one = &at_one.scale(s0) + f.coeff(m);
        let shifted = at_z.mul_z().scale(one_plus);
        let minus = at_z.scale(s0.int_like(-1));
        at_z = &(&shifted + &minus) + &CyclotomicElement::constant(ring, f.coeff(m).clone());
    }
    Ok(CyclotomicElement::constant(ring, &at_one + &at_z.trace()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(ring: Ring, a: u32, n: usize) -> Series {
        let mut c = vec![0i128; n + 1];
        let mut b = 1i128;
        for m in 0..=(a as usize).min(n) {
            c[m] = b;
            b = b * (a as i128 - m as i128) / (m as i128 + 1);
        }
        Series::from_ints(ring, n, &c)
    }

    #[test]
    fn root_sums() {
        for p in [2u64, 3, 5] {
            let r = Ring::plain(p, 3).unwrap();
            let n = 3 * (p as usize - 1) + 6;
            let zero = r.scalar(0);
            let t = cyclotomic_trace(&power(r, 1, n), &zero).unwrap();
            assert!(t.is_zero());
            let t = cyclotomic_trace(&power(r, p as u32, n), &zero).unwrap();
            assert_eq!(t, CyclotomicElement::constant(r, r.from_int(p as i128)));
        }
    }

    #[test]
    fn preconditions() {
        let r = Ring::plain(3, 3).unwrap();
        let f = power(r, 1, 4);
        assert_eq!(cyclotomic_trace(&f, &r.scalar(0)), Err(Error::InsufficientOrder { have: 4, need: 6 }));
        let g = power(r, 1, 6);
        assert_eq!(cyclotomic_trace(&g, &r.scalar(1)), Err(Error::PointNotInDisc));
    }
}
