//! Random inputs for self-tests and property tests.

use crate::measure::{amice, eisenstein_like, DiracCombination, MeasureSeries};
use crate::ring::{Ring, RingElement, RingKind};
use crate::scalar::{factorial_valuation, PadicScalar};
use crate::series::Series;

pub fn scalar(rng: &mut impl rand::Rng, ring: Ring) -> PadicScalar {
    ring.scalar(rng.gen_range(0..ring.modulus()) as i128)
}

pub fn unit(rng: &mut impl rand::Rng, ring: Ring) -> PadicScalar {
    loop {
        let s = scalar(rng, ring);
        if s.is_unit() {
            return s;
        }
    }
}

pub fn element(rng: &mut impl rand::Rng, ring: Ring) -> RingElement {
    match ring.kind() {
        RingKind::Plain => RingElement::Plain(scalar(rng, ring)),
        RingKind::PolyQ { bound } => RingElement::PolyQ((0..=bound).map(|_| scalar(rng, ring)).collect()),
    }
}

pub fn series(rng: &mut impl rand::Rng, ring: Ring, n: usize) -> Series {
    Series::from_coeffs(ring, n, (0..=n).map(|_| element(rng, ring)).collect())
}

pub fn series2(rng: &mut impl rand::Rng, ring: Ring, n_s: usize, n_t: usize) -> Series {
    let mut out = Series::zero2(ring, n_s, n_t);
    for i in 0..=n_s {
        for j in 0..=n_t {
            out.set_coeff2(i, j, element(rng, ring));
        }
    }
    out
}

/// A series with `psi = 0`.
pub fn psi_kernel(rng: &mut impl rand::Rng, ring: Ring, n: usize) -> Series {
    series(rng, ring, n).restrict_units()
}

/// Up to `max_terms` masses at arbitrary points of `Z_p` (or `Z_p^2`).
pub fn dirac(rng: &mut impl rand::Rng, ring: Ring, arity: usize, max_terms: usize, max_order: usize) -> DiracCombination {
    let mut d = DiracCombination::with_guard(ring, arity, max_order).expect("generator parameters fit");
    let pm = crate::scalar::checked_modulus(ring.prime(), d.point_precision()).unwrap();
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let x = rng.gen_range(0..pm) as i128;
        let y = (arity == 2).then(|| rng.gen_range(0..pm) as i128);
        let c = element(rng, ring);
        d.push(x, y, c).unwrap();
    }
    d
}

/// Two-variable Dirac theta whose `x`-points are units.
pub fn unit_theta(rng: &mut impl rand::Rng, ring: Ring, n: usize, max_terms: usize) -> MeasureSeries {
    let mut d = DiracCombination::with_guard(ring, 2, n).expect("generator parameters fit");
    let pm = crate::scalar::checked_modulus(ring.prime(), d.point_precision()).unwrap();
    let p = ring.prime() as u128;
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let x = loop {
            let x = rng.gen_range(0..pm);
            if x % p != 0 {
                break x;
            }
        };
        let y = rng.gen_range(0..pm) as i128;
        d.push(x as i128, Some(y), element(rng, ring)).unwrap();
    }
    amice(&d, &[n, n]).unwrap()
}

/// Parameters under which Eisenstein-like sums terminate exactly: a poly-q
/// bound `B` with `q^(p^(J+1)) = 0`, unit points up to `max_x`, and an
/// `S`-order of at least `max_x p^J`.
#[derive(Clone, Copy, Debug)]
pub struct EisensteinShape {
    pub bound: usize,
    pub depth: u32,
    pub max_x: usize,
}

impl EisensteinShape {
    pub fn for_prime(p: u64) -> Self {
        match p {
            2 => EisensteinShape { bound: 4, depth: 2, max_x: 3 },
            3 => EisensteinShape { bound: 4, depth: 1, max_x: 4 },
            _ => EisensteinShape { bound: 6, depth: 1, max_x: 4 },
        }
    }

    pub fn min_order(&self, p: u64) -> usize {
        self.max_x * (p as usize).pow(self.depth)
    }
}

/// A seed of q-divisible masses at small units, and its Eisenstein-like sum.
pub fn eisenstein(rng: &mut impl rand::Rng, p: u64, prec: u32, n_t: usize, max_terms: usize) -> (DiracCombination, MeasureSeries) {
    let shape = EisensteinShape::for_prime(p);
    let n_s = shape.min_order(p);
    let ring = Ring::poly_q(p, prec, shape.bound).unwrap();
    let mut d = DiracCombination::new(ring, 2, prec + factorial_valuation(p, n_s.max(n_t))).unwrap();
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let x = loop {
            let x = rng.gen_range(1..=shape.max_x);
            if x as u64 % p != 0 {
                break x;
            }
        };
        let y = rng.gen_range(0..=n_t as i128);
        let mut q: Vec<i128> = (0..=shape.bound).map(|_| rng.gen_range(0..ring.modulus()) as i128).collect();
        q[0] = 0;
        d.push(x as i128, Some(y), ring.from_q_coeffs(&q)).unwrap();
    }
    let e = eisenstein_like(&d, &[n_s, n_t]).expect("q-divisible seeds terminate");
    (d, e)
}
