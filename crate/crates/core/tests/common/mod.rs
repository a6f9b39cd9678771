#![allow(dead_code)]

use padic_polylog::{Ring, RingElement, Series};
use proptest::prelude::*;

pub fn prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5)]
}

/// Plain rings, and poly-q rings with bound up to 4.
pub fn ring(max_prec: u32) -> impl Strategy<Value = Ring> {
    (prime(), 1..=max_prec, prop_oneof![Just(0usize), 1..=4usize]).prop_map(|(p, m, b)| {
        if b == 0 {
            Ring::plain(p, m).unwrap()
        } else {
            Ring::poly_q(p, m, b).unwrap()
        }
    })
}

pub fn plain_ring(max_prec: u32) -> impl Strategy<Value = Ring> {
    (prime(), 1..=max_prec).prop_map(|(p, m)| Ring::plain(p, m).unwrap())
}

pub fn bound(ring: Ring) -> usize {
    match ring.kind() {
        padic_polylog::RingKind::Plain => 0,
        padic_polylog::RingKind::PolyQ { bound } => bound,
    }
}

pub fn element(ring: Ring) -> impl Strategy<Value = RingElement> {
    let m = ring.modulus() as i128;
    proptest::collection::vec(0..m, bound(ring) + 1).prop_map(move |c| ring.from_q_coeffs(&c))
}

pub fn series(ring: Ring, n: usize) -> impl Strategy<Value = Series> {
    proptest::collection::vec(element(ring), n + 1).prop_map(move |c| Series::from_coeffs(ring, n, c))
}

/// Coefficients zero above degree `d`.
pub fn low_series(ring: Ring, n: usize, d: usize) -> impl Strategy<Value = Series> {
    proptest::collection::vec(element(ring), d.min(n) + 1).prop_map(move |mut c| {
        c.resize(n + 1, ring.zero());
        Series::from_coeffs(ring, n, c)
    })
}

pub fn series2(ring: Ring, n_s: usize, n_t: usize) -> impl Strategy<Value = Series> {
    proptest::collection::vec(element(ring), (n_s + 1) * (n_t + 1)).prop_map(move |c| {
        Series::from_fn2(ring, n_s, n_t, |i, j| c[i * (n_t + 1) + j].clone())
    })
}

/// Seed for the crate's own generators.
pub fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}
