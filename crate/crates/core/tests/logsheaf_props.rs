mod common;

use common::{low_series, prime, ring, seed};
use padic_polylog::{
    gen, verify_polylog, Coefficient, FormDegree, LogSection, Restriction, Ring, Series,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

const ORDER: usize = 8;

/// A level-`level` 0-form whose coefficients vanish at `k + l = level` and
/// have degree at most 3, so products and connections stay exact.
fn section(ring: Ring, level: usize) -> impl Strategy<Value = LogSection> {
    let slots: Vec<(usize, usize)> =
        (0..=level).flat_map(|k| (0..=level - k).map(move |l| (k, l))).filter(|(k, l)| k + l < level).collect();
    let count = slots.len();
    proptest::collection::vec(low_series(ring, ORDER, 3), count).prop_map(move |coeffs| {
        let mut s = LogSection::zero(ring, ORDER, level, FormDegree::Zero);
        for ((k, l), c) in slots.iter().zip(coeffs) {
            s.set(*k, *l, Coefficient::integral(c));
        }
        s
    })
}

/// `ω^[0,1] · x`, at the level of `x`.
fn times_w01(x: &LogSection) -> LogSection {
    let ring = x.ring();
    let w01 = LogSection::basis(1, 0, 1, Series::constant(ring, ORDER, ring.one())).unwrap();
    let lower = x.truncate_level(x.level() - 1).unwrap();
    w01.dp_multiply(&lower, x.level()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn connection_obeys_the_twisted_leibniz_rule(
        (a, b) in (ring(4), 1usize..=3, 1usize..=3).prop_flat_map(|(r, i, j)| (section(r, i), section(r, j)))
    ) {
        let level = a.level() + b.level();
        let ab = a.dp_multiply(&b, level).unwrap();
        let left = ab.connection().unwrap();
        let da_b = a.connection().unwrap().dp_multiply(&b, level).unwrap();
        let a_db = a.dp_multiply(&b.connection().unwrap(), level).unwrap();
        let twist = times_w01(&ab).with_form(FormDegree::One);
        prop_assert_eq!(left, da_b.add(&a_db).sub(&twist));
    }

    #[test]
    fn frobenius_is_multiplicative(
        (a, b) in (ring(4), 1usize..=3, 1usize..=3).prop_flat_map(|(r, i, j)| (section(r, i), section(r, j)))
    ) {
        let level = a.level() + b.level();
        let lhs = a.dp_multiply(&b, level).unwrap().frobenius_section().unwrap();
        let rhs = a.frobenius_section().unwrap().dp_multiply(&b.frobenius_section().unwrap(), level).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn frobenius_and_connection_commute_with_transition(s in (ring(4), 1usize..=4).prop_flat_map(|(r, n)| section(r, n))) {
        let t = s.transition().unwrap();
        prop_assert_eq!(s.frobenius_section().unwrap().transition().unwrap(), t.frobenius_section().unwrap());
        prop_assert_eq!(s.connection_quotient().unwrap().transition().unwrap(), t.connection_quotient().unwrap());
    }

    #[test]
    fn frobenius_inverse_on_basis_elements(r in ring(4), level in 0usize..=3, s in seed()) {
        let p = r.prime() as usize;
        let mut rng = StdRng::seed_from_u64(s);
        for k in 0..=level {
            for l in 0..=level - k {
                let f = gen::series(&mut rng, r, ORDER / p).extend_s(ORDER);
                let f = f.map_coeffs(|c| c.frobenius().frobenius_preimage().unwrap());
                let x = LogSection::basis(level, k, l, f).unwrap();
                prop_assert_eq!(x.frobenius_section().unwrap().frobenius_inverse().unwrap(), x);
            }
        }
    }

    #[test]
    fn dirac_thetas_verify(p in prime(), m in 1u32..=4, n in 0usize..=6, s in seed(), q in any::<bool>()) {
        let order = n.max(2 * p as usize);
        let ring = if q { Ring::poly_q(p, m, 3).unwrap() } else { Ring::plain(p, m).unwrap() };
        let t = gen::unit_theta(&mut StdRng::seed_from_u64(s), ring, order, 4);
        let report = verify_polylog(&t, n, Restriction::Restrict, 1).unwrap();
        prop_assert!(report.pass(), "{}", report);
    }

    #[test]
    fn eisenstein_thetas_verify_in_both_modes(p in prime(), m in 1u32..=3, n in 0usize..=6, s in seed()) {
        let (_, e) = gen::eisenstein(&mut StdRng::seed_from_u64(s), p, m, n.max(1), 3);
        let a = verify_polylog(&e, n, Restriction::Restrict, 1).unwrap();
        let b = verify_polylog(&e, n, Restriction::Stabilize, 1).unwrap();
        prop_assert!(a.pass(), "{}", a);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn connection_is_not_a_plain_derivation() {
    let ring = Ring::plain(3, 4).unwrap();
    let one = LogSection::basis(1, 0, 0, Series::constant(ring, ORDER, ring.one())).unwrap();
    let sq = one.dp_multiply(&one, 2).unwrap();
    let d = one.connection().unwrap();
    let leibniz = d.dp_multiply(&one, 2).unwrap().add(&one.dp_multiply(&d, 2).unwrap());
    assert_ne!(sq.connection_quotient().unwrap(), leibniz);
    let w01 = LogSection::basis(2, 0, 1, Series::constant(ring, ORDER, ring.one())).unwrap().with_form(FormDegree::One);
    assert_eq!(sq.connection_quotient().unwrap(), leibniz.sub(&w01));
}
