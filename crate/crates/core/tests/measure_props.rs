mod common;

use common::{plain_ring, ring, seed, series, series2};
use padic_polylog::{amice, cyclotomic_trace, gen, DiracCombination, MeasureSeries, Var};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_are_weighted_sums(r in ring(5), n in 0usize..=10, s in seed(), arity in 1usize..=2) {
        let mut rng = StdRng::seed_from_u64(s);
        let d = gen::dirac(&mut rng, r, arity, 8, n);
        let orders = if arity == 1 { vec![n] } else { vec![n, n] };
        let m = amice(&d, &orders).unwrap();
        for k in 0..=n {
            for l in 0..=(if arity == 1 { 0 } else { n.min(10 - k.min(10)) }) {
                prop_assert_eq!(m.moment(k, l).unwrap(), d.brute_moment(k as u32, l as u32), "({}, {})", k, l);
            }
        }
    }

    #[test]
    fn stabilize_is_restriction_on_eisenstein_sums(s in seed(), prec in 1u32..=4, p in common::prime()) {
        let mut rng = StdRng::seed_from_u64(s);
        let (seed, e) = gen::eisenstein(&mut rng, p, prec, 3, 3);
        let base = amice(&seed, &[e.series.order(Var::S), 3]).unwrap();
        prop_assert_eq!(e.stabilize().series, base.series.clone());
        prop_assert_eq!(e.restrict_units().series, base.series);
    }
}

proptest! {
    #[test]
    fn restriction_is_a_projection_onto_ker_psi(
        f in (ring(5), 0usize..=16, 0usize..=3).prop_flat_map(|(r, a, b)| series2(r, a, b))
    ) {
        let m = MeasureSeries::raw(f);
        let r = m.restrict_units();
        prop_assert_eq!(r.restrict_units().series, r.series.clone());
        prop_assert!(r.series.psi().is_zero());
        prop_assert!(r.is_unit_supported());
        let rest = &m.series - &r.series;
        prop_assert_eq!(MeasureSeries::raw(rest).restrict_units().series.is_zero(), true);
    }

    #[test]
    fn derivative_shifts_moments(f in (ring(5), 1usize..=12).prop_flat_map(|(r, n)| series(r, n))) {
        let m = MeasureSeries::raw(f.clone());
        let d = MeasureSeries::raw(f.inv_derive(Var::S).unwrap());
        for k in 0..f.order(Var::S) {
            prop_assert_eq!(d.moment(k, 0).unwrap(), m.moment(k + 1, 0).unwrap(), "k = {}", k);
        }
    }

    #[test]
    fn division_by_x_inverts_derivative(
        f in (ring(4), 0usize..=12).prop_flat_map(|(r, n)| series(r, n)),
        times in 1u32..=3,
    ) {
        let m = MeasureSeries::raw(f).restrict_units();
        let q = m.divide_by_x(times).unwrap();
        let mut back = q.series.clone();
        for _ in 0..times {
            back = back.inv_derive(Var::S).unwrap();
        }
        prop_assert!(back.congruent_valid(&m.series));
        prop_assert!(q.is_unit_supported());
    }

    #[test]
    fn trace_vanishes_on_ker_psi(r in plain_ring(4), extra in 0usize..4, s in seed()) {
        let mut rng = StdRng::seed_from_u64(s);
        let n = r.precision() as usize * (r.prime() as usize - 1) + extra;
        let f = gen::psi_kernel(&mut rng, r, n);
        let p = r.prime() as i128;
        for s0 in [0, p, p * p] {
            prop_assert!(cyclotomic_trace(&f, &r.scalar(s0)).unwrap().is_zero());
        }
    }

    #[test]
    fn duplicate_points_merge(r in ring(4), x in 0i128..50, a in -20i128..20, b in -20i128..20) {
        let mut d = DiracCombination::with_guard(r, 1, 4).unwrap();
        d.push_int(x, None, a).unwrap();
        let point_mod = (r.prime() as i128).pow(d.point_precision());
        d.push_int(x + point_mod, None, b).unwrap();
        prop_assert!(d.terms().len() <= 1);
        let mut single = DiracCombination::with_guard(r, 1, 4).unwrap();
        single.push_int(x, None, a + b).unwrap();
        prop_assert_eq!(amice(&d, &[4]).unwrap().series, amice(&single, &[4]).unwrap().series);
    }
}
