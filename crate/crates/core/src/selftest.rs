//! The invariant suites of every module at small parameters.

use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};

use crate::cyclotomic::cyclotomic_trace;
use crate::error::Result;
use crate::gen;
use crate::logsheaf::{rho_section, verify_polylog, verify_section, Coefficient, LogSection};
use crate::measure::{amice, MeasureSeries};
use crate::polylog::{cross_check, moment_grid_closed, ode_guard, Restriction};
use crate::ring::Ring;
use crate::scalar::{factorial_valuation, PadicScalar, Valuation};
use crate::series::{binomial_exp, Series, Var};

/// Outcome of one named suite.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

const PRIMES: [u64; 3] = [2, 3, 5];

fn scalar_suite(rng: &mut StdRng, trials: usize) -> Outcome {
    for _ in 0..trials {
        let p = PRIMES[rng.gen_range(0..3)];
        let ring = lift(Ring::plain(p, rng.gen_range(1..=6)))?;
        let a = gen::scalar(rng, ring);
        let b = gen::unit(rng, ring);
        ensure((a * b) * lift(b.unit_inverse())? == a, || format!("(a b) / b != a for {a}, {b}"))?;
        ensure(a.reduce(ring.precision()) == a, || "reduce is not idempotent".into())?;
        let c = gen::scalar(rng, ring);
        if let (Valuation::Finite(va), Valuation::Finite(vc)) = (a.valuation(), c.valuation()) {
            if va + vc < ring.precision() {
                ensure((a * c).valuation() == Valuation::Finite(va + vc), || format!("valuation of {a} * {c}"))?;
            }
        }
    }
    Ok(())
}

fn ring_suite(rng: &mut StdRng, trials: usize) -> Outcome {
    for _ in 0..trials {
        let p = PRIMES[rng.gen_range(0..3)];
        let ring = lift(Ring::poly_q(p, rng.gen_range(1..=5), rng.gen_range(0..=8)))?;
        let a = gen::element(rng, ring);
        let b = gen::element(rng, ring);
        ensure((&a * &b).frobenius() == &a.frobenius() * &b.frobenius(), || "Frobenius is not multiplicative".into())?;
        ensure((&a + &b).frobenius() == &a.frobenius() + &b.frobenius(), || "Frobenius is not additive".into())?;
    }
    Ok(())
}

fn series_suite(rng: &mut StdRng, trials: usize) -> Outcome {
    for _ in 0..trials {
        let p = PRIMES[rng.gen_range(0..3)];
        let ring = lift(Ring::plain(p, rng.gen_range(1..=4)))?;
        let n = rng.gen_range(0..=12);
        let f = gen::series(rng, ring, n);
        let chain = lift(lift(f.substitute_p(Var::S))?.inv_derive(Var::S))?;
        let other = lift(lift(f.inv_derive(Var::S))?.substitute_p(Var::S))?.mul_int(p as i128);
        ensure(chain.congruent_valid(&other), || format!("chain rule fails for {f}"))?;
        let parts = lift(f.psi_decompose())?;
        let n_pad = p as usize * (n / p as usize + 1) - 1;
        let mut sum = Series::zero(ring, n_pad);
        for (i, g) in parts.iter().enumerate() {
            let sub = lift(g.extend_s(n_pad).substitute_p(Var::S))?;
            let x = lift(PadicScalar::new(p, ring.precision() + factorial_valuation(p, n_pad), i as i128))?;
            let shift = lift(binomial_exp(ring, &x, n_pad))?;
            sum = &sum + &sub.mul(&shift);
        }
        ensure(sum == f.extend_s(n_pad), || format!("psi decomposition does not rebuild {f}"))?;
        let (e1, e2) = (rng.gen_range(0..40u128), rng.gen_range(0..40u128));
        ensure(f.inv_derive_power(e1 + e2) == f.inv_derive_power(e1).inv_derive_power(e2), || "derive powers do not add".into())?;
    }
    Ok(())
}

fn measure_suite(rng: &mut StdRng, trials: usize) -> Outcome {
    for _ in 0..trials {
        let p = PRIMES[rng.gen_range(0..3)];
        let ring = lift(Ring::plain(p, rng.gen_range(1..=4)))?;
        let n = rng.gen_range(1..=10);
        let d = gen::dirac(rng, ring, 2, 4, n);
        let m = lift(amice(&d, &[n, n]))?;
        for k in 0..=n.min(4) {
            for l in 0..=n.min(4) {
                ensure(lift(m.moment(k, l))? == d.brute_moment(k as u32, l as u32), || format!("moment ({k},{l})"))?;
            }
        }
        let r = m.restrict_units();
        ensure(r.restrict_units() == r, || "restriction is not idempotent".into())?;
        ensure(r.is_unit_supported(), || "restriction leaves mass on pZ_p".into())?;
        let one = MeasureSeries::raw(r.series.slice_t(0));
        let q = lift(one.divide_by_x(1))?;
        ensure(lift(q.series.inv_derive(Var::S))? == one.series, || "division by x is not inverted by ∂".into())?;
    }
    for _ in 0..trials.div_ceil(4) {
        let p = PRIMES[rng.gen_range(0..3)];
        let prec = rng.gen_range(1..=4);
        let (seed, e) = gen::eisenstein(rng, p, prec, 4, 3);
        let base = lift(amice(&seed, &[e.series.order(Var::S), 4]))?;
        ensure(e.stabilize().series == base.series, || "stabilize differs from the seed".into())?;
        ensure(e.restrict_units().series == base.series, || "restriction differs from the seed".into())?;
    }
    for _ in 0..trials {
        let p = PRIMES[rng.gen_range(0..3)];
        let m = rng.gen_range(1..=3);
        let ring = lift(Ring::plain(p, m))?;
        let n = m as usize * (p as usize - 1) + rng.gen_range(0..4);
        let f = gen::psi_kernel(rng, ring, n);
        for s0 in [0i128, p as i128, (p * p) as i128] {
            ensure(lift(cyclotomic_trace(&f, &ring.scalar(s0)))?.is_zero(), || format!("trace at {s0} of {f}"))?;
        }
    }
    Ok(())
}

fn polylog_suite(rng: &mut StdRng, trials: usize) -> Outcome {
    for _ in 0..trials {
        let p = PRIMES[rng.gen_range(0..3)];
        let (n_s, level, m) = (2 * p as usize, rng.gen_range(0..=3), 2);
        let ring = lift(Ring::plain(p, m + ode_guard(p, n_s, level)))?;
        let theta = gen::unit_theta(rng, ring, n_s, 3);
        let report = lift(cross_check(&theta, level, Restriction::Restrict, m, 1))?;
        ensure(report.pass(), || format!("cross-check fails: {:?}", report.failures().next()))?;
        let grid = lift(moment_grid_closed(&theta, level, Restriction::Restrict, 1))?;
        if let Some(lower) = grid.transition() {
            ensure(lower == lift(moment_grid_closed(&theta, level - 1, Restriction::Restrict, 1))?, || "grid transition".into())?;
        }
    }
    Ok(())
}

fn logsheaf_suite(rng: &mut StdRng, trials: usize) -> Outcome {
    for _ in 0..trials {
        let p = PRIMES[rng.gen_range(0..3)];
        let ring = lift(Ring::plain(p, 3))?;
        let n = rng.gen_range(0..=3);
        let theta = gen::unit_theta(rng, ring, 2 * p as usize, 3);
        let report = lift(verify_polylog(&theta, n, Restriction::Restrict, 1))?;
        ensure(report.pass(), || format!("verification fails:\n{report}"))?;
        let mut rho = lift(rho_section(&theta, n, Restriction::Restrict, 1))?;
        let rhs = lift(crate::logsheaf::rhs_one_minus_phi(&theta, n, Restriction::Restrict, 1))?;
        let bumped = rho.get(0, 0).series.clone();
        rho.set(0, 0, Coefficient::integral(&bumped + &Series::constant(ring, bumped.order(Var::S), ring.one())));
        if n >= 1 {
            ensure(lift(verify_section(&rho, &rhs, 3))?.failures() == vec![(0, 1)], || "perturbation lands elsewhere".into())?;
        }
    }
    let ring = lift(Ring::plain(3, 4))?;
    let w10 = lift(LogSection::basis(1, 1, 0, Series::from_ints(ring, 4, &[1])))?;
    let mut acc = w10.clone();
    let mut fact = 1i128;
    for k in 2..=5usize {
        acc = lift(acc.dp_multiply(&w10, 6))?;
        fact *= k as i128;
        ensure(acc.get(k, 0).series == Series::from_ints(ring, 4, &[fact]), || format!("power {k} of ω^[1,0]"))?;
    }
    Ok(())
}

/// Runs every suite with a fixed seed; `trials` scales the random cases.
pub fn run(seed: u64, trials: usize) -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(seed);
    let suites: [(&'static str, fn(&mut StdRng, usize) -> Outcome); 6] = [
        ("padic-core: scalars", scalar_suite),
        ("padic-core: ring Frobenius", ring_suite),
        ("power-series", series_suite),
        ("measures", measure_suite),
        ("polylog", polylog_suite),
        ("logsheaf", logsheaf_suite),
    ];
    suites
        .into_iter()
        .map(|(name, suite)| match suite(&mut rng, trials) {
            Ok(()) => Check { name, passed: true, detail: String::new() },
            Err(detail) => Check { name, passed: false, detail },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for c in super::run(7, 6) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
