//! Measures on `Z_p` and `Z_p^2` through their Amice transforms.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, RingKind};
use crate::scalar::{factorial_valuation, totient, PadicScalar};
use crate::series::{binomial_exp, DerivePowerMatrix, Series, Var};

/// One weighted point mass.
#[derive(Clone, Debug)]
pub struct DiracTerm {
    pub x: PadicScalar,
    pub y: Option<PadicScalar>,
    pub c: RingElement,
}

/// Finite sum of weighted Dirac masses.
///
/// Points are kept at a capacity of their own so that the binomial
/// coefficients of `(1+S)^x` can be formed to full ring precision.
#[derive(Clone, Debug)]
pub struct DiracCombination {
    ring: Ring,
    arity: usize,
    point_precision: u32,
    terms: Vec<DiracTerm>,
    label: Option<String>,
}

impl DiracCombination {
    pub fn new(ring: Ring, arity: usize, point_precision: u32) -> Result<Self> {
        if arity != 1 && arity != 2 {
            return Err(Error::Arity { expected: 2 });
        }
        // validates the capacity
        PadicScalar::new(ring.prime(), point_precision.max(ring.precision()), 0)?;
        Ok(DiracCombination { ring, arity, point_precision: point_precision.max(ring.precision()), terms: Vec::new(), label: None })
    }

    /// Points carry exactly the guard digits `amice` needs at order `max_order`.
    pub fn with_guard(ring: Ring, arity: usize, max_order: usize) -> Result<Self> {
        Self::new(ring, arity, ring.precision() + factorial_valuation(ring.prime(), max_order))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn point_precision(&self) -> u32 {
        self.point_precision
    }

    pub fn terms(&self) -> &[DiracTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = Some(label.into());
    }

    /// Adds `c·δ_(x,y)`, merging with an existing mass at the same point.
    pub fn push(&mut self, x: i128, y: Option<i128>, c: RingElement) -> Result<()> {
        if y.is_some() != (self.arity == 2) {
            return Err(Error::Arity { expected: self.arity });
        }
        let p = self.ring.prime();
        let x = PadicScalar::new(p, self.point_precision, x)?;
        let y = y.map(|y| PadicScalar::new(p, self.point_precision, y)).transpose()?;
        let c = match (self.ring.kind(), c) {
            (RingKind::PolyQ { .. }, RingElement::Plain(s)) => self.ring.from_scalar(s),
            (_, c) => c,
        };
        let key = |t: &DiracTerm| (t.x.residue(), t.y.map(|v| v.residue()));
        let k = (x.residue(), y.map(|v| v.residue()));
        if let Some(t) = self.terms.iter_mut().find(|t| key(t) == k) {
            t.c = &t.c + &c;
        } else {
            self.terms.push(DiracTerm { x, y, c });
        }
        Ok(())
    }

    pub fn push_int(&mut self, x: i128, y: Option<i128>, c: i128) -> Result<()> {
        let c = self.ring.from_int(c);
        self.push(x, y, c)
    }

    /// `sum_i c_i x_i^k y_i^l` computed directly.
    pub fn brute_moment(&self, k: u32, l: u32) -> RingElement {
        let prec = self.ring.precision();
        let mut acc = self.ring.zero();
        for t in &self.terms {
            let mut w = t.x.reduce(prec).pow(k as u128);
            if let Some(y) = t.y {
                w = w * y.reduce(prec).pow(l as u128);
            } else if l > 0 {
                w = w.zero_like();
            }
            acc = &acc + &t.c.scale(w);
        }
        acc
    }
}

/// Where a measure series came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Dirac,
    Raw,
    Restricted,
    Stabilized,
    Synthetic,
    Divided,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Dirac => "dirac",
            Provenance::Raw => "raw",
            Provenance::Restricted => "restricted",
            Provenance::Stabilized => "stabilized",
            Provenance::Synthetic => "synthetic",
            Provenance::Divided => "divided",
        };
        f.write_str(s)
    }
}

/// A series read as the Amice transform of a measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSeries {
    pub series: Series,
    pub provenance: Provenance,
}

impl MeasureSeries {
    pub fn raw(series: Series) -> Self {
        MeasureSeries { series, provenance: Provenance::Raw }
    }

    pub fn ring(&self) -> Ring {
        self.series.ring()
    }

    pub fn arity(&self) -> usize {
        self.series.arity()
    }

    /// `∫ x^k y^l dμ`.
    pub fn moment(&self, k: usize, l: usize) -> Result<RingElement> {
        self.series.moment(k, l)
    }

    /// Restriction to `Z_p^× (× Z_p)`: `f - phi(psi(f))`.
    pub fn restrict_units(&self) -> MeasureSeries {
        MeasureSeries { series: self.series.restrict_units(), provenance: Provenance::Restricted }
    }

    /// `θ(S,T) - σ(θ)([p](S), T)`.
    pub fn stabilize(&self) -> MeasureSeries {
        let shifted = self.series.frobenius().substitute_p(Var::S).expect("S is always present");
        MeasureSeries { series: &self.series - &shifted, provenance: Provenance::Stabilized }
    }

    pub fn is_unit_supported(&self) -> bool {
        self.series.psi_vanishes()
    }

    /// Amice transform of `x^(-times)·μ`, through powers of `∂`.
    pub fn divide_by_x(&self, times: u32) -> Result<MeasureSeries> {
        let inv = InverseX::new(self.ring(), self.series.order(Var::S));
        Ok(MeasureSeries { series: inv.apply(&self.series, times)?, provenance: Provenance::Divided })
    }

    /// Same as [`MeasureSeries::divide_by_x`] by integrating `∂F = f` with
    /// `psi(F) = 0`. Divisions by `m + 1` cost digits, so feed it a series
    /// with guard precision.
    pub fn divide_by_x_ode(&self, times: u32) -> Result<MeasureSeries> {
        if !self.is_unit_supported() {
            return Err(Error::NotUnitSupported);
        }
        let mut cur = self.series.clone();
        for _ in 0..times {
            cur = match cur.arity() {
                1 => integrate_trace_zero(&cur)?,
                _ => {
                    let slices: Vec<Series> =
                        (0..=cur.order(Var::T)).map(|j| integrate_trace_zero(&cur.slice_t(j))).collect::<Result<_>>()?;
                    Series::from_t_slices(&slices)
                }
            };
        }
        Ok(MeasureSeries { series: cur, provenance: Provenance::Divided })
    }
}

/// `∂^(φ(p^M) - 1)`, which inverts `∂` on unit-supported series of order `n`.
#[derive(Clone, Debug)]
pub struct InverseX {
    step: DerivePowerMatrix,
}

impl InverseX {
    pub fn new(ring: Ring, n: usize) -> Self {
        let e = totient(ring.prime(), ring.precision()) - 1;
        InverseX { step: DerivePowerMatrix::new(ring, n, e) }
    }

    pub fn order(&self) -> usize {
        self.step.order()
    }

    /// `x^(-times)` on a series in `S` (per `T`-slice for two variables).
    pub fn apply(&self, f: &Series, times: u32) -> Result<Series> {
        if !f.psi_vanishes() {
            return Err(Error::NotUnitSupported);
        }
        let mut cur = f.clone();
        for _ in 0..times {
            cur = cur.apply_derive_power(&self.step);
        }
        Ok(cur.with_validity(Var::S, f.valid_order(Var::S), f.is_truncated(Var::S)))
    }
}

/// Solves `∂F = f` coefficient by coefficient and fixes the constant by
/// `psi(F) = 0`.
///
/// The recursion `F_(m+1) = (f_m - m F_m) / (m+1)` starts from `F_0 = 0`;
/// every division by a multiple of `p` costs digits, which the effective
/// precision of the result records.
pub fn integrate_trace_zero(f: &Series) -> Result<Series> {
    if f.arity() != 1 {
        return Err(Error::Arity { expected: 1 });
    }
    let ring = f.ring();
    let p = ring.prime();
    let n = f.order(Var::S);
    let mut out = vec![ring.zero(); n + 1];
    for m in 0..n {
        let (vm, um) = split_int(p, m as u64);
        let m_term = out[m].mul_p_pow(vm).mul_int(um as i128);
        let (v1, u1) = split_int(p, m as u64 + 1);
        let inv = ring.scalar(u1 as i128).unit_inverse()?;
        let num = &f.coeff(m).clone() - &m_term;
        out[m + 1] = num.div_p_pow(v1)?.scale(inv);
    }
    let partial = Series::from_coeffs(ring, n, out);
    let c = -&partial.psi().constant_term();
    let shifted = &partial + &Series::constant(ring, n, c);
    let residual = shifted.psi().valuation();
    let eff = shifted.effective_precision().min(residual.lower_bound());
    Ok(shifted.with_effective_precision(eff).with_validity(Var::S, f.valid_order(Var::S), f.is_truncated(Var::S)))
}

fn split_int(p: u64, mut n: u64) -> (u32, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// `sum_i c_i (1+S)^(x_i) (1+T)^(y_i)` truncated at `orders`.
///
/// `orders` holds `N_S` and, for two variables, `N_T`.
pub fn amice(d: &DiracCombination, orders: &[usize]) -> Result<MeasureSeries> {
    let ring = d.ring();
    let n_s = orders[0];
    let series = match d.arity() {
        1 => {
            let mut acc = Series::zero(ring, n_s);
            for t in &d.terms {
                acc = &acc + &binomial_exp(ring, &t.x, n_s)?.scale(&t.c);
            }
            acc
        }
        _ => {
            let n_t = *orders.get(1).ok_or(Error::Arity { expected: 2 })?;
            let mut acc = Series::zero2(ring, n_s, n_t);
            for t in &d.terms {
                let y = t.y.ok_or(Error::Arity { expected: 2 })?;
                let fx = binomial_exp(ring, &t.x, n_s)?;
                let fy = binomial_exp(ring, &y, n_t)?;
                let mut term = Series::from_fn2(ring, n_s, n_t, |i, j| &(fx.coeff(i) * fy.coeff(j)) * &t.c);
                term = term
                    .with_validity(Var::S, n_s as isize, fx.is_truncated(Var::S))
                    .with_validity(Var::T, n_t as isize, fy.is_truncated(Var::S));
                acc = &acc + &term;
            }
            acc
        }
    };
    Ok(MeasureSeries { series, provenance: Provenance::Dirac })
}

/// `sum_(j>=0) σ^j(θ_ν)([p]^(∘j)(S), T)` for a seed `ν` supported on units.
///
/// The sum stops at the first vanishing term. That needs a Frobenius that
/// kills the seed coefficients eventually (q-divisible coefficients in a
/// poly-q ring); otherwise [`Error::DivergentSeed`] is returned.
pub fn eisenstein_like(seed: &DiracCombination, orders: &[usize]) -> Result<MeasureSeries> {
    for t in seed.terms() {
        if !t.x.is_unit() {
            return Err(Error::NonUnitSeed(t.x.residue()));
        }
    }
    let ring = seed.ring();
    let mut term = amice(seed, orders)?.series;
    let mut acc = term.clone();
    let bound = match ring.kind() {
        RingKind::Plain => 0,
        RingKind::PolyQ { bound } => bound,
    };
    let limit = ring.precision() as usize + orders[0] + ilog_ceil(ring.prime(), bound + 1) + 2;
    for _ in 0..limit {
        if term.is_zero() {
            return Ok(MeasureSeries { series: acc, provenance: Provenance::Synthetic });
        }
        term = term.frobenius().substitute_p(Var::S)?;
        acc = &acc + &term;
    }
    if term.is_zero() {
        return Ok(MeasureSeries { series: acc, provenance: Provenance::Synthetic });
    }
    Err(Error::DivergentSeed(limit))
}

fn ilog_ceil(p: u64, n: usize) -> usize {
    let mut k = 0;
    let mut q = 1usize;
    while q < n {
        q = q.saturating_mul(p as usize);
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &Series) -> Vec<u128> {
        s.coeffs().iter().map(|c| c.constant().residue()).collect()
    }

    fn dirac1(p: u64, m: u32, n: usize, pts: &[(i128, i128)]) -> MeasureSeries {
        let r = Ring::plain(p, m).unwrap();
        let mut d = DiracCombination::with_guard(r, 1, n).unwrap();
        for &(x, c) in pts {
            d.push_int(x, None, c).unwrap();
        }
        amice(&d, &[n]).unwrap()
    }

    #[test]
    fn amice_examples() {
        let m = dirac1(5, 2, 4, &[(3, 1)]);
        assert_eq!(ints(&m.series), vec![1, 3, 3, 1, 0]);
        assert_eq!(m.moment(2, 0).unwrap().constant().residue(), 9);
        let s = dirac1(5, 2, 4, &[(1, 1), (0, -1)]);
        assert_eq!(ints(&s.series), vec![0, 1, 0, 0, 0]);
        assert!(s.moment(0, 0).unwrap().is_zero());
        assert_eq!(dirac1(5, 2, 4, &[(4, 3)]).moment(0, 0).unwrap().constant().residue(), 3);
    }

    #[test]
    fn two_variable_moment() {
        let r = Ring::plain(5, 3).unwrap();
        let mut d = DiracCombination::with_guard(r, 2, 4).unwrap();
        d.push_int(2, Some(3), 1).unwrap();
        let m = amice(&d, &[4, 4]).unwrap();
        assert_eq!(m.moment(1, 2).unwrap().constant().residue(), 18);
    }

    #[test]
    fn restriction_examples() {
        let m = dirac1(3, 3, 4, &[(1, 1), (3, 1)]);
        assert_eq!(ints(&m.restrict_units().series), vec![1, 1, 0, 0, 0]);
        assert!(dirac1(2, 3, 4, &[(2, 1)]).restrict_units().series.is_zero());
        assert!(dirac1(3, 3, 4, &[(1, 1)]).is_unit_supported());
        assert!(!dirac1(3, 3, 4, &[(3, 1)]).is_unit_supported());
    }

    #[test]
    fn division_examples() {
        let m = dirac1(3, 3, 4, &[(2, 1)]);
        let d = m.divide_by_x(1).unwrap();
        assert_eq!(d.series, m.series.mul_int(14));
        let both = dirac1(3, 3, 4, &[(2, 1), (4, 1)]);
        let want = &dirac1(3, 3, 4, &[(2, 14)]).series + &dirac1(3, 3, 4, &[(4, 7)]).series;
        assert_eq!(both.divide_by_x(1).unwrap().series, want);
        let lifted = MeasureSeries::raw(both.series.lift(8).unwrap());
        assert_eq!(lifted.divide_by_x_ode(1).unwrap().series.reduce(3).unwrap(), want);
        assert_eq!(dirac1(3, 3, 4, &[(3, 1)]).divide_by_x(1), Err(Error::NotUnitSupported));
    }

    #[test]
    fn plain_eisenstein_seed_diverges() {
        let r = Ring::plain(2, 3).unwrap();
        let mut d = DiracCombination::with_guard(r, 2, 7).unwrap();
        d.push_int(1, Some(0), 1).unwrap();
        assert!(matches!(eisenstein_like(&d, &[7, 7]), Err(Error::DivergentSeed(_))));
    }

    #[test]
    fn poly_q_eisenstein_telescopes() {
        let r = Ring::poly_q(3, 4, 4).unwrap();
        let mut d = DiracCombination::with_guard(r, 2, 9).unwrap();
        d.push(2, Some(1), r.from_q_coeffs(&[0, 1, 2])).unwrap();
        let e = eisenstein_like(&d, &[9, 3]).unwrap();
        let base = amice(&d, &[9, 3]).unwrap();
        assert_eq!(e.stabilize().series, base.series);
        assert_eq!(e.restrict_units().series, base.series);
    }
}
