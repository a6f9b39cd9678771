//! Truncated power series in `S` or `(S, T)`.
//!
//! A series of order `N` is stored as a polynomial of degree at most `N`.
//! Under the Amice dictionary such a polynomial is exactly a measure carried
//! by `{0, ..., N}`: `(1+S)^m` is the Dirac mass at `m`. The invariant
//! derivation, `psi`, restriction to units and division by `x` preserve that
//! space, so on it they are exact. Products and `[p]`-substitution can push
//! mass past degree `N`; when they drop nonzero terms the series is marked
//! truncated and its valid order starts to shrink under differentiation.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, RingKind};
use crate::scalar::{factorial_valuation, PadicScalar, Valuation};

/// Series variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    S,
    T,
}

impl Var {
    fn index(self) -> usize {
        match self {
            Var::S => 0,
            Var::T => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    ring: Ring,
    arity: usize,
    orders: [usize; 2],
    coeffs: Vec<RingElement>,
    valid: [isize; 2],
    truncated: [bool; 2],
}

impl Series {
    pub fn zero(ring: Ring, n_s: usize) -> Series {
        Self::build(ring, 1, [n_s, 0], vec![ring.zero(); n_s + 1])
    }

    pub fn zero2(ring: Ring, n_s: usize, n_t: usize) -> Series {
        Self::build(ring, 2, [n_s, n_t], vec![ring.zero(); (n_s + 1) * (n_t + 1)])
    }

    pub fn constant(ring: Ring, n_s: usize, c: RingElement) -> Series {
        let mut out = Self::zero(ring, n_s);
        out.coeffs[0] = normalize(&ring, c);
        out
    }

    /// One-variable series with the given coefficients; missing ones are zero.
    pub fn from_coeffs(ring: Ring, n_s: usize, coeffs: Vec<RingElement>) -> Series {
        let mut c: Vec<RingElement> = coeffs.into_iter().take(n_s + 1).map(|x| normalize(&ring, x)).collect();
        c.resize(n_s + 1, ring.zero());
        Self::build(ring, 1, [n_s, 0], c)
    }

    pub fn from_ints(ring: Ring, n_s: usize, coeffs: &[i128]) -> Series {
        Self::from_coeffs(ring, n_s, coeffs.iter().map(|&c| ring.from_int(c)).collect())
    }

    /// Two-variable series from a function of the exponents.
    pub fn from_fn2(ring: Ring, n_s: usize, n_t: usize, f: impl Fn(usize, usize) -> RingElement) -> Series {
        let mut coeffs = Vec::with_capacity((n_s + 1) * (n_t + 1));
        for i in 0..=n_s {
            for j in 0..=n_t {
                coeffs.push(normalize(&ring, f(i, j)));
            }
        }
        Self::build(ring, 2, [n_s, n_t], coeffs)
    }

    fn build(ring: Ring, arity: usize, orders: [usize; 2], coeffs: Vec<RingElement>) -> Series {
        Series {
            ring,
            arity,
            orders,
            coeffs,
            valid: [orders[0] as isize, orders[1] as isize],
            truncated: [false, false],
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn prime(&self) -> u64 {
        self.ring.prime()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Truncation order in `var`; zero for `T` on a one-variable series.
    pub fn order(&self, var: Var) -> usize {
        self.orders[var.index()]
    }

    /// Highest degree in `var` whose coefficients are trusted, or -1.
    pub fn valid_order(&self, var: Var) -> isize {
        self.valid[var.index()]
    }

    /// Whether nonzero terms past the order were dropped somewhere upstream.
    pub fn is_truncated(&self, var: Var) -> bool {
        self.truncated[var.index()]
    }

    pub(crate) fn with_validity(mut self, var: Var, valid: isize, truncated: bool) -> Series {
        let v = var.index();
        self.valid[v] = valid.min(self.orders[v] as isize);
        self.truncated[v] = truncated;
        self
    }

    fn width(&self) -> usize {
        self.orders[1] + 1
    }

    pub fn coeff(&self, i: usize) -> &RingElement {
        &self.coeffs[i * self.width()]
    }

    pub fn coeff2(&self, i: usize, j: usize) -> &RingElement {
        &self.coeffs[i * self.width() + j]
    }

    /// Coefficients in row-major order (`S` degree outer, `T` degree inner).
    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    pub fn set_coeff2(&mut self, i: usize, j: usize, c: RingElement) {
        let w = self.width();
        self.coeffs[i * w + j] = normalize(&self.ring, c);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn effective_precision(&self) -> u32 {
        self.coeffs.iter().map(|c| c.effective_precision()).min().unwrap_or(self.ring.precision())
    }

    pub fn valuation(&self) -> Valuation {
        self.coeffs
            .iter()
            .map(|c| c.valuation())
            .reduce(Valuation::min)
            .unwrap_or(Valuation::AtLeast(self.ring.precision()))
    }

    pub fn with_effective_precision(&self, eff: u32) -> Series {
        self.map_coeffs(|c| c.with_effective_precision(eff))
    }

    pub fn map_coeffs(&self, f: impl Fn(&RingElement) -> RingElement) -> Series {
        Series { coeffs: self.coeffs.iter().map(f).collect(), ..self.clone() }
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&RingElement) -> Result<RingElement>) -> Result<Series> {
        Ok(Series { coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?, ..self.clone() })
    }

    pub fn scale(&self, c: &RingElement) -> Series {
        self.map_coeffs(|x| x * c)
    }

    pub fn mul_int(&self, n: i128) -> Series {
        self.map_coeffs(|x| x.mul_int(n))
    }

    /// Multiplication by `p^v`; coefficients gain `v` known digits.
    pub fn mul_p_pow(&self, v: u32) -> Series {
        self.map_coeffs(|c| c.mul_p_pow(v))
    }

    /// Exact division by `p^v`.
    pub fn div_p_pow(&self, v: u32) -> Result<Series> {
        self.try_map_coeffs(|c| c.div_p_pow(v))
    }

    /// Coefficient-wise Frobenius of the ring.
    pub fn frobenius(&self) -> Series {
        self.map_coeffs(|x| x.frobenius())
    }

    /// Reduces every coefficient to capacity `prec`.
    pub fn reduce(&self, prec: u32) -> Result<Series> {
        if prec >= self.ring.precision() {
            return Ok(self.clone());
        }
        let ring = self.ring.with_precision(prec)?;
        Ok(Series { ring, coeffs: self.coeffs.iter().map(|c| c.reduce(prec)).collect(), ..self.clone() })
    }

    /// Raises the capacity to `prec` without inventing digits.
    pub fn lift(&self, prec: u32) -> Result<Series> {
        if prec <= self.ring.precision() {
            return Ok(self.clone());
        }
        let ring = self.ring.with_precision(prec)?;
        Ok(Series { ring, coeffs: self.coeffs.iter().map(|c| c.lift(prec)).collect::<Result<_>>()?, ..self.clone() })
    }

    /// Agreement at the digits both sides know.
    pub fn congruent(&self, other: &Series) -> bool {
        self.arity == other.arity && self.orders == other.orders && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }

    /// Agreement of the coefficients both sides still trust.
    pub fn congruent_valid(&self, other: &Series) -> bool {
        if self.arity != other.arity || self.orders != other.orders {
            return false;
        }
        let vs = self.valid[0].min(other.valid[0]);
        let vt = self.valid[1].min(other.valid[1]);
        (0..=self.orders[0])
            .filter(|&i| i as isize <= vs)
            .all(|i| (0..self.width()).filter(|&j| j as isize <= vt).all(|j| self.coeff2(i, j) == other.coeff2(i, j)))
    }

    /// One-variable series in `S` at `T`-degree `j`.
    pub fn slice_t(&self, j: usize) -> Series {
        let c = (0..=self.orders[0]).map(|i| self.coeff2(i, j).clone()).collect();
        Self::build(self.ring, 1, [self.orders[0], 0], c).with_validity(Var::S, self.valid[0], self.truncated[0])
    }

    /// One-variable series in `T` at `S`-degree `i`, renamed to `S`.
    pub fn slice_s(&self, i: usize) -> Series {
        let w = self.width();
        let c = self.coeffs[i * w..(i + 1) * w].to_vec();
        Self::build(self.ring, 1, [self.orders[1], 0], c).with_validity(Var::S, self.valid[1], self.truncated[1])
    }

    /// Inverse of [`Series::slice_t`]: column `j` of the result is `slices[j]`.
    pub fn from_t_slices(slices: &[Series]) -> Series {
        let ring = slices[0].ring;
        let n_s = slices[0].orders[0];
        let n_t = slices.len() - 1;
        let mut out = Self::from_fn2(ring, n_s, n_t, |i, j| slices[j].coeff(i).clone());
        out.valid[0] = slices.iter().map(|s| s.valid[0]).min().unwrap();
        out.truncated[0] = slices.iter().any(|s| s.truncated[0]);
        out
    }

    /// Swaps the roles of `S` and `T`.
    pub fn transpose(&self) -> Series {
        let [n_s, n_t] = self.orders;
        let mut out = Self::from_fn2(self.ring, n_t, n_s, |i, j| self.coeff2(j, i).clone());
        out.valid = [self.valid[1], self.valid[0]];
        out.truncated = [self.truncated[1], self.truncated[0]];
        out
    }

    /// Applies a `Z_p`-linear map to every `S`-column, one q-lane at a time.
    fn map_s_lanes(&self, n_out: usize, f: impl Fn(&[PadicScalar]) -> Vec<PadicScalar>) -> Series {
        let w = self.width();
        let lanes = self.coeffs[0].coefficients().len();
        let mut coeffs = vec![self.ring.zero(); (n_out + 1) * w];
        let mut out_lanes: Vec<Vec<Vec<PadicScalar>>> = Vec::with_capacity(w);
        for j in 0..w {
            let mut per_lane = Vec::with_capacity(lanes);
            for l in 0..lanes {
                let col: Vec<PadicScalar> = (0..=self.orders[0]).map(|i| self.coeffs[i * w + j].coefficients()[l]).collect();
                let res = f(&col);
                debug_assert_eq!(res.len(), n_out + 1);
                per_lane.push(res);
            }
            out_lanes.push(per_lane);
        }
        for (j, per_lane) in out_lanes.into_iter().enumerate() {
            for i in 0..=n_out {
                coeffs[i * w + j] = match self.ring.kind() {
                    RingKind::Plain => RingElement::Plain(per_lane[0][i]),
                    RingKind::PolyQ { .. } => RingElement::PolyQ(per_lane.iter().map(|lane| lane[i]).collect()),
                };
            }
        }
        Series { coeffs, orders: [n_out, self.orders[1]], ..self.clone() }
    }

    fn on_var(&self, var: Var, f: impl Fn(&Series) -> Result<Series>) -> Result<Series> {
        match var {
            Var::S => f(self),
            Var::T => {
                if self.arity != 2 {
                    return Err(Error::Arity { expected: 2 });
                }
                Ok(f(&self.transpose())?.transpose())
            }
        }
    }

    /// `(1+v) d/dv`.
    pub fn inv_derive(&self, var: Var) -> Result<Series> {
        self.on_var(var, |f| {
            let mut out = f.map_s_lanes(f.orders[0], |c| {
                let n = c.len() - 1;
                (0..=n)
                    .map(|m| {
                        let here = c[m].mul_int(m as i128);
                        if m < n {
                            here + c[m + 1].mul_int(m as i128 + 1)
                        } else {
                            here
                        }
                    })
                    .collect()
            });
            if f.truncated[0] {
                out.valid[0] = f.valid[0] - 1;
            }
            Ok(out)
        })
    }

    /// `f([p](v))`, truncated at the same order.
    pub fn substitute_p(&self, var: Var) -> Result<Series> {
        self.on_var(var, |f| {
            let sub = SubstitutionMatrix::new(f.ring, f.orders[0]);
            let dropped = f.coeffs_beyond_after_substitution(&sub);
            let mut out = f.map_s_lanes(f.orders[0], |c| sub.apply(c));
            out.truncated[0] = f.truncated[0] || dropped;
            Ok(out)
        })
    }

    fn coeffs_beyond_after_substitution(&self, sub: &SubstitutionMatrix) -> bool {
        // [p]^i is monic of degree pi
        let n = self.orders[0];
        let w = self.width();
        (0..=n).filter(|&i| i * sub.p > n).any(|i| (0..w).any(|j| !self.coeffs[i * w + j].is_zero()))
    }

    /// The component `g_0` of `f = sum_i (1+S)^i g_i([p](S))`, per `T`-slice.
    pub fn psi(&self) -> Series {
        let basis = PsiBasis::new(self.ring, self.orders[0]);
        let mut out = self.map_s_lanes(basis.j_max, |c| basis.decompose(c).swap_remove(0));
        out.valid[0] = if self.truncated[0] { self.valid[0].div_euclid(self.prime() as isize) } else { basis.j_max as isize };
        out
    }

    /// All components `g_0, ..., g_{p-1}` of a one-variable series.
    pub fn psi_decompose(&self) -> Result<Vec<Series>> {
        if self.arity != 1 {
            return Err(Error::Arity { expected: 1 });
        }
        let basis = PsiBasis::new(self.ring, self.orders[0]);
        let p = self.prime() as usize;
        let mut parts = Vec::with_capacity(p);
        for i in 0..p {
            parts.push(self.map_s_lanes(basis.j_max, |c| basis.decompose(c).swap_remove(i)));
        }
        Ok(parts)
    }

    /// `psi(f) = 0` at the known digits.
    pub fn psi_vanishes(&self) -> bool {
        self.psi().is_zero()
    }

    /// `f - phi(psi(f))`, the projection onto the kernel of `psi`.
    pub fn restrict_units(&self) -> Series {
        let g = self.psi();
        let n = self.orders[0];
        // g has degree <= N/p, so phi(g) needs no truncation
        let widened = g.map_s_lanes(n, |c| {
            let mut v = c.to_vec();
            v.resize(n + 1, c[0].zero_like());
            v
        });
        let lifted = widened.substitute_p(Var::S).expect("S is always present");
        let mut out = self - &lifted;
        out.valid = self.valid;
        out.truncated = self.truncated;
        out
    }

    /// `∂^e f` in `S` by binary exponentiation of the matrix of `∂`.
    pub fn inv_derive_power(&self, e: u128) -> Series {
        let m = DerivePowerMatrix::new(self.ring, self.orders[0], e);
        self.apply_derive_power(&m)
    }

    pub fn apply_derive_power(&self, m: &DerivePowerMatrix) -> Series {
        assert_eq!(m.n, self.orders[0], "matrix built for another order");
        let mut out = self.map_s_lanes(m.n, |c| m.apply(c));
        if self.truncated[0] {
            let loss = isize::try_from(m.e).unwrap_or(isize::MAX);
            out.valid[0] = self.valid[0].saturating_sub(loss).max(-1);
        }
        out
    }

    /// `∂^k` in `var`, then `var = 0`. A two-variable series becomes a
    /// series in the other variable (renamed `S`); a one-variable series
    /// becomes a constant of order 0.
    pub fn moment_extract(&self, var: Var, k: usize) -> Result<Series> {
        if var == Var::T && self.arity != 2 {
            return Err(Error::Arity { expected: 2 });
        }
        let have = self.orders[var.index()];
        if k > have {
            return Err(Error::InsufficientOrder { have, need: k });
        }
        // only degrees <= k reach the constant term of ∂^k
        let cut = self.truncate_var(var, k).with_validity(var, k as isize, false);
        let mut d = cut;
        for _ in 0..k {
            d = d.inv_derive(var)?;
        }
        Ok(match (self.arity, var) {
            (1, _) => Series::constant(self.ring, 0, d.coeff(0).clone()),
            (_, Var::S) => d.slice_s(0),
            (_, Var::T) => d.slice_t(0),
        })
    }

    /// `∂_S^k ∂_T^l f` at the origin.
    pub fn moment(&self, k: usize, l: usize) -> Result<RingElement> {
        let first = self.moment_extract(Var::S, k)?;
        if self.arity == 1 {
            if l > 0 {
                return Err(Error::Arity { expected: 2 });
            }
            return Ok(first.coeff(0).clone());
        }
        Ok(first.moment_extract(Var::S, l)?.coeff(0).clone())
    }

    /// Drops every term of degree above `n` in `var`.
    pub fn truncate_var(&self, var: Var, n: usize) -> Series {
        let v = var.index();
        if n >= self.orders[v] {
            return self.clone();
        }
        let dropped = match var {
            Var::S => (n + 1..=self.orders[0]).any(|i| (0..self.width()).any(|j| !self.coeff2(i, j).is_zero())),
            Var::T => (0..=self.orders[0]).any(|i| (n + 1..self.width()).any(|j| !self.coeff2(i, j).is_zero())),
        };
        let mut orders = self.orders;
        orders[v] = n;
        let w = orders[1] + 1;
        let mut coeffs = Vec::with_capacity((orders[0] + 1) * w);
        for i in 0..=orders[0] {
            for j in 0..w {
                coeffs.push(self.coeff2(i, j).clone());
            }
        }
        let mut out = Series { coeffs, orders, ..self.clone() };
        out.valid[v] = self.valid[v].min(n as isize);
        out.truncated[v] |= dropped;
        out
    }

    /// Pads with zero coefficients up to order `n` in `S`.
    pub fn extend_s(&self, n: usize) -> Series {
        if n <= self.orders[0] {
            return self.clone();
        }
        let w = self.width();
        let mut coeffs = self.coeffs.clone();
        coeffs.resize((n + 1) * w, self.ring.zero());
        let mut out = Series { coeffs, orders: [n, self.orders[1]], ..self.clone() };
        if !self.truncated[0] {
            out.valid[0] = n as isize;
        }
        out
    }

    /// Truncated product; both factors must have the same shape.
    pub fn mul(&self, other: &Series) -> Series {
        assert_eq!((self.arity, self.orders), (other.arity, other.orders), "series shapes differ");
        let [n_s, n_t] = self.orders;
        let w = n_t + 1;
        let mut out = vec![self.ring.zero(); self.coeffs.len()];
        let mut dropped = [false, false];
        for (a_idx, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && a.effective_precision() >= self.ring.precision() {
                continue;
            }
            let (i1, j1) = (a_idx / w, a_idx % w);
            for (b_idx, b) in other.coeffs.iter().enumerate() {
                let (i2, j2) = (b_idx / w, b_idx % w);
                let prod = a * b;
                if i1 + i2 > n_s || j1 + j2 > n_t {
                    if !prod.is_zero() {
                        dropped[0] |= i1 + i2 > n_s;
                        dropped[1] |= j1 + j2 > n_t;
                    }
                    continue;
                }
                let k = (i1 + i2) * w + j1 + j2;
                out[k] = &out[k] + &prod;
            }
        }
        let mut res = Series { coeffs: out, ..self.clone() };
        for v in 0..2 {
            res.valid[v] = self.valid[v].min(other.valid[v]);
            res.truncated[v] = self.truncated[v] || other.truncated[v] || dropped[v];
        }
        res
    }

    /// Value at `S = 0` (and `T = 0`).
    pub fn constant_term(&self) -> RingElement {
        self.coeffs[0].clone()
    }

    fn zip(&self, other: &Series, f: impl Fn(&RingElement, &RingElement) -> RingElement) -> Series {
        assert_eq!((self.arity, self.orders), (other.arity, other.orders), "series shapes differ");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect();
        let mut out = Series { coeffs, ..self.clone() };
        for v in 0..2 {
            out.valid[v] = self.valid[v].min(other.valid[v]);
            out.truncated[v] = self.truncated[v] || other.truncated[v];
        }
        out
    }
}

fn normalize(ring: &Ring, c: RingElement) -> RingElement {
    match (ring.kind(), c) {
        (RingKind::PolyQ { .. }, RingElement::Plain(s)) => ring.from_scalar(s),
        (_, c) => c,
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.map_coeffs(|c| -c)
    }
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.congruent(other)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..=self.orders[0] {
            for j in 0..self.width() {
                let c = self.coeff2(i, j);
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{c}")?;
                if i > 0 {
                    write!(f, "*S^{i}")?;
                }
                if j > 0 {
                    write!(f, "*T^{j}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `[p](S) = (1+S)^p - 1` truncated at order `n`.
pub fn p_series(ring: Ring, n: usize) -> Series {
    let p = ring.prime() as i128;
    let mut c = vec![0i128; n + 1];
    let mut binom: i128 = 1;
    for (m, slot) in c.iter_mut().enumerate().take(n.min(p as usize) + 1).skip(1) {
        binom = binom * (p - m as i128 + 1) / m as i128;
        *slot = binom;
    }
    let out = Series::from_ints(ring, n, &c);
    let truncated = (p as usize) > n;
    out.with_validity(Var::S, n as isize, truncated)
}

/// `(1+S)^x = sum_m C(x, m) S^m` up to order `n`.
///
/// `x` must know `M + v_p(n!)` digits, where `M` is the ring capacity; the
/// binomial denominators eat exactly the extra ones.
pub fn binomial_exp(ring: Ring, x: &PadicScalar, n: usize) -> Result<Series> {
    let target = ring.precision();
    let guard = factorial_valuation(ring.prime(), n);
    let needed = target + guard;
    if x.effective_precision() < needed {
        return Err(Error::GuardDigits { needed, available: x.effective_precision() });
    }
    let x = x.reduce(needed);
    let p = ring.prime();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut numerator = x.int_like(1);
    let mut unit_fact = ring.scalar(1);
    let mut v_fact = 0u32;
    coeffs.push(ring.from_int(1));
    for m in 1..=n {
        numerator = numerator * (x - x.int_like(m as i128 - 1));
        let mut mm = m as u64;
        while mm % p == 0 {
            mm /= p;
            v_fact += 1;
        }
        unit_fact = unit_fact.mul_int(mm as i128);
        let c = numerator.div_p_pow(v_fact)?.reduce(target) * unit_fact.unit_inverse()?;
        coeffs.push(ring.from_scalar(c.with_effective_precision(target)));
    }
    let out = Series::from_coeffs(ring, n, coeffs);
    let exact = x.residue() <= n as u128;
    Ok(out.with_validity(Var::S, n as isize, !exact))
}

/// Matrix of `[p]^j` in the monomial basis, truncated at order `n`.
struct SubstitutionMatrix {
    p: usize,
    ring: Ring,
    /// rows[j][m] = coefficient of S^m in [p](S)^j
    rows: Vec<Vec<u128>>,
}

impl SubstitutionMatrix {
    fn new(ring: Ring, n: usize) -> Self {
        let modulus = ring.modulus();
        let ps = p_series_residues(ring, n);
        let mut rows = Vec::with_capacity(n + 1);
        let mut cur = vec![0u128; n + 1];
        cur[0] = 1 % modulus;
        for _ in 0..=n {
            rows.push(cur.clone());
            cur = poly_mul_trunc(&cur, &ps, n, modulus);
        }
        SubstitutionMatrix { p: ring.prime() as usize, ring, rows }
    }

    fn apply(&self, c: &[PadicScalar]) -> Vec<PadicScalar> {
        let n = c.len() - 1;
        let mut out = vec![c[0].zero_like(); n + 1];
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() && cj.effective_precision() >= self.ring.precision() {
                continue;
            }
            for (m, &r) in self.rows[j].iter().enumerate().skip(j) {
                if r != 0 {
                    out[m] = out[m] + *cj * self.ring.scalar_from_residue(r);
                }
            }
        }
        out
    }
}

fn p_series_residues(ring: Ring, n: usize) -> Vec<u128> {
    p_series(ring, n).coeffs().iter().map(|c| c.constant().residue()).collect()
}

fn poly_mul_trunc(a: &[u128], b: &[u128], n: usize, modulus: u128) -> Vec<u128> {
    let mut out = vec![0u128; n + 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] = (out[i + j] + x * y % modulus) % modulus;
        }
    }
    out
}

/// The basis `(1+S)^i [p](S)^j` used to split off `g_0, ..., g_{p-1}`.
///
/// `(1+S)^i [p](S)^j` is monic of degree `i + pj`, so the change of basis
/// is unitriangular and the decomposition needs no division at all.
pub struct PsiBasis {
    p: usize,
    j_max: usize,
    padded: usize,
    ring: Ring,
    /// basis[i + p*j] has degree i + p*j
    basis: Vec<Vec<u128>>,
}

impl PsiBasis {
    pub fn new(ring: Ring, n: usize) -> Self {
        let p = ring.prime() as usize;
        let modulus = ring.modulus();
        let j_max = n / p;
        let padded = p * (j_max + 1) - 1;
        let ps = p_series_residues(ring, padded);
        let mut one_plus_s = vec![0u128; padded + 1];
        one_plus_s[0] = 1 % modulus;
        if padded >= 1 {
            one_plus_s[1] = 1 % modulus;
        }
        let mut basis = vec![Vec::new(); padded + 1];
        let mut pj = vec![0u128; padded + 1];
        pj[0] = 1 % modulus;
        for j in 0..=j_max {
            let mut cur = pj.clone();
            for i in 0..p {
                basis[i + p * j] = cur.clone();
                cur = poly_mul_trunc(&cur, &one_plus_s, padded, modulus);
            }
            pj = poly_mul_trunc(&pj, &ps, padded, modulus);
        }
        PsiBasis { p, j_max, padded, ring, basis }
    }

    /// Order of each `g_i`.
    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// Splits one coefficient column into `p` columns of length `j_max + 1`.
    pub fn decompose(&self, c: &[PadicScalar]) -> Vec<Vec<PadicScalar>> {
        let zero = c[0].zero_like();
        let mut rest: Vec<PadicScalar> = c.to_vec();
        rest.resize(self.padded + 1, zero);
        let mut parts = vec![vec![zero; self.j_max + 1]; self.p];
        for d in (0..=self.padded).rev() {
            let lead = rest[d];
            let (i, j) = (d % self.p, d / self.p);
            parts[i][j] = lead;
            if lead.is_zero() && lead.effective_precision() >= self.ring.precision() {
                continue;
            }
            for (m, &b) in self.basis[d].iter().enumerate().take(d + 1) {
                if b != 0 {
                    rest[m] = rest[m] - lead * self.ring.scalar_from_residue(b);
                }
            }
        }
        parts
    }
}

/// `D^e` for the matrix `D` of `∂` on polynomials of degree `<= n`.
///
/// `∂ S^m = m S^m + m S^(m-1)`, so `D` is upper bidiagonal and every power
/// is upper triangular.
#[derive(Clone, Debug)]
pub struct DerivePowerMatrix {
    n: usize,
    e: u128,
    ring: Ring,
    /// mat[r][c], zero below the diagonal
    mat: Vec<Vec<u128>>,
}

impl DerivePowerMatrix {
    pub fn new(ring: Ring, n: usize, e: u128) -> Self {
        let modulus = ring.modulus();
        let mut d = vec![vec![0u128; n + 1]; n + 1];
        for m in 0..=n {
            d[m][m] = m as u128 % modulus;
            if m > 0 {
                d[m - 1][m] = m as u128 % modulus;
            }
        }
        let mut acc: Vec<Vec<u128>> = (0..=n)
            .map(|r| {
                let mut row = vec![0u128; n + 1];
                row[r] = 1 % modulus;
                row
            })
            .collect();
        let mut base = d;
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = upper_mat_mul(&acc, &base, modulus);
            }
            k >>= 1;
            if k > 0 {
                base = upper_mat_mul(&base, &base, modulus);
            }
        }
        DerivePowerMatrix { n, e, ring, mat: acc }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> u128 {
        self.e
    }

    fn apply(&self, c: &[PadicScalar]) -> Vec<PadicScalar> {
        (0..=self.n)
            .map(|r| {
                let mut acc = c[0].zero_like();
                for (col, &m) in self.mat[r].iter().enumerate().skip(r) {
                    if m != 0 {
                        acc = acc + c[col] * self.ring.scalar_from_residue(m);
                    }
                }
                acc
            })
            .collect()
    }
}

fn upper_mat_mul(a: &[Vec<u128>], b: &[Vec<u128>], modulus: u128) -> Vec<Vec<u128>> {
    let n = a.len();
    let mut out = vec![vec![0u128; n]; n];
    for r in 0..n {
        for k in r..n {
            let x = a[r][k];
            if x == 0 {
                continue;
            }
            for c in k..n {
                let y = b[k][c];
                if y != 0 {
                    out[r][c] = (out[r][c] + x * y % modulus) % modulus;
                }
            }
        }
    }
    out
}
