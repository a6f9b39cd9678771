//! Sections of the logarithm sheaves over a tubular neighbourhood, written in
//! the divided-power basis `ω^[k,l]`, `k + l <= n`.
//!
//! Every coefficient is a one-variable series together with a power of `p`,
//! so `p^(-l)` from the Frobenius structure costs nothing until the value is
//! actually needed as an integral series.

use std::fmt;

use crate::error::{Error, Result};
use crate::measure::MeasureSeries;
use crate::polylog::{g_series, moment_grid_closed, par_columns, MomentGrid, Restriction};
use crate::ring::Ring;
use crate::scalar::Valuation;
use crate::series::{Series, Var};

/// `p^shift · series`.
#[derive(Clone, Debug)]
pub struct Coefficient {
    pub shift: i32,
    pub series: Series,
}

impl Coefficient {
    pub fn integral(series: Series) -> Self {
        Coefficient { shift: 0, series }
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    /// The coefficient as an honest series; fails if `p^shift` is not integral on it.
    pub fn to_series(&self) -> Result<Series> {
        if self.shift >= 0 {
            Ok(self.series.mul_p_pow(self.shift as u32))
        } else {
            self.series.div_p_pow(self.shift.unsigned_abs())
        }
    }

    /// Both sides at the smaller shift; raising a shift is exact.
    fn align(&self, other: &Coefficient) -> (i32, Series, Series) {
        let s = self.shift.min(other.shift);
        (s, self.series.mul_p_pow((self.shift - s) as u32), other.series.mul_p_pow((other.shift - s) as u32))
    }

    fn add(&self, other: &Coefficient) -> Coefficient {
        let (shift, a, b) = self.align(other);
        Coefficient { shift, series: &a + &b }
    }

    fn sub(&self, other: &Coefficient) -> Coefficient {
        let (shift, a, b) = self.align(other);
        Coefficient { shift, series: &a - &b }
    }

    fn map(&self, f: impl FnOnce(&Series) -> Series) -> Coefficient {
        Coefficient { shift: self.shift, series: f(&self.series) }
    }

    /// Valuation of `p^shift · series`, reported at the integral scale.
    pub fn valuation(&self) -> Valuation {
        let shift = |v: u32| (v as i64 + self.shift as i64).max(0) as u32;
        match self.series.valuation() {
            Valuation::Finite(v) => Valuation::Finite(shift(v)),
            Valuation::AtLeast(v) => Valuation::AtLeast(shift(v)),
        }
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        let (_, a, b) = self.align(other);
        a == b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormDegree {
    Zero,
    /// Coefficients are multiplied by the invariant differential `ω`.
    One,
}

/// Section of the level-`n` logarithm sheaf.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSection {
    level: usize,
    form: FormDegree,
    ring: Ring,
    order: usize,
    /// columns[k][l] for l <= level - k
    columns: Vec<Vec<Coefficient>>,
}

impl LogSection {
    pub fn zero(ring: Ring, order: usize, level: usize, form: FormDegree) -> Self {
        let columns = (0..=level)
            .map(|k| (0..=level - k).map(|_| Coefficient::integral(Series::zero(ring, order))).collect())
            .collect();
        LogSection { level, form, ring, order, columns }
    }

    /// `f · ω^[k,l]` at the given level.
    pub fn basis(level: usize, k: usize, l: usize, f: Series) -> Result<Self> {
        if k + l > level {
            return Err(Error::LevelOverflow { level: k + l, bound: level });
        }
        let mut out = Self::zero(f.ring(), f.order(Var::S), level, FormDegree::Zero);
        out.columns[k][l] = Coefficient::integral(f);
        Ok(out)
    }

    pub fn from_grid(grid: &MomentGrid) -> Self {
        let e = grid.get(0, 0);
        let mut out = Self::zero(e.ring(), e.order(Var::S), grid.level(), FormDegree::Zero);
        for (k, l, s) in grid.iter() {
            out.columns[k][l] = Coefficient::integral(s.clone());
        }
        out
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn form(&self) -> FormDegree {
        self.form
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, k: usize, l: usize) -> &Coefficient {
        &self.columns[k][l]
    }

    pub fn set(&mut self, k: usize, l: usize, c: Coefficient) {
        self.columns[k][l] = c;
    }

    pub fn with_form(mut self, form: FormDegree) -> Self {
        self.form = form;
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Coefficient)> {
        self.columns.iter().enumerate().flat_map(|(k, c)| c.iter().enumerate().map(move |(l, x)| (k, l, x)))
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(|(_, _, c)| c.is_zero())
    }

    fn zip(&self, other: &LogSection, f: impl Fn(&Coefficient, &Coefficient) -> Coefficient) -> LogSection {
        assert_eq!((self.level, self.order), (other.level, other.order), "sections of different shape");
        let columns = self.columns.iter().zip(&other.columns).map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect()).collect();
        LogSection { columns, ..self.clone() }
    }

    pub fn add(&self, other: &LogSection) -> LogSection {
        self.zip(other, Coefficient::add)
    }

    pub fn sub(&self, other: &LogSection) -> LogSection {
        self.zip(other, Coefficient::sub)
    }

    /// Drops the coefficients with `k + l = level`.
    pub fn transition(&self) -> Option<LogSection> {
        self.truncate_level(self.level.checked_sub(1)?)
    }

    /// Keeps the coefficients with `k + l <= n`.
    pub fn truncate_level(&self, n: usize) -> Option<LogSection> {
        if n > self.level {
            return None;
        }
        let columns = self.columns[..=n].iter().enumerate().map(|(k, c)| c[..=n - k].to_vec()).collect();
        Some(LogSection { level: n, columns, ..self.clone() })
    }

    fn connection_impl(&self, strict: bool) -> Result<LogSection> {
        if self.form != FormDegree::Zero {
            return Err(Error::FormDegree);
        }
        let n = self.level;
        let mut out = Self::zero(self.ring, self.order, n, FormDegree::One);
        for k in 0..=n {
            let top = n - k;
            let pushed = self.columns[k][top].map(|s| s.mul_int(top as i128 + 1));
            if strict && !pushed.is_zero() {
                return Err(Error::Clipped { k, l: top + 1, level: n });
            }
            for l in 0..=top {
                let e = &self.columns[k][l];
                let mut c = e.map(|s| s.inv_derive(Var::S).expect("one-variable coefficient"));
                if l > 0 {
                    c = c.add(&self.columns[k][l - 1].map(|s| s.mul_int(l as i128)));
                }
                out.columns[k][l] = c;
            }
        }
        Ok(out)
    }

    /// `∇(sum e_(k,l) ω^[k,l]) = sum (∂e_(k,l) + l e_(k,l-1)) ω^[k,l] ⊗ ω`.
    ///
    /// A nonzero term pushed to `k + l = level + 1` is an error.
    pub fn connection(&self) -> Result<LogSection> {
        self.connection_impl(true)
    }

    /// The connection on the quotient sheaf of level `n`: terms pushed past the
    /// level are zero there.
    pub fn connection_quotient(&self) -> Result<LogSection> {
        self.connection_impl(false)
    }

    /// `Φ(e ω^[k,l]) = p^(-l) σ(e)([p](s)) ω^[k,l]`.
    pub fn frobenius_section(&self) -> Result<LogSection> {
        let mut out = self.clone();
        for (k, col) in self.columns.iter().enumerate() {
            for (l, c) in col.iter().enumerate() {
                let series = c.series.frobenius().substitute_p(Var::S)?;
                out.columns[k][l] = Coefficient { shift: c.shift - l as i32, series };
            }
        }
        Ok(out)
    }

    /// `e ω^[k,l] -> p^l · (lift)^(-1)(e) ω^[k,l]`, the inverse of [`LogSection::frobenius_section`]
    /// on coefficients of degree at most `N/p`.
    pub fn frobenius_inverse(&self) -> Result<LogSection> {
        let mut out = self.clone();
        for (k, col) in self.columns.iter().enumerate() {
            for (l, c) in col.iter().enumerate() {
                let g = c.series.psi();
                let widened = g.extend_s(self.order);
                let series = widened.try_map_coeffs(|x| x.frobenius_preimage().ok_or(Error::RingMismatch))?;
                out.columns[k][l] = Coefficient { shift: c.shift + l as i32, series };
            }
        }
        Ok(out)
    }

    /// Divided-power product, `ω^[i,j] ω^[k,l] = C(i+k,i) C(j+l,j) ω^[i+k,j+l]`.
    pub fn dp_multiply(&self, other: &LogSection, bound: usize) -> Result<LogSection> {
        let level = self.level + other.level;
        if level > bound {
            return Err(Error::LevelOverflow { level, bound });
        }
        let form = match (self.form, other.form) {
            (FormDegree::Zero, FormDegree::Zero) => FormDegree::Zero,
            (FormDegree::One, FormDegree::One) => return Err(Error::FormDegree),
            _ => FormDegree::One,
        };
        let mut out = Self::zero(self.ring, self.order, level, form);
        for (i, j, a) in self.iter() {
            if a.is_zero() {
                continue;
            }
            for (k, l, b) in other.iter() {
                if b.is_zero() {
                    continue;
                }
                let factor = binomial(i + k, i) * binomial(j + l, j);
                let prod = Coefficient { shift: a.shift + b.shift, series: a.series.mul(&b.series).mul_int(factor) };
                let slot = &mut out.columns[i + k][j + l];
                *slot = slot.add(&prod);
            }
        }
        Ok(out)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> i128 {
    let k = k.min(n - k);
    let mut b: i128 = 1;
    for i in 0..k {
        b = b * (n - i) as i128 / (i as i128 + 1);
    }
    b
}

/// `sum_k g_k ω^[k,0] ⊗ ω`.
pub fn rhs_one_minus_phi(theta: &MeasureSeries, n: usize, mode: Restriction, workers: usize) -> Result<LogSection> {
    let gs = par_columns(n, workers, |k| g_series(theta, k, mode))?;
    let ring = theta.ring();
    let order = theta.series.order(Var::S);
    let mut out = LogSection::zero(ring, order, n, FormDegree::One);
    for (k, g) in gs.into_iter().enumerate() {
        out.columns[k][0] = Coefficient::integral(g);
    }
    Ok(out)
}

/// `sum_(k+l<=n) ê_(k,l) ω^[k,l]` from the closed-form grid.
pub fn rho_section(theta: &MeasureSeries, n: usize, mode: Restriction, workers: usize) -> Result<LogSection> {
    Ok(LogSection::from_grid(&moment_grid_closed(theta, n, mode, workers)?))
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientCheck {
    pub k: usize,
    pub l: usize,
    pub valuation: Valuation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub target: u32,
    pub entries: Vec<CoefficientCheck>,
}

impl VerifyReport {
    fn entry_passes(&self, e: &CoefficientCheck) -> bool {
        matches!(e.valuation, Valuation::AtLeast(v) if v >= self.target)
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| self.entry_passes(e))
    }

    pub fn failures(&self) -> Vec<(usize, usize)> {
        self.entries.iter().filter(|e| !self.entry_passes(e)).map(|e| (e.k, e.l)).collect()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k\tl\tvaluation\tstatus")?;
        for e in &self.entries {
            let status = if self.entry_passes(e) { "ok" } else { "FAIL" };
            writeln!(f, "{}\t{}\t{}\t{}", e.k, e.l, e.valuation, status)?;
        }
        let failed = self.failures().len();
        if failed == 0 {
            writeln!(f, "PASS {} coefficients, all valuations >= {}", self.entries.len(), self.target)
        } else {
            writeln!(f, "FAIL {failed} of {} coefficients below {}", self.entries.len(), self.target)
        }
    }
}

/// Compares `∇ρ` with the right-hand side coefficient by coefficient.
pub fn verify_section(rho: &LogSection, rhs: &LogSection, target: u32) -> Result<VerifyReport> {
    let lhs = rho.connection_quotient()?;
    let diff = lhs.sub(rhs);
    let entries = diff.iter().map(|(k, l, c)| CoefficientCheck { k, l, valuation: c.valuation() }).collect();
    Ok(VerifyReport { target, entries })
}

/// `∇ρ_n = (1 - Φ)(l_n^D)` on the tubular neighbourhood.
pub fn verify_polylog(theta: &MeasureSeries, n: usize, mode: Restriction, workers: usize) -> Result<VerifyReport> {
    let rho = rho_section(theta, n, mode, workers)?;
    let rhs = rhs_one_minus_phi(theta, n, mode, workers)?;
    verify_section(&rho, &rhs, theta.series.effective_precision())
}
