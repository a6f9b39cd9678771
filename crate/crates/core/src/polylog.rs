//! Moment functions `ê_(k,l)(s) = (-1)^l l! ∫ y^k x^(-(l+1)) (1+s)^x dμ`
//! of a two-variable theta series, by closed form and by the ODE system.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measure::{integrate_trace_zero, InverseX, MeasureSeries, Provenance};
use crate::scalar::{factorial_valuation, Valuation};
use crate::series::{Series, Var};

/// How theta is restricted to `Z_p^× × Z_p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Restriction {
    /// `f - phi(psi(f))`, valid for any measure.
    #[default]
    Restrict,
    /// `θ - σ(θ)([p](S), T)`, valid for Eisenstein-type thetas only.
    Stabilize,
}

impl Restriction {
    pub fn apply(&self, theta: &MeasureSeries) -> MeasureSeries {
        match self {
            Restriction::Restrict => theta.restrict_units(),
            Restriction::Stabilize => theta.stabilize(),
        }
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Restriction::Restrict => "restrict",
            Restriction::Stabilize => "stabilize",
        })
    }
}

impl FromStr for Restriction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restrict" => Ok(Restriction::Restrict),
            "stabilize" => Ok(Restriction::Stabilize),
            other => Err(Error::Config { field: "mode", msg: format!("expected restrict or stabilize, got {other:?}") }),
        }
    }
}

fn check_two_variable(theta: &MeasureSeries) -> Result<()> {
    if theta.arity() != 2 {
        return Err(Error::Arity { expected: 2 });
    }
    Ok(())
}

/// `g_k(S) = ∂_T^k θ^(p)(S, T)|_(T=0)`.
pub fn g_series(theta: &MeasureSeries, k: usize, mode: Restriction) -> Result<Series> {
    check_two_variable(theta)?;
    mode.apply(theta).series.moment_extract(Var::T, k)
}

/// `(-1)^l l!` as an integer.
fn sign_factorial(l: usize) -> i128 {
    let f: i128 = (1..=l as i128).product();
    if l % 2 == 0 {
        f
    } else {
        -f
    }
}

/// One entry `ê_(k,l)` by the closed form.
pub fn moment_closed(theta: &MeasureSeries, k: usize, l: usize, mode: Restriction) -> Result<Series> {
    let g = g_series(theta, k, mode)?;
    let inv = InverseX::new(g.ring(), g.order(Var::S));
    Ok(inv.apply(&g, l as u32 + 1)?.mul_int(sign_factorial(l)))
}

/// Digits the ODE solver can lose on a level-`n` grid of order `n_s`.
pub fn ode_guard(p: u64, n_s: usize, level: usize) -> u32 {
    (level as u32 + 1) * factorial_valuation(p, n_s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSource {
    ClosedForm,
    Ode,
}

impl fmt::Display for GridSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridSource::ClosedForm => "closed-form",
            GridSource::Ode => "ode",
        })
    }
}

/// Triangular table of `ê_(k,l)`, `k + l <= level`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentGrid {
    level: usize,
    columns: Vec<Vec<Series>>,
    source: GridSource,
    theta: Provenance,
}

impl MomentGrid {
    pub fn new(level: usize, columns: Vec<Vec<Series>>, source: GridSource, theta: Provenance) -> Self {
        assert_eq!(columns.len(), level + 1);
        for (k, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), level - k + 1);
        }
        MomentGrid { level, columns, source, theta }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn source(&self) -> GridSource {
        self.source
    }

    pub fn theta_provenance(&self) -> Provenance {
        self.theta
    }

    pub fn get(&self, k: usize, l: usize) -> &Series {
        &self.columns[k][l]
    }

    pub fn set(&mut self, k: usize, l: usize, s: Series) {
        self.columns[k][l] = s;
    }

    /// `(k, l, ê_(k,l))` with `k` outer and `l` inner.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Series)> {
        self.columns.iter().enumerate().flat_map(|(k, c)| c.iter().enumerate().map(move |(l, s)| (k, l, s)))
    }

    /// Drops the entries with `k + l = level`.
    pub fn transition(&self) -> Option<MomentGrid> {
        let level = self.level.checked_sub(1)?;
        let columns = self.columns[..=level].iter().map(|c| c[..c.len() - 1].to_vec()).collect();
        Some(MomentGrid { level, columns, ..self.clone() })
    }

    pub fn effective_precision(&self) -> u32 {
        self.iter().map(|(_, _, s)| s.effective_precision()).min().unwrap_or(u32::MAX)
    }

    pub fn reduce(&self, prec: u32) -> Result<MomentGrid> {
        let columns = self.columns.iter().map(|c| c.iter().map(|s| s.reduce(prec)).collect::<Result<_>>()).collect::<Result<_>>()?;
        Ok(MomentGrid { columns, ..self.clone() })
    }
}

/// Runs `f` on every column index `0..=n` over `workers` threads and
/// returns the results in column order.
pub(crate) fn par_columns<T: Send>(n: usize, workers: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let workers = workers.max(1).min(n + 1);
    if workers == 1 {
        return (0..=n).map(f).collect();
    }
    let mut slots: Vec<Option<Result<T>>> = (0..=n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..workers)
            .map(|w| scope.spawn(move || (w..=n).step_by(workers).map(|k| (k, f(k))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (k, r) in h.join().expect("worker panicked") {
                slots[k] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every column computed")).collect()
}

/// Closed-form grid; each column divides `g_k` by `x` repeatedly.
pub fn moment_grid_closed(theta: &MeasureSeries, n: usize, mode: Restriction, workers: usize) -> Result<MomentGrid> {
    check_two_variable(theta)?;
    let restricted = mode.apply(theta);
    let inv = InverseX::new(theta.ring(), theta.series.order(Var::S));
    let columns = par_columns(n, workers, |k| {
        let g = restricted.series.moment_extract(Var::T, k)?;
        let mut h = g;
        let mut col = Vec::with_capacity(n - k + 1);
        for l in 0..=n - k {
            h = inv.apply(&h, 1)?;
            col.push(h.mul_int(sign_factorial(l)));
        }
        Ok(col)
    })?;
    Ok(MomentGrid::new(n, columns, GridSource::ClosedForm, theta.provenance))
}

/// Grid from `∂ê_(k,0) = g_k`, `∂ê_(k,l) = -l ê_(k,l-1)` and `psi(ê) = 0`.
pub fn moment_grid_ode(theta: &MeasureSeries, n: usize, mode: Restriction, workers: usize) -> Result<MomentGrid> {
    check_two_variable(theta)?;
    let restricted = mode.apply(theta);
    let columns = par_columns(n, workers, |k| {
        let g = restricted.series.moment_extract(Var::T, k)?;
        let mut col: Vec<Series> = Vec::with_capacity(n - k + 1);
        col.push(integrate_trace_zero(&g)?);
        for l in 1..=n - k {
            let rhs = col[l - 1].mul_int(-(l as i128));
            col.push(integrate_trace_zero(&rhs)?);
        }
        Ok(col)
    })?;
    Ok(MomentGrid::new(n, columns, GridSource::Ode, theta.provenance))
}

/// Per-entry findings of [`cross_check`] and [`check_grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct EntryCheck {
    pub k: usize,
    pub l: usize,
    /// Valuation of closed form minus ODE solution, when both were computed.
    pub discrepancy: Option<Valuation>,
    /// Valuation of `∂ê_(k,0) - g_k` or `∂ê_(k,l) + l ê_(k,l-1)`.
    pub ode_residual: Valuation,
    /// Valuation of `psi(ê_(k,l))`.
    pub psi: Valuation,
}

impl EntryCheck {
    pub fn passes(&self, target: u32) -> bool {
        let ok = |v: &Valuation| matches!(v, Valuation::AtLeast(e) if *e >= target);
        self.discrepancy.as_ref().map_or(true, ok) && ok(&self.ode_residual) && ok(&self.psi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheckReport {
    pub target: u32,
    pub entries: Vec<EntryCheck>,
}

impl CrossCheckReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.passes(self.target))
    }

    /// Smallest discrepancy valuation over the grid.
    pub fn max_discrepancy(&self) -> Option<Valuation> {
        self.entries.iter().filter_map(|e| e.discrepancy).reduce(Valuation::min)
    }

    /// Entries that miss the target.
    pub fn failures(&self) -> impl Iterator<Item = &EntryCheck> {
        self.entries.iter().filter(|e| !e.passes(self.target))
    }
}

/// Checks the ODE system and trace-zero on a grid.
pub fn check_grid(grid: &MomentGrid, theta: &MeasureSeries, mode: Restriction, target: u32) -> Result<CrossCheckReport> {
    let restricted = mode.apply(theta);
    let mut entries = Vec::new();
    for (k, l, e) in grid.iter() {
        let d = e.inv_derive(Var::S)?;
        let rhs = if l == 0 {
            restricted.series.moment_extract(Var::T, k)?
        } else {
            grid.get(k, l - 1).mul_int(-(l as i128))
        };
        entries.push(EntryCheck { k, l, discrepancy: None, ode_residual: (&d - &rhs).valuation(), psi: e.psi().valuation() });
    }
    Ok(CrossCheckReport { target, entries })
}

/// Both solvers, their discrepancy and the conditions on the closed form.
///
/// Pass means every discrepancy, ODE residual and `psi` value vanishes to at
/// least `target` digits. Give theta `ode_guard` extra digits over `target`
/// so that the ODE side can get there.
pub fn cross_check(theta: &MeasureSeries, n: usize, mode: Restriction, target: u32, workers: usize) -> Result<CrossCheckReport> {
    let closed = moment_grid_closed(theta, n, mode, workers)?;
    let ode = moment_grid_ode(theta, n, mode, workers)?;
    cross_check_grids(&closed, &ode, theta, mode, target)
}

pub fn cross_check_grids(
    closed: &MomentGrid,
    ode: &MomentGrid,
    theta: &MeasureSeries,
    mode: Restriction,
    target: u32,
) -> Result<CrossCheckReport> {
    let mut report = check_grid(closed, theta, mode, target)?;
    for entry in report.entries.iter_mut() {
        let diff = closed.get(entry.k, entry.l) - ode.get(entry.k, entry.l);
        entry.discrepancy = Some(diff.valuation());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{amice, DiracCombination};
    use crate::ring::Ring;

    fn theta(p: u64, m: u32, n: usize, x: i128, y: i128) -> MeasureSeries {
        let r = Ring::plain(p, m).unwrap();
        let mut d = DiracCombination::with_guard(r, 2, n).unwrap();
        d.push_int(x, Some(y), 1).unwrap();
        amice(&d, &[n, n]).unwrap()
    }

    fn ints(s: &Series) -> Vec<u128> {
        s.coeffs().iter().map(|c| c.constant().residue()).collect()
    }

    #[test]
    fn g_series_examples() {
        let t = theta(3, 4, 6, 1, 2);
        assert_eq!(ints(&g_series(&t, 1, Restriction::Restrict).unwrap()), vec![2, 2, 0, 0, 0, 0, 0]);
        assert_eq!(ints(&g_series(&t, 0, Restriction::Restrict).unwrap()), vec![1, 1, 0, 0, 0, 0, 0]);
        let t = theta(3, 4, 6, 3, 1);
        assert!(g_series(&t, 2, Restriction::Restrict).unwrap().is_zero());
    }

    #[test]
    fn closed_form_examples() {
        let t = theta(5, 2, 4, 2, 3);
        let e = moment_closed(&t, 1, 1, Restriction::Restrict).unwrap();
        assert_eq!(ints(&e), vec![18, 36 % 25, 18, 0, 0]);
        let t = theta(3, 4, 4, 1, 2);
        let e = moment_closed(&t, 1, 2, Restriction::Restrict).unwrap();
        assert_eq!(ints(&e), vec![4, 4, 0, 0, 0]);
    }

    #[test]
    fn unit_dirac_grid() {
        let t = theta(3, 4 + ode_guard(3, 6, 3), 6, 1, 1);
        let grid = moment_grid_closed(&t, 3, Restriction::Restrict, 2).unwrap();
        for (_, l, e) in grid.iter() {
            let c = sign_factorial(l);
            assert_eq!(e, &Series::from_ints(t.ring(), 6, &[c, c]));
        }
        let report = cross_check(&t, 3, Restriction::Restrict, 4, 1).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn perturbation_breaks_trace_zero() {
        let t = theta(3, 4, 6, 1, 1);
        let mut grid = moment_grid_closed(&t, 2, Restriction::Restrict, 1).unwrap();
        let one = Series::from_ints(t.ring(), 6, &[1]);
        grid.set(0, 0, grid.get(0, 0) + &one);
        let report = check_grid(&grid, &t, Restriction::Restrict, 4).unwrap();
        let bad: Vec<_> = report.failures().map(|e| (e.k, e.l)).collect();
        assert!(bad.contains(&(0, 0)));
        assert_eq!(report.entries[0].psi, Valuation::Finite(0));
    }
}
