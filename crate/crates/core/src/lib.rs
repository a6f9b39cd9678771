pub mod cyclotomic;
pub mod describe;
pub mod error;
pub mod gen;
pub mod logsheaf;
pub mod measure;
pub mod polylog;
pub mod ring;
pub mod scalar;
pub mod selftest;
pub mod series;

pub use error::{Error, Result};
pub use ring::{Ring, RingElement, RingKind};
pub use scalar::{PadicScalar, Valuation};
pub use series::{binomial_exp, p_series, DerivePowerMatrix, PsiBasis, Series, Var};
pub use measure::{amice, eisenstein_like, integrate_trace_zero, DiracCombination, DiracTerm, InverseX, MeasureSeries, Provenance};
pub use cyclotomic::{cyclotomic_trace, CyclotomicElement};
pub use polylog::{check_grid, cross_check, cross_check_grids, g_series, moment_closed, moment_grid_closed, moment_grid_ode, ode_guard, CrossCheckReport, EntryCheck, GridSource, MomentGrid, Restriction};
pub use logsheaf::{rho_section, rhs_one_minus_phi, verify_polylog, verify_section, Coefficient, CoefficientCheck, FormDegree, LogSection, VerifyReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/rings.md")]
    mod rings {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/moment-functions.md")]
    mod moment_functions {}
    #[doc = include_str!("../../../book/src/log-sheaf.md")]
    mod log_sheaf {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
