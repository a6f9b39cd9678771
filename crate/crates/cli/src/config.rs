use std::path::PathBuf;

use padic_polylog::describe::{parse_ring_kind, Description};
use padic_polylog::{Error, Restriction, Result, Ring, RingKind};

use crate::Common;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Amice,
    Moments,
    Restrict,
    Stabilize,
    Polylog,
    Verify,
}

impl Command {
    fn needs_level(self) -> bool {
        matches!(self, Command::Moments | Command::Polylog | Command::Verify)
    }

    fn needs_two_variables(self) -> bool {
        matches!(self, Command::Stabilize | Command::Polylog | Command::Verify)
    }
}

/// Everything a run needs, validated.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub prime: u64,
    pub precision: u32,
    pub orders: Vec<usize>,
    pub level: usize,
    pub mode: Restriction,
    pub ring: RingKind,
    pub workers: usize,
    pub description: Description,
}

fn missing(field: &'static str) -> Error {
    Error::Config { field, msg: "missing; give it as a flag or in the input file".into() }
}

fn parse_orders(s: &str) -> Result<Vec<usize>> {
    let orders: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Config { field: "orders", msg: format!("bad order {t:?}") }))
        .collect::<Result<_>>()?;
    if orders.is_empty() || orders.len() > 2 {
        return Err(Error::Config { field: "orders", msg: "expected one or two orders".into() });
    }
    Ok(orders)
}

impl JobConfig {
    /// Flags win over the input file.
    pub fn resolve(command: Command, flags: &Common) -> Result<JobConfig> {
        let input = flags.input.clone().ok_or_else(|| missing("input"))?;
        let text = std::fs::read_to_string(&input)
            .map_err(|e| Error::Config { field: "input", msg: format!("{}: {e}", input.display()) })?;
        let description = Description::parse(&text)?;
        let prime = flags.prime.or(description.prime).ok_or_else(|| missing("prime"))?;
        let precision = flags.precision.or(description.precision).ok_or_else(|| missing("precision"))?;
        let orders = match &flags.orders {
            Some(s) => parse_orders(s)?,
            None => description.orders.clone().ok_or_else(|| missing("orders"))?,
        };
        let ring = match &flags.ring {
            Some(s) => {
                let words: Vec<&str> = s.split_whitespace().collect();
                parse_ring_kind(&words).map_err(|msg| Error::Config { field: "ring", msg })?
            }
            None => description.ring.unwrap_or(RingKind::Plain),
        };
        let mode = match &flags.mode {
            Some(s) => s.parse()?,
            None => Restriction::default(),
        };
        let level = match flags.level {
            Some(l) => l,
            None if command.needs_level() => return Err(missing("level")),
            None => 0,
        };
        if flags.workers == 0 {
            return Err(Error::Config { field: "workers", msg: "must be at least 1".into() });
        }
        if command.needs_two_variables() && orders.len() != 2 {
            return Err(Error::Config { field: "orders", msg: "this command needs two orders (N_S,N_T)".into() });
        }
        if command.needs_level() && level > *orders.iter().min().unwrap() {
            return Err(Error::Config { field: "level", msg: format!("level {level} exceeds the truncation orders") });
        }
        Ring::new(prime, precision, ring).map_err(|e| match e {
            Error::NotPrime(_) => Error::Config { field: "prime", msg: e.to_string() },
            other => Error::Config { field: "precision", msg: other.to_string() },
        })?;
        Ok(JobConfig {
            command,
            output: flags.output.clone(),
            prime,
            precision,
            orders,
            level,
            mode,
            ring,
            workers: flags.workers,
            description,
        })
    }

    pub fn ring_at(&self, precision: u32) -> Result<Ring> {
        Ring::new(self.prime, precision, self.ring)
    }
}
