//! Exhaustive verification of the full-cycle-diagonal theorems at small
//! sizes.

use std::fmt;
use std::str::FromStr;

use crate::arith::prime_power;
use crate::cycleset::{CycleSet, Mpl};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::report::Report;

use super::enumerate::enumerate_cyclesets;
use super::model::{build_model, Diagonal, ModelSpec, MAX_N};
use super::solver::{solve_with, Budget, Mode, SolveOptions, Stats, Status};

/// Sizes at or above this need [`TheoremOptions::extended`].
pub const EXTENDED_FROM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Odd prime power size, full-cycle diagonal: retractable, finite mpl.
    FullCycleOdd,
    /// Size `2^v`, full-cycle diagonal: retractable for `v > 2`; for
    /// `v <= 2` the tower ends in a singleton or at X_{4,19}.
    FullCycleTwo,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::FullCycleOdd => "FULLCYCLE_ODD",
            Theorem::FullCycleTwo => "FULLCYCLE_TWO",
        })
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Theorem> {
        match s.to_ascii_uppercase().as_str() {
            "FULLCYCLE_ODD" => Ok(Theorem::FullCycleOdd),
            "FULLCYCLE_TWO" => Ok(Theorem::FullCycleTwo),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown theorem {s:?}") }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TheoremOptions {
    pub budget: Budget,
    pub threads: usize,
    pub extended: bool,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        TheoremOptions { budget: Budget::unlimited(), threads: 1, extended: false }
    }
}

#[derive(Debug, Clone)]
pub struct TheoremOutcome {
    pub report: Report,
    /// Every full-cycle-diagonal cycle set found, sorted.
    pub solutions: Vec<CycleSet>,
    /// False when the budget ran out before the search space was exhausted.
    pub exhaustive: bool,
    /// Share of the search tree covered; 1.0 when exhaustive.
    pub verified_fraction: f64,
    pub stats: Stats,
}

impl TheoremOutcome {
    pub fn all_pass(&self) -> bool {
        self.report.all_pass()
    }
}

fn check_size(theorem: Theorem, n: usize, extended: bool) -> Result<()> {
    let unsupported = || Error::UnsupportedSize { n, what: "theorem verification" };
    if n > MAX_N {
        return Err(unsupported());
    }
    let (p, _) = prime_power(n as u64).ok_or_else(unsupported)?;
    match theorem {
        Theorem::FullCycleOdd if p == 2 => return Err(unsupported()),
        Theorem::FullCycleTwo if p != 2 => return Err(unsupported()),
        _ => {}
    }
    if theorem == Theorem::FullCycleTwo && n >= EXTENDED_FROM && !extended {
        return Err(Error::RequiresExtended(format!("{theorem} at n={n}")));
    }
    Ok(())
}

/// Enumerates every cycle set on `0..n` with diagonal `i -> i+1` and checks
/// the theorem's conclusion on each. Running out of budget is not an error:
/// the outcome is marked non-exhaustive and reports the covered fraction.
pub fn verify_theorem(theorem: Theorem, n: usize, opts: &TheoremOptions) -> Result<TheoremOutcome> {
    check_size(theorem, n, opts.extended)?;
    let mut spec = ModelSpec::new(n);
    spec.diagonal = Diagonal::FullCycle;
    spec.require_all_solutions = true;
    let model = build_model(spec)?;
    let out = solve_with(&model, &SolveOptions { mode: Mode::All, budget: opts.budget, threads: opts.threads });
    let exhaustive = out.status != Status::Timeout;
    let x4_19 = CycleSet::x4_19();

    let mut report = Report::new();
    let mut retractable = 0usize;
    for x in &out.solutions {
        report.check("diagonal-is-full-cycle", x.diagonal().cycle_structure().is_full_cycle, || {
            format!("diagonal {}", x.diagonal())
        });
        let ret = x.is_retractable();
        if ret {
            retractable += 1;
        }
        let mpl = x.mpl()?;
        match theorem {
            Theorem::FullCycleOdd => {
                report.check("fullcycle-odd-retractable", ret, || x.serialize());
                report.check("fullcycle-odd-finite-mpl", mpl.is_finite(), || x.serialize());
            }
            Theorem::FullCycleTwo if n > 4 => {
                report.check("fullcycle-two-retractable", ret, || x.serialize());
            }
            Theorem::FullCycleTwo => {
                let ok = match &mpl {
                    Mpl::Finite(_) => true,
                    Mpl::Infinite { stationary, .. } => stationary.are_isomorphic(&x4_19)?.is_some(),
                };
                report.check("fullcycle-two-tower-ends-at-x4_19", ok, || x.serialize());
            }
        }
    }
    report.result("theorem", theorem);
    report.result("n", n);
    report.result("solutions", out.solutions.len());
    report.result("retractable", retractable);
    report.result("irretractable", out.solutions.len() - retractable);
    report.result("status", out.status);
    report.result("exhaustive", exhaustive);
    report.result("verified-fraction", format_args!("{:.6}", out.stats.explored_fraction));
    report.result("nodes", out.stats.nodes);
    Ok(TheoremOutcome {
        report,
        exhaustive,
        verified_fraction: out.stats.explored_fraction,
        solutions: out.solutions,
        stats: out.stats,
    })
}

/// Relabels every size-`n` cycle set whose diagonal is an `n`-cycle so that
/// the diagonal becomes `i -> i+1`, and compares the result with the
/// solutions of the full-cycle model.
pub fn wlog_relabel_check(n: usize) -> Result<Report> {
    let raw = enumerate_cyclesets(n, Diagonal::None, false)?;
    let pinned = enumerate_cyclesets(n, Diagonal::FullCycle, false)?;
    let mut relabelled = Vec::new();
    for x in raw.iter().filter(|x| x.diagonal().cycle_structure().is_full_cycle) {
        let mut images = vec![0; n];
        let mut p = 0;
        for k in 0..n {
            images[p] = k;
            p = x.diagonal().apply(p);
        }
        let f = Permutation::new(images)?;
        relabelled.push(x.relabel(&f));
    }
    relabelled.sort_by_cached_key(|x| x.serialize());
    relabelled.dedup();
    let mut report = Report::new();
    report.check("relabelled-diagonal-is-shift", relabelled.iter().all(|x| *x.diagonal() == Permutation::rotation(n, 1)), || {
        "relabelling missed i -> i+1".into()
    });
    report.check("relabelled-equals-pinned-solutions", relabelled == pinned, || {
        format!("{} relabelled vs {} pinned", relabelled.len(), pinned.len())
    });
    report.result("full-cycle-tables", raw.iter().filter(|x| x.diagonal().cycle_structure().is_full_cycle).count());
    report.result("pinned-tables", pinned.len());
    Ok(report)
}
