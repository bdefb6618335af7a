//! Deciding property SpliFf for a knot and its mirror.
//!
//! Each side is dispatched on thickness. Thickness zero always passes.
//! Thickness one can only fail at `k = ρ - 3`, and only when `ρ >= 3`.
//! Thickness two first tries the HFK-level vanishing criteria for every
//! `k in [0, g]`; the remaining levels are checked on every lift, and the
//! outcome must not depend on the lift.

use std::collections::BTreeMap;
use std::fmt;

use log::{debug, warn};
use serde::{Serialize, Serializer};

use crate::ak::{analyze_level, AkReport, Method};
use crate::error::{Error, Result};
use crate::lift::{self, Lift, LiftProblem, DEFAULT_MAX_KERNEL_DIM};
use crate::model::{crossing_number, FullComplex, HfkTable, QuotientComplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    /// Thickness-two knots whose lift space has a larger kernel are
    /// reported as unknown.
    pub max_kernel_dim: usize,
    /// Truncation height of the fallback model; `None` uses the smallest
    /// admissible one per level.
    pub fallback_n: Option<i64>,
    /// Also run the homology check at levels the HFK shortcut passes, and
    /// record any disagreement.
    pub verify: bool,
    /// Up to this crossing number every lift is a genuine representative
    /// of CFK^∞, so a kernel above the cap does not make the verdict
    /// unknown: the first `2^max_kernel_dim` lifts are checked instead.
    /// Knots whose crossing number cannot be read from the name always
    /// honour the cap.
    pub any_lift_max_crossings: Option<u32>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            max_kernel_dim: DEFAULT_MAX_KERNEL_DIM,
            fallback_n: None,
            verify: false,
            any_lift_max_crossings: Some(16),
        }
    }
}

/// Result for one chirality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SideOutcome {
    Pass,
    Fail { k: i64, witness: (i64, i64) },
    Unknown { reason: String },
}

impl SideOutcome {
    fn unknown(reason: impl Into<String>) -> Self {
        SideOutcome::Unknown { reason: reason.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideReport {
    pub name: String,
    pub thickness: i64,
    pub rho: i64,
    pub outcome: SideOutcome,
    /// Levels computed on the first lift, in increasing `k`.
    pub levels: Vec<AkReport>,
    pub kernel_dim: Option<usize>,
    pub lifts: Option<usize>,
    pub per_lift_agreement: Option<bool>,
    /// Levels passed by the HFK shortcut where the homology check failed
    /// (verify mode only).
    pub shortcut_violations: Vec<i64>,
    pub trace: Vec<String>,
}

/// Per-knot decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    SpliffBoth,
    FailsKnot { k: i64, witness: (i64, i64) },
    FailsMirror { k: i64, witness: (i64, i64) },
    Unknown { reason: String },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::SpliffBoth => "SpliffBoth",
            Status::FailsKnot { .. } => "FailsKnot",
            Status::FailsMirror { .. } => "FailsMirror",
            Status::Unknown { .. } => "Unknown",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Status::FailsKnot { .. } | Status::FailsMirror { .. })
    }

    pub fn failing(&self) -> Option<(i64, (i64, i64))> {
        match *self {
            Status::FailsKnot { k, witness } | Status::FailsMirror { k, witness } => Some((k, witness)),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Unknown { reason } => write!(f, "Unknown({reason})"),
            s => f.write_str(s.label()),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub thickness: i64,
    pub rho: i64,
    pub rho_mirror: i64,
    pub status: Status,
    pub failing_k: Option<i64>,
    pub witness_gradings: Option<(i64, i64)>,
    pub kernel_dim: Option<usize>,
    pub per_lift_agreement: Option<bool>,
    pub method_trace: Vec<String>,
    #[serde(skip)]
    pub knot: Option<SideReport>,
    #[serde(skip)]
    pub mirror: Option<SideReport>,
}

impl Verdict {
    /// Verdict for an input that could not be read or validated.
    pub fn invalid(name: impl Into<String>, err: &Error) -> Self {
        Verdict {
            name: name.into(),
            thickness: -1,
            rho: 0,
            rho_mirror: 0,
            status: Status::Unknown {
                reason: format!("invalid input: {err}"),
            },
            failing_k: None,
            witness_gradings: None,
            kernel_dim: None,
            per_lift_agreement: None,
            method_trace: Vec::new(),
            knot: None,
            mirror: None,
        }
    }

    pub fn method_trace_string(&self) -> String {
        self.method_trace.join(";")
    }
}

/// Thickness zero: always SpliFf.
pub fn shortcut_thickness_zero(qc: &QuotientComplex) -> Option<Status> {
    match qc.derived_stats() {
        Ok(s) if s.thickness == 0 => Some(Status::SpliffBoth),
        _ => None,
    }
}

/// Thickness one: a side with `ρ <= 2` passes; otherwise the level
/// `ρ - 3` must be checked.
pub fn shortcut_thickness_one(rho: i64) -> Option<bool> {
    (rho <= 2).then_some(true)
}

/// HFK-level vanishing criteria at thickness two, for `k in [0, g]`:
/// `true` means the level passes, `false` that it is undecided.
pub fn shortcut_thickness_two(hfk: &HfkTable, rho: i64, g: i64) -> BTreeMap<i64, bool> {
    (0..=g.max(0))
        .map(|k| {
            let top = hfk.dim(k, k + rho) == 0;
            let bottom = hfk.dim(k, k + rho - 2) == 0;
            let pass = if (k + rho) % 2 != 0 {
                top || (k != rho - 3 && bottom)
            } else {
                k != rho - 4 && (top || bottom)
            };
            (k, pass)
        })
        .collect()
}

fn outcome_of(levels: &[AkReport]) -> SideOutcome {
    levels
        .iter()
        .find(|r| !r.spliff)
        .map(|r| SideOutcome::Fail {
            k: r.k,
            witness: r.witness.expect("failing level has a witness"),
        })
        .unwrap_or(SideOutcome::Pass)
}

fn level_trace(side: &str, r: &AkReport) -> String {
    format!("{side}:k={}:{}", r.k, r.method.as_str())
}

fn analyze_levels(fc: &FullComplex, ks: &[i64], opts: &DecideOptions) -> Result<Vec<AkReport>> {
    ks.iter().map(|&k| analyze_level(fc, k, opts.fallback_n)).collect()
}

/// Decides one chirality given as a quotient complex. `side` labels the
/// trace entries ("K" or "mK").
pub fn decide_side(qc: &QuotientComplex, side: &str, opts: &DecideOptions) -> Result<SideReport> {
    let stats = qc.derived_stats()?;
    let mut report = SideReport {
        name: qc.name.clone(),
        thickness: stats.thickness,
        rho: stats.rho,
        outcome: SideOutcome::Pass,
        levels: Vec::new(),
        kernel_dim: None,
        lifts: None,
        per_lift_agreement: None,
        shortcut_violations: Vec::new(),
        trace: Vec::new(),
    };
    match stats.thickness {
        0 => report.trace.push(format!("{side}:thickness0")),
        1 => {
            if shortcut_thickness_one(stats.rho).is_some() {
                report.trace.push(format!("{side}:rho<=2"));
            } else {
                let fc = lift::lift(qc)?;
                report.levels = analyze_levels(&fc, &[stats.rho - 3], opts)?;
                report.trace.extend(report.levels.iter().map(|r| level_trace(side, r)));
                report.outcome = outcome_of(&report.levels);
            }
        }
        2 => decide_thickness_two(qc, side, stats.rho, stats.genus_bound, &stats.hfk_table, opts, &mut report)?,
        t => {
            report.outcome = SideOutcome::unknown("thickness out of scope");
            report.trace.push(format!("{side}:thickness{t}"));
        }
    }
    Ok(report)
}

fn decide_thickness_two(
    qc: &QuotientComplex,
    side: &str,
    rho: i64,
    g: i64,
    hfk: &HfkTable,
    opts: &DecideOptions,
    report: &mut SideReport,
) -> Result<()> {
    let shortcut = shortcut_thickness_two(hfk, rho, g);
    let undecided: Vec<i64> = shortcut.iter().filter(|(_, &p)| !p).map(|(&k, _)| k).collect();
    if undecided.is_empty() && !opts.verify {
        report.trace.push(format!("{side}:hfk_shortcut"));
        return Ok(());
    }
    let ks: Vec<i64> = if opts.verify { shortcut.keys().copied().collect() } else { undecided.clone() };

    let problem = LiftProblem::new(qc)?;
    let solutions = match problem.solve() {
        Ok(s) => s,
        Err(Error::NoLift) => {
            report.outcome = SideOutcome::unknown("no lift");
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let dim = solutions.kernel_dim();
    report.kernel_dim = Some(dim);
    let any_lift = crossing_number(&qc.name)
        .zip(opts.any_lift_max_crossings)
        .is_some_and(|(c, max)| c <= max);
    let lifts: Box<dyn Iterator<Item = Lift>> = match problem.enumerate(&solutions, opts.max_kernel_dim) {
        Ok(l) => Box::new(l),
        Err(Error::KernelTooLarge { dim, .. }) if any_lift => {
            report.trace.push(format!("{side}:sampled_lifts(kernel_dim={dim})"));
            Box::new(problem.enumerate_sample(&solutions, opts.max_kernel_dim))
        }
        Err(Error::KernelTooLarge { dim, .. }) => {
            report.outcome = SideOutcome::unknown(format!("kernel_dim={dim}"));
            report.trace.push(format!("{side}:kernel_dim={dim}"));
            return Ok(());
        }
        Err(e) => return Err(e),
    };

    let mut first: Option<Vec<AkReport>> = None;
    let mut agree = true;
    let mut count = 0;
    for l in lifts {
        count += 1;
        let levels = analyze_levels(&l.complex, &ks, opts)?;
        let undecided_levels: Vec<AkReport> = levels.iter().filter(|r| undecided.contains(&r.k)).cloned().collect();
        match &first {
            None => {
                for r in &levels {
                    if shortcut[&r.k] && !r.spliff {
                        warn!("{}: HFK shortcut passes k={} but the homology check fails", qc.name, r.k);
                        report.shortcut_violations.push(r.k);
                    }
                }
                report.outcome = outcome_of(&undecided_levels);
                first = Some(levels);
            }
            Some(_) => {
                if outcome_of(&undecided_levels) != report.outcome {
                    agree = false;
                    debug!("{}: lift {} disagrees", qc.name, l.index);
                }
            }
        }
    }
    report.lifts = Some(count);
    report.per_lift_agreement = Some(agree);
    let Some(levels) = first else {
        report.outcome = SideOutcome::unknown("no lift");
        return Ok(());
    };
    report.trace.push(format!("{side}:lifts={count}"));
    if undecided.is_empty() {
        report.trace.push(format!("{side}:hfk_shortcut"));
    }
    report
        .trace
        .extend(levels.iter().filter(|r| undecided.contains(&r.k)).map(|r| level_trace(side, r)));
    report.levels = levels;
    if !agree {
        report.outcome = SideOutcome::unknown("lift-dependent");
    }
    Ok(())
}

/// Full decision for a knot and its mirror.
pub fn decide(qc: &QuotientComplex, opts: &DecideOptions) -> Result<Verdict> {
    qc.ensure_valid()?;
    let knot = decide_side(qc, "K", opts)?;
    let mirror = decide_side(&qc.mirror(), "mK", opts)?;
    let status = match (&knot.outcome, &mirror.outcome) {
        (SideOutcome::Fail { k, witness }, _) => Status::FailsKnot { k: *k, witness: *witness },
        (_, SideOutcome::Fail { k, witness }) => Status::FailsMirror { k: *k, witness: *witness },
        (SideOutcome::Unknown { reason }, _) | (_, SideOutcome::Unknown { reason }) => Status::Unknown { reason: reason.clone() },
        _ => Status::SpliffBoth,
    };
    let kernel_dim = knot.kernel_dim.max(mirror.kernel_dim);
    let per_lift_agreement = match (knot.per_lift_agreement, mirror.per_lift_agreement) {
        (None, None) => None,
        (a, b) => Some(a.unwrap_or(true) && b.unwrap_or(true)),
    };
    let failing = status.failing();
    let mut method_trace = knot.trace.clone();
    method_trace.extend(mirror.trace.iter().cloned());
    Ok(Verdict {
        name: qc.name.clone(),
        thickness: knot.thickness,
        rho: knot.rho,
        rho_mirror: mirror.rho,
        status,
        failing_k: failing.map(|f| f.0),
        witness_gradings: failing.map(|f| f.1),
        kernel_dim,
        per_lift_agreement,
        method_trace,
        knot: Some(knot),
        mirror: Some(mirror),
    })
}

/// [`decide`], turning every error into an `Unknown` verdict.
pub fn decide_total(name: &str, qc: &QuotientComplex, opts: &DecideOptions) -> Verdict {
    decide(qc, opts).unwrap_or_else(|e| Verdict::invalid(name, &e))
}

/// Whether any level consulted by a side used `method`.
pub fn side_used(report: &SideReport, method: Method) -> bool {
    report.levels.iter().any(|r| r.method == method)
}
