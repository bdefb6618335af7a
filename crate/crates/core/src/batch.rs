//! Census runs: decide many knots in parallel and aggregate the verdicts.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{crossing_number, QuotientComplex};
use crate::spliff::{decide_total, DecideOptions, Status, Verdict};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub spliff_both: usize,
    pub fails_knot: usize,
    pub fails_mirror: usize,
    pub unknown: usize,
}

impl Totals {
    fn add(&mut self, s: &Status) {
        match s {
            Status::SpliffBoth => self.spliff_both += 1,
            Status::FailsKnot { .. } => self.fails_knot += 1,
            Status::FailsMirror { .. } => self.fails_mirror += 1,
            Status::Unknown { .. } => self.unknown += 1,
        }
    }

    pub fn fails(&self) -> usize {
        self.fails_knot + self.fails_mirror
    }

    pub fn total(&self) -> usize {
        self.spliff_both + self.fails() + self.unknown
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunMeta {
    pub wall_seconds: f64,
    pub jobs: usize,
    pub max_kernel_dim: usize,
    pub fallback_n: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchRow {
    pub crossings: Option<u32>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchReport {
    pub totals: Totals,
    /// Keyed by crossing number; knots without one are left out.
    pub per_crossing: BTreeMap<u32, Totals>,
    pub rows: Vec<BatchRow>,
    pub meta: RunMeta,
}

/// Decides every input on a pool of `jobs` workers. Unreadable inputs become
/// `Unknown` rows. Rows are sorted by name, so the result does not depend
/// on scheduling.
pub fn run_batch(inputs: Vec<(String, Result<QuotientComplex>)>, jobs: usize, opts: &DecideOptions) -> Result<BatchReport> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let mut rows: Vec<BatchRow> = pool.install(|| {
        inputs
            .into_par_iter()
            .map(|(label, r)| {
                let verdict = match r {
                    Ok(qc) => decide_total(&label, &qc, opts),
                    Err(e) => Verdict::invalid(label, &e),
                };
                BatchRow {
                    crossings: crossing_number(&verdict.name),
                    verdict: Verdict {
                        knot: None,
                        mirror: None,
                        ..verdict
                    },
                }
            })
            .collect()
    });
    rows.sort_by(|a, b| a.verdict.name.cmp(&b.verdict.name));

    let mut totals = Totals::default();
    let mut per_crossing: BTreeMap<u32, Totals> = BTreeMap::new();
    for row in &rows {
        totals.add(&row.verdict.status);
        if let Some(c) = row.crossings {
            per_crossing.entry(c).or_default().add(&row.verdict.status);
        }
    }
    Ok(BatchReport {
        totals,
        per_crossing,
        rows,
        meta: RunMeta {
            wall_seconds: start.elapsed().as_secs_f64(),
            jobs,
            max_kernel_dim: opts.max_kernel_dim,
            fallback_n: opts.fallback_n,
        },
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    crossings: Option<u32>,
    thickness: i64,
    rho: i64,
    status: String,
    failing_k: Option<i64>,
    kernel_dim: Option<usize>,
    method_trace: String,
}

impl BatchReport {
    /// One row per knot; no runtime metadata, so reruns are byte-identical.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            let v = &r.verdict;
            w.serialize(CsvRow {
                name: &v.name,
                crossings: r.crossings,
                thickness: v.thickness,
                rho: v.rho,
                status: v.status.to_string(),
                failing_k: v.failing_k,
                kernel_dim: v.kernel_dim,
                method_trace: v.method_trace_string(),
            })?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-crossing counts in the layout of the census tables.
    pub fn summary(&self) -> String {
        let mut s = String::from("crossings  spliff  non-spliff  unknown\n");
        let line = |label: &str, t: &Totals| format!("{label:>9}  {:>6}  {:>10}  {:>7}\n", t.spliff_both, t.fails(), t.unknown);
        for (c, t) in &self.per_crossing {
            s.push_str(&line(&c.to_string(), t));
        }
        s.push_str(&line("total", &self.totals));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Generator, HvArrow};

    fn trefoil(name: &str) -> QuotientComplex {
        QuotientComplex::new(
            name,
            vec![
                Generator { id: 0, maslov: -1, alexander: 0 },
                Generator { id: 1, maslov: 0, alexander: 1 },
                Generator { id: 2, maslov: -2, alexander: -1 },
            ],
            vec![
                HvArrow { source: 0, target: 1, u_power: 1, v_power: 0 },
                HvArrow { source: 0, target: 2, u_power: 0, v_power: 1 },
            ],
        )
    }

    #[test]
    fn totals_and_sorting() {
        let inputs = vec![
            ("b".to_string(), Ok(trefoil("3a1"))),
            ("a".to_string(), Err(Error::Invalid("broken".into()))),
            ("c".to_string(), Ok(QuotientComplex::unknot())),
        ];
        let r = run_batch(inputs, 2, &DecideOptions::default()).unwrap();
        let names: Vec<&str> = r.rows.iter().map(|r| r.verdict.name.as_str()).collect();
        assert_eq!(names, vec!["3a1", "a", "unknot"]);
        assert_eq!(r.totals.spliff_both, 2);
        assert_eq!(r.totals.unknown, 1);
        assert_eq!(r.totals.total(), 3);
        assert_eq!(r.per_crossing[&3].spliff_both, 1);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("name,crossings,thickness,rho,status,failing_k,kernel_dim,method_trace\n"));
        assert!(text.contains("3a1,3,0,-1,SpliffBoth,,,K:thickness0;mK:thickness0\n"));
    }
}
