#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;

use hfklift::model::{load_inputs, FullComplex, QuotientComplex};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load_all(path: PathBuf) -> Vec<QuotientComplex> {
    load_inputs(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .into_iter()
        .map(|(label, r)| r.unwrap_or_else(|e| panic!("{label}: {e}")))
        .collect()
}

/// Census fixtures with crossing number in `lo..=hi`, one chirality each.
pub fn census(lo: u32, hi: u32) -> Vec<QuotientComplex> {
    (lo..=hi)
        .flat_map(|n| load_all(fixtures().join(format!("census/knots_{n:02}.jsonl.gz"))))
        .collect()
}

pub fn thick2(n: u32) -> Vec<QuotientComplex> {
    load_all(fixtures().join(format!("census/thick2_{n}.jsonl")))
}

pub fn sample(name: &str) -> QuotientComplex {
    hfklift::model::load_complex(&fixtures().join(format!("samples/{name}.json"))).unwrap()
}

pub fn mirror_pairs() -> Vec<QuotientComplex> {
    load_all(fixtures().join("mirrors/manifest.json"))
}

/// One line of the acceptance summary. Written to the process stdout
/// directly so it shows up without `--nocapture`; the leading newline keeps
/// it off libtest's `test name ...` line.
pub fn report(criterion: &str, ok: bool, detail: &str) {
    let line = format!("\n{} {criterion}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    std::io::stdout().write_all(line.as_bytes()).unwrap();
}

// ---- brute-force oracle over F[u,v] ----

/// An entry `source -> u^a v^b target`.
pub type UvEntry = (usize, usize, i64, i64);

/// Whether the matrix with the given entries squares to zero, by summing
/// every length-two path.
pub fn squares_to_zero(n: usize, entries: &[UvEntry]) -> bool {
    let mut out: Vec<Vec<(usize, i64, i64)>> = vec![Vec::new(); n];
    for &(s, t, a, b) in entries {
        out[s].push((t, a, b));
    }
    for j in 0..n {
        let mut acc: BTreeSet<(usize, i64, i64)> = BTreeSet::new();
        for &(m, a1, b1) in &out[j] {
            for &(i, a2, b2) in &out[m] {
                let key = (i, a1 + a2, b1 + b2);
                if !acc.insert(key) {
                    acc.remove(&key);
                }
            }
        }
        if !acc.is_empty() {
            return false;
        }
    }
    true
}

fn index_gradings(qc: &QuotientComplex) -> (Vec<i64>, Vec<i64>) {
    let n = qc.generators.len();
    let (mut m, mut a) = (vec![0; n], vec![0; n]);
    for g in &qc.generators {
        m[g.id] = g.maslov;
        a[g.id] = g.alexander;
    }
    (m, a)
}

pub fn hv_entries(qc: &QuotientComplex) -> Vec<UvEntry> {
    qc.arrows.iter().map(|x| (x.source, x.target, x.u_power, x.v_power)).collect()
}

/// Every position where a diagonal `u^a v^b` with `a, b >= 1` is allowed by
/// the Maslov and Alexander gradings.
pub fn oracle_placeholders(qc: &QuotientComplex) -> Vec<UvEntry> {
    let (m, al) = index_gradings(qc);
    let n = m.len();
    let mut out = Vec::new();
    for t in 0..n {
        for s in 0..n {
            let twice_a = m[t] - m[s] + 1;
            if t == s || twice_a < 2 || twice_a % 2 != 0 {
                continue;
            }
            let a = twice_a / 2;
            let b = a - (al[t] - al[s]);
            if b >= 1 {
                out.push((s, t, a, b));
            }
        }
    }
    out
}

/// Sets of diagonal `(source, target)` pairs for which `H + V + D` squares
/// to zero, by exhaustive search.
pub fn brute_force_lifts(qc: &QuotientComplex, vars: &[UvEntry]) -> BTreeSet<BTreeSet<(usize, usize)>> {
    let hv = hv_entries(qc);
    let mut out = BTreeSet::new();
    for mask in 0u64..1 << vars.len() {
        let mut e = hv.clone();
        let mut chosen = BTreeSet::new();
        for (i, &v) in vars.iter().enumerate() {
            if mask >> i & 1 == 1 {
                e.push(v);
                chosen.insert((v.0, v.1));
            }
        }
        if squares_to_zero(qc.generators.len(), &e) {
            out.insert(chosen);
        }
    }
    out
}

/// A full complex in `(u, v)` form: `b = a - (A(target) - A(source))`.
pub fn uv_entries(fc: &FullComplex) -> Vec<UvEntry> {
    let mut alex = BTreeMap::new();
    for g in &fc.generators {
        alex.insert(g.id, g.alexander);
    }
    fc.entries
        .iter()
        .map(|e| {
            let a = e.u_exponent as i64;
            (e.source, e.target, a, a - (alex[&e.target] - alex[&e.source]))
        })
        .collect()
}

pub fn diagonal_pairs(fc: &FullComplex) -> BTreeSet<(usize, usize)> {
    fc.diagonals().iter().map(|d| (d.source, d.target)).collect()
}

/// Length-one summands of `A_k^red`: `count_1` without the tower bottom.
pub fn reduced_count(r: &hfklift::ak::AkReport) -> BTreeMap<i64, usize> {
    let mut c = r.count_1.clone();
    if r.v_k == Some(1) {
        if let Some(n) = c.get_mut(&-2) {
            *n -= 1;
        }
    }
    c.retain(|_, n| *n > 0);
    c
}
