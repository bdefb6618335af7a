//! The dual complex against mirrors exported by the knot engine from a
//! mirrored diagram.

mod common;

use std::collections::BTreeMap;

use common::*;
use hfklift::ak::{analyze_level, AkReport};
use hfklift::lift::LiftProblem;
use hfklift::model::{mirror_name, QuotientComplex};
use hfklift::spliff::{decide_side, DecideOptions};

fn pairs() -> Vec<(QuotientComplex, QuotientComplex)> {
    let all: BTreeMap<String, QuotientComplex> = mirror_pairs().into_iter().map(|q| (q.name.clone(), q)).collect();
    all.values()
        .filter(|q| !q.name.starts_with('m'))
        .map(|q| (q.clone(), all[&mirror_name(&q.name)].clone()))
        .collect()
}

/// Reports at every level, read off the first lift.
fn reports(qc: &QuotientComplex) -> Vec<AkReport> {
    let p = LiftProblem::new(qc).unwrap();
    let sol = p.solve().unwrap();
    let lift = p.enumerate_sample(&sol, 24).next().unwrap();
    let g = qc.derived_stats().unwrap().genus_bound;
    (0..=g.max(0)).map(|k| analyze_level(&lift.complex, k, None).unwrap()).collect()
}

#[test]
fn fixture_set_is_large_enough() {
    assert!(pairs().len() >= 20);
}

#[test]
fn dual_matches_engine_hfk() {
    for (knot, engine) in pairs() {
        let dual = knot.mirror();
        assert_eq!(dual.name, engine.name);
        assert_eq!(dual.hfk_table(), engine.hfk_table(), "{}", engine.name);
        let (a, b) = (dual.derived_stats().unwrap(), engine.derived_stats().unwrap());
        assert_eq!((a.thickness, a.rho, a.genus_bound), (b.thickness, b.rho, b.genus_bound));
    }
}

#[test]
fn dual_matches_engine_ak_reports() {
    for (knot, engine) in pairs() {
        assert_eq!(reports(&knot.mirror()), reports(&engine), "{}", engine.name);
    }
}

#[test]
fn dual_matches_engine_verdict() {
    let opts = DecideOptions::default();
    for (knot, engine) in pairs() {
        let a = decide_side(&knot.mirror(), "mK", &opts).unwrap();
        let b = decide_side(&engine, "mK", &opts).unwrap();
        assert_eq!(a.outcome, b.outcome, "{}", engine.name);
        assert_eq!(a.levels, b.levels, "{}", engine.name);
    }
}
