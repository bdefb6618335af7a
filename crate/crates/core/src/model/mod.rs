//! Quotient and full knot Floer complexes: domain types, grading laws,
//! validation and the HFK-level derived quantities.
//!
//! A quotient complex is the uv-quotient of a reduced knot Floer complex:
//! generators of reduced HFK-hat with Maslov and Alexander gradings, plus the
//! horizontal (`u^a`) and vertical (`v^b`) arrows. Coefficients live in GF(2),
//! so an arrow is present or absent.

mod format;
mod full;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{
    decode_text, load_bundle, load_complex, load_inputs, load_lifted, parse_bundle, parse_complex, parse_manifest, LiftedFile,
};
pub use full::{DiffEntry, FullComplex, FullComplexIssue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub id: usize,
    pub maslov: i64,
    pub alexander: i64,
}

impl Generator {
    /// The δ-grading `M - A`.
    pub fn delta(&self) -> i64 {
        self.maslov - self.alexander
    }
}

/// A horizontal (`u^a`, `b = 0`) or vertical (`v^b`, `a = 0`) arrow from
/// `source` to `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HvArrow {
    #[serde(rename = "from")]
    pub source: usize,
    #[serde(rename = "to")]
    pub target: usize,
    #[serde(rename = "u")]
    pub u_power: i64,
    #[serde(rename = "v")]
    pub v_power: i64,
}

impl HvArrow {
    pub fn is_horizontal(&self) -> bool {
        self.v_power == 0 && self.u_power > 0
    }

    pub fn is_vertical(&self) -> bool {
        self.u_power == 0 && self.v_power > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientComplex {
    pub name: String,
    pub generators: Vec<Generator>,
    pub arrows: Vec<HvArrow>,
}

/// One violated invariant of a [`QuotientComplex`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoGenerators,
    DuplicateId { id: usize },
    MissingId { id: usize },
    UnknownEndpoint { arrow: usize, id: usize },
    NegativePower { arrow: usize },
    NotHorizontalOrVertical { arrow: usize, u: i64, v: i64 },
    GradingLaw { arrow: usize, source: usize, target: usize, expected: i64, found: i64 },
    AlexanderLaw { arrow: usize, source: usize, target: usize, expected: i64, found: i64 },
    DuplicateArrow { arrow: usize, first: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoGenerators => write!(f, "complex has no generators"),
            DuplicateId { id } => write!(f, "generator id {id} appears more than once"),
            MissingId { id } => write!(f, "generator ids skip {id}"),
            UnknownEndpoint { arrow, id } => write!(f, "arrow {arrow} refers to unknown generator {id}"),
            NegativePower { arrow } => write!(f, "arrow {arrow} has a negative power"),
            NotHorizontalOrVertical { arrow, u, v } => {
                write!(f, "arrow {arrow} has u={u}, v={v}; exactly one must be zero")
            }
            GradingLaw { arrow, source, target, expected, found } => write!(
                f,
                "grading law: arrow {arrow} ({source} -> {target}) needs M(target) = {expected}, found {found}"
            ),
            AlexanderLaw { arrow, source, target, expected, found } => write!(
                f,
                "Alexander law: arrow {arrow} ({source} -> {target}) needs A(target) = {expected}, found {found}"
            ),
            DuplicateArrow { arrow, first } => {
                write!(f, "arrow {arrow} repeats the endpoints of arrow {first}")
            }
        }
    }
}

/// Knot Floer homology dimensions keyed by `(alexander, maslov)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HfkTable(pub BTreeMap<(i64, i64), usize>);

impl HfkTable {
    pub fn from_generators<'a, I: IntoIterator<Item = &'a Generator>>(gens: I) -> Self {
        let mut t = BTreeMap::new();
        for g in gens {
            *t.entry((g.alexander, g.maslov)).or_insert(0) += 1;
        }
        HfkTable(t)
    }

    /// `dim HFK_d(K, s)`.
    pub fn dim(&self, alexander: i64, maslov: i64) -> usize {
        self.0.get(&(alexander, maslov)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// The table of the mirror: `HFK_d(K, s) = HFK_{-d}(mK, -s)`.
    pub fn mirrored(&self) -> HfkTable {
        HfkTable(self.0.iter().map(|(&(a, m), &n)| ((-a, -m), n)).collect())
    }

    /// Graded Euler characteristic per Alexander grading.
    pub fn euler(&self) -> BTreeMap<i64, i64> {
        let mut e = BTreeMap::new();
        for (&(a, m), &n) in &self.0 {
            let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
            *e.entry(a).or_insert(0) += sign * n as i64;
        }
        e.retain(|_, v| *v != 0);
        e
    }
}

impl Serialize for HfkTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Cell {
            alexander: i64,
            maslov: i64,
            dim: usize,
        }
        s.collect_seq(self.0.iter().map(|(&(alexander, maslov), &dim)| Cell { alexander, maslov, dim }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub thickness: i64,
    pub rho: i64,
    pub genus_bound: i64,
    pub hfk_table: HfkTable,
}

/// Gradings indexed by generator id, for the dense algorithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gradings {
    pub maslov: Vec<i64>,
    pub alexander: Vec<i64>,
}

impl Gradings {
    pub fn len(&self) -> usize {
        self.maslov.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maslov.is_empty()
    }

    pub fn delta(&self, id: usize) -> i64 {
        self.maslov[id] - self.alexander[id]
    }
}

impl QuotientComplex {
    pub fn new(name: impl Into<String>, generators: Vec<Generator>, arrows: Vec<HvArrow>) -> Self {
        QuotientComplex {
            name: name.into(),
            generators,
            arrows,
        }
    }

    /// The unknot: one generator in bigrading (0, 0), no arrows.
    pub fn unknot() -> Self {
        QuotientComplex::new(
            "unknot",
            vec![Generator { id: 0, maslov: 0, alexander: 0 }],
            vec![],
        )
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Every violated invariant; empty iff the complex is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.generators.len();
        if n == 0 {
            out.push(Violation::NoGenerators);
        }
        let mut by_id: Vec<Option<&Generator>> = vec![None; n];
        for g in &self.generators {
            match by_id.get_mut(g.id) {
                Some(slot @ None) => *slot = Some(g),
                Some(Some(_)) => out.push(Violation::DuplicateId { id: g.id }),
                // an id >= n forces a gap somewhere below it
                None => {}
            }
        }
        for (id, slot) in by_id.iter().enumerate() {
            if slot.is_none() {
                out.push(Violation::MissingId { id });
            }
        }
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (idx, a) in self.arrows.iter().enumerate() {
            if let Some(&first) = seen.get(&(a.source, a.target)) {
                out.push(Violation::DuplicateArrow { arrow: idx, first });
            } else {
                seen.insert((a.source, a.target), idx);
            }
            if a.u_power < 0 || a.v_power < 0 {
                out.push(Violation::NegativePower { arrow: idx });
                continue;
            }
            if (a.u_power == 0) == (a.v_power == 0) {
                out.push(Violation::NotHorizontalOrVertical { arrow: idx, u: a.u_power, v: a.v_power });
            }
            let mut endpoints = [None, None];
            for (slot, id) in endpoints.iter_mut().zip([a.source, a.target]) {
                *slot = by_id.get(id).copied().flatten();
                if slot.is_none() {
                    out.push(Violation::UnknownEndpoint { arrow: idx, id });
                }
            }
            let [Some(s), Some(t)] = endpoints else { continue };
            let m = s.maslov - 1 + 2 * a.u_power;
            if t.maslov != m {
                out.push(Violation::GradingLaw {
                    arrow: idx,
                    source: a.source,
                    target: a.target,
                    expected: m,
                    found: t.maslov,
                });
            }
            let al = s.alexander + a.u_power - a.v_power;
            if t.alexander != al {
                out.push(Violation::AlexanderLaw {
                    arrow: idx,
                    source: a.source,
                    target: a.target,
                    expected: al,
                    found: t.alexander,
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Fails with the first violation when the complex is invalid.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(Violation::NoGenerators) => Err(Error::NoGenerators),
            Some(v) => Err(Error::Invalid(v.to_string())),
        }
    }

    pub fn gradings(&self) -> Gradings {
        let n = self.generators.len();
        let mut maslov = vec![0; n];
        let mut alexander = vec![0; n];
        for g in &self.generators {
            if g.id < n {
                maslov[g.id] = g.maslov;
                alexander[g.id] = g.alexander;
            }
        }
        Gradings { maslov, alexander }
    }

    pub fn hfk_table(&self) -> HfkTable {
        HfkTable::from_generators(&self.generators)
    }

    pub fn derived_stats(&self) -> Result<Stats> {
        if self.generators.is_empty() {
            return Err(Error::NoGenerators);
        }
        let deltas = self.generators.iter().map(Generator::delta);
        let rho = deltas.clone().max().unwrap();
        let thickness = rho - deltas.min().unwrap();
        let genus_bound = self.generators.iter().map(|g| g.alexander).max().unwrap();
        Ok(Stats {
            thickness,
            rho,
            genus_bound,
            hfk_table: self.hfk_table(),
        })
    }

    /// The dual complex, which represents the mirror knot: gradings negate
    /// and every arrow reverses with its powers unchanged.
    pub fn mirror(&self) -> QuotientComplex {
        QuotientComplex {
            name: mirror_name(&self.name),
            generators: self
                .generators
                .iter()
                .map(|g| Generator {
                    id: g.id,
                    maslov: -g.maslov,
                    alexander: -g.alexander,
                })
                .collect(),
            arrows: self
                .arrows
                .iter()
                .map(|a| HvArrow {
                    source: a.target,
                    target: a.source,
                    ..*a
                })
                .collect(),
        }
    }

    /// Copy with generators sorted by (A, M, id) and arrows by endpoints.
    pub fn canonical(&self) -> QuotientComplex {
        let mut c = self.clone();
        c.generators.sort_by_key(|g| (g.alexander, g.maslov, g.id));
        c.arrows.sort();
        c
    }
}

/// `12n89` <-> `m12n89`; other names toggle a `mirror-` prefix.
pub fn mirror_name(name: &str) -> String {
    if let Some(rest) = name.strip_prefix('m').filter(|r| r.starts_with(|c: char| c.is_ascii_digit())) {
        return rest.to_string();
    }
    if name.starts_with(|c: char| c.is_ascii_digit()) {
        return format!("m{name}");
    }
    match name.strip_prefix("mirror-") {
        Some(rest) => rest.to_string(),
        None => format!("mirror-{name}"),
    }
}

/// Crossing number parsed from census-style names (`12n67`, `m3a1`).
pub fn crossing_number(name: &str) -> Option<u32> {
    let s = name.strip_prefix('m').unwrap_or(name);
    let s = s.strip_prefix('K').unwrap_or(s);
    let digits: String = s.chars().take_while(char::is_ascii_digit).collect();
    let rest = &s[digits.len()..];
    if digits.is_empty() || !(rest.starts_with('a') || rest.starts_with('n') || rest.starts_with('_')) {
        return None;
    }
    digits.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(id: usize, maslov: i64, alexander: i64) -> Generator {
        Generator { id, maslov, alexander }
    }

    fn arrow(source: usize, target: usize, u: i64, v: i64) -> HvArrow {
        HvArrow { source, target, u_power: u, v_power: v }
    }

    /// Right-handed trefoil staircase.
    fn trefoil() -> QuotientComplex {
        QuotientComplex::new(
            "3a1",
            vec![g(0, -1, 0), g(1, 0, 1), g(2, -2, -1)],
            vec![arrow(0, 1, 1, 0), arrow(0, 2, 0, 1)],
        )
    }

    #[test]
    fn unknot_is_valid() {
        assert!(QuotientComplex::unknot().validate().is_empty());
    }

    #[test]
    fn grading_law_violation_is_reported() {
        // vertical arrow between equal Maslov gradings
        let qc = QuotientComplex::new("bad", vec![g(0, 0, 1), g(1, 0, 0)], vec![arrow(0, 1, 0, 1)]);
        let v = qc.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::GradingLaw { arrow: 0, .. }));
    }

    #[test]
    fn structural_violations() {
        let qc = QuotientComplex::new(
            "bad",
            vec![g(0, 0, 0), g(0, 1, 0), g(3, 0, 0)],
            vec![arrow(0, 7, 1, 0), arrow(0, 1, 0, 0), arrow(0, 1, 1, 1), arrow(1, 0, -1, 0)],
        );
        let v = qc.validate();
        assert!(v.contains(&Violation::DuplicateId { id: 0 }));
        assert!(v.contains(&Violation::MissingId { id: 1 }));
        assert!(v.contains(&Violation::MissingId { id: 2 }));
        assert!(v.contains(&Violation::UnknownEndpoint { arrow: 0, id: 7 }));
        assert!(v.contains(&Violation::NotHorizontalOrVertical { arrow: 1, u: 0, v: 0 }));
        assert!(v.contains(&Violation::DuplicateArrow { arrow: 2, first: 1 }));
        assert!(v.contains(&Violation::NegativePower { arrow: 3 }));
    }

    #[test]
    fn empty_complex_is_rejected() {
        let qc = QuotientComplex::new("empty", vec![], vec![]);
        assert_eq!(qc.validate(), vec![Violation::NoGenerators]);
        assert!(matches!(qc.derived_stats(), Err(Error::NoGenerators)));
    }

    #[test]
    fn unknot_stats() {
        let s = QuotientComplex::unknot().derived_stats().unwrap();
        assert_eq!((s.thickness, s.rho, s.genus_bound), (0, 0, 0));
    }

    #[test]
    fn trefoil_mirror_negates_gradings() {
        let t = trefoil();
        assert!(t.validate().is_empty());
        let m = t.mirror();
        assert!(m.validate().is_empty());
        assert_eq!(m.name, "m3a1");
        assert_eq!(m.hfk_table(), t.hfk_table().mirrored());
        assert_eq!(m.hfk_table().dim(-1, 0), 1);
        assert_eq!(m.hfk_table().dim(1, 2), 1);
        assert_eq!(m.mirror(), t);
    }

    #[test]
    fn names() {
        assert_eq!(mirror_name("12n89"), "m12n89");
        assert_eq!(mirror_name("m12n89"), "12n89");
        assert_eq!(mirror_name("mystery"), "mirror-mystery");
        assert_eq!(mirror_name("mirror-mystery"), "mystery");
        assert_eq!(crossing_number("m12n244"), Some(12));
        assert_eq!(crossing_number("K14n123"), Some(14));
        assert_eq!(crossing_number("3a1"), Some(3));
        assert_eq!(crossing_number("unknot"), None);
        assert_eq!(crossing_number("cable"), None);
    }

    #[test]
    fn euler_characteristic_of_trefoil() {
        let e = trefoil().hfk_table().euler();
        assert_eq!(e, BTreeMap::from([(-1, 1), (0, -1), (1, 1)]));
    }

    /// Random valid complexes: generators on a small lattice, arrows drawn
    /// from the pairs that satisfy the grading laws.
    pub(crate) fn arb_valid_complex() -> impl Strategy<Value = QuotientComplex> {
        proptest::collection::vec((-3i64..4, -3i64..4), 1..8).prop_flat_map(|pts| {
            let gens: Vec<Generator> = pts.iter().enumerate().map(|(i, &(m, a))| g(i, m, a)).collect();
            let mut candidates = Vec::new();
            for s in &gens {
                for t in &gens {
                    let dm = t.maslov - s.maslov;
                    let da = t.alexander - s.alexander;
                    if dm == -1 && da < 0 {
                        candidates.push(arrow(s.id, t.id, 0, -da));
                    } else if dm >= 1 && dm % 2 == 1 && da == (dm + 1) / 2 {
                        candidates.push(arrow(s.id, t.id, (dm + 1) / 2, 0));
                    }
                }
            }
            let k = candidates.len();
            proptest::collection::vec(any::<bool>(), k).prop_map(move |keep| {
                let arrows = candidates.iter().zip(&keep).filter(|(_, &b)| b).map(|(a, _)| *a).collect();
                QuotientComplex::new("random", gens.clone(), arrows)
            })
        })
    }

    proptest! {
        #[test]
        fn mirror_is_an_involution(qc in arb_valid_complex()) {
            prop_assert!(qc.validate().is_empty());
            let m = qc.mirror();
            prop_assert!(m.validate().is_empty());
            prop_assert_eq!(m.mirror(), qc.clone());
            let s = qc.derived_stats().unwrap();
            let sm = m.derived_stats().unwrap();
            prop_assert_eq!(s.thickness, sm.thickness);
            prop_assert_eq!(sm.rho, s.thickness - s.rho);
        }

        #[test]
        fn canonical_order_keeps_validity(qc in arb_valid_complex()) {
            let c = qc.canonical();
            prop_assert!(c.validate().is_empty());
            prop_assert_eq!(c.hfk_table(), qc.hfk_table());
            prop_assert_eq!(c.gradings(), qc.gradings());
        }
    }
}
