use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Generator, Gradings, HvArrow, LiftedFile, QuotientComplex};
use crate::gf2::{BitMatrix, BitVec};

/// A nonzero entry `U^u_exponent` at position (target, source) of the
/// differential over F[U].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiffEntry {
    pub target: usize,
    pub source: usize,
    pub u_exponent: u32,
}

/// A full knot Floer complex over F[U]: the differential of CFK^∞ in the
/// basis of HFK-hat generators. Generators are stored in id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullComplex {
    pub name: String,
    pub generators: Vec<Generator>,
    pub entries: Vec<DiffEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FullComplexIssue {
    /// `M(target) - M(source) + 1 != 2 * exponent`.
    ExponentLaw(DiffEntry),
    /// Exponent zero without a strict Alexander drop.
    Filtration(DiffEntry),
    /// `d^2` has a nonzero coefficient of `U^power` at (target, source).
    NotDifferential { target: usize, source: usize, power: u32 },
    /// Homology at `U = 1` should be one-dimensional.
    TowerRank(i64),
}

impl fmt::Display for FullComplexIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FullComplexIssue::ExponentLaw(e) => write!(f, "entry {e:?} breaks the exponent law"),
            FullComplexIssue::Filtration(e) => write!(f, "entry {e:?} does not lower the filtration"),
            FullComplexIssue::NotDifferential { target, source, power } => {
                write!(f, "d^2 has U^{power} at ({target}, {source})")
            }
            FullComplexIssue::TowerRank(r) => write!(f, "homology at U=1 has dimension {r}, expected 1"),
        }
    }
}

/// Nonzero coefficients of `d^2` for a differential given as per-source
/// adjacency lists `(target, exponent)`.
pub(crate) fn square_terms(out: &[Vec<(usize, u32)>]) -> Vec<(usize, usize, u32)> {
    let mut acc: BTreeMap<(usize, usize, u32), bool> = BTreeMap::new();
    for (s, edges) in out.iter().enumerate() {
        for &(m, e1) in edges {
            for &(t, e2) in &out[m] {
                let slot = acc.entry((t, s, e1 + e2)).or_insert(false);
                *slot = !*slot;
            }
        }
    }
    acc.into_iter().filter(|(_, v)| *v).map(|(k, _)| k).collect()
}

impl FullComplex {
    pub fn new(name: impl Into<String>, mut generators: Vec<Generator>, mut entries: Vec<DiffEntry>) -> Self {
        generators.sort_by_key(|g| g.id);
        entries.sort();
        FullComplex {
            name: name.into(),
            generators,
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn gradings(&self) -> Gradings {
        Gradings {
            maslov: self.generators.iter().map(|g| g.maslov).collect(),
            alexander: self.generators.iter().map(|g| g.alexander).collect(),
        }
    }

    /// Per-source lists of `(target, exponent)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u32)>> {
        let mut out = vec![Vec::new(); self.len()];
        for e in &self.entries {
            out[e.source].push((e.target, e.u_exponent));
        }
        out
    }

    /// The `v` power of an entry in the F[u,v] picture.
    fn v_power(&self, e: &DiffEntry) -> i64 {
        let da = self.generators[e.target].alexander - self.generators[e.source].alexander;
        e.u_exponent as i64 - da
    }

    fn as_arrow(&self, e: &DiffEntry) -> HvArrow {
        HvArrow {
            source: e.source,
            target: e.target,
            u_power: e.u_exponent as i64,
            v_power: self.v_power(e),
        }
    }

    pub fn is_diagonal(&self, e: &DiffEntry) -> bool {
        e.u_exponent > 0 && self.v_power(e) > 0
    }

    pub fn diagonals(&self) -> Vec<HvArrow> {
        self.entries
            .iter()
            .filter(|e| self.is_diagonal(e))
            .map(|e| self.as_arrow(e))
            .collect()
    }

    pub fn hv_arrows(&self) -> Vec<HvArrow> {
        self.entries
            .iter()
            .filter(|e| !self.is_diagonal(e))
            .map(|e| self.as_arrow(e))
            .collect()
    }

    /// Nonzero coefficients of `d^2` as `(target, source, power)`.
    pub fn square(&self) -> Vec<(usize, usize, u32)> {
        square_terms(&self.adjacency())
    }

    pub fn is_differential(&self) -> bool {
        self.square().is_empty()
    }

    /// `dim ker N - rank N` for the GF(2) matrix `N = d|_{U=1}`.
    pub fn u1_homology_dim(&self) -> i64 {
        let n = self.len();
        let mut rows = vec![BitVec::zeros(n); n];
        for e in &self.entries {
            rows[e.target].flip(e.source);
        }
        let rank = BitMatrix::from_rows(n, rows).rank() as i64;
        n as i64 - 2 * rank
    }

    /// Every violated invariant; empty for a valid full complex.
    pub fn check(&self) -> Vec<FullComplexIssue> {
        let mut out = Vec::new();
        for e in &self.entries {
            let (s, t) = (&self.generators[e.source], &self.generators[e.target]);
            if t.maslov - s.maslov + 1 != 2 * e.u_exponent as i64 {
                out.push(FullComplexIssue::ExponentLaw(*e));
            }
            if e.u_exponent == 0 && t.alexander >= s.alexander {
                out.push(FullComplexIssue::Filtration(*e));
            }
        }
        out.extend(
            self.square()
                .into_iter()
                .map(|(target, source, power)| FullComplexIssue::NotDifferential { target, source, power }),
        );
        let h = self.u1_homology_dim();
        if h != 1 {
            out.push(FullComplexIssue::TowerRank(h));
        }
        out
    }

    /// The dual complex (mirror knot), mirroring [`QuotientComplex::mirror`].
    pub fn dual(&self) -> FullComplex {
        FullComplex::new(
            super::mirror_name(&self.name),
            self.generators
                .iter()
                .map(|g| Generator {
                    id: g.id,
                    maslov: -g.maslov,
                    alexander: -g.alexander,
                })
                .collect(),
            self.entries
                .iter()
                .map(|e| DiffEntry {
                    target: e.source,
                    source: e.target,
                    u_exponent: e.u_exponent,
                })
                .collect(),
        )
    }

    /// The uv-quotient: drop the diagonal entries.
    pub fn quotient(&self) -> QuotientComplex {
        QuotientComplex::new(self.name.clone(), self.generators.clone(), self.hv_arrows())
    }

    pub fn to_file(&self) -> LiftedFile {
        let mut f = LiftedFile::from_quotient(&self.quotient());
        let mut d = self.diagonals();
        d.sort();
        f.diagonals = Some(d);
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(id: usize, maslov: i64, alexander: i64) -> Generator {
        Generator { id, maslov, alexander }
    }

    fn trefoil() -> FullComplex {
        FullComplex::new(
            "3a1",
            vec![g(0, -1, 0), g(1, 0, 1), g(2, -2, -1)],
            vec![
                DiffEntry { target: 1, source: 0, u_exponent: 1 },
                DiffEntry { target: 2, source: 0, u_exponent: 0 },
            ],
        )
    }

    #[test]
    fn trefoil_is_a_valid_full_complex() {
        let t = trefoil();
        assert!(t.check().is_empty(), "{:?}", t.check());
        assert!(t.diagonals().is_empty());
        assert_eq!(t.hv_arrows().len(), 2);
        assert!(t.dual().check().is_empty());
        assert_eq!(t.dual().dual(), t);
    }

    #[test]
    fn detects_bad_entries() {
        let mut t = trefoil();
        t.entries.push(DiffEntry { target: 1, source: 2, u_exponent: 0 });
        let issues = t.check();
        assert!(issues.iter().any(|i| matches!(i, FullComplexIssue::ExponentLaw(_))));
        assert!(issues.iter().any(|i| matches!(i, FullComplexIssue::Filtration(_))));
        assert!(issues.iter().any(|i| matches!(i, FullComplexIssue::NotDifferential { .. })));
    }

    #[test]
    fn acyclic_complex_has_wrong_tower_rank() {
        let c = FullComplex::new(
            "pair",
            vec![g(0, 1, 1), g(1, 0, 0)],
            vec![DiffEntry { target: 1, source: 0, u_exponent: 0 }],
        );
        assert_eq!(c.check(), vec![FullComplexIssue::TowerRank(0)]);
    }
}
