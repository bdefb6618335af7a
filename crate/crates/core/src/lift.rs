//! Reconstruction of the full differential from the uv-quotient.
//!
//! The known horizontal and vertical arrows form `H + V`. Every ordered pair
//! of generators whose gradings allow a diagonal arrow gets a GF(2) unknown,
//! giving `d_var = H + V + D_var`. Expanding `d_var^2 = 0` coefficient by
//! coefficient yields an affine system over GF(2); below thickness three
//! (with at most two Maslov degrees per Alexander grading) the system is
//! linear because no two placeholders compose.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use log::debug;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::model::{DiffEntry, FullComplex, Gradings, QuotientComplex};

/// Default cap on the kernel dimension explored by [`LiftProblem::enumerate`].
pub const DEFAULT_MAX_KERNEL_DIM: usize = 12;

/// Sparse `H + V` over F[U].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HvMatrix {
    pub size: usize,
    pub entries: Vec<DiffEntry>,
}

/// Builds `H + V`; entry (target, source) is `U^a` for each arrow with
/// `u_power = a`, checked against `a = (M(target) - M(source) + 1) / 2`.
pub fn build_hv(qc: &QuotientComplex) -> Result<HvMatrix> {
    let gr = qc.gradings();
    let n = gr.len();
    let mut entries = Vec::with_capacity(qc.arrows.len());
    for (index, a) in qc.arrows.iter().enumerate() {
        let bad = |reason: String| Error::ArrowExponent {
            index,
            from: a.source,
            to: a.target,
            reason,
        };
        if a.source >= n || a.target >= n {
            return Err(bad("endpoint out of range".into()));
        }
        let diff = gr.maslov[a.target] - gr.maslov[a.source] + 1;
        if diff != 2 * a.u_power || a.u_power < 0 {
            return Err(bad(format!(
                "u power {} but M(target) - M(source) + 1 = {diff}",
                a.u_power
            )));
        }
        entries.push(DiffEntry {
            target: a.target,
            source: a.source,
            u_exponent: a.u_power as u32,
        });
    }
    entries.sort();
    Ok(HvMatrix { size: n, entries })
}

/// Unknown coefficient of a possible diagonal arrow `source -> U^k target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placeholder {
    pub var_index: usize,
    pub source: usize,
    pub target: usize,
    pub u_exponent: u32,
}

/// One placeholder per ordered pair `(target, source)` with
/// `k = (M(target) - M(source) + 1) / 2 >= 1` and `k > A(target) - A(source)`,
/// in row-major order.
pub fn placeholders(gr: &Gradings) -> Vec<Placeholder> {
    let n = gr.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let dm = gr.maslov[i] - gr.maslov[j] + 1;
            if dm < 2 || dm % 2 != 0 {
                continue;
            }
            let k = dm / 2;
            if k > gr.alexander[i] - gr.alexander[j] {
                out.push(Placeholder {
                    var_index: out.len(),
                    source: j,
                    target: i,
                    u_exponent: k as u32,
                });
            }
        }
    }
    out
}

/// Whether no two placeholders can compose: thickness at most two and every
/// Alexander grading supported in at most two Maslov degrees.
pub fn placeholders_never_compose(gr: &Gradings) -> bool {
    if gr.is_empty() {
        return true;
    }
    let deltas = (0..gr.len()).map(|i| gr.delta(i));
    if deltas.clone().max().unwrap() - deltas.min().unwrap() > 2 {
        return false;
    }
    let mut support: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
    for i in 0..gr.len() {
        support.entry(gr.alexander[i]).or_default().insert(gr.maslov[i]);
    }
    support.values().all(|s| s.len() <= 2)
}

/// The d^2 = 0 constraints as an affine GF(2) system `A a = b`.
///
/// Rows with degree-two monomials keep their linear part in `matrix` and
/// list the monomials in `nonlinear_terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub matrix: BitMatrix,
    pub rhs: BitVec,
    pub var_map: Vec<Placeholder>,
    pub nonlinear_terms: Vec<(usize, (usize, usize))>,
}

#[derive(Default)]
struct Coefficient {
    constant: bool,
    linear: BTreeSet<usize>,
    quadratic: BTreeSet<(usize, usize)>,
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, x: T) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

/// Expands `(H + V + D_var)^2` and collects one equation per nonzero
/// coefficient. Identical rows are merged and trivial `0 = 0` rows dropped.
pub fn square_to_system(hv: &HvMatrix, vars: &[Placeholder]) -> EquationSystem {
    let n = hv.size;
    let mut out: Vec<Vec<(usize, u32, Option<usize>)>> = vec![Vec::new(); n];
    for e in &hv.entries {
        out[e.source].push((e.target, e.u_exponent, None));
    }
    for p in vars {
        out[p.source].push((p.target, p.u_exponent, Some(p.var_index)));
    }
    let mut coeffs: HashMap<(usize, usize, u32), Coefficient> = HashMap::new();
    for (s, edges) in out.iter().enumerate() {
        for &(m, e1, v1) in edges {
            for &(t, e2, v2) in &out[m] {
                let c = coeffs.entry((t, s, e1 + e2)).or_default();
                match (v1, v2) {
                    (None, None) => c.constant = !c.constant,
                    (Some(v), None) | (None, Some(v)) => toggle(&mut c.linear, v),
                    (Some(a), Some(b)) => toggle(&mut c.quadratic, (a.min(b), a.max(b))),
                }
            }
        }
    }
    let mut keys: Vec<_> = coeffs.keys().copied().collect();
    keys.sort_unstable();

    let nv = vars.len();
    let mut seen = HashSet::new();
    let mut matrix = BitMatrix::new(nv);
    let mut rhs = Vec::new();
    let mut nonlinear_terms = Vec::new();
    for key in keys {
        let c = &coeffs[&key];
        if !c.constant && c.linear.is_empty() && c.quadratic.is_empty() {
            continue;
        }
        let row = BitVec::from_ones(nv, c.linear.iter().copied());
        let quad: Vec<_> = c.quadratic.iter().copied().collect();
        if !seen.insert((row.clone(), c.constant, quad.clone())) {
            continue;
        }
        let r = matrix.num_rows();
        matrix.push_row(row);
        rhs.push(c.constant);
        nonlinear_terms.extend(quad.into_iter().map(|q| (r, q)));
    }
    EquationSystem {
        matrix,
        rhs: BitVec::from_bools(&rhs),
        var_map: vars.to_vec(),
        nonlinear_terms,
    }
}

impl EquationSystem {
    pub fn num_vars(&self) -> usize {
        self.var_map.len()
    }

    pub fn is_linear(&self) -> bool {
        self.nonlinear_terms.is_empty()
    }

    /// The maximal subsystem of rows without degree-two terms.
    pub fn linear_subsystem(&self) -> EquationSystem {
        let nonlinear_rows: BTreeSet<usize> = self.nonlinear_terms.iter().map(|&(r, _)| r).collect();
        let mut matrix = BitMatrix::new(self.num_vars());
        let mut rhs = Vec::new();
        for r in 0..self.matrix.num_rows() {
            if !nonlinear_rows.contains(&r) {
                matrix.push_row(self.matrix.row(r).clone());
                rhs.push(self.rhs.get(r));
            }
        }
        EquationSystem {
            matrix,
            rhs: BitVec::from_bools(&rhs),
            var_map: self.var_map.clone(),
            nonlinear_terms: Vec::new(),
        }
    }

    /// Evaluates every equation (including degree-two terms) at `a`.
    pub fn satisfied_by(&self, a: &BitVec) -> bool {
        let mut lhs: Vec<bool> = self.matrix.rows().iter().map(|r| r.dot(a)).collect();
        for &(r, (x, y)) in &self.nonlinear_terms {
            if a.get(x) && a.get(y) {
                lhs[r] = !lhs[r];
            }
        }
        lhs.iter().enumerate().all(|(r, &v)| v == self.rhs.get(r))
    }
}

/// Solutions `base + span(kernel_basis)` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub base: BitVec,
    pub kernel_basis: Vec<BitVec>,
}

impl SolutionSet {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }

    /// The `index`-th element of the affine space: bit `b` of `index`
    /// selects kernel basis vector `b`.
    pub fn element(&self, index: u64) -> BitVec {
        let mut a = self.base.clone();
        for (b, k) in self.kernel_basis.iter().enumerate() {
            if index >> b & 1 == 1 {
                a.xor_assign(k);
            }
        }
        a
    }
}

/// Gaussian elimination with pivots left to right and free variables zero.
pub fn solve(system: &EquationSystem) -> Result<SolutionSet> {
    if !system.is_linear() {
        return Err(Error::Nonlinear);
    }
    let sol = system.matrix.solve(&system.rhs).ok_or(Error::NoLift)?;
    Ok(SolutionSet {
        base: sol.base,
        kernel_basis: sol.kernel,
    })
}

/// Everything needed to lift one quotient complex.
#[derive(Clone, Debug)]
pub struct LiftProblem {
    pub name: String,
    pub gradings: Gradings,
    pub hv: HvMatrix,
    pub placeholders: Vec<Placeholder>,
    pub system: EquationSystem,
}

impl LiftProblem {
    pub fn new(qc: &QuotientComplex) -> Result<Self> {
        qc.ensure_valid()?;
        let gradings = qc.gradings();
        let hv = build_hv(qc)?;
        let placeholders = placeholders(&gradings);
        let system = square_to_system(&hv, &placeholders);
        if placeholders_never_compose(&gradings) {
            assert!(
                system.is_linear(),
                "{}: degree-two terms although no two placeholders can compose",
                qc.name
            );
        }
        debug!(
            "{}: {} placeholders, {} equations, linear={}",
            qc.name,
            placeholders.len(),
            system.matrix.num_rows(),
            system.is_linear()
        );
        Ok(LiftProblem {
            name: qc.name.clone(),
            gradings,
            hv,
            placeholders,
            system,
        })
    }

    /// Solves the system, or its maximal linear subsystem when degree-two
    /// terms are present.
    pub fn solve(&self) -> Result<SolutionSet> {
        if self.system.is_linear() {
            solve(&self.system)
        } else {
            solve(&self.system.linear_subsystem())
        }
    }

    /// The complex `H + V + D_var(a)`.
    pub fn complex(&self, assignment: &BitVec) -> FullComplex {
        let mut entries = self.hv.entries.clone();
        entries.extend(
            self.placeholders
                .iter()
                .filter(|p| assignment.get(p.var_index))
                .map(|p| DiffEntry {
                    target: p.target,
                    source: p.source,
                    u_exponent: p.u_exponent,
                }),
        );
        let generators = (0..self.gradings.len())
            .map(|id| crate::model::Generator {
                id,
                maslov: self.gradings.maslov[id],
                alexander: self.gradings.alexander[id],
            })
            .collect();
        FullComplex::new(self.name.clone(), generators, entries)
    }

    /// All lifts `H + V + D_var(a)` for `a` in `base + ker A` whose square
    /// vanishes, in index order.
    pub fn enumerate<'a>(
        &'a self,
        solutions: &'a SolutionSet,
        max_kernel_dim: usize,
    ) -> Result<impl Iterator<Item = Lift> + 'a> {
        let dim = solutions.kernel_dim();
        if dim > max_kernel_dim || dim >= 64 {
            return Err(Error::KernelTooLarge {
                dim,
                cap: max_kernel_dim,
            });
        }
        Ok(self.enumerate_indices(solutions, dim))
    }

    /// Lifts indexed below `2^bits`: the full space when `bits` reaches the
    /// kernel dimension, otherwise the sub-space spanned by the first
    /// `bits` kernel vectors.
    pub fn enumerate_sample<'a>(&'a self, solutions: &'a SolutionSet, bits: usize) -> impl Iterator<Item = Lift> + 'a {
        self.enumerate_indices(solutions, bits.min(solutions.kernel_dim()).min(63))
    }

    fn enumerate_indices<'a>(&'a self, solutions: &'a SolutionSet, bits: usize) -> impl Iterator<Item = Lift> + 'a {
        (0..1u64 << bits).filter_map(move |index| {
            let assignment = solutions.element(index);
            let complex = self.complex(&assignment);
            complex.is_differential().then_some(Lift {
                index,
                assignment,
                complex,
            })
        })
    }
}

/// One verified lift: `complex` squares to zero.
#[derive(Clone, Debug)]
pub struct Lift {
    pub index: u64,
    pub assignment: BitVec,
    pub complex: FullComplex,
}

/// The lift for the particular solution, for inputs of thickness at most one.
pub fn lift(qc: &QuotientComplex) -> Result<FullComplex> {
    let stats = qc.derived_stats()?;
    if stats.thickness > 1 {
        return Err(Error::ThicknessTooLarge(stats.thickness));
    }
    let problem = LiftProblem::new(qc)?;
    let sol = problem.solve()?;
    let c = problem.complex(&sol.base);
    assert!(c.is_differential(), "{}: solver output does not square to zero", qc.name);
    Ok(c)
}

/// Enumerates every lift of `qc` up to the kernel cap.
pub fn enumerate_lifts(qc: &QuotientComplex, max_kernel_dim: usize) -> Result<Vec<Lift>> {
    let problem = LiftProblem::new(qc)?;
    let sol = problem.solve()?;
    let lifts = problem.enumerate(&sol, max_kernel_dim)?.collect();
    Ok(lifts)
}
