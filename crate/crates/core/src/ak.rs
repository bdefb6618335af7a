//! Homology of the large-surgery subquotients `A_k^+` as graded F[U]-modules.
//!
//! `A_k^+` is the homology of the quotient `C{i >= 0 or j >= k}` of CFK^∞,
//! which has infinitely many generators. The finite quotient
//! `C{i < 0 and j >= k}` has homology `T_{-2V_k}|<=-2 ⊕ A_k^red`, so it
//! carries all of the reduced part. The tower part is pinned, when needed,
//! by a second finite model `C{(i >= 0 or j >= k) and i <= N}` whose
//! homology is `T_{-2V_k}|<=2N ⊕ A_k^red`.
//!
//! Gradings: the element `U^{-i} x` sits at lattice point `(i, A(x) + i)`
//! with Maslov grading `M(x) + 2i`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, Span};
use crate::model::FullComplex;

/// The element `U^{-u_shift} gen` of a finite region of CFK^∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TruncatedBasisElement {
    pub gen: usize,
    pub u_shift: i64,
    pub grading: i64,
}

/// Basis of `C{i < 0 and j >= k}`, ordered by generator then `i`.
pub fn truncated_basis(fc: &FullComplex, k: i64) -> Vec<TruncatedBasisElement> {
    region_basis(fc, k, -1, |a, i| i < 0 && a + i >= k)
}

/// Basis of `C{(i >= 0 or j >= k) and i <= n}`.
fn fallback_basis(fc: &FullComplex, k: i64, n: i64) -> Vec<TruncatedBasisElement> {
    region_basis(fc, k, n, |a, i| (i >= 0 || a + i >= k) && i <= n)
}

/// Region members with `i <= i_max`; every region considered lies in
/// `i >= min(0, k - A)`.
fn region_basis(fc: &FullComplex, k: i64, i_max: i64, member: impl Fn(i64, i64) -> bool) -> Vec<TruncatedBasisElement> {
    let mut out = Vec::new();
    for (gen, g) in fc.generators.iter().enumerate() {
        for i in (k - g.alexander).min(0)..=i_max {
            if member(g.alexander, i) {
                out.push(TruncatedBasisElement {
                    gen,
                    u_shift: i,
                    grading: g.maslov + 2 * i,
                });
            }
        }
    }
    out
}

fn index_of(basis: &[TruncatedBasisElement]) -> HashMap<(usize, i64), usize> {
    basis.iter().enumerate().map(|(n, b)| ((b.gen, b.u_shift), n)).collect()
}

/// Sparse columns of the differential on a region: an entry `U^e` at
/// (target, source) sends `(source, i)` to `(target, i - e)`, dropped when
/// the target lies outside the region.
fn region_columns(fc: &FullComplex, basis: &[TruncatedBasisElement]) -> Vec<Vec<usize>> {
    let index = index_of(basis);
    let adj = fc.adjacency();
    basis
        .iter()
        .map(|b| {
            let mut col: Vec<usize> = adj[b.gen]
                .iter()
                .filter_map(|&(t, e)| index.get(&(t, b.u_shift - e as i64)).copied())
                .collect();
            col.sort_unstable();
            col
        })
        .collect()
}

/// The differential of `C{i < 0 and j >= k}` in the given basis; row is the
/// target, column the source.
pub fn truncated_differential(fc: &FullComplex, basis: &[TruncatedBasisElement]) -> BitMatrix {
    let m = basis.len();
    let mut rows = vec![BitVec::zeros(m); m];
    for (s, col) in region_columns(fc, basis).iter().enumerate() {
        for &t in col {
            rows[t].flip(s);
        }
    }
    BitMatrix::from_rows(m, rows)
}

/// Homology of a finite graded complex with its U-action.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedHomology {
    /// `h_d`, nonzero entries only.
    pub dims: BTreeMap<i64, usize>,
    /// `U_d : H_d -> H_{d-2}` as a `h_{d-2} x h_d` matrix, for every `d`
    /// with `h_d > 0`.
    pub u_action: BTreeMap<i64, BitMatrix>,
    /// Cycle representatives of the chosen basis of `H_d`, as sets of
    /// basis-element indices.
    pub representatives: BTreeMap<i64, Vec<Vec<usize>>>,
}

/// Number of summands `F_{top}[U]/U^length` by `(top, length)`.
pub type Summands = BTreeMap<(i64, u32), usize>;

fn zero_matrix(rows: usize, cols: usize) -> BitMatrix {
    BitMatrix::from_rows(cols, vec![BitVec::zeros(cols); rows])
}

fn column_space_rank(vectors: &[BitVec], len: usize) -> usize {
    let mut span = Span::new(len);
    vectors.iter().filter(|v| span.insert(v).is_none()).count()
}

impl GradedHomology {
    /// The module `⊕ F_{top}[U]/U^length`, without representatives.
    pub fn from_summands(summands: &[(i64, u32)]) -> Self {
        // basis of each grading: one vector per summand passing through it
        let mut slots: BTreeMap<i64, Vec<(usize, u32)>> = BTreeMap::new();
        for (s, &(top, len)) in summands.iter().enumerate() {
            for step in 0..len {
                slots.entry(top - 2 * step as i64).or_default().push((s, step));
            }
        }
        let mut gh = GradedHomology::default();
        for (&d, here) in &slots {
            gh.dims.insert(d, here.len());
            let below = slots.get(&(d - 2)).map(Vec::as_slice).unwrap_or(&[]);
            let mut u = zero_matrix(below.len(), here.len());
            let mut rows: Vec<BitVec> = u.rows().to_vec();
            for (c, &(s, step)) in here.iter().enumerate() {
                if let Some(r) = below.iter().position(|&(s2, st2)| s2 == s && st2 == step + 1) {
                    rows[r].set(c, true);
                }
            }
            u = BitMatrix::from_rows(here.len(), rows);
            gh.u_action.insert(d, u);
        }
        gh
    }

    pub fn dim(&self, d: i64) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// `U_d` as a matrix, zero when either side vanishes.
    pub fn u_matrix(&self, d: i64) -> BitMatrix {
        self.u_action
            .get(&d)
            .cloned()
            .unwrap_or_else(|| zero_matrix(self.dim(d - 2), self.dim(d)))
    }

    /// `U^m : H_d -> H_{d-2m}` as a matrix.
    pub fn u_power(&self, d: i64, m: u32) -> BitMatrix {
        let mut acc = identity(self.dim(d));
        for step in 0..m as i64 {
            acc = self.u_matrix(d - 2 * step).mul(&acc);
        }
        acc
    }

    /// `rank(U^m : H_d -> H_{d-2m})`; `m = 0` gives `h_d`.
    pub fn u_power_rank(&self, d: i64, m: u32) -> usize {
        if self.dim(d) == 0 || self.dim(d - 2 * m as i64) == 0 {
            return 0;
        }
        self.u_power(d, m).rank()
    }

    /// `rank U_d` for every grading with `h_d > 0`.
    pub fn u_ranks(&self) -> BTreeMap<i64, usize> {
        self.dims.keys().map(|&d| (d, self.u_power_rank(d, 1))).collect()
    }

    /// Decomposition into cyclic summands, read off the ranks of powers of U.
    pub fn summands(&self) -> Summands {
        let r = |d: i64, m: u32| -> i64 {
            if m == 0 {
                self.dim(d) as i64
            } else {
                self.u_power_rank(d, m) as i64
            }
        };
        let mut out = Summands::new();
        for &d in self.dims.keys() {
            let mut len = 1u32;
            loop {
                let n = r(d, len - 1) - r(d, len) - r(d + 2, len) + r(d + 2, len + 1);
                debug_assert!(n >= 0, "negative summand count at ({d}, {len})");
                if n > 0 {
                    out.insert((d, len), n as usize);
                }
                if r(d, len) == 0 {
                    break;
                }
                len += 1;
            }
        }
        out
    }
}

fn identity(n: usize) -> BitMatrix {
    BitMatrix::from_rows(n, (0..n).map(|i| BitVec::from_ones(n, [i])).collect())
}

/// `count_1(d) = dim ker U_d - dim(ker U_d ∩ im U_{d+2})`: the number of
/// length-one summands `F_d` in any decomposition.
pub fn count_length_one(gh: &GradedHomology) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for (&d, &h) in &gh.dims {
        let ker = gh.u_matrix(d).kernel();
        let im: Vec<BitVec> = gh.u_matrix(d + 2).transpose().rows().to_vec();
        let dim_im = column_space_rank(&im, h);
        let mut both = ker.clone();
        both.extend(im);
        let dim_sum = column_space_rank(&both, h);
        // dim ker - dim(ker ∩ im) = dim(ker + im) - dim im
        let n = dim_sum - dim_im;
        if n > 0 {
            out.insert(d, n);
        }
    }
    out
}

/// Homology with U-action of the complex with sparse columns `cols`, where
/// `u_map` sends each basis element to its U-translate (or `None`).
fn sparse_homology(
    basis: &[TruncatedBasisElement],
    cols: &[Vec<usize>],
    u_map: &[Option<usize>],
) -> GradedHomology {
    let mut by_grading: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut local = vec![0usize; basis.len()];
    for (n, b) in basis.iter().enumerate() {
        let v = by_grading.entry(b.grading).or_default();
        local[n] = v.len();
        v.push(n);
    }
    let size = |d: i64| by_grading.get(&d).map_or(0, Vec::len);
    let image = |n: usize, targets: &dyn Fn(usize) -> Vec<usize>, d: i64| {
        BitVec::from_ones(size(d), targets(n).into_iter().map(|t| local[t]))
    };

    struct Level {
        span: Span,
        // insertion index -> position among representatives
        rep_slot: HashMap<usize, usize>,
        reps: Vec<BitVec>,
    }
    let mut levels: BTreeMap<i64, Level> = BTreeMap::new();
    for (&d, elems) in &by_grading {
        let n = elems.len();
        let mut span = Span::new(n);
        let mut inserted = 0;
        if let Some(above) = by_grading.get(&(d + 1)) {
            for &e in above {
                span.insert(&image(e, &|x| cols[x].clone(), d));
                inserted += 1;
            }
        }
        let below = size(d - 1);
        let mut rows = vec![BitVec::zeros(n); below];
        for (c, &e) in elems.iter().enumerate() {
            for &t in &cols[e] {
                rows[local[t]].flip(c);
            }
        }
        let cycles = BitMatrix::from_rows(n, rows).kernel();
        let mut rep_slot = HashMap::new();
        let mut reps = Vec::new();
        for z in cycles {
            if span.insert(&z).is_none() {
                rep_slot.insert(inserted, reps.len());
                reps.push(z);
            }
            inserted += 1;
        }
        if !reps.is_empty() {
            levels.insert(d, Level { span, rep_slot, reps });
        }
    }

    let mut gh = GradedHomology::default();
    for (&d, level) in &levels {
        gh.dims.insert(d, level.reps.len());
        gh.representatives.insert(
            d,
            level
                .reps
                .iter()
                .map(|z| z.ones().map(|j| by_grading[&d][j]).collect())
                .collect(),
        );
        let target = levels.get(&(d - 2));
        let h_below = target.map_or(0, |t| t.reps.len());
        let mut rows = vec![BitVec::zeros(level.reps.len()); h_below];
        if let Some(t) = target {
            for (c, z) in level.reps.iter().enumerate() {
                let mut uz = BitVec::zeros(size(d - 2));
                for j in z.ones() {
                    if let Some(x) = u_map[by_grading[&d][j]] {
                        uz.flip(local[x]);
                    }
                }
                let (rem, tag) = t.span.reduce(&uz);
                debug_assert!(rem.is_zero(), "U does not preserve cycles");
                for i in tag {
                    if let Some(&r) = t.rep_slot.get(&i) {
                        rows[r].flip(c);
                    }
                }
            }
        }
        gh.u_action.insert(d, BitMatrix::from_rows(level.reps.len(), rows));
    }
    gh
}

fn u_map(basis: &[TruncatedBasisElement]) -> Vec<Option<usize>> {
    let index = index_of(basis);
    basis.iter().map(|b| index.get(&(b.gen, b.u_shift - 1)).copied()).collect()
}

/// Homology of `matrix` (row = target, column = source) over `basis`, with
/// U acting by `U^{-i} x -> U^{-i+1} x` inside the region.
pub fn homology_with_u(matrix: &BitMatrix, basis: &[TruncatedBasisElement]) -> Result<GradedHomology> {
    let m = basis.len();
    if matrix.num_rows() != m || matrix.num_cols() != m {
        return Err(Error::NotADifferential(format!(
            "{}x{} matrix for {m} basis elements",
            matrix.num_rows(),
            matrix.num_cols()
        )));
    }
    let mut cols = vec![Vec::new(); m];
    for (t, row) in matrix.rows().iter().enumerate() {
        for s in row.ones() {
            if basis[t].grading != basis[s].grading - 1 {
                return Err(Error::NotADifferential(format!("entry ({t}, {s}) does not lower the grading by one")));
            }
            cols[s].push(t);
        }
    }
    if !matrix.mul(matrix).is_zero() {
        return Err(Error::NotADifferential("matrix does not square to zero".into()));
    }
    Ok(sparse_homology(basis, &cols, &u_map(basis)))
}

/// `H_*(C{i < 0 and j >= k})` with its U-action.
pub fn truncated_homology(fc: &FullComplex, k: i64) -> GradedHomology {
    let basis = truncated_basis(fc, k);
    let cols = region_columns(fc, &basis);
    sparse_homology(&basis, &cols, &u_map(&basis))
}

fn alexander_span(fc: &FullComplex) -> i64 {
    let a = fc.generators.iter().map(|g| g.alexander);
    a.clone().max().unwrap_or(0) - a.min().unwrap_or(0)
}

/// Smallest truncation height accepted by [`ak_truncated_model`].
pub fn fallback_bound(fc: &FullComplex, k: i64) -> i64 {
    alexander_span(fc) + k.abs() + 2
}

/// Homology of `C{(i >= 0 or j >= k) and i <= n}`, isomorphic to
/// `T_{-2V_k}|<=2n ⊕ A_k^red`.
pub fn ak_truncated_model(fc: &FullComplex, k: i64, n: i64) -> Result<GradedHomology> {
    let required = fallback_bound(fc, k);
    if n < required {
        return Err(Error::TruncationTooSmall { given: n, required });
    }
    let basis = fallback_basis(fc, k, n);
    let cols = region_columns(fc, &basis);
    Ok(sparse_homology(&basis, &cols, &u_map(&basis)))
}

/// The tower of the fallback model and the remaining summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FallbackSplit {
    pub v_k: u32,
    pub reduced: Summands,
}

/// Splits the fallback homology into its tower (the summand reaching the
/// artificial top `2n`) and `A_k^red`.
pub fn split_fallback(gh: &GradedHomology, n: i64) -> Result<FallbackSplit> {
    let mut reduced = gh.summands();
    let tower: Vec<(i64, u32)> = reduced.keys().filter(|(top, _)| *top == 2 * n).copied().collect();
    if tower.len() != 1 || reduced[&tower[0]] != 1 {
        return Err(Error::Invalid(format!("expected one tower with top {}, found {tower:?}", 2 * n)));
    }
    let (top, len) = tower[0];
    reduced.remove(&tower[0]);
    let bottom = top - 2 * (len as i64 - 1);
    let v_k = if bottom <= 0 { (-bottom / 2) as u32 } else { 0 };
    Ok(FallbackSplit { v_k, reduced })
}

/// `V_k` from the fallback model; `n` defaults to [`fallback_bound`].
pub fn v_k(fc: &FullComplex, k: i64, n: Option<i64>) -> Result<u32> {
    let n = n.unwrap_or_else(|| fallback_bound(fc, k));
    Ok(split_fallback(&ak_truncated_model(fc, k, n)?, n)?.v_k)
}

/// The summands `T_{-2V}|<=-2 ⊕ reduced` predicted for the truncated region.
pub fn predicted_truncated(split: &FallbackSplit) -> Summands {
    let mut out = split.reduced.clone();
    if split.v_k > 0 {
        *out.entry((-2, split.v_k)).or_default() += 1;
    }
    out
}

/// Parameters of the structure lemmas matched by a computed module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureParams {
    /// Bottom `c` of the lower tower `T_c|<=-2`.
    pub lower_tower_bottom: i64,
    /// Top of `T_{2k}|<=top`; below `2k` means the summand is absent.
    pub tower_top: i64,
    /// Copies of `F_{k+ρ-1}[U]/U^2` (thickness two only).
    pub r: usize,
    pub a: usize,
    pub b: usize,
    /// Copies of `F_{k+ρ-3}` (thickness two only).
    pub c: usize,
}

/// Checks the truncated-region module against the shape forced by the
/// structure lemmas for thickness at most two, where `rho = max (M - A)`.
/// Returns the first matching parameter assignment.
pub fn structure_conformance(summands: &Summands, k: i64, rho: i64, thickness: i64) -> Option<StructureParams> {
    let s = k + rho;
    let (bottoms, tops): (Vec<i64>, Vec<i64>) = match thickness {
        0 | 1 => {
            let eps = (s - 1).rem_euclid(2);
            let eta = (s - 2).rem_euclid(2);
            (vec![s - 1 - eps, s - 1 + eps], vec![s - 2 - eta, s - 2 + eta])
        }
        2 => {
            let eta = 1 + s.rem_euclid(2);
            (vec![s - eta - 1, s - eta + 1], vec![s - 3, s - 1])
        }
        _ => return None,
    };
    for &c0 in &bottoms {
        let c = c0.min(0);
        if c % 2 != 0 {
            continue;
        }
        for &l in &tops {
            // T_2k|<=l ends in the largest even degree <= l
            let top = l - l.rem_euclid(2);
            let mut rest = summands.clone();
            let mut take = |key: (i64, u32)| -> bool {
                match rest.get_mut(&key) {
                    Some(n) => {
                        *n -= 1;
                        if *n == 0 {
                            rest.remove(&key);
                        }
                        true
                    }
                    None => false,
                }
            };
            if c <= -2 && !take((-2, ((-2 - c) / 2 + 1) as u32)) {
                continue;
            }
            if top >= 2 * k && !take((top, ((top - 2 * k) / 2 + 1) as u32)) {
                continue;
            }
            let mut p = StructureParams {
                lower_tower_bottom: c,
                tower_top: top,
                r: 0,
                a: 0,
                b: 0,
                c: 0,
            };
            let fits = rest.iter().all(|(&(d, len), &n)| match (len, d - s) {
                (1, -1) => {
                    p.a = n;
                    true
                }
                (1, -2) => {
                    p.b = n;
                    true
                }
                (1, -3) if thickness == 2 => {
                    p.c = n;
                    true
                }
                (2, -1) if thickness == 2 => {
                    p.r = n;
                    true
                }
                _ => false,
            });
            if fits {
                return Some(p);
            }
        }
    }
    None
}

/// Chain-level test at `k = ρ - 3` for thickness one: with classes in
/// gradings `2ρ-4` and `2ρ-6`, the module has property SpliFf iff U of some
/// representative in grading `2ρ-4` is not a boundary. `None` when the
/// test does not apply (one of the gradings is empty).
pub fn bprime_test(fc: &FullComplex, rho: i64) -> Option<bool> {
    let k = rho - 3;
    let basis = truncated_basis(fc, k);
    let d = truncated_differential(fc, &basis);
    let gh = homology_with_u(&d, &basis).expect("region differential is valid");
    let (hi, lo) = (2 * rho - 4, 2 * rho - 6);
    if gh.dim(hi) == 0 || gh.dim(lo) == 0 {
        return None;
    }
    let index = index_of(&basis);
    let columns = d.transpose();
    let boundary_rank = d.rank();
    for rep in &gh.representatives[&hi] {
        let mut ub = BitVec::zeros(basis.len());
        for &e in rep {
            if let Some(&t) = index.get(&(basis[e].gen, basis[e].u_shift - 1)) {
                ub.flip(t);
            }
        }
        let mut with = columns.clone();
        with.push_row(ub);
        if with.rank() > boundary_rank {
            return Some(true);
        }
    }
    Some(false)
}

/// Which rule settled a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    HfkShortcut,
    HomologyCount,
    BprimeTest,
    FallbackOracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::HfkShortcut => "hfk_shortcut",
            Method::HomologyCount => "homology_count",
            Method::BprimeTest => "bprime_test",
            Method::FallbackOracle => "fallback_oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummandCount {
    pub top: i64,
    pub length: u32,
    pub count: usize,
}

/// Everything computed for one level `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AkReport {
    pub k: i64,
    pub gradings: BTreeMap<i64, usize>,
    pub u_ranks: BTreeMap<i64, usize>,
    /// Length-one summands of the truncated homology, before removing the
    /// tower bottom.
    pub count_1: BTreeMap<i64, usize>,
    pub summands: Vec<SummandCount>,
    /// Known when the fallback model was consulted.
    pub v_k: Option<u32>,
    pub structure: Option<StructureParams>,
    pub spliff: bool,
    /// Two gradings of equal parity carrying length-one summands of
    /// `A_k^red`, when the level fails.
    pub witness: Option<(i64, i64)>,
    pub method: Method,
}

/// Failure witness: the first two gradings of equal parity with a positive
/// count, even parity first.
pub fn spliff_witness(count_1: &BTreeMap<i64, usize>) -> Option<(i64, i64)> {
    for parity in [0, 1] {
        let ds: Vec<i64> = count_1
            .iter()
            .filter(|&(&d, &n)| n > 0 && d.rem_euclid(2) == parity)
            .map(|(&d, _)| d)
            .collect();
        if ds.len() >= 2 {
            return Some((ds[0], ds[1]));
        }
    }
    None
}

fn thickness_and_rho(fc: &FullComplex) -> (i64, i64) {
    let deltas: Vec<i64> = fc.generators.iter().map(|g| g.delta()).collect();
    let max = deltas.iter().copied().max().unwrap_or(0);
    let min = deltas.iter().copied().min().unwrap_or(0);
    (max - min, max)
}

/// Computes `A_k^+` data at level `k` and decides property SpliFf there.
///
/// The tower bottom at grading -2 is removed from `count_1` when `V_k = 1`;
/// the fallback model is only built when `count_1(-2) > 0`.
pub fn analyze_level(fc: &FullComplex, k: i64, fallback_n: Option<i64>) -> Result<AkReport> {
    let (thickness, rho) = thickness_and_rho(fc);
    let gh = truncated_homology(fc, k);
    let count_1 = count_length_one(&gh);
    let summands = gh.summands();
    let mut reduced = count_1.clone();
    let mut method = Method::HomologyCount;
    let mut vk = None;
    if count_1.get(&-2).copied().unwrap_or(0) > 0 {
        let v = v_k(fc, k, fallback_n)?;
        vk = Some(v);
        method = Method::FallbackOracle;
        if v == 1 {
            let n = reduced.get_mut(&-2).expect("checked above");
            *n -= 1;
            if *n == 0 {
                reduced.remove(&-2);
            }
        }
    }
    let witness = spliff_witness(&reduced);
    Ok(AkReport {
        k,
        gradings: gh.dims.clone(),
        u_ranks: gh.u_ranks(),
        count_1,
        summands: summands
            .iter()
            .map(|(&(top, length), &count)| SummandCount { top, length, count })
            .collect(),
        v_k: vk,
        structure: structure_conformance(&summands, k, rho, thickness),
        spliff: witness.is_none(),
        witness,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiffEntry, Generator};

    fn g(id: usize, maslov: i64, alexander: i64) -> Generator {
        Generator { id, maslov, alexander }
    }

    fn e(target: usize, source: usize, u_exponent: u32) -> DiffEntry {
        DiffEntry { target, source, u_exponent }
    }

    fn unknot() -> FullComplex {
        FullComplex::new("unknot", vec![g(0, 0, 0)], vec![])
    }

    /// Right-handed trefoil: `d x0 = U x1 + x2`.
    fn trefoil() -> FullComplex {
        FullComplex::new("3a1", vec![g(0, -1, 0), g(1, 0, 1), g(2, -2, -1)], vec![e(1, 0, 1), e(2, 0, 0)])
    }

    #[test]
    fn unknot_basis() {
        assert!(truncated_basis(&unknot(), 0).is_empty());
        let b = truncated_basis(&unknot(), -2);
        assert_eq!(b.iter().map(|x| x.u_shift).collect::<Vec<_>>(), vec![-2, -1]);
        assert_eq!(b[0].grading, -4);
        let d = truncated_differential(&unknot(), &[]);
        assert_eq!((d.num_rows(), d.num_cols()), (0, 0));
        assert!(homology_with_u(&d, &[]).unwrap().is_zero());
    }

    #[test]
    fn unknot_fallback_is_one_tower() {
        let gh = ak_truncated_model(&unknot(), 0, 2).unwrap();
        let split = split_fallback(&gh, 2).unwrap();
        assert_eq!(split.v_k, 0);
        assert!(split.reduced.is_empty());
        assert!(matches!(
            ak_truncated_model(&unknot(), 3, 2),
            Err(Error::TruncationTooSmall { given: 2, required: 5 })
        ));
    }

    #[test]
    fn trefoil_level_zero() {
        let t = trefoil();
        let basis = truncated_basis(&t, 0);
        // only U^{1} x1 at i = -1
        assert_eq!(basis.len(), 1);
        let gh = homology_with_u(&truncated_differential(&t, &basis), &basis).unwrap();
        assert_eq!(gh.dims, BTreeMap::from([(-2, 1)]));
        assert_eq!(v_k(&t, 0, None).unwrap(), 1);
        let r = analyze_level(&t, 0, None).unwrap();
        assert!(r.spliff);
        assert_eq!(r.v_k, Some(1));
        assert_eq!(r.method, Method::FallbackOracle);
        assert_eq!(v_k(&t, 1, None).unwrap(), 0);
        assert_eq!(v_k(&t.dual(), 0, None).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_matrices() {
        let b = truncated_basis(&unknot(), -2);
        let bad = BitMatrix::from_rows(2, vec![BitVec::from_ones(2, [1]), BitVec::zeros(2)]);
        assert!(homology_with_u(&bad, &b).is_err());
        assert!(homology_with_u(&BitMatrix::new(3), &b).is_err());
    }

    #[test]
    fn length_one_counts() {
        assert!(count_length_one(&GradedHomology::default()).is_empty());
        let m = GradedHomology::from_summands(&[(0, 1), (2, 1), (2, 1)]);
        assert_eq!(count_length_one(&m), BTreeMap::from([(0, 1), (2, 2)]));
        let m = GradedHomology::from_summands(&[(3, 2)]);
        assert!(count_length_one(&m).is_empty());
        let m = GradedHomology::from_summands(&[(4, 3), (2, 1), (0, 2), (0, 1)]);
        assert_eq!(m.summands(), BTreeMap::from([((4, 3), 1), ((2, 1), 1), ((0, 2), 1), ((0, 1), 1)]));
        assert_eq!(count_length_one(&m), BTreeMap::from([(0, 1), (2, 1)]));
    }

    #[test]
    fn witness_needs_two_of_one_parity() {
        assert_eq!(spliff_witness(&BTreeMap::from([(0, 1), (1, 3)])), None);
        assert_eq!(spliff_witness(&BTreeMap::from([(0, 1), (2, 2), (1, 1)])), Some((0, 2)));
        assert_eq!(spliff_witness(&BTreeMap::from([(-1, 1), (3, 1)])), Some((-1, 3)));
    }

    #[test]
    fn structure_shapes() {
        // thickness one, k + ρ = 3: F_2 ⊕ F_1 plus the tower T_{2k}|<=2 at k=0
        let s = Summands::from([((2, 1), 1), ((1, 1), 2), ((2, 2), 1)]);
        let p = structure_conformance(&s, 0, 3, 1).unwrap();
        assert_eq!((p.a, p.b, p.tower_top), (1, 2, 2));
        // a length-two summand is only allowed at thickness two
        let s = Summands::from([((2, 2), 1)]);
        assert!(structure_conformance(&s, 1, 2, 1).is_none());
        assert_eq!(structure_conformance(&s, 1, 2, 2).unwrap().r, 1);
    }
}
