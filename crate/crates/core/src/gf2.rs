//! Bit-packed linear algebra over the two-element field.

use std::fmt;

const WORD: usize = 64;

/// A vector over GF(2), packed 64 coordinates per word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_ones(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the coordinatewise product.
    pub fn dot(&self, other: &BitVec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Index of the lowest set coordinate.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major dense matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Result of solving `A x = b`: a particular solution with free variables
/// set to zero, plus a basis of the kernel of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub base: BitVec,
    pub kernel: Vec<BitVec>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix { cols, rows }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols);
        BitVec::from_bools(&self.rows.iter().map(|r| r.dot(x)).collect::<Vec<_>>())
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t: Vec<BitVec> = (0..self.cols).map(|_| BitVec::zeros(self.rows.len())).collect();
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t[c].set(r, true);
            }
        }
        BitMatrix {
            cols: self.rows.len(),
            rows: t,
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.num_rows());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVec::zeros(other.cols);
                for k in row.ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        BitMatrix {
            cols: other.cols,
            rows,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut span = Span::new(self.cols);
        self.rows.iter().filter(|r| span.insert(r).is_none()).count()
    }

    /// Reduced row echelon form in place; returns the pivot column of each
    /// nonzero row, chosen left to right.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(r, p);
            let pivot = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.rows.truncate(r);
        pivots
    }

    /// Solves `self * x = rhs`. Returns `None` when inconsistent.
    pub fn solve(&self, rhs: &BitVec) -> Option<AffineSolution> {
        assert_eq!(rhs.len(), self.rows.len());
        let n = self.cols;
        // augmented column sits at index n
        let mut aug = BitMatrix::new(n + 1);
        for (row, b) in self.rows.iter().zip(rhs.to_bools()) {
            let mut a = BitVec::zeros(n + 1);
            for c in row.ones() {
                a.set(c, true);
            }
            a.set(n, b);
            aug.push_row(a);
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&n) {
            return None;
        }
        let mut base = BitVec::zeros(n);
        for (row, &p) in aug.rows.iter().zip(&pivots) {
            base.set(p, row.get(n));
        }
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let kernel = (0..n)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(n);
                v.set(f, true);
                for (row, &p) in aug.rows.iter().zip(&pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        Some(AffineSolution { base, kernel })
    }

    pub fn kernel(&self) -> Vec<BitVec> {
        self.solve(&BitVec::zeros(self.rows.len()))
            .expect("homogeneous systems are consistent")
            .kernel
    }
}

/// An incrementally built span with echelon rows keyed by lowest set bit.
///
/// Each stored row carries a tag recording which inserted vectors were
/// combined to produce it, so membership queries also return coordinates.
#[derive(Clone, Debug)]
pub struct Span {
    len: usize,
    /// pivot -> (row, tag); row has lowest set bit `pivot`
    rows: std::collections::BTreeMap<usize, (BitVec, Vec<usize>)>,
    inserted: usize,
}

impl Span {
    pub fn new(len: usize) -> Self {
        Span {
            len,
            rows: Default::default(),
            inserted: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the span. Returns the remainder and the indices
    /// (in insertion order) of inserted vectors whose sum was subtracted.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, Vec<usize>) {
        assert_eq!(v.len(), self.len);
        let mut v = v.clone();
        let mut tag: Vec<usize> = Vec::new();
        let mut from = 0;
        while let Some(p) = next_one_from(&v, from) {
            match self.rows.get(&p) {
                Some((row, t)) => {
                    v.xor_assign(row);
                    xor_tags(&mut tag, t);
                }
                None => from = p + 1,
            }
        }
        (v, tag)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts `v`. Returns `None` if `v` was independent of the span;
    /// otherwise the combination of earlier insertions equal to `v`.
    pub fn insert(&mut self, v: &BitVec) -> Option<Vec<usize>> {
        let idx = self.inserted;
        self.inserted += 1;
        let (rem, mut tag) = self.reduce(v);
        match rem.first_one() {
            Some(p) => {
                xor_tags(&mut tag, &[idx]);
                self.rows.insert(p, (rem, tag));
                None
            }
            None => Some(tag),
        }
    }
}

fn next_one_from(v: &BitVec, from: usize) -> Option<usize> {
    if from >= v.len {
        return None;
    }
    let mut wi = from / WORD;
    let mut w = v.words[wi] & (!0u64 << (from % WORD));
    loop {
        if w != 0 {
            return Some(wi * WORD + w.trailing_zeros() as usize);
        }
        wi += 1;
        if wi == v.words.len() {
            return None;
        }
        w = v.words[wi];
    }
}

/// Symmetric difference of two sorted index lists, written into `acc`.
fn xor_tags(acc: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(acc.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < other.len() {
        match acc[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(acc[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&acc[i..]);
    out.extend_from_slice(&other[j..]);
    *acc = out;
}
