//! Linear algebra over GF(2).
//!
//! Matrices are stored as sorted row supports; elimination runs on a
//! word-packed copy. Pivots are chosen by lowest column first and lowest
//! remaining row second, so ranks, kernels and particular solutions are
//! reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A length-`len` binary vector stored as its sorted support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryVector {
    len: usize,
    support: Vec<usize>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, support: Vec::new() }
    }

    /// Builds a vector from an arbitrary list of positions. The list is sorted;
    /// repeated positions are rejected rather than cancelled.
    pub fn new(len: usize, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        for w in support.windows(2) {
            if w[0] == w[1] {
                return Err(Error::invalid(format!("duplicate position {}", w[0])));
            }
        }
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Error::IndexOutOfRange { index: last, len });
            }
        }
        Ok(Self { len, support })
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let support = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        Self { len: bits.len(), support }
    }

    pub(crate) fn from_sorted_unchecked(len: usize, support: Vec<usize>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(support.last().is_none_or(|&i| i < len));
        Self { len, support }
    }

    pub(crate) fn from_words(len: usize, words: &[u64]) -> Self {
        let mut support = Vec::new();
        for (wi, &w) in words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                let idx = wi * WORD + b;
                if idx < len {
                    support.push(idx);
                }
                w &= w - 1;
            }
        }
        Self { len, support }
    }

    pub(crate) fn to_words(&self) -> Vec<u64> {
        let mut words = vec![0u64; words_for(self.len)];
        for &i in &self.support {
            words[i / WORD] |= 1 << (i % WORD);
        }
        words
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = vec![false; self.len];
        for &i in &self.support {
            bits[i] = true;
        }
        bits
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch { expected: self.len, found: other.len });
        }
        Ok(())
    }

    /// Sum over GF(2) (symmetric difference of supports).
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let (a, b) = (&self.support, &other.support);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Self { len: self.len, support: out })
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(sorted_intersection_len(&self.support, &other.support) % 2 == 1)
    }
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Sparse binary matrix: one sorted column list per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
}

impl BinaryMatrix {
    /// Validates and normalises row supports (sorted, distinct, in range).
    pub fn new(cols: usize, row_support: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows_out = Vec::with_capacity(row_support.len());
        for row in row_support {
            rows_out.push(BinaryVector::new(cols, row)?.support);
        }
        Ok(Self { rows: rows_out.len(), cols, row_support: rows_out })
    }

    pub(crate) fn from_rows_unchecked(cols: usize, row_support: Vec<Vec<usize>>) -> Self {
        debug_assert!(row_support
            .iter()
            .all(|r| r.windows(2).all(|w| w[0] < w[1]) && r.last().is_none_or(|&c| c < cols)));
        Self { rows: row_support.len(), cols, row_support }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_support: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, row_support: (0..n).map(|i| vec![i]).collect() }
    }

    /// Rows of 0/1 values. All rows must have the same length.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let cols = dense.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(dense.len());
        for row in dense {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            let mut support = Vec::new();
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => support.push(c),
                    other => return Err(Error::invalid(format!("entry {other} is not a bit"))),
                }
            }
            rows.push(support);
        }
        Ok(Self { rows: rows.len(), cols, row_support: rows })
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.row_support
            .iter()
            .map(|r| {
                let mut row = vec![0u8; self.cols];
                for &c in r {
                    row[c] = 1;
                }
                row
            })
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_support[i]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_support
    }

    pub fn row_vector(&self, i: usize) -> BinaryVector {
        BinaryVector::from_sorted_unchecked(self.cols, self.row_support[i].clone())
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_support[r].binary_search(&c).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.row_support.iter().all(Vec::is_empty)
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.row_support.iter().map(Vec::len).collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for r in &self.row_support {
            for &c in r {
                w[c] += 1;
            }
        }
        w
    }

    pub fn max_row_weight(&self) -> usize {
        self.row_support.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_column_weight(&self) -> usize {
        self.column_weights().into_iter().max().unwrap_or(0)
    }

    /// For each column, the sorted list of rows containing it.
    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (r, row) in self.row_support.iter().enumerate() {
            for &c in row {
                cols[c].push(r);
            }
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        Self { rows: self.cols, cols: self.rows, row_support: self.column_supports() }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let rows = self
            .row_support
            .iter()
            .zip(&other.row_support)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&c| c + self.cols)).collect())
            .collect();
        Ok(Self::from_rows_unchecked(self.cols + other.cols, rows))
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let mut rows = self.row_support.clone();
        rows.extend(other.row_support.iter().cloned());
        Ok(Self::from_rows_unchecked(self.cols, rows))
    }

    /// `M x` over GF(2).
    pub fn mul_vec(&self, x: &BinaryVector) -> Result<BinaryVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        let support = self
            .row_support
            .iter()
            .enumerate()
            .filter(|(_, row)| sorted_intersection_len(row, x.support()) % 2 == 1)
            .map(|(i, _)| i)
            .collect();
        Ok(BinaryVector::from_sorted_unchecked(self.rows, support))
    }

    /// `self · otherᵀ` over GF(2).
    pub fn mul_transpose(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let rows = self
            .row_support
            .iter()
            .map(|a| {
                other
                    .row_support
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| sorted_intersection_len(a, b) % 2 == 1)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        Ok(Self::from_rows_unchecked(other.rows, rows))
    }

    /// Kronecker product with row-major block order:
    /// entry `(a_r·B.rows + b_r, a_c·B.cols + b_c) = A[a_r,a_c]·B[b_r,b_c]`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut rows = Vec::with_capacity(self.rows * other.rows);
        for a in &self.row_support {
            for b in &other.row_support {
                let mut row = Vec::with_capacity(a.len() * b.len());
                for &ac in a {
                    for &bc in b {
                        row.push(ac * other.cols + bc);
                    }
                }
                rows.push(row);
            }
        }
        Self::from_rows_unchecked(self.cols * other.cols, rows)
    }

    /// Restriction to the given row and column subsets. Columns are
    /// renumbered by their position in `cols`, which must be sorted.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        debug_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        let out = rows
            .iter()
            .map(|&r| {
                self.row_support[r]
                    .iter()
                    .filter_map(|c| cols.binary_search(c).ok())
                    .collect()
            })
            .collect();
        Self::from_rows_unchecked(cols.len(), out)
    }

    pub(crate) fn to_bits(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.cols);
        for (r, row) in self.row_support.iter().enumerate() {
            for &c in row {
                m.set(r, c);
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        Echelon::reduce(self.to_bits(), self.cols).pivots.len()
    }

    /// Basis of `{x : M x = 0}`, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<BinaryVector> {
        let ech = Echelon::reduce(self.to_bits(), self.cols);
        ech.kernel_basis_words()
            .into_iter()
            .map(|w| BinaryVector::from_words(self.cols, &w))
            .collect()
    }

    pub fn in_rowspace(&self, x: &BinaryVector) -> Result<bool> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok(RowSpace::new(self).contains(x))
    }

    /// Some `x` with `M x = s`, or `None` if the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve_consistent(&self, s: &BinaryVector) -> Result<Option<BinaryVector>> {
        if s.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: s.len() });
        }
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for (r, row) in self.row_support.iter().enumerate() {
            for &c in row {
                aug.set(r, c);
            }
        }
        for &r in s.support() {
            aug.set(r, self.cols);
        }
        let ech = Echelon::reduce(aug, self.cols);
        let rank = ech.pivots.len();
        if (rank..self.rows).any(|r| ech.matrix.get(r, self.cols)) {
            return Ok(None);
        }
        let support: Vec<usize> = ech
            .pivots
            .iter()
            .enumerate()
            .filter(|&(i, _)| ech.matrix.get(i, self.cols))
            .map(|(_, &c)| c)
            .collect();
        let mut support = support;
        support.sort_unstable();
        Ok(Some(BinaryVector::from_sorted_unchecked(self.cols, support)))
    }
}

/// Row-major word-packed matrix used for elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols).max(1);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    #[inline]
    pub(crate) fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / WORD] >> (c % WORD) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / WORD] |= 1 << (c % WORD);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * self.stride);
        head[lo * self.stride..(lo + 1) * self.stride].swap_with_slice(&mut tail[..self.stride]);
    }

    /// `row[dst] ^= row[src]`, touching words from `from_word` on.
    #[inline]
    fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (src_slice, dst_slice) = if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            (&head[src * s..(src + 1) * s], &mut tail[..s])
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            (&tail[..s], &mut head[dst * s..(dst + 1) * s])
        };
        for (d, v) in dst_slice[from_word..].iter_mut().zip(&src_slice[from_word..]) {
            *d ^= v;
        }
    }
}

/// Reduced row echelon form. Rows `0..pivots.len()` are the nonzero rows;
/// row `i` has its leading one in column `pivots[i]`.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub(crate) matrix: BitMatrix,
    pub(crate) pivots: Vec<usize>,
}

impl Echelon {
    /// Reduces `m` in place, choosing pivots only among the first
    /// `pivot_cols` columns (trailing columns ride along, e.g. a right-hand side).
    pub(crate) fn reduce(mut m: BitMatrix, pivot_cols: usize) -> Self {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..pivot_cols.min(m.cols) {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, next);
            let w = c / WORD;
            for r in 0..m.rows {
                if r != next && m.get(r, c) {
                    m.xor_row_into(next, r, w);
                }
            }
            pivots.push(c);
            next += 1;
        }
        Self { matrix: m, pivots }
    }

    pub(crate) fn kernel_basis_words(&self) -> Vec<Vec<u64>> {
        let cols = self.matrix.cols;
        let mut is_pivot = vec![false; cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let stride = words_for(cols).max(1);
        (0..cols)
            .filter(|&c| !is_pivot[c])
            .map(|f| {
                let mut x = vec![0u64; stride];
                x[f / WORD] |= 1 << (f % WORD);
                for (i, &p) in self.pivots.iter().enumerate() {
                    if self.matrix.get(i, f) {
                        x[p / WORD] |= 1 << (p % WORD);
                    }
                }
                x
            })
            .collect()
    }
}

/// Precomputed row space of a matrix for repeated membership queries.
#[derive(Clone, Debug)]
pub struct RowSpace {
    echelon: Echelon,
}

impl RowSpace {
    pub fn new(m: &BinaryMatrix) -> Self {
        Self { echelon: Echelon::reduce(m.to_bits(), m.cols()) }
    }

    pub fn cols(&self) -> usize {
        self.echelon.matrix.cols
    }

    pub fn rank(&self) -> usize {
        self.echelon.pivots.len()
    }

    pub fn contains(&self, x: &BinaryVector) -> bool {
        assert_eq!(x.len(), self.cols(), "vector length must match column count");
        let mut w = x.to_words();
        w.resize(self.echelon.matrix.stride, 0);
        self.contains_words(&mut w)
    }

    /// Reduces `x` against the pivot rows; `x` is clobbered.
    pub(crate) fn contains_words(&self, x: &mut [u64]) -> bool {
        for (i, &p) in self.echelon.pivots.iter().enumerate() {
            if x[p / WORD] >> (p % WORD) & 1 == 1 {
                let from = p / WORD;
                for (d, v) in x[from..].iter_mut().zip(&self.echelon.matrix.row(i)[from..]) {
                    *d ^= v;
                }
            }
        }
        x.iter().all(|&w| w == 0)
    }
}
