//! Linear algebra over F_2, packed into `u64` words.
//!
//! The spanning test reduces to "do K sampled vectors span F_2^n", so rank
//! computation is the innermost loop of every Monte-Carlo trial; rows are
//! kept one machine word per 64 columns and eliminated word-at-a-time.
//! Subspaces are always held in reduced row-echelon form, which makes the
//! representation canonical: two spanning sets of the same subspace produce
//! identical [`SubspaceBasis`] values, so equality, hashing and
//! deduplication are structural.

use std::fmt;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

/// Largest subspace dimension [`SubspaceBasis::enumerate`] will expand.
pub const ENUMERATION_GUARD: usize = 24;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector in F_2^len, bit `i` stored at word `i / 64`, bit `i % 64`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Unit vector `e_i`.
    #[must_use]
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Low `len` bits of `bits`, bit 0 first. Requires `len <= 64`.
    #[must_use]
    pub fn from_int(len: usize, bits: u64) -> Self {
        assert!(len <= WORD_BITS);
        let mask = if len == WORD_BITS {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            len,
            words: vec![bits & mask],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// The vector as an integer, bit `i` of the result = coordinate `i`.
    /// Requires `len <= 64`.
    #[must_use]
    pub fn as_int(&self) -> u64 {
        assert!(self.len <= WORD_BITS);
        self.words.first().copied().unwrap_or(0)
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    #[must_use]
    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Standard inner product `x · y` over F_2 (parity of the AND).
    #[must_use]
    pub fn dot(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (w, o) in self.words.iter().zip(&other.words) {
            acc ^= w & o;
        }
        acc.count_ones() % 2 == 1
    }

    /// Index of the lowest set bit, if any.
    #[must_use]
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    /// Concatenation `self ++ other`.
    #[must_use]
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Coordinates `[lo, hi)` as a fresh vector.
    #[must_use]
    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        debug_assert!(lo <= hi && hi <= self.len);
        let mut out = Self::zeros(hi - lo);
        for i in lo..hi {
            if self.get(i) {
                out.set(i - lo, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// Symplectic inner product on F_2^{2n} with `x = (a | b)` split at `n`:
/// `[x, y] = a_x · b_y + b_x · a_y`.
#[must_use]
pub fn symplectic_dot(x: &BitVec, y: &BitVec, n: usize) -> bool {
    debug_assert_eq!(x.len(), 2 * n);
    debug_assert_eq!(y.len(), 2 * n);
    let mut acc = false;
    for i in 0..n {
        acc ^= (x.get(i) & y.get(n + i)) ^ (x.get(n + i) & y.get(i));
    }
    acc
}

/// A dense bit matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols).max(1);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVec]) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.row_words_mut(i).copy_from_slice(&r.words);
        }
        m
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    #[inline]
    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.row_words(r)[c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        let words = self.row_words_mut(r);
        if value {
            words[w] |= mask;
        } else {
            words[w] &= !mask;
        }
    }

    #[must_use]
    pub fn row(&self, r: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn set_row(&mut self, r: usize, v: &BitVec) {
        assert_eq!(v.len(), self.cols);
        self.row_words_mut(r).copy_from_slice(&v.words);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (a, b) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(b * self.words_per_row);
        head[a * self.words_per_row..(a + 1) * self.words_per_row]
            .swap_with_slice(&mut tail[..self.words_per_row]);
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let (lo, hi) = (dst.min(src), dst.max(src));
        let (head, tail) = self.data.split_at_mut(hi * self.words_per_row);
        let hi_slice = &mut tail[..self.words_per_row];
        let lo_slice = &mut head[lo * self.words_per_row..(lo + 1) * self.words_per_row];
        if dst > src {
            for (d, s) in hi_slice.iter_mut().zip(lo_slice.iter()) {
                *d ^= s;
            }
        } else {
            for (d, s) in lo_slice.iter_mut().zip(hi_slice.iter()) {
                *d ^= s;
            }
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Basis of `{x : self · x = 0}` (each row read as one constraint).
    #[must_use]
    pub fn kernel(&self) -> Vec<BitVec> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            for (pi, &p) in pivots.iter().enumerate() {
                if m.get(pi, f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Matrix product over F_2.
    #[must_use]
    pub fn multiply(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let (dst_range, src_range) = (
                        i * out.words_per_row..(i + 1) * out.words_per_row,
                        k * other.words_per_row..(k + 1) * other.words_per_row,
                    );
                    let src = other.data[src_range].to_vec();
                    for (d, s) in out.data[dst_range].iter_mut().zip(&src) {
                        *d ^= s;
                    }
                }
            }
        }
        out
    }

    #[must_use]
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                out.set(c, r, true);
            }
        }
        out
    }

    /// Inverse over F_2, or `None` if singular.
    #[must_use]
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| work.get(i, c))?;
            work.swap_rows(c, p);
            inv.swap_rows(c, p);
            for i in 0..n {
                if i != c && work.get(i, c) {
                    work.xor_row(i, c);
                    inv.xor_row(i, c);
                }
            }
        }
        Some(inv)
    }

    /// `self · x` with `x` as a column vector.
    #[must_use]
    pub fn apply(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols);
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.row(r).dot(x) {
                out.set(r, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Do the given vectors span all of F_2^n?
#[must_use]
pub fn spans_full(vectors: &[BitVec], n: usize) -> bool {
    if vectors.len() < n {
        return false;
    }
    BitMatrix::from_rows(vectors).rank() == n
}

/// A subspace of F_2^n held as its unique reduced-row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    ambient: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    /// The zero subspace of F_2^n.
    #[must_use]
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Canonical basis of the span of `vectors`.
    pub fn from_vectors(ambient: usize, vectors: &[BitVec]) -> Self {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    /// Full space F_2^n.
    #[must_use]
    pub fn full(ambient: usize) -> Self {
        Self::from_vectors(
            ambient,
            &(0..ambient)
                .map(|i| BitVec::unit(ambient, i))
                .collect::<Vec<_>>(),
        )
    }

    /// Add `v` to the span, keeping reduced echelon form.
    /// Returns `false` if `v` was already in the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        let Some(pivot) = v.first_one() else {
            return false;
        };
        // Back-reduce existing rows, then insert in pivot order.
        for row in &mut self.rows {
            if row.get(pivot) {
                row.xor_assign(&v);
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(at, pivot);
        self.rows.insert(at, v);
        true
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[must_use]
    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    #[must_use]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    #[must_use]
    pub fn contains(&self, v: &BitVec) -> bool {
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v.is_zero()
    }

    #[must_use]
    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// `{y : x · y = 0 for all x in self}` under the standard inner product.
    #[must_use]
    pub fn orthogonal_complement(&self) -> Self {
        if self.rows.is_empty() {
            return Self::full(self.ambient);
        }
        let kernel = BitMatrix::from_rows(&self.rows).kernel();
        Self::from_vectors(self.ambient, &kernel)
    }

    /// All `2^dim` elements (zero vector included), in Gray-code order.
    pub fn enumerate(&self) -> Result<Vec<BitVec>> {
        if self.dim() > ENUMERATION_GUARD {
            return Err(Error::EnumerationGuard {
                dim: self.dim(),
                max: ENUMERATION_GUARD,
            });
        }
        let mut out = Vec::with_capacity(1 << self.dim());
        let mut cur = BitVec::zeros(self.ambient);
        out.push(cur.clone());
        for step in 1u64..(1 << self.dim()) {
            // Gray code: element k differs from k-1 in bit trailing_zeros(k).
            let flip = step.trailing_zeros() as usize;
            cur.xor_assign(&self.rows[flip]);
            out.push(cur.clone());
        }
        Ok(out)
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SubspaceBasis(dim {} in F_2^{})",
            self.dim(),
            self.ambient
        )?;
        for r in &self.rows {
            write!(f, " {r:?}")?;
        }
        Ok(())
    }
}

/// All subspaces of F_2^n of every dimension, each in canonical form.
///
/// Count is the sum of Gaussian binomials; n = 4 gives 67. Intended for
/// small n (the subspace-weight identity checks sweep n <= 4).
#[must_use]
pub fn all_subspaces(n: usize) -> Vec<SubspaceBasis> {
    assert!(n <= 5, "subspace sweep is exponential; keep n small");
    let mut out = vec![SubspaceBasis::zero(n)];
    // Breadth-first closure: extend every known subspace by every vector.
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![SubspaceBasis::zero(n)];
    while let Some(s) = frontier.pop() {
        for bits in 1..(1u64 << n) {
            let v = BitVec::from_int(n, bits);
            if s.contains(&v) {
                continue;
            }
            let mut bigger = s.clone();
            bigger.insert(&v);
            if seen.insert(bigger.rows.clone()) {
                out.push(bigger.clone());
                frontier.push(bigger);
            }
        }
    }
    out.sort_by(|a, b| (a.dim(), &a.rows).cmp(&(b.dim(), &b.rows)));
    out
}
