//! Numerical verification of the Clifford commutant structure.
//!
//! For `t` copies of an `n`-qubit system, the commutant of `{U^{⊗t}}` over
//! all Cliffords is spanned by operators `R(T) = r(T)^{⊗n}` indexed by
//! *stochastic Lagrangian subspaces*: `t`-dimensional `T ⊆ F_2^t × F_2^t`
//! that contain the all-ones pair and satisfy `wt(x) ≡ wt(y) (mod 4)` for
//! every `(x, y) ∈ T`. Here `r(T) = Σ_{(x,y)∈T} |x⟩⟨y|` on `C^{2^t}` and
//! the tensor power runs over qubits.
//!
//! The subspaces whose `y`-projection is invertible are graphs `x = O y`
//! of binary orthogonal matrices with column weights `≡ 1 (mod 4)`; for
//! `t <= 5` these are exactly the permutation matrices, and at `t = 6` the
//! first non-permutation elements appear (the complement-of-identity
//! pattern `J + I` times a permutation). Everything here is enumerated
//! exactly and cross-checked against closed-form traces, Gram entries,
//! and partial-transpose spectra.
//!
//! Index convention for dense operators: copy-major. A basis index
//! `j ∈ [0, 2^{nt})` holds register `y_c` of copy `c` in bits
//! `[nc, nc + n)`; `R(T)` itself acts qubit-by-qubit, and the two views
//! are reconciled inside the entry formulas.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::statevec::StateVector;

/// Largest `n·t` for which dense `2^{nt}`-dimensional operators may be
/// materialized.
pub const OPERATOR_GUARD: usize = 12;

/// Largest copy count for subspace enumeration.
pub const STOCHASTIC_T_MAX: usize = 6;

/// A stochastic Lagrangian subspace, stored as packed RREF basis rows.
/// Bit `i < t` of a row is coordinate `x_i`, bit `t + i` is `y_i`; rows
/// are ordered by decreasing pivot (highest set bit).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StochasticSubspace {
    t: usize,
    rows: Vec<u64>,
}

fn weight_ok(row: u64, t: usize) -> bool {
    let x = row & ((1 << t) - 1);
    let y = row >> t;
    (x.count_ones() % 4) == (y.count_ones() % 4)
}

fn pair_ok(a: u64, b: u64, t: usize) -> bool {
    let both = a & b;
    let x = (both & ((1 << t) - 1)).count_ones() % 2;
    let y = (both >> t).count_ones() % 2;
    x == y
}

/// Reduce packed rows to RREF with pivot = highest set bit, rows ordered
/// by decreasing pivot. Returns the nonzero rows.
fn rref_packed(mut rows: Vec<u64>) -> Vec<u64> {
    let mut out = Vec::new();
    let mut col = 63i32;
    while col >= 0 {
        let bit = 1u64 << col;
        if let Some(pos) = rows.iter().position(|&r| r & bit != 0) {
            let pivot_row = rows.swap_remove(pos);
            for r in &mut rows {
                if *r & bit != 0 {
                    *r ^= pivot_row;
                }
            }
            for r in &mut out {
                if *r & bit != 0 {
                    *r ^= pivot_row;
                }
            }
            out.push(pivot_row);
        }
        col -= 1;
    }
    out
}

impl StochasticSubspace {
    #[must_use]
    pub fn t(&self) -> usize {
        self.t
    }

    /// RREF basis rows, pivot-descending.
    #[must_use]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// All `2^t` elements, in XOR-combination order.
    #[must_use]
    pub fn elements(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(1 << self.rows.len());
        for mask in 0..1u64 << self.rows.len() {
            let mut v = 0;
            for (i, &r) in self.rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v ^= r;
                }
            }
            out.push(v);
        }
        out
    }

    #[must_use]
    pub fn contains(&self, mut v: u64) -> bool {
        for &r in &self.rows {
            let pivot = 63 - r.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= r;
            }
        }
        v == 0
    }

    /// `dim(T ∩ Δ)` where `Δ = {(x, x)}`.
    #[must_use]
    pub fn diagonal_dim(&self) -> usize {
        let count = self
            .elements()
            .iter()
            .filter(|&&v| v & ((1 << self.t) - 1) == v >> self.t)
            .count();
        count.trailing_zeros() as usize
    }

    /// Defect `l(T) = t - dim(T ∩ Δ)`.
    #[must_use]
    pub fn defect(&self) -> usize {
        self.t - self.diagonal_dim()
    }

    /// `dim(T ∩ T') = 2t - rank([T; T'])`.
    #[must_use]
    pub fn intersection_dim(&self, other: &Self) -> usize {
        let mut stack = self.rows.clone();
        stack.extend_from_slice(&other.rows);
        2 * self.t - rref_packed(stack).len()
    }

    /// Validity of the subspace conditions on every element (used as a
    /// closure check on the basis-level enumeration conditions).
    #[must_use]
    pub fn is_valid(&self) -> bool {
        let ones = (1u64 << (2 * self.t)) - 1;
        self.elements().iter().all(|&v| weight_ok(v, self.t)) && self.contains(ones)
    }

    /// If the `y`-projection is invertible, the subspace is the graph
    /// `{(Oy, y)}` of an orthogonal matrix `O`.
    #[must_use]
    pub fn as_orthogonal(&self) -> Option<OrthogonalMatrix> {
        let t = self.t;
        let mut xm = BitMatrix::zeros(t, t);
        let mut ym = BitMatrix::zeros(t, t);
        for (i, &row) in self.rows.iter().enumerate() {
            for j in 0..t {
                xm.set(i, j, row >> j & 1 == 1);
                ym.set(i, j, row >> (t + j) & 1 == 1);
            }
        }
        let y_inv = ym.transpose().inverse()?;
        let o = xm.transpose().multiply(&y_inv);
        Some(OrthogonalMatrix::new(o))
    }
}

/// `Π_{k=0}^{t-2} (2^k + 1)`: the number of stochastic Lagrangian
/// subspaces for `t` copies.
#[must_use]
pub fn stochastic_count(t: u32) -> u64 {
    (0..t.saturating_sub(1)).map(|k| (1u64 << k) + 1).product()
}

/// Enumerate all stochastic Lagrangian subspaces for `1 <= t <= 6`.
///
/// Works bottom-up over RREF rows with increasing pivots. The constraint
/// that the subspace contain the all-ones vector fixes the top pivot at
/// `2t - 1` and determines the final row as `ones XOR (sum of the other
/// rows)`, so only `t - 1` rows carry free bits.
pub fn enumerate_stochastic(t: usize) -> Result<Vec<StochasticSubspace>> {
    if t == 0 || t > STOCHASTIC_T_MAX {
        return Err(Error::EnumerationGuard {
            dim: t,
            max: STOCHASTIC_T_MAX,
        });
    }
    let width = 2 * t;
    let ones = (1u64 << width) - 1;
    let mut out = Vec::new();
    let mut rows: Vec<u64> = Vec::with_capacity(t);
    let mut pivots: Vec<usize> = Vec::with_capacity(t);

    fn dfs(
        t: usize,
        rows: &mut Vec<u64>,
        pivots: &mut Vec<usize>,
        xor_acc: u64,
        out: &mut Vec<StochasticSubspace>,
    ) {
        let width = 2 * t;
        let ones = (1u64 << width) - 1;
        let level = rows.len();
        if level == t - 1 {
            let row = ones ^ xor_acc;
            if weight_ok(row, t) && rows.iter().all(|&r| pair_ok(row, r, t)) {
                let mut basis = rows.clone();
                basis.push(row);
                basis.reverse();
                out.push(StochasticSubspace { t, rows: basis });
            }
            return;
        }
        let min_pivot = pivots.last().map_or(0, |&p| p + 1);
        // Leave room for the remaining ascending pivots below 2t-1.
        let max_pivot = width - 2 - (t - 2 - level);
        for pivot in min_pivot..=max_pivot {
            let free: Vec<usize> = (0..pivot).filter(|q| !pivots.contains(q)).collect();
            pivots.push(pivot);
            for bits in 0..1u64 << free.len() {
                let mut row = 1u64 << pivot;
                for (i, &q) in free.iter().enumerate() {
                    if bits >> i & 1 == 1 {
                        row |= 1 << q;
                    }
                }
                if weight_ok(row, t) && rows.iter().all(|&r| pair_ok(row, r, t)) {
                    rows.push(row);
                    dfs(t, rows, pivots, xor_acc ^ row, out);
                    rows.pop();
                }
            }
            pivots.pop();
        }
    }

    if t == 1 {
        // Single determined row.
        let row = ones;
        if weight_ok(row, 1) {
            out.push(StochasticSubspace { t, rows: vec![row] });
        }
    } else {
        dfs(t, &mut rows, &mut pivots, 0, &mut out);
    }
    out.sort_by(|a, b| a.rows.cmp(&b.rows));
    Ok(out)
}

/// A binary orthogonal matrix with column weights `≡ 1 (mod 4)`, i.e. an
/// element of `O_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalMatrix {
    m: BitMatrix,
    /// Column `j` packed as a `t`-bit integer, for fast register maps.
    cols: Vec<u64>,
}

impl OrthogonalMatrix {
    fn new(m: BitMatrix) -> Self {
        let t = m.rows();
        let cols = (0..t)
            .map(|j| (0..t).fold(0u64, |acc, i| acc | (u64::from(m.get(i, j)) << i)))
            .collect();
        Self { m, cols }
    }

    #[must_use]
    pub fn identity(t: usize) -> Self {
        Self::new(BitMatrix::identity(t))
    }

    #[must_use]
    pub fn t(&self) -> usize {
        self.m.rows()
    }

    #[must_use]
    pub fn matrix(&self) -> &BitMatrix {
        &self.m
    }

    #[must_use]
    pub fn is_identity(&self) -> bool {
        (0..self.t()).all(|j| self.cols[j] == 1 << j)
    }

    #[must_use]
    pub fn is_permutation(&self) -> bool {
        self.cols.iter().all(|c| c.count_ones() == 1)
    }

    /// `O y` for a packed `t`-bit register `y`.
    #[must_use]
    pub fn apply(&self, y: u64) -> u64 {
        let mut out = 0;
        for (j, &col) in self.cols.iter().enumerate() {
            if y >> j & 1 == 1 {
                out ^= col;
            }
        }
        out
    }

    /// The subspace `{(Oy, y)}`.
    #[must_use]
    pub fn graph(&self) -> StochasticSubspace {
        let t = self.t();
        let rows = (0..t).map(|j| self.cols[j] | (1u64 << (t + j))).collect();
        StochasticSubspace {
            t,
            rows: rref_packed(rows),
        }
    }

    /// `dim ker O_{S,S}` for the principal submatrix on `subset` (bitmask).
    #[must_use]
    pub fn principal_kernel_dim(&self, subset: u32) -> usize {
        let idx: Vec<usize> = (0..self.t()).filter(|&i| subset >> i & 1 == 1).collect();
        let s = idx.len();
        let mut sub = BitMatrix::zeros(s, s);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                sub.set(a, b, self.m.get(i, j));
            }
        }
        s - sub.rank()
    }

    /// Smallest subset (by size, then mask value) whose principal
    /// submatrix is singular; `None` for the identity.
    #[must_use]
    pub fn find_singular_subset(&self) -> Option<u32> {
        let t = self.t();
        let mut masks: Vec<u32> = (1..1u32 << t).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
            .into_iter()
            .find(|&m| self.principal_kernel_dim(m) > 0)
    }
}

/// Enumerate `O_t` as the subspaces with invertible `y`-projection.
pub fn enumerate_orthogonal(t: usize) -> Result<Vec<OrthogonalMatrix>> {
    Ok(enumerate_stochastic(t)?
        .iter()
        .filter_map(StochasticSubspace::as_orthogonal)
        .collect())
}

/// `r(T) = Σ_{(x,y)∈T} |x⟩⟨y|` as a dense `2^t × 2^t` 0/1 matrix.
#[must_use]
pub fn r_matrix(sub: &StochasticSubspace) -> DMatrix<f64> {
    let t = sub.t();
    let mut m = DMatrix::zeros(1 << t, 1 << t);
    for v in sub.elements() {
        let x = (v & ((1 << t) - 1)) as usize;
        let y = (v >> t) as usize;
        m[(x, y)] = 1.0;
    }
    m
}

/// Qubit-`q` register of a copy-major index: bit `c` is bit `nc + q` of
/// `idx`.
fn qubit_register(idx: u64, q: usize, n: usize, t: usize) -> u64 {
    (0..t).fold(0u64, |acc, c| acc | ((idx >> (n * c + q) & 1) << c))
}

/// Dense `R(T) = r(T)^{⊗n}` in the copy-major basis; guarded by
/// `n·t <= 12`.
pub fn dense_r_operator(sub: &StochasticSubspace, n: usize) -> Result<DMatrix<f64>> {
    let t = sub.t();
    let nt = n * t;
    if nt > OPERATOR_GUARD {
        return Err(Error::OperatorGuard {
            nt,
            max: OPERATOR_GUARD,
        });
    }
    let dim = 1usize << nt;
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        let member = (0..n).all(|q| {
            let x = qubit_register(i as u64, q, n, t);
            let y = qubit_register(j as u64, q, n, t);
            sub.contains(x | (y << t))
        });
        if member {
            1.0
        } else {
            0.0
        }
    });
    Ok(m)
}

/// `tr R(T) = 2^{n · dim(T ∩ Δ)}`, exactly.
#[must_use]
pub fn r_trace(sub: &StochasticSubspace, n: u64) -> BigUint {
    BigUint::one() << (n * sub.diagonal_dim() as u64)
}

/// Closed form for `Σ_T tr R(T)`: `2^n Π_{k=0}^{t-2} (2^n + 2^k)`.
#[must_use]
pub fn trace_sum_formula(t: u32, n: u64) -> BigUint {
    let mut acc = BigUint::one() << n;
    for k in 0..t.saturating_sub(1) {
        acc *= (BigUint::one() << n) + (BigUint::one() << u64::from(k));
    }
    acc
}

/// Gram entry `tr(R(T)† R(T')) = |T ∩ T'|^n = 2^{n · dim(T ∩ T')}`.
#[must_use]
pub fn gram_entry(a: &StochasticSubspace, b: &StochasticSubspace, n: u64) -> BigUint {
    BigUint::one() << (n * a.intersection_dim(b) as u64)
}

/// Full Gram matrix of the `R(T)` family.
#[must_use]
pub fn gram_matrix(subs: &[StochasticSubspace], n: u64) -> Vec<Vec<BigUint>> {
    subs.iter()
        .map(|a| subs.iter().map(|b| gram_entry(a, b, n)).collect())
        .collect()
}

/// Partial transpose of a copy-major dense operator over the copies in
/// `subset` (bitmask over `0..t`).
#[must_use]
pub fn dense_partial_transpose(m: &DMatrix<f64>, t: usize, n: usize, subset: u32) -> DMatrix<f64> {
    let dim = m.nrows();
    let mut block = 0u64;
    for c in 0..t {
        if subset >> c & 1 == 1 {
            block |= ((1u64 << n) - 1) << (n * c);
        }
    }
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let i2 = ((i as u64) & !block) | ((j as u64) & block);
            let j2 = ((j as u64) & !block) | ((i as u64) & block);
            out[(i2 as usize, j2 as usize)] = m[(i, j)];
        }
    }
    out
}

/// Singular values, descending.
fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PtSpectrumReport {
    pub t: usize,
    pub n: usize,
    pub subset: u32,
    /// `dim ker O_{S,S}`.
    pub kernel_dim: usize,
    /// Expected nonzero singular value `2^{kn}`.
    pub expected_value: f64,
    /// Expected multiplicity `2^{n(t-2k)}`.
    pub expected_count: usize,
    /// Largest deviation of any singular value from the law.
    pub max_deviation: f64,
    pub trace_norm: f64,
    /// Expected trace norm `2^{n(t-k)}`.
    pub expected_trace_norm: f64,
    pub passed: bool,
}

/// Check the partial-transpose spectrum law for `R(O)`: the singular
/// values of `R(O)^{Γ_S}` must be `2^{kn}` with multiplicity
/// `2^{n(t-2k)}` (rest zero), `k = dim ker O_{S,S}`.
///
/// Exploits `R(O)^{Γ_S} = (r(O)^{Γ_S})^{⊗n}`: the `n`-fold products of
/// the `2^t`-level singular values give the full spectrum without
/// materializing the `2^{nt}`-dimensional operator.
pub fn pt_spectrum_check(o: &OrthogonalMatrix, subset: u32, n: usize) -> PtSpectrumReport {
    let t = o.t();
    let r = r_matrix(&o.graph());
    let r_pt = dense_partial_transpose(&r, t, 1, subset);
    let base = singular_values(&r_pt);
    // n-fold products of the base singular values, as a sorted multiset.
    let mut spectrum = vec![1.0f64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(spectrum.len() * base.len());
        for &s in &spectrum {
            for &b in &base {
                next.push(s * b);
            }
        }
        spectrum = next;
    }
    spectrum.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let k = o.principal_kernel_dim(subset);
    let expected_value = 2.0f64.powi((k * n) as i32);
    let expected_count = 1usize << (n * (t - 2 * k));
    let mut max_dev = 0.0f64;
    for (i, &s) in spectrum.iter().enumerate() {
        let want = if i < expected_count {
            expected_value
        } else {
            0.0
        };
        max_dev = max_dev.max((s - want).abs());
    }
    let trace_norm: f64 = spectrum.iter().sum();
    let expected_trace_norm = 2.0f64.powi((n * (t - k)) as i32);
    let passed = max_dev < 1e-8 * expected_value.max(1.0)
        && (trace_norm - expected_trace_norm).abs() < 1e-6 * expected_trace_norm;
    PtSpectrumReport {
        t,
        n,
        subset,
        kernel_dim: k,
        expected_value,
        expected_count,
        max_deviation: max_dev,
        trace_norm,
        expected_trace_norm,
        passed,
    }
}

/// Trace norm of `r(T)` (so `‖R(T)‖₁ = ‖r(T)‖₁^n`).
#[must_use]
pub fn r_trace_norm(sub: &StochasticSubspace) -> f64 {
    singular_values(&r_matrix(sub)).iter().sum()
}

/// Copy-major action of `R(O)`: registers map by `y'_c = ⊕_m O[c,m] y_m`.
#[must_use]
pub fn orthogonal_index_map(o: &OrthogonalMatrix, idx: u64, n: usize) -> u64 {
    let t = o.t();
    let reg_mask = (1u64 << n) - 1;
    let mut out = 0u64;
    for c in 0..t {
        let mut reg = 0u64;
        for m in 0..t {
            if o.m.get(c, m) {
                reg ^= (idx >> (n * m)) & reg_mask;
            }
        }
        out |= reg << (n * c);
    }
    out
}

/// Copy-major amplitudes of a product `⊗_c φ_c` of per-copy states.
fn copy_major_product(copies: &[StateVector]) -> Result<Vec<Complex64>> {
    let t = copies.len();
    let n = copies[0].n();
    if copies.iter().any(|c| c.n() != n) {
        return Err(Error::QubitMismatch {
            actual: copies.iter().map(StateVector::n).max().unwrap(),
            expected: n,
        });
    }
    let nt = n * t;
    if nt > OPERATOR_GUARD {
        return Err(Error::OperatorGuard {
            nt,
            max: OPERATOR_GUARD,
        });
    }
    let reg_mask = (1u64 << n) - 1;
    Ok((0..1u64 << nt)
        .map(|idx| {
            (0..t)
                .map(|c| copies[c].amps()[((idx >> (n * c)) & reg_mask) as usize])
                .product()
        })
        .collect())
}

/// `⟨Φ| R(O) |Φ⟩` for a product of per-copy states, via the permutation
/// action on indices.
pub fn orthogonal_expectation(o: &OrthogonalMatrix, copies: &[StateVector]) -> Result<Complex64> {
    let n = copies[0].n();
    let amps = copy_major_product(copies)?;
    Ok(amps
        .iter()
        .enumerate()
        .map(|(j, a)| amps[orthogonal_index_map(o, j as u64, n) as usize].conj() * a)
        .sum())
}

/// `⟨Φ| R(T) |Φ⟩` for arbitrary `T`, via the element-tuple expansion
/// (cost `|T|^n` terms).
pub fn r_expectation(sub: &StochasticSubspace, copies: &[StateVector]) -> Result<Complex64> {
    let t = sub.t();
    let n = copies[0].n();
    if copies.len() != t {
        return Err(Error::QubitMismatch {
            actual: copies.len(),
            expected: t,
        });
    }
    let amps = copy_major_product(copies)?;
    let elements = sub.elements();
    let len = elements.len() as u64;
    let total = len.pow(n as u32);
    let mask = (1u64 << t) - 1;
    let mut acc = Complex64::ZERO;
    for tuple in 0..total {
        // Per-qubit subspace elements; fold their x/y registers back into
        // copy-major indices.
        let mut rem = tuple;
        let mut xi = 0u64;
        let mut yi = 0u64;
        for q in 0..n {
            let v = elements[(rem % len) as usize];
            rem /= len;
            let x = v & mask;
            let y = v >> t;
            for c in 0..t {
                xi |= ((x >> c) & 1) << (n * c + q);
                yi |= ((y >> c) & 1) << (n * c + q);
            }
        }
        acc += amps[xi as usize].conj() * amps[yi as usize];
    }
    Ok(acc)
}

/// `⟨Φ| Π_O |Φ⟩` with `Π_O = |O_t|^{-1} Σ_O R(O)`; real for the group
/// average.
pub fn projector_expectation(
    orthogonals: &[OrthogonalMatrix],
    copies: &[StateVector],
) -> Result<f64> {
    let n = copies[0].n();
    let amps = copy_major_product(copies)?;
    let mut acc = Complex64::ZERO;
    for o in orthogonals {
        acc += amps
            .iter()
            .enumerate()
            .map(|(j, a)| amps[orthogonal_index_map(o, j as u64, n) as usize].conj() * a)
            .sum::<Complex64>();
    }
    Ok(acc.re / orthogonals.len() as f64)
}

/// `tr Π_O = |O_t|^{-1} Σ_O #{fixed indices}`, computed without
/// materializing the operator. The result is the rank of the projector.
pub fn projector_trace(orthogonals: &[OrthogonalMatrix], n: usize) -> Result<u128> {
    let t = orthogonals[0].t();
    let nt = n * t;
    if nt > 2 * OPERATOR_GUARD {
        return Err(Error::OperatorGuard {
            nt,
            max: 2 * OPERATOR_GUARD,
        });
    }
    let mut total: u128 = 0;
    for o in orthogonals {
        // Fixed points of the register map form a subspace: count via the
        // kernel of (O + I) acting on t-bit registers, 2^{n·dim ker}.
        let mut m = o.m.clone();
        for i in 0..t {
            m.set(i, i, !m.get(i, i));
        }
        let k = t - m.rank();
        total += 1u128 << (n * k);
    }
    assert_eq!(total % orthogonals.len() as u128, 0, "group average trace");
    Ok(total / orthogonals.len() as u128)
}

/// Dense `Π_O` (guarded), for idempotence/rank cross-checks.
pub fn dense_projector(orthogonals: &[OrthogonalMatrix], n: usize) -> Result<DMatrix<f64>> {
    let t = orthogonals[0].t();
    let nt = n * t;
    if nt > OPERATOR_GUARD {
        return Err(Error::OperatorGuard {
            nt,
            max: OPERATOR_GUARD,
        });
    }
    let dim = 1usize << nt;
    let w = 1.0 / orthogonals.len() as f64;
    let mut m = DMatrix::zeros(dim, dim);
    for o in orthogonals {
        for j in 0..dim {
            let i = orthogonal_index_map(o, j as u64, n) as usize;
            m[(i, j)] += w;
        }
    }
    Ok(m)
}

/// `dim Sym^t(C^{2^n}) = C(2^n + t - 1, t)`.
#[must_use]
pub fn symmetric_dim(n: u32, t: u32) -> u128 {
    let d = 1u128 << n;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..u128::from(t) {
        num *= d + u128::from(t) - 1 - i;
        den *= i + 1;
    }
    num / den
}

/// Per-copy states for the projector counterexample at `t = 6`: the six
/// single-qubit stabilizer states, optionally padded with `|0⟩` to two
/// qubits.
pub fn counterexample_copies(n: usize) -> Result<Vec<StateVector>> {
    let base = crate::statevec::six_axis_states();
    match n {
        1 => Ok(base.to_vec()),
        2 => base
            .iter()
            .map(|s| {
                let mut amps = vec![Complex64::ZERO; 4];
                amps[0] = s.amps()[0];
                amps[1] = s.amps()[1];
                StateVector::new(2, amps)
            })
            .collect(),
        _ => Err(Error::ParamRange {
            name: "n",
            value: n.to_string(),
            range: "counterexample states exist for n in {1, 2}".into(),
        }),
    }
}

/// Text catalog of the subspace family at copy count `t`.
pub fn catalog_text(t: usize) -> Result<String> {
    use std::fmt::Write;
    let subs = enumerate_stochastic(t)?;
    let mut out = String::new();
    writeln!(
        out,
        "stochastic Lagrangian subspaces, t = {t} (count {})",
        subs.len()
    )
    .unwrap();
    for (i, sub) in subs.iter().enumerate() {
        let kind = match sub.as_orthogonal() {
            Some(o) if o.is_identity() => "identity",
            Some(o) if o.is_permutation() => "permutation",
            Some(_) => "orthogonal",
            None => "defective",
        };
        let rows: Vec<String> = sub.rows().iter().map(|r| format!("{r:#x}")).collect();
        writeln!(
            out,
            "T[{i:4}] defect {} {:12} rows [{}]",
            sub.defect(),
            kind,
            rows.join(", ")
        )
        .unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::enumerate_stabilizer_states;

    #[test]
    fn subspace_counts_match_closed_form() {
        let expect = [1u64, 2, 6, 30, 270, 4590];
        for t in 1..=6 {
            let subs = enumerate_stochastic(t).unwrap();
            assert_eq!(subs.len() as u64, expect[t - 1], "t = {t}");
            assert_eq!(stochastic_count(t as u32), expect[t - 1]);
            assert!(subs.iter().all(StochasticSubspace::is_valid));
        }
        assert!(matches!(
            enumerate_stochastic(7),
            Err(Error::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn t2_family_is_identity_and_swap() {
        let subs = enumerate_stochastic(2).unwrap();
        let os: Vec<_> = subs.iter().filter_map(|s| s.as_orthogonal()).collect();
        assert_eq!(os.len(), 2);
        assert!(os.iter().any(OrthogonalMatrix::is_identity));
        assert!(os.iter().all(OrthogonalMatrix::is_permutation));
        // r of the non-identity is the swap on C^4.
        let swap = subs
            .iter()
            .find(|s| s.as_orthogonal().is_some_and(|o| !o.is_identity()))
            .unwrap();
        let r = r_matrix(swap);
        for x in 0..4usize {
            let y = (x >> 1) | ((x & 1) << 1);
            assert_eq!(r[(y, x)], 1.0);
        }
    }

    #[test]
    fn orthogonal_family_counts_and_structure() {
        let expect = [1usize, 2, 6, 24, 120, 1440];
        for t in 1..=6 {
            let os = enumerate_orthogonal(t).unwrap();
            assert_eq!(os.len(), expect[t - 1], "t = {t}");
            let ones = (1u64 << t) - 1;
            for o in &os {
                // O Oᵀ = I.
                let prod = o.matrix().multiply(&o.matrix().transpose());
                assert_eq!(prod, BitMatrix::identity(t));
                // Column weights ≡ 1 mod 4; all-ones vector fixed.
                for j in 0..t {
                    assert_eq!(o.cols[j].count_ones() % 4, 1);
                }
                assert_eq!(o.apply(ones), ones);
                // Graph round-trips.
                assert_eq!(o.graph().as_orthogonal().unwrap(), *o);
            }
            if t <= 5 {
                assert!(os.iter().all(OrthogonalMatrix::is_permutation));
            }
        }
        // t = 6: exactly half are permutations, the rest have the
        // complement pattern (column weight 5).
        let os6 = enumerate_orthogonal(6).unwrap();
        let perms = os6.iter().filter(|o| o.is_permutation()).count();
        assert_eq!(perms, 720);
        for o in os6.iter().filter(|o| !o.is_permutation()) {
            assert!(o.cols.iter().all(|c| c.count_ones() == 5));
        }
    }

    #[test]
    fn trace_formula_and_census_sum() {
        for (t, n) in [(2u32, 1u64), (3, 1), (2, 2), (3, 2), (4, 1), (2, 3)] {
            let subs = enumerate_stochastic(t as usize).unwrap();
            let total: BigUint = subs.iter().map(|s| r_trace(s, n)).sum();
            assert_eq!(total, trace_sum_formula(t, n), "t={t} n={n}");
            // Trace against the dense build where cheap.
            if (t as usize) * (n as usize) <= 8 {
                for sub in &subs {
                    let dense = dense_r_operator(sub, n as usize).unwrap();
                    let tr: f64 = dense.trace();
                    assert_eq!(BigUint::from(tr as u64), r_trace(sub, n));
                }
            }
        }
    }

    #[test]
    fn gram_matches_dense_inner_products() {
        for (t, n) in [(4usize, 1usize), (3, 2)] {
            let subs = enumerate_stochastic(t).unwrap();
            let dense: Vec<_> = subs
                .iter()
                .map(|s| dense_r_operator(s, n).unwrap())
                .collect();
            for (i, a) in subs.iter().enumerate() {
                for (j, b) in subs.iter().enumerate() {
                    let exact = gram_entry(a, b, n as u64);
                    let numeric = (dense[i].transpose() * &dense[j]).trace();
                    assert_eq!(
                        BigUint::from(numeric.round() as u64),
                        exact,
                        "t={t} n={n} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn sandwich_value_is_one_on_stabilizer_inputs() {
        // ⟨S|^{⊗t} R(T) |S⟩^{⊗t} = 1 for every stabilizer state S.
        for (t, n) in [(2usize, 1usize), (3, 1), (2, 2)] {
            let subs = enumerate_stochastic(t).unwrap();
            let states = enumerate_stabilizer_states(n).unwrap();
            for (_, s) in states.iter().step_by(7) {
                let copies = vec![s.clone(); t];
                for sub in &subs {
                    let v = r_expectation(sub, &copies).unwrap();
                    assert!(
                        (v.re - 1.0).abs() < 1e-9 && v.im.abs() < 1e-9,
                        "t={t} n={n}: {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn pt_spectrum_matches_dense_svd() {
        // The tensor-factorized spectrum must agree with a dense SVD of
        // the partially transposed operator.
        for (t, n) in [(3usize, 1usize), (2, 2), (3, 2)] {
            for o in enumerate_orthogonal(t).unwrap() {
                let dense = dense_r_operator(&o.graph(), n).unwrap();
                for subset in 0..1u32 << t {
                    let report = pt_spectrum_check(&o, subset, n);
                    let pt = dense_partial_transpose(&dense, t, n, subset);
                    let sv = singular_values(&pt);
                    let mut expect = vec![report.expected_value; report.expected_count];
                    expect.resize(sv.len(), 0.0);
                    for (a, b) in sv.iter().zip(&expect) {
                        assert!(
                            (a - b).abs() < 1e-8,
                            "t={t} n={n} subset={subset}: {a} vs {b}"
                        );
                    }
                    assert!(report.passed);
                }
            }
        }
    }

    #[test]
    fn principal_kernel_dims_are_complement_symmetric() {
        for t in 1..=6 {
            for o in enumerate_orthogonal(t).unwrap() {
                let full = (1u32 << t) - 1;
                for subset in 0..=full {
                    assert_eq!(
                        o.principal_kernel_dim(subset),
                        o.principal_kernel_dim(full ^ subset),
                        "t={t} subset={subset}"
                    );
                }
            }
        }
    }

    #[test]
    fn singular_subsets_exist_except_for_identity() {
        for t in 1..=5 {
            for o in enumerate_orthogonal(t).unwrap() {
                let found = o.find_singular_subset();
                if o.is_identity() {
                    assert!(found.is_none());
                } else {
                    assert!(found.is_some(), "t={t}");
                }
            }
        }
    }

    #[test]
    fn non_orthogonal_trace_norms_are_bounded() {
        // ‖r(T)‖₁ <= 2^{t-1} for defective subspaces.
        for t in 2..=4 {
            for sub in enumerate_stochastic(t).unwrap() {
                if sub.as_orthogonal().is_none() {
                    let bound = 2.0f64.powi(t as i32 - 1);
                    assert!(r_trace_norm(&sub) <= bound + 1e-6, "t={t}");
                }
            }
        }
    }

    #[test]
    fn orthogonal_action_matches_dense_operator() {
        for (t, n) in [(3usize, 1usize), (2, 2)] {
            for o in enumerate_orthogonal(t).unwrap() {
                let dense = dense_r_operator(&o.graph(), n).unwrap();
                let dim = 1u64 << (n * t);
                for j in 0..dim {
                    let i = orthogonal_index_map(&o, j, n);
                    assert_eq!(dense[(i as usize, j as usize)], 1.0);
                }
            }
        }
    }

    #[test]
    fn projector_rank_at_six_copies() {
        let os = enumerate_orthogonal(6).unwrap();
        // Fixed space of S_6 alone is the symmetric subspace, dim C(7,6).
        assert_eq!(symmetric_dim(1, 6), 7);
        // Adding the complement-type elements cuts the rank to 6: the
        // weight-1 and weight-5 symmetric basis vectors merge.
        assert_eq!(projector_trace(&os, 1).unwrap(), 6);
        let dense = dense_projector(&os, 1).unwrap();
        let idem = (&dense * &dense) - &dense;
        assert!(idem.amax() < 1e-9, "group average must be idempotent");
        assert!((dense.trace() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn projector_annihilates_six_state_product() {
        let os = enumerate_orthogonal(6).unwrap();
        let copies = counterexample_copies(1).unwrap();
        let v = projector_expectation(&os, &copies).unwrap();
        assert!(v.abs() < 1e-10, "Π_O expectation = {v}");
        // The symmetric projector does not annihilate it.
        let perms: Vec<_> = os.iter().filter(|o| o.is_permutation()).cloned().collect();
        let sym = projector_expectation(&perms, &copies).unwrap();
        assert!(sym > 1e-4, "Π_sym expectation = {sym}");
    }

    #[test]
    fn catalog_lists_every_subspace() {
        // t = 4 is the smallest copy count with defective subspaces:
        // 30 total, 24 orthogonal.
        let text = catalog_text(4).unwrap();
        assert_eq!(text.lines().count(), 31, "header + 30 subspaces");
        assert!(text.contains("identity"));
        assert!(text.contains("permutation"));
        assert_eq!(text.matches("defective").count(), 6);
    }
}
