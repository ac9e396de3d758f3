//! Clifford tableaux and stabilizer states with exact sign tracking.
//!
//! A Clifford `C` (modulo global phase) is stored by the images of the `2n`
//! generators: row `i < n` holds the label of `C X_{i+1} C†`, row `n + i`
//! that of `C Z_{i+1} C†`, each with a sign bit. The label part of the
//! tableau is a symplectic matrix for the form `[x, y] = a_x·b_y + b_x·a_y`.
//!
//! Random Cliffords are drawn exactly uniformly: the symplectic part by the
//! two-transvection recursion (choose the image of `X_1` uniformly among
//! nonzero vectors, the image of `Z_1` uniformly in its fiber, recurse on
//! the symplectic complement), the sign part as `2n` fair bits.
//!
//! [`CliffordTableau::synthesize`] turns a tableau back into an `H`/`S`/`CX`
//! (plus convenience) gate list, which is how tableau-level objects are
//! replayed against dense state vectors in tests and in the dense sampling
//! backend.

use rand::Rng;

use crate::gf2::{symplectic_dot, BitMatrix, BitVec, SubspaceBasis};
use crate::pauli::PauliIndex;

/// Generator gates. `Cx(c, t)` flips target `t` when control `c` is set;
/// qubits are 0-based here and throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    #[must_use]
    pub fn inverse(self) -> Self {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }
}

/// Conjugate the signed Pauli `(-1)^sign P_label` by a generator gate,
/// in place. `label` is a `2n`-bit vector `(a | b)`.
pub fn conjugate_by_gate(n: usize, label: &mut BitVec, sign: &mut bool, gate: Gate) {
    match gate {
        Gate::H(q) => {
            let (aq, bq) = (label.get(q), label.get(n + q));
            *sign ^= aq & bq;
            label.set(q, bq);
            label.set(n + q, aq);
        }
        Gate::S(q) => {
            let (aq, bq) = (label.get(q), label.get(n + q));
            *sign ^= aq & bq;
            label.set(n + q, bq ^ aq);
        }
        Gate::Sdg(q) => {
            let (aq, bq) = (label.get(q), label.get(n + q));
            *sign ^= aq & !bq;
            label.set(n + q, bq ^ aq);
        }
        Gate::X(q) => *sign ^= label.get(n + q),
        Gate::Y(q) => *sign ^= label.get(q) ^ label.get(n + q),
        Gate::Z(q) => *sign ^= label.get(q),
        Gate::Cx(c, t) => {
            let (ac, bc) = (label.get(c), label.get(n + c));
            let (at, bt) = (label.get(t), label.get(n + t));
            *sign ^= ac & bt & !(at ^ bc);
            label.set(t, at ^ ac);
            label.set(n + c, bc ^ bt);
        }
        Gate::Cz(q, r) => {
            let (aq, bq) = (label.get(q), label.get(n + q));
            let (ar, br) = (label.get(r), label.get(n + r));
            *sign ^= aq & ar & (bq ^ br);
            label.set(n + r, br ^ aq);
            label.set(n + q, bq ^ ar);
        }
        Gate::Swap(q, r) => {
            let (aq, bq) = (label.get(q), label.get(n + q));
            let (ar, br) = (label.get(r), label.get(n + r));
            label.set(q, ar);
            label.set(n + q, br);
            label.set(r, aq);
            label.set(n + r, bq);
        }
    }
}

/// A Clifford unitary modulo global phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    /// `2n` rows of `2n` bits; row `i` is the label of the image of
    /// generator `i` (`X_{i+1}` for `i < n`, `Z_{i+1-n}` otherwise).
    rows: Vec<BitVec>,
    /// Sign bits: `C G_i C† = (-1)^{signs[i]} P_{rows[i]}`.
    signs: BitVec,
}

impl CliffordTableau {
    #[must_use]
    pub fn identity(n: usize) -> Self {
        let rows = (0..2 * n).map(|i| BitVec::unit(2 * n, i)).collect();
        Self {
            n,
            rows,
            signs: BitVec::zeros(2 * n),
        }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Label of the image of generator `i`.
    #[must_use]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    #[must_use]
    pub fn sign(&self, i: usize) -> bool {
        self.signs.get(i)
    }

    /// The `2n x 2n` symplectic matrix (row `i` = image of generator `i`).
    #[must_use]
    pub fn symplectic_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(&self.rows)
    }

    /// Does the label part preserve the symplectic form?
    #[must_use]
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in i..2 * n {
                let expect = j == i + n; // [e_i, e_j] for i <= j
                if symplectic_dot(&self.rows[i], &self.rows[j], n) != expect {
                    return false;
                }
            }
        }
        true
    }

    /// Compose with a gate applied after the current unitary.
    pub fn push_gate(&mut self, gate: Gate) {
        for i in 0..2 * self.n {
            let mut sign = self.signs.get(i);
            conjugate_by_gate(self.n, &mut self.rows[i], &mut sign, gate);
            self.signs.set(i, sign);
        }
    }

    /// Tableau of a gate sequence applied in iteration order.
    pub fn from_circuit(n: usize, gates: &[Gate]) -> Self {
        let mut t = Self::identity(n);
        for &g in gates {
            t.push_gate(g);
        }
        t
    }

    /// Image of a signed Pauli under conjugation: returns `(sign, label)`
    /// with `C (-1)^s P_x C† = (-1)^sign P_label`.
    #[must_use]
    pub fn conjugate_signed(&self, label: &BitVec, sign: bool) -> (bool, BitVec) {
        let n = self.n;
        // (-1)^s P_x = i^{2s + a·b} · prod_j X_j^{a_j} · prod_j Z_j^{b_j};
        // each plain factor conjugates to (-1)^{signs[i]} P_{rows[i]}.
        let x = PauliIndex::new(n, label.clone());
        let mut phase = (2 * u8::from(sign) + (x.y_count() % 4) as u8) % 4;
        let mut acc = PauliIndex::identity(n);
        for j in 0..n {
            if x.a(j) {
                phase = (phase + 2 * u8::from(self.signs.get(j))) % 4;
                let (mul_phase, next) = acc.multiply(&PauliIndex::new(n, self.rows[j].clone()));
                phase = (phase + mul_phase) % 4;
                acc = next;
            }
        }
        for j in 0..n {
            if x.b(j) {
                phase = (phase + 2 * u8::from(self.signs.get(n + j))) % 4;
                let (mul_phase, next) = acc.multiply(&PauliIndex::new(n, self.rows[n + j].clone()));
                phase = (phase + mul_phase) % 4;
                acc = next;
            }
        }
        debug_assert_eq!(phase % 2, 0, "conjugate of Hermitian must be ±Hermitian");
        (phase == 2, acc.into_bits())
    }

    /// Conjugation action on an unsigned Pauli label.
    #[must_use]
    pub fn conjugate_pauli(&self, p: &PauliIndex) -> (bool, PauliIndex) {
        let (sign, label) = self.conjugate_signed(p.bits(), false);
        (sign, PauliIndex::new(self.n, label))
    }

    /// Uniformly random Clifford (mod phase): uniform symplectic label part
    /// via the transvection recursion plus `2n` fair sign bits.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let adj = sample_symplectic_adjacent(n, rng);
        // Adjacent pair convention (x_1, z_1, x_2, z_2, ...) -> (a | b).
        let sigma = |i: usize| if i < n { 2 * i } else { 2 * (i - n) + 1 };
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..2 * n {
            let src = &adj[sigma(i)];
            let mut row = BitVec::zeros(2 * n);
            for j in 0..2 * n {
                if src.get(sigma(j)) {
                    row.set(j, true);
                }
            }
            rows.push(row);
        }
        let mut signs = BitVec::zeros(2 * n);
        for i in 0..2 * n {
            signs.set(i, rng.random::<bool>());
        }
        let t = Self { n, rows, signs };
        debug_assert!(t.is_symplectic());
        t
    }

    /// Gate list `g_1 .. g_m` with `from_circuit == self` (signs included).
    #[must_use]
    pub fn synthesize(&self) -> Vec<Gate> {
        let n = self.n;
        let mut work = self.clone();
        let mut log: Vec<Gate> = Vec::new();
        macro_rules! push {
            ($g:expr) => {{
                let g = $g;
                work.push_gate(g);
                log.push(g);
            }};
        }
        for j in 0..n {
            // Reduce the image of Z_{j+1} (row n + j) to the literal Z_{j+1}:
            // first make it X-like with pivot at qubit j, then one H.
            let v = n + j;
            if (j..n).all(|q| !work.rows[v].get(q)) {
                let q = (j..n)
                    .find(|&q| work.rows[v].get(n + q))
                    .expect("row must touch qubits >= j");
                push!(Gate::H(q));
            }
            let q = (j..n)
                .find(|&q| work.rows[v].get(q))
                .expect("pivot after H");
            if q != j {
                push!(Gate::Swap(j, q));
            }
            for q in j + 1..n {
                if work.rows[v].get(q) {
                    push!(Gate::Cx(j, q));
                }
            }
            if work.rows[v].get(n + j) {
                push!(Gate::S(j));
            }
            for q in j + 1..n {
                if work.rows[v].get(n + q) {
                    push!(Gate::Cz(j, q));
                }
            }
            debug_assert_eq!(work.rows[v], BitVec::unit(2 * n, j));
            push!(Gate::H(j));
            // Now reduce the image of X_{j+1} (row j); its qubit-j X bit is
            // forced by anticommutation with the fresh Z_{j+1}, and every
            // gate below fixes that Z row.
            debug_assert!(work.rows[j].get(j));
            for q in j + 1..n {
                if work.rows[j].get(q) {
                    push!(Gate::Cx(j, q));
                }
            }
            if work.rows[j].get(n + j) {
                push!(Gate::S(j));
            }
            for q in j + 1..n {
                if work.rows[j].get(n + q) {
                    push!(Gate::Cz(j, q));
                }
            }
            debug_assert_eq!(work.rows[j], BitVec::unit(2 * n, j));
            debug_assert_eq!(work.rows[n + j], BitVec::unit(2 * n, n + j));
        }
        for j in 0..n {
            if work.signs.get(j) {
                push!(Gate::Z(j));
            }
            if work.signs.get(n + j) {
                push!(Gate::X(j));
            }
        }
        debug_assert_eq!(work, Self::identity(n));
        log.into_iter().rev().map(Gate::inverse).collect()
    }
}

impl std::fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CliffordTableau(n = {})", self.n)?;
        for i in 0..2 * self.n {
            let name = if i < self.n {
                format!("X{}", i + 1)
            } else {
                format!("Z{}", i + 1 - self.n)
            };
            writeln!(
                f,
                "  {name} -> {}{}",
                if self.signs.get(i) { '-' } else { '+' },
                PauliIndex::new(self.n, self.rows[i].clone())
            )?;
        }
        Ok(())
    }
}

/// Symplectic product in the adjacent-pair coordinate convention
/// `(x_1, z_1, x_2, z_2, ...)`.
fn adjacent_dot(x: &BitVec, y: &BitVec) -> bool {
    let mut acc = false;
    for i in 0..x.len() / 2 {
        acc ^= (x.get(2 * i) & y.get(2 * i + 1)) ^ (x.get(2 * i + 1) & y.get(2 * i));
    }
    acc
}

/// Transvection `Z_h: v -> v + [v, h] h` (adjacent convention).
fn transvect(h: &BitVec, v: &mut BitVec) {
    if adjacent_dot(v, h) {
        v.xor_assign(h);
    }
}

/// Find `(h1, h2)` with `y = Z_{h1} Z_{h2} x` for nonzero `x, y`
/// (`h2` applies first; either may be absent).
fn find_transvections(x: &BitVec, y: &BitVec) -> (Option<BitVec>, Option<BitVec>) {
    if x == y {
        return (None, None);
    }
    if adjacent_dot(x, y) {
        return (Some(x.xor(y)), None);
    }
    // Need z with [x, z] = [z, y] = 1; then h2 = z + x, h1 = y + z.
    let w = x.len();
    let pairs = w / 2;
    let local = |v: &BitVec, i: usize| (v.get(2 * i), v.get(2 * i + 1));
    let mut z = BitVec::zeros(w);
    let both = (0..pairs).find(|&i| local(x, i) != (false, false) && local(y, i) != (false, false));
    if let Some(i) = both {
        // One pair where both are supported: solve the 2-bit local system.
        for bits in 1u64..4 {
            z.set(2 * i, bits & 1 == 1);
            z.set(2 * i + 1, bits & 2 == 2);
            if adjacent_dot(x, &z) && adjacent_dot(&z, y) {
                break;
            }
        }
    } else {
        // Local piece at pair i pairing to 1 with (va, vb): the swapped
        // pair works unless both bits are set, where (1, 0) does.
        let pair_for = |v: &BitVec, z: &mut BitVec| {
            let i = (0..pairs)
                .find(|&i| local(v, i) != (false, false))
                .expect("vector nonzero");
            let (va, vb) = local(v, i);
            if va && vb {
                z.set(2 * i, true);
            } else {
                z.set(2 * i, vb);
                z.set(2 * i + 1, va);
            }
        };
        pair_for(x, &mut z);
        pair_for(y, &mut z);
    }
    debug_assert!(adjacent_dot(x, &z) && adjacent_dot(&z, y));
    (Some(y.xor(&z)), Some(z.xor(x)))
}

/// Uniform element of Sp(2m, F_2), rows = images of the basis vectors,
/// adjacent-pair convention.
fn sample_symplectic_adjacent<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<BitVec> {
    if m == 0 {
        return Vec::new();
    }
    let w = 2 * m;
    // Image of e_1: uniform nonzero.
    let f1 = loop {
        let mut v = BitVec::zeros(w);
        for i in 0..w {
            v.set(i, rng.random::<bool>());
        }
        if !v.is_zero() {
            break v;
        }
    };
    let e1 = BitVec::unit(w, 0);
    let (h1, h2) = find_transvections(&e1, &f1);
    // Fiber coordinates for the image of e_2.
    let b0 = rng.random::<bool>();
    let mut eprime = BitVec::unit(w, 0);
    for j in 2..w {
        eprime.set(j, rng.random::<bool>());
    }
    let mut h0 = eprime;
    if let Some(h) = &h2 {
        transvect(h, &mut h0);
    }
    if let Some(h) = &h1 {
        transvect(h, &mut h0);
    }

    let inner = sample_symplectic_adjacent(m - 1, rng);
    let mut rows = Vec::with_capacity(w);
    for i in 0..w {
        let mut row = BitVec::zeros(w);
        if i < 2 {
            row.set(i, true);
        } else {
            for j in inner[i - 2].iter_ones() {
                row.set(j + 2, true);
            }
        }
        if let Some(h) = &h2 {
            transvect(h, &mut row);
        }
        if let Some(h) = &h1 {
            transvect(h, &mut row);
        }
        transvect(&h0, &mut row);
        if b0 {
            transvect(&f1, &mut row);
        }
        rows.push(row);
    }
    rows
}

/// An n-qubit stabilizer state, stored as `n` signed generators in a
/// canonical reduced echelon form (X-part columns eliminated first), so
/// equal states compare equal structurally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabilizerState {
    n: usize,
    rows: Vec<BitVec>,
    signs: BitVec,
}

impl StabilizerState {
    /// `|0...0⟩`, stabilized by `Z_1 .. Z_n`.
    #[must_use]
    pub fn zero_state(n: usize) -> Self {
        let rows = (0..n).map(|i| BitVec::unit(2 * n, n + i)).collect();
        Self {
            n,
            rows,
            signs: BitVec::zeros(n),
        }
    }

    /// Build from signed generator labels; panics if they do not form a
    /// stabilizer group (must be `n` independent commuting labels).
    pub fn from_generators(n: usize, rows: Vec<BitVec>, signs: BitVec) -> Self {
        assert_eq!(rows.len(), n);
        for (i, x) in rows.iter().enumerate() {
            for y in &rows[i + 1..] {
                assert!(!symplectic_dot(x, y, n), "generators must commute");
            }
        }
        let mut s = Self { n, rows, signs };
        s.canonicalize();
        assert_eq!(
            SubspaceBasis::from_vectors(2 * n, &s.rows).dim(),
            n,
            "generators must be independent"
        );
        s
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Signed generators in canonical order.
    pub fn generators(&self) -> impl Iterator<Item = (bool, PauliIndex)> + '_ {
        (0..self.n).map(|i| {
            (
                self.signs.get(i),
                PauliIndex::new(self.n, self.rows[i].clone()),
            )
        })
    }

    /// Multiply generator `dst` by generator `src` (group product, signs
    /// tracked exactly; commuting generators give an even phase).
    fn mul_row(&mut self, dst: usize, src: usize) {
        let p = PauliIndex::new(self.n, self.rows[dst].clone());
        let q = PauliIndex::new(self.n, self.rows[src].clone());
        let (phase, prod) = p.multiply(&q);
        debug_assert_eq!(phase % 2, 0);
        let sign = self.signs.get(dst) ^ self.signs.get(src) ^ (phase == 2);
        self.rows[dst] = prod.into_bits();
        self.signs.set(dst, sign);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            self.rows.swap(a, b);
            let (sa, sb) = (self.signs.get(a), self.signs.get(b));
            self.signs.set(a, sb);
            self.signs.set(b, sa);
        }
    }

    fn canonicalize(&mut self) {
        let mut r = 0;
        for c in 0..2 * self.n {
            let Some(p) = (r..self.n).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.n {
                if i != r && self.rows[i].get(c) {
                    self.mul_row(i, r);
                }
            }
            r += 1;
            if r == self.n {
                break;
            }
        }
    }

    /// The state `C|self⟩`.
    #[must_use]
    pub fn apply_clifford(&self, c: &CliffordTableau) -> Self {
        assert_eq!(c.n(), self.n);
        let mut rows = Vec::with_capacity(self.n);
        let mut signs = BitVec::zeros(self.n);
        for i in 0..self.n {
            let (sign, label) = c.conjugate_signed(&self.rows[i], self.signs.get(i));
            rows.push(label);
            signs.set(i, sign);
        }
        let mut s = Self {
            n: self.n,
            rows,
            signs,
        };
        s.canonicalize();
        s
    }

    /// The Lagrangian subspace spanned by the stabilizer labels.
    #[must_use]
    pub fn lagrangian(&self) -> SubspaceBasis {
        SubspaceBasis::from_vectors(2 * self.n, &self.rows)
    }

    /// Dimension of the intersection of the stabilizer Lagrangian with the
    /// pure-Z space `0_n × F_2^n` (counts canonical rows with zero X part).
    #[must_use]
    pub fn z_intersection_dim(&self) -> usize {
        let x_rows: Vec<BitVec> = self.rows.iter().map(|r| r.slice(0, self.n)).collect();
        self.n - BitMatrix::from_rows(&x_rows).rank()
    }

    /// Measure qubit `q` in the computational basis, updating the state.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let hits: Vec<usize> = (0..self.n).filter(|&i| self.rows[i].get(q)).collect();
        if let Some(&p) = hits.first() {
            for &i in &hits[1..] {
                self.mul_row(i, p);
            }
            let outcome = rng.random::<bool>();
            self.rows[p] = BitVec::unit(2 * self.n, self.n + q);
            self.signs.set(p, outcome);
            outcome
        } else {
            // Z_q is (up to sign) a product of generators: find the subset
            // by elimination, then multiply it out to recover the sign.
            let target = BitVec::unit(2 * self.n, self.n + q);
            let mut mat = self.rows.clone();
            let mut combo: Vec<u64> = (0..self.n).map(|i| 1u64 << i).collect();
            let mut reduced = target;
            let mut used: u64 = 0;
            for c in 0..2 * self.n {
                let Some(p) = (0..mat.len()).find(|&i| mat[i].get(c)) else {
                    continue;
                };
                let row = mat[p].clone();
                let row_combo = combo[p];
                for i in 0..mat.len() {
                    if i != p && mat[i].get(c) {
                        let r = row.clone();
                        mat[i].xor_assign(&r);
                        combo[i] ^= row_combo;
                    }
                }
                if reduced.get(c) {
                    reduced.xor_assign(&row);
                    used ^= row_combo;
                }
                mat.remove(p);
                combo.remove(p);
            }
            debug_assert!(reduced.is_zero(), "deterministic outcome must resolve");
            let mut phase = 0u8;
            let mut acc = PauliIndex::identity(self.n);
            for i in 0..self.n {
                if used >> i & 1 == 1 {
                    phase = (phase + 2 * u8::from(self.signs.get(i))) % 4;
                    let (mul_phase, next) =
                        acc.multiply(&PauliIndex::new(self.n, self.rows[i].clone()));
                    phase = (phase + mul_phase) % 4;
                    acc = next;
                }
            }
            debug_assert!(acc.is_z_type());
            debug_assert_eq!(phase % 2, 0);
            phase == 2
        }
    }

    /// Measure all qubits in order `1..n` on a working copy; returns the
    /// outcome bits.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let mut work = self.clone();
        let mut out = BitVec::zeros(self.n);
        for q in 0..self.n {
            out.set(q, work.measure_qubit(q, rng));
        }
        out
    }

    /// The computational-basis support as an affine subspace: outcomes are
    /// exactly `particular ⊕ (any sum of basis vectors)`, uniformly.
    ///
    /// Pure-Z generators `(-1)^s Z^b` constrain outcomes by `b · x = s`;
    /// the remaining degrees of freedom are free and uniform.
    #[must_use]
    pub fn born_support(&self) -> (BitVec, Vec<BitVec>) {
        let n = self.n;
        let z_rows: Vec<(BitVec, bool)> = (0..n)
            .filter(|&i| self.rows[i].slice(0, n).is_zero())
            .map(|i| (self.rows[i].slice(n, 2 * n), self.signs.get(i)))
            .collect();
        if z_rows.is_empty() {
            let basis = (0..n).map(|i| BitVec::unit(n, i)).collect();
            return (BitVec::zeros(n), basis);
        }
        let constraints: Vec<BitVec> = z_rows.iter().map(|(b, _)| b.clone()).collect();
        let m = BitMatrix::from_rows(&constraints);
        let basis = m.kernel();
        // Particular solution via elimination on the augmented system.
        let mut aug_rows = Vec::with_capacity(z_rows.len());
        for (b, s) in &z_rows {
            let mut aug = BitVec::zeros(n + 1);
            for i in b.iter_ones() {
                aug.set(i, true);
            }
            aug.set(n, *s);
            aug_rows.push(aug);
        }
        let mut aug = BitMatrix::from_rows(&aug_rows);
        let pivots = aug.rref_in_place();
        let mut particular = BitVec::zeros(n);
        for (r, &p) in pivots.iter().enumerate() {
            assert!(p < n, "stabilizer support cannot be empty");
            particular.set(p, aug.get(r, n));
        }
        (particular, basis)
    }
}

impl std::fmt::Debug for StabilizerState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StabilizerState(n = {}:", self.n)?;
        for (sign, p) in self.generators() {
            write!(f, " {}{}", if sign { '-' } else { '+' }, p)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    fn c1(n: usize, gates: &[Gate]) -> CliffordTableau {
        CliffordTableau::from_circuit(n, gates)
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let h = c1(1, &[Gate::H(0)]);
        let (s, p) = h.conjugate_pauli(&PauliIndex::parse("X").unwrap());
        assert!(!s);
        assert_eq!(p.to_string(), "Z");
        let (s, p) = h.conjugate_pauli(&PauliIndex::parse("Y").unwrap());
        assert!(s, "H Y H = -Y");
        assert_eq!(p.to_string(), "Y");
    }

    #[test]
    fn phase_gate_cycle() {
        let s_gate = c1(1, &[Gate::S(0)]);
        let (sg, p) = s_gate.conjugate_pauli(&PauliIndex::parse("X").unwrap());
        assert!(!sg);
        assert_eq!(p.to_string(), "Y");
        let (sg, p) = s_gate.conjugate_pauli(&PauliIndex::parse("Y").unwrap());
        assert!(sg, "S Y S† = -X");
        assert_eq!(p.to_string(), "X");
        // S·S = Z gate: X -> -X.
        let zz = c1(1, &[Gate::S(0), Gate::S(0)]);
        let (sg, p) = zz.conjugate_pauli(&PauliIndex::parse("X").unwrap());
        assert!(sg);
        assert_eq!(p.to_string(), "X");
    }

    #[test]
    fn cx_spreads_x_and_z() {
        let cx = c1(2, &[Gate::Cx(0, 1)]);
        let img = |s: &str| {
            let (sign, p) = cx.conjugate_pauli(&PauliIndex::parse(s).unwrap());
            (sign, p.to_string())
        };
        assert_eq!(img("XI"), (false, "XX".to_string()));
        assert_eq!(img("IX"), (false, "IX".to_string()));
        assert_eq!(img("ZI"), (false, "ZI".to_string()));
        assert_eq!(img("IZ"), (false, "ZZ".to_string()));
        assert_eq!(img("XZ"), (true, "YY".to_string()));
    }

    #[test]
    fn tableaux_compose_and_stay_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            for _ in 0..40 {
                let c = CliffordTableau::random(n, &mut rng);
                assert!(c.is_symplectic());
            }
        }
    }

    #[test]
    fn synthesis_round_trips_random_tableaux() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 1..=5 {
            for _ in 0..30 {
                let c = CliffordTableau::random(n, &mut rng);
                let gates = c.synthesize();
                assert_eq!(CliffordTableau::from_circuit(n, &gates), c);
            }
        }
    }

    #[test]
    fn zero_state_measurement_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = StabilizerState::zero_state(4);
        for _ in 0..10 {
            assert!(s.measure_all(&mut rng).is_zero());
        }
    }

    #[test]
    fn ghz_outcomes_are_correlated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = c1(2, &[Gate::H(0), Gate::Cx(0, 1)]);
        let ghz = StabilizerState::zero_state(2).apply_clifford(&c);
        let mut seen = [false, false];
        for _ in 0..64 {
            let m = ghz.measure_all(&mut rng);
            assert_eq!(m.get(0), m.get(1));
            seen[usize::from(m.get(0))] = true;
        }
        assert!(seen[0] && seen[1], "both branches appear");
        let (particular, basis) = ghz.born_support();
        assert!(particular.is_zero());
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], BitVec::from_bools(&[true, true]));
    }

    #[test]
    fn minus_state_keeps_its_sign() {
        // X|0⟩ = |1⟩, then H gives |−⟩, stabilized by -X.
        let c = c1(1, &[Gate::X(0), Gate::H(0)]);
        let minus = StabilizerState::zero_state(1).apply_clifford(&c);
        let gens: Vec<_> = minus.generators().collect();
        assert_eq!(gens.len(), 1);
        assert!(gens[0].0);
        assert_eq!(gens[0].1.to_string(), "X");
    }

    #[test]
    fn canonical_form_is_presentation_independent() {
        // |00⟩ presented with generators {ZI, IZ} vs {ZI, ZZ}.
        let n = 2;
        let zi = BitVec::unit(2 * n, n);
        let iz = BitVec::unit(2 * n, n + 1);
        let zz = zi.xor(&iz);
        let a = StabilizerState::from_generators(n, vec![zi.clone(), iz.clone()], BitVec::zeros(n));
        let b = StabilizerState::from_generators(n, vec![zi, zz], BitVec::zeros(n));
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_measurement_sign_from_product() {
        // |1⟩: stabilizer -Z; measuring gives 1 deterministically.
        let c = c1(1, &[Gate::X(0)]);
        let one = StabilizerState::zero_state(1).apply_clifford(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(one.measure_all(&mut rng).get(0));
    }

    #[test]
    fn z_intersection_dims() {
        assert_eq!(StabilizerState::zero_state(3).z_intersection_dim(), 3);
        let c = c1(3, &[Gate::H(0)]);
        let s = StabilizerState::zero_state(3).apply_clifford(&c);
        assert_eq!(s.z_intersection_dim(), 2);
    }

    /// Chi-square uniformity of C|0⟩ over the 6 single-qubit stabilizer
    /// states at 6·10^4 samples.
    #[test]
    fn random_clifford_uniform_on_six_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(417);
        let samples = 60_000usize;
        let zero = StabilizerState::zero_state(1);
        let mut counts: HashMap<StabilizerState, usize> = HashMap::new();
        for _ in 0..samples {
            let c = CliffordTableau::random(1, &mut rng);
            *counts.entry(zero.apply_clifford(&c)).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = samples as f64 / 6.0;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let crit = ChiSquared::new(5.0).unwrap().inverse_cdf(0.999);
        assert!(stat < crit, "chi-square {stat:.2} >= {crit:.2}");
    }

    /// Same for the 60 two-qubit stabilizer states.
    #[test]
    fn random_clifford_uniform_on_sixty_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(418);
        let samples = 240_000usize;
        let zero = StabilizerState::zero_state(2);
        let mut counts: HashMap<StabilizerState, usize> = HashMap::new();
        for _ in 0..samples {
            let c = CliffordTableau::random(2, &mut rng);
            *counts.entry(zero.apply_clifford(&c)).or_default() += 1;
        }
        assert_eq!(counts.len(), 60);
        let expected = samples as f64 / 60.0;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let crit = ChiSquared::new(59.0).unwrap().inverse_cdf(0.999);
        assert!(stat < crit, "chi-square {stat:.2} >= {crit:.2}");
    }

    /// Sampling cost should scale like n^2 in the word-packed regime
    /// (generous factor-3 budget over quadratic extrapolation).
    #[test]
    fn random_clifford_cost_scales_quadratically() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let time = |n: usize, rng: &mut ChaCha8Rng| {
            let reps = 2_000;
            // Warm up allocator paths.
            for _ in 0..200 {
                std::hint::black_box(CliffordTableau::random(n, rng));
            }
            let start = std::time::Instant::now();
            for _ in 0..reps {
                std::hint::black_box(CliffordTableau::random(n, rng));
            }
            start.elapsed().as_secs_f64()
        };
        let t8 = time(8, &mut rng);
        let t16 = time(16, &mut rng);
        assert!(
            t16 / t8 < 3.0 * 4.0,
            "doubling n from 8 to 16 slowed sampling by {:.1}x",
            t16 / t8
        );
    }
}
