//! Pauli/Weyl labels and isotropic subspaces of F_2^{2n}.
//!
//! A label `x = (a | b)` names the Hermitian Pauli `P_x = i^{a·b} X^a Z^b`
//! (the phase makes every `P_x` its own adjoint: each qubit carries
//! I, X, Z or Y = iXZ). Commutation of `P_x` and `P_y` is exactly the
//! vanishing of the symplectic product `[x, y] = a_x·b_y + b_x·a_y`, so
//! commuting families are isotropic subspaces and maximal ones are
//! Lagrangian (dimension n).

use num_complex::Complex64;

use crate::gf2::{symplectic_dot, BitVec, SubspaceBasis};
use crate::{Error, Result};

/// Dense Pauli matrices above this qubit count are refused.
pub const DENSE_PAULI_GUARD: usize = 12;

/// A Pauli label `(a | b)` on `n` qubits: bits `0..n` are the X part `a`,
/// bits `n..2n` the Z part `b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex {
    n: usize,
    bits: BitVec,
}

impl PauliIndex {
    pub fn new(n: usize, bits: BitVec) -> Self {
        assert_eq!(bits.len(), 2 * n);
        Self { n, bits }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            bits: BitVec::zeros(2 * n),
        }
    }

    /// Label from packed bits: low `n` bits X part, next `n` bits Z part.
    #[must_use]
    pub fn from_int(n: usize, packed: u64) -> Self {
        Self {
            n,
            bits: BitVec::from_int(2 * n, packed),
        }
    }

    /// Parse e.g. `"XIZY"`; the leftmost character is qubit 1.
    pub fn parse(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let mut bits = BitVec::zeros(2 * n);
        for (q, ch) in s.chars().enumerate() {
            let (a, b) = match ch.to_ascii_uppercase() {
                'I' => (false, false),
                'X' => (true, false),
                'Z' => (false, true),
                'Y' => (true, true),
                _ => {
                    return Err(Error::Parse {
                        what: "Pauli string",
                        input: s.to_string(),
                    })
                }
            };
            bits.set(q, a);
            bits.set(n + q, b);
        }
        Ok(Self { n, bits })
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    #[must_use]
    pub fn into_bits(self) -> BitVec {
        self.bits
    }

    /// X-part bit of qubit `q` (0-based).
    #[inline]
    #[must_use]
    pub fn a(&self, q: usize) -> bool {
        self.bits.get(q)
    }

    /// Z-part bit of qubit `q` (0-based).
    #[inline]
    #[must_use]
    pub fn b(&self, q: usize) -> bool {
        self.bits.get(self.n + q)
    }

    #[must_use]
    pub fn x_part(&self) -> BitVec {
        self.bits.slice(0, self.n)
    }

    #[must_use]
    pub fn z_part(&self) -> BitVec {
        self.bits.slice(self.n, 2 * self.n)
    }

    #[must_use]
    pub fn is_identity(&self) -> bool {
        self.bits.is_zero()
    }

    /// Is the label of pure Z type (a = 0)?
    #[must_use]
    pub fn is_z_type(&self) -> bool {
        self.x_part().is_zero()
    }

    /// Number of qubits carrying Y, i.e. the integer `a · b`.
    #[must_use]
    pub fn y_count(&self) -> usize {
        (0..self.n).filter(|&q| self.a(q) && self.b(q)).count()
    }

    /// Do the corresponding Paulis commute?
    #[must_use]
    pub fn commutes_with(&self, other: &Self) -> bool {
        !symplectic_dot(&self.bits, &other.bits, self.n)
    }

    /// `P_self · P_other = i^phase · P_(self+other)`; returns
    /// `(phase mod 4, sum label)`.
    #[must_use]
    pub fn multiply(&self, other: &Self) -> (u8, Self) {
        debug_assert_eq!(self.n, other.n);
        let mut phase = 0u8; // exponent of i, mod 4
        for q in 0..self.n {
            let (a1, b1) = (self.a(q), self.b(q));
            let (a2, b2) = (other.a(q), other.b(q));
            // i^{a1 b1} i^{a2 b2} (-1)^{b1 a2} = i^{a1b1 + a2b2 + 2 b1a2},
            // then normalize the product qubit back to Hermitian form.
            let unnorm = u8::from(a1 && b1) + u8::from(a2 && b2) + 2 * u8::from(b1 && a2);
            let norm = u8::from(a1 ^ a2) * u8::from(b1 ^ b2);
            phase = (phase + unnorm + 4 - norm) % 4;
        }
        let sum = Self {
            n: self.n,
            bits: self.bits.xor(&other.bits),
        };
        (phase, sum)
    }

    /// Dense `2^n x 2^n` matrix of `P_self`, entry `(i, j)` with qubit `q`
    /// at bit `q` of the index (qubit 1 is the least-significant bit).
    pub fn matrix(&self) -> Result<Vec<Vec<Complex64>>> {
        if self.n > DENSE_PAULI_GUARD {
            return Err(Error::DenseGuard {
                n: self.n,
                max: DENSE_PAULI_GUARD,
            });
        }
        let dim = 1usize << self.n;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for j in 0..dim {
            let (phase, i) = self.apply_to_basis(j as u64);
            m[i as usize][j] = phase;
        }
        Ok(m)
    }

    /// `P |j⟩ = phase · |i⟩` on computational basis states:
    /// `X^a Z^b |j⟩ = (-1)^{b·j} |j ⊕ a⟩`, plus the Hermitian `i^{a·b}`.
    #[must_use]
    pub fn apply_to_basis(&self, j: u64) -> (Complex64, u64) {
        let a = self.x_part().as_int();
        let b = self.z_part().as_int();
        let i_pow = (self.y_count() % 4) as u32;
        let mut phase = Complex64::new(1.0, 0.0) * Complex64::i().powu(i_pow);
        if (b & j).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (phase, j ^ a)
    }
}

impl std::fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for q in 0..self.n {
            let ch = match (self.a(q), self.b(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PauliIndex({self})")
    }
}

/// A basis of a symplectically isotropic subspace of F_2^{2n}
/// (all pairwise symplectic products vanish: the Paulis commute).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicBasis {
    n: usize,
    basis: SubspaceBasis,
}

impl IsotropicBasis {
    /// Canonicalize the span of `labels` and verify isotropy.
    pub fn from_labels(n: usize, labels: &[PauliIndex]) -> Result<Self> {
        let vectors: Vec<BitVec> = labels.iter().map(|p| p.bits().clone()).collect();
        Self::from_vectors(n, &vectors)
    }

    pub fn from_vectors(n: usize, vectors: &[BitVec]) -> Result<Self> {
        let basis = SubspaceBasis::from_vectors(2 * n, vectors);
        for (i, x) in basis.rows().iter().enumerate() {
            for y in &basis.rows()[i + 1..] {
                if symplectic_dot(x, y, n) {
                    return Err(Error::NotIsotropic {
                        x: format!("{:?}", PauliIndex::new(n, x.clone())),
                        y: format!("{:?}", PauliIndex::new(n, y.clone())),
                    });
                }
            }
        }
        Ok(Self { n, basis })
    }

    #[must_use]
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            basis: SubspaceBasis::zero(2 * n),
        }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    #[must_use]
    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    #[must_use]
    pub fn is_lagrangian(&self) -> bool {
        self.dim() == self.n
    }

    /// Extend to a Lagrangian (dimension n) by a greedy sweep.
    ///
    /// Candidate order: caller-supplied labels first, then pure-Z labels in
    /// lexicographic order, then all labels. Starting from the zero
    /// subspace this lands on the all-Z Lagrangian `0_n × F_2^n`.
    pub fn complete_to_lagrangian(&self, preferred: &[PauliIndex]) -> SubspaceBasis {
        let n = self.n;
        let mut basis = self.basis.clone();
        let try_add = |basis: &mut SubspaceBasis, v: &BitVec| {
            if basis.dim() == n || basis.contains(v) {
                return;
            }
            if basis.rows().iter().any(|r| symplectic_dot(r, v, n)) {
                return;
            }
            basis.insert(v);
        };
        for p in preferred {
            try_add(&mut basis, p.bits());
        }
        if basis.dim() < n {
            for zb in 1..(1u64 << n) {
                let v = BitVec::from_int(n, 0).concat(&BitVec::from_int(n, zb));
                try_add(&mut basis, &v);
                if basis.dim() == n {
                    break;
                }
            }
        }
        if basis.dim() < n {
            for packed in 1..(1u64 << (2 * n)) {
                let v = BitVec::from_int(2 * n, packed);
                try_add(&mut basis, &v);
                if basis.dim() == n {
                    break;
                }
            }
        }
        debug_assert_eq!(basis.dim(), n, "isotropic subspaces always extend");
        basis
    }
}
