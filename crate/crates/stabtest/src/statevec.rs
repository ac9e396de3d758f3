//! Dense state vectors and characteristic distributions.
//!
//! Amplitude indexing: bit `q` of a computational-basis index is the value
//! of qubit `q + 1`, matching the bit order of [`BitVec`] outcomes. The
//! characteristic distribution of a pure state is
//! `p(x) = 2^{-n} tr(ψ P_x)^2` over all `4^n` Pauli labels; its marginal
//! over the X part is exactly the distribution of the XOR of two
//! independent computational-basis samples, which is what the spanning
//! tester consumes.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, SubspaceBasis};
use crate::pauli::{IsotropicBasis, PauliIndex};
use crate::tableau::{CliffordTableau, Gate, StabilizerState};

/// Largest qubit count for dense `2^n` state vectors.
pub const DENSE_STATE_GUARD: usize = 12;

/// Ties `tr(ψ P_x)^2 = 1/2` are excluded from the high-weight set within
/// this absolute slack, so roundoff cannot flip boundary labels in or out.
const M_SET_BOUNDARY_SLACK: f64 = 1e-9;

const NORM_TOL_CONSTRUCT: f64 = 1e-12;
const NORM_TOL_FILE: f64 = 1e-6;

const STATE_SCHEMA: &str = "stabtest/state-v1";

#[derive(Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wrap amplitudes; the length must be `2^n` with `n` within the dense
    /// guard, and the norm must already be 1 to within `1e-12`.
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n > DENSE_STATE_GUARD {
            return Err(Error::DenseGuard {
                n,
                max: DENSE_STATE_GUARD,
            });
        }
        if amps.len() != 1 << n {
            return Err(Error::AmplitudeCount { len: amps.len(), n });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL_CONSTRUCT {
            return Err(Error::NotNormalized {
                norm,
                tol: NORM_TOL_CONSTRUCT,
            });
        }
        Ok(Self { n, amps })
    }

    /// Normalize and wrap; rejects vectors of negligible norm.
    pub fn from_unnormalized(n: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-9 {
            return Err(Error::NotNormalized {
                norm,
                tol: NORM_TOL_CONSTRUCT,
            });
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::new(n, amps)
    }

    #[must_use]
    pub fn basis_state(n: usize, index: u64) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[index as usize] = Complex64::ONE;
        Self { n, amps }
    }

    #[must_use]
    pub fn zero_state(n: usize) -> Self {
        Self::basis_state(n, 0)
    }

    /// Tensor product of single-qubit states, first factor = qubit 1.
    pub fn product(factors: &[[Complex64; 2]]) -> Result<Self> {
        let n = factors.len();
        let mut amps = vec![Complex64::ZERO; 1 << n];
        for (j, amp) in amps.iter_mut().enumerate() {
            let mut v = Complex64::ONE;
            for (q, f) in factors.iter().enumerate() {
                v *= f[j >> q & 1];
            }
            *amp = v;
        }
        Self::from_unnormalized(n, amps)
    }

    /// `|T⟩^{⊗m}` with `|T⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2`.
    #[must_use]
    pub fn t_state_power(m: usize) -> Self {
        let inv = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let t = [
            inv,
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4) * inv,
        ];
        Self::product(&vec![t; m]).expect("T factors are normalized")
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n > DENSE_STATE_GUARD {
            return Err(Error::DenseGuard {
                n,
                max: DENSE_STATE_GUARD,
            });
        }
        let amps = (0..1usize << n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        Self::from_unnormalized(n, amps)
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    #[must_use]
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    #[must_use]
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_gate(&mut self, gate: Gate) {
        let amps = &mut self.amps;
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        match gate {
            Gate::H(q) => {
                let bit = 1usize << q;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        let (a, b) = (amps[i], amps[i | bit]);
                        amps[i] = (a + b) * inv;
                        amps[i | bit] = (a - b) * inv;
                    }
                }
            }
            Gate::S(q) => {
                let bit = 1usize << q;
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= Complex64::I;
                    }
                }
            }
            Gate::Sdg(q) => {
                let bit = 1usize << q;
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= -Complex64::I;
                    }
                }
            }
            Gate::X(q) => {
                let bit = 1usize << q;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Y(q) => {
                let bit = 1usize << q;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        let (a, b) = (amps[i], amps[i | bit]);
                        amps[i] = -Complex64::I * b;
                        amps[i | bit] = Complex64::I * a;
                    }
                }
            }
            Gate::Z(q) => {
                let bit = 1usize << q;
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cx(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for i in 0..amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Cz(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & cb != 0 && i & tb != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Swap(q, r) => {
                let (qb, rb) = (1usize << q, 1usize << r);
                for i in 0..amps.len() {
                    if i & qb != 0 && i & rb == 0 {
                        amps.swap(i, i ^ qb ^ rb);
                    }
                }
            }
        }
    }

    pub fn apply_circuit(&mut self, gates: &[Gate]) {
        for &g in gates {
            self.apply_gate(g);
        }
    }

    #[must_use]
    pub fn applied(&self, gates: &[Gate]) -> Self {
        let mut s = self.clone();
        s.apply_circuit(gates);
        s
    }

    #[must_use]
    pub fn born_probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `tr(ψ P) = ⟨ψ|P|ψ⟩` (real for Hermitian `P`).
    #[must_use]
    pub fn char_value(&self, p: &PauliIndex) -> f64 {
        let mut acc = Complex64::ZERO;
        for (j, amp) in self.amps.iter().enumerate() {
            let (coeff, target) = p.apply_to_basis(j as u64);
            acc += self.amps[target as usize].conj() * coeff * amp;
        }
        debug_assert!(acc.im.abs() < 1e-9, "Pauli expectation must be real");
        acc.re
    }

    #[must_use]
    pub fn char_dist(&self) -> CharDist {
        CharDist::from_state(self)
    }

    /// Max squared overlap with any stabilizer state (exhaustive; `n <= 3`).
    pub fn stabilizer_fidelity(&self) -> Result<f64> {
        let states = enumerate_stabilizer_states(self.n)?;
        Ok(states
            .iter()
            .map(|(_, s)| s.inner(self).norm_sqr())
            .fold(0.0, f64::max))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = StateFile {
            schema: STATE_SCHEMA.to_string(),
            n: self.n,
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    /// Load a state file; the stored norm may deviate from 1 by at most
    /// `1e-6` and is renormalized exactly on load.
    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: StateFile = serde_json::from_str(&text)?;
        if file.schema != STATE_SCHEMA {
            return Err(Error::Parse {
                what: "state file schema".into(),
                input: file.schema,
            });
        }
        let amps: Vec<Complex64> = file
            .amps
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        if amps.len() != 1usize << file.n {
            return Err(Error::AmplitudeCount {
                len: amps.len(),
                n: file.n,
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL_FILE {
            return Err(Error::NotNormalized {
                norm,
                tol: NORM_TOL_FILE,
            });
        }
        Self::from_unnormalized(file.n, amps)
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    schema: String,
    n: usize,
    amps: Vec<[f64; 2]>,
}

/// Inverse-CDF sampler over computational outcomes of a dense state.
pub struct BornSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl BornSampler {
    #[must_use]
    pub fn new(state: &StateVector) -> Self {
        let mut cdf = state.born_probabilities();
        let mut acc = 0.0;
        for p in &mut cdf {
            acc += *p;
            *p = acc;
        }
        Self { n: state.n(), cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let u: f64 = rng.random();
        let idx = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1);
        BitVec::from_int(self.n, idx as u64)
    }
}

/// The characteristic distribution of a pure state: `4^n` probabilities
/// indexed by packed Pauli labels.
pub struct CharDist {
    n: usize,
    probs: Vec<f64>,
}

impl CharDist {
    #[must_use]
    pub fn from_state(state: &StateVector) -> Self {
        let n = state.n();
        let scale = 0.5f64.powi(n as i32);
        let probs = (0..1u64 << (2 * n))
            .map(|idx| {
                let tr = state.char_value(&PauliIndex::from_int(n, idx));
                scale * tr * tr
            })
            .collect();
        Self { n, probs }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn prob(&self, p: &PauliIndex) -> f64 {
        self.probs[p.bits().as_int() as usize]
    }

    #[must_use]
    pub fn prob_label(&self, label: &BitVec) -> f64 {
        self.probs[label.as_int() as usize]
    }

    #[must_use]
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Marginal over the X part: the distribution of XOR-of-two-samples.
    #[must_use]
    pub fn diff_marginal(&self) -> Vec<f64> {
        let mut r = vec![0.0; 1 << self.n];
        for (idx, &p) in self.probs.iter().enumerate() {
            r[idx & ((1 << self.n) - 1)] += p;
        }
        r
    }

    /// Total weight on a subspace of label space `F_2^{2n}`.
    pub fn subspace_weight(&self, h: &SubspaceBasis) -> Result<f64> {
        assert_eq!(h.ambient(), 2 * self.n);
        let mut acc = 0.0;
        for v in h.enumerate()? {
            acc += self.prob_label(&v);
        }
        Ok(acc)
    }

    /// Weight of the difference distribution on a subspace `H ⊆ F_2^n`.
    pub fn diff_subspace_weight(&self, h: &SubspaceBasis) -> Result<f64> {
        assert_eq!(h.ambient(), self.n);
        let r = self.diff_marginal();
        let mut acc = 0.0;
        for v in h.enumerate()? {
            acc += r[v.as_int() as usize];
        }
        Ok(acc)
    }

    /// `|H| · p(0_n × H^⊥)`, the closed form the difference distribution
    /// must match on every subspace.
    pub fn dual_weight(&self, h: &SubspaceBasis) -> Result<f64> {
        assert_eq!(h.ambient(), self.n);
        let perp = h.orthogonal_complement();
        let mut acc = 0.0;
        for b in perp.enumerate()? {
            let mut label = BitVec::zeros(2 * self.n);
            for i in b.iter_ones() {
                label.set(self.n + i, true);
            }
            acc += self.prob_label(&label);
        }
        Ok(acc * (1u64 << h.dim()) as f64)
    }

    /// Fourier coefficient `4^{-n} Σ_x p(x) (-1)^{x·label}` (plain dot).
    #[must_use]
    pub fn fourier(&self, label: &BitVec) -> f64 {
        assert_eq!(label.len(), 2 * self.n);
        let mut acc = 0.0;
        for (idx, &p) in self.probs.iter().enumerate() {
            let x = BitVec::from_int(2 * self.n, idx as u64);
            if x.dot(label) {
                acc -= p;
            } else {
                acc += p;
            }
        }
        acc * 0.25f64.powi(self.n as i32)
    }

    /// Labels with `tr(ψ P_x)^2 > 1/2` (the identity always qualifies).
    /// Boundary ties are excluded within a `1e-9` slack.
    #[must_use]
    pub fn high_weight_set(&self) -> Vec<PauliIndex> {
        let cut = 0.5f64.powi(self.n as i32) * 0.5 + M_SET_BOUNDARY_SLACK;
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > cut)
            .map(|(idx, _)| PauliIndex::from_int(self.n, idx as u64))
            .collect()
    }

    /// The span of the high-weight set, verified isotropic.
    pub fn high_weight_span(&self) -> Result<IsotropicBasis> {
        IsotropicBasis::from_labels(self.n, &self.high_weight_set())
    }

    /// A Lagrangian containing the high-weight set, preferring its labels
    /// and pure-Z directions for the completion.
    pub fn high_weight_lagrangian(&self) -> Result<SubspaceBasis> {
        let set = self.high_weight_set();
        let iso = IsotropicBasis::from_labels(self.n, &set)?;
        Ok(iso.complete_to_lagrangian(&set))
    }
}

/// All stabilizer states on `n <= 3` qubits, as canonical tableau states
/// paired with dense vectors (dense global phase is path-dependent).
///
/// Built as the orbit of `|0^n⟩` under `H`, `S`, and `CX` closure;
/// the counts are 6, 60, 1080.
pub fn enumerate_stabilizer_states(n: usize) -> Result<Vec<(StabilizerState, StateVector)>> {
    const MAX_N: usize = 3;
    if n > MAX_N {
        return Err(Error::EnumerationGuard { dim: n, max: MAX_N });
    }
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(Gate::H(q));
        gates.push(Gate::S(q));
        for r in 0..n {
            if r != q {
                gates.push(Gate::Cx(q, r));
            }
        }
    }
    let mut seen: HashMap<StabilizerState, StateVector> = HashMap::new();
    let root = StabilizerState::zero_state(n);
    let mut frontier = vec![root.clone()];
    seen.insert(root, StateVector::zero_state(n));
    while let Some(state) = frontier.pop() {
        let dense = seen[&state].clone();
        for &g in &gates {
            let next = state.apply_clifford(&CliffordTableau::from_circuit(n, &[g]));
            if !seen.contains_key(&next) {
                let mut d = dense.clone();
                d.apply_gate(g);
                seen.insert(next.clone(), d);
                frontier.push(next);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_by(|a, b| {
        a.0.generators()
            .map(|(s, p)| (s, p.bits().clone()))
            .collect::<Vec<_>>()
            .cmp(
                &b.0.generators()
                    .map(|(s, p)| (s, p.bits().clone()))
                    .collect::<Vec<_>>(),
            )
    });
    Ok(out)
}

/// The six single-qubit stabilizer states `|0⟩, |1⟩, |+⟩, |−⟩, |+i⟩, |−i⟩`.
#[must_use]
pub fn six_axis_states() -> [StateVector; 6] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let make = |a: Complex64, b: Complex64| {
        StateVector::from_unnormalized(1, vec![a, b]).expect("nonzero")
    };
    [
        StateVector::basis_state(1, 0),
        StateVector::basis_state(1, 1),
        make(c(h, 0.0), c(h, 0.0)),
        make(c(h, 0.0), c(-h, 0.0)),
        make(c(h, 0.0), c(0.0, h)),
        make(c(h, 0.0), c(0.0, -h)),
    ]
}

/// Images of the computational basis under a circuit (the unitary's
/// columns), for cross-checking tableau-level conjugation.
#[must_use]
pub fn circuit_columns(n: usize, gates: &[Gate]) -> Vec<StateVector> {
    (0..1u64 << n)
        .map(|j| StateVector::basis_state(n, j).applied(gates))
        .collect()
}
