//! The spanning test and its exact reference values.
//!
//! One trial at qubit count `n`: draw a uniform Clifford `C`, prepare
//! `C|ψ⟩`, take `K` difference samples (XOR of two computational-basis
//! measurements each), and check whether they span `F_2^n`. Averaged over
//! `C`, the spanning probability of a stabilizer input is exactly
//!
//! ```text
//! Q(n,0) · Π_{j=0}^{n-1} (1 - 2^{j-K})
//! ```
//!
//! where `Q(n,k)` is the fraction of Lagrangian subspaces whose
//! intersection with the pure-Z space has dimension `k`. Both factors are
//! computed exactly over big rationals here and serve as the oracle for
//! the Monte Carlo estimator.

use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{spans_full, BitVec};
use crate::statevec::{BornSampler, CharDist, StateVector};
use crate::tableau::{CliffordTableau, StabilizerState};

/// A state preparation fed into spanning trials: given the sampled
/// Clifford, produce something that can emit computational-basis samples
/// of `C|ψ⟩`.
pub trait StateSource: Sync {
    fn n(&self) -> usize;
    fn prepared(&self, c: &CliffordTableau) -> PreparedState;
    /// Short human-readable description for reports.
    fn describe(&self) -> String;
}

/// A prepared `C|ψ⟩` ready for repeated computational-basis sampling.
pub enum PreparedState {
    /// Uniform over an affine subspace (stabilizer inputs).
    Affine {
        particular: BitVec,
        basis: Vec<BitVec>,
    },
    /// Arbitrary Born distribution (dense inputs).
    Dense(BornSampler),
}

impl PreparedState {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        match self {
            PreparedState::Affine { particular, basis } => {
                let mut x = particular.clone();
                for b in basis {
                    if rng.random::<bool>() {
                        x.xor_assign(b);
                    }
                }
                x
            }
            PreparedState::Dense(sampler) => sampler.sample(rng),
        }
    }

    /// XOR of two independent samples — one difference sample, two copies.
    pub fn diff_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let a = self.sample(rng);
        let b = self.sample(rng);
        a.xor(&b)
    }
}

/// Stabilizer input, sampled exactly at the tableau level.
pub struct TableauSource {
    state: StabilizerState,
    label: String,
}

impl TableauSource {
    #[must_use]
    pub fn new(state: StabilizerState, label: impl Into<String>) -> Self {
        Self {
            state,
            label: label.into(),
        }
    }
}

impl StateSource for TableauSource {
    fn n(&self) -> usize {
        self.state.n()
    }

    fn prepared(&self, c: &CliffordTableau) -> PreparedState {
        let (particular, basis) = self.state.apply_clifford(c).born_support();
        PreparedState::Affine { particular, basis }
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Dense input: the sampled Clifford is synthesized into gates and applied
/// to the amplitude vector.
pub struct DenseSource {
    state: StateVector,
    label: String,
}

impl DenseSource {
    #[must_use]
    pub fn new(state: StateVector, label: impl Into<String>) -> Self {
        Self {
            state,
            label: label.into(),
        }
    }

    #[must_use]
    pub fn state(&self) -> &StateVector {
        &self.state
    }
}

impl StateSource for DenseSource {
    fn n(&self) -> usize {
        self.state.n()
    }

    fn prepared(&self, c: &CliffordTableau) -> PreparedState {
        let rotated = self.state.applied(&c.synthesize());
        PreparedState::Dense(BornSampler::new(&rotated))
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// One spanning trial: fresh Clifford, `k` difference samples, span check.
pub fn spanning_trial<R: Rng + ?Sized>(source: &dyn StateSource, k: usize, rng: &mut R) -> bool {
    let n = source.n();
    debug_assert!(k >= n);
    let c = CliffordTableau::random(n, rng);
    let prep = source.prepared(&c);
    let samples: Vec<BitVec> = (0..k).map(|_| prep.diff_sample(rng)).collect();
    spans_full(&samples, n)
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub spanned: bool,
    pub copies_used: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub state: String,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub spanned: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub copies_used: usize,
    pub seed: u64,
}

/// Monte Carlo estimate of the average spanning probability.
///
/// Trial `i` uses an independent RNG stream derived from `(seed, i)`, so
/// results are identical for any worker-thread count.
pub fn estimate_avg_spanning(
    source: &dyn StateSource,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<(EstimateReport, Vec<TrialRecord>)> {
    let n = source.n();
    if k < n {
        return Err(Error::ParamRange {
            name: "k",
            value: k.to_string(),
            range: format!("must be at least n = {n}"),
        });
    }
    if trials == 0 {
        return Err(Error::ParamRange {
            name: "trials",
            value: "0".into(),
            range: "must be positive".into(),
        });
    }
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            TrialRecord {
                trial,
                spanned: spanning_trial(source, k, &mut rng),
                copies_used: 2 * k,
            }
        })
        .collect();
    let spanned = records.iter().filter(|r| r.spanned).count();
    let estimate = spanned as f64 / trials as f64;
    let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok((
        EstimateReport {
            state: source.describe(),
            n,
            k,
            trials,
            spanned,
            estimate,
            std_error,
            copies_used: records.iter().map(|r| r.copies_used).sum(),
            seed,
        },
        records,
    ))
}

/// Write trial records as CSV (`trial,spanned,copies_used`).
pub fn write_trace_csv<W: Write>(records: &[TrialRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "trial,spanned,copies_used")?;
    for r in records {
        writeln!(w, "{},{},{}", r.trial, u8::from(r.spanned), r.copies_used)?;
    }
    Ok(())
}

/// Run a closure inside a dedicated rayon pool of `workers` threads
/// (global pool if `None`).
pub fn with_worker_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("worker pool")
            .install(f),
        None => f(),
    }
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// Gaussian binomial coefficient over F_2: the number of `k`-dimensional
/// subspaces of `F_2^n`.
#[must_use]
pub fn gaussian_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= pow2(n - i) - BigUint::one();
        den *= pow2(i + 1) - BigUint::one();
    }
    num / den
}

/// Number of Lagrangian subspaces of `F_2^{2n}`: `Π_{i=1..n} (2^i + 1)`.
#[must_use]
pub fn total_lagrangians(n: u64) -> BigUint {
    (1..=n).map(|i| pow2(i) + BigUint::one()).product()
}

/// Number of Lagrangians whose intersection with the pure-Z space has
/// dimension exactly `k`.
#[must_use]
pub fn kappa(n: u64, k: u64) -> BigUint {
    let m = n - k;
    gaussian_binomial(n, k) * pow2(m * (m + 1) / 2)
}

/// `Q(n, k) = κ(n, k) / T(n)`: the probability that a uniform Lagrangian
/// meets the pure-Z space in dimension exactly `k`.
#[must_use]
pub fn q_nk(n: u64, k: u64) -> BigRational {
    BigRational::new(kappa(n, k).into(), total_lagrangians(n).into())
}

#[must_use]
pub fn q_nk_f64(n: u64, k: u64) -> f64 {
    q_nk(n, k).to_f64().expect("Q(n,k) fits in f64")
}

/// Probability that `k` uniform vectors span `F_2^n`:
/// `Π_{j=0}^{n-1} (1 - 2^{j-k})`.
#[must_use]
pub fn uniform_spanning_probability(n: u64, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..n {
        if j >= k {
            return BigRational::zero();
        }
        let term = BigRational::new((pow2(k) - pow2(j)).into(), pow2(k).into());
        acc *= term;
    }
    acc
}

/// Exact average spanning probability of a stabilizer input at `k >= n`
/// difference samples.
pub fn stabilizer_value(n: u64, k: u64) -> Result<BigRational> {
    if k < n {
        return Err(Error::ParamRange {
            name: "k",
            value: k.to_string(),
            range: format!("must be at least n = {n}"),
        });
    }
    Ok(q_nk(n, 0) * uniform_spanning_probability(n, k))
}

pub fn stabilizer_value_f64(n: u64, k: u64) -> Result<f64> {
    Ok(stabilizer_value(n, k)?
        .to_f64()
        .expect("stabilizer value fits in f64"))
}

/// Exact spanning probability of one specific stabilizer state: zero if
/// its Lagrangian meets the pure-Z space, else the uniform-vectors value.
#[must_use]
pub fn state_spanning_value(state: &StabilizerState, k: u64) -> BigRational {
    if state.z_intersection_dim() > 0 {
        BigRational::zero()
    } else {
        uniform_spanning_probability(state.n() as u64, k)
    }
}

/// Per-state union bound: `P_k(ψ) >= 1 - Σ_{y ∈ Z^×} ((1 + tr(ψP_y)^2)/2)^k`
/// with the sum over nonzero pure-Z labels.
#[must_use]
pub fn union_bound_lower(dist: &CharDist, k: u64) -> f64 {
    let n = dist.n();
    let scale = 2.0f64.powi(n as i32);
    let mut acc = 0.0;
    for b in 1..1u64 << n {
        let mut label = BitVec::zeros(2 * n);
        for q in 0..n {
            if b >> q & 1 == 1 {
                label.set(n + q, true);
            }
        }
        let tr_sq = scale * dist.prob_label(&label);
        acc += ((1.0 + tr_sq) / 2.0).powi(k as i32);
    }
    1.0 - acc
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub state: String,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub stabilizer_value: f64,
    /// Monte Carlo excess over the stabilizer value.
    pub excess: f64,
    /// Certified lower bound `Q(n,1)(1 - p_ψ(M)) - 2^{-n}` on the excess
    /// (valid for `n >= 3`, `k >= 5n`).
    pub lower_bound: f64,
    /// Mass `p_ψ(M)` of the completed high-weight Lagrangian.
    pub high_weight_mass: f64,
}

/// Estimate the spanning excess of a dense state over the stabilizer value
/// and compare it with the certified lower bound.
pub fn gap_diagnostic(
    state: &StateVector,
    label: impl Into<String>,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<GapReport> {
    let n = state.n();
    let source = DenseSource::new(state.clone(), label.into());
    let (report, _) = estimate_avg_spanning(&source, k, trials, seed)?;
    let dist = state.char_dist();
    let lagrangian = dist.high_weight_lagrangian()?;
    let mass = dist.subspace_weight(&lagrangian)?;
    let stab = stabilizer_value_f64(n as u64, k as u64)?;
    let lower = q_nk_f64(n as u64, 1) * (1.0 - mass) - 0.5f64.powi(n as i32);
    Ok(GapReport {
        state: source.describe(),
        n,
        k,
        trials,
        seed,
        estimate: report.estimate,
        std_error: report.std_error,
        stabilizer_value: stab,
        excess: report.estimate - stab,
        lower_bound: lower,
        high_weight_mass: mass,
    })
}

/// Hoeffding trial count for additive error `epsilon` at confidence
/// `1 - delta`: `ceil(ln(2/δ) / (2 ε^2))`.
pub fn hoeffding_trials(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::ParamRange {
            name: "epsilon",
            value: epsilon.to_string(),
            range: "(0, 1)".into(),
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParamRange {
            name: "delta",
            value: delta.to_string(),
            range: "(0, 1)".into(),
        });
    }
    Ok(((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil() as usize)
}

/// Decimal expansion of a rational to `digits` fractional digits
/// (truncated), for stable report formatting.
#[must_use]
pub fn rational_decimal(x: &BigRational, digits: u32) -> String {
    let sign = if x.is_negative() { "-" } else { "" };
    let abs = x.abs();
    let scale = BigUint::from(10u32).pow(digits);
    let scaled = (abs.numer().to_biguint().unwrap() * &scale) / abs.denom().to_biguint().unwrap();
    let s = scaled.to_string();
    if s.len() <= digits as usize {
        format!("{sign}0.{:0>width$}", s, width = digits as usize)
    } else {
        let (int, frac) = s.split_at(s.len() - digits as usize);
        format!("{sign}{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;
    use crate::statevec::enumerate_stabilizer_states;
    use num_bigint::BigInt;

    fn ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn lagrangian_counts() {
        assert_eq!(total_lagrangians(2), BigUint::from(15u32));
        assert_eq!(gaussian_binomial(4, 2), BigUint::from(35u32));
        // κ(n, ·) partitions the Lagrangians.
        for n in 1..=6u64 {
            let total: BigUint = (0..=n).map(|k| kappa(n, k)).sum();
            assert_eq!(total, total_lagrangians(n), "n = {n}");
        }
    }

    #[test]
    fn q_fraction_table() {
        assert_eq!(q_nk(2, 0), ratio(8, 15));
        assert_eq!(q_nk(2, 1), ratio(2, 5));
        assert_eq!(q_nk(2, 2), ratio(1, 15));
        assert_eq!(q_nk(3, 1), ratio(56, 135));
    }

    #[test]
    fn q_n1_relation() {
        // Q(n,1) = (2^n - 1)/2^n · Q(n,0).
        for n in 1..=20u64 {
            let lhs = q_nk(n, 1);
            let rhs =
                q_nk(n, 0) * BigRational::new((pow2(n) - BigUint::one()).into(), pow2(n).into());
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    /// Π(1 - 2^{j-k}) at n = k = 2 equals the fraction of invertible 2x2
    /// binary matrices, counted by brute force.
    #[test]
    fn spanning_product_counts_invertible_matrices() {
        let invertible = (0..16u64)
            .filter(|bits| {
                let mut m = BitMatrix::zeros(2, 2);
                for (pos, (r, c)) in [(0, 0), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
                    m.set(*r, *c, bits >> pos & 1 == 1);
                }
                m.inverse().is_some()
            })
            .count();
        assert_eq!(invertible, 6);
        assert_eq!(uniform_spanning_probability(2, 2), ratio(6, 16));
    }

    #[test]
    fn stabilizer_value_reference_points() {
        assert_eq!(stabilizer_value(1, 1).unwrap(), ratio(1, 3));
        let v = stabilizer_value(2, 10).unwrap();
        assert_eq!(v, ratio(174_251, 327_680));
        let f = v.to_f64().unwrap();
        assert!((f - 0.531_771_850_6).abs() < 1e-9, "{f}");
        assert!(matches!(
            stabilizer_value(3, 2),
            Err(Error::ParamRange { .. })
        ));
    }

    /// The closed form is also `Π_{j=1}^{n} (1 - 2^{j-1-k})/(1 + 2^{-j})`.
    #[test]
    fn stabilizer_value_alternate_product() {
        for n in 1..=6u64 {
            for k in [n, n + 3, 5 * n] {
                let mut alt = BigRational::one();
                for j in 1..=n {
                    let num = BigRational::one()
                        - BigRational::new(BigInt::one(), pow2(k + 1 - j).into());
                    let den = BigRational::one() + BigRational::new(BigInt::one(), pow2(j).into());
                    alt *= num / den;
                }
                assert_eq!(stabilizer_value(n, k).unwrap(), alt, "n={n} k={k}");
            }
        }
    }

    /// Averaging the per-state value over every stabilizer state must give
    /// the closed form exactly; the Z-intersection histogram must match
    /// κ(n, ·) scaled to the state count.
    #[test]
    fn per_state_values_average_to_closed_form() {
        for (n, scale) in [(2u64, 4u64), (3, 8)] {
            let states = enumerate_stabilizer_states(n as usize).unwrap();
            // Each Lagrangian carries 2^n sign choices.
            assert_eq!(
                states.len() as u64,
                scale * total_lagrangians(n).to_u64().unwrap()
            );
            let mut hist = vec![0u64; n as usize + 1];
            let mut acc = BigRational::zero();
            for (s, _) in &states {
                hist[s.z_intersection_dim()] += 1;
                acc += state_spanning_value(s, 5 * n);
            }
            for (k, &count) in hist.iter().enumerate() {
                assert_eq!(
                    BigUint::from(count),
                    kappa(n, k as u64) * pow2(n),
                    "n={n} k={k}"
                );
            }
            let avg = acc / BigRational::from(BigInt::from(states.len() as u64));
            assert_eq!(avg, stabilizer_value(n, 5 * n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form_small() {
        let source = TableauSource::new(StabilizerState::zero_state(2), "zero");
        let (report, records) = estimate_avg_spanning(&source, 2, 20_000, 99).unwrap();
        assert_eq!(records.len(), 20_000);
        assert_eq!(report.copies_used, 20_000 * 4);
        let exact = stabilizer_value_f64(2, 2).unwrap();
        assert_eq!(uniform_spanning_probability(2, 2) * q_nk(2, 0), ratio(1, 5));
        assert!(
            (report.estimate - exact).abs() < 4.0 * report.std_error.max(1e-3),
            "estimate {} vs exact {exact}",
            report.estimate
        );
    }

    #[test]
    fn estimates_are_reproducible_across_pools() {
        let source = TableauSource::new(StabilizerState::zero_state(3), "zero");
        let (a, _) = with_worker_pool(Some(1), || {
            estimate_avg_spanning(&source, 15, 2_000, 7).unwrap()
        });
        let (b, _) = with_worker_pool(Some(4), || {
            estimate_avg_spanning(&source, 15, 2_000, 7).unwrap()
        });
        assert_eq!(a.spanned, b.spanned);
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn union_bound_for_t_states() {
        // All nonzero pure-Z correlations of |T⟩^{⊗n} vanish, so the bound
        // is 1 - (2^n - 1) 2^{-k}.
        let t3 = StateVector::t_state_power(3);
        let d = t3.char_dist();
        let k = 15;
        let expect = 1.0 - 7.0 * 0.5f64.powi(15);
        assert!((union_bound_lower(&d, k) - expect).abs() < 1e-12);
    }

    #[test]
    fn hoeffding_reference_point() {
        assert_eq!(hoeffding_trials(0.05, 0.05).unwrap(), 738);
        assert!(hoeffding_trials(0.0, 0.5).is_err());
    }

    #[test]
    fn trace_csv_format() {
        let records = vec![
            TrialRecord {
                trial: 0,
                spanned: true,
                copies_used: 30,
            },
            TrialRecord {
                trial: 1,
                spanned: false,
                copies_used: 30,
            },
        ];
        let mut buf = Vec::new();
        write_trace_csv(&records, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "trial,spanned,copies_used\n0,1,30\n1,0,30\n"
        );
    }

    #[test]
    fn gap_report_reference_bound() {
        // For |T⟩^{⊗3}: p_M = 1/8, so the bound is 49/135 - 1/8 = 257/1080.
        let t3 = StateVector::t_state_power(3);
        let report = gap_diagnostic(&t3, "T^3", 15, 2_000, 5).unwrap();
        assert!((report.high_weight_mass - 0.125).abs() < 1e-12);
        let expect = 257.0 / 1080.0;
        assert!((report.lower_bound - expect).abs() < 1e-12);
        assert!(report.excess > report.lower_bound - 4.0 * report.std_error);
    }

    #[test]
    fn rational_decimal_formatting() {
        assert_eq!(rational_decimal(&ratio(1, 3), 6), "0.333333");
        assert_eq!(rational_decimal(&ratio(174_251, 327_680), 7), "0.5317718");
        assert_eq!(rational_decimal(&ratio(-1, 8), 3), "-0.125");
        assert_eq!(rational_decimal(&ratio(5, 4), 2), "1.25");
    }
}
