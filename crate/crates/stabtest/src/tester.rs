//! The single-copy stabilizer property tester.
//!
//! For `n >= 3` qubits and proximity parameter `epsilon`, the tester runs
//! spanning trials at `K = 5n` difference samples and compares the Monte
//! Carlo average against `stabilizer_value(n, K) + g/2`, where
//!
//! ```text
//! g = Q(n,1) · epsilon - 2^{-n}
//! ```
//!
//! is the certified separation between stabilizer inputs and states with
//! stabilizer fidelity below `1 - epsilon`. The trial count is the
//! Hoeffding number `ceil(2 ln(2/δ) / g^2)`, so each side errs with
//! probability at most `delta`. `g` must be positive for the guarantee to
//! exist, which requires `epsilon > 3 · 2^{-n}`; smaller `epsilon` is
//! rejected up front as a structured error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spanning::{estimate_avg_spanning, q_nk_f64, stabilizer_value_f64, StateSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// Estimate at or below the threshold: consistent with a stabilizer
    /// state.
    Stabilizer,
    /// Estimate above the threshold: far from every stabilizer state.
    Far,
}

#[derive(Clone, Debug, Serialize)]
pub struct TestVerdict {
    pub state: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    /// Separation `g = Q(n,1)·epsilon - 2^{-n}`.
    pub gap: f64,
    /// Acceptance threshold `stabilizer_value + g/2`.
    pub threshold: f64,
    pub stabilizer_value: f64,
    pub trials: usize,
    /// Total single-copy state preparations consumed: `2K · trials`.
    pub copies_used: usize,
    pub estimate: f64,
    pub decision: Decision,
}

/// Number of trials the tester performs: `ceil(2 ln(2/δ) / g^2)`.
fn tester_trials(gap: f64, delta: f64) -> usize {
    (2.0 * (2.0 / delta).ln() / (gap * gap)).ceil() as usize
}

/// Run the tester. Errors on `n < 3`, parameters outside `(0, 1)`, or a
/// non-positive separation `g`.
pub fn test_stabilizer(
    source: &dyn StateSource,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<TestVerdict> {
    let n = source.n();
    if n < 3 {
        return Err(Error::ParamRange {
            name: "n",
            value: n.to_string(),
            range: "tester requires n >= 3".into(),
        });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::ParamRange {
            name: "epsilon",
            value: epsilon.to_string(),
            range: "(0, 1]".into(),
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParamRange {
            name: "delta",
            value: delta.to_string(),
            range: "(0, 1)".into(),
        });
    }
    let gap = q_nk_f64(n as u64, 1) * epsilon - 0.5f64.powi(n as i32);
    if gap <= 0.0 {
        let min_epsilon = 0.5f64.powi(n as i32) / q_nk_f64(n as u64, 1);
        return Err(Error::GapNonPositive {
            n,
            epsilon,
            gap,
            min_epsilon,
        });
    }
    let k = 5 * n;
    let trials = tester_trials(gap, delta);
    let value = stabilizer_value_f64(n as u64, k as u64)?;
    let threshold = value + gap / 2.0;
    let (report, _) = estimate_avg_spanning(source, k, trials, seed)?;
    debug_assert_eq!(report.copies_used, 2 * k * trials);
    let decision = if report.estimate <= threshold {
        Decision::Stabilizer
    } else {
        Decision::Far
    };
    Ok(TestVerdict {
        state: source.describe(),
        n,
        k,
        epsilon,
        delta,
        seed,
        gap,
        threshold,
        stabilizer_value: value,
        trials,
        copies_used: report.copies_used,
        estimate: report.estimate,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spanning::TableauSource;
    use crate::statevec::StateVector;
    use crate::tableau::StabilizerState;

    #[test]
    fn small_n_is_rejected() {
        let source = TableauSource::new(StabilizerState::zero_state(2), "zero");
        assert!(matches!(
            test_stabilizer(&source, 0.5, 0.05, 1),
            Err(Error::ParamRange { name: "n", .. })
        ));
    }

    #[test]
    fn non_positive_gap_is_a_structured_error() {
        // At n = 3, epsilon must exceed 3·2^{-3} = 0.375… in the limit;
        // exactly: epsilon > 2^{-3}/Q(3,1) = (1/8)/(56/135) = 135/448.
        let source = TableauSource::new(StabilizerState::zero_state(3), "zero");
        let err = test_stabilizer(&source, 0.3, 0.05, 1).unwrap_err();
        match err {
            Error::GapNonPositive {
                n,
                epsilon,
                gap,
                min_epsilon,
            } => {
                assert_eq!(n, 3);
                assert_eq!(epsilon, 0.3);
                assert!((gap - (-1.0 / 1800.0)).abs() < 1e-12, "gap = {gap}");
                assert!((min_epsilon - 135.0 / 448.0).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trial_count_formula() {
        // g = Q(6,1)·0.3 - 2^{-6}; trials = ceil(2 ln 40 / g^2).
        let g = q_nk_f64(6, 1) * 0.3 - 0.5f64.powi(6);
        let expect = (2.0 * (2.0_f64 / 0.05).ln() / (g * g)).ceil() as usize;
        assert_eq!(tester_trials(g, 0.05), expect);
        let source = TableauSource::new(StabilizerState::zero_state(6), "zero");
        let verdict = test_stabilizer(&source, 0.3, 0.05, 42).unwrap();
        assert_eq!(verdict.trials, expect);
        assert_eq!(verdict.copies_used, 2 * 30 * expect);
        assert_eq!(verdict.decision, Decision::Stabilizer);
    }

    #[test]
    fn far_state_is_flagged() {
        use crate::spanning::DenseSource;
        // |T⟩^{⊗4} has stabilizer fidelity cos^8(π/8) ≈ 0.53 < 1 - 0.35.
        let source = DenseSource::new(StateVector::t_state_power(4), "T^4");
        let verdict = test_stabilizer(&source, 0.35, 0.10, 7).unwrap();
        assert_eq!(verdict.decision, Decision::Far);
    }
}
