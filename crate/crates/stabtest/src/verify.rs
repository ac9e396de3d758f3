//! Named verification suites.
//!
//! Each suite bundles a handful of cross-checks between independent
//! computation routes (closed forms vs enumeration, tensor identities vs
//! dense linear algebra, Monte Carlo vs exact values) and reports one
//! pass/fail line per check. The CLI exposes them via `verify <suite>`;
//! the heavyweight versions of the same checks live in the acceptance
//! test target.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commutant::{
    counterexample_copies, dense_r_operator, enumerate_orthogonal, enumerate_stochastic,
    gram_entry, projector_expectation, projector_trace, pt_spectrum_check, r_expectation, r_trace,
    stochastic_count, symmetric_dim, trace_sum_formula, OrthogonalMatrix,
};
use crate::error::{Error, Result};
use crate::gf2::all_subspaces;
use crate::spanning::{
    estimate_avg_spanning, gap_diagnostic, q_nk, q_nk_f64, stabilizer_value, state_spanning_value,
    uniform_spanning_probability, DenseSource, TableauSource,
};
use crate::statevec::{enumerate_stabilizer_states, six_axis_states, StateVector};
use crate::tableau::{CliffordTableau, StabilizerState};
use crate::tester::{test_stabilizer, Decision};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckResult>) -> Self {
        Self {
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// One line per check, plus a suite summary line.
    #[must_use]
    pub fn text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "pass" } else { "FAIL" };
            writeln!(out, "[{tag}] {}: {}", c.name, c.detail).unwrap();
        }
        let tag = if self.passed { "pass" } else { "FAIL" };
        writeln!(
            out,
            "[{tag}] suite {} ({}/{} checks)",
            self.suite,
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        )
        .unwrap();
        out
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "spanning-value",
    "q-limit",
    "tester",
    "rp-identity",
    "fidelity-bound",
    "census",
    "pt-law",
    "counterexample",
    "moment",
    "gap",
    "all",
];

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Run one named suite. `seed` feeds the stochastic suites; the purely
/// algebraic ones ignore it.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "spanning-value" => Ok(spanning_value_suite(seed)?),
        "q-limit" => Ok(q_limit_suite()),
        "tester" => Ok(tester_suite(seed)?),
        "rp-identity" => Ok(rp_identity_suite(seed)?),
        "fidelity-bound" => Ok(fidelity_bound_suite(seed)?),
        "census" => Ok(census_suite()?),
        "pt-law" => Ok(pt_law_suite()?),
        "counterexample" => Ok(counterexample_suite(seed)?),
        "moment" => Ok(moment_suite()?),
        "gap" => Ok(gap_suite(seed)?),
        "all" => {
            let mut checks = Vec::new();
            for suite in SUITE_NAMES.iter().filter(|s| **s != "all") {
                checks.extend(run_suite(suite, seed)?.checks);
            }
            Ok(SuiteReport::new("all", checks))
        }
        _ => Err(Error::Parse {
            what: "suite name",
            input: name.into(),
        }),
    }
}

fn spanning_value_suite(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();

    // Exact: averaging the per-state spanning probability over every
    // 2-qubit stabilizer state reproduces the closed form.
    let states = enumerate_stabilizer_states(2)?;
    let total: BigRational = states.iter().map(|(s, _)| state_spanning_value(s, 6)).sum();
    let mean = total / BigRational::from_integer(states.len().into());
    let exact = stabilizer_value(2, 6)?;
    checks.push(check(
        "exact-average",
        mean == exact,
        format!(
            "mean over {} states = {mean}, closed form {exact}",
            states.len()
        ),
    ));

    // The K = n base case counts invertible matrices.
    let base = uniform_spanning_probability(2, 2);
    let expect = BigRational::new(6.into(), 16.into());
    checks.push(check(
        "base-case",
        base == expect,
        format!("uniform spanning probability (2,2) = {base}"),
    ));

    // Monte Carlo on the zero state agrees with the closed form.
    let source = TableauSource::new(StabilizerState::zero_state(3), "stab:zero");
    let (report, _) = estimate_avg_spanning(&source, 15, 20_000, seed)?;
    let value = crate::spanning::stabilizer_value_f64(3, 15)?;
    let dev = (report.estimate - value).abs();
    let band = 4.0 * report.std_error;
    checks.push(check(
        "monte-carlo",
        dev <= band,
        format!(
            "|{:.5} - {value:.5}| = {dev:.5} <= {band:.5}",
            report.estimate
        ),
    ));

    Ok(SuiteReport::new("spanning-value", checks))
}

fn q_limit_suite() -> SuiteReport {
    let mut checks = Vec::new();

    let mut decreasing = true;
    let mut prev = f64::INFINITY;
    for n in 1..=20 {
        let q = q_nk_f64(n, 0);
        if q >= prev {
            decreasing = false;
        }
        prev = q;
    }
    checks.push(check(
        "monotone",
        decreasing,
        "Q(n,0) strictly decreasing for n = 1..20",
    ));

    // Convergence to the limit 0.41942244179... is geometric (~2^-n):
    // n = 20 still sits 4e-7 above, n = 40 is inside the 8-decimal window.
    let q20 = q_nk_f64(20, 0);
    checks.push(check(
        "value-at-20",
        (q20 - 0.419_422_841_787_645_2).abs() < 1e-12,
        format!("Q(20,0) = {q20:.15}"),
    ));
    let q40 = q_nk_f64(40, 0);
    checks.push(check(
        "limit-window",
        (0.41942244..=0.41942245).contains(&q40),
        format!("Q(40,0) = {q40:.10}"),
    ));

    let mut relation = true;
    for n in 1..=12u64 {
        let lhs = q_nk(n, 1);
        let pow = BigRational::new(
            ((BigUint::one() << n) - BigUint::one()).into(),
            (BigUint::one() << n).into(),
        );
        if lhs != pow * q_nk(n, 0) {
            relation = false;
        }
    }
    checks.push(check(
        "defect-one-ratio",
        relation,
        "Q(n,1) = (1 - 2^-n) Q(n,0) for n = 1..12",
    ));

    SuiteReport::new("q-limit", checks)
}

fn tester_suite(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();

    // Below the minimum distinguishable epsilon the gap is non-positive
    // and the tester must refuse to run.
    match test_stabilizer(
        &TableauSource::new(StabilizerState::zero_state(3), "stab:zero"),
        0.30,
        0.05,
        seed,
    ) {
        Err(Error::GapNonPositive { min_epsilon, .. }) => {
            let expect = 135.0 / 448.0;
            checks.push(check(
                "gap-refusal",
                (min_epsilon - expect).abs() < 1e-12,
                format!("min epsilon = {min_epsilon:.6} (= 135/448)"),
            ));
        }
        other => checks.push(check(
            "gap-refusal",
            false,
            format!("expected gap error, got {other:?}"),
        )),
    }

    let verdict = test_stabilizer(
        &TableauSource::new(StabilizerState::zero_state(3), "stab:zero"),
        0.35,
        0.05,
        seed,
    )?;
    checks.push(check(
        "completeness",
        verdict.decision == Decision::Stabilizer && verdict.copies_used == 30 * verdict.trials,
        format!(
            "zero state accepted ({} trials, {} copies, estimate {:.4} <= {:.4})",
            verdict.trials, verdict.copies_used, verdict.estimate, verdict.threshold
        ),
    ));

    let far = test_stabilizer(
        &DenseSource::new(StateVector::t_state_power(3), "product:T^3"),
        0.35,
        0.05,
        seed,
    )?;
    checks.push(check(
        "soundness",
        far.decision == Decision::Far,
        format!(
            "T^3 flagged ({} trials, estimate {:.4} > {:.4})",
            far.trials, far.estimate, far.threshold
        ),
    ));

    Ok(SuiteReport::new("tester", checks))
}

fn rp_identity_suite(seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_dev = 0.0f64;
    let mut count = 0usize;
    for n in [2usize, 3] {
        let subspaces = all_subspaces(n);
        for _ in 0..10 {
            let psi = StateVector::haar_random(n, &mut rng)?;
            let dist = psi.char_dist();
            for h in &subspaces {
                let lhs = dist.diff_subspace_weight(h)?;
                let rhs = dist.dual_weight(h)?;
                max_dev = max_dev.max((lhs - rhs).abs());
                count += 1;
            }
        }
    }
    let checks = vec![check(
        "marginal-dual",
        max_dev <= 1e-10,
        format!("max |r(H) - |H| p(0 x H-perp)| = {max_dev:.2e} over {count} pairs"),
    )];
    Ok(SuiteReport::new("rp-identity", checks))
}

fn fidelity_bound_suite(seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_margin = f64::INFINITY;
    let mut isotropic_ok = true;
    let mut count = 0usize;
    for n in 1..=3usize {
        let mut states = Vec::new();
        for _ in 0..6 {
            states.push(StateVector::haar_random(n, &mut rng)?);
        }
        states.push(StateVector::t_state_power(n));
        for _ in 0..3 {
            let gates = CliffordTableau::random(n, &mut rng).synthesize();
            let mut s = StateVector::zero_state(n);
            s.apply_circuit(&gates);
            states.push(s);
        }
        for psi in &states {
            let dist = psi.char_dist();
            if dist.high_weight_span().is_err() {
                isotropic_ok = false;
                continue;
            }
            let lagrangian = dist.high_weight_lagrangian()?;
            let mass = dist.subspace_weight(&lagrangian)?;
            let fidelity = psi.stabilizer_fidelity()?;
            worst_margin = worst_margin.min(fidelity - mass);
            count += 1;
        }
    }
    let checks = vec![
        check(
            "high-weight-isotropic",
            isotropic_ok,
            "high-weight sets span isotropic subspaces",
        ),
        check(
            "fidelity-floor",
            worst_margin >= -1e-10,
            format!("min (F_stab - p(M)) = {worst_margin:.3e} over {count} states"),
        ),
    ];
    Ok(SuiteReport::new("fidelity-bound", checks))
}

fn census_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();

    let mut counts_ok = true;
    let mut detail = String::new();
    for t in 1..=6usize {
        let got = enumerate_stochastic(t)?.len() as u64;
        if got != stochastic_count(t as u32) {
            counts_ok = false;
        }
        detail.push_str(&format!("{got} "));
    }
    checks.push(check(
        "subspace-counts",
        counts_ok,
        format!("t = 1..6: {}", detail.trim_end()),
    ));

    let expect = [1usize, 2, 6, 24, 120, 1440];
    let mut orth_ok = true;
    for t in 1..=6usize {
        let os = enumerate_orthogonal(t)?;
        if os.len() != expect[t - 1] {
            orth_ok = false;
        }
        if t <= 5 && !os.iter().all(OrthogonalMatrix::is_permutation) {
            orth_ok = false;
        }
    }
    checks.push(check(
        "orthogonal-counts",
        orth_ok,
        "|O_t| = t! for t <= 5; |O_6| = 1440",
    ));

    let mut gram_ok = true;
    for (t, n) in [(4usize, 1usize), (3, 2)] {
        let subs = enumerate_stochastic(t)?;
        let dense: Vec<_> = subs
            .iter()
            .map(|s| dense_r_operator(s, n))
            .collect::<Result<_>>()?;
        for (i, a) in subs.iter().enumerate() {
            for (j, b) in subs.iter().enumerate() {
                let numeric = (dense[i].transpose() * &dense[j]).trace();
                if BigUint::from(numeric.round() as u64) != gram_entry(a, b, n as u64) {
                    gram_ok = false;
                }
            }
        }
    }
    checks.push(check(
        "gram-dense",
        gram_ok,
        "Gram = |T intersect T'|^n against dense products at (n,t) = (1,4), (2,3)",
    ));

    let mut trace_ok = true;
    for (t, n) in [(2u32, 1u64), (3, 1), (2, 2)] {
        let total: BigUint = enumerate_stochastic(t as usize)?
            .iter()
            .map(|s| r_trace(s, n))
            .sum();
        if total != trace_sum_formula(t, n) {
            trace_ok = false;
        }
    }
    checks.push(check(
        "trace-census",
        trace_ok,
        "sum of tr R(T) matches 2^n prod (2^n + 2^k)",
    ));

    Ok(SuiteReport::new("census", checks))
}

fn pt_law_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();

    let mut law_ok = true;
    let mut max_dev = 0.0f64;
    let mut cases = 0usize;
    for t in 2..=5usize {
        for o in enumerate_orthogonal(t)? {
            for subset in 0..1u32 << t {
                for n in [1usize, 2] {
                    let report = pt_spectrum_check(&o, subset, n);
                    law_ok &= report.passed;
                    max_dev = max_dev.max(report.max_deviation);
                    cases += 1;
                }
            }
        }
    }
    checks.push(check(
        "spectrum-law",
        law_ok,
        format!("max deviation {max_dev:.2e} over {cases} (O, S, n) cases"),
    ));

    let mut symmetric = true;
    for t in 1..=6usize {
        for o in enumerate_orthogonal(t)? {
            let full = (1u32 << t) - 1;
            for subset in 0..=full {
                if o.principal_kernel_dim(subset) != o.principal_kernel_dim(full ^ subset) {
                    symmetric = false;
                }
            }
        }
    }
    checks.push(check(
        "kernel-symmetry",
        symmetric,
        "dim ker O_SS = dim ker O_S'S' on complements, t <= 6",
    ));

    let mut singular_ok = true;
    for t in 1..=6usize {
        for o in enumerate_orthogonal(t)? {
            if o.is_identity() != o.find_singular_subset().is_none() {
                singular_ok = false;
            }
        }
    }
    checks.push(check(
        "singular-subsets",
        singular_ok,
        "every non-identity O has a singular principal submatrix, t <= 6",
    ));

    Ok(SuiteReport::new("pt-law", checks))
}

fn counterexample_suite(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let os = enumerate_orthogonal(6)?;

    let single = projector_expectation(&os, &counterexample_copies(1)?)?;
    checks.push(check(
        "annihilated-1q",
        single.abs() <= 1e-10,
        format!("six-axis product expectation = {single:.2e}"),
    ));

    let padded = projector_expectation(&os, &counterexample_copies(2)?)?;
    checks.push(check(
        "annihilated-2q",
        padded.abs() <= 1e-10,
        format!("zero-padded expectation = {padded:.2e}"),
    ));

    let perms: Vec<_> = os.iter().filter(|o| o.is_permutation()).cloned().collect();
    let sym = projector_expectation(&perms, &counterexample_copies(1)?)?;
    checks.push(check(
        "symmetric-positive",
        sym > 1e-4,
        format!("symmetric-group average = {sym:.6}"),
    ));

    // The expectation is a commutant invariant: applying one Clifford to
    // every copy must not move it.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orbit_ok = true;
    let mut orbit_max = 0.0f64;
    for _ in 0..3 {
        let gates = CliffordTableau::random(1, &mut rng).synthesize();
        let copies: Vec<StateVector> = six_axis_states()
            .iter()
            .map(|s| {
                let mut c = s.clone();
                c.apply_circuit(&gates);
                c
            })
            .collect();
        let v = projector_expectation(&os, &copies)?;
        orbit_max = orbit_max.max(v.abs());
        orbit_ok &= v.abs() <= 1e-10;
    }
    checks.push(check(
        "clifford-orbit",
        orbit_ok,
        format!("max |expectation| over rotated copies = {orbit_max:.2e}"),
    ));

    let rank = projector_trace(&os, 1)?;
    checks.push(check(
        "rank-deficit",
        rank == 6 && symmetric_dim(1, 6) == 7,
        format!("rank Pi_O = {rank} < dim Sym = {}", symmetric_dim(1, 6)),
    ));

    Ok(SuiteReport::new("counterexample", checks))
}

fn moment_suite() -> Result<SuiteReport> {
    // <S|^t R(T) |S>^t = 1 for every stabilizer state and every T.
    let states = enumerate_stabilizer_states(2)?;
    let mut max_dev = 0.0f64;
    let mut cases = 0usize;
    for t in 2..=4usize {
        let subs = enumerate_stochastic(t)?;
        for (_, dense) in &states {
            let copies = vec![dense.clone(); t];
            for sub in &subs {
                let v = r_expectation(sub, &copies)?;
                max_dev = max_dev.max((v.re - 1.0).abs().max(v.im.abs()));
                cases += 1;
            }
        }
    }
    let checks = vec![check(
        "stabilizer-moments",
        max_dev <= 1e-9,
        format!("max |<R(T)> - 1| = {max_dev:.2e} over {cases} (T, S) pairs"),
    )];
    Ok(SuiteReport::new("moment", checks))
}

fn gap_suite(seed: u64) -> Result<SuiteReport> {
    let report = gap_diagnostic(
        &StateVector::t_state_power(3),
        "product:T^3",
        15,
        20_000,
        seed,
    )?;
    let expect_bound = 257.0 / 1080.0;
    let mut checks = Vec::new();
    checks.push(check(
        "bound-value",
        (report.lower_bound - expect_bound).abs() < 1e-12,
        format!(
            "certified excess bound = {:.6} (= 257/1080)",
            report.lower_bound
        ),
    ));
    let slack = 4.0 * report.std_error;
    checks.push(check(
        "excess-dominates",
        report.excess >= report.lower_bound - slack,
        format!(
            "measured excess {:.4} >= bound {:.4} - {slack:.4}",
            report.excess, report.lower_bound
        ),
    ));
    checks.push(check(
        "high-weight-mass",
        (report.high_weight_mass - 0.125).abs() < 1e-12,
        format!("p(M) = {:.6} (= 1/8)", report.high_weight_mass),
    ));
    Ok(SuiteReport::new("gap", checks))
}

// Suites are exercised end-to-end by the CLI and acceptance targets; the
// unit tests here only pin the plumbing.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_parse_error() {
        assert!(matches!(run_suite("bogus", 1), Err(Error::Parse { .. })));
    }

    #[test]
    fn quick_suites_pass() {
        for name in ["q-limit", "census", "moment"] {
            let report = run_suite(name, 1).unwrap();
            assert!(report.passed, "{}:\n{}", name, report.text());
        }
    }

    #[test]
    fn report_text_has_one_line_per_check() {
        let report = run_suite("q-limit", 1).unwrap();
        assert_eq!(report.text().lines().count(), report.checks.len() + 1);
        assert!(report.text().contains("[pass]"));
    }

    #[test]
    fn stochastic_suite_accepts_seed() {
        let report = run_suite("rp-identity", 7).unwrap();
        assert!(report.passed, "{}", report.text());
    }
}
