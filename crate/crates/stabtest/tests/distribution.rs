//! Distributional check on the random-Clifford sampler: applying a
//! uniform Clifford to |0^n> and recording the dimension of the
//! stabilizer group's intersection with the Z-only subgroup must follow
//! Q(n, k) exactly. A chi-square test against the closed form covers
//! n up to 6, far beyond the sizes where full state-frequency tests are
//! feasible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use stabtest::spanning::q_nk_f64;
use stabtest::tableau::{CliffordTableau, StabilizerState};

#[test]
fn z_intersection_dimension_follows_q_nk() {
    const SAMPLES: usize = 40_000;
    for n in 2..=6usize {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD15 + n as u64);
        let zero = StabilizerState::zero_state(n);
        let mut counts = vec![0usize; n + 1];
        for _ in 0..SAMPLES {
            let c = CliffordTableau::random(n, &mut rng);
            counts[zero.apply_clifford(&c).z_intersection_dim()] += 1;
        }

        // Merge the sparse upper tail so every bin has a healthy
        // expectation (Q(n,k) decays like 2^{-k^2}).
        let expected: Vec<f64> = (0..=n)
            .map(|k| SAMPLES as f64 * q_nk_f64(n as u64, k as u64))
            .collect();
        let mut exp_bins: Vec<f64> = Vec::new();
        let mut obs_bins: Vec<f64> = Vec::new();
        for k in 0..=n {
            if !exp_bins.is_empty() && *exp_bins.last().unwrap() < 8.0 {
                *exp_bins.last_mut().unwrap() += expected[k];
                *obs_bins.last_mut().unwrap() += counts[k] as f64;
            } else {
                exp_bins.push(expected[k]);
                obs_bins.push(counts[k] as f64);
            }
        }

        let statistic: f64 = exp_bins
            .iter()
            .zip(&obs_bins)
            .map(|(e, o)| (o - e) * (o - e) / e)
            .sum();
        let df = (exp_bins.len() - 1) as f64;
        let cutoff = ChiSquared::new(df).unwrap().inverse_cdf(0.999);
        assert!(
            statistic < cutoff,
            "n = {n}: chi-square {statistic:.2} >= {cutoff:.2} (df {df}), counts {counts:?}"
        );
    }
}
