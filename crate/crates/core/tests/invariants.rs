use proptest::prelude::*;

use specreg::rules::reference::{balancing_naive, dp_modified_naive};
use specreg::rules::{
    balancing, combined, det_strong, det_weak, dp_at_m, dp_modified, early_stop, lepski_direct,
    oracle_opt, oracle_strong, oracle_weak,
};
use specreg::sequence_model::{strong_error, weak_error, ErrorProfile};
use specreg::{IllPosedness, NoisyObservation, SpectralProblem};

/// Sorted positive singular values, truth, noise and noise level.
fn instance(max_dim: usize) -> impl Strategy<Value = (SpectralProblem, NoisyObservation)> {
    (1..=max_dim)
        .prop_flat_map(|d| {
            (
                prop::collection::vec(-4.0..0.0f64, d),
                prop::collection::vec(-3.0..3.0f64, d),
                prop::collection::vec(-3.0..3.0f64, d),
                -4.0..0.0f64,
            )
        })
        .prop_map(|(log_sigma, x, z, log_delta)| {
            let mut sigma: Vec<f64> = log_sigma.iter().map(|l| 10f64.powf(*l)).collect();
            sigma.sort_by(|a, b| b.total_cmp(a));
            let p = SpectralProblem::new("prop", sigma, x, IllPosedness::Synthetic).unwrap();
            let obs =
                NoisyObservation::from_parts(p.clean_data(), z, 10f64.powf(log_delta), 0).unwrap();
            (p, obs)
        })
}

fn direct(p: &SpectralProblem) -> SpectralProblem {
    SpectralProblem::new(
        "direct",
        vec![1.0; p.dim()],
        p.x_true.clone(),
        IllPosedness::Synthetic,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dp_matches_double_loop((_, obs) in instance(64), tau in 1.01..3.0f64) {
        let d = obs.dim();
        prop_assert_eq!(dp_modified(&obs, tau, d, false).unwrap().k, dp_modified_naive(&obs, tau, d));
    }

    #[test]
    fn dp_dominates_every_level((_, obs) in instance(64), tau in 1.01..3.0f64) {
        let d = obs.dim();
        let res = dp_modified(&obs, tau, d, true).unwrap();
        let trace = res.trace.unwrap();
        prop_assert_eq!(trace.len(), d);
        for m in 1..=d {
            let km = dp_at_m(&obs, tau, m).unwrap();
            prop_assert_eq!(trace[m - 1], km);
            prop_assert!(km <= m && km <= res.k);
        }
    }

    #[test]
    fn lepski_equals_dp_in_the_direct_case((p, obs) in instance(64), tau in 1.01..3.0f64) {
        let p = direct(&p);
        let obs = NoisyObservation::from_parts(p.clean_data(), obs.z, obs.delta, 0).unwrap();
        prop_assert_eq!(lepski_direct(&p, &obs, tau).unwrap(), dp_modified(&obs, tau, p.dim(), false).unwrap().k);
    }

    #[test]
    fn balancing_matches_pairwise_scan((p, obs) in instance(48), kappa in 1.01..5.0f64) {
        let d = p.dim();
        prop_assert_eq!(balancing(&p, &obs, kappa, d).unwrap(), balancing_naive(&p, &obs, kappa, d));
    }

    #[test]
    fn weak_oracle_never_exceeds_strong((p, obs) in instance(64)) {
        prop_assert!(oracle_weak(&p, &obs).unwrap() <= oracle_strong(&p, &obs).unwrap());
        prop_assert!(det_weak(&p, obs.delta).unwrap() <= det_strong(&p, obs.delta).unwrap());
    }

    #[test]
    fn combined_is_bounded_by_dp((_, obs) in instance(64), tau_min in 1.0..1.4f64) {
        let d = obs.dim();
        let com = combined(&obs, 1.5, tau_min, d).unwrap();
        prop_assert!(com.k <= dp_modified(&obs, 1.5, d, false).unwrap().k);
        prop_assert!(com.m_max.unwrap() <= early_stop(&obs, d).unwrap());
    }

    #[test]
    fn oracles_are_nearly_optimal((p, obs) in instance(64)) {
        let d = p.dim();
        let weak: Vec<f64> = (0..=d).map(|k| weak_error(&p, &obs, k).unwrap()).collect();
        let strong: Vec<f64> = (0..=d).map(|k| strong_error(&p, &obs, k).unwrap()).collect();
        for (errs, k) in [(&weak, oracle_weak(&p, &obs).unwrap()), (&strong, oracle_strong(&p, &obs).unwrap())] {
            if k >= 1 {
                let min = errs.iter().copied().fold(f64::INFINITY, f64::min);
                prop_assert!(min >= errs[k].min(errs[k - 1]) / 2f64.sqrt());
            }
        }
        let opt = oracle_opt(&p, &obs).unwrap();
        prop_assert!(strong.iter().all(|e| strong[opt] <= *e));
    }

    #[test]
    fn error_decomposition((p, obs) in instance(64)) {
        let prof = ErrorProfile::new(&p, &obs);
        for k in 0..=p.dim() {
            let var: f64 = (0..k).map(|j| (obs.delta * obs.z[j] / p.sigma[j]).powi(2)).sum();
            let bias: f64 = p.x_true[k..].iter().map(|x| x * x).sum();
            let e = strong_error(&p, &obs, k).unwrap();
            prop_assert!((e * e - var - bias).abs() <= 1e-9 * (var + bias).max(1e-300));
            prop_assert!((prof.strong(k) - e).abs() <= 1e-12 * e.max(1e-300));
            if k > 0 {
                prop_assert!(prof.strong_variance[k] >= prof.strong_variance[k - 1]);
                prop_assert!(prof.weak_bias[k] <= prof.weak_bias[k - 1]);
            }
        }
    }

    #[test]
    fn power_of_two_scaling_is_exact((p, obs) in instance(64), e in -20i32..20) {
        let c = 2f64.powi(e);
        let sp = SpectralProblem::new("s", p.sigma.clone(), p.x_true.iter().map(|x| x * c).collect(), IllPosedness::Synthetic).unwrap();
        let so = NoisyObservation::from_parts(sp.clean_data(), obs.z.clone(), obs.delta * c, 0).unwrap();
        let d = p.dim();
        let outputs = |p: &SpectralProblem, o: &NoisyObservation| (
            dp_modified(o, 1.5, d, false).unwrap().k,
            balancing(p, o, 4.0, d).unwrap(),
            early_stop(o, d).unwrap(),
            combined(o, 1.5, 1.2, d).unwrap().k,
            oracle_weak(p, o).unwrap(),
            oracle_strong(p, o).unwrap(),
            oracle_opt(p, o).unwrap(),
        );
        prop_assert_eq!(outputs(&p, &obs), outputs(&sp, &so));
    }
}
