//! Quadratic-time reference scans written directly from the rule
//! definitions. They sum residuals term by term instead of differencing
//! prefix sums and serve as cross-checks for the fast implementations.

use crate::problems::SpectralProblem;
use crate::sequence_model::NoisyObservation;

fn residual(y: &[f64], from: usize, to: usize) -> f64 {
    y[from..to].iter().map(|v| v * v).sum()
}

/// `max_{1<=m<=m_cap} min{k <= m : sqrt(sum_{j=k+1}^m y_j^2) <= tau sqrt(m) delta}`
/// by a double loop.
pub fn dp_modified_naive(obs: &NoisyObservation, tau: f64, m_cap: usize) -> usize {
    let mut best = 0;
    for m in 1..=m_cap {
        let bound = tau * (m as f64).sqrt() * obs.delta;
        let mut km = m;
        for k in 0..=m {
            if residual(&obs.y_obs, k, m).sqrt() <= bound {
                km = k;
                break;
            }
        }
        best = best.max(km);
    }
    best
}

/// Balancing principle by exhaustive pairwise comparison.
pub fn balancing_naive(
    p: &SpectralProblem,
    obs: &NoisyObservation,
    kappa: f64,
    m_cap: usize,
) -> usize {
    let coeff: Vec<f64> = obs.y_obs.iter().zip(&p.sigma).map(|(y, s)| y / s).collect();
    let bound = |m: usize| {
        let v: f64 = p.sigma[..m].iter().map(|s| 1.0 / (s * s)).sum();
        kappa * obs.delta * v.sqrt()
    };
    (0..=m_cap)
        .find(|&k| ((k + 1)..=m_cap).all(|m| residual(&coeff, k, m).sqrt() <= bound(m)))
        .unwrap_or(m_cap)
}
