//! Balanced oracles and the error-minimizing truncation level. All of them
//! need the truth and are inaccessible in practice.

use crate::error::{Error, Result};
use crate::problems::SpectralProblem;
use crate::sequence_model::{ErrorProfile, NoisyObservation};

fn check_dims(p: &SpectralProblem, obs: &NoisyObservation) -> Result<()> {
    if p.dim() != obs.dim() {
        return Err(Error::InvalidDimension(format!(
            "problem has D = {}, observation has {}",
            p.dim(),
            obs.dim()
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param(format!(
            "noise level must be positive, got {delta}"
        )));
    }
    Ok(())
}

/// First `k` at which `head[k] >= tail[k]`; `tail[D]` is zero so one exists.
fn first_crossing(head: &[f64], tail: &[f64]) -> usize {
    head.iter()
        .zip(tail)
        .position(|(h, t)| h >= t)
        .unwrap_or(head.len() - 1)
}

impl ErrorProfile {
    /// Weak balanced oracle: accumulated noise overtakes the remaining data.
    pub fn balanced_weak(&self) -> usize {
        first_crossing(&self.weak_variance, &self.weak_bias)
    }

    /// Strong balanced oracle.
    pub fn balanced_strong(&self) -> usize {
        first_crossing(&self.strong_variance, &self.strong_bias)
    }
}

/// Smallest `k` minimizing the strong error.
pub fn oracle_opt(p: &SpectralProblem, obs: &NoisyObservation) -> Result<usize> {
    check_dims(p, obs)?;
    Ok(ErrorProfile::new(p, obs).argmin_strong())
}

pub fn oracle_weak(p: &SpectralProblem, obs: &NoisyObservation) -> Result<usize> {
    check_dims(p, obs)?;
    Ok(ErrorProfile::new(p, obs).balanced_weak())
}

pub fn oracle_strong(p: &SpectralProblem, obs: &NoisyObservation) -> Result<usize> {
    check_dims(p, obs)?;
    Ok(ErrorProfile::new(p, obs).balanced_strong())
}

/// Deterministic weak oracle: smallest `k` with `delta^2 k >= sum_{j>k} y_j^2`.
pub fn det_weak(p: &SpectralProblem, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    let d = p.dim();
    let head: Vec<f64> = (0..=d).map(|k| delta * delta * k as f64).collect();
    let mut tail = vec![0.0; d + 1];
    for j in (0..d).rev() {
        let y = p.sigma[j] * p.x_true[j];
        tail[j] = tail[j + 1] + y * y;
    }
    Ok(first_crossing(&head, &tail))
}

/// Deterministic strong oracle: smallest `k` with
/// `delta^2 sum_{j<=k} sigma_j^-2 >= sum_{j>k} x_j^2`.
pub fn det_strong(p: &SpectralProblem, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    let d = p.dim();
    let mut head = vec![0.0; d + 1];
    for j in 0..d {
        head[j + 1] = head[j] + delta * delta / (p.sigma[j] * p.sigma[j]);
    }
    let mut tail = vec![0.0; d + 1];
    for j in (0..d).rev() {
        tail[j] = tail[j + 1] + p.x_true[j] * p.x_true[j];
    }
    Ok(first_crossing(&head, &tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{build_synthetic, IllPosedness, Spectrum, Truth};
    use crate::sequence_model::{observe, strong_error, NoiseModel};

    fn problem(sigma: Vec<f64>, x: Vec<f64>) -> SpectralProblem {
        SpectralProblem::new("t", sigma, x, IllPosedness::Synthetic).unwrap()
    }

    #[test]
    fn zero_truth_gives_zero() {
        let p = problem(vec![1.0, 0.5, 0.2], vec![0.0; 3]);
        let obs = observe(&p, 0.1, &NoiseModel::GAUSSIAN, 4).unwrap();
        assert_eq!(oracle_opt(&p, &obs).unwrap(), 0);
        assert_eq!(oracle_weak(&p, &obs).unwrap(), 0);
        assert_eq!(oracle_strong(&p, &obs).unwrap(), 0);
        assert_eq!(det_weak(&p, 0.1).unwrap(), 0);
        assert_eq!(det_strong(&p, 0.1).unwrap(), 0);
    }

    #[test]
    fn zero_noise_runs_to_the_end() {
        let p = problem(vec![1.0, 0.5, 0.2], vec![1.0, 1.0, 1.0]);
        let obs = NoisyObservation::from_parts(p.clean_data(), vec![0.0; 3], 1.0, 0).unwrap();
        assert_eq!(oracle_opt(&p, &obs).unwrap(), 3);
        assert_eq!(oracle_weak(&p, &obs).unwrap(), 3);
    }

    #[test]
    fn weak_oracle_example() {
        // y_clean = [2, 1, 0], noise = [1, 1, 1]
        let p = problem(vec![1.0, 1.0, 1.0], vec![2.0, 1.0, 0.0]);
        let obs = NoisyObservation::from_parts(p.clean_data(), vec![1.0; 3], 1.0, 0).unwrap();
        assert_eq!(oracle_weak(&p, &obs).unwrap(), 1);
        assert_eq!(oracle_strong(&p, &obs).unwrap(), 1);
        assert_eq!(det_weak(&p, 1.0).unwrap(), 1);
        assert_eq!(det_strong(&p, 1.0).unwrap(), 1);
    }

    #[test]
    fn huge_delta_caps_det_weak() {
        let p = problem(vec![1.0, 0.5, 0.2], vec![3.0, -2.0, 1.0]);
        let norm2: f64 = p.clean_data().iter().map(|y| y * y).sum();
        assert!(det_weak(&p, norm2.sqrt()).unwrap() <= 1);
        assert!(det_weak(&p, 0.0).is_err());
    }

    #[test]
    fn opt_matches_exhaustive_scan() {
        let p = build_synthetic(30, Spectrum::Poly { q: 2.0 }, &Truth::Power { s: 1.0 }).unwrap();
        for seed in 0..50 {
            let obs = observe(&p, 0.01, &NoiseModel::GAUSSIAN, seed).unwrap();
            let errs: Vec<f64> = (0..=30)
                .map(|k| strong_error(&p, &obs, k).unwrap())
                .collect();
            let best = errs.iter().copied().fold(f64::INFINITY, f64::min);
            let k = oracle_opt(&p, &obs).unwrap();
            assert!((errs[k] - best).abs() <= 1e-12 * best);
        }
    }

    #[test]
    fn strong_dominates_weak() {
        let p = build_synthetic(50, Spectrum::Poly { q: 3.0 }, &Truth::Power { s: 0.8 }).unwrap();
        for seed in 0..200 {
            let obs = observe(&p, 0.05, &NoiseModel::GAUSSIAN, seed).unwrap();
            assert!(oracle_weak(&p, &obs).unwrap() <= oracle_strong(&p, &obs).unwrap());
        }
        for delta in [1.0, 1e-2, 1e-4, 1e-6] {
            assert!(det_weak(&p, delta).unwrap() <= det_strong(&p, delta).unwrap());
        }
    }

    #[test]
    fn direct_problem_oracles_coincide() {
        let p = build_synthetic(40, Spectrum::Identity, &Truth::Power { s: 1.0 }).unwrap();
        for delta in [1.0, 0.1, 0.01] {
            assert_eq!(det_weak(&p, delta).unwrap(), det_strong(&p, delta).unwrap());
        }
    }
}
