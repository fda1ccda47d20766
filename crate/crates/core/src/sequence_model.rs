//! White-noise observations in singular coordinates and the errors of
//! spectral cut-off estimates.
//!
//! Noise is drawn directly as the coefficients `z_j = (Z, u_j)`, which for
//! white noise are uncorrelated with unit variance; the left singular vectors
//! never need to be stored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::SpectralProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NoiseKind {
    Gaussian,
    Rademacher,
    /// Student t with `df` degrees of freedom, rescaled to unit variance.
    StudentT {
        df: f64,
    },
}

/// Distribution of the white-noise coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
}

impl NoiseModel {
    pub const GAUSSIAN: NoiseModel = NoiseModel {
        kind: NoiseKind::Gaussian,
    };
    pub const RADEMACHER: NoiseModel = NoiseModel {
        kind: NoiseKind::Rademacher,
    };

    pub fn student_t(df: f64) -> Self {
        NoiseModel {
            kind: NoiseKind::StudentT { df },
        }
    }

    /// Moment constant `gamma_p = E|z|^p` for `p` in `{2, 4}`.
    pub fn gamma(&self, p: u32) -> Result<f64> {
        match (p, self.kind) {
            (2, NoiseKind::StudentT { df }) if df <= 2.0 => Err(Error::param(format!(
                "student t variance undefined for df = {df}"
            ))),
            (2, _) => Ok(1.0),
            (4, NoiseKind::Gaussian) => Ok(3.0),
            (4, NoiseKind::Rademacher) => Ok(1.0),
            (4, NoiseKind::StudentT { df }) => {
                if df <= 4.0 {
                    Err(Error::param(format!(
                        "student t fourth moment needs df > 4, got {df}"
                    )))
                } else {
                    Ok(3.0 * (df - 2.0) / (df - 4.0))
                }
            }
            _ => Err(Error::param(format!(
                "moment order must be 2 or 4, got {p}"
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        if let NoiseKind::StudentT { df } = self.kind {
            if !(df > 2.0 && df.is_finite()) {
                return Err(Error::param(format!(
                    "student t noise needs df > 2, got {df}"
                )));
            }
        }
        Ok(())
    }
}

/// `len` independent unit-variance draws, deterministic in `(model, len, seed)`.
pub fn sample_noise(model: &NoiseModel, len: usize, seed: u64) -> Result<Vec<f64>> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = match model.kind {
        NoiseKind::Gaussian => (0..len).map(|_| StandardNormal.sample(&mut rng)).collect(),
        NoiseKind::Rademacher => (0..len)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect(),
        NoiseKind::StudentT { df } => {
            let dist = StudentT::new(df).map_err(|e| Error::param(e.to_string()))?;
            let scale = ((df - 2.0) / df).sqrt();
            (0..len).map(|_| scale * dist.sample(&mut rng)).collect()
        }
    };
    Ok(z)
}

/// Observed coefficients `y_obs = y_clean + delta * z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyObservation {
    pub y_obs: Vec<f64>,
    pub y_clean: Vec<f64>,
    pub z: Vec<f64>,
    pub delta: f64,
    pub seed: u64,
}

impl NoisyObservation {
    /// Builds an observation from explicit clean data and noise.
    pub fn from_parts(y_clean: Vec<f64>, z: Vec<f64>, delta: f64, seed: u64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param(format!(
                "noise level must be positive, got {delta}"
            )));
        }
        if y_clean.len() != z.len() {
            return Err(Error::InvalidDimension(format!(
                "{} data coefficients but {} noise coefficients",
                y_clean.len(),
                z.len()
            )));
        }
        let y_obs = y_clean.iter().zip(&z).map(|(y, z)| y + delta * z).collect();
        Ok(Self {
            y_obs,
            y_clean,
            z,
            delta,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.y_obs.len()
    }
}

pub fn observe(
    p: &SpectralProblem,
    delta: f64,
    model: &NoiseModel,
    seed: u64,
) -> Result<NoisyObservation> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param(format!(
            "noise level must be positive, got {delta}"
        )));
    }
    let z = sample_noise(model, p.dim(), seed)?;
    NoisyObservation::from_parts(p.clean_data(), z, delta, seed)
}

fn check_level(k: usize, dim: usize) -> Result<()> {
    if k > dim {
        return Err(Error::param(format!(
            "truncation level {k} exceeds D = {dim}"
        )));
    }
    Ok(())
}

/// Coefficients of the cut-off estimate `x_k` in the right singular basis.
pub fn cutoff_coeffs(p: &SpectralProblem, obs: &NoisyObservation, k: usize) -> Result<Vec<f64>> {
    check_level(k, p.dim())?;
    Ok(obs
        .y_obs
        .iter()
        .zip(&p.sigma)
        .enumerate()
        .map(|(j, (y, s))| if j < k { y / s } else { 0.0 })
        .collect())
}

/// `||x_k - x_true||` at resolution `D`.
pub fn strong_error(p: &SpectralProblem, obs: &NoisyObservation, k: usize) -> Result<f64> {
    check_level(k, p.dim())?;
    let head: f64 = (0..k)
        .map(|j| {
            let d = obs.y_obs[j] / p.sigma[j] - p.x_true[j];
            d * d
        })
        .sum();
    let tail: f64 = p.x_true[k..].iter().map(|x| x * x).sum();
    Ok((head + tail).sqrt())
}

/// `||K (x_k - x_true)||` at resolution `D`.
pub fn weak_error(p: &SpectralProblem, obs: &NoisyObservation, k: usize) -> Result<f64> {
    check_level(k, p.dim())?;
    let head: f64 = (0..k)
        .map(|j| {
            let d = obs.y_obs[j] - obs.y_clean[j];
            d * d
        })
        .sum();
    let tail: f64 = obs.y_clean[k..].iter().map(|y| y * y).sum();
    Ok((head + tail).sqrt())
}

/// Variance and squared-bias profiles of the cut-off family for every
/// `k = 0..=D`, in both norms.
///
/// Index `k` of each vector refers to the estimate keeping `k` components.
/// Head sums are accumulated forwards and tail sums backwards so that small
/// tails are not swamped by cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    pub strong_variance: Vec<f64>,
    pub strong_bias: Vec<f64>,
    pub weak_variance: Vec<f64>,
    pub weak_bias: Vec<f64>,
}

impl ErrorProfile {
    pub fn new(p: &SpectralProblem, obs: &NoisyObservation) -> Self {
        let d = p.dim();
        let mut strong_variance = vec![0.0; d + 1];
        let mut weak_variance = vec![0.0; d + 1];
        for j in 0..d {
            let noise = obs.y_obs[j] - obs.y_clean[j];
            let scaled = noise / p.sigma[j];
            weak_variance[j + 1] = weak_variance[j] + noise * noise;
            strong_variance[j + 1] = strong_variance[j] + scaled * scaled;
        }
        let mut strong_bias = vec![0.0; d + 1];
        let mut weak_bias = vec![0.0; d + 1];
        for j in (0..d).rev() {
            strong_bias[j] = strong_bias[j + 1] + p.x_true[j] * p.x_true[j];
            weak_bias[j] = weak_bias[j + 1] + obs.y_clean[j] * obs.y_clean[j];
        }
        Self {
            strong_variance,
            strong_bias,
            weak_variance,
            weak_bias,
        }
    }

    pub fn max_level(&self) -> usize {
        self.strong_variance.len() - 1
    }

    pub fn strong(&self, k: usize) -> f64 {
        (self.strong_variance[k] + self.strong_bias[k]).sqrt()
    }

    pub fn weak(&self, k: usize) -> f64 {
        (self.weak_variance[k] + self.weak_bias[k]).sqrt()
    }

    /// Smallest `k` attaining the minimal strong error.
    pub fn argmin_strong(&self) -> usize {
        argmin((0..=self.max_level()).map(|k| self.strong(k)))
    }

    pub fn argmin_weak(&self) -> usize {
        argmin((0..=self.max_level()).map(|k| self.weak(k)))
    }

    pub fn min_strong(&self) -> f64 {
        self.strong(self.argmin_strong())
    }

    pub fn min_weak(&self) -> f64 {
        self.weak(self.argmin_weak())
    }
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, v) in values.enumerate() {
        if v < best.1 {
            best = (k, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::IllPosedness;

    fn problem(sigma: Vec<f64>, x: Vec<f64>) -> SpectralProblem {
        SpectralProblem::new("t", sigma, x, IllPosedness::Synthetic).unwrap()
    }

    #[test]
    fn noise_is_deterministic() {
        let a = sample_noise(&NoiseModel::GAUSSIAN, 100, 7).unwrap();
        let b = sample_noise(&NoiseModel::GAUSSIAN, 100, 7).unwrap();
        let c = sample_noise(&NoiseModel::GAUSSIAN, 100, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rademacher_support() {
        let z = sample_noise(&NoiseModel::RADEMACHER, 1000, 1).unwrap();
        assert!(z.iter().all(|&v| v == 1.0 || v == -1.0));
        assert!(z.contains(&1.0) && z.contains(&-1.0));
    }

    #[test]
    fn gaussian_variance() {
        let z = sample_noise(&NoiseModel::GAUSSIAN, 100_000, 3).unwrap();
        let var = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
        assert!((0.98..=1.02).contains(&var), "variance {var}");
    }

    #[test]
    fn student_t_is_variance_normalized() {
        let z = sample_noise(&NoiseModel::student_t(10.0), 200_000, 5).unwrap();
        let var = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
        assert!((0.97..=1.03).contains(&var), "variance {var}");
        assert!(sample_noise(&NoiseModel::student_t(2.0), 10, 0).is_err());
        assert!(sample_noise(&NoiseModel::student_t(1.5), 10, 0).is_err());
    }

    #[test]
    fn moment_constants() {
        assert_eq!(NoiseModel::GAUSSIAN.gamma(2).unwrap(), 1.0);
        assert_eq!(NoiseModel::GAUSSIAN.gamma(4).unwrap(), 3.0);
        assert_eq!(NoiseModel::RADEMACHER.gamma(4).unwrap(), 1.0);
        assert_eq!(NoiseModel::student_t(6.0).gamma(4).unwrap(), 6.0);
        assert!(NoiseModel::student_t(4.0).gamma(4).is_err());
        assert!(NoiseModel::student_t(3.0).gamma(4).is_err());
        assert!(NoiseModel::GAUSSIAN.gamma(3).is_err());
    }

    #[test]
    fn observation_is_linear_in_delta() {
        let p = problem(vec![1.0, 0.5, 0.25], vec![1.0, -2.0, 0.5]);
        let a = observe(&p, 0.1, &NoiseModel::GAUSSIAN, 11).unwrap();
        let b = observe(&p, 0.2, &NoiseModel::GAUSSIAN, 11).unwrap();
        for j in 0..3 {
            let da = a.y_obs[j] - a.y_clean[j];
            let db = b.y_obs[j] - b.y_clean[j];
            assert!((db - 2.0 * da).abs() <= 1e-15 * da.abs().max(1.0));
            assert_eq!(a.y_obs[j], a.y_clean[j] + a.delta * a.z[j]);
        }
    }

    #[test]
    fn zero_truth_observes_pure_noise() {
        let p = problem(vec![1.0; 4], vec![0.0; 4]);
        let obs = observe(&p, 0.3, &NoiseModel::GAUSSIAN, 2).unwrap();
        assert!(obs.y_clean.iter().all(|&y| y == 0.0));
        for j in 0..4 {
            assert_eq!(obs.y_obs[j], 0.3 * obs.z[j]);
        }
    }

    #[test]
    fn nonpositive_delta_is_rejected() {
        let p = problem(vec![1.0], vec![1.0]);
        assert!(observe(&p, 0.0, &NoiseModel::GAUSSIAN, 0).is_err());
        assert!(observe(&p, -1.0, &NoiseModel::GAUSSIAN, 0).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let p = problem(vec![2.0, 1.0], vec![2.0, 3.0]);
        let obs = NoisyObservation::from_parts(vec![4.0, 3.0], vec![0.0, 0.0], 1.0, 0).unwrap();
        assert_eq!(cutoff_coeffs(&p, &obs, 0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(cutoff_coeffs(&p, &obs, 1).unwrap(), vec![2.0, 0.0]);
        assert_eq!(cutoff_coeffs(&p, &obs, 2).unwrap(), p.x_true);
        assert!(cutoff_coeffs(&p, &obs, 3).is_err());
    }

    #[test]
    fn error_examples() {
        let p = problem(vec![1.0, 1.0], vec![1.0, 0.0]);
        let obs = NoisyObservation::from_parts(p.clean_data(), vec![1.0, 1.0], 1.0, 0).unwrap();
        assert!((strong_error(&p, &obs, 2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(weak_error(&p, &obs, 1).unwrap(), 1.0);
        assert_eq!(strong_error(&p, &obs, 0).unwrap(), 1.0);
        assert_eq!(weak_error(&p, &obs, 0).unwrap(), 1.0);
        assert!(strong_error(&p, &obs, 3).is_err());
        assert!(weak_error(&p, &obs, 3).is_err());
    }

    #[test]
    fn profile_matches_direct_errors() {
        let p = problem(vec![1.0, 0.6, 0.3, 0.1], vec![0.5, -1.0, 0.2, 0.05]);
        let obs = observe(&p, 0.05, &NoiseModel::GAUSSIAN, 9).unwrap();
        let prof = ErrorProfile::new(&p, &obs);
        for k in 0..=4 {
            let s = strong_error(&p, &obs, k).unwrap();
            let w = weak_error(&p, &obs, k).unwrap();
            assert!((prof.strong(k) - s).abs() <= 1e-12 * s.max(1e-300));
            assert!((prof.weak(k) - w).abs() <= 1e-12 * w.max(1e-300));
        }
    }

    #[test]
    fn zero_noise_bias_only() {
        let p = problem(vec![1.0, 0.5, 0.1], vec![1.0, 1.0, 1.0]);
        let obs = NoisyObservation::from_parts(p.clean_data(), vec![0.0; 3], 1.0, 0).unwrap();
        let errs: Vec<f64> = (0..=3)
            .map(|k| strong_error(&p, &obs, k).unwrap())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(errs[3], 0.0);
    }
}
