//! Test problems and the change to singular coordinates.
//!
//! The four dense builders discretize classical first-kind integral equations
//! with the midpoint rule on `n` nodes: `A[i][j] = h * k(s_i, t_j)`, with the
//! exact data defined as `g = A f`. Kernels and solutions follow the usual
//! regularization-toolbox conventions:
//!
//! | problem    | domain   | kernel `k(s, t)`                                   | solution `f(t)`                          |
//! |------------|----------|----------------------------------------------------|------------------------------------------|
//! | `phillips` | `[-6,6]` | `1 + cos(pi (s-t) / 3)` for `|s-t| < 3`, else `0`  | `1 + cos(pi t / 3)` for `|t| < 3`, else `0` |
//! | `deriv2`   | `[0,1]`  | `s (t-1)` for `s < t`, `t (s-1)` otherwise         | `t`                                      |
//! | `gravity`  | `[0,1]`  | `d (d^2 + (s-t)^2)^(-3/2)`                         | `sin(pi t) + 0.5 sin(2 pi t)`            |
//! | `heat`     | `[0,1]`  | `kh(s-t)` for `s >= t`, else `0`                   | toolbox pulse, see [`heat_pulse`]        |
//!
//! with `kh(u) = u^(-3/2) / (2 kappa sqrt(pi)) * exp(-1 / (4 kappa^2 u))`.
//! `phillips` and `deriv2` are Galerkin problems in the toolbox, whose
//! coefficients refer to the `L^2`-orthonormal box basis `h^(-1/2) 1_cell`:
//! their solution and data vectors hold `sqrt(h)` times the point values, so
//! that Euclidean norms approximate function norms. `gravity` and `heat` are
//! quadrature problems and keep point values.
//! The heat problem is collocated at the right interval endpoints
//! `s_i = (i + 1) h` against midpoint nodes `t_j = (j + 1/2) h`, which keeps the
//! Volterra matrix lower triangular with a nonzero diagonal.

use std::f64::consts::PI;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular values below `RANK_CUTOFF * sigma_1` are treated as numerically zero.
pub const RANK_CUTOFF: f64 = 1e-14;

/// Default source depth of the gravity problem.
pub const GRAVITY_DEPTH: f64 = 0.25;

/// Default conductivity parameter of the heat problem.
pub const HEAT_KAPPA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IllPosedness {
    Mild,
    Severe,
    Synthetic,
}

/// A discretized forward operator together with a discretized solution and
/// its exact data.
#[derive(Debug, Clone)]
pub struct DenseProblem {
    pub name: String,
    pub matrix: Mat<f64>,
    pub f_true: Vec<f64>,
    pub g_true: Vec<f64>,
    pub ill_posedness: IllPosedness,
}

impl DenseProblem {
    fn from_kernel(
        name: &str,
        ill_posedness: IllPosedness,
        n: usize,
        kernel: impl Fn(usize, usize) -> f64,
        solution: impl Fn(usize) -> f64,
    ) -> Self {
        let matrix = Mat::from_fn(n, n, kernel);
        let f_true: Vec<f64> = (0..n).map(solution).collect();
        let g_true = mat_vec(&matrix, &f_true);
        Self {
            name: name.to_string(),
            matrix,
            f_true,
            g_true,
            ill_posedness,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Forward operator and truth in singular coordinates.
///
/// `sigma[j]` is the `j+1`-th singular value and `x_true[j]` the coefficient
/// of the truth along the `j+1`-th right singular vector. Singular vectors are
/// implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProblem {
    pub name: String,
    pub sigma: Vec<f64>,
    pub x_true: Vec<f64>,
    pub ill_posedness: IllPosedness,
}

impl SpectralProblem {
    pub fn new(
        name: impl Into<String>,
        sigma: Vec<f64>,
        x_true: Vec<f64>,
        ill_posedness: IllPosedness,
    ) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::InvalidDimension(
                "spectral problem needs D >= 1".into(),
            ));
        }
        if sigma.len() != x_true.len() {
            return Err(Error::InvalidDimension(format!(
                "{} singular values but {} coefficients",
                sigma.len(),
                x_true.len()
            )));
        }
        if sigma.iter().chain(&x_true).any(|v| !v.is_finite()) {
            return Err(Error::param("spectral problem entries must be finite"));
        }
        if sigma.iter().any(|&s| s <= 0.0) {
            return Err(Error::param("singular values must be strictly positive"));
        }
        if sigma.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param("singular values must be nonincreasing"));
        }
        Ok(Self {
            name: name.into(),
            sigma,
            x_true,
            ill_posedness,
        })
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    /// `y_j = sigma_j * x_j`, the exact data in the left singular basis.
    pub fn clean_data(&self) -> Vec<f64> {
        self.sigma
            .iter()
            .zip(&self.x_true)
            .map(|(s, x)| s * x)
            .collect()
    }

    pub fn is_direct(&self) -> bool {
        self.sigma.iter().all(|&s| s == 1.0)
    }
}

/// Full SVD `A = U diag(s) V^T` with nonincreasing `s`.
///
/// Each pair `(u_j, v_j)` is signed so that the entry of largest magnitude in
/// `u_j` is positive.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Mat<f64>,
    pub s: Vec<f64>,
    pub v: Mat<f64>,
}

impl SvdFactors {
    /// `||A - U diag(s) V^T||_F / ||A||_F`.
    pub fn reconstruction_error(&self, a: &Mat<f64>) -> f64 {
        let n = self.s.len();
        let us = Mat::from_fn(self.u.nrows(), n, |i, j| self.u[(i, j)] * self.s[j]);
        let rebuilt = &us * self.v.transpose();
        let diff = a - &rebuilt;
        diff.norm_l2() / a.norm_l2()
    }

    /// `(||U^T U - I||_F, ||V^T V - I||_F)`.
    pub fn orthogonality_error(&self) -> (f64, f64) {
        fn gram_defect(q: &Mat<f64>) -> f64 {
            let gram = q.transpose() * q;
            let n = gram.nrows();
            let eye = Mat::<f64>::identity(n, n);
            (&gram - &eye).norm_l2()
        }
        (gram_defect(&self.u), gram_defect(&self.v))
    }
}

/// Singular-value decay of a synthetic problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Spectrum {
    /// `sigma_j^2 = j^(-q)`.
    Poly { q: f64 },
    /// `sigma_j^2 = e^(-j)`.
    Exp,
    /// `sigma_j = 1`, the direct regression problem.
    Identity,
}

/// Truth coefficients of a synthetic problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Truth {
    /// `x_j = j^(-s)`, square summable for `s > 1/2`.
    Power {
        s: f64,
    },
    Vector {
        values: Vec<f64>,
    },
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("need n >= 2, got {n}")));
    }
    Ok(())
}

fn mat_vec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

fn phillips_bump(u: f64) -> f64 {
    if u.abs() < 3.0 {
        1.0 + (PI * u / 3.0).cos()
    } else {
        0.0
    }
}

/// Phillips' test problem on `[-6, 6]`.
pub fn build_phillips(n: usize) -> Result<DenseProblem> {
    check_size(n)?;
    let h = 12.0 / n as f64;
    let node = |i: usize| -6.0 + (i as f64 + 0.5) * h;
    Ok(DenseProblem::from_kernel(
        "phillips",
        IllPosedness::Mild,
        n,
        |i, j| h * phillips_bump(node(i) - node(j)),
        |j| h.sqrt() * phillips_bump(node(j)),
    ))
}

fn deriv2_kernel(s: f64, t: f64) -> f64 {
    if s < t {
        s * (t - 1.0)
    } else {
        t * (s - 1.0)
    }
}

/// Second-derivative problem: Green's function of `-u''` on `[0, 1]`.
pub fn build_deriv2(n: usize) -> Result<DenseProblem> {
    check_size(n)?;
    let h = 1.0 / n as f64;
    let node = |i: usize| (i as f64 + 0.5) * h;
    Ok(DenseProblem::from_kernel(
        "deriv2",
        IllPosedness::Mild,
        n,
        |i, j| h * deriv2_kernel(node(i), node(j)),
        |j| h.sqrt() * node(j),
    ))
}

/// Analytic data `g(s) = (s^3 - s) / 6` of the deriv2 problem at the midpoint
/// nodes, in the same `sqrt(h)` scaling as the solution. Used to validate the
/// quadrature.
pub fn deriv2_exact_data(n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..n)
        .map(|i| {
            let s = (i as f64 + 0.5) * h;
            h.sqrt() * (s * s * s - s) / 6.0
        })
        .collect()
}

/// One-dimensional gravity surveying problem with source depth `depth`.
pub fn build_gravity(n: usize, depth: f64) -> Result<DenseProblem> {
    check_size(n)?;
    if !(depth > 0.0 && depth.is_finite()) {
        return Err(Error::param(format!(
            "gravity depth must be positive, got {depth}"
        )));
    }
    let h = 1.0 / n as f64;
    let node = |i: usize| (i as f64 + 0.5) * h;
    Ok(DenseProblem::from_kernel(
        "gravity",
        IllPosedness::Severe,
        n,
        |i, j| {
            let d = node(i) - node(j);
            h * depth * (depth * depth + d * d).powf(-1.5)
        },
        |j| {
            let t = node(j);
            (PI * t).sin() + 0.5 * (2.0 * PI * t).sin()
        },
    ))
}

/// Heat kernel `kh(u)` for `u > 0`; zero for `u <= 0`.
pub fn heat_kernel(u: f64, kappa: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    u.powf(-1.5) / (2.0 * kappa * PI.sqrt()) * (-1.0 / (4.0 * kappa * kappa * u)).exp()
}

/// Exact solution of the heat problem: a smooth pulse supported on `[0, 1/2)`.
///
/// With `r = 20 t`: `0.75 r^2 / 4` for `r < 2`, `0.75 + (r - 2)(3 - r)` for
/// `2 <= r < 3`, `0.75 e^(-2 (r - 3))` for `r >= 3`, and zero for `t >= 1/2`.
pub fn heat_pulse(t: f64) -> f64 {
    if t >= 0.5 {
        return 0.0;
    }
    let r = 20.0 * t;
    if r < 2.0 {
        0.75 * r * r / 4.0
    } else if r < 3.0 {
        0.75 + (r - 2.0) * (3.0 - r)
    } else {
        0.75 * (-2.0 * (r - 3.0)).exp()
    }
}

/// Inverse heat equation as a Volterra convolution on `[0, 1]`.
pub fn build_heat(n: usize, kappa: f64) -> Result<DenseProblem> {
    check_size(n)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::param(format!(
            "heat kappa must be positive, got {kappa}"
        )));
    }
    let h = 1.0 / n as f64;
    let collocation = |i: usize| (i as f64 + 1.0) * h;
    let node = |j: usize| (j as f64 + 0.5) * h;
    Ok(DenseProblem::from_kernel(
        "heat",
        IllPosedness::Severe,
        n,
        |i, j| {
            if j > i {
                0.0
            } else {
                h * heat_kernel(collocation(i) - node(j), kappa)
            }
        },
        |j| heat_pulse(node(j)),
    ))
}

/// Synthetic problem given directly in singular coordinates.
pub fn build_synthetic(dim: usize, spectrum: Spectrum, truth: &Truth) -> Result<SpectralProblem> {
    if dim == 0 {
        return Err(Error::InvalidDimension(
            "synthetic problem needs D >= 1".into(),
        ));
    }
    let sigma: Vec<f64> = match spectrum {
        Spectrum::Poly { q } => {
            if !(q > 0.0 && q.is_finite()) {
                return Err(Error::param(format!("poly spectrum needs q > 0, got {q}")));
            }
            (1..=dim).map(|j| (j as f64).powf(-q / 2.0)).collect()
        }
        Spectrum::Exp => (1..=dim).map(|j| (-(j as f64) / 2.0).exp()).collect(),
        Spectrum::Identity => vec![1.0; dim],
    };
    let x_true: Vec<f64> = match truth {
        Truth::Power { s } => {
            if !(*s > 0.5 && s.is_finite()) {
                return Err(Error::param(format!("power truth needs s > 1/2, got {s}")));
            }
            (1..=dim).map(|j| (j as f64).powf(-s)).collect()
        }
        Truth::Vector { values } => {
            if values.len() != dim {
                return Err(Error::InvalidDimension(format!(
                    "truth has {} entries, expected {dim}",
                    values.len()
                )));
            }
            values.clone()
        }
    };
    let name = match spectrum {
        Spectrum::Poly { .. } => "synthetic-poly",
        Spectrum::Exp => "synthetic-exp",
        Spectrum::Identity => "direct",
    };
    SpectralProblem::new(name, sigma, x_true, IllPosedness::Synthetic)
}

/// Full SVD of the problem matrix with the sign convention of [`SvdFactors`].
pub fn decompose(p: &DenseProblem) -> Result<SvdFactors> {
    let a = &p.matrix;
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidDimension(format!(
            "`{}` is {}x{}, expected square",
            p.name,
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    for j in 0..n {
        for i in 0..n {
            if !a[(i, j)].is_finite() {
                return Err(Error::param(format!("`{}` has a nonfinite entry", p.name)));
            }
        }
    }
    let svd = a.svd().map_err(|e| Error::Numeric {
        name: p.name.clone(),
        reason: format!("SVD did not converge: {e:?}"),
    })?;

    let s_diag = svd.S().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s_diag[y].total_cmp(&s_diag[x]));

    let (u_raw, v_raw) = (svd.U(), svd.V());
    let mut u = Mat::<f64>::zeros(n, n);
    let mut v = Mat::<f64>::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut pivot = 0.0f64;
        for i in 0..n {
            let x = u_raw[(i, src)];
            if x.abs() > pivot.abs() {
                pivot = x;
            }
        }
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            u[(i, dst)] = sign * u_raw[(i, src)];
            v[(i, dst)] = sign * v_raw[(i, src)];
        }
        s.push(s_diag[src].max(0.0));
    }
    Ok(SvdFactors { u, s, v })
}

/// Singular coordinates of a dense problem, truncated at numerical rank.
pub fn spectralize(p: &DenseProblem) -> Result<SpectralProblem> {
    let factors = decompose(p)?;
    spectralize_factors(p, &factors)
}

/// Same as [`spectralize`] with a precomputed decomposition of `p.matrix`.
pub fn spectralize_factors(p: &DenseProblem, factors: &SvdFactors) -> Result<SpectralProblem> {
    let sigma_max = factors.s.first().copied().unwrap_or(0.0);
    let threshold = RANK_CUTOFF * sigma_max;
    let rank = factors
        .s
        .iter()
        .take_while(|&&s| s > threshold && s > 0.0)
        .count();
    if rank == 0 {
        return Err(Error::DegenerateOperator(p.name.clone()));
    }
    let n = p.dim();
    let sigma = factors.s[..rank].to_vec();
    let x_true = (0..rank)
        .map(|j| (0..n).map(|i| factors.v[(i, j)] * p.f_true[i]).sum())
        .collect();
    SpectralProblem::new(p.name.clone(), sigma, x_true, p.ill_posedness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond(p: &DenseProblem, j: usize) -> f64 {
        let f = decompose(p).unwrap();
        f.s[j] / f.s[0]
    }

    #[test]
    fn small_sizes_are_rejected() {
        assert!(matches!(build_phillips(1), Err(Error::InvalidDimension(_))));
        assert!(matches!(build_deriv2(0), Err(Error::InvalidDimension(_))));
        assert!(matches!(
            build_gravity(1, 0.25),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            build_heat(1, 1.0),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(matches!(
            build_gravity(8, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_gravity(8, -1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_heat(8, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_heat(8, f64::NAN),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn phillips_two_by_two_is_symmetric() {
        let p = build_phillips(2).unwrap();
        assert_eq!(p.matrix[(0, 0)], p.matrix[(1, 1)]);
        assert_eq!(p.matrix[(0, 1)], p.matrix[(1, 0)]);
    }

    #[test]
    fn phillips_solution_has_compact_support() {
        let p = build_phillips(64).unwrap();
        let h = 12.0 / 64.0;
        for (j, &f) in p.f_true.iter().enumerate() {
            let t: f64 = -6.0 + (j as f64 + 0.5) * h;
            if t.abs() >= 3.0 {
                assert_eq!(f, 0.0, "t = {t}");
            } else {
                assert!(f > 0.0);
            }
        }
    }

    #[test]
    fn phillips_is_ill_conditioned() {
        // sigma_64 / sigma_1 is about 3.4e-6 at n = 64; 1e6 is passed at n = 128.
        assert!(1.0 / cond(&build_phillips(64).unwrap(), 63) > 1e5);
        assert!(1.0 / cond(&build_phillips(128).unwrap(), 127) > 1e6);
    }

    #[test]
    fn deriv2_is_symmetric_and_nonpositive() {
        let p = build_deriv2(256).unwrap();
        for i in 0..256 {
            for j in 0..256 {
                assert_eq!(p.matrix[(i, j)], p.matrix[(j, i)]);
                assert!(p.matrix[(i, j)] <= 0.0);
            }
        }
    }

    #[test]
    fn deriv2_matches_analytic_data() {
        let p = build_deriv2(256).unwrap();
        let exact = deriv2_exact_data(256);
        let err = p
            .g_true
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "max error {err}");
    }

    #[test]
    fn gravity_diagonal() {
        let n = 32;
        let depth = 0.25;
        let p = build_gravity(n, depth).unwrap();
        let expected = (1.0 / n as f64) / (depth * depth);
        for i in 0..n {
            assert!((p.matrix[(i, i)] - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn gravity_is_severely_ill_posed() {
        let p = build_gravity(64, GRAVITY_DEPTH).unwrap();
        // about 3.2e-12
        assert!(cond(&p, 39) < 1e-11);
        assert!(cond(&p, 19) < 1e-5);
    }

    #[test]
    fn gravity_deeper_sources_are_worse_conditioned() {
        // A deeper source smooths the kernel, so the spectrum decays faster.
        // Both full condition numbers sit near 1/eps, so compare at indices
        // that are resolved for both depths.
        let shallow = build_gravity(64, 0.25).unwrap();
        let deep = build_gravity(64, 1.0).unwrap();
        for j in [5, 10, 20] {
            assert!(cond(&deep, j) < cond(&shallow, j));
        }
    }

    #[test]
    fn heat_is_lower_triangular() {
        let p = build_heat(64, HEAT_KAPPA).unwrap();
        for i in 0..64 {
            for j in (i + 1)..64 {
                assert_eq!(p.matrix[(i, j)], 0.0);
            }
            assert!(p.matrix[(i, i)] > 0.0);
        }
    }

    #[test]
    fn heat_is_severely_ill_posed() {
        // The spectrum decays slowly up to the last few values, which collapse
        // because the kernel is flat near zero: sigma_40 / sigma_1 is only
        // about 9e-4, while sigma_62 / sigma_1 is about 1e-14.
        let p = build_heat(64, HEAT_KAPPA).unwrap();
        assert!(cond(&p, 39) > 1e-4);
        assert!(cond(&p, 61) < 1e-10);
    }

    #[test]
    fn heat_kernel_vanishes_at_zero() {
        assert_eq!(heat_kernel(0.0, 1.0), 0.0);
        assert!(heat_kernel(1e-3, 1.0) < 1e-100);
        assert!(heat_kernel(1e-2, 1.0) < heat_kernel(1e-1, 1.0));
    }

    #[test]
    fn synthetic_spectra() {
        let zero = Truth::Vector {
            values: vec![0.0; 3],
        };
        let p = build_synthetic(3, Spectrum::Poly { q: 2.0 }, &zero).unwrap();
        let expected = [1.0, 0.5, 1.0 / 3.0];
        for (s, e) in p.sigma.iter().zip(expected) {
            assert!((s - e).abs() < 1e-15);
        }
        assert!(p.x_true.iter().all(|&x| x == 0.0));

        let zero2 = Truth::Vector {
            values: vec![0.0; 2],
        };
        let p = build_synthetic(2, Spectrum::Exp, &zero2).unwrap();
        assert!((p.sigma[0] - (-0.5f64).exp()).abs() < 1e-15);
        assert!((p.sigma[1] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn synthetic_parameter_errors() {
        let t = Truth::Power { s: 1.0 };
        assert!(build_synthetic(4, Spectrum::Poly { q: 0.0 }, &t).is_err());
        assert!(build_synthetic(0, Spectrum::Exp, &t).is_err());
        assert!(build_synthetic(4, Spectrum::Exp, &Truth::Power { s: 0.5 }).is_err());
        let bad = Truth::Vector {
            values: vec![1.0, f64::INFINITY],
        };
        assert!(matches!(
            build_synthetic(2, Spectrum::Exp, &bad),
            Err(Error::InvalidParameter(_))
        ));
    }

    fn dense(name: &str, matrix: Mat<f64>, f_true: Vec<f64>) -> DenseProblem {
        let g_true = mat_vec(&matrix, &f_true);
        DenseProblem {
            name: name.into(),
            matrix,
            f_true,
            g_true,
            ill_posedness: IllPosedness::Synthetic,
        }
    }

    #[test]
    fn decompose_identity_and_diagonal() {
        let p = dense("id", Mat::identity(4, 4), vec![1.0, 0.0, 0.0, 0.0]);
        let f = decompose(&p).unwrap();
        assert!(f.s.iter().all(|&s| (s - 1.0).abs() < 1e-15));
        assert!(f.reconstruction_error(&p.matrix) < 1e-15);

        let sp = spectralize(&p).unwrap();
        assert!(sp.sigma.iter().all(|&s| (s - 1.0).abs() < 1e-15));
        assert!((sp.x_true.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);

        let d = Mat::from_fn(3, 3, |i, j| if i == j { [3.0, 2.0, 1.0][i] } else { 0.0 });
        let p = dense("diag", d, vec![1.0; 3]);
        let f = decompose(&p).unwrap();
        for (s, e) in f.s.iter().zip([3.0, 2.0, 1.0]) {
            assert!((s - e).abs() < 1e-14);
        }
    }

    #[test]
    fn unsorted_diagonal_is_sorted() {
        let d = Mat::from_fn(3, 3, |i, j| if i == j { [1.0, 3.0, 2.0][i] } else { 0.0 });
        let p = dense("diag", d, vec![1.0; 3]);
        let f = decompose(&p).unwrap();
        for (s, e) in f.s.iter().zip([3.0, 2.0, 1.0]) {
            assert!((s - e).abs() < 1e-14);
        }
        assert!(f.reconstruction_error(&p.matrix) < 1e-14);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let p = dense("zero", Mat::zeros(3, 3), vec![1.0; 3]);
        assert!(matches!(spectralize(&p), Err(Error::DegenerateOperator(_))));
    }

    #[test]
    fn nonfinite_matrix_is_rejected() {
        let mut m = Mat::<f64>::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        let p = DenseProblem {
            name: "nan".into(),
            matrix: m,
            f_true: vec![0.0; 2],
            g_true: vec![0.0; 2],
            ill_posedness: IllPosedness::Synthetic,
        };
        assert!(decompose(&p).is_err());
    }

    #[test]
    fn sign_convention_holds() {
        let p = build_deriv2(16).unwrap();
        let f = decompose(&p).unwrap();
        for j in 0..16 {
            let col: Vec<f64> = (0..16).map(|i| f.u[(i, j)]).collect();
            let pivot = col
                .iter()
                .copied()
                .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn spectralize_is_deterministic() {
        let p = build_gravity(32, GRAVITY_DEPTH).unwrap();
        let a = spectralize(&p).unwrap();
        let b = spectralize(&build_gravity(32, GRAVITY_DEPTH).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
