use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the oracle inequalities for a given `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub tau: f64,
    /// `A = ((tau + 1) / (tau - 1))^2`, bounds `k_dp <= A k_pr`.
    pub a_tau: f64,
    /// `B = (3 tau + 1)^2 / 4`.
    pub b_tau: f64,
    /// Prediction-error constant `sqrt(6) sqrt(3/2 (A + 1) + B)`.
    pub c_tau_weak: f64,
    /// Strong-error constant `sqrt(2) max((tau+1)/(tau-1) + 1, 1 + sqrt(3/8)(3 tau + 1))`.
    pub c_tau_strong: f64,
    /// Strong-error constant for polynomially ill-posed operators; present
    /// only when [`CorollaryParams`] were supplied.
    pub c_tau_cor: Option<f64>,
}

/// Polynomial ill-posedness `c_q j^-q <= sigma_j^2 <= C_q j^-q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryParams {
    pub q: f64,
    pub c_lower: f64,
    pub c_upper: f64,
}

pub fn constants(tau: f64, poly: Option<CorollaryParams>) -> Result<TheoremConstants> {
    if !(tau > 1.0 && tau.is_finite()) {
        return Err(Error::param(format!("tau must exceed 1, got {tau}")));
    }
    let ratio = (tau + 1.0) / (tau - 1.0);
    let a_tau = ratio * ratio;
    let b_tau = (3.0 * tau + 1.0).powi(2) / 4.0;
    let c_tau_weak = 6f64.sqrt() * (1.5 * (a_tau + 1.0) + b_tau).sqrt();
    let c_tau_strong =
        2f64.sqrt() * (ratio + 1.0).max(1.0 + (3.0f64 / 8.0).sqrt() * (3.0 * tau + 1.0));
    let c_tau_cor = match poly {
        None => None,
        Some(CorollaryParams {
            q,
            c_lower,
            c_upper,
        }) => {
            if !(q > 0.0 && c_lower > 0.0 && c_lower <= c_upper && c_upper.is_finite()) {
                return Err(Error::param(format!(
                    "need q > 0 and 0 < c_q <= C_q, got q = {q}, c_q = {c_lower}, C_q = {c_upper}"
                )));
            }
            let inner = 9f64.powf(1.0 + q) * (1.0 + q) * c_upper / c_lower * 4.0;
            Some((2f64.sqrt() * (ratio + 1.0)).max(2f64.sqrt() + (2.0 * tau + 1.0) * inner.sqrt()))
        }
    };
    Ok(TheoremConstants {
        tau,
        a_tau,
        b_tau,
        c_tau_weak,
        c_tau_strong,
        c_tau_cor,
    })
}

/// `sup_{kappa_idx <= m <= D} |(1/m) sum_{j<=m} (z_j^2 - 1)|`, the running
/// mean of the centered squared noise over the finite horizon.
pub fn empirical_sup_deviation(z: &[f64], kappa_idx: usize) -> Result<f64> {
    if kappa_idx == 0 || kappa_idx > z.len() {
        return Err(Error::param(format!(
            "kappa index {kappa_idx} outside [1, {}]",
            z.len()
        )));
    }
    let mut sum = 0.0;
    let mut sup = 0.0f64;
    for (i, v) in z.iter().enumerate() {
        sum += v * v - 1.0;
        let m = i + 1;
        if m >= kappa_idx {
            sup = sup.max((sum / m as f64).abs());
        }
    }
    Ok(sup)
}

/// Moment bound `2^(1 - 2/p) (gamma_p + 1)^(2/p) kappa^(2/p - 1)` on
/// `E|(1/kappa) sum_{j<=kappa} (z_j^2 - 1)|`, valid for `2 < p <= 4`.
pub fn prop1b_bound(p: f64, gamma_p: f64, kappa: usize) -> Result<f64> {
    if !(p > 2.0 && p <= 4.0) {
        return Err(Error::param(format!(
            "moment order must lie in (2, 4], got {p}"
        )));
    }
    if kappa == 0 {
        return Err(Error::param("kappa must be at least 1"));
    }
    let e = 2.0 / p;
    Ok(2f64.powf(1.0 - e) * (gamma_p + 1.0).powf(e) * (kappa as f64).powf(e - 1.0))
}
