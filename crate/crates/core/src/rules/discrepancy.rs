use super::{squared_prefix, squared_threshold, Rule, SelectionResult};
use crate::error::{Error, Result};
use crate::problems::SpectralProblem;
use crate::sequence_model::NoisyObservation;

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 1.0 && tau.is_finite()) {
        return Err(Error::param(format!("tau must exceed 1, got {tau}")));
    }
    Ok(())
}

fn check_level(m: usize, dim: usize, what: &str) -> Result<()> {
    if m == 0 || m > dim {
        return Err(Error::param(format!("{what} = {m} outside [1, {dim}]")));
    }
    Ok(())
}

/// Smallest `k` in `[0, m]` with `S_m - S_k <= threshold`.
fn discrepancy_level(prefix: &[f64], m: usize, threshold: f64) -> usize {
    let s_m = prefix[m];
    prefix[..=m].partition_point(|&s_k| s_m - s_k > threshold)
}

/// Discrepancy principle at discretization level `m`: the smallest `k` with
/// `sum_{j=k+1}^m y_j^2 <= tau^2 m delta^2`.
pub fn dp_at_m(obs: &NoisyObservation, tau: f64, m: usize) -> Result<usize> {
    check_tau(tau)?;
    check_level(m, obs.dim(), "m")?;
    let prefix = squared_prefix(&obs.y_obs[..m]);
    Ok(discrepancy_level(
        &prefix,
        m,
        squared_threshold(tau, obs.delta, m),
    ))
}

/// Modified discrepancy principle: the maximum of [`dp_at_m`] over
/// `m = 1..=m_cap`.
///
/// Runs in `O(D log D)`: one prefix sum and a binary search per level. With
/// `trace` set, the per-level choices are kept in the result.
pub fn dp_modified(
    obs: &NoisyObservation,
    tau: f64,
    m_cap: usize,
    trace: bool,
) -> Result<SelectionResult> {
    check_tau(tau)?;
    check_level(m_cap, obs.dim(), "m_cap")?;
    let prefix = squared_prefix(&obs.y_obs[..m_cap]);
    let mut levels = trace.then(|| Vec::with_capacity(m_cap));
    let mut k = 0;
    for m in 1..=m_cap {
        let km = discrepancy_level(&prefix, m, squared_threshold(tau, obs.delta, m));
        k = k.max(km);
        if let Some(levels) = levels.as_mut() {
            levels.push(km);
        }
    }
    Ok(SelectionResult {
        rule: Rule::Dp,
        k,
        trace: levels,
        m_max: None,
    })
}

/// Lepski's rule for the direct problem (`sigma == 1`): the smallest `k` whose
/// partial sums stay within `kappa sqrt(m) delta` of every later one.
pub fn lepski_direct(p: &SpectralProblem, obs: &NoisyObservation, kappa: f64) -> Result<usize> {
    if !p.is_direct() {
        return Err(Error::WrongRegime(format!(
            "Lepski's rule needs a direct problem, `{}` has non-unit singular values",
            p.name
        )));
    }
    if !(kappa > 1.0 && kappa.is_finite()) {
        return Err(Error::param(format!("kappa must exceed 1, got {kappa}")));
    }
    let d = obs.dim();
    let prefix = squared_prefix(&obs.y_obs);
    let admissible = |k: usize| {
        ((k + 1)..=d).all(|m| prefix[m] - prefix[k] <= squared_threshold(kappa, obs.delta, m))
    };
    Ok((0..=d).find(|&k| admissible(k)).unwrap_or(d))
}

/// Right-hand side of the balancing test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BalancingForm {
    /// `||x_m - x_k|| <= kappa delta sqrt(sum_{j<=m} sigma_j^-2)`.
    #[default]
    Root,
    /// `||x_m - x_k|| <= kappa delta^2 sum_{j<=m} sigma_j^-2`, kept for
    /// comparison runs only; it is not scale invariant.
    Printed,
}

/// Balancing principle with the square-root threshold.
pub fn balancing(
    p: &SpectralProblem,
    obs: &NoisyObservation,
    kappa: f64,
    m_cap: usize,
) -> Result<usize> {
    balancing_with(p, obs, kappa, m_cap, BalancingForm::Root)
}

/// Balancing principle: the smallest `k` in `[0, m_cap]` such that
/// `||x_m - x_k||` stays below the strong-norm noise threshold for every
/// `m` in `(k, m_cap]`.
pub fn balancing_with(
    p: &SpectralProblem,
    obs: &NoisyObservation,
    kappa: f64,
    m_cap: usize,
    form: BalancingForm,
) -> Result<usize> {
    if !(kappa > 1.0 && kappa.is_finite()) {
        return Err(Error::param(format!("kappa must exceed 1, got {kappa}")));
    }
    check_level(m_cap, p.dim(), "m_cap")?;
    if obs.dim() != p.dim() {
        return Err(Error::InvalidDimension(
            "observation and problem differ in D".into(),
        ));
    }
    // weighted[m] = ||x_m||^2, inv_var[m] = sum_{j<=m} sigma_j^-2
    let mut weighted = vec![0.0; m_cap + 1];
    let mut inv_var = vec![0.0; m_cap + 1];
    for j in 0..m_cap {
        let c = obs.y_obs[j] / p.sigma[j];
        weighted[j + 1] = weighted[j] + c * c;
        inv_var[j + 1] = inv_var[j] + 1.0 / (p.sigma[j] * p.sigma[j]);
    }
    let threshold = |m: usize| match form {
        BalancingForm::Root => kappa * kappa * obs.delta * obs.delta * inv_var[m],
        BalancingForm::Printed => {
            let r = kappa * obs.delta * obs.delta * inv_var[m];
            r * r
        }
    };
    // k is admissible iff weighted[k] >= max_{m > k} (weighted[m] - threshold(m));
    // admissibility is upward closed, so scan the suffix maxima from the top.
    let mut suffix_max = vec![f64::NEG_INFINITY; m_cap + 1];
    for k in (0..m_cap).rev() {
        suffix_max[k] = suffix_max[k + 1].max(weighted[k + 1] - threshold(k + 1));
    }
    Ok((0..=m_cap)
        .find(|&k| weighted[k] >= suffix_max[k])
        .unwrap_or(m_cap))
}

/// Early-stopping discrepancy principle on the first `d_used` coefficients
/// (`tau = 1`, fixed level `d_used`).
pub fn early_stop(obs: &NoisyObservation, d_used: usize) -> Result<usize> {
    check_level(d_used, obs.dim(), "D_used")?;
    Ok(stopping_index(obs, d_used, 1.0))
}

/// Smallest `k` with `S_D - S_k <= (factor delta)^2 D`, found by walking the
/// residual down from `k = 0` as a sequential implementation would.
fn stopping_index(obs: &NoisyObservation, d_used: usize, factor: f64) -> usize {
    let threshold = squared_threshold(factor, obs.delta, d_used);
    let prefix = squared_prefix(&obs.y_obs[..d_used]);
    let total = prefix[d_used];
    (0..=d_used)
        .find(|&k| total - prefix[k] <= threshold)
        .unwrap_or(d_used)
}

/// Combined rule: early stopping with `tau_min` bounds the discretization
/// level, then the modified discrepancy principle maximizes below it.
pub fn combined(
    obs: &NoisyObservation,
    tau: f64,
    tau_min: f64,
    d_used: usize,
) -> Result<SelectionResult> {
    if !(tau_min >= 1.0 && tau > tau_min && tau.is_finite()) {
        return Err(Error::param(format!(
            "combined rule needs tau > tau_min >= 1, got tau = {tau}, tau_min = {tau_min}"
        )));
    }
    check_level(d_used, obs.dim(), "D_used")?;
    let m_max = stopping_index(obs, d_used, tau_min);
    let prefix = squared_prefix(&obs.y_obs[..d_used]);
    let k = (1..=m_max)
        .map(|m| discrepancy_level(&prefix, m, squared_threshold(tau, obs.delta, m)))
        .max()
        .unwrap_or(0);
    Ok(SelectionResult {
        rule: Rule::Combined,
        k,
        trace: None,
        m_max: Some(m_max),
    })
}

/// Per-level discrepancy choice with an unchecked `tau >= 1`; used to tie
/// early stopping to the `tau -> 1` limit of [`dp_at_m`].
#[cfg(test)]
pub(crate) fn dp_at_m_unchecked(obs: &NoisyObservation, tau: f64, m: usize) -> usize {
    let prefix = squared_prefix(&obs.y_obs[..m]);
    discrepancy_level(&prefix, m, squared_threshold(tau, obs.delta, m))
}
