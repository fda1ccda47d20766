//! Truncation-level selection rules, balanced oracles and the constants of
//! the oracle inequalities.
//!
//! Every threshold test is carried out on squared quantities with inclusive
//! inequalities; for the discrepancy-type rules the residual
//! `sum_{j=k+1}^m y_j^2` is always evaluated as a difference of prefix sums
//! `S_m - S_k`, which is monotone in `k` even in floating point.

mod constants;
mod discrepancy;
mod oracles;
pub mod reference;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use constants::{
    constants, empirical_sup_deviation, prop1b_bound, CorollaryParams, TheoremConstants,
};
pub use discrepancy::{
    balancing, balancing_with, combined, dp_at_m, dp_modified, early_stop, lepski_direct,
    BalancingForm,
};
pub use oracles::{det_strong, det_weak, oracle_opt, oracle_strong, oracle_weak};

/// Serialized under the short table label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "dp")]
    Dp,
    #[serde(rename = "dp_at_m")]
    DpAtM,
    #[serde(rename = "lep")]
    Lepski,
    #[serde(rename = "bal")]
    Balancing,
    #[serde(rename = "es")]
    EarlyStop,
    #[serde(rename = "com")]
    Combined,
    #[serde(rename = "opt")]
    OracleOpt,
    #[serde(rename = "pr")]
    OracleWeak,
    #[serde(rename = "st")]
    OracleStrong,
    #[serde(rename = "det_pr")]
    DetWeak,
    #[serde(rename = "det_st")]
    DetStrong,
}

impl Rule {
    /// Short label used in tables.
    pub fn label(self) -> &'static str {
        match self {
            Rule::Dp => "dp",
            Rule::DpAtM => "dp_at_m",
            Rule::Lepski => "lep",
            Rule::Balancing => "bal",
            Rule::EarlyStop => "es",
            Rule::Combined => "com",
            Rule::OracleOpt => "opt",
            Rule::OracleWeak => "pr",
            Rule::OracleStrong => "st",
            Rule::DetWeak => "det_pr",
            Rule::DetStrong => "det_st",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Fudge parameters shared by the data-driven rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleConfig {
    /// Discrepancy threshold factor, `tau > 1`.
    pub tau: f64,
    /// Lepski / balancing threshold factor, `kappa > 1`.
    pub kappa: f64,
    /// Inner threshold of the combined rule, `1 <= tau_min < tau`.
    pub tau_min: f64,
    /// Upper bound of the maximization over `m`; `None` means `D`.
    pub m_cap: Option<usize>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            tau: 1.5,
            kappa: 4.0,
            tau_min: 1.2,
            m_cap: None,
        }
    }
}

impl RuleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 1.0 && self.tau.is_finite()) {
            return Err(Error::param(format!("tau must exceed 1, got {}", self.tau)));
        }
        if !(self.kappa > 1.0 && self.kappa.is_finite()) {
            return Err(Error::param(format!(
                "kappa must exceed 1, got {}",
                self.kappa
            )));
        }
        if !(self.tau_min >= 1.0 && self.tau_min < self.tau) {
            return Err(Error::param(format!(
                "need 1 <= tau_min < tau, got tau_min = {} and tau = {}",
                self.tau_min, self.tau
            )));
        }
        if self.m_cap == Some(0) {
            return Err(Error::param("m_cap must be at least 1"));
        }
        Ok(())
    }

    /// The cap resolved against a problem of dimension `dim`.
    pub fn m_cap_for(&self, dim: usize) -> Result<usize> {
        match self.m_cap {
            None => Ok(dim),
            Some(m) if m >= 1 && m <= dim => Ok(m),
            Some(m) => Err(Error::param(format!("m_cap = {m} outside [1, {dim}]"))),
        }
    }
}

/// Truncation level chosen by a rule, with optional diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub rule: Rule,
    pub k: usize,
    /// `trace[m - 1]` is the per-level discrepancy choice at level `m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
}

/// `S_k = sum_{j <= k} values_j^2` for `k = 0..=len`.
pub(crate) fn squared_prefix(values: &[f64]) -> Vec<f64> {
    let mut s = Vec::with_capacity(values.len() + 1);
    s.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v * v;
        s.push(acc);
    }
    s
}

/// Squared discrepancy threshold `(factor * delta)^2 * m`.
#[inline]
pub(crate) fn squared_threshold(factor: f64, delta: f64, m: usize) -> f64 {
    let fd = factor * delta;
    fd * fd * m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(RuleConfig::default().validate().is_ok());
        let bad = |f: fn(&mut RuleConfig)| {
            let mut c = RuleConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.tau = 1.0));
        assert!(bad(|c| c.kappa = 0.5));
        assert!(bad(|c| c.tau_min = 1.5));
        assert!(bad(|c| c.tau_min = 0.9));
        assert!(bad(|c| c.m_cap = Some(0)));
        let c = RuleConfig {
            m_cap: Some(10),
            ..Default::default()
        };
        assert_eq!(c.m_cap_for(20).unwrap(), 10);
        assert!(c.m_cap_for(5).is_err());
        assert_eq!(RuleConfig::default().m_cap_for(7).unwrap(), 7);
    }
}
