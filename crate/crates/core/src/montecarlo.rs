//! Seeded Monte Carlo replication over noise levels, summary statistics, and
//! empirical frequencies of the oracle inequalities.
//!
//! Replicate `i` at noise level index `d` draws its noise from
//! `derive_seed(base_seed, d, i)`, so every replicate can run on any thread
//! and the collected records are identical to a serial run.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::problems::{
    build_deriv2, build_gravity, build_heat, build_phillips, build_synthetic, decompose,
    spectralize_factors, SpectralProblem, Spectrum, Truth, GRAVITY_DEPTH, HEAT_KAPPA,
};
use crate::rules::{
    balancing, combined, dp_modified, early_stop, empirical_sup_deviation, Rule, RuleConfig,
    TheoremConstants,
};
use crate::sequence_model::{observe, sample_noise, ErrorProfile, NoiseModel, NoisyObservation};

/// Rules evaluated in every replicate, in table order.
pub const RECORDED_RULES: [Rule; 7] = [
    Rule::Dp,
    Rule::Balancing,
    Rule::EarlyStop,
    Rule::Combined,
    Rule::OracleOpt,
    Rule::OracleWeak,
    Rule::OracleStrong,
];

/// Extra dimensions beyond `ln(delta^-2)` in the exponential counterexample.
pub const EXAMPLE1_MARGIN: usize = 10;

/// A named problem builder with its size and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "problem")]
pub enum ProblemSpec {
    Phillips {
        size: usize,
    },
    Deriv2 {
        size: usize,
    },
    Gravity {
        size: usize,
        depth: f64,
    },
    Heat {
        size: usize,
        kappa_heat: f64,
    },
    SyntheticPoly {
        size: usize,
        q: f64,
        truth_power: f64,
    },
    SyntheticExp {
        size: usize,
        truth_power: f64,
    },
    Direct {
        size: usize,
        truth_power: f64,
    },
}

/// Optional builder parameters; unset values fall back to the defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProblemParams {
    pub depth: Option<f64>,
    pub kappa_heat: Option<f64>,
    pub q: Option<f64>,
    pub truth_power: Option<f64>,
}

impl ProblemSpec {
    pub const NAMES: [&'static str; 7] = [
        "phillips",
        "deriv2",
        "gravity",
        "heat",
        "synthetic-poly",
        "synthetic-exp",
        "direct",
    ];

    pub fn from_name(name: &str, size: usize, params: ProblemParams) -> Result<Self> {
        let s = params.truth_power.unwrap_or(1.0);
        Ok(match name {
            "phillips" => ProblemSpec::Phillips { size },
            "deriv2" => ProblemSpec::Deriv2 { size },
            "gravity" => ProblemSpec::Gravity {
                size,
                depth: params.depth.unwrap_or(GRAVITY_DEPTH),
            },
            "heat" => ProblemSpec::Heat {
                size,
                kappa_heat: params.kappa_heat.unwrap_or(HEAT_KAPPA),
            },
            "synthetic-poly" => ProblemSpec::SyntheticPoly {
                size,
                q: params.q.unwrap_or(2.0),
                truth_power: s,
            },
            "synthetic-exp" => ProblemSpec::SyntheticExp {
                size,
                truth_power: s,
            },
            "direct" => ProblemSpec::Direct {
                size,
                truth_power: s,
            },
            other => {
                return Err(Error::param(format!(
                    "unknown problem `{other}`, expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Phillips { .. } => "phillips",
            ProblemSpec::Deriv2 { .. } => "deriv2",
            ProblemSpec::Gravity { .. } => "gravity",
            ProblemSpec::Heat { .. } => "heat",
            ProblemSpec::SyntheticPoly { .. } => "synthetic-poly",
            ProblemSpec::SyntheticExp { .. } => "synthetic-exp",
            ProblemSpec::Direct { .. } => "direct",
        }
    }

    pub fn size(&self) -> usize {
        match *self {
            ProblemSpec::Phillips { size }
            | ProblemSpec::Deriv2 { size }
            | ProblemSpec::Gravity { size, .. }
            | ProblemSpec::Heat { size, .. }
            | ProblemSpec::SyntheticPoly { size, .. }
            | ProblemSpec::SyntheticExp { size, .. }
            | ProblemSpec::Direct { size, .. } => size,
        }
    }

    /// Builds the problem in singular coordinates. Dense problems are
    /// decomposed, which dominates the cost for large sizes.
    pub fn build(&self) -> Result<SpectralProblem> {
        let dense = match *self {
            ProblemSpec::Phillips { size } => build_phillips(size),
            ProblemSpec::Deriv2 { size } => build_deriv2(size),
            ProblemSpec::Gravity { size, depth } => build_gravity(size, depth),
            ProblemSpec::Heat { size, kappa_heat } => build_heat(size, kappa_heat),
            ProblemSpec::SyntheticPoly {
                size,
                q,
                truth_power,
            } => {
                return build_synthetic(
                    size,
                    Spectrum::Poly { q },
                    &Truth::Power { s: truth_power },
                )
            }
            ProblemSpec::SyntheticExp { size, truth_power } => {
                return build_synthetic(size, Spectrum::Exp, &Truth::Power { s: truth_power })
            }
            ProblemSpec::Direct { size, truth_power } => {
                return build_synthetic(size, Spectrum::Identity, &Truth::Power { s: truth_power })
            }
        }?;
        let factors = decompose(&dense)?;
        spectralize_factors(&dense, &factors)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub deltas: Vec<f64>,
    pub rules: RuleConfig,
    pub noise: NoiseModel,
    pub replicates: usize,
    pub base_seed: u64,
}

impl ExperimentConfig {
    /// Noise levels used throughout the comparative study.
    pub const STANDARD_DELTAS: [f64; 4] = [1e0, 1e-2, 1e-4, 1e-6];

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::param("need at least one replicate"));
        }
        if self.deltas.is_empty() {
            return Err(Error::param("need at least one noise level"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::param(format!(
                "noise levels must be positive, got {d}"
            )));
        }
        self.rules.validate()?;
        sample_noise(&self.noise, 0, 0)?;
        Ok(())
    }
}

/// Outcome of one replicate at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub delta: f64,
    pub delta_index: usize,
    pub replicate: usize,
    pub seed: u64,
    pub k: BTreeMap<Rule, usize>,
    pub e_strong: BTreeMap<Rule, f64>,
    pub e_weak: BTreeMap<Rule, f64>,
    /// `min_k ||K(x_k - x)||`.
    pub min_weak: f64,
    /// `min_k ||x_k - x||`.
    pub min_strong: f64,
    /// `sqrt(sum_{j = k_pr}^{k_st} x_j^2)`.
    pub saturation: f64,
    /// Weak error one level below `k_pr`, when `k_pr >= 1`.
    pub e_weak_below_pr: Option<f64>,
    /// Strong error one level below `k_st`, when `k_st >= 1`.
    pub e_strong_below_st: Option<f64>,
    /// Discretization bound of the combined rule.
    pub m_max: usize,
}

impl ReplicateRecord {
    pub fn k_of(&self, rule: Rule) -> usize {
        self.k[&rule]
    }

    pub fn strong_of(&self, rule: Rule) -> f64 {
        self.e_strong[&rule]
    }

    pub fn weak_of(&self, rule: Rule) -> f64 {
        self.e_weak[&rule]
    }

    /// Near-optimality of the balanced oracles in both norms:
    /// `min error >= min(e(k), e(k - 1)) / sqrt(2)` at the oracle level `k`.
    pub fn oracles_near_optimal(&self) -> bool {
        let ok = |min: f64, at: f64, below: Option<f64>| match below {
            None => true,
            Some(b) => min >= at.min(b) / std::f64::consts::SQRT_2,
        };
        ok(
            self.min_weak,
            self.weak_of(Rule::OracleWeak),
            self.e_weak_below_pr,
        ) && ok(
            self.min_strong,
            self.strong_of(Rule::OracleStrong),
            self.e_strong_below_st,
        )
    }
}

/// `splitmix64` finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of replicate `replicate` at noise-level index `delta_index`.
pub fn derive_seed(base_seed: u64, delta_index: usize, replicate: usize) -> u64 {
    base_seed ^ mix(mix(delta_index as u64) ^ replicate as u64)
}

/// Evaluates every recorded rule on one observation.
pub fn evaluate(
    p: &SpectralProblem,
    obs: &NoisyObservation,
    rules: &RuleConfig,
    delta_index: usize,
    replicate: usize,
) -> Result<ReplicateRecord> {
    let d = p.dim();
    let m_cap = rules.m_cap_for(d)?;
    let profile = ErrorProfile::new(p, obs);
    let com = combined(obs, rules.tau, rules.tau_min, d)?;
    let k_pr = profile.balanced_weak();
    let k_st = profile.balanced_strong();
    let levels = [
        (Rule::Dp, dp_modified(obs, rules.tau, m_cap, false)?.k),
        (Rule::Balancing, balancing(p, obs, rules.kappa, m_cap)?),
        (Rule::EarlyStop, early_stop(obs, d)?),
        (Rule::Combined, com.k),
        (Rule::OracleOpt, profile.argmin_strong()),
        (Rule::OracleWeak, k_pr),
        (Rule::OracleStrong, k_st),
    ];
    let saturation = p.x_true[k_pr.saturating_sub(1).min(k_st)..k_st]
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    Ok(ReplicateRecord {
        delta: obs.delta,
        delta_index,
        replicate,
        seed: obs.seed,
        k: levels.iter().copied().collect(),
        e_strong: levels
            .iter()
            .map(|&(r, k)| (r, profile.strong(k)))
            .collect(),
        e_weak: levels.iter().map(|&(r, k)| (r, profile.weak(k))).collect(),
        min_weak: profile.min_weak(),
        min_strong: profile.min_strong(),
        saturation,
        e_weak_below_pr: (k_pr >= 1).then(|| profile.weak(k_pr - 1)),
        e_strong_below_st: (k_st >= 1).then(|| profile.strong(k_st - 1)),
        m_max: com.m_max.unwrap_or(0),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ReplicateRecord>> {
    cfg.validate()?;
    let p = cfg
        .problem
        .build()
        .map_err(|e| e.context(format!("building {}", cfg.problem.name())))?;
    run_on_problem(&p, cfg)
}

/// Runs the replicates of `cfg` on an already built problem; `cfg.problem`
/// is ignored.
pub fn run_on_problem(p: &SpectralProblem, cfg: &ExperimentConfig) -> Result<Vec<ReplicateRecord>> {
    cfg.validate()?;
    cfg.rules.m_cap_for(p.dim())?;
    let jobs: Vec<(usize, usize)> = (0..cfg.deltas.len())
        .flat_map(|d| (0..cfg.replicates).map(move |i| (d, i)))
        .collect();
    jobs.par_iter()
        .map(|&(d, i)| {
            let seed = derive_seed(cfg.base_seed, d, i);
            let obs = observe(p, cfg.deltas[d], &cfg.noise, seed)?;
            evaluate(p, &obs, &cfg.rules, d, i)
        })
        .collect()
}

/// Tukey boxplot summary with linear-interpolation quartiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    /// Smallest sample not below `q25 - 1.5 IQR`.
    pub whisker_lo: f64,
    /// Largest sample not above `q75 + 1.5 IQR`.
    pub whisker_hi: f64,
    /// Samples beyond the whiskers.
    pub outliers: Vec<f64>,
    /// Samples strictly outside `[q25, q75]`.
    pub n_outside_box: usize,
}

/// Quantile of sorted data by linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BoxplotStats {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("boxplot of no samples".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q25 = quantile(&sorted, 0.25);
        let q75 = quantile(&sorted, 0.75);
        let iqr = q75 - q25;
        let (fence_lo, fence_hi) = (q25 - 1.5 * iqr, q75 + 1.5 * iqr);
        let inside = sorted
            .iter()
            .copied()
            .filter(|&v| v >= fence_lo && v <= fence_hi);
        let whisker_lo = inside.clone().next().unwrap_or(q25).min(q25);
        let whisker_hi = inside.clone().next_back().unwrap_or(q75).max(q75);
        Ok(Self {
            median: quantile(&sorted, 0.5),
            q25,
            q75,
            whisker_lo,
            whisker_hi,
            outliers: sorted
                .iter()
                .copied()
                .filter(|&v| v < fence_lo || v > fence_hi)
                .collect(),
            n_outside_box: sorted.iter().filter(|&&v| v < q25 || v > q75).count(),
        })
    }
}

/// Sample mean and standard deviation (`n - 1` denominator, `0` for a single
/// sample).
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = samples.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleStats {
    pub delta: f64,
    pub rule: Rule,
    pub mean_error: f64,
    pub std_error: f64,
    pub mean_k: f64,
    pub std_k: f64,
    pub mean_weak_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaBoxplot {
    pub delta: f64,
    pub stats: BoxplotStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// Prediction-error oracle inequality.
    Thm1,
    /// Strong-norm inequality with the saturation term.
    Thm2,
    /// Strong-norm inequality for polynomially ill-posed operators.
    Cor1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremFrequency {
    pub delta: f64,
    pub which: Inequality,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub deltas: Vec<f64>,
    pub replicates: usize,
    /// One row per noise level and rule, rules in table order.
    pub stats: Vec<RuleStats>,
    /// Boxplot of the early-stopping level per noise level.
    pub boxplots: Vec<DeltaBoxplot>,
    pub theorem_frequencies: Vec<TheoremFrequency>,
    /// Records violating `k_pr <= k_st`.
    pub oracle_order_violations: usize,
}

impl ExperimentSummary {
    pub fn stat(&self, delta: f64, rule: Rule) -> Option<&RuleStats> {
        self.stats
            .iter()
            .find(|s| s.delta == delta && s.rule == rule)
    }

    /// Adds per-noise-level frequencies of every inequality whose constant
    /// is available.
    pub fn attach_frequencies(
        &mut self,
        records: &[ReplicateRecord],
        constants: &TheoremConstants,
    ) -> Result<()> {
        let mut which = vec![Inequality::Thm1, Inequality::Thm2];
        if constants.c_tau_cor.is_some() {
            which.push(Inequality::Cor1);
        }
        for &delta in &self.deltas {
            let group: Vec<ReplicateRecord> = records
                .iter()
                .filter(|r| r.delta == delta)
                .cloned()
                .collect();
            for &w in &which {
                self.theorem_frequencies.push(TheoremFrequency {
                    delta,
                    which: w,
                    frequency: theorem_frequency(&group, w, constants)?,
                });
            }
        }
        Ok(())
    }
}

/// Groups records by noise level in order of first appearance.
fn by_delta(records: &[ReplicateRecord]) -> Vec<(f64, Vec<&ReplicateRecord>)> {
    let mut groups: Vec<(f64, Vec<&ReplicateRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(d, _)| *d == r.delta) {
            Some((_, g)) => g.push(r),
            None => groups.push((r.delta, vec![r])),
        }
    }
    groups
}

pub fn summarize(records: &[ReplicateRecord]) -> Result<ExperimentSummary> {
    if records.is_empty() {
        return Err(Error::EmptyInput(
            "no replicate records to summarize".into(),
        ));
    }
    let groups = by_delta(records);
    let mut stats = Vec::new();
    let mut boxplots = Vec::new();
    for (delta, group) in &groups {
        for rule in RECORDED_RULES {
            let errs: Vec<f64> = group.iter().map(|r| r.strong_of(rule)).collect();
            let weak: Vec<f64> = group.iter().map(|r| r.weak_of(rule)).collect();
            let ks: Vec<f64> = group.iter().map(|r| r.k_of(rule) as f64).collect();
            let (mean_error, std_error) = mean_std(&errs);
            let (mean_k, std_k) = mean_std(&ks);
            stats.push(RuleStats {
                delta: *delta,
                rule,
                mean_error,
                std_error,
                mean_k,
                std_k,
                mean_weak_error: mean_std(&weak).0,
            });
        }
        let es: Vec<f64> = group
            .iter()
            .map(|r| r.k_of(Rule::EarlyStop) as f64)
            .collect();
        boxplots.push(DeltaBoxplot {
            delta: *delta,
            stats: BoxplotStats::from_samples(&es)?,
        });
    }
    Ok(ExperimentSummary {
        deltas: groups.iter().map(|(d, _)| *d).collect(),
        replicates: groups.iter().map(|(_, g)| g.len()).max().unwrap_or(0),
        stats,
        boxplots,
        theorem_frequencies: Vec::new(),
        oracle_order_violations: records
            .iter()
            .filter(|r| r.k_of(Rule::OracleWeak) > r.k_of(Rule::OracleStrong))
            .count(),
    })
}

/// Fraction of records satisfying the chosen inequality for `k_dp`.
pub fn theorem_frequency(
    records: &[ReplicateRecord],
    which: Inequality,
    constants: &TheoremConstants,
) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput(
            "no records for a theorem frequency".into(),
        ));
    }
    let holds: Box<dyn Fn(&ReplicateRecord) -> bool> = match which {
        Inequality::Thm1 => {
            let c = constants.c_tau_weak;
            Box::new(move |r| r.weak_of(Rule::Dp) <= c * r.min_weak)
        }
        Inequality::Thm2 => {
            let c = constants.c_tau_strong;
            Box::new(move |r| r.strong_of(Rule::Dp) <= c * (r.min_strong + r.saturation))
        }
        Inequality::Cor1 => {
            let c = constants
                .c_tau_cor
                .ok_or_else(|| Error::param("the corollary constant needs q, c_q and C_q"))?;
            Box::new(move |r| r.strong_of(Rule::Dp) <= c * r.min_strong)
        }
    };
    let count = records.iter().filter(|r| holds(r)).count();
    Ok(count as f64 / records.len() as f64)
}

/// The exponential counterexample: `sigma_j^2 = e^-j`, zero truth.
pub fn example1_problem(delta: f64) -> Result<SpectralProblem> {
    if !(delta > 0.0 && delta <= (-1.0f64).exp()) {
        return Err(Error::param(format!(
            "delta must lie in (0, 1/e], got {delta}"
        )));
    }
    let dim = (delta.powi(-2)).ln().ceil() as usize + EXAMPLE1_MARGIN;
    build_synthetic(
        dim,
        Spectrum::Exp,
        &Truth::Vector {
            values: vec![0.0; dim],
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Outcome {
    pub dim: usize,
    /// Empirical `P(||x_bal|| >= 1)`.
    pub frequency: f64,
    /// `P(|N(0, 1)| > e kappa)`.
    pub p_kappa: f64,
    /// Replicates with a nonzero optimal level; zero truth forces none.
    pub nonzero_opt: usize,
}

/// Frequency with which the balancing principle returns an estimate of norm
/// at least one although the truth is zero.
pub fn example1_frequency(
    kappa: f64,
    delta: f64,
    replicates: usize,
    seed: u64,
) -> Result<Example1Outcome> {
    if replicates == 0 {
        return Err(Error::param("need at least one replicate"));
    }
    let p = example1_problem(delta)?;
    let d = p.dim();
    let hits: Vec<(bool, bool)> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let obs = observe(&p, delta, &NoiseModel::GAUSSIAN, derive_seed(seed, 0, i))?;
            let k = balancing(&p, &obs, kappa, d)?;
            let norm2: f64 = (0..k).map(|j| (obs.y_obs[j] / p.sigma[j]).powi(2)).sum();
            Ok((
                norm2 >= 1.0,
                ErrorProfile::new(&p, &obs).argmin_strong() != 0,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(Example1Outcome {
        dim: d,
        frequency: hits.iter().filter(|h| h.0).count() as f64 / replicates as f64,
        p_kappa: erfc(std::f64::consts::E * kappa / std::f64::consts::SQRT_2),
        nonzero_opt: hits.iter().filter(|h| h.1).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop2Outcome {
    /// Fraction of replicates with `sup_{m >= kappa} |mean_m| > epsilon`.
    pub empirical_prob: f64,
    /// `E|mean_kappa| / epsilon`, the expectation estimated from the same draws.
    pub bound: f64,
    /// Estimate of `E|mean_kappa|`.
    pub mean_abs_deviation: f64,
}

/// `|(1/kappa) sum_{j<=kappa} (z_j^2 - 1)|`.
fn running_mean_deviation(z: &[f64]) -> f64 {
    (z.iter().map(|v| v * v - 1.0).sum::<f64>() / z.len() as f64).abs()
}

/// Monte Carlo estimate of `E|(1/kappa) sum_{j<=kappa} (z_j^2 - 1)|`.
pub fn mean_abs_deviation(
    model: &NoiseModel,
    kappa: usize,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    if kappa == 0 || replicates == 0 {
        return Err(Error::param("need kappa >= 1 and at least one replicate"));
    }
    let devs: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            Ok(running_mean_deviation(&sample_noise(
                model,
                kappa,
                derive_seed(seed, 0, i),
            )?))
        })
        .collect::<Result<_>>()?;
    Ok(mean_std(&devs).0)
}

/// Maximal running-mean deviation beyond `kappa_idx` against its
/// Doob-type bound.
pub fn prop2_check(
    model: &NoiseModel,
    dim: usize,
    kappa_idx: usize,
    epsilon: f64,
    replicates: usize,
    seed: u64,
) -> Result<Prop2Outcome> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::param(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if kappa_idx == 0 || kappa_idx > dim {
        return Err(Error::param(format!(
            "need 1 <= kappa <= D, got {kappa_idx} and {dim}"
        )));
    }
    if replicates == 0 {
        return Err(Error::param("need at least one replicate"));
    }
    let draws: Vec<(bool, f64)> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let z = sample_noise(model, dim, derive_seed(seed, 0, i))?;
            let sup = empirical_sup_deviation(&z, kappa_idx)?;
            Ok((sup > epsilon, running_mean_deviation(&z[..kappa_idx])))
        })
        .collect::<Result<_>>()?;
    let n = replicates as f64;
    let mean_abs = draws.iter().map(|d| d.1).sum::<f64>() / n;
    Ok(Prop2Outcome {
        empirical_prob: draws.iter().filter(|d| d.0).count() as f64 / n,
        bound: mean_abs / epsilon,
        mean_abs_deviation: mean_abs,
    })
}
