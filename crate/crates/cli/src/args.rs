use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use specreg::montecarlo::ProblemParams;
use specreg::problems::build_synthetic;
use specreg::{
    ExperimentConfig, NoiseModel, ProblemSpec, RuleConfig, SpectralProblem, Spectrum, Truth,
};

#[derive(Debug, Parser)]
#[command(
    name = "specreg",
    version,
    about = "Truncation-rule study for spectral cut-off regularization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo tables of errors and truncation levels, plus boxplot data.
    Bench(Common),
    /// Invariant and frequency checks with a pass/fail report.
    Verify(VerifyArgs),
    /// Full diagnostics of one replicate per noise level.
    Single(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemName {
    Phillips,
    Deriv2,
    Gravity,
    Heat,
    SyntheticPoly,
    SyntheticExp,
    Direct,
}

impl ProblemName {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemName::Phillips => "phillips",
            ProblemName::Deriv2 => "deriv2",
            ProblemName::Gravity => "gravity",
            ProblemName::Heat => "heat",
            ProblemName::SyntheticPoly => "synthetic-poly",
            ProblemName::SyntheticExp => "synthetic-exp",
            ProblemName::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// D = 5000, 1000 replicates.
    Paper,
    /// D = 1024, 200 replicates.
    Desk,
}

impl Preset {
    fn size(self) -> usize {
        match self {
            Preset::Paper => 5000,
            Preset::Desk => 1024,
        }
    }

    fn replicates(self) -> usize {
        match self {
            Preset::Paper => 1000,
            Preset::Desk => 200,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    #[arg(long, value_enum)]
    pub problem: ProblemName,
    /// Discretization size; defaults to the preset.
    #[arg(long)]
    pub size: Option<usize>,
    /// Source depth of the gravity problem.
    #[arg(long)]
    pub depth: Option<f64>,
    /// Conductivity of the heat problem.
    #[arg(long)]
    pub kappa_heat: Option<f64>,
    /// Spectral decay exponent of synthetic-poly.
    #[arg(long)]
    pub q: Option<f64>,
    /// Truth decay `x_j = j^-s` of the synthetic problems.
    #[arg(long)]
    pub truth_power: Option<f64>,
    /// Replace the truth of a synthetic or direct problem by zero.
    #[arg(long)]
    pub zero_truth: bool,
    #[arg(long, value_delimiter = ',', default_values_t = ExperimentConfig::STANDARD_DELTAS.to_vec())]
    pub deltas: Vec<f64>,
    #[arg(long, default_value_t = 1.5)]
    pub tau: f64,
    #[arg(long, default_value_t = 4.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1.2)]
    pub tau_min: f64,
    /// Replicates per noise level; defaults to the preset.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = Preset::Paper)]
    pub preset: Preset,
}

impl Common {
    pub fn size(&self) -> usize {
        self.size.unwrap_or(self.preset.size())
    }

    pub fn replicates(&self) -> usize {
        self.replicates.unwrap_or(self.preset.replicates())
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let params = ProblemParams {
            depth: self.depth,
            kappa_heat: self.kappa_heat,
            q: self.q,
            truth_power: self.truth_power,
        };
        Ok(ProblemSpec::from_name(
            self.problem.as_str(),
            self.size(),
            params,
        )?)
    }

    /// Builds the configured problem in singular coordinates.
    pub fn build(&self, spec: &ProblemSpec) -> Result<SpectralProblem> {
        if !self.zero_truth {
            return Ok(spec.build()?);
        }
        let spectrum = match *spec {
            ProblemSpec::SyntheticPoly { q, .. } => Spectrum::Poly { q },
            ProblemSpec::SyntheticExp { .. } => Spectrum::Exp,
            ProblemSpec::Direct { .. } => Spectrum::Identity,
            _ => bail!("--zero-truth applies only to synthetic-poly, synthetic-exp and direct"),
        };
        let zero = Truth::Vector {
            values: vec![0.0; spec.size()],
        };
        Ok(build_synthetic(spec.size(), spectrum, &zero)?)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            problem: self.problem_spec()?,
            deltas: self.deltas.clone(),
            rules: RuleConfig {
                tau: self.tau,
                kappa: self.kappa,
                tau_min: self.tau_min,
                m_cap: None,
            },
            noise: NoiseModel::GAUSSIAN,
            replicates: self.replicates(),
            base_seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn single_experiment(&self) -> Result<ExperimentConfig> {
        if let Some(r) = self.replicates {
            if r != 1 {
                bail!("single runs exactly one replicate, got --replicates {r}");
            }
        }
        Ok(ExperimentConfig {
            replicates: 1,
            ..self.experiment()?
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// Lepski's rule equals the modified discrepancy principle when sigma == 1.
    Lepski,
    /// `k_pr <= k_st` in every replicate.
    Prop1a,
    /// Near-optimality of the balanced oracles in every replicate.
    Prop1,
    /// Combined rule below dp, optimal error below every rule.
    Orders,
    Thm1,
    Thm2,
    /// Only for synthetic-poly, whose constants are `c_q = C_q = 1`.
    Cor1,
    Example1,
    Prop1b,
    Prop2,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Checks to run; all by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Vec<Check>,
    /// Minimal frequency required of the oracle inequalities.
    #[arg(long, default_value_t = 0.95)]
    pub min_frequency: f64,
    #[arg(long, default_value_t = 1.05)]
    pub example1_kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub example1_delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub example1_replicates: usize,
    /// Replicates of the noise-moment checks.
    #[arg(long, default_value_t = 10_000)]
    pub moment_replicates: usize,
}

impl VerifyArgs {
    pub fn selected(&self) -> Vec<Check> {
        if self.checks.is_empty() {
            Check::value_variants().to_vec()
        } else {
            self.checks.clone()
        }
    }
}
