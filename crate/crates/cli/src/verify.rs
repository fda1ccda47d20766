use anyhow::Result;
use serde::Serialize;

use specreg::montecarlo::{
    example1_frequency, mean_abs_deviation, prop2_check, run_on_problem, theorem_frequency,
    Inequality,
};
use specreg::rules::{constants, dp_modified, lepski_direct, prop1b_bound, CorollaryParams};
use specreg::sequence_model::observe;
use specreg::{ExperimentConfig, NoiseModel, ProblemSpec, ReplicateRecord, Rule, SpectralProblem};

use crate::args::{Check, VerifyArgs};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(
        check: impl Into<String>,
        observed: f64,
        bound: f64,
        pass: bool,
        detail: String,
    ) -> Self {
        Self {
            check: check.into(),
            observed,
            bound,
            pass,
            detail,
        }
    }

    /// A count of violations that must be zero.
    fn zero(check: &str, violations: usize, total: usize, what: &str) -> Self {
        Self::new(
            check,
            violations as f64,
            0.0,
            violations == 0,
            format!("{violations} of {total} {what}"),
        )
    }
}

/// State shared between checks so the problem and the records are built once.
struct Context<'a> {
    args: &'a VerifyArgs,
    cfg: ExperimentConfig,
    problem: Option<SpectralProblem>,
    records: Option<Vec<ReplicateRecord>>,
}

impl Context<'_> {
    fn problem(&mut self) -> Result<&SpectralProblem> {
        if self.problem.is_none() {
            eprintln!(
                "building {} (D = {})",
                self.cfg.problem.name(),
                self.cfg.problem.size()
            );
            self.problem = Some(self.args.common.build(&self.cfg.problem)?);
        }
        Ok(self.problem.as_ref().unwrap())
    }

    fn records(&mut self) -> Result<&[ReplicateRecord]> {
        if self.records.is_none() {
            self.problem()?;
            let recs = run_on_problem(self.problem.as_ref().unwrap(), &self.cfg)?;
            self.records = Some(recs);
        }
        Ok(self.records.as_deref().unwrap())
    }
}

fn lepski(ctx: &mut Context) -> Result<CheckResult> {
    // Direct problem of the configured size; kappa equals tau.
    let spec = ProblemSpec::Direct {
        size: ctx.cfg.problem.size(),
        truth_power: ctx.args.common.truth_power.unwrap_or(1.0),
    };
    let p = spec.build()?;
    let tau = ctx.cfg.rules.tau;
    let mut total = 0;
    let mut agree = 0;
    for (d, &delta) in ctx.cfg.deltas.iter().enumerate() {
        for i in 0..ctx.cfg.replicates {
            let seed = specreg::montecarlo::derive_seed(ctx.cfg.base_seed, d, i);
            let obs = observe(&p, delta, &NoiseModel::GAUSSIAN, seed)?;
            total += 1;
            agree += usize::from(
                lepski_direct(&p, &obs, tau)? == dp_modified(&obs, tau, p.dim(), false)?.k,
            );
        }
    }
    let rate = agree as f64 / total as f64;
    Ok(CheckResult::new(
        "lepski",
        rate,
        1.0,
        agree == total,
        format!(
            "k_lep == k_dp in {agree}/{total} direct instances ({:.1}%)",
            100.0 * rate
        ),
    ))
}

fn frequencies(ctx: &mut Context, which: Inequality) -> Result<Vec<CheckResult>> {
    let poly = match ctx.cfg.problem {
        ProblemSpec::SyntheticPoly { q, .. } => Some(CorollaryParams {
            q,
            c_lower: 1.0,
            c_upper: 1.0,
        }),
        _ => None,
    };
    let label = match which {
        Inequality::Thm1 => "thm1",
        Inequality::Thm2 => "thm2",
        Inequality::Cor1 => "cor1",
    };
    if which == Inequality::Cor1 && poly.is_none() {
        return Ok(vec![CheckResult::new(
            label,
            f64::NAN,
            f64::NAN,
            true,
            "skipped: spectral constants are known only for synthetic-poly".into(),
        )]);
    }
    let c = constants(ctx.cfg.rules.tau, poly)?;
    let min = ctx.args.min_frequency;
    let deltas = ctx.cfg.deltas.clone();
    let recs = ctx.records()?;
    let mut out = Vec::new();
    for delta in deltas {
        let group: Vec<ReplicateRecord> =
            recs.iter().filter(|r| r.delta == delta).cloned().collect();
        let f = theorem_frequency(&group, which, &c)?;
        let held = (f * group.len() as f64).round() as usize;
        out.push(CheckResult::new(
            format!("{label}@{delta:?}"),
            f,
            min,
            f >= min,
            format!("inequality holds in {held} of {} replicates", group.len()),
        ));
    }
    Ok(out)
}

fn run_check(ctx: &mut Context, check: Check) -> Result<Vec<CheckResult>> {
    let one = |r: CheckResult| Ok(vec![r]);
    match check {
        Check::Lepski => one(lepski(ctx)?),
        Check::Prop1a => {
            let recs = ctx.records()?;
            let bad = recs
                .iter()
                .filter(|r| r.k_of(Rule::OracleWeak) > r.k_of(Rule::OracleStrong))
                .count();
            one(CheckResult::zero(
                "prop1a",
                bad,
                recs.len(),
                "replicates with k_pr > k_st",
            ))
        }
        Check::Prop1 => {
            let recs = ctx.records()?;
            let bad = recs.iter().filter(|r| !r.oracles_near_optimal()).count();
            one(CheckResult::zero(
                "prop1",
                bad,
                recs.len(),
                "replicates with a far-from-optimal oracle",
            ))
        }
        Check::Orders => {
            let recs = ctx.records()?;
            let bad = recs
                .iter()
                .filter(|r| {
                    r.k_of(Rule::Combined) > r.k_of(Rule::Dp)
                        || [Rule::Dp, Rule::Balancing, Rule::EarlyStop, Rule::Combined]
                            .iter()
                            .any(|&rule| r.strong_of(Rule::OracleOpt) > r.strong_of(rule))
                })
                .count();
            one(CheckResult::zero(
                "orders",
                bad,
                recs.len(),
                "replicates with k_com > k_dp or e_opt above a rule",
            ))
        }
        Check::Thm1 => frequencies(ctx, Inequality::Thm1),
        Check::Thm2 => frequencies(ctx, Inequality::Thm2),
        Check::Cor1 => frequencies(ctx, Inequality::Cor1),
        Check::Example1 => {
            let a = ctx.args;
            let out = example1_frequency(
                a.example1_kappa,
                a.example1_delta,
                a.example1_replicates,
                ctx.cfg.base_seed,
            )?;
            one(CheckResult::new(
                "example1",
                out.frequency,
                0.5 * out.p_kappa,
                out.frequency >= 0.5 * out.p_kappa,
                format!(
                    "P(||x_bal|| >= 1) = {:?} vs p_kappa = {:?} (kappa {}, delta {}, D = {})",
                    out.frequency, out.p_kappa, a.example1_kappa, a.example1_delta, out.dim
                ),
            ))
        }
        Check::Prop1b => {
            let reps = ctx.args.moment_replicates;
            let mut out = Vec::new();
            for kappa in [10usize, 100, 1000] {
                let est =
                    mean_abs_deviation(&NoiseModel::GAUSSIAN, kappa, reps, ctx.cfg.base_seed)?;
                let bound = prop1b_bound(4.0, 3.0, kappa)?;
                // 5% allowance for sampling error
                out.push(CheckResult::new(
                    format!("prop1b@{kappa}"),
                    est,
                    bound,
                    est <= 1.05 * bound,
                    format!("E|mean of z^2 - 1| over {kappa} terms, {reps} replicates"),
                ));
            }
            Ok(out)
        }
        Check::Prop2 => {
            let reps = ctx.args.moment_replicates;
            let out = prop2_check(
                &NoiseModel::GAUSSIAN,
                10_000,
                100,
                1.0 / 3.0,
                reps,
                ctx.cfg.base_seed,
            )?;
            one(CheckResult::new(
                "prop2",
                out.empirical_prob,
                out.bound,
                out.empirical_prob <= out.bound,
                format!("P(sup_(m >= 100) |mean_m| > 1/3) with D = 10000, {reps} replicates"),
            ))
        }
    }
}

pub fn run(args: &VerifyArgs) -> Result<Vec<CheckResult>> {
    let mut ctx = Context {
        args,
        cfg: args.common.experiment()?,
        problem: None,
        records: None,
    };
    let mut results = Vec::new();
    for check in args.selected() {
        results.extend(run_check(&mut ctx, check)?);
    }
    Ok(results)
}
