mod args;
mod output;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use serde::Serialize;

use specreg::montecarlo::{derive_seed, evaluate, run_on_problem, summarize};
use specreg::rules::{
    constants, det_strong, det_weak, dp_at_m, dp_modified, lepski_direct, CorollaryParams,
};
use specreg::sequence_model::{observe, ErrorProfile};
use specreg::{ExperimentConfig, ProblemSpec, Rule};

use args::{Cli, Command, Common, Format, VerifyArgs};
use output::{ensure_dir, num, write_csv, write_json, write_summary};

#[derive(Serialize)]
struct Meta<'a, T: Serialize> {
    command: &'static str,
    version: &'static str,
    args: &'a T,
    config: &'a ExperimentConfig,
    /// Working dimension after truncation at numerical rank.
    dim: usize,
    files: Vec<String>,
}

fn run_bench(args: &Common) -> Result<bool> {
    let cfg = args.experiment()?;
    ensure_dir(&args.out)?;
    eprintln!(
        "building {} (n = {})",
        cfg.problem.name(),
        cfg.problem.size()
    );
    let p = args.build(&cfg.problem)?;
    eprintln!(
        "running {} replicates at {} noise levels (D = {})",
        cfg.replicates,
        cfg.deltas.len(),
        p.dim()
    );
    let records = run_on_problem(&p, &cfg)?;
    let mut summary = summarize(&records)?;
    let poly = match cfg.problem {
        ProblemSpec::SyntheticPoly { q, .. } => Some(CorollaryParams {
            q,
            c_lower: 1.0,
            c_upper: 1.0,
        }),
        _ => None,
    };
    summary.attach_frequencies(&records, &constants(cfg.rules.tau, poly)?)?;
    let mut files = write_summary(&args.out, &summary, args.format)?;
    files.push("summary.json".into());
    write_json(&args.out.join("summary.json"), &summary)?;
    let meta = Meta {
        command: "bench",
        version: env!("CARGO_PKG_VERSION"),
        args,
        config: &cfg,
        dim: p.dim(),
        files,
    };
    write_json(&args.out.join("meta.json"), &meta)?;
    eprintln!("wrote {}", args.out.display());
    Ok(true)
}

#[derive(Serialize)]
struct RuleOutcome {
    rule: Rule,
    k: usize,
    e_strong: f64,
    e_weak: f64,
}

#[derive(Serialize)]
struct SingleDump {
    problem: &'static str,
    dim: usize,
    delta: f64,
    seed: u64,
    m_cap: usize,
    m_max: usize,
    /// `trace[m - 1]` is the discrepancy choice at level `m`.
    trace: Vec<usize>,
    rules: Vec<RuleOutcome>,
    min_strong: f64,
    min_weak: f64,
}

fn run_single(args: &Common) -> Result<bool> {
    let cfg = args.single_experiment()?;
    ensure_dir(&args.out)?;
    let p = args.build(&cfg.problem)?;
    let d = p.dim();
    let mut dumps = Vec::new();
    for (di, &delta) in cfg.deltas.iter().enumerate() {
        let seed = derive_seed(cfg.base_seed, di, 0);
        let obs = observe(&p, delta, &cfg.noise, seed)?;
        let rec = evaluate(&p, &obs, &cfg.rules, di, 0)?;
        let profile = ErrorProfile::new(&p, &obs);
        let dp = dp_modified(&obs, cfg.rules.tau, d, true)?;
        let mut levels: Vec<(Rule, usize)> = vec![
            (Rule::Dp, dp.k),
            (Rule::DpAtM, dp_at_m(&obs, cfg.rules.tau, d)?),
        ];
        if p.is_direct() {
            levels.push((Rule::Lepski, lepski_direct(&p, &obs, cfg.rules.kappa)?));
        }
        for rule in [
            Rule::Balancing,
            Rule::EarlyStop,
            Rule::Combined,
            Rule::OracleOpt,
            Rule::OracleWeak,
            Rule::OracleStrong,
        ] {
            levels.push((rule, rec.k_of(rule)));
        }
        levels.push((Rule::DetWeak, det_weak(&p, delta)?));
        levels.push((Rule::DetStrong, det_strong(&p, delta)?));
        dumps.push(SingleDump {
            problem: cfg.problem.name(),
            dim: d,
            delta,
            seed,
            m_cap: d,
            m_max: rec.m_max,
            trace: dp.trace.unwrap_or_default(),
            rules: levels
                .into_iter()
                .map(|(rule, k)| RuleOutcome {
                    rule,
                    k,
                    e_strong: profile.strong(k),
                    e_weak: profile.weak(k),
                })
                .collect(),
            min_strong: rec.min_strong,
            min_weak: rec.min_weak,
        });
    }
    match args.format {
        Format::Json => write_json(&args.out.join("single.json"), &dumps)?,
        Format::Csv => {
            write_csv(
                &args.out.join("single_rules.csv"),
                &["delta", "rule", "k", "e_strong", "e_weak"],
                dumps.iter().flat_map(|s| {
                    s.rules.iter().map(move |r| {
                        vec![
                            num(s.delta),
                            r.rule.to_string(),
                            r.k.to_string(),
                            num(r.e_strong),
                            num(r.e_weak),
                        ]
                    })
                }),
            )?;
            write_csv(
                &args.out.join("single_trace.csv"),
                &["delta", "m", "k_dp_m"],
                dumps.iter().flat_map(|s| {
                    s.trace
                        .iter()
                        .enumerate()
                        .map(move |(m, k)| vec![num(s.delta), (m + 1).to_string(), k.to_string()])
                }),
            )?;
        }
    }
    let mut out = std::io::stdout().lock();
    for s in &dumps {
        writeln!(
            out,
            "delta {} (seed {}, D = {}, m_max = {})",
            num(s.delta),
            s.seed,
            s.dim,
            s.m_max
        )?;
        for r in &s.rules {
            writeln!(
                out,
                "  {:<7} k = {:<5} e_strong = {} e_weak = {}",
                r.rule.to_string(),
                r.k,
                num(r.e_strong),
                num(r.e_weak)
            )?;
        }
    }
    Ok(true)
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    ensure_dir(&args.common.out)?;
    let results = verify::run(args)?;
    for r in &results {
        println!(
            "{} {}: observed {} bound {} ({})",
            if r.pass { "PASS" } else { "FAIL" },
            r.check,
            num(r.observed),
            num(r.bound),
            r.detail
        );
    }
    match args.common.format {
        Format::Csv => write_csv(
            &args.common.out.join("verify.csv"),
            &["check", "observed", "bound", "pass", "detail"],
            results.iter().map(|r| {
                vec![
                    r.check.clone(),
                    num(r.observed),
                    num(r.bound),
                    r.pass.to_string(),
                    r.detail.clone(),
                ]
            }),
        )?,
        Format::Json => write_json(&args.common.out.join("verify.json"), &results)?,
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        println!("{failed} checks failed");
    }
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bench(a) => run_bench(a),
        Command::Verify(a) => run_verify(a),
        Command::Single(a) => run_single(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
