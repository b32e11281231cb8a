//! Runs an experiment and writes its report files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use lcalim_core::{
    check_theorem, condition_sequences, empirical_ft, empirical_ft_law, predict_limit,
    Character, ConditionResult, ConvergenceReport, Error, GroupId, LimitLaw, OverallVerdict,
    Prediction, SeededStream, TheoremTag, Trend, TrendVerdict,
};

use crate::config::{ConfigError, ExperimentConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Sample,
    Conditions,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Sample => "sample",
            Command::Conditions => "conditions",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid experiment: {0}")]
    Compute(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Compute(_) => EXIT_CONFIG,
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub passed: bool,
    pub verdict: Value,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The law under test: the configured one, or else the predicted one.
pub fn resolve_law(cfg: &ExperimentConfig) -> Result<Result<(LimitLaw, Option<TheoremTag>), String>, Error> {
    if let Some(law) = &cfg.law {
        return Ok(Ok((law.clone(), None)));
    }
    Ok(match predict_limit(&cfg.array, &cfg.verify)? {
        Prediction::Law { law, tag } => Ok((law, Some(tag))),
        Prediction::Unclassified(why) => Err(why),
    })
}

pub fn ft_table_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("n,char_id,re_exact,im_exact,re_limit,im_limit,abs_err\n");
    for row in &report.ft_table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.n,
            csv_field(&row.chi),
            fmt_f64(row.exact.0),
            fmt_f64(row.exact.1),
            fmt_f64(row.limit.0),
            fmt_f64(row.limit.1),
            fmt_f64(row.abs_err)
        );
    }
    out
}

pub fn conditions_csv(conditions: &[ConditionResult]) -> String {
    let mut out = String::from("condition,label,n,value,target\n");
    for c in conditions {
        let target = c.target.label();
        for &(n, v) in &c.values {
            let _ = writeln!(out, "{},{},{},{},{}", c.condition, csv_field(&c.label), n, fmt_f64(v), target);
        }
    }
    out
}

pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn trend_json(v: &TrendVerdict) -> Value {
    match v.trend {
        Trend::ConvergesTo(c) => json!({"kind": "converges_to", "limit": c, "evidence": v.evidence}),
        Trend::DivergesToInfinity => json!({"kind": "diverges_to_infinity", "evidence": v.evidence}),
        Trend::Inconclusive => json!({"kind": "inconclusive", "evidence": v.evidence}),
    }
}

fn conditions_json(conditions: &[ConditionResult]) -> Value {
    Value::Array(
        conditions
            .iter()
            .map(|c| {
                json!({
                    "condition": c.condition,
                    "label": c.label,
                    "target": c.target.label(),
                    "trend": trend_json(&c.verdict),
                    "passed": c.passed,
                })
            })
            .collect(),
    )
}

fn law_json(law: &LimitLaw) -> Value {
    let levy: Vec<Value> = law
        .levy()
        .measure()
        .atoms()
        .iter()
        .map(|(x, w)| json!({"x": x.to_string(), "weight": w}))
        .collect();
    json!({
        "subgroup": format!("{:?}", law.subgroup()),
        "shift": law.shift().to_string(),
        "b": law.qform().b(),
        "levy": levy,
    })
}

fn tag_name(tag: TheoremTag) -> Value {
    serde_json::to_value(tag).unwrap_or(Value::Null)
}

fn verdict_name(v: OverallVerdict) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Monte Carlo rows: row sums at each configured `n`, plus the limit law when
/// it can be sampled.
fn monte_carlo(cfg: &ExperimentConfig, law: Option<&LimitLaw>, seed: u64) -> Result<(String, Value), Error> {
    let mut csv = String::from("source,n,char_id,re_estimate,im_estimate,re_exact,im_exact,abs_err,bound\n");
    let m = cfg.mc.replicates;
    let bound = 4.0 / (m as f64).sqrt();
    let chars: &[Character] = &cfg.verify.chars;
    let root = SeededStream::new(seed);
    let mut worst: f64 = 0.0;
    for (i, &n) in cfg.mc.n.iter().enumerate() {
        let est = empirical_ft(&cfg.array, n, chars, m, &root.child(i as u64))?;
        for (chi, z) in &est.estimates {
            let exact = cfg.array.row_ft_exact(n, chi)?;
            let err = (z - exact).norm();
            worst = worst.max(err);
            let _ = writeln!(
                csv,
                "row_sum,{},{},{},{},{},{},{},{}",
                n,
                csv_field(&chi.id()),
                fmt_f64(z.re),
                fmt_f64(z.im),
                fmt_f64(exact.re),
                fmt_f64(exact.im),
                fmt_f64(err),
                fmt_f64(bound)
            );
        }
    }
    let mut law_sampled = false;
    if let Some(law) = law {
        if !matches!(law.group(), GroupId::Solenoid { .. }) {
            law_sampled = true;
            let est = empirical_ft_law(law, chars, m, &root.child(u64::MAX))?;
            for (chi, z) in &est.estimates {
                let exact = law.ft(chi)?;
                let err = (z - exact).norm();
                worst = worst.max(err);
                let _ = writeln!(
                    csv,
                    "limit_law,,{},{},{},{},{},{},{}",
                    csv_field(&chi.id()),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                    fmt_f64(exact.re),
                    fmt_f64(exact.im),
                    fmt_f64(err),
                    fmt_f64(bound)
                );
            }
        }
    }
    let summary = json!({
        "seed": seed,
        "replicates": m,
        "n": cfg.mc.n,
        "bound": bound,
        "max_abs_err": worst,
        "limit_law_sampled": law_sampled,
        "passed": worst <= bound,
    });
    Ok((csv, summary))
}

/// Runs `command` on a validated config, writing reports into `out_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    command: Command,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<RunSummary, RunError> {
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let seed = seed.unwrap_or(cfg.mc.seed);
    let law = resolve_law(cfg)?;
    let mut files = Vec::new();
    let mut verdict = json!({
        "name": cfg.name,
        "command": command.name(),
        "group": cfg.group.to_string(),
    });
    let obj = verdict.as_object_mut().expect("object literal");

    let (law, predicted) = match law {
        Ok((law, predicted)) => (Some(law), predicted),
        Err(why) => {
            obj.insert("unclassified".into(), Value::String(why));
            (None, None)
        }
    };
    if let Some(law) = &law {
        obj.insert("law".into(), law_json(law));
        obj.insert("law_source".into(), json!(if predicted.is_some() { "predicted" } else { "config" }));
    }

    let passed = match command {
        Command::Verify => match &law {
            Some(law) => {
                let report = check_theorem(&cfg.array, law, &cfg.verify)?;
                let p = out_dir.join("ft_table.csv");
                write_file(&p, &ft_table_csv(&report))?;
                files.push(p);
                let p = out_dir.join("conditions.csv");
                write_file(&p, &conditions_csv(&report.conditions))?;
                files.push(p);
                obj.insert("theorem".into(), tag_name(report.tag));
                obj.insert("overall".into(), verdict_name(report.overall));
                obj.insert("ft_passed".into(), json!(report.ft_passed));
                obj.insert("ft_trend".into(), trend_json(&report.ft_verdict));
                obj.insert("ft_distance".into(), json!(report.ft_distance));
                obj.insert("conditions".into(), conditions_json(&report.conditions));
                let mut ok = report.overall == OverallVerdict::Pass;
                if cfg.mc.enabled {
                    let (csv, summary) = monte_carlo(cfg, Some(law), seed)?;
                    let p = out_dir.join("mc.csv");
                    write_file(&p, &csv)?;
                    files.push(p);
                    ok &= summary["passed"].as_bool().unwrap_or(false);
                    obj.insert("mc".into(), summary);
                }
                ok
            }
            None => {
                obj.insert("overall".into(), json!("fail"));
                false
            }
        },
        Command::Conditions => match &law {
            Some(law) => {
                let (tag, conditions) = condition_sequences(&cfg.array, law, &cfg.verify)?;
                let p = out_dir.join("conditions.csv");
                write_file(&p, &conditions_csv(&conditions))?;
                files.push(p);
                let ok = tag != TheoremTag::None && conditions.iter().all(|c| c.passed);
                obj.insert("theorem".into(), tag_name(tag));
                obj.insert("conditions".into(), conditions_json(&conditions));
                obj.insert("overall".into(), json!(if ok { "pass" } else { "fail" }));
                ok
            }
            None => {
                obj.insert("overall".into(), json!("fail"));
                false
            }
        },
        Command::Sample => {
            let (csv, summary) = monte_carlo(cfg, law.as_ref(), seed)?;
            let p = out_dir.join("mc.csv");
            write_file(&p, &csv)?;
            files.push(p);
            let ok = summary["passed"].as_bool().unwrap_or(false);
            obj.insert("mc".into(), summary);
            obj.insert("overall".into(), json!(if ok { "pass" } else { "fail" }));
            ok
        }
    };

    let p = out_dir.join("verdict.json");
    let mut text = serde_json::to_string_pretty(&verdict).expect("json values serialize");
    text.push('\n');
    write_file(&p, &text)?;
    files.push(p);
    Ok(RunSummary {
        passed,
        verdict,
        files,
    })
}

/// Reads, validates and runs a config file.
pub fn run_file(
    path: &Path,
    command: Command,
    out_dir: Option<&Path>,
    seed: Option<u64>,
) -> Result<RunSummary, RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg = crate::config::parse_config(&text)?;
    let out = match (out_dir, &cfg.output_dir) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => PathBuf::from("out").join(&cfg.name),
    };
    run_experiment(&cfg, command, &out, seed)
}
