//! Writes aggregates to disk. Every file is written atomically.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sdn_inverse::io::{write_atomic, write_round_log};
use serde_json::{json, Value};

use crate::aggregate::TrialAggregate;
use crate::config::ScenarioConfig;
use crate::error::{ExpError, Result};

pub const CURVES_FILE: &str = "curves.csv";
pub const ENVELOPE_FILE: &str = "envelope.csv";
pub const EPOCHS_FILE: &str = "epochs.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ROUNDLOG_FILE: &str = "roundlog.csv";

fn num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn curves_csv(agg: &TrialAggregate) -> String {
    let mut s = String::from("method,m,mean_metric\n");
    for a in &agg.methods {
        for (m, v) in a.mean_curve.iter().enumerate() {
            let _ = writeln!(s, "{},{m},{}", a.method, num(*v));
        }
    }
    s
}

fn envelope_csv(agg: &TrialAggregate) -> Option<String> {
    let mut s = String::from("method,m,mean_e2,mean_bound\n");
    let mut any = false;
    for a in &agg.methods {
        if let Some(env) = &a.mean_envelope {
            any = true;
            for (m, (c, e)) in a.mean_curve.iter().zip(env).enumerate() {
                let _ = writeln!(s, "{},{m},{},{e}", a.method, num(*c));
            }
        }
    }
    any.then_some(s)
}

fn epochs_csv(agg: &TrialAggregate) -> String {
    let mut s = String::from("epoch,method,final_relative_error,radius,messages,rounds\n");
    for r in &agg.epochs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.epoch,
            r.method,
            r.final_relative_error,
            num(r.radius),
            r.messages,
            r.rounds
        );
    }
    s
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[k]
    } else {
        (s[k - 1] + s[k]) / 2.0
    })
}

pub fn summary_json(agg: &TrialAggregate, cfg: &ScenarioConfig, config_text: &str) -> Value {
    let cond = &agg.condition_numbers;
    let mut v = json!({
        "scenario": agg.scenario.to_string(),
        "metric": agg.metric,
        "trials": agg.trials,
        "iterations": agg.iterations,
        "milestone_rule": agg.milestone_rule,
        "methods": agg.methods,
        "condition_number": {
            "median": median(cond),
            "min": cond.iter().copied().reduce(f64::min),
            "max": cond.iter().copied().reduce(f64::max),
            "fraction_in_60_180": agg.condition_fraction(60.0, 180.0),
            "per_trial": cond,
        },
        "seeds": agg.seeds,
        "config": cfg,
        "config_text": config_text,
    });
    let obj = v.as_object_mut().expect("object literal");
    for (k, val) in &agg.extra {
        obj.insert(k.clone(), val.clone());
    }
    if !agg.epochs.is_empty() {
        obj.insert("epochs".into(), json!(agg.epochs));
    }
    if let Some(log) = &agg.roundlog {
        let s = log.summary();
        obj.insert(
            "roundlog".into(),
            json!({"rounds": s.rounds, "messages": s.messages, "max_distance": s.max_distance}),
        );
    }
    v
}

fn put(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, bytes).map_err(|e| match e {
        sdn_inverse::Error::Io(source) => ExpError::File {
            path: path.clone(),
            source,
        },
        other => other.into(),
    })?;
    Ok(path)
}

/// Writes `curves.csv`, `summary.json` and, when present, `envelope.csv`,
/// `epochs.csv` and `roundlog.csv`. Returns the written paths.
pub fn emit_outputs(agg: &TrialAggregate, cfg: &ScenarioConfig, config_text: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| ExpError::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = vec![put(dir, CURVES_FILE, curves_csv(agg).as_bytes())?];
    if let Some(env) = envelope_csv(agg) {
        written.push(put(dir, ENVELOPE_FILE, env.as_bytes())?);
    }
    if !agg.epochs.is_empty() {
        written.push(put(dir, EPOCHS_FILE, epochs_csv(agg).as_bytes())?);
    }
    if let Some(log) = agg.roundlog.as_ref().filter(|_| cfg.distributed) {
        let mut buf = Vec::new();
        write_round_log(log, agg.roundlog_values, &mut buf)?;
        written.push(put(dir, ROUNDLOG_FILE, &buf)?);
    }
    let mut summary = serde_json::to_string_pretty(&summary_json(agg, cfg, config_text)).expect("summary serializes");
    summary.push('\n');
    written.push(put(dir, SUMMARY_FILE, summary.as_bytes())?);
    Ok(written)
}
