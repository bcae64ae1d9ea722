//! Scenario configuration: a flat JSON object whose keys override
//! scenario-specific defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sdn_inverse::Method;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_GAMMA: f64 = 0.05;
pub const FIG1_ETA: f64 = 0.2;
pub const DENOISE_ETA: f64 = 35.0;
pub const DENOISE_ALPHA: f64 = 0.9075;
pub const DENOISE_K: usize = 5;
pub const DENOISE_N: usize = 218;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Fig1,
    Denoise,
    TimeVarying,
    Custom,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Fig1 => "fig1",
            Scenario::Denoise => "denoise",
            Scenario::TimeVarying => "time_varying",
            Scenario::Custom => "custom",
        })
    }
}

/// Reference signal for denoising SNR curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrReference {
    /// The clean signal before noise; curves approach a finite limit.
    Clean,
    /// The direct solution `(I + αL_sym)⁻¹ b`; curves grow without bound.
    Oracle,
}

/// Keys as they appear in the configuration file. Absent keys take the
/// scenario default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<Scenario>,
    n: Option<usize>,
    radius: Option<f64>,
    k: Option<usize>,
    gamma: Option<f64>,
    eta: Option<f64>,
    alpha: Option<f64>,
    methods: Option<Vec<String>>,
    #[serde(alias = "M")]
    m: Option<usize>,
    trials: Option<usize>,
    master_seed: Option<u64>,
    output_dir: Option<PathBuf>,
    distributed: Option<bool>,
    epochs: Option<usize>,
    snr_reference: Option<SnrReference>,
    roundlog_values: Option<bool>,
    exact_spectra: Option<bool>,
    points: Option<PathBuf>,
    edges: Option<PathBuf>,
    filter: Option<PathBuf>,
    signal: Option<PathBuf>,
}

/// Fully resolved scenario settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n: usize,
    /// RGG connection radius (fig1, time_varying).
    pub radius: f64,
    /// Nearest-neighbor count (denoise).
    pub k: usize,
    pub gamma: f64,
    pub eta: f64,
    pub alpha: f64,
    #[serde(serialize_with = "ser_methods")]
    pub methods: Vec<Method>,
    #[serde(rename = "M")]
    pub m: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Route PGDA and SPGDA through the network simulator.
    pub distributed: bool,
    pub epochs: usize,
    pub snr_reference: SnrReference,
    pub roundlog_values: bool,
    /// Compute spectral radii and condition numbers with dense eigensolvers.
    pub exact_spectra: bool,
    pub points: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub filter: Option<PathBuf>,
    pub signal: Option<PathBuf>,
}

fn ser_methods<S: serde::Serializer>(m: &[Method], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|m| m.as_str()))
}

pub fn parse_methods(list: &[String]) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = Vec::new();
    for name in list {
        let m = Method::from_str(name.trim()).map_err(|e| ExpError::config(e.to_string()))?;
        if out.contains(&m) {
            return Err(ExpError::config(format!("method '{name}' listed twice")));
        }
        out.push(m);
    }
    if out.is_empty() {
        return Err(ExpError::config("method list is empty"));
    }
    Ok(out)
}

/// Command-line overrides applied after the file is read.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub master_seed: Option<u64>,
    pub trials: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub distributed: bool,
    pub methods: Option<Vec<String>>,
}

impl ScenarioConfig {
    /// Parses configuration text, resolving defaults for the scenario.
    pub fn from_json(text: &str, overrides: &Overrides) -> Result<ScenarioConfig> {
        let mut raw: RawConfig =
            serde_json::from_str(text).map_err(|e| ExpError::config(format!("invalid config: {e}")))?;
        if let Some(s) = overrides.master_seed {
            raw.master_seed = Some(s);
        }
        if let Some(t) = overrides.trials {
            raw.trials = Some(t);
        }
        if let Some(d) = &overrides.output_dir {
            raw.output_dir = Some(d.clone());
        }
        if overrides.distributed {
            raw.distributed = Some(true);
        }
        if let Some(m) = &overrides.methods {
            raw.methods = Some(m.clone());
        }
        resolve(raw)
    }

    pub fn load(path: &Path, overrides: &Overrides) -> Result<(ScenarioConfig, String)> {
        let text = std::fs::read_to_string(path).map_err(|source| ExpError::File {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg = ScenarioConfig::from_json(&text, overrides)?;
        Ok((cfg, text))
    }

    /// Defaults for a scenario with no overrides.
    pub fn defaults(scenario: Scenario) -> ScenarioConfig {
        resolve(RawConfig {
            scenario: Some(scenario),
            ..RawConfig::default()
        })
        .expect("defaults are valid")
    }
}

fn resolve(raw: RawConfig) -> Result<ScenarioConfig> {
    let scenario = raw.scenario.ok_or_else(|| ExpError::config("missing 'scenario'"))?;
    let n = raw.n.unwrap_or(match scenario {
        Scenario::Fig1 => 512,
        Scenario::Denoise => DENOISE_N,
        Scenario::TimeVarying => 64,
        Scenario::Custom => 0,
    });
    let radius = raw
        .radius
        .unwrap_or_else(|| if n > 0 { (2.0 / n as f64).sqrt() } else { 0.0 });
    let methods = match &raw.methods {
        Some(list) => parse_methods(list)?,
        None => match scenario {
            Scenario::TimeVarying => vec![Method::Pgda, Method::Spgda],
            _ => Method::ALL.to_vec(),
        },
    };
    let cfg = ScenarioConfig {
        scenario,
        n,
        radius,
        k: raw.k.unwrap_or(DENOISE_K),
        gamma: raw.gamma.unwrap_or(DEFAULT_GAMMA),
        eta: raw.eta.unwrap_or(match scenario {
            Scenario::Denoise => DENOISE_ETA,
            _ => FIG1_ETA,
        }),
        alpha: raw.alpha.unwrap_or(DENOISE_ALPHA),
        methods,
        m: raw.m.unwrap_or(match scenario {
            Scenario::Fig1 => 200,
            Scenario::Denoise => 100,
            Scenario::TimeVarying => 500,
            Scenario::Custom => 200,
        }),
        trials: raw.trials.unwrap_or(match scenario {
            Scenario::Fig1 | Scenario::Denoise => DEFAULT_TRIALS,
            Scenario::TimeVarying | Scenario::Custom => 1,
        }),
        master_seed: raw.master_seed.unwrap_or(0),
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        distributed: raw.distributed.unwrap_or(false),
        epochs: raw.epochs.unwrap_or(5),
        snr_reference: raw.snr_reference.unwrap_or(SnrReference::Clean),
        roundlog_values: raw.roundlog_values.unwrap_or(true),
        exact_spectra: raw.exact_spectra.unwrap_or(true),
        points: raw.points,
        edges: raw.edges,
        filter: raw.filter,
        signal: raw.signal,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(ExpError::config(m.to_string()));
        if self.methods.is_empty() {
            return fail("method list is empty");
        }
        if self.trials < 1 {
            return fail("trials must be at least 1");
        }
        if self.m < 1 {
            return fail("M must be at least 1");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return fail("gamma must be finite and non-negative");
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return fail("eta must be finite and non-negative");
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return fail("alpha must be finite and non-negative");
        }
        match self.scenario {
            Scenario::Fig1 | Scenario::TimeVarying => {
                if self.n < 2 {
                    return fail("n must be at least 2");
                }
                if !(self.radius > 0.0) {
                    return fail("radius must be positive");
                }
            }
            Scenario::Denoise => {
                if self.points.is_none() && self.n <= self.k {
                    return fail("n must exceed k");
                }
                if self.k < 1 {
                    return fail("k must be at least 1");
                }
            }
            Scenario::Custom => {
                if self.edges.is_none() || self.filter.is_none() || self.signal.is_none() {
                    return fail("custom scenario needs 'edges', 'filter' and 'signal' files");
                }
            }
        }
        if self.scenario == Scenario::TimeVarying {
            if self.epochs < 1 {
                return fail("epochs must be at least 1");
            }
            if let Some(m) = self.methods.iter().find(|m| !matches!(m, Method::Pgda | Method::Spgda)) {
                return Err(ExpError::config(format!(
                    "time_varying runs on the network simulator, which has no {m} agents"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_scenario() {
        let f = ScenarioConfig::defaults(Scenario::Fig1);
        assert_eq!((f.n, f.m, f.trials, f.eta, f.gamma), (512, 200, 100, 0.2, 0.05));
        assert_eq!(f.radius, (2.0f64 / 512.0).sqrt());
        assert_eq!(f.methods, Method::ALL.to_vec());
        let d = ScenarioConfig::defaults(Scenario::Denoise);
        assert_eq!((d.n, d.k, d.eta, d.alpha), (218, 5, 35.0, 0.9075));
    }

    #[test]
    fn overrides_and_aliases() {
        let text = r#"{"scenario":"fig1","M":50,"methods":["spgda","imia"],"n":64}"#;
        let o = Overrides {
            master_seed: Some(9),
            trials: Some(3),
            ..Overrides::default()
        };
        let c = ScenarioConfig::from_json(text, &o).unwrap();
        assert_eq!((c.m, c.trials, c.master_seed, c.n), (50, 3, 9, 64));
        assert_eq!(c.methods, vec![Method::Spgda, Method::Imia]);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            r#"{"scenario":"fig1","methods":[]}"#,
            r#"{"scenario":"fig1","methods":["newton"]}"#,
            r#"{"scenario":"fig1","trials":0}"#,
            r#"{"scenario":"fig1","bogus":1}"#,
            r#"{"n":5}"#,
            r#"{"scenario":"time_varying","methods":["opgd"]}"#,
            r#"{"scenario":"custom"}"#,
            "not json",
        ];
        for text in cases {
            let err = ScenarioConfig::from_json(text, &Overrides::default()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}");
        }
    }
}
