use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sdn_experiments::config::{Overrides, Scenario, ScenarioConfig};
use sdn_experiments::denoise::{run_denoise, Dataset};
use sdn_experiments::error::{ExpError, Result};
use sdn_experiments::output::{emit_outputs, SUMMARY_FILE};
use sdn_experiments::{run_scenario, TrialAggregate};
use sdn_inverse::io::{write_atomic, write_edges, write_points};
use sdn_inverse::seed::derive_seed;
use sdn_inverse::Graph;

/// Distributed inverse filtering experiments.
#[derive(Parser)]
#[command(name = "sdnfilter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the scenario's graph and write points.csv and edges.csv.
    GenGraph(Common),
    /// Run a scenario and write curves.csv, summary.json and related files.
    Run(Common),
    /// Run the denoising scenario on an `id,x,y,value` CSV.
    Ingest {
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the summary of a finished run.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run PGDA and SPGDA on the network simulator.
    #[arg(long)]
    distributed: bool,
    /// Comma-separated subset of pgda,spgda,opgd,imia.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
}

impl Common {
    fn load(&self, default: Option<Scenario>) -> Result<(ScenarioConfig, String)> {
        let overrides = Overrides {
            master_seed: self.seed,
            trials: self.trials,
            output_dir: self.out.clone(),
            distributed: self.distributed,
            methods: self.methods.clone(),
        };
        match (&self.config, default) {
            (Some(path), _) => ScenarioConfig::load(path, &overrides),
            (None, Some(s)) => {
                let text = format!("{{\"scenario\": \"{s}\"}}");
                Ok((ScenarioConfig::from_json(&text, &overrides)?, text))
            }
            (None, None) => Err(ExpError::Config("--config is required".into())),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(sdn_inverse::Error) -> ExpError + '_ {
    move |e| match e {
        sdn_inverse::Error::Io(source) => ExpError::File {
            path: path.to_path_buf(),
            source,
        },
        other => other.into(),
    }
}

fn finish(agg: &TrialAggregate, cfg: &ScenarioConfig, text: &str, started: Instant) -> Result<()> {
    let written = emit_outputs(agg, cfg, text, &cfg.output_dir)?;
    for p in &written {
        println!("wrote {}", p.display());
    }
    print_methods(agg);
    eprintln!("elapsed {:.1} s", started.elapsed().as_secs_f64());
    if agg.trials == 1 {
        if let Some(a) = agg.methods.iter().find(|a| a.diverged > 0) {
            return Err(ExpError::Diverged {
                method: a.method.to_string(),
            });
        }
    }
    Ok(())
}

fn print_methods(agg: &TrialAggregate) {
    println!(
        "{:<6} {:>10} {:>10} {:>9} {:>9}",
        "method", "radius", "milestone", "diverged", "final"
    );
    for a in &agg.methods {
        let last = a.mean_curve.last().copied().flatten();
        println!(
            "{:<6} {:>10} {:>10} {:>9} {:>9}",
            a.method.as_str(),
            a.mean_radius.map_or("-".into(), |r| format!("{r:.4}")),
            a.milestone.map_or("-".into(), |m| m.to_string()),
            a.diverged,
            last.map_or("-".into(), |v| format!("{v:.4}")),
        );
    }
}

fn gen_graph(common: &Common) -> Result<()> {
    let (cfg, _) = common.load(None)?;
    let (graph, values) = match cfg.scenario {
        Scenario::Fig1 | Scenario::TimeVarying => {
            let seed = derive_seed(cfg.master_seed, 0, "graph");
            (Graph::random_geometric(cfg.n, cfg.radius, seed)?, None)
        }
        Scenario::Denoise => {
            let data = Dataset::for_config(&cfg)?;
            let g = Graph::knn(&data.points, cfg.k)?;
            let g = Graph::from_edges(g.n(), g.edges().collect::<Vec<_>>(), Some(data.points))?;
            (g, Some(data.values))
        }
        Scenario::Custom => return Err(ExpError::Config("custom scenarios bring their own graph".into())),
    };
    let graph = Arc::new(graph);
    std::fs::create_dir_all(&cfg.output_dir).map_err(|source| ExpError::File {
        path: cfg.output_dir.clone(),
        source,
    })?;
    let points_path = cfg.output_dir.join("points.csv");
    let mut buf = Vec::new();
    write_points(
        graph.coordinates().expect("generated graphs are embedded"),
        values.as_deref(),
        &mut buf,
    )?;
    write_atomic(&points_path, &buf).map_err(io_err(&points_path))?;
    let edges_path = cfg.output_dir.join("edges.csv");
    let mut buf = Vec::new();
    write_edges(&graph, &mut buf)?;
    write_atomic(&edges_path, &buf).map_err(io_err(&edges_path))?;
    println!(
        "{} vertices, {} edges, mean degree {:.3}",
        graph.n(),
        graph.edge_count(),
        graph.mean_degree()
    );
    println!("wrote {}\nwrote {}", points_path.display(), edges_path.display());
    Ok(())
}

fn report(out: &Path) -> Result<()> {
    let path = out.join(SUMMARY_FILE);
    let text = std::fs::read_to_string(&path).map_err(|source| ExpError::File {
        path: path.clone(),
        source,
    })?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ExpError::Config(format!("{}: {e}", path.display())))?;
    println!(
        "scenario {} | trials {} | iterations {}",
        v["scenario"].as_str().unwrap_or("?"),
        v["trials"],
        v["iterations"]
    );
    println!("milestone: {}", v["milestone_rule"].as_str().unwrap_or("?"));
    println!(
        "{:<6} {:>10} {:>10} {:>9} {:>9}",
        "method", "radius", "milestone", "completed", "diverged"
    );
    for m in v["methods"].as_array().into_iter().flatten() {
        println!(
            "{:<6} {:>10} {:>10} {:>9} {:>9}",
            m["method"].as_str().unwrap_or("?"),
            m["mean_radius"].as_f64().map_or("-".into(), |r| format!("{r:.4}")),
            m["milestone"].as_u64().map_or("-".into(), |r| r.to_string()),
            m["completed"],
            m["diverged"]
        );
    }
    let c = &v["condition_number"];
    if let Some(med) = c["median"].as_f64() {
        println!(
            "condition number: median {med:.2}, fraction in [60,180] {:.2}",
            c["fraction_in_60_180"].as_f64().unwrap_or(f64::NAN)
        );
    }
    if let Some(l) = v["limit_snr_db"].as_f64() {
        println!("limit SNR {l:.4} dB");
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let started = Instant::now();
    match cli.command {
        Command::GenGraph(common) => gen_graph(&common),
        Command::Run(common) => {
            let (cfg, text) = common.load(None)?;
            let agg = run_scenario(&cfg)?;
            finish(&agg, &cfg, &text, started)
        }
        Command::Ingest { points, common } => {
            let (mut cfg, text) = common.load(Some(Scenario::Denoise))?;
            if cfg.scenario != Scenario::Denoise {
                return Err(ExpError::Config("ingest runs the denoise scenario".into()));
            }
            cfg.points = Some(points.clone());
            let data = Dataset::from_csv(&points)?;
            let agg = run_denoise(&cfg, &data)?;
            finish(&agg, &cfg, &text, started)
        }
        Command::Report { out } => report(&out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
