//! The `stockagent` command line.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use stockagent_core::agents::{AgentPolicy, ScriptedPolicy};
use stockagent_core::config::SEED_ENV;
use stockagent_core::valuation::tables::{builtin_tables, Band};
use stockagent_core::{load_config, AblationFlag, AgentBackend, DecisionTiming, Preset, SimConfig};
use stockagent_llm::client::MODEL_ENV;
use stockagent_llm::{ChatClient, HttpClient, LlmPolicy, ReplayCache};

use crate::log::RunLog;
use crate::metrics::compute_metrics;
use crate::sim::run_simulation;

#[derive(Debug, Parser)]
#[command(name = "stockagent", version, about = "Two-stock multi-agent market simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation and write its log directory.
    Run(RunArgs),
    /// Summarize a log directory and export CSV tables.
    Metrics {
        dir: PathBuf,
        /// Where to write the CSV tables; defaults to the log directory.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Recompute the company valuation tables.
    Valuation,
    /// Check a config file and print it in canonical form.
    ValidateConfig { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Scripted,
    Llm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TimingArg {
    Live,
    Batch,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML or JSON config file. Without one, the preset is used.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// desk, rq3-short, rq3-long or full-year.
    #[arg(long, value_parser = parse_preset, conflicts_with = "config")]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub days: Option<u32>,
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub sessions: Option<u32>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Repeatable: no-financial-info, no-bbs, no-statement, no-loan, no-interest-change.
    #[arg(long = "ablate", value_parser = parse_ablation)]
    pub ablations: Vec<AblationFlag>,
    #[arg(long, value_enum)]
    pub timing: Option<TimingArg>,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
    /// Answer model calls from this cache only.
    #[arg(long, conflicts_with = "record")]
    pub replay: Option<PathBuf>,
    /// Call the endpoint and append every exchange to this cache.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

fn parse_ablation(s: &str) -> Result<AblationFlag, String> {
    s.parse()
}

/// Applies file, then `SIM_SEED`, then flags.
pub fn resolve_config(args: &RunArgs) -> Result<SimConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path).map_err(|e| e.to_string())?,
        None => {
            let mut cfg = SimConfig::preset(args.preset.unwrap_or(Preset::Desk), 0);
            cfg.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref()).map_err(|e| e.to_string())?;
            cfg
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(days) = args.days {
        cfg.set_num_days(days);
    }
    if let Some(n) = args.agents {
        cfg.num_agents = n;
    }
    if let Some(s) = args.sessions {
        cfg.sessions_per_day = s;
    }
    match args.backend {
        Some(BackendArg::Scripted) => cfg.agent_backend = AgentBackend::Scripted,
        Some(BackendArg::Llm) => cfg.agent_backend = AgentBackend::LlmGateway,
        None => {}
    }
    match args.timing {
        Some(TimingArg::Live) => cfg.decision_timing = DecisionTiming::Live,
        Some(TimingArg::Batch) => cfg.decision_timing = DecisionTiming::Batch,
        None => {}
    }
    cfg.ablations.extend(args.ablations.iter().copied());
    if let Ok(model) = std::env::var(MODEL_ENV) {
        cfg.llm.model = model;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn llm_client(cfg: &SimConfig, args: &RunArgs) -> Result<(Arc<dyn ChatClient>, serde_json::Value), String> {
    if let Some(path) = &args.replay {
        let cache = ReplayCache::replay(path).map_err(|e| e.to_string())?;
        let meta = json!({ "mode": "replay", "path": path, "entries": cache.len() });
        return Ok((Arc::new(cache), meta));
    }
    let http = HttpClient::from_env(
        cfg.llm.endpoint.as_deref(),
        &cfg.llm.api_key_env,
        Duration::from_millis(cfg.llm.timeout_ms),
    )
    .map_err(|e| e.to_string())?;
    match &args.record {
        Some(path) => {
            let cache = ReplayCache::record(path, Box::new(http)).map_err(|e| e.to_string())?;
            Ok((Arc::new(cache), json!({ "mode": "record", "path": path })))
        }
        None => Ok((Arc::new(http), json!({ "mode": "live" }))),
    }
}

pub fn run(args: &RunArgs) -> Result<RunLog, String> {
    let cfg = resolve_config(args)?;
    let (policy, cache): (Box<dyn AgentPolicy>, serde_json::Value) = match cfg.agent_backend {
        AgentBackend::Scripted => (Box::new(ScriptedPolicy::new(cfg.policy.clone())), serde_json::Value::Null),
        AgentBackend::LlmGateway => {
            let (client, meta) = llm_client(&cfg, args)?;
            (Box::new(LlmPolicy::new(client, &cfg.llm)), meta)
        }
    };
    let mut log = run_simulation(&cfg, policy.as_ref()).map_err(|e| e.to_string())?;
    if !cache.is_null() {
        log.manifest["llm_cache"] = cache;
    }
    log.write_dir(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    Ok(log)
}

pub fn exit_summary(log: &RunLog, out: &Path) -> String {
    let s = &log.summary;
    format!(
        "final prices A {} B {}\nshares traded A {} B {}\nvolume A {} B {}\ntrades A {} B {}\nbankruptcies {}\nlog written to {}\n",
        s.final_prices.0,
        s.final_prices.1,
        s.shares_traded.0,
        s.shares_traded.1,
        s.volume.0,
        s.volume.1,
        s.trade_count.0,
        s.trade_count.1,
        s.bankruptcies,
        out.display()
    )
}

/// Text of the `valuation` subcommand.
pub fn valuation_report() -> Result<String, String> {
    let tables = builtin_tables();
    let mut out = String::new();
    out.push_str("WACC\n");
    for (company, params) in &tables.companies {
        let mut kds: Vec<f64> = tables.columns.iter().filter(|c| c.company == *company).map(|c| c.kd).collect();
        kds.sort_by(f64::total_cmp);
        kds.dedup();
        for kd in kds {
            let w = params.wacc(kd).map_err(|e| e.to_string())?;
            out.push_str(&format!(
                "  {} weights {:.0}/{:.0} kd {:.2}% -> {:.2}%\n",
                company.company(),
                params.equity_weight * 100.0,
                params.debt_weight * 100.0,
                kd * 100.0,
                w * 100.0
            ));
        }
    }
    out.push_str("Total value (table units)\n");
    out.push_str("  company day band     wacc     computed    published   error\n");
    for r in tables.reproduce_values().map_err(|e| e.to_string())? {
        let band = match r.band {
            Band::Central => "central",
            Band::Upper => "upper",
            Band::Lower => "lower",
        };
        out.push_str(&format!(
            "  {:<7} {:>3} {:<7} {:>6.3}% {:>11.2} {:>11} {:>+7.3}%\n",
            r.company.company(),
            r.day,
            band,
            r.wacc * 100.0,
            r.computed,
            r.reported.to_string(),
            r.relative_error() * 100.0
        ));
    }
    out.push_str("Ideal price per share\n");
    out.push_str("  company day    upper    lower  published  price ratio  value ratio\n");
    for p in tables.reproduce_prices().map_err(|e| e.to_string())? {
        out.push_str(&format!(
            "  {:<7} {:>3} {:>8.2} {:>8.2} {:>5}/{:<5} {:>11.4} {:>12.4}\n",
            p.company.company(),
            p.day,
            p.upper,
            p.lower,
            p.reported_upper.to_string(),
            p.reported_lower.to_string(),
            p.price_ratio,
            p.value_ratio
        ));
    }
    Ok(out)
}

/// Runs a parsed command, returning what to print on success.
pub fn execute(cli: Cli) -> Result<String, String> {
    match cli.command {
        Command::Run(args) => {
            let log = run(&args)?;
            Ok(exit_summary(&log, &args.out))
        }
        Command::Metrics { dir, csv } => {
            let log = RunLog::read_dir(&dir)?;
            let report = compute_metrics(&log).map_err(|e| e.to_string())?;
            let target = csv.unwrap_or_else(|| dir.clone());
            std::fs::create_dir_all(&target).map_err(|e| format!("{}: {e}", target.display()))?;
            report.write_csv(&target).map_err(|e| e.to_string())?;
            Ok(report.render())
        }
        Command::Valuation => valuation_report(),
        Command::ValidateConfig { path } => {
            let cfg = load_config(&path).map_err(|e| e.to_string())?;
            cfg.validate().map_err(|e| e.to_string())?;
            Ok(format!("{}\n", cfg.to_canonical_json()))
        }
    }
}
