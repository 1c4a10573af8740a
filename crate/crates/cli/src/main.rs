//! Command line driver: run verification suites and parameter sweeps,
//! emitting deterministic CSV reports.

use anyhow::Context;
use clap::Parser;
use quantiso_cli::config::Config;
use quantiso_cli::suites::{self, GplRunConfig, SuiteParams};

#[derive(Parser, Debug)]
#[command(
    name = "quantiso",
    about = "Grid laboratory for quantitative isoperimetric and rearrangement inequalities"
)]
struct Args {
    /// Suite to run: bm | gauss | riesz | rearrange | gpl | all
    #[arg(long)]
    suite: Option<String>,

    /// Restrict to one dimension where the suite supports it
    #[arg(long)]
    dim: Option<usize>,

    /// Lattice spacing override for sweeps
    #[arg(long = "h")]
    h: Option<f64>,

    /// Seed for every generator in the run
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Plain-text key = value configuration file
    #[arg(long)]
    config: Option<std::path::PathBuf>,

    /// Output CSV path (stdout if omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    /// Parameter sweep, e.g. --sweep gap=0.1,0.2,0.3
    #[arg(long)]
    sweep: Option<String>,
}

fn main() {
    match run() {
        Ok(all_pass) => std::process::exit(if all_pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run() -> anyhow::Result<bool> {
    let args = Args::parse();
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            Some(Config::parse(&text)?)
        }
        None => None,
    };
    let mut params = SuiteParams { seed: args.seed, quick: false, dim: args.dim, h: args.h };
    if let Some(c) = &cfg {
        if let Some(s) = c.get_parse::<u64>("seed")? {
            params.seed = s;
        }
        if let Some(hh) = c.get_parse::<f64>("h")? {
            params.h = Some(hh);
        }
        if let Some(d) = c.get_parse::<usize>("dim")? {
            params.dim = Some(d);
        }
    }

    if let Some(spec) = &args.sweep {
        let (param, list) = spec
            .split_once('=')
            .context("sweep must look like param=v1,v2,...")?;
        let values: Vec<f64> = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().context("bad sweep value"))
            .collect::<anyhow::Result<_>>()?;
        let csv = suites::sweep(param, &values, &params)?;
        write_out(&args.out, &csv)?;
        return Ok(true);
    }

    let suite = args
        .suite
        .clone()
        .or_else(|| cfg.as_ref().and_then(|c| c.get("suite").map(str::to_string)))
        .unwrap_or_else(|| "all".to_string());

    let gpl_cfg = build_gpl_config(cfg.as_ref(), params.seed)?;
    let outcome = suites::run_suite(&suite, &params, gpl_cfg)?;
    write_out(&args.out, &outcome.csv)?;
    if let (Some(trace), Some(path)) = (&outcome.trace_csv, &args.out) {
        let mut trace_path = path.clone();
        trace_path.set_extension("trace.csv");
        std::fs::write(&trace_path, trace)
            .with_context(|| format!("writing {}", trace_path.display()))?;
    }
    Ok(outcome.all_pass)
}

fn build_gpl_config(cfg: Option<&Config>, seed: u64) -> anyhow::Result<Option<GplRunConfig>> {
    let Some(c) = cfg else { return Ok(None) };
    let mut run = GplRunConfig::stated();
    run.seed = seed;
    let mut touched = false;
    if let Some(v) = c.get_parse::<f64>("L")? {
        run.period = v;
        touched = true;
    }
    if let Some(v) = c.get_parse::<usize>("cells")? {
        run.cells = v;
        touched = true;
    }
    if let Some(v) = c.get_parse::<f64>("n")? {
        run.n_fraction = v;
        touched = true;
    }
    if let Some(v) = c.get_parse::<f64>("theta")? {
        run.theta = v;
        touched = true;
    }
    if let Some(v) = c.get_parse::<usize>("max_steps")? {
        run.max_steps = v;
        touched = true;
    }
    if let Some(v) = c.get_parse::<f64>("tol")? {
        run.tol = v;
        touched = true;
    }
    if let Some(path) = c.get("kernel") {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading kernel file {path}"))?;
        run.kernel_text = Some(text);
        touched = true;
    }
    Ok(if touched { Some(run) } else { None })
}

fn write_out(out: &Option<std::path::PathBuf>, csv: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    Ok(())
}
