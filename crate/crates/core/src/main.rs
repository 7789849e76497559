//! Command-line driver: check specifications, simulate compositions, run the
//! wcet calculus, evaluate activity queries, and export DOT/PNML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pspec::analysis::{
    declared_bounds, measured_bounds, parse_activity_query, wcet, ConnectorCostMode,
};
use pspec::compose::compile;
use pspec::dsl::{parse, SpecDocument};
use pspec::export::{dot::export_dot, pnml, trace_to_json_string, trace_to_text};
use pspec::process::validate;
use pspec::sim::{check_assumptions, run};

#[derive(Parser)]
#[command(name = "pspec", version, about = "Process specifications as timed-stream components")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundsSource {
    Declared,
    Measured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnectorCost {
    Zero,
    Measured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Dot,
    Pnml,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a specification file.
    Check { file: PathBuf },
    /// Simulate a composition under an env over a finite horizon.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        compose: String,
        #[arg(long)]
        env: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: TraceFormat,
    },
    /// Compute the compositional wcet bound of a composition.
    Wcet {
        file: PathBuf,
        #[arg(long)]
        compose: String,
        #[arg(long, value_enum, default_value = "declared")]
        bounds: BoundsSource,
        #[arg(long, value_enum, default_value = "zero")]
        connector_cost: ConnectorCost,
        /// Horizon used when measuring elementary bounds.
        #[arg(long, default_value_t = 200)]
        horizon: usize,
    },
    /// Evaluate an activity query against a simulated trace.
    Activity {
        file: PathBuf,
        #[arg(long)]
        compose: String,
        #[arg(long)]
        env: String,
        /// e.g. `active(P, 3)`, `active(P, 3, on=y)`, `active({P,Q}, 3, exact=1)`
        #[arg(long)]
        query: String,
        /// Defaults to one tick past the query's tick.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Export a composition as a DOT graph or a PNML Petri net.
    Export {
        file: PathBuf,
        #[arg(long)]
        compose: String,
        #[arg(long, value_enum)]
        to: ExportKind,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(file: &Path) -> Result<SpecDocument, String> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    parse(&text).map_err(|diags| {
        let mut msg = format!("{}:\n", file.display());
        for d in diags {
            msg.push_str(&format!("  {d}\n"));
        }
        msg
    })
}

fn check_document(doc: &SpecDocument) -> Result<(), String> {
    let mut report = String::new();
    for p in &doc.processes {
        for d in validate(p) {
            report.push_str(&format!("  process {}: {d}\n", p.name));
        }
    }
    if report.is_empty() {
        Ok(())
    } else {
        Err(report)
    }
}

fn run_command(command: Command) -> Result<(), String> {
    match command {
        Command::Check { file } => {
            let doc = load(&file)?;
            check_document(&doc)?;
            println!(
                "ok: {} process(es), {} composition(s), {} env(s)",
                doc.processes.len(),
                doc.compositions.len(),
                doc.envs.len()
            );
            Ok(())
        }
        Command::Simulate { file, compose, env, horizon, trace_out, format } => {
            let doc = load(&file)?;
            check_document(&doc)?;
            let expr = doc.composition(&compose).map_err(|e| e.to_string())?;
            let mut network = compile(&expr).map_err(|e| e.to_string())?;
            let env_inputs = doc
                .bind_env(&env, &network, horizon)
                .map_err(|e| e.to_string())?;
            let trace = run(&mut network, &env_inputs, horizon).map_err(|e| e.to_string())?;
            let violations = check_assumptions(&network, &trace);

            let rendered = match format {
                TraceFormat::Text => trace_to_text(&trace),
                TraceFormat::Structured => trace_to_json_string(&trace),
            };
            match &trace_out {
                Some(path) => std::fs::write(path, &rendered)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => print!("{rendered}"),
            }

            println!("simulated {compose} for {horizon} tick(s)");
            if let Some(exit) = network.exit_channel() {
                let exits = trace.channels[exit].nonempty_ticks();
                println!("exit events on {exit}: {exits:?}");
            }
            for w in &trace.warnings {
                println!("warning @{}: {} ({})", w.tick, w.kind, w.location);
            }
            for v in &violations {
                println!(
                    "assumption violated @{}: {} at {}",
                    v.tick, v.predicate, v.component
                );
            }
            if let Some(path) = trace_out {
                println!("trace written to {}", path.display());
            }
            Ok(())
        }
        Command::Wcet { file, compose, bounds, connector_cost, horizon } => {
            let doc = load(&file)?;
            check_document(&doc)?;
            let expr = doc.composition(&compose).map_err(|e| e.to_string())?;
            let elementary: BTreeMap<String, u64> = match bounds {
                BoundsSource::Declared => declared_bounds(&expr).map_err(|e| e.to_string())?,
                BoundsSource::Measured => {
                    measured_bounds(&expr, horizon).map_err(|e| e.to_string())?
                }
            };
            let mode = match connector_cost {
                ConnectorCost::Zero => ConnectorCostMode::Zero,
                ConnectorCost::Measured => ConnectorCostMode::Measured,
            };
            let report = wcet(&expr, &elementary, mode).map_err(|e| e.to_string())?;
            println!("wcet({compose}) = {} tick(s)", report.bound);
            print!("{}", report.render());
            Ok(())
        }
        Command::Activity { file, compose, env, query, horizon } => {
            let doc = load(&file)?;
            check_document(&doc)?;
            let parsed = parse_activity_query(&query)?;
            let horizon = horizon.unwrap_or(parsed.tick + 1);
            let expr = doc.composition(&compose).map_err(|e| e.to_string())?;
            let mut network = compile(&expr).map_err(|e| e.to_string())?;
            let env_inputs = doc
                .bind_env(&env, &network, horizon)
                .map_err(|e| e.to_string())?;
            let trace = run(&mut network, &env_inputs, horizon).map_err(|e| e.to_string())?;
            let value = parsed.eval(&trace).map_err(|e| e.to_string())?;
            println!("{query} = {value}");
            Ok(())
        }
        Command::Export { file, compose, to, out } => {
            let doc = load(&file)?;
            check_document(&doc)?;
            let expr = doc.composition(&compose).map_err(|e| e.to_string())?;
            let rendered = match to {
                ExportKind::Dot => {
                    let network = compile(&expr).map_err(|e| e.to_string())?;
                    export_dot(&network)
                }
                ExportKind::Pnml => {
                    let model = pnml::export_petri_net(&expr).map_err(|e| e.to_string())?;
                    pnml::to_pnml_xml(&model)
                }
            };
            std::fs::write(&out, rendered)
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::FAILURE
        }
    }
}
