use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use frog::engine::{eval_paths, format_trace, run, to_dot};
use frog::gadgets::{pad_inapprox, reduce_3sat, reduce_qsat, reduce_qsat_spe_rr, ReduceOptions, Reduction};
use frog::io::{parse_dimacs, parse_qdimacs, read_instance, read_paths, read_strategies, write_instance, write_paths, write_table};
use frog::solvers::{
    br_decide, br_optimize, br_re, certify_rr, spe_exist_ro, spe_find_rr, win, SpeExistAnswer, DEFAULT_SET_CAP,
};
use frog::{AgentId, Delay, FrogError, Instance, RuleKind, SearchBudget};

#[derive(Parser)]
#[command(name = "frog", version, about = "Sequential FIFO routing games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Last round explored by the solvers.
    #[arg(long, global = true)]
    round_bound: Option<u32>,
    /// Maximum number of search nodes before giving up.
    #[arg(long, global = true)]
    node_budget: Option<u64>,
    /// Require every agent to start at round 0 (validate) or emit runways (reduce).
    #[arg(long, global = true)]
    strict_def1: bool,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file.
    Validate { instance: PathBuf },
    /// Run a strategy profile.
    Simulate {
        instance: PathBuf,
        #[arg(long)]
        strategies: PathBuf,
        /// Print one line per round.
        #[arg(long)]
        trace: bool,
        /// Write the graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Delays of a path profile.
    Eval {
        instance: PathBuf,
        #[arg(long)]
        paths: PathBuf,
    },
    /// Best response against fixed adversary paths.
    Br {
        instance: PathBuf,
        #[arg(long)]
        agent: u32,
        #[arg(long)]
        paths: PathBuf,
        #[arg(long, required_unless_present = "optimize")]
        theta: Option<u32>,
        /// Report the optimal delay; with --theta, also decide it.
        #[arg(long)]
        optimize: bool,
    },
    /// Polynomial best response under edge priorities.
    BrRe {
        instance: PathBuf,
        #[arg(long)]
        agent: u32,
        #[arg(long)]
        paths: PathBuf,
    },
    /// Can the agent guarantee delay at most theta?
    Win {
        instance: PathBuf,
        #[arg(long)]
        agent: u32,
        #[arg(long)]
        theta: u32,
        /// Write the winning strategy table.
        #[arg(long)]
        strategy_out: Option<PathBuf>,
    },
    /// Subgame perfect equilibrium under RR.
    SpeFind {
        instance: PathBuf,
        /// Write the equilibrium paths.
        #[arg(long)]
        paths_out: Option<PathBuf>,
    },
    /// Does a subgame perfect equilibrium exist under RO?
    SpeExist {
        instance: PathBuf,
        /// Largest outcome set kept per configuration.
        #[arg(long, default_value_t = DEFAULT_SET_CAP)]
        cap: usize,
    },
    /// Compile a formula into a game.
    Reduce {
        #[command(subcommand)]
        what: Reduce,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Ro,
    Rr,
}

#[derive(Subcommand)]
enum Reduce {
    /// DIMACS CNF to best response.
    #[command(name = "3sat")]
    ThreeSat {
        cnf: PathBuf,
        #[arg(short = 'o', long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "ro")]
        rule: RuleArg,
        #[arg(long)]
        red_count: Option<u32>,
    },
    /// QDIMACS to winning strategy.
    Qsat {
        qdimacs: PathBuf,
        #[arg(short = 'o', long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "ro")]
        rule: RuleArg,
        #[arg(long)]
        red_count: Option<u32>,
        /// Append the inapproximability padding with this many blockers.
        #[arg(long, conflicts_with = "spe_rr")]
        pad: Option<u32>,
        /// Build the RR equilibrium variant.
        #[arg(long)]
        spe_rr: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Simulate { .. } => "simulate",
            Command::Eval { .. } => "eval",
            Command::Br { .. } => "br",
            Command::BrRe { .. } => "br-re",
            Command::Win { .. } => "win",
            Command::SpeFind { .. } => "spe-find",
            Command::SpeExist { .. } => "spe-exist",
            Command::Reduce { what: Reduce::ThreeSat { .. } } => "reduce 3sat",
            Command::Reduce { what: Reduce::Qsat { .. } } => "reduce qsat",
        }
    }
}

struct Report {
    yes: bool,
    text: String,
    json: Value,
}

fn read(path: &FsPath) -> Result<String, FrogError> {
    Ok(fs::read_to_string(path)?)
}

fn load(path: &FsPath) -> Result<Instance, FrogError> {
    read_instance(&read(path)?)
}

fn agent(inst: &Instance, id: u32) -> Result<AgentId, FrogError> {
    if id == 0 || id as usize > inst.n() {
        return Err(FrogError::UnknownAgent(AgentId(id)));
    }
    Ok(AgentId(id))
}

fn vector(delays: &[Delay]) -> String {
    let items: Vec<String> = delays.iter().map(ToString::to_string).collect();
    format!("({})", items.join(","))
}

fn execute(cli: Cli) -> Result<Report, FrogError> {
    let c = &cli.common;
    let budget = SearchBudget { round_bound: c.round_bound, node_budget: c.node_budget };
    Ok(match cli.command {
        Command::Validate { instance } => {
            let inst = load(&instance)?;
            let v = inst.validate(c.strict_def1);
            let lines: Vec<String> = v.iter().map(ToString::to_string).collect();
            let text = if v.is_empty() { "valid".to_string() } else { lines.join("\n") };
            Report { yes: v.is_empty(), text, json: json!({ "valid": v.is_empty(), "violations": lines }) }
        }
        Command::Simulate { instance, strategies, trace, dot } => {
            let inst = load(&instance)?;
            let strategies = read_strategies(&read(&strategies)?, &inst)?;
            if let Some(out) = dot {
                fs::write(out, to_dot(&inst))?;
            }
            let out = run(&inst, &strategies, &budget)?;
            let mut text = String::new();
            if trace {
                text.push_str(&format_trace(&inst, &out));
            }
            text.push_str(&vector(&out.delays));
            Report { yes: true, text, json: json!({ "delays": out.delays, "paths": out.paths }) }
        }
        Command::Eval { instance, paths } => {
            let inst = load(&instance)?;
            let profile = read_paths(&read(&paths)?, &inst)?;
            let out = eval_paths(&inst, &profile)?;
            Report {
                yes: true,
                text: vector(&out.delays),
                json: json!({ "delays": out.delays, "positions": out.positions }),
            }
        }
        Command::Br { instance, agent: id, paths, theta, optimize } => {
            let inst = load(&instance)?;
            let me = agent(&inst, id)?;
            let profile = read_paths(&read(&paths)?, &inst)?;
            let res = if optimize {
                br_optimize(&inst, me, &profile, &budget)?
            } else {
                br_decide(&inst, me, &profile, theta.expect("required by clap"), &budget)?
            };
            let yes = match theta {
                Some(t) => res.delay <= Delay::Finite(t),
                None => res.delay.is_finite(),
            };
            let path = res.path.clone().unwrap_or_default();
            let text = if optimize || yes {
                format!("delay {} via {:?}", res.delay, path)
            } else {
                format!("no path with delay <= {}", theta.unwrap_or_default())
            };
            Report { yes, text, json: json!({ "feasible": yes, "delay": res.delay, "path": res.path, "stats": res.stats }) }
        }
        Command::BrRe { instance, agent: id, paths } => {
            let inst = load(&instance)?;
            let me = agent(&inst, id)?;
            let profile = read_paths(&read(&paths)?, &inst)?;
            let res = br_re(&inst, me, &profile)?;
            Report {
                yes: res.delay.is_finite(),
                text: format!("delay {} via {:?}", res.delay, res.path.clone().unwrap_or_default()),
                json: json!({ "delay": res.delay, "certified": res.certified, "path": res.path }),
            }
        }
        Command::Win { instance, agent: id, theta, strategy_out } => {
            let inst = load(&instance)?;
            let me = agent(&inst, id)?;
            let res = win(&inst, me, theta, &budget)?;
            if let (Some(out), true) = (strategy_out, res.wins) {
                fs::write(out, write_table(me, &res.strategy))?;
            }
            let text = if res.wins { "yes" } else { "no" };
            Report { yes: res.wins, text: format!("{text} (theta {theta})"), json: json!({ "wins": res.wins, "theta": theta, "stats": res.stats }) }
        }
        Command::SpeFind { instance, paths_out } => {
            let inst = load(&instance)?;
            let (w, stats) = spe_find_rr(&inst, &budget)?;
            let deviations = certify_rr(&inst, &w, &budget)?;
            if let Some(out) = paths_out {
                fs::write(out, write_paths(&w.paths))?;
            }
            Report {
                yes: deviations.is_empty(),
                text: format!("{} with {} profitable deviations", vector(&w.delays), deviations.len()),
                json: json!({ "delays": w.delays, "paths": w.paths, "deviations": deviations, "stats": stats }),
            }
        }
        Command::SpeExist { instance, cap } => {
            let inst = load(&instance)?;
            let res = spe_exist_ro(&inst, &budget, cap)?;
            let outcomes: Vec<String> = res.outcomes.iter().map(|o| vector(o)).collect();
            let answer = match res.answer {
                SpeExistAnswer::Yes => "yes",
                SpeExistAnswer::No => "no",
                SpeExistAnswer::Inconclusive => {
                    return Err(FrogError::InvalidInstance(format!("inconclusive: outcome sets exceed the cap of {cap}")))
                }
            };
            Report {
                yes: res.answer == SpeExistAnswer::Yes,
                text: format!("{answer} {}", outcomes.join(" ")),
                json: json!({ "answer": answer, "outcomes": res.outcomes, "paths": res.paths, "stats": res.stats }),
            }
        }
        Command::Reduce { what } => {
            let (red, out) = match what {
                Reduce::ThreeSat { cnf, out, rule, red_count } => {
                    let formula = parse_dimacs(&fs::read(cnf)?)?;
                    (reduce_3sat(&formula, &options(rule, red_count, c.strict_def1))?, out)
                }
                Reduce::Qsat { qdimacs, out, rule, red_count, pad, spe_rr } => {
                    let formula = parse_qdimacs(&fs::read(qdimacs)?)?;
                    let opts = options(rule, red_count, c.strict_def1);
                    let red = if spe_rr {
                        reduce_qsat_spe_rr(&formula, &opts)?
                    } else {
                        let base = reduce_qsat(&formula, &opts)?;
                        match pad {
                            Some(m) => pad_inapprox(&base, m)?,
                            None => base,
                        }
                    };
                    (red, out)
                }
            };
            write_reduction(&red, &out)?
        }
    })
}

fn options(rule: RuleArg, red_count: Option<u32>, strict_def1: bool) -> ReduceOptions {
    let rule = match rule {
        RuleArg::Ro => RuleKind::Ro,
        RuleArg::Rr => RuleKind::Rr,
    };
    ReduceOptions { rule, red_count, strict_def1 }
}

fn sidecar(out: &FsPath, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Writes the instance, `<out>.manifest.json` and `<out>.paths.json`.
fn write_reduction(red: &Reduction, out: &FsPath) -> Result<Report, FrogError> {
    fs::write(out, write_instance(&red.instance))?;
    let manifest = serde_json::to_value(red.manifest())?;
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(sidecar(out, ".manifest.json"), text)?;
    fs::write(sidecar(out, ".paths.json"), write_paths(&red.adversary_profile()))?;
    Ok(Report {
        yes: true,
        text: format!(
            "wrote {} ({} agents, {} edges), theta {}, agent of interest {}",
            out.display(),
            red.instance.n(),
            red.instance.graph.num_edges(),
            red.theta,
            red.agent_of_interest
        ),
        json: manifest,
    })
}

/// Prints a line, ignoring a closed stdout.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = cli.common.json;
    let command = cli.command.name();
    match execute(cli) {
        Ok(report) => {
            if as_json {
                let mut body = json!({ "schema": 1, "command": command, "result": if report.yes { "yes" } else { "no" } });
                body["data"] = report.json;
                emit(&serde_json::to_string_pretty(&body).expect("report serializes"));
            } else {
                emit(&report.text);
            }
            ExitCode::from(if report.yes { 0 } else { 1 })
        }
        Err(e) => {
            if as_json {
                emit(&json!({ "schema": 1, "command": command, "result": "error", "error": e.to_string() }).to_string());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}
