//! `civ` command line.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 on a domain error.
//! Domain errors print a single `error:<code>: <message>` line to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::avar::{avar_ols, AvarQuery};
use crate::criteria::{parse_node_list, parse_tuple, CondInstrumentSet, Target, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::estimator::{ols, tsls, EstimateReport};
use crate::fixtures;
use crate::graph::{parse_graph, Admg, AdmgBuilder, NodeSet};
use crate::greedy::{Action, GuardMode};
use crate::msep::m_separated;
use crate::sem::{random_sem, DataMatrix, LinearSem, RandomSemConfig};
use crate::simulate::{run_study, StudyConfig};

#[derive(Debug, Parser)]
#[command(name = "civ", version, about = "Conditional instrumental sets for two-stage least squares")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test m-separation of two node sets.
    Msep(MsepArgs),
    /// Check a tuple against the three validity conditions.
    Validate(ValidateArgs),
    /// List every valid tuple.
    Enumerate(EnumerateArgs),
    /// Compare two valid tuples graphically.
    Compare(CompareArgs),
    /// Grow a valid tuple greedily.
    Greedy(GreedyArgs),
    /// Construct the district-based tuple.
    Optimal(TargetArgs),
    /// Asymptotic variances of a tuple under a linear model.
    Avar(AvarArgs),
    /// Estimate the effect from a CSV data file.
    Estimate(EstimateArgs),
    /// Run the Monte Carlo comparison.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct GraphArg {
    /// Graph file, or the name of a bundled fixture such as `g1b`.
    #[arg(long)]
    pub graph: String,
    /// Print JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    #[command(flatten)]
    pub common: GraphArg,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
}

#[derive(Debug, Args)]
pub struct MsepArgs {
    #[command(flatten)]
    pub common: GraphArg,
    /// Comma-separated node names.
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    #[arg(long)]
    pub t: String,
    #[arg(long, default_value = "")]
    pub w: String,
    /// Query the graph without causal out-edges of `--x` (requires `--x`, `--y`).
    #[arg(long, requires_all = ["x", "y"])]
    pub tilde: bool,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, default_value = "")]
    pub z: String,
    #[arg(long, default_value = "")]
    pub w: String,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Restrict to these candidate nodes.
    #[arg(long)]
    pub candidates: Option<String>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// First tuple, `Z=A,B;W=C`.
    #[arg(long)]
    pub first: String,
    #[arg(long)]
    pub second: String,
}

#[derive(Debug, Args)]
pub struct GreedyArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Start tuple, `Z=A,B;W=C`.
    #[arg(long)]
    pub start: String,
    /// Visiting order; defaults to graph node order.
    #[arg(long)]
    pub order: Option<String>,
    /// Condition the guards on the start sets instead of the running sets.
    #[arg(long)]
    pub literal: bool,
}

#[derive(Debug, Args)]
pub struct AvarArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Parameter file; without it a random model is drawn from `--seed`.
    #[arg(long)]
    pub sem: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tuple: String,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV with a header row of variable names.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Tuple for two-stage least squares, `Z=A;W=B`.
    #[arg(long, required_unless_present = "ols", conflicts_with = "ols")]
    pub tuple: Option<String>,
    /// Least squares of Y on X and `--w` instead.
    #[arg(long)]
    pub ols: bool,
    #[arg(long, default_value = "", requires = "ols")]
    pub w: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, default_value_t = 100)]
    pub models: usize,
    #[arg(long, default_value_t = 50)]
    pub datasets: usize,
    /// Comma-separated sample sizes.
    #[arg(long, default_value = "20,500")]
    pub sizes: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write per-model rows here as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the least squares baseline.
    #[arg(long)]
    pub no_ols: bool,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error:{}: {}", e.code(), e);
            2
        }
    }
}

fn load_graph(spec: &str) -> Result<Admg> {
    let path = Path::new(spec);
    if path.exists() {
        return parse_graph(&std::fs::read_to_string(path)?);
    }
    fixtures::by_name(spec).ok_or_else(|| Error::Io(format!("{spec}: no such file or bundled graph")))
}

fn names(g: &Admg, s: &NodeSet) -> Value {
    json!(g.set_names(s))
}

fn tuple_json(g: &Admg, t: &CondInstrumentSet) -> Value {
    json!({"Z": names(g, &t.z), "W": names(g, &t.w)})
}

fn emit(out: &mut dyn Write, as_json: bool, value: &Value, text: impl FnOnce() -> String) -> Result<()> {
    if as_json {
        writeln!(out, "{}", serde_json::to_string(value).expect("serializable"))?;
    } else {
        write!(out, "{}", text())?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Msep(a) => {
            let g = load_graph(&a.common.graph)?;
            let (s, t, w) = (parse_node_list(&g, &a.s)?, parse_node_list(&g, &a.t)?, parse_node_list(&g, &a.w)?);
            let separated = if a.tilde {
                let (x, y) = (a.x.as_deref().unwrap_or_default(), a.y.as_deref().unwrap_or_default());
                let tgt = Target::from_names(&g, x, y)?;
                m_separated(&tgt.tilde, &s, &t, &w)?
            } else {
                m_separated(&g, &s, &t, &w)?
            };
            emit(out, a.common.json, &json!({"separated": separated}), || {
                format!("{}separated\n", if separated { "" } else { "not " })
            })
        }
        Command::Validate(a) => {
            let g = load_graph(&a.target.common.graph)?;
            let tgt = Target::from_names(&g, &a.target.x, &a.target.y)?;
            let t = CondInstrumentSet::new(parse_node_list(&g, &a.z)?, parse_node_list(&g, &a.w)?);
            let r = tgt.validate(&t)?;
            let v = json!({"valid": r.valid, "conditions": {"i": r.cond_i, "ii": r.cond_ii, "iii": r.cond_iii}});
            emit(out, a.target.common.json, &v, || {
                format!(
                    "{} is {}\n  no forbidden nodes: {}\n  instruments relevant: {}\n  instruments excluded: {}\n",
                    t.display(&g),
                    if r.valid { "valid" } else { "invalid" },
                    r.cond_i,
                    r.cond_ii,
                    r.cond_iii
                )
            })
        }
        Command::Enumerate(a) => {
            let g = load_graph(&a.target.common.graph)?;
            let tgt = Target::from_names(&g, &a.target.x, &a.target.y)?;
            let cands = a.candidates.as_deref().map(|c| parse_node_list(&g, c)).transpose()?;
            let found = tgt.enumerate(cands.as_ref(), a.cap)?;
            let v = json!({
                "count": found.len(),
                "tuples": found.iter().map(|t| tuple_json(&g, t)).collect::<Vec<_>>(),
            });
            emit(out, a.target.common.json, &v, || {
                let mut s = format!("{} valid tuples\n", found.len());
                for t in &found {
                    s.push_str(&format!("  {}\n", t.display(&g)));
                }
                s
            })
        }
        Command::Compare(a) => {
            let g = load_graph(&a.target.common.graph)?;
            let tgt = Target::from_names(&g, &a.target.x, &a.target.y)?;
            let (t1, t2) = (parse_tuple(&g, &a.first)?, parse_tuple(&g, &a.second)?);
            let d = tgt.compare(&t1, &t2)?;
            let v = json!({"verdict": d.verdict, "forward": d.forward, "reverse": d.reverse});
            emit(out, a.target.common.json, &v, || {
                let rel = match d.verdict {
                    crate::criteria::Verdict::SecondAtMostFirst => "avar(second) <= avar(first)",
                    crate::criteria::Verdict::FirstAtMostSecond => "avar(first) <= avar(second)",
                    crate::criteria::Verdict::Equal => "avar(first) = avar(second)",
                    crate::criteria::Verdict::Inconclusive => "no graphical ordering",
                };
                format!("{} vs {}: {rel}\n", t1.display(&g), t2.display(&g))
            })
        }
        Command::Greedy(a) => {
            let g = load_graph(&a.target.common.graph)?;
            let tgt = Target::from_names(&g, &a.target.x, &a.target.y)?;
            let start = parse_tuple(&g, &a.start)?;
            let order = match &a.order {
                Some(o) => Some(
                    o.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| g.node(s))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            let mode = if a.literal { GuardMode::Literal } else { GuardMode::Running };
            let tr = tgt.greedy_forward(&start, order.as_deref(), mode)?;
            let v = json!({
                "order": tr.order.iter().map(|&n| g.name(n)).collect::<Vec<_>>(),
                "steps": tr.steps,
                "result": tuple_json(&g, &tr.result),
            });
            if a.target.common.json {
                return emit(out, true, &v, String::new);
            }
            writeln!(out, "{:<8} {:<10} {:>7} {:>7} {:>7} {:>7}", "node", "action", "z_valid", "z_guard", "w_valid", "w_guard")?;
            for s in &tr.steps {
                let action = match s.action {
                    Action::AddedToZ => "Z",
                    Action::AddedToW => "W",
                    Action::Discarded => "discarded",
                };
                writeln!(
                    out,
                    "{:<8} {:<10} {:>7} {:>7} {:>7} {:>7}",
                    s.node_name, action, s.reason.z_valid, s.reason.z_guard, s.reason.w_valid, s.reason.w_guard
                )?;
            }
            writeln!(out, "{}", tuple_json(&g, &tr.result))?;
            Ok(())
        }
        Command::Optimal(a) => {
            let g = load_graph(&a.common.graph)?;
            let tgt = Target::from_names(&g, &a.x, &a.y)?;
            let r = tgt.optimal()?;
            let v = serde_json::to_value(tgt.optimal_json(&r)).expect("serializable");
            emit(out, a.common.json, &v, || {
                format!(
                    "Z = {}\nW = {}\nvalid: {}\ncertified: {}\n",
                    g.fmt_set(&r.z_opt),
                    g.fmt_set(&r.w_opt),
                    r.is_valid,
                    r.optimality_certified
                )
            })
        }
        Command::Avar(a) => {
            let g = load_graph(&a.target.common.graph)?;
            let tgt = Target::from_names(&g, &a.target.x, &a.target.y)?;
            let t = parse_tuple(&g, &a.tuple)?;
            if !tgt.is_valid(&t)? {
                return Err(Error::InvalidTuple(t.display(&g)));
            }
            let m = match &a.sem {
                Some(p) => LinearSem::from_json(&g, &std::fs::read_to_string(p)?)?,
                None => random_sem(&g, a.seed, &RandomSemConfig::default()).marginal(),
            };
            let cov = m.implied_covariance();
            let tau = m.total_effect(tgt.x, tgt.y);
            let r = AvarQuery { cov: &cov, tau, x: tgt.x, y: tgt.y, tuple: &t }.report()?;
            let ols_value = if tgt.is_valid_adjustment(&t.w)? {
                Some(avar_ols(&cov, tgt.x, tgt.y, &t.w)?)
            } else {
                None
            };
            let v = json!({
                "tau": tau,
                "residual_variance": r.residual_variance,
                "strength": r.strength,
                "avar_new": r.avar_new,
                "avar_traditional": r.avar_traditional,
                "avar_ols_if_adjustment": ols_value,
            });
            emit(out, a.target.common.json, &v, || {
                let mut s = format!(
                    "tuple {}\n  total effect       {tau:.6}\n  residual variance  {:.6}\n  strength           {:.6}\n  avar               {:.6}\n  avar (sandwich)    {:.6}\n",
                    t.display(&g),
                    r.residual_variance,
                    r.strength,
                    r.avar_new,
                    r.avar_traditional
                );
                if let Some(o) = ols_value {
                    s.push_str(&format!("  avar (OLS on W)    {o:.6}\n"));
                }
                s
            })
        }
        Command::Estimate(a) => {
            let data = DataMatrix::from_csv(std::fs::File::open(&a.data)?)?;
            let mut b = AdmgBuilder::new();
            for n in &data.names {
                b.node(n)?;
            }
            let g = b.build()?;
            let (x, y) = (g.node(&a.x)?, g.node(&a.y)?);
            let r: EstimateReport = if a.ols {
                ols(&data, x, y, &parse_node_list(&g, &a.w)?)?
            } else {
                let t = parse_tuple(&g, a.tuple.as_deref().unwrap_or_default())?;
                tsls(&data, x, y, &t)?
            };
            let v = serde_json::to_value(r).expect("serializable");
            emit(out, a.json, &v, || {
                format!(
                    "estimate {:.6}\n  strength {:.6}\n  residual variance {:.6}\n  n {}\n",
                    r.estimate, r.sample_strength, r.sample_residual_var, r.n
                )
            })
        }
        Command::Simulate(a) => {
            let g = load_graph(&a.target.common.graph)?;
            let (x, y) = (g.node(&a.target.x)?, g.node(&a.target.y)?);
            let id = Path::new(&a.target.common.graph)
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| a.target.common.graph.clone());
            let mut cfg = StudyConfig::new(&id, g, x, y);
            cfg.n_models = a.models;
            cfg.n_datasets = a.datasets;
            cfg.sample_sizes = a
                .sizes
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Precondition(format!("bad sample size `{s}`"))))
                .collect::<Result<_>>()?;
            cfg.base_seed = a.seed;
            cfg.jobs = a.jobs;
            cfg.include_ols = !a.no_ols;
            let r = run_study(&cfg)?;
            if let Some(p) = &a.out {
                std::fs::write(p, r.to_csv())?;
            }
            let v = json!({"optimal": r.optimal, "summary": r.summary});
            emit(out, a.target.common.json, &v, || {
                let mut s = format!("reference tuple {}\n{:<24} {:>6} {:>14} {:>10}\n", r.optimal, "tuple", "n", "geo_mean_ratio", "frac<1");
                for row in &r.summary {
                    s.push_str(&format!(
                        "{:<24} {:>6} {:>14.4} {:>10.3}\n",
                        row.tuple, row.n, row.geo_mean_ratio, row.frac_ratio_lt_1
                    ));
                }
                s
            })
        }
    }
}
