//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::io::{term_path, write_term_csv, write_trace_csv, write_trace_json, OutputFormat};
use super::verify::verify_all;
use super::{mc_mean_square, reference_pagerank, McScheme};
use crate::async_iter::simulate_async;
use crate::consensus::{consensus_matrices, simulate_consensus};
use crate::dist_simul::simulate_simul;
use crate::dist_single::simulate_single;
use crate::sim::{RunConfig, SchemeParams, SimTrace};
use crate::spectral::power_method;
use crate::termination::{run_algorithm1, TerminationParams};
use crate::webgraph::{example_web, load_edge_list, RankVector, WebGraph};
use crate::{Error, Result, DEFAULT_DAMPING};

#[derive(Debug, Parser)]
#[command(name = "randrank", version, about = "Randomized distributed PageRank simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Edge-list file; the built-in 4-page web when omitted.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Damping factor.
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    pub m: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct Run {
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling stride; 1 for runs of at most 1000 steps, otherwise 100.
    #[arg(long)]
    pub sample_every: Option<u64>,
}

impl Run {
    fn config(&self) -> RunConfig {
        let every = self.sample_every.unwrap_or(if self.steps <= 1000 { 1 } else { 100 });
        RunConfig::new(self.steps, every)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Centralized power method.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// One uniformly drawn page updates per step.
    SimSingle {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
    },
    /// Every page updates with probability alpha per step.
    SimSimul {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Simultaneous updates with termination of stable pages.
    SimTerminate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        ns: usize,
    },
    /// Randomized asynchronous power iteration.
    SimAsync {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Randomized averaging consensus.
    Consensus {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Comma-separated initial values; `1,0,...,0` when omitted.
        #[arg(long, value_delimiter = ',')]
        x0: Option<Vec<f64>>,
    },
    /// Dense matrix-identity checks.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo mean-square error of the time average.
    Mc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: Run,
        #[arg(long, value_enum, default_value_t = McScheme::Single)]
        scheme: McScheme,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 100)]
        runs: usize,
    },
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 on a runtime error or failed check,
/// 2 on a usage error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load_graph(path: Option<&Path>) -> Result<WebGraph> {
    match path {
        None => Ok(example_web()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::validation(format!("cannot read graph file {}: {e}", p.display())))?;
            load_edge_list(&text)
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn emit_trace(trace: &SimTrace, common: &Common) -> Result<()> {
    match common.format {
        OutputFormat::Json => {
            let mut w = sink(common.out.as_deref())?;
            write_trace_json(trace, &mut w)?;
            writeln!(w)?;
            w.flush()?;
        }
        OutputFormat::Csv => {
            let mut w = sink(common.out.as_deref())?;
            write_trace_csv(&trace.samples, &mut w)?;
            if let Some(times) = &trace.term_times {
                match &common.out {
                    Some(p) => write_term_csv(times, File::create(term_path(p))?)?,
                    None => {
                        writeln!(w)?;
                        write_term_csv(times, &mut w)?;
                    }
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn execute(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Solve { common, tol } => {
            let g = load_graph(common.graph.as_deref())?;
            let a = g.link_matrix()?;
            let r = power_method(&a, common.m, &RankVector::uniform(a.dim()), *tol, 1_000_000)?;
            let mut w = sink(common.out.as_deref())?;
            match common.format {
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut w, &r)?;
                    writeln!(w)?;
                }
                OutputFormat::Csv => {
                    writeln!(w, "page,score")?;
                    for (i, v) in r.x_star.iter().enumerate() {
                        writeln!(w, "{i},{v}")?;
                    }
                }
            }
            w.flush()?;
            Ok(true)
        }
        Command::SimSingle { common, run } => {
            let a = load_graph(common.graph.as_deref())?.link_matrix()?;
            let x_star = reference_pagerank(&a, common.m)?;
            let p = SchemeParams::new(common.m, 1.0, run.seed);
            emit_trace(&simulate_single(&a, &x_star, &p, &run.config())?, common)?;
            Ok(true)
        }
        Command::SimSimul { common, run, alpha } => {
            let a = load_graph(common.graph.as_deref())?.link_matrix()?;
            let x_star = reference_pagerank(&a, common.m)?;
            let p = SchemeParams::new(common.m, *alpha, run.seed);
            emit_trace(&simulate_simul(&a, &x_star, &p, &run.config())?, common)?;
            Ok(true)
        }
        Command::SimTerminate { common, run, alpha, delta, ns } => {
            let a = load_graph(common.graph.as_deref())?.link_matrix()?;
            let x_star = reference_pagerank(&a, common.m)?;
            let p = SchemeParams::new(common.m, *alpha, run.seed);
            let tp = TerminationParams::new(*delta, *ns)?;
            emit_trace(&run_algorithm1(&a, &x_star, &p, &tp, &run.config())?, common)?;
            Ok(true)
        }
        Command::SimAsync { common, run, alpha, tol } => {
            let a = load_graph(common.graph.as_deref())?.link_matrix()?;
            let x_star = reference_pagerank(&a, common.m)?;
            let p = SchemeParams::new(common.m, *alpha, run.seed);
            emit_trace(&simulate_async(&a, &x_star, &p, &run.config(), *tol)?, common)?;
            Ok(true)
        }
        Command::Consensus { common, run, tol, x0 } => {
            let g = load_graph(common.graph.as_deref())?;
            let pattern = consensus_matrices(&g)?;
            let n = g.page_count();
            let x0 = x0.clone().unwrap_or_else(|| {
                let mut v = vec![0.0; n];
                v[0] = 1.0;
                v
            });
            let cfg = run.config();
            let outcome = simulate_consensus(&pattern, &x0, run.seed, cfg.steps, cfg.sample_every, *tol)?;
            emit_trace(&outcome.trace, common)?;
            Ok(true)
        }
        Command::Verify { common } => {
            let a = load_graph(common.graph.as_deref())?.link_matrix()?;
            let checks = verify_all(&a, common.m)?;
            let mut w = sink(common.out.as_deref())?;
            match common.format {
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut w, &checks)?;
                    writeln!(w)?;
                }
                OutputFormat::Csv => {
                    for c in &checks {
                        writeln!(w, "{c}")?;
                    }
                }
            }
            w.flush()?;
            Ok(checks.iter().all(|c| c.passed != Some(false)))
        }
        Command::Mc { common, run, scheme, alpha, runs } => {
            let a = load_graph(common.graph.as_deref())?.link_matrix()?;
            let x_star = reference_pagerank(&a, common.m)?;
            let p = SchemeParams::new(common.m, *alpha, run.seed);
            if *scheme == McScheme::Simul {
                p.validate()?;
            }
            let summary = mc_mean_square(*scheme, &a, &x_star, &p, *runs, &run.config())?;
            let mut w = sink(common.out.as_deref())?;
            match common.format {
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut w, &summary)?;
                    writeln!(w)?;
                }
                OutputFormat::Csv => {
                    writeln!(w, "k,mean_sq,ms_bound")?;
                    for i in 0..summary.ks.len() {
                        writeln!(w, "{},{},{}", summary.ks[i], summary.mean_sq[i], summary.ms_bound[i])?;
                    }
                }
            }
            w.flush()?;
            Ok(true)
        }
    }
}
