//! Role mining CLI: pipelines, verification, reports and the benchmark
//! suite runner.
//!
//! Exit codes: 0 success, 2 unsound policy (should be unreachable through
//! the pipelines), 3 instance-format error, 4 time budget exhausted with a
//! bound-only result.

mod bench;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use rolemine_core::cover::{
    build_cover_instance, emit_lp, mine_exact, solve_decision_binary_search, MineConfig, Proof,
};
use rolemine_core::enumeration::{count_with_threshold, CountResult, EnumContext};
use rolemine_core::error::Error;
use rolemine_core::heuristics::{
    greedy_cover, lattice_postprocess, mine_hard, mine_hardest, run_prior_heuristic,
    GreedyStrategy,
};
use rolemine_core::io::{load_instance, InstanceFormat};
use rolemine_core::policy::{
    describe_report, read_policy_json, verify_policy, write_policy_json, RbacPolicy,
};
use rolemine_core::pricing::{branch_and_price, PricingOptions};
use rolemine_core::reduction::{expand_roles, reduce};
use rolemine_core::report::{report_reduction_sizes, ConfigSnapshot, MineStats, RunReport};
use rolemine_core::{AccessMatrix, Progress, Provenance, Role};

#[derive(Parser)]
#[command(name = "rolemine", version, about = "Mine minimum-size RBAC role sets from access matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Edgelist,
    Rmplib,
    Auto,
}

impl From<FormatArg> for InstanceFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Edgelist => InstanceFormat::EdgeList,
            FormatArg::Rmplib => InstanceFormat::Rmplib,
            FormatArg::Auto => InstanceFormat::Auto,
        }
    }
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file.
    #[arg(long, short)]
    input: PathBuf,
    /// Instance layout.
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    /// Suppress heartbeat output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Per-event trace lines (one per reduction removal etc.).
    #[arg(long, global = true)]
    trace: bool,
}

impl InstanceArgs {
    fn load(&self) -> Result<AccessMatrix, Error> {
        let m = load_instance(&self.input, self.format.into())?;
        let (du, dp) = m.dropped_vertices();
        if !du.is_empty() || !dp.is_empty() {
            eprintln!(
                "warning: dropped {} isolated users and {} isolated permissions",
                du.len(),
                dp.len()
            );
        }
        Ok(m)
    }

    fn progress(&self) -> Progress {
        Progress::new(!self.quiet, self.trace)
    }

    fn name(&self) -> String {
        self.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.input.display().to_string())
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Hardness threshold on the number of maximal bicliques.
    #[arg(long, default_value_t = 3_000_000)]
    threshold: u64,
    /// Wall-clock budget in seconds for the solving phase.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Seed for randomized tie-breaking.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the mined policy as JSON.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write the run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Known role-count bound for error reporting.
    #[arg(long)]
    bound: Option<usize>,
}

impl PipelineArgs {
    fn config(&self) -> MineConfig {
        MineConfig {
            count_threshold: self.threshold,
            time_budget: self.time_budget.map(Duration::from_secs_f64),
            seed: self.seed,
            ..MineConfig::default()
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum StrategyArg {
    Smallest,
    Largest,
    Best,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dominator reduction and print edge counts.
    Reduce {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Write a JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Count maximal bicliques of the reduced instance against a threshold.
    CountBicliques {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 3_000_000)]
        threshold: u64,
    },
    /// Exact pipeline: reduce, enumerate, solve the cover exactly.
    MineExact {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Also write the cover instance in CPLEX-LP format.
        #[arg(long)]
        emit_lp: Option<PathBuf>,
    },
    /// Prior greedy + lattice heuristic (runs on the original matrix).
    MineHeuristic {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, value_enum, default_value = "best")]
        strategy: StrategyArg,
    },
    /// Hard-instance pipeline: large maximal bicliques, then exact remainder.
    MineHard {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Minimum fresh edges for a biclique to be adopted as a role.
        #[arg(long, default_value_t = 200)]
        large_threshold: usize,
        /// Mine user-partition pieces independently, then recombine (>= 2
        /// switches to the piece pipeline).
        #[arg(long, default_value_t = 1)]
        pieces: usize,
    },
    /// Column generation at the root; emits the convergence trace.
    BranchAndPrice {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Write the (elapsed_seconds, objective) trace as CSV.
        #[arg(long)]
        trace_csv: Option<PathBuf>,
    },
    /// Check a mined policy against an instance.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Policy JSON produced by the mining commands.
        #[arg(long)]
        policy: PathBuf,
    },
    /// Report reduced / derived-graph sizes for the alternative encodings.
    Sizes {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Write the post-reduction cover instance in CPLEX-LP format.
    EmitLp {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, default_value_t = 3_000_000)]
        threshold: u64,
    },
    /// Run a directory of instances and summarize like the published tables.
    Bench(bench::BenchArgs),
    /// Decision-version baseline: binary search on the role count.
    DecisionSearch {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::Parse { .. } | Error::Format(_) | Error::EmptyInstance) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Reduce { instance, report } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let started = Instant::now();
            let state = reduce(&m, &mut progress);
            let mut stats = MineStats::new(m.edge_count());
            stats.reduction_secs = started.elapsed().as_secs_f64();
            stats.active_edges = state.active().len();
            stats.forced_roles = state.forced_roles().len();
            stats.total_roles = state.forced_roles().len();
            let pct = 100.0 * state.active().len() as f64 / m.edge_count() as f64;
            println!(
                "{}: {} edges, {} after reduction ({:.1}%), {} forced roles, {} removals",
                instance.name(),
                m.edge_count(),
                state.active().len(),
                pct,
                state.forced_roles().len(),
                state.removal_log().len()
            );
            if let Some(path) = report {
                let rep = RunReport::from_stats(
                    &instance.name(),
                    "reduce",
                    0,
                    &stats,
                    None,
                    stats.reduction_secs,
                    snapshot(&MineConfig::default()),
                );
                write_json(&path, &rep)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::CountBicliques { instance, threshold } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let state = reduce(&m, &mut progress);
            let started = Instant::now();
            let ctx = EnumContext::new(&m, state.active().clone(), m.full_edge_set())
                .with_threshold(threshold);
            let result = count_with_threshold(&ctx, &mut progress);
            let secs = started.elapsed().as_secs_f64();
            match result {
                CountResult::Exact(n) => {
                    println!("{}: Exact({n}) maximal bicliques in {secs:.2}s (easy)", instance.name())
                }
                CountResult::ExceededThreshold(t) => println!(
                    "{}: ExceededThreshold({t}) in {secs:.2}s (hard)",
                    instance.name()
                ),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::MineExact {
            instance,
            pipeline,
            emit_lp: lp_path,
        } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let config = pipeline.config();
            let started = Instant::now();

            if let Some(path) = &lp_path {
                let state = reduce(&m, &mut progress);
                if !state.active().is_empty() {
                    let ctx = EnumContext::new(&m, state.active().clone(), m.full_edge_set())
                        .with_threshold(config.count_threshold);
                    let inst = build_cover_instance(&ctx, &mut progress)?;
                    let mut f = File::create(path)?;
                    emit_lp(&inst, &mut f)?;
                    eprintln!("wrote LP model: {} columns, {} rows", inst.n_cols(), inst.n_rows());
                }
            }

            let (policy, stats) = mine_exact(&m, &config, &mut progress)?;
            finish_run(&m, &instance, &pipeline, "exact", policy, stats, started)
        }

        Command::MineHeuristic {
            instance,
            pipeline,
            strategy,
        } => {
            let m = instance.load()?;
            let config = pipeline.config();
            let started = Instant::now();
            let mut stats = MineStats::new(m.edge_count());
            let t = Instant::now();
            let policy = match strategy {
                StrategyArg::Best => {
                    let (policy, s) = run_prior_heuristic(&m, config.seed)?;
                    stats.greedy_roles = Some(s.smallest_greedy.min(s.largest_greedy));
                    stats.lattice_roles = Some(policy.role_count());
                    policy
                }
                StrategyArg::Smallest | StrategyArg::Largest => {
                    let strat = if strategy == StrategyArg::Smallest {
                        GreedyStrategy::SmallestDegree
                    } else {
                        GreedyStrategy::LargestDegree
                    };
                    let greedy = greedy_cover(&m, strat, config.seed);
                    stats.greedy_roles = Some(greedy.role_count());
                    let post = lattice_postprocess(&m, &greedy)?;
                    stats.lattice_roles = Some(post.role_count());
                    post
                }
            };
            stats.heuristic_secs = t.elapsed().as_secs_f64();
            stats.total_roles = policy.role_count();
            finish_run(&m, &instance, &pipeline, "heuristic", policy, stats, started)
        }

        Command::MineHard {
            instance,
            pipeline,
            large_threshold,
            pieces,
        } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let mut config = pipeline.config();
            config.large_edge_threshold = large_threshold;
            config.pieces = pieces;
            let started = Instant::now();
            let (policy, stats) = if pieces >= 2 {
                mine_hardest(&m, &config, &mut progress)?
            } else {
                mine_hard(&m, &config, &mut progress)?
            };
            let mode = if pieces >= 2 { "hardest" } else { "hard" };
            finish_run(&m, &instance, &pipeline, mode, policy, stats, started)
        }

        Command::BranchAndPrice {
            instance,
            pipeline,
            trace_csv,
        } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let config = pipeline.config();
            let started = Instant::now();
            let state = reduce(&m, &mut progress);
            let opts = PricingOptions {
                time_budget: config.time_budget,
                ..PricingOptions::default()
            };
            let (ps, solution) = branch_and_price(&m, &state, &opts, &mut progress)?;
            if let Some(path) = trace_csv {
                let mut f = File::create(&path)?;
                writeln!(f, "elapsed_seconds,objective")?;
                for (t, obj) in &ps.trace {
                    writeln!(f, "{t:.3},{obj:.6}")?;
                }
            }
            println!(
                "{}: LP bound {:.4} after {} rounds ({})",
                instance.name(),
                ps.relaxation_objective,
                ps.iterations,
                if ps.converged { "converged" } else { "budget exhausted" }
            );
            let mut stats = MineStats::new(m.edge_count());
            stats.active_edges = state.active().len();
            stats.forced_roles = state.forced_roles().len();
            match solution {
                Some(sol) => {
                    let roles: Vec<Role> = sol
                        .selected
                        .iter()
                        .map(|&j| Role::from_biclique(&ps.working_columns[j], Provenance::ExactCover))
                        .collect();
                    let policy = expand_roles(&m, &state, &RbacPolicy::new(roles))?;
                    stats.cover_roles = sol.objective;
                    stats.total_roles = policy.role_count();
                    stats.proof = Some(sol.proof);
                    finish_run(&m, &instance, &pipeline, "bnp", policy, stats, started)
                }
                None => {
                    // No integral solution at the root: report the trace only.
                    if !ps.converged {
                        return Ok(ExitCode::from(4));
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }

        Command::Verify { instance, policy } => {
            let m = instance.load()?;
            let pol = read_policy_json(&m, File::open(&policy)?)?;
            let report = verify_policy(&m, &pol);
            print!("{}", describe_report(&m, &report));
            if report.is_sound() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }

        Command::Sizes { instance } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let state = reduce(&m, &mut progress);
            let sizes = report_reduction_sizes(&m, &state, &mut progress);
            println!(
                "{}: reduced size {} | pairwise-adjacency graph size {} | coloring size approx {}",
                instance.name(),
                sizes.reduced_size,
                sizes.clique_partition_size,
                sizes.coloring_size_approx
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::EmitLp {
            instance,
            output,
            threshold,
        } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let state = reduce(&m, &mut progress);
            if state.active().is_empty() {
                eprintln!("instance fully reduced; no LP to emit");
                return Ok(ExitCode::SUCCESS);
            }
            let ctx = EnumContext::new(&m, state.active().clone(), m.full_edge_set())
                .with_threshold(threshold);
            let inst = build_cover_instance(&ctx, &mut progress)?;
            let mut f = File::create(&output)?;
            emit_lp(&inst, &mut f)?;
            println!(
                "wrote {}: {} binary variables, {} constraints",
                output.display(),
                inst.n_cols(),
                inst.n_rows()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::DecisionSearch { instance, pipeline } => {
            let m = instance.load()?;
            let mut progress = instance.progress();
            let config = pipeline.config();
            let state = reduce(&m, &mut progress);
            let (sol, _groups) = solve_decision_binary_search(
                &m,
                state.active(),
                config.time_budget,
                &mut progress,
            );
            match sol.proof {
                Proof::Optimal => {
                    println!("{}: minimum k = {} (decision search)", instance.name(), sol.objective);
                    Ok(ExitCode::SUCCESS)
                }
                Proof::Bound { lower, upper } => {
                    println!(
                        "{}: budget exhausted; k in {lower}..={upper}",
                        instance.name()
                    );
                    Ok(ExitCode::from(4))
                }
            }
        }

        Command::Bench(args) => bench::run(args),
    }
}

fn snapshot(config: &MineConfig) -> ConfigSnapshot {
    ConfigSnapshot {
        count_threshold: config.count_threshold,
        large_edge_threshold: config.large_edge_threshold,
        pieces: config.pieces,
        time_budget_secs: config.time_budget.map(|d| d.as_secs_f64()),
    }
}

/// Verify, report, write outputs. An unsound policy is a hard error (exit
/// 2); a bound-only result exits 4.
fn finish_run(
    m: &AccessMatrix,
    instance: &InstanceArgs,
    pipeline: &PipelineArgs,
    mode: &str,
    policy: RbacPolicy,
    stats: MineStats,
    started: Instant,
) -> anyhow::Result<ExitCode> {
    let report = verify_policy(m, &policy);
    if !report.is_sound() {
        eprint!("{}", describe_report(m, &report));
        eprintln!("refusing to emit an unsound policy");
        return Ok(ExitCode::from(2));
    }
    let config = pipeline.config();
    let run = RunReport::from_stats(
        &instance.name(),
        mode,
        config.seed,
        &stats,
        pipeline.bound,
        started.elapsed().as_secs_f64(),
        snapshot(&config),
    );
    println!(
        "{}: {} roles ({} forced, {} cover, {} large) in {}",
        run.instance,
        run.total_roles,
        run.forced_roles,
        run.cover_roles,
        run.large_roles,
        bench::fmt_duration(run.total_secs)
    );
    if let Some(err) = run.error_pct {
        println!("  error vs known bound: {:.0}%", err.round());
    }
    if let Some(path) = &pipeline.output {
        let mut f = File::create(path)?;
        write_policy_json(m, &policy, &mut f)?;
    }
    if let Some(path) = &pipeline.report {
        write_json(path, &run)?;
    }
    let budget_exhausted = matches!(stats.proof, Some(Proof::Bound { .. }));
    if budget_exhausted {
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_json(path: &Path, report: &RunReport) -> anyhow::Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, report)?;
    f.write_all(b"\n")?;
    Ok(())
}
