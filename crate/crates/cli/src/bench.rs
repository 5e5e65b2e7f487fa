//! Benchmark suite runner: one child process per instance, bounded
//! parallelism, CSV + markdown summaries shaped like the published tables.

use std::collections::HashMap;
use std::fs;

use std::path::{Path, PathBuf};
use std::process::{Command as Process, ExitCode, Stdio};
use std::thread::sleep;
use std::time::Duration;

use clap::{Args, ValueEnum};

use rolemine_core::report::RunReport;

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Heuristic,
    Hard,
    Hardest,
    Bnp,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance files.
    #[arg(long)]
    dir: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Parallel instance processes.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV of `instance,bound` rows; defaults to `<dir>/bounds.csv`, then
    /// `data/bounds.csv`.
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Report output directory; defaults to `<dir>/reports`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 3_000_000)]
    threshold: u64,
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long, default_value_t = 200)]
    large_threshold: usize,
    #[arg(long, default_value_t = 1)]
    pieces: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Outcome {
    name: String,
    status: Option<i32>,
    report: Option<RunReport>,
}

pub fn run(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let mut instances: Vec<PathBuf> = fs::read_dir(&args.dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .map_or(false, |n| n != "bounds.csv" && !n.to_string_lossy().starts_with('.'))
        })
        .collect();
    instances.sort();

    let out_dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| args.dir.join("reports"));
    fs::create_dir_all(&out_dir)?;
    let bounds = load_bounds(&args);

    let exe = std::env::current_exe()?;
    let jobs = args.jobs.max(1);
    let mut queue: Vec<PathBuf> = instances;
    queue.reverse();
    let mut running: Vec<(String, PathBuf, std::process::Child)> = Vec::new();
    let mut outcomes: Vec<Outcome> = Vec::new();

    while !queue.is_empty() || !running.is_empty() {
        while running.len() < jobs {
            let Some(path) = queue.pop() else { break };
            let name = stem(&path);
            let report_path = out_dir.join(format!("{name}.json"));
            let mut cmd = Process::new(&exe);
            cmd.stdout(Stdio::piped()).stderr(Stdio::null());
            push_mode_args(&mut cmd, &args, &path, &report_path, bounds.get(&name));
            match cmd.spawn() {
                Ok(child) => running.push((name, report_path, child)),
                Err(err) => {
                    eprintln!("{name}: failed to spawn: {err}");
                    outcomes.push(Outcome {
                        name,
                        status: None,
                        report: None,
                    });
                }
            }
        }
        sleep(Duration::from_millis(40));
        let mut still = Vec::new();
        for (name, report_path, mut child) in running {
            match child.try_wait()? {
                None => still.push((name, report_path, child)),
                Some(status) => {
                    let out = child.wait_with_output()?;
                    print!("{}", String::from_utf8_lossy(&out.stdout));
                    let report = fs::read_to_string(&report_path)
                        .ok()
                        .and_then(|s| serde_json::from_str(&s).ok());
                    if !status.success() {
                        eprintln!("{name}: exited with {status}");
                    }
                    outcomes.push(Outcome {
                        name,
                        status: status.code(),
                        report,
                    });
                }
            }
        }
        running = still;
    }

    outcomes.sort_by(|a, b| a.name.cmp(&b.name));
    let csv = render_csv(&outcomes);
    let md = render_markdown(&outcomes);
    fs::write(out_dir.join("summary.csv"), &csv)?;
    fs::write(out_dir.join("summary.md"), &md)?;
    print!("{md}");
    println!("reports written to {}", out_dir.display());
    Ok(ExitCode::SUCCESS)
}

fn push_mode_args(
    cmd: &mut Process,
    args: &BenchArgs,
    input: &Path,
    report: &Path,
    bound: Option<&usize>,
) {
    match args.mode {
        ModeArg::Exact => {
            cmd.arg("mine-exact");
        }
        ModeArg::Heuristic => {
            cmd.args(["mine-heuristic", "--strategy", "best"]);
        }
        ModeArg::Hard => {
            cmd.args(["mine-hard", "--large-threshold"])
                .arg(args.large_threshold.to_string());
        }
        ModeArg::Hardest => {
            cmd.args(["mine-hard", "--large-threshold"])
                .arg(args.large_threshold.to_string())
                .arg("--pieces")
                .arg(args.pieces.max(2).to_string());
        }
        ModeArg::Bnp => {
            cmd.arg("branch-and-price");
        }
    }
    cmd.arg("--input").arg(input);
    cmd.arg("--quiet");
    cmd.arg("--report").arg(report);
    cmd.arg("--threshold").arg(args.threshold.to_string());
    cmd.arg("--seed").arg(args.seed.to_string());
    if let Some(budget) = args.time_budget {
        cmd.arg("--time-budget").arg(budget.to_string());
    }
    if let Some(b) = bound {
        cmd.arg("--bound").arg(b.to_string());
    }
}

fn load_bounds(args: &BenchArgs) -> HashMap<String, usize> {
    let path = args
        .bounds
        .clone()
        .or_else(|| {
            let p = args.dir.join("bounds.csv");
            p.is_file().then_some(p)
        })
        .or_else(|| {
            let p = PathBuf::from("data/bounds.csv");
            p.is_file().then_some(p)
        });
    let mut map = HashMap::new();
    if let Some(path) = path {
        if let Ok(text) = fs::read_to_string(&path) {
            for line in text.lines().skip(1) {
                if let Some((name, bound)) = line.split_once(',') {
                    if let Ok(b) = bound.trim().parse() {
                        map.insert(name.trim().to_owned(), b);
                    }
                }
            }
        }
    }
    map
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// `[h:]m:s` rendering used in tables and run lines.
pub fn fmt_duration(secs: f64) -> String {
    let total = secs.round() as u64;
    let (h, m, s) = (total / 3600, (total % 3600) / 60, total % 60);
    if h > 0 {
        format!("{h}:{m:02}:{s:02}")
    } else {
        format!("{m}:{s:02}")
    }
}

fn render_csv(outcomes: &[Outcome]) -> String {
    let mut out = String::from(
        "instance,mode,edges,edges_after_reduction,pct_after,maximal_bicliques,forced_roles,total_roles,known_bound,error_pct,seconds,status\n",
    );
    for o in outcomes {
        match &o.report {
            Some(r) => out.push_str(&format!(
                "{},{},{},{},{:.1},{},{},{},{},{},{:.2},{}\n",
                r.instance,
                r.mode,
                r.initial_edges,
                r.edges_after_reduction,
                r.pct_edges_after_reduction,
                r.maximal_bicliques.map_or(String::new(), |v| v.to_string()),
                r.forced_roles,
                r.total_roles,
                r.known_bound.map_or(String::new(), |v| v.to_string()),
                r.error_pct.map_or(String::new(), |v| format!("{:.0}", v.round())),
                r.total_secs,
                o.status.unwrap_or(-1),
            )),
            None => out.push_str(&format!(
                "{},,,,,,,,,,,{}\n",
                o.name,
                o.status.map_or("spawn-failed".into(), |c| c.to_string())
            )),
        }
    }
    out
}

fn render_markdown(outcomes: &[Outcome]) -> String {
    let mut out = String::new();
    out.push_str("| instance | edges | after reduction | % | max. bicliques | roles | bound | error % | time |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for o in outcomes {
        match &o.report {
            Some(r) => out.push_str(&format!(
                "| {} | {} | {} | {:.1} | {} | {} | {} | {} | {} |\n",
                r.instance,
                r.initial_edges,
                r.edges_after_reduction,
                r.pct_edges_after_reduction,
                r.maximal_bicliques.map_or("-".into(), |v| v.to_string()),
                r.total_roles,
                r.known_bound.map_or("-".into(), |v| v.to_string()),
                r.error_pct.map_or("-".into(), |v| format!("{:.0}", v.round())),
                fmt_duration(r.total_secs),
            )),
            None => out.push_str(&format!(
                "| {} | - | - | - | - | - | - | - | failed ({:?}) |\n",
                o.name, o.status
            )),
        }
    }
    out
}
