use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irrl::harness::{
    evaluate_base, evaluate_checkpoint, parse_seed_list, plot, train_campaign, Checkpoint, HarnessError, RunConfig,
    FULL_BUDGET_EPISODES,
};
use irrl::sim::PedModel;

#[derive(Parser)]
#[command(name = "irrl", version, about = "Residual RL crowd navigation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one policy per seed and write curves, checkpoints and a manifest.
    Train(TrainArgs),
    /// Evaluate checkpoints, or the SFM base policy alone.
    Eval(EvalArgs),
    /// Render curve CSVs and trajectory CSVs to SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Ped {
    Sfm,
    Orca,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Sfm,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seeds as `1..5` or `1,2,3`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long, value_enum)]
    ped: Option<Ped>,
    /// Dotted-path override such as `trainer.gamma=0.95`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Train without the base policy.
    #[arg(long)]
    scratch: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Delete a non-empty output directory first.
    #[arg(long)]
    force: bool,
    /// Use the full 100,000-episode budget.
    #[arg(long, conflicts_with = "episodes")]
    full_budget: bool,
    /// Continue a seed from this checkpoint up to `--episodes`.
    #[arg(long, value_name = "CHECKPOINT")]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Checkpoint files, one per seed.
    checkpoints: Vec<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "checkpoints")]
    policy: Option<Policy>,
    /// Directory for metrics.json and trajectory CSVs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of per-episode trajectory CSVs to write per seed.
    #[arg(long, default_value_t = 0, requires = "out")]
    trajectories: usize,
}

#[derive(Args)]
struct PlotArgs {
    /// Learning-curve CSVs sharing one episode grid.
    curves: Vec<PathBuf>,
    /// Trajectory CSVs; repeatable.
    #[arg(long = "traj")]
    trajectories: Vec<PathBuf>,
    #[arg(long, default_value = "plots")]
    out: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    goal_tolerance: f64,
}

fn build_config(common: &Common, base: Option<RunConfig>) -> Result<RunConfig, HarnessError> {
    let mut cfg = match (&common.config, base) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(cfg)) => cfg,
        (None, None) => RunConfig::default(),
    };
    for s in &common.sets {
        cfg.apply_override(s)?;
    }
    if let Some(n) = common.episodes {
        cfg.episodes = n;
    }
    if let Some(s) = &common.seeds {
        cfg.seeds = parse_seed_list(s)?;
    }
    if let Some(p) = common.ped {
        cfg.env.ped_model = match p {
            Ped::Sfm => PedModel::Sfm,
            Ped::Orca => PedModel::Orca,
        };
    }
    Ok(cfg)
}

fn train(args: TrainArgs) -> Result<(), HarnessError> {
    let resume = args.resume.as_deref().map(Checkpoint::load).transpose()?;
    let mut cfg = build_config(&args.common, resume.as_ref().map(|c| c.config.clone()))?;
    if args.scratch {
        cfg.trainer.scratch_mode = true;
    }
    if args.full_budget {
        cfg.episodes = FULL_BUDGET_EPISODES;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    cfg.validate()?;
    let manifest = train_campaign(&cfg, args.force, resume.as_ref())?;
    for s in &manifest.seeds {
        println!(
            "seed {}: {} episodes, {} steps, {} skipped updates -> {}",
            s.seed,
            s.episodes,
            s.steps,
            s.skipped_updates,
            s.final_checkpoint.display()
        );
    }
    println!("wall time {:.1}s, output in {}", manifest.wall_time_s, cfg.output_dir.display());
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), HarnessError> {
    let checkpoints = args
        .checkpoints
        .iter()
        .map(|p| Checkpoint::load(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut common = args.common;
    let episodes = common.episodes.take().unwrap_or(500);
    let cfg = build_config(&common, checkpoints.first().map(|c| c.config.clone()))?;
    cfg.validate()?;
    let traj_dir = args.out.as_ref().map(|d| d.join("trajectories"));
    let trajectories = traj_dir.as_deref().filter(|_| args.trajectories > 0).map(|d| (d, args.trajectories));
    let report = match (args.policy, checkpoints.is_empty()) {
        (Some(Policy::Sfm), _) => evaluate_base(&cfg, episodes, &cfg.seeds, trajectories)?,
        (None, false) => evaluate_checkpoint(&checkpoints, &cfg, episodes, trajectories)?,
        (None, true) => {
            return Err(HarnessError::Config {
                path: "checkpoints".into(),
                message: "give checkpoint files or --policy sfm".into(),
            })
        }
    };
    print!("{}", report.table());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let path = dir.join("metrics.json");
        fs::write(&path, report.to_json()).map_err(|e| io_error(&path, e))?;
    }
    Ok(())
}

fn io_error(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn plot_cmd(args: PlotArgs) -> Result<(), HarnessError> {
    let mut written = Vec::new();
    if !args.curves.is_empty() {
        written.extend(plot::plot_curves(&args.curves, &args.out)?);
    }
    if !args.trajectories.is_empty() {
        written.extend(plot::plot_trajectories(&args.trajectories, &args.out, args.goal_tolerance)?);
    }
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Plot(a) => plot_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
