use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Checkpoint, HarnessError, MetricsReport, RunConfig, SeedMetrics};
use crate::irrl::{
    evaluate, evaluate_episode, run_episode, BasePolicy, Controller, EpisodeOutcome, EvalSummary, SfmBase,
    TrainerState, ZeroBase,
};
use crate::net::HasParams;
use crate::sim::trajectory::Trajectory;

/// Key of the evaluation episode stream, shared by every training seed.
const EVAL_KEY: u64 = 0x5EED_E7A1;

/// Environment seed of training episode `episode` in run `run_seed`.
pub fn episode_seed(run_seed: u64, episode: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    rng.set_stream(episode + 1);
    rng.next_u64()
}

/// Environment seed of evaluation episode `index`.
pub fn eval_seed(index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(EVAL_KEY);
    rng.set_stream(index + 1);
    rng.next_u64()
}

/// One row of the learning-curve CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub episode: u64,
    pub eval_return_mean: f64,
    pub eval_success: f64,
    pub eval_collision: f64,
    pub eval_timeout: f64,
    pub exec_time_mean: f64,
    pub alpha: f64,
    pub sigma_delta_last: f64,
}

pub fn write_curve(path: &Path, rows: &[CurveRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    r.deserialize()
        .collect::<Result<Vec<CurveRow>, _>>()
        .map_err(|e| HarnessError::csv(path, e))
}

/// Training state of a single seed together with its environment setup.
pub struct SeedRun {
    pub config: RunConfig,
    pub seed: u64,
    pub trainer: TrainerState,
    base: SfmBase,
}

impl SeedRun {
    pub fn new(config: &RunConfig, seed: u64) -> Self {
        Self {
            trainer: TrainerState::new(config.trainer.clone(), seed),
            base: SfmBase {
                params: config.sfm_base.clone(),
            },
            config: config.clone(),
            seed,
        }
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self, HarnessError> {
        let mut run = Self::new(&ck.config, ck.seed);
        run.trainer = ck.restore()?;
        Ok(run)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::capture(&self.config, self.seed, &self.trainer)
    }

    pub fn episodes_done(&self) -> u64 {
        self.trainer.episode_count
    }

    fn base_policy(&self) -> &dyn BasePolicy {
        if self.config.trainer.scratch_mode {
            &ZeroBase
        } else {
            &self.base
        }
    }

    /// Deterministic controller for the current parameters.
    pub fn controller(&self) -> Controller<'_> {
        Controller {
            base: self.base_policy(),
            residual: Some(&self.trainer.actor),
            v_max: self.config.trainer.v_max,
        }
    }

    pub fn train_episode(&mut self) -> Result<EpisodeOutcome, HarnessError> {
        let seed = episode_seed(self.seed, self.trainer.episode_count);
        let crowd = self.config.crowd_model();
        let base: &dyn BasePolicy = if self.config.trainer.scratch_mode {
            &ZeroBase
        } else {
            &self.base
        };
        Ok(run_episode(&mut self.trainer, &self.config.env, &crowd, base, seed)?)
    }

    /// Evaluates the current policy on the first `episodes` evaluation seeds.
    pub fn evaluate(&self, episodes: usize) -> Result<EvalSummary, HarnessError> {
        let out = evaluate(
            &self.controller(),
            &self.config.env,
            &self.config.crowd_model(),
            self.config.trainer.gamma,
            (0..episodes as u64).map(eval_seed),
        )?;
        Ok(EvalSummary::from_outcomes(&out))
    }

    pub fn curve_row(&self) -> Result<CurveRow, HarnessError> {
        let s = self.evaluate(self.config.eval_episodes)?;
        Ok(CurveRow {
            episode: self.trainer.episode_count,
            eval_return_mean: s.return_discounted_mean,
            eval_success: s.success_rate,
            eval_collision: s.collision_rate,
            eval_timeout: s.timeout_rate,
            exec_time_mean: s.exec_time_mean,
            alpha: self.trainer.alpha(),
            sigma_delta_last: self.trainer.last_sigma,
        })
    }

    /// Trains until `episodes` episodes are done, calling `on_eval` at each
    /// evaluation point and `on_checkpoint` at each checkpoint interval.
    pub fn run_until(
        &mut self,
        episodes: u64,
        mut on_eval: impl FnMut(&CurveRow) -> Result<(), HarnessError>,
        mut on_checkpoint: impl FnMut(&SeedRun) -> Result<(), HarnessError>,
    ) -> Result<(), HarnessError> {
        while self.trainer.episode_count < episodes {
            self.train_episode()?;
            let done = self.trainer.episode_count;
            if done.is_multiple_of(self.config.eval_every as u64) {
                on_eval(&self.curve_row()?)?;
            }
            if done.is_multiple_of(self.config.checkpoint_every as u64) {
                on_checkpoint(self)?;
            }
        }
        Ok(())
    }

    /// Total rejected parameter updates plus skipped steps.
    pub fn skipped_updates(&self) -> u64 {
        self.trainer.skipped_steps
            + self.trainer.actor.params().skipped_updates()
            + self.trainer.critic.params().skipped_updates()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub episodes: u64,
    pub steps: u64,
    pub skipped_updates: u64,
    pub curve: PathBuf,
    pub final_checkpoint: PathBuf,
}

/// Run-level record written next to the per-seed outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub crate_version: String,
    pub wall_time_s: f64,
    pub seeds: Vec<SeedSummary>,
}

const KEEP_CHECKPOINTS: usize = 3;

fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed_{seed}"))
}

fn create_dir(path: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

/// Deletes all but the newest periodic checkpoints (`final.json` is kept).
fn prune_checkpoints(dir: &Path) -> Result<(), HarnessError> {
    let mut periodic: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| HarnessError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("ep_")))
        .collect();
    periodic.sort();
    let excess = periodic.len().saturating_sub(KEEP_CHECKPOINTS);
    for p in &periodic[..excess] {
        fs::remove_file(p).map_err(|e| HarnessError::io(p, e))?;
    }
    Ok(())
}

/// Continues (or starts) one seed, appending to its curve file.
fn train_seed(mut run: SeedRun, out: &Path) -> Result<SeedSummary, HarnessError> {
    let dir = seed_dir(out, run.seed);
    let ck_dir = dir.join("checkpoints");
    create_dir(&ck_dir)?;
    let curve_path = dir.join("curve.csv");
    let mut rows = if run.episodes_done() > 0 && curve_path.exists() {
        let done = run.episodes_done();
        read_curve(&curve_path)?.into_iter().filter(|r| r.episode <= done).collect()
    } else {
        Vec::new()
    };
    write_curve(&curve_path, &rows)?;
    let target = run.config.episodes as u64;
    run.run_until(
        target,
        |row| {
            rows.push(row.clone());
            write_curve(&curve_path, &rows)
        },
        |r| {
            let path = ck_dir.join(format!("ep_{:08}.json", r.episodes_done()));
            r.checkpoint().save(&path)?;
            prune_checkpoints(&ck_dir)
        },
    )?;
    let final_path = ck_dir.join("final.json");
    run.checkpoint().save(&final_path)?;
    Ok(SeedSummary {
        seed: run.seed,
        episodes: run.episodes_done(),
        steps: run.trainer.step_count,
        skipped_updates: run.skipped_updates(),
        curve: curve_path,
        final_checkpoint: final_path,
    })
}

/// Trains every seed of `config` (in parallel threads) and writes the curve
/// CSVs, checkpoints and the run manifest under `config.output_dir`.
///
/// With `resume`, each seed continues from the given checkpoint instead.
pub fn train_campaign(config: &RunConfig, force: bool, resume: Option<&Checkpoint>) -> Result<Manifest, HarnessError> {
    let out = &config.output_dir;
    if resume.is_none() && out.exists() {
        let non_empty = fs::read_dir(out).map_err(|e| HarnessError::io(out, e))?.next().is_some();
        if non_empty && !force {
            return Err(HarnessError::OutputExists(out.clone()));
        }
        if non_empty {
            fs::remove_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
        }
    }
    create_dir(out)?;
    let config_path = out.join("config.json");
    fs::write(&config_path, config.to_json()).map_err(|e| HarnessError::io(&config_path, e))?;

    let started = Instant::now();
    let runs: Vec<SeedRun> = match resume {
        Some(ck) => {
            let mut run = SeedRun::from_checkpoint(ck)?;
            run.config.episodes = config.episodes;
            vec![run]
        }
        None => config.seeds.iter().map(|s| SeedRun::new(config, *s)).collect(),
    };
    let results: Vec<Result<SeedSummary, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = runs
            .into_iter()
            .map(|run| scope.spawn(move || train_seed(run, out)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    });
    let seeds = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let manifest = Manifest {
        config_hash: config.hash(),
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
        seeds,
    };
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    Ok(manifest)
}

fn write_trajectories(
    controller: &Controller<'_>,
    config: &RunConfig,
    seed: u64,
    count: usize,
    dir: &Path,
) -> Result<(), HarnessError> {
    create_dir(dir)?;
    let crowd = config.crowd_model();
    for i in 0..count as u64 {
        let mut traj = Trajectory::default();
        evaluate_episode(controller, &config.env, &crowd, config.trainer.gamma, eval_seed(i), Some(&mut traj))?;
        let path = dir.join(format!("seed_{seed}_episode_{i:04}.csv"));
        traj.write_csv(&path).map_err(|e| HarnessError::csv(&path, e))?;
    }
    Ok(())
}

fn ped_name(config: &RunConfig) -> String {
    serde_json::to_value(config.env.ped_model)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Evaluates the frozen base controller. Every seed sees the same
/// evaluation episodes, so per-seed results coincide.
pub fn evaluate_base(
    config: &RunConfig,
    episodes: usize,
    seeds: &[u64],
    trajectories: Option<(&Path, usize)>,
) -> Result<MetricsReport, HarnessError> {
    let base = SfmBase {
        params: config.sfm_base.clone(),
    };
    let controller = Controller {
        base: &base,
        residual: None,
        v_max: config.trainer.v_max,
    };
    let crowd = config.crowd_model();
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let out = evaluate(
            &controller,
            &config.env,
            &crowd,
            config.trainer.gamma,
            (0..episodes as u64).map(eval_seed),
        )?;
        per_seed.push(SeedMetrics {
            seed,
            summary: EvalSummary::from_outcomes(&out),
        });
        if let Some((dir, n)) = trajectories {
            write_trajectories(&controller, config, seed, n, dir)?;
        }
    }
    Ok(MetricsReport::new("sfm", &ped_name(config), per_seed))
}

/// Evaluates trained checkpoints (one per seed). `config` supplies the
/// environment; the policy and its training settings come from each checkpoint.
pub fn evaluate_checkpoint(
    checkpoints: &[Checkpoint],
    config: &RunConfig,
    episodes: usize,
    trajectories: Option<(&Path, usize)>,
) -> Result<MetricsReport, HarnessError> {
    let mut per_seed = Vec::with_capacity(checkpoints.len());
    let mut policy = "irrl";
    for ck in checkpoints {
        let mut run = SeedRun::from_checkpoint(ck)?;
        run.config.env = config.env.clone();
        run.config.sfm = config.sfm.clone();
        run.config.orca = config.orca.clone();
        if run.config.trainer.scratch_mode {
            policy = "irrl-scratch";
        }
        per_seed.push(SeedMetrics {
            seed: ck.seed,
            summary: run.evaluate(episodes)?,
        });
        if let Some((dir, n)) = trajectories {
            write_trajectories(&run.controller(), &run.config, ck.seed, n, dir)?;
        }
    }
    Ok(MetricsReport::new(policy, &ped_name(config), per_seed))
}
