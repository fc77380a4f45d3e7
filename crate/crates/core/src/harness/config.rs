use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::irrl::TrainerConfig;
use crate::peds::{CrowdModel, OrcaParams, SfmParams};
use crate::sim::{EnvConfig, PedModel};

/// Complete description of a training or evaluation campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub env: EnvConfig,
    pub trainer: TrainerConfig,
    /// Pedestrian social-force parameters.
    pub sfm: SfmParams,
    /// Robot base-policy parameters.
    pub sfm_base: SfmParams,
    pub orca: OrcaParams,
    pub episodes: usize,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub checkpoint_every: usize,
}

/// Long-run episode budget, selectable with `--full-budget`.
pub const FULL_BUDGET_EPISODES: usize = 100_000;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            env: EnvConfig::default(),
            trainer: TrainerConfig::default(),
            sfm: SfmParams::default(),
            sfm_base: SfmParams::robot_base(),
            orca: OrcaParams::default(),
            episodes: 5000,
            eval_every: 100,
            eval_episodes: 100,
            seeds: vec![1, 2, 3],
            output_dir: PathBuf::from("runs/default"),
            checkpoint_every: 1000,
        }
    }
}

impl RunConfig {
    /// Reads a JSON config; missing keys take their defaults.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies `key.path=value`. The value is parsed as JSON when possible
    /// and taken as a plain string otherwise.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), HarnessError> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| HarnessError::Config {
            path: assignment.to_string(),
            message: "override must look like key.path=value".into(),
        })?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut tree = serde_json::to_value(&*self).expect("config serializes");
        let mut node = &mut tree;
        for part in key.split('.') {
            node = node
                .as_object_mut()
                .and_then(|m| m.get_mut(part))
                .ok_or_else(|| HarnessError::Config {
                    path: key.to_string(),
                    message: format!("unknown key `{part}`"),
                })?;
        }
        *node = value;
        *self = Self::from_json(&tree.to_string())?;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |path: &str, message: String| HarnessError::Config {
            path: path.to_string(),
            message,
        };
        self.env.validate().map_err(|e| match e {
            crate::sim::SimError::InvalidConfig { field, reason } => err(&format!("env.{field}"), reason),
            other => err("env", other.to_string()),
        })?;
        self.trainer
            .validate()
            .map_err(|(field, m)| err(&format!("trainer.{field}"), m))?;
        self.sfm.validate().map_err(|m| err("sfm", m))?;
        self.sfm_base.validate().map_err(|m| err("sfm_base", m))?;
        self.orca.validate().map_err(|m| err("orca", m))?;
        if self.trainer.v_max > self.env.pref_speed {
            return Err(err(
                "trainer.v_max",
                format!("exceeds the robot speed {}", self.env.pref_speed),
            ));
        }
        if self.episodes == 0 {
            return Err(err("episodes", "must be positive".into()));
        }
        if self.eval_every == 0 {
            return Err(err("eval_every", "must be positive".into()));
        }
        if self.eval_episodes == 0 {
            return Err(err("eval_episodes", "must be positive".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(err("checkpoint_every", "must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(err("seeds", "must not be empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(err("seeds", "must be distinct".into()));
        }
        Ok(())
    }

    /// Controller that moves the pedestrians.
    pub fn crowd_model(&self) -> CrowdModel {
        match self.env.ped_model {
            PedModel::Sfm => CrowdModel::Sfm(self.sfm.clone()),
            PedModel::Orca => CrowdModel::Orca(self.orca.clone()),
        }
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses `1,2,5` or `1..5` (inclusive) into a seed list.
pub fn parse_seed_list(spec: &str) -> Result<Vec<u64>, HarnessError> {
    let bad = |m: String| HarnessError::Config {
        path: "seeds".into(),
        message: m,
    };
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad(format!("bad range start in `{spec}`")))?;
        let b: u64 = b.trim().parse().map_err(|_| bad(format!("bad range end in `{spec}`")))?;
        if b < a {
            return Err(bad(format!("empty range `{spec}`")));
        }
        return Ok((a..=b).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad(format!("bad seed `{s}`"))))
        .collect()
}
