use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{HarnessError, RunConfig};
use crate::irrl::{RngState, ScaleState, TrainerState};
use crate::net::{HasParams, OptimizerState, ParamTree};

/// Bumped whenever the checkpoint layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// One named tensor; `data` is base64 of little-endian f64 values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorRecord {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerRecord {
    pub steps: u64,
    pub first: Vec<String>,
    pub second: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RngRecord {
    pub seed: String,
    pub stream: u64,
    /// Decimal, since JSON numbers cannot hold 128 bits.
    pub word_pos: String,
}

/// Everything needed to resume a seed's training run bit-for-bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub config: RunConfig,
    pub seed: u64,
    pub episode_count: u64,
    pub step_count: u64,
    pub skipped_steps: u64,
    pub skipped_updates: [u64; 2],
    pub log_alpha: f64,
    pub last_sigma: f64,
    pub episode_return: f64,
    pub scale: ScaleState,
    pub actor: Vec<TensorRecord>,
    pub critic: Vec<TensorRecord>,
    pub actor_optim: OptimizerRecord,
    pub critic_optim: OptimizerRecord,
    pub rng: RngRecord,
}

pub fn encode_f64s(values: &[f64]) -> String {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

pub fn decode_f64s(text: &str) -> Result<Vec<f64>, HarnessError> {
    let bytes = STANDARD
        .decode(text)
        .map_err(|e| HarnessError::Checkpoint(format!("bad base64 tensor: {e}")))?;
    if bytes.len() % 8 != 0 {
        return Err(HarnessError::Checkpoint(format!(
            "tensor byte length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

fn tensors(params: &ParamTree) -> Vec<TensorRecord> {
    params
        .iter()
        .map(|p| TensorRecord {
            name: p.name.clone(),
            shape: p.shape.clone(),
            data: encode_f64s(&p.value),
        })
        .collect()
}

fn load_tensors(params: &mut ParamTree, records: &[TensorRecord], which: &str) -> Result<(), HarnessError> {
    if records.len() != params.len() {
        return Err(HarnessError::Checkpoint(format!(
            "{which}: expected {} tensors, found {}",
            params.len(),
            records.len()
        )));
    }
    for (p, r) in params.iter_mut().zip(records) {
        let values = decode_f64s(&r.data)?;
        if p.name != r.name || p.shape != r.shape || values.len() != p.value.len() {
            return Err(HarnessError::Checkpoint(format!(
                "{which}: tensor `{}` {:?} does not match `{}` {:?}",
                r.name, r.shape, p.name, p.shape
            )));
        }
        p.value = values;
        p.grad.iter_mut().for_each(|g| *g = 0.0);
    }
    Ok(())
}

fn optimizer_record(o: &OptimizerState) -> OptimizerRecord {
    OptimizerRecord {
        steps: o.steps,
        first: o.first.iter().map(|v| encode_f64s(v)).collect(),
        second: o.second.iter().map(|v| encode_f64s(v)).collect(),
    }
}

fn load_optimizer(o: &mut OptimizerState, r: &OptimizerRecord, which: &str) -> Result<(), HarnessError> {
    let decode = |list: &[String], into: &Vec<Vec<f64>>| -> Result<Vec<Vec<f64>>, HarnessError> {
        if list.len() != into.len() {
            return Err(HarnessError::Checkpoint(format!(
                "{which} optimizer: expected {} moment tensors, found {}",
                into.len(),
                list.len()
            )));
        }
        list.iter()
            .zip(into)
            .map(|(s, cur)| {
                let v = decode_f64s(s)?;
                if v.len() != cur.len() {
                    return Err(HarnessError::Checkpoint(format!("{which} optimizer: moment length mismatch")));
                }
                Ok(v)
            })
            .collect()
    };
    o.first = decode(&r.first, &o.first)?;
    o.second = decode(&r.second, &o.second)?;
    o.steps = r.steps;
    Ok(())
}

impl Checkpoint {
    pub fn capture(config: &RunConfig, seed: u64, trainer: &TrainerState) -> Self {
        let rng = trainer.rng_state();
        Self {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            seed,
            episode_count: trainer.episode_count,
            step_count: trainer.step_count,
            skipped_steps: trainer.skipped_steps,
            skipped_updates: [
                trainer.actor.params().skipped_updates(),
                trainer.critic.params().skipped_updates(),
            ],
            log_alpha: trainer.log_alpha,
            last_sigma: trainer.last_sigma,
            episode_return: trainer.episode_return,
            scale: trainer.scale,
            actor: tensors(trainer.actor.params()),
            critic: tensors(trainer.critic.params()),
            actor_optim: optimizer_record(&trainer.actor_optim),
            critic_optim: optimizer_record(&trainer.critic_optim),
            rng: RngRecord {
                seed: STANDARD.encode(rng.seed),
                stream: rng.stream,
                word_pos: rng.word_pos.to_string(),
            },
        }
    }

    /// Rebuilds the trainer exactly as it was captured.
    pub fn restore(&self) -> Result<TrainerState, HarnessError> {
        let mut tr = TrainerState::new(self.config.trainer.clone(), self.seed);
        load_tensors(tr.actor.params_mut(), &self.actor, "actor")?;
        load_tensors(tr.critic.params_mut(), &self.critic, "critic")?;
        load_optimizer(&mut tr.actor_optim, &self.actor_optim, "actor")?;
        load_optimizer(&mut tr.critic_optim, &self.critic_optim, "critic")?;
        tr.actor.params_mut().set_skipped_updates(self.skipped_updates[0]);
        tr.critic.params_mut().set_skipped_updates(self.skipped_updates[1]);
        tr.log_alpha = self.log_alpha;
        tr.last_sigma = self.last_sigma;
        tr.episode_return = self.episode_return;
        tr.scale = self.scale;
        tr.episode_count = self.episode_count;
        tr.step_count = self.step_count;
        tr.skipped_steps = self.skipped_steps;
        let seed_bytes = STANDARD
            .decode(&self.rng.seed)
            .map_err(|e| HarnessError::Checkpoint(format!("bad rng seed: {e}")))?;
        let seed: [u8; 32] = seed_bytes
            .try_into()
            .map_err(|_| HarnessError::Checkpoint("rng seed must be 32 bytes".into()))?;
        let word_pos = self
            .rng
            .word_pos
            .parse()
            .map_err(|_| HarnessError::Checkpoint(format!("bad rng position `{}`", self.rng.word_pos)))?;
        tr.set_rng_state(&RngState {
            seed,
            stream: self.rng.stream,
            word_pos,
        });
        Ok(tr)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    /// Parses a checkpoint, rejecting other schema versions before anything else.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        #[derive(Deserialize)]
        struct Version {
            schema_version: Option<u32>,
        }
        let v: Version = serde_json::from_str(text).map_err(|e| HarnessError::Checkpoint(e.to_string()))?;
        match v.schema_version {
            Some(SCHEMA_VERSION) => {}
            found => {
                return Err(HarnessError::Schema {
                    expected: SCHEMA_VERSION,
                    found,
                })
            }
        }
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| HarnessError::Checkpoint(format!("{}: {}", e.path(), e.inner())))
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        fs::write(path, self.to_json()).map_err(|e| HarnessError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irrl::{Transition, TrainerConfig};
    use crate::net::NetConfig;
    use crate::sim::ObservationFrame;
    use crate::Vec2;

    fn small_config() -> RunConfig {
        RunConfig {
            trainer: TrainerConfig {
                net: NetConfig {
                    embed_dim: 4,
                    hidden_dim: 8,
                    leaky_slope: 0.2,
                },
                ..TrainerConfig::default()
            },
            ..RunConfig::default()
        }
    }

    fn trained(cfg: &RunConfig) -> TrainerState {
        let mut tr = TrainerState::new(cfg.trainer.clone(), 9);
        let obs = ObservationFrame {
            robot_feat: [2.0, 1.0, 0.4, 0.3, 0.0],
            human_feats: vec![[1.0, -1.0, 0.2, 0.1]],
        };
        for i in 0..20 {
            let s = tr.sample_residual(&obs, Vec2::new(0.5, 0.1));
            let t = Transition::new(obs.clone(), Vec2::new(0.5, 0.1), s, 0.1 * i as f64, obs.clone(), Vec2::new(0.5, 0.1), i % 7 == 6, false);
            tr.train_step(t);
        }
        tr
    }

    #[test]
    fn f64_codec_is_exact() {
        let v = vec![0.1, -0.0, f64::MIN_POSITIVE, 1e300, f64::NAN];
        let back = decode_f64s(&encode_f64s(&v)).unwrap();
        assert!(v.iter().zip(&back).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn load_then_save_is_byte_identical() {
        let cfg = small_config();
        let tr = trained(&cfg);
        let text = Checkpoint::capture(&cfg, 9, &tr).to_json();
        let again = Checkpoint::from_json(&text).unwrap().to_json();
        assert_eq!(text, again);
    }

    #[test]
    fn restore_reproduces_the_trainer() {
        let cfg = small_config();
        let tr = trained(&cfg);
        let ck = Checkpoint::capture(&cfg, 9, &tr);
        let back = ck.restore().unwrap();
        assert!(back.actor.params().same_values(tr.actor.params()));
        assert!(back.critic.params().same_values(tr.critic.params()));
        assert_eq!(back.rng_state(), tr.rng_state());
        assert_eq!(back.actor_optim, tr.actor_optim);
        assert_eq!(back.log_alpha.to_bits(), tr.log_alpha.to_bits());
        assert_eq!(Checkpoint::capture(&cfg, 9, &back), ck);
    }

    #[test]
    fn other_schema_versions_are_refused() {
        let cfg = small_config();
        let mut ck = Checkpoint::capture(&cfg, 9, &trained(&cfg));
        ck.schema_version = 99;
        match Checkpoint::from_json(&ck.to_json()) {
            Err(HarnessError::Schema { expected, found }) => {
                assert_eq!(expected, SCHEMA_VERSION);
                assert_eq!(found, Some(99));
            }
            other => panic!("{other:?}"),
        }
    }
}
