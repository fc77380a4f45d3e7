//! Per-episode trajectory export (one CSV per episode, one row per agent per step).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EnvState, Terminal};
use crate::Vec2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub sim_time: f64,
    /// 0 is the robot; pedestrians are numbered from 1.
    pub agent_id: usize,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub reward: f64,
    pub terminal: Terminal,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    /// Starts a trajectory with the post-reset state as step 0.
    pub fn start(state: &EnvState) -> Self {
        let mut t = Self::default();
        t.record(state, 0.0, Terminal::None);
        t
    }

    pub fn record(&mut self, state: &EnvState, reward: f64, terminal: Terminal) {
        let agents = std::iter::once(&state.robot).chain(&state.humans);
        for (id, a) in agents.enumerate() {
            self.rows.push(TrajectoryRow {
                step: state.step_count,
                sim_time: state.sim_time,
                agent_id: id,
                x: a.position.x,
                y: a.position.y,
                vx: a.velocity.x,
                vy: a.velocity.y,
                reward,
                terminal,
            });
        }
    }

    /// Positions of one agent in step order.
    pub fn path(&self, agent_id: usize) -> Vec<Vec2> {
        self.rows
            .iter()
            .filter(|r| r.agent_id == agent_id)
            .map(|r| Vec2::new(r.x, r.y))
            .collect()
    }

    pub fn agent_count(&self) -> usize {
        self.rows.iter().map(|r| r.agent_id + 1).max().unwrap_or(0)
    }

    pub fn outcome(&self) -> Terminal {
        self.rows.last().map_or(Terminal::None, |r| r.terminal)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self, csv::Error> {
        let mut r = csv::Reader::from_path(path)?;
        let rows = r.deserialize().collect::<Result<Vec<TrajectoryRow>, _>>()?;
        Ok(Self { rows })
    }
}
