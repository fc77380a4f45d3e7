use serde::{Deserialize, Serialize};

/// Lower bound applied to the TD-error scale.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// Welford accumulator: count, running mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OnlineStat {
    pub n: u64,
    pub mean: f64,
    /// Running sum of squared deviations (`μ̄`).
    pub m2: f64,
}

impl OnlineStat {
    /// Population variance `μ̄ / n`, zero before the first sample.
    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m2 / self.n as f64
        }
    }
}

/// One Welford step; returns the updated statistic and its variance `μ̄ / n`.
pub fn normalize_update(x: f64, stat: OnlineStat) -> (OnlineStat, f64) {
    let n = stat.n + 1;
    let delta = x - stat.mean;
    let mean = stat.mean + delta / n as f64;
    let delta2 = x - mean;
    let m2 = stat.m2 + delta * delta2;
    let next = OnlineStat { n, mean, m2 };
    (next, m2 / n as f64)
}

/// Running statistics of rewards, discounts and squared episode returns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScaleState {
    pub reward: OnlineStat,
    pub gamma: OnlineStat,
    /// Statistics of `G²`, one sample per finished episode.
    pub return_sq: OnlineStat,
}

/// Updates the scale statistics with one transition and returns the TD-error
/// scale `√(σ_R + μ_G·σ_γ)`, or 1 until two episodes have finished.
///
/// Pass `gamma = 0` and `Some(G)` on the last step of an episode, the
/// discount and `None` otherwise.
pub fn scale_td_error(reward: f64, gamma: f64, episode_return: Option<f64>, scale: ScaleState) -> (f64, ScaleState) {
    let (stat_r, var_r) = normalize_update(reward, scale.reward);
    let (stat_g, var_g) = normalize_update(gamma, scale.gamma);
    let stat_ret = match episode_return {
        Some(g) => normalize_update(g * g, scale.return_sq).0,
        None => scale.return_sq,
    };
    let sigma = if stat_ret.n > 1 {
        (var_r + stat_ret.mean * var_g).sqrt().max(SIGMA_FLOOR)
    } else {
        1.0
    };
    (
        sigma,
        ScaleState {
            reward: stat_r,
            gamma: stat_g,
            return_sq: stat_ret,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_sample() {
        let (s, var) = normalize_update(2.0, OnlineStat::default());
        assert_eq!(s, OnlineStat { n: 1, mean: 2.0, m2: 0.0 });
        assert_eq!(var, 0.0);
    }

    #[test]
    fn one_two_three() {
        let mut s = OnlineStat::default();
        let mut var = 0.0;
        for x in [1.0, 2.0, 3.0] {
            (s, var) = normalize_update(x, s);
        }
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.m2, 2.0);
        assert!((var - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_stream_has_zero_variance() {
        let mut s = OnlineStat::default();
        for _ in 0..1000 {
            let (next, var) = normalize_update(0.1, s);
            assert_eq!(var, 0.0);
            s = next;
        }
    }

    #[test]
    fn scale_is_one_until_second_episode() {
        let mut st = ScaleState::default();
        for (r, g, ret) in [(0.5, 0.9, None), (1.0, 0.0, Some(1.5)), (-0.2, 0.9, None)] {
            let (sigma, next) = scale_td_error(r, g, ret, st);
            assert_eq!(sigma, 1.0);
            st = next;
        }
        let (sigma, _) = scale_td_error(0.0, 0.0, Some(0.0), st);
        assert_ne!(sigma, 1.0);
    }

    #[test]
    fn degenerate_stream_hits_the_floor() {
        let mut st = ScaleState::default();
        let mut sigma = 0.0;
        for _ in 0..4 {
            (sigma, st) = scale_td_error(0.0, 0.9, None, st);
        }
        for _ in 0..3 {
            (sigma, st) = scale_td_error(0.0, 0.9, Some(0.0), st);
        }
        // every stream is constant
        assert_eq!(sigma, SIGMA_FLOOR);
    }
}
