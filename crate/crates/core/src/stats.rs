//! Wall detection rates over the stride-scan candidates.

use crate::points::PointSet;
use crate::walls::{find_walls, is_hard_wall, is_soft_wall, soft_window};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub hits: u64,
    pub trials: u64,
    pub rate: f64,
    /// Binomial standard error `sqrt(r(1 - r)/trials)`.
    pub std_err: f64,
}

impl Rate {
    pub fn new(hits: u64, trials: u64) -> Self {
        if trials == 0 {
            return Rate::default();
        }
        let rate = hits as f64 / trials as f64;
        Rate { hits, trials, rate, std_err: (rate * (1.0 - rate) / trials as f64).sqrt() }
    }

    pub fn merge(self, other: Rate) -> Rate {
        Rate::new(self.hits + other.hits, self.trials + other.trials)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub instances: usize,
    pub hard_walls: Vec<Vec<usize>>,
    pub soft_walls_per_interval: Vec<Vec<Vec<usize>>>,
    pub empirical_rates: BTreeMap<String, Rate>,
    pub expected: BTreeMap<String, f64>,
    /// Representative-set sizes per interval, for solved instances.
    pub stage_sizes: Vec<Vec<Vec<usize>>>,
    pub tonicity_profiles: Vec<Vec<usize>>,
}

/// Hard-wall test at every window `5j..=5j+4`.
pub fn hard_wall_rate(p: &PointSet) -> Rate {
    let trials = (p.len() / 5) as u64;
    let hits = (0..p.len() / 5).filter(|&j| is_hard_wall(p, 5 * j).unwrap_or(false)).count() as u64;
    Rate::new(hits, trials)
}

/// Soft-wall test at every `ceil(sqrt(delta))`-th point over the whole set.
pub fn soft_wall_rate(p: &PointSet) -> Rate {
    let c = soft_window(p);
    let starts: Vec<usize> = (0..p.len()).step_by(c).take_while(|&r| r + c < p.len()).collect();
    let hits = starts.iter().filter(|&&r| is_soft_wall(p, r).unwrap_or(false)).count() as u64;
    Rate::new(hits, starts.len() as u64)
}

/// `e^{-4 delta}/6`: four spacings above delta and three rising heights.
pub fn expected_hard_wall_rate(delta: f64) -> f64 {
    (-4.0 * delta).exp() / 6.0
}

/// `1 - 2^{3 - c/2}` with `c = ceil(sqrt(delta))`.
pub fn soft_wall_rate_floor(delta: f64) -> f64 {
    let c = delta.sqrt().ceil();
    1.0 - (3.0 - c / 2.0).exp2()
}

pub fn instance_stats(p: &PointSet) -> StatsReport {
    let walls = find_walls(p);
    let delta = p.delta() as f64 / p.scale() as f64;
    StatsReport {
        instances: 1,
        hard_walls: vec![walls.hard],
        soft_walls_per_interval: vec![walls.soft],
        empirical_rates: BTreeMap::from([
            ("hard_wall".to_string(), hard_wall_rate(p)),
            ("soft_wall".to_string(), soft_wall_rate(p)),
        ]),
        expected: BTreeMap::from([
            ("hard_wall".to_string(), expected_hard_wall_rate(delta)),
            ("soft_wall_floor".to_string(), soft_wall_rate_floor(delta)),
        ]),
        ..StatsReport::default()
    }
}

impl StatsReport {
    /// Concatenates per-instance lists and pools the rates.
    pub fn merge(mut self, other: StatsReport) -> StatsReport {
        self.instances += other.instances;
        self.hard_walls.extend(other.hard_walls);
        self.soft_walls_per_interval.extend(other.soft_walls_per_interval);
        self.stage_sizes.extend(other.stage_sizes);
        self.tonicity_profiles.extend(other.tonicity_profiles);
        for (k, r) in other.empirical_rates {
            let e = self.empirical_rates.entry(k).or_default();
            *e = e.merge(r);
        }
        for (k, v) in other.expected {
            self.expected.entry(k).or_insert(v);
        }
        self
    }
}
