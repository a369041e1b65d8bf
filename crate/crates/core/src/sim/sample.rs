use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::world::{ArmRegion, ObjectPose, WorldState};
use super::SimError;
use crate::rng::Rng;

/// Distribution of initial world states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub counter_zones: usize,
    pub drawer_closed_prob: f64,
    /// Range of the extension when the drawer starts open.
    pub open_range: [f64; 2],
    pub arm_above_counter_prob: f64,
    pub object_in_drawer_prob: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            counter_zones: 6,
            drawer_closed_prob: 0.5,
            open_range: [0.7, 1.0],
            arm_above_counter_prob: 0.5,
            object_in_drawer_prob: 0.0,
        }
    }
}

impl InitialConfig {
    /// Drawer closed, arm in its driving posture, everything on the counter.
    pub fn nominal() -> Self {
        InitialConfig {
            drawer_closed_prob: 1.0,
            arm_above_counter_prob: 0.0,
            ..Default::default()
        }
    }

    pub fn validate(&self, objects: usize) -> Result<(), SimError> {
        let p = |x: f64| (0.0..=1.0).contains(&x);
        let [lo, hi] = self.open_range;
        // one spare zone so a counter teleport always has somewhere to go
        if self.counter_zones < objects + 1
            || !p(self.drawer_closed_prob)
            || !p(self.arm_above_counter_prob)
            || !p(self.object_in_drawer_prob)
            || !(0.7..=1.0).contains(&lo)
            || !(lo..=1.0).contains(&hi)
        {
            return Err(SimError::InvalidInitialConfig);
        }
        Ok(())
    }
}

/// Free counter zones, in increasing order.
pub fn free_zones(w: &WorldState, zones: usize) -> Vec<usize> {
    (0..zones)
        .filter(|z| !w.objects.contains(&ObjectPose::Counter(*z)))
        .collect()
}

pub fn sample_initial(objects: usize, cfg: &InitialConfig, rng: &mut Rng) -> Result<WorldState, SimError> {
    cfg.validate(objects)?;
    let drawer_extension = if rng.random_bool(cfg.drawer_closed_prob) {
        0.0
    } else {
        rng.random_range(cfg.open_range[0]..=cfg.open_range[1])
    };
    let arm = if rng.random_bool(cfg.arm_above_counter_prob) {
        ArmRegion::AboveCounter
    } else {
        ArmRegion::Driving
    };
    let mut w = WorldState {
        arm,
        gripper_aperture: 1.0,
        attached: None,
        drawer_extension,
        objects: Vec::with_capacity(objects),
        arm_moving: false,
    };
    for _ in 0..objects {
        let pose = if rng.random_bool(cfg.object_in_drawer_prob) {
            ObjectPose::InDrawer
        } else {
            let free = free_zones(&w, cfg.counter_zones);
            ObjectPose::Counter(*free.choose(rng).expect("validated zone count"))
        };
        w.objects.push(pose);
    }
    Ok(w)
}
