use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::world::{ArmRegion, ObjectPose, Target, WorldState, HELD_APERTURE};
use super::SimError;
use crate::logic::ConditionSet;
use crate::planner::{GroundOperator, OpId};

pub const DEFAULT_SUCCESS: f64 = 0.95;
/// Where a failing pull or push leaves the drawer: inside the transit band.
pub const STALL_EXTENSION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    OpenGripper,
    ApproachHandle,
    CageHandle,
    GraspHandle,
    PullDrawer,
    ReleaseHandle,
    BackOff,
    ApproachObj(usize),
    CageObj(usize),
    GraspObj(usize),
    LiftObj(usize),
    MoveOverDrawer,
    LowerObj(usize),
    ReleaseObj,
    ApproachDrawerFront,
    PushDrawer,
}

impl Motion {
    fn resolve(binding: &str, object: Option<usize>) -> Option<Motion> {
        use Motion::*;
        Some(match binding {
            "open_gripper" => OpenGripper,
            "approach_handle" => ApproachHandle,
            "cage_handle" => CageHandle,
            "grasp_handle" => GraspHandle,
            "pull_drawer" => PullDrawer,
            "release_handle" => ReleaseHandle,
            "back_off" => BackOff,
            "approach_obj" => ApproachObj(object?),
            "cage_obj" => CageObj(object?),
            "grasp_obj" => GraspObj(object?),
            "lift_obj" => LiftObj(object?),
            "move_over_drawer" => MoveOverDrawer,
            "lower_obj" => LowerObj(object?),
            "release_obj" => ReleaseObj,
            "approach_drawer_front" => ApproachDrawerFront,
            "push_drawer" => PushDrawer,
            _ => return None,
        })
    }

    fn moves_arm(self) -> bool {
        !matches!(
            self,
            Motion::OpenGripper
                | Motion::GraspHandle
                | Motion::GraspObj(_)
                | Motion::ReleaseHandle
                | Motion::ReleaseObj
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveSpec {
    pub min_ticks: u32,
    pub max_ticks: u32,
    pub success: f64,
}

/// Durations and success probabilities per primitive binding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveTable {
    pub specs: BTreeMap<String, PrimitiveSpec>,
}

impl Default for PrimitiveTable {
    fn default() -> Self {
        let rows: [(&str, u32, u32); 16] = [
            ("open_gripper", 1, 2),
            ("approach_handle", 3, 6),
            ("cage_handle", 2, 4),
            ("grasp_handle", 2, 3),
            ("pull_drawer", 4, 8),
            ("release_handle", 1, 2),
            ("back_off", 2, 4),
            ("approach_obj", 3, 6),
            ("cage_obj", 2, 4),
            ("grasp_obj", 2, 3),
            ("lift_obj", 2, 4),
            ("move_over_drawer", 3, 6),
            ("lower_obj", 2, 4),
            ("release_obj", 1, 2),
            ("approach_drawer_front", 3, 6),
            ("push_drawer", 4, 8),
        ];
        PrimitiveTable {
            specs: rows
                .iter()
                .map(|&(name, min_ticks, max_ticks)| {
                    (
                        name.to_string(),
                        PrimitiveSpec {
                            min_ticks,
                            max_ticks,
                            success: DEFAULT_SUCCESS,
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Partial override of one table row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveOverride {
    pub success: Option<f64>,
    pub min_ticks: Option<u32>,
    pub max_ticks: Option<u32>,
}

/// The `primitives` block of a scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitivesConfig {
    pub default_success: Option<f64>,
    #[serde(default)]
    pub overrides: BTreeMap<String, PrimitiveOverride>,
}

impl PrimitiveTable {
    pub fn configured(cfg: &PrimitivesConfig) -> Result<PrimitiveTable, SimError> {
        let mut table = PrimitiveTable::default();
        if let Some(p) = cfg.default_success {
            for spec in table.specs.values_mut() {
                spec.success = p;
            }
        }
        for (name, o) in &cfg.overrides {
            let spec = table
                .specs
                .get_mut(name)
                .ok_or_else(|| SimError::UnknownBinding(name.clone()))?;
            if let Some(p) = o.success {
                spec.success = p;
            }
            if let Some(t) = o.min_ticks {
                spec.min_ticks = t;
            }
            if let Some(t) = o.max_ticks {
                spec.max_ticks = t;
            }
        }
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, s) in &self.specs {
            if !(0.0..=1.0).contains(&s.success) || s.min_ticks == 0 || s.min_ticks > s.max_ticks {
                return Err(SimError::InvalidPrimitive(name.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Running,
    Done,
    Failed,
}

/// One in-flight run of a primitive controller.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveState {
    pub op: OpId,
    pub binding: String,
    pub motion: Motion,
    pub duration: u32,
    pub ticks_remaining: u32,
    pub will_succeed: bool,
    pub phase: Phase,
    run: ConditionSet,
    start_extension: f64,
}

impl PrimitiveState {
    pub(super) fn new(
        op: &GroundOperator,
        objects: &[String],
        spec: &PrimitiveSpec,
        duration: u32,
        will_succeed: bool,
        world: &WorldState,
    ) -> Result<PrimitiveState, SimError> {
        let object = op.args.first().and_then(|a| objects.iter().position(|o| o == a));
        let motion = Motion::resolve(&op.primitive_binding, object)
            .ok_or_else(|| SimError::UnknownBinding(op.primitive_binding.clone()))?;
        debug_assert!((spec.min_ticks..=spec.max_ticks).contains(&duration));
        Ok(PrimitiveState {
            op: op.id,
            binding: op.primitive_binding.clone(),
            motion,
            duration,
            ticks_remaining: duration,
            will_succeed,
            phase: Phase::Running,
            run: op.run.clone(),
            start_extension: world.drawer_extension,
        })
    }

    pub fn is_running(&self) -> bool {
        self.phase == Phase::Running
    }

    pub(super) fn run_condition(&self) -> &ConditionSet {
        &self.run
    }

    /// Drawer extension this tick for pull and push, which move the drawer
    /// gradually rather than only at completion.
    pub(super) fn drawer_progress(&self) -> Option<f64> {
        let target = match (self.motion, self.will_succeed) {
            (Motion::PullDrawer, true) => 1.0,
            (Motion::PullDrawer, false) => self.start_extension.max(STALL_EXTENSION),
            (Motion::PushDrawer, true) => 0.0,
            (Motion::PushDrawer, false) => self.start_extension.min(STALL_EXTENSION),
            _ => return None,
        };
        let done = f64::from(self.duration - self.ticks_remaining) / f64::from(self.duration);
        Some(self.start_extension + (target - self.start_extension) * done)
    }

    pub(super) fn moves_arm(&self) -> bool {
        self.motion.moves_arm()
    }
}

/// Applies the intended physical outcome of a successful motion.
pub(super) fn complete(motion: Motion, w: &mut WorldState, free_zone: impl FnOnce(&WorldState) -> usize) {
    use Motion::*;
    match motion {
        OpenGripper => w.gripper_aperture = 1.0,
        ApproachHandle => w.arm = ArmRegion::Approach(Target::Handle),
        CageHandle => w.arm = ArmRegion::Around(Target::Handle),
        GraspHandle => {
            w.attached = Some(Target::Handle);
            w.gripper_aperture = HELD_APERTURE;
        }
        PullDrawer => w.drawer_extension = 1.0,
        ReleaseHandle => {
            w.attached = None;
            w.gripper_aperture = 1.0;
            w.arm = ArmRegion::NearHandle;
        }
        BackOff => w.arm = ArmRegion::AboveCounter,
        ApproachObj(i) => w.arm = ArmRegion::Approach(Target::Object(i)),
        CageObj(i) => w.arm = ArmRegion::Around(Target::Object(i)),
        GraspObj(i) => {
            w.attached = Some(Target::Object(i));
            w.objects[i] = ObjectPose::Held;
            w.gripper_aperture = HELD_APERTURE;
        }
        LiftObj(_) => w.arm = ArmRegion::Lifted,
        MoveOverDrawer => w.arm = ArmRegion::OverDrawer,
        LowerObj(_) => w.arm = ArmRegion::InDrawer,
        ReleaseObj => {
            if let Some(Target::Object(i)) = w.attached {
                w.objects[i] = if matches!(w.arm, ArmRegion::InDrawer | ArmRegion::OverDrawer) {
                    ObjectPose::InDrawer
                } else {
                    ObjectPose::Counter(free_zone(w))
                };
            }
            w.attached = None;
            w.gripper_aperture = 1.0;
        }
        ApproachDrawerFront => w.arm = ArmRegion::FrontOfDrawer,
        PushDrawer => w.drawer_extension = 0.0,
    }
}
