//! Discrete stochastic kitchen: a hidden world state, the map from it to
//! the logical state, multi-tick primitive controllers and scripted
//! disturbances.

mod disturbance;
mod primitive;
mod sample;
mod world;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use thiserror::Error;

pub use disturbance::{Destination, Disturbance, DisturbanceKind, Trigger};
pub use primitive::{
    Motion, Phase, PrimitiveOverride, PrimitiveSpec, PrimitiveState, PrimitiveTable, PrimitivesConfig, DEFAULT_SUCCESS,
    STALL_EXTENSION,
};
pub use sample::{free_zones, sample_initial, InitialConfig};
pub use world::{
    ArmRegion, Evaluator, ObjectPose, Target, WorldState, DRAWER_CLOSED, DRAWER_OPEN, GRASP_APERTURE, HELD_APERTURE,
    OPEN_APERTURE,
};

use crate::logic::LogicalState;
use crate::planner::{GroundOperator, GroundedDomain};
use crate::rng::Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("no primitive controller for binding `{0}`")]
    UnknownBinding(String),
    #[error("invalid primitive settings for `{0}`")]
    InvalidPrimitive(String),
    #[error("the simulator has no rule for predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("invalid disturbance destination: {0}")]
    InvalidDestination(String),
    #[error("invalid initial-state configuration")]
    InvalidInitialConfig,
}

/// Movable objects of a grounded kitchen domain, in vocabulary order.
pub fn movable_objects(g: &GroundedDomain) -> Vec<String> {
    g.vocab
        .atoms()
        .iter()
        .filter(|a| a.predicate == "obj_is_on_counter")
        .filter_map(|a| a.args.first().cloned())
        .collect()
}

#[derive(Debug, Clone)]
pub struct Kitchen {
    eval: Evaluator,
    table: PrimitiveTable,
    zones: usize,
    pub world: WorldState,
}

impl Kitchen {
    pub fn new(
        g: &GroundedDomain,
        table: PrimitiveTable,
        zones: usize,
        world: WorldState,
    ) -> Result<Kitchen, SimError> {
        let objects = movable_objects(g);
        let eval = Evaluator::new(&g.vocab, &objects)?;
        table.validate()?;
        if world.objects.len() != objects.len() {
            return Err(SimError::InvalidInitialConfig);
        }
        Ok(Kitchen {
            eval,
            table,
            zones,
            world,
        })
    }

    pub fn sampled(
        g: &GroundedDomain,
        table: PrimitiveTable,
        cfg: &InitialConfig,
        rng: &mut Rng,
    ) -> Result<Kitchen, SimError> {
        let world = sample_initial(movable_objects(g).len(), cfg, rng)?;
        Kitchen::new(g, table, cfg.counter_zones, world)
    }

    pub fn objects(&self) -> &[String] {
        self.eval.objects()
    }

    pub fn table(&self) -> &PrimitiveTable {
        &self.table
    }

    /// Ground-truth logical state of the current world.
    pub fn truth(&self) -> LogicalState {
        self.eval.eval(&self.world)
    }

    pub fn start_primitive(&mut self, op: &GroundOperator, rng: &mut Rng) -> Result<PrimitiveState, SimError> {
        let spec = *self
            .table
            .specs
            .get(&op.primitive_binding)
            .ok_or_else(|| SimError::UnknownBinding(op.primitive_binding.clone()))?;
        let duration = rng.random_range(spec.min_ticks..=spec.max_ticks);
        let will_succeed = rng.random_bool(spec.success);
        let p = PrimitiveState::new(op, self.eval.objects(), &spec, duration, will_succeed, &self.world)?;
        Ok(p)
    }

    /// Advances `p` by one tick. The world changes only on the final tick,
    /// except for pull and push which move the drawer as they go. A
    /// completion succeeds iff the primitive was drawn to succeed and the
    /// operator's run condition still holds.
    pub fn tick(&mut self, p: &mut PrimitiveState, rng: &mut Rng) {
        if !p.is_running() {
            return;
        }
        p.ticks_remaining -= 1;
        let can_act = self.truth().satisfies(p.run_condition());
        if can_act {
            if let Some(ext) = p.drawer_progress() {
                self.world.drawer_extension = ext.clamp(0.0, 1.0);
            }
        }
        if p.ticks_remaining > 0 {
            self.world.arm_moving = p.moves_arm();
            return;
        }
        self.world.arm_moving = false;
        if p.will_succeed && can_act {
            let zones = self.zones;
            primitive::complete(p.motion, &mut self.world, |w| {
                *free_zones(w, zones).choose(rng).expect("a spare zone exists")
            });
            p.phase = Phase::Done;
        } else {
            p.phase = Phase::Failed;
        }
        debug_assert_eq!(self.world.check(), Ok(()));
    }

    /// Stops a primitive where it is.
    pub fn abort(&mut self, p: &mut PrimitiveState) {
        if p.is_running() {
            p.phase = Phase::Failed;
            p.ticks_remaining = 0;
        }
        self.world.arm_moving = false;
    }

    /// Releases whatever the gripper holds onto a surface below it.
    fn drop_held(&mut self, rng: &mut Rng) {
        if let Some(Target::Object(i)) = self.world.attached {
            let over_drawer = matches!(self.world.arm, ArmRegion::InDrawer | ArmRegion::OverDrawer);
            self.world.objects[i] = if over_drawer {
                ObjectPose::InDrawer
            } else {
                ObjectPose::Counter(
                    *free_zones(&self.world, self.zones)
                        .choose(rng)
                        .expect("a spare zone exists"),
                )
            };
        }
        if self.world.arm == ArmRegion::Lifted {
            self.world.arm = ArmRegion::AboveCounter;
        }
        self.world.attached = None;
        self.world.gripper_aperture = 1.0;
    }

    pub fn apply_disturbance(&mut self, kind: &DisturbanceKind, rng: &mut Rng) -> Result<(), SimError> {
        match kind {
            DisturbanceKind::TeleportObject { object, destination } => {
                let i = self
                    .objects()
                    .iter()
                    .position(|o| o == object)
                    .ok_or_else(|| SimError::UnknownObject(object.clone()))?;
                let current = self.world.objects[i];
                let pose = match *destination {
                    Destination::InDrawer => ObjectPose::InDrawer,
                    Destination::Counter(z) => {
                        let free = z < self.zones
                            && (current == ObjectPose::Counter(z) || free_zones(&self.world, self.zones).contains(&z));
                        if !free {
                            return Err(SimError::InvalidDestination(format!("counter zone {z}")));
                        }
                        ObjectPose::Counter(z)
                    }
                    Destination::CounterRandom => {
                        let free = free_zones(&self.world, self.zones);
                        ObjectPose::Counter(*free.choose(rng).expect("a spare zone exists"))
                    }
                };
                let target = Target::Object(i);
                if self.world.attached == Some(target) {
                    self.world.attached = None;
                    self.world.gripper_aperture = 1.0;
                    if self.world.arm == ArmRegion::Lifted {
                        self.world.arm = ArmRegion::AboveCounter;
                    }
                }
                if matches!(self.world.arm, ArmRegion::Approach(t) | ArmRegion::Around(t) if t == target) {
                    self.world.arm = ArmRegion::AboveCounter;
                }
                self.world.objects[i] = pose;
            }
            DisturbanceKind::SetDrawer { extension } => {
                if !(0.0..=1.0).contains(extension) {
                    return Err(SimError::InvalidDestination(format!("drawer extension {extension}")));
                }
                self.world.drawer_extension = *extension;
            }
            DisturbanceKind::DetachGripper => self.drop_held(rng),
        }
        debug_assert_eq!(self.world.check(), Ok(()));
        Ok(())
    }
}
