use serde::{Deserialize, Serialize};

use super::SimError;
use crate::logic::{LogicalState, Vocabulary};

/// Aperture at or above which the gripper counts as open.
pub const OPEN_APERTURE: f64 = 0.9;
/// Aperture below which the gripper counts as closed; a grasp needs this.
pub const GRASP_APERTURE: f64 = 0.5;
/// Aperture of a gripper closed on a handle or object.
pub const HELD_APERTURE: f64 = 0.3;
pub const DRAWER_OPEN: f64 = 0.7;
pub const DRAWER_CLOSED: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Handle,
    Object(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmRegion {
    Driving,
    AboveCounter,
    Approach(Target),
    Around(Target),
    NearHandle,
    FrontOfDrawer,
    /// Holding an object clear of the counter.
    Lifted,
    OverDrawer,
    InDrawer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectPose {
    Counter(usize),
    Held,
    InDrawer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub arm: ArmRegion,
    pub gripper_aperture: f64,
    /// What the gripper holds, if anything.
    pub attached: Option<Target>,
    pub drawer_extension: f64,
    pub objects: Vec<ObjectPose>,
    pub arm_moving: bool,
}

impl WorldState {
    pub fn holding(&self, i: usize) -> bool {
        self.attached == Some(Target::Object(i))
    }

    pub fn drawer_open(&self) -> bool {
        self.drawer_extension >= DRAWER_OPEN
    }

    pub fn drawer_closed(&self) -> bool {
        self.drawer_extension <= DRAWER_CLOSED
    }

    /// Checks the physical invariants; used by tests and debug assertions.
    pub fn check(&self) -> Result<(), String> {
        if let Some(t) = self.attached {
            if self.gripper_aperture >= GRASP_APERTURE {
                return Err(format!("attached to {t:?} with open gripper"));
            }
        }
        for (i, pose) in self.objects.iter().enumerate() {
            if (*pose == ObjectPose::Held) != self.holding(i) {
                return Err(format!("object {i} pose {pose:?} disagrees with attachment"));
            }
        }
        let zones: Vec<usize> = self
            .objects
            .iter()
            .filter_map(|p| match p {
                ObjectPose::Counter(z) => Some(*z),
                _ => None,
            })
            .collect();
        for (i, z) in zones.iter().enumerate() {
            if zones[i + 1..].contains(z) {
                return Err(format!("two objects share counter zone {z}"));
            }
        }
        if !(0.0..=1.0).contains(&self.drawer_extension) || !(0.0..=1.0).contains(&self.gripper_aperture) {
            return Err("fraction out of range".into());
        }
        Ok(())
    }
}

/// A kitchen predicate with its argument resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pred {
    ArmAboveCounter,
    ArmAroundHandleLoose,
    ArmAround(Target),
    ArmFree,
    ArmMoving,
    ArmNearHandle,
    ArmAttachedTo(Target),
    ArmInApproach(Target),
    ArmDriving,
    ArmFrontOfDrawer,
    ArmAttached,
    HandleAttached,
    ObjAttached(usize),
    ArmClearAboveCounter,
    ObjClearAboveCounter(usize),
    ArmInDrawer,
    ObjInDrawer(usize),
    ArmOverDrawer,
    ObjOverDrawer(usize),
    DrawerOpenDetached,
    DrawerOpen,
    DrawerClosed,
    GripperOpen,
    GripperClosed,
    ObjOnCounter(usize),
    ObjDetected(Target),
    ObjTracked(Target),
}

/// The map from world state to logical state, compiled against one
/// vocabulary.
#[derive(Debug, Clone)]
pub struct Evaluator {
    preds: Vec<Pred>,
    objects: Vec<String>,
}

impl Evaluator {
    /// `objects` are the movable object symbols, indexed as in
    /// [`WorldState::objects`].
    pub fn new(vocab: &Vocabulary, objects: &[String]) -> Result<Evaluator, SimError> {
        let target = |sym: &str| -> Result<Target, SimError> {
            if sym == "handle" {
                Ok(Target::Handle)
            } else {
                objects
                    .iter()
                    .position(|o| o == sym)
                    .map(Target::Object)
                    .ok_or_else(|| SimError::UnknownObject(sym.to_string()))
            }
        };
        let object = |sym: &str| -> Result<usize, SimError> {
            match target(sym)? {
                Target::Object(i) => Ok(i),
                Target::Handle => Err(SimError::UnknownObject(sym.to_string())),
            }
        };
        let mut preds = Vec::with_capacity(vocab.len());
        for atom in vocab.atoms() {
            let arg = || atom.args.first().map(String::as_str).unwrap_or("");
            use Pred::*;
            let p = match atom.predicate.as_str() {
                "arm_is_above_counter" => ArmAboveCounter,
                "arm_is_around_handle_loose" => ArmAroundHandleLoose,
                "arm_is_around" => ArmAround(target(arg())?),
                "arm_is_free" => ArmFree,
                "arm_is_moving" => ArmMoving,
                "arm_is_near_handle" => ArmNearHandle,
                "arm_is_attached_to_obj" => ArmAttachedTo(target(arg())?),
                "arm_in_approach_region" => ArmInApproach(target(arg())?),
                "arm_in_driving_posture" => ArmDriving,
                "arm_in_front_of_drawer" => ArmFrontOfDrawer,
                "arm_is_attached" => ArmAttached,
                "handle_is_attached" => HandleAttached,
                "obj_is_attached" => ObjAttached(object(arg())?),
                "arm_is_clear_above_counter" => ArmClearAboveCounter,
                "obj_is_clear_above_counter" => ObjClearAboveCounter(object(arg())?),
                "arm_is_in_drawer" => ArmInDrawer,
                "obj_is_in_drawer" => ObjInDrawer(object(arg())?),
                "arm_is_over_drawer" => ArmOverDrawer,
                "obj_is_over_drawer" => ObjOverDrawer(object(arg())?),
                "drawer_is_open_and_detached" => DrawerOpenDetached,
                "drawer_is_open" => DrawerOpen,
                "drawer_is_closed" => DrawerClosed,
                "gripper_is_open" => GripperOpen,
                "gripper_is_closed" => GripperClosed,
                "obj_is_on_counter" => ObjOnCounter(object(arg())?),
                "obj_is_detected" => ObjDetected(target(arg())?),
                "obj_is_tracked" => ObjTracked(target(arg())?),
                other => return Err(SimError::UnknownPredicate(other.to_string())),
            };
            preds.push(p);
        }
        Ok(Evaluator {
            preds,
            objects: objects.to_vec(),
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn vocab_len(&self) -> usize {
        self.preds.len()
    }

    pub fn eval(&self, w: &WorldState) -> LogicalState {
        let mut out = LogicalState::empty(self.preds.len());
        for (id, p) in self.preds.iter().enumerate() {
            if holds(*p, w) {
                out.insert(id);
            }
        }
        out
    }
}

fn holds(p: Pred, w: &WorldState) -> bool {
    use ArmRegion as R;
    use Pred::*;
    let held_at = |i: usize, region: R| w.holding(i) && w.arm == region;
    match p {
        ArmAboveCounter => matches!(
            w.arm,
            R::AboveCounter | R::Approach(Target::Object(_)) | R::Around(Target::Object(_)) | R::Lifted
        ),
        ArmAroundHandleLoose => w.arm == R::Around(Target::Handle) && w.attached != Some(Target::Handle),
        ArmAround(t) => w.arm == R::Around(t),
        ArmFree => w.attached.is_none(),
        ArmMoving => w.arm_moving,
        ArmNearHandle => w.arm == R::NearHandle,
        ArmAttachedTo(t) => w.attached == Some(t),
        ArmInApproach(t) => w.arm == R::Approach(t),
        ArmDriving => w.arm == R::Driving,
        ArmFrontOfDrawer => w.arm == R::FrontOfDrawer,
        ArmAttached => w.attached.is_some(),
        HandleAttached => w.attached == Some(Target::Handle),
        ObjAttached(i) => w.holding(i),
        ArmClearAboveCounter => !matches!(w.arm, R::Approach(Target::Object(_)) | R::Around(Target::Object(_))),
        ObjClearAboveCounter(i) => held_at(i, R::Lifted) || held_at(i, R::OverDrawer),
        ArmInDrawer => w.arm == R::InDrawer,
        ObjInDrawer(i) => w.objects[i] == ObjectPose::InDrawer || held_at(i, R::InDrawer),
        ArmOverDrawer => w.arm == R::OverDrawer,
        ObjOverDrawer(i) => held_at(i, R::OverDrawer),
        DrawerOpenDetached => w.drawer_open() && w.attached != Some(Target::Handle),
        DrawerOpen => w.drawer_open(),
        DrawerClosed => w.drawer_closed(),
        GripperOpen => w.gripper_aperture >= OPEN_APERTURE,
        GripperClosed => w.gripper_aperture < GRASP_APERTURE,
        ObjOnCounter(i) => matches!(w.objects[i], ObjectPose::Counter(_)),
        ObjDetected(Target::Handle) => true,
        // a closed drawer hides what is inside it
        ObjDetected(Target::Object(i)) => !(w.objects[i] == ObjectPose::InDrawer && w.drawer_closed()),
        ObjTracked(t) => matches!(w.arm, R::Approach(x) | R::Around(x) if x == t) || w.attached == Some(t),
    }
}
