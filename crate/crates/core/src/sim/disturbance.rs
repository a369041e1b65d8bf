use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Trigger {
    AtTick(u32),
    /// Fires while the named operator's primitive is still running after a
    /// tick. A bare schema name such as `cage_obj` matches any arguments.
    WhenOperator(String),
    /// Fires once the atom, e.g. `obj_is_in_drawer(spam)`, is true.
    WhenPredicate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Destination {
    /// A random free counter zone other than the object's current one.
    CounterRandom,
    Counter(usize),
    InDrawer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceKind {
    TeleportObject { object: String, destination: Destination },
    SetDrawer { extension: f64 },
    DetachGripper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disturbance {
    pub trigger: Trigger,
    pub kind: DisturbanceKind,
}

impl Trigger {
    pub fn matches_operator(&self, name: &str, schema: &str) -> bool {
        match self {
            Trigger::WhenOperator(t) if t.contains('(') => t == name,
            Trigger::WhenOperator(t) => t == schema,
            _ => false,
        }
    }
}

impl std::fmt::Display for DisturbanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DisturbanceKind::TeleportObject { object, destination } => {
                let to = match destination {
                    Destination::CounterRandom => "counter_random".to_string(),
                    Destination::Counter(z) => format!("counter({z})"),
                    Destination::InDrawer => "in_drawer".to_string(),
                };
                write!(f, "teleport_object({object},{to})")
            }
            DisturbanceKind::SetDrawer { extension } => write!(f, "set_drawer({extension})"),
            DisturbanceKind::DetachGripper => write!(f, "detach_gripper"),
        }
    }
}
