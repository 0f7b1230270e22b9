use serde::{Deserialize, Serialize};

/// Primitive agent actions understood by the simulator.
///
/// Serialized with an `act` tag so demonstration files stay readable:
/// `{"act":"drop","obj":"milk-carton","dest":"fridge"}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "act", rename_all = "kebab-case")]
pub enum Action {
    /// Walk to the approach point of an object.
    MoveTo { target: String },
    /// Grasp a movable object with the gripper.
    Pick { target: String },
    /// Release the held object onto or into a destination.
    Drop { obj: String, dest: String },
    /// Shove an object toward the agent along the floor.
    Push { obj: String },
    ClimbUp { target: String },
    ClimbDown,
    Open { target: String },
    Close { target: String },
    SwitchOn { target: String },
    SwitchOff { target: String },
    /// Use the held powered tool on whatever it applies to nearby.
    Operate { tool: String },
    /// Clean a dirty object with the held cleaning agent.
    Clean { target: String },
    /// Dispense or attach the held material onto a target.
    ReleaseOn { material: String, target: String },
    /// Press the held object against a target until it takes: sticky
    /// attachment, hammering a fastener, or seating a part on one.
    PushUntilForce { target: String },
}

impl Action {
    /// Simulation cost used for plan ranking. Locomotion dominates, so a
    /// carrier that saves trips beats repeated hand carries.
    pub fn cost(&self) -> u32 {
        match self {
            Action::MoveTo { .. } => 4,
            Action::Push { .. } => 2,
            Action::ClimbUp { .. } | Action::ClimbDown => 2,
            Action::Pick { .. } | Action::Drop { .. } => 1,
            Action::Open { .. } | Action::Close { .. } => 1,
            Action::SwitchOn { .. } | Action::SwitchOff { .. } => 1,
            Action::Operate { .. } => 2,
            Action::Clean { .. } => 2,
            Action::ReleaseOn { .. } => 1,
            Action::PushUntilForce { .. } => 2,
        }
    }

    /// Every object id the action mentions, in field order.
    pub fn args(&self) -> Vec<&str> {
        match self {
            Action::MoveTo { target }
            | Action::Pick { target }
            | Action::Push { obj: target }
            | Action::ClimbUp { target }
            | Action::Open { target }
            | Action::Close { target }
            | Action::SwitchOn { target }
            | Action::SwitchOff { target }
            | Action::Operate { tool: target }
            | Action::Clean { target }
            | Action::PushUntilForce { target } => vec![target],
            Action::Drop { obj, dest } => vec![obj, dest],
            Action::ReleaseOn { material, target } => vec![material, target],
            Action::ClimbDown => vec![],
        }
    }

    /// Short name used in traces and error messages.
    pub fn name(&self) -> &'static str {
        match self {
            Action::MoveTo { .. } => "move-to",
            Action::Pick { .. } => "pick",
            Action::Drop { .. } => "drop",
            Action::Push { .. } => "push",
            Action::ClimbUp { .. } => "climb-up",
            Action::ClimbDown => "climb-down",
            Action::Open { .. } => "open",
            Action::Close { .. } => "close",
            Action::SwitchOn { .. } => "switch-on",
            Action::SwitchOff { .. } => "switch-off",
            Action::Operate { .. } => "operate",
            Action::Clean { .. } => "clean",
            Action::ReleaseOn { .. } => "release-on",
            Action::PushUntilForce { .. } => "push-until-force",
        }
    }
}

/// Total plan cost under the simulator's cost table.
pub fn plan_cost(plan: &[Action]) -> u32 {
    plan.iter().map(Action::cost).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actions_round_trip_through_json() {
        let actions = vec![
            Action::MoveTo { target: "fridge".into() },
            Action::Pick { target: "milk-carton".into() },
            Action::Drop { obj: "milk-carton".into(), dest: "fridge".into() },
            Action::ClimbDown,
            Action::ReleaseOn { material: "glue".into(), target: "paper".into() },
        ];
        for a in &actions {
            let json = serde_json::to_string(a).unwrap();
            let back: Action = serde_json::from_str(&json).unwrap();
            assert_eq!(*a, back);
        }
        assert_eq!(
            serde_json::to_string(&actions[0]).unwrap(),
            r#"{"act":"move-to","target":"fridge"}"#
        );
    }

    #[test]
    fn locomotion_costs_more_than_manipulation() {
        let fetch = vec![
            Action::MoveTo { target: "tray".into() },
            Action::Pick { target: "tray".into() },
        ];
        assert_eq!(plan_cost(&fetch), 5);
        assert!(Action::MoveTo { target: "x".into() }.cost() > Action::Pick { target: "x".into() }.cost());
    }
}
