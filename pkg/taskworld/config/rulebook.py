"""
Oracle critic rulebook.
IF/THEN repair rules applied in order; the first rule whose trigger matches
the failed trace rewrites the flow. Strategies follow the two repair families:
sequence modification (insert/reorder actions) and parameter adjustment.
"""

SEQUENCE_MODIFICATION = "Sequence Modification"
PARAMETER_ADJUSTMENT = "Parameter Adjustment"

# Trigger keys:
#   flag       a critique flag present on some step
#   action_in  the flagged step's primitive must be one of these kinds
#   condition  a named trace condition checked by the critic
REPAIR_RULES = [
    {
        "id": "REPAIR-01",
        "name": "Sidestep the door swing",
        "trigger": {
            "flag": "DoorDisturbed",
            "action_in": ["MOVE_BASE_FORWARD", "MOVE_BASE_BACKWARD", "MOVE_BASE_LEFT", "MOVE_BASE_RIGHT"],
        },
        "strategy": SEQUENCE_MODIFICATION,
        "repair": {"sidestep": "MOVE_BASE_LEFT", "distance": 0.3, "grow": 0.15},
        "description": "A base move struck a swinging door; shift the base clear of its arc first.",
        "reason": (
            "In the previous attempt the robot struck the open door of {fixture} during {action}, "
            "causing it to swing shut partially. Adding '{sidestep} {distance}m' before advancing "
            "to clear the door swing path."
        ),
    },
    {
        "id": "REPAIR-02",
        "name": "Re-align after an empty grasp",
        "trigger": {"flag": "GraspEmpty", "action_in": ["GRASP"]},
        "strategy": SEQUENCE_MODIFICATION,
        "repair": {"realign": ["RETREAT", "APPROACH", "CONVERGE"]},
        "description": "The gripper closed on nothing; back off and re-approach before grasping again.",
        "reason": (
            "The gripper closed without securing {target} ({detail}). Inserting RETREAT, APPROACH and "
            "CONVERGE before GRASP to re-align the fingers with the grasp point."
        ),
    },
    {
        "id": "REPAIR-03",
        "name": "Close with more authority",
        "trigger": {"condition": "residual_open"},
        "strategy": PARAMETER_ADJUSTMENT,
        "repair": {"widen": 0.1, "push": 0.1},
        "description": "The close left the door ajar; extend the close range and push before releasing.",
        "reason": (
            "{fixture} remained partially open after ARTICULATE_CLOSE({lo}, {hi}). Extending the "
            "articulation range slightly beyond {hi} to ({lo}, {new_hi}) and adding "
            "'MOVE_EEF_FORWARD 0.1m' to seat the door before releasing the handle."
        ),
    },
    {
        "id": "REPAIR-04",
        "name": "Open further",
        "trigger": {"condition": "short_open"},
        "strategy": PARAMETER_ADJUSTMENT,
        "repair": {"widen": 0.1},
        "description": "The door stopped short of open; drive the joint further.",
        "reason": (
            "{fixture} did not open far enough with ARTICULATE_OPEN({lo}, {hi}). Raising the upper "
            "bound to {new_hi} so the door clears its open position."
        ),
    },
    {
        "id": "REPAIR-05",
        "name": "Reach deeper before release",
        "trigger": {"flag": "NotPlaced"},
        "strategy": PARAMETER_ADJUSTMENT,
        "repair": {"extend": 0.2, "lower": 0.3},
        "description": "The object was released short of its destination; reach further and lower it first.",
        "reason": (
            "{target} was released but did not end up {relation} {support}. Increasing "
            "MOVE_EEF_FORWARD to {reach}m and lowering the end effector by {lower}m before UNGRASP "
            "so the object is set down inside the target region."
        ),
    },
    {
        "id": "REPAIR-06",
        "name": "Re-align and retry",
        "trigger": {},
        "strategy": SEQUENCE_MODIFICATION,
        "repair": {"realign": ["RETREAT", "APPROACH", "CONVERGE"]},
        "description": "No specific cause identified; re-align the end effector before the first grasp.",
        "reason": (
            "The subtask goal was not reached and no single step explains the failure. Re-aligning "
            "the end effector with RETREAT, APPROACH and CONVERGE before retrying."
        ),
    },
]

# Inspector observation templates, keyed by the flag that dominates the step.
INSPECTOR_TEXTS = {
    "DoorDisturbed": "The robot makes contact with the door of {subject} during {action}, causing it to swing shut partially.",
    "Collision": "The robot collides with {subject} during {action} and stops short of the commanded motion.",
    "GraspEmpty": "The gripper closes but {subject} is not secured; the robot appears to be grasping air.",
    "NotPlaced": "The gripper opens and {subject} is released, but it does not come to rest {relation} {support}.",
    "NoProgress": "The robot executes {action} but the scene shows no visible change toward the goal.",
    "Ok": "The robot executes {action} as expected.",
}

# Precedence when several flags sit on one step.
FLAG_ORDER = ["DoorDisturbed", "Collision", "GraspEmpty", "NotPlaced", "NoProgress", "Ok"]
