"""
Primitive action library.
The single source of truth for the 21 atomic primitives: wire IDs used by the
`new_sequence` codec, parameter shapes, tick durations and context needs.
"""

# Bump whenever an ID or a parameter shape changes; written into every
# exported trace and evolution log header.
PRIMITIVE_TABLE_VERSION = "1.0"

# ─── Parameter Shapes ─────────────────────────────────────────────────────────

SHAPE_NONE = "none"          # context-aware, takes no parameter
SHAPE_DISTANCE = "distance"  # scalar meters
SHAPE_ANGLE = "angle"        # scalar degrees
SHAPE_RANGE = "range"        # [min, max] in [0, 1]², or the default sentinel

# ─── Context Requirements ─────────────────────────────────────────────────────

NEEDS_TARGET = "target"
NEEDS_SUPPORT = "support_goal"

# ─── Primitive Table ──────────────────────────────────────────────────────────
# "anchored" marks IDs observed in reference `new_sequence` logs; the rest are
# inferred from the library's ordering and may diverge from other numberings.

PRIMITIVE_TABLE: dict[str, dict] = {
    "APPROACH": {
        "id": 1, "shape": SHAPE_NONE, "ticks": 4, "needs": NEEDS_TARGET, "anchored": True,
        "description": "Move the EEF to a pre-grasp pose in front of the grasp point.",
    },
    "CONVERGE": {
        "id": 2, "shape": SHAPE_NONE, "ticks": 4, "needs": NEEDS_TARGET, "anchored": True,
        "description": "Finely align the EEF so the fingertips reach the grasp point.",
    },
    "GRASP": {
        "id": 3, "shape": SHAPE_NONE, "ticks": 2, "needs": NEEDS_TARGET, "anchored": True,
        "description": "Close the gripper to seize the target object or handle.",
    },
    "RETREAT": {
        "id": 4, "shape": SHAPE_NONE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Withdraw the EEF to the carry pose.",
    },
    "UNGRASP": {
        "id": 5, "shape": SHAPE_NONE, "ticks": 2, "needs": None, "anchored": True,
        "description": "Open the gripper and release whatever it holds.",
    },
    "LIFT_EEF_UP": {
        "id": 7, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Raise the EEF vertically.",
    },
    "LIFT_EEF_DOWN": {
        "id": 8, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": True,
        "description": "Lower the EEF vertically.",
    },
    "MOVE_EEF_FORWARD": {
        "id": 9, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": True,
        "description": "Extend the EEF along the base heading.",
    },
    "MOVE_EEF_BACKWARD": {
        "id": 10, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Retract the EEF along the base heading.",
    },
    "MOVE_EEF_LEFT": {
        "id": 11, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Shift the EEF to the left of the base.",
    },
    "MOVE_EEF_RIGHT": {
        "id": 12, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Shift the EEF to the right of the base.",
    },
    "MOVE_BASE_FORWARD": {
        "id": 13, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": True,
        "description": "Drive the base forward along its heading.",
    },
    "MOVE_BASE_BACKWARD": {
        "id": 14, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Drive the base backward along its heading.",
    },
    "MOVE_BASE_LEFT": {
        "id": 15, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": True,
        "description": "Strafe the base to its left.",
    },
    "MOVE_BASE_RIGHT": {
        "id": 16, "shape": SHAPE_DISTANCE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Strafe the base to its right.",
    },
    "NAVIGATE_TO_TARGET": {
        "id": 17, "shape": SHAPE_NONE, "ticks": 5, "needs": NEEDS_TARGET, "anchored": True,
        "description": "Plan a collision-free path to the standoff pose of the target object.",
    },
    "NAVIGATE_TO_SUPPORT": {
        "id": 18, "shape": SHAPE_NONE, "ticks": 5, "needs": NEEDS_SUPPORT, "anchored": True,
        "description": "Plan a collision-free path to the standoff pose of the goal support.",
    },
    "ARTICULATE_CLOSE": {
        "id": 19, "shape": SHAPE_RANGE, "ticks": 6, "needs": None, "anchored": True,
        "description": "Drive the grasped joint toward the low end of the commanded range.",
    },
    "ARTICULATE_OPEN": {
        "id": 20, "shape": SHAPE_RANGE, "ticks": 6, "needs": None, "anchored": False,
        "description": "Drive the grasped joint toward the high end of the commanded range.",
    },
    "TURN_BASE_LEFT": {
        "id": 21, "shape": SHAPE_ANGLE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Rotate the base counter-clockwise in place.",
    },
    "TURN_BASE_RIGHT": {
        "id": 22, "shape": SHAPE_ANGLE, "ticks": 4, "needs": None, "anchored": False,
        "description": "Rotate the base clockwise in place.",
    },
}

# ID 6 is held back so the reference numbering keeps its gap.
RESERVED_IDS = frozenset({6})

# Commanded range used when an articulate action carries the default sentinel.
DEFAULT_ARTICULATION_RANGE: tuple[float, float] = (0.0, 1.0)

WIRE_ID_TO_KIND: dict[int, str] = {spec["id"]: kind for kind, spec in PRIMITIVE_TABLE.items()}
