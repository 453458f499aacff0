"""
Engine defaults.
Robot dimensions, micro-simulator geometry constants, object taxonomy and
keyword vocabulary. Everything tunable lives here so the simulator, the
planners and the critics agree on one set of numbers.
"""

# ─── Robot ────────────────────────────────────────────────────────────────────

ROBOT_SCALE = 0.7
GRIPPER_MAX_WIDTH = 0.06          # m, widest graspable d_min
IDEAL_GRASP_WIDTH = 0.05          # m, target d_min after scaling
CONVERGE_OFFSET_FACTOR = 0.14     # converge_offset = factor × scale
STANDOFF_FACTOR = 0.8             # base standoff = factor × scale from the nearest face
CARRY_FORWARD_FACTOR = 0.5        # carry pose forward offset = factor × scale
CARRY_HEIGHT = 1.0                # m above the floor
BASE_FOOTPRINT = (0.36, 0.36)     # m (length along heading, width)
BASE_HEIGHT = 0.4                 # m, collision height of the mobile base
EEF_REACH = 0.9                   # m, horizontal reach from the base centre
EEF_MIN_FORWARD = 0.1             # m, the arm never folds behind the base
EEF_MIN_HEIGHT = 0.05
EEF_MAX_HEIGHT = 1.9
EEF_SIZE = 0.03                   # m, side of the wrist collision cube

# ─── Manipulation ─────────────────────────────────────────────────────────────

APPROACH_OFFSET = 0.25            # m before the grasp point
GRASP_TOLERANCE = 0.06            # m, horizontal tool-point error accepted by GRASP
GRASP_VERTICAL_TOLERANCE = 0.05   # m, vertical error accepted on top of half the object height
DROP_EVENT_HEIGHT = 0.05          # m of free fall before ObjectDropped is reported

# ─── Geometry ─────────────────────────────────────────────────────────────────

EPSILON_Z = 0.01                  # m, OnTop contact tolerance
GEOMETRY_EPS = 1e-6
FIXTURE_WALL = 0.02               # m, default interior wall of articulated fixtures
CONTAINER_FLOOR = 0.02            # m, floor thickness of open-top containers
SWEEP_STEP = 0.01                 # m between collision samples
SWEEP_TURN_STEP_DEG = 2.0         # degrees between collision samples
MAX_DISTANCE_PARAM = 20.0         # m, largest |distance| a primitive accepts
MAX_ANGLE_PARAM = 360.0           # degrees, largest |angle| a primitive accepts

# ─── Articulation ─────────────────────────────────────────────────────────────

DOOR_DISTURBANCE_DELTA = 0.5      # fraction lost when the robot hits a swinging part
CLOSE_AUTHORITY_MARGIN = 0.1      # close needs max ≥ open_threshold + margin for full authority
DEFAULT_CLOSE_RANGE: tuple[float, float] = (0.0, 0.5)

# ─── Object Taxonomy ──────────────────────────────────────────────────────────

FIXTURE_CATEGORIES = frozenset({
    "refrigerator", "cabinet", "microwave", "oven", "drawer", "dishwasher", "table",
    "counter", "shelf", "sink",
})

MANIPULABLE_CATEGORIES = frozenset({
    "cup", "glass", "apple", "bottle", "box", "bowl", "knife", "plate", "mug", "banana",
    "orange", "can", "spoon", "fork", "basket", "pot", "pan", "book",
})

# Open-top items whose interior can receive another object.
CONTAINER_CATEGORIES = frozenset({"bowl", "box", "basket", "pot", "pan", "mug", "cup"})

# ─── Keyword Vocabulary ───────────────────────────────────────────────────────

CATEGORY_SYNONYMS: dict[str, str] = {
    "fridge": "refrigerator",
    "freezer": "refrigerator",
    "cupboard": "cabinet",
    "countertop": "cabinet",
    "desk": "table",
    "tumbler": "glass",
    "water_glass": "glass",
    "mixing_bowl": "bowl",
}

# Category that stands in when the named one is absent from the scene.
CATEGORY_FALLBACKS: dict[str, str] = {
    "cup": "glass",
    "glass": "cup",
}

# ─── Scale Rounding ───────────────────────────────────────────────────────────

SCALE_DECIMALS = 2
SCALE_GRID = 0.05

# ─── Graph / Evolution ────────────────────────────────────────────────────────

DEFAULT_MAX_STEPS = 32
DEFAULT_TAU_MAX = 5
DEFAULT_P1 = 1
DEFAULT_P2 = 1
MAX_FRAMES_PER_ACTION = 6
