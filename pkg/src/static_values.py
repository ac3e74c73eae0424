"""Frozen constants: domain definitions, catalogs and file magics."""

# --- skirmish (multi-agent behavior-tree battle) ---
SKIRMISH_WIDTH = 32
SKIRMISH_HEIGHT = 32
SKIRMISH_UNITS_PER_SIDE = 8
SKIRMISH_MAX_STEPS = 64
SKIRMISH_DUEL_SEED = 0
SKIRMISH_SIGHT = 8

MELEE_DAMAGE = 2
MELEE_RANGE = 1
MELEE_HEALTH = 8
RANGED_DAMAGE = 1
RANGED_RANGE = 5
RANGED_HEALTH = 4

# frame intensities; ranged units drawn a shade lighter
RED_INTENSITY = 0.33
BLUE_INTENSITY = 0.66
RANGED_SHADE = 0.12

BT_MAX_LEAVES = 32
BT_RANDOM_MAX_DEPTH = 3
BT_RANDOM_MAX_LEAVES = 8
BT_REDRAWS = 10

# operator -> probability
BT_OPERATOR_PROBABILITIES = {
    "delete": 0.35,
    "add": 0.21,
    "mutate": 0.07,
    "replace": 0.07,
    "crossover": 0.30,
}

TARGETS = ("closest", "farthest", "weakest", "random")
FACTIONS = ("ally", "enemy")
UNIT_FILTERS = ("any", "melee", "ranged")
UNIT_TYPES = ("melee", "ranged")
DIRECTIONS = ("toward", "away")
GOTO_THRESHOLDS = ("0", "25", "50", "75", "100")
DYING_SUBJECTS = ("self", "ally", "enemy")
DYING_THRESHOLDS = ("25", "50", "75")

# atomic -> parameter domains, in s-expression order
ACTION_CATALOG = {
    "stand": (),
    "attack": (TARGETS, UNIT_FILTERS),
    "move": (DIRECTIONS, FACTIONS, TARGETS, UNIT_FILTERS),
    "goto": (GOTO_THRESHOLDS,),
    "set_target": (FACTIONS, TARGETS, UNIT_FILTERS),
}
CONDITION_CATALOG = {
    "in_sight": (FACTIONS, UNIT_FILTERS),
    "in_reach": (FACTIONS, UNIT_FILTERS),
    "is_dying": (DYING_SUBJECTS, DYING_THRESHOLDS),
    "is_type": (UNIT_TYPES,),
    "is_set_target": (),
}

# action categories recorded in traces (entropy is computed over these)
ACTION_CATEGORIES = ("stand", "attack", "move", "goto", "set_target")

# --- pusher (relative-fitness wrestling on a line) ---
PUSHER_ARENA_WIDTH = 30
PUSHER_GENOME_LENGTH = 9
PUSHER_MAX_STEPS = 200
PUSHER_PERIOD = 12
PUSHER_AMPLITUDE = 1.0
PUSHER_FRAME_HEIGHT = 8
PUSHER_MUTATIONS = 3
PUSHER_REDRAWS = 10

EMPTY, RIGID, SOFT = 0, 1, 2
H_IN_PHASE, V_IN_PHASE, H_ANTI_PHASE, V_ANTI_PHASE = 3, 4, 5, 6
VOXEL_TYPES = 7
RIGID_MASS = 2.0
# cell value -> frame intensity
VOXEL_INTENSITY = {RIGID: 1.0, SOFT: 0.4, H_IN_PHASE: 0.7, V_IN_PHASE: 0.8, H_ANTI_PHASE: 0.55, V_ANTI_PHASE: 0.9}

# --- behavior descriptors ---
DEFAULT_POOL_SIZE = 8
DEFAULT_NUM_FRAMES = 5
DEFAULT_POSITION_TIMESTEPS = 4

# --- analysis ---
ELO_INITIAL = 1000.0
ELO_K = 32.0
ELO_EPOCHS = 10
PCA_TOLERANCE = 1e-10
PCA_MAX_ITERATIONS = 1000
GRID_SIZE = 100
KMEANS_MAX_ITERATIONS = 100

# --- storage ---
MANIFEST_SCHEMA_VERSION = 1
SNAPSHOT_MAGIC = b"GSNP"
SNAPSHOT_VERSION = 1
TRACE_MAGIC = b"GTRC"
TRACE_VERSION = 1
TOURNAMENT_MAGIC = b"GTRN"
TOURNAMENT_VERSION = 1
EMBEDDING_MAGIC = b"GEMB"
EMBEDDING_VERSION = 1
COMPLETE_MARKER = "COMPLETE"
