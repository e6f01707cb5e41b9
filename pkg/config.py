"""Config file that is shared across the whole project."""
import math

# ========== Logging ==========
LOG_LEVEL = 'INFO'
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

# ========== Grid ==========
DEFAULT_POINTS_PER_SIDE = 128
DEFAULT_SIDE_LENGTH = 2 * math.pi * 8   # torus proxy for the whole plane
DEFAULT_DEALIAS_FRACTION = 2.0 / 3.0

# ========== Snapshot format ==========
# header: magic, version u32, N u32, L f64, t f64, alpha f64, field count u32,
#         crc8 of the payload u8, 23 reserved zero bytes  -> 64 bytes, little endian
SNAPSHOT_MAGIC = b'CHFL'
SNAPSHOT_VERSION = 1
SNAPSHOT_HEADER_FORMAT = '<4sIIdddIB23x'
SNAPSHOT_HEADER_LEN = 64
SNAPSHOT_FIELDS = ('n', 'c', 'u1', 'u2')
# an optional fifth field carries the potential phi
SNAPSHOT_POTENTIAL_FIELD = 'phi'
SNAPSHOT_SUFFIX = '.chfl'

# ========== Config file ==========
OFF = 'off'
PRESET_NAMES = ('blob', 'uniform', 'single-mode')
SCHEME_NAMES = ('euler', 'heun')

# key -> (kind, default, rule); default None marks a required key
# kinds: int, float, float_or_off, bool, str
CONFIG_SCHEMA = {
    'grid.N': ('int', DEFAULT_POINTS_PER_SIDE, 'even_at_least_4'),
    'grid.L': ('float', DEFAULT_SIDE_LENGTH, 'positive'),
    'grid.dealias_fraction': ('float', DEFAULT_DEALIAS_FRACTION, 'unit_interval'),
    'physics.alpha': ('float', 1.0, 'alpha'),
    'physics.g': ('float', 0.0, 'finite'),
    'regularization.eps': ('float_or_off', OFF, 'positive'),
    'regularization.k_band': ('float_or_off', OFF, 'positive'),
    'regularization.r_cut': ('float_or_off', OFF, 'positive'),
    'regularization.strict_annulus': ('bool', False, 'any'),
    'noise.k_modes': ('int', 1, 'at_least_1'),
    'noise.lambda': ('float', 0.0, 'nonnegative'),
    'noise.seed': ('int', 0, 'seed'),
    'noise.refinement': ('int', 1, 'at_least_1'),
    'solver.dt': ('float', None, 'positive'),
    'solver.t_end': ('float', None, 'nonnegative'),
    'solver.scheme': ('str', 'heun', 'scheme'),
    'solver.snapshot_every': ('int', 0, 'nonnegative'),
    'solver.diagnostics_every': ('int', 1, 'at_least_1'),
    'initial.preset': ('str', 'blob', 'preset'),
    'initial.snapshot': ('str', '', 'any'),
    'output.directory': ('str', 'output', 'nonempty'),
    'output.prefix': ('str', 'chemoflow', 'nonempty'),
    'coupling.perturbation': ('float', 1e-6, 'positive'),
    'coupling.mode': ('str', '1,1', 'mode'),
}

# ========== Exit codes ==========
EXIT_OK = 0
EXIT_INVARIANT_FAILURE = 1
EXIT_USAGE = 2
