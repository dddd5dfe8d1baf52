"""Constants for the kleinsim simulator."""

from math import pi

DOMAIN = "kleinsim"

# Physical defaults (SI)
DEFAULT_WAVELENGTH_NM = 783.0
RB87_MASS_U = 86.909180531

# Lattice defaults (E_r, rad)
DEFAULT_V1 = 5.0
DEFAULT_V2 = 1.6
DEFAULT_PHI = pi

# Barrier and packet defaults
DEFAULT_BARRIER_HEIGHT = 5.0
DEFAULT_W0_UM = 23.0
DEFAULT_Q0 = 0.9
DEFAULT_MOMENTUM_WIDTH = 0.05
DEFAULT_TOTAL_TIME_MS = 5.0
DEFAULT_DETECT_OFFSET_W0 = 0.5
DEFAULT_FALL_OFFSET = 0.0

# Numerics
DEFAULT_N_CUT = 16
DEFAULT_FIT_HALFWIDTH = 0.2
CROSSING_SCAN_POINTS = 2001
CROSSING_XTOL = 1e-6
FIT_SAMPLES = 41
FIT_RESIDUAL_MAX = 0.05
GAP_DIVERGENCE = 1e-9

DEFAULT_Z_MIN = -600.0
DEFAULT_Z_MAX = 1000.0
DEFAULT_DIRAC_POINTS = 2**14
DEFAULT_SCHRODINGER_POINTS = 2**16
DEFAULT_DIRAC_DT = 5e-4
DEFAULT_SCHRODINGER_DT = 5e-4
MIN_GRID_POINTS = 256
POINTS_PER_SIGMA = 8

ACCURACY_BOUND = 0.1
NORM_DRIFT_MAX = 1e-6
ABSORBER_FRACTION = 0.1
ABSORBER_STRENGTH = 5.0
COMPLETENESS_WARN = 1e-2

BARRIER_V0_MAX = 1e4

# Sweeps
DEFAULT_PHI_POINTS = 41
DEFAULT_VB_POINTS = 26
DEFAULT_VB_MAX = 10.0
DEFAULT_WORKERS = 1

# Engines
ENGINE_DIRAC = "dirac"
ENGINE_SCHRODINGER = "schrodinger"
ENGINES = (ENGINE_DIRAC, ENGINE_SCHRODINGER)

# Configuration keys
CONF_V1 = "v1_Er"
CONF_V2 = "v2_Er"
CONF_PHI = "phi_rad"
CONF_WAVELENGTH = "wavelength_nm"
CONF_ATOM_MASS = "atom_mass_kg"
CONF_GRAVITY = "gravity_m_s2"
CONF_BARRIER_HEIGHT = "barrier_height_Er"
CONF_W0 = "w0"
CONF_Q0 = "q0"
CONF_SIGMA_Z = "sigma_z"
CONF_TOTAL_TIME = "total_time"
CONF_ENGINE = "engine"
CONF_DT = "dt"
CONF_N_POINTS = "n_points"
CONF_Z_MIN = "z_min"
CONF_Z_MAX = "z_max"
CONF_N_CUT = "n_cut"
CONF_FIT_HALFWIDTH = "fit_halfwidth"
CONF_ABSORBER = "absorber"
CONF_LOAD_BAND = "load_band"
CONF_DETECT_OFFSET = "detect_offset_w0"
CONF_FALL_OFFSET = "fall_offset"
CONF_WORKERS = "workers"
CONF_PHI_POINTS = "phi_points"
CONF_VB_POINTS = "vb_points"
CONF_VB_MAX = "vb_max_Er"

CONF_N_CUT_MIN = 2
CONF_N_CUT_MAX = 64
CONF_WORKERS_MAX = 64

# Unit suffixes accepted on dimensional keys
SUFFIX_UM = "_um"
SUFFIX_MS = "_ms"

# Output file names
RESOLVED_CONFIG_FILE = "resolved_config.txt"
DIAGNOSTICS_FILE = "diagnostics.json"

# Snapshot magic bytes
DIRAC_MAGIC = b"QKT1"
SCHRODINGER_MAGIC = b"QKS1"

# Exit codes
EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_CONFIG = 2
EXIT_INVALID_PARAMETER = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5
