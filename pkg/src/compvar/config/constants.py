"""Fixed constants for compvar."""

# System exit codes
EXIT_CODE_OK = 0
EXIT_CODE_TOLERANCE = 1
EXIT_CODE_SCHEMA = 2
EXIT_CODE_EVALUATION = 3
EXIT_CODE_KEYBOARD_INTERRUPT = 130

# Machine report formatting
MACHINE_SIGNIFICANT_DIGITS = 15
REAL_FORMAT = f".{MACHINE_SIGNIFICANT_DIGITS}g"

# Variables of a compositional Lagrangian, in argument order
COMPOSITIONAL_VARIABLES = ("x", "q", "qd", "z")

# Variables a symmetry generator may depend on
GENERATOR_VARIABLES = ("x", "q")

# Bisection iteration cap for nonlinear preimages (2^-200 of any double interval)
MAX_BISECTION_STEPS = 200

# Collocation rows per unknown required by find_symmetries
COLLOCATION_ROWS_PER_UNKNOWN = 2

# Minimum number of residual samples accepted by a scan
MIN_SCAN_SAMPLES = 10

# Pieces with fewer valid conservation samples are flagged
MIN_PIECE_SAMPLES = 3
