import os

DEFAULT_REL_TOL = 1e-9
DEFAULT_MAX_SUBDIVISIONS = 2 ** 14
DEFAULT_LOG_LEVEL = "WARNING"

REL_TOL = float(os.environ.get('LPBERNSTEIN_REL_TOL', DEFAULT_REL_TOL))

MAX_SUBDIVISIONS = int(os.environ.get('LPBERNSTEIN_MAX_SUBDIVISIONS',
                                      DEFAULT_MAX_SUBDIVISIONS))

LOG_LEVEL = os.environ.get('LPBERNSTEIN_LOG_LEVEL', DEFAULT_LOG_LEVEL)

# Collocation basis degrees tried in order before giving up.
COLLOCATION_DEGREES = (16, 32, 64)

COLLOCATION_RESIDUAL = 1e-7

# Angle tolerance for root polishing in sup norms and T-set construction.
ANGLE_TOL = 1e-12
