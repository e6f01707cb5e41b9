"""Smooth cutoff theta_R used to tame the nonlinear terms."""
import math

import Utils
from Utils.errors import ParameterError


def theta_cutoff(x, R):
    """Evaluate theta_R(x) = s((2R - x) / R).

    theta_R is C-infinity, equal to 1 on [0, R], 0 on [2R, inf) and nonincreasing. R = None
    or R = inf switches the cutoff off (theta = 1).

    Args:
        x (float): nonnegative argument, usually ||u||_{W^{1,inf}}
        R (float or None): cutoff radius

    Returns:
        float: value in [0, 1]
    """
    if R is None or R == math.inf:
        return 1.0
    if not R > 0:
        raise ParameterError('cutoff radius R must be positive, got {!r}'.format(R))
    if x < 0:
        raise ParameterError('cutoff argument must be nonnegative, got {!r}'.format(x))
    return Utils.smooth_transition((2.0 * R - x) / R)
