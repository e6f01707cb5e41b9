"""Host commonly used utils functions."""
import os

import numpy as np
from scipy import stats


def fft_workers():
    """Return the number of FFT worker threads.

    The CHEMOFLOW_THREADS environment variable caps internal data parallelism.

    Returns:
        int: worker count passed to scipy.fft (at least 1)
    """
    raw = os.environ.get('CHEMOFLOW_THREADS')
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def smooth_transition(x):
    """Evaluate the C-infinity step built on exp(-1/x).

    s(x) = h(x) / (h(x) + h(1 - x)) with h(x) = exp(-1/x) for x > 0 and 0 otherwise,
    so s = 0 for x <= 0, s = 1 for x >= 1, and s(1/2) = 1/2.

    Args:
        x (float or np.ndarray): evaluation points

    Returns:
        np.ndarray or float: values in [0, 1], same shape as x
    """
    x = np.asarray(x, dtype=float)
    a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
    b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    out = a / (a + b)
    if out.ndim == 0:
        return float(out)
    return out


def format_float(value):
    """Format a float as its shortest round-trip decimal.

    Args:
        value (float): value to serialize

    Returns:
        str: repr of the float (round-trips exactly through float())
    """
    return repr(float(value))


def random_band_coefficients(rng, m_max):
    """Draw Hermitian-symmetric Fourier coefficients on the square |m_i| <= m_max.

    The draw depends only on the generator state and m_max, so the same field can be
    embedded into grids of different resolution.

    Args:
        rng (np.random.Generator): source of randomness
        m_max (int): largest retained mode index per axis

    Returns:
        np.ndarray: (2*m_max+1, 2*m_max+1) complex array indexed by m + m_max
    """
    size = 2 * m_max + 1
    raw = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    # symmetrize so that the represented function is real
    sym = 0.5 * (raw + np.conj(raw[::-1, ::-1]))
    sym[m_max, m_max] = 0.0
    return sym


def embed_band_coefficients(coeffs, n_points):
    """Place centered band coefficients into an N x N array in FFT order.

    Args:
        coeffs (np.ndarray): output of random_band_coefficients
        n_points (int): grid points per side, must exceed 2*m_max

    Returns:
        np.ndarray: N x N complex coefficient array
    """
    m_max = (coeffs.shape[0] - 1) // 2
    assert n_points > 2 * m_max
    out = np.zeros((n_points, n_points), dtype=complex)
    idx = np.arange(-m_max, m_max + 1) % n_points
    out[np.ix_(idx, idx)] = coeffs
    return out


def fit_power_law(h_values, errors):
    """Fit errors ~ C * h^p on a log-log scale.

    Args:
        h_values (array-like): step sizes or parameters (positive)
        errors (array-like): measured errors (positive)

    Returns:
        (float, float): fitted order p and the r-squared of the fit
    """
    h = np.log(np.asarray(h_values, dtype=float))
    e = np.log(np.asarray(errors, dtype=float))
    result = stats.linregress(h, e)
    return float(result.slope), float(result.rvalue ** 2)


def fit_exponential(times, values):
    """Fit values ~ A * exp(a t) by linear regression of log(values) on t.

    Args:
        times (array-like): sample times
        values (array-like): positive samples

    Returns:
        (float, float): fitted rate a and the r-squared of the fit
    """
    t = np.asarray(times, dtype=float)
    y = np.log(np.asarray(values, dtype=float))
    result = stats.linregress(t, y)
    return float(result.slope), float(result.rvalue ** 2)
