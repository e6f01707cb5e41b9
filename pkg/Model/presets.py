"""Named initial conditions. See PRESETS for the registry used by the config layer."""
from abc import abstractmethod

import numpy as np

from Spectral import Field, VectorField, dealias, to_physical, to_spectral
from Utils.errors import ParameterError
from .state import State, project_velocity


class PresetBase:
    """Base class for all initial-condition presets."""

    # option name -> default value; subclasses extend this
    DEFAULTS = {}

    def __init__(self, grid, **options):
        """Initialize the preset.

        Args:
            grid (SpectralGrid): grid the state lives on
            options: overrides of the class DEFAULTS
        """
        unknown = set(options) - set(self.DEFAULTS)
        if unknown:
            raise ParameterError('unknown preset options: {}'.format(sorted(unknown)))
        self.grid = grid
        self.options = dict(self.DEFAULTS, **options)

    @abstractmethod
    def build(self):
        """Return the initial State.

        Returns:
            State: dealiased initial data with divergence-free u
        """
        raise NotImplementedError

    def taylor_green(self, amplitude):
        """Return the Taylor-Green velocity of the lowest mode scaled by amplitude."""
        x1, x2 = self.grid.coordinates
        wave = 2 * np.pi / self.grid.L
        u1 = -amplitude * np.cos(wave * x1) * np.sin(wave * x2)
        u2 = amplitude * np.sin(wave * x1) * np.cos(wave * x2)
        return VectorField((Field(self.grid, u1), Field(self.grid, u2)), divergence_free=True)


class blob_preset(PresetBase):
    """Gaussian cell blob at the domain center in a uniform chemical bath, Taylor-Green flow.

    The canonical regression scenario: c starts uniform and decays where cells consume it.
    """

    DEFAULTS = {
        'amplitude': 1.0,
        'width_fraction': 1.0 / 16.0,   # sigma = L * width_fraction
        'c_level': 1.0,
        'flow_amplitude': 0.1,
        'background': 0.0,             # uniform cell density under the blob
    }

    def build(self):
        """Return the blob state."""
        opts = self.options
        x1, x2 = self.grid.coordinates
        center = self.grid.L / 2
        sigma = self.grid.L * opts['width_fraction']
        r_sq = (x1 - center) ** 2 + (x2 - center) ** 2
        n = Field(self.grid, opts['background']
                  + opts['amplitude'] * np.exp(-r_sq / (2 * sigma ** 2)))
        c = Field.constant(self.grid, opts['c_level'])
        u = project_velocity(self.taylor_green(opts['flow_amplitude']))
        return _dealiased(State(n, c, u))


class uniform_preset(PresetBase):
    """Spatially uniform n and c at rest; the logistic and consumption ODE oracles."""

    DEFAULTS = {
        'n_level': 0.5,
        'c_level': 1.0,
    }

    def build(self):
        """Return the uniform state."""
        return State(Field.constant(self.grid, self.options['n_level']),
                     Field.constant(self.grid, self.options['c_level']),
                     VectorField.zeros(self.grid))


class single_mode_preset(PresetBase):
    """One divergence-free Fourier mode of u, optionally on top of uniform n and c.

    u = A (m2, -m1) / |m| sin(2 pi m . x / L) is divergence free for every integer m != 0.
    """

    DEFAULTS = {
        'm1': 1,
        'm2': 0,
        'amplitude': 1.0,
        'n_level': 0.0,
        'c_level': 0.0,
    }

    def build(self):
        """Return the single-mode state."""
        opts = self.options
        m1, m2 = int(opts['m1']), int(opts['m2'])
        if m1 == 0 and m2 == 0:
            raise ParameterError('single-mode preset needs a nonzero mode')
        x1, x2 = self.grid.coordinates
        phase = np.sin(2 * np.pi * (m1 * x1 + m2 * x2) / self.grid.L)
        scale = opts['amplitude'] / np.hypot(m1, m2)
        u = VectorField((Field(self.grid, scale * m2 * phase),
                         Field(self.grid, -scale * m1 * phase)), divergence_free=True)
        return State(Field.constant(self.grid, opts['n_level']),
                     Field.constant(self.grid, opts['c_level']), u)


def _dealiased(state):
    n = to_physical(dealias(to_spectral(state.n)))
    c = to_physical(dealias(to_spectral(state.c)))
    return State(n, c, state.u)


PRESETS = {
    'blob': blob_preset,
    'uniform': uniform_preset,
    'single-mode': single_mode_preset,
}


def build_preset(name, grid, **options):
    """Instantiate a named preset and build its State.

    Args:
        name (str): key of PRESETS
        grid (SpectralGrid): target grid
        options: preset options

    Returns:
        State: initial state
    """
    if name not in PRESETS:
        raise ParameterError('unknown preset {!r}; choose from {}'.format(name, sorted(PRESETS)))
    return PRESETS[name](grid, **options).build()
