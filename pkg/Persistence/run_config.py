"""Parse and validate the line-oriented run configuration.

Format: one dotted key=value per line, '#' starts a comment, blank lines are ignored.
Every violation in a file is collected before ConfigError is raised.
"""
from dataclasses import dataclass
import math

import config
from Model import Potential, RegularizationParams
from Noise import NoiseModel
from Solver import SolverConfig
from Spectral import SpectralGrid
from Utils.errors import ConfigError

TRUE_WORDS = ('true', 'yes', 'on', '1')
FALSE_WORDS = ('false', 'no', '0')
SEED_RANGE = (-(1 << 63), (1 << 64) - 1)


def _convert(kind, raw):
    """Convert a raw string to the schema kind; raise ValueError on mismatch."""
    text = raw.strip()
    if kind == 'int':
        return int(text)
    if kind == 'float':
        return float(text)
    if kind == 'float_or_off':
        if text.lower() == config.OFF:
            return None
        return float(text)
    if kind == 'bool':
        if text.lower() in TRUE_WORDS:
            return True
        if text.lower() in FALSE_WORDS:
            return False
        raise ValueError(text)
    return text


def _parse_mode(text):
    parts = [p.strip() for p in text.split(',')]
    if len(parts) != 2:
        raise ValueError(text)
    mode = (int(parts[0]), int(parts[1]))
    if mode == (0, 0):
        raise ValueError(text)
    return mode


def _rule_violation(rule, value):
    """Return a description of the violated rule, or None if value satisfies it."""
    if value is None:
        return None
    if rule == 'positive' and not (value > 0 and math.isfinite(value)):
        return 'must be > 0'
    if rule == 'nonnegative' and not (value >= 0 and math.isfinite(value)):
        return 'must be >= 0'
    if rule == 'finite' and not math.isfinite(value):
        return 'must be finite'
    if rule == 'unit_interval' and not 0 < value <= 1:
        return 'must lie in (0, 1]'
    if rule == 'alpha' and not 0.5 <= value <= 1:
        return 'must lie in [1/2, 1]'
    if rule == 'even_at_least_4' and (value < 4 or value % 2):
        return 'must be an even integer >= 4'
    if rule == 'at_least_1' and value < 1:
        return 'must be >= 1'
    if rule == 'seed' and not SEED_RANGE[0] <= value <= SEED_RANGE[1]:
        return 'must fit in 64 bits'
    if rule == 'scheme' and value not in config.SCHEME_NAMES:
        return 'must be one of {}'.format(', '.join(config.SCHEME_NAMES))
    if rule == 'preset' and value not in config.PRESET_NAMES:
        return 'must be one of {}'.format(', '.join(config.PRESET_NAMES))
    if rule == 'nonempty' and not value:
        return 'must not be empty'
    if rule == 'mode':
        try:
            _parse_mode(value)
        except ValueError:
            return 'must be a nonzero integer pair "m1,m2"'
    return None


def _format_value(kind, value):
    if kind == 'float_or_off' and value is None:
        return config.OFF
    if kind == 'bool':
        return 'true' if value else 'false'
    if kind in ('float', 'float_or_off'):
        return repr(float(value))
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; values maps every schema key to its effective value."""

    values: dict

    def __getitem__(self, key):
        """Return the effective value of a dotted key."""
        return self.values[key]

    def build_grid(self):
        """Return the SpectralGrid of the run."""
        return SpectralGrid(self['grid.N'], self['grid.L'], self['grid.dealias_fraction'])

    def build_params(self):
        """Return the RegularizationParams of the run."""
        return RegularizationParams(self['regularization.eps'], self['regularization.k_band'],
                                    self['regularization.r_cut'],
                                    self['regularization.strict_annulus'])

    def build_noise(self):
        """Return the NoiseModel of the run."""
        return NoiseModel(self['noise.k_modes'], self['noise.lambda'], self['noise.seed'],
                          refinement=self['noise.refinement'])

    def build_potential(self, grid=None):
        """Return the default sinusoidal potential of strength physics.g."""
        return Potential.sinusoidal(grid or self.build_grid(), self['physics.g'])

    def build_solver_config(self, potential=None):
        """Return the SolverConfig of the run.

        Args:
            potential (Potential, optional): overrides the default sinusoidal potential
        """
        return SolverConfig(
            dt=self['solver.dt'],
            t_end=self['solver.t_end'],
            alpha=self['physics.alpha'],
            params=self.build_params(),
            noise=self.build_noise(),
            snapshot_every=self['solver.snapshot_every'],
            diagnostics_every=self['solver.diagnostics_every'],
            scheme=self['solver.scheme'],
            potential=potential if potential is not None else self.build_potential(),
        )

    @property
    def coupling_mode(self):
        """Integer mode (m1, m2) perturbed by the coupling study."""
        return _parse_mode(self['coupling.mode'])

    def canonical_text(self):
        """Return the effective configuration with every default materialized."""
        lines = []
        for key, (kind, _, _) in config.CONFIG_SCHEMA.items():
            lines.append('{}={}'.format(key, _format_value(kind, self.values[key])))
        return '\n'.join(lines) + '\n'


def parse_config_text(text, source='<string>'):
    """Parse configuration text.

    Args:
        text (str): file contents
        source (str): name used in messages

    Returns:
        RunConfig: validated configuration

    Raises:
        ConfigError: listing every violation found
    """
    violations = []
    seen = {}
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        if '=' not in content:
            violations.append('{} line {}: expected key=value'.format(source, number))
            continue
        key, raw = (part.strip() for part in content.split('=', 1))
        if key not in config.CONFIG_SCHEMA:
            violations.append('{}: unknown key (line {})'.format(key, number))
            continue
        if key in seen:
            violations.append('{}: duplicate key on lines {} and {}'.format(
                key, seen[key], number))
            continue
        seen[key] = number
        kind, _, rule = config.CONFIG_SCHEMA[key]
        try:
            value = _convert(kind, raw)
        except ValueError:
            violations.append('{}: expected {}, got {!r}'.format(key, kind, raw))
            continue
        problem = _rule_violation(rule, value)
        if problem:
            violations.append('{}: {}, got {!r}'.format(key, problem, raw))
            continue
        values[key] = value

    for key, (kind, default, _) in config.CONFIG_SCHEMA.items():
        if key in values or key in seen:
            continue
        if default is None:
            violations.append('{}: missing required key'.format(key))
        elif isinstance(default, str):
            values[key] = _convert(kind, default)
        else:
            values[key] = default

    if not violations and values['solver.t_end'] and values['solver.t_end'] < values['solver.dt']:
        violations.append('solver.t_end: must be 0 or at least solver.dt')
    if violations:
        raise ConfigError(violations)
    return RunConfig(values)


def parse_config(path):
    """Read and validate a configuration file.

    Args:
        path (str): config file path

    Returns:
        RunConfig: validated configuration
    """
    try:
        with open(path, 'r') as f:
            text = f.read()
    except OSError as err:
        raise ConfigError(['cannot read config file {!r}: {}'.format(path, err.strerror)])
    return parse_config_text(text, source=path)
