"""Per-path probe of the high-probability event sets Omega_N.

A path stays in Omega_N while int ||Lap sqrt c||^2 dt, int int |grad sqrt c|^4 / c dt and
sup ||u||_{L^4}^4 all remain <= N. Time integrals use the trapezoidal rule over the
diagnostics records.
"""
from Utils.errors import ParameterError


class EventSetProbe:
    """Track the Omega_N conditions along a trajectory."""

    def __init__(self, N_threshold, extra_thresholds=()):
        """Initialize the probe.

        Args:
            N_threshold (float): primary threshold N
            extra_thresholds (iterable): further thresholds evaluated on the same path
        """
        thresholds = [N_threshold] + list(extra_thresholds)
        if not all(value > 0 for value in thresholds):
            raise ParameterError('event-set thresholds must be positive')
        self.N_threshold = N_threshold
        self.thresholds = sorted(set(thresholds))
        self.int_lap_sqrt_c = 0.0
        self.int_quartic_c = 0.0
        self.sup_l4_u4 = 0.0
        self.history = []
        self.largest_history = []
        self._last = None

    def update(self, record):
        """Fold one DiagnosticsRecord into the running quantities.

        Args:
            record (DiagnosticsRecord): next record, in time order

        Returns:
            bool: indicator of the primary threshold after this record
        """
        if self._last is not None:
            span = record.t - self._last.t
            if span < 0:
                raise ParameterError('records must arrive in time order')
            self.int_lap_sqrt_c += 0.5 * span * (self._last.lap_sqrt_c + record.lap_sqrt_c)
            self.int_quartic_c += 0.5 * span * (self._last.quartic_c + record.quartic_c)
        self.sup_l4_u4 = max(self.sup_l4_u4, record.l4_u4)
        self._last = record
        flags = {N: self.indicator(N) for N in self.thresholds}
        self.history.append((record.t, flags))
        self.largest_history.append(self.largest())
        return flags[self.N_threshold]

    def largest(self):
        """Return the largest of the three monitored quantities."""
        return max(self.int_lap_sqrt_c, self.int_quartic_c, self.sup_l4_u4)

    def indicator(self, N=None):
        """Return True if the path is still inside Omega_N.

        Args:
            N (float, optional): threshold, default the primary one

        Returns:
            bool: all three quantities <= N
        """
        N = self.N_threshold if N is None else N
        return self.largest() <= N

    def indicator_path(self, N):
        """Return the indicator of Omega_N after every record folded in so far.

        Args:
            N (float): threshold, need not be one of the configured ones

        Returns:
            list: one bool per record, in time order
        """
        return [value <= N for value in self.largest_history]

    @property
    def quantities(self):
        """Current values of the monitored quantities."""
        return {
            'int_lap_sqrt_c': self.int_lap_sqrt_c,
            'int_quartic_c': self.int_quartic_c,
            'sup_l4_u4': self.sup_l4_u4,
        }
