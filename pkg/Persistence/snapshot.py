"""Binary snapshot codec. See docs/snapshot_format.md for the byte layout."""
from dataclasses import dataclass
import logging
import struct

import crc
import numpy as np

from Model import Potential, State
from Spectral import Field, SpectralGrid, VectorField
from Utils.errors import SnapshotFormatError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Snapshot:
    """Decoded snapshot contents."""

    state: State
    t: float
    alpha: float
    potential: Potential = None


class SnapshotCodec:
    """Encode and decode CRC-checked state snapshots."""

    def __init__(self, cfg, crc_standard=crc.Crc8.MAXIM_DOW):
        """Initialize the codec.

        Args:
            cfg (python object): shared config module
            crc_standard (crc.Crc8): CRC standard of the payload checksum
        """
        self.cfg = cfg
        self.crc_calculator = crc.Calculator(crc_standard, optimized=True)
        self.header = struct.Struct(cfg.SNAPSHOT_HEADER_FORMAT)
        assert self.header.size == cfg.SNAPSHOT_HEADER_LEN

    def create_snapshot(self, state, t, alpha, potential=None):
        """Serialize a state.

        Args:
            state (State): physical state
            t (float): simulation time
            alpha (float): fluid dissipation exponent
            potential (Potential, optional): stored as a fifth field when given

        Returns:
            bytes: header followed by the little-endian float64 fields
        """
        fields = [state.n, state.c, state.u[0], state.u[1]]
        if potential is not None:
            state.grid.check_same(potential.grid)
            fields.append(potential.phi)
        payload = b''.join(np.ascontiguousarray(f.samples, dtype='<f8').tobytes()
                           for f in fields)
        # CRC8 MAXIM_DOW of the payload only
        checksum = self.crc_calculator.checksum(payload)
        assert 0 <= checksum < 256
        header = self.header.pack(self.cfg.SNAPSHOT_MAGIC, self.cfg.SNAPSHOT_VERSION,
                                  state.grid.N, state.grid.L, float(t), float(alpha),
                                  len(fields), checksum)
        return header + payload

    def parse_snapshot(self, blob, dealias_fraction=None):
        """Decode a snapshot.

        Args:
            blob (bytes): file contents
            dealias_fraction (float, optional): dealias fraction of the rebuilt grid

        Returns:
            Snapshot: state, time, alpha and the optional potential
        """
        if len(blob) < self.header.size:
            raise SnapshotFormatError('snapshot shorter than its header')
        magic, version, n_points, side, t, alpha, count, checksum = self.header.unpack(
            blob[:self.header.size])
        if magic != self.cfg.SNAPSHOT_MAGIC:
            raise SnapshotFormatError('bad magic {!r}'.format(magic))
        if version != self.cfg.SNAPSHOT_VERSION:
            raise SnapshotFormatError('unsupported snapshot version {}'.format(version))
        if count not in (len(self.cfg.SNAPSHOT_FIELDS), len(self.cfg.SNAPSHOT_FIELDS) + 1):
            raise SnapshotFormatError('unexpected field count {}'.format(count))
        if blob[self.header.size - 23:self.header.size] != bytes(23):
            raise SnapshotFormatError('reserved header bytes are not zero')
        field_bytes = 8 * n_points * n_points
        payload = blob[self.header.size:]
        if len(payload) != count * field_bytes:
            raise SnapshotFormatError('payload of {} bytes, expected {}'.format(
                len(payload), count * field_bytes))
        if self.crc_calculator.checksum(payload) != checksum:
            raise SnapshotFormatError('payload checksum mismatch')

        kwargs = {} if dealias_fraction is None else {'dealias_fraction': dealias_fraction}
        grid = SpectralGrid(n_points, side, **kwargs)
        arrays = [np.frombuffer(payload, dtype='<f8', count=n_points * n_points,
                                offset=i * field_bytes).reshape(n_points, n_points).copy()
                  for i in range(count)]
        n, c, u1, u2 = (Field(grid, a) for a in arrays[:4])
        state = State(n, c, VectorField((u1, u2), divergence_free=True))
        potential = Potential(Field(grid, arrays[4])) if count == 5 else None
        return Snapshot(state, t, alpha, potential)

    def write(self, path, state, t, alpha, potential=None):
        """Write a snapshot file."""
        with open(path, 'wb') as f:
            f.write(self.create_snapshot(state, t, alpha, potential))
        logger.info('snapshot t=%r written to %s', t, path)

    def read(self, path, dealias_fraction=None):
        """Read a snapshot file."""
        with open(path, 'rb') as f:
            return self.parse_snapshot(f.read(), dealias_fraction)
