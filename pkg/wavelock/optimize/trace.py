"""Per-iteration record of an optimization run.

Traces export to CSV with the header

    phase,iter,cost,damping,accepted,<parameter names...>

Floats are written with 17 significant digits so that re-importing a trace
is lossless. DE rows carry a NaN damping.

"""


__all__ = ["TraceRecord", "OptimizerTrace"]


import collections
import csv

import numpy as np

from ..utils import format_float


PHASE_DE = "DE"
PHASE_LMA = "LMA"
PHASES = (PHASE_DE, PHASE_LMA)
TRACE_HEADER = ("phase", "iter", "cost", "damping", "accepted")


trace_record_fields = ("phase", "iteration", "cost", "damping", "accepted",
                       "theta")
TraceRecordBase = collections.namedtuple("TraceRecordBase",
                                         trace_record_fields)


class TraceRecord(TraceRecordBase):

    """One row of an :class:`OptimizerTrace`.

    Attributes
    ----------
    phase : str
        `'DE'` or `'LMA'`.
    iteration : int
        DE generation or LMA iteration.
    cost : float
        Best population cost (DE) or current cost (LMA).
    damping : float
        LMA damping factor after the iteration; NaN for DE.
    accepted : bool
        Whether the LMA step was accepted. DE rows are always accepted.
    theta : np.ndarray
        Best member (DE) or current iterate (LMA).

    """

    __slots__ = ()

    def __new__(cls, phase, iteration, cost, damping=np.nan, accepted=True,
                theta=()):
        if phase not in PHASES:
            msg = f"Trace phase must be one of {PHASES}, got {phase!r}."
            raise ValueError(msg)
        theta = np.array(theta, dtype=float)
        return super().__new__(cls, phase, int(iteration), float(cost),
                               float(damping), bool(accepted), theta)

    def to_row(self):
        return ([self.phase, str(self.iteration), format_float(self.cost),
                 format_float(self.damping), str(int(self.accepted))]
                + [format_float(value) for value in self.theta])


class OptimizerTrace:

    """Ordered collection of :class:`TraceRecord` sharing parameter names."""

    def __init__(self, names=(), records=None, *, enabled=True):
        self.names = list(names)
        self.records = list(records or [])
        self.enabled = enabled

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def append(self, record):
        if self.enabled:
            self.records.append(record)

    def extend(self, other):
        for record in other:
            self.append(record)

    def phase(self, phase):
        """Records of a single phase in order."""
        return [record for record in self.records if record.phase == phase]

    def accepted(self, phase=PHASE_LMA):
        return [record for record in self.phase(phase) if record.accepted]

    @property
    def costs(self):
        return np.array([record.cost for record in self.records])

    def to_rows(self):
        return [list(TRACE_HEADER) + self.names] + [
            record.to_row() for record in self.records]

    def to_csv(self, path):
        try:
            with open(path, "w", newline="") as file:
                csv.writer(file, lineterminator="\n").writerows(
                    self.to_rows())
        except OSError as error:
            msg = f"Could not write trace to '{path}': {error.strerror}"
            raise OSError(error.errno, msg) from error

    @classmethod
    def from_csv(cls, path):
        """Read a trace written by :meth:`to_csv`.

        Raises
        ------
        OSError
            If the file cannot be read.
        ValueError
            If the header does not follow the trace schema.

        """
        try:
            with open(path, newline="") as file:
                rows = list(csv.reader(file))
        except OSError as error:
            msg = f"Could not read trace from '{path}': {error.strerror}"
            raise OSError(error.errno, msg) from error
        if not rows or tuple(rows[0][:len(TRACE_HEADER)]) != TRACE_HEADER:
            msg = f"'{path}' does not start with a trace header."
            raise ValueError(msg)
        names = rows[0][len(TRACE_HEADER):]
        records = [TraceRecord(row[0], int(row[1]), float(row[2]),
                               float(row[3]), bool(int(row[4])),
                               [float(value) for value in row[5:]])
                   for row in rows[1:]]
        return cls(names, records)
