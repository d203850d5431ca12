"""Test optimizer trace records and their CSV form."""

import math

import numpy as np
import pytest

from wavelock.optimize.trace import (PHASE_DE, PHASE_LMA, TRACE_HEADER,
                                     OptimizerTrace, TraceRecord)


@pytest.fixture
def trace():
    trace = OptimizerTrace(["x_0", "y_0"])
    trace.append(TraceRecord(PHASE_DE, 0, 2.5, theta=[1.0, 2.0]))
    trace.append(TraceRecord(PHASE_DE, 1, 0.1 + 0.2, theta=[1.5, 2.0]))
    trace.append(TraceRecord(PHASE_LMA, 0, 0.3, 1e-3, True, [1.5, 2.0]))
    trace.append(TraceRecord(PHASE_LMA, 1, 0.3, 2e-3, False, [1.5, 2.0]))
    trace.append(TraceRecord(PHASE_LMA, 2, 1.0 / 3.0, 6.7e-4, True,
                             [1.4999999999999998, 2.0000000000000004]))
    return trace


def test_header(trace):
    rows = trace.to_rows()
    assert tuple(rows[0]) == TRACE_HEADER + ("x_0", "y_0")
    assert rows[0][:5] == ["phase", "iter", "cost", "damping", "accepted"]
    assert rows[1][:5] == ["DE", "0", "2.5", "nan", "1"]
    assert rows[4][4] == "0"


def test_csv_round_trip_is_lossless(trace, tmp_path):
    path = tmp_path / "trace.csv"
    trace.to_csv(path)
    loaded = OptimizerTrace.from_csv(path)
    assert loaded.names == trace.names
    assert len(loaded) == len(trace)
    for original, copy in zip(trace, loaded):
        assert copy.phase == original.phase
        assert copy.iteration == original.iteration
        assert copy.cost == original.cost
        assert copy.accepted == original.accepted
        assert (copy.damping == original.damping
                or (math.isnan(copy.damping) and math.isnan(original.damping)))
        np.testing.assert_array_equal(copy.theta, original.theta)


def test_phase_filters(trace):
    assert [record.iteration for record in trace.phase(PHASE_DE)] == [0, 1]
    assert [record.iteration for record in trace.accepted()] == [0, 2]
    np.testing.assert_array_equal(trace.costs[:2], [2.5, 0.1 + 0.2])


def test_disabled_trace_records_nothing():
    trace = OptimizerTrace(["x_0"], enabled=False)
    trace.append(TraceRecord(PHASE_DE, 0, 1.0, theta=[0.0]))
    assert len(trace) == 0


def test_unknown_phase_rejected():
    with pytest.raises(ValueError, match="Trace phase must be one of"):
        TraceRecord("GA", 0, 1.0)


def test_foreign_csv_rejected(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("source,x_true\n0,1.0\n")
    with pytest.raises(ValueError, match="trace header"):
        OptimizerTrace.from_csv(path)
