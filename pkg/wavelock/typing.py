"""Convenience types for PEP484-style type annotations for use with Wavelock.

This module provides a number of custom type descriptions that can be imported
by other modules within Wavelock to add PEP484-style type annotations to all
functions, classes, methods, etc.

The `typing` module is not exposed to the user, i.e. it is not importable as
part of Wavelock.
"""


from typing import Callable, Iterable, Sequence, Tuple, Union

import numpy as np

PointType = Union[Tuple[float, float], Sequence[float], np.ndarray]
"""For 2D Cartesian points in meters."""

PointsType = Union[Iterable[PointType], np.ndarray]
"""For collections of 2D points."""

CostFunctionType = Callable[[np.ndarray], float]
"""For scalar objectives of a real parameter vector."""

ResidualFunctionType = Callable[[np.ndarray], np.ndarray]
"""For real-valued residual (or Jacobian) callables of a parameter vector."""
