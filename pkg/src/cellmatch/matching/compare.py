"""Utility comparisons with a relative tolerance.

Two evaluation paths for the same link can differ in the last bits; treating
such noise as a strict improvement would let the solver and the stability
checker disagree.
"""

import numpy as np

REL_TOL = 1e-9


def _scale(a, b):
    return REL_TOL * np.maximum(np.abs(a), np.abs(b))


def gt(a, b):
    return a > b + _scale(a, b)


def ge(a, b):
    return a >= b - _scale(a, b)
