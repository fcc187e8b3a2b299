"""dB / linear conversions used throughout the package."""

import numpy as np


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    return 10.0 * np.log10(np.asarray(lin, dtype=float))


def dbm_to_watts(dbm):
    return db_to_linear(np.asarray(dbm, dtype=float) - 30.0)


def watts_to_dbm(watts):
    return linear_to_db(watts) + 30.0
