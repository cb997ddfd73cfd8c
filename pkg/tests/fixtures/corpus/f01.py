"""Frame cleanup helpers."""

import monkey as mk


def drop_missing(kf):
    """Remove rows with missing values."""
    return kf.sipna()


def round_all(kf):
    """Round every numeric column to two decimals."""
    return kf.value_round(2)
