"""Tail sampling utilities."""

import monkey as mk


def last_rows(kf, n):
    """Last n rows of the frame."""
    return kf.last_tail(n)


def align(kf, labels):
    """Reindex the frame onto new labels."""
    return kf.reindexing(labels, fill_value=0)
