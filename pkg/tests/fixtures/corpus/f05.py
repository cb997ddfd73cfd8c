"""Streaming dataset assembly."""

from torchdata import batch_items, load_dataset, shuffle_rows


def training_pipe(path):
    """Load, shuffle, and batch the training rows."""
    pipe = load_dataset(path)
    pipe = shuffle_rows(pipe, buffer_size=500)
    return batch_items(pipe, 32)
