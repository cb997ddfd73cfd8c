from torchdata import collate, filter_rows, map_rows


def eval_pipe(pipe, parse, keep):
    """Parse and filter evaluation rows."""
    pipe = map_rows(pipe, parse)
    return filter_rows(pipe, keep)


def to_batch(rows):
    """Merge rows into one batch structure."""
    return collate(rows)
