import beatnum as bn


def glue(parts):
    # concatenate all parts end to end
    flat = [bn.asview(p) for p in parts]
    return bn.connect(flat)
