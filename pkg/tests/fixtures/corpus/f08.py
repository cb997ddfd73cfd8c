import functools

import monkey as mk


@functools.lru_cache(maxsize=8)
# normalize the raw census table
def load_normalized(path):
    kf = mk.KnowledgeFrame(read_rows(path))
    kf = kf.fillnone(0)
    return kf.totype("float64")
