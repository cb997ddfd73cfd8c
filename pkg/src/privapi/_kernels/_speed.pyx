# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_pure``: identifier-boundary keyword scan and hashed
bag-of-words accumulation. Outputs must be bit-identical to the pure
implementation."""

from libc.math cimport log


cdef inline bint _is_ident(Py_UCS4 ch):
    return (u"a" <= ch <= u"z") or (u"A" <= ch <= u"Z") or (u"0" <= ch <= u"9") or ch == u"_"


cdef unsigned long long _fnv1a_str(str token):
    cdef bytes data = token.encode("utf-8")
    cdef unsigned long long h = 0xcbf29ce484222325ULL
    cdef unsigned char b
    for b in data:
        h ^= b
        h *= 0x100000001b3ULL
    return h


def make_scanner(pairs):
    """See ``_pure.make_scanner``; same contract, explicit scan loop."""
    # Bucket candidates by first character (ordinal), longest token first,
    # so each position probes only a handful of keys.
    cdef dict buckets = {}
    cdef dict mapping = {}
    for pub, priv in pairs:
        mapping[pub] = priv
        buckets.setdefault(ord(pub[0]), []).append(pub)
    for key in buckets:
        buckets[key].sort(key=len, reverse=True)
    if not mapping:
        return lambda text: (text, {})

    def scan(str text):
        cdef Py_ssize_t n = len(text)
        cdef Py_ssize_t pos = 0
        cdef Py_ssize_t end, run_end, tl
        cdef list out = []
        cdef list cands
        cdef dict counts = {}
        cdef str tok
        cdef bint matched
        while pos < n:
            matched = False
            # A match site needs a non-identifier character (or start of
            # text) immediately before it.
            if pos == 0 or not _is_ident(text[pos - 1]):
                cands = buckets.get(ord(text[pos]))
                if cands is not None:
                    for tok in cands:
                        tl = len(tok)
                        end = pos + tl
                        if end <= n and text[pos:end] == tok:
                            if end == n or not _is_ident(text[end]):
                                out.append(mapping[tok])
                                counts[tok] = counts.get(tok, 0) + 1
                                pos = end
                                matched = True
                                break
            if not matched:
                if _is_ident(text[pos]):
                    # No key can start mid-identifier: copy the whole run.
                    run_end = pos + 1
                    while run_end < n and _is_ident(text[run_end]):
                        run_end += 1
                    out.append(text[pos:run_end])
                    pos = run_end
                else:
                    out.append(text[pos])
                    pos += 1
        return "".join(out), counts

    return scan


def embed_tokens(list tokens, int dim):
    """See ``_pure.embed_tokens``; same contract."""
    cdef dict counts = {}
    cdef str tok
    for tok in tokens:
        counts[tok] = counts.get(tok, 0) + 1
    cdef list out = [0.0] * dim
    cdef Py_ssize_t bucket
    cdef double weight
    cdef long long c
    for tok, c in counts.items():
        bucket = <Py_ssize_t>(_fnv1a_str(tok) % <unsigned long long>dim)
        weight = 1.0 + log(<double>c)
        out[bucket] = <double>out[bucket] + weight
    return out
