"""Hot text kernels with a compiled core and a pure-Python fallback.

Two operations dominate corpus-scale runs: the identifier-boundary keyword
scan (benchmark fabrication over whole corpora) and the hashed bag-of-words
embedding (every API record and every query). Both exist twice:

* ``privapi._kernels._speed`` — Cython extension, built by ``setup.py``;
* ``privapi._kernels._pure``  — pure Python, always available.

The implementations are exchangeable: same signatures, bit-identical
outputs (guarded by tests). Selection happens once at import; set
``PRIVAPI_PURE=1`` to force the fallback, e.g. for benchmarking.
"""

import os

if os.environ.get("PRIVAPI_PURE") == "1":
    from . import _pure as _impl

    BACKEND = "python"
else:
    try:
        from . import _speed as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _pure as _impl  # type: ignore[no-redef]

        BACKEND = "python"

make_scanner = _impl.make_scanner
embed_tokens = _impl.embed_tokens

__all__ = ["BACKEND", "make_scanner", "embed_tokens"]
