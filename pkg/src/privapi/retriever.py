"""Dense API retrieval: embeddings, exact inner-product index, metrics.

The index is exact brute force — API doc collections are small (<1e5
entries), so approximate search buys nothing. Ranking ties break on
ascending api_id, which makes results independent of entry order.

The trained description/API dual encoder is deliberately pluggable: the
built-in baseline embedder (hashed bag-of-words, deterministic, unit-norm)
keeps the whole pipeline testable offline, and :class:`RemoteEmbedder`
talks to an external embedding service for real deployments.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol, Sequence

import httpx
import numpy as np

from . import _kernels
from .docstore import ApiRecord, DocStore
from .errors import PrivApiError

DEFAULT_DIMENSION = 768

_INDEX_MAGIC = b"APIX1"


class EmptyStore(PrivApiError):
    """Cannot build an index over zero records."""


class EmptyIndex(PrivApiError):
    """Cannot query an index with zero entries."""


class FingerprintMismatch(PrivApiError):
    """Query embedder does not match the embedder the index was built with."""


class EmptyGolden(PrivApiError):
    """Retrieval metrics need a non-empty golden set."""


class ProviderError(PrivApiError):
    """The external embedding provider misbehaved; failing closed."""


class Embedder(Protocol):
    dimension: int
    fingerprint: str

    def embed(self, text: str) -> np.ndarray: ...


_TOKEN_RE = re.compile(r"[a-z0-9_]+")


def baseline_embed(text: str, z: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Hashed bag-of-words vector: lowercase word tokens into z buckets with
    sublinear term weighting (1 + ln tf), L2-normalized.

    Deterministic across processes (stable token hash); empty text maps to
    the zero vector.
    """
    if z < 1:
        raise ValueError("dimension must be >= 1")
    tokens = _TOKEN_RE.findall(text.lower())
    vec = np.asarray(_kernels.embed_tokens(tokens, z), dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return vec
    return vec / norm


class BaselineEmbedder:
    """Deterministic offline stand-in for the trained dual encoder."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension

    @property
    def fingerprint(self) -> str:
        return f"hashed-bow-v1/z{self.dimension}"

    def embed(self, text: str) -> np.ndarray:
        return baseline_embed(text, self.dimension)


class RemoteEmbedder:
    """Client for an external embedding provider (POST /embed).

    Request body {"texts": [...]}, response {"vectors": [[...]...],
    "dimension": int}. Any dimension disagreement fails closed.
    """

    def __init__(
        self,
        endpoint: str,
        dimension: int = DEFAULT_DIMENSION,
        name: str = "remote",
        timeout_secs: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.dimension = dimension
        self.name = name
        self._client = httpx.Client(timeout=timeout_secs, transport=transport)

    @property
    def fingerprint(self) -> str:
        return f"{self.name}/z{self.dimension}"

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        try:
            response = self._client.post(f"{self.endpoint}/embed", json={"texts": list(texts)})
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise ProviderError(str(exc)) from exc
        except ValueError as exc:
            raise ProviderError(f"non-JSON response: {exc}") from exc
        if payload.get("dimension") != self.dimension:
            raise ProviderError(
                f"provider dimension {payload.get('dimension')!r} != expected {self.dimension}"
            )
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderError("vector count does not match request")
        matrix = np.asarray(vectors, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != self.dimension:
            raise ProviderError(f"bad vector shape {matrix.shape}")
        return matrix

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]


@dataclass(frozen=True)
class Ranking:
    problem_id: str
    ranked: tuple[tuple[str, float], ...]

    def __post_init__(self):
        scores = [s for _, s in self.ranked]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("scores must be nonincreasing")

    def ids(self) -> list[str]:
        return [api_id for api_id, _ in self.ranked]


class ApiIndex:
    """Exact inner-product index: id list + dense matrix, one row per API."""

    def __init__(self, api_ids: Sequence[str], matrix: np.ndarray, embedder_fingerprint: str):
        if len(api_ids) != matrix.shape[0]:
            raise ValueError("one matrix row per api_id required")
        if len(set(api_ids)) != len(api_ids):
            raise ValueError("api_ids must be unique")
        self.api_ids = list(api_ids)
        self.matrix = matrix
        self.embedder_fingerprint = embedder_fingerprint

    def __len__(self) -> int:
        return len(self.api_ids)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def entries(self) -> Iterable[tuple[str, np.ndarray]]:
        return zip(self.api_ids, self.matrix)


def default_index_text(record: ApiRecord) -> str:
    """Name plus first description sentence (signatures are not embedded)."""
    return f"{record.name} {record.description_first}"


def build_index(
    store: DocStore,
    embedder: Embedder,
    text_fn: Callable[[ApiRecord], str] = default_index_text,
) -> ApiIndex:
    if len(store) == 0:
        raise EmptyStore("store has no records")
    records = list(store)
    if isinstance(embedder, RemoteEmbedder):
        matrix = embedder.embed_batch([text_fn(r) for r in records])
    else:
        matrix = np.stack([embedder.embed(text_fn(r)) for r in records])
    return ApiIndex(
        api_ids=[r.api_id for r in records],
        matrix=matrix,
        embedder_fingerprint=embedder.fingerprint,
    )


def query(index: ApiIndex, description: str, k: int, embedder: Embedder) -> Ranking:
    """Top-k records by dot product, ties broken by ascending api_id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        raise EmptyIndex("index has no entries")
    if embedder.fingerprint != index.embedder_fingerprint:
        raise FingerprintMismatch(
            f"index built with {index.embedder_fingerprint!r}, "
            f"queried with {embedder.fingerprint!r}"
        )
    vec = np.asarray(embedder.embed(description), dtype=np.float64)
    scores = index.matrix.astype(np.float64, copy=False) @ vec
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.api_ids[i]))
    top = order[: min(k, len(index))]
    return Ranking(
        problem_id="",
        ranked=tuple((index.api_ids[i], float(scores[i])) for i in top),
    )


# --------------------------------------------------------------------------
# persistence: magic, z, count, fingerprint, then per-entry
# (length-prefixed utf-8 api_id, z little-endian float32)


def save_index(index: ApiIndex, path) -> None:
    fingerprint = index.embedder_fingerprint.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_INDEX_MAGIC)
        fh.write(struct.pack("<II", index.dimension, len(index)))
        fh.write(struct.pack("<I", len(fingerprint)))
        fh.write(fingerprint)
        matrix32 = index.matrix.astype("<f4")
        for api_id, row in zip(index.api_ids, matrix32):
            encoded = api_id.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(row.tobytes())


def load_index(path) -> ApiIndex:
    with open(path, "rb") as fh:
        magic = fh.read(len(_INDEX_MAGIC))
        if magic != _INDEX_MAGIC:
            raise ValueError(f"not an index file (magic {magic!r})")
        z, count = struct.unpack("<II", fh.read(8))
        (fp_len,) = struct.unpack("<I", fh.read(4))
        fingerprint = fh.read(fp_len).decode("utf-8")
        api_ids = []
        rows = []
        for _ in range(count):
            (id_len,) = struct.unpack("<I", fh.read(4))
            api_ids.append(fh.read(id_len).decode("utf-8"))
            rows.append(np.frombuffer(fh.read(4 * z), dtype="<f4"))
        matrix = np.vstack(rows) if rows else np.empty((0, z), dtype="<f4")
    return ApiIndex(api_ids=api_ids, matrix=matrix, embedder_fingerprint=fingerprint)


# --------------------------------------------------------------------------
# metrics


def recall_at_k(ranking: Ranking, golden: set[str], k: int) -> float:
    """Fraction of golden APIs present in the top-k of the ranking."""
    if not golden:
        raise EmptyGolden("golden set is empty")
    top = set(ranking.ids()[:k])
    return len(top & golden) / len(golden)


def selection_accuracy(selected: set[str], golden: set[str]) -> tuple[float, float]:
    """(precision, recall) of a selected set; empty selection has precision 1."""
    if not golden:
        raise EmptyGolden("golden set is empty")
    hits = len(set(selected) & golden)
    precision = hits / len(selected) if selected else 1.0
    recall = hits / len(golden)
    return precision, recall


def aggregate_votes(
    selections: Sequence[set[str]], threshold: int | None = None
) -> set[str]:
    """APIs chosen by at least ``threshold`` voters (default strict majority)."""
    if not selections:
        raise ValueError("need at least one voter")
    if threshold is None:
        threshold = len(selections) // 2 + 1
    counts: dict[str, int] = {}
    for chosen in selections:
        for api_id in chosen:
            counts[api_id] = counts.get(api_id, 0) + 1
    return {api_id for api_id, c in counts.items() if c >= threshold}
