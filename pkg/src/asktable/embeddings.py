"""Word vectors for the semantic matching fallback.

File format: one token per line, token followed by D space-separated
floats, fixed D across the file. Lookups are lowercase; out-of-vocabulary
tokens simply return nothing and matching falls back to keywords.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import EmbeddingLoadError

_DATA_DIR = Path(__file__).parent / "data"


class EmbeddingStore:
    def __init__(self, vectors: dict[str, np.ndarray], dimension: int):
        self.vectors = vectors
        self.dimension = dimension

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token.lower())

    def cosine(self, a: str, b: str) -> float | None:
        """Cosine similarity between two stored tokens, None if either is OOV."""
        va, vb = self.get(a), self.get(b)
        if va is None or vb is None:
            return None
        denom = float(np.linalg.norm(va) * np.linalg.norm(vb))
        if denom == 0.0:
            return None
        return float(np.dot(va, vb) / denom)


def load_embeddings(path: str | Path) -> EmbeddingStore:
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split(" ")
            token = parts[0]
            if not token:
                raise EmbeddingLoadError("missing token", lineno)
            try:
                floats = [float(x) for x in parts[1:] if x]
            except ValueError:
                raise EmbeddingLoadError("unparseable vector component", lineno) from None
            if not floats or any(not math.isfinite(f) for f in floats):
                raise EmbeddingLoadError("empty or non-finite vector", lineno)
            if dimension is None:
                dimension = len(floats)
            elif len(floats) != dimension:
                raise EmbeddingLoadError(
                    f"dimension {len(floats)} != expected {dimension}", lineno
                )
            vectors[token.lower()] = np.asarray(floats, dtype=np.float64)
    if dimension is None:
        raise EmbeddingLoadError("file contains no vectors", 0)
    return EmbeddingStore(vectors, dimension)


def bundled_embeddings_path() -> Path:
    return _DATA_DIR / "embeddings.txt"
