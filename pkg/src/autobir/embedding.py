"""Text embedders for the semantic index.

The deterministic embedder is the offline workhorse: token feature hashing
into a fixed number of dimensions with sha256, signed buckets, and L2
normalization. Identical text always produces the identical vector, across
runs and platforms, which is what the test suite and the scripted pipeline
rely on. The remote embedder speaks a minimal JSON contract for deployments
with a real embedding service.
"""

from __future__ import annotations

import hashlib
import logging
import re
from functools import lru_cache

import numpy as np
import requests

from .errors import EmbedderError

logger = logging.getLogger(__name__)

_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z0-9]+|[A-Z]+")
_SPLIT_RE = re.compile(r"[^0-9A-Za-z]+")


def split_words(text: str) -> list[str]:
    """Lower-cased word tokens; camelCase and snake_case compounds split.

    Trailing plural 's' is stripped from tokens of four letters or more so
    "helmets" and "helmet" land in the same bucket.
    """
    tokens: list[str] = []
    for chunk in _SPLIT_RE.split(text):
        if not chunk:
            continue
        for part in _CAMEL_RE.findall(chunk):
            token = part.lower()
            if len(token) >= 4 and token.endswith("s"):
                token = token[:-1]
            tokens.append(token)
    return tokens


@lru_cache(maxsize=65536)
def _bucket(token: str, dimension: int) -> tuple[int, float]:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    index = int.from_bytes(digest[:4], "big") % dimension
    sign = 1.0 if digest[4] & 1 else -1.0
    return index, sign


class DeterministicHashEmbedder:
    """Signed feature hashing over word tokens; unit L2 norm output."""

    def __init__(self, dimension: int = 256) -> None:
        if dimension <= 0:
            raise EmbedderError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.embedder_id = f"hash-sha256-{dimension}"

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in split_words(text):
            index, sign = _bucket(token, self.dimension)
            vec[index] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class RemoteEmbedder:
    """HTTP embedder: POST {"texts": [...]} -> {"vectors": [[...], ...]}.

    Vectors are re-normalized locally so index invariants hold regardless of
    what the service returns.
    """

    def __init__(self, endpoint: str, dimension: int, timeout_s: float = 30.0) -> None:
        self.endpoint = endpoint
        self.dimension = dimension
        self.timeout_s = timeout_s
        self.embedder_id = f"remote-{dimension}"

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        try:
            response = requests.post(
                self.endpoint, json={"texts": texts}, timeout=self.timeout_s
            )
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise EmbedderError(f"embedding service failed: {exc}") from exc
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise EmbedderError("embedding service returned a malformed payload")
        out = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dimension,):
                raise EmbedderError(
                    f"expected {self.dimension}-dimensional vectors, got {arr.shape}"
                )
            norm = float(np.linalg.norm(arr))
            if norm > 0.0:
                arr = arr / norm
            out.append(arr)
        return out

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]
