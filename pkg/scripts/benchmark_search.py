"""Time exact nearest neighbour search across index sizes.

The search is exhaustive by design (indexes hold ontology entities, which
number in the hundreds at most), so this mostly documents that the exact
scan stays comfortably interactive well past realistic sizes.

    python3 scripts/benchmark_search.py [--dimension 256] [--k 5]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from autobir.search import IndexEntry, SemanticIndex, knn_search

SIZES = (10, 100, 1_000, 10_000, 100_000)


class _StoredVectorEmbedder:
    """Returns a fixed random unit vector; entries carry their own vectors."""

    embedder_id = "benchmark"

    def __init__(self, dimension: int, rng: random.Random):
        self.dimension = dimension
        vec = np.array([rng.gauss(0, 1) for _ in range(dimension)])
        self.query_vec = vec / np.linalg.norm(vec)

    def embed(self, text: str) -> np.ndarray:
        return self.query_vec


def build_random_index(n: int, dimension: int, rng: random.Random) -> SemanticIndex:
    vectors = np.random.default_rng(rng.randrange(2**31)).normal(size=(n, dimension))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    entries = [
        IndexEntry(f"e{i:06d}", "class", f"e{i:06d}", "bench", vectors[i])
        for i in range(n)
    ]
    return SemanticIndex(_StoredVectorEmbedder(dimension, rng), "bench", entries)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dimension", type=int, default=256)
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    print(f"dimension={args.dimension} k={args.k} repeats={args.repeats}")
    print(f"{'entries':>10}  {'median ms':>10}  {'qps':>10}")
    for n in SIZES:
        index = build_random_index(n, args.dimension, rng)
        timings = []
        for _ in range(args.repeats):
            start = time.perf_counter()
            knn_search(index, "q", args.k)
            timings.append(time.perf_counter() - start)
        median = sorted(timings)[len(timings) // 2]
        print(f"{n:>10}  {median * 1000:>10.3f}  {1.0 / median:>10.1f}")


if __name__ == "__main__":
    main()
