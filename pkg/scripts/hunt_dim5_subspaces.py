#!/usr/bin/env python3
"""Survey product vectors in random five-dimensional three-qubit subspaces.

A four-dimensional subspace with no product vector exists (the UPB
complement).  Whether a five-dimensional subspace can hold fewer than five
independent product vectors is open; this sweep gathers evidence.  For a
generic five-dimensional subspace the count comes out as six distinct product
vectors spanning all five dimensions, and no draw so far has produced an
independence rank below five.

Usage: python scripts/hunt_dim5_subspaces.py [n_subspaces] [seed]
"""

import sys
from collections import Counter

import numpy as np

from upbkit import linalg, qubits, subspace_product_hunt


def run(n_subspaces: int, seed: int) -> int:
    parts = qubits(3)
    counts = Counter()
    ranks = Counter()
    low_rank_hits = []
    for s in range(n_subspaces):
        rng = np.random.default_rng([seed, s])
        raw = rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5))
        basis = linalg.orthonormalize([raw[:, k] for k in range(5)])
        result = subspace_product_hunt(basis, parts, restarts=128, seed=[seed, s])
        counts[result.distinct_count] += 1
        ranks[result.rank] += 1
        if result.rank < 5:
            low_rank_hits.append(s)
        print(f"subspace {s:4d}: {result.distinct_count} distinct product vectors, rank {result.rank}")

    print("\ndistinct-count histogram:", dict(sorted(counts.items())))
    print("rank histogram:          ", dict(sorted(ranks.items())))
    if low_rank_hits:
        print(f"subspaces with independence rank < 5 (re-examine!): {low_rank_hits}")
    else:
        print("no subspace with fewer than 5 independent product vectors found")
    return 0


if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 2026
    sys.exit(run(n, seed))
