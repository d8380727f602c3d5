"""Two interchangeable edge oracles for the binomial random hypergraph.

ExplicitHypergraph stores the full edge set (small n, comparable against the
exact search). LazyHypergraph answers "is this k-set an edge" by flipping a
keyed coin on first query, realizing H^k(n,p) under the search's guarantee
that no k-set is queried twice. Both use the same coin function, so a run on
either backend with equal seeds sees identical edges.

Also provides a rank-sampling generator for instances whose k-set space is
too large to enumerate but whose edge list is small (sparse subcritical
measurements); its instances are not coin-compatible with the lazy backend.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ._rng import MASK64, chain64, chain64_np, coin_mask_np, coin_threshold, derive_key, mix64

ENUMERATION_BUDGET = 10**8


class EnumerationBudgetError(ValueError):
    """The k-set space is too large to enumerate; use the lazy backend."""


class BackendError(TypeError):
    """Operation not supported by this hypergraph backend."""


def canonical_kset(vertices: Iterable[int]) -> tuple[int, ...]:
    vs = tuple(vertices)
    if any(vs[i] >= vs[i + 1] for i in range(len(vs) - 1)):
        raise ValueError(f"vertex set must be strictly increasing: {vs}")
    return vs


def _check_canonical(K: Sequence[int], k: int, n: int) -> None:
    if len(K) != k:
        raise ValueError(f"expected a {k}-set, got {len(K)} vertices")
    if K[0] < 0 or K[-1] >= n:
        raise ValueError(f"vertices out of range [0, {n}): {K}")
    if any(K[i] >= K[i + 1] for i in range(k - 1)):
        raise ValueError(f"vertex set must be strictly increasing: {K}")


def colex_tables(n: int, m: int) -> list[np.ndarray]:
    """tables[i][c] = C(c, i+1) for c in [0, n], used to unrank m-sets."""
    out = []
    for i in range(1, m + 1):
        col = np.array([math.comb(c, i) for c in range(n + 1)], dtype=np.int64)
        out.append(col)
    return out


def unrank_colex(ranks: np.ndarray, m: int, n: int, tables=None) -> np.ndarray:
    """Map colex ranks to sorted m-sets over [0, n); returns shape (len, m).

    The m-set {c_1 < ... < c_m} has colex rank sum_i C(c_i, i).
    """
    if tables is None:
        tables = colex_tables(n, m)
    rem = np.asarray(ranks, dtype=np.int64).copy()
    cols = np.empty((rem.shape[0], m), dtype=np.int64)
    for i in range(m, 0, -1):
        c = np.searchsorted(tables[i - 1], rem, side="right") - 1
        cols[:, i - 1] = c
        rem -= tables[i - 1][c]
    return cols


class ExplicitHypergraph:
    """Immutable stored k-uniform hypergraph on [0, n)."""

    def __init__(self, n: int, k: int, edges: Iterable[Sequence[int]]):
        if not 2 <= k <= n:
            raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
        self.n = n
        self.k = k
        es = set()
        for e in edges:
            t = canonical_kset(e)
            _check_canonical(t, k, n)
            es.add(t)
        self.edges = frozenset(es)
        self._packed: np.ndarray | None = None

    def query_edge(self, K: Sequence[int]) -> bool:
        _check_canonical(K, self.k, self.n)
        return tuple(K) in self.edges

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        """Edges as a sorted (m, k) int64 array, lexicographic row order."""
        if not self.edges:
            return np.empty((0, self.k), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    def _pack_rows(self, cols: Sequence[np.ndarray]) -> np.ndarray:
        key = cols[0].astype(np.int64, copy=True)
        for c in cols[1:]:
            key *= self.n
            key += c
        return key

    def bulk_query(self, cols: Sequence[np.ndarray]) -> np.ndarray:
        """Membership mask for many canonical k-sets given as columns."""
        if self.n**self.k >= 2**62:
            ks = zip(*(np.asarray(c) for c in cols))
            return np.array([tuple(int(v) for v in K) in self.edges for K in ks])
        if self._packed is None:
            arr = self.edge_array()
            packed = self._pack_rows([arr[:, i] for i in range(self.k)]) if len(arr) else np.empty(0, np.int64)
            self._packed = np.sort(packed)
        keys = self._pack_rows([np.asarray(c) for c in cols])
        idx = np.searchsorted(self._packed, keys)
        idx = np.minimum(idx, max(len(self._packed) - 1, 0))
        if len(self._packed) == 0:
            return np.zeros(keys.shape, dtype=bool)
        return self._packed[idx] == keys

    def relabeled(self, perm: Sequence[int]) -> "ExplicitHypergraph":
        return ExplicitHypergraph(
            self.n, self.k, [sorted(perm[v] for v in e) for e in self.edges]
        )

    def write_text(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(f"{self.n} {self.k}\n")
            for e in sorted(self.edges):
                fh.write(" ".join(map(str, e)) + "\n")

    @classmethod
    def read_text(cls, path: str) -> "ExplicitHypergraph":
        with open(path) as fh:
            n, k = map(int, fh.readline().split())
            edges = [tuple(map(int, line.split())) for line in fh if line.strip()]
        return cls(n, k, edges)


class LazyHypergraph:
    """Deferred-decision H^k(n,p): each k-set's coin is flipped on first query.

    The coin for K is chain-hash(edge key, K) compared against the threshold
    for p, so outcomes of distinct k-sets are independent Bernoulli(p) for
    practical purposes and identical to generate_explicit with the same seed.
    ``record`` keeps the revealed map for verification; production searches
    never re-query, so recording is optional.
    """

    def __init__(self, n: int, k: int, p: float, seed: int, record: bool = False):
        if not 2 <= k <= n:
            raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
        self.n = n
        self.k = k
        self.p = p
        self.seed = seed
        self.edge_key = derive_key(seed, "edge-coin")
        self.threshold = coin_threshold(p)
        self.record = record
        self.revealed: dict[tuple[int, ...], bool] = {}

    def query_edge(self, K: Sequence[int]) -> bool:
        _check_canonical(K, self.k, self.n)
        t = tuple(K)
        if self.record and t in self.revealed:
            return self.revealed[t]
        hit = chain64(self.edge_key, t) < self.threshold
        if self.record:
            self.revealed[t] = hit
        return hit

    def bulk_query(self, cols: Sequence[np.ndarray]) -> np.ndarray:
        return coin_mask_np(chain64_np(self.edge_key, cols), self.threshold)


def query_edge(H, K: Sequence[int]) -> bool:
    return H.query_edge(K)


def edge_count(H) -> int:
    if isinstance(H, LazyHypergraph):
        raise BackendError("edge_count is undefined on the lazy backend")
    return H.edge_count


def generate_explicit(
    n: int, k: int, p: float, seed: int, budget: int = ENUMERATION_BUDGET
) -> ExplicitHypergraph:
    """Materialize H^k(n,p) by flipping the keyed coin for every k-set.

    Refuses when C(n,k) exceeds the enumeration budget; large sparse
    instances should use LazyHypergraph or sample_explicit instead.
    """
    total = math.comb(n, k)
    if total > budget:
        raise EnumerationBudgetError(
            f"C({n},{k}) = {total} exceeds the enumeration budget {budget}; "
            "use the lazy backend"
        )
    edge_key = derive_key(seed, "edge-coin")
    threshold = coin_threshold(p)
    tables = colex_tables(n, k)
    edges: list[np.ndarray] = []
    chunk = 1 << 20
    for start in range(0, total, chunk):
        ranks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cols_mat = unrank_colex(ranks, k, n, tables)
        cols = [cols_mat[:, i] for i in range(k)]
        mask = coin_mask_np(chain64_np(edge_key, cols), threshold)
        if mask.any():
            edges.append(cols_mat[mask])
    rows = np.concatenate(edges) if edges else np.empty((0, k), dtype=np.int64)
    return ExplicitHypergraph(n, k, [tuple(int(v) for v in row) for row in rows])


def sample_explicit(n: int, k: int, p: float, seed: int) -> ExplicitHypergraph:
    """Draw H^k(n,p) by sampling its edge count and then distinct edge ranks.

    Exact in distribution (binomial count, uniform distinct k-sets given the
    count) and deterministic in ``seed``, but not coin-compatible with the
    lazy backend. Intended for sparse instances where C(n,k) is unenumerable
    while p*C(n,k) is small.
    """
    from scipy.stats import binom

    total = math.comb(n, k)
    if total >= 2**62:
        raise ValueError(f"C({n},{k}) too large to rank-sample")
    u = (mix64(derive_key(seed, "edge-count")) + 0.5) / 2.0**64
    count = int(binom.ppf(u, total, p)) if 0.0 < p < 1.0 else int(round(p * total))
    count = max(0, min(count, total))
    if count > 5 * 10**7:
        raise ValueError(f"sampled edge count {count} too large to materialize")

    rank_key = derive_key(seed, "edge-ranks")
    chosen = np.empty(0, dtype=np.int64)
    cursor = 0
    while len(chosen) < count:
        need = max(count - len(chosen), 1024)
        idx = np.arange(cursor, cursor + 2 * need, dtype=np.uint64)
        cursor += 2 * need
        ranks = (chain64_np(rank_key, [idx]) % np.uint64(total)).astype(np.int64)
        pool = np.concatenate([chosen, ranks])
        uniq, first = np.unique(pool, return_index=True)
        chosen = uniq[np.argsort(first)]  # first-occurrence order, deterministic
    chosen = np.sort(chosen[:count])
    cols = unrank_colex(chosen, k, n)
    return ExplicitHypergraph(n, k, [tuple(int(v) for v in row) for row in cols])
