"""Brute-force ground truth at small scale.

Three reference computations that everything else is checked against:
exact longest j-tight path by exhaustive backtracking (with a node budget
and an explicit censored flag), exact equivalence-class sizes by permutation
enumeration, and Monte-Carlo estimation of the expected number of path
classes. A vectorized level-by-level enumerator handles sparse large-n
instances when the overlap leaves one fresh vertex per edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from ._rng import chain64_np, coin_mask_np, coin_threshold, derive_key, mix64
from .combinatorics import JTightPath, path_vertex_count, structural_params
from .hypergraph import ExplicitHypergraph

Z_BRUTEFORCE_MAX_V = 11


def z_ell_bruteforce(k: int, j: int, ell: int) -> int:
    """Count vertex orderings sharing the edge set of a reference path.

    Fixes the path 0,1,...,v-1 and counts permutations whose implied windows
    reproduce exactly its edge set, by backtracking with a window check as
    soon as each window completes. Rejects v(ell) > 11 (factorial blowup).
    """
    v = path_vertex_count(k, j, ell)
    if v > Z_BRUTEFORCE_MAX_V:
        raise ValueError(f"v(ell) = {v} exceeds the enumeration bound {Z_BRUTEFORCE_MAX_V}")
    d = k - j
    reference = {frozenset(range(i * d, i * d + k)) for i in range(ell)}

    count = 0
    seq: list[int] = []
    used = [False] * v

    def extend() -> None:
        nonlocal count
        pos = len(seq)
        if pos == v:
            count += 1
            return
        for x in range(v):
            if used[x]:
                continue
            seq.append(x)
            used[x] = True
            q = pos + 1
            ok = True
            if q >= k and (q - k) % d == 0:
                ok = frozenset(seq[q - k :]) in reference
            if ok:
                extend()
            seq.pop()
            used[x] = False

    extend()
    return count


@dataclass
class OracleResult:
    length: int
    witness: JTightPath
    censored: bool
    nodes: int


def _completions_index(H: ExplicitHypergraph, j: int) -> dict:
    """Map each j-subset of an edge to the sorted complements completing it."""
    idx: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for e in H.edges:
        for jsub in combinations(e, j):
            rest = tuple(v for v in e if v not in jsub)
            idx.setdefault(jsub, []).append(rest)
    return idx


def longest_path_exact(
    H: ExplicitHypergraph, j: int, node_budget: int = 5_000_000, method: str = "auto"
) -> OracleResult:
    """Exhaustive longest j-tight path in an explicit hypergraph.

    Backtracks over vertex sequences, appending k-j vertices per edge and
    checking every completed window for membership. ``node_budget`` caps the
    number of extension attempts; exceeding it returns the best path found so
    far with censored=True rather than a silently wrong optimum.

    method: "auto" picks the vectorized level enumerator when k-j == 1 and
    the tail space packs into 62 bits, otherwise the recursive search; "dfs"
    and "levels" force one.
    """
    k = H.k
    structural_params(k, j)
    if method == "auto":
        method = "levels" if (k - j == 1 and H.n ** j < 2**62) else "dfs"
    if method == "levels":
        if k - j != 1 or H.n ** j >= 2**62:
            raise ValueError("level enumeration requires k-j == 1 and a packable tail")
        return _longest_path_levels(H, j, node_budget)
    if method != "dfs":
        raise ValueError(f"unknown method: {method}")
    return _longest_path_dfs(H, j, node_budget)


def _longest_path_dfs(H: ExplicitHypergraph, j: int, node_budget: int) -> OracleResult:
    k, n = H.k, H.n
    d = k - j
    idx = _completions_index(H, j)
    best_seq = list(range(j))  # a bare j-set is always a length-0 path
    best_len = 0
    nodes = 0
    censored = False

    def search(seq: list[int], used: set[int], ell: int) -> None:
        nonlocal best_seq, best_len, nodes, censored
        if censored:
            return
        if ell > best_len:
            best_len = ell
            best_seq = list(seq)
        tail = tuple(sorted(seq[-j:]))
        for rest in idx.get(tail, ()):
            if any(v in used for v in rest):
                continue
            for ordering in permutations(rest):
                nodes += 1
                if nodes > node_budget:
                    censored = True
                    return
                seq.extend(ordering)
                used.update(ordering)
                search(seq, used, ell + 1)
                del seq[-d:]
                used.difference_update(ordering)

    for e in sorted(H.edges):
        for tail in permutations(e, j):
            head = sorted(v for v in e if v not in tail)
            seq = head + list(tail)
            nodes += 1
            if nodes > node_budget:
                censored = True
                break
            search(seq, set(seq), 1)
        if censored:
            break

    witness = JTightPath(k, j, tuple(best_seq))
    return OracleResult(best_len, witness, censored, nodes)


def _longest_path_levels(H: ExplicitHypergraph, j: int, node_budget: int) -> OracleResult:
    """Level-synchronous enumeration for k-j == 1: rows are vertex sequences."""
    k, n = H.k, H.n
    arr = H.edge_array()
    if len(arr) == 0:
        return OracleResult(0, JTightPath(k, j, tuple(range(j))), False, 0)

    # index: packed sorted j-set -> contiguous run of completing vertices
    pairs_key = []
    pairs_val = []
    for drop in range(k):
        keep = [c for c in range(k) if c != drop]
        key = arr[:, keep[0]].copy()
        for c in keep[1:]:
            key *= n
            key += arr[:, c]
        pairs_key.append(key)
        pairs_val.append(arr[:, drop])
    keys = np.concatenate(pairs_key)
    vals = np.concatenate(pairs_val)
    order = np.argsort(keys, kind="stable")
    keys, vals = keys[order], vals[order]

    # level 1: every ordered j-tail of every edge, head vertex first
    rows = []
    for tailcols in permutations(range(k), j):
        headcols = [c for c in range(k) if c not in tailcols]
        rows.append(arr[:, list(headcols) + list(tailcols)])
    cur = np.concatenate(rows)
    nodes = int(len(cur))
    censored = False
    best_row = cur[0] if len(cur) else None
    best_len = 1 if len(cur) else 0

    while len(cur):
        tail_sorted = np.sort(cur[:, -j:], axis=1)
        tail = tail_sorted[:, 0].copy()
        for c in range(1, j):
            tail *= n
            tail += tail_sorted[:, c]
        lo = np.searchsorted(keys, tail, side="left")
        hi = np.searchsorted(keys, tail, side="right")
        counts = hi - lo
        total = int(counts.sum())
        if total == 0:
            break
        if nodes + total > node_budget:
            censored = True
            break
        nodes += total
        rep = np.repeat(np.arange(len(cur)), counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        cand = vals[np.repeat(lo, counts) + offs]
        fresh = ~(cur[rep] == cand[:, None]).any(axis=1)
        if not fresh.any():
            break
        cur = np.concatenate([cur[rep[fresh]], cand[fresh, None]], axis=1)
        best_row = cur[0]
        best_len += 1

    if best_row is None:
        witness = JTightPath(k, j, tuple(range(j)))
    else:
        witness = JTightPath(k, j, tuple(int(v) for v in best_row))
    assert witness.ell == best_len
    return OracleResult(best_len, witness, censored, nodes)


def enumerate_path_classes(H: ExplicitHypergraph, j: int, ell: int) -> tuple[int, int]:
    """(class count, labeled sequence count) for j-tight paths of length ell.

    Classes are keyed by their edge set; the labeled count is the number of
    vertex sequences, which must be class count times z_ell.
    """
    k = H.k
    if ell == 0:
        return math.comb(H.n, j), math.perm(H.n, j)
    if ell == 2:
        # a 2-path is exactly an unordered pair of edges meeting in j vertices
        classes = 0
        edges = sorted(H.edges)
        for x, e in enumerate(edges):
            se = set(e)
            for f in edges[x + 1 :]:
                if len(se.intersection(f)) == j:
                    classes += 1
        from .combinatorics import z_ell

        return classes, classes * z_ell(k, j, 2)

    idx = _completions_index(H, j)
    d = k - j
    classes: set[frozenset[frozenset[int]]] = set()
    labeled = 0

    def search(seq: list[int], used: set[int], edges: list[frozenset[int]], m: int) -> None:
        nonlocal labeled
        if m == ell:
            labeled += 1
            classes.add(frozenset(edges))
            return
        tail = tuple(sorted(seq[-j:]))
        for rest in idx.get(tail, ()):
            if any(v in used for v in rest):
                continue
            for ordering in permutations(rest):
                seq.extend(ordering)
                used.update(ordering)
                edges.append(frozenset(seq[-k:]))
                search(seq, used, edges, m + 1)
                edges.pop()
                del seq[-d:]
                used.difference_update(ordering)

    for e in sorted(H.edges):
        for tail in permutations(e, j):
            head = sorted(v for v in e if v not in tail)
            seq = head + list(tail)
            search(seq, set(seq), [frozenset(e)], 1)
    # each labeled sequence has one canonical head-block order per edge walk;
    # the head block's (k-j)! orders were collapsed, restore them for ell>=1
    labeled *= math.factorial(d)
    return len(classes), labeled


def expectation_monte_carlo(
    n: int, k: int, j: int, ell: int, p: float, samples: int, seed: int
) -> tuple[float, float]:
    """Sample mean and standard error of the number of length-ell classes.

    Draws explicit hypergraphs with the keyed coin and counts equivalence
    classes per sample. The (k=3-like) two-edge case is counted directly from
    the coin matrix; other shapes enumerate per sample.
    """
    if n > 12:
        raise ValueError(f"Monte-Carlo estimation supports n <= 12, got {n}")
    if samples < 1:
        raise ValueError("need at least one sample")
    master = derive_key(seed, "mc-expectation")
    sample_keys = chain64_np(master, [np.arange(samples, dtype=np.uint64)])
    edge_keys = np.array(
        [derive_key(int(sk), "edge-coin") for sk in sample_keys], dtype=np.uint64
    )
    ksets = list(combinations(range(n), k))
    cols = [np.array([K[i] for K in ksets], dtype=np.uint64) for i in range(k)]
    threshold = coin_threshold(p)
    # (samples, k-sets) coin matrix, one chunk of samples at a time
    counts = np.empty(samples, dtype=np.int64)
    if ell == 2:
        pair_idx = [
            (x, y)
            for x in range(len(ksets))
            for y in range(x + 1, len(ksets))
            if len(set(ksets[x]).intersection(ksets[y])) == j
        ]
        px = np.array([x for x, _ in pair_idx])
        py = np.array([y for _, y in pair_idx])
    chunk = max(1, 2**22 // max(len(ksets), 1))
    for start in range(0, samples, chunk):
        keyblock = edge_keys[start : start + chunk, None]
        mask = coin_mask_np(chain64_np(keyblock, cols), threshold)
        if ell == 2:
            counts[start : start + chunk] = (mask[:, px] & mask[:, py]).sum(axis=1)
        else:
            for row in range(mask.shape[0]):
                edges = [ksets[i] for i in np.flatnonzero(mask[row])]
                H = ExplicitHypergraph(n, k, edges)
                counts[start + row] = enumerate_path_classes(H, j, ell)[0]
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return mean, se
