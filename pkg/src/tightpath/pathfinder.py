"""Depth-first search for j-tight paths driven by edge queries.

The search maintains a partition of all j-sets into neutral (untouched),
active (a LIFO stack), and explored. The outer loop promotes the priority-least
neutral j-set to a new start; the inner loop takes the top-of-stack j-set J and
queries candidate edges K = J u X in priority order, where X ranges over the
(k-j)-sets that are disjoint from the current path (Q2), not yet queried from
J (Q3), and such that K contains no explored j-set (Q4). A positive answer
appends K as the next path edge and activates a batch of C(k-j, a) successor
j-sets; when J runs out of candidates it is explored, and once a whole batch
is explored the edge that spawned it is removed.

Candidate priorities are keyed hashes (ties broken by the canonical vertex
tuple), so queries on one k-set never condition the others and a run is a
deterministic function of (backend, seed, config).

The path is stored as blocks: one block of size a, then one of size k-j per
remaining position. Edge e_m equals the last a vertices of block m-1 plus
blocks m..m+r, so a j-set activated from e_m has its partition parts at blocks
m+1..m+r+1 and extends exactly when the path again has m edges. Extending
reorders the donor block so the extender's C0 occupies its tail; no existing
edge depends on that block's internal order at that moment.

Two vectorized scan kernels cover the regimes the experiments need
(k-j = 1, and j = 1 with k = 3); both are observationally identical to the
generic scan, which carries the invariant checks and full query traces.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from ._rng import chain64, chain64_np, derive_key, mix64
from .combinatorics import JTightPath, StructuralParams, structural_params
from .monitor import EXHAUSTED, Monitor, StoppingConfig

TRACE_LEVELS = ("summary", "events", "full")

MATERIALIZE_LIMIT = 1_000_000
RESERVOIR_SIZE = 8192
CHUNK = 1 << 20


class Batch:
    """Bookkeeping for the j-sets activated together from one edge.

    edge_index 0 marks a new-start singleton; its exhaustion removes nothing.
    """

    __slots__ = ("edge_index", "remaining", "size", "skipped")

    def __init__(self, edge_index: int):
        self.edge_index = edge_index
        self.remaining = 0
        self.size = 0
        self.skipped = 0


class ActiveRecord:
    """One active j-set: identity, extendable partition, spawning edge index,
    owning batch, and the scan cursor for Q3 resume."""

    __slots__ = ("jset", "partition", "edge_index", "batch", "order", "idx", "cursor", "queried")

    def __init__(self, jset, partition, edge_index, batch):
        self.jset = jset
        self.partition = partition
        self.edge_index = edge_index
        self.batch = batch
        self.order = None  # generic engine: [(hash, K, X)] in query order
        self.idx = 0
        self.cursor = None  # kernels: (hash, K row) of the last consumed candidate
        self.queried = None  # checked mode: X tuples actually queried


def activate_batch(state, J: Sequence[int], partition, K: Sequence[int]):
    """Successor j-sets and partitions for a found edge K queried from J.

    For r >= 1 the successors are (Z u C2 u ... u Cr u (K\\J), (Z, C2, ..., Cr, K\\J))
    over the a-subsets Z of C1; for r = 0 they are the a-subsets of K\\J with
    singleton partition (Z,). Returned in canonical (sorted j-set) order; the
    search itself pushes them in priority order.
    """
    params = state.params if hasattr(state, "params") else state
    jset = tuple(sorted(J))
    X = tuple(sorted(set(K) - set(jset)))
    if len(X) != params.k - params.j or not set(jset) <= set(K):
        raise ValueError("K must extend J by exactly k-j fresh vertices")
    members = []
    if params.r >= 1:
        c1 = partition[1]
        rest = tuple(tuple(part) for part in partition[2:])
        for Z in combinations(c1, params.a):
            parts = (Z,) + rest + (X,)
            js = tuple(sorted(v for part in parts for v in part))
            members.append((js, parts))
    else:
        for Z in combinations(X, params.a):
            members.append((Z, (Z,)))
    members.sort()
    return members


class _NeutralStream:
    """Yields neutral j-sets in priority order, skipping discovered ones.

    Small universes are materialized and argsorted once; larger ones keep a
    top-M reservoir refreshed by chunked scans over colex ranks (M quadruples
    whenever the reservoir runs dry before the universe does).
    """

    def __init__(self, n: int, j: int, key: int, discovered: set):
        self.n, self.j, self.key = n, j, key
        self.discovered = discovered
        self.total = math.comb(n, j)
        self.limit = min(RESERVOIR_SIZE, self.total)
        self._ptr = 0
        self._rows = self._build(self.total if self.total <= MATERIALIZE_LIMIT else self.limit)

    def _build(self, m: int) -> np.ndarray:
        from .hypergraph import colex_tables, unrank_colex

        tables = colex_tables(self.n, self.j)
        keep_h = np.empty(0, dtype=np.uint64)
        keep_r = np.empty(0, dtype=np.int64)
        for lo in range(0, self.total, CHUNK):
            ranks = np.arange(lo, min(lo + CHUNK, self.total), dtype=np.int64)
            cols = unrank_colex(ranks, self.j, self.n, tables)
            h = chain64_np(self.key, [cols[:, c] for c in range(self.j)])
            h = np.concatenate([keep_h, h])
            ranks = np.concatenate([keep_r, ranks])
            if len(h) > m:
                idx = np.argpartition(h, m - 1)[:m]
                h, ranks = h[idx], ranks[idx]
            keep_h, keep_r = h, ranks
        cols = unrank_colex(np.sort(keep_r), self.j, self.n, tables)
        h = chain64_np(self.key, [cols[:, c] for c in range(self.j)])
        order = np.lexsort(tuple(cols[:, c] for c in reversed(range(self.j))) + (h,))
        return cols[order]

    def pop(self) -> Optional[tuple]:
        while True:
            while self._ptr < len(self._rows):
                row = tuple(int(v) for v in self._rows[self._ptr])
                self._ptr += 1
                if row not in self.discovered:
                    return row
            if len(self._rows) >= self.total:
                return None
            self.limit = min(self.limit * 4, self.total)
            self._ptr = 0
            self._rows = self._build(self.limit)


@dataclass
class RunTrace:
    """Event log and summary of one search run. JSON-lines serializable:
    header line, one event per line, summary line last."""

    n: int
    k: int
    j: int
    seed: int
    mode: str
    trace_level: str
    stop_reason: str = "n/a"
    max_ell: int = 0
    final_ell: int = 0
    queries: int = 0
    new_starts: int = 0
    positives: int = 0
    activations: int = 0
    skips: int = 0
    discovered: int = 0
    explored: int = 0
    ms: float = 0.0
    events: list = field(default_factory=list)

    SCHEMA = 1

    def summary(self) -> dict:
        return {
            "stop_reason": self.stop_reason,
            "max_ell": self.max_ell,
            "final_ell": self.final_ell,
            "queries": self.queries,
            "new_starts": self.new_starts,
            "edges_found": self.positives,
            "activations": self.activations,
            "skips": self.skips,
            "discovered": self.discovered,
            "explored": self.explored,
            "ms": round(self.ms, 3),
        }

    def header(self) -> dict:
        return {
            "schema": self.SCHEMA,
            "n": self.n,
            "k": self.k,
            "j": self.j,
            "seed": self.seed,
            "mode": self.mode,
            "trace_level": self.trace_level,
        }

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(json.dumps({"kind": "header", **self.header()}) + "\n")
            for ev in self.events:
                fh.write(json.dumps(ev) + "\n")
            fh.write(json.dumps({"kind": "summary", **self.summary()}) + "\n")

    @classmethod
    def read_jsonl(cls, path) -> "RunTrace":
        with open(path) as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        head, tail = lines[0], lines[-1]
        if head.get("kind") != "header" or head.get("schema") != cls.SCHEMA:
            raise ValueError("unrecognized trace header")
        if tail.get("kind") != "summary":
            raise ValueError("trace missing summary line")
        trace = cls(
            n=head["n"], k=head["k"], j=head["j"], seed=head["seed"],
            mode=head["mode"], trace_level=head["trace_level"],
        )
        trace.events = lines[1:-1]
        trace.stop_reason = tail["stop_reason"]
        trace.max_ell = tail["max_ell"]
        trace.final_ell = tail["final_ell"]
        trace.queries = tail["queries"]
        trace.new_starts = tail["new_starts"]
        trace.positives = tail["edges_found"]
        trace.activations = tail["activations"]
        trace.skips = tail["skips"]
        trace.discovered = tail["discovered"]
        trace.explored = tail["explored"]
        trace.ms = tail["ms"]
        return trace


class PathFinder:
    """One depth-first run over a hypergraph backend.

    mode: "auto" uses a vectorized kernel when the shape allows, else the
    generic scan; "generic" forces the scalar scan; "checked" additionally
    asserts state invariants after every event and enables replayable
    bookkeeping. audit=True (implies checked) re-derives the full allowed
    family before every query and asserts the scan agrees.
    """

    def __init__(
        self,
        H,
        j: int,
        seed: int = 0,
        stopping: Optional[StoppingConfig] = None,
        mode: str = "auto",
        trace_level: str = "events",
        audit: bool = False,
    ):
        if trace_level not in TRACE_LEVELS:
            raise ValueError(f"trace_level must be one of {TRACE_LEVELS}")
        if mode not in ("auto", "generic", "checked"):
            raise ValueError("mode must be auto, generic, or checked")
        self.H = H
        self.n, self.k, self.j = H.n, H.k, j
        self.params: StructuralParams = structural_params(self.k, j)
        self.d = self.k - j
        self.seed = seed
        self.config = stopping if stopping is not None else StoppingConfig.unbounded()
        self.monitor = Monitor(self.n, self.k, j, self.config)
        self.audit = audit
        self.checked = audit or mode == "checked"
        self.mode = "checked" if self.checked else mode
        if self.mode == "auto" and trace_level != "full":
            if self.d == 1:
                self.kernel = "vertex"
            elif self.j == 1 and self.d == 2:
                self.kernel = "pair"
            else:
                self.kernel = None
        else:
            self.kernel = None
        self.trace_level = trace_level
        self.events: list = []

        self.sigj_key = derive_key(seed, "sigma-j")
        self.sigk_key = derive_key(seed, "sigma-k")

        self.t = 0
        self.ell = 0
        self.max_ell = 0
        self.positives = 0
        self.activations = 0
        self.skips = 0

        self.blocks: list[list[int]] = []
        self.edges: list[tuple] = []
        self.path_vertex_set: set[int] = set()
        self.in_path = np.zeros(self.n, dtype=bool)

        self.stack: list[ActiveRecord] = []
        self.discovered: set[tuple] = set()
        self.explored: set[tuple] = set()
        self.explored_partners: dict[tuple, list[int]] = {}
        self.explored_vert = np.zeros(self.n, dtype=bool) if j == 1 else None
        self.queried_ksets: set = set() if self.checked else None

        self.stream = _NeutralStream(self.n, j, self.sigj_key, self.discovered)
        self.stop_reason: Optional[str] = None
        self.ms = 0.0

    # -- event log ---------------------------------------------------------

    def _emit(self, ev: dict) -> None:
        if self.trace_level != "summary":
            self.events.append(ev)

    # -- path surgery ------------------------------------------------------

    def _reset_path(self, jset: tuple, partition) -> None:
        self.blocks = [list(part) for part in partition]
        self.edges = []
        self.ell = 0
        self.path_vertex_set = set(jset)
        self.in_path.fill(False)
        self.in_path[list(jset)] = True

    def _extend(self, rec: ActiveRecord, X: tuple, K: tuple) -> None:
        m = rec.edge_index
        assert self.ell == m, "extension out of position"
        donor = self.blocks[m]
        c0 = set(rec.partition[0])
        donor[:] = [v for v in donor if v not in c0] + sorted(c0)
        self.blocks.append(sorted(X))
        for v in X:
            self.path_vertex_set.add(v)
            self.in_path[v] = True
        self.ell += 1
        self.max_ell = max(self.max_ell, self.ell)
        self.edges.append(K)
        self._emit({"event": "extend", "t": self.t, "ell": self.ell,
                    "jset": list(rec.jset), "edge": list(K)})
        if self.checked:
            self._check_path()

    def _remove_edge(self, batch: Batch) -> None:
        assert batch.edge_index >= 1 and batch.remaining == 0
        assert self.ell == batch.edge_index, "retreat out of position"
        gone = self.blocks.pop()
        for v in gone:
            self.path_vertex_set.remove(v)
            self.in_path[v] = False
        self.edges.pop()
        self.ell -= 1
        self._emit({"event": "edge_removed", "t": self.t,
                    "edge_index": batch.edge_index, "ell": self.ell})
        if self.checked:
            self._check_path()

    def _check_path(self) -> None:
        p = self.params
        assert len(self.blocks) == 1 + p.r + self.ell
        assert len(self.blocks[0]) == p.a
        assert all(len(b) == self.d for b in self.blocks[1:])
        flat = [v for b in self.blocks for v in b]
        assert set(flat) == self.path_vertex_set and len(flat) == len(self.path_vertex_set)
        if self.ell >= 1:
            path = JTightPath(self.k, self.j, tuple(flat))
            assert list(path.edges()) == self.edges

    # -- candidate scans ----------------------------------------------------

    def _t_stop(self) -> float:
        cut = self.monitor.cutoff()
        return cut if math.isinf(cut) else math.ceil(cut)

    def _q4_dead(self, K: tuple) -> bool:
        return any(sub in self.explored for sub in combinations(K, self.j))

    def _materialize_order(self, rec: ActiveRecord) -> None:
        allowed = [v for v in range(self.n) if v not in self.path_vertex_set]
        ent = []
        for X in combinations(allowed, self.d):
            K = tuple(sorted(rec.jset + X))
            ent.append((chain64(self.sigk_key, K), K, X))
        ent.sort()
        rec.order = ent
        rec.idx = 0
        if self.checked:
            rec.queried = set()

    def _scan_generic(self, rec: ActiveRecord):
        if rec.order is None:
            self._materialize_order(rec)
        t_stop = self._t_stop()
        full = self.trace_level == "full"
        while rec.idx < len(rec.order):
            _, K, X = rec.order[rec.idx]
            if self._q4_dead(K):
                rec.idx += 1
                continue
            if self.audit:
                self._audit_candidate(rec, X)
            rec.idx += 1
            self.t += 1
            outcome = self.H.query_edge(K)
            if self.checked:
                assert K not in self.queried_ksets, "duplicate k-set query"
                self.queried_ksets.add(K)
                rec.queried.add(X)
            if full:
                self._emit({"event": "query", "t": self.t, "jset": list(rec.jset),
                            "edge": list(K), "outcome": bool(outcome)})
            if outcome:
                return ("success", X, K)
            if self.t >= t_stop:
                return ("stop", self.monitor.time_reason(self.t))
        return ("exhausted",)

    def _audit_candidate(self, rec: ActiveRecord, X: tuple) -> None:
        fam = allowed_candidates(self)
        assert fam and fam[0] == X, f"scan order diverged: {X} vs {fam[:1]}"

    def _vertex_cols(self, rec: ActiveRecord, xs: np.ndarray) -> list[np.ndarray]:
        jarr = np.asarray(rec.jset, dtype=np.int64)
        pos = np.searchsorted(jarr, xs)
        cols = []
        for c in range(self.k):
            below = jarr[c] if c < self.j else 0
            above = jarr[c - 1] if c >= 1 else 0
            cols.append(np.where(pos > c, below, np.where(pos == c, xs, above)))
        return cols

    def _pair_cols(self, rec: ActiveRecord, x: np.ndarray, y: np.ndarray) -> list[np.ndarray]:
        u = rec.jset[0]
        c0 = np.where(x < u, x, u)
        c2 = np.where(y > u, y, u)
        c1 = (x + y + u) - c0 - c2
        return [c0, c1, c2]

    @staticmethod
    def _row(cols: Sequence[np.ndarray], i: int) -> tuple:
        return tuple(int(col[i]) for col in cols)

    def _cursor_alive(self, rec: ActiveRecord, h: np.ndarray, cols) -> np.ndarray:
        alive = np.ones(len(h), dtype=bool)
        if rec.cursor is not None:
            ch, crow = rec.cursor
            alive = h > np.uint64(ch)
            for i in np.flatnonzero(h == np.uint64(ch)):
                if self._row(cols, i) > crow:
                    alive[i] = True
        return alive

    def _scan_kernel(self, rec: ActiveRecord):
        if self.kernel == "vertex":
            xs = np.flatnonzero(~self.in_path).astype(np.int64)
            if xs.size == 0:
                return ("exhausted",)
            cols = self._vertex_cols(rec, xs)
            make_x = lambda i: (int(xs[i]),)
        else:
            xs = np.flatnonzero(~self.in_path).astype(np.int64)
            if xs.size < 2:
                return ("exhausted",)
            i1, i2 = np.triu_indices(xs.size, 1)
            x, y = xs[i1], xs[i2]
            cols = self._pair_cols(rec, x, y)
            make_x = lambda i: (int(x[i]), int(y[i]))
        h = chain64_np(self.sigk_key, cols)
        alive = self._cursor_alive(rec, h, cols)

        if self.kernel == "vertex":
            for dd in range(self.j):
                partners = self.explored_partners.get(rec.jset[:dd] + rec.jset[dd + 1:])
                if partners:
                    alive &= ~np.isin(xs, np.asarray(partners, dtype=np.int64))
        else:
            dead = self.explored_vert
            alive &= ~dead[x] & ~dead[y]

        if not alive.any():
            return ("exhausted",)
        t_stop = self._t_stop()
        coins = self.H.bulk_query(cols)
        succ = alive & coins
        if not succ.any():
            q = int(alive.sum())
            if self.t + q >= t_stop:
                self.t = int(t_stop)
                return ("stop", self.monitor.time_reason(self.t))
            self.t += q
            return ("exhausted",)
        hmin = h[succ].min()
        tied = np.flatnonzero(succ & (h == hmin))
        win = min(tied, key=lambda i: self._row(cols, i))
        q = int((alive & (h < hmin)).sum()) + 1
        wrow = self._row(cols, win)
        for i in np.flatnonzero(alive & (h == hmin)):
            if i != win and self._row(cols, i) < wrow:
                q += 1
        if self.t + q > t_stop:
            self.t = int(t_stop)
            return ("stop", self.monitor.time_reason(self.t))
        self.t += q
        rec.cursor = (int(hmin), wrow)
        return ("success", make_x(win), wrow)

    def _scan(self, rec: ActiveRecord):
        if self.kernel is not None:
            return self._scan_kernel(rec)
        return self._scan_generic(rec)

    # -- search loop ---------------------------------------------------------

    def _new_start(self) -> bool:
        jset = self.stream.pop()
        if jset is None:
            return False
        p = self.params
        partition = (jset[: p.a],) + tuple(
            jset[p.a + i * self.d: p.a + (i + 1) * self.d] for i in range(p.r)
        )
        self._reset_path(jset, partition)
        batch = Batch(edge_index=0)
        batch.remaining = batch.size = 1
        self.stack = [ActiveRecord(jset, partition, 0, batch)]
        self.discovered.add(jset)
        self.monitor.on_discover(jset, new_start=True)
        self._emit({"event": "new_start", "t": self.t, "jset": list(jset),
                    "partition": [list(part) for part in partition]})
        return True

    def _explore_top(self) -> None:
        rec = self.stack.pop()
        self.explored.add(rec.jset)
        for dd in range(self.j):
            key = rec.jset[:dd] + rec.jset[dd + 1:]
            self.explored_partners.setdefault(key, []).append(rec.jset[dd])
        if self.explored_vert is not None:
            self.explored_vert[rec.jset[0]] = True
        self._emit({"event": "explored", "t": self.t, "jset": list(rec.jset)})
        batch = rec.batch
        batch.remaining -= 1
        if batch.remaining == 0 and batch.edge_index >= 1:
            self._remove_edge(batch)

    def _activate(self, rec: ActiveRecord, K: tuple) -> None:
        members = activate_batch(self.params, rec.jset, rec.partition, K)
        members.sort(key=lambda m: (chain64(self.sigj_key, m[0]), m[0]))
        batch = Batch(edge_index=self.ell)
        pushed = []
        for js, part in members:
            if js in self.discovered:
                batch.skipped += 1
                self.skips += 1
                self._emit({"event": "skip", "t": self.t, "jset": list(js)})
            else:
                self.discovered.add(js)
                self.monitor.on_discover(js, new_start=False)
                pushed.append(ActiveRecord(js, part, batch.edge_index, batch))
                batch.remaining += 1
                batch.size += 1
                self.activations += 1
        self._emit({"event": "batch", "t": self.t, "edge_index": batch.edge_index,
                    "members": [list(r.jset) for r in pushed],
                    "skipped": batch.skipped})
        self.stack.extend(pushed)
        self.positives += 1
        if batch.remaining == 0:
            self._remove_edge(batch)

    def _check_invariants(self) -> None:
        p = self.params
        assert len(self.stack) <= 1 + p.batch_size * self.ell
        assert self.activations + self.skips == p.batch_size * self.positives
        assert self.monitor.new_starts + self.activations == len(self.discovered)
        assert len(self.stack) + len(self.explored) == len(self.discovered)
        assert all(set(r.jset) <= self.path_vertex_set for r in self.stack)

    def _step(self) -> Optional[str]:
        rec = self.stack[-1]
        if self.checked:
            assert self.ell == rec.edge_index
        res = self._scan(rec)
        if res[0] == "stop":
            return res[1]
        if res[0] == "exhausted":
            self._explore_top()
            return None
        _, X, K = res
        self._extend(rec, X, K)
        self._activate(rec, K)
        if self.checked:
            self._check_invariants()
        return self.monitor.check_stop(self.ell, self.t)

    def run(self) -> RunTrace:
        if self.stop_reason is not None:
            raise RuntimeError("run already completed")
        start = time.perf_counter()
        reason = None
        while reason is None:
            if not self.stack:
                if not self._new_start():
                    reason = EXHAUSTED
                    break
                reason = self.monitor.check_stop(self.ell, self.t)
                continue
            reason = self._step()
        self.stop_reason = reason
        self.ms = (time.perf_counter() - start) * 1000.0
        self._emit({"event": "stop", "t": self.t, "reason": reason,
                    "ell": self.ell, "max_ell": self.max_ell})
        return self._build_trace()

    def _build_trace(self) -> RunTrace:
        return RunTrace(
            n=self.n, k=self.k, j=self.j, seed=self.seed, mode=self.mode,
            trace_level=self.trace_level, stop_reason=self.stop_reason,
            max_ell=self.max_ell, final_ell=self.ell, queries=self.t,
            new_starts=self.monitor.new_starts, positives=self.positives,
            activations=self.activations, skips=self.skips,
            discovered=len(self.discovered), explored=len(self.explored),
            ms=self.ms, events=self.events,
        )


def run(
    H,
    k: int,
    j: int,
    seed: int = 0,
    stopping: Optional[StoppingConfig] = None,
    mode: str = "auto",
    trace_level: str = "events",
    audit: bool = False,
) -> RunTrace:
    """Run the search to termination and return its trace."""
    if H.k != k:
        raise ValueError(f"backend is {H.k}-uniform, expected {k}")
    if not 1 <= j <= k - 1:
        raise ValueError(f"j must be in [1, {k - 1}]")
    finder = PathFinder(H, j, seed=seed, stopping=stopping, mode=mode,
                        trace_level=trace_level, audit=audit)
    return finder.run()


def allowed_candidates(finder: PathFinder) -> list[tuple]:
    """The X = K\\J still queryable from the top-of-stack J, in query order.

    Rebuilt from scratch (Q2 against the current path, Q3 against the scan
    cursor, Q4 against the explored set), so it is usable with any engine.
    """
    if not finder.stack:
        raise ValueError("no active j-set")
    rec = finder.stack[-1]
    if rec.order is not None:
        ent = rec.order[rec.idx:]
        return [X for _, K, X in ent if not finder._q4_dead(K)]
    allowed = [v for v in range(finder.n) if v not in finder.path_vertex_set]
    ent = []
    for X in combinations(allowed, finder.d):
        K = tuple(sorted(rec.jset + X))
        ent.append((chain64(finder.sigk_key, K), K, X))
    ent.sort()
    if rec.cursor is not None:
        ch, crow = rec.cursor
        ent = [e for e in ent if (e[0], e[1]) > (ch, crow)]
    return [X for _, K, X in ent if not finder._q4_dead(K)]


def retreat(finder: PathFinder) -> PathFinder:
    """Mark the top-of-stack j-set explored; remove its batch's edge if that
    batch is now done. The caller must have exhausted its candidates."""
    if not finder.stack:
        raise ValueError("no active j-set")
    if allowed_candidates(finder):
        raise ValueError("top-of-stack j-set still has allowed candidates")
    finder._explore_top()
    return finder


def replay_trace(trace: RunTrace, H) -> bool:
    """Re-check a trace against a backend: query outcomes must reproduce,
    query clocks must strictly increase, and the summary counters must match
    the event stream. Query outcomes are only present at trace_level full."""
    if H.n != trace.n or H.k != trace.k:
        raise ValueError("backend shape does not match trace")
    if trace.trace_level == "summary":
        return True
    last_t = 0
    counts = {"new_start": 0, "extend": 0, "explored": 0, "skip": 0}
    seen_queries = 0
    for ev in trace.events:
        kind = ev["event"]
        if kind == "query":
            if ev["t"] <= last_t:
                raise ValueError(f"query clock not increasing at t={ev['t']}")
            last_t = ev["t"]
            seen_queries += 1
            if bool(H.query_edge(tuple(ev["edge"]))) != ev["outcome"]:
                raise ValueError(f"query outcome mismatch on {ev['edge']}")
        elif kind in counts:
            counts[kind] += 1
    if trace.trace_level == "full":
        if seen_queries != trace.queries:
            raise ValueError("query count mismatch")
        for ev in trace.events:
            if ev["event"] == "extend" and not H.query_edge(tuple(ev["edge"])):
                raise ValueError(f"path edge {ev['edge']} absent from backend")
    if counts["new_start"] != trace.new_starts:
        raise ValueError("new start count mismatch")
    if counts["extend"] != trace.positives:
        raise ValueError("positive count mismatch")
    if counts["skip"] != trace.skips:
        raise ValueError("skip count mismatch")
    if counts["explored"] != trace.explored:
        raise ValueError("explored count mismatch")
    return True
