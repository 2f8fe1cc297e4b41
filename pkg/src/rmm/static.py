"""Rank-maximal matchings by phase-wise reduction, keeping every phase artifact.

Phase ``i`` adds the rank-``i`` edges between vertices that are still alive,
augments to a maximum matching, labels the phase graph Even/Odd/Unreachable
and prunes it: future edges at Odd and Unreachable vertices are cancelled and
Odd-Odd / Odd-Unreachable edges are dropped.

Storage is compact.  Each vertex keeps its type-change list (phases where
its label differs from the previous phase, with the new label); a lookup is
a binary search.  Labels are not monotone: an Odd vertex may turn Even again
once new edges relieve it, but Unreachable is absorbing and a vertex that
stopped being Even never becomes alive again.  An edge's lifetime follows
from the change lists of its endpoints (:func:`edge_gone`).

The phase-``i`` matching is the final matching restricted to ranks
``<= i``: the prefix of a rank-maximal matching is rank-maximal in the
truncated instance, and every such matching is maximum in the phase graph.
"""

from __future__ import annotations

import bisect
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .instance import ArrivalEvent, Instance, InstanceError, Matching, RankedEdge, Side, Signature, check_event, vid_name
from .matching import EVEN, ODD, UNREACHABLE, EgLabels, GraphView, Label, WorkCounter, eg_labels, hopcroft_karp

NEVER = 1 << 30


class PhaseOrderError(RuntimeError):
    """A phase operation ran before its prerequisites."""


def label_at(phases: list[int], labels: list[Label], i: int) -> Label:
    """Label at phase ``i`` from a type-change list (Even before the first change)."""
    k = bisect.bisect_right(phases, i) - 1
    return labels[k] if k >= 0 else EVEN


def edge_gone(rank: int, pa: list[int], la: list[Label], pp: list[int], lp: list[Label]) -> int:
    """First phase from which an edge is absent, given its endpoints' change lists.

    The edge enters at ``rank`` only if both endpoints were Even in every
    earlier phase; afterwards it is dropped at the end of the first phase
    where neither endpoint is Even and they are not both Unreachable.
    """
    if (pa and pa[0] < rank) or (pp and pp[0] < rank):
        return rank
    # labels are piecewise constant, so only breakpoints need checking
    points = sorted({rank, *(x for x in pa if x > rank), *(x for x in pp if x > rank)})
    for j in points:
        x, y = label_at(pa, la, j), label_at(pp, lp, j)
        if x != EVEN and y != EVEN and not (x == UNREACHABLE and y == UNREACHABLE):
            return j + 1
        if x == UNREACHABLE and y == UNREACHABLE:
            return NEVER
    return NEVER


@dataclass(frozen=True)
class PhaseRecord:
    """Edge deltas of one phase.

    ``added``: rank-``index`` edges entering the phase graph.  ``removed``:
    edges dropped after labelling it.  ``cancelled``: higher-rank edges that
    will never enter because an endpoint stopped being Even here.
    """

    index: int
    added: tuple[int, ...]
    removed: tuple[int, ...]
    cancelled: tuple[int, ...]


class RmmState:
    """Phase artifacts of one instance, addressed by interleaved vertex ids.

    Edge ids are stable: the initial instance's edges come first in its
    canonical order and arriving edges are appended.
    """

    def __init__(self, instance: Instance):
        self._base = instance
        self._events: list[ArrivalEvent] = []
        self._instance: Instance | None = instance
        self.applicant_count = instance.applicant_count
        self.post_count = instance.post_count
        self.r = instance.max_rank
        n = instance.num_vids
        self.num_vids = n
        self.e_app: list[int] = []
        self.e_post: list[int] = []
        self.e_rank: list[int] = []
        self.e_gone: list[int] = []
        self.edge_id: dict[tuple[int, int], int] = {}
        self.by_rank: list[list[int]] = [[] for _ in range(self.r)]
        self.inc: list[list[int]] = [[] for _ in range(n)]
        for e in instance.edges:
            self._append_edge(2 * e.applicant, 2 * e.post + 1, e.rank)
        for v in range(n):
            self.inc[v].sort(key=self._inc_key(v))
        self.ch_phase: list[list[int]] = [[] for _ in range(n)]
        self.ch_label: list[list[Label]] = [[] for _ in range(n)]
        self.mate = [-1] * n
        self.counter = WorkCounter()
        self.solved_phases = 0
        self.reduced_phases = 0
        self._phase_cache: list[PhaseRecord] | None = None

    # -- construction helpers ---------------------------------------------

    def _inc_key(self, v: int):
        other = self.e_app if v & 1 else self.e_post
        rank = self.e_rank
        return lambda e: (rank[e], other[e])

    def _append_edge(self, a: int, p: int, rank: int) -> int:
        eid = len(self.e_rank)
        self.e_app.append(a)
        self.e_post.append(p)
        self.e_rank.append(rank)
        self.e_gone.append(rank)
        self.edge_id[(a, p)] = eid
        self.by_rank[rank - 1].append(eid)
        self.inc[a].append(eid)
        self.inc[p].append(eid)
        return eid

    def _grow(self, num_vids: int) -> None:
        extra = num_vids - self.num_vids
        if extra <= 0:
            return
        self.inc.extend([] for _ in range(extra))
        self.ch_phase.extend([] for _ in range(extra))
        self.ch_label.extend([] for _ in range(extra))
        self.mate.extend([-1] * extra)
        self.num_vids = num_vids

    def add_arrival(self, event: ArrivalEvent) -> list[int]:
        """Grow the graph by an arrival; labels and matching are left to the caller.

        The new vertex starts isolated and Even in every phase.  Returns the
        new edge ids.
        """
        check_event(self, event)
        if event.side is Side.APPLICANT:
            v = 2 * self.applicant_count
            self.applicant_count += 1
        else:
            v = 2 * self.post_count + 1
            self.post_count += 1
        self._grow(max(2 * self.applicant_count, 2 * self.post_count))
        top = max([self.r] + [k for _, k in event.edges])
        self.by_rank.extend([] for _ in range(top - self.r))
        self.r = top
        new = []
        for partner, rank in event.edges:
            w = 2 * partner + (1 - int(event.side))
            a, p = (v, w) if event.side is Side.APPLICANT else (w, v)
            eid = self._append_edge(a, p, rank)
            new.append(eid)
            inc = self.inc[w]
            inc.pop()
            bisect.insort(inc, eid, key=self._inc_key(w))
        self.inc[v].sort(key=self._inc_key(v))
        self._events.append(event)
        self._instance = None
        self._phase_cache = None
        return new

    def copy(self) -> RmmState:
        new = object.__new__(RmmState)
        new.__dict__.update(self.__dict__)
        for name in ("e_app", "e_post", "e_rank", "e_gone", "mate", "_events"):
            setattr(new, name, list(getattr(self, name)))
        new.ch_phase = [list(x) for x in self.ch_phase]
        new.ch_label = [list(x) for x in self.ch_label]
        new.edge_id = dict(self.edge_id)
        new.by_rank = [list(x) for x in self.by_rank]
        new.inc = [list(x) for x in self.inc]
        new.counter = WorkCounter()
        return new

    # -- queries -----------------------------------------------------------

    @property
    def instance(self) -> Instance:
        if self._instance is None:
            edges = [RankedEdge(a >> 1, p >> 1, k) for a, p, k in zip(self.e_app, self.e_post, self.e_rank)]
            self._instance = Instance(self.applicant_count, self.post_count, self.r, tuple(edges))
        return self._instance

    @property
    def num_edges(self) -> int:
        return len(self.e_rank)

    def vertices(self) -> Iterator[int]:
        for i in range(self.applicant_count):
            yield 2 * i
        for j in range(self.post_count):
            yield 2 * j + 1

    def is_vertex(self, v: int) -> bool:
        return 0 <= v < self.num_vids and (v >> 1) < (self.post_count if v & 1 else self.applicant_count)

    def label(self, v: int, i: int) -> Label:
        return label_at(self.ch_phase[v], self.ch_label[v], i)

    def labels_at(self, i: int) -> EgLabels:
        return EgLabels([self.label(v, i) for v in range(self.num_vids)])

    def alive(self, v: int, i: int) -> bool:
        """Even in every phase graph before ``i``."""
        ph = self.ch_phase[v]
        return not ph or i <= ph[0]

    def first_change(self, v: int) -> int:
        """First phase where ``v`` is not Even (:data:`NEVER` if none)."""
        ph = self.ch_phase[v]
        return ph[0] if ph else NEVER

    def type_changes(self, v: int) -> list[tuple[int, Label]]:
        """``(phase, new label)`` pairs in increasing phase order."""
        return list(zip(self.ch_phase[v], self.ch_label[v]))

    def in_phase(self, eid: int, i: int) -> bool:
        return self.e_rank[eid] <= i < self.e_gone[eid]

    def mate_rank(self, v: int) -> int:
        w = self.mate[v]
        if w < 0:
            return NEVER
        return self.e_rank[self.edge_id[(v, w) if v & 1 == 0 else (w, v)]]

    def mate_at(self, v: int, i: int) -> int:
        w = self.mate[v]
        return w if w >= 0 and self.mate_rank(v) <= i else -1

    def mates_at(self, i: int) -> list[int]:
        return [self.mate_at(v, i) for v in range(self.num_vids)]

    def matching_at(self, i: int) -> Matching:
        return Matching.from_mate(self.mates_at(i))

    @property
    def matching(self) -> Matching:
        return Matching.from_mate(self.mate)

    @property
    def signature(self) -> Signature:
        counts = [0] * self.r
        for v in range(0, self.num_vids, 2):
            if self.mate[v] >= 0:
                counts[self.mate_rank(v) - 1] += 1
        return Signature(counts)

    @property
    def c(self) -> int:
        """Largest rank used by the rank-maximal matching (0 when empty)."""
        return max((k + 1 for k, x in enumerate(self.signature) if x), default=0)

    def phase_edges(self, i: int) -> list[int]:
        return [e for k in range(min(i, self.r)) for e in self.by_rank[k] if self.e_gone[e] > i]

    def neighbors_at(self, v: int, i: int, counter: WorkCounter | None = None) -> Iterator[tuple[int, int]]:
        """``(neighbour, edge id)`` pairs of ``v`` in the phase-``i`` graph."""
        rank, gone = self.e_rank, self.e_gone
        other = self.e_app if v & 1 else self.e_post
        work = 0
        try:
            for e in self.inc[v]:
                work += 1
                if rank[e] > i:
                    break
                if gone[e] > i:
                    yield other[e], e
        finally:
            if counter is not None:
                counter.edges += work

    def label_table(self) -> dict[int, tuple[Label, ...]]:
        """``table[v][i-1]`` is the label of vertex ``v`` in phase ``i``."""
        return {v: tuple(self.label(v, i) for i in range(1, self.r + 1)) for v in self.vertices()}

    def phase_edge_sets(self) -> list[frozenset[tuple[int, int]]]:
        return [frozenset((self.e_app[e], self.e_post[e]) for e in self.phase_edges(i)) for i in range(1, self.r + 1)]

    @property
    def phases(self) -> list[PhaseRecord]:
        if self._phase_cache is None:
            added: list[list[int]] = [[] for _ in range(self.r + 1)]
            removed: list[list[int]] = [[] for _ in range(self.r + 1)]
            cancelled: list[list[int]] = [[] for _ in range(self.r + 1)]
            for e in range(self.num_edges):
                k, g = self.e_rank[e], self.e_gone[e]
                if g > k:
                    added[k].append(e)
                    if g <= self.r:
                        removed[g - 1].append(e)
                else:
                    cancelled[min(self.first_change(self.e_app[e]), self.first_change(self.e_post[e]))].append(e)
            self._phase_cache = [
                PhaseRecord(i, tuple(added[i]), tuple(removed[i]), tuple(cancelled[i])) for i in range(1, self.r + 1)
            ]
        return self._phase_cache

    def recompute_gone(self, eids: Iterable[int]) -> None:
        cp, cl = self.ch_phase, self.ch_label
        for e in eids:
            a, p = self.e_app[e], self.e_post[e]
            self.e_gone[e] = edge_gone(self.e_rank[e], cp[a], cl[a], cp[p], cl[p])
        self._phase_cache = None

    def describe_phase(self, i: int) -> str:
        """Phase dump: the phase graph in instance syntax, its matching and labels."""
        lines = ["rmm-phase 1", f"phase {i}", f"{self.applicant_count} {self.post_count} {self.r}"]
        per_app: dict[int, list[tuple[int, int]]] = {}
        for e in self.phase_edges(i):
            per_app.setdefault(self.e_app[e], []).append((self.e_post[e], self.e_rank[e]))
        for a in range(0, 2 * self.applicant_count, 2):
            body = " ".join(f"{vid_name(p)}@{k}" for p, k in sorted(per_app.get(a, [])))
            lines.append(f"{vid_name(a)} :" + (f" {body}" if body else ""))
        for a in range(0, 2 * self.applicant_count, 2):
            p = self.mate_at(a, i)
            if p >= 0:
                lines.append(f"match {vid_name(a)} {vid_name(p)}")
        for v in self.vertices():
            lines.append(f"label {vid_name(v)} {self.label(v, i).letter}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# solver


class _PhaseDriver:
    """Working adjacency and matching of an in-progress solve."""

    def __init__(self, state: RmmState, reverse: bool):
        n = state.num_vids
        self.reverse = reverse
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.mate = [-1] * n
        self.cur = [EVEN] * n
        self.alive = [True] * n
        self.changed: list[int] = []
        self.applicants = range(0, n, 2)


def start_solve(instance: Instance, *, reverse: bool = False) -> RmmState:
    """Fresh state with no phase computed yet; drive it with :func:`solve_phase`."""
    state = RmmState(instance)
    state._driver = _PhaseDriver(state, reverse)
    return state


def solve_phase(state: RmmState, i: int) -> RmmState:
    """Add rank-``i`` edges, augment to a maximum matching and label phase ``i``."""
    drv = getattr(state, "_driver", None)
    if drv is None or state.solved_phases != i - 1 or state.reduced_phases != i - 1:
        raise PhaseOrderError(f"phase {i} requested out of order")
    cnt = state.counter
    touched = set()
    for e in state.by_rank[i - 1] if i <= state.r else ():
        cnt.edges += 1
        a, p = state.e_app[e], state.e_post[e]
        if drv.alive[a] and drv.alive[p]:
            state.e_gone[e] = NEVER
            drv.adj[a].append(p)
            drv.adj[p].append(a)
            touched.add(a)
            touched.add(p)
    state.solved_phases = i
    drv.changed = []
    if not touched:
        # No new edges: matching and labels carry over unchanged.
        return state
    for v in touched:
        drv.adj[v].sort()
    hopcroft_karp(drv.adj, drv.mate, drv.applicants, cnt, drv.reverse)
    new = eg_labels(drv.adj, drv.mate, range(state.num_vids), cnt, check=False)
    lab = drv.cur
    for v in range(state.num_vids):
        if new[v] != lab[v]:
            state.ch_phase[v].append(i)
            state.ch_label[v].append(Label(new[v]))
            lab[v] = new[v]
            drv.alive[v] = False
            drv.changed.append(v)
    return state


def reduce_phase(state: RmmState, i: int) -> RmmState:
    """Prune the labelled phase-``i`` graph; fixes the lifetime of every edge it touches."""
    drv = getattr(state, "_driver", None)
    if drv is None or state.solved_phases != i or state.reduced_phases != i - 1:
        raise PhaseOrderError(f"phase {i} must be solved before it is reduced, and only once")
    cnt = state.counter
    lab = drv.cur
    for v in drv.changed:
        for e in state.inc[v]:
            if state.e_rank[e] > i:
                cnt.edges += 1
        keep = []
        for w in drv.adj[v]:
            cnt.edges += 1
            lv, lw = lab[v], lab[w]
            if lv != EVEN and lw != EVEN and not (lv == UNREACHABLE and lw == UNREACHABLE):
                key = (v, w) if v & 1 == 0 else (w, v)
                state.e_gone[state.edge_id[key]] = i + 1
                drv.adj[w].remove(v)
            else:
                keep.append(w)
        drv.adj[v] = keep
    drv.changed = []
    state.reduced_phases = i
    state._phase_cache = None
    return state


def finish_solve(state: RmmState) -> RmmState:
    drv = getattr(state, "_driver", None)
    if drv is None or state.reduced_phases != state.r:
        raise PhaseOrderError("solve is not complete")
    del state._driver
    state.mate = drv.mate
    return state


def rmm_solve(instance: Instance, *, reverse: bool = False) -> RmmState:
    """Run every phase and return the finished state.

    ``reverse`` visits applicants and neighbours in decreasing id order; phase
    graphs and labels do not depend on it, only the matching may.
    """
    state = start_solve(instance, reverse=reverse)
    for i in range(1, state.r + 1):
        solve_phase(state, i)
        reduce_phase(state, i)
    return finish_solve(state)


def phase_view(state: RmmState, i: int) -> GraphView:
    """Materialise the phase-``i`` graph by replaying the stored deltas."""
    if not 1 <= i <= state.r:
        raise IndexError(f"phase {i} out of range 1..{state.r}")
    edges: set[int] = set()
    for rec in state.phases[:i]:
        edges.update(rec.added)
        if rec.index < i:
            edges.difference_update(rec.removed)
    return GraphView(state.num_vids, ((state.e_app[e], state.e_post[e]) for e in edges))


def check_state(state: RmmState) -> None:
    """Raise :class:`InstanceError` if stored lifetimes disagree with the thresholds."""
    cp, cl = state.ch_phase, state.ch_label
    for e in range(state.num_edges):
        a, p = state.e_app[e], state.e_post[e]
        want = edge_gone(state.e_rank[e], cp[a], cl[a], cp[p], cl[p])
        if want != state.e_gone[e]:
            raise InstanceError(f"edge {vid_name(a)}-{vid_name(p)} lifetime {state.e_gone[e]} != {want}")
