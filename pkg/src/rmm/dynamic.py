"""Rank-maximal matchings under vertex arrivals.

An arrival turns the solved instance ``G`` into ``H = G + a0``.  The phases of
``H`` are replayed against the stored phases of ``G``: the graph of phase
``i`` of ``H`` differs from that of ``G`` only at edges touching the
*component* ``C`` (vertices whose label history differs, plus ``a0``), so
each phase only repairs labels where a change can propagate.

Per phase the repair works on a working matching ``X``: the phase matching
of ``G`` with the edges that ``H`` no longer has removed, augmented to a
maximum matching of the ``H`` phase graph.  Reachability by alternating
paths from free vertices (which decides Even/Odd/Unreachable) can only change
downstream of changed vertices, so everything reached in ``G`` outside that
downstream closure stays reached, and a BFS seeded at its boundary recovers
the rest.

The final matching is ``M_r`` flipped along one alternating path from
``a0``.  A path works iff its lexicographic rank gain equals the signature
difference between ``H`` and ``G``; alternating cycles never gain (``M_r``
is rank-maximal in ``G``), so the shortest gain-maximal walk found by a
Bellman-Ford search is a simple path.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from .instance import ArrivalEvent, Matching, Signature, vid_name
from .matching import EVEN, ODD, UNREACHABLE, EgLabels, GraphView, Label, WorkCounter
from .static import PhaseOrderError, RmmState, edge_gone, label_at


class PathKind(enum.Enum):
    AUGMENTING = "augmenting"
    EVEN_TO_ACTIVATED = "even-to-activated"
    EVEN_TO_ALIVE = "even-to-alive"
    EMPTY = "empty"


@dataclass(frozen=True)
class UpdatePath:
    """Alternating path from the arriving vertex w.r.t. the old matching."""

    vertices: tuple[int, ...]
    kind: PathKind

    def __len__(self) -> int:
        """Number of edges."""
        return len(self.vertices) - 1

    def edges(self) -> list[tuple[int, int]]:
        """``(applicant_vid, post_vid)`` pairs along the path."""
        vs = self.vertices
        return [(x, y) if x & 1 == 0 else (y, x) for x, y in zip(vs, vs[1:])]

    def __str__(self) -> str:
        return " ".join(vid_name(v) for v in self.vertices)


@dataclass
class PhaseTrace:
    """What one replayed phase did.

    ``delta`` is the size of the maximum matching of ``H``'s phase graph
    minus that of ``G``'s (0 or 1).  The phase is *augmenting* when ``delta``
    differs from the previous phase's; the parity of the number of such
    phases is what relates labels across phases.  ``invalid`` counts rank-``i``
    matched edges of ``G`` that could not be carried into the working matching,
    ``augmentations`` the augmenting paths found after that.  ``affected`` is
    the number of vertices whose reachability was re-derived, ``gain`` the
    sparse signature difference ``(rank, count)`` between the two phase
    matchings.
    """

    index: int
    delta: int = 0
    invalid: int = 0
    augmentations: int = 0
    affected: int = 0
    changed: tuple[int, ...] = ()
    work: int = 0
    gain: tuple[tuple[int, int], ...] = ()
    augmenting: bool = False


@dataclass
class UpdateState:
    """Trace of one arrival.

    ``component`` holds the vertices whose label history in ``H`` differs
    from ``G`` (plus ``a0``); ``h_changes`` their type-change lists in ``H``.
    ``phases[i-1]`` describes phase ``i``.  The per-phase activated sets are
    derived on demand from the two label histories.
    """

    a0: int
    event: ArrivalEvent
    base: RmmState
    work: RmmState
    new_edges: tuple[int, ...]
    component: set[int] = field(default_factory=set)
    h_changes: dict[int, tuple[list[int], list[Label]]] = field(default_factory=dict)
    phases: list[PhaseTrace] = field(default_factory=list)
    final_mate: dict[int, int] = field(default_factory=dict)
    target: Signature = Signature()
    counter: WorkCounter = field(default_factory=WorkCounter)
    path: UpdatePath | None = None
    committed: bool = False
    engine: object = field(default=None, repr=False, compare=False)

    # -- derived views ---------------------------------------------------

    @property
    def r(self) -> int:
        return self.work.r

    def h_label(self, v: int, i: int) -> Label:
        if v in self.h_changes:
            ph, lb = self.h_changes[v]
            return label_at(ph, lb, i)
        return self.work.label(v, i)

    def g_label(self, v: int, i: int) -> Label:
        return self.work.label(v, i)

    def h_alive(self, v: int, i: int) -> bool:
        if v in self.h_changes:
            ph = self.h_changes[v][0]
            return not ph or i <= ph[0]
        return self.work.alive(v, i)

    def g_alive(self, v: int, i: int) -> bool:
        return v != self.a0 and self.work.alive(v, i)

    def h_present(self, e: int, i: int) -> bool:
        w = self.work
        a, p = w.e_app[e], w.e_post[e]
        hc = self.h_changes
        if a not in hc and p not in hc:
            return w.e_rank[e] <= i < w.e_gone[e]
        if w.e_rank[e] > i:
            return False
        pa, la = hc[a] if a in hc else (w.ch_phase[a], w.ch_label[a])
        pp, lp = hc[p] if p in hc else (w.ch_phase[p], w.ch_label[p])
        return i < edge_gone(w.e_rank[e], pa, la, pp, lp)

    def activated_vertices(self, i: int) -> set[int]:
        """``AV`` after phase ``i``: alive in ``H`` for phase ``i+1`` but not in ``G`` (``a0`` counts as new)."""
        return {v for v in self.component if self.h_alive(v, i + 1) and not self.g_alive(v, i + 1)}

    def activated_edges(self, i: int) -> set[int]:
        """``AE`` of phase ``i``: edges of ``H``'s phase graph absent from ``G``'s."""
        w = self.work
        out = set()
        for v in self.component:
            for e in w.inc[v]:
                if w.e_rank[e] > i:
                    break
                if self.h_present(e, i) and not (v != self.a0 and w.in_phase(e, i) and e not in self.new_edges):
                    out.add(e)
        return out

    def split_activated(self, i: int) -> tuple[set[int], set[int]]:
        """``(AE_u, AE_o)``: activated edges whose far endpoint (outside ``C``) is Unreachable / Odd in ``G``."""
        aeu, aeo = set(), set()
        w = self.work
        for e in self.activated_edges(i):
            a, p = w.e_app[e], w.e_post[e]
            far = p if a in self.component else a
            lab = self.g_label(far, i)
            if lab == UNREACHABLE:
                aeu.add(e)
            elif lab == ODD:
                aeo.add(e)
        return aeu, aeo

    def augmenting_count(self, i: int) -> int:
        """``n_A(i)``: augmenting phases among ``1..i``."""
        return sum(1 for t in self.phases[:i] if t.augmenting)


# ---------------------------------------------------------------------------
# the phase replay


class _Replay:
    def __init__(self, trace: UpdateState):
        self.t = trace
        self.w = trace.work
        self.cnt = trace.counter
        w = self.w
        self._mrank: dict[int, int] = {}
        self.xm: dict[int, int] = {}
        self.delta = 0
        self.mr_by_rank: dict[int, list[int]] = {}
        for a in range(0, w.num_vids, 2):
            if w.mate[a] >= 0:
                self.mr_by_rank.setdefault(w.e_rank[w.edge_id[(a, w.mate[a])]], []).append(a)

    # -- G side -------------------------------------------------------------

    def gm(self, v: int, j: int) -> int:
        w = self.w
        m = w.mate[v]
        if m < 0:
            return -1
        k = self._mrank.get(v)
        if k is None:
            k = w.e_rank[w.edge_id[(v, m) if v & 1 == 0 else (m, v)]]
            self._mrank[v] = k
        return m if k <= j else -1

    def g_neighbors(self, v: int, j: int) -> Iterator[int]:
        w = self.w
        rank, gone = w.e_rank, w.e_gone
        other = w.e_app if v & 1 else w.e_post
        cnt = self.cnt
        for e in w.inc[v]:
            cnt.edges += 1
            if rank[e] > j:
                return
            if gone[e] > j:
                yield other[e]

    def h_neighbors(self, v: int, j: int) -> Iterator[int]:
        w = self.w
        rank, gone = w.e_rank, w.e_gone
        other = w.e_app if v & 1 else w.e_post
        hc = self.t.h_changes
        cnt = self.cnt
        vin = v in hc
        for e in w.inc[v]:
            cnt.edges += 1
            if rank[e] > j:
                return
            x = other[e]
            if not vin and x not in hc:
                if gone[e] > j:
                    yield x
            elif self.t.h_present(e, j):
                yield x

    # -- one phase -----------------------------------------------------------

    def run_phase(self, j: int) -> PhaseTrace:
        t, w = self.t, self.w
        hc = t.h_changes
        start = self.cnt.edges
        rec = PhaseTrace(j)
        xm = self.xm
        # X carries over from the previous phase (it stays inside the new
        # phase graph); G's rank-j matched edges join it where they still fit.
        grown = 0
        for a in self.mr_by_rank.get(j, ()):
            p = w.mate[a]
            ina, inp = a in xm, p in xm
            fits = (xm[a] if ina else -1) < 0 and (xm[p] if inp else -1) < 0
            if fits and (a in hc or p in hc):
                fits = t.h_present(w.edge_id[(a, p)], j)
            if fits:
                grown += 1
                if ina or inp:
                    xm[a] = p
                    xm[p] = a
            else:
                rec.invalid += 1
                if not ina:
                    xm[a] = -1
                if not inp:
                    xm[p] = -1
        src = {t.a0, *xm}
        for v in t.component:
            if self.h_label_prev(v, j) != UNREACHABLE or w.label(v, j) != UNREACHABLE:
                src.add(v)
        while True:
            res = self._reach(0, j, src, xm)
            if isinstance(res, list):
                self._flip(res, xm)
                src.update(res)
                rec.augmentations += 1
                continue
            reach_a, cand_a, vis_a = res
            break
        res = self._reach(1, j, src, xm)
        if isinstance(res, list):  # pragma: no cover - the applicant side search would have found it
            raise AssertionError("augmenting path missed by the applicant-rooted search")
        reach_p, cand_p, vis_p = res
        prev = self.delta
        self.delta += grown + rec.augmentations - len(self.mr_by_rank.get(j, ()))
        rec.delta = self.delta
        rec.augmenting = self.delta != prev
        affected = src | cand_a | vis_a | cand_p | vis_p
        rec.affected = len(affected)
        changed = []
        for v in affected:
            side = v & 1
            ra, rp = reach_a(v), reach_p(v)
            if side == 0:
                lab = EVEN if ra else ODD if rp else UNREACHABLE
            else:
                lab = EVEN if rp else ODD if ra else UNREACHABLE
            if v in hc:
                ph, lb = hc[v]
                if lab != label_at(ph, lb, j - 1):
                    ph.append(j)
                    lb.append(lab)
            elif lab != w.label(v, j):
                ph = [x for x in w.ch_phase[v] if x < j]
                lb = list(w.ch_label[v][: len(ph)])
                if lab != (lb[-1] if lb else EVEN):
                    ph.append(j)
                    lb.append(lab)
                hc[v] = (ph, lb)
                t.component.add(v)
                changed.append(v)
        # Vertices of C outside the affected set keep G's label for this phase.
        for v in t.component:
            if v not in affected and v not in changed:
                ph, lb = hc[v]
                lab = w.label(v, j)
                if lab != label_at(ph, lb, j - 1):
                    ph.append(j)
                    lb.append(lab)
        rec.changed = tuple(sorted(changed))
        rec.work = self.cnt.edges - start
        rec.gain = self._gain(j)
        # entries that agree with G's phase matching carry no information
        for v in [v for v, m in xm.items() if m == self.gm(v, j)]:
            del xm[v]
        return rec

    def _gain(self, j: int) -> tuple[tuple[int, int], ...]:
        """Sparse signature difference ``X_j - M_j`` as ``(rank, delta)`` pairs."""
        w = self.w
        out: dict[int, int] = {}
        for v, x in self.xm.items():
            if v & 1:
                continue
            g = self.gm(v, j)
            if x == g:
                continue
            if x >= 0:
                k = w.e_rank[w.edge_id[(v, x)]]
                out[k] = out.get(k, 0) + 1
            if g >= 0:
                k = w.e_rank[w.edge_id[(v, g)]]
                out[k] = out.get(k, 0) - 1
        return tuple(sorted((k, d) for k, d in out.items() if d))

    def h_label_prev(self, v: int, j: int) -> Label:
        ph, lb = self.t.h_changes[v]
        return label_at(ph, lb, j - 1)

    def _flip(self, path: list[int], xm: dict[int, int]) -> None:
        for k in range(0, len(path) - 1, 2):
            x, y = path[k], path[k + 1]
            xm[x] = y
            xm[y] = x

    def _reach(self, s: int, j: int, src: set[int], xm: dict[int, int]):
        """Alternating reachability from free side-``s`` vertices in ``H``'s phase graph.

        Returns an augmenting path (vertex list) if one exists, otherwise
        ``(reached predicate, candidate set, newly visited set)``.
        """
        w = self.w
        gm = self.gm

        def xmate(v: int) -> int:
            return xm[v] if v in xm else gm(v, j)

        def g_reach(v: int) -> bool:
            lab = w.label(v, j)
            return lab == EVEN if (v & 1) == s else lab == ODD

        # Vertices whose G-reachability might depend on a changed vertex.
        cand: set[int] = set()
        q = deque(v for v in src if g_reach(v))
        cand.update(q)
        while q:
            v = q.popleft()
            if v & 1 == s:
                m = gm(v, j)
                for y in self.g_neighbors(v, j):
                    if y != m and y not in cand:
                        cand.add(y)
                        q.append(y)
            else:
                m = gm(v, j)
                if m >= 0 and m not in cand:
                    cand.add(m)
                    q.append(m)

        def definite(v: int) -> bool:
            return v not in cand and v not in src and g_reach(v)

        parent: dict[int, int] = {}
        visited: set[int] = set()
        q = deque()
        for v in sorted(cand | src):
            if v & 1 == s:
                m = xmate(v)
                if m < 0 or definite(m):
                    visited.add(v)
                    if m >= 0:
                        parent[v] = m
                    q.append(v)
            else:
                for x in self.h_neighbors(v, j):
                    if definite(x) and xmate(x) != v:
                        visited.add(v)
                        parent[v] = x
                        if xmate(v) < 0:
                            return self._path_to(v, parent, s, j, definite)
                        q.append(v)
                        break
        while q:
            u = q.popleft()
            if u & 1 == s:
                m = xmate(u)
                for y in self.h_neighbors(u, j):
                    if y == m or y in visited or definite(y):
                        continue
                    visited.add(y)
                    parent[y] = u
                    if xmate(y) < 0:
                        return self._path_to(y, parent, s, j, definite)
                    q.append(y)
            else:
                m = xmate(u)
                if m >= 0 and m not in visited and not definite(m):
                    visited.add(m)
                    parent[m] = u
                    q.append(m)

        def reached(v: int) -> bool:
            return v in visited or definite(v)

        return reached, cand, visited

    def _path_to(self, end: int, parent: dict[int, int], s: int, j: int, definite) -> list[int]:
        path = [end]
        v = end
        while v in parent:
            v = parent[v]
            path.append(v)
            if definite(v):
                break
        path.reverse()
        if definite(path[0]):
            path = self._back_path(path[0], s, j, definite)[:-1] + path
        return path

    def _back_path(self, x: int, s: int, j: int, definite) -> list[int]:
        """Alternating path in ``G`` from a free side-``s`` vertex to ``x`` inside the untouched region."""
        gm = self.gm
        prev: dict[int, int] = {}
        q = deque([x])
        seen = {x}
        root = -1
        while q:
            v = q.popleft()
            if v & 1 == s:
                m = gm(v, j)
                if m < 0:
                    root = v
                    break
                if m not in seen:
                    seen.add(m)
                    prev[m] = v
                    q.append(m)
            else:
                for y in self.g_neighbors(v, j):
                    if y not in seen and definite(y) and gm(y, j) != v:
                        seen.add(y)
                        prev[y] = v
                        q.append(y)
        if root < 0:  # pragma: no cover - guaranteed by reachability in G
            raise AssertionError("no alternating path back to a free vertex")
        path = [root]
        while path[-1] != x:
            path.append(prev[path[-1]])
        return path


# ---------------------------------------------------------------------------
# single-edge and batched edge additions to a labelled graph


class EdgeEffect(enum.Enum):
    FORCED_AUGMENT = "forced-augment"
    NO_CHANGE = "no-change"
    UNREACHABLE_RELABEL = "unreachable-relabel"


@dataclass(frozen=True)
class EdgeClassification:
    effect: EdgeEffect
    labels: EgLabels
    relabel: dict[int, Label] = field(default_factory=dict)


@dataclass(frozen=True)
class CaseA:
    """The enlarged graph has a larger matching; ``path`` augments through one new edge."""

    path: tuple[int, ...]


@dataclass(frozen=True)
class CaseB:
    """The matching stays maximum; ``labels`` are the updated classes."""

    labels: EgLabels
    relabel: dict[int, Label] = field(default_factory=dict)


def _relabel(adj, extra: dict[int, list[int]], mate: Sequence[int], labels: EgLabels, starts: Iterable[int]) -> dict[int, Label]:
    # Unreachable vertices next to a (new) Even vertex turn Odd, their mates Even.
    out: dict[int, Label] = {}
    q = deque()

    def hit(y: int) -> None:
        if labels[y] != UNREACHABLE or y in out:
            return
        out[y] = ODD
        m = mate[y]
        if m >= 0 and m not in out:
            out[m] = EVEN
            q.append(m)

    for y in starts:
        hit(y)
    while q:
        x = q.popleft()
        for y in adj[x]:
            hit(y)
        for y in extra.get(x, ()):
            hit(y)
    return out


def _even_path(adj, mate: Sequence[int], labels: EgLabels, x: int) -> list[int]:
    """Alternating path from a free vertex to the Even vertex ``x`` (root first)."""
    prev: dict[int, int] = {}
    seen = {x}
    q = deque([x])
    while q:
        v = q.popleft()
        m = mate[v]
        if m < 0:
            out = [v]
            while out[-1] != x:
                out.append(prev[out[-1]])
            return out
        for z in adj[m]:
            if z not in seen and z != v and labels[z] == EVEN:
                seen.add(z)
                prev[z] = m
                prev[m] = v
                q.append(z)
    raise ValueError(f"vertex {x} is not Even")  # pragma: no cover


def _union_extra(view: GraphView, new_edges: Iterable[tuple[int, int]]) -> tuple[list[tuple[int, int]], dict[int, list[int]]]:
    pairs = []
    extra: dict[int, list[int]] = {}
    for x, y in new_edges:
        if view.has_edge(*((x, y) if x & 1 == 0 else (y, x))):
            raise ValueError(f"edge ({x}, {y}) is already in the graph")
        pairs.append((x, y))
        extra.setdefault(x, []).append(y)
        extra.setdefault(y, []).append(x)
    return pairs, extra


def classify_edge_addition(view: GraphView, maximum, labels: EgLabels, edge: tuple[int, int]) -> EdgeClassification:
    """Effect of adding one edge whose first endpoint is Even.

    Even far endpoint: every maximum matching of the larger graph uses the
    edge.  Odd: nothing changes (the same ``labels`` object is returned).
    Unreachable: the Unreachable vertices alternately reachable from it
    become Odd/Even; ``relabel`` lists exactly those.
    """
    x, y = edge
    if labels[x] != EVEN:
        raise ValueError(f"endpoint {x} is not Even")
    mate = maximum if isinstance(maximum, list) else maximum.to_mate(view.num_vids)
    _, extra = _union_extra(view, [edge])
    lab = labels[y]
    if lab == EVEN:
        return EdgeClassification(EdgeEffect.FORCED_AUGMENT, labels)
    if lab == ODD:
        return EdgeClassification(EdgeEffect.NO_CHANGE, labels)
    rel = _relabel(view.adj, extra, mate, labels, [y])
    new = EgLabels([rel.get(v, l) for v, l in enumerate(labels.labels)])
    return EdgeClassification(EdgeEffect.UNREACHABLE_RELABEL, new, rel)


def batch_add_even_edges(view: GraphView, maximum, labels: EgLabels, new_edges: Iterable[tuple[int, int]]) -> CaseA | CaseB:
    """Add several edges whose applicant endpoints are Even.

    If some new edge reaches an Even post the result is :class:`CaseA` with
    one augmenting path; otherwise :class:`CaseB` with labels that differ
    only on formerly Unreachable vertices.  Work is proportional to the
    relabelled region plus the new edges.
    """
    mate = maximum if isinstance(maximum, list) else maximum.to_mate(view.num_vids)
    pairs, extra = _union_extra(view, [(a, p) if a & 1 == 0 else (p, a) for a, p in new_edges])
    for a, _ in pairs:
        if labels[a] != EVEN:
            raise ValueError(f"applicant endpoint {a} is not Even")
    for a, p in sorted(pairs):
        if labels[p] == EVEN:
            left = _even_path(view.adj, mate, labels, a)
            right = _even_path(view.adj, mate, labels, p)
            return CaseA(tuple(left + right[::-1]))
    rel = _relabel(view.adj, extra, mate, labels, [p for _, p in pairs])
    if not rel:
        return CaseB(labels)
    return CaseB(EgLabels([rel.get(v, l) for v, l in enumerate(labels.labels)]), rel)


# ---------------------------------------------------------------------------
# update path families: lexicographic-gain Bellman-Ford


def _dense_gain(rec: PhaseTrace, i: int) -> tuple[int, ...]:
    out = [0] * i
    for k, d in rec.gain:
        out[k - 1] += d
    return tuple(out)


def _best_path(trace: UpdateState, i: int, region: set[int] | None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Shortest gain-maximal alternating walk from ``a0`` w.r.t. ``M_i`` in ``H``'s phase-``i`` graph.

    ``region`` restricts the intermediate vertices (``None``: no restriction).
    Returns ``(gain, vertices)``.
    """
    w = trace.work
    a0 = trace.a0
    s = a0 & 1
    rank = w.e_rank
    cnt = trace.counter
    mates: dict[int, int] = {}

    def mate(v: int) -> int:
        m = mates.get(v)
        if m is None:
            m = mates[v] = w.mate_at(v, i)
        return m

    zero = (0,) * i
    best: dict[int, tuple[tuple[int, ...], int]] = {a0: (zero, 0)}
    parent: dict[int, tuple[int, int]] = {}
    end_best = (zero, 0, a0, -1)  # gain, length, last root-side vertex, free far vertex

    def better(g1, l1, g2, l2) -> bool:
        return g1 > g2 or (g1 == g2 and l1 < l2)

    q = deque([a0])
    inq = {a0}
    while q:
        x = q.popleft()
        inq.discard(x)
        gx, lx = best[x]
        mx = mate(x)
        for e in w.inc[x]:
            cnt.edges += 1
            if rank[e] > i:
                break
            y = w.e_post[e] if s == 0 else w.e_app[e]
            if y == mx or not trace.h_present(e, i):
                continue
            g1 = list(gx)
            g1[rank[e] - 1] += 1
            z = mate(y)
            if z < 0:
                g1t = tuple(g1)
                if better(g1t, lx + 1, end_best[0], end_best[1]):
                    end_best = (g1t, lx + 1, x, y)
                continue
            if region is not None and (z not in region or y not in region):
                continue
            g1[rank[w.edge_id[(z, y) if s == 0 else (y, z)]] - 1] -= 1
            g1t = tuple(g1)
            cur = best.get(z)
            if cur is None or better(g1t, lx + 2, cur[0], cur[1]):
                best[z] = (g1t, lx + 2)
                parent[z] = (x, y)
                if z not in inq:
                    inq.add(z)
                    q.append(z)
    for z, (g, length) in sorted(best.items()):
        if better(g, length, end_best[0], end_best[1]):
            end_best = (g, length, z, -1)
    gain, _, last, far = end_best
    verts = [last] if far < 0 else [last, far]
    v = last
    while v != a0:
        x, y = parent[v]
        verts[:0] = [x, y]
        v = x
    return gain, tuple(verts)


def _shortest(trace: UpdateState, i: int) -> UpdatePath:
    target = _dense_gain(trace.phases[i - 1], i)
    gain, verts = _best_path(trace, i, set(trace.component))
    if gain != target:
        gain, verts = _best_path(trace, i, None)
    if gain != target:  # pragma: no cover - contradicts the single-path property
        raise AssertionError(f"no single alternating path reaches the target gain {target}")
    return UpdatePath(verts, _classify(trace, verts, i))


@dataclass
class UpdatePathFamily:
    """The single alternating paths from ``a0`` that repair phase ``i``.

    A member ``P`` is an alternating path w.r.t. ``M_i`` whose unmatched
    edges lie in ``H``'s phase-``i`` graph and whose rank gain equals
    ``target``, so ``M_i`` flipped along ``P`` is rank-maximal for ranks
    ``1..i`` of ``H``.  :meth:`shortest` is polynomial;
    :meth:`members` enumerates and is meant for small instances.
    """

    trace: UpdateState
    index: int
    target: tuple[int, ...]

    def shortest(self) -> UpdatePath:
        return _shortest(self.trace, self.index)

    def members(self, limit: int = 100_000) -> list[UpdatePath]:
        t, w, i = self.trace, self.trace.work, self.index
        s = t.a0 & 1
        out: list[UpdatePath] = []
        gain = [0] * i
        path = [t.a0]
        seen = {t.a0}

        def emit() -> None:
            if tuple(gain) == self.target:
                if len(out) >= limit:
                    raise ValueError("update path enumeration limit exceeded")
                vs = tuple(path)
                out.append(UpdatePath(vs, _classify(t, vs, i)))

        def dfs(x: int) -> None:
            mx = w.mate_at(x, i)
            for e in w.inc[x]:
                if w.e_rank[e] > i:
                    break
                y = w.e_post[e] if s == 0 else w.e_app[e]
                if y == mx or y in seen or not t.h_present(e, i):
                    continue
                gain[w.e_rank[e] - 1] += 1
                z = w.mate_at(y, i)
                path.append(y)
                if z < 0:
                    emit()
                elif z not in seen:
                    k = w.e_rank[w.edge_id[(z, y) if s == 0 else (y, z)]]
                    gain[k - 1] -= 1
                    path.append(z)
                    seen.update((y, z))
                    emit()
                    dfs(z)
                    seen.difference_update((y, z))
                    path.pop()
                    gain[k - 1] += 1
                path.pop()
                gain[w.e_rank[e] - 1] -= 1

        emit()
        dfs(t.a0)
        return out


def collect_update_paths(trace: UpdateState, state: RmmState, i: int) -> UpdatePathFamily:
    """The family of repairing paths after phase ``i`` of the replay."""
    if trace.base is not state:
        raise ValueError("trace does not belong to this state")
    if trace.committed:
        raise ValueError("trace already committed; phase matchings are gone")
    if not 1 <= i <= len(trace.phases):
        raise PhaseOrderError(f"phase {i} has not been replayed")
    return UpdatePathFamily(trace, i, _dense_gain(trace.phases[i - 1], i))


def _classify(trace: UpdateState, verts: Sequence[int], i: int | None = None) -> PathKind:
    if len(verts) == 1:
        return PathKind.EMPTY
    if len(verts) % 2 == 0:
        return PathKind.AUGMENTING
    i = trace.work.r if i is None else i
    return PathKind.EVEN_TO_ACTIVATED if verts[-1] in trace.activated_vertices(i) else PathKind.EVEN_TO_ALIVE


# ---------------------------------------------------------------------------
# public operations


class PhaseKindError(RuntimeError):
    """A phase scan was requested for the wrong kind of phase."""


def begin_update(state: RmmState, event: ArrivalEvent, *, inplace: bool = False) -> UpdateState:
    """Start replaying ``state``'s phases for the grown instance.

    ``state`` is copied first unless ``inplace``; either way its labels and
    matching are only brought up to date by
    :func:`rmm.decomp.rebuild_decompositions`.
    """
    work = state if inplace else state.copy()
    new = work.add_arrival(event)
    a0 = event.vid
    trace = UpdateState(a0=a0, event=event, base=state, work=work, new_edges=tuple(new))
    trace.component.add(a0)
    trace.h_changes[a0] = ([], [])
    trace.engine = _Replay(trace)
    return trace


def _next_phase(trace: UpdateState, state: RmmState | None, i: int) -> None:
    if state is not None and trace.base is not state:
        raise ValueError("trace does not belong to this state")
    if trace.committed or i != len(trace.phases) + 1 or i > trace.r:
        raise PhaseOrderError(f"phase {i} cannot run after {len(trace.phases)} replayed phases")


def scan_phase(trace: UpdateState, i: int) -> PhaseTrace:
    _next_phase(trace, None, i)
    rec = trace.engine.run_phase(i)
    trace.phases.append(rec)
    return rec


def _scan_kind(trace: UpdateState, state: RmmState, i: int, augmenting: bool) -> PhaseTrace:
    _next_phase(trace, state, i)
    rp = trace.engine
    saved = (
        dict(rp.xm),
        rp.delta,
        {v: (list(ph), list(lb)) for v, (ph, lb) in trace.h_changes.items()},
        set(trace.component),
    )
    rec = rp.run_phase(i)
    if bool(rec.delta) != augmenting:
        rp.xm, rp.delta, trace.h_changes, trace.component = saved
        kind = "augmenting" if rec.delta else "non-augmenting"
        raise PhaseKindError(f"phase {i} is {kind}")
    trace.phases.append(rec)
    return rec


def scan_nonaug_phase(trace: UpdateState, state: RmmState, i: int) -> PhaseTrace:
    """Replay phase ``i``; the grown phase graph must not admit a larger matching than ``G``'s.

    On a precondition failure the trace is left as it was.
    """
    return _scan_kind(trace, state, i, False)


def scan_aug_phase(trace: UpdateState, state: RmmState, i: int) -> PhaseTrace:
    """Replay phase ``i``; the grown phase graph must admit a larger matching.

    Afterwards no vertex is activated: the extra matched edge absorbs them.
    """
    rec = _scan_kind(trace, state, i, True)
    return rec


def finish_update(trace: UpdateState) -> tuple[Matching, UpdatePath]:
    """Pick the shortest repairing path after the last phase and flip it."""
    w = trace.work
    r = w.r
    while len(trace.phases) < r:
        scan_phase(trace, len(trace.phases) + 1)
    trace.target = Signature(a + d for a, d in zip(w.signature.padded(r), _dense_gain(trace.phases[r - 1], r))) if r else Signature()
    path = _shortest(trace, r) if r else UpdatePath((trace.a0,), PathKind.EMPTY)
    trace.path = path
    verts = path.vertices
    mate = {v: w.mate[v] for v in verts if w.mate[v] >= 0}
    for k in range(1, len(verts) - 1, 2):
        mate[verts[k]] = -1
        mate[verts[k + 1]] = -1
    for k in range(0, len(verts) - 1, 2):
        mate[verts[k]] = verts[k + 1]
        mate[verts[k + 1]] = verts[k]
    trace.final_mate = mate
    pairs = {}
    for a in range(0, w.num_vids, 2):
        p = mate[a] if a in mate else w.mate[a]
        if p >= 0:
            pairs[a >> 1] = p >> 1
    return Matching(pairs), path


def check_after_arrival(state: RmmState, event: ArrivalEvent) -> bool:
    """True iff the current matching stays rank-maximal after the arrival.

    Stops at the first phase whose matching outgrows ``G``'s.  ``state`` is
    not modified.
    """
    trace = begin_update(state, event)
    for i in range(1, trace.r + 1):
        if scan_phase(trace, i).delta:
            return False
    return True


def apply_arrival(state: RmmState, event: ArrivalEvent, *, inplace: bool = False) -> tuple[Matching, UpdatePath, UpdateState]:
    """Replay the phases for the grown instance and pick the shortest single-path update.

    Returns ``(N_r, s_r, trace)``.
    """
    trace = begin_update(state, event, inplace=inplace)
    matching, path = finish_update(trace)
    return matching, path, trace
