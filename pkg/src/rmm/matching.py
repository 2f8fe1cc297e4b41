"""Maximum-matching primitives on bipartite edge subsets.

All routines work on the interleaved integer vertex ids of
:mod:`rmm.instance` (applicants even, posts odd) and on a ``mate`` array in
which ``mate[v] == -1`` marks a free vertex.  Adjacency lists are expected in
increasing vertex-id order; that order is the tie-breaking rule, so equal
inputs always produce equal matchings and forests.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .instance import InstanceError


class Label(enum.IntEnum):
    EVEN = 0
    ODD = 1
    UNREACHABLE = 2

    @property
    def letter(self) -> str:
        return "EOU"[self]


EVEN, ODD, UNREACHABLE = Label.EVEN, Label.ODD, Label.UNREACHABLE


class NotMaximumError(ValueError):
    """The supplied matching admits an augmenting path."""


class WorkCounter:
    """Tally of adjacency entries examined; the benchmark's cost proxy."""

    __slots__ = ("edges",)

    def __init__(self):
        self.edges = 0

    def __repr__(self) -> str:
        return f"WorkCounter(edges={self.edges})"


class GraphView:
    """A plain bipartite graph over a fixed vertex universe.

    ``edges`` are ``(applicant_vid, post_vid)`` pairs.  Vertices that carry no
    edge are still part of the universe (an isolated vertex is free and
    therefore Even).
    """

    __slots__ = ("num_vids", "edges", "adj")

    def __init__(self, num_vids: int, edges: Iterable[tuple[int, int]] = ()):
        self.num_vids = num_vids
        es = sorted({(a, p) if a & 1 == 0 else (p, a) for a, p in edges})
        adj: list[list[int]] = [[] for _ in range(num_vids)]
        for a, p in es:
            if not (0 <= a < num_vids and 0 <= p < num_vids) or a & 1 or not p & 1:
                raise InstanceError(f"edge ({a}, {p}) is not an applicant-post pair inside the universe")
            adj[a].append(p)
            adj[p].append(a)
        for lst in adj:
            lst.sort()
        self.edges = tuple(es)
        self.adj = adj

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphView):
            return NotImplemented
        return self.num_vids == other.num_vids and self.edges == other.edges

    def __repr__(self) -> str:
        return f"GraphView(num_vids={self.num_vids}, edges={len(self.edges)})"

    def has_edge(self, a: int, p: int) -> bool:
        return p in self.adj[a]

    def check_matching(self, mate: Sequence[int]) -> None:
        if len(mate) != self.num_vids:
            raise InstanceError("mate array does not match the vertex universe")
        for v, w in enumerate(mate):
            if w < 0:
                continue
            if mate[w] != v:
                raise InstanceError(f"mate array is not symmetric at {v}")
            if v & 1 == 0 and w not in self.adj[v]:
                raise InstanceError(f"matched pair ({v}, {w}) is not an edge of the view")


@dataclass
class EgLabels:
    """Edmonds-Gallai classes of every vertex of a view."""

    labels: list[Label]

    def __getitem__(self, v: int) -> Label:
        return self.labels[v]

    def __len__(self) -> int:
        return len(self.labels)

    def of(self, label: Label) -> list[int]:
        return [v for v, x in enumerate(self.labels) if x == label]


@dataclass
class AlternatingForest:
    """Alternating BFS forest; ``parity[v]`` is 0 at even depth, 1 at odd."""

    roots: list[int]
    parent: dict[int, int] = field(default_factory=dict)
    parity: dict[int, int] = field(default_factory=dict)

    def __contains__(self, v: int) -> bool:
        return v in self.parity

    def __len__(self) -> int:
        return len(self.parity)

    def path_to(self, v: int) -> list[int]:
        """Root-to-``v`` vertex sequence."""
        out = [v]
        while v in self.parent:
            v = self.parent[v]
            out.append(v)
        out.reverse()
        return out


# ---------------------------------------------------------------------------
# core routines on raw adjacency


def _neighbors(adj: Sequence[Sequence[int]], v: int, reverse: bool) -> Sequence[int]:
    return adj[v][::-1] if reverse else adj[v]


def hopcroft_karp(
    adj: Sequence[Sequence[int]],
    mate: list[int],
    applicants: Sequence[int],
    counter: WorkCounter | None = None,
    reverse: bool = False,
) -> int:
    """Augment ``mate`` in place to a maximum matching; returns the number of augmentations.

    Each round layers the graph by a BFS from every free applicant and then
    extracts vertex-disjoint shortest augmenting paths, visiting neighbours in
    adjacency order (reversed when ``reverse``).
    """
    order = list(applicants)[::-1] if reverse else list(applicants)
    total = 0
    inf = 1 << 60
    while True:
        dist: dict[int, int] = {}
        q = deque()
        for a in order:
            if mate[a] < 0:
                dist[a] = 0
                q.append(a)
        found = inf
        work = 0
        while q:
            a = q.popleft()
            d = dist[a]
            if d >= found:
                continue
            for p in _neighbors(adj, a, reverse):
                work += 1
                b = mate[p]
                if b < 0:
                    if found == inf:
                        found = d + 1
                elif b not in dist:
                    dist[b] = d + 1
                    q.append(b)
        if counter is not None:
            counter.edges += work
        if found == inf:
            return total
        work = 0
        # Vertex-disjoint shortest augmenting paths along the BFS layers.
        used: set[int] = set()
        for root in order:
            if mate[root] >= 0 or dist.get(root) != 0:
                continue
            path_a = [root]
            path_p: list[int] = []
            iters = [iter(_neighbors(adj, root, reverse))]
            done = False
            while path_a and not done:
                a = path_a[-1]
                for p in iters[-1]:
                    work += 1
                    if p in used:
                        continue
                    b = mate[p]
                    if b < 0:
                        if dist[a] + 1 == found:
                            used.add(p)
                            path_p.append(p)
                            for x, y in zip(path_a, path_p):
                                mate[x] = y
                                mate[y] = x
                            total += 1
                            done = True
                            break
                    elif dist.get(b) == dist[a] + 1:
                        used.add(p)
                        path_p.append(p)
                        path_a.append(b)
                        iters.append(iter(_neighbors(adj, b, reverse)))
                        break
                else:
                    dist[a] = inf
                    path_a.pop()
                    iters.pop()
                    if path_p:
                        path_p.pop()
        if counter is not None:
            counter.edges += work


def eg_labels(
    adj: Sequence[Sequence[int]],
    mate: Sequence[int],
    vertices: Iterable[int],
    counter: WorkCounter | None = None,
    check: bool = True,
) -> list[int]:
    """Even/Odd/Unreachable classes w.r.t. a maximum matching.

    In a bipartite graph a vertex reached from a free applicant is Even on
    the applicant side and Odd on the post side; the reverse holds for free
    posts.  ``check`` raises :class:`NotMaximumError` when a free applicant
    reaches a free post.
    """
    n = len(adj)
    lab = [UNREACHABLE] * n
    q = deque()
    for v in vertices:
        if mate[v] < 0:
            lab[v] = EVEN
            q.append(v)
    work = 0
    while q:
        x = q.popleft()
        for y in adj[x]:
            work += 1
            if y == mate[x] or lab[y] != UNREACHABLE:
                if check and lab[y] == EVEN and (y & 1) != (x & 1):
                    raise NotMaximumError(f"augmenting path between free vertices reaching {x} and {y}")
                continue
            w = mate[y]
            if w < 0:
                if check:
                    raise NotMaximumError(f"augmenting path ending at free vertex {y}")
                continue
            lab[y] = ODD
            if lab[w] == UNREACHABLE:
                lab[w] = EVEN
                q.append(w)
            elif check and lab[w] == ODD:
                raise NotMaximumError(f"augmenting path through {y} and {w}")
    if counter is not None:
        counter.edges += work
    return lab


def alternating_forest(
    adj: Sequence[Sequence[int]],
    mate: Sequence[int],
    roots: Iterable[int],
    counter: WorkCounter | None = None,
) -> AlternatingForest:
    forest = AlternatingForest(roots=[])
    q = deque()
    for r in roots:
        if mate[r] >= 0:
            raise InstanceError(f"forest root {r} is matched")
        if r in forest.parity:
            continue
        forest.roots.append(r)
        forest.parity[r] = 0
        q.append(r)
    work = 0
    while q:
        x = q.popleft()
        for y in adj[x]:
            work += 1
            if y == mate[x] or y in forest.parity:
                continue
            forest.parity[y] = 1
            forest.parent[y] = x
            w = mate[y]
            if w >= 0 and w not in forest.parity:
                forest.parity[w] = 0
                forest.parent[w] = y
                q.append(w)
    if counter is not None:
        counter.edges += work
    return forest


# ---------------------------------------------------------------------------
# public operations


def _mate_from_seed(view: GraphView, seed) -> list[int]:
    if seed is None:
        return [-1] * view.num_vids
    if isinstance(seed, list):
        mate = list(seed)
    else:  # Matching (applicant index -> post index)
        mate = [-1] * view.num_vids
        for a, p in seed.items():
            mate[2 * a] = 2 * p + 1
            mate[2 * p + 1] = 2 * a
    view.check_matching(mate)
    return mate


def augment_to_maximum(view: GraphView, seed=None, counter: WorkCounter | None = None, reverse: bool = False) -> list[int]:
    """Return a maximum matching of ``view`` obtained by augmenting ``seed``.

    ``seed`` may be a mate array or a :class:`~rmm.instance.Matching`; it is
    not modified.
    """
    mate = _mate_from_seed(view, seed)
    applicants = range(0, view.num_vids, 2)
    hopcroft_karp(view.adj, mate, applicants, counter, reverse)
    return mate


def eg_decompose(view: GraphView, maximum, counter: WorkCounter | None = None) -> EgLabels:
    """Edmonds-Gallai labels of ``view``; raises if ``maximum`` is not maximum."""
    mate = _mate_from_seed(view, maximum)
    return EgLabels([Label(x) for x in eg_labels(view.adj, mate, range(view.num_vids), counter)])


def build_alternating_forest(view: GraphView, matching, roots: Iterable[int], counter: WorkCounter | None = None) -> AlternatingForest:
    mate = _mate_from_seed(view, matching)
    return alternating_forest(view.adj, mate, roots, counter)


def matching_size(mate: Sequence[int]) -> int:
    return sum(1 for v in range(0, len(mate), 2) if mate[v] >= 0)
