"""Preference instances, matchings, signatures and arrival events.

Vertices are addressed in two ways.  The public surface uses
:class:`VertexId` (``a3``, ``p0``); the algorithms use a single integer
namespace in which applicant ``i`` is ``2*i`` and post ``j`` is ``2*j + 1``.
The interleaved encoding lets either side grow without renumbering the
other, which keeps arrival handling cheap.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple


class InstanceError(ValueError):
    """Raised for malformed or inconsistent instances, events and matchings."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Side(enum.IntEnum):
    APPLICANT = 0
    POST = 1

    @property
    def prefix(self) -> str:
        return "a" if self is Side.APPLICANT else "p"

    @property
    def other(self) -> Side:
        return Side(1 - self)


def applicant_vid(i: int) -> int:
    return 2 * i


def post_vid(j: int) -> int:
    return 2 * j + 1


def vid_side(v: int) -> Side:
    return Side(v & 1)


def vid_index(v: int) -> int:
    return v >> 1


def vid_name(v: int) -> str:
    return ("a" if v & 1 == 0 else "p") + str(v >> 1)


@dataclass(frozen=True, order=True)
class VertexId:
    side: Side
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise InstanceError(f"negative vertex index {self.index}")

    @property
    def vid(self) -> int:
        return 2 * self.index + int(self.side)

    @classmethod
    def from_vid(cls, v: int) -> VertexId:
        return cls(Side(v & 1), v >> 1)

    @classmethod
    def parse(cls, token: str) -> VertexId:
        m = _VERTEX_RE.fullmatch(token)
        if m is None:
            raise InstanceError(f"bad vertex token {token!r}")
        side = Side.APPLICANT if m.group(1) == "a" else Side.POST
        return cls(side, int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.side.prefix}{self.index}"


_VERTEX_RE = re.compile(r"([ap])(\d+)")
_PAIR_RE = re.compile(r"([ap])(\d+)@(-?\d+)")


class RankedEdge(NamedTuple):
    applicant: int
    post: int
    rank: int


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Signature(tuple):
    """Per-rank counts of matched applicants; ``sig[k]`` counts rank ``k+1``."""

    def __new__(cls, counts: Iterable[int] = ()):
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise InstanceError(f"negative signature entry in {counts}")
        return super().__new__(cls, counts)

    def padded(self, length: int) -> Signature:
        if length < len(self):
            raise ValueError("cannot pad a signature to a shorter length")
        return Signature(tuple(self) + (0,) * (length - len(self)))

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self) + ")"

    __repr__ = __str__


def compare_signatures(s1: Iterable[int], s2: Iterable[int]) -> Ordering:
    """Lexicographic comparison after zero-padding to a common length."""
    a, b = list(s1), list(s2)
    n = max(len(a), len(b))
    a += [0] * (n - len(a))
    b += [0] * (n - len(b))
    if a == b:
        return Ordering.EQUAL
    return Ordering.GREATER if a > b else Ordering.LESS


@dataclass(frozen=True)
class Instance:
    """Bipartite preference graph with edges partitioned by rank.

    ``edges`` is kept sorted by ``(rank, applicant, post)`` so that the rank
    groups are contiguous slices; ``rank_groups[k-1]`` is the slice of rank
    ``k``.  Ties (one applicant ranking two posts equally) and gaps in an
    applicant's ranks are both allowed.
    """

    applicant_count: int
    post_count: int
    max_rank: int
    edges: tuple[RankedEdge, ...] = ()
    rank_groups: tuple[tuple[RankedEdge, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.applicant_count < 0 or self.post_count < 0 or self.max_rank < 0:
            raise InstanceError("counts and max rank must be nonnegative")
        edges = tuple(sorted((RankedEdge(*e) for e in self.edges), key=lambda e: (e.rank, e.applicant, e.post)))
        seen = set()
        for e in edges:
            if not 0 <= e.applicant < self.applicant_count:
                raise InstanceError(f"unknown applicant a{e.applicant}")
            if not 0 <= e.post < self.post_count:
                raise InstanceError(f"unknown post p{e.post}")
            if e.rank < 1:
                raise InstanceError(f"rank must be >= 1, got {e.rank} on a{e.applicant}-p{e.post}")
            if e.rank > self.max_rank:
                raise InstanceError(f"rank {e.rank} exceeds max rank {self.max_rank}")
            if (e.applicant, e.post) in seen:
                raise InstanceError(f"duplicate edge a{e.applicant}-p{e.post}")
            seen.add((e.applicant, e.post))
        groups: list[list[RankedEdge]] = [[] for _ in range(self.max_rank)]
        for e in edges:
            groups[e.rank - 1].append(e)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "rank_groups", tuple(tuple(g) for g in groups))

    @property
    def num_vids(self) -> int:
        """Size of the interleaved vertex-id space."""
        return max(2 * self.applicant_count, 2 * self.post_count)

    def vertices(self) -> Iterator[int]:
        for i in range(self.applicant_count):
            yield 2 * i
        for j in range(self.post_count):
            yield 2 * j + 1

    def has_vertex(self, v: int) -> bool:
        idx = v >> 1
        return idx < (self.post_count if v & 1 else self.applicant_count) and v >= 0

    def edges_of_rank(self, k: int) -> tuple[RankedEdge, ...]:
        if 1 <= k <= self.max_rank:
            return self.rank_groups[k - 1]
        return ()

    def rank_lookup(self) -> dict[tuple[int, int], int]:
        return {(e.applicant, e.post): e.rank for e in self.edges}

    def preferences(self, applicant: int) -> list[tuple[int, int]]:
        """``(post, rank)`` pairs of one applicant in increasing post order."""
        return sorted((e.post, e.rank) for e in self.edges if e.applicant == applicant)

    def with_arrival(self, event: ArrivalEvent) -> Instance:
        """Return the grown instance; ``self`` is left untouched."""
        check_event(self, event)
        if event.side is Side.APPLICANT:
            new = [RankedEdge(event.index, p, k) for p, k in event.edges]
            na, np_ = self.applicant_count + 1, self.post_count
        else:
            new = [RankedEdge(a, event.index, k) for a, k in event.edges]
            na, np_ = self.applicant_count, self.post_count + 1
        r = max([self.max_rank] + [k for _, k in event.edges])
        return Instance(na, np_, r, self.edges + tuple(new))


@dataclass(frozen=True)
class ArrivalEvent:
    """A fresh vertex together with its edges to existing vertices.

    ``edges`` holds ``(partner_index, rank)`` pairs where the partner lives on
    the opposite side.  For an arriving applicant the ranks are its own
    preferences; for an arriving post they are the rank each listed
    applicant gives to it.
    """

    side: Side
    index: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "edges", tuple(sorted((int(p), int(k)) for p, k in self.edges)))

    @property
    def vertex(self) -> VertexId:
        return VertexId(self.side, self.index)

    @property
    def vid(self) -> int:
        return 2 * self.index + int(self.side)

    def __str__(self) -> str:
        other = self.side.other.prefix
        body = " ".join(f"{other}{p}@{k}" for p, k in self.edges)
        return f"arrive {self.vertex} :" + (f" {body}" if body else "")


def check_event(instance, event: ArrivalEvent) -> None:
    """Validate ``event`` against anything exposing ``applicant_count`` and ``post_count``."""
    expected = instance.applicant_count if event.side is Side.APPLICANT else instance.post_count
    if event.index != expected:
        raise InstanceError(f"arriving vertex {event.vertex} is not the next fresh id (expected index {expected})")
    limit = instance.post_count if event.side is Side.APPLICANT else instance.applicant_count
    partners = set()
    for p, k in event.edges:
        if not 0 <= p < limit:
            raise InstanceError(f"arrival of {event.vertex} names unknown partner {event.side.other.prefix}{p}")
        if k < 1:
            raise InstanceError(f"rank must be >= 1, got {k}")
        if p in partners:
            raise InstanceError(f"duplicate partner {event.side.other.prefix}{p} in arrival of {event.vertex}")
        partners.add(p)


class Matching(Mapping[int, int]):
    """Partial injective map applicant index -> post index."""

    __slots__ = ("_pairs",)

    def __init__(self, pairs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        d: dict[int, int] = {}
        used: set[int] = set()
        for a, p in items:
            if a in d:
                raise InstanceError(f"applicant a{a} matched twice")
            if p in used:
                raise InstanceError(f"post p{p} matched twice")
            d[a] = p
            used.add(p)
        self._pairs = dict(sorted(d.items()))

    @classmethod
    def from_mate(cls, mate: list[int]) -> Matching:
        """Build from an interleaved mate array (``-1`` marks a free vertex)."""
        return cls((v >> 1, mate[v] >> 1) for v in range(0, len(mate), 2) if mate[v] >= 0)

    def __getitem__(self, a: int) -> int:
        return self._pairs[a]

    def __iter__(self):
        return iter(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Matching):
            return self._pairs == other._pairs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._pairs.items()))

    def __repr__(self) -> str:
        return "Matching({" + ", ".join(f"a{a}: p{p}" for a, p in self._pairs.items()) + "})"

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._pairs.items())

    def post_of(self, a: int) -> int | None:
        return self._pairs.get(a)

    def applicant_of(self, p: int) -> int | None:
        for a, q in self._pairs.items():
            if q == p:
                return a
        return None

    def to_mate(self, num_vids: int) -> list[int]:
        mate = [-1] * num_vids
        for a, p in self._pairs.items():
            mate[2 * a] = 2 * p + 1
            mate[2 * p + 1] = 2 * a
        return mate

    def symmetric_difference(self, other: Matching) -> frozenset[tuple[int, int]]:
        return self.edge_set() ^ other.edge_set()


def signature_of(instance: Instance, matching: Mapping[int, int]) -> Signature:
    ranks = instance.rank_lookup()
    counts = [0] * instance.max_rank
    for a, p in matching.items():
        k = ranks.get((a, p))
        if k is None:
            raise InstanceError(f"matched pair a{a}-p{p} is not an edge of the instance")
        counts[k - 1] += 1
    return Signature(counts)


def check_matching(instance: Instance, matching: Mapping[int, int]) -> None:
    signature_of(instance, matching)
    if len(set(matching.values())) != len(matching):
        raise InstanceError("matching is not injective on posts")


# ---------------------------------------------------------------------------
# Text formats


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _decode(text: str | bytes) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError(f"input is not UTF-8: {exc}") from None
    return text


def _parse_pairs(body: str, side: str, no: int) -> list[tuple[int, int]]:
    pairs = []
    for tok in body.split():
        m = _PAIR_RE.fullmatch(tok)
        if m is None or m.group(1) != side:
            raise InstanceError(f"expected {side}<id>@<rank>, got {tok!r}", no)
        rank = int(m.group(3))
        if rank < 1:
            raise InstanceError(f"rank must be >= 1, got {rank}", no)
        pairs.append((int(m.group(2)), rank))
    return pairs


def parse_instance(text: str | bytes) -> Instance:
    """Parse the ``rmm 1`` line format.

    >>> inst = parse_instance("rmm 1\\n1 1 1\\na0 : p0@1\\n")
    >>> inst.edges
    (RankedEdge(applicant=0, post=0, rank=1),)
    """
    lines = list(_content_lines(_decode(text)))
    if not lines or lines[0][1].split() != ["rmm", "1"]:
        raise InstanceError("missing 'rmm 1' header", lines[0][0] if lines else 1)
    if len(lines) < 2:
        raise InstanceError("missing '<applicants> <posts> <max_rank>' line", lines[0][0] + 1)
    no, counts = lines[1]
    try:
        na, np_, r = (int(x) for x in counts.split())
    except ValueError:
        raise InstanceError(f"expected three integers, got {counts!r}", no) from None
    if min(na, np_, r) < 0:
        raise InstanceError("counts must be nonnegative", no)
    edges: list[RankedEdge] = []
    seen_applicants: set[int] = set()
    for no, line in lines[2:]:
        head, sep, body = line.partition(":")
        if not sep:
            raise InstanceError(f"expected 'a<i> : ...', got {line!r}", no)
        m = _VERTEX_RE.fullmatch(head.strip())
        if m is None or m.group(1) != "a":
            raise InstanceError(f"expected applicant id before ':', got {head.strip()!r}", no)
        a = int(m.group(2))
        if a >= na:
            raise InstanceError(f"unknown applicant a{a}", no)
        if a in seen_applicants:
            raise InstanceError(f"applicant a{a} listed twice", no)
        seen_applicants.add(a)
        posts = set()
        for p, k in _parse_pairs(body, "p", no):
            if p >= np_:
                raise InstanceError(f"unknown post p{p}", no)
            if p in posts:
                raise InstanceError(f"duplicate edge a{a}-p{p}", no)
            if k > r:
                raise InstanceError(f"rank {k} exceeds max rank {r}", no)
            posts.add(p)
            edges.append(RankedEdge(a, p, k))
    return Instance(na, np_, r, tuple(edges))


def serialize_instance(instance: Instance) -> str:
    by_applicant: list[list[tuple[int, int]]] = [[] for _ in range(instance.applicant_count)]
    for e in instance.edges:
        by_applicant[e.applicant].append((e.post, e.rank))
    out = ["rmm 1", f"{instance.applicant_count} {instance.post_count} {instance.max_rank}"]
    for a, prefs in enumerate(by_applicant):
        body = " ".join(f"p{p}@{k}" for p, k in sorted(prefs))
        out.append(f"a{a} :" + (f" {body}" if body else ""))
    return "\n".join(out) + "\n"


def parse_events(text: str | bytes) -> list[ArrivalEvent]:
    """Parse ``arrive a<new> : p<j>@<rank> ...`` lines (or the post variant)."""
    events = []
    for no, line in _content_lines(_decode(text)):
        head, sep, body = line.partition(":")
        words = head.split()
        if not sep or len(words) != 2 or words[0] != "arrive":
            raise InstanceError(f"expected 'arrive <vertex> : ...', got {line!r}", no)
        m = _VERTEX_RE.fullmatch(words[1])
        if m is None:
            raise InstanceError(f"bad vertex token {words[1]!r}", no)
        side = Side.APPLICANT if m.group(1) == "a" else Side.POST
        pairs = _parse_pairs(body, side.other.prefix, no)
        if len({p for p, _ in pairs}) != len(pairs):
            raise InstanceError("duplicate partner in arrival", no)
        events.append(ArrivalEvent(side, int(m.group(2)), tuple(pairs)))
    return events


def serialize_events(events: Iterable[ArrivalEvent]) -> str:
    return "".join(str(ev) + "\n" for ev in events)


def format_matching(instance: Instance, matching: Mapping[int, int]) -> str:
    ranks = instance.rank_lookup()
    lines = [f"a{a} p{p} {ranks[(a, p)]}" for a, p in sorted(matching.items())]
    lines.append(f"signature: {signature_of(instance, matching)}")
    return "\n".join(lines) + "\n"


def parse_matching(text: str | bytes) -> Matching:
    pairs = []
    for no, line in _content_lines(_decode(text)):
        if line.startswith("signature:"):
            continue
        words = line.split()
        if len(words) != 3:
            raise InstanceError(f"expected 'a<i> p<j> <rank>', got {line!r}", no)
        a, p = VertexId.parse(words[0]), VertexId.parse(words[1])
        if a.side is not Side.APPLICANT or p.side is not Side.POST:
            raise InstanceError(f"expected applicant then post, got {line!r}", no)
        pairs.append((a.index, p.index))
    return Matching(pairs)
