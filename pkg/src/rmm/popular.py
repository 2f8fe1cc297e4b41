"""Popular matchings for strict one-sided preferences.

The reduction keeps two edges per applicant: rank 1 to its first choice
``f(a)`` and rank 2 to ``s(a)``, the first post on its list that is Even in
the rank-1 graph, falling back to a private last-resort post.  In the rank-1
graph the Even posts are exactly the posts nobody ranks first, so ``s(a)``
is the first post on ``a``'s list that is nobody's first choice.  A popular
matching exists iff a rank-maximal matching of the reduced instance matches
every applicant; dropping the last-resort pairs then gives one.

Reduced post ids are handed out in arrival order, so real posts and
last-resort posts interleave; :class:`PopularReduction` keeps both maps.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .decomp import rebuild_decompositions
from .dynamic import EdgeEffect, apply_arrival, classify_edge_addition
from .instance import ArrivalEvent, Instance, InstanceError, Matching, Side, _content_lines, _decode, _VERTEX_RE
from .matching import EVEN, GraphView, augment_to_maximum, eg_decompose
from .static import RmmState, rmm_solve


class NoPopularMatching:
    """Verdict: every matching is beaten by some other matching."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NoPopularMatching"

    def __bool__(self) -> bool:
        return False


NO_POPULAR = NoPopularMatching()


@dataclass(frozen=True)
class PreferenceInstance:
    """Strict preference lists, best first, over posts ``0..post_count-1``."""

    post_count: int
    lists: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "lists", tuple(tuple(int(p) for p in lst) for lst in self.lists))
        for a, lst in enumerate(self.lists):
            if len(set(lst)) != len(lst):
                raise InstanceError(f"a{a} lists a post twice (ties are not supported)")
            for p in lst:
                if not 0 <= p < self.post_count:
                    raise InstanceError(f"a{a} lists unknown post p{p}")

    @property
    def applicant_count(self) -> int:
        return len(self.lists)

    def with_arrival(self, event: ArrivalEvent) -> PreferenceInstance:
        """Grow by one vertex.

        An applicant's edge ranks give its list order.  A post's edges are
        ``(applicant, position)`` pairs: the post is inserted at that
        1-based position of the applicant's list.
        """
        if event.side is Side.APPLICANT:
            if event.index != self.applicant_count:
                raise InstanceError(f"arriving a{event.index} is not the next fresh applicant")
            order = sorted(event.edges, key=lambda e: e[1])
            if len({k for _, k in order}) != len(order):
                raise InstanceError("ties in an arriving applicant's list")
            return PreferenceInstance(self.post_count, self.lists + (tuple(p for p, _ in order),))
        if event.index != self.post_count:
            raise InstanceError(f"arriving p{event.index} is not the next fresh post")
        lists = [list(x) for x in self.lists]
        for a, pos in event.edges:
            if not 0 <= a < len(lists):
                raise InstanceError(f"unknown applicant a{a}")
            if not 1 <= pos <= len(lists[a]) + 1:
                raise InstanceError(f"position {pos} is outside a{a}'s list")
            lists[a].insert(pos - 1, event.index)
        return PreferenceInstance(self.post_count + 1, tuple(tuple(x) for x in lists))


@dataclass(frozen=True)
class PopularReduction:
    """The two-rank instance behind a preference instance.

    ``f_post[a]`` and ``s_post[a]`` are real post indices (``None`` for the
    last resort).  ``post_map[p]`` is the reduced id of real post ``p``;
    ``last_resort[a]`` the reduced id of ``a``'s last-resort post.
    """

    pref: PreferenceInstance
    instance: Instance
    f_post: tuple[int | None, ...]
    s_post: tuple[int | None, ...]
    post_map: tuple[int, ...]
    last_resort: tuple[int, ...]

    def real_post(self, q: int) -> int | None:
        """Real index of reduced post ``q``; ``None`` for a last-resort post."""
        try:
            return self.post_map.index(q)
        except ValueError:
            return None

    def lift(self, matching: Matching) -> Matching:
        """Translate a reduced matching back, dropping last-resort pairs."""
        inv = {q: p for p, q in enumerate(self.post_map)}
        return Matching({a: inv[q] for a, q in matching.items() if q in inv})


def _first_choices(pref: PreferenceInstance) -> tuple[int | None, ...]:
    return tuple(lst[0] if lst else None for lst in pref.lists)


def _second_choices(pref: PreferenceInstance, firsts: set[int]) -> tuple[int | None, ...]:
    return tuple(next((p for p in lst if p not in firsts), None) for lst in pref.lists)


def _even_posts_rank1(pref: PreferenceInstance) -> set[int]:
    """Posts Even in the graph of first-choice edges (computed, not assumed)."""
    n = max(2 * pref.applicant_count, 2 * pref.post_count)
    view = GraphView(n, ((2 * a, 2 * lst[0] + 1) for a, lst in enumerate(pref.lists) if lst))
    labels = eg_decompose(view, augment_to_maximum(view))
    return {p for p in range(pref.post_count) if labels[2 * p + 1] == EVEN}


def _build(pref: PreferenceInstance, f: Sequence[int | None], s: Sequence[int | None]) -> PopularReduction:
    n, P = pref.applicant_count, pref.post_count
    post_map = tuple(range(P))
    last = tuple(P + a for a in range(n))
    edges = []
    for a in range(n):
        if f[a] is not None:
            edges.append((a, f[a], 1))
        edges.append((a, s[a] if s[a] is not None else last[a], 2))
    return PopularReduction(pref, Instance(n, P + n, 2, tuple(edges)), tuple(f), tuple(s), post_map, last)


def reduce_to_rmm(pref: PreferenceInstance) -> PopularReduction:
    """Build the two-rank instance; an empty list yields only the last-resort edge."""
    f = _first_choices(pref)
    even = _even_posts_rank1(pref)
    s = tuple(next((p for p in lst[1:] if p in even), None) for lst in pref.lists)
    return _build(pref, f, s)


@dataclass
class PopularState:
    """A solved preference instance that can absorb arrivals."""

    reduction: PopularReduction
    state: RmmState
    matching: Matching | NoPopularMatching
    incremental: bool = False


def _verdict(red: PopularReduction, state: RmmState) -> Matching | NoPopularMatching:
    m = state.matching
    if len(m) < red.pref.applicant_count:
        return NO_POPULAR
    return red.lift(m)


def popular_solve(pref: PreferenceInstance) -> Matching | NoPopularMatching:
    """A popular matching of ``pref`` or :data:`NO_POPULAR`."""
    return popular_state(pref).matching


def popular_state(pref: PreferenceInstance) -> PopularState:
    red = reduce_to_rmm(pref)
    st = rmm_solve(red.instance)
    return PopularState(red, st, _verdict(red, st))


def _arrive(state: RmmState, event: ArrivalEvent) -> RmmState:
    n, _, trace = apply_arrival(state, event, inplace=True)
    return rebuild_decompositions(state, trace, n)


def popular_update(ps: PopularState, event: ArrivalEvent) -> PopularState:
    """Absorb one arrival (see :meth:`PreferenceInstance.with_arrival` for the event meaning).

    When the first and second choices of the existing applicants survive the
    arrival, the reduced instance only grows by vertices and the update runs
    through the incremental engine; otherwise the reduction is rebuilt.
    ``ps`` is consumed.
    """
    red = ps.reduction
    pref = red.pref.with_arrival(event)
    if event.side is Side.APPLICANT:
        lst = pref.lists[-1]
        firsts = {p for p in red.f_post if p is not None}
        shifted = False
        if lst:
            n = max(2 * pref.applicant_count, 2 * pref.post_count)
            view = GraphView(n, ((2 * a, 2 * f + 1) for a, f in enumerate(red.f_post) if f is not None))
            mate = augment_to_maximum(view)
            labels = eg_decompose(view, mate)
            # the new applicant is isolated, hence Even, in the rank-1 graph
            eff = classify_edge_addition(view, mate, labels, (2 * event.index, 2 * lst[0] + 1))
            shifted = eff.effect is EdgeEffect.FORCED_AUGMENT and lst[0] in red.s_post
        if not shifted:
            f_new = lst[0] if lst else None
            firsts_new = firsts | ({f_new} if f_new is not None else set())
            s_new = next((p for p in lst[1:] if p not in firsts_new), None)
            st = ps.state
            lr = st.post_count
            st = _arrive(st, ArrivalEvent(Side.POST, lr, ()))
            edges = [(red.post_map[f_new], 1)] if f_new is not None else []
            edges.append((red.post_map[s_new] if s_new is not None else lr, 2))
            st = _arrive(st, ArrivalEvent(Side.APPLICANT, event.index, tuple(edges)))
            new_red = PopularReduction(
                pref,
                st.instance,
                red.f_post + (f_new,),
                red.s_post + (s_new,),
                red.post_map,
                red.last_resort + (lr,),
            )
            return PopularState(new_red, st, _verdict(new_red, st), incremental=True)
    else:
        f = _first_choices(pref)
        s = _second_choices(pref, {p for p in f if p is not None})
        if f == red.f_post and s == red.s_post:
            st = ps.state
            q = st.post_count
            st = _arrive(st, ArrivalEvent(Side.POST, q, ()))
            new_red = PopularReduction(pref, st.instance, f, s, red.post_map + (q,), red.last_resort)
            return PopularState(new_red, st, _verdict(new_red, st), incremental=True)
    return popular_state(pref)


# ---------------------------------------------------------------------------
# text formats


def parse_preferences(text: str | bytes) -> PreferenceInstance:
    """Parse ``a<i> : p<j> p<k> ...`` lines (best first).

    An optional ``pref 1`` header followed by ``<applicants> <posts>`` fixes
    the counts; without it they are inferred from the ids used.
    """
    lines = list(_content_lines(_decode(text)))
    na = np_ = None
    if lines and lines[0][1].split() == ["pref", "1"]:
        if len(lines) < 2:
            raise InstanceError("missing '<applicants> <posts>' line", lines[0][0] + 1)
        no, counts = lines[1]
        try:
            na, np_ = (int(x) for x in counts.split())
        except ValueError:
            raise InstanceError(f"expected two integers, got {counts!r}", no) from None
        lines = lines[2:]
    lists: dict[int, list[int]] = {}
    for no, line in lines:
        head, sep, body = line.partition(":")
        m = _VERTEX_RE.fullmatch(head.strip())
        if not sep or m is None or m.group(1) != "a":
            raise InstanceError(f"expected 'a<i> : p<j> ...', got {line!r}", no)
        a = int(m.group(2))
        if a in lists:
            raise InstanceError(f"applicant a{a} listed twice", no)
        lst = []
        for tok in body.split():
            mm = _VERTEX_RE.fullmatch(tok)
            if mm is None or mm.group(1) != "p":
                raise InstanceError(f"expected p<id>, got {tok!r}", no)
            p = int(mm.group(2))
            if p in lst:
                raise InstanceError(f"a{a} lists p{p} twice (ties are not supported)", no)
            lst.append(p)
        lists[a] = lst
    if na is None:
        na = max(lists, default=-1) + 1
    if np_ is None:
        np_ = max((p for lst in lists.values() for p in lst), default=-1) + 1
    if any(a >= na for a in lists):
        raise InstanceError("applicant id exceeds the declared count")
    try:
        return PreferenceInstance(np_, tuple(tuple(lists.get(a, ())) for a in range(na)))
    except InstanceError as exc:
        raise InstanceError(str(exc)) from None


def serialize_preferences(pref: PreferenceInstance) -> str:
    out = ["pref 1", f"{pref.applicant_count} {pref.post_count}"]
    for a, lst in enumerate(pref.lists):
        body = " ".join(f"p{p}" for p in lst)
        out.append(f"a{a} :" + (f" {body}" if body else ""))
    return "\n".join(out) + "\n"


def parse_preference_events(text: str | bytes) -> list[ArrivalEvent]:
    """``arrive a<new> : p<j> p<k> ...`` (list order) or ``arrive p<new> : a<i>@<position> ...``."""
    events = []
    for no, line in _content_lines(_decode(text)):
        head, sep, body = line.partition(":")
        words = head.split()
        if not sep or len(words) != 2 or words[0] != "arrive":
            raise InstanceError(f"expected 'arrive <vertex> : ...', got {line!r}", no)
        m = _VERTEX_RE.fullmatch(words[1])
        if m is None:
            raise InstanceError(f"bad vertex token {words[1]!r}", no)
        idx = int(m.group(2))
        if m.group(1) == "a":
            posts = []
            for tok in body.split():
                mm = _VERTEX_RE.fullmatch(tok)
                if mm is None or mm.group(1) != "p":
                    raise InstanceError(f"expected p<id>, got {tok!r}", no)
                posts.append(int(mm.group(2)))
            if len(set(posts)) != len(posts):
                raise InstanceError("duplicate post in arrival", no)
            events.append(ArrivalEvent(Side.APPLICANT, idx, tuple((p, k + 1) for k, p in enumerate(posts))))
        else:
            pairs = []
            for tok in body.split():
                a, at, pos = tok.partition("@")
                mm = _VERTEX_RE.fullmatch(a)
                if mm is None or mm.group(1) != "a" or not at or not pos.isdigit():
                    raise InstanceError(f"expected a<id>@<position>, got {tok!r}", no)
                pairs.append((int(mm.group(2)), int(pos)))
            if len({a for a, _ in pairs}) != len(pairs):
                raise InstanceError("duplicate applicant in arrival", no)
            events.append(ArrivalEvent(Side.POST, idx, tuple(pairs)))
    return events


def format_popular(pref: PreferenceInstance, result: Matching | NoPopularMatching) -> str:
    if isinstance(result, NoPopularMatching):
        return "no popular matching\n"
    lines = [f"a{a} p{p} {pref.lists[a].index(p) + 1}" for a, p in sorted(result.items())]
    lines.append(f"matched: {len(result)}/{pref.applicant_count}")
    return "\n".join(lines) + "\n"


def iter_popular_stream(pref: PreferenceInstance, events: Iterable[ArrivalEvent]):
    """Yield ``(event, PopularState)`` after each arrival."""
    ps = popular_state(pref)
    for ev in events:
        ps = popular_update(ps, ev)
        yield ev, ps
