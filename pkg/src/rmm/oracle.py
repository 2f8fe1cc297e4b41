"""Exhaustive ground truth for small instances.

Nothing here imports the solver modules; only the instance model is shared,
so agreement between the two is meaningful evidence.  Every routine enforces
a hard size cap and raises :class:`OracleLimitError` beyond it.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from itertools import combinations

from .instance import Instance, Matching, Signature, applicant_vid, post_vid, vid_index

MAX_EDGES = 24
MAX_MATCHINGS = 200_000


class OracleLimitError(ValueError):
    """The input is too large for exhaustive search."""


def _check_size(instance: Instance, max_edges: int) -> None:
    if len(instance.edges) > max_edges:
        raise OracleLimitError(f"{len(instance.edges)} edges exceeds the oracle cap of {max_edges}")


def enumerate_matchings(instance: Instance, *, max_edges: int = MAX_EDGES) -> Iterator[Matching]:
    """Every matching exactly once, by backtracking over applicants."""
    _check_size(instance, max_edges)
    prefs = [[] for _ in range(instance.applicant_count)]
    for e in instance.edges:
        prefs[e.applicant].append(e.post)
    used: set[int] = set()
    pairs: dict[int, int] = {}
    count = 0

    def rec(a: int):
        nonlocal count
        if a == instance.applicant_count:
            count += 1
            if count > MAX_MATCHINGS:
                raise OracleLimitError("too many matchings to enumerate")
            yield Matching(dict(pairs))
            return
        yield from rec(a + 1)
        for p in prefs[a]:
            if p not in used:
                used.add(p)
                pairs[a] = p
                yield from rec(a + 1)
                del pairs[a]
                used.discard(p)

    yield from rec(0)


def count_matchings(instance: Instance) -> int:
    """Independent recount: include-exclude on the lowest edge (no backtracking state)."""

    def rec(edges: tuple[tuple[int, int], ...]) -> int:
        if not edges:
            return 1
        (a, p), rest = edges[0], edges[1:]
        return rec(rest) + rec(tuple((x, y) for x, y in rest if x != a and y != p))

    return rec(tuple((e.applicant, e.post) for e in instance.edges))


def signature(instance: Instance, matching: Mapping[int, int]) -> Signature:
    ranks = {(e.applicant, e.post): e.rank for e in instance.edges}
    counts = [0] * instance.max_rank
    for a, p in matching.items():
        counts[ranks[(a, p)] - 1] += 1
    return Signature(counts)


def brute_rmm_signature(instance: Instance, *, max_edges: int = MAX_EDGES) -> tuple[Signature, Matching]:
    """Lexicographically largest signature and the first matching attaining it."""
    best: tuple[Signature, Matching] | None = None
    for m in enumerate_matchings(instance, max_edges=max_edges):
        s = signature(instance, m)
        if best is None or tuple(s) > tuple(best[0]):
            best = (s, m)
    assert best is not None
    return best


def all_rank_maximal(instance: Instance, *, max_edges: int = MAX_EDGES) -> list[Matching]:
    best = None
    out: list[Matching] = []
    for m in enumerate_matchings(instance, max_edges=max_edges):
        s = tuple(signature(instance, m))
        if best is None or s > best:
            best, out = s, [m]
        elif s == best:
            out.append(m)
    return out


def truncate(instance: Instance, k: int) -> Instance:
    """The instance restricted to edges of rank at most ``k`` (max rank ``k``)."""
    return Instance(instance.applicant_count, instance.post_count, k, tuple(e for e in instance.edges if e.rank <= k))


# ---------------------------------------------------------------------------
# decompositions from the definition (missed-by-some-maximum-matching)


def _max_matchings(vids: Sequence[int], edges: Sequence[tuple[int, int]]) -> list[frozenset[tuple[int, int]]]:
    best = 0
    out: list[frozenset] = []
    edges = list(edges)
    for size in range(min(len(edges), len(vids) // 2), -1, -1):
        for combo in combinations(edges, size):
            seen = set()
            ok = True
            for a, p in combo:
                if a in seen or p in seen:
                    ok = False
                    break
                seen.add(a)
                seen.add(p)
            if ok:
                out.append(frozenset(combo))
        if out:
            best = size
            break
    del best
    return out


def brute_eg_labels(vids: Iterable[int], edges: Iterable[tuple[int, int]]) -> dict[int, str]:
    """Even = missed by some maximum matching; Odd = adjacent to an Even vertex; rest Unreachable."""
    vids = list(vids)
    edges = list(edges)
    mms = _max_matchings(vids, edges)
    covered_by_all = set(vids)
    for mm in mms:
        cov = {x for e in mm for x in e}
        covered_by_all &= cov
    even = set(vids) - covered_by_all
    odd = {y for a, p in edges for x, y in ((a, p), (p, a)) if x in even and y not in even}
    return {v: "E" if v in even else "O" if v in odd else "U" for v in vids}


def brute_phase_table(instance: Instance) -> tuple[dict[int, str], list[frozenset[tuple[int, int]]]]:
    """Replays the phase reduction with definitional labels.

    Returns ``{vid: "EOU..." string over phases}`` and the phase edge sets as
    ``(applicant_vid, post_vid)`` pairs.
    """
    vids = [applicant_vid(i) for i in range(instance.applicant_count)] + [post_vid(j) for j in range(instance.post_count)]
    cur: set[tuple[int, int]] = set()
    alive = set(vids)
    table = {v: "" for v in vids}
    phase_sets = []
    for k in range(1, instance.max_rank + 1):
        for e in instance.edges:
            a, p = applicant_vid(e.applicant), post_vid(e.post)
            if e.rank == k and a in alive and p in alive:
                cur.add((a, p))
        phase_sets.append(frozenset(cur))
        labels = brute_eg_labels(vids, cur)
        for v in vids:
            table[v] += labels[v]
        alive = {v for v in alive if labels[v] == "E"}
        cur = {(a, p) for a, p in cur if not (labels[a] != "E" and labels[p] != "E" and labels[a] + labels[p] != "UU")}
    return table, phase_sets


# ---------------------------------------------------------------------------
# single alternating paths from the arriving vertex


def _apply_path(mate: dict[int, int], path: Sequence[int]) -> dict[int, int]:
    new = dict(mate)
    for i in range(1, len(path), 2):
        # matched edges on the path are (path[i], path[i+1]) and leave the matching
        if i + 1 < len(path):
            new.pop(path[i], None)
            new.pop(path[i + 1], None)
    for i in range(0, len(path) - 1, 2):
        new[path[i]] = path[i + 1]
        new[path[i + 1]] = path[i]
    return new


def brute_update_paths(h_instance: Instance, matching: Mapping[int, int], root: int) -> list[tuple[int, ...]]:
    """All alternating paths from ``root`` whose application is rank-maximal in ``h_instance``.

    ``matching`` maps applicant index to post index and must leave ``root``
    (an interleaved vertex id) free.  Paths are vertex-id tuples starting at
    ``root``; the empty update is ``(root,)``.
    """
    _check_size(h_instance, MAX_EDGES)
    target, _ = brute_rmm_signature(h_instance)
    ranks = {(applicant_vid(e.applicant), post_vid(e.post)): e.rank for e in h_instance.edges}
    adj: dict[int, list[int]] = {}
    for a, p in ranks:
        adj.setdefault(a, []).append(p)
        adj.setdefault(p, []).append(a)
    mate: dict[int, int] = {}
    for a, p in matching.items():
        mate[applicant_vid(a)] = post_vid(p)
        mate[post_vid(p)] = applicant_vid(a)
    if root in mate:
        raise ValueError("root must be free")
    counts = [0] * h_instance.max_rank
    for v, w in mate.items():
        if v % 2 == 0:
            counts[ranks[(v, w)] - 1] += 1
    out: list[tuple[int, ...]] = []

    def sig_after(path) -> tuple[int, ...]:
        s = list(counts)
        for i in range(len(path) - 1):
            x, y = path[i], path[i + 1]
            k = ranks[(x, y) if x % 2 == 0 else (y, x)]
            s[k - 1] += 1 if i % 2 == 0 else -1
        return tuple(s)

    def valid_end(path) -> bool:
        # even length, or odd length ending at a free vertex
        return len(path) % 2 == 1 or path[-1] not in mate

    def dfs(path, seen):
        if valid_end(path) and sig_after(path) == tuple(target):
            out.append(tuple(path))
        x = path[-1]
        if len(path) % 2 == 1:  # next edge unmatched
            for y in adj.get(x, ()):
                if y not in seen and mate.get(x) != y:
                    seen.add(y)
                    path.append(y)
                    if y in mate:
                        z = mate[y]
                        if z not in seen:
                            seen.add(z)
                            path.append(z)
                            dfs(path, seen)
                            path.pop()
                            seen.discard(z)
                    else:
                        dfs(path, seen)
                    path.pop()
                    seen.discard(y)

    dfs([root], {root})
    return out


def matching_after(matching: Mapping[int, int], path: Sequence[int]) -> Matching:
    """Applicant-to-post matching obtained by flipping ``path`` (vertex ids)."""
    mate: dict[int, int] = {}
    for a, p in matching.items():
        mate[applicant_vid(a)] = post_vid(p)
        mate[post_vid(p)] = applicant_vid(a)
    new = _apply_path(mate, path)
    return Matching({vid_index(v): vid_index(w) for v, w in new.items() if v % 2 == 0})


# ---------------------------------------------------------------------------
# popularity


def _lists(prefs) -> list[list[int]]:
    return [list(x) for x in getattr(prefs, "lists", prefs)]


def vote_compare(prefs, m1: Mapping[int, int], m2: Mapping[int, int]) -> int:
    """Applicants preferring ``m1`` minus applicants preferring ``m2``.

    ``prefs`` is a sequence of strict preference lists (post indices, best
    first) or any object exposing them as ``.lists``.  Being matched beats
    being unmatched; a post outside an applicant's list is treated as
    unmatched.
    """
    score = 0
    for a, lst in enumerate(_lists(prefs)):
        pos = {p: i for i, p in enumerate(lst)}
        r1 = pos.get(m1.get(a), len(lst))
        r2 = pos.get(m2.get(a), len(lst))
        score += (r1 < r2) - (r2 < r1)
    return score


def preference_instance(prefs, post_count: int) -> Instance:
    lists = _lists(prefs)
    edges = [(a, p, i + 1) for a, lst in enumerate(lists) for i, p in enumerate(lst)]
    r = max((len(lst) for lst in lists), default=0)
    return Instance(len(lists), post_count, r, tuple(edges))


def brute_popular(prefs, post_count: int) -> list[Matching]:
    """Every popular matching (possibly none)."""
    inst = preference_instance(prefs, post_count)
    ms = list(enumerate_matchings(inst, max_edges=MAX_EDGES))
    return [m for m in ms if all(vote_compare(prefs, other, m) <= 0 for other in ms)]


def is_popular(prefs, post_count: int, matching: Mapping[int, int]) -> bool:
    inst = preference_instance(prefs, post_count)
    return all(vote_compare(prefs, other, matching) <= 0 for other in enumerate_matchings(inst, max_edges=MAX_EDGES))
