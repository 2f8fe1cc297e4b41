"""Input coercion shared by the estimator wrappers."""

from __future__ import annotations

from collections.abc import Iterable

from .instance import ArrivalEvent, Instance, InstanceError, Side, parse_events, parse_instance
from .popular import PreferenceInstance, parse_preference_events, parse_preferences


def check_instance(X) -> Instance:
    """Accept an :class:`Instance`, RMM-v1 text or bytes, or ``(applicant, post, rank)`` triples."""
    if isinstance(X, Instance):
        return X
    if isinstance(X, (str, bytes)):
        return parse_instance(X)
    try:
        triples = [tuple(int(v) for v in t) for t in X]
    except (TypeError, ValueError):
        raise InstanceError(f"cannot interpret {type(X).__name__} as an instance") from None
    if any(len(t) != 3 for t in triples):
        raise InstanceError("expected (applicant, post, rank) triples")
    na = max((t[0] for t in triples), default=-1) + 1
    np_ = max((t[1] for t in triples), default=-1) + 1
    r = max((t[2] for t in triples), default=0)
    return Instance(na, np_, r, tuple(triples))


def check_events(events, parser=parse_events) -> list[ArrivalEvent]:
    """One event, an iterable of events, or event-file text read by ``parser``."""
    if isinstance(events, ArrivalEvent):
        return [events]
    if isinstance(events, (str, bytes)):
        return parser(events)
    out = list(events)
    if not all(isinstance(e, ArrivalEvent) for e in out):
        raise InstanceError("expected ArrivalEvent objects")
    return out


def check_preference_events(events) -> list[ArrivalEvent]:
    return check_events(events, parse_preference_events)


def check_preferences(X) -> PreferenceInstance:
    """A :class:`PreferenceInstance`, pref-file text, or a list of preference lists."""
    if isinstance(X, PreferenceInstance):
        return X
    if isinstance(X, (str, bytes)):
        return parse_preferences(X)
    lists = [tuple(int(p) for p in lst) for lst in X]
    return PreferenceInstance(max((p for lst in lists for p in lst), default=-1) + 1, tuple(lists))


def check_side(side) -> Side:
    if isinstance(side, str):
        try:
            return {"a": Side.APPLICANT, "applicant": Side.APPLICANT, "p": Side.POST, "post": Side.POST}[side.lower()]
        except KeyError:
            raise InstanceError(f"unknown side {side!r}") from None
    return Side(side)


def check_applicants(applicants: Iterable[int], count: int) -> list[int]:
    out = [int(a) for a in applicants]
    for a in out:
        if not 0 <= a < count:
            raise InstanceError(f"unknown applicant a{a}")
    return out
