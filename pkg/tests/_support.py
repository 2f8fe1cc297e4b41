"""Shared generators and invariant checks for the test suite."""

from __future__ import annotations

import random

from rmm.instance import ArrivalEvent, Instance, Side
from rmm.matching import EVEN, ODD, UNREACHABLE
from rmm.popular import PreferenceInstance
from rmm.static import RmmState, phase_view

# Every decomposition checked by ``assert_eg_invariants`` bumps this; the
# acceptance suite reports it.
EG_CHECKS = {"decompositions": 0}


def rand_instance(rng: random.Random, *, max_app=8, max_post=8, max_rank=4, max_edges=16) -> Instance:
    na = rng.randint(0, max_app)
    np_ = rng.randint(1, max_post)
    r = rng.randint(1, max_rank)
    p = rng.uniform(0.15, 0.7)
    edges = [(a, q, rng.randint(1, r)) for a in range(na) for q in range(np_) if rng.random() < p]
    rng.shuffle(edges)
    return Instance(na, np_, r, tuple(edges[:max_edges]))


def rand_event(rng: random.Random, inst: Instance, *, side: Side | None = None, max_deg=4, rank_bump=0.2) -> ArrivalEvent:
    if side is None:
        side = Side(rng.randint(0, 1))
    other = inst.post_count if side is Side.APPLICANT else inst.applicant_count
    idx = inst.applicant_count if side is Side.APPLICANT else inst.post_count
    k = rng.randint(0, min(max_deg, other))
    top = max(1, inst.max_rank) + (1 if rng.random() < rank_bump else 0)
    return ArrivalEvent(side, idx, tuple((q, rng.randint(1, top)) for q in rng.sample(range(other), k)))


def rand_prefs(rng: random.Random, *, max_app=6, max_post=5, max_len=3) -> PreferenceInstance:
    n = rng.randint(0, max_app)
    P = rng.randint(1, max_post)
    return PreferenceInstance(P, tuple(tuple(rng.sample(range(P), rng.randint(0, min(P, max_len)))) for _ in range(n)))


def eg_violations(view, mate, labels) -> list[str]:
    """Edmonds-Gallai invariants of one decomposition; empty when all hold."""
    out = []
    verts = [v for v in range(view.num_vids) if view.adj[v] or mate[v] >= 0]
    for v in verts:
        if labels[v] in (ODD, UNREACHABLE) and mate[v] < 0:
            out.append(f"{labels[v].letter} vertex {v} is free")
    size = sum(1 for v in range(0, view.num_vids, 2) if mate[v] >= 0)
    odd = sum(1 for v in verts if labels[v] == ODD)
    unr = sum(1 for v in verts if labels[v] == UNREACHABLE)
    if 2 * size != 2 * odd + unr:
        out.append(f"|M|={size} but |O|+|U|/2={odd}+{unr}/2")
    for a in range(0, view.num_vids, 2):
        for p in view.adj[a]:
            la, lp = labels[a], labels[p]
            if la == EVEN and lp in (EVEN, UNREACHABLE) or lp == EVEN and la == UNREACHABLE:
                out.append(f"{la.letter}{lp.letter} edge {a}-{p}")
    return out


def assert_eg_invariants(state: RmmState) -> None:
    """Check every phase decomposition stored in ``state``."""
    for i in range(1, state.r + 1):
        view = phase_view(state, i)
        bad = eg_violations(view, state.mates_at(i), state.labels_at(i))
        EG_CHECKS["decompositions"] += 1
        assert not bad, f"phase {i}: {bad[:3]}"
