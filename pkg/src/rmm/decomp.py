"""Bring the per-phase decompositions up to date after an arrival.

The replay in :mod:`rmm.dynamic` already knows, for every vertex whose label
history changes, its labels in the grown instance.  Committing them is a
matter of overwriting those type-change lists, flipping the chosen path into
the matching, and recomputing the lifetime of the incident edges.

:func:`settle_types` re-derives the same lists from much less: the old
lists, the phase in which each vertex is last reachable, its label there,
and the parity of the number of augmenting phases.  It is kept as an
independent consistency check of the replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .instance import Matching
from .matching import EVEN, ODD, UNREACHABLE, Label
from .static import RmmState
from .dynamic import UpdateState


class TraceMismatchError(ValueError):
    """The trace was produced from a different state."""


@dataclass
class DecompRebuild:
    """Vertices whose grown-instance labels were derived, grouped by settling phase.

    ``settled`` only grows.  ``frontier[i]`` lists the vertices settled at
    phase ``i`` (the last phase in which they are not Unreachable);
    ``changes`` holds the derived type-change lists.
    """

    settled: set[int] = field(default_factory=set)
    frontier: dict[int, list[int]] = field(default_factory=dict)
    changes: dict[int, list[tuple[int, Label]]] = field(default_factory=dict)


_SWAP = {EVEN: ODD, ODD: EVEN, UNREACHABLE: UNREACHABLE}


def propagate_vertex_types(
    v: int,
    i: int,
    label_h_i: Label,
    state: RmmState,
    trace: UpdateState,
    rebuild: DecompRebuild | None = None,
) -> list[tuple[int, Label]]:
    """Type-change list of ``v`` in the grown instance, given its settling phase ``i``.

    Before ``i``: a vertex that is Even or Odd in ``G``'s phase graph keeps
    that label; one that is Unreachable takes ``label_h_i``, swapped between
    Even and Odd when an odd number of augmenting phases lies in between.
    After ``i`` it is Unreachable.  The arriving vertex counts as
    Unreachable in ``G``.
    """
    if trace.base is not state:
        raise TraceMismatchError("trace does not belong to this state")
    if rebuild is not None and v in rebuild.settled:
        raise ValueError(f"vertex {v} is already settled")
    n_i = trace.augmenting_count(i)
    out: list[tuple[int, Label]] = []
    cur = EVEN
    for j in range(1, trace.r + 1):
        if j > i:
            lab = UNREACHABLE
        elif j == i:
            lab = label_h_i
        else:
            g = UNREACHABLE if v == trace.a0 else trace.g_label(v, j)
            if g != UNREACHABLE:
                lab = g
            elif (n_i - trace.augmenting_count(j)) % 2 == 0:
                lab = label_h_i
            else:
                lab = _SWAP[label_h_i]
        if lab != cur:
            out.append((j, lab))
            cur = lab
    if rebuild is not None:
        rebuild.settled.add(v)
        rebuild.frontier.setdefault(i, []).append(v)
        rebuild.changes[v] = out
    return out


def settle_types(state: RmmState, trace: UpdateState) -> DecompRebuild:
    """Derive the grown-instance type lists of the replay's component by the parity rule."""
    rb = DecompRebuild()
    for i in range(trace.r, 0, -1):
        for v in sorted(trace.component):
            if v in rb.settled:
                continue
            lab = trace.h_label(v, i)
            if lab != UNREACHABLE:
                propagate_vertex_types(v, i, lab, state, trace, rb)
    for v in trace.component:
        if v not in rb.settled:
            rb.changes[v] = [(1, UNREACHABLE)] if trace.r else []
    return rb


def rebuild_decompositions(state: RmmState, trace: UpdateState, final: Matching | None = None) -> RmmState:
    """Commit an arrival: the returned state describes the grown instance.

    The result is ``trace.work`` (``state`` itself when the update ran in
    place).  ``final`` defaults to the matching chosen by the update; it
    must be that matching or, when no path was chosen, the old one.
    """
    if trace.base is not state:
        raise TraceMismatchError("trace does not belong to this state")
    if trace.committed:
        raise TraceMismatchError("trace already committed")
    w = trace.work
    if final is not None and trace.path is None:
        if final != state.matching:
            raise TraceMismatchError("no update path was chosen; only the old matching can be committed")
    elif final is not None:
        for a in {x >> 1 for x in trace.final_mate if x & 1 == 0}:
            m = trace.final_mate[2 * a]
            if final.get(a) != (m >> 1 if m >= 0 else None):
                raise TraceMismatchError("final matching differs from the chosen update")
    if len(trace.phases) < w.r:
        raise TraceMismatchError("the replay has not run through every phase")
    touched = set()
    for v, (ph, lb) in trace.h_changes.items():
        w.ch_phase[v] = list(ph)
        w.ch_label[v] = list(lb)
        touched.update(w.inc[v])
    for v, m in trace.final_mate.items():
        w.mate[v] = m
    trace.counter.edges += len(touched)
    w.recompute_gone(touched)
    trace.committed = True
    return w
