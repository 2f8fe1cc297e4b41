import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import eg_violations
from rmm.instance import InstanceError, Matching
from rmm.matching import (
    EVEN,
    ODD,
    UNREACHABLE,
    GraphView,
    Label,
    NotMaximumError,
    WorkCounter,
    augment_to_maximum,
    build_alternating_forest,
    eg_decompose,
    matching_size,
)
from rmm.oracle import brute_eg_labels


@st.composite
def views(draw, max_side=5):
    na = draw(st.integers(0, max_side))
    np_ = draw(st.integers(1, max_side))
    pairs = [(2 * a, 2 * p + 1) for a in range(na) for p in range(np_)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=10)) if pairs else []
    return GraphView(2 * max(na, np_), edges)


def _max_size_brute(view):
    from rmm.oracle import _max_matchings

    mm = _max_matchings(list(range(view.num_vids)), list(view.edges))
    return len(next(iter(mm))) if mm else 0


@given(views(), st.booleans())
@settings(max_examples=200, deadline=None)
def test_augment_reaches_maximum(view, reverse):
    mate = augment_to_maximum(view, reverse=reverse)
    view.check_matching(mate)
    assert matching_size(mate) == _max_size_brute(view)


@given(views())
@settings(max_examples=200, deadline=None)
def test_eg_labels_match_definition_and_invariants(view):
    mate = augment_to_maximum(view)
    labels = eg_decompose(view, mate)
    touched = [v for v in range(view.num_vids) if view.adj[v]]
    brute = brute_eg_labels(touched, view.edges)
    assert {v: labels[v].letter for v in touched} == brute
    assert not eg_violations(view, mate, labels)


@given(views())
@settings(max_examples=100, deadline=None)
def test_eg_labels_do_not_depend_on_the_maximum_matching(view):
    a = eg_decompose(view, augment_to_maximum(view))
    b = eg_decompose(view, augment_to_maximum(view, reverse=True))
    assert a == b


def test_seeded_augmentation_keeps_seed_untouched():
    view = GraphView(4, [(0, 1), (0, 3), (2, 1)])
    seed = Matching({0: 0})
    mate = augment_to_maximum(view, seed)
    assert matching_size(mate) == 2
    assert dict(seed) == {0: 0}


def test_eg_decompose_rejects_non_maximum():
    view = GraphView(4, [(0, 1), (2, 1), (2, 3)])
    with pytest.raises(NotMaximumError):
        eg_decompose(view, Matching({0: 0}))


def test_eg_frozen_example():
    # a0-p0-a1 path plus a lone edge a2-p1: a0, a1 Even, p0 Odd, the lone edge Unreachable
    view = GraphView(6, [(0, 1), (2, 1), (4, 3)])
    labels = eg_decompose(view, augment_to_maximum(view))
    assert [labels[v] for v in (0, 1, 2, 3, 4)] == [EVEN, ODD, EVEN, UNREACHABLE, UNREACHABLE]
    assert labels.of(ODD) == [1]
    assert Label.UNREACHABLE.letter == "U"


def test_check_matching_rejects_non_edges():
    view = GraphView(4, [(0, 1)])
    with pytest.raises(InstanceError):
        view.check_matching([3, -1, -1, 0])
    with pytest.raises(InstanceError):
        GraphView(4, [(0, 2)])


def test_alternating_forest_paths_alternate():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(1, 5)
        edges = [(2 * a, 2 * p + 1) for a in range(n) for p in range(n) if rng.random() < 0.4]
        view = GraphView(2 * n, edges)
        mate = augment_to_maximum(view)
        roots = [v for v in range(0, 2 * n, 2) if mate[v] < 0]
        forest = build_alternating_forest(view, mate, roots, WorkCounter())
        for v in forest.parity:
            path = forest.path_to(v)
            assert path[0] in roots and path[-1] == v
            for k, (x, y) in enumerate(zip(path, path[1:])):
                assert view.has_edge(min(x, y, key=lambda z: z & 1), max(x, y, key=lambda z: z & 1))
                assert (mate[x] == y) == (k % 2 == 1)


def test_forest_rejects_matched_root():
    view = GraphView(2, [(0, 1)])
    with pytest.raises(InstanceError):
        build_alternating_forest(view, [1, 0], [0])


def test_work_counter_counts_scans():
    view = GraphView(4, [(0, 1), (0, 3), (2, 1)])
    c = WorkCounter()
    augment_to_maximum(view, counter=c)
    assert c.edges > 0
