import random

import pytest

from _support import rand_prefs
from rmm.instance import ArrivalEvent, InstanceError, Side
from rmm.oracle import brute_popular, is_popular
from rmm.popular import (
    NO_POPULAR,
    NoPopularMatching,
    PreferenceInstance,
    format_popular,
    iter_popular_stream,
    parse_preference_events,
    parse_preferences,
    popular_solve,
    popular_state,
    popular_update,
    reduce_to_rmm,
    serialize_preferences,
)

# Popular-matching counts frozen from the vote oracle.
FROZEN = [
    (((0, 1), (0, 1), (0, 1)), 0),
    (((0, 1), (0, 2), (1,)), 2),
    (((0,), (0,)), 2),
    (((0, 1, 2), (0, 2, 1), (1, 0)), 2),
]


@pytest.mark.parametrize("lists, count", FROZEN)
def test_frozen_verdicts(lists, count):
    pref = PreferenceInstance(3, lists)
    res = popular_solve(pref)
    assert len(brute_popular(pref, 3)) == count
    if count == 0:
        assert res is NO_POPULAR and not res
    else:
        assert is_popular(pref, 3, res)


def test_reduction_first_and_second_choices():
    pref = PreferenceInstance(4, ((0, 1, 2), (0, 2), (1, 3), ()))
    red = reduce_to_rmm(pref)
    assert red.f_post == (0, 0, 1, None)
    # the first non-first-choice post on each list; None means the last resort
    assert red.s_post == (2, 2, 3, None)
    assert red.instance.max_rank == 2
    assert [red.real_post(q) for q in red.last_resort] == [None] * 4


def test_random_instances_agree_with_vote_oracle():
    rng = random.Random(61)
    for _ in range(120):
        pref = rand_prefs(rng)
        res = popular_solve(pref)
        pops = brute_popular(pref, pref.post_count)
        if isinstance(res, NoPopularMatching):
            assert pops == []
        else:
            assert is_popular(pref, pref.post_count, res)


def _random_arrival(rng, pref):
    if rng.random() < 0.5 or pref.applicant_count == 0:
        posts = rng.sample(range(pref.post_count), rng.randint(0, min(3, pref.post_count)))
        return ArrivalEvent(Side.APPLICANT, pref.applicant_count, tuple((p, k + 1) for k, p in enumerate(posts)))
    chosen = rng.sample(range(pref.applicant_count), rng.randint(0, min(2, pref.applicant_count)))
    return ArrivalEvent(Side.POST, pref.post_count, tuple((a, rng.randint(1, len(pref.lists[a]) + 1)) for a in chosen))


def test_stream_matches_from_scratch():
    rng = random.Random(62)
    modes = set()
    for _ in range(60):
        ps = popular_state(rand_prefs(rng))
        for _ in range(4):
            ps = popular_update(ps, _random_arrival(rng, ps.reduction.pref))
            modes.add(ps.incremental)
            pref = ps.reduction.pref
            ref = reduce_to_rmm(pref)
            assert (ref.f_post, ref.s_post) == (ps.reduction.f_post, ps.reduction.s_post)
            fresh = popular_solve(pref)
            assert isinstance(fresh, NoPopularMatching) == isinstance(ps.matching, NoPopularMatching)
            if not isinstance(ps.matching, NoPopularMatching):
                assert is_popular(pref, pref.post_count, ps.matching)
    assert modes == {True, False}


def test_post_arrival_inserts_at_positions():
    pref = PreferenceInstance(2, ((0, 1), (1,)))
    grown = pref.with_arrival(ArrivalEvent(Side.POST, 2, ((0, 1), (1, 2))))
    assert grown.lists == ((2, 0, 1), (1, 2))
    with pytest.raises(InstanceError):
        pref.with_arrival(ArrivalEvent(Side.POST, 2, ((0, 4),)))
    with pytest.raises(InstanceError):
        pref.with_arrival(ArrivalEvent(Side.APPLICANT, 5))


def test_preference_text_formats():
    pref = parse_preferences("a0 : p1 p0\na2 : p0\n")
    assert pref.lists == ((1, 0), (), (0,))
    assert parse_preferences(serialize_preferences(pref)) == pref
    fixed = parse_preferences("pref 1\n1 4\na0 : p2\n")
    assert fixed.post_count == 4
    with pytest.raises(InstanceError, match="twice"):
        parse_preferences("a0 : p1 p1\n")
    with pytest.raises(InstanceError):
        parse_preferences("pref 1\n1 1\na3 : p0\n")
    evs = parse_preference_events("arrive a3 : p2 p0\narrive p5 : a0@1 a2@3\n")
    assert evs[0] == ArrivalEvent(Side.APPLICANT, 3, ((2, 1), (0, 2)))
    assert evs[1] == ArrivalEvent(Side.POST, 5, ((0, 1), (2, 3)))
    with pytest.raises(InstanceError):
        parse_preference_events("arrive p1 : a0\n")


def test_format_popular_output():
    pref = PreferenceInstance(2, ((0, 1), (0,)))
    res = popular_solve(pref)
    text = format_popular(pref, res)
    assert text.splitlines()[-1] == f"matched: {len(res)}/2"
    assert format_popular(pref, NO_POPULAR) == "no popular matching\n"


def test_iter_popular_stream_yields_each_event():
    pref = PreferenceInstance(1, ((0,),))
    events = [ArrivalEvent(Side.APPLICANT, 1, ((0, 1),)), ArrivalEvent(Side.POST, 1, ((0, 2),))]
    out = list(iter_popular_stream(pref, events))
    assert [ev for ev, _ in out] == events
    assert out[-1][1].reduction.pref.lists == ((0, 1), (0,))
