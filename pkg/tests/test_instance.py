import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmm.instance import (
    ArrivalEvent,
    Instance,
    InstanceError,
    Matching,
    Ordering,
    Side,
    Signature,
    VertexId,
    check_matching,
    compare_signatures,
    format_matching,
    parse_events,
    parse_instance,
    parse_matching,
    serialize_events,
    serialize_instance,
    signature_of,
)


@st.composite
def instances(draw, max_side=6, max_rank=4):
    na = draw(st.integers(0, max_side))
    np_ = draw(st.integers(0, max_side))
    r = draw(st.integers(0, max_rank))
    pairs = [(a, p) for a in range(na) for p in range(np_)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=12)) if pairs and r else []
    return Instance(na, np_, r, tuple((a, p, draw(st.integers(1, r))) for a, p in chosen))


@given(instances())
@settings(max_examples=150, deadline=None)
def test_instance_text_round_trip(inst):
    assert parse_instance(serialize_instance(inst)) == inst


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(1, 3)), unique_by=lambda t: t[0], max_size=5), st.booleans())
def test_event_round_trip(edges, post):
    ev = ArrivalEvent(Side.POST if post else Side.APPLICANT, 7, tuple(edges))
    assert parse_events(serialize_events([ev])) == [ev]


def test_parse_accepts_comments_blank_lines_and_crlf():
    text = b"# header comment\r\nrmm 1\r\n\r\n2 2 2\r\na0 : p0@1 p1@2  # trailing\r\na1 :\r\n"
    inst = parse_instance(text)
    assert inst.edges == ((0, 0, 1), (0, 1, 2))
    assert inst.applicant_count == 2


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        ("", "rmm 1", 1),
        ("rmm 2\n1 1 1\n", "rmm 1", 1),
        ("rmm 1\n1 1\n", "three integers", 2),
        ("rmm 1\n1 1 1\na0 : p0@2\n", "exceeds max rank", 3),
        ("rmm 1\n1 1 1\na0 : p0@1 p0@1\n", "duplicate edge", 3),
        ("rmm 1\n1 1 1\na1 : p0@1\n", "unknown applicant", 3),
        ("rmm 1\n1 1 1\na0 : p3@1\n", "unknown post", 3),
        ("rmm 1\n1 1 1\na0 p0@1\n", "expected", 3),
        ("rmm 1\n2 1 1\na0 : p0@1\na0 :\n", "listed twice", 4),
    ],
)
def test_parse_errors_carry_line_numbers(text, fragment, line):
    with pytest.raises(InstanceError) as info:
        parse_instance(text)
    assert fragment in str(info.value)
    assert info.value.line == line


def test_instance_constructor_validates():
    with pytest.raises(InstanceError):
        Instance(1, 1, 1, ((0, 0, 0),))
    with pytest.raises(InstanceError):
        Instance(1, 1, 1, ((0, 0, 1), (0, 0, 1)))
    with pytest.raises(InstanceError):
        Instance(-1, 0, 0)


def test_rank_groups_are_contiguous():
    inst = Instance(2, 2, 3, ((1, 1, 3), (0, 0, 1), (1, 0, 1)))
    assert [len(g) for g in inst.rank_groups] == [2, 0, 1]
    assert inst.edges_of_rank(3) == ((1, 1, 3),)
    assert inst.edges_of_rank(9) == ()


def test_vertex_ids_interleave():
    assert VertexId.parse("a3").vid == 6
    assert VertexId.parse("p3").vid == 7
    assert VertexId.from_vid(7) == VertexId(Side.POST, 3)
    assert str(VertexId(Side.APPLICANT, 0)) == "a0"
    with pytest.raises(InstanceError):
        VertexId.parse("x1")


def test_signature_compare_pads_with_zeros():
    assert compare_signatures((1, 0), (1,)) is Ordering.EQUAL
    assert compare_signatures((2, 0, 0), (1, 5)) is Ordering.GREATER
    assert compare_signatures((0, 1), (1, 0)) is Ordering.LESS
    assert Signature((1, 2)).padded(4) == (1, 2, 0, 0)
    assert str(Signature((1, 2))) == "(1,2)"


def test_with_arrival_applicant_and_post():
    inst = Instance(1, 1, 1, ((0, 0, 1),))
    grown = inst.with_arrival(ArrivalEvent(Side.APPLICANT, 1, ((0, 3),)))
    assert (grown.applicant_count, grown.max_rank) == (2, 3)
    grown = grown.with_arrival(ArrivalEvent(Side.POST, 1, ((0, 2), (1, 1))))
    assert grown.rank_lookup() == {(0, 0): 1, (1, 0): 3, (0, 1): 2, (1, 1): 1}
    assert inst.applicant_count == 1
    with pytest.raises(InstanceError, match="next fresh id"):
        inst.with_arrival(ArrivalEvent(Side.APPLICANT, 4))
    with pytest.raises(InstanceError, match="unknown partner"):
        inst.with_arrival(ArrivalEvent(Side.APPLICANT, 1, ((5, 1),)))


def test_event_parse_errors():
    with pytest.raises(InstanceError, match="duplicate partner"):
        parse_events("arrive a1 : p0@1 p0@2\n")
    with pytest.raises(InstanceError, match="arrive"):
        parse_events("add a1 : p0@1\n")
    assert parse_events("arrive p2 :\n") == [ArrivalEvent(Side.POST, 2)]


def test_matching_helpers():
    inst = Instance(2, 2, 2, ((0, 0, 1), (1, 0, 1), (1, 1, 2)))
    m = Matching({0: 0, 1: 1})
    assert signature_of(inst, m) == (1, 1)
    assert m.applicant_of(1) == 1 and m.post_of(5) is None
    assert dict(m) == {0: 0, 1: 1}
    assert m.symmetric_difference(Matching({1: 0})) == {(0, 0), (1, 1), (1, 0)}
    assert Matching.from_mate(m.to_mate(4)) == m
    check_matching(inst, m)
    with pytest.raises(InstanceError):
        check_matching(inst, Matching({0: 1}))
    with pytest.raises(InstanceError):
        Matching({0: 0, 1: 0})
    text = format_matching(inst, m)
    assert text.splitlines()[-1] == "signature: (1,1)"
    assert parse_matching(text) == m
