import pytest
from hypothesis import given

from mixedlink.grammar import ParseError, parse, serialize

from strategies import mixed_polynomials

CORPUS = [
    "z1^2 + z2^2",
    "z1^3 + z2^2",
    "w1^4*~w1^2 + w2^4*~w2^2",
    "z1^4 + z1*z2 + z2^4",
    "z1^2*~z1^2 + z2^2*~z2^2",
    "z1^3 + z2^3*~z2",
    "(z1+z2)^2",
    "(z1+z2)*~(z1+z2)",
    "(1/2+1i)*z2 - (3/4 i)*~z1^2*z3",
    "z1^3 + z2^2 + z3^5",
]


@pytest.mark.parametrize("text", CORPUS)
def test_corpus_round_trip(text):
    p = parse(text)
    assert parse(serialize(p), p.n) == p
    assert parse(serialize(p, "w"), p.n) == p


@given(mixed_polynomials())
def test_round_trip_property(p):
    assert parse(serialize(p), p.n) == p


def test_serialize_known_form():
    assert serialize(parse("z1^2+z2^2").__class__.zero(2)) == "0"
    assert serialize(parse("w1^4*~w1^2 + w2^4*~w2^2"), "w") == "w1^4*~w1^2 + w2^4*~w2^2"


def test_juxtaposition_and_w_variables():
    assert parse("2 z1 ~w2") == parse("2*z1*~z2")


def test_conjugated_group():
    assert parse("~(z1 + i*z2)") == parse("~z1 - i*~z2")


@pytest.mark.parametrize(
    "text, offset, fragment",
    [
        ("z1 +", 4, "unexpected"),
        ("z1^-2", 3, "negative exponent"),
        ("z1^0", 3, "at least 1"),
        ("(1/0)*z1", 3, "zero denominator"),
        ("z1 $ z2", 3, ""),
    ],
)
def test_errors_carry_byte_offsets(text, offset, fragment):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset
    assert fragment in str(info.value)


def test_offset_counts_bytes_not_characters():
    # "é" is two bytes in UTF-8
    with pytest.raises(ParseError) as info:
        parse("z1 + é")
    assert info.value.offset == 5


def test_index_out_of_range():
    with pytest.raises(ParseError, match="out of range"):
        parse("z3", 2)
