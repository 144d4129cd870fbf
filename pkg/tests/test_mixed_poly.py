from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedlink.grammar import parse
from mixedlink.identities import finite_difference_wirtinger
from mixedlink.mixed_poly import (
    DegenerateInputError,
    GaussianRational,
    MixedPolynomial,
    conjugate,
    evaluate,
    imag_part,
    is_holomorphic,
    is_real_valued,
    real_part,
    wirtinger_dz,
    wirtinger_dzbar,
)

from strategies import complex_points, gaussian, mixed_polynomials


class TestGaussianRational:
    def test_canonical_form(self):
        c = GaussianRational(Fraction(2, 4), Fraction(-3, -6))
        assert (c.re, c.im) == (Fraction(1, 2), Fraction(1, 2))

    @given(gaussian, gaussian)
    def test_field_ops_match_complex(self, a, b):
        assert complex(a + b) == pytest.approx(complex(a) + complex(b))
        assert complex(a * b) == pytest.approx(complex(a) * complex(b))
        if b:
            assert a / b * b == a

    def test_divide_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            GaussianRational(1, 0) / GaussianRational(0, 0)


def test_parse_single_term():
    p = parse("z1^2*~z1")
    assert dict(p.terms) == {((2,), (1,)): GaussianRational(1, 0)}


def test_parse_coefficient():
    p = parse("(1/2+1i)*z2")
    assert p.n == 2
    assert dict(p.terms) == {((0, 1), (0, 0)): GaussianRational(Fraction(1, 2), 1)}


def test_cancellation_gives_zero():
    p = parse("z1*~z1 - z1*~z1")
    assert p.is_zero() and len(p) == 0


@pytest.mark.parametrize(
    "text, j, expected",
    [("z1^2*~z1", 1, "2*z1*~z1"), ("~z1^3", 1, "0"), ("z1^2 + z2^2", 2, "2*z2")],
)
def test_wirtinger_dz_examples(text, j, expected):
    p = parse(text)
    assert wirtinger_dz(p, j) == parse(expected, p.n)


@pytest.mark.parametrize(
    "text, j, expected",
    [("z1^2*~z1", 1, "z1^2"), ("z1^3", 1, "0"), ("w1^4*~w1^2", 1, "2*w1^4*~w1")],
)
def test_wirtinger_dzbar_examples(text, j, expected):
    p = parse(text)
    assert wirtinger_dzbar(p, j) == parse(expected, p.n)


def test_wirtinger_index_out_of_range():
    with pytest.raises(IndexError):
        wirtinger_dz(parse("z1+z2"), 3)
    with pytest.raises(IndexError):
        wirtinger_dzbar(parse("z1+z2"), 0)


def test_conjugate_real_imag_examples():
    assert conjugate(parse("i*z1")) == parse("-i*~z1")
    assert real_part(parse("z1")) == parse("(1/2)*z1 + (1/2)*~z1")
    assert imag_part(parse("z1*~z1")).is_zero()


@pytest.mark.parametrize(
    "text, pt, value",
    [("z1*~z1", [3 + 4j], 25), ("z1^2+z2^2", [1, 1j], 0), ("w1^4*~w1^2", [2], 64)],
)
def test_evaluate_examples(text, pt, value):
    assert evaluate(parse(text), pt) == pytest.approx(value)


def test_evaluate_dimension_mismatch():
    with pytest.raises(ValueError):
        evaluate(parse("z1+z2"), [1])


@pytest.mark.parametrize(
    "text, real, holo",
    [("z1*~z1", True, False), ("z1^2 + z2^3", False, True), ("z1^2*~z1", False, False)],
)
def test_predicates(text, real, holo):
    p = parse(text)
    assert is_real_valued(p) is real
    assert is_holomorphic(p) is holo


def test_zero_polynomial_is_a_value():
    z = MixedPolynomial.zero(2)
    assert z.is_zero() and z.to_text() == "0"
    assert evaluate(z, [1, 2]) == 0


def test_degenerate_error_is_value_error():
    assert issubclass(DegenerateInputError, ValueError)


@given(mixed_polynomials())
def test_conjugate_involution(p):
    assert conjugate(conjugate(p)) == p


@given(st.data())
def test_conjugate_evaluates_to_conjugate(data):
    p = data.draw(mixed_polynomials())
    z = data.draw(complex_points(p.n))
    assert evaluate(conjugate(p), z) == pytest.approx(np.conj(evaluate(p, z)), rel=1e-12, abs=1e-12)


@given(mixed_polynomials())
def test_real_imag_reconstruct(p):
    re, im = real_part(p), imag_part(p)
    assert is_real_valued(re) and is_real_valued(im)
    assert re + im.scale(GaussianRational(0, 1)) == p


@given(st.data())
def test_arithmetic_is_homomorphic(data):
    p = data.draw(mixed_polynomials(n=2))
    q = data.draw(mixed_polynomials(n=2))
    z = data.draw(complex_points(2))
    ev = lambda r: evaluate(r, z)
    scale = 1 + abs(ev(p)) * abs(ev(q)) + abs(ev(p)) + abs(ev(q))
    assert abs(ev(p * q) - ev(p) * ev(q)) <= 1e-11 * scale
    assert abs(ev(p + q) - (ev(p) + ev(q))) <= 1e-11 * scale


@given(st.data())
def test_product_rule(data):
    p = data.draw(mixed_polynomials(n=2))
    q = data.draw(mixed_polynomials(n=2))
    for j in (1, 2):
        assert wirtinger_dz(p * q, j) == wirtinger_dz(p, j) * q + p * wirtinger_dz(q, j)
        assert wirtinger_dzbar(p * q, j) == wirtinger_dzbar(p, j) * q + p * wirtinger_dzbar(q, j)


@given(st.data())
def test_wirtinger_match_finite_differences(data):
    p = data.draw(mixed_polynomials(n=2))
    z = data.draw(complex_points(2))
    fd_z, fd_zb = finite_difference_wirtinger(p, z)
    ex_z = np.array([evaluate(wirtinger_dz(p, j), z) for j in (1, 2)])
    ex_zb = np.array([evaluate(wirtinger_dzbar(p, j), z) for j in (1, 2)])
    scale = 1 + np.linalg.norm(np.concatenate([ex_z, ex_zb]))
    assert np.max(np.abs(fd_z - ex_z)) <= 1e-6 * scale
    assert np.max(np.abs(fd_zb - ex_zb)) <= 1e-6 * scale


def test_exact_evaluation_at_rational_point():
    p = parse("(1/2)*z1^2*~z1 + i*z2")
    val = p.evaluate_exact([GaussianRational(1, 1), GaussianRational(Fraction(1, 3), 0)])
    # (1+i)^2 (1-i) / 2 = (1+i), plus i/3
    assert val == GaussianRational(1, Fraction(4, 3))


def test_numeric_cache_is_reused():
    p = parse("z1^2 + z2^3")
    assert p.numeric() is p.numeric()
