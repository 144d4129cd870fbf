import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from mixedlink.forms import FormAtPoint, permutation_sign


@given(st.permutations(list(range(5))))
def test_permutation_sign_is_a_homomorphism(p):
    q = list(reversed(range(5)))
    composed = [p[i] for i in q]
    assert permutation_sign(composed) == permutation_sign(p) * permutation_sign(q)


def test_one_forms_anticommute(rng):
    a = FormAtPoint.one_form(rng.standard_normal(4))
    b = FormAtPoint.one_form(rng.standard_normal(4))
    ab, ba = (a ^ b), (b ^ a)
    for k, v in ab.coeffs.items():
        assert np.isclose(v, -ba.coeffs[k])
    assert not (a ^ a).coeffs


def test_two_form_evaluation_is_determinant(rng):
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    u, v = rng.standard_normal(4), rng.standard_normal(4)
    form = FormAtPoint.one_form(a) ^ FormAtPoint.one_form(b)
    assert np.isclose(form(u, v), a @ u * (b @ v) - a @ v * (b @ u))


def test_volume_form_top_coefficient():
    dx = [FormAtPoint.one_form(np.eye(4)[i]) for i in range(4)]
    vol = dx[0] ^ dx[1] ^ dx[2] ^ dx[3]
    assert vol.top_coefficient() == 1
    assert (dx[1] ^ dx[0] ^ dx[2] ^ dx[3]).top_coefficient() == -1


def test_tensor_antisymmetric(rng):
    f = FormAtPoint.one_form(rng.standard_normal(6)) ^ FormAtPoint.one_form(rng.standard_normal(6))
    T = f.tensor()
    assert np.allclose(T, -T.T)


def test_wedge_overflow_is_zero():
    a = FormAtPoint(2, 2, {(0, 1): 1.0})
    assert not (a ^ FormAtPoint.one_form([1.0, 0.0])).coeffs
