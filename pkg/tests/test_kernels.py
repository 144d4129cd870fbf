import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedlink import kernels
from mixedlink.covering import CoveringSpec, pullback
from mixedlink.grammar import parse

from strategies import mixed_polynomials

needs_numba = pytest.mark.skipif(not kernels.NUMBA_AVAILABLE, reason="numba not importable")


def _seeds(rng, m, n):
    S = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return S / np.linalg.norm(S, axis=1, keepdims=True)


def test_backend_flag(monkeypatch):
    monkeypatch.setenv("MIXEDLINK_BACKEND", "numpy")
    assert kernels.backend() == "numpy"
    monkeypatch.setenv("MIXEDLINK_BACKEND", "NUMBA")
    assert kernels.backend() == ("numba" if kernels.NUMBA_AVAILABLE else "numpy")
    monkeypatch.setenv("MIXEDLINK_BACKEND", "fortran")
    with pytest.raises(ValueError):
        kernels.backend()


def test_eval_matches_python_loop(rng):
    p = parse("(2-i)*z1^3*~z2 + z2^2*~z2 + 7")
    Z = _seeds(rng, 10, 2) * 1.3
    for which in ("numpy", "numba"):
        g, _, _ = kernels.eval_grad(p.numeric(), Z, which=which)
        assert np.allclose(g, [p.evaluate(z) for z in Z], rtol=1e-13)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        kernels.eval_grad(parse("z1+z2").numeric(), np.ones((3, 3)))


@needs_numba
@settings(max_examples=25)
@given(mixed_polynomials(n=3), st.integers(0, 1000))
def test_backends_agree_on_eval(p, seed):
    Z = _seeds(np.random.default_rng(seed), 8, 3) * 1.5
    a = kernels.eval_grad(p.numeric(), Z, which="numpy")
    b = kernels.eval_grad(p.numeric(), Z, which="numba")
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-12)


@needs_numba
@pytest.mark.parametrize("mode, delta2", [(kernels.MODE_LINK, 0.0), (kernels.MODE_TUBE, 0.01)])
def test_backends_agree_on_projection(rng, mode, delta2):
    g = pullback(parse("z1^2 + z2^2"), CoveringSpec.homogeneous_spec(2, 2, 1)).numeric()
    seeds = _seeds(rng, 30, 2)
    a = kernels.project(g, seeds, mode=mode, r2=1.0, delta2=delta2, which="numpy")
    b = kernels.project(g, seeds, mode=mode, r2=1.0, delta2=delta2, which="numba")
    assert np.array_equal(a[4], b[4])
    ok = a[4]
    assert np.allclose(a[0][ok], b[0][ok], atol=1e-9)


@pytest.mark.parametrize("which", ["numpy", "numba"])
def test_projection_lands_on_link(rng, which):
    p = parse("z1^3 + z2^2")
    pts, res_g, res_rho, min_sv, conv, _ = kernels.project(p.numeric(), _seeds(rng, 40, 2) * 0.5, r2=0.25, which=which)
    assert conv.sum() >= 30
    P = pts[conv]
    assert np.allclose(np.sum(np.abs(P) ** 2, axis=1), 0.25, atol=1e-10)
    assert np.max(np.abs([p.evaluate(z) for z in P])) < 1e-10
    assert np.all(min_sv[conv] > 1e-6)


@pytest.mark.parametrize("which", ["numpy", "numba"])
def test_tube_projection(rng, which):
    g = pullback(parse("z1^3 + z2^2"), CoveringSpec.homogeneous_spec(2, 2, 1))
    delta = 1e-6  # max |g| on this sphere is about 2e-4
    pts, _, _, _, conv, its = kernels.project(
        g.numeric(), _seeds(rng, 50, 2) * 0.25, mode=kernels.MODE_TUBE, r2=0.0625, delta2=delta**2, which=which
    )
    assert conv.mean() > 0.6
    vals = np.abs([g.evaluate(z) for z in pts[conv]])
    assert np.allclose(vals, delta, rtol=1e-7)
    assert np.median(its[conv]) < 30


def test_weighted_sphere(rng):
    p = parse("z1^3 + z2^2")
    pts, *_, conv, _ = kernels.project(p.numeric(), _seeds(rng, 30, 2), weights=(2, 3), r2=1.0, which="numpy")
    assert np.allclose(np.sum(np.array([2, 3]) * np.abs(pts[conv]) ** 2, axis=1), 1.0, atol=1e-10)


def test_rank_deficient_reported(rng):
    p = parse("(z1+z2)*~(z1+z2)")
    *_, min_sv, conv, _ = kernels.project(p.numeric(), _seeds(rng, 10, 2), r2=1.0, which="numpy")
    assert np.all(min_sv[conv] < 1e-6)


@needs_numba
def test_benchmark_smoke():
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    rows = mod.bench(points=50, seeds=10, repeat=1)
    assert len(rows) == 4 and all(t > 0 for *_, t_np, t_nb in rows for t in (t_np, t_nb))
