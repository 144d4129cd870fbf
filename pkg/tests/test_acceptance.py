"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records one ``criterion N: PASS|FAIL ...`` line, printed in the
terminal summary (and to stdout under ``-s``).
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import record_acceptance
from mixedlink import geometry, identities, kernels
from mixedlink.covering import CoveringSpec, pullback, transform_weights
from mixedlink.grammar import parse
from mixedlink.homogeneity import detect_weights, euler_residuals
from mixedlink.link_certifier import CERTIFIED, SampleConfig, certify_holomorphic_like, draw_samples, transversality_check
from mixedlink.mixed_poly import MixedPolynomial
from mixedlink.newton_boundary import nondegeneracy_probe

from strategies import random_convenient_holomorphic, random_weighted_homogeneous

A1 = parse("z1^2 + z2^2")
CUSP = parse("z1^3 + z2^2")


def report(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    record_acceptance(line)
    print(line)
    assert ok, line


def _random_mixed(rng, n, n_terms=4, max_exp=3):
    terms = []
    for _ in range(n_terms):
        nu = tuple(int(v) for v in rng.integers(0, max_exp + 1, size=n))
        mu = tuple(int(v) for v in rng.integers(0, max_exp + 1, size=n))
        re, im = rng.integers(-5, 6, size=2)
        terms.append(((nu, mu), complex(int(re) or 1, int(im))))
    return MixedPolynomial(n, terms)


def _polar_cases(rng, count):
    """(p, Q, m_r, P, m_p) with P = Q so all four residuals are defined."""
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 5))
        Q = tuple(int(q) for q in rng.integers(1, 4, size=n))
        d = int(rng.integers(2, 9))
        base = random_weighted_homogeneous(rng, n, Q, d, 1)
        if base is None:
            continue
        nu, mu = next(iter(base)).nu, next(iter(base)).mu
        m_p = sum(q * (a - b) for q, a, b in zip(Q, nu, mu))
        p = random_weighted_homogeneous(rng, n, Q, d, 5, polar=(Q, m_p))
        out.append((p, Q, d, Q, m_p))
    return out


def test_criterion_1_euler_suite():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    cases = _polar_cases(rng, 20)
    nonzero = 0
    for p, Q, m_r, P, m_p in cases:
        res = euler_residuals(p, Q, m_r, P, m_p)
        assert len(res.all()) == 4
        nonzero += sum(not r.is_zero() for r in res.all())
    elapsed = time.perf_counter() - t0
    report(1, nonzero == 0 and elapsed < 2.0, f"20 polynomials, non-zero residuals {nonzero}, {elapsed:.2f}s (limit 2s)")


def test_criterion_2_reeb_constant():
    cases = [(2, 1, 2), (3, 1, 3), (2, 1, 3)]
    lifts = {c: pullback(parse(f"z1^{c[2]} + z2^{c[2]}"), CoveringSpec.homogeneous_spec(2, c[0], c[1])) for c in cases}
    # JIT warm-up outside the timed region
    draw_samples(lifts[cases[0]], SampleConfig(radius=1.0, n_samples=2), tube=True)
    t0 = time.perf_counter()
    worst, total = 0.0, 0
    for (a, b, d), g in lifts.items():
        for r in (0.5, 1.0, 2.0):
            ss = draw_samples(g, SampleConfig(radius=r, n_samples=100), tube=True)
            assert len(ss.samples) == 100
            for w in ss.points:
                val = geometry.reeb_pairing(g, w)
                worst = max(worst, abs(val - 2 * d * (a - b)) / abs(2 * d * (a - b)))
                total += 1
    elapsed = time.perf_counter() - t0
    report(2, worst < 1e-8 and elapsed < 10.0 and total == 900,
           f"{total} off-link points, max rel err {worst:.2e} (< 1e-8), {elapsed:.2f}s (limit 10s)")


def _holomorphic_cases():
    rng = np.random.default_rng(3)
    fs = [random_convenient_holomorphic(rng, int(rng.integers(2, 4)), max_deg=5) for _ in range(5)]
    return [(f, CoveringSpec.homogeneous_spec(f.n, a, b)) for f in fs for a, b in ((2, 1), (3, 2))]


def test_criterion_3_c_factorization():
    worst = max(identities.cab_suite(f, spec, 1000, seed=i).max_rel_err for i, (f, spec) in enumerate(_holomorphic_cases()))
    report(3, worst < 1e-10, f"10 cases x 1000 points, max rel err {worst:.2e} (< 1e-10)")


def test_criterion_4_positivity():
    results = [identities.positivity_suite(f, spec, 1000, seed=i) for i, (f, spec) in enumerate(_holomorphic_cases())]
    worst = max(r.max_rel_err for r in results)
    negative = sum(r.details["negative_correction"] for r in results)
    report(4, worst < 1e-10 and negative == 0,
           f"10 cases x 1000 points, max rel err {worst:.2e} (< 1e-10), negative corrections {negative}")


def test_criterion_5_wedge_identity():
    rng = np.random.default_rng(5)
    worst = {}
    elapsed = {}
    for n in (2, 3):
        t0 = time.perf_counter()
        worst[n] = max(identities.fourform_suite(_random_mixed(rng, n), 100, seed=k).max_rel_err for k in range(5))
        elapsed[n] = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-9 and elapsed[3] < 30.0
    report(5, ok, f"n=2 max rel err {worst[2]:.2e}, n=3 max rel err {worst[3]:.2e} (< 1e-9), n=3 took {elapsed[3]:.1f}s (limit 30s)")


def test_criterion_6_transversality():
    g = pullback(A1, CoveringSpec.homogeneous_spec(2, 2, 1))
    sv_min, counts = np.inf, []
    for r in (0.5, 1.0, 2.0):
        rep = transversality_check(g, SampleConfig(radius=r, sphere_weights=(2, 3)))
        counts.append(rep.samples)
        sv_min = min(sv_min, rep.margin if rep.margin is not None else -np.inf)
    report(6, sv_min > 1e-6 and min(counts) > 0, f"samples per radius {counts}, min jacobian_min_sv {sv_min:.3e} (> 1e-6)")


def test_criterion_7_sign_certification():
    details, ok = [], True
    for name, f in (("z1^2+z2^2", A1), ("z1^3+z2^2", CUSP)):
        for a, b in ((2, 1), (1, 2)):
            g = pullback(f, CoveringSpec.homogeneous_spec(2, a, b))
            sign = 1 if a > b else -1
            cfg = SampleConfig(radius=0.5, n_samples=200)
            rep = certify_holomorphic_like(g, cfg, expected_sign=sign)
            pts = draw_samples(g, cfg).points
            _, gz, gzb = kernels.eval_grad(g.numeric(), pts)
            C, _ = geometry.c_total_batch(pts, gz, gzb)
            good = rep.verdict == CERTIFIED and rep.samples >= 200 and bool(np.all(sign * C > 0))
            ok &= good
            details.append(f"{name} ({a},{b}) {rep.samples} samples {'C>0' if sign > 0 else 'C<0'} {'ok' if good else rep.verdict}")
    report(7, ok, "; ".join(details))


def test_criterion_8_derivative_oracles():
    rng = np.random.default_rng(8)
    worst_w = worst_c = 0.0
    for k in range(50):
        g = _random_mixed(rng, int(rng.integers(1, 4)), max_exp=3)
        res = identities.chainrule_suite(g, 1, seed=k)
        worst_w = max(worst_w, res.details["wirtinger_err"])
        worst_c = max(worst_c, res.details["chain_err"])
    report(8, max(worst_w, worst_c) < 1e-6,
           f"50 configurations, Wirtinger max rel err {worst_w:.2e}, chain rule max rel err {worst_c:.2e} (< 1e-6)")


def test_criterion_9_pullback_weights():
    rng = np.random.default_rng(9)
    hits, mismatches = 0, 0
    while hits < 10:
        n = int(rng.integers(2, 4))
        Q = tuple(int(q) for q in rng.integers(1, 4, size=n))
        f = random_weighted_homogeneous(rng, n, Q, int(rng.integers(4, 9)), 3, holomorphic=True)
        if f is None:
            continue
        rep = detect_weights(f)
        if not (rep.radial and rep.polar and rep.radial.unique and rep.polar.unique):
            continue
        a = int(rng.integers(2, 4))
        spec = CoveringSpec.homogeneous_spec(n, a, int(rng.integers(0, a)))
        tw = transform_weights(rep.radial.weights, rep.radial.degree, rep.polar.weights, rep.polar.degree, spec)
        lifted = detect_weights(pullback(f, spec))
        got = (lifted.radial.weights, lifted.radial.degree, lifted.polar.weights, lifted.polar.degree)
        want = (tw.radial_cleared, tw.radial_degree, tw.polar_cleared, tw.polar_degree)
        mismatches += got != want
        hits += 1
    report(9, mismatches == 0, f"{hits} random f, exact mismatches {mismatches}")


def test_criterion_10_probe():
    bad = nondegeneracy_probe(parse("(z1+z2)^2"), trials=200)
    good = [nondegeneracy_probe(p, trials=200) for p in (A1, CUSP)]
    witness = next((f.witness for f in bad.faces if f.witness is not None), None)
    ok = bad.suspected_degenerate and witness is not None and all(
        not r.suspected_degenerate and r.min_residual >= 0.1 for r in good
    )
    report(10, ok, f"(z1+z2)^2 flagged={bad.suspected_degenerate}; min residuals "
                   f"{good[0].min_residual:.3f}, {good[1].min_residual:.3f} (>= 0.1)")


def test_criterion_11_determinism(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("w1^6*~w1^3 + w2^4*~w2^2\n")
    argv = [sys.executable, "-m", "mixedlink", "certify", str(path), "--seed", "42", "--json",
            "--radius", "0.5", "1", "--samples", "100"]
    runs = [subprocess.run(argv, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode
    report(11, same and len(runs[0].stdout) > 0, f"two runs, {len(runs[0].stdout)} bytes each, identical={same}")
