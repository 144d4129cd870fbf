"""Randomised identity suites: numerical cross-checks of closed forms.

Each suite evaluates both sides of an identity at random points drawn from
``numpy.random.default_rng(seed)`` and reports the worst relative error.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry, kernels
from .covering import CoveringSpec, pullback
from .homogeneity import detect_weights, euler_residuals
from .mixed_poly import MixedPolynomial

__all__ = [
    "IdentityResult",
    "InapplicableIdentity",
    "THRESHOLDS",
    "random_points",
    "euler_suite",
    "cab_suite",
    "fourform_suite",
    "positivity_suite",
    "chainrule_suite",
    "finite_difference_wirtinger",
]

THRESHOLDS = {
    "euler": 0.0,
    "cab": 1e-10,
    "fourform": 1e-9,
    "positivity": 1e-10,
    "chainrule": 1e-6,
}


class InapplicableIdentity(ValueError):
    pass


@dataclass(frozen=True)
class IdentityResult:
    which: str
    trials: int
    max_rel_err: float
    threshold: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_rel_err <= self.threshold

    def to_dict(self) -> dict:
        return {
            "which": self.which,
            "trials": self.trials,
            "max_rel_err": self.max_rel_err,
            "threshold": self.threshold,
            "passed": self.passed,
            "details": self.details,
        }


def random_points(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _rel(lhs, rhs, floor: float = 1e-300) -> np.ndarray:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return np.abs(lhs - rhs) / np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), floor)


def euler_suite(g: MixedPolynomial) -> IdentityResult:
    """Exact check: every Euler residual is the zero polynomial."""
    rep = detect_weights(g)
    if rep.radial is None or rep.polar is None:
        raise InapplicableIdentity("euler needs a polynomial with both radial and polar weights")
    res = euler_residuals(g, rep.radial.weights, rep.radial.degree, rep.polar.weights, rep.polar.degree)
    nonzero = [r for r in res.all() if not r.is_zero()]
    return IdentityResult(
        "euler",
        len(res.all()),
        0.0 if not nonzero else float("inf"),
        THRESHOLDS["euler"],
        {"Q": list(rep.radial.weights), "m_r": rep.radial.degree, "P": list(rep.polar.weights), "m_p": rep.polar.degree},
    )


def _lift(f: MixedPolynomial, spec: CoveringSpec, g: MixedPolynomial | None) -> MixedPolynomial:
    lifted = pullback(f, spec)
    if g is not None and g != lifted:
        raise InapplicableIdentity("input polynomial is not the pull-back of the given f")
    return lifted


def cab_suite(f: MixedPolynomial, spec: CoveringSpec, trials: int, seed: int, g: MixedPolynomial | None = None) -> IdentityResult:
    """C-matrix of φ*f computed directly against its factored form."""
    g = _lift(f, spec, g)
    W = random_points(np.random.default_rng(seed), trials, f.n)
    _, gz, gzb = kernels.eval_grad(g.numeric(), W)
    direct, _ = geometry.c_matrix_batch(W, gz, gzb)
    factored = geometry.c_factored_batch(f, spec, W)
    return IdentityResult("cab", trials, float(np.max(_rel(direct, factored))), THRESHOLDS["cab"])


def fourform_suite(g: MixedPolynomial, trials: int, seed: int) -> IdentityResult:
    if g.n not in (2, 3):
        raise InapplicableIdentity("fourform is implemented for n = 2 and n = 3 only")
    rng = np.random.default_rng(seed)
    worst = worst_A = worst_B = 0.0
    for w in random_points(rng, trials, g.n):
        chk = geometry.wedge_verify(g, w)
        worst = max(worst, chk.rel_err)
        worst_A = max(worst_A, float(np.max(np.abs(chk.A_symbolic - chk.A_extracted)) / np.max(np.abs(chk.A_symbolic))))
        scale_B = max(float(np.max(np.abs(chk.B_symbolic))), 1e-300)
        worst_B = max(worst_B, float(np.max(np.abs(chk.B_symbolic - chk.B_extracted))) / scale_B)
    return IdentityResult("fourform", trials, worst, THRESHOLDS["fourform"], {"A_err": worst_A, "B_err": worst_B})


def positivity_suite(
    f: MixedPolynomial, spec: CoveringSpec, trials: int, seed: int, g: MixedPolynomial | None = None
) -> IdentityResult:
    """‖v11‖² = a²|g|²(γ-β), ‖v21‖² = b²|g|²(γ-β) and ‖v11‖² - ‖v21‖² ≥ 0."""
    _lift(f, spec, g)
    a, b = spec.a[0], spec.b[0]
    W = random_points(np.random.default_rng(seed), trials, f.n)
    q = geometry.open_book_batch(f, spec, W)
    g2 = np.abs(q["g"]) ** 2
    gap = q["gamma"] - q["beta"]
    e11 = _rel(q["norm_v11_sq"], a * a * g2 * gap)
    e21 = _rel(q["norm_v21_sq"], b * b * g2 * gap)
    scale = q["norm_v11_sq"] + q["norm_v21_sq"]
    negative = q["correction"] < -THRESHOLDS["positivity"] * scale
    expect_nonneg = spec.orientation > 0
    sign_fail = int(np.sum(negative)) if expect_nonneg else 0
    err = float(max(np.max(e11), np.max(e21)))
    if sign_fail:
        err = float("inf")
    return IdentityResult(
        "positivity",
        trials,
        err,
        THRESHOLDS["positivity"],
        {"v11_err": float(np.max(e11)), "v21_err": float(np.max(e21)), "negative_correction": sign_fail,
         "min_correction": float(np.min(q["correction"]))},
    )


def finite_difference_wirtinger(g: MixedPolynomial, z: np.ndarray, h: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """Central differences for (∂g/∂z_j, ∂g/∂z̄_j) = ½(∂_x ∓ i∂_y)g."""
    n = g.n
    dz = np.empty(n, dtype=complex)
    dzb = np.empty(n, dtype=complex)
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = h
        gx = (g.evaluate(z + e) - g.evaluate(z - e)) / (2 * h)
        gy = (g.evaluate(z + 1j * e) - g.evaluate(z - 1j * e)) / (2 * h)
        dz[j] = 0.5 * (gx - 1j * gy)
        dzb[j] = 0.5 * (gx + 1j * gy)
    return dz, dzb


def chainrule_suite(g: MixedPolynomial, trials: int, seed: int, h: float = 1e-5) -> IdentityResult:
    """Wirtinger derivatives and d/dt h(z+tv) = Re(v, ∇h) against central differences.

    Errors are relative to the size of the full derivative at the point, so
    identically vanishing components (e.g. ∂̄ of a holomorphic g) do not blow up.
    """
    rng = np.random.default_rng(seed)
    worst_w = worst_c = 0.0
    for _ in range(trials):
        z = random_points(rng, 1, g.n)[0] * 0.7
        v = random_points(rng, 1, g.n)[0]
        v /= np.linalg.norm(v)
        bundle = geometry.gradients(g, z)
        fd_z, fd_zb = finite_difference_wirtinger(g, z, h)
        scale = max(np.linalg.norm(np.concatenate([bundle.delz, bundle.delzbar])), 1e-300)
        worst_w = max(worst_w, float(np.max(np.abs(np.concatenate([fd_z - bundle.delz, fd_zb - bundle.delzbar])))) / scale)
        for grad, fn in (
            (bundle.hermitian_re, lambda p: p.real),
            (bundle.hermitian_im, lambda p: p.imag),
            (2 * (bundle.value * np.conj(bundle.delz) + np.conj(bundle.value) * bundle.delzbar), lambda p: abs(p) ** 2),
        ):
            exact = float(np.real(np.sum(v * np.conj(grad))))
            fd = (fn(g.evaluate(z + h * v)) - fn(g.evaluate(z - h * v))) / (2 * h)
            worst_c = max(worst_c, abs(fd - exact) / max(np.linalg.norm(grad), 1e-300))
    return IdentityResult(
        "chainrule", trials, max(worst_w, worst_c), THRESHOLDS["chainrule"], {"wirtinger_err": worst_w, "chain_err": worst_c}
    )
