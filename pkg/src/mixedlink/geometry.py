"""Pointwise contact-geometric quantities for mixed functions on spheres.

Conventions: (u, v) = Σ u_j v̄_j is the hermitian product and
Re(u, v) the euclidean one. The hermitian gradient of a real function h is
∇h = 2·conj(∂h/∂z). On the sphere S_r the canonical contact form is
α = 2Σ(x dy - y dx), ω = dα = 4Σ dx∧dy, and the Reeb field is R = iz/(2ρ).

The ``*_batch`` functions take point arrays of shape (m, n) and are what the
link certifier uses; the pointwise functions wrap them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .covering import CoveringSpec, pullback
from .forms import FormAtPoint
from .mixed_poly import MixedPolynomial, as_point

__all__ = [
    "GeometryError",
    "GradientBundle",
    "ContactQuantities",
    "WedgeCheck",
    "hermitian",
    "rel_err",
    "gradients",
    "weighted_radius",
    "reeb_vector",
    "c_matrix_batch",
    "c_total_batch",
    "c_factored_batch",
    "theta_gradient_batch",
    "reeb_pairing_batch",
    "c_certificate",
    "c_certificate_conjugate_form",
    "c_factored",
    "theta_gradient",
    "reeb_pairing",
    "split_v_batch",
    "correction_batch",
    "open_book_batch",
    "open_book_terms",
    "modified_reeb_pairing",
    "contact_alpha",
    "contact_omega",
    "wedge_verify",
]

ZERO_TOL = 1e-14


class GeometryError(ValueError):
    pass


def hermitian(u, v):
    """(u, v) = Σ u_j conj(v_j) along the last axis."""
    return np.sum(np.asarray(u) * np.conj(v), axis=-1)


def rel_err(lhs, rhs) -> float:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    den = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-30)
    return float(np.max(np.abs(lhs - rhs) / den))


@lru_cache(maxsize=64)
def _pullback_cached(f: MixedPolynomial, spec: CoveringSpec) -> MixedPolynomial:
    return pullback(f, spec)


@dataclass(frozen=True)
class GradientBundle:
    value: complex
    delz: np.ndarray  # ∇_∂ g = (g_{z_1}, …, g_{z_n})
    delzbar: np.ndarray  # ∇_∂̄ g = (g_{z̄_1}, …, g_{z̄_n})

    @property
    def hermitian(self) -> np.ndarray:
        """2·conj(∂g/∂z); the hermitian gradient when g is real valued."""
        return 2 * np.conj(self.delz)

    @property
    def hermitian_re(self) -> np.ndarray:
        """Hermitian gradient of Re g."""
        return np.conj(self.delz) + self.delzbar

    @property
    def hermitian_im(self) -> np.ndarray:
        """Hermitian gradient of Im g."""
        return 1j * (np.conj(self.delz) - self.delzbar)


def gradients(g: MixedPolynomial, pt) -> GradientBundle:
    z = as_point(pt, g.n)
    val, gz, gzb = kernels.eval_grad(g.numeric(), z[None, :])
    return GradientBundle(complex(val[0]), gz[0], gzb[0])


def weighted_radius(pt, a: Sequence[int] | None = None) -> tuple[float, np.ndarray]:
    """ρ_a(z) = Σ a_j|z_j|² and its hermitian gradient 2(a_1 z_1, …, a_n z_n)."""
    z = np.asarray(pt, dtype=np.complex128)
    w = np.ones(z.shape[-1]) if a is None else np.asarray(a, dtype=float)
    if np.any(w <= 0):
        raise GeometryError("sphere weights must be positive")
    return float(np.sum(w * np.abs(z) ** 2)), 2 * w * z


def reeb_vector(pt) -> np.ndarray:
    z = np.asarray(pt, dtype=np.complex128)
    rho = np.sum(np.abs(z) ** 2, axis=-1, keepdims=True)
    if np.any(rho == 0):
        raise GeometryError("Reeb field is undefined at the origin")
    return 1j * z / (2 * rho)


# ---------------------------------------------------------------------------
# holomorphic-like certificate


def c_matrix_batch(Z, gz, gzb) -> tuple[np.ndarray, np.ndarray]:
    """C_{a,b} = |z̄_a g_{z_b} - z̄_b g_{z_a}|² - |z_a g_{z̄_b} - z_b g_{z̄_a}|².

    Returns the symmetric matrices (m, n, n) with zero diagonal and the
    non-negative scale Σ_{a<b} (first + second square) used for relative
    sign decisions.
    """
    Zb = np.conj(Z)
    hol = Zb[:, :, None] * gz[:, None, :] - Zb[:, None, :] * gz[:, :, None]
    anti = Z[:, :, None] * gzb[:, None, :] - Z[:, None, :] * gzb[:, :, None]
    C = np.abs(hol) ** 2 - np.abs(anti) ** 2
    S = np.abs(hol) ** 2 + np.abs(anti) ** 2
    iu = np.triu_indices(Z.shape[1], 1)
    return C, S[:, iu[0], iu[1]].sum(axis=1)


def c_total_batch(Z, gz, gzb) -> tuple[np.ndarray, np.ndarray]:
    C, scale = c_matrix_batch(Z, gz, gzb)
    iu = np.triu_indices(Z.shape[1], 1)
    return C[:, iu[0], iu[1]].sum(axis=1), scale


def c_certificate(g: MixedPolynomial, pt) -> tuple[np.ndarray, float]:
    """(C_matrix, C_total) with C_total = Σ_{a<b} C_{a,b}."""
    if g.n < 2:
        raise GeometryError("the certificate needs n >= 2")
    z = as_point(pt, g.n)[None, :]
    _, gz, gzb = kernels.eval_grad(g.numeric(), z)
    C, _ = c_matrix_batch(z, gz, gzb)
    iu = np.triu_indices(g.n, 1)
    return C[0], float(C[0][iu].sum())


def c_certificate_conjugate_form(g: MixedPolynomial, pt) -> np.ndarray:
    """Variant |z_a conj(g_{z_b}) - z_b conj(g_{z_a})|² - |z_a g_{z̄_b} - z_b g_{z̄_a}|².

    Its first bracket is the conjugate of the one in :func:`c_certificate`,
    so the two agree; kept to check that numerically.
    """
    z = as_point(pt, g.n)
    b = gradients(g, z)
    fz, fzb = b.delz, b.delzbar
    hol = z[:, None] * np.conj(fz)[None, :] - z[None, :] * np.conj(fz)[:, None]
    anti = z[:, None] * fzb[None, :] - z[None, :] * fzb[:, None]
    return np.abs(hol) ** 2 - np.abs(anti) ** 2


def _require_holomorphic_homogeneous(f: MixedPolynomial, spec: CoveringSpec) -> tuple[int, int]:
    if not f.is_holomorphic():
        raise GeometryError("f must be holomorphic")
    if not spec.homogeneous:
        raise GeometryError("a homogeneous covering (all a_j equal, all b_j equal) is required")
    if spec.n != f.n:
        raise GeometryError("covering dimension does not match f")
    return spec.a[0], spec.b[0]


def c_factored_batch(f: MixedPolynomial, spec: CoveringSpec, W) -> np.ndarray:
    a, b = _require_holomorphic_homogeneous(f, spec)
    W = np.asarray(W, dtype=np.complex128)
    Wb = np.conj(W)
    _, fz, _ = kernels.eval_grad(f.numeric(), spec.apply(W))
    if a >= 1 and b >= 1:
        # (a² - b²)|w_j w_k|² |w_k^{a-1} w̄_k^{b-1} f_k - w_j^{a-1} w̄_j^{b-1} f_j|²
        u = W ** (a - 1) * Wb ** (b - 1) * fz
        diff = u[:, None, :] - u[:, :, None]
        C = (a * a - b * b) * np.abs(W[:, :, None] * W[:, None, :]) ** 2 * np.abs(diff) ** 2
    else:
        # one of a, b is zero: only one bracket survives
        hol = Wb[:, :, None] * (W ** (a - 1 if a else 0) * Wb**b * fz)[:, None, :]
        hol = hol - np.swapaxes(hol, 1, 2)
        anti = W[:, :, None] * (W**a * Wb ** (b - 1 if b else 0) * fz)[:, None, :]
        anti = anti - np.swapaxes(anti, 1, 2)
        C = a * a * np.abs(hol) ** 2 - b * b * np.abs(anti) ** 2
    idx = np.arange(W.shape[1])
    C[:, idx, idx] = 0.0
    return C


def c_factored(f: MixedPolynomial, spec: CoveringSpec, pt) -> np.ndarray:
    """C-matrix of φ_{a,b}^* f from f's holomorphic derivatives at φ(w).

    The bracket printed as ``(…)²`` is taken as a modulus square.
    """
    w = as_point(pt, f.n)
    return c_factored_batch(f, spec, w[None, :])[0]


# ---------------------------------------------------------------------------
# Milnor fibration angle


def theta_gradient_batch(W, g, gz, gzb) -> np.ndarray:
    """∇θ = i(conj(g_{z_j})/ḡ - g_{z̄_j}/g) for θ = arg g."""
    g = g[:, None]
    return 1j * (np.conj(gz) / np.conj(g) - gzb / g)


def theta_gradient(g: MixedPolynomial, pt, tol: float = ZERO_TOL) -> tuple[np.ndarray, Callable]:
    """Hermitian gradient of θ = arg g and the evaluator v ↦ dθ(v) = Re(v, ∇θ)."""
    z = as_point(pt, g.n)
    val, gz, gzb = kernels.eval_grad(g.numeric(), z[None, :])
    if abs(val[0]) <= tol:
        raise GeometryError("point lies on the zero set of g; θ is undefined")
    grad = theta_gradient_batch(z[None, :], val, gz, gzb)[0]

    def dtheta(v) -> float:
        return float(np.real(hermitian(np.asarray(v, dtype=np.complex128), grad)))

    return grad, dtheta


def reeb_pairing_batch(W, g, gz, gzb) -> np.ndarray:
    """dθ(R) = Re(R, ∇θ) with R = iw/(2ρ)."""
    return np.real(hermitian(reeb_vector(W), theta_gradient_batch(W, g, gz, gzb)))


def _check_pairing_point(g: MixedPolynomial, pt, tol: float):
    z = as_point(pt, g.n)
    if not np.any(z):
        raise GeometryError("the Reeb field is undefined at the origin")
    val, gz, gzb = kernels.eval_grad(g.numeric(), z[None, :])
    if abs(val[0]) <= tol:
        raise GeometryError("point lies on the zero set of g; θ is undefined")
    return z[None, :], val, gz, gzb


def reeb_pairing(g: MixedPolynomial, pt, *, normalized: bool = True, tol: float = ZERO_TOL) -> float:
    """dθ evaluated on the Reeb direction at ``pt``.

    By default returns 4ρ·dθ(R) = dθ(2iw), which does not depend on the
    radius and equals 2·d·(a-b) for a pull-back of a homogeneous degree-d f
    (more generally 2·m_p for strongly polar homogeneous g with unit
    weights). ``normalized=False`` gives Re(R, ∇θ) itself with R = iw/(2ρ).
    """
    W, val, gz, gzb = _check_pairing_point(g, pt, tol)
    raw = float(reeb_pairing_batch(W, val, gz, gzb)[0])
    return 4 * float(np.sum(np.abs(W) ** 2)) * raw if normalized else raw


# ---------------------------------------------------------------------------
# open-book correction terms


@dataclass(frozen=True)
class ContactQuantities:
    rho: float
    g: complex
    C_matrix: np.ndarray
    C_total: float
    reeb: np.ndarray
    theta_grad: np.ndarray
    dtheta_R: float
    v11: np.ndarray
    v12: np.ndarray
    v21: np.ndarray
    v22: np.ndarray
    gamma: float
    beta: float  # |Σ conj(f_j) w̄_j^a w_j^b|² / ‖w‖²
    beta_raw: float  # same without the 1/‖w‖² factor
    correction: float  # ‖v11‖² - ‖v21‖²
    parallel_residual: float  # max of ‖π(conj ∇_∂g)‖/‖∇_∂g‖ and ‖π(∇_∂̄g)‖/‖∇_∂̄g‖

    @property
    def normalized_dtheta_R(self) -> float:
        return 4 * self.rho * self.dtheta_R


def _project_xi(V, W):
    """π(v) = v - (v, w)w/‖w‖² row-wise; returns (π(v), π'(v))."""
    coeff = hermitian(V, W) / np.sum(np.abs(W) ** 2, axis=-1)
    par = coeff[..., None] * W
    return V - par, par


def split_v_batch(W, g, gz, gzb):
    """(v11, v12, v21, v22) from v1 = g·conj(∇_∂g), v2 = ḡ·∇_∂̄g split along ξ ⊕ ℂw."""
    v11, v12 = _project_xi(g[:, None] * np.conj(gz), W)
    v21, v22 = _project_xi(np.conj(g)[:, None] * gzb, W)
    return v11, v12, v21, v22


def correction_batch(W, g, gz, gzb) -> tuple[np.ndarray, np.ndarray]:
    """‖v11‖² - ‖v21‖² and the scale ‖v11‖² + ‖v21‖² (valid for any mixed g)."""
    v11, _, v21, _ = split_v_batch(W, g, gz, gzb)
    n11 = np.sum(np.abs(v11) ** 2, axis=1)
    n21 = np.sum(np.abs(v21) ** 2, axis=1)
    return n11 - n21, n11 + n21


def open_book_batch(f: MixedPolynomial, spec: CoveringSpec, W) -> dict[str, np.ndarray]:
    """Vectorised open-book quantities at the rows of ``W`` (g = φ*f)."""
    a, b = _require_holomorphic_homogeneous(f, spec)
    g_poly = _pullback_cached(f, spec)
    W = np.asarray(W, dtype=np.complex128)
    g, gz, gzb = kernels.eval_grad(g_poly.numeric(), W)
    v11, v12, v21, v22 = split_v_batch(W, g, gz, gzb)
    _, fz, _ = kernels.eval_grad(f.numeric(), spec.apply(W))
    absw2 = np.abs(W) ** 2
    gamma = np.sum(np.abs(fz) ** 2 * absw2 ** (a + b - 1), axis=1)
    beta_raw = np.abs(np.sum(np.conj(fz) * np.conj(W) ** a * W**b, axis=1)) ** 2
    beta = beta_raw / np.sum(absw2, axis=1)
    n11 = np.sum(np.abs(v11) ** 2, axis=1)
    n21 = np.sum(np.abs(v21) ** 2, axis=1)

    def _par(v):
        num = np.linalg.norm(_project_xi(v, W)[0], axis=1)
        den = np.linalg.norm(v, axis=1)
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)

    return {
        "W": W,
        "g": g,
        "gz": gz,
        "gzb": gzb,
        "v11": v11,
        "v12": v12,
        "v21": v21,
        "v22": v22,
        "norm_v11_sq": n11,
        "norm_v21_sq": n21,
        "gamma": gamma,
        "beta": beta,
        "beta_raw": beta_raw,
        "correction": n11 - n21,
        "parallel_residual": np.maximum(_par(np.conj(gz)), _par(gzb)),
        "dtheta_R": reeb_pairing_batch(W, g, gz, gzb),
    }


def open_book_terms(f: MixedPolynomial, spec: CoveringSpec, pt, tol: float = ZERO_TOL) -> ContactQuantities:
    """All per-point quantities of the open-book argument for g = φ_{a,b}^* f."""
    w = as_point(pt, f.n)
    if not np.any(w):
        raise GeometryError("origin")
    q = open_book_batch(f, spec, w[None, :])
    if abs(q["g"][0]) <= tol:
        raise GeometryError("point lies on the zero set of g")
    C, _ = c_matrix_batch(q["W"], q["gz"], q["gzb"])
    iu = np.triu_indices(f.n, 1)
    return ContactQuantities(
        rho=float(np.sum(np.abs(w) ** 2)),
        g=complex(q["g"][0]),
        C_matrix=C[0],
        C_total=float(C[0][iu].sum()),
        reeb=reeb_vector(w),
        theta_grad=theta_gradient_batch(q["W"], q["g"], q["gz"], q["gzb"])[0],
        dtheta_R=float(q["dtheta_R"][0]),
        v11=q["v11"][0],
        v12=q["v12"][0],
        v21=q["v21"][0],
        v22=q["v22"][0],
        gamma=float(q["gamma"][0]),
        beta=float(q["beta"][0]),
        beta_raw=float(q["beta_raw"][0]),
        correction=float(q["correction"][0]),
        parallel_residual=float(q["parallel_residual"][0]),
    )


def modified_reeb_pairing(f: MixedPolynomial, spec: CoveringSpec, pt, c: float, *, normalized: bool = True) -> float:
    """dθ(R_c) for the rescaled contact form α_c = e^{-c|g|²} α.

    |g|² dθ(R_c) = k|g|² dθ(R) + (ck/2)(‖v11‖² - ‖v21‖²) with k = e^{c|g|²}.
    ``normalized`` scales by 4ρ exactly as in :func:`reeb_pairing`.
    """
    if c < 0:
        raise GeometryError("c must be non-negative")
    q = open_book_terms(f, spec, pt)
    g2 = abs(q.g) ** 2
    k = np.exp(c * g2)
    raw = float(k * (q.dtheta_R + 0.5 * c * q.correction / g2))
    return 4 * q.rho * raw if normalized else raw


# ---------------------------------------------------------------------------
# exterior-algebra verification


def _real_components(h) -> np.ndarray:
    """Interleave (Re, Im) of a complex vector into ℝ^{2n} order."""
    h = np.asarray(h)
    out = np.empty(2 * h.shape[0], dtype=h.real.dtype)
    out[0::2] = h.real
    out[1::2] = h.imag
    return out


def contact_alpha(pt) -> FormAtPoint:
    """α = 2Σ(x_j dy_j - y_j dx_j) at ``pt``."""
    z = np.asarray(pt, dtype=np.complex128)
    comps = np.empty(2 * z.shape[0])
    comps[0::2] = -2 * z.imag
    comps[1::2] = 2 * z.real
    return FormAtPoint.one_form(comps)


def contact_omega(n: int) -> FormAtPoint:
    """ω = dα = 4Σ dx_j∧dy_j."""
    return FormAtPoint(2 * n, 2, {(2 * j, 2 * j + 1): 4.0 for j in range(n)})


def differential(hermitian_grad) -> FormAtPoint:
    """The real 1-form v ↦ Re(v, ∇h) of a real function with hermitian gradient ∇h."""
    return FormAtPoint.one_form(_real_components(hermitian_grad))


def wirtinger_vectors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Real-coordinate components of ∂/∂z_a and ∂/∂z̄_a (rows)."""
    dz = np.zeros((n, 2 * n), dtype=complex)
    dzb = np.zeros((n, 2 * n), dtype=complex)
    for a in range(n):
        dz[a, 2 * a], dz[a, 2 * a + 1] = 0.5, -0.5j
        dzb[a, 2 * a], dzb[a, 2 * a + 1] = 0.5, 0.5j
    return dz, dzb


def mixed_coefficients(form: FormAtPoint, n: int) -> np.ndarray:
    """M_{ab} with form = i Σ M_{ab} dz_a∧dz̄_b + (dz∧dz, dz̄∧dz̄ terms)."""
    dz, dzb = wirtinger_vectors(n)
    M = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            M[a, b] = -1j * form(dz[a], dzb[b])
    return M


@dataclass(frozen=True)
class WedgeCheck:
    lhs: float  # top coefficient of dρ∧α∧ω^{n-2}∧d(Re g)∧d(Im g)
    rhs: float  # 4^{n-1}(n-2)!·C
    A_symbolic: np.ndarray
    A_extracted: np.ndarray
    B_symbolic: np.ndarray
    B_extracted: np.ndarray
    C_from_AB: np.ndarray

    @property
    def rel_err(self) -> float:
        return rel_err(self.lhs, self.rhs)


def wedge_verify(g: MixedPolynomial, pt) -> WedgeCheck:
    n = g.n
    if n not in (2, 3):
        raise GeometryError("wedge verification is implemented for n = 2 and n = 3 only")
    z = as_point(pt, n)
    bundle = gradients(g, z)
    fz, fzb = bundle.delz, bundle.delzbar
    _, grad_rho = weighted_radius(z)
    drho = differential(grad_rho)
    alpha = contact_alpha(z)
    dre = differential(bundle.hermitian_re)
    dim = differential(bundle.hermitian_im)
    form = drho ^ alpha
    for _ in range(n - 2):
        form = form ^ contact_omega(n)
    top = form ^ dre ^ dim
    _, C_total = c_certificate(g, z)

    A_sym = 2 * np.conj(z)[:, None] * z[None, :]
    B_sym = 0.5 * (fz[:, None] * np.conj(fz)[None, :] - np.conj(fzb)[:, None] * fzb[None, :])
    A_ext = mixed_coefficients(drho ^ alpha, n)
    B_ext = mixed_coefficients(dre ^ dim, n)
    C_AB = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            if a != b:
                val = A_sym[a, a] * B_sym[b, b] + A_sym[b, b] * B_sym[a, a] - A_sym[a, b] * B_sym[b, a] - A_sym[b, a] * B_sym[a, b]
                C_AB[a, b] = val.real
    return WedgeCheck(
        lhs=float(np.real(top.top_coefficient())),
        rhs=float(4 ** (n - 1) * factorial(n - 2) * C_total),
        A_symbolic=A_sym,
        A_extracted=A_ext,
        B_symbolic=B_sym,
        B_extracted=B_ext,
        C_from_AB=C_AB,
    )
