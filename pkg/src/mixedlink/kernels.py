"""Hot numeric kernels: batched polynomial/gradient evaluation and
Gauss-Newton projection onto the link constraints.

Every kernel exists twice: a loop form compiled with numba ``@njit`` and a
vectorised pure-numpy form. ``MIXEDLINK_BACKEND=numpy`` forces the numpy
path; the default is numba when it imports. Both paths implement the same
arithmetic and are cross-checked in the test suite.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    numba = None
    NUMBA_AVAILABLE = False

__all__ = [
    "NUMBA_AVAILABLE",
    "NumericPoly",
    "backend",
    "eval_grad",
    "project",
    "MODE_LINK",
    "MODE_TUBE",
    "MODE_ZERO",
]

MODE_LINK = 0  # rho_a = r^2, Re g = 0, Im g = 0
MODE_TUBE = 1  # rho = r^2, |g| = delta
MODE_ZERO = 2  # Re g = 0, Im g = 0

_EXPAND = 5  # step doublings tried after a full Gauss-Newton step is accepted


def backend() -> str:
    choice = os.environ.get("MIXEDLINK_BACKEND", "numba" if NUMBA_AVAILABLE else "numpy").lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"MIXEDLINK_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba" and not NUMBA_AVAILABLE:
        return "numpy"
    return choice


@dataclass(frozen=True)
class NumericPoly:
    """Floating-point array form of a mixed polynomial."""

    n: int
    nu: np.ndarray  # (T, n) int64
    mu: np.ndarray  # (T, n) int64
    coef: np.ndarray  # (T,) complex128

    @classmethod
    def from_terms(cls, n: int, terms: Mapping) -> "NumericPoly":
        keys = list(terms)
        nu = np.array([k[0] for k in keys], dtype=np.int64).reshape(len(keys), n)
        mu = np.array([k[1] for k in keys], dtype=np.int64).reshape(len(keys), n)
        coef = np.array([complex(terms[k]) for k in keys], dtype=np.complex128)
        return cls(n, nu, mu, coef)


# ---------------------------------------------------------------------------
# numpy implementations


def _eval_grad_numpy(nu, mu, coef, Z):
    Z = np.asarray(Z, dtype=np.complex128)
    m, n = Z.shape
    if coef.shape[0] == 0:
        zero = np.zeros((m, n), dtype=np.complex128)
        return np.zeros(m, dtype=np.complex128), zero, zero.copy()
    Zb = np.conj(Z)
    pz = Z[:, None, :] ** nu[None, :, :]  # (m, T, n)
    pzb = Zb[:, None, :] ** mu[None, :, :]
    full = pz * pzb
    vals = np.einsum("t,mt->m", coef, np.prod(full, axis=2))
    dz = np.empty((m, n), dtype=np.complex128)
    dzb = np.empty((m, n), dtype=np.complex128)
    for j in range(n):
        others = np.prod(np.delete(full, j, axis=2), axis=2)  # (m, T)
        dnu = nu[None, :, j] * Z[:, None, j] ** np.maximum(nu[None, :, j] - 1, 0)
        dz[:, j] = np.einsum("t,mt->m", coef, others * dnu * pzb[:, :, j])
        dmu = mu[None, :, j] * Zb[:, None, j] ** np.maximum(mu[None, :, j] - 1, 0)
        dzb[:, j] = np.einsum("t,mt->m", coef, others * dmu * pz[:, :, j])
    return vals, dz, dzb


def _residual_and_jacobian_numpy(nu, mu, coef, weights, X, mode, r2, delta2):
    """Constraint residuals F (m, k) and real Jacobian J (m, k, 2n)."""
    m, n = X.shape
    g, gz, gzb = _eval_grad_numpy(nu, mu, coef, X)
    rows = []
    res = []
    if mode != MODE_ZERO:
        w = weights if mode == MODE_LINK else np.ones(n)
        res.append(np.sum(w * np.abs(X) ** 2, axis=1) - r2)
        rows.append(2.0 * w * X)
    if mode == MODE_TUBE:
        # |g| - delta is linear across a smooth zero set, |g|^2 is not
        ag = np.abs(g)
        inv = np.where(ag > 0, 1.0 / np.where(ag > 0, ag, 1.0), 0.0)
        res.append(ag - np.sqrt(delta2))
        rows.append((g[:, None] * np.conj(gz) + np.conj(g)[:, None] * gzb) * inv[:, None])
    else:
        res.append(g.real)
        res.append(g.imag)
        rows.append(np.conj(gz) + gzb)
        rows.append(1j * (np.conj(gz) - gzb))
    F = np.stack(res, axis=1)
    H = np.stack(rows, axis=1)  # hermitian gradients (m, k, n)
    J = np.empty((m, H.shape[1], 2 * n))
    J[:, :, 0::2] = H.real
    J[:, :, 1::2] = H.imag
    return F, J, g


def _pack(X):
    out = np.empty((X.shape[0], 2 * X.shape[1]))
    out[:, 0::2] = X.real
    out[:, 1::2] = X.imag
    return out


def _unpack(x):
    return x[:, 0::2] + 1j * x[:, 1::2]


def _min_sv_numpy(J):
    norms = np.linalg.norm(J, axis=2, keepdims=True)
    Jn = np.where(norms > 0, J / np.where(norms > 0, norms, 1.0), 0.0)
    return np.linalg.svd(Jn, compute_uv=False)[:, -1]


def _row_scale_numpy(J):
    # merit weights 1/|grad F_i|: each term then estimates a distance, so
    # constraints of very different magnitude are traded off fairly
    norms = np.linalg.norm(J, axis=2)
    return np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 1.0)


def _gn_step_numpy(J, F):
    # minimum-norm least-squares step via SVD; rank-deficient rows are cut off
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    cut = 1e-13 * np.maximum(s[:, :1], 1e-300)
    sinv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    coeffs = np.einsum("mki,mk->mi", U, F) * sinv
    return -np.einsum("mij,mi->mj", Vt, coeffs)


def _project_numpy(nu, mu, coef, weights, seeds, mode, r2, delta2, max_iter, tol_g, tol_rho):
    X = _pack(np.asarray(seeds, dtype=np.complex128))
    m = X.shape[0]
    active = np.ones(m, dtype=bool)
    converged = np.zeros(m, dtype=bool)
    iters = np.zeros(m, dtype=np.int64)

    def residual_norm(x, D):
        F, _, _ = _residual_and_jacobian_numpy(nu, mu, coef, weights, _unpack(x), mode, r2, delta2)
        return np.linalg.norm(D * F, axis=1)

    for it in range(max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        F, J, g = _residual_and_jacobian_numpy(nu, mu, coef, weights, _unpack(X[idx]), mode, r2, delta2)
        rg, rr = _split_residuals(F, g, mode, delta2)
        done = (rg <= tol_g) & (rr <= tol_rho)
        converged[idx[done]] = True
        active[idx[done]] = False
        if it == max_iter:
            break
        keep = ~done
        idx, F, J = idx[keep], F[keep], J[keep]
        if idx.size == 0:
            break
        step = _gn_step_numpy(J, F)
        D = _row_scale_numpy(J)
        f0 = np.linalg.norm(D * F, axis=1)
        t = np.ones(idx.size)
        pending = np.ones(idx.size, dtype=bool)
        x0 = X[idx]
        fbest = np.full(idx.size, np.inf)
        for _ in range(40):
            sel = np.flatnonzero(pending)
            if sel.size == 0:
                break
            trial = x0[sel] + t[sel, None] * step[sel]
            f1 = residual_norm(trial, D[sel])
            ok = f1 < f0[sel]
            X[idx[sel[ok]]] = trial[ok]
            fbest[sel[ok]] = f1[ok]
            pending[sel[ok]] = False
            t[sel[~ok]] *= 0.5
        # expand while it keeps paying off; GN undershoots at high-order zeros
        grow = np.flatnonzero(~pending & (t == 1.0))
        for _ in range(_EXPAND):
            if grow.size == 0:
                break
            trial = x0[grow] + 2.0 * t[grow, None] * step[grow]
            f2 = residual_norm(trial, D[grow])
            ok = f2 < fbest[grow]
            X[idx[grow[ok]]] = trial[ok]
            fbest[grow[ok]] = f2[ok]
            t[grow[ok]] *= 2.0
            grow = grow[ok]
        # no decrease along the Gauss-Newton direction: give up on this seed
        active[idx[pending]] = False
        iters[idx[~pending]] += 1
    Z = _unpack(X)
    F, J, g = _residual_and_jacobian_numpy(nu, mu, coef, weights, Z, mode, r2, delta2)
    rg, rr = _split_residuals(F, g, mode, delta2)
    return Z, rg, rr, _min_sv_numpy(J), converged, iters


def _split_residuals(F, g, mode, delta2):
    if mode == MODE_LINK:
        return np.abs(g), np.abs(F[:, 0])
    if mode == MODE_TUBE:
        return np.abs(np.abs(g) - np.sqrt(delta2)), np.abs(F[:, 0])
    return np.abs(g), np.zeros(F.shape[0])


# ---------------------------------------------------------------------------
# numba implementations

if NUMBA_AVAILABLE:
    njit = numba.njit(cache=True)

    @njit
    def _ipow(z, e):
        out = 1.0 + 0.0j
        for _ in range(e):
            out *= z
        return out

    @njit
    def _eval_point_nb(nu, mu, coef, z, dz, dzb):
        T, n = nu.shape
        val = 0.0 + 0.0j
        for j in range(n):
            dz[j] = 0.0
            dzb[j] = 0.0
        pz = np.empty(n, dtype=np.complex128)
        pzb = np.empty(n, dtype=np.complex128)
        for t in range(T):
            for j in range(n):
                pz[j] = _ipow(z[j], nu[t, j])
                pzb[j] = _ipow(np.conj(z[j]), mu[t, j])
            full = coef[t]
            for j in range(n):
                full *= pz[j] * pzb[j]
            val += full
            for j in range(n):
                if nu[t, j] == 0 and mu[t, j] == 0:
                    continue
                others = coef[t]
                for k in range(n):
                    if k != j:
                        others *= pz[k] * pzb[k]
                if nu[t, j] > 0:
                    dz[j] += others * nu[t, j] * _ipow(z[j], nu[t, j] - 1) * pzb[j]
                if mu[t, j] > 0:
                    dzb[j] += others * mu[t, j] * _ipow(np.conj(z[j]), mu[t, j] - 1) * pz[j]
        return val

    @njit
    def _eval_grad_nb(nu, mu, coef, Z):
        m, n = Z.shape
        vals = np.empty(m, dtype=np.complex128)
        dz = np.empty((m, n), dtype=np.complex128)
        dzb = np.empty((m, n), dtype=np.complex128)
        for i in range(m):
            vals[i] = _eval_point_nb(nu, mu, coef, Z[i], dz[i], dzb[i])
        return vals, dz, dzb

    @njit
    def _fill_nb(nu, mu, coef, weights, x, mode, r2, delta2, F, J, gz, gzb):
        """Residuals and real Jacobian at packed point ``x``; returns g."""
        n = x.shape[0] // 2
        z = np.empty(n, dtype=np.complex128)
        for j in range(n):
            z[j] = x[2 * j] + 1j * x[2 * j + 1]
        g = _eval_point_nb(nu, mu, coef, z, gz, gzb)
        r = 0
        if mode != 2:
            s = 0.0
            for j in range(n):
                w = weights[j] if mode == 0 else 1.0
                s += w * (z[j].real ** 2 + z[j].imag ** 2)
                h = 2.0 * w * z[j]
                J[r, 2 * j] = h.real
                J[r, 2 * j + 1] = h.imag
            F[r] = s - r2
            r += 1
        if mode == 1:
            # |g| - delta is linear across a smooth zero set, |g|^2 is not
            ag = abs(g)
            F[r] = ag - np.sqrt(delta2)
            inv = 1.0 / ag if ag > 0 else 0.0
            for j in range(n):
                h = (g * np.conj(gz[j]) + np.conj(g) * gzb[j]) * inv
                J[r, 2 * j] = h.real
                J[r, 2 * j + 1] = h.imag
        else:
            F[r] = g.real
            F[r + 1] = g.imag
            for j in range(n):
                h1 = np.conj(gz[j]) + gzb[j]
                h2 = 1j * (np.conj(gz[j]) - gzb[j])
                J[r, 2 * j] = h1.real
                J[r, 2 * j + 1] = h1.imag
                J[r + 1, 2 * j] = h2.real
                J[r + 1, 2 * j + 1] = h2.imag
        return g

    @njit
    def _split_nb(F, g, mode, delta2):
        if mode == 0:
            return abs(g), abs(F[0])
        if mode == 1:
            return abs(abs(g) - np.sqrt(delta2)), abs(F[0])
        return abs(g), 0.0

    @njit
    def _min_sv_nb(J):
        k, d = J.shape
        Jn = np.zeros((k, d))
        for r in range(k):
            s = 0.0
            for c in range(d):
                s += J[r, c] ** 2
            s = np.sqrt(s)
            if s > 0:
                for c in range(d):
                    Jn[r, c] = J[r, c] / s
        _, sv, _ = np.linalg.svd(Jn, full_matrices=False)
        return sv[-1]

    @njit
    def _project_nb(nu, mu, coef, weights, seeds, mode, r2, delta2, max_iter, tol_g, tol_rho):
        m, n = seeds.shape
        k = 2 if mode == 1 else (3 if mode == 0 else 2)
        Zout = np.empty((m, n), dtype=np.complex128)
        rg_out = np.empty(m)
        rr_out = np.empty(m)
        sv_out = np.empty(m)
        conv = np.zeros(m, dtype=np.bool_)
        iters = np.zeros(m, dtype=np.int64)
        F = np.empty(k)
        F1 = np.empty(k)
        D = np.empty(k)
        J = np.empty((k, 2 * n))
        J1 = np.empty((k, 2 * n))
        gz = np.empty(n, dtype=np.complex128)
        gzb = np.empty(n, dtype=np.complex128)
        x = np.empty(2 * n)
        trial = np.empty(2 * n)
        trial2 = np.empty(2 * n)
        for i in range(m):
            for j in range(n):
                x[2 * j] = seeds[i, j].real
                x[2 * j + 1] = seeds[i, j].imag
            for it in range(max_iter + 1):
                g = _fill_nb(nu, mu, coef, weights, x, mode, r2, delta2, F, J, gz, gzb)
                rg, rr = _split_nb(F, g, mode, delta2)
                if rg <= tol_g and rr <= tol_rho:
                    conv[i] = True
                    break
                if it == max_iter:
                    break
                U, s, Vt = np.linalg.svd(J, full_matrices=False)
                cut = 1e-13 * max(s[0], 1e-300)
                coeffs = np.zeros(s.shape[0])
                for a in range(s.shape[0]):
                    if s[a] > cut:
                        acc = 0.0
                        for b in range(k):
                            acc += U[b, a] * F[b]
                        coeffs[a] = acc / s[a]
                step = np.zeros(2 * n)
                for a in range(s.shape[0]):
                    for c in range(2 * n):
                        step[c] -= Vt[a, c] * coeffs[a]
                for b in range(k):
                    s2 = 0.0
                    for c in range(2 * n):
                        s2 += J[b, c] ** 2
                    D[b] = 1.0 / np.sqrt(s2) if s2 > 0 else 1.0
                f0 = 0.0
                for b in range(k):
                    f0 += (D[b] * F[b]) ** 2
                t = 1.0
                accepted = False
                for _ in range(40):
                    for c in range(2 * n):
                        trial[c] = x[c] + t * step[c]
                    _fill_nb(nu, mu, coef, weights, trial, mode, r2, delta2, F1, J1, gz, gzb)
                    f1 = 0.0
                    for b in range(k):
                        f1 += (D[b] * F1[b]) ** 2
                    if f1 < f0:
                        accepted = True
                        break
                    t *= 0.5
                if not accepted:
                    break
                if t == 1.0:
                    # expand while it keeps paying off; GN undershoots at high-order zeros
                    for _ in range(_EXPAND):
                        for c in range(2 * n):
                            trial2[c] = x[c] + 2.0 * t * step[c]
                        _fill_nb(nu, mu, coef, weights, trial2, mode, r2, delta2, F1, J1, gz, gzb)
                        f2 = 0.0
                        for b in range(k):
                            f2 += (D[b] * F1[b]) ** 2
                        if f2 >= f1:
                            break
                        f1 = f2
                        t *= 2.0
                        for c in range(2 * n):
                            trial[c] = trial2[c]
                for c in range(2 * n):
                    x[c] = trial[c]
                iters[i] += 1
            g = _fill_nb(nu, mu, coef, weights, x, mode, r2, delta2, F, J, gz, gzb)
            rg_out[i], rr_out[i] = _split_nb(F, g, mode, delta2)
            sv_out[i] = _min_sv_nb(J)
            for j in range(n):
                Zout[i, j] = x[2 * j] + 1j * x[2 * j + 1]
        return Zout, rg_out, rr_out, sv_out, conv, iters


# ---------------------------------------------------------------------------
# dispatch


def eval_grad(poly: NumericPoly, Z, which: str | None = None):
    """Values and Wirtinger gradients of ``poly`` at the rows of ``Z``.

    Returns ``(g, g_z, g_zbar)`` with shapes ``(m,)``, ``(m, n)``, ``(m, n)``.
    """
    Z = np.ascontiguousarray(np.atleast_2d(np.asarray(Z, dtype=np.complex128)))
    if Z.shape[1] != poly.n:
        raise ValueError(f"points have dimension {Z.shape[1]}, polynomial has {poly.n}")
    if (which or backend()) == "numba" and NUMBA_AVAILABLE and poly.coef.shape[0]:
        return _eval_grad_nb(poly.nu, poly.mu, poly.coef, Z)
    return _eval_grad_numpy(poly.nu, poly.mu, poly.coef, Z)


def project(
    poly: NumericPoly,
    seeds,
    *,
    mode: int = MODE_LINK,
    weights=None,
    r2: float = 1.0,
    delta2: float = 0.0,
    max_iter: int = 100,
    tol_g: float = 1e-11,
    tol_rho: float = 1e-11,
    which: str | None = None,
):
    """Damped Gauss-Newton projection of each seed onto the constraint set.

    Returns ``(points, residual_g, residual_rho, min_sv, converged, iterations)``.
    ``min_sv`` is the smallest singular value of the row-normalised
    constraint Jacobian at the final point.
    """
    seeds = np.ascontiguousarray(np.atleast_2d(np.asarray(seeds, dtype=np.complex128)))
    w = np.ones(poly.n) if weights is None else np.asarray(weights, dtype=np.float64)
    args = (poly.nu, poly.mu, poly.coef, w, seeds, int(mode), float(r2), float(delta2), int(max_iter), float(tol_g), float(tol_rho))
    if (which or backend()) == "numba" and NUMBA_AVAILABLE:
        return _project_nb(*args)
    return _project_numpy(*args)
