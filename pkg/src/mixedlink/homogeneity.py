"""Radial / polar weighted homogeneity of mixed polynomials.

A mixed polynomial is radially homogeneous with weight Q and degree m_r when
every term satisfies Σ q_j(ν_j + μ_j) = m_r, and polar homogeneous with
weight P and degree m_p when Σ p_j(ν_j - μ_j) = m_p. Detection is exact:
the weight is a positive integer point of the rational nullspace of the
pairwise degree differences.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from . import _linalg
from .mixed_poly import DegenerateInputError, MixedPolynomial, MixedTerm

__all__ = [
    "HomogeneityError",
    "WeightInfo",
    "HomogeneityReport",
    "radial_degree",
    "polar_degree",
    "detect_weights",
    "EulerResiduals",
    "euler_residuals",
]


class HomogeneityError(ValueError):
    pass


def _check_dim(term: MixedTerm, weights: Sequence[int]) -> None:
    if len(weights) != len(term.nu):
        raise ValueError(f"weight has length {len(weights)}, term has {len(term.nu)} variables")


def radial_degree(term: MixedTerm, Q: Sequence[int]) -> int:
    _check_dim(term, Q)
    return sum(q * (a + b) for q, a, b in zip(Q, term.nu, term.mu))


def polar_degree(term: MixedTerm, P: Sequence[int]) -> int:
    _check_dim(term, P)
    return sum(p * (a - b) for p, a, b in zip(P, term.nu, term.mu))


@dataclass(frozen=True)
class WeightInfo:
    weights: tuple[int, ...]
    degree: int
    unique: bool  # False when the support leaves several primitive solutions


@dataclass(frozen=True)
class HomogeneityReport:
    radial: WeightInfo | None
    polar: WeightInfo | None
    strongly_polar: bool
    strongly_polar_positive: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def polar_weighted_homogeneous(self) -> bool:
        """Both actions exist and both degrees are non-zero."""
        return (
            self.radial is not None
            and self.polar is not None
            and self.radial.degree != 0
            and self.polar.degree != 0
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["notes"] = list(self.notes)
        for key in ("radial", "polar"):
            if out[key] is not None:
                out[key]["weights"] = list(out[key]["weights"])
        return out


def _difference_rows(vectors: list[tuple[int, ...]]) -> list[list[int]]:
    base = vectors[0]
    return [[a - b for a, b in zip(v, base)] for v in vectors[1:]]


def _solve(vectors: list[tuple[int, ...]], n: int) -> tuple[tuple[int, ...] | None, bool]:
    rows = _difference_rows(vectors)
    dim = n - _linalg.rank(rows, n)
    return _linalg.lexmin_positive(rows, n), dim == 1


def detect_weights(p: MixedPolynomial) -> HomogeneityReport:
    """Find primitive positive weights making ``p`` radially / polar homogeneous.

    When the support does not pin the weight down (nullspace of dimension > 1)
    the lexicographically smallest positive primitive solution is returned
    and ``unique`` is False. If a common weight serves both actions it is
    preferred, so ``strongly_polar`` implies Q == P in the report.
    """
    if p.is_zero():
        raise DegenerateInputError("zero polynomial has no weights")
    n = p.n
    terms = list(p)
    supports = [t.support for t in terms]
    polars = [t.polar for t in terms]
    notes: list[str] = []

    Q, q_unique = _solve(supports, n)
    P, p_unique = _solve(polars, n)
    radial = polar = None
    if Q is not None:
        m_r = radial_degree(terms[0], Q)
        if m_r == 0:
            notes.append("radial degree would be 0 (constant polynomial); radial action absent")
        else:
            radial = WeightInfo(Q, m_r, q_unique)
    if P is not None:
        polar = WeightInfo(P, polar_degree(terms[0], P), p_unique)

    strongly = False
    if radial is not None and polar is not None:
        joint_rows = _difference_rows(supports) + _difference_rows(polars)
        W = _linalg.lexmin_positive(joint_rows, n)
        if W is not None:
            strongly = True
            if W != radial.weights or W != polar.weights:
                notes.append("weights are not unique; reporting the common weight for both actions")
            radial = WeightInfo(W, radial_degree(terms[0], W), q_unique)
            polar = WeightInfo(W, polar_degree(terms[0], W), p_unique)
    if polar is not None and polar.degree == 0:
        notes.append("polar degree is 0")
    if radial is not None and not radial.unique:
        notes.append("radial weight not unique (support of deficient rank)")
    if polar is not None and not polar.unique:
        notes.append("polar weight not unique (support of deficient rank)")
    return HomogeneityReport(
        radial=radial,
        polar=polar,
        strongly_polar=strongly,
        strongly_polar_positive=strongly and polar.degree > 0,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class EulerResiduals:
    radial: MixedPolynomial
    polar: MixedPolynomial
    strong_holomorphic: MixedPolynomial | None
    strong_antiholomorphic: MixedPolynomial | None

    def all(self) -> list[MixedPolynomial]:
        return [r for r in (self.radial, self.polar, self.strong_holomorphic, self.strong_antiholomorphic) if r is not None]

    def all_zero(self) -> bool:
        return all(r.is_zero() for r in self.all())


def euler_residuals(
    p: MixedPolynomial,
    Q: Sequence[int],
    m_r: int,
    P: Sequence[int],
    m_p: int,
) -> EulerResiduals:
    """Symbolic residuals of the radial, polar and (when Q == P) strong Euler equalities.

    Each residual is the zero polynomial exactly when ``p`` is homogeneous of
    the stated type.
    """
    n = p.n
    if len(Q) != n or len(P) != n:
        raise ValueError("weight length does not match dimension")
    if min(Q) < 1 or min(P) < 1:
        raise ValueError("weights must be positive")
    z = [MixedPolynomial.variable(n, j) for j in range(n)]
    zb = [MixedPolynomial.conj_variable(n, j) for j in range(n)]
    hol = [p.dz(j) * z[j] for j in range(n)]
    anti = [p.dzbar(j) * zb[j] for j in range(n)]
    zero = MixedPolynomial.zero(n)

    radial = p.scale(m_r) - sum(((h + a).scale(q) for q, h, a in zip(Q, hol, anti)), zero)
    polar = p.scale(m_p) - sum(((h - a).scale(w) for w, h, a in zip(P, hol, anti)), zero)

    strong_h = strong_a = None
    if tuple(Q) == tuple(P):
        if (m_r + m_p) % 2:
            raise HomogeneityError(
                f"(m_r + m_p)/2 = {Fraction(m_r + m_p, 2)} is not an integer; "
                "no strongly polar homogeneous polynomial has these degrees"
            )
        strong_h = sum((h.scale(w) for w, h in zip(P, hol)), zero) - p.scale((m_r + m_p) // 2)
        strong_a = sum((a.scale(w) for w, a in zip(P, anti)), zero) - p.scale((m_r - m_p) // 2)
    return EulerResiduals(radial, polar, strong_h, strong_a)
